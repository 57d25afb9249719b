"""Readers and writers for the on-disk formats.

Matrices travel as Matrix Market coordinate files (1-indexed, header
``%%MatrixMarket matrix coordinate real general``); vocabularies as plain
UTF-8 text, one term per line, line number = term index.  Parse failures
report the offending line number.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.sparse as sp

from .errors import DataError

__all__ = [
    "read_matrix_market",
    "write_matrix_market",
    "read_vocabulary",
    "write_vocabulary",
]

_log = logging.getLogger(__name__)


def read_matrix_market(path) -> sp.coo_matrix:
    """Parse a coordinate-format Matrix Market file into COO.

    Accepts ``real`` or ``integer`` fields with ``general`` symmetry.
    Duplicate coordinates are summed; explicit zeros are kept here (the
    ingest step drops and reports them).
    """
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    shape = None
    declared_nnz = 0
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        tokens = header.strip().lower().split()
        if len(tokens) != 5 or tokens[0] != "%%matrixmarket":
            raise DataError(f"{path}:1: not a Matrix Market header: {header.strip()!r}")
        if tokens[1] != "matrix" or tokens[2] != "coordinate":
            raise DataError(f"{path}:1: only 'matrix coordinate' files are supported")
        if tokens[3] not in ("real", "integer"):
            raise DataError(f"{path}:1: unsupported field type {tokens[3]!r}")
        if tokens[4] != "general":
            raise DataError(f"{path}:1: only 'general' symmetry is supported")

        for lineno, line in enumerate(fh, start=2):
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            parts = stripped.split()
            if shape is None:
                if len(parts) != 3:
                    raise DataError(
                        f"{path}:{lineno}: expected 'rows cols nnz', got {stripped!r}"
                    )
                try:
                    nr, nc, declared_nnz = (int(p) for p in parts)
                except ValueError:
                    raise DataError(
                        f"{path}:{lineno}: size line is not three integers: {stripped!r}"
                    ) from None
                if nr < 1 or nc < 1:
                    raise DataError(f"{path}:{lineno}: matrix dimensions must be >= 1")
                shape = (nr, nc)
                continue
            if len(parts) != 3:
                raise DataError(
                    f"{path}:{lineno}: expected 'row col value', got {stripped!r}"
                )
            try:
                i, j = int(parts[0]), int(parts[1])
                v = float(parts[2])
            except ValueError:
                raise DataError(f"{path}:{lineno}: malformed entry: {stripped!r}") from None
            if not (1 <= i <= shape[0] and 1 <= j <= shape[1]):
                raise DataError(
                    f"{path}:{lineno}: index ({i}, {j}) outside {shape[0]}x{shape[1]}"
                )
            rows.append(i - 1)
            cols.append(j - 1)
            vals.append(v)

    if shape is None:
        raise DataError(f"{path}: missing size line")
    if len(vals) != declared_nnz:
        raise DataError(
            f"{path}: header declares {declared_nnz} entries, file has {len(vals)}"
        )
    return sp.coo_matrix(
        (np.asarray(vals), (np.asarray(rows), np.asarray(cols))), shape=shape
    )


def write_matrix_market(path, matrix, comment: str | None = None) -> None:
    """Write the nonzeros of a matrix in coordinate format, row-major."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        if comment:
            fh.write(f"% {comment}\n")
        fh.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for idx in order:
            fh.write(f"{coo.row[idx] + 1} {coo.col[idx] + 1} {float(coo.data[idx])!r}\n")


def read_vocabulary(path) -> list[str]:
    """One term per line; surrounding whitespace is stripped."""
    with open(path, encoding="utf-8") as fh:
        terms = [line.strip() for line in fh]
    while terms and terms[-1] == "":
        terms.pop()
    for i, term in enumerate(terms):
        if not term:
            raise DataError(f"{path}:{i + 1}: empty vocabulary entry")
    return terms


def write_vocabulary(path, terms) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for term in terms:
            fh.write(f"{term}\n")
