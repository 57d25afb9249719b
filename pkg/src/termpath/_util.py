"""Small shared numeric helpers."""

import numpy as np


def mirror_upper(m: np.ndarray) -> np.ndarray:
    """Copy the upper triangle onto the lower one.

    Guarantees bit-exact symmetry for matrices that are already symmetric
    up to rounding noise in the lower triangle.
    """
    out = np.triu(m)
    out += np.triu(m, 1).T
    return out
