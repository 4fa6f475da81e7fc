"""Scalar information measures in bits.

Both functions accept floats or numpy arrays and return the matching type;
the array path is what keeps fragment averaging over large supports fast.
"""

from __future__ import annotations

import numpy as np

from .errors import SpecValidationError

_LN2 = float(np.log(2.0))
# Arguments within this distance outside [0, 1] are clamped; overlap products
# underflow gracefully instead of raising.
_BOUNDARY_SLOP = 1e-12


def _as_unit_interval(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise SpecValidationError(f"{name} must be finite")
    if np.any(arr < -_BOUNDARY_SLOP) or np.any(arr > 1.0 + _BOUNDARY_SLOP):
        raise SpecValidationError(f"{name} outside [0, 1]")
    return np.clip(arr, 0.0, 1.0)


def _xlog2x(x: np.ndarray) -> np.ndarray:
    """x * log2(x) with the 0 log 0 = 0 convention."""
    safe = np.where(x > 0.0, x, 1.0)
    return x * np.log2(safe)


def binary_entropy(x):
    """Entropy of a (x, 1-x) distribution in bits; symmetric under x <-> 1-x."""
    p = _as_unit_interval(x, "probability")
    h = -(_xlog2x(p) + _xlog2x(1.0 - p))
    return float(h) if np.ndim(x) == 0 else h


def holevo_from_overlap(gamma2_fragment, p0):
    """Holevo quantity of a fragment with squared conditional-state overlap.

    The fragment state is a (p0, 1-p0) mixture of two pure conditional
    states whose squared overlap is ``gamma2_fragment``; its eigenvalues are

        lambda_pm = (1 +- sqrt(1 - 4 p0 (1-p0) (1 - gamma2))) / 2

    and, the conditional states being pure, the Holevo quantity equals the
    mixture entropy H(lambda_plus).  For p0 = 1/2 this is the familiar
    H((1 + sqrt(gamma2)) / 2).  The result lies in [0, H(p0)]: orthogonal
    records (gamma2 = 0) deliver the full pointer entropy, identical records
    (gamma2 = 1) deliver nothing.
    """
    g = _as_unit_interval(gamma2_fragment, "overlap")
    p = _as_unit_interval(p0, "probability")
    disc = np.sqrt(np.maximum(0.0, 1.0 - 4.0 * p * (1.0 - p) * (1.0 - g)))
    h = binary_entropy((1.0 + disc) / 2.0)
    scalar = np.ndim(gamma2_fragment) == 0 and np.ndim(p0) == 0
    return float(h) if scalar else h
