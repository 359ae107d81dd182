"""Self-contained log-gamma.

Lanczos approximation with g = 7 and the standard 9-term double-precision
coefficient set.  Absolute error on [0.1, 100] is below 1e-10 (measured
~1e-13 against reference implementations; see tests).  Keeping this local
means the Dirichlet density evaluation does not depend on any external
special-function library, so library-based values stay available as an
independent cross-check.
"""

from __future__ import annotations

import math

import numpy as np

_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for real x > 0.

    Raises ValueError for x <= 0 (poles and the reflection branch are not
    needed by this package).
    """
    if not x > 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    if x < 0.5:
        # Reflection keeps the series argument in its accurate range.
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    z = x - 1.0
    series = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        series += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * math.log(t) - t + math.log(series)


def log_gamma_vector(x) -> np.ndarray:
    """Vectorized :func:`log_gamma` over an array of positive reals."""
    arr = np.asarray(x, dtype=float)
    out = np.empty(arr.shape, dtype=float)
    flat_in = arr.ravel()
    flat_out = out.ravel()
    for i, v in enumerate(flat_in):
        flat_out[i] = log_gamma(float(v))
    return out
