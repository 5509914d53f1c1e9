"""Complex logarithms of Euler local factors.

The building block everywhere is the principal-branch value

    w_p(theta) = -Log(1 - p^{-sigma} e^{2 pi i theta}),

smooth and 1-periodic in theta for sigma > 0 (then p^{-sigma} < 1, so the
argument of Log keeps positive real part and never crosses the branch cut).
Finite Euler-product logs are sums of such terms at theta = t log p / 2 pi.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import DomainError
from .primes import as_prime_tuple

# ComplexValue is represented by the builtin complex; helpers below enforce
# the finiteness invariant at operation boundaries.


def require_finite(value: complex, what: str = "value") -> complex:
    v = complex(value)
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise DomainError(f"non-finite {what}: {v!r}")
    return v


def local_log_term(p: int, sigma: float, theta: float) -> complex:
    """Principal-branch -Log(1 - p^{-sigma} e^{2 pi i theta}).

    Requires sigma > 0 so the curve cannot encircle the origin.
    """
    if sigma <= 0:
        raise DomainError(f"local log term needs sigma > 0, got {sigma}")
    r = float(p) ** (-float(sigma))
    z = r * cmath.exp(2j * math.pi * theta)
    return require_finite(-cmath.log(1.0 - z), "local log term")


def local_log_curve(p: int, sigma: float, thetas: np.ndarray) -> np.ndarray:
    """Vectorized local_log_term over a theta array."""
    if sigma <= 0:
        raise DomainError(f"local log term needs sigma > 0, got {sigma}")
    r = float(p) ** (-float(sigma))
    return -np.log1p(-r * np.exp(2j * np.pi * np.asarray(thetas, dtype=np.float64)))


def euler_log_partial(s: complex, P) -> complex:
    """-sum_{p in P} Log(1 - p^{-s}), principal branch per term.

    Finite Euler-product logarithm; requires Re s > 0. Empty P gives 0.
    """
    s = complex(s)
    if s.real <= 0:
        raise DomainError(f"finite Euler log needs Re s > 0, got {s}")
    total = 0j
    for p in as_prime_tuple(P):
        total -= cmath.log(1.0 - complex(p) ** (-s))
    return require_finite(total, "Euler log partial sum")


def euler_log_tail_bound(X: int, sigma: float) -> float:
    """Crude bound sum_{p > X} 2 p^{-sigma} <= 2 sum_{n > X} n^{-sigma}.

    Finite only for sigma > 1; used to certify Euler-product truncations.
    """
    if sigma <= 1:
        return math.inf
    # integral comparison: sum_{n>X} n^{-sigma} <= X^{1-sigma}/(sigma-1)
    return 2.0 * float(X) ** (1.0 - sigma) / (sigma - 1.0)
