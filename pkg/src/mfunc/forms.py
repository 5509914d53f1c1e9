"""Hecke eigenvalue data for primitive forms, with an exact tau(n) table.

tau(n) is produced from the weight-12 level-1 cusp form via eta-power
squarings: the cube of the Euler product is the sparse Jacobi series
sum (-1)^m (2m+1) q^{m(m+1)/2}, squared once in plain int64 (it stays tiny),
then squared twice more with number-theoretic transforms modulo four NTT
primes and recombined by CRT into exact integers. All arithmetic is exact,
so the table is suitable as ground truth for census and congruence checks.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import DataCoverageError, DomainError, RamanujanViolationError, RangeError
from .primes import primes_up_to

# NTT-friendly primes below 2^30 with 2-adic valuation >= 21, and generators
_NTT_PRIMES = (
    (998244353, 3),
    (469762049, 3),
    (754974721, 11),
    (1004535809, 3),
)
_CRT_MODULUS = math.prod(p for p, _ in _NTT_PRIMES)


def _eta3_coeffs(n: int) -> np.ndarray:
    """First n coefficients of prod (1-q^k)^3 = sum (-1)^m (2m+1) q^{m(m+1)/2}."""
    out = np.zeros(n, dtype=np.int64)
    m = 0
    while m * (m + 1) // 2 < n:
        out[m * (m + 1) // 2] = (1 - 2 * (m & 1)) * (2 * m + 1)
        m += 1
    return out


def _eta6_coeffs(n: int) -> np.ndarray:
    """First n coefficients of prod (1-q^k)^6, by sparse self-convolution."""
    e3 = _eta3_coeffs(n)
    nz = np.flatnonzero(e3)
    idx = nz[:, None] + nz[None, :]
    val = e3[nz][:, None] * e3[nz][None, :]
    keep = idx < n
    out = np.zeros(n, dtype=np.int64)
    np.add.at(out, idx[keep], val[keep])
    return out


def _ntt_square(a_mod: np.ndarray, n_out: int, p: int, g: int) -> np.ndarray:
    """First n_out coefficients of the square of the series a_mod, mod p."""
    size = 1
    while size < 2 * len(a_mod):
        size *= 2
    buf = np.zeros(size, dtype=np.int64)
    buf[: len(a_mod)] = a_mod
    fa = _kernels.ntt(buf, p, g, False)
    fa = (fa * fa) % p
    sq = _kernels.ntt(fa, p, g, True)
    return sq[:n_out]


def _crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    inv = pow(m1, -1, m2)
    x = (r1 + ((r2 - r1) * inv % m2) * m1) % (m1 * m2)
    return x, m1 * m2

_tau_cache: dict[int, list[int]] = {}


def _tau_list(n_max: int) -> list[int]:
    """[tau(1), ..., tau(n_max)] as exact python ints."""
    for cached in sorted(_tau_cache, reverse=True):
        if cached >= n_max:
            return _tau_cache[cached][:n_max]
    # capacity: |tau(n)| <= d(n) n^{11/2} <= 2 n^6, so signed CRT needs
    # 4 n^6 < product of moduli
    if 4 * n_max**6 >= _CRT_MODULUS:
        raise RangeError(
            f"tau table limited to n <= {int((_CRT_MODULUS / 4) ** (1 / 6))} "
            f"by CRT capacity; got {n_max}"
        )
    e6 = _eta6_coeffs(n_max)
    residues = []
    for p, g in _NTT_PRIMES:
        e12 = _ntt_square(e6 % p, n_max, p, g)
        e24 = _ntt_square(e12, n_max, p, g)
        residues.append([int(v) for v in e24])
    out = []
    ms = [p for p, _ in _NTT_PRIMES]
    half = _CRT_MODULUS // 2
    for j in range(n_max):
        x, m = residues[0][j], ms[0]
        for i in range(1, len(ms)):
            x, m = _crt_pair(x, m, residues[i][j], ms[i])
        if x > half:
            x -= _CRT_MODULUS
        out.append(x)
    _tau_cache.clear()
    _tau_cache[n_max] = out
    return out


def ramanujan_tau_table(n_max: int) -> dict[int, int]:
    """Exact tau(n) for 1 <= n <= n_max."""
    if n_max < 1:
        raise DomainError(f"need n_max >= 1, got {n_max}")
    tl = _tau_list(int(n_max))
    return {n: tl[n - 1] for n in range(1, int(n_max) + 1)}


def satake_pair(lam: float) -> tuple[complex, complex]:
    """Unit-circle Satake parameters (alpha, beta) with alpha+beta = lam.

    Raises RamanujanViolationError when |lam| > 2 (no unitary pair exists).
    """
    lam = float(lam)
    if abs(lam) > 2.0:
        raise RamanujanViolationError(
            f"|lambda| = {abs(lam)} > 2 admits no unit-circle Satake pair"
        )
    im = math.sqrt(max(0.0, 4.0 - lam * lam)) / 2.0
    alpha = complex(lam / 2.0, im)
    return alpha, alpha.conjugate()


@dataclass(frozen=True)
class PrimitiveFormData:
    """Normalized Hecke eigenvalue data for a primitive cusp form.

    eigenvalues maps p -> lambda_f(p) = a_f(p) / p^{(k-1)/2} in [-2, 2];
    exact_ap optionally holds the integer a_f(p) for exact comparisons.
    """

    weight: int
    level: int
    eigenvalues: dict[int, float]
    exact_ap: dict[int, int] | None = None
    label: str = "form"

    def __post_init__(self):
        if self.weight < 2 or self.weight % 2:
            raise DomainError(f"weight must be even and >= 2, got {self.weight}")
        if self.level < 1:
            raise DomainError(f"level must be >= 1, got {self.level}")
        for p, lam in self.eigenvalues.items():
            if self.level > 1 and p % self.level == 0:
                continue
            if abs(lam) > 2.0 + 1e-12:
                raise RamanujanViolationError(
                    f"lambda({p}) = {lam} violates the Ramanujan bound"
                )

    @property
    def prime_limit(self) -> int:
        return max(self.eigenvalues) if self.eigenvalues else 0

    def lam(self, p: int) -> float:
        try:
            return self.eigenvalues[p]
        except KeyError:
            raise DataCoverageError(
                f"{self.label}: no eigenvalue tabulated for p = {p} "
                f"(limit {self.prime_limit})"
            ) from None

    def satake(self, p: int) -> tuple[complex, complex]:
        return satake_pair(self.lam(p))

    def satake_angle(self, p: int) -> float:
        """phi in [0, pi] with lambda(p) = 2 cos(phi)."""
        return math.acos(max(-1.0, min(1.0, self.lam(p) / 2.0)))

    def primes(self) -> list[int]:
        return sorted(self.eigenvalues)


_delta_cache: dict[int, PrimitiveFormData] = {}


def ramanujan_delta(prime_limit: int = 1000) -> PrimitiveFormData:
    """The weight-12 level-1 form, eigenvalues from the exact tau table."""
    prime_limit = int(prime_limit)
    if prime_limit < 2:
        raise DomainError("prime_limit must be >= 2")
    if prime_limit in _delta_cache:
        return _delta_cache[prime_limit]
    tl = _tau_list(prime_limit)
    eig = {}
    exact = {}
    for p in primes_up_to(prime_limit):
        p = int(p)
        tau_p = tl[p - 1]
        exact[p] = tau_p
        eig[p] = float(tau_p) / float(p) ** 5.5
    form = PrimitiveFormData(
        weight=12, level=1, eigenvalues=eig, exact_ap=exact, label="delta"
    )
    _delta_cache[prime_limit] = form
    return form


def load_eigenvalue_file(
    path, weight: int = 12, level: int = 1, label: str | None = None
) -> PrimitiveFormData:
    """Read a two-column eigenvalue table: 'p<TAB>lambda', '#' comments.

    lambda values are the normalized eigenvalues lambda_f(p) in [-2, 2].
    """
    eig: dict[int, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DomainError(f"{path}:{ln}: expected 'p<TAB>lambda'")
            try:
                p = int(parts[0])
                lam = float(parts[1])
            except ValueError as exc:
                raise DomainError(f"{path}:{ln}: {exc}") from None
            if p < 2:
                raise DomainError(f"{path}:{ln}: p must be a prime >= 2")
            if p in eig:
                raise DomainError(f"{path}:{ln}: duplicate prime {p}")
            eig[p] = lam
    if not eig:
        raise DomainError(f"{path}: no eigenvalue rows found")
    return PrimitiveFormData(
        weight=weight,
        level=level,
        eigenvalues=eig,
        exact_ap=None,
        label=label or str(path),
    )


def pf_epsilon_member(form: PrimitiveFormData, p: int, eps: float) -> bool:
    """Exact membership test p in P_f(eps): |lambda_f(p)| > sqrt(2) - eps.

    When integer a_f(p) data is available the comparison is done in exact
    integer arithmetic with eps read as the exact dyadic rational of its
    float, so the answer has no rounding ambiguity.
    """
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    if form.exact_ap is not None and p in form.exact_ap and form.weight == 12:
        # |tau(p)| p^{-11/2} > sqrt(2) - eps, squared and cleared of p^11:
        # tau^2 v^2 - p^11 (2 v^2 + u^2) > -2uv p^11 sqrt(2), eps = u/v exact
        fe = Fraction(float(eps))
        u, v = fe.numerator, fe.denominator
        tau = form.exact_ap[p]
        p11 = p**11
        a = tau * tau * v * v - p11 * (2 * v * v + u * u)
        b = 2 * u * v * p11
        if u * u >= 2 * v * v:
            # eps >= sqrt(2): threshold <= 0, any lambda qualifies
            return True
        if a >= 0:
            return True
        return 2 * b * b > a * a
    lam = form.lam(p)
    return abs(lam) > math.sqrt(2.0) - float(eps)
