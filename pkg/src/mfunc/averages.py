"""Empirical and averaged W-functionals: vertical-line statistics, twisted
chi-tau averages, character family averages over prime moduli, and torus
reference integrals.

Every average here estimates E[Phi(log L)] for some family; the M-density
side predicts the same numbers, and the acceptance suite compares them.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .characters import DirichletCharacterTable, build_character_table
from .errors import DomainError
from .grids import RectangleRegion
from .primes import as_prime_tuple, primes_up_to
from .zeta import LineResult

_BUILTINS = ("one", "re-clipped", "im-clipped", "exp")


@dataclass(frozen=True)
class TestFunction:
    """Test functional Phi applied to log L values.

    kinds: "rectangle-indicator" (region required), "gaussian"
    (exp(-|w - center|^2 / width^2)), "fourier-kernel" (exp(i <z, w>)),
    "builtin" (name in one / re-clipped / im-clipped / exp).
    """

    # not a pytest class despite the name
    __test__ = False

    kind: str
    region: RectangleRegion | None = None
    center: complex = 0j
    width: float = 1.0
    z: complex = 0j
    name: str = ""
    clip: float = 50.0

    def __post_init__(self):
        if self.kind == "rectangle-indicator":
            if self.region is None:
                raise DomainError("rectangle-indicator needs a region")
        elif self.kind == "gaussian":
            if self.width <= 0:
                raise DomainError("gaussian width must be positive")
        elif self.kind == "fourier-kernel":
            pass
        elif self.kind == "builtin":
            if self.name not in _BUILTINS:
                raise DomainError(
                    f"unknown builtin {self.name!r}; choose from {_BUILTINS}"
                )
        else:
            raise DomainError(f"unknown test function kind {self.kind!r}")

    @property
    def is_real(self) -> bool:
        if self.kind == "fourier-kernel":
            return False
        if self.kind == "builtin" and self.name == "exp":
            return False
        return True

    def __call__(self, w):
        w = np.asarray(w, dtype=np.complex128)
        if self.kind == "rectangle-indicator":
            return self.region.contains(w).astype(np.float64)
        if self.kind == "gaussian":
            d = w - self.center
            return np.exp(-(d.real**2 + d.imag**2) / self.width**2)
        if self.kind == "fourier-kernel":
            return np.exp(1j * (self.z.real * w.real + self.z.imag * w.imag))
        if self.name == "one":
            return np.ones(w.shape, dtype=np.float64)
        if self.name == "re-clipped":
            return np.clip(w.real, -self.clip, self.clip)
        if self.name == "im-clipped":
            return np.clip(w.imag, -self.clip, self.clip)
        return np.exp(w)  # "exp"

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "rectangle-indicator":
            r = self.region
            out["region"] = [r.u_min, r.u_max, r.v_min, r.v_max]
        elif self.kind == "gaussian":
            out["center"] = [self.center.real, self.center.imag]
            out["width"] = self.width
        elif self.kind == "fourier-kernel":
            out["z"] = [self.z.real, self.z.imag]
        else:
            out["name"] = self.name
        return out


@dataclass
class EmpiricalDistribution:
    """Weighted point cloud of log L values."""

    samples: np.ndarray
    weights: np.ndarray | None = None
    n_excluded: int = 0

    def total_weight(self) -> float:
        if self.weights is None:
            return float(len(self.samples))
        return float(self.weights.sum())

    @staticmethod
    def from_line(line: LineResult) -> "EmpiricalDistribution":
        """Trapezoid weights along the t-grid; flagged samples excluded."""
        w = np.ones(len(line.t), dtype=np.float64)
        if len(w) > 1:
            w[0] = w[-1] = 0.5
        w[line.flags] = 0.0
        return EmpiricalDistribution(
            samples=line.values, weights=w, n_excluded=line.n_flagged
        )


def empirical_W(dist: EmpiricalDistribution, region: RectangleRegion) -> float:
    """Weighted fraction of samples in the rectangle.

    Exactly monotone in the region and exactly additive over disjoint
    rectangles (half-open membership, so shared edges never double count).
    """
    tw = dist.total_weight()
    if tw <= 0:
        raise DomainError("empirical distribution has no usable samples")
    mask = region.contains(dist.samples)
    if dist.weights is None:
        return float(mask.sum()) / tw
    return float(dist.weights[mask].sum()) / tw


def _phi_result(phi: TestFunction, value: complex):
    return float(value.real) if phi.is_real else complex(value)


def log_L_P_line(P, sigma: float, tgrid: np.ndarray) -> np.ndarray:
    """log L_P(sigma + i tau) on a tau grid via the prime-power expansion.

    Absolutely convergent for sigma > 1/2 over a finite prime set; branch
    continuous by construction (each local log is principal, |arg| < pi).
    """
    P = as_prime_tuple(P)
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    logn = []
    amp = []
    for p in P:
        k = 1
        while True:
            a = float(p) ** (-k * sigma) / k
            if a < 1e-17:
                break
            logn.append(k * math.log(p))
            amp.append(a)
            k += 1
    return _kernels.dirichlet_line(
        np.asarray(tgrid, dtype=np.float64),
        np.asarray(logn, dtype=np.float64),
        np.asarray(amp, dtype=np.float64),
    )


def chi_tau_average_many(
    P, sigma: float, phis: list, t_max: float, step: float
) -> list:
    """chi_tau_average for several test functions over one shared line pass."""
    if t_max <= 0 or step <= 0:
        raise DomainError("need t_max > 0 and step > 0")
    n = int(math.floor(t_max / step + 1e-9))
    if n < 1:
        raise DomainError("need at least one step inside [0, T]")
    tgrid = step * np.arange(n + 1)
    vals = log_L_P_line(P, sigma, tgrid)
    conj_vals = np.conj(vals[1:])
    w = np.ones(n, dtype=np.float64)
    w[-1] = 0.5
    out = []
    for phi in phis:
        pos = phi(vals[1:])
        neg = phi(conj_vals)
        acc = complex((w * (pos + neg)).sum() + phi(vals[:1])[0])
        out.append(_phi_result(phi, acc / (2.0 * n)))
    return out


def chi_tau_average(P, sigma: float, phi: TestFunction, t_max: float, step: float):
    """Trapezoid average of Phi(log L_P(sigma + i tau)) over tau in [-T, T].

    Conjugate symmetry halves the work: the tau < 0 half is evaluated as
    Phi applied to the conjugated line values.
    """
    return chi_tau_average_many(P, sigma, [phi], t_max, step)[0]


def log_L_P_char(P, sigma: float, chi) -> complex:
    """log L_P(sigma, chi) = -sum_p Log(1 - chi(p) p^-sigma), principal logs.

    chi is a callable p -> complex on the unit circle (or 0 when the
    modulus divides p, which contributes nothing).
    """
    P = as_prime_tuple(P)
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    total = 0j
    for p in P:
        total -= cmath.log(1.0 - complex(chi(p)) * float(p) ** (-sigma))
    return total


def _modulus_log_values(
    table: DirichletCharacterTable, P, sigma: float
) -> np.ndarray:
    """log L_P(sigma, chi_j) for all primitive j = 1 .. q - 2, vectorized."""
    q = table.q
    js = np.arange(1, q - 1)
    total = np.zeros(len(js), dtype=np.complex128)
    for p in P:
        a = p % q
        if a == 0:
            continue
        k = (js * int(table.ind[a])) % (q - 1)
        chi_p = np.exp(2j * math.pi * k / (q - 1))
        total -= np.log(1.0 - chi_p * float(p) ** (-sigma))
    return total


def modulus_average(q: int, P, sigma: float, phi: TestFunction):
    """Average of Phi(log L_P(sigma, chi)) over primitive chi mod prime q."""
    P = as_prime_tuple(P)
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    table = build_character_table(q)
    if q in P:
        warnings.warn(
            f"modulus {q} lies in the prime set; its local factor degenerates "
            "(chi(q) = 0 for every character mod q)",
            RuntimeWarning,
            stacklevel=2,
        )
    vals = _modulus_log_values(table, P, sigma)
    acc = complex(np.asarray(phi(vals)).sum() / len(vals))
    return _phi_result(phi, acc)


def ihara_outer_average(m: int, P, sigma: float, phi: TestFunction):
    """Mean of modulus_average over prime moduli 3 <= q <= m.

    q = 2 is skipped: mod 2 there are no primitive characters to average
    (the family is empty), so the smallest contributing modulus is 3.
    """
    if m < 3:
        raise DomainError(f"need m >= 3, got {m}")
    moduli = [int(q) for q in primes_up_to(m) if q >= 3]
    vals = [complex(np.asarray(modulus_average(q, P, sigma, phi))) for q in moduli]
    acc = sum(vals) / len(vals)
    return _phi_result(phi, acc)


# rank-1 lattice generator, chosen by pre-tuning on product-form integrands
# with known values (Fourier kernels over local curves, d <= 8)
_KOROBOV_A = 30011
_LATTICE_N = 65537


def torus_integral(
    P,
    sigma: float,
    phi: TestFunction,
    method: str = "auto",
    n_samples: int = 200_000,
    seed: int = 0,
):
    """Reference value of E[Phi(sum_p w_p(theta_p))] over the product torus.

    method "tensor" (d <= 3): product trapezoid, spectrally accurate;
    "lattice" (d <= 8): rank-1 Korobov lattice; "mc": plain Monte Carlo.
    "auto" picks the best available for the dimension.
    """
    P = as_prime_tuple(P)
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    d = len(P)
    if d < 1:
        raise DomainError("prime set must be nonempty")
    r = np.array([p ** (-float(sigma)) for p in P])
    if method == "auto":
        method = "tensor" if d <= 3 else ("lattice" if d <= 8 else "mc")

    if method == "tensor":
        if d > 3:
            raise DomainError("tensor quadrature is limited to 3 primes")
        n_axis = {1: 4096, 2: 512, 3: 128}[d]
        axes = [np.arange(n_axis) / n_axis] * d
        mesh = np.meshgrid(*axes, indexing="ij")
        theta = np.stack([m.reshape(-1) for m in mesh], axis=1)
    elif method == "lattice":
        if d > 8:
            raise DomainError("rank-1 lattice is limited to 8 primes")
        gen = np.array(
            [pow(_KOROBOV_A, j, _LATTICE_N) for j in range(d)], dtype=np.float64
        )
        i = np.arange(_LATTICE_N, dtype=np.float64)
        theta = np.mod(np.outer(i, gen) / _LATTICE_N, 1.0)
    elif method == "mc":
        rng = np.random.Generator(np.random.Philox(seed))
        theta = rng.random((int(n_samples), d))
    else:
        raise DomainError(f"unknown method {method!r}")

    acc = 0j
    total = theta.shape[0]
    block = max(1, int(8_000_000 // d))
    for lo in range(0, total, block):
        hi = min(total, lo + block)
        wre, wim = _kernels.torus_g(theta[lo:hi], r)
        acc += complex(np.asarray(phi(wre + 1j * wim)).sum())
    return _phi_result(phi, acc / total)


@dataclass
class ConvergenceRow:
    parameter: float
    estimate: float
    gap: float


def char_average_convergence(
    P, sigma: float, phi: TestFunction, moduli, reference: float | None = None
) -> list[ConvergenceRow]:
    """modulus_average along increasing prime moduli against the torus limit.

    Returns one row per modulus with the absolute gap to the reference
    (computed by torus quadrature when not supplied).
    """
    P = as_prime_tuple(P)
    moduli = sorted(int(q) for q in moduli)
    for q in moduli:
        if q < 3:
            raise DomainError("moduli must be primes >= 3")
    if reference is None:
        ref = torus_integral(P, sigma, phi)
        reference = float(np.real(ref)) if phi.is_real else abs(complex(ref))
    rows = []
    for q in moduli:
        est = modulus_average(q, P, sigma, phi)
        est_s = float(np.real(est)) if phi.is_real else abs(complex(est))
        rows.append(
            ConvergenceRow(parameter=float(q), estimate=est_s, gap=abs(est_s - reference))
        )
    return rows


def write_convergence_csv(path, rows: list[ConvergenceRow]):
    lines = ["parameter,estimate,gap"]
    for row in rows:
        lines.append(f"{row.parameter!r},{row.estimate!r},{row.gap!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
