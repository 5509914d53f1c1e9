"""Automorphic analogues: Satake-parameter curves, JW-type oscillatory
integrals, stationary-set partitions, eigenvalue censuses, symmetric-power
Euler factors, and the automorphic M-density.

The local curve at an unramified prime is

    z_p(theta) = -Log(1 - alpha_p r e(theta)) - Log(1 - beta_p r e(theta)),

r = p^{-sigma}, alpha beta = 1 on the unit circle. Because both Satake
parameters sit on the unit circle the curve is real-analytic and closed,
and the same product-quadrature / Fourier-inversion machinery as in the
zeta case applies factor by factor.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    CoverageError,
    DataCoverageError,
    DomainError,
    MethodError,
    PreconditionError,
    PrecisionError,
)
from .forms import PrimitiveFormData, pf_epsilon_member
from .grids import TWO_PI, GridDensity, GridSpec
from .mfourier import (
    CurveSpec,
    _doubling_n_theta,
    _factor_at_points,
    _grid_from_curves,
    _product_envelope,
    invert_char_function,
)
from .primes import as_prime_tuple, primes_up_to
from .zeta import LineResult


def _check_unramified(form: PrimitiveFormData, p: int):
    if form.level > 1 and p % form.level == 0:
        raise DomainError(
            f"p = {p} divides the level {form.level}; ramified local factors "
            "are not supported"
        )


def automorphic_curve_eval(
    form: PrimitiveFormData, p: int, sigma: float, thetas
) -> np.ndarray:
    """Points of the local Satake curve at equidistributed angles."""
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    _check_unramified(form, p)
    alpha, beta = form.satake(p)
    r = float(p) ** (-float(sigma))
    e = np.exp(2j * math.pi * np.asarray(thetas, dtype=np.float64))
    return -np.log(1.0 - alpha * r * e) - np.log(1.0 - beta * r * e)


def _automorphic_curve_spec(
    form: PrimitiveFormData, p: int, sigma: float
) -> CurveSpec:
    _check_unramified(form, p)
    alpha, beta = form.satake(p)
    r = float(p) ** (-float(sigma))

    def sample(n):
        w = automorphic_curve_eval(
            form, p, sigma, np.arange(n, dtype=np.float64) / n
        )
        return w.real, w.imag

    return CurveSpec(
        label=f"p={p}",
        sample=sample,
        band=2.0 * r / (1.0 - r),
        radius=-2.0 * math.log(1.0 - r),
    )


def jw_type_integral(
    form: PrimitiveFormData, p: int, sigma: float, w: complex, tol: float = 1e-10
) -> complex:
    """Circle average of exp(i <w, z_p(theta)>) for the Satake curve."""
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    curve = _automorphic_curve_spec(form, p, sigma)
    zz = np.asarray([complex(w)])
    n = _doubling_n_theta(curve, zz, tol)
    return complex(_factor_at_points(curve, zz, n)[0])


def jw_bound_terms(p: int, sigma: float, w: complex) -> tuple[float, float]:
    """The two reference scales p^{sigma/2} |w|^{-1/2} and p^sigma |w|^{-1}."""
    az = abs(w)
    if az == 0:
        raise DomainError("w must be nonzero")
    ps = float(p) ** float(sigma)
    return math.sqrt(ps / az), ps / az


@dataclass(frozen=True)
class DerivativePartition:
    """Certified stationary-set partition for g(theta) = <w, z_p(theta)>.

    intervals_g1 covers the region where |g'| is certified above bound_g1;
    intervals_g2 covers the complement, where |g''| is certified above
    bound_g2. Together they cover [0, 1); bounds include Lipschitz padding
    for the sampling gap, so they hold pointwise, not just at samples.
    """

    p: int
    sigma: float
    w: complex
    intervals_g1: tuple
    intervals_g2: tuple
    bound_g1: float
    bound_g2: float
    n_samples: int
    threshold: float

    def covers_circle(self) -> bool:
        total = sum(b - a for a, b in self.intervals_g1)
        total += sum(b - a for a, b in self.intervals_g2)
        return abs(total - 1.0) < 1e-12


def _mask_to_intervals(mask: np.ndarray) -> tuple:
    """Merge consecutive sample cells [k/n, (k+1)/n) into intervals."""
    n = len(mask)
    out = []
    k = 0
    while k < n:
        if mask[k]:
            start = k
            while k < n and mask[k]:
                k += 1
            out.append((start / n, k / n))
        else:
            k += 1
    # wraparound merge: last interval touching 1 joins one starting at 0
    if len(out) >= 2 and out[0][0] == 0.0 and out[-1][1] == 1.0:
        pass  # kept as two half-open pieces; union is identical
    return tuple(out)


def _partition_scan(
    form: PrimitiveFormData, p: int, sigma: float, w: complex, n: int
):
    """One partition attempt at a fixed sampling density; returns the best
    thresholded partition and its certified bounds (possibly negative)."""
    alpha, beta = form.satake(p)
    r = float(p) ** (-float(sigma))
    theta = (np.arange(n) + 0.5) / n
    e = np.exp(2j * math.pi * theta)
    a = alpha * r * e
    b = beta * r * e
    z1 = 2j * math.pi * (a / (1 - a) + b / (1 - b))
    z2 = (2j * math.pi) ** 2 * (a / (1 - a) ** 2 + b / (1 - b) ** 2)
    g1 = np.abs(w.real * z1.real + w.imag * z1.imag)
    g2 = np.abs(w.real * z2.real + w.imag * z2.imag)
    az = abs(w)
    lip1 = az * (2 * math.pi) ** 2 * 2 * r / (1 - r) ** 2
    lip2 = az * (2 * math.pi) ** 3 * 2 * r * (1 + r) / (1 - r) ** 3
    pad1 = lip1 / (2 * n)
    pad2 = lip2 / (2 * n)
    s1 = float(g1.max())
    s2 = float(g2.max())
    best = None
    for frac in np.geomspace(1e-3, 0.5, 32):
        c = frac * s1
        on1 = g1 >= c
        b1 = float(g1[on1].min() - pad1) if on1.any() else math.inf
        b2 = float(g2[~on1].min() - pad2) if (~on1).any() else math.inf
        score = min(b1 / s1 if s1 > 0 else -1.0, b2 / s2 if s2 > 0 else -1.0)
        if best is None or score > best[0]:
            best = (score, c, on1, b1, b2)
    _, c, on1, b1, b2 = best
    return DerivativePartition(
        p=int(p),
        sigma=float(sigma),
        w=complex(w),
        intervals_g1=_mask_to_intervals(on1),
        intervals_g2=_mask_to_intervals(~on1),
        bound_g1=b1 if math.isfinite(b1) else 0.0,
        bound_g2=b2 if math.isfinite(b2) else 0.0,
        n_samples=int(n),
        threshold=float(c),
    )


def derivative_partition(
    form: PrimitiveFormData,
    p: int,
    sigma: float,
    w: complex,
    eps: float = 0.1,
    n: int = 1 << 14,
) -> DerivativePartition:
    """Partition the circle into |g'| >= b1 and |g''| >= b2 regions.

    Precondition: p in P_f(eps), which keeps the Satake angle away from the
    degenerate values where first and second derivative can vanish
    together. Refines the sampling twice before giving up.
    """
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    if w == 0:
        raise DomainError("w must be nonzero")
    _check_unramified(form, p)
    if not pf_epsilon_member(form, p, eps):
        raise PreconditionError(
            f"p = {p} is not in P_f({eps}): |lambda| = {abs(form.lam(p)):.6f} "
            f"<= sqrt(2) - {eps}; the stationary structure degenerates"
        )
    for attempt in range(3):
        part = _partition_scan(form, p, sigma, w, n * 4**attempt)
        if part.bound_g1 > 0 and part.bound_g2 > 0:
            return part
    raise PrecisionError(
        f"no certified positive partition at p = {p} after refinement "
        f"(bounds {part.bound_g1:.3e}, {part.bound_g2:.3e})"
    )


@dataclass
class CensusReport:
    """Membership census of P_f(eps) among primes up to x_max."""

    eps: float
    x_max: int
    rows: list  # (p, lambda, in_Pf)
    count: int
    n_primes: int
    density: float
    reference_density: float

    def to_csv(self, path):
        lines = ["p,lambda,in_Pf,abs_lambda"]
        for p, lam, member in self.rows:
            lines.append(f"{p},{lam!r},{int(member)},{abs(lam)!r}")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines))
            fh.write("\n")

    def summary(self) -> dict:
        return {
            "eps": self.eps,
            "x_max": self.x_max,
            "count": self.count,
            "n_primes": self.n_primes,
            "density": self.density,
            "reference_density": self.reference_density,
        }


def sato_tate_mass(threshold: float) -> float:
    """Sato-Tate measure of {|2 cos(phi)| > threshold} for 0 <= thr <= 2."""
    if threshold <= 0:
        return 1.0
    if threshold >= 2:
        return 0.0
    phi_c = math.acos(threshold / 2.0)
    return (2.0 / math.pi) * (phi_c - math.sin(2.0 * phi_c) / 2.0)


def pf_epsilon_census(
    form: PrimitiveFormData, eps: float, x_max: int
) -> CensusReport:
    """Exact membership census of P_f(eps) up to x_max with the Sato-Tate
    reference density of {|lambda| > sqrt(2) - eps}."""
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    x_max = int(x_max)
    ps = primes_up_to(x_max)
    missing = [p for p in ps if p not in form.eigenvalues]
    if missing:
        raise DataCoverageError(
            f"{form.label}: eigenvalues missing for {len(missing)} primes "
            f"<= {x_max} (first: {missing[0]})"
        )
    rows = []
    count = 0
    for p in ps:
        member = pf_epsilon_member(form, p, eps)
        count += member
        rows.append((int(p), float(form.lam(p)), bool(member)))
    density = count / len(ps)
    return CensusReport(
        eps=float(eps),
        x_max=x_max,
        rows=rows,
        count=int(count),
        n_primes=len(ps),
        density=float(density),
        reference_density=sato_tate_mass(math.sqrt(2.0) - float(eps)),
    )


def sym_power_log_partial(
    form: PrimitiveFormData, gamma: int, sigma: float, P
) -> complex:
    """log of the partial symmetric-power Euler product over P.

    -sum_{p in P} sum_{h=0..gamma} Log(1 - alpha^{gamma-h} beta^h p^-sigma),
    principal logs per factor.
    """
    if gamma < 0:
        raise DomainError(f"need gamma >= 0, got {gamma}")
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    P = as_prime_tuple(P)
    total = 0j
    for p in P:
        _check_unramified(form, p)
        phi = form.satake_angle(p)
        r = float(p) ** (-float(sigma))
        for h in range(gamma + 1):
            rot = cmath.exp(1j * phi * (gamma - 2 * h))
            total -= cmath.log(1.0 - rot * r)
    return total


def sym_diff_identity_check(
    form: PrimitiveFormData, mu: int, sigma: float, P
) -> float:
    """Max deviation of Sym^mu - Sym^{mu-2} from the two boundary factors.

    The inner Satake exponents of Sym^mu coincide with those of Sym^{mu-2}
    (alpha beta = 1), so the difference telescopes to the h = 0 and h = mu
    factors exactly; the deviation measures only floating-point noise.
    """
    if mu < 2:
        raise DomainError(f"need mu >= 2, got {mu}")
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    P = as_prime_tuple(P)
    worst = 0.0
    for p in P:
        _check_unramified(form, p)
        phi = form.satake_angle(p)
        r = float(p) ** (-float(sigma))
        lhs = 0j
        for h in range(mu + 1):
            lhs -= cmath.log(1.0 - cmath.exp(1j * phi * (mu - 2 * h)) * r)
        for h in range(mu - 1):
            lhs += cmath.log(1.0 - cmath.exp(1j * phi * (mu - 2 - 2 * h)) * r)
        rhs = -cmath.log(1.0 - cmath.exp(1j * phi * mu) * r) - cmath.log(
            1.0 - cmath.exp(-1j * phi * mu) * r
        )
        worst = max(worst, abs(lhs - rhs))
    return worst


def automorphic_density(
    form: PrimitiveFormData,
    sigma: float,
    P,
    wspec: GridSpec | None = None,
    eps: float = 0.1,
    tail_tol: float = 1e-8,
) -> GridDensity:
    """M-density of log L_f over the product torus for the prime set P.

    The characteristic grid half width adapts to the measured full-product
    envelope; the subset product over P intersect P_f(eps) is recorded as a
    diagnostic (those primes carry the stationary-phase decay that makes
    the tail integrable). Needs enough primes that the tail fits the grid.
    """
    P = as_prime_tuple(P)
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    if len(P) < 3:
        raise MethodError("automorphic density needs at least 3 primes")
    curves = [_automorphic_curve_spec(form, p, sigma) for p in P]
    support = sum(c.radius for c in curves)
    cgrid = _grid_from_curves(
        curves,
        support,
        tail_tol,
        method=f"automorphic-product:{len(P)}-primes",
    )
    members = [p for p in P if pf_epsilon_member(form, p, eps)]
    if members:
        sub = [_automorphic_curve_spec(form, p, sigma) for p in members]
        sub_edge = float(
            _product_envelope(sub, np.array([cgrid.half_width]))[0]
        )
    else:
        sub_edge = 1.0
    cgrid.diagnostics["subset_primes"] = members
    cgrid.diagnostics["subset_edge_level"] = sub_edge
    if wspec is None:
        wspec = GridSpec(0j, 1.02 * support, 512)
    out = invert_char_function(cgrid, wspec)
    out.method = "automorphic-fourier-inversion"
    out.diagnostics["subset_primes"] = members
    out.diagnostics["subset_edge_level"] = sub_edge
    mass = out.mass()
    if abs(mass - 1.0) > 1e-3:
        raise CoverageError(
            f"automorphic density mass {mass:.6f} deviates from 1 by more "
            "than 1e-3; tail truncation too aggressive"
        )
    return out


def automorphic_log_line(
    form: PrimitiveFormData,
    sigma: float,
    t_min: float,
    t_max: float,
    step: float,
    x_max: int | None = None,
    bias_tol: float = 1e-3,
) -> LineResult:
    """log L_f(sigma + it) on a grid via the truncated prime-power sum.

    Absolutely convergent for sigma > 1; the truncation bias is bounded by
    the prime tail 2 sum_{p > X} p^-sigma and must stay below bias_tol.
    """
    if sigma <= 1.0:
        raise DomainError(f"the Dirichlet line needs sigma > 1, got {sigma}")
    if step <= 0 or t_max < t_min:
        raise DomainError("need step > 0 and t_max >= t_min")
    if x_max is None:
        x_max = form.prime_limit
    x_max = int(x_max)
    ps = primes_up_to(x_max)
    if ps[-1] > form.prime_limit:
        raise DataCoverageError(
            f"{form.label}: eigenvalues only reach {form.prime_limit}, "
            f"need all primes <= {x_max}"
        )
    # prime tail: sum_{p > X} p^-sigma < integral bound X^{1-sigma}/((sigma-1) ln X)
    bias = 2.0 * x_max ** (1.0 - sigma) / ((sigma - 1.0) * math.log(x_max))
    if bias > bias_tol:
        raise PrecisionError(
            f"truncation bias bound {bias:.3e} exceeds {bias_tol:.1e}; "
            "raise x_max or sigma"
        )
    logn = []
    amp = []
    for p in ps:
        phi = form.satake_angle(p)
        k = 1
        while True:
            scale = float(p) ** (-k * sigma) / k
            if scale < 1e-17:
                break
            logn.append(k * math.log(p))
            amp.append(2.0 * math.cos(k * phi) * scale)
            k += 1
    n = int(math.floor((t_max - t_min) / step + 1e-9)) + 1
    tgrid = t_min + step * np.arange(n)
    vals = _kernels.dirichlet_line(
        tgrid, np.asarray(logn, dtype=np.float64), np.asarray(amp, dtype=np.float64)
    )
    return LineResult(
        sigma=float(sigma),
        t=tgrid,
        values=vals,
        flags=np.zeros(n, dtype=bool),
        error_bound=float(bias),
    )


def empirical_W_automorphic(
    form: PrimitiveFormData,
    sigma: float,
    t_max: float,
    step: float,
    region,
    x_max: int | None = None,
) -> float:
    """Fraction of t-samples of log L_f(sigma + it), t in [0, T], lying in
    the rectangle, trapezoid weighted."""
    from .averages import EmpiricalDistribution, empirical_W

    line = automorphic_log_line(form, sigma, 0.0, t_max, step, x_max=x_max)
    return empirical_W(EmpiricalDistribution.from_line(line), region)
