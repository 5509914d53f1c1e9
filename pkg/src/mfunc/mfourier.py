"""Characteristic functions of M-densities: products of one-prime factors,
decay reports, Dirichlet-series representations, and Fourier inversion.

The one-prime factor at frequency z is the uniform circle average of
exp(i <z, w_p(theta)>) with <z, w> = Re(conj(z) w); the characteristic
function over a prime set is the product. Factors decay like
|z|^{-1/2} per prime (the stationary-phase rate of a Bessel function), so
the product is integrable once three or more primes participate, and the
density is recovered by the plane inverse transform

    M(w) = (2 pi)^{-1} integral of Mtilde(z) exp(-i <z, w>) da db.

All grid transforms are dense matrix products (quadrature weights folded
into the left/right exponential matrices), chunked to bound memory.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CoverageError,
    DomainError,
    InversionQualityError,
    MethodError,
    PrecisionError,
)
from .eulerlog import local_log_curve
from .grids import TWO_PI, CharFunctionGrid, GridDensity, GridSpec
from .primes import as_prime_tuple

_N_THETA_MAX = 1 << 22
_NZ_MAX = 4097


def pairing(z, w):
    """Real pairing <z, w> = Re(conj(z) w) identifying C with R^2."""
    z = np.asarray(z)
    w = np.asarray(w)
    return z.real * w.real + z.imag * w.imag


@dataclass(frozen=True)
class CurveSpec:
    """A closed analytic curve whose uniform measure drives one factor.

    sample(n) returns the real and imaginary parts at n equispaced
    parameters; band bounds max |w'(theta)| / (2 pi), so n_theta scales with
    band * |z|_max; radius bounds sup |w(theta)|.
    """

    label: str
    sample: object
    band: float
    radius: float


def _local_curve_spec(p: int, sigma: float) -> CurveSpec:
    r = float(p) ** (-float(sigma))

    def sample(n):
        w = local_log_curve(p, sigma, np.arange(n, dtype=np.float64) / n)
        return w.real, w.imag

    return CurveSpec(
        label=f"p={p}",
        sample=sample,
        band=r / (1.0 - r),
        radius=-math.log(1.0 - r),
    )


def _factor_at_points(curve: CurveSpec, z: np.ndarray, n_theta: int) -> np.ndarray:
    """Circle average of exp(i <z, w(theta)>) at each z, fixed n_theta."""
    x, y = curve.sample(n_theta)
    out = np.empty(z.shape, dtype=np.complex128)
    flat = z.reshape(-1)
    block = max(1, int(2_000_000 // n_theta))
    for lo in range(0, flat.shape[0], block):
        hi = min(flat.shape[0], lo + block)
        ph = np.outer(flat[lo:hi].real, x) + np.outer(flat[lo:hi].imag, y)
        out.reshape(-1)[lo:hi] = np.exp(1j * ph).mean(axis=1)
    return out


def _doubling_n_theta(curve: CurveSpec, probe: np.ndarray, tol: float) -> int:
    """Smallest doubling n_theta whose halving check passes tol on probe."""
    zmax = float(np.abs(probe).max()) if probe.size else 1.0
    n = 256
    while n < 8.0 * curve.band * zmax and n < _N_THETA_MAX:
        n *= 2
    prev = _factor_at_points(curve, probe, n)
    while n <= _N_THETA_MAX // 2:
        cur = _factor_at_points(curve, probe, 2 * n)
        if float(np.abs(cur - prev).max()) <= tol:
            return 2 * n
        prev = cur
        n *= 2
    raise PrecisionError(
        f"factor quadrature for {curve.label} did not converge to {tol} "
        f"within {_N_THETA_MAX} nodes"
    )


def one_prime_char_factor(
    p: int, sigma: float, z: complex, tol: float = 1e-12
) -> complex:
    """The factor at a single prime and frequency, to absolute accuracy tol."""
    if sigma <= 0:
        raise DomainError(f"need sigma > 0, got {sigma}")
    curve = _local_curve_spec(int(p), float(sigma))
    zz = np.asarray([complex(z)])
    n = _doubling_n_theta(curve, zz, tol)
    return complex(_factor_at_points(curve, zz, n)[0])


def char_function_P(P, sigma: float, z, tol: float = 1e-12) -> np.ndarray | complex:
    """Product of one-prime factors at frequency z (scalar or array)."""
    P = as_prime_tuple(P)
    if not P:
        raise DomainError("prime set must be nonempty")
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    zarr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    out = np.ones(zarr.shape, dtype=np.complex128)
    for p in P:
        curve = _local_curve_spec(p, sigma)
        n = _doubling_n_theta(curve, zarr, tol)
        out *= _factor_at_points(curve, zarr, n)
    if np.isscalar(z) or np.asarray(z).ndim == 0:
        return complex(out[0])
    return out


def _product_envelope(curves, radii, n_dir=64, tol=1e-10):
    """Max over directions of |product factor| at each probe radius."""
    phis = (np.arange(n_dir) + 0.5) * (TWO_PI / n_dir)
    zpts = np.asarray(radii)[:, None] * np.exp(1j * phis)[None, :]
    prod = np.ones(zpts.shape, dtype=np.complex128)
    for c in curves:
        n = _doubling_n_theta(c, zpts.reshape(-1), tol)
        prod *= _factor_at_points(c, zpts, n)
    return np.abs(prod).max(axis=1)


def _fit_exponent(radii, levels):
    """Least-squares slope of log level against log radius."""
    r = np.asarray(radii, dtype=np.float64)
    l = np.asarray(levels, dtype=np.float64)
    ok = l > 0
    if ok.sum() < 2:
        return 0.0
    x = np.log(r[ok])
    y = np.log(l[ok])
    slope = ((x - x.mean()) * (y - y.mean())).sum() / ((x - x.mean()) ** 2).sum()
    return float(slope)


def _grid_from_curves(
    curves,
    support: float,
    tail_tol: float,
    z_cap: float = 1e5,
    support_margin: float = 1.1,
    quad_tol: float = 1e-10,
    method: str = "",
) -> CharFunctionGrid:
    """Adaptive product characteristic grid for a list of curve specs.

    The half width Z grows until the measured radial envelope stays below
    tail_tol; the node spacing keeps the inverse transform alias-free over
    a support_margin-padded support disk.
    """
    if len(curves) < 1:
        raise DomainError("need at least one curve")
    spacing = math.pi / (support_margin * support)

    # crude initial guess from the product of per-curve asymptotic rates,
    # refined by the measured envelope below
    z0 = max(8.0, tail_tol ** (-2.0 / len(curves)) - 1.0)
    r_hi = min(2.0 * z0, z_cap)
    while True:
        radii = np.geomspace(1.0, r_hi, 28)
        env = _product_envelope(curves, radii)
        below = env < tail_tol
        z_star = None
        for i in range(len(radii)):
            if below[i:].all():
                z_star = radii[i]
                break
        if z_star is not None:
            break
        if r_hi >= z_cap:
            raise CoverageError(
                f"characteristic function stays above tail tol {tail_tol} "
                f"out to |z| = {z_cap:.3g}; too few curves or sigma too small"
            )
        r_hi = min(4.0 * r_hi, z_cap)

    zhw = 1.05 * float(z_star)
    slope = _fit_exponent(radii[len(radii) // 2 :], env[len(radii) // 2 :])
    for attempt in range(4):
        half_nodes = int(math.ceil(zhw / spacing))
        nz = 2 * half_nodes + 1
        if nz > _NZ_MAX:
            raise MethodError(
                f"characteristic grid needs {nz} nodes per axis (> {_NZ_MAX}); "
                "the Fourier tail is too wide for dense inversion here; use "
                "curve-convolution, a larger prime set, or larger sigma"
            )
        zhw = half_nodes * spacing  # exact node spacing, z = 0 on the lattice
        axis = -zhw + spacing * np.arange(nz)

        # one corner-radius probe fixes the quadrature size for the full grid
        corner = zhw * math.sqrt(2.0)
        phis = (np.arange(16) + 0.5) * (TWO_PI / 16)
        probe = corner * np.exp(1j * phis)
        values = np.ones((nz, nz), dtype=np.complex128)
        n_thetas = {}
        for c in curves:
            n = _doubling_n_theta(c, probe, quad_tol)
            n_thetas[c.label] = n
            x, y = c.sample(n)
            chunk = max(1, int(4_000_000 // n))
            w_right = np.exp(1j * np.outer(y, axis))
            for lo in range(0, nz, chunk):
                hi = min(nz, lo + chunk)
                e_left = np.exp(1j * np.outer(axis[lo:hi], x))
                values[lo:hi, :] *= (e_left @ w_right) / n
            del w_right

        edge = float(
            max(
                np.abs(values[0, :]).max(),
                np.abs(values[-1, :]).max(),
                np.abs(values[:, 0]).max(),
                np.abs(values[:, -1]).max(),
            )
        )
        if edge <= tail_tol:
            break
        # the 64-direction envelope probe can miss the angular max; grow
        # the half width by the measured shortfall at the fitted decay rate
        grow = (edge / tail_tol) ** (-1.0 / min(slope, -0.5))
        zhw = zhw * max(1.25, grow) + spacing

    above = [float(r) for r, e in zip(radii, env) if e >= tail_tol]
    grid = CharFunctionGrid(
        half_width=zhw,
        values=values,
        fitted_exponent=slope,
        edge_level=edge,
        tail_tol=tail_tol,
        max_radius_above_tol=max(above) if above else 0.0,
        method=method,
        diagnostics={"n_theta": n_thetas, "support_bound": support},
    )
    return grid


def char_function_grid(
    P,
    sigma: float,
    tail_tol: float = 1e-6,
    support_margin: float = 1.1,
    quad_tol: float = 1e-10,
) -> CharFunctionGrid:
    """Product characteristic function of the M-density on an adaptive grid."""
    P = as_prime_tuple(P)
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    if len(P) < 1:
        raise DomainError("prime set must be nonempty")
    curves = [_local_curve_spec(p, sigma) for p in P]
    support = sum(c.radius for c in curves)
    return _grid_from_curves(
        curves,
        support,
        tail_tol,
        support_margin=support_margin,
        quad_tol=quad_tol,
        method=f"product-quadrature:{len(P)}-primes",
    )


def invert_char_function(
    cgrid: CharFunctionGrid, wspec: GridSpec, negative_mass_tol: float = 1e-3
) -> GridDensity:
    """Inverse transform of a characteristic grid onto a w-plane density.

    Preconditions: the input must decay (a constant grid is the point mass
    at 0 and has no density), its fitted tail exponent must be integrable,
    the measured edge level must be below the stated tail tolerance, and the
    w-grid must sit inside the alias-free window pi / spacing.
    """
    vals = cgrid.values
    if float(np.abs(vals - 1.0).max()) < 1e-12:
        raise DomainError(
            "characteristic function is identically 1 (point mass at 0); "
            "no density to invert"
        )
    if cgrid.fitted_exponent > -2.0:
        raise CoverageError(
            f"fitted tail exponent {cgrid.fitted_exponent:.3f} > -2; the "
            "transform tail is not integrable enough for inversion"
        )
    tol = cgrid.tail_tol if cgrid.tail_tol > 0 else 1e-6
    if cgrid.edge_level > tol:
        raise CoverageError(
            f"edge level {cgrid.edge_level:.3e} exceeds tail tolerance "
            f"{tol:.1e}; enlarge the characteristic grid"
        )
    d = cgrid.node_spacing
    alias = math.pi / d
    reach = max(
        abs(wspec.center.real) + wspec.half_width,
        abs(wspec.center.imag) + wspec.half_width,
    )
    if reach > alias * (1.0 + 1e-12):
        raise DomainError(
            f"w grid reaches {reach:.4g} but the alias-free window is "
            f"{alias:.4g}; refine the characteristic grid spacing"
        )

    axis = cgrid.axis()
    wgt = np.ones(len(axis))
    wgt[0] = wgt[-1] = 0.5
    us = wspec.axis("u")
    vs = wspec.axis("v")
    e_u = np.exp(-1j * np.outer(us, axis)) * wgt[None, :]
    e_v = np.exp(-1j * np.outer(vs, axis)) * wgt[None, :]
    m = (e_u @ vals @ e_v.T) * (d * d / TWO_PI)
    imag_max = float(np.abs(m.imag).max())
    m = m.real
    neg = m[m < 0].sum() if (m < 0).any() else 0.0
    neg_mass = float(-neg) * wspec.cell**2 / TWO_PI
    if neg_mass > negative_mass_tol:
        raise InversionQualityError(
            f"inverted density carries negative mass {neg_mass:.3e} "
            f"(> {negative_mass_tol}); the characteristic tail was truncated "
            "too aggressively"
        )
    values = np.clip(m, 0.0, None)
    return GridDensity(
        spec=wspec,
        values=values,
        method="fourier-inversion",
        diagnostics={
            "negative_mass": neg_mass,
            "imag_max": imag_max,
            "char_half_width": cgrid.half_width,
            "char_resolution": cgrid.resolution,
        },
    )


@dataclass
class DecayReport:
    """Per-prime factor decay against the |z|^{-1/2} reference rate."""

    sigma: float
    primes: tuple
    radii: np.ndarray
    ratios: dict
    product_levels: np.ndarray
    fitted_exponent: float
    jw_constant: float
    octave_stability: float

    def rows(self):
        for p in self.primes:
            for r, val in zip(self.radii, self.ratios[p]):
                yield p, float(r), float(val)

    def to_csv(self, path):
        lines = ["p,radius,max_ratio"]
        for p, r, val in self.rows():
            lines.append(f"{p},{r!r},{val!r}")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines))
            fh.write("\n")

    def summary(self) -> dict:
        return {
            "sigma": self.sigma,
            "primes": list(self.primes),
            "jw_constant": self.jw_constant,
            "octave_stability": self.octave_stability,
            "fitted_exponent": self.fitted_exponent,
        }


def jw_decay_report(
    P,
    sigma: float,
    radii=None,
    n_dir: int = 32,
    quad_tol: float = 1e-10,
) -> DecayReport:
    """Measure factor decay: ratio |factor(z)| p^{-sigma/2} |z|^{1/2}.

    The ratio tends to a constant (the stationary-phase rate), so its
    per-octave maxima stabilize; the report records per-prime ratios on a
    radial probe set, the empirical constant, its stability across the top
    two octaves, and the fitted decay exponent of the product envelope.
    """
    P = as_prime_tuple(P)
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    if radii is None:
        radii = np.geomspace(10.0, 1000.0, 25)
    radii = np.asarray(radii, dtype=np.float64)
    if len(radii) < 4:
        raise DomainError("need at least 4 probe radii")
    phis = (np.arange(n_dir) + 0.5) * (TWO_PI / n_dir)
    zpts = radii[:, None] * np.exp(1j * phis)[None, :]

    ratios = {}
    prod = np.ones(zpts.shape, dtype=np.complex128)
    for p in P:
        curve = _local_curve_spec(p, sigma)
        n = _doubling_n_theta(curve, zpts.reshape(-1), quad_tol)
        fac = _factor_at_points(curve, zpts, n)
        prod *= fac
        level = np.abs(fac).max(axis=1)
        ratios[p] = level * float(p) ** (-sigma / 2.0) * np.sqrt(radii)

    product_levels = np.abs(prod).max(axis=1)
    fitted = _fit_exponent(radii, product_levels)

    # stability: per-octave maxima of the ratio over the top two octaves
    r_hi = radii[-1]
    oct1 = (radii > r_hi / 2.0)
    oct2 = (radii > r_hi / 4.0) & ~oct1
    stab = 1.0
    jw_const = 0.0
    for p in P:
        m1 = float(ratios[p][oct1].max()) if oct1.any() else 0.0
        m2 = float(ratios[p][oct2].max()) if oct2.any() else m1
        jw_const = max(jw_const, m1, m2)
        if min(m1, m2) > 0:
            stab = max(stab, max(m1, m2) / min(m1, m2))
    return DecayReport(
        sigma=float(sigma),
        primes=P,
        radii=radii,
        ratios=ratios,
        product_levels=product_levels,
        fitted_exponent=fitted,
        jw_constant=jw_const,
        octave_stability=stab,
    )


@dataclass(frozen=True)
class LambdaTable:
    """Multiplicative coefficients lambda_z(n) for n <= n_max."""

    z: complex
    n_max: int
    coefficients: np.ndarray  # index n, [0] unused

    def __getitem__(self, n: int) -> complex:
        return complex(self.coefficients[n])


def _spf_sieve(n_max: int) -> np.ndarray:
    spf = np.zeros(n_max + 1, dtype=np.int64)
    spf[1] = 1
    for p in range(2, int(n_max**0.5) + 1):
        if spf[p] == 0:
            spf[p] = p
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    rest = np.flatnonzero(spf[2:] == 0) + 2
    spf[rest] = rest
    return spf


def lambda_coefficients(z: complex, n_max: int) -> LambdaTable:
    """lambda_z(n): multiplicative, lambda_z(p^k) = prod_{j<k}(iz/2 + j) / k!.

    These are the Dirichlet coefficients of the z-power of the zeta Euler
    product: lambda_z(p) = iz/2, and the full characteristic function is
    sum lambda_z(n) lambda_zbar(n) n^{-2 sigma}.
    """
    n_max = int(n_max)
    if n_max < 1:
        raise DomainError("need n_max >= 1")
    c = 1j * complex(z) / 2.0
    spf = _spf_sieve(n_max)
    lam = np.zeros(n_max + 1, dtype=np.complex128)
    lam[1] = 1.0
    expo = np.zeros(n_max + 1, dtype=np.int64)
    ppow = np.zeros(n_max + 1, dtype=np.int64)
    for n in range(2, n_max + 1):
        p = spf[n]
        m = n // p
        if spf[m] == p:
            expo[n] = expo[m] + 1
            ppow[n] = ppow[m] * p
        else:
            expo[n] = 1
            ppow[n] = p
        q = ppow[n]
        if q == n:
            # prime power: lambda(p^k) = lambda(p^{k-1}) (c + k - 1) / k
            k = expo[n]
            lam[n] = lam[n // p] * (c + (k - 1)) / k
        else:
            lam[n] = lam[q] * lam[n // q]
    return LambdaTable(z=complex(z), n_max=n_max, coefficients=lam)


@dataclass(frozen=True)
class MtildeValue:
    value: complex
    n_max: int
    tail_estimate: float
    smooth_restriction: tuple | None = None


def _smooth_mask(n_max: int, P) -> np.ndarray:
    spf = _spf_sieve(n_max)
    ok = np.zeros(n_max + 1, dtype=bool)
    ok[1] = True
    pset = set(P)
    for n in range(2, n_max + 1):
        p = spf[n]
        ok[n] = (p in pset) and ok[n // p]
    return ok


def mtilde_dirichlet(
    sigma: float,
    z: complex,
    n_max: int,
    smooth_restriction=None,
    tail_warn_tol: float = 1e-6,
) -> MtildeValue:
    """Dirichlet-series value sum lambda_z(n) lambda_zbar(n) n^{-2 sigma}.

    With smooth_restriction = P the sum runs over P-smooth n only and equals
    the product characteristic function of the finite-P density. The
    attached tail estimate extrapolates the last dyadic block geometrically;
    a warning is raised when it exceeds tail_warn_tol.
    """
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    n_max = int(n_max)
    if n_max < 4:
        raise DomainError("need n_max >= 4")
    z = complex(z)
    lam1 = lambda_coefficients(z, n_max).coefficients
    lam2 = lambda_coefficients(z.conjugate(), n_max).coefficients
    n = np.arange(n_max + 1, dtype=np.float64)
    n[0] = 1.0
    terms = lam1 * lam2 * n ** (-2.0 * sigma)
    terms[0] = 0.0
    P = None
    if smooth_restriction is not None:
        P = as_prime_tuple(smooth_restriction)
        mask = _smooth_mask(n_max, P)
        terms = np.where(mask, terms, 0.0)
    value = complex(terms.sum())

    mags = np.abs(terms)
    t_last = float(mags[n_max // 2 + 1 :].sum())
    t_prev = float(mags[n_max // 4 + 1 : n_max // 2 + 1].sum())
    if t_prev > 0:
        rho = min(t_last / t_prev, 0.95)
        tail = t_last * rho / (1.0 - rho) if rho > 0 else 0.0
    else:
        tail = t_last
    if tail > tail_warn_tol:
        warnings.warn(
            f"mtilde_dirichlet tail estimate {tail:.3e} exceeds "
            f"{tail_warn_tol:.1e}; increase n_max",
            RuntimeWarning,
            stacklevel=2,
        )
    return MtildeValue(
        value=value, n_max=n_max, tail_estimate=tail, smooth_restriction=P
    )


def generalized_mtilde(
    s: complex, z1: complex, z2: complex, n_max: int, tail_warn_tol: float = 1e-6
) -> MtildeValue:
    """sum lambda_z1(n) lambda_z2(n) n^{-2s} for complex s, Re s > 1/2."""
    s = complex(s)
    if s.real <= 0.5:
        raise DomainError(f"need Re s > 1/2, got {s.real}")
    n_max = int(n_max)
    if n_max < 4:
        raise DomainError("need n_max >= 4")
    lam1 = lambda_coefficients(z1, n_max).coefficients
    lam2 = lambda_coefficients(z2, n_max).coefficients
    n = np.arange(n_max + 1, dtype=np.float64)
    n[0] = 1.0
    terms = lam1 * lam2 * np.exp(-2.0 * s * np.log(n))
    terms[0] = 0.0
    value = complex(terms.sum())
    mags = np.abs(terms)
    t_last = float(mags[n_max // 2 + 1 :].sum())
    t_prev = float(mags[n_max // 4 + 1 : n_max // 2 + 1].sum())
    if t_prev > 0:
        rho = min(t_last / t_prev, 0.95)
        tail = t_last * rho / (1.0 - rho) if rho > 0 else 0.0
    else:
        tail = t_last
    if tail > tail_warn_tol:
        warnings.warn(
            f"generalized_mtilde tail estimate {tail:.3e} exceeds "
            f"{tail_warn_tol:.1e}; increase n_max",
            RuntimeWarning,
            stacklevel=2,
        )
    return MtildeValue(value=value, n_max=n_max, tail_estimate=tail)
