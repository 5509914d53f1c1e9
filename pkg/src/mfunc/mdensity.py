"""Value-distribution densities on the w-plane: curve measures, torus
sampling, convolution, and the full M-function constructor.

The local measure at a prime p is the pushforward of the uniform circle
measure under theta -> -Log(1 - p^-sigma e^{2 pi i theta}); the joint
density over a finite prime set P is the convolution of the local measures.
m_sigma_P builds it either by Fourier inversion of the product
characteristic function (smooth, needs |P| >= 3 for an integrable tail) or
by direct curve convolution (quadrature pair binning plus FFT chaining).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from . import _kernels
from .errors import (
    CoverageError,
    DomainError,
    InversionQualityError,
    MethodError,
)
from .eulerlog import local_log_curve
from .grids import TWO_PI, GridDensity, GridSpec
from .primes import as_prime_tuple


def support_radius(P, sigma: float) -> float:
    """Upper bound sum_p |log(1 - p^-sigma)| for |log L_P| on the line."""
    return float(sum(-math.log(1.0 - p ** (-float(sigma))) for p in P))


@dataclass(frozen=True)
class CurveMeasure:
    """Uniform measure on the closed local curve theta -> w_p(theta)."""

    p: int
    sigma: float
    thetas: np.ndarray
    points: np.ndarray

    def radius_bound(self) -> float:
        return -math.log(1.0 - self.p ** (-self.sigma))


def prime_curve_measure(p: int, sigma: float, n_samples: int = 4096) -> CurveMeasure:
    """n_samples equally spaced points on the local curve at p.

    Needs sigma > 1/2 and n_samples >= 256 (the curve is analytic, so
    uniform sampling converges spectrally; fewer points distort moments).
    """
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    if n_samples < 256:
        raise DomainError(f"need n_samples >= 256, got {n_samples}")
    if p < 2:
        raise DomainError(f"p must be a prime >= 2, got {p}")
    thetas = np.arange(n_samples, dtype=np.float64) / n_samples
    points = local_log_curve(p, sigma, thetas)
    return CurveMeasure(p=int(p), sigma=float(sigma), thetas=thetas, points=points)


def default_grid(P, sigma: float, resolution: int = 512) -> GridSpec:
    """Square grid centered at 0 that provably contains the support."""
    w0 = support_radius(P, sigma)
    return GridSpec(0j, 1.02 * w0, resolution)


def torus_histogram(
    P,
    sigma: float,
    n_samples: int,
    seed: int,
    spec: GridSpec | None = None,
) -> GridDensity:
    """Monte Carlo histogram of sum_p w_p(theta_p) over the product torus.

    Independent uniform angles per prime, counter-based RNG for exact
    reproducibility. Any sample falling outside the grid is a hard coverage
    failure: the default grid contains the full support, so loss means the
    caller passed a grid that is too small.
    """
    P = as_prime_tuple(P)
    if len(P) < 2:
        raise DomainError(f"torus histogram needs at least 2 primes, got {len(P)}")
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    if n_samples < 1:
        raise DomainError("need n_samples >= 1")
    if spec is None:
        spec = default_grid(P, sigma)
    r = np.array([p ** (-float(sigma)) for p in P])
    rng = np.random.Generator(np.random.Philox(seed))
    u0, v0 = spec.origin()
    res = spec.resolution
    counts = np.zeros((res, res), dtype=np.int64)
    lost = 0
    batch = max(1, int(4_000_000 // len(P)))
    done = 0
    while done < n_samples:
        m = min(batch, n_samples - done)
        theta = rng.random((m, len(P)))
        wre, wim = _kernels.torus_g(theta, r)
        c, l = _kernels.bin2d(wre, wim, u0, v0, spec.cell, res)
        counts += c
        lost += l
        done += m
    if lost:
        raise CoverageError(
            f"{lost} of {n_samples} samples fell outside the grid "
            f"(support radius {support_radius(P, sigma):.6g}, grid half width "
            f"{spec.half_width:.6g} around {spec.center})"
        )
    values = counts * (TWO_PI / (n_samples * spec.cell**2))
    return GridDensity(
        spec=spec, values=values, method="torus-mc", seed=int(seed),
        diagnostics={"n_samples": int(n_samples)},
    )


def convolve(a: GridDensity, b: GridDensity) -> GridDensity:
    """Convolution of two grid densities on identical geometry.

    Index convention: output cell k collects mass from input cell pairs with
    i + j = k + res // 2, so the center cell of either factor acts as the
    identity atom (a one-cell unit mass at the center cell is a discrete
    delta). Mass falling outside the common grid is a coverage failure.
    """
    if (
        a.spec.resolution != b.spec.resolution
        or abs(a.spec.half_width - b.spec.half_width) > 1e-12 * a.spec.half_width
    ):
        raise MethodError(
            "convolve needs identical grid geometry "
            f"(half widths {a.spec.half_width} vs {b.spec.half_width}, "
            f"resolutions {a.spec.resolution} vs {b.spec.resolution})"
        )
    res = a.spec.resolution
    scale = a.spec.cell**2 / TWO_PI
    full = fftconvolve(a.values, b.values) * scale
    h = res // 2
    crop = full[h : h + res, h : h + res]
    lost = float(full.sum() - crop.sum()) * scale
    if lost > 1e-6:
        raise CoverageError(
            f"convolution mass {lost:.3e} falls outside the grid; "
            "enlarge the grid so the combined support fits"
        )
    neg = crop.min()
    values = np.clip(crop, 0.0, None)
    out_spec = GridSpec(a.spec.center + b.spec.center, a.spec.half_width, res)
    return GridDensity(
        spec=out_spec,
        values=values,
        method="convolution",
        diagnostics={
            "lost_mass": lost,
            "min_before_clip": float(neg),
            "factor_methods": [a.method, b.method],
        },
    )


def _convolve_centered(av: np.ndarray, bv: np.ndarray, res: int):
    """Unbiased point-mass convolution on a common centered grid.

    Cell centers of the two factors sum to points exactly halfway between
    output cell centers, so each product mass is split evenly over the two
    adjacent cells per axis (quarter weights in 2D). Returns raw cell sums
    (no measure scaling) and the mass lost outside the grid.
    """
    full = fftconvolve(av, bv)
    pad = np.zeros((2 * res, 2 * res), dtype=full.dtype)
    pad[1:, 1:] = full
    h4 = 0.25 * (pad[1:, 1:] + pad[:-1, 1:] + pad[1:, :-1] + pad[:-1, :-1])
    # h4[m] holds the mass split at output index m - res // 2
    h = res // 2
    crop = h4[h : h + res, h : h + res]
    lost = float(full.sum() - crop.sum())
    return crop, lost


def _pair_grid(curves, spec: GridSpec):
    """Bin the sum of one or two curve measures onto the grid (unit mass)."""
    u0, v0 = spec.origin()
    res = spec.resolution
    if len(curves) == 1:
        c = curves[0]
        zero = np.zeros(1)
        counts, lost = _kernels.pair_bin(
            c.points.real, c.points.imag, zero, zero, u0, v0, spec.cell, res
        )
        n = len(c.points)
    else:
        c1, c2 = curves
        counts, lost = _kernels.pair_bin(
            c1.points.real,
            c1.points.imag,
            c2.points.real,
            c2.points.imag,
            u0,
            v0,
            spec.cell,
            res,
        )
        n = len(c1.points) * len(c2.points)
    if lost:
        raise CoverageError(
            f"{lost} of {n} curve quadrature points fell outside the grid"
        )
    return counts / float(n)


def m_sigma_P(
    P,
    sigma: float,
    spec: GridSpec | None = None,
    method: str = "fourier-inversion",
    n_theta_pair: int = 4096,
    tail_tol: float = 1e-6,
) -> GridDensity:
    """Density of log L_P values over the product torus, on a w-grid.

    method="fourier-inversion" (default) inverts the product characteristic
    function; it needs |P| >= 3 so the Fourier tail is integrable.
    method="curve-convolution" bins pair sums of local curves by quadrature
    and chains FFT convolutions; it works from |P| >= 2 and is fully
    deterministic. Both return mass 1 within 1e-3 or fail loudly.
    """
    P = as_prime_tuple(P)
    if len(set(P)) != len(P):
        raise DomainError("prime set contains duplicates")
    if sigma <= 0.5:
        raise DomainError(f"need sigma > 1/2, got {sigma}")
    if spec is None:
        spec = default_grid(P, sigma)

    if method == "fourier-inversion":
        if len(P) < 3:
            raise MethodError(
                "fourier-inversion needs at least 3 primes for an integrable "
                "Fourier tail; use method='curve-convolution'"
            )
        from .mfourier import char_function_grid, invert_char_function

        cgrid = char_function_grid(P, sigma, tail_tol=tail_tol)
        out = invert_char_function(cgrid, spec)
        out.method = "fourier-inversion"
        mass = out.mass()
        if abs(mass - 1.0) > 1e-3:
            raise InversionQualityError(
                f"inverted density mass {mass:.6f} deviates from 1 by more "
                "than 1e-3"
            )
        return out

    if method == "curve-convolution":
        if len(P) < 2:
            raise MethodError("curve-convolution needs at least 2 primes")
        # pair the widest curves together first; a leftover narrow curve is
        # folded in last, when the partial density is already smooth
        curves = [prime_curve_measure(p, sigma, n_theta_pair) for p in P]
        groups = []
        i = 0
        while i + 1 < len(curves):
            groups.append((curves[i], curves[i + 1]))
            i += 2
        if i < len(curves):
            groups.append((curves[i],))
        acc = _pair_grid(groups[0], spec)
        lost_total = 0.0
        for g in groups[1:]:
            nxt = _pair_grid(g, spec)
            acc, lost = _convolve_centered(acc, nxt, spec.resolution)
            lost_total += lost
        if lost_total > 1e-6:
            raise CoverageError(
                f"convolution chain lost mass {lost_total:.3e}; grid too small"
            )
        neg = float(acc.min())
        values = np.clip(acc, 0.0, None) * (TWO_PI / spec.cell**2)
        out = GridDensity(
            spec=spec,
            values=values,
            method="curve-convolution",
            diagnostics={
                "lost_mass": lost_total,
                "min_before_clip": neg,
                "n_theta_pair": int(n_theta_pair),
            },
        )
        mass = out.mass()
        if abs(mass - 1.0) > 1e-3:
            raise InversionQualityError(
                f"curve-convolution mass {mass:.6f} deviates from 1 by more "
                "than 1e-3"
            )
        return out

    raise MethodError(f"unknown method {method!r}")
