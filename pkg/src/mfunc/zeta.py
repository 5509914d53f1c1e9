"""Evaluation of zeta(sigma+it) and branch-continuous log zeta along lines.

Evaluation uses Euler-Maclaurin summation: a truncated Dirichlet main sum up
to a cutoff M ~ max(nmin, mult*|t|), the integral and half-term boundary
corrections, and up to eight Bernoulli correction terms, with the standard
rigorous remainder bound

    |R_K| <= |B_{2K+2}/(2K+2)!| * |(s)_{2K+1}| * M^{-sigma-2K-1}
             * |s+2K+1| / (sigma+2K+1),

where (s)_m is the rising factorial. The branch of log zeta is fixed by path
tracking: horizontally from a large abscissa (where the principal branch is
valid since |log zeta| < pi) to the target sigma, then vertically along the
t-grid with recursive step refinement whenever a phase increment exceeds
pi/2. Samples where refinement fails (suspected nearby zero) are flagged and
excluded from downstream statistics.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, PoleError, PrecisionError

# B_{2k}/(2k)! for k = 1..9; k = 9 drives the remainder bound at K = 8
_BFAC = (
    0.0,
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
)

MAX_CORRECTION_TERMS = 8
_DEFAULT_TOL = 1e-10


def _em_corrections(s, m, n_terms):
    """Integral + boundary + Bernoulli corrections and the remainder bound.

    Vectorized over numpy arrays s (complex) and m (cutoffs, float).
    """
    minv = 1.0 / m
    mpow = m ** (-s)
    corr = m ** (1.0 - s) / (s - 1.0) + 0.5 * mpow
    poch = np.ones_like(s)
    shift = 0.0
    mfac = np.ones_like(m)
    for k in range(1, n_terms + 1):
        # advance (s)_{2k-3} -> (s)_{2k-1} and M^{-(2k-3)} -> M^{-(2k-1)}
        if k == 1:
            poch = s.copy()
            mfac = minv.copy()
            shift = 1.0
        else:
            poch = poch * (s + shift) * (s + shift + 1.0)
            mfac = mfac * minv * minv
            shift += 2.0
        corr = corr + _BFAC[k] * poch * mpow * mfac
    # remainder after K = n_terms correction terms
    poch_abs = np.abs(poch) if n_terms >= 1 else np.ones_like(m)
    for j in range(int(2 * n_terms - 1), int(2 * n_terms + 1)):
        if j >= 0:
            poch_abs = poch_abs * np.abs(s + j)
    sigma = s.real
    bound = (
        abs(_BFAC[n_terms + 1])
        * poch_abs
        * m ** (-sigma - 2.0 * n_terms - 1.0)
        * np.abs(s + 2.0 * n_terms + 1.0)
        / (sigma + 2.0 * n_terms + 1.0)
    )
    return corr, bound


def zeta_eval(
    sigma: float,
    t: float,
    tol: float = _DEFAULT_TOL,
    cutoff_mult: float = 2.0,
    correction_terms: int = MAX_CORRECTION_TERMS,
) -> complex:
    """zeta(sigma + it) with absolute error below tol.

    Raises PoleError at s = 1, DomainError for sigma <= 0, PrecisionError if
    the tolerance is unreachable even after cutoff escalation.
    """
    sigma = float(sigma)
    t = float(t)
    if sigma <= 0:
        raise DomainError(f"zeta evaluation needs sigma > 0, got {sigma}")
    if sigma == 1.0 and t == 0.0:
        raise PoleError("zeta has a pole at s = 1")
    if not 1 <= correction_terms <= MAX_CORRECTION_TERMS:
        raise DomainError(
            f"correction_terms must be in 1..{MAX_CORRECTION_TERMS}"
        )
    mult = float(cutoff_mult)
    for _ in range(12):
        vals, bound = _zeta_grid(
            sigma, np.array([t]), mult, correction_terms, nmin=10
        )
        if bound[0] <= tol:
            return complex(vals[0])
        mult *= 2.0
        if mult * max(abs(t), 10.0) > 5e7:
            break
    raise PrecisionError(
        f"zeta tolerance {tol} unreachable at sigma={sigma}, t={t} "
        f"(best bound {bound[0]:.3e})"
    )


def _zeta_grid(sigma, tgrid, mult, n_terms, nmin=10):
    """zeta on a t-grid plus per-point remainder bounds."""
    tgrid = np.asarray(tgrid, dtype=np.float64)
    main, mm = _kernels.em_main_sums(float(sigma), tgrid, float(mult), int(nmin))
    s = sigma + 1j * tgrid
    corr, bound = _em_corrections(s, mm.astype(np.float64), n_terms)
    return main + corr, bound


@dataclass
class LineResult:
    """Branch-continuous log zeta (or log L) samples along a vertical line."""

    sigma: float
    t: np.ndarray
    values: np.ndarray
    flags: np.ndarray
    error_bound: float = 0.0
    n_refined: int = 0

    @property
    def n_flagged(self) -> int:
        return int(self.flags.sum())

    def clean_values(self) -> np.ndarray:
        return self.values[~self.flags]


_ANCHOR_SIGMA = 3.0
_ANCHOR_STEP = 0.05
_MAX_TRACK_DEPTH = 14


def _track_segment(eval_fn, sa, za, sb, zb, depth):
    """Phase increment of eval_fn between sa and sb, refining until each
    sub-increment is < pi/2. Returns (increment, ok)."""
    if za == 0 or zb == 0 or not (cmath.isfinite(za) and cmath.isfinite(zb)):
        return 0.0, False
    dphi = cmath.phase(zb / za)
    if abs(dphi) < math.pi / 2:
        return dphi, True
    if depth <= 0:
        return dphi, False
    sm = 0.5 * (sa + sb)
    zm = eval_fn(sm)
    d1, ok1 = _track_segment(eval_fn, sa, za, sm, zm, depth - 1)
    d2, ok2 = _track_segment(eval_fn, sm, zm, sb, zb, depth - 1)
    return d1 + d2, ok1 and ok2


def _anchor_log(sigma, t, tol, cutoff_mult):
    """log zeta at sigma+it by horizontal tracking from a large abscissa.

    At Re s >= 3 the principal branch is valid (|log zeta| <= log zeta(3) <
    pi); stepping down in sigma keeps increments small away from zeros.
    """

    def ev(s):
        return zeta_eval(s.real, s.imag, tol=tol, cutoff_mult=cutoff_mult)

    s0 = complex(max(_ANCHOR_SIGMA, sigma + 1.0), t)
    z0 = ev(s0)
    log0 = cmath.log(z0)  # principal branch valid here
    phase = log0.imag
    n_steps = max(1, int(math.ceil((s0.real - sigma) / _ANCHOR_STEP)))
    xs = np.linspace(s0.real, sigma, n_steps + 1)
    za = z0
    for i in range(n_steps):
        sa = complex(xs[i], t)
        sb = complex(xs[i + 1], t)
        zb = ev(sb)
        dphi, ok = _track_segment(ev, sa, za, sb, zb, _MAX_TRACK_DEPTH)
        if not ok:
            raise PrecisionError(
                f"branch tracking failed on the horizontal anchor path at {sb}"
            )
        phase += dphi
        za = zb
    return math.log(abs(za)) + 1j * phase, za


def log_zeta_line(
    sigma: float,
    t_min: float,
    t_max: float,
    step: float,
    mode: str = "default",
    tol: float = _DEFAULT_TOL,
    cutoff_mult: float = 2.0,
) -> LineResult:
    """log zeta(sigma+it) on the grid t_min, t_min+step, ..., branch-continuous in t.

    mode="default" requires sigma > 1 (branch agrees with the absolutely
    convergent Euler sum); mode="experimental" allows 1/2 < sigma <= 1 with
    path tracking. Samples where tracking fails are flagged and carry the
    best-effort value.
    """
    sigma = float(sigma)
    if mode not in ("default", "experimental"):
        raise DomainError(f"unknown mode {mode!r}")
    if mode == "default" and sigma <= 1:
        raise DomainError(
            "default mode needs sigma > 1; pass mode='experimental' for "
            "1/2 < sigma <= 1"
        )
    if sigma <= 0.5:
        raise DomainError(f"log zeta line needs sigma > 1/2, got {sigma}")
    if step <= 0 or t_max < t_min:
        raise DomainError("need step > 0 and t_max >= t_min")

    n = int(math.floor((t_max - t_min) / step + 1e-9)) + 1
    tgrid = t_min + step * np.arange(n)
    zvals, bounds = _zeta_grid(sigma, tgrid, cutoff_mult, MAX_CORRECTION_TERMS)
    max_bound = float(bounds.max())
    if max_bound > tol:
        zvals, bounds = _zeta_grid(
            sigma, tgrid, 2.0 * cutoff_mult, MAX_CORRECTION_TERMS
        )
        max_bound = float(bounds.max())
        if max_bound > tol:
            raise PrecisionError(
                f"line evaluation cannot reach tol={tol} (bound {max_bound:.3e})"
            )

    flags = np.zeros(n, dtype=bool)
    n_refined = 0

    def ev(s):
        return zeta_eval(s.real, s.imag, tol=tol, cutoff_mult=cutoff_mult)

    if sigma > 1:
        # anchor at the grid point closest to the real axis; at t = 0 the
        # value is real and positive so the phase there is exactly 0
        j0 = int(np.argmin(np.abs(tgrid)))
        if abs(tgrid[j0]) < 1e-12:
            anchor_phase = 0.0
        else:
            anchor_log, _ = _anchor_log(sigma, float(tgrid[j0]), tol, cutoff_mult)
            anchor_phase = anchor_log.imag
    else:
        # the horizontal path at t = 0 runs through the pole, so anchor at
        # the grid point where |zeta| is largest (farthest from zeros)
        cand = np.abs(zvals).copy()
        cand[np.abs(tgrid) < 1e-9] = -1.0
        j0 = int(np.argmax(cand))
        if cand[j0] < 0:
            raise DomainError(
                "cannot fix the branch for sigma <= 1 on a grid containing "
                "only t = 0"
            )
        anchor_log, _ = _anchor_log(sigma, float(tgrid[j0]), tol, cutoff_mult)
        anchor_phase = anchor_log.imag

    # vertical increments between consecutive grid points
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = zvals[1:] / zvals[:-1]
    dphi = np.angle(ratios)
    bad = np.flatnonzero((np.abs(dphi) > math.pi / 2) | ~np.isfinite(dphi))
    dphi[~np.isfinite(dphi)] = 0.0
    for j in bad:
        sa = complex(sigma, tgrid[j])
        sb = complex(sigma, tgrid[j + 1])
        inc, ok = _track_segment(ev, sa, zvals[j], sb, zvals[j + 1], _MAX_TRACK_DEPTH)
        dphi[j] = inc
        n_refined += 1
        if not ok:
            flags[j + 1] = True

    phase = np.empty(n, dtype=np.float64)
    phase[j0] = anchor_phase
    if j0 + 1 < n:
        phase[j0 + 1 :] = anchor_phase + np.cumsum(dphi[j0:])
    if j0 > 0:
        phase[:j0] = anchor_phase - np.cumsum(dphi[:j0][::-1])[::-1]
    # a failed increment taints everything beyond it on that side
    for j in bad:
        if flags[j + 1]:
            if j + 1 > j0:
                flags[j + 1 :] = True
            else:
                flags[: j + 1] = True

    values = np.log(np.abs(zvals)) + 1j * phase
    return LineResult(
        sigma=sigma,
        t=tgrid,
        values=values,
        flags=flags,
        error_bound=max_bound,
        n_refined=n_refined,
    )
