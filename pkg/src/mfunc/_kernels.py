"""Hot numerical kernels, each in a numba variant and a pure-numpy twin.

The public names at the bottom dispatch on the selected backend. Both
variants implement the same algorithm; integer kernels (binning, NTT) agree
exactly, floating-point kernels agree to roundoff.
"""

from __future__ import annotations

import numpy as np

from ._backend import USE_NUMBA, njit

TWO_PI = 2.0 * np.pi


# ----------------------------------------------------------------------
# Truncated Dirichlet main sums with a t-dependent cutoff M(t):
#   S(t) = sum_{n=1}^{M(t)-1} n^{-sigma} e^{-i t log n},  M(t) = max(nmin, floor(mult*|t|)+1)
# Used by the Euler-Maclaurin zeta evaluation along vertical lines.
# ----------------------------------------------------------------------


@njit(cache=True)
def _em_main_sums_nb(sigma, tgrid, mult, nmin):
    nt = tgrid.shape[0]
    out = np.empty(nt, np.complex128)
    mm = np.empty(nt, np.int64)
    mmax = nmin
    for j in range(nt):
        m = int(mult * abs(tgrid[j])) + 1
        if m < nmin:
            m = nmin
        mm[j] = m
        if m > mmax:
            mmax = m
    logs = np.empty(mmax, np.float64)
    pows = np.empty(mmax, np.float64)
    for n in range(1, mmax + 1):
        logs[n - 1] = np.log(n)
        pows[n - 1] = float(n) ** (-sigma)
    for j in range(nt):
        t = tgrid[j]
        m = mm[j]
        sr = 0.0
        si = 0.0
        for n in range(m - 1):
            ph = t * logs[n]
            sr += pows[n] * np.cos(ph)
            si -= pows[n] * np.sin(ph)
        out[j] = complex(sr, si)
    return out, mm


def _em_main_sums_np(sigma, tgrid, mult, nmin):
    nt = tgrid.shape[0]
    mm = np.maximum(nmin, (mult * np.abs(tgrid)).astype(np.int64) + 1)
    out = np.empty(nt, np.complex128)
    mmax = int(mm.max())
    n = np.arange(1, mmax + 1, dtype=np.float64)
    logs = np.log(n)
    pows = n ** (-sigma)
    block = max(1, int(4_000_000 // mmax))
    for lo in range(0, nt, block):
        hi = min(nt, lo + block)
        mc = mm[lo:hi]
        kmax = int(mc.max()) - 1
        ph = tgrid[lo:hi, None] * logs[None, :kmax]
        z = pows[None, :kmax] * np.exp(-1j * ph)
        mask = np.arange(1, kmax + 1)[None, :] < mc[:, None]
        out[lo:hi] = (z * mask).sum(axis=1)
    return out, mm


# ----------------------------------------------------------------------
# Fixed-coefficient exponential sums  S(t) = sum_j amp_j e^{-i t logn_j};
# amp carries the n^{-sigma} weights. Used for Euler-product log lines.
# ----------------------------------------------------------------------


@njit(cache=True)
def _dirichlet_line_nb(tgrid, logn, amp):
    nt = tgrid.shape[0]
    k = logn.shape[0]
    out = np.empty(nt, np.complex128)
    for j in range(nt):
        t = tgrid[j]
        sr = 0.0
        si = 0.0
        for i in range(k):
            ph = t * logn[i]
            sr += amp[i] * np.cos(ph)
            si -= amp[i] * np.sin(ph)
        out[j] = complex(sr, si)
    return out


def _dirichlet_line_np(tgrid, logn, amp):
    nt = tgrid.shape[0]
    k = logn.shape[0]
    out = np.empty(nt, np.complex128)
    block = max(1, int(4_000_000 // max(k, 1)))
    camp = amp.astype(np.complex128)
    for lo in range(0, nt, block):
        hi = min(nt, lo + block)
        out[lo:hi] = np.exp(-1j * np.outer(tgrid[lo:hi], logn)) @ camp
    return out


# ----------------------------------------------------------------------
# 2D binning of complex samples into a res x res grid. Cell (iu, iv) covers
# [u0+iu*cell, u0+(iu+1)*cell) x [v0+iv*cell, v0+(iv+1)*cell).
# ----------------------------------------------------------------------


@njit(cache=True)
def _bin2d_nb(wre, wim, u0, v0, cell, res):
    counts = np.zeros((res, res), np.int64)
    lost = 0
    for i in range(wre.shape[0]):
        iu = int(np.floor((wre[i] - u0) / cell))
        iv = int(np.floor((wim[i] - v0) / cell))
        if 0 <= iu < res and 0 <= iv < res:
            counts[iu, iv] += 1
        else:
            lost += 1
    return counts, lost


def _bin2d_np(wre, wim, u0, v0, cell, res):
    iu = np.floor((wre - u0) / cell).astype(np.int64)
    iv = np.floor((wim - v0) / cell).astype(np.int64)
    ok = (iu >= 0) & (iu < res) & (iv >= 0) & (iv < res)
    flat = iu[ok] * res + iv[ok]
    counts = np.bincount(flat, minlength=res * res).reshape(res, res)
    return counts.astype(np.int64), int((~ok).sum())


# ----------------------------------------------------------------------
# Double-quadrature binning of the sum of two closed curves: every pair
# (theta1_i, theta2_j) contributes one unit to the cell containing
# (x1_i + x2_j, y1_i + y2_j).
# ----------------------------------------------------------------------


@njit(cache=True)
def _pair_bin_nb(x1, y1, x2, y2, u0, v0, cell, res):
    counts = np.zeros((res, res), np.int64)
    lost = 0
    for i in range(x1.shape[0]):
        a = x1[i]
        b = y1[i]
        for j in range(x2.shape[0]):
            iu = int(np.floor((a + x2[j] - u0) / cell))
            iv = int(np.floor((b + y2[j] - v0) / cell))
            if 0 <= iu < res and 0 <= iv < res:
                counts[iu, iv] += 1
            else:
                lost += 1
    return counts, lost


def _pair_bin_np(x1, y1, x2, y2, u0, v0, cell, res):
    counts = np.zeros(res * res, np.int64)
    lost = 0
    block = max(1, int(2_000_000 // max(x2.shape[0], 1)))
    for lo in range(0, x1.shape[0], block):
        hi = min(x1.shape[0], lo + block)
        u = (x1[lo:hi, None] + x2[None, :]).ravel()
        v = (y1[lo:hi, None] + y2[None, :]).ravel()
        iu = np.floor((u - u0) / cell).astype(np.int64)
        iv = np.floor((v - v0) / cell).astype(np.int64)
        ok = (iu >= 0) & (iu < res) & (iv >= 0) & (iv < res)
        counts += np.bincount(iu[ok] * res + iv[ok], minlength=res * res)
        lost += int((~ok).sum())
    return counts.reshape(res, res), lost


# ----------------------------------------------------------------------
# Evaluation of the torus map g_P: (theta_p) -> sum_p -Log(1 - r_p e^{2 pi i theta_p}).
# theta has shape (n_samples, n_primes); r_p = p^{-sigma} < 1.
# ----------------------------------------------------------------------


@njit(cache=True)
def _torus_g_nb(theta, r):
    ns, k = theta.shape
    wre = np.empty(ns, np.float64)
    wim = np.empty(ns, np.float64)
    for i in range(ns):
        sr = 0.0
        si = 0.0
        for j in range(k):
            c = r[j] * np.cos(TWO_PI * theta[i, j])
            s = r[j] * np.sin(TWO_PI * theta[i, j])
            sr -= 0.5 * np.log((1.0 - c) ** 2 + s * s)
            si += np.arctan2(s, 1.0 - c)
        wre[i] = sr
        wim[i] = si
    return wre, wim


def _torus_g_np(theta, r):
    ns = theta.shape[0]
    wre = np.zeros(ns, np.float64)
    wim = np.zeros(ns, np.float64)
    for j in range(theta.shape[1]):
        c = r[j] * np.cos(TWO_PI * theta[:, j])
        s = r[j] * np.sin(TWO_PI * theta[:, j])
        wre -= 0.5 * np.log((1.0 - c) ** 2 + s * s)
        wim += np.arctan2(s, 1.0 - c)
    return wre, wim


# ----------------------------------------------------------------------
# Number-theoretic transform modulo an NTT-friendly prime p = c*2^k + 1.
# Operates on int64 arrays with entries in [0, p); p < 2^30 keeps every
# intermediate product below 2^60 < 2^63.
# ----------------------------------------------------------------------


@njit(cache=True)
def _pow_mod_nb(base, exp, mod):
    result = 1
    b = base % mod
    e = exp
    while e > 0:
        if e & 1:
            result = (result * b) % mod
        b = (b * b) % mod
        e >>= 1
    return result


@njit(cache=True)
def _ntt_nb(a, p, root, invert):
    n = a.shape[0]
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            t = a[i]
            a[i] = a[j]
            a[j] = t
    ln = 2
    while ln <= n:
        if invert:
            wn = _pow_mod_nb(root, p - 1 - (p - 1) // ln, p)
        else:
            wn = _pow_mod_nb(root, (p - 1) // ln, p)
        half = ln // 2
        for start in range(0, n, ln):
            w = 1
            for k in range(half):
                lo = a[start + k]
                hi = (a[start + k + half] * w) % p
                a[start + k] = (lo + hi) % p
                a[start + k + half] = (lo + p - hi) % p
                w = (w * wn) % p
        ln <<= 1
    if invert:
        ninv = _pow_mod_nb(n, p - 2, p)
        for i in range(n):
            a[i] = (a[i] * ninv) % p
    return a


_bitrev_cache: dict = {}
_twiddle_cache: dict = {}


def _bitrev_idx(n):
    idx = _bitrev_cache.get(n)
    if idx is None:
        bits = n.bit_length() - 1
        idx = np.arange(n)
        rev = np.zeros(n, np.int64)
        for _ in range(bits):
            rev = (rev << 1) | (idx & 1)
            idx >>= 1
        idx = rev
        _bitrev_cache[n] = idx
    return idx


def _twiddles(p, root, ln, invert):
    key = (p, root, ln, invert)
    w = _twiddle_cache.get(key)
    if w is None:
        exp = (p - 1 - (p - 1) // ln) if invert else (p - 1) // ln
        wn = pow(int(root), int(exp), int(p))
        half = ln // 2
        w = np.empty(half, np.int64)
        x = 1
        for i in range(half):
            w[i] = x
            x = (x * wn) % p
        _twiddle_cache[key] = w
    return w


def _ntt_np(a, p, root, invert):
    n = a.shape[0]
    a = a[_bitrev_idx(n)].copy()
    ln = 2
    while ln <= n:
        half = ln // 2
        w = _twiddles(p, root, ln, invert)
        view = a.reshape(n // ln, ln)
        lo = view[:, :half].copy()
        hi = (view[:, half:] * w[None, :]) % p
        view[:, half:] = (lo + p - hi) % p
        view[:, :half] = (lo + hi) % p
        ln <<= 1
    if invert:
        ninv = pow(n, p - 2, p)
        a = (a * ninv) % p
    return a


# ----------------------------------------------------------------------
# Dispatch
# ----------------------------------------------------------------------

def _ntt_nb_copy(a, p, root, invert):
    return _ntt_nb(a.copy(), p, root, invert)


if USE_NUMBA:
    em_main_sums = _em_main_sums_nb
    dirichlet_line = _dirichlet_line_nb
    bin2d = _bin2d_nb
    pair_bin = _pair_bin_nb
    torus_g = _torus_g_nb
    ntt = _ntt_nb_copy
else:
    em_main_sums = _em_main_sums_np
    dirichlet_line = _dirichlet_line_np
    bin2d = _bin2d_np
    pair_bin = _pair_bin_np
    torus_g = _torus_g_np
    ntt = _ntt_np


def kernel_variants():
    """Both variants of every kernel, keyed by name; used by the benchmark."""
    return {
        "em_main_sums": (_em_main_sums_nb, _em_main_sums_np),
        "dirichlet_line": (_dirichlet_line_nb, _dirichlet_line_np),
        "bin2d": (_bin2d_nb, _bin2d_np),
        "pair_bin": (_pair_bin_nb, _pair_bin_np),
        "torus_g": (_torus_g_nb, _torus_g_np),
        "ntt": (_ntt_nb_copy, _ntt_np),
    }
