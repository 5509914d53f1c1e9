import cmath
import math

import numpy as np
import pytest

from mfunc.errors import DomainError, PoleError
from mfunc.eulerlog import euler_log_partial
from mfunc.primes import primes_up_to
from mfunc.zeta import LineResult, log_zeta_line, zeta_eval

from oracles import oracle_zeta

# frozen from oracles.oracle_zeta (mpmath at 30 digits)
ZETA_REFS = {
    (2.0, 0.0): 1.6449340668482264 + 0.0j,
    (1.5, 10.0): 1.2783911664347598 - 0.09572405598670886j,
    (0.8, 35.0): 2.107646022859413 + 0.7509215365982014j,
    (0.6, 100.0): 2.36369787479286 - 0.03722194293547549j,
    (1.1, 1000.0): 0.9521077516526445 - 0.00582588339633892j,
    (2.5, 10000.0): 0.9765930878989338 - 0.17614561786952587j,
}


def test_zeta_eval_against_mpmath():
    for (sigma, t), ref in ZETA_REFS.items():
        v = zeta_eval(sigma, t)
        assert abs(v - ref) < 1e-9, (sigma, t)


def test_zeta_error_bound_is_honest():
    # the rigorous Euler-Maclaurin remainder must dominate the true error
    from mfunc.zeta import _zeta_grid

    for (sigma, t), ref in ZETA_REFS.items():
        vals, bounds = _zeta_grid(sigma, np.array([t]), 2.0, 8)
        assert abs(vals[0] - ref) <= bounds[0] + 1e-12, (sigma, t)


def test_zeta_pole():
    with pytest.raises(PoleError):
        zeta_eval(1.0, 0.0)


def test_zeta_real_axis_values():
    assert zeta_eval(2.0, 0.0).real == pytest.approx(math.pi**2 / 6, rel=1e-12)
    assert zeta_eval(4.0, 0.0).real == pytest.approx(math.pi**4 / 90, rel=1e-12)


def test_line_domain_checks():
    with pytest.raises(DomainError):
        log_zeta_line(1.5, 0.0, 10.0, 0.5, mode="nonsense")
    with pytest.raises(DomainError):
        log_zeta_line(1.0, 0.0, 10.0, 0.5)  # default mode needs sigma > 1
    with pytest.raises(DomainError):
        log_zeta_line(0.4, 0.0, 10.0, 0.5, mode="experimental")


def test_line_sigma_gt1_matches_euler_product():
    # truncation tail of the prime-power sum is ~X^(1-sigma)/((sigma-1)lnX),
    # so sigma=2.5 with X=1e6 leaves ~5e-11 and 1e-9 is a sharp check
    line = log_zeta_line(2.5, 0.0, 30.0, 0.25)
    assert isinstance(line, LineResult)
    assert line.n_flagged == 0
    P = primes_up_to(10**6)
    for j in (0, 40, 120):
        s = complex(2.5, line.t[j])
        ref = euler_log_partial(s, P)
        assert abs(line.values[j] - ref) < 1e-9


def test_line_matches_mpmath_principal_region():
    # sigma > 1: log zeta never wraps, mpmath principal log is the truth
    line = log_zeta_line(1.2, 0.0, 20.0, 0.5)
    for j in range(0, line.t.size, 8):
        ref = cmath.log(oracle_zeta(complex(1.2, line.t[j])))
        assert abs(line.values[j] - ref) < 1e-9


def test_line_experimental_tracks_branch_below_one():
    # frozen from oracles.oracle_log_zeta_track(0.8, 35.0): continuously
    # tracked log zeta along sigma=3 up then across to sigma=0.8;
    # exp(ref) matches zeta(0.8+35i) to ~1e-15
    ref = 0.8053240810734029 + 0.34226244495968056j
    line = log_zeta_line(0.8, 0.0, 35.0, 0.1, mode="experimental")
    j = int(round(35.0 / 0.1))
    assert not line.flags[j]
    assert abs(line.values[j] - ref) < 1e-8


def test_line_conjugate_symmetry_default_mode():
    up = log_zeta_line(1.3, 0.0, 5.0, 0.25)
    down = log_zeta_line(1.3, -5.0, 0.0, 0.25)
    np.testing.assert_allclose(
        down.values, np.conj(up.values[::-1]), atol=1e-10
    )


def test_line_values_exp_to_zeta():
    # exp(log zeta) must reproduce zeta even when the log branch is tracked
    line = log_zeta_line(1.1, 0.0, 50.0, 0.5)
    for j in (3, 37, 99):
        ref = oracle_zeta(complex(1.1, line.t[j]))
        assert abs(cmath.exp(complex(line.values[j])) - ref) < 1e-9


def test_clean_values_excludes_flagged():
    line = log_zeta_line(1.5, 0.0, 10.0, 0.5)
    assert line.clean_values().size == line.t.size - line.n_flagged
