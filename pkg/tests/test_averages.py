"""Tests for the empirical averages: vertical lines, character families,
and torus quadrature references.

The structural anchor is the exact correspondence between character
averages mod a prime q and a rank-1 lattice rule on the torus: as j runs
over all q - 1 characters, chi_j(p) = e(j ind(p) / (q-1)), so the full
character average IS a lattice quadrature of the torus integrand. The
primitive-only average used by the library differs by the single principal
term, which gives an exactly testable identity.
"""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfunc import (
    DomainError,
    EmpiricalDistribution,
    RectangleRegion,
    TestFunction,
    build_character_table,
    char_average_convergence,
    char_function_P,
    chi_tau_average,
    chi_tau_average_many,
    empirical_W,
    ihara_outer_average,
    log_L_P_char,
    log_L_P_line,
    log_zeta_line,
    modulus_average,
    primes_up_to,
    torus_integral,
    write_convergence_csv,
)

from oracles import (
    oracle_char_table,
    oracle_dirichlet_L_log,
    oracle_torus_integral_2d,
)


def test_test_function_kinds_and_validation():
    r = RectangleRegion(-1, 1, -1, 1)
    ind = TestFunction(kind="rectangle-indicator", region=r)
    assert ind.is_real
    assert ind(np.array([0j, 2 + 0j])).tolist() == [1.0, 0.0]
    g = TestFunction(kind="gaussian", center=1j, width=2.0)
    assert g.is_real
    assert g(np.array([1j]))[0] == pytest.approx(1.0)
    f = TestFunction(kind="fourier-kernel", z=2 + 1j)
    assert not f.is_real
    w = 0.3 - 0.7j
    want = cmath.exp(1j * (2 * w.real + 1 * w.imag))
    assert abs(f(np.array([w]))[0] - want) < 1e-15
    one = TestFunction(kind="builtin", name="one")
    assert one(np.array([5 + 5j]))[0] == 1.0
    with pytest.raises(DomainError):
        TestFunction(kind="rectangle-indicator")
    with pytest.raises(DomainError):
        TestFunction(kind="gaussian", width=0.0)
    with pytest.raises(DomainError):
        TestFunction(kind="builtin", name="nope")
    with pytest.raises(DomainError):
        TestFunction(kind="wavelet")
    assert "region" in ind.describe()
    assert "z" in f.describe()


def test_empirical_from_line_weights_and_flags():
    line = log_zeta_line(1.5, 0.0, 5.0, 0.5)
    dist = EmpiricalDistribution.from_line(line)
    assert dist.weights[0] == 0.5
    assert dist.weights[-1] == 0.5
    assert dist.weights[3] == 1.0
    assert dist.n_excluded == line.n_flagged
    assert dist.total_weight() == pytest.approx(len(line.t) - 1)


def test_empirical_w_monotone_and_bounded():
    rng = np.random.default_rng(0)
    samples = rng.normal(size=500) + 1j * rng.normal(size=500)
    dist = EmpiricalDistribution(samples=samples)
    inner = RectangleRegion(-0.5, 0.5, -0.5, 0.5)
    outer = RectangleRegion(-2, 2, -2, 2)
    wi, wo = empirical_W(dist, inner), empirical_W(dist, outer)
    assert 0.0 <= wi <= wo <= 1.0


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-1.5, max_value=1.5), st.integers(0, 2**31 - 1))
def test_empirical_w_additive_over_split(cut, seed):
    rng = np.random.default_rng(seed)
    samples = rng.normal(size=200) + 1j * rng.normal(size=200)
    dist = EmpiricalDistribution(samples=samples)
    whole = RectangleRegion(-2, 2, -2, 2)
    left = RectangleRegion(-2, cut, -2, 2)
    right = RectangleRegion(cut, 2, -2, 2)
    total = empirical_W(dist, left) + empirical_W(dist, right)
    assert abs(total - empirical_W(dist, whole)) < 1e-12


def test_empirical_w_needs_samples():
    dist = EmpiricalDistribution(
        samples=np.array([1j]), weights=np.array([0.0])
    )
    with pytest.raises(DomainError):
        empirical_W(dist, RectangleRegion(-1, 1, -1, 1))


def test_log_l_p_line_matches_direct_logs():
    P = (2, 3, 5)
    sigma = 1.1
    tgrid = np.array([0.0, 0.7, 13.5])
    got = log_L_P_line(P, sigma, tgrid)
    for i, t in enumerate(tgrid):
        s = complex(sigma, t)
        want = -sum(cmath.log(1 - p**-s) for p in P)
        assert abs(got[i] - want) < 1e-13


def test_chi_tau_average_of_one_is_one():
    one = TestFunction(kind="builtin", name="one")
    avg = chi_tau_average((2, 3), 1.0, one, 50.0, 0.25)
    assert avg == pytest.approx(1.0, abs=1e-14)


def test_chi_tau_average_approximates_char_function():
    z = 1 + 0.5j
    phi = TestFunction(kind="fourier-kernel", z=z)
    avg = chi_tau_average((2, 3), 1.0, phi, 2000.0, 0.05)
    tgt = char_function_P((2, 3), 1.0, z)
    assert abs(avg - tgt) < 5e-3


def test_chi_tau_average_many_matches_single():
    phis = [
        TestFunction(kind="builtin", name="re-clipped"),
        TestFunction(kind="gaussian", center=0j, width=1.0),
    ]
    many = chi_tau_average_many((2, 3), 1.2, phis, 200.0, 0.1)
    for phi, got in zip(phis, many):
        assert got == pytest.approx(chi_tau_average((2, 3), 1.2, phi, 200.0, 0.1))


def test_chi_tau_domain_checks():
    one = TestFunction(kind="builtin", name="one")
    with pytest.raises(DomainError):
        chi_tau_average((2, 3), 1.0, one, 0.0, 0.1)
    with pytest.raises(DomainError):
        chi_tau_average((2, 3), 1.0, one, 10.0, 20.0)


def test_log_l_p_char_matches_truncated_oracle():
    # with P up to 5e4 at sigma = 2 the truncation defect is ~2e-9
    chars = oracle_char_table(7)
    chi2 = chars[2]
    mine = log_L_P_char(
        primes_up_to(50_000),
        2.0,
        lambda a: 0.0 if a % 7 == 0 else chi2[a % 7],
    )
    full = oracle_dirichlet_L_log(7, chi2, 2.0)
    assert abs(mine - full) < 1e-7


def test_characters_average_is_lattice_rule():
    # primitive avg * (q-2) + principal term = (q-1) * full lattice average
    q, P, sigma = 101, (2, 3, 5), 1.0
    phi = TestFunction(kind="gaussian", center=0.1 + 0.2j, width=1.3)
    table = build_character_table(q)
    prim = modulus_average(q, P, sigma, phi)
    js = np.arange(q - 1)
    total = np.zeros(len(js), dtype=np.complex128)
    for p in P:
        k = (js * int(table.ind[p % q])) % (q - 1)
        total -= np.log(1.0 - np.exp(2j * np.pi * k / (q - 1)) * p ** (-sigma))
    all_avg = complex(phi(total).sum()) / (q - 1)
    chi0 = log_L_P_char(P, sigma, lambda a: 0.0 if a % q == 0 else 1.0)
    combined = (prim * (q - 2) + complex(phi(np.array([chi0]))[0])) / (q - 1)
    assert abs(combined - all_avg) < 1e-12


def test_modulus_average_warns_when_q_in_p():
    phi = TestFunction(kind="builtin", name="one")
    with pytest.warns(RuntimeWarning):
        modulus_average(3, (2, 3), 1.0, phi)


def test_ihara_outer_average_smallest_family():
    phi = TestFunction(kind="gaussian", center=0j, width=1.0)
    got = ihara_outer_average(3, (2, 5), 1.0, phi)
    assert got == pytest.approx(modulus_average(3, (2, 5), 1.0, phi))
    with pytest.raises(DomainError):
        ihara_outer_average(2, (2, 5), 1.0, phi)


def test_torus_integral_tensor_matches_midpoint_oracle():
    phi = TestFunction(kind="gaussian", center=0.1 + 0.2j, width=1.3)
    ref = oracle_torus_integral_2d(2, 3, 1.0, phi)
    got = torus_integral((2, 3), 1.0, phi, method="tensor")
    assert abs(got - ref) < 1e-12


def test_torus_integral_lattice_and_mc_agree_with_tensor():
    phi = TestFunction(kind="gaussian", center=0.1 + 0.2j, width=1.3)
    t = torus_integral((2, 3), 1.0, phi, method="tensor")
    l = torus_integral((2, 3), 1.0, phi, method="lattice")
    m = torus_integral((2, 3), 1.0, phi, method="mc", n_samples=200_000, seed=1)
    assert abs(l - t) < 1e-10
    assert abs(m - t) < 1e-2
    again = torus_integral((2, 3), 1.0, phi, method="mc", n_samples=200_000, seed=1)
    assert again == m


def test_torus_integral_dimension_gates():
    phi = TestFunction(kind="builtin", name="one")
    with pytest.raises(DomainError):
        torus_integral((2, 3, 5, 7), 1.0, phi, method="tensor")
    with pytest.raises(DomainError):
        torus_integral(primes_up_to(29), 1.0, phi, method="lattice")
    with pytest.raises(DomainError):
        torus_integral((2, 3), 1.0, phi, method="nope")
    # auto picks something valid in every dimension band
    for P in ((2,), (2, 3, 5, 7), primes_up_to(29)):
        val = torus_integral(P, 1.5, phi, method="auto")
        assert val == pytest.approx(1.0, abs=1e-12)


def test_char_average_convergence_rows_and_csv(tmp_path):
    phi = TestFunction(kind="gaussian", center=0j, width=1.0)
    rows = char_average_convergence((2, 3), 1.0, phi, [11, 31, 101])
    assert [r.parameter for r in rows] == [11.0, 31.0, 101.0]
    assert rows[-1].gap < rows[0].gap
    path = tmp_path / "conv.csv"
    write_convergence_csv(path, rows)
    lines = path.read_text().splitlines()
    assert lines[0] == "parameter,estimate,gap"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert float(first[0]) == 11.0
    with pytest.raises(DomainError):
        char_average_convergence((2, 3), 1.0, phi, [2, 11])
