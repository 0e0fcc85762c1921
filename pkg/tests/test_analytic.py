import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sfg import analytic, oracle
from sfg.analytic import (PurityResult, efficiency, efficiency_lowq, efficiency_quadrature,
                          optimal_p_paper, optimal_p_refined, sum_series)
from sfg.errors import (ConvergenceError, InvalidParameterError, NoPeakError, SFGError,
                        UndefinedFidelityError, UndefinedPurityError)
from sfg.model import DimensionlessParams as DP
from sfg.model import EscortSpec, PhotonSpec, realize


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def mp_efficiency_series(p, q, T, terms=120, dps=60):
    """Efficiency series summed term by term in arbitrary precision."""
    with mp.workdps(dps):
        p, q, T = mp.mpf(p), mp.mpf(q), mp.mpf(T)
        total = mp.mpf(0)
        for k in range(1, terms + 1):
            c = mp.exp(-k * T**2 / (1 + q * k)) / mp.sqrt(1 + q * k)
            total += (-1) ** (k + 1) * c * p ** (2 * k) / mp.factorial(2 * k)
        return float(total / 2)


def roots_estimator(q, T=0.0):
    """Four-term slope as a cubic in p^2, solved with numpy.roots."""
    c = [math.exp(-k * T**2 / (1 + q * k)) / math.sqrt(1 + q * k) for k in range(1, 5)]
    coeffs = [-c[3] / math.factorial(7), c[2] / math.factorial(5),
              -c[1] / math.factorial(3), c[0]]
    roots = np.roots(coeffs)
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-12 and r.real > 0)
    return math.sqrt(real[0])


# ---------------------------------------------------------------------------
# waveforms
# ---------------------------------------------------------------------------

def test_escort_peak_value():
    # direct FT at t = 0; the chirp oscillates, so integrate piecewise
    es = EscortSpec(sigma2=1.0, A2=5.0)
    nodes = [mp.mpf(x) for x in np.linspace(-12.0, 12.0, 961)]
    val = mp.quad(lambda w: complex(es.spectrum(float(w))), nodes) / math.sqrt(2 * math.pi)
    assert abs(analytic.escort_time(es, 0.0)) == pytest.approx(abs(complex(val)), rel=1e-10)
    assert abs(analytic.escort_time(es, 0.0)) == pytest.approx(0.19961, abs=5e-6)


def test_escort_phase_and_magnitude_compose():
    es = EscortSpec(sigma2=0.7, omega02=3.0, A2=-2.5, tau=0.4)
    t = np.linspace(-5, 5, 41)
    g = analytic.escort_time(es, t)
    assert np.allclose(np.abs(g), analytic.escort_magnitude(es, t), rtol=1e-13)
    assert np.allclose(g / np.abs(g), analytic.escort_phase(es, t), atol=1e-12)


def test_input_waveform_matches_sampled_spectrum():
    ph = PhotonSpec(sigma1=0.9, sigma_h=1.2, S=0.8, A1=0.6)
    es = EscortSpec(sigma2=1.0)
    axes = oracle.default_axes(ph, es, min_n=512)
    grid = oracle.sample_input(ph, *axes)
    closed = oracle.sample_function(lambda a, b: analytic.input_time(ph, a, b), *axes)
    err = np.max(np.abs(grid.data - closed.data)) / np.max(np.abs(closed.data))
    assert err < 1e-10


def test_upconverted_waveform_first_order_limit():
    ph, es, gamma = realize(1e-4, 1.0, 0.3, A1=0.5, A2=-0.2)
    t = np.linspace(-3, 3, 25)[:, None]
    th = np.linspace(-3, 3, 25)[None, :]
    full = analytic.f3f(ph, es, gamma, t, th)
    first = analytic.f3_first_order(ph, es, gamma, t, th)
    ratio = full[np.abs(first) > 1e-30] / first[np.abs(first) > 1e-30]
    assert np.max(np.abs(ratio.imag)) < 1e-12
    assert np.allclose(ratio.real, 1.0, atol=1e-8)


def test_full_and_first_order_differ_by_real_factor():
    ph, es, gamma = realize(3.0, 2.0, 0.0, A2=1.3)
    t = np.linspace(-2, 2, 17)
    full = analytic.f3f(ph, es, gamma, t, 0.1)
    first = analytic.f3_first_order(ph, es, gamma, t, 0.1)
    assert np.max(np.abs((full / first).imag)) < 1e-12
    assert np.all((full / first).real > 0)


def test_waveform_samples_records():
    ph, es, gamma = realize(1.0, 1.0)
    recs = analytic.waveform_samples(ph, es, gamma, [0.0, 0.5], [0.0], mode=1)
    assert len(recs) == 2
    assert recs[1].t == 0.5
    assert recs[0].amplitude == pytest.approx(complex(analytic.f1f(ph, es, gamma, 0.0, 0.0)))


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------

def test_sum_series_known_value():
    res = sum_series(lambda k: -2 * math.log(k), lambda k: 1.0 if k % 2 else -1.0,
                     tol=1e-10, max_terms=10**6)
    assert res.converged
    assert res.value == pytest.approx(math.pi**2 / 12, abs=1e-9)


def test_sum_series_reports_partial_on_cap():
    with pytest.raises(ConvergenceError) as info:
        sum_series(lambda k: -math.log(k), lambda k: 1.0, max_terms=50)
    assert info.value.partial.terms_used == 50
    assert not info.value.partial.converged


def test_efficiency_reference_point():
    ref = mp_efficiency_series(2.0, 1.0, 0.0)
    res = efficiency(DP(p=2.0, q=1.0))
    assert res.value == pytest.approx(ref, abs=1e-13)
    assert res.value == pytest.approx(0.5355, abs=5e-5)
    assert res.converged and res.method == "series"


@pytest.mark.parametrize("p,q,T", [(0.5, 1e-3, 0.0), (3.0, 0.3, 1.2), (6.0, 30.0, -2.0),
                                   (11.5, 1.0, 0.5), (20.0, 1.0, 0.0), (25.0, 0.01, 2.5)])
def test_efficiency_against_precise_series(p, q, T):
    terms = 200 if p > 12 else 80
    ref = mp_efficiency_series(p, q, T, terms=terms, dps=80)
    assert efficiency(DP(p=p, q=q, T=T)).value == pytest.approx(ref, abs=1e-11)


def test_efficiency_large_p_uses_quadrature():
    res = efficiency(DP(p=15.0, q=1.0))
    assert res.method == "quadrature"


@settings(max_examples=40, deadline=None)
@given(p=st.floats(0.0, 12.0), logq=st.floats(-4.0, 4.0), T=st.floats(-3.0, 3.0))
def test_series_matches_quadrature(p, logq, T):
    q = 10.0**logq
    val = efficiency(DP(p=p, q=q, T=T)).value
    assert 0.0 <= val <= 1.0
    assert val == pytest.approx(efficiency_quadrature(p, q, T), abs=1e-10)


def test_efficiency_trivial_points():
    assert efficiency(DP(p=0.0)).value == 0.0
    with pytest.raises(InvalidParameterError):
        efficiency(DP(p=1.0), tol=0.0)


def test_lowq_examples():
    assert efficiency_lowq(math.pi, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert efficiency_lowq(0.0, 1.0) == 0.0
    assert efficiency_lowq(math.pi, math.sqrt(2 * math.log(2))) == pytest.approx(0.5, abs=1e-14)


def test_lowq_is_approached_linearly_in_q():
    # deviation from the monochromatic limit is O(q)
    d1 = abs(efficiency(DP(p=2.0, q=1e-4, T=0.7)).value - efficiency_lowq(2.0, 0.7))
    d2 = abs(efficiency(DP(p=2.0, q=1e-5, T=0.7)).value - efficiency_lowq(2.0, 0.7))
    assert d1 / d2 == pytest.approx(10.0, rel=1e-3)
    assert efficiency(DP(p=math.pi, q=1e-6)).value == pytest.approx(1.0, abs=1e-5)


# ---------------------------------------------------------------------------
# optimal coupling
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("q,T", [(1e-8, 0.0), (1.0, 0.0), (0.1, 0.5), (10.0, 1.0),
                                 (1.0, 3.0)])
def test_estimator_matches_cubic_roots(q, T):
    assert optimal_p_paper(q, T) == pytest.approx(roots_estimator(q, T), rel=1e-10)


def test_estimator_reference_values():
    assert optimal_p_paper(1e-8) == pytest.approx(3.078642, abs=1e-6)
    p1 = optimal_p_paper(1.0)
    assert math.pi < p1 < 2 * math.pi
    assert p1 == pytest.approx(3.460243, abs=1e-6)


def test_estimator_without_peak():
    with pytest.raises(NoPeakError):
        optimal_p_paper(1.0, 3.0, p_max=5.0)
    with pytest.raises(InvalidParameterError):
        optimal_p_paper(0.0)


@pytest.mark.parametrize("q,T", [(1e-6, 0.0), (1.0, 0.0), (100.0, 0.0), (1.0, 2.0)])
def test_refined_optimum_against_quadrature_scan(q, T):
    p, eff = optimal_p_refined(q, T)
    grid = np.linspace(max(p - 0.2, 0.0), p + 0.2, 401)
    scan = max(efficiency_quadrature(x, q, T) for x in grid)
    assert eff == pytest.approx(scan, abs=1e-8)
    assert eff >= scan - 1e-12


def test_refined_optimum_values():
    p, eff = optimal_p_refined(1e-6)
    assert p == pytest.approx(math.pi, abs=1e-4)
    assert eff == pytest.approx(1.0, abs=1e-4)
    assert optimal_p_refined(1.0)[1] == pytest.approx(0.8890660, abs=1e-7)
    assert optimal_p_refined(100.0)[1] == pytest.approx(0.15104, abs=1e-5)


# ---------------------------------------------------------------------------
# fidelity
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("q,T,A1,A2,S", [(1.0, 0.0, 0.0, 0.0, None),
                                         (10.0, 0.5, 0.4, -0.3, 1.0)])
def test_fidelity_against_grid(q, T, A1, A2, S):
    p = optimal_p_paper(q, T)
    ph, es, gamma = realize(p, q, T, A1=A1, A2=A2, S=S)
    axes = oracle.default_axes(ph, es, gamma, min_n=256)
    f0 = oracle.sample_input(ph, *axes)
    g = oracle.sample_escort(es, axes[0])
    _, f3 = oracle.recursion_upconvert(f0, g, gamma)
    # first-order amplitude is not norm-preserving, so keep it as a bare array
    a, b = np.meshgrid(axes[0].values, axes[1].values, indexing="ij")
    first = analytic.f3_first_order(ph, es, gamma, a, b)
    wa, wh = axes[0].weights, axes[1].weights
    overlap = abs(wa @ (f3.data.conj() * first) @ wh) ** 2
    expected = overlap / (oracle.norm2(f3) * (wa @ np.abs(first) ** 2 @ wh))
    assert analytic.fidelity_first_order(ph, es, gamma) == pytest.approx(expected, abs=1e-9)


def test_fidelity_limits():
    assert analytic.fidelity_dimensionless(1e-3, 1.0) == pytest.approx(1.0, abs=1e-6)
    assert analytic.fidelity_dimensionless(3.0, 1e-3) == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(UndefinedFidelityError):
        analytic.fidelity_dimensionless(0.0, 1.0)
    with pytest.raises(UndefinedFidelityError):
        analytic.fidelity_dimensionless(1e-7, 1e-3, 20.0)


# ---------------------------------------------------------------------------
# purity
# ---------------------------------------------------------------------------

def test_input_purity_closed_values():
    res = analytic.input_purity(1.0, 1.0, 1.0)
    assert res.renyi2 == pytest.approx(0.5 * math.log(4 / 3), rel=1e-14)
    assert res.purity == pytest.approx(math.sqrt(3) / 2, rel=1e-14)
    assert analytic.input_purity(1e9, 1.0, 1.0).renyi2 == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("S,s1,sh,A1", [(1.0, 1.0, 1.0, 0.0), (0.5, 0.7, 1.4, 2.0)])
def test_input_purity_against_grid(S, s1, sh, A1):
    ph = PhotonSpec(sigma1=s1, sigma_h=sh, S=S, A1=A1)
    axes = oracle.default_axes(ph, EscortSpec(sigma2=1.0), min_n=256)
    f0 = oracle.sample_input(ph, *axes)
    assert oracle.grid_purity(f0) == pytest.approx(analytic.input_purity(S, s1, sh).purity,
                                                   abs=1e-10)


@pytest.mark.parametrize("q,S,A1", [(10.0, 1.0, 0.0), (1.0, 0.7, 0.0), (3.0, 1.5, 0.8)])
def test_upconverted_purity_against_grid(q, S, A1):
    p = optimal_p_paper(q)
    ph, es, gamma = realize(p, q, 0.0, S=S, A1=A1)
    axes = oracle.default_axes(ph, es, gamma, min_n=128)
    f0 = oracle.sample_input(ph, *axes)
    g = oracle.sample_escort(es, axes[0])
    _, f3 = oracle.recursion_upconvert(f0, g, gamma)
    res = analytic.upconverted_purity(S, ph.sigma1, ph.sigma_h, p, q)
    assert res.purity == pytest.approx(oracle.grid_purity(f3), abs=1e-9)


def test_upconversion_lowers_entanglement_at_high_q():
    r_in = analytic.input_purity(1.0, 1.0, 1.0).renyi2
    r_out = analytic.upconverted_purity(1.0, 1.0, 1.0, optimal_p_paper(10.0), 10.0).renyi2
    assert r_out < r_in


def test_purity_errors():
    with pytest.raises(UndefinedPurityError):
        analytic.upconverted_purity(1.0, 1.0, 1.0, 0.0, 1.0)
    with pytest.raises(InvalidParameterError):
        analytic.upconverted_purity(1.0, 1.0, 1.0, 1.0, 1.0, tol=-1.0)
    with pytest.raises(SFGError):
        PurityResult.from_purity(1.5)
    assert PurityResult.from_purity(1.0 + 1e-12).purity == 1.0
