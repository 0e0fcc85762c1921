import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sfg import oracle
from sfg.errors import InvalidParameterError
from sfg.model import (DimensionlessParams, EscortSpec, PhotonSpec, coupling_scale,
                       q_zero_chirp, realize, reduce)


def test_default_pump_is_separable():
    ph = PhotonSpec(sigma1=2.0, sigma_h=0.5)
    assert ph.S == 2e9
    assert ph.stretch == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("kwargs", [
    dict(sigma1=0.0, sigma_h=1.0),
    dict(sigma1=1.0, sigma_h=-1.0),
    dict(sigma1=1.0, sigma_h=1.0, S=0.0),
    dict(sigma1=math.nan, sigma_h=1.0),
    dict(sigma1=1.0, sigma_h=1.0, A1=math.inf),
])
def test_photon_rejects_bad_values(kwargs):
    with pytest.raises(InvalidParameterError):
        PhotonSpec(**kwargs)


def test_escort_and_params_reject_bad_values():
    with pytest.raises(InvalidParameterError):
        EscortSpec(sigma2=0.0)
    with pytest.raises(InvalidParameterError):
        EscortSpec(sigma2=1.0, tau=math.nan)
    with pytest.raises(InvalidParameterError):
        DimensionlessParams(p=-1.0)
    with pytest.raises(InvalidParameterError):
        DimensionlessParams(p=1.0, q=0.0)


def test_dict_round_trip():
    ph = PhotonSpec(sigma1=0.7, sigma_h=1.3, S=2.0, A1=-4.0)
    assert PhotonSpec.from_dict(ph.to_dict()) == ph
    es = EscortSpec(sigma2=0.3, A2=2.0, tau=1.5)
    assert EscortSpec.from_dict(es.to_dict()) == es
    with pytest.raises(InvalidParameterError):
        EscortSpec.from_dict({"sigma2": 1.0, "width": 2.0})


def test_spectrum_is_normalised():
    ph = PhotonSpec(sigma1=0.8, sigma_h=1.1, S=0.6, A1=3.0)
    w = np.linspace(-12, 12, 801)
    dw = w[1] - w[0]
    a, b = np.meshgrid(w, w, indexing="ij")
    assert np.sum(np.abs(ph.spectrum(a, b)) ** 2) * dw * dw == pytest.approx(1.0, abs=1e-10)
    es = EscortSpec(sigma2=0.9, A2=-2.0, tau=3.0)
    assert np.sum(np.abs(es.spectrum(w)) ** 2) * dw == pytest.approx(1.0, abs=1e-10)


def test_time_variances_match_sampled_marginals():
    ph = PhotonSpec(sigma1=1.2, sigma_h=0.9, S=0.7, A1=1.5)
    es = EscortSpec(sigma2=0.8, A2=2.0)
    f0 = oracle.sample_input(ph, *oracle.default_axes(ph, es, min_n=512))
    sd = oracle.effective_width(oracle.temporal_marginal(f0))
    assert sd**2 == pytest.approx(ph.signal_time_variance, rel=1e-9)
    swapped = oracle.JointGrid(f0.axis_h, f0.axis_a, f0.data.T)
    sd_h = oracle.effective_width(oracle.temporal_marginal(swapped))
    assert sd_h**2 == pytest.approx(ph.herald_time_variance, rel=1e-9)


def test_reduce_unchirped():
    ph = PhotonSpec(sigma1=2.0, sigma_h=1.0)
    es = EscortSpec(sigma2=1.0, tau=0.5)
    dp = reduce(ph, es, gamma=0.3)
    assert dp.q == pytest.approx(0.25, rel=1e-12)
    assert dp.T == pytest.approx(math.sqrt(2) * 0.5, rel=1e-15)
    assert dp.p == pytest.approx(0.3 * 2 * (8 * math.pi) ** 0.25, rel=1e-15)
    assert q_zero_chirp(ph, es) == 0.25


def test_coupling_scale_peak_rotation():
    # p/2 is the peak rotation angle sqrt(2 pi) gamma max|g|
    es = EscortSpec(sigma2=0.7, A2=3.0)
    peak = (2 * es.sigma2**2 / (math.pi * (1 + es.chirp_ratio))) ** 0.25
    assert coupling_scale(es) / 2 == pytest.approx(math.sqrt(2 * math.pi) * peak, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(p=st.floats(0.0, 6.0), logq=st.floats(-4.0, 4.0), T=st.floats(-3.0, 3.0),
       A1=st.floats(-20.0, 20.0), A2=st.floats(-20.0, 20.0),
       S=st.one_of(st.none(), st.floats(0.3, 3.0)))
def test_realize_round_trip(p, logq, T, A1, A2, S):
    q = 10.0**logq
    photon, escort, gamma = realize(p, q, T, A1=A1, A2=A2, S=S)
    back = reduce(photon, escort, gamma)
    assert back.p == pytest.approx(p, rel=1e-12, abs=1e-14)
    assert back.q == pytest.approx(q, rel=1e-9)
    assert back.T == pytest.approx(T, rel=1e-12, abs=1e-14)
