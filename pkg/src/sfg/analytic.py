"""Closed-form waveforms, conversion efficiency, fidelity and entanglement.

All time-domain functions broadcast over numpy arrays of ``t``/``t_h``.
The escort envelope ``g(t)`` and the input joint temporal amplitude
``f_i(t, t_h)`` are the unitary Fourier transforms (``e^{+i w t}`` kernel,
``1/sqrt(2 pi)`` per dimension) of the Gaussian spectra in :mod:`sfg.model`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.optimize import brentq, minimize_scalar

from .errors import (ConvergenceError, InvalidParameterError, NoPeakError,
                     SFGError, UndefinedFidelityError, UndefinedPurityError)
from .model import DimensionlessParams, SeriesValue, reduce

SQRT_2PI = math.sqrt(2.0 * math.pi)

#: Above this p the alternating efficiency series loses too many digits to
#: cancellation (largest term ~ e^p / sqrt(2 pi p)); quadrature takes over.
LARGE_P = 12.0

DEFAULT_TOL = 1e-12
MAX_TERMS = 400


@dataclass(frozen=True)
class WaveformSample:
    t: float
    t_h: float
    amplitude: complex


@dataclass(frozen=True)
class PurityResult:
    """Subsystem purity and the matching Renyi-2 entropy ``-ln(purity)``."""

    purity: float
    renyi2: float
    series: SeriesValue = None

    @classmethod
    def from_purity(cls, purity, series=None):
        if not 0.0 < purity <= 1.0 + 1e-9:
            raise SFGError(f"purity {purity!r} outside (0, 1]")
        purity = min(purity, 1.0)
        return cls(purity=purity, renyi2=-math.log(purity), series=series)


# ---------------------------------------------------------------------------
# time-domain waveforms
# ---------------------------------------------------------------------------

def _zeta(A, sigma):
    return 1.0 - 4j * A * sigma**2


def escort_magnitude(escort, t):
    """|g(t)|, a real Gaussian peaked at ``t = -tau``."""
    s2 = escort.sigma2
    z2 = abs(_zeta(escort.A2, s2)) ** 2
    u = np.asarray(t, dtype=float) + escort.tau
    return (2.0 * s2**2 / (math.pi * z2)) ** 0.25 * np.exp(-s2**2 * u**2 / z2)


def escort_phase(escort, t):
    """``g(t)/|g(t)|`` from the analytic phase, valid where |g| underflows."""
    s2, A2 = escort.sigma2, escort.A2
    zeta = _zeta(A2, s2)
    u = np.asarray(t, dtype=float) + escort.tau
    phase = (escort.omega02 * u
             - 4.0 * A2 * s2**4 * u**2 / abs(zeta) ** 2
             - 0.5 * np.angle(zeta))
    return np.exp(1j * phase)


def escort_time(escort, t):
    """Escort temporal envelope g(t)."""
    return escort_magnitude(escort, t) * escort_phase(escort, t)


def input_time(photon, t, t_h):
    """Input joint temporal amplitude f_i(t, t_h)."""
    s1, sh, S = photon.sigma1, photon.sigma_h, photon.S
    zeta1 = _zeta(photon.A1, s1)
    den = zeta1 * (S**2 + sh**2) + s1**2
    pre = np.sqrt(2.0 * S * s1 * sh * math.sqrt(photon.sigma_in2) / (math.pi * den))
    t = np.asarray(t, dtype=float)
    t_h = np.asarray(t_h, dtype=float)
    quad = (s1**2 * (S**2 + sh**2) * t**2
            - 2.0 * s1**2 * sh**2 * t * t_h
            + sh**2 * (zeta1 * S**2 + s1**2) * t_h**2)
    carrier = np.exp(1j * (photon.omega01 * t + photon.omega0h * t_h))
    return pre * np.exp(-quad / den) * carrier


def _rotation_angle(escort, gamma, t):
    return SQRT_2PI * gamma * escort_magnitude(escort, t)


def f1f(photon, escort, gamma, t, t_h):
    """Amplitude left in the input mode after the interaction."""
    return input_time(photon, t, t_h) * np.cos(_rotation_angle(escort, gamma, t))


def f3f(photon, escort, gamma, t, t_h):
    """Upconverted two-photon amplitude (mode 3 with the herald).

    Carries the overall factor ``i`` produced by summing the odd orders of
    the interaction series.
    """
    return (1j * input_time(photon, t, t_h) * escort_phase(escort, t)
            * np.sin(_rotation_angle(escort, gamma, t)))


def f3_first_order(photon, escort, gamma, t, t_h):
    """Upconverted amplitude to first order in ``gamma``."""
    return 1j * SQRT_2PI * gamma * input_time(photon, t, t_h) * escort_time(escort, t)


def waveform_samples(photon, escort, gamma, t, t_h, mode=3):
    """Evaluate the mode-1 or mode-3 output on a mesh as WaveformSample records."""
    func = {1: f1f, 3: f3f}[mode]
    tt, hh = np.meshgrid(np.atleast_1d(t), np.atleast_1d(t_h), indexing="ij")
    amp = func(photon, escort, gamma, tt, hh)
    return [WaveformSample(float(a), float(b), complex(c))
            for a, b, c in zip(tt.ravel(), hh.ravel(), amp.ravel())]


# ---------------------------------------------------------------------------
# series machinery
# ---------------------------------------------------------------------------

def sum_series(log_term, sign, tol=DEFAULT_TOL, max_terms=MAX_TERMS, start=1,
               floor=1e-300, settle=3):
    """Sum ``sum_k sign(k) * exp(log_term(k))`` until the tail is negligible.

    Terms are accumulated with Neumaier compensation. Summation stops once
    ``settle`` consecutive terms are below ``tol * max(|partial|, floor)``
    and the magnitudes are decreasing, so a transient dip in a series whose
    terms first grow cannot end the sum early.
    """
    total = 0.0
    comp = 0.0
    quiet = 0
    prev = math.inf
    mag = math.inf
    for count, k in enumerate(range(start, start + max_terms), start=1):
        lt = log_term(k)
        mag = math.exp(lt) if lt > -745.0 else 0.0
        term = sign(k) * mag
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        partial = total + comp
        if mag <= tol * max(abs(partial), floor) and mag <= prev:
            quiet += 1
            if quiet >= settle:
                return SeriesValue(partial, count, mag, True)
        else:
            quiet = 0
        prev = mag
    raise ConvergenceError(
        f"series not converged after {max_terms} terms (last term {mag:.3e})",
        partial=SeriesValue(total + comp, max_terms, mag, False))


def _efficiency_log_term(p, q, T):
    logp = math.log(p)

    def log_term(k):
        return (2 * k * logp - math.lgamma(2 * k + 1)
                - k * T**2 / (1.0 + q * k) - 0.5 * math.log1p(q * k))

    return log_term


def _alternating(k):
    return 1.0 if k % 2 else -1.0


def _gaussian_expectation(func, q, T, epsrel=1e-12):
    """E[func(x)] for x ~ N(T, q/2), by adaptive Gauss-Kronrod quadrature.

    ``func`` is expected to decay at least like exp(-x^2/2), so the domain
    is the overlap of the Gaussian bulk with |x| < 40.
    """
    s = math.sqrt(q / 2.0)
    lo, hi = max(T - 14.0 * s, -40.0), min(T + 14.0 * s, 40.0)
    if lo >= hi:
        return 0.0
    norm = 1.0 / (s * math.sqrt(2.0 * math.pi))

    def integrand(x):
        return norm * math.exp(-0.5 * ((x - T) / s) ** 2) * func(x)

    points = [x for x in (T, 0.0) if lo < x < hi]
    val, _ = integrate.quad(integrand, lo, hi, points=points or None,
                            epsabs=0.0, epsrel=epsrel, limit=400)
    return val


def efficiency_quadrature(p, q, T):
    """<n3> as the Gaussian average of sin^2((p/2) e^{-x^2/2}).

    Integral form of the efficiency with the herald integrated out; used
    above ``LARGE_P`` and as an independent check of the series.
    """
    half = 0.5 * p
    return _gaussian_expectation(
        lambda x: math.sin(half * math.exp(-0.5 * x * x)) ** 2, q, T)


def efficiency(params, tol=DEFAULT_TOL, max_terms=MAX_TERMS):
    """Upconversion probability <n3> for dimensionless ``params``."""
    if tol <= 0:
        raise InvalidParameterError("tol must be > 0")
    p, q, T = params.p, params.q, params.T
    if p == 0.0:
        return SeriesValue(0.0, 1, 0.0, True)
    if p > LARGE_P:
        val = efficiency_quadrature(p, q, T)
        return SeriesValue(val, 1, 0.0, True, method="quadrature")
    res = sum_series(_efficiency_log_term(p, q, T), _alternating, tol, max_terms)
    val = 0.5 * res.value
    assert -1e-12 <= val <= 1.0 + 1e-12, f"efficiency {val} outside [0, 1]"
    return SeriesValue(val, res.terms_used, 0.5 * res.last_term, res.converged)


def efficiency_lowq(p, T):
    """q -> 0 limit of the efficiency (monochromatic escort)."""
    return math.sin(0.5 * math.exp(-0.5 * T**2) * p) ** 2


# ---------------------------------------------------------------------------
# optimal coupling
# ---------------------------------------------------------------------------

def _truncated_slope(p, q, T, terms=4):
    """d<n3>/dp of the efficiency series truncated after ``terms`` terms."""
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    for k in range(1, terms + 1):
        c = math.exp(-k * T**2 / (1.0 + q * k)) / math.sqrt(1.0 + q * k)
        out += (-1) ** (k - 1) * c * p ** (2 * k - 1) / math.factorial(2 * k - 1)
    return 0.5 * out


def optimal_p_paper(q, T=0.0, p_max=25.0, step=1e-2):
    """First stationary point of the four-term truncated efficiency series.

    Raises NoPeakError when the truncated slope keeps its sign on
    ``(0, p_max]``.
    """
    if q <= 0:
        raise InvalidParameterError("q must be > 0")
    grid = np.arange(step, p_max + step / 2, step)
    slope = _truncated_slope(grid, q, T)
    down = np.nonzero((slope[:-1] > 0) & (slope[1:] <= 0))[0]
    if not down.size:
        raise NoPeakError(f"no efficiency peak for q={q!r}, T={T!r} in (0, {p_max}]")
    i = down[0]
    return brentq(lambda x: float(_truncated_slope(x, q, T)), grid[i], grid[i + 1],
                  xtol=1e-14, rtol=4 * np.finfo(float).eps)


def _eff(p, q, T):
    return efficiency(DimensionlessParams(p=max(p, 0.0), T=T, q=q)).value


def _golden_max(func, a, m, b, xtol=1e-10):
    res = minimize_scalar(lambda x: -func(x), bracket=(a, m, b), method="golden",
                          options={"xtol": xtol})
    return res.x, -res.fun


def _uphill_bracket(func, seed, p_max):
    h = max(0.02 * seed, 1e-3)
    a, m, b = seed - h, seed, seed + h
    fa, fm, fb = func(a), func(m), func(b)
    for _ in range(200):
        if fm >= fa and fm >= fb:
            return a, m, b
        if fb > fm:
            a, m, fa, fm = m, b, fm, fb
            b = m + h
            fb = func(b)
        else:
            b, m, fb, fm = m, a, fm, fa
            a = max(m - h, 0.0)
            fa = func(a)
        if b > p_max or m <= 0.0:
            break
        h *= 1.3
    return None


def dense_scan_max(q, T, p_max=25.0, step=0.01):
    """Global maximum of the full efficiency series over a p-grid, refined."""
    grid = np.arange(step, p_max + step / 2, step)
    vals = np.array([_eff(p, q, T) for p in grid])
    i = int(np.argmax(vals))
    if 0 < i < len(grid) - 1:
        return _golden_max(lambda x: _eff(x, q, T), grid[i - 1], grid[i], grid[i + 1])
    return float(grid[i]), float(vals[i])


def optimal_p_refined(q, T=0.0, p_max=25.0):
    """Maximise the full efficiency series near the four-term estimate.

    Returns ``(p, efficiency)``. When the estimator has no peak, or no local
    maximum can be bracketed from it, the global maximum of a dense scan on
    ``(0, p_max]`` is returned instead.
    """
    try:
        seed = optimal_p_paper(q, T, p_max)
    except NoPeakError:
        return dense_scan_max(q, T, p_max)
    func = lambda x: _eff(x, q, T)  # noqa: E731
    bracket = _uphill_bracket(func, seed, p_max)
    if bracket is None:
        return dense_scan_max(q, T, p_max)
    return _golden_max(func, *bracket)


# ---------------------------------------------------------------------------
# fidelity with the first-order waveform
# ---------------------------------------------------------------------------

def fidelity_dimensionless(p, q, T=0.0):
    """Overlap fidelity of the full and first-order upconverted waveforms.

    The upconverted amplitude is f_i(t, t_h) times a function of ``t``
    only, so the herald integrates out exactly and both waveforms reduce
    to Gaussian averages over the scaled time x = sqrt(2) sigma2 (t + tau)
    / |zeta2| with x ~ N(T, q/2).
    """
    if p <= 0:
        raise UndefinedFidelityError("no upconverted photon at p = 0")
    a = 0.5 * p

    def envelope(x):
        return math.exp(-0.5 * x * x)

    n3 = _gaussian_expectation(lambda x: math.sin(a * envelope(x)) ** 2, q, T)
    if n3 < 1e-12:
        raise UndefinedFidelityError(f"<n3> = {n3:.3e} is too small")
    # remaining averages carry the same a^2 scale as n3 divided out
    overlap = _gaussian_expectation(
        lambda x: envelope(x) * math.sin(a * envelope(x)), q, T)
    n3_first = _gaussian_expectation(lambda x: envelope(x) ** 2, q, T)
    fid = overlap**2 / (n3 * n3_first)
    if fid > 1.0 + 1e-9:
        raise SFGError(f"fidelity {fid!r} exceeds 1")
    return min(fid, 1.0)


def fidelity_first_order(photon, escort, gamma):
    """Fidelity between the full and first-order upconverted states."""
    params = reduce(photon, escort, gamma)
    return fidelity_dimensionless(params.p, params.q, params.T)


# ---------------------------------------------------------------------------
# entanglement
# ---------------------------------------------------------------------------

def input_purity(S, sigma1, sigma_h):
    """Purity of either photon of the input pair."""
    x1, xh = sigma1**2 / S**2, sigma_h**2 / S**2
    renyi2 = 0.5 * (math.log1p(x1) + math.log1p(xh) - math.log1p(x1 + xh))
    return PurityResult(purity=math.exp(-renyi2), renyi2=renyi2)


def upconverted_purity(S, sigma1, sigma_h, p, q, tol=DEFAULT_TOL, max_order=200):
    """Purity of the upconverted photon (zero delay), as a double series.

    The square window ``m, n <= N`` grows until the newly added rim is below
    ``tol`` relative to the running sum.
    """
    if p <= 0:
        raise UndefinedPurityError("no upconverted photon at p = 0")
    if tol <= 0:
        raise InvalidParameterError("tol must be > 0")
    n3 = efficiency(DimensionlessParams(p=p, T=0.0, q=q)).value
    if n3 <= 0:
        raise UndefinedPurityError(f"<n3> = {n3!r}")
    ratio = sigma1**2 * sigma_h**2 / (S**2 * (S**2 + sigma1**2 + sigma_h**2))
    m = np.arange(1, max_order + 1, dtype=float)
    log_a = 2.0 * m * math.log(p) - np.array([math.lgamma(2 * k + 1) for k in m])
    a = np.where(m % 2 == 0, 1.0, -1.0) * np.exp(np.minimum(log_a, 700.0))
    a[log_a < -745.0] = 0.0

    def kernel(i, j):
        mq, nq = (1.0 + q * i), (1.0 + q * j)
        return 1.0 / np.sqrt(2.0 * mq * nq + (mq + nq) * ratio)

    total = 0.0
    N = 0
    rim = math.inf
    quiet = 0
    while N < max_order:
        new = min(N + 4, max_order)
        idx = np.arange(N, new)
        old = np.arange(new)
        # rows/columns N..new-1 against everything up to new
        block = a[idx, None] * a[None, old] * kernel(m[idx, None], m[None, old])
        corner = a[idx, None] * a[None, idx] * kernel(m[idx, None], m[None, idx])
        rim_val = 2.0 * block.sum() - corner.sum()
        rim = 2.0 * np.abs(block).sum()
        total += rim_val
        N = new
        if rim <= tol * abs(total):
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
    else:
        raise ConvergenceError(
            f"purity series not converged at order {max_order}",
            partial=SeriesValue(total, N, rim, False))
    value = total / (2.0 * math.sqrt(2.0)) / n3**2
    series = SeriesValue(value, N, rim / (2.0 * math.sqrt(2.0) * n3**2), True)
    return PurityResult.from_purity(value, series)
