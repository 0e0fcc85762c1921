"""End-to-end numerical checks of the library against its independent oracles.

Each ``check_*`` function returns a :class:`CheckResult`. Checks compare the
closed forms and series of :mod:`sfg.analytic` with the brute-force grid
simulation of :mod:`sfg.oracle`, or with limits that hold exactly.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import analytic, design, oracle
from .model import DimensionlessParams, EscortSpec, PhotonSpec, realize, reduce

SEED = 20240611
LATTICE_P = (1.0, 2.0, 4.0)
LATTICE_Q = (0.01, 1.0, 100.0)
LATTICE_T = (0.0, 1.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark} {self.name} ({self.seconds:.1f}s): {self.detail}"


def _timed(name):
    def wrap(func):
        @functools.wraps(func)
        def run():
            start = time.perf_counter()
            passed, detail = func()
            return CheckResult(name, bool(passed), detail, time.perf_counter() - start)
        run.check_name = name
        return run
    return wrap


# ---------------------------------------------------------------------------
# 1. unitarity of the closed forms
# ---------------------------------------------------------------------------

def _random_config(rng):
    p = rng.uniform(0.0, 6.0)
    q = 10.0 ** rng.uniform(-4.0, 4.0)
    T = rng.uniform(-3.0, 3.0)
    A1, A2 = rng.uniform(-20.0, 20.0, size=2)
    S = None if rng.random() < 0.5 else 10.0 ** rng.uniform(-0.5, 0.5)
    return realize(p, q, T, A1=A1, A2=A2, S=S)


def _closed_form_norm(photon, escort, gamma, n=1024):
    """Total photon number of modes 1 and 3 on a grid sized to the input pair."""
    half_t = 12.0 * math.sqrt(photon.signal_time_variance)
    half_h = 12.0 * math.sqrt(photon.herald_time_variance)
    at = oracle.Axis.centered(0.0, 2.0 * half_t / n, n)
    ah = oracle.Axis.centered(0.0, 2.0 * half_h / n, n)
    t, th = np.meshgrid(at.values, ah.values, indexing="ij")
    f1 = analytic.f1f(photon, escort, gamma, t, th)
    f3 = analytic.f3f(photon, escort, gamma, t, th)
    fi = analytic.input_time(photon, t, th)
    dens = np.abs(f1) ** 2 + np.abs(f3) ** 2
    ref = np.abs(fi) ** 2
    mask = ref > 1e-300
    pointwise = float(np.max(np.abs(dens[mask] - ref[mask]) / ref[mask]))
    total = float(at.weights @ dens @ ah.weights)
    return total, pointwise


@_timed("1 unitarity")
def check_unitarity():
    rng = np.random.default_rng(SEED)
    worst_norm = worst_point = 0.0
    for _ in range(50):
        photon, escort, gamma = _random_config(rng)
        total, pointwise = _closed_form_norm(photon, escort, gamma)
        worst_norm = max(worst_norm, abs(total - 1.0))
        worst_point = max(worst_point, pointwise)
    ok = worst_norm < 1e-6 and worst_point < 1e-12
    return ok, f"max |norm-1| = {worst_norm:.2e}, max pointwise rel = {worst_point:.2e}"


# ---------------------------------------------------------------------------
# 2 and 8. closed form and series against the grid recursion
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _lattice_point(p, q, T, doubled=False):
    photon, escort, gamma = realize(p, q, T)
    axes = oracle.default_axes(photon, escort, gamma, n_h=64)
    if doubled:
        axes = tuple(ax.doubled() for ax in axes)
    return _oracle_run(photon, escort, gamma, axes)


def _oracle_run(photon, escort, gamma, axes):
    f0 = oracle.sample_input(photon, *axes)
    g = oracle.sample_escort(escort, axes[0])
    _, f3 = oracle.recursion_upconvert(f0, g, gamma)
    closed = oracle.sample_function(
        lambda t, th: analytic.f3f(photon, escort, gamma, t, th), *axes)
    diff = oracle.JointGrid(f3.axis_a, f3.axis_h, f3.data - closed.data, f3.domain)
    rel = math.sqrt(oracle.norm2(diff) / oracle.norm2(closed))
    return rel, oracle.grid_efficiency(f3)


def _lattice():
    for p in LATTICE_P:
        for q in LATTICE_Q:
            for T in LATTICE_T:
                yield p, q, T


def entangled_sentinel():
    """Chirped, delayed, entangled configuration on a full square grid."""
    photon, escort, gamma = realize(2.0, 1.0, 0.5, A1=0.5, A2=-0.3, S=1.0)
    axes = oracle.default_axes(photon, escort, gamma, n=1024, n_h=1024)
    return _oracle_run(photon, escort, gamma, axes)


@_timed("2 closed form vs recursion")
def check_closed_form():
    worst = max(_lattice_point(*pt)[0] for pt in _lattice())
    sentinel, _ = entangled_sentinel()
    ok = worst < 1e-8 and sentinel < 1e-8
    return ok, f"max rel L2 = {worst:.2e} on lattice, {sentinel:.2e} entangled"


@_timed("8 series vs grid efficiency")
def check_efficiency_agreement():
    worst = drift = 0.0
    for p, q, T in _lattice():
        series = analytic.efficiency(DimensionlessParams(p=p, T=T, q=q)).value
        grid = _lattice_point(p, q, T)[1]
        fine = _lattice_point(p, q, T, doubled=True)[1]
        worst = max(worst, abs(series - grid))
        drift = max(drift, abs(fine - grid))
    ok = worst < 1e-6 and drift < 1e-6
    return ok, f"max |series-grid| = {worst:.2e}, doubling drift = {drift:.2e}"


# ---------------------------------------------------------------------------
# 3. monochromatic-escort limit
# ---------------------------------------------------------------------------

@_timed("3 low-q limit")
def check_low_q():
    worst, where = 0.0, None
    for p in np.linspace(0.0, 2.0 * math.pi, 41):
        for T in np.linspace(0.0, 2.0, 21):
            val = analytic.efficiency(DimensionlessParams(p=p, T=T, q=1e-6)).value
            d = abs(val - analytic.efficiency_lowq(p, T))
            if d > worst:
                worst, where = d, (p, T)
    peak = analytic.efficiency(DimensionlessParams(p=math.pi, q=1e-6)).value
    ok = worst < 1e-6 and abs(peak - 1.0) <= 1e-5
    return ok, (f"max dev = {worst:.2e} at p={where[0]:.4f}, T={where[1]:.2f}; "
                f"efficiency(pi) = {peak:.12f}")


# ---------------------------------------------------------------------------
# 4. efficiency ceiling under compression
# ---------------------------------------------------------------------------

@_timed("4 compression ceiling")
def check_ceiling():
    best, estimated = [], []
    for A in (1.0, 5.0, 20.0, 100.0):
        photon = PhotonSpec(sigma1=1.0, sigma_h=1.0, A1=A)
        escort = EscortSpec(sigma2=1.0, A2=-A)
        q = reduce(photon, escort, 1.0).q
        best.append(analytic.optimal_p_refined(q, 0.0)[1])
        p_est = analytic.optimal_p_paper(q, 0.0)
        estimated.append(analytic.efficiency(DimensionlessParams(p=p_est, q=q)).value)
    spread = max(best) - min(best)
    ok = all(abs(b - 0.887) <= 0.002 for b in best) and spread < 1e-6
    return ok, (f"max over p = {min(best):.7f}..{max(best):.7f} (spread {spread:.1e}); "
                f"at estimator p = {estimated[0]:.7f}")


# ---------------------------------------------------------------------------
# 5. fidelity with the first-order waveform
# ---------------------------------------------------------------------------

@_timed("5 fidelity floor")
def check_fidelity():
    values = {}
    for q in (1e-3, 1e-1, 1.0, 10.0, 1e3):
        p = analytic.optimal_p_paper(q, 0.0)
        values[q] = analytic.fidelity_first_order(*realize(p, q, 0.0))
    ok = min(values.values()) >= 0.95 and abs(values[1e-3] - 1.0) <= 1e-4
    text = ", ".join(f"q={q:g}: {v:.6f}" for q, v in values.items())
    return ok, text


# ---------------------------------------------------------------------------
# 6. bandwidth compression width ratio
# ---------------------------------------------------------------------------

@_timed("6 width ratio")
def check_width_ratio():
    ratios = []
    for q0, q in ((0.01, 0.01), (0.001, 0.001), (0.005, 0.01), (0.001, 0.004)):
        A = design.compression_chirp(q0, q)
        ratios.append(design.compression_width_ratio(1.0, math.sqrt(q0), A))
    narrow = design.compression_width_ratio(1.0, 1.0, 5.0)
    ok = all(abs(r - 1.0) <= 0.01 for r in ratios) and narrow < 1.0
    text = ", ".join(f"{r:.5f}" for r in ratios)
    return ok, f"low-q ratios {text}; sigma1=sigma2, A=5: {narrow:.5f}"


# ---------------------------------------------------------------------------
# 7. entanglement after upconversion
# ---------------------------------------------------------------------------

def pump_for_renyi2(target, sigma1=1.0, sigma_h=1.0):
    """Pump bandwidth giving the requested input Renyi-2 entropy."""
    if target <= 0.0:
        return None
    f = lambda log_s: analytic.input_purity(math.exp(log_s), sigma1, sigma_h).renyi2 - target  # noqa: E731
    return math.exp(brentq(f, -20.0, 20.0, xtol=1e-14))


SPOT_POINTS = ((0.1, 1.0), (1.0, 1.0), (10.0, 1.0), (1.0, 0.5), (3.0, 2.0))


def spot_purity(q, S):
    """Analytic and grid purity of the upconverted photon at peak efficiency."""
    p = analytic.optimal_p_paper(q, 0.0)
    photon, escort, gamma = realize(p, q, 0.0, S=S)
    axes = oracle.default_axes(photon, escort, gamma, min_n=64)
    f0 = oracle.sample_input(photon, *axes)
    g = oracle.sample_escort(escort, axes[0])
    _, f3 = oracle.recursion_upconvert(f0, g, gamma)
    exact = analytic.upconverted_purity(S, photon.sigma1, photon.sigma_h, p, q)
    return exact, oracle.grid_purity(f3)


@_timed("7 entanglement")
def check_entanglement():
    q = 1e-3
    p = analytic.optimal_p_paper(q, 0.0)
    worst_id = 0.0
    increases = []
    for target in np.linspace(0.0, 2.0, 11):
        S = pump_for_renyi2(target)
        S = 1e9 if S is None else S
        r_in = analytic.input_purity(S, 1.0, 1.0).renyi2
        r_out = analytic.upconverted_purity(S, 1.0, 1.0, p, q).renyi2
        worst_id = max(worst_id, abs(r_out - r_in))
        increases.append(r_out - r_in)
    worst_spot = 0.0
    for qq, S in SPOT_POINTS:
        exact, grid = spot_purity(qq, S)
        worst_spot = max(worst_spot, abs(exact.purity - grid))
    for qq in (1e-3, 0.1, 1.0, 10.0, 100.0):
        pp = analytic.optimal_p_paper(qq, 0.0)
        for S in (0.1, 0.5, 1.0, 2.0, 10.0):
            r_in = analytic.input_purity(S, 1.0, 1.0).renyi2
            increases.append(analytic.upconverted_purity(S, 1.0, 1.0, pp, qq).renyi2 - r_in)
    worst_rise = max(increases)
    ok = worst_id < 1e-2 and worst_spot < 1e-3 and worst_rise <= 1e-12
    return ok, (f"low-q |out-in| = {worst_id:.2e}, spot |analytic-grid| = "
                f"{worst_spot:.2e}, max(out-in) = {worst_rise:.2e}")


# ---------------------------------------------------------------------------
# 9. dispersion-engineering solvers
# ---------------------------------------------------------------------------

LENS_CASES = ((150.0, -100.0, 1.0), (-150.0, -100.0, 1.0), (10.0, -10.0, 1.0),
              (3.0, 7.0, 0.5))


@_timed("9 design solvers")
def check_design():
    residual = 0.0
    for A1, A2, s2 in LENS_CASES:
        lens = design.solve_time_lens(A1, A2, s2)
        scale = max(abs(1.0 / (2.0 * A1)), abs(2.0 * lens.B))
        residual = max(residual, abs(lens.residual()) / scale)
    lens = design.solve_time_lens(150.0, -100.0, 1.0)
    sigma1 = 1.0 / (2.0 * math.sqrt(150.0))
    measured = design.simulate_time_lens(lens, sigma1, gamma=0.5).ratio
    stated = abs(-lens.A1 / lens.A3)
    physical = abs(lens.magnification)
    mag_ok = abs(measured / stated - 1.0) <= 0.02
    t2f = [(A2, design.time_to_frequency_chirp(A2, 1.0)) for A2 in (-25.0, 50.0, -100.0)]
    t2f_err = max(abs(A1 / -A2 - 1.0) for A2, A1 in t2f)
    ok = residual < 1e-12 and mag_ok and t2f_err < 1e-3
    return ok, (f"residual {residual:.1e}; width ratio {measured:.5f} vs -A1/A3 = "
                f"{stated:.5f} and -A3/A1 = {physical:.5f}; t2f rel {t2f_err:.1e}")


CHECKS = (check_unitarity, check_closed_form, check_low_q, check_ceiling,
          check_fidelity, check_width_ratio, check_entanglement,
          check_efficiency_agreement, check_design)


def run_all(echo=None):
    """Run every check in order; ``echo`` receives each result as it finishes."""
    results = []
    for check in CHECKS:
        res = check()
        results.append(res)
        if echo is not None:
            echo(res)
    return results
