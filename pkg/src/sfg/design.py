"""Dispersion-engineering solvers: time lens, time-to-frequency converter and
bandwidth compression.

Chirps follow the spectral-phase convention ``exp(+i A (w - w0)^2)`` used for
the photon and escort spectra. A chirped escort writes the temporal phase
``B t^2`` onto the converted photon; together with an input chirp ``A1``
and an output chirp ``A3`` it forms a thin-lens imaging system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import oracle
from .analytic import optimal_p_paper
from .errors import AfocalError, InvalidParameterError
from .model import EscortSpec, PhotonSpec, coupling_scale, reduce

AFOCAL_TOL = 1e-12


@dataclass(frozen=True)
class LensDesign:
    A1: float
    A2: float
    A3: float
    sigma2: float
    B: float
    magnification: float
    lcl_ratio: float

    def residual(self):
        """Left minus right side of the imaging condition."""
        return 1.0 / (2.0 * self.A1) + 1.0 / (2.0 * self.A3) - 2.0 * self.B


def temporal_phase_coefficient(A2, sigma2):
    """Coefficient B of the quadratic temporal phase imparted by the escort."""
    # adding 0.0 maps -0.0 to 0.0 for an unchirped escort
    return -4.0 * A2 * sigma2**4 / (1.0 + 16.0 * A2**2 * sigma2**4) + 0.0


def solve_time_lens(A1, A2, sigma2):
    """Output chirp that images the input waveform through the escort lens.

    The magnification is ``-A3/A1``: a chirp stretches a waveform in
    proportion to its size, so the image/object ratio follows the output
    over input dispersion.
    """
    if A1 == 0 or not math.isfinite(A1):
        raise InvalidParameterError("input chirp A1 must be finite and non-zero")
    if sigma2 <= 0:
        raise InvalidParameterError("sigma2 must be > 0")
    B = temporal_phase_coefficient(A2, sigma2)
    s4 = sigma2**4
    # 1/A3 = 4B - 1/A1 with denominators cleared to avoid cancellation
    num = A1 * (1.0 + 16.0 * A2**2 * s4)
    den = -1.0 - 16.0 * A2 * s4 * (A1 + A2)
    if abs(den) < AFOCAL_TOL * max(1.0, 16.0 * abs(A2) * s4 * (abs(A1) + abs(A2))):
        raise AfocalError(
            "afocal configuration (2B == 1/(2 A1)); use time_to_frequency_chirp")
    A3 = num / den
    return LensDesign(A1=A1, A2=A2, A3=A3, sigma2=sigma2, B=B,
                      magnification=-A3 / A1,
                      lcl_ratio=16.0 * A2**2 * sigma2**4)


def time_to_frequency_chirp(A2, sigma2):
    """Equal input/output chirp ``A1 = A3`` mapping time onto frequency."""
    B = temporal_phase_coefficient(A2, sigma2)
    if B == 0.0:
        raise InvalidParameterError("an unchirped escort imparts no time lens")
    return 1.0 / (4.0 * B)


def compressed_bandwidth_first_order(sigma1, sigma2, A):
    """First-order bandwidth of the upconverted photon for ``A1 = -A2 = A``."""
    return math.sqrt((sigma1**2 + sigma2**2)
                     / (1.0 + 16.0 * A**2 * sigma1**2 * sigma2**2))


def compression_chirp(q0, q, sigma1=1.0):
    """Chirp ``A >= 0`` (with ``A1 = -A2 = A``) taking ``q0`` to ``q``.

    Returns None where no real chirp exists; reachable ``q`` lie between
    ``q0`` (no chirp) and ``1/q0`` (large-chirp limit), exclusive of the
    latter.
    """
    s2sq = q0 * sigma1**2
    num = q0 - q
    den = q * s2sq**2 - q0 * sigma1**4
    if num == 0.0:
        return 0.0
    # q -> 1/q0 needs an infinite chirp; treat rounding-level denominators alike
    if abs(den) <= 1e-9 * max(q * s2sq**2, q0 * sigma1**4):
        return None
    x = num / den
    if x < 0.0:
        return None
    return math.sqrt(x / 16.0)


@dataclass(frozen=True)
class LensCheck:
    width_in: float
    width_out: float
    ratio: float


def simulate_time_lens(design, sigma1, gamma, S=None, n=None, n_h=64):
    """Run the lens on the grid oracle and compare temporal widths.

    The unchirped photon of bandwidth ``sigma1`` defines ``width_in``; it is
    chirped by ``A1``, upconverted through the chirped escort, then chirped
    by ``A3`` in the spectral domain before ``width_out`` is measured.
    """
    photon = PhotonSpec(sigma1=sigma1, sigma_h=sigma1, S=S, A1=design.A1)
    escort = EscortSpec(sigma2=design.sigma2, A2=design.A2)
    axes = oracle.default_axes(photon, escort, gamma, n=n, n_h=n_h)
    bare = oracle.sample_input(PhotonSpec(sigma1=sigma1, sigma_h=sigma1, S=S), *axes)
    f0 = oracle.sample_input(photon, *axes)
    g = oracle.sample_escort(escort, axes[0])
    _, f3 = oracle.recursion_upconvert(f0, g, gamma)
    out = oracle.apply_chirp(f3, design.A3)
    w_in = oracle.effective_width(oracle.temporal_marginal(bare))
    w_out = oracle.effective_width(oracle.temporal_marginal(out))
    return LensCheck(w_in, w_out, w_out / w_in)


def compression_width_ratio(sigma1, sigma2, A, p=None, n=None, n_h=64):
    """Full-order over first-order bandwidth of the compressed photon.

    Separable input, ``A1 = -A2 = A``, zero delay. ``p`` defaults to the
    four-term estimate of the efficiency peak.
    """
    photon = PhotonSpec(sigma1=sigma1, sigma_h=sigma1, A1=A)
    escort = EscortSpec(sigma2=sigma2, A2=-A)
    if p is None:
        p = optimal_p_paper(reduce(photon, escort, 1.0).q, 0.0)
    gamma = p / coupling_scale(escort)
    axes = oracle.default_axes(photon, escort, gamma, n=n, n_h=n_h)
    f0 = oracle.sample_input(photon, *axes)
    g = oracle.sample_escort(escort, axes[0])
    _, f3 = oracle.recursion_upconvert(f0, g, gamma)
    width = oracle.effective_width(oracle.spectral_marginal(f3))
    return width / compressed_bandwidth_first_order(sigma1, sigma2, A)
