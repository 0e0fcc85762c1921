"""Physical parameter records and their reduction to dimensionless form.

Units are fixed once, here, and used unchanged everywhere else:

* time in picoseconds (ps)
* angular frequency in rad/ps
* chirp (group-delay dispersion) parameters in ps^2
* the absolute coupling constant gamma in sqrt(ps)

The separable limit of the photon-pair source is modelled by a large but
finite pump bandwidth ``S`` so that every closed form stays evaluable.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidParameterError

#: Multiple of the widest filter bandwidth used for ``S`` when none is given.
SEPARABLE_S_FACTOR = 1e9


def _finite(name, value):
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")


def _positive(name, value):
    _finite(name, value)
    if value <= 0:
        raise InvalidParameterError(f"{name} must be > 0, got {value!r}")


class _Record:
    """JSON round-tripping for the frozen parameter dataclasses."""

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise InvalidParameterError(
                f"unknown {cls.__name__} fields: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items() if v is not None})


@dataclass(frozen=True)
class PhotonSpec(_Record):
    """Double-Gaussian joint spectrum of a filtered SPDC photon pair.

    ``sigma1``/``sigma_h`` are the filter bandwidths of the signal and
    herald, ``S`` the pump bandwidth and ``A1`` the chirp on the signal.
    """

    sigma1: float
    sigma_h: float
    S: float = None
    omega01: float = 0.0
    omega0h: float = 0.0
    A1: float = 0.0

    def __post_init__(self):
        _positive("sigma1", self.sigma1)
        _positive("sigma_h", self.sigma_h)
        if self.S is None:
            object.__setattr__(
                self, "S", SEPARABLE_S_FACTOR * max(self.sigma1, self.sigma_h))
        _positive("S", self.S)
        for name in ("omega01", "omega0h", "A1"):
            _finite(name, getattr(self, name))

    @property
    def sigma_in2(self):
        """S^2 + sigma1^2 + sigma_h^2."""
        return self.S**2 + self.sigma1**2 + self.sigma_h**2

    @property
    def stretch(self):
        """Temporal stretch of the signal marginal relative to an unchirped,
        unentangled photon of the same bandwidth (dimensionless, >= 1)."""
        s1, sh, S = self.sigma1, self.sigma_h, self.S
        return (1.0 + s1**2 / S**2
                + 16.0 * self.A1**2 * s1**4 * (S**2 + sh**2) / self.sigma_in2)

    @property
    def signal_time_variance(self):
        """Variance of the signal photon's temporal intensity marginal [ps^2]."""
        return self.stretch / (4.0 * self.sigma1**2)

    @property
    def herald_time_variance(self):
        """Variance of the herald's temporal intensity marginal [ps^2]."""
        return (1.0 + self.sigma_h**2 / self.S**2) / (4.0 * self.sigma_h**2)

    def spectrum(self, w1, wh):
        """Joint spectral amplitude F_i(w1, wh), normalised to unit L2 norm."""
        s1, sh, S = self.sigma1, self.sigma_h, self.S
        v1 = np.asarray(w1) - self.omega01
        vh = np.asarray(wh) - self.omega0h
        norm = self.sigma_in2**0.25 / math.sqrt(2.0 * math.pi * S * s1 * sh)
        return norm * np.exp(
            1j * self.A1 * v1**2
            - v1**2 / (4.0 * s1**2)
            - vh**2 / (4.0 * sh**2)
            - (v1 + vh)**2 / (4.0 * S**2))


@dataclass(frozen=True)
class EscortSpec(_Record):
    """Chirped Gaussian escort pulse with delay ``tau`` relative to the photon."""

    sigma2: float
    omega02: float = 0.0
    A2: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        _positive("sigma2", self.sigma2)
        for name in ("omega02", "A2", "tau"):
            _finite(name, getattr(self, name))

    @property
    def chirp_ratio(self):
        """16 A2^2 sigma2^4; much larger than one in the large-chirp limit."""
        return 16.0 * self.A2**2 * self.sigma2**4

    @property
    def time_variance(self):
        """Variance of |g(t)|^2 [ps^2]."""
        return (1.0 + self.chirp_ratio) / (4.0 * self.sigma2**2)

    def spectrum(self, w):
        """Normalised escort spectrum G(w)."""
        v = np.asarray(w) - self.omega02
        return ((2.0 * math.pi * self.sigma2**2) ** -0.25
                * np.exp(-v**2 / (4.0 * self.sigma2**2)
                         + 1j * np.asarray(w) * self.tau
                         + 1j * self.A2 * v**2))


@dataclass(frozen=True)
class DimensionlessParams(_Record):
    """Scaled coupling ``p``, delay ``T`` and pulse-length ratio ``q``.

    ``gamma`` is carried along for reference; it is ``nan`` when the record
    was built directly from dimensionless values.
    """

    p: float
    T: float = 0.0
    q: float = 1.0
    gamma: float = math.nan

    def __post_init__(self):
        _finite("p", self.p)
        _finite("T", self.T)
        if self.p < 0:
            raise InvalidParameterError(f"p must be >= 0, got {self.p!r}")
        _positive("q", self.q)


@dataclass(frozen=True)
class SeriesValue:
    """Outcome of summing a convergent series.

    ``last_term`` is the magnitude of the final term added; ``method`` is
    ``"series"`` unless the value came from a quadrature fallback.
    """

    value: float
    terms_used: int
    last_term: float
    converged: bool
    method: str = "series"

    def __float__(self):
        return float(self.value)


def coupling_scale(escort):
    """p per unit gamma for the given escort, in 1/sqrt(ps)."""
    return (2.0 * (8.0 * math.pi) ** 0.25
            * (escort.sigma2**2 / (1.0 + escort.chirp_ratio)) ** 0.25)


def reduce(photon, escort, gamma):
    """Map physical parameters onto ``(p, T, q)``."""
    _finite("gamma", gamma)
    lcl = 1.0 + escort.chirp_ratio
    p = coupling_scale(escort) * abs(gamma)
    T = math.sqrt(2.0) * escort.sigma2 * escort.tau / math.sqrt(lcl)
    q = (escort.sigma2**2 / photon.sigma1**2) * photon.stretch / lcl
    return DimensionlessParams(p=p, T=T, q=q, gamma=gamma)


def q_zero_chirp(photon, escort):
    """Pulse-length ratio before any chirp is applied, sigma2^2/sigma1^2."""
    return escort.sigma2**2 / photon.sigma1**2


def _sigma1_for(target, A1, S, sigma_h):
    """Smallest sigma1 whose photon stretch factor gives ``stretch/sigma1^2 == target``."""

    def excess(log_s1):
        s1 = math.exp(log_s1)
        ph = PhotonSpec(sigma1=s1, sigma_h=sigma_h, S=S, A1=A1)
        return math.log(ph.stretch / s1**2) - math.log(target)

    lo = math.log(1e-12 / math.sqrt(target))
    floor = 0.0 if S is None else 1.0 / S**2
    if A1 == 0.0 and target <= floor * (1.0 + 1e-6):
        # approached only as sigma1 -> infinity
        return None
    hi = math.log(10.0 / math.sqrt(target)) + 50.0
    if A1 != 0.0:
        # stretch/sigma1^2 is minimal near sigma1^2 = 1/(4|A1|)
        hi = min(hi, math.log(0.5 / math.sqrt(abs(A1))))
    if excess(hi) > 0:
        return None
    return math.exp(brentq(excess, lo, hi, xtol=1e-15, rtol=1e-15))


def realize(p, q, T=0.0, *, A1=0.0, A2=0.0, S=None, sigma_h=1.0,
            sigma2=None):
    """Build physical ``(photon, escort, gamma)`` reproducing given ``(p, q, T)``.

    The escort bandwidth defaults to 1 rad/ps and is lowered by decades
    until the requested ``q`` can be reached with the given chirps; the
    signal bandwidth is then solved for.
    """
    DimensionlessParams(p=p, T=T, q=q)
    candidates = [sigma2] if sigma2 is not None else [10.0**-k for k in range(12)]
    for s2 in candidates:
        escort_factor = s2**2 / (1.0 + 16.0 * A2**2 * s2**4)
        s1 = _sigma1_for(q / escort_factor, A1, S, sigma_h)
        if s1 is not None:
            break
    else:
        raise InvalidParameterError(
            f"q={q!r} is not reachable with A1={A1!r}, A2={A2!r}")
    photon = PhotonSpec(sigma1=s1, sigma_h=sigma_h, S=S, A1=A1)
    lcl = 1.0 + 16.0 * A2**2 * s2**4
    tau = T * math.sqrt(lcl) / (math.sqrt(2.0) * s2)
    escort = EscortSpec(sigma2=s2, A2=A2, tau=tau)
    gamma = p / coupling_scale(escort)
    return photon, escort, gamma
