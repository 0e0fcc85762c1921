"""Brute-force grid engine used to check the closed forms.

Waveforms are sampled from their *spectra* (never from the analytic time
domain expressions), moved between domains with a discretised unitary
Fourier transform, and upconverted with the order-by-order time-domain
recursion. Grids hold carrier-free envelopes: frequency axes are offsets
from each mode's carrier.

Convention::

    f(t) = 1/sqrt(2 pi) * integral F(w) exp(+i w t) dw
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError, InvalidParameterError

TIME = "time"
FREQUENCY = "frequency"

#: Tail energy allowed outside a sampled waveform's grid.
ENERGY_BUDGET = 1e-8

#: Largest number of samples a default-sized joint grid may hold.
MAX_POINTS = 2**24


def _pow2(n):
    return 1 << max(int(math.ceil(math.log2(max(n, 1)))), 0)


@dataclass(frozen=True)
class Axis:
    """Uniform axis ``start + step * arange(n)`` with ``n`` a power of two."""

    start: float
    step: float
    n: int

    def __post_init__(self):
        if not self.step > 0:
            raise GridError(f"axis step must be > 0, got {self.step!r}")
        if self.n < 64 or self.n & (self.n - 1):
            raise GridError(f"axis length must be a power of two >= 64, got {self.n}")

    @classmethod
    def centered(cls, center, step, n):
        return cls(center - (n // 2) * step, step, n)

    @property
    def values(self):
        return self.start + self.step * np.arange(self.n)

    @property
    def center(self):
        return self.start + (self.n // 2) * self.step

    @property
    def weights(self):
        """Trapezoidal quadrature weights."""
        w = np.full(self.n, self.step)
        w[0] = w[-1] = 0.5 * self.step
        return w

    def dual(self, center=0.0):
        """FFT-dual axis, ``step * dual.step * n == 2 pi``."""
        return Axis.centered(center, 2.0 * math.pi / (self.n * self.step), self.n)

    def doubled(self):
        """Same span, twice the points and half the step."""
        return Axis(self.start, 0.5 * self.step, 2 * self.n)

    def same_as(self, other):
        return (self.n == other.n
                and math.isclose(self.start, other.start, rel_tol=1e-12, abs_tol=1e-12)
                and math.isclose(self.step, other.step, rel_tol=1e-12))


def _freeze(arr):
    arr = np.asarray(arr, dtype=complex)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class JointGrid:
    """Two-photon amplitude sampled on (signal, herald) axes."""

    axis_a: Axis
    axis_h: Axis
    data: np.ndarray
    domain: str = TIME

    def __post_init__(self):
        object.__setattr__(self, "data", _freeze(self.data))
        if self.data.shape != (self.axis_a.n, self.axis_h.n):
            raise GridError(f"data shape {self.data.shape} does not match axes "
                            f"({self.axis_a.n}, {self.axis_h.n})")
        if self.domain not in (TIME, FREQUENCY):
            raise GridError(f"unknown domain {self.domain!r}")
        if norm2(self) > 1.0 + 1e-6:
            raise GridError(f"grid norm {norm2(self):.9f} exceeds 1")

    def replace(self, data, domain=None, axis_a=None, axis_h=None):
        return JointGrid(axis_a or self.axis_a, axis_h or self.axis_h, data,
                         domain or self.domain)


@dataclass(frozen=True, eq=False)
class EscortGrid:
    """Escort envelope sampled on a single axis."""

    axis: Axis
    data: np.ndarray
    domain: str = TIME

    def __post_init__(self):
        object.__setattr__(self, "data", _freeze(self.data))
        if self.data.shape != (self.axis.n,):
            raise GridError("escort data does not match its axis")
        if abs(norm2(self) - 1.0) > 1e-8:
            raise GridError(f"escort norm {norm2(self):.12f} differs from 1")


@dataclass(frozen=True)
class Marginal:
    """Intensity of one mode with the other integrated out."""

    axis: Axis
    intensity: np.ndarray


def norm2(grid):
    """Trapezoidal integral of |data|^2."""
    mag = np.abs(grid.data) ** 2
    if isinstance(grid, EscortGrid):
        return float(grid.axis.weights @ mag)
    return float(grid.axis_a.weights @ mag @ grid.axis_h.weights)


# ---------------------------------------------------------------------------
# Fourier transforms
# ---------------------------------------------------------------------------

def _to_frequency(data, t_axis, w_axis, dim):
    shape = [1] * data.ndim
    shape[dim] = -1
    t_off = (t_axis.values - t_axis.start).reshape(shape)
    w = w_axis.values.reshape(shape)
    out = np.fft.fft(data * np.exp(-1j * w_axis.start * t_off), axis=dim)
    return out * (t_axis.step / math.sqrt(2.0 * math.pi)) * np.exp(-1j * w * t_axis.start)


def _to_time(data, w_axis, t_axis, dim):
    shape = [1] * data.ndim
    shape[dim] = -1
    k_off = (w_axis.values - w_axis.start).reshape(shape)
    t = t_axis.values.reshape(shape)
    out = np.fft.ifft(data * np.exp(1j * k_off * t_axis.start), axis=dim)
    scale = w_axis.step * w_axis.n / math.sqrt(2.0 * math.pi)
    return out * scale * np.exp(1j * w_axis.start * t)


def ft_forward(grid, centers=None):
    """Time -> frequency. ``centers`` fixes the centre of each output axis."""
    if grid.domain != TIME:
        raise GridError("ft_forward expects a time-domain grid")
    if isinstance(grid, EscortGrid):
        c = 0.0 if centers is None else centers
        w = grid.axis.dual(c)
        return EscortGrid(w, _to_frequency(grid.data, grid.axis, w, 0), FREQUENCY)
    ca, ch = centers or (0.0, 0.0)
    wa, wh = grid.axis_a.dual(ca), grid.axis_h.dual(ch)
    data = _to_frequency(grid.data, grid.axis_a, wa, 0)
    data = _to_frequency(data, grid.axis_h, wh, 1)
    return JointGrid(wa, wh, data, FREQUENCY)


def ft_inverse(grid, centers=None):
    """Frequency -> time. ``centers`` fixes the centre of each output axis."""
    if grid.domain != FREQUENCY:
        raise GridError("ft_inverse expects a frequency-domain grid")
    if isinstance(grid, EscortGrid):
        c = 0.0 if centers is None else centers
        t = grid.axis.dual(c)
        return EscortGrid(t, _to_time(grid.data, grid.axis, t, 0), TIME)
    ca, ch = centers or (0.0, 0.0)
    ta, th = grid.axis_a.dual(ca), grid.axis_h.dual(ch)
    data = _to_time(grid.data, grid.axis_a, ta, 0)
    data = _to_time(data, grid.axis_h, th, 1)
    return JointGrid(ta, th, data, TIME)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def default_axes(photon, escort, gamma=0.0, n=None, n_h=None, span=10.0,
                 resolution=12.0, min_n=2048):
    """Time axes wide enough for both pulses and fine enough for mode 3.

    The signal axis covers ``span`` standard deviations of the stretched
    photon and of the (possibly delayed) escort; its Nyquist frequency is
    ``resolution`` times the combined bandwidth, widened by the harmonics
    that a strong escort writes onto the converted photon.
    """
    sd_ph = math.sqrt(photon.signal_time_variance)
    sd_e = math.sqrt(escort.time_variance)
    sd_h = math.sqrt(photon.herald_time_variance)
    half_a = max(span * sd_ph, abs(escort.tau) + span * sd_e)
    half_h = span * sd_h
    peak = (2.0 * escort.sigma2**2 / (math.pi * (1.0 + escort.chirp_ratio))) ** 0.25
    rotation = math.sqrt(2.0 * math.pi) * abs(gamma) * peak
    band_a = resolution * (photon.sigma1 + escort.sigma2 * (1.0 + rotation))
    band_h = resolution * photon.sigma_h
    if n is None:
        n = max(min_n, _pow2(2.0 * half_a * band_a / math.pi))
    if n_h is None:
        n_h = max(min_n, _pow2(2.0 * half_h * band_h / math.pi))
    if n * n_h > MAX_POINTS:
        raise GridError(f"default grid would need {n} x {n_h} samples")
    return (Axis.centered(0.0, 2.0 * half_a / n, n),
            Axis.centered(0.0, 2.0 * half_h / n_h, n_h))


def _edge_energy(mag2, axis_weights, frac=0.05):
    """Fraction of energy sitting in the outer ``frac`` of each axis."""
    total = 0.0
    for dim, w in enumerate(axis_weights):
        n = len(w)
        k = max(1, int(frac * n))
        edge = np.zeros(n)
        edge[:k] = edge[-k:] = 1.0
        shape = [1] * mag2.ndim
        shape[dim] = -1
        weighted = mag2 * (w * edge).reshape(shape)
        for other, wo in enumerate(axis_weights):
            if other != dim:
                s = [1] * mag2.ndim
                s[other] = -1
                weighted = weighted * wo.reshape(s)
        total += float(weighted.sum())
    return total


def sample_input(photon, axis_t, axis_h, domain=TIME):
    """Sample the input joint spectrum on the dual of the given time axes."""
    wa, wh = axis_t.dual(), axis_h.dual()
    w1, w_h = np.meshgrid(wa.values, wh.values, indexing="ij")
    spec = photon.spectrum(w1 + photon.omega01, w_h + photon.omega0h)
    freq = JointGrid(wa, wh, spec, FREQUENCY)
    captured = norm2(freq)
    if abs(captured - 1.0) > 1e-6 or 1.0 - captured > ENERGY_BUDGET:
        raise GridError(f"frequency grid captures {captured:.10f} of the photon energy")
    if _edge_energy(np.abs(spec) ** 2, (wa.weights, wh.weights)) > ENERGY_BUDGET:
        raise GridError("photon spectrum reaches the frequency grid edge")
    timed = ft_inverse(freq, (axis_t.center, axis_h.center))
    if _edge_energy(np.abs(timed.data) ** 2, (axis_t.weights, axis_h.weights)) > ENERGY_BUDGET:
        raise GridError("photon waveform reaches the time grid edge")
    return timed if domain == TIME else freq


def sample_escort(escort, axis, domain=TIME):
    """Sample the escort spectrum on the dual of ``axis``."""
    w = axis.dual()
    spec = escort.spectrum(w.values + escort.omega02)
    mag2 = np.abs(spec) ** 2
    if _edge_energy(mag2, (w.weights,)) > ENERGY_BUDGET:
        raise GridError("escort spectrum reaches the frequency grid edge")
    freq = EscortGrid(w, spec, FREQUENCY)
    timed = ft_inverse(freq, axis.center)
    if _edge_energy(np.abs(timed.data) ** 2, (axis.weights,)) > ENERGY_BUDGET:
        raise GridError("escort waveform reaches the time grid edge")
    return timed if domain == TIME else freq


def sample_function(func, axis_a, axis_h, domain=TIME):
    """Evaluate ``func(a, h)`` on the mesh of two axes."""
    a, h = np.meshgrid(axis_a.values, axis_h.values, indexing="ij")
    return JointGrid(axis_a, axis_h, func(a, h), domain)


# ---------------------------------------------------------------------------
# upconversion by recursion
# ---------------------------------------------------------------------------

def recursion_depth(gamma, g):
    """Highest order kept: the sine series needs ~3x its argument in terms."""
    arg = math.sqrt(2.0 * math.pi) * abs(gamma) * float(np.abs(g.data).max())
    return max(15, int(math.ceil(3.0 * arg)))


def recursion_upconvert(f0, g, gamma, K=None):
    """Sum the interaction series order by order on a time grid.

    Returns ``(f1, f3)``: even orders (amplitude left in mode 1) and odd
    orders (upconverted amplitude in mode 3).
    """
    if f0.domain != TIME or g.domain != TIME:
        raise GridError("recursion runs on time-domain grids")
    if not f0.axis_a.same_as(g.axis):
        raise GridError("escort axis does not match the signal axis")
    if K is None:
        K = recursion_depth(gamma, g)
    if K < 1:
        raise InvalidParameterError("K must be >= 1")
    gcol = g.data[:, None]
    g2 = (np.abs(g.data) ** 2)[:, None]
    even = np.array(f0.data)
    odd = 1j * math.sqrt(2.0 * math.pi) * gamma * f0.data * gcol
    mode1 = even.copy()
    mode3 = odd.copy()
    for k in range(2, K + 1):
        if k % 2 == 0:
            even = (-2.0 * math.pi * gamma**2 / ((k - 1) * k)) * even * g2
            mode1 += even
        else:
            odd = (-2.0 * math.pi * gamma**2 / ((k - 1) * k)) * odd * g2
            mode3 += odd
    return f0.replace(mode1), f0.replace(mode3)


def apply_chirp(grid, A, dim=0):
    """Multiply the spectrum along one axis by exp(+i A w^2); returns a time grid."""
    timed = grid if grid.domain == TIME else ft_inverse(grid)
    freq = ft_forward(timed)
    axis = freq.axis_a if dim == 0 else freq.axis_h
    w = axis.values
    phase = np.exp(1j * A * w**2)
    data = freq.data * (phase[:, None] if dim == 0 else phase[None, :])
    return ft_inverse(freq.replace(data), (timed.axis_a.center, timed.axis_h.center))


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------

def grid_efficiency(grid):
    """Photon number held by a grid, i.e. the 2-D trapezoidal integral of |data|^2."""
    return norm2(grid)


def _weighted_matrix(grid):
    return (np.sqrt(grid.axis_a.weights)[:, None] * grid.data
            * np.sqrt(grid.axis_h.weights)[None, :])


def schmidt_weights(grid):
    """Normalised Schmidt coefficients (squared singular values)."""
    s = np.linalg.svd(_weighted_matrix(grid), compute_uv=False)
    lam = s**2
    return lam / lam.sum()


def grid_purity(grid):
    """Tr rho_S^2 of either subsystem, from the singular values."""
    lam = schmidt_weights(grid)
    return float(np.sum(lam**2))


def grid_purity_direct(grid):
    """Tr rho_S^2 by the raw four-fold sum; O(n^4), for small grids only."""
    m = _weighted_matrix(grid)
    total = np.einsum("ah,bh,bk,ak->", m, m.conj(), m, m.conj(), optimize=False)
    return float(total.real / norm2(grid) ** 2)


def grid_fidelity(a, b):
    """|<a|b>|^2 / (<a|a><b|b>) with trapezoidal inner products."""
    if not (a.axis_a.same_as(b.axis_a) and a.axis_h.same_as(b.axis_h)) or a.domain != b.domain:
        raise GridError("grids are not on the same axes")
    wa, wh = a.axis_a.weights, a.axis_h.weights
    inner = wa @ (a.data.conj() * b.data) @ wh
    return float(abs(inner) ** 2 / (norm2(a) * norm2(b)))


def temporal_marginal(grid):
    """Signal-mode temporal intensity with the herald integrated out."""
    timed = grid if grid.domain == TIME else ft_inverse(grid)
    return Marginal(timed.axis_a, (np.abs(timed.data) ** 2) @ timed.axis_h.weights)


def spectral_marginal(grid):
    """Signal-mode spectral intensity with the herald integrated out."""
    freq = grid if grid.domain == FREQUENCY else ft_forward(grid)
    return Marginal(freq.axis_a, (np.abs(freq.data) ** 2) @ freq.axis_h.weights)


def effective_width(marginal):
    """Standard deviation of a normalised marginal intensity."""
    w = marginal.axis.weights * marginal.intensity
    x = marginal.axis.values
    total = w.sum()
    mean = (w @ x) / total
    return float(math.sqrt((w @ (x - mean) ** 2) / total))


# ---------------------------------------------------------------------------
# CSV snapshots
# ---------------------------------------------------------------------------

def write_csv(grid, path):
    """Write a grid as ``a,h,re,im`` rows under an axis header."""
    a, h = np.meshgrid(grid.axis_a.values, grid.axis_h.values, indexing="ij")
    rows = np.column_stack([a.ravel(), h.ravel(), grid.data.real.ravel(),
                            grid.data.imag.ravel()])
    with open(path, "w", newline="") as fh:
        fh.write(f"# domain={grid.domain}\n")
        for name, ax in (("axis_a", grid.axis_a), ("axis_h", grid.axis_h)):
            fh.write(f"# {name} start={ax.start!r} step={ax.step!r} n={ax.n}\n")
        fh.write("a,h,re,im\n")
        np.savetxt(fh, rows, delimiter=",", fmt="%.17g")


def read_csv(path):
    """Inverse of :func:`write_csv`."""
    meta = {}
    header = 0
    with open(path) as fh:
        for line in fh:
            header += 1
            if not line.startswith("#"):
                break
            key, _, rest = line[1:].strip().partition(" ")
            if key.startswith("domain="):
                meta["domain"] = key.split("=", 1)[1]
            else:
                fields = dict(kv.split("=") for kv in rest.split())
                meta[key] = Axis(float(fields["start"]), float(fields["step"]),
                                 int(fields["n"]))
    rows = np.loadtxt(path, delimiter=",", skiprows=header, ndmin=2)
    ax_a, ax_h = meta["axis_a"], meta["axis_h"]
    data = (rows[:, 2] + 1j * rows[:, 3]).reshape(ax_a.n, ax_h.n)
    return JointGrid(ax_a, ax_h, data, meta["domain"])
