"""Non-perturbative sum-frequency upconversion of single-photon waveforms.

The library works at two levels. :mod:`sfg.analytic` holds closed-form
waveforms and convergent series for efficiency, fidelity and purity;
:mod:`sfg.oracle` simulates the same physics by brute force on time-frequency
grids. :mod:`sfg.design` solves for the chirps of time lenses and bandwidth
compressors, and :mod:`sfg.cli` exposes figure data, sweeps and design
reports on the command line.
"""

__version__ = "0.1.0"

from .analytic import (
    PurityResult,
    efficiency,
    efficiency_lowq,
    f1f,
    f3_first_order,
    f3f,
    fidelity_first_order,
    input_purity,
    optimal_p_paper,
    optimal_p_refined,
    upconverted_purity,
)
from .design import (
    LensDesign,
    compressed_bandwidth_first_order,
    compression_chirp,
    solve_time_lens,
    time_to_frequency_chirp,
)
from .errors import (
    AfocalError,
    ConvergenceError,
    GridError,
    InvalidParameterError,
    NoPeakError,
    SFGError,
    UndefinedFidelityError,
    UndefinedPurityError,
)
from .model import (
    DimensionlessParams,
    EscortSpec,
    PhotonSpec,
    SeriesValue,
    realize,
    reduce,
)

__all__ = [
    "AfocalError", "ConvergenceError", "DimensionlessParams", "EscortSpec",
    "GridError", "InvalidParameterError", "LensDesign", "NoPeakError",
    "PhotonSpec", "PurityResult", "SFGError", "SeriesValue",
    "UndefinedFidelityError", "UndefinedPurityError",
    "compressed_bandwidth_first_order", "compression_chirp", "efficiency",
    "efficiency_lowq", "f1f", "f3_first_order", "f3f", "fidelity_first_order",
    "input_purity", "optimal_p_paper", "optimal_p_refined", "realize", "reduce",
    "solve_time_lens", "time_to_frequency_chirp", "upconverted_purity",
]
