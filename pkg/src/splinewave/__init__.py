"""Spline wavelet transforms, thresholding and grid adaptation on nonuniform knots."""

from ._backend import backend_name, use_backend
from .adapt import (
    CoarsenReport,
    InterpolationMethod,
    RefineConfig,
    RefineResult,
    coarsen,
    coarsen_repeated,
    interpolate,
    refine_grid,
    refine_loop,
)
from .bspline import (
    Spline,
    TruncatedPowerCoeffs,
    boehm_insert,
    differentiate,
    eval_spline,
    greville,
    oslo_refine,
    remove_knot_backward,
    remove_knot_forward,
    truncated_power_coeffs,
    validate_knots,
)
from .errors import SplineWaveError
from .periodic import (
    IntervalGrid,
    PeriodicGrid,
    interval_wavelet_knots,
    periodic_decompose,
    periodic_index_map,
    periodic_reconstruct,
)
from .transform import (
    DecompositionLevel,
    MultiscaleDecomposition,
    decompose,
    pyramid_decompose,
    pyramid_reconstruct,
    reconstruct,
    wavelet_coefficients,
)
from .wavelets import (
    LevelGrids,
    WaveletParams,
    WaveletSlot,
    build_level,
    build_wavelet_slot,
    coarsen_grid,
    dyadic_coarsen,
    eval_wavelet,
    grid_chain,
    wavelet_knots,
)

__version__ = "0.1.0"
