"""Nonlinear cross-diffusion filtering for two-channel images.

An explicit finite-difference solver for coupled edge-stopping diffusion
of an image pair (u, v), plus a verification layer for its provable
properties (mass conservation, energy decay, scale-space invariances,
asymptotic decay to the mean) and the image-quality metrics used to
evaluate denoising runs.
"""

from .diffusion import (
    IDENTITY,
    DiffusionMatrix,
    EdgeStoppingSpec,
    NCDF_NAMES,
    Preset,
    edge_stopping,
    eigen_discriminant,
    ellipticity,
    preset,
    rotation_matrix,
)
from .errors import (
    CrossDiffError,
    DegenerateInput,
    DegenerateReference,
    IndexOutOfGhostRange,
    LengthMismatch,
    NonFiniteState,
    NonFiniteValue,
    NonPositiveCutoff,
    NotPositiveDefinite,
    PresetLabelWarning,
    StabilityWarning,
    UnknownPreset,
    UnsupportedCombination,
)
from .field import (
    BoundaryMode,
    ChannelPair,
    ImageGrid,
    ScalarField,
    new_pair,
    pair_from_arrays,
    sample,
)
from .metrics import (
    MetricsReport,
    NoiseSpec,
    add_gaussian_noise,
    npb,
    psnr,
    report,
    snr,
    variance,
)
from .regularize import (
    Cutoff,
    EdgeVariableStrategy,
    Raw,
    Smoothed,
    cutoff,
    edge_variable,
    ksigma_convolve,
    parse_strategy,
)
from .scalespace import (
    InvarianceKind,
    InvarianceReport,
    asymptotic_decay,
    check_invariance,
    format_report_table,
)
from .solver import (
    MonitorSample,
    Scheme,
    SolverConfig,
    Trajectory,
    discrete_divergence,
    discrete_gradient,
    max_stable_dt,
    monitor_rows,
    run,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryMode",
    "ChannelPair",
    "CrossDiffError",
    "Cutoff",
    "DegenerateInput",
    "DegenerateReference",
    "DiffusionMatrix",
    "EdgeStoppingSpec",
    "EdgeVariableStrategy",
    "IDENTITY",
    "ImageGrid",
    "IndexOutOfGhostRange",
    "InvarianceKind",
    "InvarianceReport",
    "LengthMismatch",
    "MetricsReport",
    "MonitorSample",
    "NCDF_NAMES",
    "NoiseSpec",
    "NonFiniteState",
    "NonFiniteValue",
    "NonPositiveCutoff",
    "NotPositiveDefinite",
    "Preset",
    "PresetLabelWarning",
    "Raw",
    "ScalarField",
    "Scheme",
    "Smoothed",
    "SolverConfig",
    "StabilityWarning",
    "Trajectory",
    "UnknownPreset",
    "UnsupportedCombination",
    "add_gaussian_noise",
    "asymptotic_decay",
    "check_invariance",
    "cutoff",
    "discrete_divergence",
    "discrete_gradient",
    "edge_stopping",
    "edge_variable",
    "eigen_discriminant",
    "ellipticity",
    "format_report_table",
    "ksigma_convolve",
    "max_stable_dt",
    "monitor_rows",
    "new_pair",
    "npb",
    "pair_from_arrays",
    "parse_strategy",
    "preset",
    "psnr",
    "report",
    "rotation_matrix",
    "run",
    "sample",
    "snr",
    "step",
    "variance",
]
