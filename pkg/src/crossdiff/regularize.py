"""Edge-variable strategies: raw v, pointwise cutoff, or kernel-smoothed w.

The solver's edge-stopping function is evaluated on an "edge variable" w
derived from the current state. Three strategies are supported:

* Raw          -- w is the second channel v itself.
* Cutoff(M)    -- w = min(v, M), clipping from above only.
* Smoothed(s)  -- w = |second component of K_s * (u, v)|, where K_s is the
                  matrix-valued kernel whose Fourier multiplier is the 2x2
                  matrix exponential exp(-|xi|^2 * s * d) for a positive
                  definite base matrix d.

The kernel convolution is evaluated on the periodic extension of the grid
via the discrete Fourier transform, which keeps the multiplier definition
exact and preserves per-channel sums (the zero-frequency multiplier is the
identity). The matrix exponential is computed in closed form per frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diffusion import DiffusionMatrix, eigen_discriminant, ellipticity
from .errors import NonPositiveCutoff, NotPositiveDefinite
from .field import ChannelPair, ImageGrid, ScalarField


class EdgeVariableStrategy:
    """Marker base class for the strategy variants."""

    __slots__ = ()


@dataclass(frozen=True)
class Raw(EdgeVariableStrategy):
    """Use the v channel directly."""


@dataclass(frozen=True)
class Cutoff(EdgeVariableStrategy):
    """Clip v from above at a positive constant."""

    limit: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.limit) and self.limit > 0):
            raise NonPositiveCutoff(f"cutoff limit must be positive, got {self.limit}")


@dataclass(frozen=True)
class Smoothed(EdgeVariableStrategy):
    """Smooth the pair with the matrix kernel at scale sigma, then take |v|.

    ``base`` is the kernel's matrix; None means "use the solver's own
    diffusion matrix", resolved at the call site.
    """

    sigma: float
    base: DiffusionMatrix | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")
        if self.base is not None and ellipticity(self.base) <= 0:
            raise NotPositiveDefinite("smoothing base matrix must be positive definite")


def parse_strategy(text: str) -> EdgeVariableStrategy:
    """Parse "raw", "cutoff:<M>" or "smoothed:<sigma>" (case-insensitive)."""
    key = text.strip().lower()
    if key == "raw":
        return Raw()
    if key.startswith("cutoff:"):
        return Cutoff(limit=float(key.split(":", 1)[1]))
    if key.startswith("smoothed:"):
        return Smoothed(sigma=float(key.split(":", 1)[1]))
    raise ValueError(
        f"unknown strategy {text!r}; expected raw, cutoff:<M> or smoothed:<sigma>"
    )


def strategy_label(strategy: EdgeVariableStrategy) -> str:
    """Inverse of parse_strategy, for logs and CSV output."""
    if isinstance(strategy, Raw):
        return "raw"
    if isinstance(strategy, Cutoff):
        return f"cutoff:{strategy.limit:g}"
    if isinstance(strategy, Smoothed):
        return f"smoothed:{strategy.sigma:g}"
    raise TypeError(f"not a strategy: {strategy!r}")


def cutoff(field: ScalarField, limit: float) -> ScalarField:
    """Pointwise min(field, limit); clips from above only."""
    if not (math.isfinite(limit) and limit > 0):
        raise NonPositiveCutoff(f"cutoff limit must be positive, got {limit}")
    return ScalarField(field.grid, np.minimum(field.values, limit))


def _multiplier_entries(
    d: DiffusionMatrix, s: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Entries of exp(-s * d) for an array of scales s >= 0.

    Split A = -s*d into its trace part mu*I and traceless part B; then
    exp(A) = e^mu (cosh(x) I + sinh(x)/x B) with x^2 = mu^2 - det(A).
    Here x^2 = s^2 * disc/4 with disc the eigenvalue discriminant of d, so
    a single branch per matrix suffices. Uniform ellipticity guarantees
    mu +- x <= 0, so the hyperbolic branch is evaluated as a sum of plain
    exponentials and cannot overflow.
    """
    mu = -0.5 * s * (d.d11 + d.d22)
    b11 = -0.5 * s * (d.d11 - d.d22)
    b12 = -s * d.d12
    b21 = -s * d.d21
    disc = eigen_discriminant(d)
    if disc > 0.0:
        x = 0.5 * s * math.sqrt(disc)
        ep = np.exp(mu + x)
        em = np.exp(mu - x)
        ecosh = 0.5 * (ep + em)
        with np.errstate(invalid="ignore", divide="ignore"):
            esinh = np.where(x > 0.0, 0.5 * (ep - em) / np.where(x > 0.0, x, 1.0), np.exp(mu))
    elif disc < 0.0:
        x = 0.5 * s * math.sqrt(-disc)
        emu = np.exp(mu)
        ecosh = emu * np.cos(x)
        esinh = emu * np.where(x > 0.0, np.sin(np.where(x > 0.0, x, 1.0)) / np.where(x > 0.0, x, 1.0), 1.0)
    else:
        emu = np.exp(mu)
        ecosh = emu
        esinh = emu
    return (
        ecosh + esinh * b11,
        esinh * b12,
        esinh * b21,
        ecosh - esinh * b11,
    )


def _ksigma_arrays(
    u: np.ndarray, v: np.ndarray, grid: ImageGrid, d: DiffusionMatrix, sigma: float
) -> tuple[np.ndarray, np.ndarray]:
    xi_x = 2.0 * np.pi * np.fft.fftfreq(grid.width, d=grid.h)
    xi_y = 2.0 * np.pi * np.fft.fftfreq(grid.height, d=grid.h)
    s = sigma * (xi_y[:, None] ** 2 + xi_x[None, :] ** 2)
    e11, e12, e21, e22 = _multiplier_entries(d, s)
    fu = np.fft.fft2(u)
    fv = np.fft.fft2(v)
    out_u = np.fft.ifft2(e11 * fu + e12 * fv).real
    out_v = np.fft.ifft2(e21 * fu + e22 * fv).real
    return out_u, out_v


def ksigma_convolve(pair: ChannelPair, d: DiffusionMatrix, sigma: float) -> ChannelPair:
    """Matrix-kernel smoothing of the pair at scale sigma.

    Per frequency xi on the periodic extension of the grid, the Fourier
    coefficients of (u, v) are multiplied by the matrix exponential
    exp(-|xi|^2 sigma d). sigma = 0 returns the input unchanged; constant
    pairs are fixed points and per-channel sums are preserved exactly.
    """
    if not (math.isfinite(sigma) and sigma >= 0):
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if ellipticity(d) <= 0:
        raise NotPositiveDefinite("kernel matrix must be positive definite")
    if sigma == 0.0:
        return pair
    out_u, out_v = _ksigma_arrays(pair.u.values, pair.v.values, pair.grid, d, sigma)
    return ChannelPair(ScalarField(pair.grid, out_u), ScalarField(pair.grid, out_v))


def _edge_variable_arrays(
    u: np.ndarray,
    v: np.ndarray,
    grid: ImageGrid,
    strategy: EdgeVariableStrategy,
    default_base: DiffusionMatrix | None = None,
) -> np.ndarray:
    if isinstance(strategy, Raw):
        return v
    if isinstance(strategy, Cutoff):
        return np.minimum(v, strategy.limit)
    if isinstance(strategy, Smoothed):
        base = strategy.base if strategy.base is not None else default_base
        if base is None:
            raise ValueError("smoothed strategy needs a base matrix")
        if ellipticity(base) <= 0:
            raise NotPositiveDefinite("smoothing base matrix must be positive definite")
        if strategy.sigma == 0.0:
            return np.abs(v)
        _, smoothed_v = _ksigma_arrays(u, v, grid, base, strategy.sigma)
        return np.abs(smoothed_v)
    raise TypeError(f"not a strategy: {strategy!r}")


def edge_variable(
    pair: ChannelPair,
    strategy: EdgeVariableStrategy,
    default_base: DiffusionMatrix | None = None,
) -> ScalarField:
    """The field w fed to the edge-stopping function.

    Raw returns v itself; Cutoff returns min(v, M); Smoothed returns the
    pointwise absolute value of the second component of the smoothed pair.
    """
    if isinstance(strategy, Raw):
        return pair.v
    w = _edge_variable_arrays(
        pair.u.values, pair.v.values, pair.grid, strategy, default_base
    )
    return ScalarField(pair.grid, w)
