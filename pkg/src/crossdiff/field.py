"""Uniform-grid scalar fields and two-channel image states.

Pixel (i, j) sits at x = i*h, y = j*h: x grows with the column index i,
y with the row index j, origin at the top-left. Arrays are stored
row-major with shape (height, width), so ``values[j, i]`` is the sample
at (i, j). A single ghost layer is all any stencil in this package needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import IndexOutOfGhostRange, LengthMismatch, NonFiniteValue


class BoundaryMode(Enum):
    """Ghost-cell policy.

    REFLECT mirrors the nearest interior sample (ghost equals the first
    interior value), which realizes homogeneous Neumann conditions and
    makes boundary fluxes vanish. PERIODIC wraps indices modulo the
    extent (torus topology, used by the translation checks).
    """

    REFLECT = "reflect"
    PERIODIC = "periodic"

    @property
    def pad_mode(self) -> str:
        """The equivalent ``np.pad`` mode."""
        return "edge" if self is BoundaryMode.REFLECT else "wrap"


@dataclass(frozen=True)
class ImageGrid:
    """Uniform rectangular pixel grid with mesh spacing h."""

    width: int
    height: int
    h: float = 1.0

    def __post_init__(self) -> None:
        if self.width < 3 or self.height < 3:
            raise ValueError(
                f"grid must be at least 3x3, got {self.width}x{self.height}"
            )
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(f"mesh spacing must be positive and finite, got {self.h}")

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape (height, width)."""
        return (self.height, self.width)

    @property
    def npixels(self) -> int:
        return self.width * self.height


def _as_grid_array(values, grid: ImageGrid) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        if arr.size != grid.npixels:
            raise LengthMismatch(
                f"expected {grid.npixels} values for a "
                f"{grid.width}x{grid.height} grid, got {arr.size}"
            )
        arr = arr.reshape(grid.shape)
    elif arr.shape != grid.shape:
        raise LengthMismatch(f"expected shape {grid.shape}, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise NonFiniteValue("field values must be finite")
    arr = np.array(arr, dtype=np.float64, order="C", copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Immutable scalar field on an ImageGrid.

    ``values`` is a read-only (height, width) float64 array; inputs are
    copied and checked for finiteness. Accepts either a 2-D array of the
    grid's shape or a flat row-major array of length width*height.
    """

    grid: ImageGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_grid_array(self.values, self.grid))

    @classmethod
    def constant(cls, grid: ImageGrid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())

    def mean(self) -> float:
        return float(self.values.mean())


@dataclass(frozen=True, eq=False)
class ChannelPair:
    """The two-channel image state (u, v) on a shared grid."""

    u: ScalarField
    v: ScalarField

    def __post_init__(self) -> None:
        if self.u.grid != self.v.grid:
            raise LengthMismatch("u and v must live on the same grid")

    @property
    def grid(self) -> ImageGrid:
        return self.u.grid


def new_pair(grid: ImageGrid, u_values, v_values) -> ChannelPair:
    """Build a ChannelPair from raw arrays; values are copied, not aliased."""
    return ChannelPair(ScalarField(grid, u_values), ScalarField(grid, v_values))


def pair_from_arrays(u: np.ndarray, v: np.ndarray, h: float = 1.0) -> ChannelPair:
    """Convenience constructor inferring the grid from a (height, width) array."""
    height, width = np.asarray(u).shape
    grid = ImageGrid(width=width, height=height, h=h)
    return new_pair(grid, u, v)


def sample(field: ScalarField, i: int, j: int, mode: BoundaryMode) -> float:
    """Sample pixel (i, j) allowing one ghost layer on each side.

    Interior indices return the stored value for either mode. REFLECT
    maps -1 -> 0 and width -> width-1 (and likewise vertically), so the
    first difference across the boundary is exactly zero. PERIODIC wraps
    modulo the extent.
    """
    width, height = field.grid.width, field.grid.height
    if not (-1 <= i <= width and -1 <= j <= height):
        raise IndexOutOfGhostRange(
            f"index ({i}, {j}) is beyond one ghost layer of a "
            f"{width}x{height} grid"
        )
    if mode is BoundaryMode.REFLECT:
        ii = min(max(i, 0), width - 1)
        jj = min(max(j, 0), height - 1)
    else:
        ii = i % width
        jj = j % height
    return float(field.values[jj, ii])
