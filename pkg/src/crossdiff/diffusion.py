"""Edge-stopping function, constant cross-diffusion matrices, and presets.

The diffusion coefficient used by the solver has the form g(|w|) * d with
g a rational Perona-Malik-type edge-stopping function and d a constant
2x2 matrix whose symmetric part must be positive definite (uniform
ellipticity). The NCDF1..NCDF6 presets are the published coefficient
sets; ``rotation:<theta>`` gives the rotation-form matrix that makes the
system equivalent to nonlinear complex diffusion.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteValue, NotPositiveDefinite, PresetLabelWarning, UnknownPreset

# |s| below this is treated as a zero eigenvalue discriminant; the NCDF6
# coefficients give s = 0 only in exact arithmetic (float residue ~2e-16).
_DISCRIMINANT_ZERO_BAND = 1e-12


@dataclass(frozen=True)
class DiffusionMatrix:
    """Constant 2x2 diffusion coefficient matrix.

    Construction only checks finiteness; ellipticity is validated where a
    matrix is actually used to diffuse (solver config, kernel smoothing,
    presets), so that diagnostic operations remain callable on arbitrary
    matrices.
    """

    d11: float
    d12: float
    d21: float
    d22: float

    def __post_init__(self) -> None:
        for name in ("d11", "d12", "d21", "d22"):
            if not math.isfinite(getattr(self, name)):
                raise NonFiniteValue(f"matrix entry {name} must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([[self.d11, self.d12], [self.d21, self.d22]], dtype=np.float64)


IDENTITY = DiffusionMatrix(1.0, 0.0, 0.0, 1.0)


def ellipticity(d: DiffusionMatrix) -> float:
    """Smallest eigenvalue of the symmetric part (d + d^T)/2.

    This is the largest constant a with xi^T d xi >= a |xi|^2; it is
    positive exactly when the uniform ellipticity hypothesis holds for
    coefficients g*d with g > 0. Closed form for the symmetric 2x2 case.
    """
    a, b = d.d11, d.d22
    c = 0.5 * (d.d12 + d.d21)
    return 0.5 * (a + b) - math.hypot(0.5 * (a - b), c)


def sym_spectral_radius(d: DiffusionMatrix) -> float:
    """Largest |eigenvalue| of the symmetric part; used by stability guards."""
    a, b = d.d11, d.d22
    c = 0.5 * (d.d12 + d.d21)
    r = math.hypot(0.5 * (a - b), c)
    return max(abs(0.5 * (a + b) + r), abs(0.5 * (a + b) - r))


def eigen_discriminant(d: DiffusionMatrix) -> float:
    """(d22 - d11)^2 + 4*d12*d21.

    The sign classifies the eigenvalues of d: real and distinct (> 0),
    complex conjugate (< 0), or repeated/defective (= 0).
    """
    return (d.d22 - d.d11) ** 2 + 4.0 * d.d12 * d.d21


def rotation_matrix(theta: float) -> DiffusionMatrix:
    """Rotation-form matrix [[cos t, -sin t], [sin t, cos t]] for t in (0, pi/2)."""
    if not (0.0 < theta < 0.5 * math.pi):
        raise UnknownPreset(f"rotation angle must lie in (0, pi/2), got {theta}")
    return DiffusionMatrix(math.cos(theta), -math.sin(theta), math.sin(theta), math.cos(theta))


def rotation_angle(d: DiffusionMatrix, tol: float = 1e-12) -> float | None:
    """Angle theta if d has rotation form with theta in (0, pi/2), else None."""
    if (
        abs(d.d11 - d.d22) <= tol
        and abs(d.d12 + d.d21) <= tol
        and abs(d.d11 * d.d11 + d.d21 * d.d21 - 1.0) <= tol
        and d.d11 > 0.0
        and d.d21 > 0.0
    ):
        return math.atan2(d.d21, d.d11)
    return None


@dataclass(frozen=True)
class EdgeStoppingSpec:
    """Threshold parameter kappa for the rational edge-stopping function."""

    kappa: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be positive and finite, got {self.kappa}")


def edge_stopping(w, spec: EdgeStoppingSpec):
    """g(w) = 1 / (1 + (w/kappa)^2), applied elementwise.

    Even in w, equal to 1 at w = 0, strictly decreasing in |w| with range
    (0, 1]. Accepts scalars or arrays. The complex-diffusion variant with
    threshold kappa*theta is obtained by composing the parameters into
    ``spec.kappa``; there is no separate code path.
    """
    r = np.asarray(w, dtype=np.float64) / spec.kappa
    out = 1.0 / (1.0 + r * r)
    if np.ndim(w) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class Preset:
    """Named diffusion matrix with its validated ellipticity attached."""

    name: str
    matrix: DiffusionMatrix
    theta: float | None
    alpha: float


# Published coefficient sets (d11, d12, d21, d22) and their discriminant-sign
# labels. NCDF3 is stored exactly as published even though its coefficients
# give s = -0.09, not the labelled s = 0; preset() warns instead of "fixing"
# the matrix.
_NCDF_TABLE: dict[str, tuple[tuple[float, float, float, float], int]] = {
    "ncdf1": ((1.0, 0.025, 1.0, 1.0), +1),
    "ncdf2": ((1.0, -0.025, 0.025, 1.0), -1),
    "ncdf3": ((1.0, -0.025, 1.0, 1.1), 0),
    "ncdf4": ((1.0, 0.9, 1.0, 1.0), +1),
    "ncdf5": ((1.0, -0.9, 0.9, 1.0), -1),
    "ncdf6": ((1.0, -0.9, 0.225, 1.9), 0),
}

NCDF_NAMES = tuple(_NCDF_TABLE)


def _discriminant_sign(s: float) -> int:
    if abs(s) <= _DISCRIMINANT_ZERO_BAND:
        return 0
    return 1 if s > 0 else -1


def preset(name: str) -> Preset:
    """Look up a named preset ("ncdf1".."ncdf6" or "rotation:<theta>").

    Names are case-insensitive. The returned matrix carries exactly the
    published coefficients; ellipticity is validated and attached. A
    PresetLabelWarning is emitted when the stored coefficients contradict
    the published discriminant-sign label (NCDF3).
    """
    key = name.strip().lower()
    theta: float | None = None
    if key.startswith("rotation:"):
        try:
            theta = float(key.split(":", 1)[1])
        except ValueError:
            raise UnknownPreset(f"cannot parse rotation angle in {name!r}") from None
        matrix = rotation_matrix(theta)
        label = None
    elif key in _NCDF_TABLE:
        coeffs, label = _NCDF_TABLE[key]
        matrix = DiffusionMatrix(*coeffs)
    else:
        raise UnknownPreset(f"unknown preset {name!r}")

    alpha = ellipticity(matrix)
    if alpha <= 0:
        raise NotPositiveDefinite(f"preset {name!r} is not uniformly elliptic")
    if label is not None:
        s = eigen_discriminant(matrix)
        if _discriminant_sign(s) != label:
            warnings.warn(
                f"preset {key}: published coefficients give discriminant "
                f"s = {s:.6g}, which contradicts the published sign label; "
                "the literal coefficients are used anyway",
                PresetLabelWarning,
                stacklevel=2,
            )
    return Preset(name=key, matrix=matrix, theta=theta, alpha=alpha)
