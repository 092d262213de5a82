"""Image-quality metrics and seeded Gaussian noise.

SNR compares variances, PSNR compares the root-mean-square error against
the 8-bit peak of 255, and NPB is the no-reference perceptual blur score
in [0, 1] (0 sharpest) built by comparing neighbour variations before and
after a 9-tap uniform low-pass filter, in the style of Crete-Roffet.
Metrics operate on real-valued fields directly; nothing is quantized to
8 bits first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateReference, LengthMismatch
from .field import ScalarField

PEAK_VALUE = 255.0


@dataclass(frozen=True)
class MetricsReport:
    snr_db: float
    psnr_db: float
    rmse: float
    npb: float


@dataclass(frozen=True)
class NoiseSpec:
    """Additive zero-mean Gaussian noise, reproducible from the seed."""

    sigma_prime: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma_prime) and self.sigma_prime >= 0):
            raise ValueError(f"sigma_prime must be >= 0, got {self.sigma_prime}")


def variance(image: ScalarField) -> float:
    """Mean squared deviation from the image mean; zero iff constant."""
    v = image.values
    d = v - v.mean()
    return float((d * d).mean())


def _check_same_grid(reference: ScalarField, test: ScalarField) -> None:
    if reference.grid != test.grid:
        raise LengthMismatch("reference and test images must share a grid")


def snr(reference: ScalarField, test: ScalarField) -> float:
    """10*log10(Var(reference) / Var(test - reference)) in decibels.

    Returns +inf when the difference has zero variance (e.g. the test is
    the reference plus a constant). Raises DegenerateReference when the
    reference itself has zero variance.
    """
    _check_same_grid(reference, test)
    var_s = variance(reference)
    if var_s == 0.0:
        raise DegenerateReference("reference image has zero variance")
    d = test.values - reference.values
    dd = d - d.mean()
    var_n = float((dd * dd).mean())
    if var_n == 0.0:
        return math.inf
    return 10.0 * math.log10(var_s / var_n)


def psnr(reference: ScalarField, test: ScalarField) -> tuple[float, float]:
    """(PSNR in dB against a peak of 255, RMSE) for the image pair.

    RMSE is the standard root-mean-square error |S - U|_F / sqrt(N1*N2).
    Identical images give (inf, 0.0).
    """
    _check_same_grid(reference, test)
    d = test.values - reference.values
    rmse = math.sqrt(float((d * d).mean()))
    if rmse == 0.0:
        return math.inf, 0.0
    return 20.0 * math.log10(PEAK_VALUE / rmse), rmse


def _mean9(a: np.ndarray, axis: int) -> np.ndarray:
    # Symmetric (half-sample) edge extension keeps blur(c - a) == c - blur(a),
    # which the negation invariance of the blur score relies on.
    pad = [(0, 0), (0, 0)]
    pad[axis] = (4, 4)
    ap = np.pad(a, pad, mode="symmetric")
    out = np.zeros_like(a)
    for k in range(9):
        if axis == 1:
            out += ap[:, k : k + a.shape[1]]
        else:
            out += ap[k : k + a.shape[0], :]
    return out / 9.0


def _directional_blur(values: np.ndarray, axis: int) -> float:
    blurred = _mean9(values, axis)
    if axis == 1:
        d_sharp = np.abs(np.diff(values, axis=1))
        d_blur = np.abs(np.diff(blurred, axis=1))
    else:
        d_sharp = np.abs(np.diff(values, axis=0))
        d_blur = np.abs(np.diff(blurred, axis=0))
    kept = np.maximum(d_sharp - d_blur, 0.0)
    s_d = float(d_sharp[1:-1, 1:-1].sum())
    s_v = float(kept[1:-1, 1:-1].sum())
    if s_d <= 0.0:
        return 0.0
    return (s_d - s_v) / s_d


def npb(image: ScalarField) -> float:
    """No-reference perceptual blur estimate in [0, 1].

    The image is low-passed with a 9-tap uniform filter separately along
    each axis; the per-direction score is (s_D - s_V)/s_D, where s_D sums
    the absolute neighbour differences of the original over the interior
    and s_V sums the positive part of the difference-of-variations. The
    result is the maximum over the two directions, clamped to [0, 1];
    constant images score 0 by convention.
    """
    values = image.values
    score = max(_directional_blur(values, axis=1), _directional_blur(values, axis=0))
    return min(1.0, max(0.0, score))


def report(reference: ScalarField, test: ScalarField) -> MetricsReport:
    """Full metric set for a (reference, test) pair."""
    psnr_db, rmse = psnr(reference, test)
    return MetricsReport(
        snr_db=snr(reference, test), psnr_db=psnr_db, rmse=rmse, npb=npb(test)
    )


def add_gaussian_noise(image: ScalarField, spec: NoiseSpec) -> ScalarField:
    """Add i.i.d. N(0, sigma_prime^2) noise, reproducibly.

    The generator is counter-based (Philox keyed by the seed), so each
    pixel's noise value depends only on (seed, pixel index) and the same
    (image, seed) always gives a bit-identical result. Values are not
    clipped; the state stays real-valued.
    """
    if spec.sigma_prime == 0.0:
        return image
    gen = np.random.Generator(np.random.Philox(key=spec.seed))
    noise = gen.standard_normal(image.grid.npixels).reshape(image.grid.shape)
    return ScalarField(image.grid, image.values + spec.sigma_prime * noise)
