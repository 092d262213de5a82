"""Shared oracles for the test suite.

Everything here is deliberately independent of the library's own code
paths: plain loops, direct formulas, and numpy eigensolvers.
"""

import numpy as np

from crossdiff import BoundaryMode


def laplacian_mode_values(n: int, h: float, boundary: BoundaryMode) -> np.ndarray:
    """Eigenvalues (as positive decay rates) of the 1-D flux-form Laplacian."""
    k = np.arange(n)
    if boundary is BoundaryMode.REFLECT:
        return (4.0 / h**2) * np.sin(np.pi * k / (2 * n)) ** 2
    return (4.0 / h**2) * np.sin(np.pi * k / n) ** 2


def slowest_mode_rate(
    d: np.ndarray, shape: tuple[int, int], dt: float, h: float, boundary: BoundaryMode
) -> float:
    """Asymptotic decay rate (per time unit) of the linear constant-g scheme.

    Every spatial mode's pair amplitude is multiplied per step by
    I - dt*lambda*d; the slowest rate is log of the largest per-step
    factor over all nonconstant modes and both matrix eigenvalues.
    """
    ny, nx = shape
    lam = (
        laplacian_mode_values(nx, h, boundary)[None, :]
        + laplacian_mode_values(ny, h, boundary)[:, None]
    ).ravel()
    lam = lam[lam > 0.0]
    factors = [
        np.max(np.abs(1.0 - dt * lam * mu)) for mu in np.linalg.eigvals(d)
    ]
    return float(np.log(max(factors)) / dt)


def heat_step_oracle(u: np.ndarray, dt: float, h: float) -> np.ndarray:
    """One explicit 5-point heat step with replicated-ghost Neumann edges."""
    up = np.pad(u, 1, mode="edge")
    lap = (
        up[1:-1, 2:] - 2.0 * u + up[1:-1, :-2] + up[2:, 1:-1] - 2.0 * u + up[:-2, 1:-1]
    ) / (h * h)
    return u + dt * lap


def complex_diffusion_step_oracle(
    z: np.ndarray, theta: float, kappa: float, dt: float, h: float
) -> np.ndarray:
    """One flux-form step of the complex-coefficient scalar scheme.

    The state is z = u + i*v and the coefficient is
    c(v) = exp(i*theta) / (1 + (v / (kappa*theta))^2), with edge values
    averaged from the nodes and zero flux through the edges (replicated
    ghosts make the boundary differences vanish).
    """
    g = 1.0 / (1.0 + (z.imag / (kappa * theta)) ** 2)
    c = complex(np.cos(theta), np.sin(theta)) * g
    zp = np.pad(z, ((0, 0), (1, 1)), mode="edge")
    cp = np.pad(c, ((0, 0), (1, 1)), mode="edge")
    fx = 0.5 * (cp[:, 1:] + cp[:, :-1]) * np.diff(zp, axis=1) / h
    zp = np.pad(z, ((1, 1), (0, 0)), mode="edge")
    cp = np.pad(c, ((1, 1), (0, 0)), mode="edge")
    fy = 0.5 * (cp[1:, :] + cp[:-1, :]) * np.diff(zp, axis=0) / h
    return z + dt * (np.diff(fx, axis=1) + np.diff(fy, axis=0)) / h


def npb_loop_oracle(values: np.ndarray) -> float:
    """Straightforward loop implementation of the blur score."""
    h, w = values.shape

    def mean9(a, axis):
        pad = [(0, 0), (0, 0)]
        pad[axis] = (4, 4)
        ap = np.pad(a, pad, mode="symmetric")
        out = np.zeros_like(a)
        for j in range(a.shape[0]):
            for i in range(a.shape[1]):
                if axis == 1:
                    out[j, i] = ap[j, i : i + 9].sum() / 9.0
                else:
                    out[j, i] = ap[j : j + 9, i].sum() / 9.0
        return out

    scores = []
    for axis in (1, 0):
        blurred = mean9(values, axis)
        d_sharp = np.abs(np.diff(values, axis=axis))
        d_blur = np.abs(np.diff(blurred, axis=axis))
        kept = np.maximum(d_sharp - d_blur, 0.0)
        s_d = d_sharp[1:-1, 1:-1].sum()
        s_v = kept[1:-1, 1:-1].sum()
        scores.append(0.0 if s_d <= 0 else (s_d - s_v) / s_d)
    return min(1.0, max(0.0, max(scores)))
