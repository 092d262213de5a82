"""Image file I/O and synthetic test images.

Binary PGM (P5, maxval 255) is the native format: reading and writing it
is bit-exact and dependency-free. 8-bit PNG input is supported when
Pillow is installed. Internal state is float64 throughout; quantization
to 8 bits happens only on output, with round-half-to-even.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np


def read_pgm(path) -> np.ndarray:
    """Read a binary PGM (P5) file into a float64 (height, width) array."""
    data = Path(path).read_bytes()
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            eol = data.find(b"\n", pos)
            pos = len(data) if eol < 0 else eol + 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"{path}: truncated PGM header")
        tokens.append(data[start:pos])
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    width, height, maxval = (int(t) for t in tokens[1:4])
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 is supported, got {maxval}")
    pos += 1  # single whitespace byte after the header
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise ValueError(f"{path}: raster is truncated")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).astype(np.float64)


def write_pgm(path, values: np.ndarray) -> None:
    """Write an 8-bit array as binary PGM (P5, maxval 255)."""
    arr = np.asarray(values)
    if arr.dtype != np.uint8:
        raise ValueError("write_pgm expects uint8 data; quantize first")
    height, width = arr.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + arr.tobytes())


def load_image(path) -> np.ndarray:
    """Load a grey-scale image (PGM natively, PNG via Pillow) as float64."""
    suffix = Path(path).suffix.lower()
    if suffix == ".pgm":
        return read_pgm(path)
    if suffix == ".png":
        try:
            from PIL import Image
        except ImportError as exc:
            raise RuntimeError(
                "PNG input needs Pillow (pip install Pillow); "
                "PGM works without extra dependencies"
            ) from exc
        with Image.open(path) as img:
            return np.asarray(img.convert("L"), dtype=np.float64)
    raise ValueError(f"unsupported image format {suffix!r} (use .pgm or .png)")


def quantize_u8(
    values: np.ndarray, rescale: str = "none"
) -> tuple[np.ndarray, tuple[float, float]]:
    """Quantize a float image to uint8 with round-half-to-even.

    rescale = "none" clips to [0, 255]; "minmax" maps [min, max] onto
    [0, 255]; "symmetric" maps [-A, A] with A = max|values| onto
    [0, 255] with 0 at mid-grey (used for the v channel). Returns the
    bytes and the (lo, hi) source range that was mapped, for the sidecar.
    """
    v = np.asarray(values, dtype=np.float64)
    if rescale == "none":
        lo, hi = 0.0, 255.0
        scaled = np.clip(v, 0.0, 255.0)
    elif rescale == "minmax":
        lo, hi = float(v.min()), float(v.max())
        scaled = np.zeros_like(v) if hi == lo else (v - lo) * (255.0 / (hi - lo))
    elif rescale == "symmetric":
        amp = float(np.max(np.abs(v)))
        lo, hi = -amp, amp
        scaled = np.full_like(v, 127.5) if amp == 0.0 else 127.5 * (1.0 + v / amp)
    else:
        raise ValueError(f"unknown rescale mode {rescale!r}")
    return np.rint(scaled).astype(np.uint8), (lo, hi)


def _disk(size: int, cx: float, cy: float, radius: float) -> np.ndarray:
    y, x = np.mgrid[0:size, 0:size]
    return (x - cx) ** 2 + (y - cy) ** 2 <= radius**2


def synthetic_image(kind: str, size: int = 128) -> np.ndarray:
    """Deterministic grey-scale test images in [0, 255].

    Kinds: "shapes" (disk, bars, checkerboard patch and a ramp on one
    canvas), "disk", "step", "checkerboard", "ramp".
    """
    if size < 16:
        raise ValueError("synthetic images need size >= 16")
    key = kind.strip().lower()
    y, x = np.mgrid[0:size, 0:size]
    if key == "disk":
        img = np.full((size, size), 64.0)
        img[_disk(size, size / 2, size / 2, size / 4)] = 192.0
        return img
    if key == "step":
        img = np.full((size, size), 64.0)
        img[:, size // 2 :] = 192.0
        return img
    if key == "checkerboard":
        cell = max(size // 8, 1)
        board = ((x // cell + y // cell) % 2).astype(np.float64)
        return 64.0 + 128.0 * board
    if key == "ramp":
        return 255.0 * x / (size - 1)
    if key == "shapes":
        img = 32.0 + 96.0 * x / (size - 1)  # background ramp
        img[_disk(size, 0.3 * size, 0.32 * size, 0.18 * size)] = 220.0
        img[int(0.55 * size) : int(0.9 * size), int(0.1 * size) : int(0.18 * size)] = 10.0
        img[int(0.55 * size) : int(0.9 * size), int(0.26 * size) : int(0.34 * size)] = 235.0
        cell = max(size // 16, 2)
        ys, xs = int(0.55 * size), int(0.55 * size)
        patch = ((x[ys:, xs:] // cell + y[ys:, xs:] // cell) % 2).astype(np.float64)
        img[ys:, xs:] = 48.0 + 160.0 * patch
        img[int(0.08 * size) : int(0.2 * size), int(0.6 * size) : int(0.92 * size)] = 128.0
        return img
    raise ValueError(f"unknown synthetic image kind {kind!r}")


def write_rescale_sidecar(path, rescale: str, lo: float, hi: float) -> None:
    """Record the quantization mapping next to an output image."""
    text = f"rescale={rescale}\nlo={lo!r}\nhi={hi!r}\n"
    Path(path).write_text(text, encoding="ascii")


def is_exact_u8(values: np.ndarray) -> bool:
    """True when every value is an integer already inside [0, 255]."""
    v = np.asarray(values)
    return bool(
        np.all(v >= 0.0)
        and np.all(v <= 255.0)
        and np.all(v == np.floor(v))
        and np.all(np.isfinite(v))
    )
