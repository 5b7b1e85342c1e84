"""Deterministic synthetic inputs for desk-scale experiments and tests."""
from __future__ import annotations

import numpy as np

from .errors import InvalidParameter


def pws_phantom(size: int = 128) -> np.ndarray:
    """Piecewise-smooth test image: flat shapes with sharp boundaries.

    Shapes are placed at fixed fractions of the canvas so any size yields
    the same scene; edges occur in many orientations, which matters for
    kernel estimation.
    """
    if size < 16:
        raise InvalidParameter("phantom size must be at least 16")
    img = np.full((size, size), 0.2)
    rr, cc = np.mgrid[0:size, 0:size] / size

    img[(rr > 0.08) & (rr < 0.42) & (cc > 0.07) & (cc < 0.47)] = 0.75
    img[(rr > 0.55) & (rr < 0.92) & (cc > 0.62) & (cc < 0.8)] = 0.05
    img[((rr - 0.68) ** 2 + (cc - 0.28) ** 2) < 0.028] = 0.5
    img[((rr - 0.25) ** 2 + (cc - 0.75) ** 2) < 0.012] = 0.95
    img[np.abs(rr + cc - 1.35) < 0.035] = 0.35
    img[((rr - 0.5) ** 2 + (cc - 0.52) ** 2) < 0.004] = 0.9
    return img


def two_level_patch(size: int = 24, low: float = 0.0, high: float = 1.0) -> np.ndarray:
    """Half-and-half patch: left columns at ``low``, right at ``high``."""
    patch = np.full((size, size), low)
    patch[:, size // 2:] = high
    return patch


def step_signal(length: int = 50, low: float = 0.2, high: float = 0.8) -> np.ndarray:
    """1-D piecewise-constant signal with a single midpoint step."""
    if length < 4:
        raise InvalidParameter("signal length must be at least 4")
    x = np.full(length, low)
    x[length // 2:] = high
    return x


def gaussian_blur_1d(signal, sigma_b: float) -> np.ndarray:
    """Blur a 1-D signal with a truncated Gaussian, replicating the edges."""
    if not sigma_b > 0:
        raise InvalidParameter("sigma_b must be positive")
    x = np.asarray(signal, dtype=np.float64)
    radius = max(1, int(np.ceil(4.0 * sigma_b)))
    t = np.arange(-radius, radius + 1)
    kernel = np.exp(-(t * t) / (2.0 * sigma_b * sigma_b))
    kernel /= kernel.sum()
    padded = np.concatenate([np.full(radius, x[0]), x, np.full(radius, x[-1])])
    return np.convolve(padded, kernel, mode="valid")


def add_noise(arr, sigma_n: float, seed: int = 0) -> np.ndarray:
    """Additive Gaussian noise with a fixed seed for reproducibility."""
    a = np.asarray(arr, dtype=np.float64)
    rng = np.random.default_rng(seed)
    return a + sigma_n * rng.standard_normal(a.shape)
