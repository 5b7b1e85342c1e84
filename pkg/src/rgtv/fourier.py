"""Periodic 2-D convolution, gradient operators and spectral division.

All boundary handling is periodic (circular), so convolution with a
kernel is diagonalized by the 2-D FFT.  Kernels are stored with their
origin at the grid center tap (floor(h/2), floor(h/2)).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, SingularSystem
from .imagegraph import as_image

KERNEL_SUM_TOL = 1e-10


@dataclass(frozen=True)
class BlurKernel:
    """Small odd-sided non-negative convolution kernel with unit sum."""

    taps: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.taps, dtype=np.float64)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise InvalidParameter("kernel taps must form a square grid")
        if t.shape[0] % 2 == 0 or t.shape[0] < 1:
            raise InvalidParameter("kernel side must be odd and positive")
        if not np.all(np.isfinite(t)):
            raise InvalidParameter("kernel taps must be finite")
        if t.min() < 0:
            raise InvalidParameter("kernel taps must be non-negative")
        if abs(t.sum() - 1.0) > KERNEL_SUM_TOL:
            raise InvalidParameter(f"kernel taps must sum to 1, got {t.sum()!r}")
        t = t.copy()
        t.flags.writeable = False
        object.__setattr__(self, "taps", t)

    @property
    def side(self) -> int:
        return self.taps.shape[0]

    @property
    def is_delta(self) -> bool:
        c = self.side // 2
        return bool(self.taps[c, c] > 1.0 - 1e-12)

    @staticmethod
    def delta(side: int = 1) -> "BlurKernel":
        if side < 1 or side % 2 == 0:
            raise InvalidParameter("kernel side must be odd and positive")
        t = np.zeros((side, side))
        t[side // 2, side // 2] = 1.0
        return BlurKernel(t)


def gaussian_kernel(side: int, sigma_b: float) -> BlurKernel:
    """Normalized isotropic Gaussian kernel with standard deviation sigma_b."""
    if side < 1 or side % 2 == 0:
        raise InvalidParameter("kernel side must be odd and positive")
    if not sigma_b > 0:
        raise InvalidParameter("sigma_b must be positive")
    r = np.arange(side) - side // 2
    g = np.exp(-(r * r) / (2.0 * sigma_b * sigma_b))
    taps = np.outer(g, g)
    return BlurKernel(taps / taps.sum())


def kernel_spectrum(k: BlurKernel, shape) -> np.ndarray:
    """2-D DFT of the kernel zero-padded to ``shape``, origin at the center tap."""
    h, w = shape
    if k.side > h or k.side > w:
        raise InvalidParameter(
            f"kernel side {k.side} exceeds image shape {shape}")
    pad = np.zeros((h, w))
    pad[:k.side, :k.side] = k.taps
    c = k.side // 2
    pad = np.roll(pad, (-c, -c), axis=(0, 1))
    return np.fft.fft2(pad)


def convolve(x, k: BlurKernel) -> np.ndarray:
    """Periodic convolution of an image with a centered kernel (via FFT)."""
    img = as_image(x)
    spec = kernel_spectrum(k, img.shape)
    return np.fft.ifft2(np.fft.fft2(img) * spec).real


def convolve_adjoint(y, k: BlurKernel) -> np.ndarray:
    """Adjoint of ``convolve``: correlation with the same kernel."""
    img = as_image(y)
    spec = kernel_spectrum(k, img.shape)
    return np.fft.ifft2(np.fft.fft2(img) * np.conj(spec)).real


def gradients(x):
    """Forward-difference gradients with periodic wraparound.

    Returns ``(gx, gy)`` where gx[r, c] = x[r, c+1] - x[r, c] and
    gy[r, c] = x[r+1, c] - x[r, c], indices taken modulo the image size.
    """
    img = as_image(x)
    gx = np.roll(img, -1, axis=1) - img
    gy = np.roll(img, -1, axis=0) - img
    return gx, gy


def wiener_like_solve(numerator, denominator) -> np.ndarray:
    """Elementwise spectral division followed by an inverse 2-D FFT.

    ``numerator`` is a complex spectrum; ``denominator`` must be a real
    spectrum that is strictly positive after the caller has added its
    regularization term.  Returns the real part of the inverse transform
    and verifies the imaginary residue is negligible.
    """
    num = np.asarray(numerator, dtype=np.complex128)
    den = np.asarray(denominator)
    if np.iscomplexobj(den):
        if np.max(np.abs(den.imag)) > 1e-12 * max(1.0, np.max(np.abs(den.real))):
            raise InvalidParameter("denominator spectrum must be real")
        den = den.real
    den = den.astype(np.float64)
    if num.shape != den.shape:
        raise InvalidParameter("numerator and denominator shapes differ")
    if den.size == 0 or den.min() <= 0:
        raise SingularSystem("denominator spectrum is not strictly positive")
    out = np.fft.ifft2(num / den)
    residue = np.max(np.abs(out.imag)) / max(1.0, np.max(np.abs(out.real)))
    if residue > 1e-8:
        raise InvalidParameter(
            f"spectra are not conjugate-symmetric (imaginary residue {residue:.2e})")
    return out.real


def edge_taper(x, k: BlurKernel) -> np.ndarray:
    """Blend image borders toward their periodic blur to soften wraparound.

    A ramp whose width matches the kernel side fades each border from the
    periodically blurred image back to the original, so that opposing
    edges meet smoothly.  Interior pixels are untouched.
    """
    img = as_image(x)
    blurred = convolve(img, k)

    def ramp(n: int) -> np.ndarray:
        i = np.arange(n)
        up = (i + 0.5) / k.side
        return np.minimum(1.0, np.minimum(up, up[::-1]))

    alpha = np.outer(ramp(img.shape[0]), ramp(img.shape[1]))
    return alpha * img + (1.0 - alpha) * blurred
