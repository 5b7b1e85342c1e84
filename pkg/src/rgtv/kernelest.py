"""Closed-form blur kernel estimation in the gradient domain.

Fitting the kernel against image gradients instead of intensities kills
the DC component and suppresses ringing, and the quadratic objective
0.5 ||grad(x) (*) k - grad(b)||^2 + mu ||k||^2 solves in one spectral
division.  The full-image solution is cropped to the centered window and
sanitized into a valid kernel.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateInput, DegenerateKernel, InvalidParameter
from .fourier import BlurKernel, gradients, wiener_like_solve
from .imagegraph import as_image

# Taps below this fraction of the peak are treated as estimation noise.
DEFAULT_TAP_FLOOR = 0.05


def sanitize_kernel(raw, tap_floor: float = DEFAULT_TAP_FLOOR) -> BlurKernel:
    """Clamp negatives, drop near-zero taps and normalize to unit sum."""
    t = np.asarray(raw, dtype=np.float64)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] % 2 == 0:
        raise InvalidParameter("raw kernel must be a square odd-sided grid")
    if not np.all(np.isfinite(t)):
        raise InvalidParameter("raw kernel contains non-finite values")
    t = np.where(t > 0.0, t, 0.0)
    peak = t.max()
    if tap_floor > 0 and peak > 0:
        t = np.where(t >= tap_floor * peak, t, 0.0)
    total = t.sum()
    if total <= 0.0:
        raise DegenerateKernel("no positive kernel taps survived sanitation")
    return BlurKernel(t / total)


def estimate_kernel(x_hat, b, side: int, mu: float = 0.05,
                    tap_floor: float = DEFAULT_TAP_FLOOR) -> BlurKernel:
    """Estimate the blur kernel mapping ``x_hat`` onto ``b``.

    Solves argmin_k 0.5 ||grad(x_hat) (*) k - grad(b)||^2 + mu ||k||^2 in
    the frequency domain, crops the solution to the centered side x side
    window and sanitizes it.
    """
    sharp = as_image(x_hat)
    blurry = as_image(b)
    if sharp.shape != blurry.shape:
        raise InvalidParameter("images must share dimensions")
    if side < 3 or side % 2 == 0:
        raise InvalidParameter("kernel side must be odd and at least 3")
    if side > min(sharp.shape):
        raise InvalidParameter("kernel side exceeds image size")
    if not mu > 0:
        raise InvalidParameter("mu must be positive")

    gx_x, gy_x = gradients(sharp)
    gx_b, gy_b = gradients(blurry)
    if not (np.any(gx_x) or np.any(gy_x)):
        raise DegenerateInput("reference image is constant; gradients vanish")

    fx = np.fft.fft2(gx_x)
    fy = np.fft.fft2(gy_x)
    numerator = np.conj(fx) * np.fft.fft2(gx_b) + np.conj(fy) * np.fft.fft2(gy_b)
    denominator = np.abs(fx) ** 2 + np.abs(fy) ** 2 + 2.0 * mu
    full = wiener_like_solve(numerator, denominator)

    c = side // 2
    window = np.roll(full, (c, c), axis=(0, 1))[:side, :side]
    return sanitize_kernel(window, tap_floor=tap_floor)
