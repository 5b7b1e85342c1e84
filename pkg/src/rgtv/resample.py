"""Bilinear resampling for pyramid construction and kernel rescaling."""
from __future__ import annotations

import numpy as np

from .errors import InvalidParameter


def resize_bilinear(img, out_h: int, out_w: int) -> np.ndarray:
    """Resize a 2-D array with bilinear interpolation.

    Output pixel centers map back to input coordinates with the standard
    half-pixel alignment, clamped at the borders.  Identity when the
    shape is unchanged.
    """
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise InvalidParameter("expected a nonempty 2-D array")
    if out_h < 1 or out_w < 1:
        raise InvalidParameter("output dimensions must be positive")
    in_h, in_w = a.shape
    if (out_h, out_w) == (in_h, in_w):
        return a.copy()

    def coords(n_out, n_in):
        c = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
        return np.clip(c, 0.0, n_in - 1.0)

    ys = coords(out_h, in_h)
    xs = coords(out_w, in_w)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    top = a[np.ix_(y0, x0)] * (1 - wx) + a[np.ix_(y0, x1)] * wx
    bottom = a[np.ix_(y1, x0)] * (1 - wx) + a[np.ix_(y1, x1)] * wx
    return top * (1 - wy) + bottom * wy
