"""Quantitative evaluation: error ratio, PSNR, kernel similarity, histograms."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateInput,
    DimensionMismatch,
    InvalidParameter,
    TooLarge,
    UndefinedSimilarity,
)
from .fourier import BlurKernel
from .imagegraph import WeightParams, as_image
from .resample import resize_bilinear

# Restorations with error ratio at or below this count as successes.
SUCCESS_THRESHOLD = 5.0

HISTOGRAM_PATCH_CAP = 32 * 32


def error_ratio(x_true, x_est_kernel, x_gt_kernel) -> float:
    """Squared restoration error under the estimated kernel, relative to
    the error under the ground-truth kernel."""
    truth = as_image(x_true)
    est = as_image(x_est_kernel)
    ref = as_image(x_gt_kernel)
    if truth.shape != est.shape or truth.shape != ref.shape:
        raise DimensionMismatch("all three images must share dimensions")
    denominator = float(np.sum((truth - ref) ** 2))
    if denominator == 0.0:
        raise DegenerateInput("ground-truth restoration is exact; ratio undefined")
    return float(np.sum((truth - est) ** 2)) / denominator


def psnr(x, y) -> float:
    """Peak signal-to-noise ratio in dB for unit-range images."""
    a = as_image(x)
    b = as_image(y)
    if a.shape != b.shape:
        raise DimensionMismatch("images must share dimensions")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def kernel_ncc(k1: BlurKernel, k2: BlurKernel) -> float:
    """Zero-mean normalized cross-correlation at the best integer shift.

    Kernels of different sides are compared after bilinearly resampling
    the smaller onto the larger grid; the alignment search covers shifts
    up to a quarter of the kernel side in each direction.
    """
    a = k1.taps
    b = k2.taps
    if a.shape[0] < b.shape[0]:
        a = resize_bilinear(a, b.shape[0], b.shape[0])
    elif b.shape[0] < a.shape[0]:
        b = resize_bilinear(b, a.shape[0], a.shape[0])
    a = a - a.mean()
    b = b - b.mean()
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise UndefinedSimilarity("kernel has zero variance")
    span = a.shape[0] // 4
    best = -1.0
    for dy in range(-span, span + 1):
        for dx in range(-span, span + 1):
            shifted = np.roll(b, (dy, dx), axis=(0, 1))
            best = max(best, float(np.sum(a * shifted)) / (norm_a * norm_b))
    return best


def weight_histogram(patch, params: WeightParams = WeightParams(),
                     bins: int = 50):
    """Distribution of pairwise intensity differences over a full graph.

    Every unordered pixel pair of the (fully connected) patch contributes
    one difference d = |x_i - x_j|; the result is the fraction of pairs
    per uniform d-bin on [0, 1].  Returns ``(fractions, bin_edges)``.
    """
    p = as_image(patch)
    if p.size > HISTOGRAM_PATCH_CAP:
        raise TooLarge(f"patch has {p.size} pixels; cap is {HISTOGRAM_PATCH_CAP}")
    if p.size < 2:
        raise InvalidParameter("patch needs at least two pixels")
    if bins < 1:
        raise InvalidParameter("bins must be positive")
    v = p.ravel()
    iu = np.triu_indices(v.size, k=1)
    d = np.clip(np.abs(v[iu[0]] - v[iu[1]]), 0.0, 1.0)
    counts, edges = np.histogram(d, bins=bins, range=(0.0, 1.0))
    return counts / d.size, edges


@dataclass
class EvalReport:
    """Outcome of one blind-deblurring evaluation run."""

    error_ratio: float
    psnr_db: float
    kernel_ncc: float
    success: bool
    wall_time_seconds: dict = field(default_factory=dict)
    config: dict | None = None

    def __post_init__(self):
        if not self.error_ratio >= 0:
            raise InvalidParameter("error ratio must be non-negative")
        if self.success != (self.error_ratio <= SUCCESS_THRESHOLD):
            raise InvalidParameter(
                "success flag inconsistent with the error-ratio threshold")

    @classmethod
    def from_metrics(cls, error_ratio: float, psnr_db: float, kernel_ncc: float,
                     wall_time_seconds: dict | None = None,
                     config: dict | None = None) -> "EvalReport":
        return cls(error_ratio, psnr_db, kernel_ncc,
                   error_ratio <= SUCCESS_THRESHOLD,
                   wall_time_seconds or {}, config)

    def to_dict(self) -> dict:
        out = {
            "error_ratio": self.error_ratio,
            "psnr_db": self.psnr_db,
            "kernel_ncc": self.kernel_ncc,
            "success": self.success,
            "wall_time_seconds": dict(self.wall_time_seconds),
        }
        if self.config is not None:
            out["config"] = dict(self.config)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        return cls(data["error_ratio"], data["psnr_db"], data["kernel_ncc"],
                   data["success"], dict(data.get("wall_time_seconds", {})),
                   data.get("config"))

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        return cls.from_dict(json.loads(text))
