"""Blind deblurring pipelines.

The general path runs coarse-to-fine over an image pyramid, alternating
skeleton restoration with gradient-domain kernel estimation while the
prior weight anneals.  A faster path for Gaussian-like blur swaps the
unknown convolution for the surrogate smoother I + a L and drives it with
a Lanczos polynomial filter, so no pyramid or inner CG solves are needed.
A simple graph-regularized non-blind deconvolution finishes either path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DegenerateInput, InvalidInput, InvalidParameter
from .fourier import BlurKernel, convolve_adjoint, kernel_spectrum, wiener_like_solve
from .imagegraph import (
    WeightParams,
    as_image,
    build_gamma_graph,
    build_weight_graph,
    laplacian_apply,
    unweighted_graph,
)
from .kernelest import DEFAULT_TAP_FLOOR, estimate_kernel, sanitize_kernel
from .resample import resize_bilinear
from .skeleton import cg_solve, restore_skeleton
from .spectral import lanczos_filter

PYRAMID_FACTOR = math.log2(3.0)


@dataclass(frozen=True)
class DeblurConfig:
    """All solver parameters for the blind deblurring pipelines."""

    kernel_side: int = 9
    sigma: float = 0.1
    epsilon: float = 0.01
    beta0: float = 0.01
    mu: float = 0.05
    beta_decay: float = 1.1
    pyramid_factor: float = PYRAMID_FACTOR
    scale_iters: int = 5
    kernel_tol: float = 1e-3
    skeleton_iters: int = 4
    skeleton_tol: float = 1e-4
    cg_tol: float = 1e-6
    cg_max_iters: int = 200
    tap_floor: float = DEFAULT_TAP_FLOOR
    gaussian_a0: float = -0.07
    gaussian_beta: float = 0.05
    gaussian_iters: int = 30
    gaussian_tol: float = 1e-5
    lanczos_order: int = 30
    nonblind_beta: float = 0.002

    def __post_init__(self):
        if self.kernel_side < 3 or self.kernel_side % 2 == 0:
            raise InvalidParameter("kernel_side must be odd and at least 3")
        if not self.beta_decay > 1:
            raise InvalidParameter("beta_decay must exceed 1")
        if not self.pyramid_factor > 1:
            raise InvalidParameter("pyramid_factor must exceed 1")
        for name in ("sigma", "epsilon", "beta0", "mu", "kernel_tol",
                     "skeleton_tol", "cg_tol", "gaussian_beta", "gaussian_tol",
                     "nonblind_beta"):
            if not getattr(self, name) > 0:
                raise InvalidParameter(f"{name} must be positive")
        for name in ("scale_iters", "skeleton_iters", "cg_max_iters",
                     "gaussian_iters", "lanczos_order"):
            if getattr(self, name) < 1:
                raise InvalidParameter(f"{name} must be at least 1")

    @property
    def weight_params(self) -> WeightParams:
        return WeightParams(self.sigma, self.epsilon)


@dataclass(frozen=True)
class Pyramid:
    """Down-sampled copies of the input, coarsest first, with kernel sides."""

    levels: tuple
    kernel_sides: tuple

    def __len__(self) -> int:
        return len(self.levels)


def _odd_floor(v: float) -> int:
    n = int(math.floor(v))
    return n if n % 2 == 1 else n - 1


def build_pyramid(b, cfg: DeblurConfig) -> Pyramid:
    """Down-sample until the scaled kernel side would drop below 3.

    Level sizes follow the configured ratio with rounding; kernel sides
    shrink by the same cumulative factor and are forced odd.  The finest
    level is the original image.
    """
    img = as_image(b)
    h0, w0 = img.shape
    sizes = [(h0, w0)]
    sides = [cfg.kernel_side]
    if min(h0, w0) < cfg.kernel_side:
        raise InvalidInput("image is smaller than the requested kernel")
    level = 1
    while True:
        side = _odd_floor(cfg.kernel_side / cfg.pyramid_factor ** level)
        if side < 3:
            break
        hh = max(1, round(sizes[-1][0] / cfg.pyramid_factor))
        ww = max(1, round(sizes[-1][1] / cfg.pyramid_factor))
        if min(hh, ww) < side:
            break
        sizes.append((hh, ww))
        sides.append(side)
        level += 1
    levels = []
    for hh, ww in reversed(sizes):
        levels.append(img.copy() if (hh, ww) == (h0, w0)
                      else resize_bilinear(img, hh, ww))
    return Pyramid(tuple(levels), tuple(reversed(sides)))


def _rescale_kernel(k: BlurKernel, new_side: int, tap_floor: float) -> BlurKernel:
    if new_side == k.side:
        return k
    return sanitize_kernel(resize_bilinear(k.taps, new_side, new_side),
                           tap_floor=tap_floor)


def blind_deblur(b, cfg: DeblurConfig,
                 on_step: Callable | None = None) -> tuple[BlurKernel, np.ndarray]:
    """Coarse-to-fine blind kernel estimation.

    At each pyramid level, alternates skeleton restoration with kernel
    estimation for ``scale_iters`` rounds (or until the kernel stops
    moving), dividing the prior weight by ``beta_decay`` after every
    round.  The kernel starts as a delta at the coarsest level and is
    bilinearly up-sampled between levels.  Returns the finest-scale
    kernel and skeleton image.

    ``on_step`` (optional) receives keyword arguments ``scale``, ``step``,
    ``beta`` and ``kernel`` after every alternation, for tracing.
    """
    img = as_image(b)
    pyramid = build_pyramid(img, cfg)
    params = cfg.weight_params
    kernel = BlurKernel.delta(pyramid.kernel_sides[0])
    skeleton = pyramid.levels[0]
    for scale, (level, side) in enumerate(zip(pyramid.levels, pyramid.kernel_sides)):
        kernel = _rescale_kernel(kernel, side, cfg.tap_floor)
        beta = cfg.beta0
        for step in range(cfg.scale_iters):
            skeleton = restore_skeleton(
                level, kernel, params, beta=beta,
                outer_iters=cfg.skeleton_iters, tol=cfg.skeleton_tol,
                cg_tol=cfg.cg_tol, cg_max_iters=cfg.cg_max_iters)
            new_kernel = estimate_kernel(skeleton, level, side, mu=cfg.mu,
                                         tap_floor=cfg.tap_floor)
            change = float(np.linalg.norm(new_kernel.taps - kernel.taps))
            kernel = new_kernel
            if on_step is not None:
                on_step(scale=scale, step=step, beta=beta, kernel=kernel)
            beta /= cfg.beta_decay
            if change < cfg.kernel_tol:
                break
    return kernel, skeleton


def learn_a(pairs: Iterable[tuple]) -> float:
    """Least-squares surrogate strength from sharp/blurred image pairs.

    Fits the scalar a minimizing sum ||(I + a L) x_i - y_i||^2 over the
    pairs, with L the unweighted lattice Laplacian of each image.
    """
    numerator = 0.0
    denominator = 0.0
    count = 0
    for sharp, blurred in pairs:
        x = as_image(sharp)
        y = as_image(blurred)
        if x.shape != y.shape:
            raise InvalidParameter("pair images must share dimensions")
        Lx = laplacian_apply(unweighted_graph(*x.shape), x)
        numerator += float(np.sum(Lx * (y - x)))
        denominator += float(np.sum(Lx * Lx))
        count += 1
    if count == 0:
        raise InvalidParameter("need at least one sharp/blurred pair")
    if denominator == 0.0:
        raise DegenerateInput("all sharp images are constant; cannot fit a")
    return numerator / denominator


def _surrogate_response(a: float, beta: float):
    def response(lam):
        g = 1.0 + a * lam
        return g / (g * g + 2.0 * beta * lam)

    return response


def blind_deblur_gaussian(b, cfg: DeblurConfig,
                          on_step: Callable | None = None
                          ) -> tuple[BlurKernel, np.ndarray]:
    """Accelerated blind deblurring for Gaussian-like blur.

    Models the blur as the graph smoother I + a L (a < 0) so the skeleton
    solve becomes a polynomial spectral filter g(L) / (g(L)^2 + 2 beta L)
    applied to the input, evaluated with the Lanczos method.  Each round
    refreshes the l1 weights from the new skeleton and refits a by least
    squares; a single gradient-domain kernel estimation finishes.
    """
    img = as_image(b)
    params = cfg.weight_params
    graph = unweighted_graph(*img.shape)
    a = cfg.gaussian_a0
    beta = cfg.gaussian_beta
    x = img.copy()
    order = min(cfg.lanczos_order, img.size)
    for step in range(cfg.gaussian_iters):
        x_new = lanczos_filter(lambda v: laplacian_apply(graph, v), img,
                               _surrogate_response(a, beta), order)
        rel = float(np.linalg.norm(x_new - x)) / max(float(np.linalg.norm(x)), 1e-30)
        x = x_new
        graph = build_gamma_graph(x, params)
        Lx = laplacian_apply(graph, x)
        denom = float(np.sum(Lx * Lx))
        if denom > 0.0:
            a = float(np.sum(Lx * (img - x))) / denom
        if on_step is not None:
            on_step(step=step, a=a, skeleton=x)
        if rel < cfg.gaussian_tol:
            break
    kernel = estimate_kernel(x, img, cfg.kernel_side, mu=cfg.mu,
                             tap_floor=cfg.tap_floor)
    return kernel, x


def nonblind_finish(b, k: BlurKernel, lambda_reg: float = 0.002,
                    pilot_reg: float = 0.01, params: WeightParams | None = None,
                    cg_tol: float = 1e-6, cg_max_iters: int = 200) -> np.ndarray:
    """Non-blind deconvolution with a Gaussian-weight Laplacian prior.

    A pilot Wiener estimate fixes the edge weights once; the output then
    solves (K^T K + 2 lambda L) x = K^T b by conjugate gradients and is
    clamped to [0, 1].  An identity kernel short-circuits to the input:
    there is nothing to deconvolve.
    """
    img = as_image(b)
    if not lambda_reg > 0 or not pilot_reg > 0:
        raise InvalidParameter("regularization weights must be positive")
    if k.is_delta:
        return np.clip(img, 0.0, 1.0)
    spec = kernel_spectrum(k, img.shape)
    power = np.abs(spec) ** 2
    pilot = wiener_like_solve(np.conj(spec) * np.fft.fft2(img), power + 2.0 * pilot_reg)
    graph = build_weight_graph(np.clip(pilot, 0.0, 1.0), params or WeightParams())
    rhs = convolve_adjoint(img, k)
    two_lambda = 2.0 * lambda_reg

    def apply_A(x):
        data = np.fft.ifft2(np.fft.fft2(x) * power).real
        return data + two_lambda * laplacian_apply(graph, x)

    result = cg_solve(apply_A, rhs, tol=cg_tol, max_iters=cg_max_iters, x0=pilot)
    return np.clip(result.x, 0.0, 1.0)
