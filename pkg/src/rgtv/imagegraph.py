"""Images as signals on weighted 4-neighbor pixel lattices.

Every pixel is a node; each pixel connects to its horizontal and vertical
neighbors, and every undirected edge stores exactly one weight.  Boundary
pixels simply have fewer incident edges (no wraparound).  Intensities are
expected in [0, 1]; the default bandwidth and stabilization constants are
calibrated to that range.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidParameter, TooLarge

KIND_GAUSSIAN = "gaussian-w"
KIND_GAMMA = "l1-gamma"
KIND_UNWEIGHTED = "unweighted"

# Dense Laplacians are an analysis/test path only; keep them small.
DENSE_NODE_CAP = 4096


def as_image(a) -> np.ndarray:
    """Coerce input to a validated 2-D float64 array."""
    img = np.asarray(a, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise InvalidParameter("image must be a nonempty 2-D array")
    if not np.all(np.isfinite(img)):
        raise InvalidParameter("image contains non-finite samples")
    return img


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class WeightParams:
    """Gaussian edge-weight bandwidth and the l1 stabilization floor."""

    sigma: float = 0.1
    epsilon: float = 0.01

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidParameter(f"sigma must be positive, got {self.sigma}")
        if not self.epsilon > 0:
            raise InvalidParameter(f"epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class LatticeGraph:
    """Weighted 4-neighbor lattice over an image grid.

    ``horizontal_weights[r, c]`` is the weight of the edge between pixels
    (r, c) and (r, c+1); ``vertical_weights[r, c]`` connects (r, c) and
    (r+1, c).  Symmetry is implicit: one stored value per undirected edge.
    ``kind`` tags how the weights were produced (gaussian-w, l1-gamma or
    unweighted).
    """

    width: int
    height: int
    horizontal_weights: np.ndarray
    vertical_weights: np.ndarray
    kind: str

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InvalidParameter("graph must cover at least one pixel")
        if self.kind not in (KIND_GAUSSIAN, KIND_GAMMA, KIND_UNWEIGHTED):
            raise InvalidParameter(f"unknown graph kind {self.kind!r}")
        hw = np.asarray(self.horizontal_weights, dtype=np.float64)
        vw = np.asarray(self.vertical_weights, dtype=np.float64)
        if hw.shape != (self.height, max(self.width - 1, 0)):
            raise DimensionMismatch("horizontal weight grid has wrong shape")
        if vw.shape != (max(self.height - 1, 0), self.width):
            raise DimensionMismatch("vertical weight grid has wrong shape")
        if (hw.size and hw.min() < 0) or (vw.size and vw.min() < 0):
            raise InvalidParameter("edge weights must be non-negative")
        object.__setattr__(self, "horizontal_weights", _readonly(hw))
        object.__setattr__(self, "vertical_weights", _readonly(vw))

    @property
    def node_count(self) -> int:
        return self.width * self.height

    def degrees(self) -> np.ndarray:
        """Structural degree (incident edge count) per pixel."""
        deg = np.zeros((self.height, self.width))
        if self.width > 1:
            deg[:, :-1] += 1
            deg[:, 1:] += 1
        if self.height > 1:
            deg[:-1, :] += 1
            deg[1:, :] += 1
        return deg


def edge_weight(d, sigma: float):
    """Gaussian similarity weight exp(-d^2 / sigma^2) for a difference d.

    Accepts scalars or arrays; monotone non-increasing in d with range
    (0, 1].
    """
    if not sigma > 0:
        raise InvalidParameter(f"sigma must be positive, got {sigma}")
    d = np.asarray(d, dtype=np.float64)
    if d.size and d.min() < 0:
        raise InvalidParameter("difference d must be non-negative")
    out = np.exp(-(d * d) / (sigma * sigma))
    return out if out.ndim else float(out)


def gamma_weight(x_i, x_j, w_ij, epsilon: float):
    """l1 edge weight w / max(|x_j - x_i|, epsilon), bounded by 1/epsilon."""
    if not epsilon > 0:
        raise InvalidParameter(f"epsilon must be positive, got {epsilon}")
    d = np.abs(np.asarray(x_j, dtype=np.float64) - np.asarray(x_i, dtype=np.float64))
    out = np.asarray(w_ij, dtype=np.float64) / np.maximum(d, epsilon)
    return out if out.ndim else float(out)


def _edge_differences(img: np.ndarray):
    dh = np.abs(img[:, 1:] - img[:, :-1])
    dv = np.abs(img[1:, :] - img[:-1, :])
    return dh, dv


def build_weight_graph(img, params: WeightParams = WeightParams()) -> LatticeGraph:
    """4-neighbor lattice with Gaussian similarity weights from the image."""
    x = as_image(img)
    dh, dv = _edge_differences(x)
    h, w = x.shape
    return LatticeGraph(w, h, edge_weight(dh, params.sigma),
                        edge_weight(dv, params.sigma), KIND_GAUSSIAN)


def build_gamma_graph(img, params: WeightParams = WeightParams()) -> LatticeGraph:
    """4-neighbor lattice with l1 weights w / max(|x_j - x_i|, epsilon)."""
    x = as_image(img)
    dh, dv = _edge_differences(x)
    gh = edge_weight(dh, params.sigma) / np.maximum(dh, params.epsilon)
    gv = edge_weight(dv, params.sigma) / np.maximum(dv, params.epsilon)
    h, w = x.shape
    return LatticeGraph(w, h, gh, gv, KIND_GAMMA)


def unweighted_graph(height: int, width: int) -> LatticeGraph:
    """4-neighbor lattice with every edge weight equal to 1."""
    hw = np.ones((height, max(width - 1, 0)))
    vw = np.ones((max(height - 1, 0), width))
    return LatticeGraph(width, height, hw, vw, KIND_UNWEIGHTED)


def laplacian_apply(g: LatticeGraph, x) -> np.ndarray:
    """Apply the combinatorial Laplacian of ``g`` to an image, edge-locally.

    Computes (diag(W 1) - W) x without materializing the N x N matrix.
    """
    img = as_image(x)
    if img.shape != (g.height, g.width):
        raise DimensionMismatch(
            f"signal shape {img.shape} does not match graph "
            f"{(g.height, g.width)}")
    out = np.zeros_like(img)
    if g.width > 1:
        d = img[:, :-1] - img[:, 1:]
        flow = g.horizontal_weights * d
        out[:, :-1] += flow
        out[:, 1:] -= flow
    if g.height > 1:
        d = img[:-1, :] - img[1:, :]
        flow = g.vertical_weights * d
        out[:-1, :] += flow
        out[1:, :] -= flow
    return out


def laplacian_dense(g: LatticeGraph, cap: int = DENSE_NODE_CAP) -> np.ndarray:
    """Materialize the Laplacian as a dense N x N matrix (small graphs only)."""
    n = g.node_count
    if n > cap:
        raise TooLarge(f"{n} nodes exceeds the dense cap of {cap}")
    idx = np.arange(n).reshape(g.height, g.width)
    L = np.zeros((n, n))

    def add_edges(i, j, w):
        i, j, w = i.ravel(), j.ravel(), w.ravel()
        L[i, j] -= w
        L[j, i] -= w
        np.add.at(L, (i, i), w)
        np.add.at(L, (j, j), w)

    if g.width > 1:
        add_edges(idx[:, :-1], idx[:, 1:], g.horizontal_weights)
    if g.height > 1:
        add_edges(idx[:-1, :], idx[1:, :], g.vertical_weights)
    return L
