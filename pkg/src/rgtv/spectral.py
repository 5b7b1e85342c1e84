"""Spectral analysis of lattice Laplacians and graph-frequency filters.

Dense eigendecompositions are an analysis path for small instances; the
solvers used at image scale stay matrix-free.  One-dimensional signals
are supported for the desk-scale experiments: a length-N signal gets a
chain graph where every node connects to its two nearest neighbors on
each side (four neighbors total), and the resulting Laplacians are dense.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    InvalidParameter,
    SolverFailure,
    TooLarge,
)
from .imagegraph import (
    KIND_GAMMA,
    DENSE_NODE_CAP,
    LatticeGraph,
    WeightParams,
    build_gamma_graph,
    edge_weight,
    laplacian_apply,
    laplacian_dense,
)

# Below this node count the MAP filter just uses the dense spectral form.
SPECTRAL_NODE_LIMIT = 1024

LINE_GRAPH_REACH = 2


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Laplacian."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class LanczosBasis:
    """Orthonormal Krylov basis with its tridiagonal restriction.

    ``basis`` holds the Lanczos vectors as columns (flattened signals);
    ``alpha``/``beta`` are the tridiagonal diagonal and off-diagonal.
    ``order`` may be smaller than requested if an invariant subspace was
    found early.
    """

    order: int
    basis: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    input_norm: float
    signal_shape: tuple

    def tridiagonal(self) -> np.ndarray:
        H = np.diag(self.alpha)
        if self.beta.size:
            H += np.diag(self.beta, 1) + np.diag(self.beta, -1)
        return H


def eigendecompose(L, cap: int = DENSE_NODE_CAP) -> SpectralDecomposition:
    """Full eigendecomposition of a dense symmetric Laplacian."""
    A = np.asarray(L, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidParameter("expected a square matrix")
    if A.shape[0] > cap:
        raise TooLarge(f"{A.shape[0]} nodes exceeds the dense cap of {cap}")
    scale = max(1.0, np.max(np.abs(A)))
    if np.max(np.abs(A - A.T)) > 1e-10 * scale:
        raise InvalidParameter("matrix is not symmetric")
    lam, U = np.linalg.eigh(0.5 * (A + A.T))
    return SpectralDecomposition(lam, U)


def relative_eigenvalues(dec: SpectralDecomposition) -> np.ndarray:
    """Eigenvalues normalized by the first nonzero (AC) frequency."""
    lam = dec.eigenvalues
    if lam.size < 2:
        raise DegenerateSpectrum("need at least two eigenvalues")
    lam2 = lam[1]
    if lam2 <= 1e-9 * max(1.0, abs(lam[-1])):
        raise DegenerateSpectrum("graph appears disconnected (second eigenvalue ~ 0)")
    return lam / lam2


def spectral_filter(dec: SpectralDecomposition, y: np.ndarray, response) -> np.ndarray:
    """Apply a scalar spectral response through a dense decomposition."""
    coeffs = dec.eigenvectors.T @ y.ravel()
    out = dec.eigenvectors @ (np.asarray(response(dec.eigenvalues)) * coeffs)
    return out.reshape(y.shape)


def map_filter(y, g: LatticeGraph, mu: float, method: str = "auto",
               tol: float = 1e-9, max_iters: int = 1000) -> np.ndarray:
    """Solve (I + mu L) x = y on the lattice.

    ``method`` picks the route: "spectral" densely diagonalizes the
    Laplacian (small graphs), "cg" runs conjugate gradients on the
    edge-local operator, "auto" chooses by size.  The two routes agree to
    solver tolerance.
    """
    from .skeleton import cg_solve  # local import to avoid a module cycle

    img = np.asarray(y, dtype=np.float64)
    if img.shape != (g.height, g.width):
        raise DimensionMismatch(
            f"signal shape {img.shape} does not match graph {(g.height, g.width)}")
    if mu < 0:
        raise InvalidParameter("mu must be non-negative")
    if mu == 0:
        return img.copy()
    if method == "auto":
        method = "spectral" if g.node_count <= SPECTRAL_NODE_LIMIT else "cg"
    if method == "spectral":
        dec = eigendecompose(laplacian_dense(g, cap=max(DENSE_NODE_CAP, g.node_count)))
        return spectral_filter(dec, img, lambda lam: 1.0 / (1.0 + mu * lam))
    if method != "cg":
        raise InvalidParameter(f"unknown method {method!r}")
    result = cg_solve(lambda v: v + mu * laplacian_apply(g, v), img,
                      tol=tol, max_iters=max_iters, x0=img)
    if not result.converged:
        raise SolverFailure(
            f"map filter did not converge: relative residual {result.residual:.3e}")
    return result.x


def line_adjacency(signal, sigma: float, reach: int = LINE_GRAPH_REACH) -> np.ndarray:
    """Dense Gaussian-weight adjacency of a 1-D chain with 2-hop edges."""
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise InvalidParameter("signal must be 1-D with at least two samples")
    n = x.size
    W = np.zeros((n, n))
    for off in range(1, reach + 1):
        if off >= n:
            break
        w = edge_weight(np.abs(x[off:] - x[:-off]), sigma)
        i = np.arange(n - off)
        W[i, i + off] = w
        W[i + off, i] = w
    return W


def line_gamma_adjacency(signal, params: WeightParams = WeightParams(),
                         reach: int = LINE_GRAPH_REACH) -> np.ndarray:
    """Dense l1 adjacency of the same chain: w / max(|x_j - x_i|, epsilon)."""
    x = np.asarray(signal, dtype=np.float64)
    W = line_adjacency(x, params.sigma, reach)
    d = np.abs(x[:, None] - x[None, :])
    return W / np.maximum(d, params.epsilon)


def dense_laplacian(W) -> np.ndarray:
    """Combinatorial Laplacian diag(W 1) - W of a dense adjacency matrix."""
    W = np.asarray(W, dtype=np.float64)
    return np.diag(W.sum(axis=1)) - W


def iterative_rgtv_filter(y, params: WeightParams = WeightParams(),
                          mu: float = 1.0, max_iters: int = 20,
                          tol: float = 1e-4, keep_iterates: bool = False):
    """Low-pass filter y through the l1 Laplacian rebuilt from each iterate.

    Starting from x = y, repeatedly solves (I + mu L(x)) x_next = y where
    L(x) is the l1 Laplacian of the current iterate, until the relative
    change drops below ``tol`` or ``max_iters`` is hit.  2-D inputs use
    the 4-neighbor lattice; 1-D inputs use the 2-hop chain graph.

    Returns the final iterate, or ``(final, iterates)`` when
    ``keep_iterates`` is set (iterates include the initial signal).
    """
    sig = np.asarray(y, dtype=np.float64)
    if sig.ndim not in (1, 2):
        raise InvalidParameter("expected a 1-D signal or 2-D image")
    if mu < 0:
        raise InvalidParameter("mu must be non-negative")
    x = sig.copy()
    iterates = [x.copy()]
    for _ in range(max_iters):
        if sig.ndim == 2:
            g = build_gamma_graph(x, params)
            x_new = map_filter(sig, g, mu)
        else:
            L = dense_laplacian(line_gamma_adjacency(x, params))
            dec = eigendecompose(L)
            x_new = spectral_filter(dec, sig, lambda lam: 1.0 / (1.0 + mu * lam))
        denom = max(float(np.linalg.norm(x)), 1e-30)
        rel = float(np.linalg.norm(x_new - x)) / denom
        x = x_new
        iterates.append(x.copy())
        if rel < tol:
            break
    if keep_iterates:
        return x, iterates
    return x


def lanczos_basis(apply_L: Callable, b, order: int) -> LanczosBasis:
    """Symmetric Lanczos recurrence with full reorthogonalization.

    ``apply_L`` maps a signal (same shape as ``b``) through the operator.
    Terminates early when an off-diagonal underflows, i.e. the Krylov
    subspace became invariant.
    """
    sig = np.asarray(b, dtype=np.float64)
    norm_b = float(np.linalg.norm(sig))
    if norm_b == 0.0:
        raise InvalidParameter("starting signal must be nonzero")
    n = sig.size
    if not 1 <= order <= n:
        raise InvalidParameter(f"order must be in [1, {n}], got {order}")
    shape = sig.shape

    def op(v):
        return np.asarray(apply_L(v.reshape(shape)), dtype=np.float64).ravel()

    V = np.zeros((n, order))
    alphas = np.zeros(order)
    betas = np.zeros(max(order - 1, 0))

    q = sig.ravel() / norm_b
    V[:, 0] = q
    r = op(q)
    alphas[0] = q @ r
    r = r - alphas[0] * q
    r -= V[:, :1] @ (V[:, :1].T @ r)
    k = 1
    scale = max(1.0, abs(alphas[0]))
    for k in range(1, order):
        beta = float(np.linalg.norm(r))
        if beta <= 1e-12 * scale:
            k -= 1
            break
        q = r / beta
        V[:, k] = q
        r = op(q) - beta * V[:, k - 1]
        alphas[k] = q @ r
        r = r - alphas[k] * q
        # Full reorthogonalization: cheap at these orders, removes drift.
        r -= V[:, :k + 1] @ (V[:, :k + 1].T @ r)
        betas[k - 1] = beta
        scale = max(scale, abs(alphas[k]), beta)
    z = k + 1
    return LanczosBasis(order=z, basis=V[:, :z], alpha=alphas[:z].copy(),
                        beta=betas[:max(z - 1, 0)].copy(), input_norm=norm_b,
                        signal_shape=shape)


def lanczos_filter(apply_L: Callable, b, response, order: int) -> np.ndarray:
    """Approximate f(L) b as ||b|| V f(H) e1 from an order-Z Lanczos basis.

    ``response`` must accept an ndarray of eigenvalues.  With Z equal to
    the signal length this reproduces the exact spectral filter.
    """
    basis = lanczos_basis(apply_L, b, order)
    theta, Q = np.linalg.eigh(basis.tridiagonal())
    f_theta = np.asarray(response(theta), dtype=np.float64)
    if not np.all(np.isfinite(f_theta)):
        raise InvalidParameter("spectral response is not finite on the spectrum")
    weights = Q @ (f_theta * Q[0, :])
    out = basis.input_norm * (basis.basis @ weights)
    return out.reshape(basis.signal_shape)


@dataclass(frozen=True)
class PowerExtremes:
    lambda_max: float
    lambda_min: float
    converged: bool


def power_method_extremes(apply_A: Callable, n: int, iters: int = 500,
                          tol: float = 1e-8, seed: int = 0) -> PowerExtremes:
    """Extreme eigenvalues of a symmetric PSD operator by power iteration.

    The maximum comes from plain power iteration; the minimum from power
    iteration on (lambda_max I - A).  Non-convergence within ``iters``
    returns the current estimates with ``converged=False``.
    """
    rng = np.random.default_rng(seed)

    def dominant(op):
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(iters):
            w = np.asarray(op(v), dtype=np.float64)
            nw = float(np.linalg.norm(w))
            if nw == 0.0:
                return 0.0, True  # operator annihilates the iterate
            lam = float(v @ w)
            residual = float(np.linalg.norm(w - lam * v))
            v = w / nw
            if residual <= tol * max(1.0, abs(lam)):
                return lam, True
        return lam, False

    lam_max, ok_max = dominant(apply_A)
    shift = lam_max

    def shifted(v):
        return shift * v - np.asarray(apply_A(v), dtype=np.float64)

    rho, ok_min = dominant(shifted)
    return PowerExtremes(lam_max, lam_max - rho, ok_max and ok_min)


def gershgorin_bound(g: LatticeGraph, epsilon: float) -> float:
    """Spectral upper bound 2 * max degree / epsilon for an l1 lattice."""
    if g.kind != KIND_GAMMA:
        raise InvalidParameter("bound applies to l1-gamma graphs")
    if not epsilon > 0:
        raise InvalidParameter("epsilon must be positive")
    return 2.0 * float(g.degrees().max()) / epsilon
