"""Shared oracles for the test suite.

These deliberately re-derive results by brute force (dense matrices,
direct summation) so the fast library paths are checked against
independent computations.
"""
import numpy as np
import pytest


def dense_from_action(apply_A, shape):
    """Materialize a linear operator by applying it to every basis vector."""
    n = int(np.prod(shape))
    A = np.zeros((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        A[:, j] = np.asarray(apply_A(e.reshape(shape))).ravel()
    return A


def brute_force_laplacian(img_shape, horizontal, vertical):
    """Dense lattice Laplacian assembled edge by edge with Python loops."""
    h, w = img_shape
    n = h * w
    L = np.zeros((n, n))

    def node(r, c):
        return r * w + c

    for r in range(h):
        for c in range(w - 1):
            i, j, wt = node(r, c), node(r, c + 1), horizontal[r, c]
            L[i, i] += wt
            L[j, j] += wt
            L[i, j] -= wt
            L[j, i] -= wt
    for r in range(h - 1):
        for c in range(w):
            i, j, wt = node(r, c), node(r + 1, c), vertical[r, c]
            L[i, i] += wt
            L[j, j] += wt
            L[i, j] -= wt
            L[j, i] -= wt
    return L


def brute_force_convolve(x, taps):
    """Periodic convolution as a direct wraparound sum."""
    h, w = x.shape
    side = taps.shape[0]
    c = side // 2
    out = np.zeros_like(x)
    for r in range(h):
        for col in range(w):
            acc = 0.0
            for i in range(side):
                for j in range(side):
                    acc += taps[i, j] * x[(r - (i - c)) % h, (col - (j - c)) % w]
            out[r, col] = acc
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(0)
