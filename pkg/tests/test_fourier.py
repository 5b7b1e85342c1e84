import numpy as np
import pytest

from rgtv.errors import InvalidParameter, SingularSystem
from rgtv.fourier import (
    BlurKernel,
    convolve,
    convolve_adjoint,
    edge_taper,
    gaussian_kernel,
    gradients,
    kernel_spectrum,
    wiener_like_solve,
)
from rgtv.synthetic import pws_phantom

from conftest import brute_force_convolve


def random_kernel(rng, side=3):
    taps = rng.random((side, side))
    return BlurKernel(taps / taps.sum())


class TestBlurKernel:
    def test_validation(self):
        with pytest.raises(InvalidParameter):
            BlurKernel(np.ones((2, 2)) / 4.0)  # even side
        with pytest.raises(InvalidParameter):
            BlurKernel(np.array([[0.5, 0.6, -0.1]]).reshape(1, 3))  # not square
        bad = np.zeros((3, 3))
        bad[1, 1] = 2.0
        with pytest.raises(InvalidParameter):
            BlurKernel(bad)  # sum != 1
        bad = np.full((3, 3), 1.0 / 9.0)
        bad[0, 0] = -1.0 / 9.0
        bad[2, 2] = 3.0 / 9.0
        with pytest.raises(InvalidParameter):
            BlurKernel(bad)  # negative tap

    def test_delta(self):
        k = BlurKernel.delta(5)
        assert k.is_delta
        assert k.taps[2, 2] == 1.0 and k.taps.sum() == 1.0
        assert not gaussian_kernel(5, 1.0).is_delta

    def test_taps_immutable(self):
        k = BlurKernel.delta(3)
        with pytest.raises(ValueError):
            k.taps[0, 0] = 1.0

    def test_gaussian_kernel_properties(self):
        k = gaussian_kernel(9, 1.5)
        assert k.taps.sum() == pytest.approx(1.0)
        assert np.array_equal(k.taps, k.taps.T)
        assert np.array_equal(k.taps, k.taps[::-1, ::-1])
        assert k.taps[4, 4] == k.taps.max()


class TestConvolve:
    def test_delta_is_identity(self, rng):
        x = rng.random((6, 7))
        assert convolve(x, BlurKernel.delta(3)) == pytest.approx(x, abs=1e-12)

    def test_constant_preserved(self, rng):
        x = np.full((5, 5), 0.37)
        k = random_kernel(rng)
        assert convolve(x, k) == pytest.approx(x, abs=1e-12)

    def test_matches_brute_force(self, rng):
        for _ in range(5):
            x = rng.random((8, 8))
            k = random_kernel(rng, 3)
            oracle = brute_force_convolve(x, k.taps)
            assert np.abs(convolve(x, k) - oracle).max() <= 1e-10

    def test_linearity(self, rng):
        x = rng.random((8, 8))
        y = rng.random((8, 8))
        k = random_kernel(rng)
        lhs = convolve(2.0 * x - 3.0 * y, k)
        rhs = 2.0 * convolve(x, k) - 3.0 * convolve(y, k)
        assert np.abs(lhs - rhs).max() <= 1e-10

    def test_mean_preserved(self, rng):
        x = rng.random((9, 9))
        k = random_kernel(rng, 5)
        assert convolve(x, k).mean() == pytest.approx(x.mean(), abs=1e-10)

    def test_kernel_larger_than_image(self):
        with pytest.raises(InvalidParameter):
            convolve(np.zeros((3, 3)), gaussian_kernel(5, 1.0))


class TestConvolveAdjoint:
    def test_symmetric_kernel_self_adjoint(self, rng):
        x = rng.random((6, 6))
        k = gaussian_kernel(5, 1.0)
        assert np.abs(convolve(x, k) - convolve_adjoint(x, k)).max() <= 1e-12

    def test_adjoint_identity(self, rng):
        for _ in range(5):
            x = rng.random((7, 7))
            y = rng.random((7, 7))
            k = random_kernel(rng)
            lhs = float(np.sum(convolve(x, k) * y))
            rhs = float(np.sum(x * convolve_adjoint(y, k)))
            bound = 1e-10 * np.linalg.norm(x) * np.linalg.norm(y)
            assert abs(lhs - rhs) <= bound

    def test_delta_is_identity(self, rng):
        y = rng.random((5, 5))
        assert convolve_adjoint(y, BlurKernel.delta(3)) == pytest.approx(y, abs=1e-12)


class TestGradients:
    def test_constant_zero(self):
        gx, gy = gradients(np.full((4, 4), 0.8))
        assert np.all(gx == 0.0) and np.all(gy == 0.0)

    def test_periodic_row_by_hand(self):
        gx, gy = gradients(np.array([[0.0, 1.0, 2.0]]))
        assert gx.tolist() == [[1.0, 1.0, -2.0]]
        assert np.all(gy == 0.0)

    def test_summation_by_parts(self, rng):
        # gradient energy equals the quadratic form of the periodic
        # unweighted Laplacian: 4x - sum of 4 circular neighbors
        x = rng.random((6, 8))
        gx, gy = gradients(x)
        energy = float(np.sum(gx * gx) + np.sum(gy * gy))
        lap = (4.0 * x - np.roll(x, 1, 0) - np.roll(x, -1, 0)
               - np.roll(x, 1, 1) - np.roll(x, -1, 1))
        assert energy == pytest.approx(float(np.sum(x * lap)), rel=1e-10)


class TestWienerLikeSolve:
    def test_unit_denominator(self, rng):
        x = rng.random((6, 6))
        out = wiener_like_solve(np.fft.fft2(x), np.ones((6, 6)))
        assert out == pytest.approx(x, abs=1e-10)

    def test_deconvolves_noiseless_blur(self):
        x = pws_phantom(64)
        k = gaussian_kernel(3, 0.8)
        spec = kernel_spectrum(k, x.shape)
        b = convolve(x, k)
        rec = wiener_like_solve(np.conj(spec) * np.fft.fft2(b),
                                np.abs(spec) ** 2 + 1e-8)
        rmse = float(np.sqrt(np.mean((rec - x) ** 2)))
        assert rmse <= 1e-4

    def test_regularizer_shrinks_output(self, rng):
        x = rng.random((8, 8))
        k = gaussian_kernel(3, 1.0)
        spec = kernel_spectrum(k, x.shape)
        num = np.conj(spec) * np.fft.fft2(x)
        power = np.abs(spec) ** 2
        norms = [np.linalg.norm(wiener_like_solve(num, power + mu))
                 for mu in (1e-6, 1e-3, 1e-1)]
        assert norms[0] > norms[1] > norms[2]

    def test_zero_denominator_rejected(self):
        num = np.zeros((4, 4), dtype=complex)
        den = np.ones((4, 4))
        den[2, 2] = 0.0
        with pytest.raises(SingularSystem):
            wiener_like_solve(num, den)


class TestEdgeTaper:
    def test_interior_unchanged(self):
        x = pws_phantom(48)
        k = gaussian_kernel(5, 1.0)
        out = edge_taper(x, k)
        assert out[10:-10, 10:-10] == pytest.approx(x[10:-10, 10:-10], abs=1e-12)
        assert np.all(np.isfinite(out))

    def test_borders_blend_toward_blur(self):
        x = np.zeros((32, 32))
        x[:, 16:] = 1.0
        x = np.roll(x, 8, axis=1)  # put the jump across the wrap boundary
        k = gaussian_kernel(7, 1.5)
        out = edge_taper(x, k)
        blurred = convolve(x, k)
        # first column moves strictly toward the periodically blurred image
        assert np.abs(out[:, 0] - blurred[:, 0]).max() \
            < np.abs(x[:, 0] - blurred[:, 0]).max()
