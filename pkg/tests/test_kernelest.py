import numpy as np
import pytest

from rgtv.errors import DegenerateInput, DegenerateKernel, InvalidParameter
from rgtv.fourier import BlurKernel, convolve, gaussian_kernel
from rgtv.kernelest import estimate_kernel, sanitize_kernel
from rgtv.metrics import kernel_ncc
from rgtv.synthetic import pws_phantom


class TestSanitizeKernel:
    def test_single_positive_survivor(self):
        raw = -np.ones((3, 3))
        raw[0, 2] = 0.4
        k = sanitize_kernel(raw)
        expected = np.zeros((3, 3))
        expected[0, 2] = 1.0
        assert np.array_equal(k.taps, expected)

    def test_pure_normalization(self):
        raw = np.full((3, 3), 2.0 / 9.0)
        k = sanitize_kernel(raw, tap_floor=0.0)
        assert k.taps == pytest.approx(np.full((3, 3), 1.0 / 9.0))

    def test_noise_floor_drops_small_taps(self):
        raw = np.zeros((3, 3))
        raw[1, 1] = 100.0
        raw[0, 0] = 1.0
        k = sanitize_kernel(raw)  # 1 < 5% of 100
        assert k.is_delta

    def test_all_non_positive_rejected(self):
        with pytest.raises(DegenerateKernel):
            sanitize_kernel(-np.ones((3, 3)))

    def test_shape_validation(self):
        with pytest.raises(InvalidParameter):
            sanitize_kernel(np.ones((2, 2)))

    def test_output_satisfies_invariants(self, rng):
        for _ in range(20):
            k = sanitize_kernel(rng.standard_normal((5, 5)))
            assert k.taps.min() >= 0.0
            assert k.taps.sum() == pytest.approx(1.0, abs=1e-12)


class TestEstimateKernel:
    def test_self_deconvolution_gives_delta(self):
        x = pws_phantom(96)
        k = estimate_kernel(x, x, 9)
        assert k.taps[4, 4] >= 0.9

    def test_recovers_known_kernel(self):
        x = pws_phantom(96)
        k_true = gaussian_kernel(5, 1.2)
        b = convolve(x, k_true)
        k = estimate_kernel(x, b, 5, mu=1e-4)
        assert kernel_ncc(k, k_true) >= 0.99

    def test_shift_consistency(self):
        x = pws_phantom(64)
        for dy, dx in ((0, 1), (2, -1), (-3, -3)):
            b = np.roll(x, (dy, dx), axis=(0, 1))
            k = estimate_kernel(x, b, 7)
            peak = np.unravel_index(np.argmax(k.taps), k.taps.shape)
            assert peak == (3 + dy, 3 + dx)
            assert k.taps[peak] >= 0.99

    def test_invariant_to_constant_offset(self):
        x = pws_phantom(48)
        b = convolve(x, gaussian_kernel(5, 1.0))
        base = estimate_kernel(x, b, 5)
        shifted = estimate_kernel(x + 0.1, b + 0.1, 5)
        assert np.abs(base.taps - shifted.taps).max() <= 1e-10

    def test_constant_reference_rejected(self):
        with pytest.raises(DegenerateInput):
            estimate_kernel(np.full((16, 16), 0.5), np.full((16, 16), 0.5), 3)

    def test_parameter_validation(self):
        x = pws_phantom(32)
        with pytest.raises(InvalidParameter):
            estimate_kernel(x, x, 4)  # even side
        with pytest.raises(InvalidParameter):
            estimate_kernel(x, x, 1)  # too small
        with pytest.raises(InvalidParameter):
            estimate_kernel(x, x, 5, mu=0.0)
        with pytest.raises(InvalidParameter):
            estimate_kernel(x, x[:16, :], 5)

    def test_output_satisfies_invariants(self, rng):
        x = pws_phantom(48)
        b = convolve(x, gaussian_kernel(7, 1.5)) + 0.01 * rng.standard_normal((48, 48))
        k = estimate_kernel(x, b, 7)
        assert k.side == 7
        assert k.taps.min() >= 0.0
        assert k.taps.sum() == pytest.approx(1.0, abs=1e-12)
