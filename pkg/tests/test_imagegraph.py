import math

import numpy as np
import pytest

from rgtv.errors import DimensionMismatch, InvalidParameter, TooLarge
from rgtv.imagegraph import (
    KIND_GAMMA,
    KIND_GAUSSIAN,
    KIND_UNWEIGHTED,
    WeightParams,
    build_gamma_graph,
    build_weight_graph,
    edge_weight,
    gamma_weight,
    laplacian_apply,
    laplacian_dense,
    unweighted_graph,
)

from conftest import brute_force_laplacian


class TestEdgeWeight:
    def test_zero_difference_gives_one(self):
        assert edge_weight(0.0, 0.1) == 1.0

    def test_direct_evaluations(self):
        assert edge_weight(0.1, 0.1) == pytest.approx(math.exp(-1.0), rel=1e-12)
        assert edge_weight(0.3, 0.1) == pytest.approx(math.exp(-9.0), rel=1e-12)

    def test_invalid_sigma(self):
        with pytest.raises(InvalidParameter):
            edge_weight(0.1, 0.0)
        with pytest.raises(InvalidParameter):
            edge_weight(0.1, -1.0)

    def test_negative_difference_rejected(self):
        with pytest.raises(InvalidParameter):
            edge_weight(-0.1, 0.1)

    def test_monotone_non_increasing(self):
        d = np.linspace(0.0, 1.0, 500)
        w = edge_weight(d, 0.1)
        assert np.all(np.diff(w) <= 0)
        assert w[0] == 1.0 and np.all(w > 0)


class TestGammaWeight:
    def test_small_difference_hits_epsilon_bound(self):
        assert gamma_weight(0.5, 0.5, 1.0, 0.01) == pytest.approx(100.0)

    def test_plain_ratio(self):
        assert gamma_weight(0.0, 0.2, 0.5, 0.01) == pytest.approx(2.5)

    def test_zero_weight_stays_zero(self):
        assert gamma_weight(0.0, 0.9, 0.0, 0.01) == 0.0

    def test_bound_holds_for_random_inputs(self, rng):
        xi = rng.random(200)
        xj = rng.random(200)
        w = rng.random(200)
        g = gamma_weight(xi, xj, w, 0.01)
        assert np.all(g <= 100.0 + 1e-12)
        assert np.all(g >= 0)


class TestWeightParams:
    def test_defaults(self):
        p = WeightParams()
        assert p.sigma == 0.1 and p.epsilon == 0.01

    @pytest.mark.parametrize("kwargs", [{"sigma": 0.0}, {"sigma": -1.0},
                                        {"epsilon": 0.0}, {"epsilon": -0.5}])
    def test_validation(self, kwargs):
        with pytest.raises(InvalidParameter):
            WeightParams(**kwargs)


class TestBuildWeightGraph:
    def test_constant_image_all_ones(self):
        g = build_weight_graph(np.full((3, 4), 0.7))
        assert g.kind == KIND_GAUSSIAN
        assert np.all(g.horizontal_weights == 1.0)
        assert np.all(g.vertical_weights == 1.0)

    def test_single_edge(self):
        g = build_weight_graph(np.array([[0.0, 0.1]]))
        assert g.horizontal_weights.shape == (1, 1)
        assert g.horizontal_weights[0, 0] == pytest.approx(math.exp(-1.0))
        assert g.vertical_weights.shape == (0, 2)

    def test_path_of_three(self):
        g = build_weight_graph(np.array([[0.0, 0.0, 1.0]]))
        expected = [1.0, math.exp(-100.0)]
        assert g.horizontal_weights[0].tolist() == pytest.approx(expected)

    def test_rejects_empty_and_non_finite(self):
        with pytest.raises(InvalidParameter):
            build_weight_graph(np.zeros((0, 3)))
        with pytest.raises(InvalidParameter):
            build_weight_graph(np.array([[0.0, np.nan]]))


class TestBuildGammaGraph:
    def test_constant_image_hits_upper_bound(self):
        g = build_gamma_graph(np.full((2, 3), 0.4))
        assert g.kind == KIND_GAMMA
        assert np.all(g.horizontal_weights == 100.0)
        assert np.all(g.vertical_weights == 100.0)

    def test_single_edge_value(self):
        g = build_gamma_graph(np.array([[0.0, 0.5]]))
        assert g.horizontal_weights[0, 0] == pytest.approx(math.exp(-25.0) / 0.5)

    def test_unweighted_graph_all_ones(self):
        g = unweighted_graph(3, 2)
        assert g.kind == KIND_UNWEIGHTED
        assert np.all(g.horizontal_weights == 1.0)
        assert np.all(g.vertical_weights == 1.0)

    def test_weights_bounded_by_inverse_epsilon(self, rng):
        for _ in range(20):
            img = rng.random((5, 5))
            g = build_gamma_graph(img)
            assert g.horizontal_weights.max() <= 100.0 + 1e-9
            assert g.vertical_weights.max() <= 100.0 + 1e-9


class TestLaplacianApply:
    def test_annihilates_constants(self, rng):
        for _ in range(5):
            img = rng.random((4, 5))
            g = build_weight_graph(img)
            out = laplacian_apply(g, np.full((4, 5), 0.3))
            assert np.abs(out).max() <= 1e-12

    def test_two_node_graph_by_hand(self):
        g = build_weight_graph(np.array([[0.0, 0.1]]))
        w = g.horizontal_weights[0, 0]
        a, b = 0.3, 0.9
        out = laplacian_apply(g, np.array([[a, b]]))
        assert out[0, 0] == pytest.approx(w * (a - b))
        assert out[0, 1] == pytest.approx(w * (b - a))

    def test_matches_dense_on_random_graphs(self, rng):
        for _ in range(10):
            img = rng.random((3, 3))
            g = build_gamma_graph(img)
            x = rng.random((3, 3))
            dense = laplacian_dense(g) @ x.ravel()
            fast = laplacian_apply(g, x).ravel()
            assert np.abs(dense - fast).max() <= 1e-12 * max(1.0, np.abs(dense).max())

    def test_dimension_mismatch(self):
        g = unweighted_graph(2, 2)
        with pytest.raises(DimensionMismatch):
            laplacian_apply(g, np.zeros((3, 3)))

    def test_quadratic_form_nonnegative(self, rng):
        img = rng.random((5, 5))
        g = build_weight_graph(img)
        for _ in range(1000):
            x = rng.standard_normal((5, 5))
            assert float(np.sum(x * laplacian_apply(g, x))) >= -1e-10


class TestLaplacianDense:
    def test_two_node_by_hand(self):
        # difference sigma*sqrt(ln 2) makes the edge weight exactly 0.5
        g = build_weight_graph(np.array([[0.0, 0.1 * math.sqrt(math.log(2))]]),
                               WeightParams(sigma=0.1))
        L = laplacian_dense(g)
        assert L == pytest.approx(np.array([[0.5, -0.5], [-0.5, 0.5]]))

    def test_unweighted_path_of_three(self):
        L = laplacian_dense(unweighted_graph(1, 3))
        expected = np.array([[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])
        assert np.array_equal(L, expected)

    def test_matches_brute_force_assembly(self, rng):
        img = rng.random((4, 4))
        g = build_gamma_graph(img)
        oracle = brute_force_laplacian((4, 4), g.horizontal_weights,
                                       g.vertical_weights)
        assert np.abs(laplacian_dense(g) - oracle).max() <= 1e-14

    def test_row_sums_zero_and_symmetry(self, rng):
        g = build_weight_graph(rng.random((5, 6)))
        L = laplacian_dense(g)
        assert np.abs(L.sum(axis=1)).max() <= 1e-12
        assert np.array_equal(L, L.T)

    def test_cap(self):
        g = unweighted_graph(70, 70)
        with pytest.raises(TooLarge):
            laplacian_dense(g)
        assert laplacian_dense(g, cap=4900).shape == (4900, 4900)


def test_graph_weights_are_immutable():
    g = unweighted_graph(2, 2)
    with pytest.raises(ValueError):
        g.horizontal_weights[0, 0] = 5.0
