import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigfatigue import sigcore as sc
from sigfatigue.errors import InsufficientDataError, InvalidInputError, ShapeError

from conftest import assert_tensorseq_close
from oracle_utils import riemann_signature_levels


def random_path(rng, n=20, d=2):
    return rng.random((n, d))


class TestSegmentSignature:
    def test_unit_x_increment(self):
        sig = sc.segment_signature((1.0, 0.0), 2)
        np.testing.assert_array_equal(sig.level(1), [1.0, 0.0])
        np.testing.assert_array_equal(sig.level(2), [0.5, 0.0, 0.0, 0.0])

    def test_zero_increment_is_identity(self):
        sig = sc.segment_signature((0.0, 0.0), 3)
        assert sig.level0 == 1.0
        for k in (1, 2, 3):
            assert np.all(sig.level(k) == 0.0)

    def test_diagonal_increment(self):
        sig = sc.segment_signature((1.0, 1.0), 2)
        np.testing.assert_array_equal(sig.level(1), [1.0, 1.0])
        np.testing.assert_array_equal(sig.level(2), [0.5, 0.5, 0.5, 0.5])

    def test_level_k_is_scaled_tensor_power(self):
        delta = np.array([0.3, -0.7])
        sig = sc.segment_signature(delta, 3)
        expected2 = np.multiply.outer(delta, delta).ravel() / 2
        expected3 = np.multiply.outer(np.multiply.outer(delta, delta), delta).ravel() / 6
        np.testing.assert_allclose(sig.level(2), expected2, atol=1e-15)
        np.testing.assert_allclose(sig.level(3), expected3, atol=1e-15)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInputError):
            sc.segment_signature((np.nan, 0.0), 2)
        with pytest.raises(InvalidInputError):
            sc.segment_signature((np.inf, 1.0), 2)

    def test_rejects_bad_depth(self):
        with pytest.raises(InvalidInputError):
            sc.segment_signature((1.0, 0.0), 0)


class TestChenConcat:
    def test_identity_element(self):
        sig = sc.segment_signature((0.4, 0.2), 3)
        assert_tensorseq_close(sc.chen_concat(sig, sc.identity(2, 3)), sig)
        assert_tensorseq_close(sc.chen_concat(sc.identity(2, 3), sig), sig)

    def test_straight_line_split_at_midpoint(self):
        half = sc.segment_signature((0.5, 0.5), 3)
        whole = sc.segment_signature((1.0, 1.0), 3)
        assert_tensorseq_close(sc.chen_concat(half, half), whole)

    def test_hand_expanded_product(self):
        a = sc.segment_signature((1.0, 0.0), 2)
        b = sc.segment_signature((0.0, 1.0), 2)
        out = sc.chen_concat(a, b)
        np.testing.assert_array_equal(out.level(1), [1.0, 1.0])
        # lexicographic level 2: (1,1), (1,2), (2,1), (2,2)
        np.testing.assert_array_equal(out.level(2), [0.5, 1.0, 0.0, 0.5])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            sc.chen_concat(sc.identity(2, 2), sc.identity(2, 3))
        with pytest.raises(ShapeError):
            sc.chen_concat(sc.identity(2, 2), sc.identity(3, 2))


class TestPathSignature:
    def test_single_segment_matches_exponential(self):
        sig = sc.path_signature([(0.0, 0.0), (1.0, 1.0)], 3)
        assert_tensorseq_close(sig, sc.segment_signature((1.0, 1.0), 3))

    def test_l_path_levy_area(self):
        sig = sc.path_signature([(0, 0), (1, 0), (1, 1)], 2)
        levy = (sig.level(2)[1] - sig.level(2)[2]) / 2
        assert levy == 0.5

    def test_matches_riemann_oracle(self):
        rng = np.random.default_rng(7)
        pts = random_path(rng)
        sig = sc.path_signature(pts, 3)
        oracle = riemann_signature_levels(pts, 3, substeps=10_000)
        for k in (1, 2, 3):
            np.testing.assert_allclose(
                sig.level(k), oracle[k - 1], rtol=1e-6, atol=1e-9
            )

    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            sc.path_signature([(0.0, 0.0)], 2)

    def test_rejects_non_finite_vertices(self):
        with pytest.raises(InvalidInputError):
            sc.path_signature([(0.0, 0.0), (np.nan, 1.0)], 2)

    def test_chen_identity_random_splits(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            pts = random_path(rng, n=rng.integers(4, 30))
            cut = int(rng.integers(1, len(pts) - 1))
            whole = sc.path_signature(pts, 3)
            joined = sc.chen_concat(
                sc.path_signature(pts[: cut + 1], 3),
                sc.path_signature(pts[cut:], 3),
            )
            assert_tensorseq_close(joined, whole, atol=1e-12)

    def test_level1_is_total_displacement(self):
        rng = np.random.default_rng(3)
        pts = random_path(rng, n=17)
        sig = sc.path_signature(pts, 2)
        np.testing.assert_allclose(sig.level(1), pts[-1] - pts[0], atol=1e-14)

    def test_works_in_three_dimensions(self):
        rng = np.random.default_rng(5)
        pts = rng.random((10, 3))
        sig = sc.path_signature(pts, 2)
        assert sig.dim == 3
        assert sig.level(2).shape == (9,)
        np.testing.assert_allclose(sig.level(1), pts[-1] - pts[0], atol=1e-14)


class TestLogSignature:
    def test_log_of_one_segment_exponential(self):
        lsig = sc.log_signature(sc.segment_signature((2.0, 3.0), 3))
        np.testing.assert_allclose(lsig.level(1), [2.0, 3.0], atol=1e-12)
        assert np.abs(lsig.level(2)).max() < 1e-12
        assert np.abs(lsig.level(3)).max() < 1e-12
        assert lsig.level0 == 0.0

    def test_l_path_bch_to_depth_two(self):
        lsig = sc.log_signature(sc.path_signature([(0, 0), (1, 0), (1, 1)], 2))
        np.testing.assert_array_equal(lsig.level(1), [1.0, 1.0])
        np.testing.assert_array_equal(lsig.level(2), [0.0, 0.5, -0.5, 0.0])

    def test_exp_log_roundtrip(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            sig = sc.path_signature(random_path(rng, n=12), 3)
            back = sc.tensor_exp(sc.log_signature(sig))
            assert_tensorseq_close(back, sig, atol=1e-12)

    def test_level2_antisymmetry(self):
        rng = np.random.default_rng(29)
        for _ in range(20):
            lsig = sc.log_signature(sc.path_signature(random_path(rng), 3))
            lvl2 = lsig.level(2).reshape(2, 2)
            np.testing.assert_allclose(lvl2, -lvl2.T, atol=1e-12)

    def test_requires_group_like(self):
        lie = sc.log_signature(sc.segment_signature((1.0, 2.0), 2))
        with pytest.raises(InvalidInputError):
            sc.log_signature(lie)

    def test_exp_requires_lie(self):
        with pytest.raises(InvalidInputError):
            sc.tensor_exp(sc.segment_signature((1.0, 0.0), 2))


class TestFlattenAndDistance:
    @pytest.mark.parametrize("depth,expected", [(1, 2), (2, 6), (3, 14)])
    def test_flat_length(self, depth, expected):
        assert sc.flat_length(2, depth) == expected
        sig = sc.segment_signature((0.2, 0.9), depth)
        assert sc.flatten(sig).shape == (expected,)

    def test_flatten_order(self):
        sig = sc.segment_signature((1.0, 0.0), 2)
        np.testing.assert_array_equal(sc.flatten(sig), [1, 0, 0.5, 0, 0, 0])

    def test_distance_to_self_is_zero(self):
        sig = sc.path_signature([(0, 0), (0.3, 0.8), (1, 0.1)], 3)
        assert sc.sig_distance(sig, sig) == 0.0

    def test_level1_distance(self):
        a = sc.segment_signature((1.0, 0.0), 1)
        b = sc.segment_signature((0.0, 1.0), 1)
        assert sc.sig_distance(a, b) == pytest.approx(math.sqrt(2), rel=1e-15)

    def test_rising_vs_falling_box_paths(self):
        rising = sc.path_signature([(0, 0), (0.5, 1), (1, 0.2)], 3)
        falling = sc.path_signature([(0, 1), (0.5, 0), (1, 0.8)], 3)
        assert sc.sig_distance(rising, falling) > 0.0

    def test_distance_shape_mismatch(self):
        with pytest.raises(ShapeError):
            sc.sig_distance(sc.identity(2, 2), sc.identity(2, 3))


@settings(max_examples=40, deadline=None, derandomize=True)
@given(
    st.lists(
        st.tuples(
            st.floats(0, 1, allow_nan=False, width=32),
            st.floats(0, 1, allow_nan=False, width=32),
        ),
        min_size=3,
        max_size=15,
    ),
    st.integers(min_value=1, max_value=20),
)
def test_chen_identity_property(points, cut_seed):
    pts = np.array(points, dtype=float)
    cut = 1 + cut_seed % (len(pts) - 2)
    whole = sc.path_signature(pts, 3)
    joined = sc.chen_concat(
        sc.path_signature(pts[: cut + 1], 3), sc.path_signature(pts[cut:], 3)
    )
    np.testing.assert_allclose(
        sc.flatten(joined), sc.flatten(whole), rtol=0, atol=1e-12
    )


@settings(max_examples=40, deadline=None, derandomize=True)
@given(
    st.lists(
        st.tuples(
            st.floats(0, 1, allow_nan=False, width=32),
            st.floats(0, 1, allow_nan=False, width=32),
        ),
        min_size=2,
        max_size=12,
    )
)
def test_exp_log_roundtrip_property(points):
    sig = sc.path_signature(np.array(points, dtype=float), 3)
    back = sc.tensor_exp(sc.log_signature(sig))
    np.testing.assert_allclose(sc.flatten(back), sc.flatten(sig), rtol=0, atol=1e-12)


def test_noise_perturbation_distance_grows_with_variance():
    rng = np.random.default_rng(15)
    base = np.column_stack([np.linspace(0, 1, 30), 0.5 + 0.2 * np.sin(np.linspace(0, 6, 30))])
    ref = sc.path_signature(base, 3)
    mean_sq = []
    for sigma in (0.01, 0.05, 0.1):
        acc = 0.0
        for _ in range(100):
            noisy = base.copy()
            noisy[:, 1] += rng.normal(0, sigma, 30)
            acc += sc.sig_distance(sc.path_signature(noisy, 3), ref) ** 2
        mean_sq.append(acc / 100)
    assert mean_sq[0] <= mean_sq[1] <= mean_sq[2]


def test_tensorseq_validation():
    with pytest.raises(ShapeError):
        sc.TensorSeq(dim=2, depth=2, level0=1.0, levels=(np.zeros(2),))
    with pytest.raises(ShapeError):
        sc.TensorSeq(dim=2, depth=1, level0=1.0, levels=(np.zeros(3),))
    with pytest.raises(InvalidInputError):
        sc.TensorSeq(dim=2, depth=1, level0=1.0, levels=(np.array([np.nan, 0.0]),))


def test_tensorseq_levels_are_immutable():
    sig = sc.segment_signature((1.0, 0.5), 2)
    with pytest.raises(ValueError):
        sig.level(1)[0] = 99.0
