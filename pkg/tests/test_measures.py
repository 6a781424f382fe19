import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from generators import random_channel, singleton_free_channel, singleton_free_pair
from irmir import (
    Channel,
    ChannelHistogram,
    DegenerateSize,
    DimensionMismatch,
    IndexOutOfRange,
    bound_condition_holds,
    build_histogram,
    build_joint_histogram,
    entropy,
    information_ratio,
    ir_joint_upper_bound,
    joint_entropy,
    level_information_ratio,
    lir,
    lmir,
    match,
    measure,
    mutual_information,
    mutual_information_ratio,
)
from irmir.errors import InvalidChannel


def ch(values, w, h, depth=8):
    return Channel.from_values(values, w, h, depth=depth)


A = ch([0, 0, 1, 1], 2, 2)
B = ch([0, 1, 0, 1], 2, 2)
CONST = ch([7] * 16, 4, 4)
UNIFORM4 = ch([0, 1, 2, 3] * 4, 4, 4, depth=2)


@st.composite
def channels(draw, max_side=12, depth=st.sampled_from([1, 2, 4, 8])):
    d = draw(depth)
    w = draw(st.integers(1, max_side))
    h = draw(st.integers(1, max_side))
    data = draw(arrays(np.int64, (h, w), elements=st.integers(0, 2**d - 1)))
    return Channel(data, depth=d)


@st.composite
def channel_pairs(draw, max_side=10):
    d = draw(st.sampled_from([1, 2, 3, 8]))
    w = draw(st.integers(1, max_side))
    h = draw(st.integers(1, max_side))
    elems = st.integers(0, 2**d - 1)
    a = draw(arrays(np.int64, (h, w), elements=elems))
    b = draw(arrays(np.int64, (h, w), elements=elems))
    return Channel(a, depth=d), Channel(b, depth=d)


class TestChannel:
    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidChannel):
            ch([0, 4], 2, 1, depth=2)

    def test_rejects_bad_depth(self):
        with pytest.raises(InvalidChannel):
            Channel(np.zeros((2, 2), dtype=int), depth=17)

    def test_dimensions(self):
        c = ch(range(6), 3, 2)
        assert (c.width, c.height, c.nm, c.levels) == (3, 2, 6, 256)

    def test_immutable(self):
        with pytest.raises(ValueError):
            A.intensities[0, 0] = 5


class TestHistograms:
    def test_direct_count(self):
        hist = build_histogram(ch([0, 0, 1, 2], 2, 2))
        assert hist.nm == 4 and hist.levels == 256
        assert list(hist.counts[:3]) == [2, 1, 1]
        assert hist.counts[3:].sum() == 0

    def test_constant(self):
        hist = build_histogram(CONST)
        assert hist.counts[7] == 16 and hist.counts.sum() == 16

    def test_mass_conservation(self):
        rng = np.random.default_rng(1)
        c = Channel(rng.integers(0, 256, size=(32, 32)))
        assert build_histogram(c).counts.sum() == 1024

    def test_joint_diagonal(self):
        j = build_joint_histogram(A, A)
        assert j.counts[0, 0] == 2 and j.counts[1, 1] == 2 and j.counts.sum() == 4

    def test_joint_product(self):
        j = build_joint_histogram(A, B)
        assert [j.counts[0, 0], j.counts[0, 1], j.counts[1, 0], j.counts[1, 1]] == [1, 1, 1, 1]

    def test_joint_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            build_joint_histogram(A, ch(range(6), 2, 3))

    def test_joint_levels_mismatch(self):
        with pytest.raises(DimensionMismatch):
            build_joint_histogram(A, ch([0, 0, 1, 1], 2, 2, depth=2))

    @given(channel_pairs())
    def test_joint_marginals(self, pair):
        a, b = pair
        j = build_joint_histogram(a, b)
        assert j.counts.sum() == a.nm
        np.testing.assert_array_equal(j.counts.sum(axis=1), build_histogram(a).counts)
        np.testing.assert_array_equal(j.counts.sum(axis=0), build_histogram(b).counts)


class TestEntropy:
    def test_constant(self):
        assert entropy(build_histogram(CONST)) == 0.0

    def test_uniform(self):
        assert entropy(build_histogram(UNIFORM4)) == pytest.approx(math.log(4), rel=1e-12)
        assert math.log(4) == pytest.approx(1.386294, abs=1e-6)

    def test_fair_binary(self):
        hist = ChannelHistogram.from_counts([500, 500])
        assert entropy(hist) == pytest.approx(math.log(2), rel=1e-12)

    def test_joint(self):
        assert joint_entropy(build_joint_histogram(A, A)) == pytest.approx(math.log(2))
        assert joint_entropy(build_joint_histogram(A, B)) == pytest.approx(math.log(4))
        assert joint_entropy(build_joint_histogram(CONST, CONST)) == 0.0

    def test_mutual_information(self):
        assert mutual_information(build_joint_histogram(A, A)) == pytest.approx(math.log(2))
        assert mutual_information(build_joint_histogram(A, B)) == 0.0
        assert mutual_information(build_joint_histogram(CONST, CONST)) == 0.0

    @given(channel_pairs())
    def test_against_oracle(self, pair):
        a, b = pair
        av, bv = a.intensities.ravel().tolist(), b.intensities.ravel().tolist()
        j = build_joint_histogram(a, b)
        assert entropy(build_histogram(a)) == pytest.approx(oracles.entropy_of(av), rel=1e-9, abs=1e-12)
        assert joint_entropy(j) == pytest.approx(oracles.joint_entropy_of(av, bv), rel=1e-9, abs=1e-12)
        assert mutual_information(j) == pytest.approx(max(0.0, oracles.mi_of(av, bv)), abs=1e-9)

    @given(channel_pairs())
    def test_mi_sanity(self, pair):
        a, b = pair
        j = build_joint_histogram(a, b)
        h1, h2 = entropy(build_histogram(a)), entropy(build_histogram(b))
        mi = mutual_information(j)
        assert 0.0 <= mi <= min(h1, h2) + 1e-9
        assert joint_entropy(j) <= h1 + h2 + 1e-9
        assert joint_entropy(j) >= max(h1, h2) - 1e-9


class TestInformationRatio:
    def test_level_ratio(self):
        hist = build_histogram(A)
        assert level_information_ratio(hist, 0) == pytest.approx(1.0, rel=1e-15)
        assert level_information_ratio(build_histogram(ch([0, 0, 1, 2], 2, 2)), 1) == 0.0
        assert level_information_ratio(build_histogram(CONST), 7) == 0.0

    def test_level_ratio_index(self):
        with pytest.raises(IndexOutOfRange):
            level_information_ratio(build_histogram(A), 256)
        with pytest.raises(IndexOutOfRange):
            level_information_ratio(build_histogram(A), -1)

    def test_values(self):
        assert information_ratio(build_histogram(A)) == pytest.approx(4.0, rel=1e-12)
        assert oracles.ir_per_pixel([0, 0, 1, 1]) == pytest.approx(4.0, rel=1e-12)
        assert information_ratio(build_histogram(ch([0, 1, 2, 3], 2, 2))) == 0.0
        assert information_ratio(build_histogram(CONST)) == 0.0

    def test_uniform_closed_form(self):
        ir = information_ratio(build_histogram(UNIFORM4))
        assert oracles.uniform_ir_closed_form(16, 2) == pytest.approx(16.0, rel=1e-12)
        assert ir == 16.0

    def test_lir_values(self):
        assert lir(build_histogram(A)) == pytest.approx(2.0, rel=1e-12)
        assert lir(build_histogram(A)) == pytest.approx(oracles.lir_of([0, 0, 1, 1]), rel=1e-12)
        assert lir(build_histogram(CONST)) == 0.0
        assert lir(build_histogram(UNIFORM4)) == pytest.approx(8.0, rel=1e-12)

    def test_lir_degenerate(self):
        with pytest.raises(DegenerateSize):
            lir(build_histogram(ch([3], 1, 1)))

    def test_singleton_counterexample(self):
        # singleton bins contribute nothing to IR but do count towards LIR
        hist = build_histogram(ch([0, 0, 1, 2], 2, 2))
        assert information_ratio(hist) == pytest.approx(2.0)
        assert lir(hist) == pytest.approx(4 * oracles.entropy_of([0, 0, 1, 2]) / math.log(4))
        assert lir(hist) > information_ratio(hist)

    @given(channels())
    def test_per_pixel_oracle(self, c):
        expect = oracles.ir_per_pixel(c.intensities.ravel().tolist())
        assert information_ratio(build_histogram(c)) == pytest.approx(expect, rel=1e-9, abs=1e-12)

    @settings(max_examples=50)
    @given(channels())
    def test_base_invariance(self, c):
        vals = c.intensities.ravel().tolist()
        hist = build_histogram(c)
        assert information_ratio(hist) == pytest.approx(oracles.ir_per_pixel(vals, 2), rel=1e-12, abs=1e-12)
        if c.nm >= 2:
            assert lir(hist) == pytest.approx(oracles.lir_of(vals, 2), rel=1e-12, abs=1e-12)

    def test_lir_below_ir_without_singletons(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            hist = build_histogram(singleton_free_channel(rng))
            assert information_ratio(hist) >= lir(hist) - 1e-9 >= -1e-9


class TestMutualInformationRatio:
    def test_values(self):
        assert mutual_information_ratio(build_joint_histogram(A, A)) == pytest.approx(4.0, rel=1e-12)
        assert oracles.mir_per_pixel([0, 0, 1, 1], [0, 0, 1, 1]) == pytest.approx(4.0, rel=1e-12)
        assert mutual_information_ratio(build_joint_histogram(CONST, CONST)) == 0.0
        assert mutual_information_ratio(build_joint_histogram(A, B)) == 0.0

    def test_lmir(self):
        assert lmir(build_joint_histogram(A, A)) == pytest.approx(2.0, rel=1e-12)
        assert lmir(build_joint_histogram(A, B)) == 0.0
        assert lmir(build_joint_histogram(CONST, CONST)) == 0.0
        with pytest.raises(DegenerateSize):
            lmir(build_joint_histogram(ch([1], 1, 1), ch([1], 1, 1)))

    @given(channels())
    def test_self_match_identity(self, c):
        assert mutual_information_ratio(build_joint_histogram(c, c)) == information_ratio(build_histogram(c))

    @given(channel_pairs())
    def test_per_pixel_oracle(self, pair):
        a, b = pair
        av, bv = a.intensities.ravel().tolist(), b.intensities.ravel().tolist()
        got = mutual_information_ratio(build_joint_histogram(a, b))
        assert got == pytest.approx(oracles.mir_per_pixel(av, bv), rel=1e-9, abs=1e-9)

    @settings(max_examples=50)
    @given(channel_pairs())
    def test_base_invariance(self, pair):
        a, b = pair
        av, bv = a.intensities.ravel().tolist(), b.intensities.ravel().tolist()
        j = build_joint_histogram(a, b)
        assert mutual_information_ratio(j) == pytest.approx(oracles.mir_per_pixel(av, bv, 2), rel=1e-12, abs=1e-12)
        if a.nm >= 2:
            want = a.nm * max(0.0, oracles.mi_of(av, bv, 2)) / math.log2(a.nm)
            assert lmir(j) == pytest.approx(want, rel=1e-12, abs=1e-9)


class TestJointUpperBound:
    def test_equality_on_diagonal(self):
        j = build_joint_histogram(A, A)
        assert ir_joint_upper_bound(j, "first") == pytest.approx(4.0, rel=1e-12)
        assert ir_joint_upper_bound(j, "second") == pytest.approx(4.0, rel=1e-12)
        assert ir_joint_upper_bound(build_joint_histogram(CONST, CONST)) == 0.0

    def test_bad_selector(self):
        with pytest.raises(ValueError):
            ir_joint_upper_bound(build_joint_histogram(A, A), "third")

    @given(channel_pairs())
    def test_oracle(self, pair):
        a, b = pair
        av, bv = a.intensities.ravel().tolist(), b.intensities.ravel().tolist()
        j = build_joint_histogram(a, b)
        for which in ("first", "second"):
            assert ir_joint_upper_bound(j, which) == pytest.approx(
                oracles.joint_bound_per_pixel(av, bv, which), rel=1e-9, abs=1e-12)

    def test_bounds_ir_without_singleton_cells(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            a, b = singleton_free_pair(rng)
            j = build_joint_histogram(a, b)
            assert ir_joint_upper_bound(j, "first") >= oracles.ir_per_pixel(a.intensities.ravel().tolist()) - 1e-9
            assert ir_joint_upper_bound(j, "second") >= oracles.ir_per_pixel(b.intensities.ravel().tolist()) - 1e-9


class TestBoundCondition:
    @pytest.mark.parametrize("depth,n,m,expected", [
        (8, 256, 256, True),
        (8, 16, 16, False),
        (2, 4, 4, True),
        (2, 3, 5, False),
        (1, 2, 2, True),
    ])
    def test_cases(self, depth, n, m, expected):
        assert bound_condition_holds(depth, n, m) is expected

    def test_matches_log_form_off_boundary(self):
        for depth in range(1, 17):
            for nm in (2, 3, 10, 100, 1000, 4095, 65535, 65537, 10**6, 10**9):
                if abs(depth - math.log(nm) / (2 * math.log(2))) > 1e-9:
                    assert bound_condition_holds(depth, nm, 1) == (depth <= math.log(nm) / (2 * math.log(2)))

    def test_degenerate(self):
        with pytest.raises(DegenerateSize):
            bound_condition_holds(8, 1, 1)


def test_reports():
    rep = measure(A)
    assert (rep.ir, rep.nm, rep.levels, rep.d) == (pytest.approx(4.0), 4, 256, 1)
    assert rep.lir == pytest.approx(2.0) and rep.entropy == pytest.approx(math.log(2))
    m = match(A, A, d=1)
    assert m.mir == pytest.approx(4.0) and m.lmir == pytest.approx(2.0)
    assert m.mutual_information == pytest.approx(math.log(2))


def test_random_channels_satisfy_invariants():
    rng = np.random.default_rng(3)
    for _ in range(50):
        c = random_channel(rng)
        hist = build_histogram(c)
        assert information_ratio(hist) >= 0 and entropy(hist) >= 0


class TestLowerBoundGaps:
    """Inputs where the LIR/LMIR lower bounds do not hold."""

    def test_lmir_above_mir_with_singleton_cells(self):
        a, b = [1, 2, 1, 0], [2, 2, 2, 0]
        j = build_joint_histogram(ch(a, 4, 1), ch(b, 4, 1))
        assert mutual_information_ratio(j) == pytest.approx(oracles.mir_per_pixel(a, b), rel=1e-12)
        assert mutual_information_ratio(j) == pytest.approx(2 * math.log(4 / 3) / math.log(2), rel=1e-12)
        assert lmir(j) > mutual_information_ratio(j)

    def test_negative_mir_without_singleton_cells(self):
        # negative pointwise MI divided by a small ln(h) outweighs the positive cells
        a = [2, 2, 2, 2, 1, 1, 1, 1, 1, 1]
        b = [2, 2, 0, 0, 2, 2, 2, 2, 0, 0]
        j = build_joint_histogram(ch(a, 10, 1), ch(b, 10, 1))
        assert j.counts[j.counts > 0].min() >= 2
        mir = mutual_information_ratio(j)
        assert mir == pytest.approx(oracles.mir_per_pixel(a, b), rel=1e-12)
        assert mir < 0 < lmir(j)
