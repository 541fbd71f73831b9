import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import thresholdwindow as tw
from thresholdwindow import rng as trng
from thresholdwindow.errors import NoFlipError
from thresholdwindow.families import (AndFunction, MajorityFunction,
                                      OrFunction, TribesFunction)

from conftest import SEED_MATRIX, brute_force_flip_time


class TestLabels:
    def test_single_label_in_range(self):
        la = tw.assign_uniform_labels(1, 99)
        assert 0.0 <= la.labels[0] <= 1.0

    def test_determinism(self):
        a = tw.assign_uniform_labels(10_000, 5)
        b = tw.assign_uniform_labels(10_000, 5)
        assert np.array_equal(a.labels, b.labels)

    def test_large_sample_mean(self):
        la = tw.assign_uniform_labels(100_000, 7)
        assert abs(la.labels.mean() - 0.5) < 0.01

    def test_zero_size_rejected(self):
        with pytest.raises(ValueError):
            tw.assign_uniform_labels(0, 1)

    def test_stream_matches_sampler_seeding(self):
        # sample k of a batch is exactly assign_uniform_labels with the
        # derived stream seed
        base, k, n = 31337, 17, 256
        direct = trng.stream(base, k).random(n)
        via_seed = tw.assign_uniform_labels(n, trng.stream_seed(base, k))
        assert np.array_equal(direct, via_seed.labels)


class TestConfigurationAt:
    def test_endpoints(self):
        la = tw.assign_uniform_labels(50, 3)
        assert not tw.configuration_at(la, 0.0).bits.any()
        assert tw.configuration_at(la, 1.0).bits.all()

    def test_direct_comparison(self):
        la = tw.LabelAssignment(2, np.array([0.2, 0.7]), 0)
        assert tw.configuration_at(la, 0.5).bits.tolist() == [True, False]

    def test_domain_error(self):
        la = tw.assign_uniform_labels(4, 1)
        with pytest.raises(ValueError):
            tw.configuration_at(la, 1.5)

    @settings(max_examples=50, deadline=None)
    @given(p1=st.floats(0, 1), p2=st.floats(0, 1), seed=st.integers(0, 2**32))
    def test_monotone_in_p(self, p1, p2, seed):
        if p1 > p2:
            p1, p2 = p2, p1
        la = tw.assign_uniform_labels(64, seed)
        low = tw.configuration_at(la, p1).bits
        high = tw.configuration_at(la, p2).bits
        assert not np.any(low & ~high)


class TestFlipTime:
    def test_or_and_dictator(self):
        la = tw.assign_uniform_labels(32, 11)
        assert tw.flip_time(OrFunction(32), la).value == la.labels.min()
        assert tw.flip_time(AndFunction(32), la).value == la.labels.max()
        dictator = tw.make_family(tw.FamilySpec("dictator", n=32))
        assert tw.flip_time(dictator, la).value == la.labels[0]

    def test_size_mismatch(self):
        la = tw.assign_uniform_labels(8, 1)
        with pytest.raises(ValueError):
            tw.flip_time(OrFunction(9), la)

    def test_pivotal_bit_carries_its_label(self):
        for seed in SEED_MATRIX:
            f = MajorityFunction(17)
            la = tw.assign_uniform_labels(17, seed)
            ft = tw.flip_time(f, la)
            assert ft.value == la.labels[ft.pivotal_bit]

    @pytest.mark.parametrize("make", [
        lambda: OrFunction(16),
        lambda: AndFunction(16),
        lambda: MajorityFunction(15),
        lambda: TribesFunction(16),
        lambda: tw.make_family(tw.FamilySpec("iterated-majority", m=3, height=2)),
    ])
    def test_matches_brute_force_oracle(self, make):
        f = make()
        assert f.n <= 20
        for k in range(100):
            la = tw.assign_uniform_labels(f.n, trng.stream_seed(2024, k))
            assert tw.flip_time(f, la).value == brute_force_flip_time(f, la.labels)

    def test_monotone_coupling_consistency(self):
        eps = 1e-12
        for seed in SEED_MATRIX:
            f = MajorityFunction(51)
            la = tw.assign_uniform_labels(51, seed)
            t = tw.flip_time(f, la).value
            assert f(tw.configuration_at(la, t - eps)) == 0
            assert f(tw.configuration_at(la, t)) == 1
            assert f(tw.configuration_at(la, min(1.0, t + eps))) == 1

    def test_constant_zero_raises(self):
        class Never(tw.MonotoneFunction):
            def evaluate(self, bits):
                return 0

        la = tw.assign_uniform_labels(6, 2)
        with pytest.raises(NoFlipError):
            tw.flip_time(Never(6), la)

    def test_constant_one_flips_at_zero(self):
        class Always(tw.MonotoneFunction):
            def evaluate(self, bits):
                return 1

        la = tw.assign_uniform_labels(6, 2)
        ft = tw.flip_time(Always(6), la)
        assert ft.value == 0.0 and ft.pivotal_bit is None

    def test_binary_search_path_equals_incremental(self):
        # strip incremental support and compare the O(log n) fallback
        for seed in SEED_MATRIX:
            f = MajorityFunction(33)
            la = tw.assign_uniform_labels(33, seed)

            class Opaque(tw.MonotoneFunction):
                def evaluate(self, bits):
                    return f.evaluate(bits)

            assert tw.flip_time(Opaque(33), la).value == tw.flip_time(f, la).value


class TestWitnessOracle:
    def test_singletons_give_min(self):
        la = tw.assign_uniform_labels(12, 4)
        ft = tw.flip_time_via_witnesses([[i] for i in range(12)], la)
        assert ft.value == la.labels.min()

    def test_full_set_gives_max(self):
        la = tw.assign_uniform_labels(12, 4)
        ft = tw.flip_time_via_witnesses([list(range(12))], la)
        assert ft.value == la.labels.max()

    def test_empty_list_raises(self):
        la = tw.assign_uniform_labels(3, 1)
        with pytest.raises(NoFlipError):
            tw.flip_time_via_witnesses([], la)

    def test_out_of_range_index(self):
        la = tw.assign_uniform_labels(3, 1)
        with pytest.raises(ValueError):
            tw.flip_time_via_witnesses([[5]], la)

    def test_tribes_witness_equivalence(self):
        f = TribesFunction(256)
        witnesses = f.one_witnesses()
        for k in range(100):
            la = tw.assign_uniform_labels(256, trng.stream_seed(77, k))
            assert (tw.flip_time_via_witnesses(witnesses, la).value
                    == tw.flip_time(f, la).value)


def exhaustive_configs(n):
    for code in range(1 << n):
        yield np.array([(code >> i) & 1 for i in range(n)], dtype=bool)


class TestReverse:
    def test_reverse_or_is_and(self):
        rev = tw.reverse(OrFunction(4))
        ref = AndFunction(4)
        for bits in exhaustive_configs(4):
            assert rev.evaluate(bits) == ref.evaluate(bits)

    def test_reverse_dictator_is_dictator(self):
        d = tw.make_family(tw.FamilySpec("dictator", n=5))
        rev = tw.reverse(d)
        for bits in exhaustive_configs(5):
            assert rev.evaluate(bits) == d.evaluate(bits)

    def test_reverse_majority_odd_selfdual(self):
        f = MajorityFunction(5)
        rev = tw.reverse(f)
        for bits in exhaustive_configs(5):
            assert rev.evaluate(bits) == f.evaluate(bits)

    def test_double_reverse_exhaustive(self):
        for f in (MajorityFunction(12), TribesFunction(12), OrFunction(12)):
            back = tw.reverse(tw.reverse(f))
            for bits in exhaustive_configs(12):
                assert back.evaluate(bits) == f.evaluate(bits)

    def test_reversed_flip_identity(self):
        # T(reversed f)(labels) = 1 - T(f)(1 - labels), exactly
        f = TribesFunction(64)
        rev = tw.reverse(f)
        for seed in SEED_MATRIX:
            la = tw.assign_uniform_labels(64, seed)
            flipped = tw.LabelAssignment(64, 1.0 - la.labels, seed)
            assert tw.flip_time(rev, la).value == pytest.approx(
                1.0 - tw.flip_time(f, flipped).value, abs=0)

    def test_reverse_distributional_duality(self):
        # KS between sampled T(reversed f) and 1 - T(f) within the DKW band
        f = MajorityFunction(37)
        num = 4000
        fwd = tw.sample_flip_times(f, num, base_seed=101)
        bwd = tw.sample_flip_times(tw.reverse(f), num, base_seed=202)
        a = np.sort(1.0 - fwd.values)
        b = np.sort(bwd.values)
        grid = np.concatenate([a, b])
        fa = np.searchsorted(a, grid, side="right") / num
        fb = np.searchsorted(b, grid, side="right") / num
        assert np.max(np.abs(fa - fb)) < 2.0 * tw.dkw_bound(num, 0.99)


def test_dictator_flip_times_uniform():
    sample = tw.sample_flip_times(tw.FamilySpec("dictator", n=4), 100_000,
                                  base_seed=4242)
    ks = tw.ks_distance(tw.EmpiricalCdf(sample.values), lambda x: np.clip(x, 0, 1))
    assert ks < tw.dkw_bound(100_000, 0.99)
