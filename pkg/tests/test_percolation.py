import numpy as np
import pytest

import thresholdwindow as tw
from thresholdwindow import rng as trng
from thresholdwindow.coupling import MonotoneFunction
from thresholdwindow.percolation import (NearCriticalParams, build_lattice,
                                         crossing_flip_time, dual_mask,
                                         dynamical_no_crossing_prob,
                                         estimate_pivotal_count, has_crossing,
                                         near_critical_crossing_curve,
                                         near_critical_crossing_prob,
                                         pivotal_count, tail_exponent_fit,
                                         window_width)

from conftest import SEED_MATRIX


class TestLattice:
    def test_small_grid(self):
        grid = build_lattice(2)
        assert grid.num_sites == 4
        assert sorted(grid.neighbors(0)) == [1, 2]        # corner (0,0)
        assert sorted(grid.neighbors(1)) == [0, 2, 3]     # corner (0,1)

    def test_too_small(self):
        with pytest.raises(ValueError):
            build_lattice(1)

    def test_neighbor_symmetry(self):
        grid = build_lattice(10)
        for s in range(grid.num_sites):
            for t in grid.neighbors(s):
                assert s in grid.neighbors(t)

    def test_boundary_sizes(self):
        grid = build_lattice(7)
        assert len(grid.left_column) == 7
        assert len(grid.right_column) == 7
        assert not set(grid.left_column) & set(grid.right_column)

    def test_interior_degree(self):
        grid = build_lattice(5)
        assert len(grid.neighbors(2 * 5 + 2)) == 6


class TestCrossing:
    def test_all_open_all_closed(self):
        grid = build_lattice(6)
        assert has_crossing(grid, np.ones(36, dtype=bool))
        assert not has_crossing(grid, np.zeros(36, dtype=bool))

    def test_single_row_and_column(self):
        n = 6
        grid = build_lattice(n)
        row = np.zeros((n, n), dtype=bool)
        row[2, :] = True
        assert has_crossing(grid, row.reshape(-1))
        col = np.zeros((n, n), dtype=bool)
        col[:, 2] = True
        assert not has_crossing(grid, col.reshape(-1))

    def test_predicate_input(self):
        grid = build_lattice(4)
        assert has_crossing(grid, lambda s: True)


class TestFlipTime:
    def test_two_by_two_manual(self):
        grid = build_lattice(2)
        # top row (sites 0, 1) has the two smallest labels: the crossing
        # completes when the second of them opens
        labels = np.array([0.1, 0.2, 0.8, 0.9])
        res = crossing_flip_time(grid, labels)
        assert res.value == 0.2
        assert res.pivotal_bit == 1

    def test_oracle_equivalence_binary_search(self):
        # against the generic no-incremental flip_time fallback (binary
        # search over sorted labels with full crossing evaluations)
        grid = build_lattice(8)

        class Crossing(MonotoneFunction):
            def evaluate(self, bits):
                return int(has_crossing(grid, bits))

        f = Crossing(64)
        for k in range(100):
            la = tw.assign_uniform_labels(64, trng.stream_seed(2525, k))
            assert crossing_flip_time(grid, la.labels).value == \
                tw.flip_time(f, la).value

    def test_median_near_half(self):
        grid = build_lattice(32)
        vals = np.array([crossing_flip_time(
            grid, trng.stream(31, k).random(grid.num_sites)).value
            for k in range(2000)])
        assert abs(np.median(vals) - 0.5) < 0.03

    def test_instrumentation_counters(self):
        grid = build_lattice(16)
        for seed in SEED_MATRIX:
            labels = trng.generator(seed).random(grid.num_sites)
            res = crossing_flip_time(grid, labels)
            assert res.insertions == grid.num_sites
            assert res.unions <= 6 * grid.num_sites

    def test_coupling_monotone_in_p(self):
        grid = build_lattice(12)
        labels = trng.generator(8).random(grid.num_sites)
        indicators = [has_crossing(grid, labels <= p)
                      for p in np.linspace(0, 1, 41)]
        assert all(b >= a for a, b in zip(indicators, indicators[1:]))

    def test_ensemble_identity_exact(self):
        # T <= 1/2 + lam r  iff  the lam-ensemble configuration crosses
        grid = build_lattice(10)
        r = 0.05
        for seed in SEED_MATRIX:
            labels = trng.generator(seed).random(grid.num_sites)
            t = crossing_flip_time(grid, labels).value
            for lam in (-3.0, -1.0, -0.2, 0.0, 0.2, 1.0, 3.0):
                assert (t <= 0.5 + lam * r) == \
                    has_crossing(grid, labels <= 0.5 + lam * r)


class TestPivotal:
    def test_exact_enumeration_two_by_two(self):
        grid = build_lattice(2)
        # exact expectation at p=1/2 over all 16 configurations
        total = 0.0
        for code in range(16):
            mask = np.array([(code >> i) & 1 for i in range(4)], dtype=bool)
            total += pivotal_count(grid, mask, method="brute")
        exact = total / 16.0
        est = estimate_pivotal_count(2, 4000, seed=606)
        assert abs(est.mean - exact) <= 3 * est.stderr

    def test_fast_equals_brute(self):
        for n in (8, 16):
            grid = build_lattice(n)
            for k in range(50):
                mask = trng.stream(717, k).random(n * n) <= 0.5
                assert pivotal_count(grid, mask, "fast") == \
                    pivotal_count(grid, mask, "brute")

    def test_loglog_slope_window(self):
        means = []
        for n in (16, 32, 64):
            means.append(estimate_pivotal_count(n, 400, seed=818).mean)
        slope = np.polyfit(np.log([16, 32, 64]), np.log(means), 1)[0]
        assert 0.5 <= slope <= 1.1

    def test_brute_cap(self):
        with pytest.raises(ValueError):
            estimate_pivotal_count(256, 10, seed=1, method="brute")

    def test_dual_mask_involution(self):
        mask = (trng.generator(5).random(36) <= 0.5).astype(np.uint8)
        twice = dual_mask(dual_mask(mask, 6).reshape(-1), 6).reshape(-1)
        assert np.array_equal(twice, mask)


class TestNearCritical:
    def test_params_validation(self):
        with pytest.raises(ValueError):
            NearCriticalParams(lam=1.0, r_choice="nope")
        with pytest.raises(ValueError):
            near_critical_crossing_prob(16, 1e9, "theoretical", 10, seed=1)

    def test_window_width_choices(self):
        assert window_width(16, "theoretical") == pytest.approx(16 ** -0.75)
        emp = window_width(16, "empirical")
        assert emp == window_width(16, "empirical")      # cached determinism
        assert 0.0 < emp < 1.0

    def test_center_probability(self):
        point = near_critical_crossing_prob(16, 0.0, "theoretical", 2000,
                                            seed=909)
        assert abs(point.estimate - 0.5) <= 3 * max(point.stderr, 1e-3)

    def test_monotone_in_lambda_exact(self):
        lams = np.arange(-1.5, 1.75, 0.25)
        points, _ = near_critical_crossing_curve(16, lams, "theoretical",
                                                 500, seed=303)
        ests = [p.estimate for p in points]
        assert all(b >= a for a, b in zip(ests, ests[1:]))

    def test_paired_estimator_duality_exact(self):
        lams = np.array([-1.2, -0.5, 0.5, 1.2])
        points, _ = near_critical_crossing_curve(24, lams, "theoretical",
                                                 400, seed=404,
                                                 estimator="paired")
        by_lam = {p.lam: p.estimate for p in points}
        assert by_lam[-0.5] + by_lam[0.5] == 1.0
        assert by_lam[-1.2] + by_lam[1.2] == 1.0


class TestTailFit:
    def test_synthetic_four_thirds(self):
        lams = np.linspace(0.5, 2.0, 7)
        fit = tail_exponent_fit(lams, np.exp(-lams ** (4 / 3)))
        assert fit.slope == pytest.approx(4 / 3, abs=1e-6)
        assert fit.warning is None

    def test_synthetic_exponential(self):
        lams = np.linspace(1.0, 3.0, 6)
        fit = tail_exponent_fit(lams, np.exp(-lams))
        assert fit.slope == pytest.approx(1.0, abs=1e-6)

    def test_zero_exclusion_warning(self):
        lams = np.linspace(0.5, 2.0, 8)
        vals = np.exp(-lams ** 1.5)
        vals[-1] = 0.0
        fit = tail_exponent_fit(lams, vals)
        assert fit.warning is not None
        # the zeroed point is excluded with the warning; the first three fall
        # outside the usable band fhat < 0.4
        expected = np.count_nonzero((vals > 0) & (vals < 0.4))
        assert len(fit.lams_used) == expected == 4

    def test_insufficient_points(self):
        with pytest.raises(ValueError):
            tail_exponent_fit([1.0, 2.0], [0.1, 0.05])


class TestDynamical:
    def test_time_zero_is_self_dual(self):
        points, _ = dynamical_no_crossing_prob(32, [0.0], "theoretical", 2000,
                                               seed=111)
        est = points[0].estimate
        assert abs(est - 0.5) <= 3 * max(points[0].stderr, 1e-3)

    def test_nonincreasing_in_t(self):
        points, _ = dynamical_no_crossing_prob(16, np.arange(0, 6.0, 1.0),
                                               "theoretical", 300, seed=222)
        ests = [p.estimate for p in points]
        assert all(b <= a for a, b in zip(ests, ests[1:]))

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            dynamical_no_crossing_prob(16, [-1.0], "theoretical", 10, seed=1)

    def test_determinism(self):
        a, _ = dynamical_no_crossing_prob(16, [0.0, 2.0], "theoretical", 200,
                                          seed=333)
        b, _ = dynamical_no_crossing_prob(16, [0.0, 2.0], "theoretical", 200,
                                          seed=333)
        assert [p.estimate for p in a] == [p.estimate for p in b]


def test_newman_ziff_union_bound_tighter():
    # union attempts are bounded by one per adjacent pair plus wall links
    grid = build_lattice(16)
    labels = trng.generator(99).random(grid.num_sites)
    res = crossing_flip_time(grid, labels)
    pair_bound = 3 * 16 * 16 + 2 * 16   # half-degree sum + wall links
    assert res.unions <= pair_bound
