import math

import numpy as np
import pytest

from sheetlab import gaussian_core as gc
from sheetlab import models, path_stats, spectral


def linear_path_1d():
    """v(x) = x on [0, 1] with 21 points; every statistic is computable by
    hand."""
    grid = gc.grid_on(((0.0, 1.0),), (21,))
    vals = grid.points().copy()
    return gc.SamplePath(grid, vals, (0, 0))


class TestWindowStatistics:
    def test_sup_increment_linear(self):
        path = linear_path_1d()
        # window [0.25, 0.75] around 0.5: the farthest value differs by 0.25
        assert path_stats.sup_increment(path, (0.5,), 0.25) \
            == pytest.approx(0.25)

    def test_sup_increment_degenerate_window(self):
        # a window smaller than the spacing still contains the center point
        path = linear_path_1d()
        assert path_stats.sup_increment(path, (0.5,), 1e-6) == 0.0

    def test_sojourn_linear(self):
        path = linear_path_1d()
        # |x - 0.5| <= 0.21 holds at the 9 points 0.3 ... 0.7, each worth a
        # 0.05 cell (0.21 rather than 0.20 keeps the boundary off the lattice)
        res = path_stats.sojourn_time(path, (0.5,), 0.21)
        assert res.tau == pytest.approx(9 * 0.05)
        assert res.cell_volume == pytest.approx(0.05)

    def test_sojourn_monotone_in_r(self):
        path = linear_path_1d()
        taus = [path_stats.sojourn_time(path, (0.5,), r).tau
                for r in (0.05, 0.1, 0.2, 0.4)]
        assert taus == sorted(taus)


class TestChung:
    def test_linear_path_values(self):
        path = linear_path_1d()
        stat = path_stats.chung_statistic(path, (0.5,), 0.2, 0.3, alpha=0.5)
        # sup increment over |x - 0.5| <= r is exactly r for the identity
        for r, v in zip(stat.r_values, stat.normalized_sups):
            sup = round(r / 0.05) * 0.05  # lattice snap
            expect = sup / (r ** 0.5 * math.log(math.log(1 / r)) ** -0.5)
            assert v == pytest.approx(expect, rel=1e-9)
        assert stat.min_over_r == pytest.approx(min(stat.normalized_sups))

    def test_radius_ladder_halves(self):
        grid = gc.grid_on(((0.0, 1.0),), (81,))
        path = gc.SamplePath(grid, grid.points().copy(), (0, 0))
        stat = path_stats.chung_statistic(path, (0.5,), 0.08, 0.32, alpha=0.5)
        assert stat.r_values == (0.32, 0.16, 0.08)

    def test_resolution_guard(self):
        # r_min below four grid spacings is refused
        path = linear_path_1d()
        with pytest.raises(ValueError):
            path_stats.chung_statistic(path, (0.5,), 0.1, 0.3, alpha=0.5)

    def test_calibrate_k1_brownian(self):
        k1 = path_stats.calibrate_k1(
            models.brownian_sheet(((0.5, 3.0), (0.5, 3.0))), (1.0, 1.0),
            reps=40, grid_points=65)
        assert 0.5 < k1 < 3.0


class TestSojournSurvey:
    def test_report_shape_and_positivity(self, bs2):
        rep = path_stats.sojourn_moment_survey(
            bs2, (1.5, 1.5), [0.1, 0.2], n_max=2, reps=50, seed=8)
        assert rep["resolution_valid"]
        assert len(rep["entries"]) == 4
        for e in rep["entries"]:
            assert e["moment"] > 0
            assert e["ci"][0] <= e["moment"] <= e["ci"][1]
        assert rep["k_hat"] > 0

    def test_moments_bounded_by_window(self, bs2):
        rep = path_stats.sojourn_moment_survey(
            bs2, (1.5, 1.5), [0.1], n_max=3, reps=30, seed=8)
        lam = rep["lambda_T"]
        for e in rep["entries"]:
            assert e["moment"] <= lam ** e["n"] + 1e-12

    def test_order_cap(self, bs2):
        with pytest.raises(ValueError):
            path_stats.sojourn_moment_survey(bs2, (1.5, 1.5), [0.1],
                                             n_max=5, reps=5, seed=0)


class TestModulusTail:
    def test_frequencies_decrease_in_l(self, bs2):
        grid = gc.grid_on(bs2.domain, (33, 33))
        rep = path_stats.modulus_tail_check(
            bs2, grid, reps=120, L_list=[0.5, 1.0, 1.5], seed=6)
        freqs = [e["frequency"] for e in rep["entries"]]
        assert freqs == sorted(freqs, reverse=True)
        assert all(0.0 <= f <= 1.0 for f in freqs)

    def test_quadratic_tail_decay(self, bs2):
        # -log(tail frequency) should grow linearly in L^2 (Gaussian tail);
        # the fitted slope against L^2 is positive
        grid = gc.grid_on(bs2.domain, (33, 33))
        rep = path_stats.modulus_tail_check(
            bs2, grid, reps=200, L_list=[2.0, 2.5, 3.0, 3.5], seed=6)
        assert rep["quadratic_slope"] > 0.0


class TestBandSmallBall:
    def test_probabilities_increase_with_eps(self, bs2, small_disc):
        band = spectral.band_spec_for(bs2, 0.0, small_disc.cutoff, (1.2, 1.2))
        rep = path_stats.band_small_ball(
            bs2, band, (1.2, 1.2), 0.1, [0.05, 0.1, 0.2, 0.4],
            reps=150, seed=12, grid_points=9, disc=small_disc)
        ps = [e["p_hat"] for e in rep["entries"]]
        assert ps == sorted(ps)
        assert rep["k0_hat"] > 0
        for e in rep["entries"]:
            if not e["censored"]:
                assert e["neg_log_p"] == pytest.approx(-math.log(e["p_hat"]))
