import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sheetlab import lnd, models


class TestSectorialBound:
    def test_brownian_motion_ratio_is_one(self):
        # For Brownian motion with one past conditioning point the sectorial
        # expression equals the Markov conditional variance exactly.
        m = models.brownian_sheet(((0.5, 3.0),))
        from sheetlab.gaussian_core import conditional_variance
        bound = lnd.sectorial_lower_bound(m, (2.0,), [(1.5,)])
        assert bound == pytest.approx(0.5)
        assert conditional_variance(m, (2.0,), [(1.5,)]) / bound \
            == pytest.approx(1.0, rel=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(lam=st.floats(0.25, 2.0), alpha=st.floats(0.15, 0.85))
    def test_scaling_homogeneity(self, lam, alpha):
        m = models.fractional_brownian_sheet(
            alpha, ((0.1, 10.0), (0.1, 10.0)))
        x = np.array([1.3, 2.1])
        pts = np.array([[0.9, 2.4], [1.7, 1.6]])
        base = lnd.sectorial_lower_bound(m, x, pts)
        scaled = lnd.sectorial_lower_bound(m, lam * x, lam * pts)
        assert scaled == pytest.approx(lam ** (2 * alpha) * base, rel=1e-9)

    def test_wave_light_ray_form(self, wave_white):
        x = np.array([1.0, 1.0])
        pt = np.array([[0.8, 0.9]])
        t, xx = models.rotate_to_tx(*x)
        ti, xi = models.rotate_to_tx(*pt[0])
        expect = abs((t + xx) - (ti + xi)) + abs((t - xx) - (ti - xi))
        assert lnd.sectorial_lower_bound(wave_white, x, pt) \
            == pytest.approx(expect, rel=1e-12)

    def test_dimension_mismatch(self, bs2):
        with pytest.raises(ValueError):
            lnd.sectorial_lower_bound(bs2, (1.5, 1.5), [(1.2,)])


class TestRatioSurvey:
    def test_sheet_survey_ok(self, bs2):
        rep = lnd.lnd_ratio_survey(bs2, lnd.LndConfig(trials=60), seed=5)
        assert rep["status"] == "ok"
        assert rep["min_ratio"] > 0
        qs = [rep["quantiles"][q] for q in ("0.05", "0.25", "0.5", "0.75", "0.95")]
        assert qs == sorted(qs)
        assert rep["min_ratio"] <= qs[0]

    def test_wave_survey_ok(self, wave_white):
        rep = lnd.lnd_ratio_survey(wave_white, lnd.LndConfig(trials=60),
                                   seed=9)
        assert rep["status"] == "ok"
        assert rep["min_ratio"] > 0

    def test_survey_reproducible(self, fbs07):
        cfg = lnd.LndConfig(trials=40)
        a = lnd.lnd_ratio_survey(fbs07, cfg, seed=3)
        b = lnd.lnd_ratio_survey(fbs07, cfg, seed=3)
        assert a == b

    def test_config_validation(self):
        with pytest.raises(ValueError):
            lnd.LndConfig(n_points=0)
        with pytest.raises(ValueError):
            lnd.LndConfig(locality=-1.0)


class TestAssumptionThree:
    def test_variance_floor_sheet(self, bs2):
        # Var v(t) = t1 t2 on the sheet; the floor over [1,2]^2 sits at (1,1).
        floor = lnd.a3_variance_floor(bs2, ((1.0, 2.0), (1.0, 2.0)), 9)
        assert floor == pytest.approx(1.0, rel=1e-12)

    def test_variance_floor_wave(self, wave_white):
        # Var u = t^2/4 with t = (p1 + p2)/sqrt(2); min at the (0.5, 0.5)
        # corner of the fixture domain.
        floor = lnd.a3_variance_floor(
            wave_white, ((0.5, 1.5), (0.5, 1.5)), 9)
        assert floor == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)), rel=1e-12)

    def test_floor_rejects_out_of_domain(self, bs2):
        with pytest.raises(models.DomainError):
            lnd.a3_variance_floor(bs2, ((0.0, 2.0), (1.0, 2.0)), 5)

    def test_smoothness_check_finite(self, wave_white):
        rep = lnd.a3_smoothness_check(wave_white, ((0.6, 1.4), (0.6, 1.4)),
                                      rho=0.05, trials=50, seed=2)
        assert rep["evaluated"] > 0
        assert 0 < rep["max_ratio"] < 10.0

    def test_smoothness_check_sheet_refused(self, bs2):
        with pytest.raises(ValueError):
            lnd.a3_smoothness_check(bs2, ((1.0, 2.0), (1.0, 2.0)), 0.1, 10, 0)

    def test_params_validate(self, fbs07):
        lnd.AssumptionThreeParams(delta=0.9, rho=0.1).validate_for(fbs07)
        with pytest.raises(ValueError):
            lnd.AssumptionThreeParams(delta=0.6, rho=0.1).validate_for(fbs07)
