import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ibmag import (
    DomainError,
    FitError,
    PowerLawCurve,
    SampledCurve,
    curve_from_dict,
    curve_to_dict,
    eval_force,
    eval_slope,
    fit_power_law,
    read_samples_csv,
    work_integral,
)

from conftest import (
    A_SMALL,
    C_SMALL,
    SMALL_ENDPOINTS,
    assert_rel,
    central_diff,
    trapezoid_oracle,
    two_point_oracle,
)


class TestPowerLawCurve:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            PowerLawCurve(-1.0, 2.0, 2.0)
        with pytest.raises(ValueError):
            PowerLawCurve(1.0, 0.0, 2.0)
        with pytest.raises(ValueError):
            PowerLawCurve(1.0, 2.0, 0.5)

    def test_eval_endpoint_values(self, small_curve):
        assert abs(eval_force(small_curve, 0.0) - 8.4) < 1e-12
        assert abs(eval_force(small_curve, 7.5) - 0.5) < 1e-12

    def test_eval_negative_x_rejected(self, small_curve):
        with pytest.raises(DomainError):
            eval_force(small_curve, -0.1)
        with pytest.raises(DomainError):
            eval_slope(small_curve, -1e-9)

    def test_strictly_decreasing_and_convex(self, small_curve):
        xs = np.linspace(0.0, 15.0, 1000)
        fs = eval_force(small_curve, xs)
        assert np.all(np.diff(fs) < 0)
        assert np.all(np.diff(fs, 2) > 0)


class TestEvalSlope:
    def test_matches_central_difference_at_1mm(self, small_curve):
        # frozen from the h=1e-4 central-difference oracle on the fitted curve
        fd = central_diff(lambda x: eval_force(small_curve, x), 1.0)
        assert_rel(fd, -2.459545864127033, 1e-6)
        assert_rel(eval_slope(small_curve, 1.0), fd, 1e-6)

    def test_matches_central_difference_at_random_points(self, small_curve):
        rng = np.random.default_rng(20240901)
        for x in rng.uniform(0.1, 10.0, 100):
            fd = central_diff(lambda q: eval_force(small_curve, q), x)
            assert_rel(eval_slope(small_curve, x), fd, 1e-6, msg=f"x={x}")

    def test_slope_negative_everywhere(self, small_curve):
        xs = np.linspace(0.0, 20.0, 500)
        assert np.all(eval_slope(small_curve, xs) < 0)

    def test_constant_sampled_curve_slope_zero(self):
        flat = SampledCurve([(0.0, 3.0), (1.0, 3.0), (2.0, 3.0), (5.0, 3.0)])
        for x in (0.0, 0.7, 2.5, 5.0):
            assert eval_slope(flat, x) == pytest.approx(0.0, abs=1e-14)


class TestFitPowerLaw:
    def test_two_point_closed_form(self):
        curve = fit_power_law(SMALL_ENDPOINTS, p_fixed=2)
        assert_rel(curve.offset, C_SMALL, 1e-12)
        assert_rel(curve.amplitude, A_SMALL, 1e-12)
        # implementer check: both residuals are zero
        assert abs(eval_force(curve, 0.0) - 8.4) < 1e-12
        assert abs(eval_force(curve, 7.5) - 0.5) < 1e-12

    def test_two_point_solve_general_oracle(self):
        samples = [(0.5, 12.0), (9.0, 0.75)]
        curve = fit_power_law(samples, p_fixed=2)
        A, c = two_point_oracle(0.5, 12.0, 9.0, 0.75)
        assert_rel(curve.amplitude, A, 1e-12)
        assert_rel(curve.offset, c, 1e-12)

    def test_roundtrip_p_fixed(self):
        truth = PowerLawCurve(37.5, 1.8, 2.0)
        xs = np.linspace(0.0, 9.0, 12)
        curve = fit_power_law([(x, truth.force(x)) for x in xs], p_fixed=2)
        assert_rel(curve.amplitude, truth.amplitude, 1e-6)
        assert_rel(curve.offset, truth.offset, 1e-6)

    def test_roundtrip_p_free(self):
        truth = PowerLawCurve(120.0, 3.1, 2.6)
        xs = np.linspace(0.0, 12.0, 15)
        curve = fit_power_law([(x, truth.force(x)) for x in xs])
        assert_rel(curve.amplitude, truth.amplitude, 1e-6)
        assert_rel(curve.offset, truth.offset, 1e-6)
        assert_rel(curve.exponent, truth.exponent, 1e-6)

    def test_third_point_from_fit_changes_nothing(self, small_curve):
        f_mid = eval_force(small_curve, 3.0)
        curve = fit_power_law(SMALL_ENDPOINTS + [(3.0, f_mid)], p_fixed=2)
        assert_rel(curve.amplitude, small_curve.amplitude, 1e-9)
        assert_rel(curve.offset, small_curve.offset, 1e-9)

    def test_rejects_bad_samples(self):
        with pytest.raises(FitError):
            fit_power_law([(0.0, 8.4)], p_fixed=2)
        with pytest.raises(FitError):
            fit_power_law([(0.0, 8.4), (0.0, 0.5)], p_fixed=2)
        with pytest.raises(FitError):
            fit_power_law([(0.0, 8.4), (7.5, -0.5)], p_fixed=2)
        with pytest.raises(FitError):
            # increasing force cannot come from this family
            fit_power_law([(0.0, 0.5), (7.5, 8.4)], p_fixed=2)


class TestWorkIntegral:
    def test_degenerate_interval_is_zero(self, small_curve):
        assert work_integral(small_curve, 3.0, 3.0) == 0.0

    def test_analytic_antiderivative(self, small_curve):
        A, c, L = small_curve.amplitude, small_curve.offset, 7.5
        assert_rel(work_integral(small_curve, 0.0, L), A * (1.0 / c - 1.0 / (c + L)), 1e-12)

    def test_against_trapezoid_oracle(self, small_curve):
        oracle = trapezoid_oracle(lambda x: eval_force(small_curve, x), 0.0, 7.5)
        assert_rel(work_integral(small_curve, 0.0, 7.5), oracle, 1e-6)

    def test_additivity(self, small_curve):
        rng = np.random.default_rng(7)
        for _ in range(25):
            a, b, c = np.sort(rng.uniform(0.0, 12.0, 3))
            whole = work_integral(small_curve, a, c)
            split = work_integral(small_curve, a, b) + work_integral(small_curve, b, c)
            assert_rel(split, whole, 1e-9)

    def test_sampled_additivity_and_oracle(self):
        xs = np.linspace(0.0, 7.5, 40)
        curve = SampledCurve([(x, 8.4 / (x + 2.42) ** 2) for x in xs])
        oracle = trapezoid_oracle(lambda q: curve.force(q), 0.0, 7.5)
        assert_rel(work_integral(curve, 0.0, 7.5), oracle, 1e-6)
        split = work_integral(curve, 0.0, 3.3) + work_integral(curve, 3.3, 7.5)
        assert_rel(split, work_integral(curve, 0.0, 7.5), 1e-9)

    def test_bad_interval_rejected(self, small_curve):
        with pytest.raises(DomainError):
            work_integral(small_curve, 4.0, 2.0)
        with pytest.raises(DomainError):
            work_integral(small_curve, -1.0, 2.0)


class TestSampledCurve:
    def test_requires_three_increasing_points(self):
        with pytest.raises(ValueError):
            SampledCurve([(0.0, 1.0), (1.0, 0.5)])
        with pytest.raises(ValueError):
            SampledCurve([(0.0, 1.0), (1.0, 0.5), (1.0, 0.4)])
        with pytest.raises(ValueError):
            SampledCurve([(0.0, 1.0), (1.0, -0.5), (2.0, 0.4)])

    def test_interpolant_passes_through_knots(self):
        pts = [(0.0, 8.4), (2.0, 3.1), (5.0, 1.2), (7.5, 0.5)]
        curve = SampledCurve(pts)
        for x, f in pts:
            assert eval_force(curve, x) == pytest.approx(f, abs=1e-14)

    def test_outside_range_rejected(self):
        curve = SampledCurve([(1.0, 5.0), (2.0, 3.0), (3.0, 2.0)])
        for bad in (0.99, 3.01, -1.0):
            with pytest.raises(DomainError):
                eval_force(curve, bad)

    @given(
        xs=st.lists(st.floats(0.0, 50.0, allow_nan=False), min_size=3, max_size=9,
                    unique=True),
        drops=st.lists(st.floats(0.0, 10.0, allow_nan=False), min_size=9, max_size=9),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotone_data_gives_monotone_interpolant(self, xs, drops):
        xs = sorted(xs)
        if min(np.diff(xs)) < 1e-3:
            return  # rounding-degenerate spacing is out of scope
        fs = 100.0 - np.cumsum([0.0] + drops[: len(xs) - 1])
        curve = SampledCurve(list(zip(xs, fs)))
        dense = np.linspace(xs[0], xs[-1], 500)
        vals = eval_force(curve, dense)
        assert np.all(np.diff(vals) <= 1e-9)
        # no overshoot beyond neighboring samples
        for i in range(len(xs) - 1):
            seg = np.linspace(xs[i], xs[i + 1], 50)
            v = eval_force(curve, seg)
            assert np.all(v <= fs[i] + 1e-9) and np.all(v >= fs[i + 1] - 1e-9)


class TestSerialization:
    def test_csv_roundtrip(self, tmp_path):
        path = tmp_path / "samples.csv"
        path.write_text("x_mm,force_N\n0,8.4\n7.5,0.5\n", encoding="utf-8")
        assert read_samples_csv(path) == [(0.0, 8.4), (7.5, 0.5)]

    def test_csv_header_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("displacement,force\n0,8.4\n", encoding="utf-8")
        with pytest.raises(ValueError):
            read_samples_csv(path)

    def test_curve_dict_roundtrip(self, small_curve):
        again = curve_from_dict(curve_to_dict(small_curve))
        assert again == small_curve

        sampled = SampledCurve([(0.0, 8.4), (2.0, 3.0), (7.5, 0.5)])
        again = curve_from_dict(curve_to_dict(sampled))
        assert np.array_equal(again.x, sampled.x)
        assert np.array_equal(again.f, sampled.f)

    def test_unknown_curve_type_rejected(self):
        with pytest.raises(ValueError):
            curve_from_dict({"type": "mystery"})
