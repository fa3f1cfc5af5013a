import io
import math
import unittest

import numpy as np

from fatigue_core import LoadProfile, MuscleParams
from fatigue_errors import DegenerateClosedFormError, GridMismatchError, OutOfRangeError
from reference_models import (
    FreundTakalaParams,
    LiuParams,
    SampledCurve,
    compare_capacity_curves,
    dynamic_capacity_curve,
    dynamic_capacity_under_profile,
    freund_takala_curve,
    freund_takala_simulate,
    liu_capacity_closed_form,
    liu_closed_form,
    liu_curve,
    liu_limit_capacity,
    liu_simulate,
)


def sample_at(samples, t):
    times = np.array([s[0] for s in samples])
    i = int(np.argmin(np.abs(times - t)))
    assert abs(times[i] - t) < 1e-9
    return samples[i]


class TestLiuClosedForm(unittest.TestCase):
    def test_initial_state(self):
        a, uc = liu_closed_form(LiuParams.from_ratios(f_rate=1.0, beta=100.0), 0.0)
        self.assertAlmostEqual(a, 0.0, places=12)
        self.assertEqual(uc, 1.0)

    def test_spot_value(self):
        capacity = liu_capacity_closed_form(LiuParams.from_ratios(f_rate=1.0, beta=100.0), 1.0)
        self.assertAlmostEqual(capacity, 0.37160, delta=1e-5)
        self.assertAlmostEqual(liu_limit_capacity(1.0, 1.0), 0.36788, delta=1e-5)
        self.assertEqual(liu_limit_capacity(1.0, 0.0), 1.0)

    def test_gamma_zero_rederivation(self):
        for beta in (3.0, 10.0, 250.0):
            params = LiuParams.from_ratios(f_rate=0.7, beta=beta)
            for t in (0.0, 0.3, 1.0, 4.0):
                ratio = beta / (beta - 1.0)
                expected = ratio * math.exp(-0.7 * t) + (1.0 - ratio) * math.exp(-beta * 0.7 * t)
                self.assertAlmostEqual(liu_capacity_closed_form(params, t), expected, delta=1e-12)

    def test_long_run_all_fatigued(self):
        a, uc = liu_closed_form(LiuParams.from_ratios(f_rate=1.0, beta=10.0), 60.0)
        self.assertLess(a, 1e-12)
        self.assertLess(uc, 1e-12)

    def test_degenerate_and_range(self):
        degenerate = LiuParams.from_ratios(f_rate=1.0, beta=1.5, gamma=0.5)
        self.assertTrue(degenerate.is_degenerate)
        with self.assertRaises(DegenerateClosedFormError):
            liu_closed_form(degenerate, 1.0)
        with self.assertRaises(OutOfRangeError):
            liu_closed_form(LiuParams.from_ratios(f_rate=1.0, beta=10.0), -1.0)
        with self.assertRaises(ValueError):
            LiuParams(f_rate=0.0, b_rate=1.0)


class TestLiuSimulation(unittest.TestCase):
    def test_conservation(self):
        params = LiuParams.from_ratios(f_rate=1.0, beta=5.0, gamma=0.3, m0=2.0)
        for _, state in liu_simulate(params, 2.0, 1e-3):
            self.assertAlmostEqual(state.m_a + state.m_f + state.m_uc, 2.0, delta=1e-9)

    def test_matches_closed_form(self):
        for gamma in (0.0, 0.1, 0.5):
            params = LiuParams.from_ratios(f_rate=1.0, beta=5.0, gamma=gamma)
            samples = liu_simulate(params, 2.0, 1e-3)
            for t in (0.5, 1.0, 2.0):
                t_sim, state = sample_at(samples, t)
                a, uc = liu_closed_form(params, t_sim)
                np.testing.assert_allclose([state.m_a, state.m_uc], [a, uc], rtol=1e-6, atol=1e-9)

    def test_no_activation(self):
        samples = liu_simulate(LiuParams(f_rate=1.0, b_rate=0.0, m0=3.0), 1.0, 0.01)
        for _, state in samples:
            self.assertEqual((state.m_a, state.m_f, state.m_uc), (0.0, 0.0, 3.0))

    def test_limit_reduction(self):
        diffs = []
        for beta in (10.0, 1e2, 1e3, 1e4):
            curve = liu_curve(LiuParams.from_ratios(f_rate=1.0, beta=beta), 3.0, 1e-3)
            limit = np.exp(-curve.times)
            diffs.append(float(np.max(np.abs(curve.values - limit))))
        self.assertLess(diffs[2], 1e-2)
        self.assertTrue(all(a > b for a, b in zip(diffs, diffs[1:])), msg=str(diffs))

    def test_curve_methods_agree(self):
        params = LiuParams.from_ratios(f_rate=1.0, beta=8.0, gamma=0.2)
        closed = liu_curve(params, 1.0, 1e-3, "closed-form")
        ode = liu_curve(params, 1.0, 1e-3, "ode")
        np.testing.assert_allclose(closed.times, ode.times)
        np.testing.assert_allclose(closed.values, ode.values, rtol=1e-6)

    def test_degenerate_curve_uses_ode(self):
        curve = liu_curve(LiuParams.from_ratios(f_rate=1.0, beta=1.0), 0.5, 1e-3)
        self.assertEqual(curve.values[0], 1.0)
        self.assertTrue(np.all(np.diff(curve.values) < 0))


class TestFreundTakala(unittest.TestCase):
    def test_analytic_solution(self):
        params = FreundTakalaParams(s_limit=1.0)
        samples = freund_takala_simulate(params, 0.4, 1.0, 2.0, 1e-3)
        for t in (0.5, 1.0, 2.0):
            t_sim, s = sample_at(samples, t)
            self.assertAlmostEqual(s, 0.6 + 0.4 * math.exp(-t_sim), delta=1e-6)

    def test_equilibrium(self):
        samples = freund_takala_simulate(FreundTakalaParams(s_limit=2.0), 0.0, 2.0, 1.0, 0.01)
        self.assertTrue(all(s == 2.0 for _, s in samples))

    def test_pure_recovery(self):
        samples = freund_takala_simulate(FreundTakalaParams(s_limit=1.0), 0.0, 0.0, 3.0, 0.01)
        values = np.array([s for _, s in samples])
        self.assertTrue(np.all(np.diff(values) > 0))
        self.assertLess(values[-1], 1.0)

    def test_profile_input(self):
        params = FreundTakalaParams(s_limit=1.0)
        profile = LoadProfile.from_pairs([(1.0, 0.4), (1.0, 0.0)])
        samples = freund_takala_simulate(params, profile, 1.0, 2.0, 1e-3)
        _, s1 = sample_at(samples, 1.0)
        self.assertAlmostEqual(s1, 0.6 + 0.4 * math.exp(-1.0), delta=1e-6)
        # recovery afterwards: 1 - (1 - s1) e^-(t-1)
        _, s2 = sample_at(samples, 2.0)
        self.assertAlmostEqual(s2, 1.0 - (1.0 - s1) * math.exp(-1.0), delta=1e-6)
        with self.assertRaises(OutOfRangeError):
            freund_takala_simulate(params, profile, 1.0, 3.0, 1e-3)

    def test_capacity_stays_bounded(self):
        params = FreundTakalaParams(s_limit=2.0, beta_decay=0.5, beta_recovery=1.5)
        ratio = params.beta_decay / params.beta_recovery
        admissible = params.s_limit / ratio
        for force in (0.0, 0.25 * admissible, 0.5 * admissible, admissible):
            for s0 in (0.0, 1.0, 2.0):
                # the trajectory runs between s0 and the equilibrium s_limit - ratio * force
                lower = min(s0, params.s_limit - ratio * force)
                for _, s in freund_takala_simulate(params, force, s0, 4.0, 0.01):
                    self.assertGreaterEqual(s, lower - 1e-9, msg=(force, s0))
                    self.assertLessEqual(s, params.s_limit + 1e-9, msg=(force, s0))

        profile = LoadProfile.from_pairs([(1.0, admissible), (0.5, 0.0), (1.0, 0.5 * admissible)])
        for s0 in (0.5, 2.0):
            lower = min(s0, params.s_limit - ratio * admissible)
            for _, s in freund_takala_simulate(params, profile, s0, profile.total_duration, 0.01):
                self.assertGreaterEqual(s, lower - 1e-9)
                self.assertLessEqual(s, params.s_limit + 1e-9)

    def test_invalid_start(self):
        with self.assertRaises(ValueError):
            freund_takala_simulate(FreundTakalaParams(s_limit=1.0), 0.0, 1.5, 1.0)

    def test_leaving_range_is_logged(self):
        with self.assertLogs("reference_models", level="WARNING"):
            samples = freund_takala_simulate(FreundTakalaParams(s_limit=1.0), 2.0, 1.0, 3.0, 0.01)
        self.assertLess(samples[-1][1], 0.0)

    def test_curve_is_normalised(self):
        curve = freund_takala_curve(FreundTakalaParams(s_limit=4.0), 0.0, 4.0, 1.0, 0.1)
        self.assertEqual(curve.time_unit, "min")
        self.assertTrue(np.all(curve.values == 1.0))


class TestCurveComparison(unittest.TestCase):
    def test_identical_and_negated(self):
        times = np.linspace(0.0, 1.0, 11)
        curve = SampledCurve(times, np.exp(-times))
        result = compare_capacity_curves(curve, curve)
        self.assertEqual((result.max_abs_diff, result.pearson_r), (0.0, 1.0))
        negated = SampledCurve(times, -np.exp(-times))
        self.assertAlmostEqual(compare_capacity_curves(curve, negated).pearson_r, -1.0)

    def test_grid_mismatch(self):
        a = SampledCurve(np.array([0.0, 1.0]), np.array([1.0, 0.5]))
        b = SampledCurve(np.array([0.0, 2.0]), np.array([1.0, 0.5]))
        with self.assertRaises(GridMismatchError):
            compare_capacity_curves(a, b)

    def test_liu_against_dynamic_model(self):
        params = LiuParams.from_ratios(f_rate=1.0, beta=1e3)
        reference = liu_curve(params, 3.0, 1e-3)
        dynamic = dynamic_capacity_curve(reference.times, params.f_rate)
        self.assertEqual(dynamic.values[0], 1.0)
        self.assertEqual(reference.values[0], 1.0)
        result = compare_capacity_curves(reference, dynamic)
        self.assertLess(result.max_abs_diff, 1e-2)
        self.assertGreater(result.pearson_r, 0.999)

    def test_dynamic_under_profile(self):
        profile = LoadProfile.constant(2.0, 40.0)
        curve = dynamic_capacity_under_profile(np.array([0.0, 1.0, 2.0]), MuscleParams(mvc=100.0), profile)
        np.testing.assert_allclose(curve.values, np.exp(-0.4 * np.array([0.0, 1.0, 2.0])))

    def test_curve_csv(self):
        buffer = io.StringIO()
        SampledCurve(np.array([0.0, 0.5]), np.array([1.0, 0.25]), "s", "reference").to_csv(buffer)
        self.assertEqual(buffer.getvalue(), "t_s,reference\n0.000000,1.000000\n0.500000,0.250000\n")


if __name__ == "__main__":
    unittest.main()
