import math
import unittest

import numpy as np

from fatigue_core import (
    LoadProfile,
    MuscleParams,
    NormalizedLoad,
    TRAJECTORY_COLUMNS,
    capacity_at,
    capacity_rate,
    cumulative_normalized_load,
    fatigue_index_at,
    fatigue_index_rate,
    load_at,
    met,
    met_from_load,
    simulate_capacity,
    trajectory,
)
from fatigue_errors import DomainError, OutOfRangeError, SaturationError
from numerics import central_difference


class TestClosedForm(unittest.TestCase):
    def setUp(self):
        self.params = MuscleParams(mvc=100.0)

    def test_cumulative_load_examples(self):
        self.assertEqual(cumulative_normalized_load(LoadProfile.constant(10, 0), self.params, 5), 0.0)
        self.assertAlmostEqual(cumulative_normalized_load(LoadProfile.constant(10, 50), self.params, 1), 0.5)
        two = LoadProfile.from_pairs([(1, 100), (1, 50)])
        self.assertAlmostEqual(cumulative_normalized_load(two, self.params, 2), 1.5)

    def test_capacity_examples(self):
        self.assertEqual(capacity_at(LoadProfile.constant(3, 80), self.params, 0), 100.0)
        self.assertAlmostEqual(capacity_at(LoadProfile.constant(2, 50), self.params, 1), 100 * math.exp(-0.5), places=9)
        self.assertAlmostEqual(capacity_at(LoadProfile.constant(1, 100), self.params, math.log(2)), 50.0, places=9)

    def test_fatigue_index_examples(self):
        profile = LoadProfile.constant(2, 50)
        self.assertEqual(fatigue_index_at(profile, self.params, 0), 0.0)
        self.assertAlmostEqual(fatigue_index_at(profile, self.params, 1), (math.e - 1) / 2, places=9)
        self.assertEqual(fatigue_index_at(LoadProfile.constant(5, 0), self.params, 4), 0.0)

    def test_array_times(self):
        profile = LoadProfile.constant(2, 50)
        values = capacity_at(profile, self.params, np.array([0.0, 1.0, 2.0]))
        np.testing.assert_allclose(values, 100 * np.exp(-0.5 * np.array([0.0, 1.0, 2.0])))

    def test_out_of_range_times(self):
        profile = LoadProfile.constant(2, 50)
        with self.assertRaises(OutOfRangeError):
            capacity_at(profile, self.params, -0.1)
        with self.assertRaises(OutOfRangeError):
            fatigue_index_at(profile, self.params, 2.5)

    def test_load_at_half_open_segments(self):
        profile = LoadProfile.from_pairs([(1, 100), (1, 50)])
        self.assertEqual(load_at(profile, 0.0), 100.0)
        self.assertEqual(load_at(profile, 1.0), 50.0)
        self.assertEqual(load_at(profile, 2.0), 50.0)

    def test_rates(self):
        self.assertEqual(fatigue_index_rate(self.params, 100, 0), 0.0)
        self.assertAlmostEqual(fatigue_index_rate(self.params, 100, 50), 0.5)
        self.assertAlmostEqual(fatigue_index_rate(self.params, 50, 50), 2.0)
        self.assertAlmostEqual(capacity_rate(self.params, 50, 50), -25.0)
        with self.assertRaises(DomainError):
            fatigue_index_rate(self.params, 0.0, 10)

    def test_saturation_is_an_error(self):
        profile = LoadProfile.constant(400, 100)
        with self.assertRaises(SaturationError):
            fatigue_index_at(profile, self.params, 400)
        # capacity is still defined there
        self.assertGreater(capacity_at(profile, self.params, 400), 0.0)

    def test_capacity_underflow_is_an_error(self):
        profile = LoadProfile.constant(10, 100)
        steep = MuscleParams(mvc=100, k=100)
        self.assertGreater(capacity_at(profile, steep, 7.0), 0.0)
        with self.assertRaises(SaturationError):
            capacity_at(profile, steep, 10.0)
        with self.assertRaises(SaturationError):
            capacity_at(profile, steep, np.array([0.0, 5.0, 10.0]))

    def test_empty_profile_rejected(self):
        with self.assertRaises(ValueError):
            LoadProfile.from_pairs([])
        with self.assertRaises(ValueError):
            LoadProfile.from_pairs([(0.0, 10)])
        with self.assertRaises(ValueError):
            MuscleParams(mvc=-1.0)


class TestMet(unittest.TestCase):
    def setUp(self):
        self.params = MuscleParams(mvc=100.0)

    def test_spot_values(self):
        self.assertAlmostEqual(met(self.params, 0.5), 1.386294, delta=1e-6)
        self.assertAlmostEqual(met(self.params, 0.3), 4.013243, delta=1e-6)
        self.assertEqual(met(self.params, 1.0), 0.0)
        self.assertAlmostEqual(met(self.params, NormalizedLoad(f_mvc=0.5)), met(self.params, 0.5))
        self.assertAlmostEqual(met_from_load(self.params, 30.0), met(self.params, 0.3))

    def test_domain(self):
        for f in (0.0, -0.2, 1.01):
            with self.assertRaises(DomainError):
                met(self.params, f)

    def test_monotone(self):
        values = [met(self.params, f) for f in np.linspace(0.05, 1.0, 40)]
        self.assertTrue(all(a > b for a, b in zip(values, values[1:])))

    def test_crossing_matches_met(self):
        step = 1e-3
        for f in (0.2, 0.3, 0.5, 0.8):
            expected = met(self.params, f)
            traj = trajectory(LoadProfile.constant(expected + 0.5, f * 100), self.params, step)
            crossing = traj.first_crossing()
            self.assertIsNotNone(crossing)
            self.assertLessEqual(abs(crossing - expected), step + 1e-12, msg=f"f={f}")


class TestTrajectory(unittest.TestCase):
    def setUp(self):
        self.params = MuscleParams(mvc=100.0)

    def test_includes_boundaries(self):
        profile = LoadProfile.from_pairs([(0.1234, 50), (0.5, 0), (0.25, 80)])
        traj = trajectory(profile, self.params, 0.01)
        for b in profile.boundaries:
            self.assertTrue(np.any(np.abs(traj.t - b) < 1e-12), msg=f"boundary {b}")
        self.assertTrue(np.all(np.diff(traj.t) > 0))
        self.assertEqual(traj.f_cem[0], 100.0)
        self.assertEqual(list(traj.to_frame().columns), TRAJECTORY_COLUMNS)

    def test_zero_load(self):
        traj = trajectory(LoadProfile.constant(2, 0), self.params, 0.01)
        self.assertTrue(np.all(traj.f_cem == 100.0))
        self.assertTrue(np.all(traj.u == 0.0))
        self.assertIsNone(traj.first_crossing())
        self.assertEqual(traj.overloads, ())

    def test_monotonicity(self):
        profile = LoadProfile.from_pairs([(1, 50), (1, 0), (1, 80)])
        traj = trajectory(profile, self.params, 0.01)
        diffs = np.diff(traj.f_cem)
        # each sample interval lies inside the segment of its left end
        loaded = traj.f_load[:-1] > 0
        self.assertTrue(np.all(diffs[loaded] < 0))
        rest = (traj.t[:-1] >= 1.0) & (traj.t[:-1] < 2.0)
        self.assertTrue(np.all(diffs[rest] == 0))
        self.assertTrue(np.all(traj.f_cem > 0))
        self.assertTrue(np.all(np.diff(traj.u) >= 0))

    def test_scale_invariance(self):
        base = LoadProfile.from_pairs([(1, 100), (0.5, 20)])
        a = trajectory(base, MuscleParams(mvc=100.0), 0.01)
        b = trajectory(base.scaled(2.0), MuscleParams(mvc=200.0), 0.01)
        np.testing.assert_allclose(a.f_cem / 100.0, b.f_cem / 200.0, rtol=1e-12)
        np.testing.assert_allclose(a.u, b.u, rtol=1e-12)

    def test_overloads_are_flagged(self):
        with self.assertLogs("fatigue_core", level="WARNING"):
            traj = trajectory(LoadProfile.constant(1, 100), self.params, 0.1)
        # at t = 0 capacity equals the load, afterwards it is below it
        self.assertEqual(len(traj.overloads), len(traj) - 1)
        self.assertGreater(traj.overloads[0].f_load, traj.overloads[0].f_cem)

    def test_bad_step(self):
        with self.assertRaises(ValueError):
            trajectory(LoadProfile.constant(1, 10), self.params, 0.0)


class TestOdeEquivalence(unittest.TestCase):
    def test_random_profiles_match_closed_form(self):
        rng = np.random.default_rng(20240101)
        params = MuscleParams(mvc=100.0)
        for _ in range(50):
            n = int(rng.integers(1, 11))
            pairs = list(zip(rng.uniform(0.05, 0.5, n), rng.uniform(0.0, 100.0, n)))
            profile = LoadProfile.from_pairs(pairs)
            samples = simulate_capacity(profile, params, 1e-3)
            times = np.array([t for t, _ in samples])
            values = np.array([v for _, v in samples])
            for b in profile.boundaries:
                i = int(np.argmin(np.abs(times - b)))
                self.assertLess(abs(times[i] - b), 1e-9)
                expected = capacity_at(profile, params, min(times[i], profile.total_duration))
                self.assertLess(abs(values[i] - expected) / expected, 1e-6)

    def test_constant_half_load(self):
        samples = simulate_capacity(LoadProfile.constant(1, 50), MuscleParams(mvc=100.0), 1e-3)
        t, value = samples[-1]
        self.assertAlmostEqual(t, 1.0)
        self.assertAlmostEqual(value / 100.0, 0.606531, delta=1e-6)


class TestDerivativeConsistency(unittest.TestCase):
    def test_random_interior_points(self):
        rng = np.random.default_rng(7)
        params = MuscleParams(mvc=100.0, k=1.3)
        profile = LoadProfile.from_pairs([(0.8, 40), (0.6, 90), (1.0, 15)])
        starts, ends = profile.starts, profile.boundaries[1:]
        h = 1e-4
        for _ in range(100):
            seg = int(rng.integers(0, 3))
            t = float(rng.uniform(starts[seg] + 1e-3, ends[seg] - 1e-3))
            f_cem = capacity_at(profile, params, t)
            f_load = load_at(profile, t)

            expected = capacity_rate(params, f_cem, f_load)
            numeric = central_difference(lambda s: capacity_at(profile, params, s), t, h)
            self.assertLess(abs(numeric - expected) / abs(expected), 1e-4)

            expected = fatigue_index_rate(params, f_cem, f_load)
            numeric = central_difference(lambda s: fatigue_index_at(profile, params, s), t, h)
            self.assertLess(abs(numeric - expected) / abs(expected), 1e-4)


if __name__ == "__main__":
    unittest.main()
