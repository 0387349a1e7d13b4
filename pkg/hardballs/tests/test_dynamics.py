import unittest
from fractions import Fraction

import numpy as np
from parameterized import parameterized

from hardballs import (
    EXACT,
    FLOAT,
    CollisionException,
    MassException,
    MassProfile,
    MultipleCollisionException,
    SimConfig,
    StateException,
    Simultaneity,
    SystemState,
    Termination,
    collide,
    simulate,
    step,
    total_collisions,
)
from hardballs.dynamics import conservation_residuals, default_max_events, next_event
from hardballs.model import kinetic_energy, momentum


class CollideTests(unittest.TestCase):
    """Elastic two-ball collisions."""

    @parameterized.expand(
        [
            ("equal_masses_swap", (1, 1, 5, 2), (2, 5)),
            ("heavy_right", (1, 3, 2, 0), (-1, 1)),
            ("equal_heavy", (7, 7, Fraction(1, 2), -3), (-3, Fraction(1, 2))),
        ]
    )
    def test_exact(self, _, args, expected):
        self.assertEqual(expected, collide(*args, numeric=EXACT))

    def test_conserves_and_separates(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            m1, m2 = rng.uniform(0.01, 10.0, size=2)
            v2, v1 = sorted(rng.uniform(-5.0, 5.0, size=2))
            with self.subTest(masses=(m1, m2), velocities=(v1, v2)):
                w1, w2 = collide(m1, m2, v1, v2)
                self.assertAlmostEqual(m1 * v1 + m2 * v2, m1 * w1 + m2 * w2, places=9)
                self.assertAlmostEqual(m1 * v1**2 + m2 * v2**2, m1 * w1**2 + m2 * w2**2, places=8)
                self.assertLessEqual(w1, w2)

    def test_not_approaching(self):
        with self.assertRaises(CollisionException):
            collide(1, 1, 0, 1)
        with self.assertRaises(CollisionException):
            collide(1, 1, 1, 1)

    def test_nonpositive_mass(self):
        with self.assertRaises(MassException):
            collide(0, 1, 1, 0)


class NextEventTests(unittest.TestCase):
    """Earliest neighbour contact."""

    masses2 = MassProfile.of((1, 1), EXACT)

    def test_separating(self):
        state = SystemState.of((0, 1), (0, 1), numeric=EXACT)
        self.assertIsNone(next_event(state, self.masses2, EXACT))

    def test_unit_closing_speed(self):
        state = SystemState.of((0, 1), (1, 0), time=5, numeric=EXACT)
        upcoming = next_event(state, self.masses2, EXACT)
        self.assertEqual(6, upcoming.time)
        self.assertEqual((1,), upcoming.pairs)

    def test_simultaneous_disjoint_pairs(self):
        state = SystemState.of((0, 1, 2, 3), (1, 0, 1, 0), numeric=EXACT)
        upcoming = next_event(state, MassProfile.of((1, 1, 1, 1), EXACT), EXACT)
        self.assertEqual(1, upcoming.time)
        self.assertEqual((1, 3), upcoming.pairs)


class StepTests(unittest.TestCase):
    """Single event advances."""

    def test_terminated(self):
        state = SystemState.of((0, 1, 2), (0, 1, 2), numeric=EXACT)
        self.assertIsNone(step(state, MassProfile.of((1, 1, 1), EXACT), SimConfig().exact()))

    def test_equal_masses_exchange_velocities(self):
        state = SystemState.of((0, 1), (1, 0), numeric=EXACT)
        new_state, event = step(state, MassProfile.of((1, 1), EXACT), SimConfig().exact())

        self.assertEqual((0, 1), new_state.velocities)
        self.assertEqual((1, 1), new_state.positions)
        self.assertEqual(1, new_state.time)
        self.assertEqual(((1, 0),), event.pre)
        self.assertEqual(((0, 1),), event.post)

    def test_adjacent_pairs_are_a_multiple_collision(self):
        state = SystemState.of((0, 1, 2), (2, 0, -2), numeric=EXACT)
        with self.assertRaises(MultipleCollisionException) as context:
            step(state, MassProfile.of((1, 1, 1), EXACT), SimConfig().exact())
        self.assertEqual((1, 2), context.exception.pairs)
        self.assertEqual(Fraction(1, 2), context.exception.time)

    def test_forbidden_policy_rejects_disjoint_pairs(self):
        state = SystemState.of((0, 1, 2, 3), (1, 0, 1, 0), numeric=EXACT)
        config = SimConfig().exact().simultaneity(Simultaneity.forbidden)
        with self.assertRaises(MultipleCollisionException):
            step(state, MassProfile.of((1, 1, 1, 1), EXACT), config)

    def test_disjoint_pairs_commute(self):
        masses = MassProfile.of((1, 2, 3, 5), EXACT)
        state = SystemState.of((0, 1, 2, 3), (1, 0, 1, 0), numeric=EXACT)
        new_state, event = step(state, masses, SimConfig().exact())
        self.assertEqual((1, 3), event.pairs)

        velocities = list(state.velocities)
        for i in reversed(event.pairs):
            left, right = velocities[i - 1], velocities[i]
            velocities[i - 1], velocities[i] = collide(masses[i - 1], masses[i], left, right, EXACT)
        self.assertEqual(tuple(velocities), new_state.velocities)


class SimulateTests(unittest.TestCase):
    """Full runs."""

    def test_sorted_velocities_do_not_collide(self):
        trace = simulate(SystemState.of((0, 1, 2), (-1, 0, 1)), MassProfile.of((1, 1, 1)))
        self.assertEqual(0, total_collisions(trace))
        self.assertIs(Termination.sorted, trace.termination)

    def test_equal_masses_full_inversion(self):
        trace = simulate(
            SystemState.of((0, 1, 3), (1, 0, -1)), MassProfile.of((1, 1, 1)), SimConfig().exact()
        )
        self.assertEqual(3, total_collisions(trace))
        self.assertEqual([1, Fraction(3, 2), 2], [event.time for event in trace.events])
        self.assertEqual((-1, 0, 1), trace.final.velocities)

    def test_disjoint_pairs_count_twice(self):
        trace = simulate(
            SystemState.of((0, 1, 2, 3), (1, 0, 1, 0)), MassProfile.of((1, 1, 1, 1)), SimConfig().exact()
        )
        self.assertEqual(2, len(trace.events))
        self.assertEqual(3, total_collisions(trace))

    def test_light_middle_ball_exceeds_three(self):
        trace = simulate(
            SystemState.of((0, 1, 3), (1, 0, -1)), MassProfile.of((1, "1/100", 1)), SimConfig().exact()
        )
        self.assertIs(Termination.sorted, trace.termination)
        self.assertGreater(total_collisions(trace), 3)

    def test_triple_collision_carries_partial_trace(self):
        with self.assertRaises(MultipleCollisionException) as context:
            simulate(SystemState.of((0, 1, 2), (1, 0, -1)), MassProfile.of((1, 1, 1)), SimConfig().exact())

        trace = context.exception.trace
        self.assertIs(Termination.multiple_collision, trace.termination)
        self.assertEqual(0, len(trace.events))

    def test_event_cap(self):
        config = SimConfig().exact().cap(2)
        trace = simulate(SystemState.of((0, 1, 3), (1, 0, -1)), MassProfile.of((1, "1/100", 1)), config)
        self.assertIs(Termination.event_cap_reached, trace.termination)
        self.assertEqual(2, len(trace.events))

    def test_unordered_positions(self):
        with self.assertRaises(StateException):
            simulate(SystemState.of((0, 2, 1), (1, 0, -1)), MassProfile.of((1, 1, 1)))

    def test_exact_runs_are_deterministic(self):
        state = SystemState.of((0, 1, 3), (1, 0, -1))
        masses = MassProfile.of((1, "1/100", 1))
        self.assertEqual(simulate(state, masses, SimConfig().exact()), simulate(state, masses, SimConfig().exact()))

    def test_float_matches_exact(self):
        state = SystemState.of((0, 1, 3), (1, 0, -1))
        masses = MassProfile.of((1, "1/100", 1))
        exact = simulate(state, masses, SimConfig().exact())
        floating = simulate(state, masses, SimConfig())
        self.assertEqual(total_collisions(exact), total_collisions(floating))
        for a, b in zip(exact.final.velocities, floating.final.velocities):
            self.assertAlmostEqual(float(a), b, places=9)


class ConservationTests(unittest.TestCase):
    """Momentum and kinetic energy survive every run."""

    def test_exact_mode_is_exact(self):
        masses = MassProfile.of((3, "1/7", 2, 5), EXACT)
        try:
            trace = simulate(SystemState.of((0, 1, 3, 6), (2, -1, 1, -3)), masses, SimConfig().exact())
        except MultipleCollisionException as exc:
            trace = exc.trace

        self.assertEqual((0, 0), conservation_residuals(trace, masses, EXACT))
        p0, e0 = momentum(masses, trace.initial.velocities), kinetic_energy(masses, trace.initial.velocities)
        for velocities in trace.velocity_history():
            self.assertEqual(p0, momentum(masses, velocities))
            self.assertEqual(e0, kinetic_energy(masses, velocities))

    def test_float_mode_within_relative_tolerance(self):
        rng = np.random.default_rng(11)
        for trial in range(50):
            masses = MassProfile.of(np.exp(rng.uniform(-2.0, 2.0, size=5)).tolist())
            positions = np.cumsum(rng.uniform(0.5, 1.5, size=5)).tolist()
            state = SystemState.of(positions, rng.uniform(-3.0, 3.0, size=5).tolist())
            with self.subTest(trial=trial):
                trace = simulate(state, masses)
                p_drift, e_drift = conservation_residuals(trace, masses, FLOAT)
                self.assertLess(p_drift, 1e-8)
                self.assertLess(e_drift, 1e-8)


class SimConfigTests(unittest.TestCase):
    """Builder methods return modified copies."""

    def test_builders_return_new_instances(self):
        base = SimConfig()
        exact = base.exact()
        capped = exact.cap(10)

        self.assertIsNot(base, exact)
        self.assertFalse(base.numeric.is_exact)
        self.assertTrue(exact.numeric.is_exact)
        self.assertIsNone(exact.max_events)
        self.assertEqual(10, capped.max_events)

    def test_policy(self):
        config = SimConfig().simultaneity(Simultaneity.forbidden)
        self.assertIs(Simultaneity.error_on_adjacent, SimConfig().policy)
        self.assertIs(Simultaneity.forbidden, config.policy)

    def test_floating_tolerance(self):
        self.assertEqual(1e-6, SimConfig().exact().floating(1e-6).numeric.tol)

    def test_default_cap_grows_with_bound(self):
        self.assertEqual(default_max_events(4), SimConfig().max_events_for(4))
        self.assertEqual(200, default_max_events(4))

    def test_cap_must_be_positive(self):
        with self.assertRaises(ValueError):
            SimConfig().cap(0)
        with self.assertRaises(ValueError):
            SimConfig(max_events=0)
