import numpy as np
from numpy.testing import assert_allclose
from django.test import SimpleTestCase

from project.exceptions import ConfigurationError, InputError, UnsupportedGameError
from equilibrium.services import EquilibriumService
from games.families import BilinearZeroSum, KellyAuction, OnlineLinear, QuadraticNetwork
from games.sequences import GameSequence
from learner.schedules import StepSchedule
from learner.services import LearnerService
from metrics.enums import Target
from metrics.fits import fit_rate
from metrics.services import MetricsService
from metrics.trace import RunTrace
from oracles.schedules import NoiseSchedule, SpsaConfig
from oracles.signals import FeedbackSignal


def trace_from(sequence, actions, steps=None, regularizer='euclidean'):
    """A trace that replays the given per-player action arrays."""
    actions = [np.asarray(a, dtype=float) for a in actions]
    horizon = actions[0].shape[0]
    steps = np.ones(horizon) if steps is None else np.asarray(steps, dtype=float)
    regularizers = LearnerService.regularizers_for(regularizer, sequence.action_sets)
    trace = RunTrace(sequence, regularizers, horizon, seed=0)
    for n in range(1, horizon + 1):
        profile = tuple(a[n - 1] for a in actions)
        trace.record(n, profile, FeedbackSignal(signal=tuple(np.zeros_like(x) for x in profile)), steps[n - 1])
    return trace


def static_network():
    return GameSequence.static(
        QuadraticNetwork(mu=1.0, beta=0.2, anchors=[[0.4, 0.5], [0.5, 0.6], [0.7, 0.4]])
    )


def drifting_network(players=3):
    anchors = [[0.4, 0.5], [0.5, 0.6], [0.7, 0.4]][:players]
    base = QuadraticNetwork(mu=1.0, beta=0.2, anchors=anchors)
    return GameSequence.drifting(base, v=0.5, scale=0.05, radius=0.1)


def noisy_run(sequence, horizon=300, seed=1, regularizer='euclidean'):
    noise = NoiseSchedule(b0=0.2, lb=0.5, sigma0=0.5)
    return LearnerService.run_gradient(sequence, regularizer, StepSchedule.power(0.5, 0.5), noise, horizon, seed)


class TraceTests(SimpleTestCase):

    def test_frame_columns(self):
        trace = noisy_run(drifting_network(players=2), horizon=20)
        frame = trace.to_frame()
        self.assertEqual(len(frame), 20)
        self.assertEqual(
            list(frame.columns),
            ['n', 'gamma', 'x0_0', 'x0_1', 'x1_0', 'x1_1', 'bias_norm', 'noise_norm'],
        )

    def test_window_bounds(self):
        trace = noisy_run(static_network(), horizon=10)
        self.assertEqual(trace.window((3, 10)), slice(2, 10))
        with self.assertRaises(InputError) as raised:
            trace.window((0, 5))
        self.assertEqual(raised.exception.code, 'input')
        with self.assertRaises(InputError):
            trace.window((4, 11))
        with self.assertRaises(InputError):
            MetricsService.static_regret(trace, 0, window=(5, 4))

    def test_gradients_are_recomputed_when_not_reported(self):
        reported = noisy_run(static_network(), horizon=30)
        replayed = trace_from(static_network(), reported.actions)
        for a, b in zip(reported.gradients, replayed.gradients):
            assert_allclose(a, b, atol=1e-14)


class GapTests(SimpleTestCase):

    def test_linear_gap(self):
        trace = trace_from(GameSequence.static(OnlineLinear([1.0, 3.0])), [[[0.5, 0.5]]])
        self.assertAlmostEqual(MetricsService.gap(trace, 0), 1.0)

    def test_zero_gradients(self):
        trace = trace_from(GameSequence.static(OnlineLinear([0.0, 0.0])), [np.full((5, 2), 0.5)])
        self.assertEqual(MetricsService.gap(trace, 0), 0.0)

    def test_gap_dominates_every_fixed_deviation(self):
        trace = noisy_run(drifting_network())
        rng = np.random.default_rng(3)
        for i in range(trace.players):
            gap = MetricsService.gap(trace, i)
            summed = trace.gradients[i].sum(axis=0)
            played = np.sum(trace.gradients[i] * trace.actions[i])
            for x in trace.sequence.action_sets[i].sample(rng, 100):
                self.assertGreaterEqual(gap + 1e-12, summed @ x - played)

    def test_cumulative_gap_ends_at_the_gap(self):
        trace = noisy_run(drifting_network())
        series = MetricsService.cumulative_gap(trace, 1)
        self.assertEqual(series.shape, (300,))
        self.assertAlmostEqual(series[-1], MetricsService.gap(trace, 1))
        self.assertAlmostEqual(series[99], MetricsService.gap(trace, 1, (1, 100)))


class RegretTests(SimpleTestCase):

    def quadratic(self):
        return GameSequence.static(QuadraticNetwork(mu=2.0, beta=0.0, anchors=[[0.5]]))

    def test_static_regret_of_a_fixed_wrong_action(self):
        trace = trace_from(self.quadratic(), [np.zeros((10, 1))])
        self.assertAlmostEqual(MetricsService.static_regret(trace, 0), 2.5)

    def test_best_fixed_action_has_no_regret(self):
        trace = trace_from(self.quadratic(), [np.full((10, 1), 0.5)])
        self.assertAlmostEqual(MetricsService.static_regret(trace, 0), 0.0)

    def assert_regret_ordering(self, trace):
        for i in range(trace.players):
            regret = MetricsService.static_regret(trace, i)
            self.assertLessEqual(regret, MetricsService.gap(trace, i) + 1e-6)
            self.assertGreaterEqual(MetricsService.dynamic_regret(trace, i), regret - 1e-9)

    def test_regret_ordering_on_drifting_runs(self):
        self.assert_regret_ordering(noisy_run(drifting_network()))

    def test_regret_ordering_with_ascent_comparator(self):
        kelly = KellyAuction(gains=[3.0, 3.0, 3.0], capacity=1.0, barrier=0.5, budgets=[1.0, 2.0, 1.5])
        self.assert_regret_ordering(noisy_run(GameSequence.static(kelly), horizon=200))

    def test_regret_ordering_under_stabilization(self):
        base = QuadraticNetwork(mu=2.0, beta=0.3, anchors=[[0.4], [0.6]])
        sequence = GameSequence.stabilizing(base, v=0.5, beta0=0.5)
        self.assert_regret_ordering(noisy_run(sequence, horizon=200))

    def test_regret_ordering_in_zero_sum_runs(self):
        sequence = GameSequence.static(BilinearZeroSum([[1.2, -1.0], [-1.0, 1.0]]))
        self.assert_regret_ordering(noisy_run(sequence, horizon=200, regularizer='entropic'))

    def test_ascent_comparator_matches_the_closed_form(self):
        trace = noisy_run(drifting_network(), horizon=100)
        profile = tuple(x for x in trace.actions)
        game = trace.sequence.stage_batch(trace.stages)
        for i in range(trace.players):
            assert_allclose(
                MetricsService._summed_ascent(game, i, profile),
                game.summed_best_response(i, profile),
                atol=1e-6,
            )

    def test_constant_payoffs_make_both_regrets_equal(self):
        sequence = GameSequence.static(OnlineLinear(np.linspace(0.0, 1.0, 5)))
        trace = noisy_run(sequence, horizon=200, regularizer='entropic')
        self.assertAlmostEqual(MetricsService.dynamic_regret(trace, 0), MetricsService.static_regret(trace, 0))

    def test_dynamic_regret_of_frozen_play(self):
        base = QuadraticNetwork(mu=1.0, beta=0.0, anchors=[[0.5, 0.5]])
        sequence = GameSequence.drifting(base, v=0.5, scale=0.05, radius=0.1)
        horizon = 50
        first = sequence.anchors_at(1)[0]
        trace = trace_from(sequence, [np.tile(first, (horizon, 1))])
        expected = sum(0.5 * np.sum((sequence.anchors_at(n)[0] - first) ** 2) for n in range(1, horizon + 1))
        self.assertAlmostEqual(MetricsService.dynamic_regret(trace, 0), expected)
        assert_allclose(MetricsService.cumulative_dynamic_regret(trace, 0)[-1], expected)


class TrackingTests(SimpleTestCase):

    def test_equilibrium_play_has_no_tracking_error(self):
        sequence = drifting_network()
        path = MetricsService.reference_path(sequence, 40)
        trace = trace_from(sequence, path)
        self.assertAlmostEqual(MetricsService.tracking_error(trace), 0.0)

    def test_constant_offset(self):
        sequence = GameSequence.static(QuadraticNetwork(mu=1.0, beta=0.0, anchors=[[0.5]]))
        trace = trace_from(sequence, [np.full((100, 1), 0.6)])
        self.assertAlmostEqual(MetricsService.tracking_error(trace), 1.0)

    def test_additivity(self):
        trace = noisy_run(drifting_network(), horizon=200)
        whole = MetricsService.tracking_error(trace, (1, 200))
        halves = MetricsService.tracking_error(trace, (1, 100)) + MetricsService.tracking_error(trace, (101, 200))
        self.assertAlmostEqual(whole, halves)

    def test_realized_variant_on_bandit_runs(self):
        trace = LearnerService.run_bandit(
            drifting_network(players=2), 'euclidean', StepSchedule.power(0.5, 0.3), SpsaConfig(0.1, 0.1), 100, seed=2
        )
        candidate = MetricsService.squared_tracking_errors(trace)
        realized = MetricsService.squared_tracking_errors(trace, realized=True)
        self.assertTrue(np.all(realized >= 0))
        self.assertFalse(np.allclose(candidate, realized))

    def test_stabilizing_runs_track_the_limit(self):
        base = QuadraticNetwork(mu=2.0, beta=0.3, anchors=[[0.4], [0.6]])
        sequence = GameSequence.stabilizing(base, v=0.5, beta0=0.5)
        path = MetricsService.reference_path(sequence, 5)
        limit = EquilibriumService.limit_equilibrium(sequence)
        for stage_points, point in zip(path, limit):
            assert_allclose(stage_points, np.tile(point, (5, 1)))

    def test_non_unique_equilibria_are_unsupported(self):
        sequence = GameSequence.static(BilinearZeroSum([[1.0, -1.0], [-1.0, 1.0]]))
        trace = trace_from(sequence, [np.full((3, 2), 0.5), np.full((3, 2), 0.5)])
        with self.assertRaises(UnsupportedGameError):
            MetricsService.tracking_error(trace)


class VariationTests(SimpleTestCase):

    def test_static_sequence(self):
        self.assertEqual(MetricsService.equilibrium_variation(static_network(), 100), 0.0)

    def test_variation_is_the_end_of_its_series(self):
        sequence = drifting_network()
        series = MetricsService.cumulative_equilibrium_variation(sequence, 500)
        self.assertAlmostEqual(series[-1], MetricsService.equilibrium_variation(sequence, 500))
        self.assertAlmostEqual(series[199] + np.sum(MetricsService.equilibrium_steps(sequence, 500)[200:]), series[-1])

    def test_drift_exponent(self):
        series = MetricsService.cumulative_equilibrium_variation(drifting_network(), 100_000)
        self.assertAlmostEqual(MetricsService.fit_rate(series).slope, 0.5, delta=0.05)


class FitRateTests(SimpleTestCase):

    def test_exact_power_law(self):
        n = np.arange(1, 1001)
        fit = fit_rate(3.0 * n ** 2)
        self.assertAlmostEqual(fit.slope, 2.0, delta=1e-9)
        self.assertAlmostEqual(fit.intercept, np.log(3.0), delta=1e-9)
        self.assertEqual(fit.window, (500.0, 1000.0))

    def test_perturbed_power_law(self):
        n = np.arange(1, 100_001)
        fit = fit_rate(n ** 0.83 * (1 + 0.1 * np.sin(n)))
        self.assertAlmostEqual(fit.slope, 0.83, delta=0.03)

    def test_constant_series(self):
        self.assertAlmostEqual(fit_rate(np.full(200, 4.0)).slope, 0.0)

    def test_indexed_fit_uses_every_point(self):
        horizons = [1_000, 10_000, 100_000]
        fit = MetricsService.fit_rate(5.0 * np.sqrt(horizons), index=horizons)
        self.assertAlmostEqual(fit.slope, 0.5)
        self.assertAlmostEqual(fit.r_squared, 1.0)

    def test_non_positive_series(self):
        with self.assertRaises(InputError):
            fit_rate(np.array([1.0, 2.0, 0.0, 3.0]), window=(1, 4))

    def test_window_needs_two_points(self):
        with self.assertRaises(InputError):
            fit_rate(np.ones(10), window=(3, 3))


class BregmanTests(SimpleTestCase):

    def test_equilibrium_play(self):
        sequence = static_network()
        point = EquilibriumService.limit_equilibrium(sequence)
        trace = trace_from(sequence, [np.tile(x, (20, 1)) for x in point])
        assert_allclose(MetricsService.bregman_to_ne(trace), np.zeros(20), atol=1e-20)

    def test_convergent_run(self):
        trace = LearnerService.run_gradient(
            static_network(), 'euclidean', StepSchedule.power(1.0, 0.6), NoiseSchedule.perfect(), 2000, seed=0
        )
        series = MetricsService.bregman_to_ne(trace)
        self.assertTrue(np.all(np.isfinite(series)))
        self.assertTrue(np.all(series >= 0))
        self.assertLessEqual(series[-100:].max(), 1e-3)

    def test_drifting_sequences_have_no_limit(self):
        trace = noisy_run(drifting_network(), horizon=10)
        with self.assertRaises(UnsupportedGameError):
            MetricsService.bregman_to_ne(trace)


class ErgodicTests(SimpleTestCase):

    def test_constant_trace(self):
        sequence = static_network()
        actions = [np.tile([0.3, 0.2], (10, 1))] * 3
        trace = trace_from(sequence, actions, steps=np.linspace(1.0, 0.1, 10))
        for average in MetricsService.ergodic_average(trace):
            assert_allclose(average, np.tile([0.3, 0.2], (10, 1)))

    def test_alternating_trace(self):
        sequence = GameSequence.static(QuadraticNetwork(mu=1.0, beta=0.0, anchors=[[0.5, 0.5]]))
        a, b = np.array([0.1, 0.9]), np.array([0.7, 0.3])
        trace = trace_from(sequence, [np.array([a, b] * 6)])
        average = MetricsService.ergodic_average(trace)[0]
        for m in range(1, 7):
            assert_allclose(average[2 * m - 1], (a + b) / 2)

    def test_zero_sum_average_approaches_the_saddle_point(self):
        sequence = GameSequence.static(BilinearZeroSum([[1.2, -1.0], [-1.0, 1.0]]))
        trace = LearnerService.run_gradient(
            sequence, 'entropic', StepSchedule.power(1.0, 0.5), NoiseSchedule.perfect(), 10_000, seed=0
        )
        average = tuple(x[-1] for x in MetricsService.ergodic_average(trace))
        self.assertLessEqual(EquilibriumService.saddle_gap(sequence.base, average), 0.05)


class BoundTests(SimpleTestCase):

    def test_tuned_bound_is_the_bound_at_the_tuned_step(self):
        horizon, moment, depth = 10_000, np.sqrt(2.0), np.log(10)
        step = StepSchedule.tuned_constant(horizon, moment, 1.0, depth).gamma(1)
        general = MetricsService.regret_bound(horizon, step, depth, 1.0, np.sqrt(2.0), 0.0, moment)
        self.assertAlmostEqual(general, MetricsService.tuned_regret_bound(horizon, moment, 1.0, depth))

    def test_online_linear_run_respects_the_bound(self):
        sequence = GameSequence.static(OnlineLinear(np.linspace(0.0, 1.0, 10)))
        regularizers = LearnerService.regularizers_for('entropic', sequence.action_sets)
        noise = NoiseSchedule(sigma0=1.0)
        moment = MetricsService.second_moment(sequence, regularizers, noise)
        self.assertAlmostEqual(moment, np.sqrt(2.0))
        horizon, depth = 2000, np.log(10)
        step = StepSchedule.tuned_constant(horizon, moment, 1.0, depth)
        for seed in range(3):
            trace = LearnerService.run_gradient(sequence, 'entropic', step, noise, horizon, seed)
            self.assertLessEqual(
                MetricsService.static_regret(trace, 0),
                MetricsService.tuned_regret_bound(horizon, moment, 1.0, depth),
            )

    def test_predicted_exponents(self):
        self.assertAlmostEqual(
            MetricsService.predicted_exponent(Target.TRACKING, {'p': 1 / 6, 's': 0.0, 'v': 0.5}), 5 / 6
        )
        self.assertAlmostEqual(
            MetricsService.predicted_exponent(Target.BANDIT_TRACKING, {'p': 0.3, 'q': 0.1, 'v': 0.5}), 0.9
        )
        self.assertAlmostEqual(
            MetricsService.predicted_exponent(Target.DYNAMIC_REGRET, {'p': 0.3, 's': 0.0, 'lb': 0.2, 'v': 0.1}), 0.8
        )
        self.assertEqual(MetricsService.predicted_exponent(Target.REGRET, {}), 0.5)
        self.assertIsNone(MetricsService.predicted_exponent(Target.CONVERGENCE, {'p': 0.9}))
        with self.assertRaises(ConfigurationError):
            MetricsService.predicted_exponent('speedup', {})
