import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from django.test import SimpleTestCase, tag

from project.exceptions import ConfigurationError, RunAbortedError
from games.families import BilinearZeroSum, QuadraticNetwork
from games.sequences import GameSequence
from geometry.profiles import as_profile
from geometry.regularizers import EntropicRegularizer, EuclideanRegularizer
from geometry.sets import ActionSet
from learner.schedules import StepSchedule
from learner.services import LearnerService
from learner.state import RunState
from oracles.schedules import NoiseSchedule, SpsaConfig
from oracles.services import OracleService
from oracles.signals import FeedbackSignal
from oracles.streams import RandomStreams

MATCHING_PENNIES = [[1.0, -1.0], [-1.0, 1.0]]


def single_quadratic(anchor=0.5, mu=1.0):
    return GameSequence.static(QuadraticNetwork(mu=mu, beta=0.0, anchors=[[anchor]]))


def network_sequence():
    base = QuadraticNetwork(mu=1.0, beta=0.2, anchors=[[0.4, 0.5], [0.5, 0.6], [0.7, 0.4]])
    return GameSequence.drifting(base, v=0.5, scale=0.05, radius=0.1)


def assert_same_actions(first, second):
    for a, b in zip(first.actions, second.actions):
        assert_array_equal(a, b)


class StepScheduleTests(SimpleTestCase):

    def test_power_schedule(self):
        schedule = StepSchedule.power(2.0, 0.5)
        self.assertAlmostEqual(schedule.gamma(100), 0.2)
        assert_allclose(schedule.gamma([1, 4]), [2.0, 1.0])

    def test_inverse_log_is_finite_at_the_first_stage(self):
        schedule = StepSchedule.inverse_log(1.0)
        self.assertAlmostEqual(schedule.gamma(1), 1.0 / np.log(1.0 + np.e))

    def test_schedules_are_positive_and_nonincreasing(self):
        ns = np.arange(1, 10_001)
        for schedule in (StepSchedule.constant(0.3), StepSchedule.power(1.0, 1.0), StepSchedule.inverse_log(0.5)):
            gammas = schedule.gamma(ns)
            self.assertTrue(np.all(gammas > 0))
            self.assertTrue(np.all(np.diff(gammas) <= 0))

    def test_tuned_constant(self):
        schedule = StepSchedule.tuned_constant(horizon=10_000, second_moment=2.0, modulus=1.0, depth=np.log(10))
        self.assertAlmostEqual(schedule.gamma(7), np.sqrt(np.log(10) / 10_000))

    def test_invalid_schedules(self):
        with self.assertRaises(ConfigurationError):
            StepSchedule.power(1.0, 1.5)
        with self.assertRaises(ConfigurationError):
            StepSchedule.constant(0.0)
        with self.assertRaises(ConfigurationError):
            StepSchedule('sometimes', 1.0)


class ProxStepTests(SimpleTestCase):

    def step(self, reg, action_set, x, y):
        state = RunState(n=1, actions=as_profile((x,)))
        feedback = FeedbackSignal(signal=as_profile((y,)))
        return LearnerService.prox_learn_step(state, (reg,), (action_set,), feedback, 1.0)

    def test_zero_signal_keeps_the_action(self):
        result = self.step(EuclideanRegularizer(), ActionSet.simplex(3), [0.2, 0.3, 0.5], [0.0, 0.0, 0.0])
        assert_array_equal(result.actions[0], [0.2, 0.3, 0.5])
        self.assertEqual(result.n, 2)

    def test_entropic_step(self):
        result = self.step(EntropicRegularizer(), ActionSet.simplex(2), [0.5, 0.5], [np.log(2), 0.0])
        assert_allclose(result.actions[0], [2 / 3, 1 / 3])

    def test_euclidean_step_clamps(self):
        result = self.step(EuclideanRegularizer(), ActionSet.box([0.0], [1.0]), [0.9], [0.3])
        assert_allclose(result.actions[0], [1.0])

    def test_non_finite_signal_aborts(self):
        with self.assertRaises(RunAbortedError) as raised:
            self.step(EuclideanRegularizer(), ActionSet.box([0.0], [1.0]), [0.9], [np.inf])
        self.assertEqual(raised.exception.stage, 1)

    def test_gradient_step_has_no_realized_profile(self):
        result = self.step(EuclideanRegularizer(), ActionSet.box([0.0], [1.0]), [0.4], [0.1])
        self.assertIsNone(result.realized)

    def test_bandit_step_keeps_the_realized_profile(self):
        sequence = network_sequence()
        action_sets = sequence.action_sets
        regularizers = LearnerService.regularizers_for('euclidean', action_sets)
        geometry = SpsaConfig(delta0=0.1, q=0.2).resolve(action_sets)
        streams = RandomStreams(4, sequence.players)
        state = LearnerService.initial_state(regularizers, action_sets)
        self.assertIsNone(state.realized)

        feedback = OracleService.spsa_feedback(sequence.stage(1), state.actions, geometry, 1, streams)
        result = LearnerService.prox_learn_step(state, regularizers, action_sets, feedback, 0.5)
        self.assertEqual(result.n, 2)
        bound = geometry.displacement_constant * float(geometry.delta(1))
        for action_set, x, x_hat, played in zip(action_sets, state.actions, result.realized, feedback.realized):
            assert_array_equal(x_hat, played)
            self.assertTrue(action_set.contains(x_hat))
            self.assertLessEqual(float(np.linalg.norm(x_hat - x)), bound + 1e-12)

    def test_final_actions(self):
        sequence = GameSequence.static(BilinearZeroSum(MATCHING_PENNIES))
        trace = LearnerService.run_bandit(sequence, 'entropic', StepSchedule.power(0.5, 0.7),
                                          SpsaConfig(delta0=0.1, q=0.2), 20, seed=3)
        for final, hat, x, x_hat in zip(LearnerService.final_actions(trace),
                                        LearnerService.final_actions(trace, realized=True),
                                        trace.actions, trace.realized):
            assert_array_equal(final, x[-1])
            assert_array_equal(hat, x_hat[-1])


class GradientRunTests(SimpleTestCase):

    def test_geometric_contraction(self):
        trace = LearnerService.run_gradient(
            single_quadratic(), 'euclidean', StepSchedule.constant(0.5), NoiseSchedule.perfect(), 21, seed=0
        )
        errors = np.abs(trace.actions[0][:, 0] - 0.5)
        self.assertEqual(errors[0], 0.5)
        assert_allclose(errors, 0.5 ** np.arange(1, 22), rtol=1e-12)
        # twenty steps after X_1
        self.assertLessEqual(errors[20], 0.5 ** 20 * errors[0])

    def test_single_stage(self):
        trace = LearnerService.run_gradient(
            single_quadratic(), 'euclidean', StepSchedule.constant(0.5), NoiseSchedule.perfect(), 1, seed=0
        )
        self.assertEqual(trace.horizon, 1)
        assert_array_equal(trace.actions[0], [[0.0]])

    def test_entropic_start_is_the_barycenter(self):
        sequence = GameSequence.static(BilinearZeroSum([[1.0, 0.0, 2.0], [0.5, -1.0, 0.0]]))
        trace = LearnerService.run_gradient(sequence, 'entropic', StepSchedule.power(1.0, 0.5), NoiseSchedule.perfect(), 1, 0)
        assert_allclose(trace.actions[1][0], [1 / 3] * 3)

    def test_horizon_must_be_positive(self):
        with self.assertRaises(ConfigurationError):
            LearnerService.run_gradient(single_quadratic(), 'euclidean', StepSchedule.constant(0.5), NoiseSchedule(), 0, 0)

    def test_determinism(self):
        noise = NoiseSchedule(b0=0.3, lb=0.5, sigma0=0.5, s=0.1)
        runs = [
            LearnerService.run_gradient(network_sequence(), 'euclidean', StepSchedule.power(0.5, 0.5), noise, 300, seed=4)
            for _ in range(2)
        ]
        assert_same_actions(*runs)
        assert_array_equal(runs[0].noise_norms, runs[1].noise_norms)

    def test_learner_only_reads_the_signal(self):
        noise = NoiseSchedule(b0=0.3, lb=0.5, sigma0=0.5)
        args = (network_sequence(), 'euclidean', StepSchedule.power(0.5, 0.5), noise, 300, 9)
        full = LearnerService.run_gradient(*args)
        stripped = LearnerService.run_gradient(*args, strip_diagnostics=True)
        assert_same_actions(full, stripped)
        # the stripped trace recomputes the cached gradients
        for a, b in zip(full.gradients, stripped.gradients):
            assert_allclose(a, b, atol=1e-14)

    def test_actions_stay_feasible(self):
        sequence = GameSequence.static(BilinearZeroSum(MATCHING_PENNIES))
        for kind in ('euclidean', 'entropic'):
            trace = LearnerService.run_gradient(sequence, kind, StepSchedule.constant(0.5), NoiseSchedule(sigma0=3.0), 500, 1)
            for action_set, x in zip(sequence.action_sets, trace.actions):
                self.assertTrue(action_set.contains(x))

    def test_quasi_descent_along_perfect_runs(self):
        cases = (
            (GameSequence.static(QuadraticNetwork(mu=1.0, beta=0.2, anchors=[[0.4], [0.5], [0.7]])), 'euclidean'),
            (GameSequence.static(BilinearZeroSum(MATCHING_PENNIES)), 'entropic'),
        )
        for sequence, kind in cases:
            trace = LearnerService.run_gradient(sequence, kind, StepSchedule.power(0.8, 0.6), NoiseSchedule.perfect(), 200, 0)
            if kind == 'entropic':
                equilibrium = (np.array([0.5, 0.5]), np.array([0.5, 0.5]))
            else:
                equilibrium = sequence.base.closed_form_equilibrium()
            regs = trace.regularizers
            divergence = sum(reg.bregman(p, x) for reg, p, x in zip(regs, equilibrium, trace.actions))
            gammas = trace.steps[:-1]
            drift = sum(np.sum(v * (x - p), axis=-1) for v, x, p in zip(trace.gradients, trace.actions, equilibrium))[:-1]
            dual = sum(reg.dual_norm(v) ** 2 for reg, v in zip(regs, trace.gradients))[:-1]
            bound = divergence[:-1] + gammas * drift + gammas ** 2 * dual / 2.0
            with self.subTest(regularizer=kind):
                self.assertTrue(np.all(divergence[1:] <= bound + 1e-12))

    def test_auxiliary_process(self):
        """Y_{n+1} = prox(Y_n, -γ_n ξ_n) stays put without noise and obeys its energy bound with noise."""
        sequence = GameSequence.static(QuadraticNetwork(mu=1.0, beta=0.0, anchors=[[0.3, 0.6]]))
        reg, action_set = EuclideanRegularizer(), sequence.action_sets[0]
        steps = StepSchedule.power(0.5, 0.6)
        rng = np.random.default_rng(3)
        comparators = action_set.sample(rng, 200)
        for noise in (NoiseSchedule.perfect(), NoiseSchedule(sigma0=0.7)):
            streams = RandomStreams(21, 1)
            state = LearnerService.initial_state((reg,), (action_set,))
            start = auxiliary = np.array(state.actions[0])
            lhs = np.zeros(len(comparators))
            rhs = reg.bregman(comparators, start)
            for n in range(1, 301):
                feedback = OracleService.sfo_feedback(sequence.stage(n), state.actions, noise, n, streams)
                gamma = steps.gamma(n)
                xi = feedback.noise[0] if feedback.noise is not None else np.zeros(2)
                lhs += gamma * (auxiliary - comparators) @ xi
                rhs += gamma ** 2 * np.dot(xi, xi) / 2.0
                auxiliary = reg.prox(action_set, auxiliary, -gamma * xi)
                state = LearnerService.prox_learn_step(state, (reg,), (action_set,), feedback, gamma)
            with self.subTest(perfect=noise.is_perfect):
                if noise.is_perfect:
                    assert_array_equal(auxiliary, start)
                self.assertTrue(np.all(lhs <= rhs + 1e-12))
            # the manual loop reproduces the service
            trace = LearnerService.run_gradient(sequence, 'euclidean', steps, noise, 301, seed=21)
            assert_allclose(trace.actions[0][-1], state.actions[0], atol=0)


class BanditRunTests(SimpleTestCase):

    def test_realized_actions_are_feasible_and_close(self):
        sequence = GameSequence.static(BilinearZeroSum([[1.0, 0.0, 2.0], [0.5, -1.0, 0.0]]))
        spsa = SpsaConfig(delta0=0.2, q=0.3)
        for kind in ('euclidean', 'entropic'):
            trace = LearnerService.run_bandit(sequence, kind, StepSchedule.power(0.5, 0.7), spsa, 500, seed=2)
            constant = spsa.resolve(sequence.action_sets).displacement_constant
            distance = np.sqrt(sum(np.sum((a - b) ** 2, axis=-1) for a, b in zip(trace.realized, trace.actions)))
            with self.subTest(regularizer=kind):
                for action_set, x, x_hat in zip(sequence.action_sets, trace.actions, trace.realized):
                    self.assertTrue(action_set.contains(x))
                    self.assertTrue(action_set.contains(x_hat))
                self.assertTrue(np.all(distance <= constant * trace.deltas + 1e-12))

    def test_determinism_and_information_boundary(self):
        args = (network_sequence(), 'euclidean', StepSchedule.power(0.5, 0.5), SpsaConfig(0.1, 0.2), 300, 5)
        first = LearnerService.run_bandit(*args)
        second = LearnerService.run_bandit(*args)
        stripped = LearnerService.run_bandit(*args, strip_diagnostics=True)
        assert_same_actions(first, second)
        assert_same_actions(first, stripped)
        for a, b in zip(first.realized, stripped.realized):
            assert_array_equal(a, b)

    def test_unsafe_radius_is_rejected(self):
        with self.assertRaises(ConfigurationError):
            LearnerService.run_bandit(single_quadratic(), 'euclidean', StepSchedule.constant(0.1),
                                      SpsaConfig(0.6, 0.2), 10, 0)

    @tag('acceptance')
    def test_single_player_bandit_convergence(self):
        sequence = single_quadratic(anchor=0.3)
        trace = LearnerService.run_bandit(
            sequence, 'euclidean', StepSchedule.power(1.0, 0.75), SpsaConfig(delta0=0.1, q=0.2), 200_000, seed=0
        )
        self.assertLessEqual(abs(trace.realized[0][-1, 0] - 0.3), 0.05)
