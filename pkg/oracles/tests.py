import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from django.test import SimpleTestCase, tag

from project.exceptions import ConfigurationError
from games.families import BilinearZeroSum, QuadraticNetwork
from geometry.profiles import as_profile, joint_distance
from geometry.sets import ActionSet
from oracles.schedules import NoiseSchedule, SpsaConfig
from oracles.services import OracleService
from oracles.streams import RandomStreams

DRAWS = 100_000


def slope(xs, ys):
    return np.polyfit(np.log(xs), np.log(ys), 1)[0]


class NoiseScheduleTests(SimpleTestCase):

    def test_bias_schedule(self):
        schedule = NoiseSchedule(b0=0.5, lb=1.0)
        self.assertAlmostEqual(schedule.bias(25), 0.02)
        self.assertEqual(NoiseSchedule(b0=0.5).bias(25), 0.0)

    def test_noise_scale_grows_with_s(self):
        schedule = NoiseSchedule(sigma0=0.5, s=0.25)
        self.assertAlmostEqual(schedule.sigma(16), 1.0)

    def test_rejects_negative_parameters(self):
        with self.assertRaises(ConfigurationError):
            NoiseSchedule(sigma0=-1.0)
        with self.assertRaises(ConfigurationError):
            NoiseSchedule(b0=1.0, lb=-0.5)


class SfoTests(SimpleTestCase):

    def setUp(self):
        self.game = QuadraticNetwork(mu=1.0, beta=0.2, anchors=[[0.3, 0.6], [0.5, 0.5]])
        self.x = as_profile(([0.1, 0.9], [0.4, 0.2]))

    def test_perfect_oracle_returns_the_gradient(self):
        signal = OracleService.sfo_feedback(self.game, self.x, NoiseSchedule.perfect(), 3, RandomStreams(0, 2))
        for v_hat, v in zip(signal.signal, self.game.gradient(self.x)):
            assert_array_equal(v_hat, v)
        self.assertEqual(signal.bias_norm, 0.0)
        self.assertEqual(signal.noise_norm, 0.0)

    def test_signal_decomposes_exactly(self):
        streams = RandomStreams(5, 2)
        direction = OracleService.bias_direction(self.game.dimensions, streams)
        schedule = NoiseSchedule(b0=0.5, lb=1.0, sigma0=0.3)
        signal = OracleService.sfo_feedback(self.game, self.x, schedule, 25, streams, direction)
        for i in range(2):
            assert_allclose(signal.signal[i], signal.true_gradient[i] + signal.bias[i] + signal.noise[i], rtol=0, atol=1e-15)
        self.assertAlmostEqual(signal.bias_norm, 0.02)

    def test_same_seed_same_signal(self):
        schedule = NoiseSchedule(sigma0=1.0)
        first = OracleService.sfo_feedback(self.game, self.x, schedule, 1, RandomStreams(11, 2))
        second = OracleService.sfo_feedback(self.game, self.x, schedule, 1, RandomStreams(11, 2))
        for a, b in zip(first.signal, second.signal):
            assert_array_equal(a, b)

    def test_noise_moments(self):
        schedule = NoiseSchedule(sigma0=0.8, s=0.5)
        n = 4
        sigma = schedule.sigma(n)
        noise = OracleService.sample_noise(schedule, n, self.game.dimensions, RandomStreams(1, 2), size=DRAWS)
        dimension = sum(self.game.dimensions)
        envelope = 4 * sigma / np.sqrt(DRAWS * dimension)
        for block in noise:
            self.assertTrue(np.all(np.abs(block.mean(axis=0)) <= envelope))
        second_moment = np.mean(sum(np.sum(block ** 2, axis=-1) for block in noise))
        self.assertLessEqual(second_moment, sigma ** 2 * 1.05)
        self.assertGreaterEqual(second_moment, sigma ** 2 * 0.95)


class SpsaQueryTests(SimpleTestCase):

    def test_query_examples(self):
        self.assertAlmostEqual(OracleService.spsa_query([2.0], np.array([1.0]), 1.0, 0.5, [1.0])[0], 2.0)
        self.assertAlmostEqual(OracleService.spsa_query([2.0], np.array([1.0]), 1.0, 0.5, [-1.0])[0], 1.0)

    def test_constant_payoff_estimates_average_to_zero(self):
        basis = ActionSet.simplex(4).perturbation_basis()
        directions = np.concatenate([basis, -basis])
        estimates = OracleService.spsa_estimate(np.full(len(directions), 3.0), directions, 3, 0.1)
        assert_allclose(estimates.mean(axis=0), 0.0, atol=1e-12)

    def test_symmetric_quadratic_estimate(self):
        game = QuadraticNetwork(mu=2.0, beta=0.0, anchors=[[1.0]], lower=0.0, upper=2.0)
        estimates = []
        for z in (1.0, -1.0):
            realized = (OracleService.spsa_query([1.0], np.array([1.0]), 1.0, 0.1, [z]),)
            estimates.append(OracleService.spsa_estimate(game.payoff(0, realized), np.array([z]), 1, 0.1))
        assert_allclose(np.mean(estimates, axis=0), [0.0], atol=1e-12)

    def test_radius_must_fit_inside_every_set(self):
        sets = (ActionSet.box([0.0], [1.0]), ActionSet.simplex(3))
        with self.assertRaises(ConfigurationError):
            SpsaConfig(delta0=0.5, q=0.2).resolve(sets)
        with self.assertRaises(ConfigurationError):
            SpsaConfig(delta0=0.1, q=1.5)
        geometry = SpsaConfig(delta0=0.1, q=0.2).resolve(sets)
        self.assertEqual(geometry.factors, (1, 2))

    def test_realized_actions_are_feasible_and_close(self):
        game = BilinearZeroSum([[1.0, 0.0, 2.0], [0.5, -1.0, 0.0]])
        geometry = SpsaConfig(delta0=0.3, q=0.5).resolve(game.action_sets)
        streams = RandomStreams(3, 2)
        rng = np.random.default_rng(0)
        x = tuple(s.sample(rng) for s in game.action_sets)
        constant = geometry.displacement_constant
        for n in (1, 2, 10, 1000):
            signal = OracleService.spsa_feedback(game, x, geometry, n, streams, size=1000)
            for action_set, realized in zip(game.action_sets, signal.realized):
                self.assertTrue(action_set.contains(realized))
            displacement = joint_distance(signal.realized, x)
            self.assertTrue(np.all(displacement <= constant * geometry.delta(n) + 1e-12))

    def test_ball_queries_stay_in_ball(self):
        ball = ActionSet.ball([0.0, 0.0, 0.0], 1.0)
        geometry = SpsaConfig(delta0=0.9, q=0.1).resolve((ball,))
        directions = OracleService.draw_directions(geometry, RandomStreams(0, 1), size=500)[0]
        realized = OracleService.spsa_query(np.array([0.0, 0.0, 1.0]), geometry.base_points[0], 1.0, 0.9, directions)
        self.assertTrue(ball.contains(realized))


@tag('acceptance')
class SpsaStatisticsTests(SimpleTestCase):
    """Bias O(δ) and second moment O(1/δ²) of the one-point estimator."""

    radii = (0.1, 0.05, 0.025)

    def estimator_moments(self, x, anchor):
        game = QuadraticNetwork(mu=1.0, beta=0.0, anchors=[[anchor]])
        gradient = game.gradient(as_profile(([x],)))[0]
        biases, second_moments = [], []
        for delta in self.radii:
            geometry = SpsaConfig(delta0=delta, q=1.0).resolve(game.action_sets)
            signal = OracleService.spsa_feedback(game, as_profile(([x],)), geometry, 1, RandomStreams(17, 1), size=DRAWS)
            estimates = signal.signal[0]
            biases.append(np.linalg.norm(estimates.mean(axis=0) - gradient))
            second_moments.append(np.mean(np.sum(estimates ** 2, axis=-1)))
        return np.array(biases), np.array(second_moments)

    def test_bias_scales_linearly(self):
        biases, _ = self.estimator_moments(x=0.8, anchor=0.8)
        assert_allclose(biases, 0.6 * np.array(self.radii), rtol=0.05)
        self.assertTrue(0.7 <= slope(self.radii, biases) <= 1.3)

    def test_second_moment_scales_inverse_quadratically(self):
        _, second_moments = self.estimator_moments(x=0.6, anchor=0.1)
        self.assertTrue(-2.3 <= slope(self.radii, second_moments) <= -1.7)
