import numpy as np
from numpy.testing import assert_allclose
from django.test import SimpleTestCase

from project.exceptions import ConfigurationError, GeometryDomainError, UnsupportedGameError
from geometry.profiles import as_profile
from games.families import BilinearZeroSum, KellyAuction, OnlineLinear, PerturbedGame, QuadraticNetwork
from games.sequences import GameSequence
from games.services import GameService
from games.validators import GameCertificateValidator

MATCHING_PENNIES = [[1.0, -1.0], [-1.0, 1.0]]


def drifting_network(players=3, dimension=2, v=0.5):
    anchors = [np.full(dimension, 0.5)] * players
    base = QuadraticNetwork(mu=1.0, beta=0.2, anchors=anchors)
    return GameSequence.drifting(base, v=v, scale=0.05, radius=0.1)


class PayoffTests(SimpleTestCase):

    def test_kelly_single_bidder(self):
        game = KellyAuction(gains=[4.0], capacity=1.0, barrier=1.0, budgets=[2.0])
        self.assertAlmostEqual(GameService.eval_payoff(game, 0, ([1.0],)), 1.0)

    def test_matching_pennies_center(self):
        game = BilinearZeroSum(MATCHING_PENNIES)
        self.assertEqual(GameService.eval_payoff(game, 0, ([0.5, 0.5], [0.5, 0.5])), 0.0)

    def test_quadratic_peak(self):
        game = QuadraticNetwork(mu=2.0, beta=0.0, anchors=[[0.3]])
        self.assertEqual(GameService.eval_payoff(game, 0, ([0.3],)), 0.0)

    def test_payoff_rejects_infeasible_profile(self):
        game = QuadraticNetwork(mu=2.0, beta=0.0, anchors=[[0.3]])
        with self.assertRaises(GeometryDomainError):
            GameService.eval_payoff(game, 0, ([1.5],))


class GradientTests(SimpleTestCase):

    def test_kelly_gradient_vanishes_at_equilibrium(self):
        game = KellyAuction(gains=[4.0], capacity=1.0, barrier=1.0, budgets=[2.0])
        assert_allclose(GameService.eval_gradient(game, ([1.0],))[0], [0.0], atol=1e-15)

    def test_bilinear_gradient(self):
        matrix = np.array([[1.0, 2.0, 0.0], [-1.0, 0.5, 3.0]])
        game = BilinearZeroSum(matrix)
        x1, x2 = np.array([0.25, 0.75]), np.array([0.2, 0.3, 0.5])
        v1, v2 = GameService.eval_gradient(game, (x1, x2))
        assert_allclose(v1, -matrix @ x2)
        assert_allclose(v2, matrix.T @ x1)

    def test_quadratic_decoupled_gradient(self):
        game = QuadraticNetwork(mu=1.0, beta=0.0, anchors=[[0.2], [0.7]])
        v1, v2 = GameService.eval_gradient(game, ([0.0], [0.0]))
        assert_allclose(v1, [0.2])
        assert_allclose(v2, [0.7])

    def test_batched_gradient_matches_single_profiles(self):
        game = QuadraticNetwork(mu=1.0, beta=0.3, anchors=[[0.2, 0.4], [0.7, 0.1]])
        rng = np.random.default_rng(0)
        batch = GameCertificateValidator.sample_profile(game, rng, 5)
        batched = game.gradient(batch)
        for s in range(5):
            single = game.gradient(tuple(x[s] for x in batch))
            for i in range(2):
                assert_allclose(batched[i][s], single[i])


class FamilyTests(SimpleTestCase):

    def test_family_parameter_validation(self):
        with self.assertRaises(ConfigurationError):
            KellyAuction(gains=[1.0], capacity=1.0, barrier=0.0, budgets=[1.0])
        with self.assertRaises(ConfigurationError):
            QuadraticNetwork(mu=1.0, beta=0.6, anchors=[[0.5], [0.5], [0.5]])
        with self.assertRaises(ConfigurationError):
            BilinearZeroSum([1.0, 2.0])
        with self.assertRaises(ConfigurationError):
            OnlineLinear([1.0])

    def test_quadratic_closed_form(self):
        game = QuadraticNetwork(mu=1.0, beta=0.25, anchors=[[0.4], [0.4]])
        x1, x2 = game.closed_form_equilibrium()
        assert_allclose(x1, [0.32])
        assert_allclose(x2, [0.32])

    def test_bilinear_has_no_closed_form(self):
        with self.assertRaises(UnsupportedGameError):
            BilinearZeroSum(MATCHING_PENNIES).closed_form_equilibrium()

    def test_kelly_best_response_is_stationary(self):
        game = KellyAuction(gains=[2.0, 2.0, 2.0], capacity=1.0, barrier=0.5, budgets=[1.0, 1.0, 1.0])
        profile = as_profile(([0.1], [0.3], [0.2]))
        response = game.best_response(0, profile)
        self.assertTrue(0.0 < response[0] < 1.0)
        gradient = game.player_gradient(0, game.deviate(profile, 0, response))
        assert_allclose(gradient, [0.0], atol=1e-12)

    def test_generic_best_response_matches_closed_form(self):
        base = QuadraticNetwork(mu=1.0, beta=0.2, anchors=[[0.3], [0.6]])
        perturbed = PerturbedGame(base, 0.0)
        profile = as_profile(([0.5], [0.5]))
        assert_allclose(perturbed.best_response(0, profile), base.best_response(0, profile), atol=1e-7)


class CertificateTests(SimpleTestCase):
    """Concavity, B, Λ, monotonicity and analytic gradients on sampled profiles."""

    games = (
        BilinearZeroSum(MATCHING_PENNIES),
        BilinearZeroSum([[1.0, 2.0, -1.0], [0.0, -3.0, 2.0]]),
        KellyAuction(gains=[3.0, 3.0, 3.0], capacity=1.0, barrier=0.5, budgets=[1.0, 2.0, 1.5]),
        QuadraticNetwork(mu=1.0, beta=0.2, anchors=[[0.2, 0.5], [0.5, 0.5], [0.8, 0.1]]),
        OnlineLinear(np.linspace(-1.0, 1.0, 6)),
        PerturbedGame(QuadraticNetwork(mu=2.0, beta=0.3, anchors=[[0.4], [0.6]]), 0.5),
    )

    def test_certificates_hold(self):
        tolerances = GameCertificateValidator.tolerances()
        for game in self.games:
            results = GameCertificateValidator.run_all(game, seed=7)
            for name, violation in results.items():
                with self.subTest(family=game.family, check=name):
                    self.assertLessEqual(violation, tolerances[name])

    def test_kelly_is_monotone_with_unequal_budgets(self):
        game = KellyAuction(gains=[1.5, 1.5], capacity=2.0, barrier=1.0, budgets=[0.5, 3.0])
        rng = np.random.default_rng(1)
        self.assertLessEqual(GameCertificateValidator.monotonicity_violation(game, rng), 1e-12)


class SequenceTests(SimpleTestCase):

    def test_static_sequence_repeats_the_game(self):
        game = QuadraticNetwork(mu=1.0, beta=0.0, anchors=[[0.5]])
        sequence = GameSequence.static(game)
        self.assertIs(sequence.stage(1), game)
        self.assertIs(sequence.stage(1000), game)

    def test_stage_index_must_be_positive(self):
        sequence = GameSequence.static(QuadraticNetwork(mu=1.0, beta=0.0, anchors=[[0.5]]))
        with self.assertRaises(ConfigurationError):
            sequence.stage(0)

    def test_stabilizing_decay(self):
        base = QuadraticNetwork(mu=2.0, beta=0.2, anchors=[[0.4], [0.6]])
        sequence = GameSequence.stabilizing(base, v=0.5, beta0=0.8)
        self.assertAlmostEqual(sequence.stabilization_bound(100), 0.08)
        self.assertAlmostEqual(sequence.stage(100).weight, 0.08)
        rng = np.random.default_rng(4)
        self.assertLessEqual(GameCertificateValidator.stabilization_excess(sequence, rng), 1e-12)

    def test_stabilizing_rejects_large_perturbations(self):
        base = QuadraticNetwork(mu=1.0, beta=0.0, anchors=[[0.5]])
        with self.assertRaises(ConfigurationError):
            GameSequence.stabilizing(base, v=0.5, beta0=1.0)
        with self.assertRaises(ConfigurationError):
            GameSequence.stabilizing(BilinearZeroSum(MATCHING_PENNIES), v=0.5, beta0=0.1)

    def test_drift_needs_quadratic_network(self):
        with self.assertRaises(ConfigurationError):
            GameSequence.drifting(BilinearZeroSum(MATCHING_PENNIES), v=0.5, scale=0.1, radius=0.1)
        with self.assertRaises(ConfigurationError):
            drifting_network(v=1.2)

    def test_drifting_limit_game_is_undefined(self):
        with self.assertRaises(UnsupportedGameError):
            drifting_network().limit_game()

    def test_stage_batch_matches_single_stages(self):
        sequence = drifting_network()
        ns = np.array([1, 7, 50])
        batch = sequence.stage_batch(ns)
        profile = tuple(np.full((3, 2), 0.4) for _ in range(3))
        batched = batch.gradient(profile)
        for s, n in enumerate(ns):
            single = sequence.stage(int(n)).gradient(tuple(x[s] for x in profile))
            for i in range(3):
                assert_allclose(batched[i][s], single[i])

    def test_equilibrium_path_matches_stagewise_solves(self):
        sequence = drifting_network()
        path = sequence.equilibrium_path(10)
        self.assertEqual(path[0].shape, (11, 2))
        for n in (1, 5, 11):
            for i, x in enumerate(sequence.equilibrium(n)):
                assert_allclose(path[i][n - 1], x, atol=1e-14)

    def test_static_equilibrium_path_is_constant(self):
        sequence = GameSequence.static(QuadraticNetwork(mu=1.0, beta=0.0, anchors=[[0.2], [0.7]]))
        path = sequence.equilibrium_path(4)
        assert_allclose(path[0], np.full((5, 1), 0.2))
        assert_allclose(path[1], np.full((5, 1), 0.7))

    def test_drift_displacement_shrinks_like_n_to_v_minus_one(self):
        sequence = drifting_network(v=0.5)
        path = sequence.equilibrium_path(10_000)
        steps = np.sqrt(sum(np.sum(np.diff(x, axis=0) ** 2, axis=-1) for x in path))
        ratio = steps[9_999] / steps[99]
        # n^{-1/2} from n=100 to n=10000
        self.assertAlmostEqual(ratio, 0.1, delta=0.01)

    def test_equilibrium_variation_grows_like_t_to_v(self):
        horizon = 100_000
        sequence = drifting_network(v=0.5)
        path = sequence.equilibrium_path(horizon)
        steps = np.sqrt(sum(np.sum(np.diff(x, axis=0) ** 2, axis=-1) for x in path))
        variation = np.cumsum(steps)
        window = np.arange(horizon // 2, horizon + 1)
        slope = np.polyfit(np.log(window), np.log(variation[window - 1]), 1)[0]
        self.assertAlmostEqual(slope, 0.5, delta=0.05)
