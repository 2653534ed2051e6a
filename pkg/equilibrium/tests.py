import numpy as np
from numpy.testing import assert_allclose
from django.test import SimpleTestCase

from project.exceptions import ConvergenceError, UnsupportedGameError
from equilibrium.enums import SolveMethod
from equilibrium.services import EquilibriumService
from games.families import BilinearZeroSum, KellyAuction, QuadraticNetwork
from games.sequences import GameSequence
from geometry.profiles import as_profile, joint_distance

MATCHING_PENNIES = [[1.0, -1.0], [-1.0, 1.0]]


def network():
    return QuadraticNetwork(mu=1.0, beta=0.2, anchors=[[0.4, 0.5], [0.5, 0.6], [0.7, 0.4]])


class ClosedFormTests(SimpleTestCase):

    def test_decoupled_peaks(self):
        game = QuadraticNetwork(mu=1.0, beta=0.0, anchors=[[0.2], [0.7]])
        x1, x2 = EquilibriumService.nash_closed_form(game)
        assert_allclose(x1, [0.2])
        assert_allclose(x2, [0.7])

    def test_coupled_pair(self):
        game = QuadraticNetwork(mu=1.0, beta=0.25, anchors=[[0.4], [0.4]])
        for x in EquilibriumService.nash_closed_form(game):
            assert_allclose(x, [0.32])

    def test_single_kelly_bidder(self):
        game = KellyAuction(gains=[4.0], capacity=1.0, barrier=1.0, budgets=[2.0])
        assert_allclose(EquilibriumService.nash_closed_form(game)[0], [1.0])

    def test_boundary_equilibrium_is_not_closed_form(self):
        game = QuadraticNetwork(mu=1.0, beta=0.0, anchors=[[1.4]])
        with self.assertRaises(UnsupportedGameError):
            EquilibriumService.nash_closed_form(game)
        # the extragradient oracle still finds the clamped point
        assert_allclose(EquilibriumService.solve(game)[0], [1.0])


class ExtragradientTests(SimpleTestCase):

    def test_matches_closed_form(self):
        game = network()
        certificate = EquilibriumService.nash_extragradient(game)
        self.assertEqual(certificate.method, SolveMethod.EXTRAGRADIENT)
        closed = EquilibriumService.nash_closed_form(game)
        self.assertLessEqual(float(joint_distance(certificate.point, closed)), 1e-6)
        self.assertLessEqual(certificate.stampacchia_residual, 1e-10)

    def test_unique_equilibrium_from_different_starts(self):
        game = network()
        first = EquilibriumService.nash_extragradient(game, start=as_profile(([0, 0], [0, 0], [0, 0])))
        second = EquilibriumService.nash_extragradient(game, start=as_profile(([1, 1], [1, 0], [0, 1])))
        self.assertLessEqual(float(joint_distance(first.point, second.point)), 1e-8)

    def test_matching_pennies(self):
        game = BilinearZeroSum(MATCHING_PENNIES)
        certificate = EquilibriumService.nash_extragradient(game, start=as_profile(([0.9, 0.1], [0.2, 0.8])))
        for x in certificate.point:
            assert_allclose(x, [0.5, 0.5], atol=1e-4)
        self.assertLessEqual(EquilibriumService.saddle_gap(game, certificate.point), 1e-8)

    def test_symmetric_kelly_auction(self):
        game = KellyAuction(gains=[2.0, 2.0, 2.0], capacity=1.0, barrier=0.5, budgets=[1.0, 1.0, 1.0])
        certificate = EquilibriumService.nash_extragradient(game)
        expected = (1.0 + np.sqrt(28.0)) / 18.0
        for x in certificate.point:
            assert_allclose(x, [expected], atol=1e-6)
        self.assertTrue(certificate.is_valid())

    def test_iteration_cap(self):
        with self.assertRaises(ConvergenceError) as raised:
            EquilibriumService.nash_extragradient(network(), max_iters=2, start=as_profile(([0, 0], [0, 0], [0, 0])))
        self.assertEqual(raised.exception.iterations, 2)
        self.assertGreater(raised.exception.residual, 0.0)


class CertificateTests(SimpleTestCase):

    def test_minty_residual_at_oracle_equilibria(self):
        games = (
            network(),
            KellyAuction(gains=[4.0], capacity=1.0, barrier=1.0, budgets=[2.0]),
        )
        for game in games:
            certificate = EquilibriumService.certify(game, EquilibriumService.nash_closed_form(game))
            with self.subTest(family=game.family):
                self.assertLessEqual(certificate.minty_residual, 1e-8)
                self.assertLessEqual(certificate.stampacchia_residual, 1e-8)
        center = as_profile(([0.5, 0.5], [0.5, 0.5]))
        self.assertLessEqual(EquilibriumService.minty_residual(BilinearZeroSum(MATCHING_PENNIES), center), 1e-8)

    def test_per_player_stationarity(self):
        game = network()
        point = EquilibriumService.nash_closed_form(game)
        gradient = game.gradient(point)
        rng = np.random.default_rng(9)
        for i, action_set in enumerate(game.action_sets):
            deviations = action_set.sample(rng, 1000)
            self.assertLessEqual(np.max((deviations - point[i]) @ gradient[i]), 1e-8)

    def test_residual_flags_non_equilibria(self):
        game = network()
        point = as_profile(([0.0, 0.0], [0.0, 0.0], [0.0, 0.0]))
        certificate = EquilibriumService.certify(game, point)
        self.assertGreater(certificate.stampacchia_residual, 0.1)
        self.assertFalse(certificate.is_valid())


class SaddleGapTests(SimpleTestCase):

    def test_saddle_point_has_zero_gap(self):
        game = BilinearZeroSum(MATCHING_PENNIES)
        self.assertEqual(EquilibriumService.saddle_gap(game, ([0.5, 0.5], [0.5, 0.5])), 0.0)

    def test_pure_row_strategy(self):
        game = BilinearZeroSum(MATCHING_PENNIES)
        self.assertAlmostEqual(EquilibriumService.saddle_gap(game, ([1.0, 0.0], [0.5, 0.5])), 1.0)

    def test_gap_is_nonnegative(self):
        game = BilinearZeroSum([[1.0, 2.0, -1.0], [0.0, -3.0, 2.0]])
        rng = np.random.default_rng(2)
        batch = (game.action_sets[0].sample(rng, 500), game.action_sets[1].sample(rng, 500))
        self.assertTrue(np.all(EquilibriumService.saddle_gap(game, batch) >= -1e-15))

    def test_requires_bilinear_game(self):
        with self.assertRaises(UnsupportedGameError):
            EquilibriumService.saddle_gap(network(), as_profile(([0, 0], [0, 0], [0, 0])))


class PathTests(SimpleTestCase):

    def test_static_path_without_closed_form(self):
        game = KellyAuction(gains=[2.0, 2.0], capacity=1.0, barrier=0.5, budgets=[1.0, 1.0])
        path = EquilibriumService.equilibrium_path(GameSequence.static(game), 3)
        self.assertEqual(path[0].shape, (4, 1))
        assert_allclose(path[0], path[1], atol=1e-8)

    def test_stabilizing_sequence_uses_limit_equilibrium(self):
        base = QuadraticNetwork(mu=2.0, beta=0.2, anchors=[[0.4], [0.6]])
        sequence = GameSequence.stabilizing(base, v=0.5, beta0=0.5)
        limit = EquilibriumService.limit_equilibrium(sequence)
        assert_allclose(np.concatenate(limit), np.concatenate(base.closed_form_equilibrium()))
