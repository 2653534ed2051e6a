import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from django.test import SimpleTestCase

from project.exceptions import ConfigurationError, GeometryDomainError, InputError
from geometry.enums import GeometryConstants
from geometry.regularizers import EntropicRegularizer, EuclideanRegularizer, regularizer_for
from geometry.services import GeometryService
from geometry.sets import ActionSet
from geometry.validators import GeometryPropertyValidator


class ActionSetTests(SimpleTestCase):

    def test_constructors_reject_degenerate_sets(self):
        with self.assertRaises(ConfigurationError):
            ActionSet.box([0, 1], [1, 1])
        with self.assertRaises(ConfigurationError):
            ActionSet.ball([0, 0], 0.0)
        with self.assertRaises(ConfigurationError):
            ActionSet.simplex(1)

    def test_ball_center_must_be_finite(self):
        for center in ([np.nan, 0.0], [0.0, np.inf]):
            with self.subTest(center=center):
                with self.assertRaisesMessage(ConfigurationError, 'center'):
                    ActionSet.ball(center, 1.0)

    def test_simplex_projection_lands_on_simplex(self):
        rng = np.random.default_rng(3)
        simplex = ActionSet.simplex(6)
        points = simplex.project(4 * rng.standard_normal((500, 6)))
        self.assertTrue(simplex.contains(points))
        # points already on the simplex are fixed
        inside = simplex.sample(rng, 50)
        assert_allclose(simplex.project(inside), inside, atol=1e-14)

    def test_simplex_projection_known_value(self):
        assert_allclose(ActionSet.simplex(3).project([2.0, 0.0, 0.0]), [1.0, 0.0, 0.0])
        assert_allclose(ActionSet.simplex(2).project([0.5, 0.5]), [0.5, 0.5])

    def test_ball_projection_scales_radially(self):
        ball = ActionSet.ball([0, 0], 1.0)
        assert_allclose(ball.project([3.0, 4.0]), [0.6, 0.8])
        assert_allclose(ball.project([0.1, 0.2]), [0.1, 0.2])

    def test_support_max_examples(self):
        point, value = GeometryService.support_max(ActionSet.simplex(3), [1, 5, 2])
        assert_array_equal(point, [0, 1, 0])
        self.assertEqual(value, 5)

        point, value = GeometryService.support_max(ActionSet.box([0, 0], [1, 1]), [-1, 2])
        assert_array_equal(point, [0, 1])
        self.assertEqual(value, 2)

        point, value = GeometryService.support_max(ActionSet.ball([0, 0], 2.0), [3, 4])
        assert_allclose(point, [1.2, 1.6])
        self.assertAlmostEqual(value, 10.0)

    def test_support_max_ties_go_to_lowest_index(self):
        point, value = GeometryService.support_max(ActionSet.simplex(3), [2, 2, 1])
        assert_array_equal(point, [1, 0, 0])
        point, value = GeometryService.support_max(ActionSet.simplex(3), [0, 0, 0])
        assert_array_equal(point, [1, 0, 0])
        self.assertEqual(value, 0)

    def test_support_values_match_support_max(self):
        rng = np.random.default_rng(0)
        for action_set in (ActionSet.simplex(4), ActionSet.box([-1, 0, 2, 0], [1, 3, 4, 1]), ActionSet.ball([1, 2, 0, 0], 0.5)):
            functionals = rng.standard_normal((20, 4))
            batched = action_set.support_values(functionals)
            single = [action_set.support_max(c)[1] for c in functionals]
            assert_allclose(batched, single, atol=1e-12)

    def test_safety_ball_fits_inside(self):
        rng = np.random.default_rng(1)
        for action_set in (ActionSet.simplex(4), ActionSet.box([0, -1], [1, 3]), ActionSet.ball([1, 1], 0.3)):
            center, radius = action_set.barycenter(), action_set.safety_radius()
            for direction in action_set.perturbation_basis():
                self.assertTrue(action_set.contains(center + radius * direction))
                self.assertTrue(action_set.contains(center - radius * direction))
            self.assertTrue(action_set.contains(action_set.sample(rng, 100)))

    def test_simplex_perturbation_basis_is_orthonormal_and_tangent(self):
        basis = ActionSet.simplex(5).perturbation_basis()
        self.assertEqual(basis.shape, (4, 5))
        assert_allclose(basis @ basis.T, np.eye(4), atol=1e-12)
        assert_allclose(basis.sum(axis=1), 0.0, atol=1e-12)

    def test_diameters(self):
        self.assertAlmostEqual(ActionSet.simplex(7).diameter(), np.sqrt(2))
        self.assertAlmostEqual(ActionSet.box([0, 0], [3, 4]).diameter(), 5.0)
        self.assertAlmostEqual(ActionSet.ball([5, 5], 1.5).diameter(), 3.0)


class BregmanTests(SimpleTestCase):

    def test_euclidean_divergence(self):
        value = GeometryService.bregman(EuclideanRegularizer(), ActionSet.box([0, 0], [1, 1]), [1, 0], [0, 0])
        self.assertAlmostEqual(value, 0.5)

    def test_entropic_divergence_vanishes_on_the_diagonal(self):
        simplex = ActionSet.simplex(2)
        self.assertEqual(GeometryService.bregman(EntropicRegularizer(), simplex, [0.3, 0.7], [0.3, 0.7]), 0.0)

    def test_entropic_divergence_to_vertex(self):
        value = GeometryService.bregman(EntropicRegularizer(), ActionSet.simplex(2), [1.0, 0.0], [0.5, 0.5])
        self.assertAlmostEqual(value, np.log(2), places=6)

    def test_entropic_divergence_rejects_boundary_base(self):
        with self.assertRaises(GeometryDomainError):
            GeometryService.bregman(EntropicRegularizer(), ActionSet.simplex(2), [0.5, 0.5], [1.0, 0.0])


class ProxTests(SimpleTestCase):

    def test_zero_step_is_a_fixed_point(self):
        simplex = ActionSet.simplex(3)
        x = np.array([0.2, 0.3, 0.5])
        for reg in (EuclideanRegularizer(), EntropicRegularizer()):
            assert_allclose(GeometryService.prox(reg, simplex, x, np.zeros(3)), x, atol=1e-15)

    def test_multiplicative_weights_closed_form(self):
        result = GeometryService.prox(EntropicRegularizer(), ActionSet.simplex(2), [0.5, 0.5], [np.log(2), 0.0])
        assert_allclose(result, [2 / 3, 1 / 3])

    def test_euclidean_prox_on_box_clamps(self):
        result = GeometryService.prox(EuclideanRegularizer(), ActionSet.box([0, 0], [1, 1]), [0.9, 0.5], [0.3, -0.2])
        assert_allclose(result, [1.0, 0.3])

    def test_entropic_prox_survives_huge_steps(self):
        result = GeometryService.prox(EntropicRegularizer(), ActionSet.simplex(3), [0.2, 0.3, 0.5], [1e4, 0.0, -1e4])
        self.assertTrue(np.all(result >= GeometryConstants.ENTROPIC_FLOOR))
        self.assertAlmostEqual(result.sum(), 1.0)
        self.assertAlmostEqual(result[0], 1.0)

    def test_non_finite_step_is_rejected(self):
        with self.assertRaises(InputError):
            GeometryService.prox(EuclideanRegularizer(), ActionSet.simplex(2), [0.5, 0.5], [np.nan, 0.0])

    def test_entropic_needs_simplex(self):
        with self.assertRaises(ConfigurationError):
            regularizer_for('entropic', ActionSet.box([0], [1]))

    def test_euclidean_prox_stays_in_set(self):
        rng = np.random.default_rng(11)
        reg = EuclideanRegularizer()
        for action_set in (ActionSet.simplex(3), ActionSet.box([0, 0, 0], [1, 2, 1]), ActionSet.ball([0, 0, 1], 1.0)):
            x = action_set.sample(rng, 200)
            y = 3 * rng.standard_normal((200, 3))
            self.assertTrue(action_set.contains(reg.prox(action_set, x, y, check=False)))


class DgfMinTests(SimpleTestCase):

    def test_entropic_minimizer_is_barycenter(self):
        assert_allclose(GeometryService.dgf_min(EntropicRegularizer(), ActionSet.simplex(4)), [0.25] * 4)

    def test_euclidean_minimizer_projects_origin(self):
        reg = EuclideanRegularizer()
        assert_allclose(GeometryService.dgf_min(reg, ActionSet.box([1, -1], [2, 1])), [1, 0])
        assert_allclose(GeometryService.dgf_min(reg, ActionSet.ball([3, 4], 1.0)), [2.4, 3.2])


class ThreePointTests(SimpleTestCase):

    def test_euclidean_identity_is_exact(self):
        box = ActionSet.box([0, 0], [1, 1])
        residual = GeometryService.three_point_check(EuclideanRegularizer(), box, [0.1, 0.9], [0.4, 0.4], [0.7, 0.2])
        self.assertLess(residual, 1e-15)

    def test_entropic_identity(self):
        residual = GeometryService.three_point_check(
            EntropicRegularizer(), ActionSet.simplex(2), [0.2, 0.8], [0.5, 0.5], [0.6, 0.4]
        )
        self.assertLess(residual, 1e-12)

    def test_entropic_identity_degenerate_triple(self):
        point = [0.3, 0.7]
        self.assertEqual(GeometryService.three_point_check(EntropicRegularizer(), ActionSet.simplex(2), point, point, point), 0.0)


class PropertySuiteTests(SimpleTestCase):
    """Mirror-descent inequalities on 10⁴ random instances per geometry."""

    geometries = (
        (EuclideanRegularizer(), ActionSet.box([0, -1, 0], [1, 1, 2])),
        (EuclideanRegularizer(), ActionSet.simplex(5)),
        (EuclideanRegularizer(), ActionSet.ball([0.5, 0.5, 0.0], 1.0)),
        (EntropicRegularizer(), ActionSet.simplex(5)),
    )

    def test_all_inequalities_hold(self):
        for reg, action_set in self.geometries:
            results = GeometryPropertyValidator.run_all(reg, action_set, seed=2024)
            for name, violation in results.items():
                with self.subTest(regularizer=reg.kind, action_set=repr(action_set), check=name):
                    self.assertLessEqual(violation, GeometryConstants.IDENTITY_TOL)

    def test_bounded_divergence_is_finite(self):
        rng = np.random.default_rng(5)
        result = GeometryPropertyValidator.bounded_divergence(EuclideanRegularizer(), ActionSet.box([0, 0], [2, 1]), rng)
        self.assertTrue(np.isfinite(result['largest']))
        self.assertLessEqual(result['largest'], result['bound'])
