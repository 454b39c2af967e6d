from itertools import combinations

import numpy as np
from django.test import SimpleTestCase

from ..calculus.exceptions import DegreeError, NonvanishingError
from ..calculus.expressions import ONE, ZERO, Chart, Func, Mul, as_expr, evaluate, simplify
from ..calculus.fields import (
    VectorField,
    VolumeForm,
    check_last_multiplier,
    multiplier_residual,
)
from ..calculus.forms import (
    DifferentialForm,
    add_forms,
    check_def11,
    check_exact_potential,
    check_marsden_closed,
    check_witten_characterization,
    exterior_derivative,
    form_zero_on_domain,
    interior_volume,
    marsden_derivative,
    scale_form,
    wedge,
    witten_derivative,
)
from ..calculus.parsing import parse_scalar
from ..calculus.sampling import agree_on_domain
from . import factories
from .test_fields import multiplier_instance, random_polynomial


def random_form(rng, chart, degree):
    """A k-form with a random quadratic coefficient on every basis element."""
    return DifferentialForm(
        chart,
        degree,
        {
            indices: random_polynomial(rng, chart)
            for indices in combinations(range(chart.dim), degree)
        },
    )


def difference(first, second):
    return add_forms(first, scale_form(-1, second))


class DifferentialFormTests(SimpleTestCase):
    def setUp(self):
        self.chart = factories.Chart3DFactory()
        self.x, self.y, self.z = self.chart.coordinates

    def test_index_validation(self):
        with self.assertRaises(DegreeError):
            DifferentialForm(self.chart, 2, {(1, 0): ONE})
        with self.assertRaises(DegreeError):
            DifferentialForm(self.chart, 1, {(0, 1): ONE})
        with self.assertRaises(DegreeError):
            DifferentialForm(self.chart, 4, {(0, 1, 2, 3): ONE})
        self.assertTrue(DifferentialForm(self.chart, 1, {(0,): ZERO}).is_zero())

    def test_wedge_signs(self):
        dx = DifferentialForm.one_form(self.chart, [1, 0, 0])
        dy = DifferentialForm.one_form(self.chart, [0, 1, 0])
        self.assertEqual(wedge(dx, dy).coefficient((0, 1)), ONE)
        self.assertEqual(wedge(dy, dx).coefficient((0, 1)), as_expr(-1))
        self.assertTrue(wedge(dx, dx).is_zero())
        volume = DifferentialForm.volume(self.chart)
        with self.assertRaises(DegreeError):
            wedge(volume, dx)

    def test_d_squared_is_zero(self):
        sampler = factories.SamplerFactory(chart=self.chart)
        f = parse_scalar("sin(x*y) + z^3*x", self.chart)
        w = DifferentialForm.one_form(self.chart, [self.y * self.z, self.x**2, self.z])
        for form in (DifferentialForm.scalar(self.chart, f), w):
            with self.subTest(degree=form.degree):
                dd = exterior_derivative(exterior_derivative(form))
                self.assertEqual(dd.degree, form.degree + 2)
                self.assertTrue(form_zero_on_domain(dd, sampler, 1e-12).passed)

    def test_d_squared_is_zero_up_to_codimension_two(self):
        rng = np.random.default_rng(5)
        for names in (("x", "y"), ("x", "y", "z"), ("x", "y", "z", "w")):
            chart = Chart.box(names, 0.5, 2.0)
            sampler = factories.SamplerFactory(chart=chart)
            for degree in range(chart.dim - 1):
                with self.subTest(dim=chart.dim, degree=degree):
                    form = random_form(rng, chart, degree)
                    dd = exterior_derivative(exterior_derivative(form))
                    self.assertEqual(dd.degree, degree + 2)
                    self.assertTrue(form_zero_on_domain(dd, sampler, 1e-12).passed)

    def test_d_of_top_degree_form(self):
        volume = DifferentialForm.volume(self.chart, self.x)
        derivative = exterior_derivative(volume)
        self.assertEqual(derivative.degree, 4)
        self.assertTrue(derivative.is_zero())

    def test_interior_volume_signs(self):
        A = VectorField(self.chart, (self.x, self.y, self.z))
        omega = interior_volume(A, VolumeForm.coordinate(self.chart))
        self.assertEqual(omega.degree, 2)
        self.assertEqual(omega.coefficient((1, 2)), self.x)
        self.assertEqual(omega.coefficient((0, 2)), simplify(-self.y))
        self.assertEqual(omega.coefficient((0, 1)), self.z)
        # dΩ = (div A) dx∧dy∧dz
        self.assertEqual(exterior_derivative(omega).coefficient((0, 1, 2)), as_expr(3))

    def test_witten_derivative(self):
        f = parse_scalar("x*y", self.chart)
        a = DifferentialForm.scalar(self.chart, self.z)
        self.assertEqual(witten_derivative(f, 0, a), exterior_derivative(a))
        # d_{tf} g = t g df + dg
        twisted = witten_derivative(f, 2, a)
        point = (1.1, 0.6, 1.7)
        self.assertAlmostEqual(evaluate(twisted.coefficient((0,)), point), 2 * 1.7 * 0.6)
        self.assertAlmostEqual(evaluate(twisted.coefficient((2,)), point), 1.0)

    def test_marsden_derivative(self):
        a = DifferentialForm.one_form(self.chart, [self.y, 0, 0])
        self.assertEqual(marsden_derivative(1, a), exterior_derivative(a))
        weighted = marsden_derivative(self.x, a)
        # (1/x) d(xy dx) = (1/x)(x dy∧dx) = -dx∧dy
        self.assertAlmostEqual(evaluate(weighted.coefficient((0, 1)), (1.3, 0.9, 1.1)), -1.0)

        chart = Chart(("x", "y", "z"), ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)))
        with self.assertRaises(NonvanishingError):
            marsden_derivative(as_expr(0), DifferentialForm.one_form(chart, [1, 0, 0]))


class CharacterizationTests(SimpleTestCase):
    def setUp(self):
        self.chart = factories.ChartFactory()
        self.sampler = factories.SamplerFactory(chart=self.chart)
        self.A = factories.VectorFieldFactory(chart=self.chart)
        self.m = parse_scalar("1/(x*y)", self.chart)

    def test_golden_instance(self):
        for check in (check_def11, check_witten_characterization, check_marsden_closed):
            with self.subTest(check=check.__name__):
                self.assertTrue(check(self.A, self.m, None, self.sampler).passed)
                self.assertFalse(
                    check(self.A, self.chart.coordinates[0], None, self.sampler).passed
                )

    def test_weighted_volume(self):
        V = VolumeForm(self.chart, parse_scalar("x^2", self.chart))
        # div_V (x, y) = 4, so 1/(x^3 y) is a multiplier for V
        m = parse_scalar("1/(x^3*y)", self.chart)
        self.assertTrue(check_def11(self.A, m, V, self.sampler).passed)
        self.assertFalse(check_def11(self.A, self.m, V, self.sampler).passed)

    def test_trivial_multiplier_is_flagged(self):
        verdict = check_def11(self.A, 0, None, self.sampler)
        self.assertTrue(verdict.passed)
        self.assertTrue(verdict.trivial)

    def test_exact_potential(self):
        # mΩ = (1/(xy))(x dy - y dx) = d ln(y/x)
        potential = DifferentialForm.scalar(self.chart, parse_scalar("ln(y/x)", self.chart))
        verdict = check_exact_potential(self.A, self.m, None, potential, self.sampler)
        self.assertTrue(verdict.passed)

        wrong = DifferentialForm.scalar(self.chart, parse_scalar("ln(x*y)", self.chart))
        self.assertFalse(check_exact_potential(self.A, self.m, None, wrong, self.sampler).passed)

        with self.assertRaises(DegreeError):
            check_exact_potential(
                self.A, self.m, None, DifferentialForm.one_form(self.chart, [1, 0]), self.sampler
            )


class FormIdentityTests(SimpleTestCase):
    """Randomized algebraic identities of wedge, d and the deformed differentials."""

    def setUp(self):
        self.rng = np.random.default_rng(3)
        self.chart = factories.Chart3DFactory()
        self.sampler = factories.SamplerFactory(chart=self.chart)

    def pairs(self):
        for k, l in ((0, 1), (1, 1), (1, 2), (0, 2)):
            yield k, l, random_form(self.rng, self.chart, k), random_form(self.rng, self.chart, l)

    def assertFormZero(self, form):
        self.assertTrue(form_zero_on_domain(form, self.sampler, 1e-12).passed, str(form))

    def test_graded_commutativity(self):
        for k, l, a, b in self.pairs():
            with self.subTest(k=k, l=l):
                swapped = scale_form((-1) ** (k * l), wedge(b, a))
                self.assertFormZero(difference(wedge(a, b), swapped))

    def test_leibniz_rule(self):
        for k, l, a, b in self.pairs():
            if k + l + 1 > self.chart.dim:
                continue
            with self.subTest(k=k, l=l):
                left = exterior_derivative(wedge(a, b))
                right = add_forms(
                    wedge(exterior_derivative(a), b),
                    scale_form((-1) ** k, wedge(a, exterior_derivative(b))),
                )
                self.assertFormZero(difference(left, right))

    def test_witten_conjugation(self):
        """d_{tf} a = e^{-tf} d(e^{tf} a)."""
        f = parse_scalar("x*y - z/2", self.chart)
        for t in (1, 2.5, -0.5):
            for degree in (0, 1, 2):
                a = random_form(self.rng, self.chart, degree)
                weight = Func("exp", Mul((as_expr(t), f)))
                conjugated = scale_form(
                    Func("exp", Mul((as_expr(-t), f))),
                    exterior_derivative(scale_form(weight, a)),
                )
                with self.subTest(t=t, degree=degree):
                    self.assertFormZero(difference(witten_derivative(f, t, a), conjugated))


class CharacterizationBatteryTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(17)
        self.charts = (factories.ChartFactory(), factories.Chart3DFactory())

    def test_marsden_matches_last_multiplier(self):
        for index in range(8):
            chart = self.charts[index % 2]
            sampler = factories.SamplerFactory(chart=chart, seed=index)
            A, m = multiplier_instance(self.rng, chart)
            self.assertTrue(check_marsden_closed(A, m, None, sampler).passed)
            for candidate in (m, Mul((m, parse_scalar("1 + x", chart)))):
                with self.subTest(instance=index, m=str(candidate)):
                    self.assertEqual(
                        check_marsden_closed(A, candidate, None, sampler).passed,
                        check_last_multiplier(A, candidate, None, sampler).passed,
                    )

    def test_def11_residual_is_scaled_multiplier_residual(self):
        """d(m i_A V) = σ (A(m) + m div_V A) dx^1 ∧ .. ∧ dx^n."""
        for index in range(6):
            chart = self.charts[index % 2]
            sampler = factories.SamplerFactory(chart=chart, seed=index)
            V = VolumeForm(chart, parse_scalar("1 + x^2", chart))
            components = tuple(random_polynomial(self.rng, chart) for _ in chart.coordinates)
            A = VectorField(chart, components)
            m = random_polynomial(self.rng, chart)
            closed = exterior_derivative(scale_form(m, interior_volume(A, V)))
            top = closed.coefficient(tuple(range(chart.dim)))
            with self.subTest(instance=index, dim=chart.dim):
                scaled = Mul((V.density, multiplier_residual(A, m, V)))
                self.assertTrue(agree_on_domain(top, scaled, sampler, 1e-12).passed)
