import math

import numpy as np
from django.test import SimpleTestCase

from ..calculus.exceptions import (
    ChartMismatchError,
    DegreeError,
    DivergenceFreeError,
    HelmholtzPreconditionError,
    MetricError,
    NonProductMetricError,
    PreconditionError,
    RadicandError,
)
from ..calculus.expressions import Chart, Func, Neg, evaluate, partial_derivative
from ..calculus.fields import VectorField, divergence, scale_field
from ..calculus.forms import DifferentialForm, scale_form
from ..calculus.parsing import parse_scalar
from ..calculus.riemann import (
    ROTSYM_DOMAIN,
    Metric,
    check_bracket_first_integral,
    check_gas_dynamics,
    check_gradient_multiplier,
    check_harmonic_square,
    check_helmholtz_residual,
    check_log_kernel,
    check_m_harmonic,
    check_mutual_harmonic,
    check_porous_residual,
    codifferential_1form,
    conformal_coordinate_integrand,
    gradient,
    helmholtz_pair_multiplier,
    inner_product,
    laplacian,
    lower_index,
    porous_link_residual,
    porous_medium_residual,
    radial_harmonic_square,
    rotsym_distance_multiplier,
)
from ..calculus.sampling import Sampler, agree_on_domain
from . import factories


class MetricTests(SimpleTestCase):
    def setUp(self):
        self.chart = factories.ChartFactory()
        self.x, self.y = self.chart.coordinates

    def test_validation(self):
        with self.assertRaises(MetricError):
            Metric(self.chart, ((1, self.x), (0, 1)))
        with self.assertRaises(MetricError):
            Metric(self.chart, ((1,),))
        with self.assertRaises(MetricError):
            Metric.diagonal(self.chart, (1, -1))
        with self.assertRaises(MetricError):
            Metric.diagonal(self.chart, (1, self.x - 1))

    def test_euclidean(self):
        g = Metric.euclidean(self.chart)
        self.assertTrue(g.is_euclidean)
        self.assertEqual(evaluate(g.density, (1.0, 1.0)), 1.0)
        u = parse_scalar("x^2 - y^2 + x*y", self.chart)
        self.assertAlmostEqual(evaluate(laplacian(g, u), (1.2, 0.8)), 0.0, places=12)

    def test_non_diagonal_metric(self):
        g = Metric(self.chart, ((2, 1), (1, 2)))
        self.assertFalse(g.is_diagonal)
        self.assertAlmostEqual(evaluate(g.determinant, (1.0, 1.0)), 3.0)
        grad = gradient(g, self.x)
        self.assertAlmostEqual(evaluate(grad[0], (1.0, 1.0)), 2 / 3)
        self.assertAlmostEqual(evaluate(grad[1], (1.0, 1.0)), -1 / 3)

    def test_sampler_must_share_chart(self):
        g = Metric.euclidean(self.chart)
        other = Chart(("u", "v"), ((0.5, 2.0), (0.5, 2.0)))
        with self.assertRaises(ChartMismatchError):
            check_gradient_multiplier(g, self.x, 1, factories.SamplerFactory(chart=other))


class RotationallySymmetricTests(SimpleTestCase):
    def setUp(self):
        self.chart = Chart(("t", "theta"), ROTSYM_DOMAIN)
        self.sampler = Sampler(self.chart)
        self.t = self.chart.coordinates[0]

    def test_distance_multiplier(self):
        for source, derivative_ratio in (("cosh(t)", math.tanh), ("exp(t)", lambda t: 1.0)):
            with self.subTest(phi=source):
                phi = parse_scalar(source, self.chart)
                g, m = rotsym_distance_multiplier(phi, self.chart)
                verdict = check_gradient_multiplier(g, self.t, m, self.sampler)
                self.assertTrue(verdict.passed)
                self.assertLessEqual(verdict.components[0].max_abs_residual, 1e-12)
                # Δt = φ'/φ
                point = (1.3, 2.1)
                self.assertAlmostEqual(
                    evaluate(laplacian(g, self.t), point), derivative_ratio(1.3), places=12
                )
                self.assertTrue(check_log_kernel(g, self.t, m, self.sampler).passed)
                self.assertFalse(check_gradient_multiplier(g, self.t, phi, self.sampler).passed)

    def test_conformal_integrand(self):
        phi = parse_scalar("cosh(t)", self.chart)
        integrand = conformal_coordinate_integrand(phi)
        self.assertAlmostEqual(evaluate(integrand, (0.7, 0.0)), 1 / math.cosh(0.7))

    def test_profile_validation(self):
        with self.assertRaises(MetricError):
            Metric.rotationally_symmetric(parse_scalar("t + theta", self.chart), self.chart)
        with self.assertRaises(MetricError):
            Metric.rotationally_symmetric(parse_scalar("t - 1", self.chart), self.chart)
        with self.assertRaises(MetricError):
            Metric.rotationally_symmetric(1, factories.Chart3DFactory())

    def test_log_kernel_needs_positive_multiplier(self):
        g, _ = rotsym_distance_multiplier(parse_scalar("cosh(t)", self.chart), self.chart)
        with self.assertRaises(PreconditionError):
            check_log_kernel(g, self.t, parse_scalar("t - 1", self.chart), self.sampler)


class HarmonicSquareTests(SimpleTestCase):
    def test_radial_squares(self):
        cases = (
            (Chart(("x", "y"), ((1.0, 2.0), (1.0, 2.0))), 1, 0),
            (factories.Chart3DFactory(), 1, 2),
            (Chart(("x",), ((0.5, 2.0),)), 1, 0),
        )
        for chart, C1, C2 in cases:
            with self.subTest(dim=chart.dim):
                sampler = Sampler(chart)
                for sign in (1, -1):
                    u = radial_harmonic_square(chart, C1, C2, sign)
                    verdict = check_harmonic_square(Metric.euclidean(chart), u, sampler)
                    self.assertTrue(verdict.passed)

    def test_radicand_must_be_positive(self):
        # -ln r < 0 wherever r > 1
        with self.assertRaises(RadicandError):
            radial_harmonic_square(factories.ChartFactory(), -1, 0)
        with self.assertRaises(ValueError):
            radial_harmonic_square(factories.ChartFactory(), 1, 1, sign=0)

    def test_non_harmonic_square(self):
        chart = factories.ChartFactory()
        g = Metric.euclidean(chart)
        verdict = check_harmonic_square(g, chart.coordinates[0], Sampler(chart))
        self.assertFalse(verdict.passed)


class PorousMediumTests(SimpleTestCase):
    def setUp(self):
        self.chart = Chart(("t", "x"), ((0.5, 2.0), (0.5, 2.0)))
        self.sampler = Sampler(self.chart)
        self.g = Metric.euclidean(self.chart)

    def test_self_similar_solution(self):
        u = parse_scalar("-x^2/(12*(t + 1))", self.chart)
        self.assertTrue(check_porous_residual(self.g, u, self.sampler).passed)
        # ∂_t^2 (u^2) survives in the full Laplacian
        verdict = check_porous_residual(self.g, u, self.sampler, reading="product")
        self.assertFalse(verdict.passed)

    def test_link_to_multiplier_residual(self):
        u = parse_scalar("t*x", self.chart)
        point = (1.2, 0.9)
        residual = evaluate(porous_medium_residual(self.g, u), point)
        self.assertAlmostEqual(residual, 0.9 - 2 * 1.2**2)
        self.assertAlmostEqual(evaluate(porous_link_residual(self.g, u), point), residual)

    def test_metric_must_be_a_product(self):
        u = parse_scalar("t*x", self.chart)
        t = self.chart.coordinates[0]
        for g in (Metric.diagonal(self.chart, (2, 1)), Metric.diagonal(self.chart, (1, t))):
            with self.assertRaises(NonProductMetricError):
                porous_medium_residual(g, u)
        with self.assertRaises(ValueError):
            porous_medium_residual(self.g, u, reading="bogus")


class EuclideanPlaneTests(SimpleTestCase):
    def setUp(self):
        self.chart = factories.ChartFactory()
        self.x, self.y = self.chart.coordinates
        self.sampler = factories.SamplerFactory(chart=self.chart)
        self.g = Metric.euclidean(self.chart)

    def parse(self, source):
        return parse_scalar(source, self.chart)

    def test_helmholtz_pairs(self):
        for a, b, k in (("x", "x*y", 0), ("sin(x)", "cos(x)", 1)):
            with self.subTest(a=a, b=b, k=k):
                m, u, verdict = helmholtz_pair_multiplier(
                    self.g, self.parse(a), self.parse(b), k, self.sampler
                )
                self.assertTrue(verdict.passed)
                point = (1.1, 0.7)
                a_value = evaluate(self.parse(a), point)
                self.assertAlmostEqual(evaluate(m, point), a_value**2)
                self.assertAlmostEqual(
                    evaluate(u, point), evaluate(self.parse(b), point) / a_value
                )

    def test_helmholtz_preconditions(self):
        with self.assertRaises(PreconditionError):
            helmholtz_pair_multiplier(self.g, self.parse("x - 1"), self.y, 0, self.sampler)
        with self.assertRaises(HelmholtzPreconditionError):
            helmholtz_pair_multiplier(self.g, self.x, self.parse("x^2"), 0, self.sampler)
        with self.assertRaises(HelmholtzPreconditionError):
            helmholtz_pair_multiplier(
                self.g, self.parse("sin(x)"), self.parse("cos(x)"), 0, self.sampler
            )

    def test_m_harmonic(self):
        m = self.parse("x^2")
        dy = DifferentialForm.one_form(self.chart, [0, 1])
        self.assertTrue(check_m_harmonic(self.g, m, dy, self.sampler).passed)

        dx = DifferentialForm.one_form(self.chart, [1, 0])
        # δ(x² dx) = -div(x² ∂_x) = -2x
        self.assertAlmostEqual(
            evaluate(codifferential_1form(self.g, scale_form(m, dx)), (1.5, 1.0)), -3.0
        )
        verdict = check_m_harmonic(self.g, m, dx, self.sampler)
        self.assertFalse(verdict.passed)
        self.assertEqual(verdict.reason, "m-coclosed")

        verdict = check_m_harmonic(
            self.g, m, DifferentialForm.one_form(self.chart, [0, self.x]), self.sampler
        )
        self.assertFalse(verdict.passed)
        self.assertEqual(verdict.reason, "closed")

        with self.assertRaises(DegreeError):
            check_m_harmonic(self.g, m, DifferentialForm.scalar(self.chart, 1), self.sampler)

    def test_m_harmonic_with_potential(self):
        m = self.parse("x^2")
        dy = DifferentialForm.one_form(self.chart, [0, 1])
        verdict = check_m_harmonic(self.g, m, dy, self.sampler, phi=self.y)
        self.assertTrue(verdict.passed)
        self.assertEqual(len(verdict.components), 5)

        verdict = check_m_harmonic(self.g, m, dy, self.sampler, phi=self.x)
        self.assertFalse(verdict.passed)
        self.assertIn("w = dφ", verdict.reason)

        # δ(m dy) = -∂_y m = -x fails m-coclosed but still matches -div(m∇y)
        m = self.parse("x^2 + x*y")
        verdict = check_m_harmonic(self.g, m, dy, self.sampler, phi=self.y)
        self.assertFalse(verdict.passed)
        self.assertEqual(verdict.reason, "m-coclosed")
        cross_check = verdict.components[3]
        self.assertTrue(cross_check.passed)
        self.assertEqual(cross_check.label, "δ(m dφ) = -div(m∇φ)")

    def test_gas_dynamics(self):
        m = self.parse("x^2")
        self.assertTrue(check_gas_dynamics(self.g, m, self.y, self.sampler).passed)
        self.assertFalse(check_gas_dynamics(self.g, m, self.x, self.sampler).passed)

    def test_bracket_first_integral(self):
        m = self.parse("x^2")
        b = self.parse("y + 1")
        verdict = check_bracket_first_integral(self.g, self.y, b, m, self.sampler)
        self.assertTrue(verdict.passed)

        verdict = check_bracket_first_integral(self.g, self.x, self.y, m, self.sampler)
        self.assertFalse(verdict.passed)
        self.assertEqual(verdict.reason, "hypothesis")

    def test_mutual_harmonic(self):
        self.assertTrue(check_mutual_harmonic(self.g, self.x, self.y, self.sampler).passed)
        verdict = check_mutual_harmonic(self.g, self.x, self.x, self.sampler)
        self.assertFalse(verdict.passed)
        self.assertEqual(verdict.reason, "hypothesis")

    def test_helmholtz_residual(self):
        X = VectorField(self.chart, (-self.y, self.x))
        u = self.parse("x^2 - y^2")
        self.assertTrue(check_helmholtz_residual(self.g, X, u, 1, self.sampler).passed)
        self.assertFalse(check_helmholtz_residual(self.g, X, u, self.x, self.sampler).passed)
        with self.assertRaises(DivergenceFreeError):
            check_helmholtz_residual(
                self.g, VectorField(self.chart, (self.x, 0)), u, 1, self.sampler
            )


class DiagonalMetricBatteryTests(SimpleTestCase):
    """Randomized diagonal metrics g = diag(a + x², b + c·y) on the positive box."""

    def setUp(self):
        self.rng = np.random.default_rng(5)
        self.chart = factories.ChartFactory()

    def parse(self, source):
        return parse_scalar(source, self.chart)

    def coefficients(self, count):
        return ["%.3f" % value for value in self.rng.uniform(0.5, 2.0, count)]

    def instances(self, count=6):
        for index in range(count):
            a, b, c = self.coefficients(3)
            entries = (self.parse(f"{a} + x^2"), self.parse(f"{b} + {c}*y"))
            g = Metric.diagonal(self.chart, entries)
            sampler = factories.SamplerFactory(chart=self.chart, seed=index)
            yield index, g, entries, sampler

    def random_function(self):
        a, b, c, d = self.coefficients(4)
        return self.parse(f"{a}*x^2*y + sin({b}*x*y) + exp({c}*y)/(1 + x^2) + x*cos({d}*y)")

    def test_inner_product_identity(self):
        # <∇f, ∇h> = (Δ(fh) - fΔh - hΔf) / 2
        for index, g, _, sampler in self.instances():
            f, h = self.random_function(), self.random_function()
            expected = (laplacian(g, f * h) - f * laplacian(g, h) - h * laplacian(g, f)) / 2
            with self.subTest(instance=index):
                verdict = agree_on_domain(inner_product(g, f, h), expected, sampler, tol=1e-9)
                self.assertTrue(verdict.passed, verdict.summary())

    def test_divergence_is_minus_codifferential(self):
        for index, g, _, sampler in self.instances():
            A = VectorField(self.chart, (self.random_function(), self.random_function()))
            codifferential = codifferential_1form(g, lower_index(g, A))
            with self.subTest(instance=index):
                verdict = agree_on_domain(
                    divergence(A, g.volume_form), Neg(codifferential), sampler, tol=1e-12
                )
                self.assertTrue(verdict.passed, verdict.summary())

    def test_gradient_and_laplacian_in_coordinates(self):
        for index, g, (g11, g22), sampler in self.instances():
            u = self.random_function()
            du = [partial_derivative(u, i) for i in range(2)]
            with self.subTest(instance=index):
                grad = gradient(g, u)
                for component, expected in zip(grad.components, (du[0] / g11, du[1] / g22)):
                    self.assertTrue(
                        agree_on_domain(component, expected, sampler, tol=1e-12).passed
                    )

                density = Func("sqrt", g11 * g22)
                flux = (
                    partial_derivative(density / g11 * du[0], 0)
                    + partial_derivative(density / g22 * du[1], 1)
                )
                verdict = agree_on_domain(laplacian(g, u), flux / density, sampler, tol=1e-10)
                self.assertTrue(verdict.passed, verdict.summary())

    def test_m_coclosed_residual_of_exact_form(self):
        y = self.chart.coordinates[1]
        dy = DifferentialForm.one_form(self.chart, [0, 1])
        for index, g, _, sampler in self.instances():
            m = self.random_function()
            residual = codifferential_1form(g, scale_form(m, dy))
            flux = divergence(scale_field(m, gradient(g, y)), g.volume_form)
            with self.subTest(instance=index):
                verdict = agree_on_domain(residual, Neg(flux), sampler, tol=1e-12)
                self.assertTrue(verdict.passed, verdict.summary())
