"""One Check subclass per document ``kind``; importing this module registers them."""

from ..calculus import fields, flow, forms, poisson, riemann
from .base import POISSON, RIEMANNIAN, Argument, Check

__all__ = []

DEFAULT_MAX_DRIFT = 1e-6


def _flow_arguments():
    return {
        "field": Argument("field"),
        "multiplier": Argument("scalar"),
        "x0": Argument("point"),
        "dt": Argument("number", required=False, default=0.01),
        "T": Argument("number", required=False, default=1.0),
        "max_drift": Argument("number", required=False, default=DEFAULT_MAX_DRIFT),
    }


class LastMultiplierCheck(Check):
    kind = "last_multiplier"
    arguments = {"field": Argument("field"), "multiplier": Argument("scalar")}

    def run(self, document, sampler, tolerance, field, multiplier):
        return fields.check_last_multiplier(field, multiplier, document.volume, sampler, tolerance)


class Def11Check(LastMultiplierCheck):
    kind = "def11"

    def run(self, document, sampler, tolerance, field, multiplier):
        return forms.check_def11(field, multiplier, document.volume, sampler, tolerance)


class WittenCheck(LastMultiplierCheck):
    kind = "witten"

    def run(self, document, sampler, tolerance, field, multiplier):
        return forms.check_witten_characterization(
            field, multiplier, document.volume, sampler, tolerance
        )


class MarsdenCheck(LastMultiplierCheck):
    kind = "marsden"

    def run(self, document, sampler, tolerance, field, multiplier):
        return forms.check_marsden_closed(field, multiplier, document.volume, sampler, tolerance)


class ExactPotentialCheck(Check):
    kind = "exact_potential"
    arguments = {
        "field": Argument("field"),
        "multiplier": Argument("scalar"),
        "potential": Argument("potential"),
    }

    def run(self, document, sampler, tolerance, field, multiplier, potential):
        return forms.check_exact_potential(
            field, multiplier, document.volume, potential, sampler, tolerance
        )


class InverseMultiplierCheck(Check):
    kind = "inverse_multiplier"
    arguments = {"field": Argument("field"), "inverse": Argument("scalar")}

    def run(self, document, sampler, tolerance, field, inverse):
        return fields.check_inverse_multiplier(field, inverse, document.volume, sampler, tolerance)


class FirstIntegralCheck(Check):
    kind = "first_integral"
    arguments = {"field": Argument("field"), "function": Argument("scalar")}

    def run(self, document, sampler, tolerance, field, function):
        return fields.check_first_integral(field, function, sampler, tolerance)


class PoissonJacobiCheck(Check):
    kind = "poisson_jacobi"
    structures = POISSON

    def run(self, document, sampler, tolerance):
        return poisson.check_jacobi(document.poisson, sampler, tolerance)


class HamiltonianMultiplierCheck(Check):
    kind = "ham_multiplier"
    structures = POISSON
    arguments = {"function": Argument("scalar"), "multiplier": Argument("scalar")}

    def run(self, document, sampler, tolerance, function, multiplier):
        return poisson.check_ham_multiplier(
            document.poisson, function, multiplier, sampler, tolerance
        )


class SelfMultiplierCheck(Check):
    kind = "self_multiplier"
    structures = POISSON
    arguments = {"function": Argument("scalar")}

    def run(self, document, sampler, tolerance, function):
        return poisson.check_self_multiplier(document.poisson, function, sampler, tolerance)


class UnimodularMultiplierCheck(Check):
    kind = "unimodular_multiplier"
    structures = POISSON
    arguments = {
        "rho": Argument("scalar"),
        "function": Argument("scalar"),
        "multiplier": Argument("scalar", required=False),
    }

    def run(self, document, sampler, tolerance, rho, function, multiplier):
        if multiplier is None:
            return poisson.check_unimodular_self_multiplier(
                document.poisson, rho, function, sampler, tolerance
            )
        return poisson.check_unimodular_multiplier(
            document.poisson, rho, function, multiplier, sampler, tolerance
        )


class GradientMultiplierCheck(Check):
    kind = "gradient_multiplier"
    structures = RIEMANNIAN
    arguments = {"function": Argument("scalar"), "multiplier": Argument("scalar")}

    def run(self, document, sampler, tolerance, function, multiplier):
        return riemann.check_gradient_multiplier(
            document.metric, function, multiplier, sampler, tolerance
        )


class LogKernelCheck(GradientMultiplierCheck):
    kind = "log_kernel"

    def run(self, document, sampler, tolerance, function, multiplier):
        return riemann.check_log_kernel(document.metric, function, multiplier, sampler, tolerance)


class MutualHarmonicCheck(GradientMultiplierCheck):
    kind = "mutual_harmonic"

    def run(self, document, sampler, tolerance, function, multiplier):
        return riemann.check_mutual_harmonic(
            document.metric, function, multiplier, sampler, tolerance
        )


class HelmholtzResidualCheck(Check):
    kind = "helmholtz_residual"
    structures = RIEMANNIAN
    arguments = {
        "field": Argument("field"),
        "function": Argument("scalar"),
        "multiplier": Argument("scalar"),
    }

    def run(self, document, sampler, tolerance, field, function, multiplier):
        return riemann.check_helmholtz_residual(
            document.metric, field, function, multiplier, sampler, tolerance
        )


class HarmonicSquareCheck(Check):
    kind = "harmonic_square"
    structures = RIEMANNIAN
    arguments = {"function": Argument("scalar")}

    def run(self, document, sampler, tolerance, function):
        return riemann.check_harmonic_square(document.metric, function, sampler, tolerance)


class PorousResidualCheck(Check):
    kind = "porous_residual"
    structures = RIEMANNIAN
    arguments = {
        "function": Argument("scalar"),
        "reading": Argument(
            "choice", required=False, default="fiber", choices=("fiber", "product")
        ),
    }

    def run(self, document, sampler, tolerance, function, reading):
        return riemann.check_porous_residual(
            document.metric, function, sampler, tolerance, reading=reading
        )


class HelmholtzPairCheck(Check):
    kind = "helmholtz_pair"
    structures = RIEMANNIAN
    arguments = {
        "a": Argument("scalar"),
        "b": Argument("scalar"),
        "k": Argument("number", required=False, default=0.0),
    }

    def run(self, document, sampler, tolerance, a, b, k):
        return riemann.helmholtz_pair_multiplier(document.metric, a, b, k, sampler, tolerance)[2]


class GasDynamicsCheck(Check):
    kind = "gas_dynamics"
    structures = RIEMANNIAN
    arguments = {"multiplier": Argument("scalar"), "phi": Argument("scalar")}

    def run(self, document, sampler, tolerance, multiplier, phi):
        return riemann.check_gas_dynamics(document.metric, multiplier, phi, sampler, tolerance)


class MHarmonicCheck(Check):
    kind = "m_harmonic"
    structures = RIEMANNIAN
    arguments = {
        "form": Argument("form"),
        "multiplier": Argument("scalar"),
        "phi": Argument("scalar", required=False),
    }

    def run(self, document, sampler, tolerance, form, multiplier, phi):
        return riemann.check_m_harmonic(
            document.metric, multiplier, form, sampler, tolerance, phi=phi
        )


class BracketFirstIntegralCheck(Check):
    kind = "bracket_first_integral"
    structures = RIEMANNIAN
    arguments = {
        "a": Argument("scalar"),
        "b": Argument("scalar"),
        "multiplier": Argument("scalar"),
    }

    def run(self, document, sampler, tolerance, a, b, multiplier):
        return riemann.check_bracket_first_integral(
            document.metric, a, b, multiplier, sampler, tolerance
        )


class FlowDriftCheck(Check):
    kind = "flow_drift"
    arguments = _flow_arguments()

    def run(self, document, sampler, tolerance, field, multiplier, x0, dt, T, max_drift):
        report = flow.transport_drift(field, multiplier, document.volume, x0, dt, T)
        return report.as_verdict(self.kind, max_drift)


class JacobianDriftCheck(Check):
    kind = "jacobian_drift"
    arguments = _flow_arguments()

    def run(self, document, sampler, tolerance, field, multiplier, x0, dt, T, max_drift):
        report = flow.jacobian_invariant_drift(field, multiplier, x0, dt, T)
        return report.as_verdict(self.kind, max_drift)
