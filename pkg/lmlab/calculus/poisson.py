"""Poisson bivectors with the coordinate volume form, and Lie-Poisson structures."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .exceptions import ChartMismatchError, PoissonStructureError, StructureConstantsError
from .expressions import (
    ZERO,
    Add,
    Chart,
    Mul,
    Neg,
    as_expr,
    const,
    partial_derivative,
    simplify,
    sum_of,
)
from .fields import VectorField, VolumeForm, check_last_multiplier
from .sampling import CheckVerdict, Sampler, zero_on_domain

__all__ = [
    "PoissonStructure",
    "StructureConstants",
    "bracket",
    "hamiltonian_field",
    "modular_field",
    "check_jacobi",
    "check_ham_multiplier",
    "check_self_multiplier",
    "check_unimodular_multiplier",
    "check_unimodular_self_multiplier",
    "lie_poisson",
    "lie_poisson_chart",
    "affine_self_multiplier_2d",
    "literal_printed_affine_2d",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PoissonStructure:
    """π = Σ_{i<j} π^{ij} ∂_i ∧ ∂_j, stored by its strictly upper triangle (0-based)."""

    chart: Chart
    upper: dict
    validate: bool = True

    def __post_init__(self):
        n = self.chart.dim
        upper = {}
        for (i, j), value in dict(self.upper).items():
            if not (0 <= i < j < n):
                raise PoissonStructureError(
                    f"Bivector entry ({i + 1},{j + 1}) must satisfy 1 <= i < j <= {n}"
                )
            value = simplify(as_expr(value))
            self.chart.validate_expression(value)
            if not value.is_zero():
                upper[(i, j)] = value
        object.__setattr__(self, "upper", dict(sorted(upper.items())))
        if self.validate:
            verdict = check_jacobi(self, Sampler.default(self.chart))
            if not verdict.passed:
                raise PoissonStructureError(
                    f"Bivector violates the Jacobi identity at {verdict.witness} "
                    f"(residual {verdict.max_abs_residual:.3e})"
                )

    def entry(self, i, j):
        """π^{ij} of the full antisymmetric matrix."""
        if i == j:
            return ZERO
        if i < j:
            return self.upper.get((i, j), ZERO)
        return simplify(Neg(self.upper.get((j, i), ZERO)))

    @property
    def matrix(self) -> tuple:
        n = self.chart.dim
        return tuple(tuple(self.entry(i, j) for j in range(n)) for i in range(n))

    def __str__(self):
        names = self.chart.coord_names
        return ", ".join(
            f"π({names[i]},{names[j]}) = {value}" for (i, j), value in self.upper.items()
        ) or "0"


def _chart(pi, *expressions):
    for expr in expressions:
        pi.chart.validate_expression(expr)
    return pi.chart


def bracket(pi, f, g):
    """{f, g} = Σ_{i,j} π^{ij} ∂_i f ∂_j g, summed over the full antisymmetric matrix."""
    f, g = as_expr(f), as_expr(g)
    _chart(pi, f, g)
    terms = []
    for (i, j), value in pi.upper.items():
        # π^{ij} and π^{ji} = -π^{ij} pair up
        pair = Add(
            (
                Mul((partial_derivative(f, i), partial_derivative(g, j))),
                Neg(Mul((partial_derivative(f, j), partial_derivative(g, i)))),
            )
        )
        terms.append(Mul((value, pair)))
    return simplify(sum_of(terms))


def hamiltonian_field(pi, f):
    """A_f^i = Σ_j π^{ji} ∂_j f, so that A_f(g) = {f, g} and div A_f = X_V(f)."""
    f = as_expr(f)
    chart = _chart(pi, f)
    n = chart.dim
    gradient = [partial_derivative(f, j) for j in range(n)]
    return VectorField(
        chart,
        tuple(sum_of(Mul((pi.entry(j, i), gradient[j])) for j in range(n)) for i in range(n)),
    )


def modular_field(pi):
    """X_V = Σ π^i ∂_i with π^i = Σ_j ∂_j π^{ij}."""
    n = pi.chart.dim
    return VectorField(
        pi.chart,
        tuple(sum_of(partial_derivative(pi.entry(i, j), j) for j in range(n)) for i in range(n)),
    )


def check_jacobi(pi, sampler, tol=None):
    """The Jacobiator of every coordinate triple must vanish."""
    if sampler.chart != pi.chart:
        raise ChartMismatchError("Sampler and bivector live on different charts")
    coordinates = pi.chart.coordinates
    verdicts = []
    for f, g, h in combinations(coordinates, 3):
        jacobiator = Add(
            (
                bracket(pi, f, bracket(pi, g, h)),
                bracket(pi, g, bracket(pi, h, f)),
                bracket(pi, h, bracket(pi, f, g)),
            )
        )
        verdicts.append(
            zero_on_domain(simplify(jacobiator), sampler, tol, label=f"jacobi({f},{g},{h})")
        )
    if not verdicts:
        return zero_on_domain(ZERO, sampler, tol, label="poisson_jacobi")
    return CheckVerdict.combine("poisson_jacobi", *verdicts)


def check_self_multiplier(pi, f, sampler, tol=None):
    """X_V(f) = 0: f is its own last multiplier for A_f."""
    return zero_on_domain(modular_field(pi)(f), sampler, tol, label="self_multiplier")


def check_ham_multiplier(pi, f, m, sampler, tol=None):
    """
    m X_V(f) - {m, f} = 0, which is div(m A_f) with the coordinate volume; both routes are run
    and must agree.
    """
    f, m = as_expr(f), as_expr(m)
    residual = simplify(Add((Mul((m, modular_field(pi)(f))), Neg(bracket(pi, m, f)))))
    verdict = zero_on_domain(residual, sampler, tol, label="ham_multiplier")
    field_route = check_last_multiplier(
        hamiltonian_field(pi, f), m, VolumeForm.coordinate(pi.chart), sampler, tol
    )
    if field_route.passed != verdict.passed:
        log.error(
            "Bracket and field forms of the Hamiltonian multiplier check disagree for f=%s, m=%s",
            f,
            m,
        )
    return CheckVerdict.combine("ham_multiplier", verdict, field_route.relabel("div(m A_f)"))


def _unimodular_hypothesis(pi, rho, sampler, tol):
    """X_V = A_ρ on the domain."""
    modular, hamiltonian = modular_field(pi), hamiltonian_field(pi, rho)
    verdicts = [
        zero_on_domain(
            simplify(Add((x, Neg(a)))),
            sampler,
            tol,
            label=f"X_V = A_rho [{pi.chart.coord_names[i]}]",
        )
        for i, (x, a) in enumerate(zip(modular, hamiltonian))
    ]
    return CheckVerdict.combine("hypothesis", *verdicts, reason="hypothesis")


def check_unimodular_multiplier(pi, rho, f, m, sampler, tol=None):
    """When X_V = A_ρ, m is a last multiplier of A_f iff m{ρ, f} = {m, f}."""
    hypothesis = _unimodular_hypothesis(pi, rho, sampler, tol)
    if not hypothesis.passed:
        return hypothesis.relabel("unimodular_multiplier", reason="hypothesis")
    m = as_expr(m)
    residual = simplify(Add((Mul((m, bracket(pi, rho, f))), Neg(bracket(pi, m, f)))))
    conclusion = zero_on_domain(residual, sampler, tol, label="conclusion")
    return CheckVerdict.combine(
        "unimodular_multiplier", hypothesis, conclusion.relabel("conclusion", reason="conclusion")
    )


def check_unimodular_self_multiplier(pi, rho, f, sampler, tol=None):
    """When X_V = A_ρ, f is a self multiplier iff {ρ, f} = 0."""
    hypothesis = _unimodular_hypothesis(pi, rho, sampler, tol)
    if not hypothesis.passed:
        return hypothesis.relabel("unimodular_self_multiplier", reason="hypothesis")
    conclusion = zero_on_domain(bracket(pi, rho, f), sampler, tol, label="conclusion")
    return CheckVerdict.combine(
        "unimodular_self_multiplier",
        hypothesis,
        conclusion.relabel("conclusion", reason="conclusion"),
    )


class StructureConstants:
    """c_{ij}^k of a Lie algebra, antisymmetric in (i, j); indices are 0-based internally."""

    def __init__(self, dim, values=None):
        if dim < 1:
            raise StructureConstantsError("Lie algebra dimension must be positive")
        self.dim = dim
        self.values = {}
        for (i, j, k), value in (values or {}).items():
            self._store(i, j, k, value)
        self.validate()

    def _store(self, i, j, k, value):
        if not all(0 <= index < self.dim for index in (i, j, k)):
            raise StructureConstantsError(
                f"Index ({i + 1},{j + 1},{k + 1}) out of range for dimension {self.dim}"
            )
        if i >= j:
            raise StructureConstantsError(f"Entry ({i + 1},{j + 1},{k + 1}) needs i < j")
        if (i, j, k) in self.values:
            raise StructureConstantsError(f"Entry ({i + 1},{j + 1},{k + 1}) given twice")
        value = const(value).value
        if value:
            self.values[(i, j, k)] = value

    @classmethod
    def from_entries(cls, dim, entries):
        """Builds from 1-based ``(i, j, k, value)`` entries with i < j."""
        values = {}
        for entry in entries:
            try:
                i, j, k, value = entry
            except (TypeError, ValueError):
                raise StructureConstantsError(f"Entry {entry!r} is not an (i, j, k, value) tuple")
            key = (int(i) - 1, int(j) - 1, int(k) - 1)
            if key in values:
                raise StructureConstantsError(f"Entry ({i},{j},{k}) given twice")
            values[key] = value
        return cls(dim, values)

    @classmethod
    def so3(cls):
        return cls.from_entries(3, [(1, 2, 3, 1), (2, 3, 1, 1), (1, 3, 2, -1)])

    @classmethod
    def abelian(cls, dim):
        return cls(dim)

    def __call__(self, i, j, k) -> Fraction:
        if i == j:
            return Fraction(0)
        if i < j:
            return self.values.get((i, j, k), Fraction(0))
        return -self.values.get((j, i, k), Fraction(0))

    def jacobiator(self, i, j, k, l) -> Fraction:
        c = self
        return sum(
            (
                c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l)
                for m in range(self.dim)
            ),
            Fraction(0),
        )

    def validate(self):
        for i, j, k, l in product(range(self.dim), repeat=4):
            value = self.jacobiator(i, j, k, l)
            if value != 0:
                raise StructureConstantsError(
                    "Jacobi identity fails for (i,j,k,l)=(%d,%d,%d,%d): %s"
                    % (i + 1, j + 1, k + 1, l + 1, value)
                )

    @property
    def modular_vector(self) -> tuple:
        """Σ_j c_{ij}^j for each i."""
        return tuple(
            sum((self(i, j, j) for j in range(self.dim)), Fraction(0)) for i in range(self.dim)
        )

    @property
    def is_unimodular(self) -> bool:
        return not any(self.modular_vector)


def lie_poisson_chart(dim, low=0.5, high=2.0):
    return Chart.box(tuple(f"x{i + 1}" for i in range(dim)), low, high)


def lie_poisson(constants, chart=None):
    """π^{ij} = Σ_k c_{ij}^k x_k on the dual-basis coordinates."""
    chart = chart or lie_poisson_chart(constants.dim)
    if chart.dim != constants.dim:
        raise ChartMismatchError(
            f"Lie algebra of dimension {constants.dim} on a {chart.dim}-dimensional chart"
        )
    coordinates = chart.coordinates
    upper = {}
    for i, j in combinations(range(chart.dim), 2):
        upper[(i, j)] = sum_of(
            Mul((const(constants(i, j, k)), coordinates[k]))
            for k in range(chart.dim)
            if constants(i, j, k)
        )
    return PoissonStructure(chart, upper)


def _affine_chart(chart):
    chart = chart or lie_poisson_chart(2)
    if chart.dim != 2:
        raise ChartMismatchError("The affine family lives on a 2-dimensional chart")
    return chart


def affine_self_multiplier_2d(c1, c2, A, B, chart=None):
    """
    f = A(c1 x1 + c2 x2) + B solves c2 ∂_1 f - c1 ∂_2 f = 0, i.e. is a self multiplier for the
    Lie-Poisson structure π^{12} = c1 x1 + c2 x2.
    """
    if c1 == 0 and c2 == 0:
        raise StructureConstantsError("At least one of c1, c2 must be nonzero")
    x1, x2 = _affine_chart(chart).coordinates
    return simplify(
        Add((Mul((const(A), Add((Mul((const(c1), x1)), Mul((const(c2), x2)))))), const(B)))
    )


def literal_printed_affine_2d(c1, c2, A, B, chart=None):
    """
    f = A(x1/c1 + x2/c2) + B, the commonly printed form.  It leaves the constant residual
    A(c2/c1 - c1/c2) and is kept to document that it is not a solution unless c1^2 = c2^2.
    """
    if c1 == 0 or c2 == 0:
        raise StructureConstantsError("The printed form divides by both c1 and c2")
    x1, x2 = _affine_chart(chart).coordinates
    inverse1, inverse2 = 1 / const(c1).value, 1 / const(c2).value
    linear = Add((Mul((const(inverse1), x1)), Mul((const(inverse2), x2))))
    return simplify(Add((Mul((const(A), linear)), const(B))))
