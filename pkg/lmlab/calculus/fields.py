"""Vector fields with a volume form: divergence, brackets and the last-multiplier residual."""

import logging
from dataclasses import dataclass, field

from .exceptions import ChartMismatchError, StructureError
from .expressions import (
    ONE,
    ZERO,
    Add,
    Chart,
    Div,
    Mul,
    Neg,
    as_expr,
    partial_derivative,
    simplify,
    sum_of,
)
from .sampling import (
    CheckVerdict,
    Sampler,
    agree_on_domain,
    require_nonvanishing,
    require_positive,
    require_same_chart,
    zero_on_domain,
)

__all__ = [
    "VolumeForm",
    "VectorField",
    "divergence",
    "apply_field",
    "multiplier_residual",
    "check_last_multiplier",
    "adjoint_apply",
    "lie_bracket",
    "check_inverse_multiplier",
    "check_first_integral",
    "scale_field",
    "add_fields",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class VolumeForm:
    """V = σ dx^1 ∧ ... ∧ dx^n."""

    chart: Chart
    density: object = ONE
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        density = simplify(as_expr(self.density))
        object.__setattr__(self, "density", density)
        self.chart.validate_expression(density)
        if self.validate and not density.is_constant:
            require_positive(
                density, Sampler.default(self.chart), "Volume density", error_class=StructureError
            )
        elif density.is_constant and not density.value > 0:
            raise StructureError(f"Volume density {density} must be positive")

    @classmethod
    def coordinate(cls, chart):
        return cls(chart, ONE)

    @property
    def is_unit(self) -> bool:
        return self.density == ONE


@dataclass(frozen=True)
class VectorField:
    chart: Chart
    components: tuple

    def __post_init__(self):
        components = tuple(simplify(as_expr(component)) for component in self.components)
        if len(components) != self.chart.dim:
            raise StructureError(
                f"Vector field has {len(components)} components "
                f"on a {self.chart.dim}-dimensional chart"
            )
        for component in components:
            self.chart.validate_expression(component)
        object.__setattr__(self, "components", components)

    @classmethod
    def zero(cls, chart):
        return cls(chart, (ZERO,) * chart.dim)

    @classmethod
    def coordinate_field(cls, chart, coordinate, scale=1):
        """The field scale·∂/∂x^i."""
        index = chart.index(coordinate)
        return cls(chart, tuple(as_expr(scale) if i == index else ZERO for i in range(chart.dim)))

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, index):
        return self.components[index]

    def __len__(self):
        return len(self.components)

    def __str__(self):
        return "(" + ", ".join(str(component) for component in self.components) + ")"

    def is_zero(self) -> bool:
        return all(component.is_zero() for component in self.components)

    def __call__(self, f):
        return apply_field(self, f)


def _chart_of(*items):
    charts = [getattr(item, "chart", None) for item in items]
    try:
        return require_same_chart(*charts)
    except ChartMismatchError:
        raise ChartMismatchError(
            "Operands live on different charts: "
            + ", ".join(str(chart.coord_names) for chart in charts if chart is not None)
        )


def apply_field(A, f):
    """A(f) = Σ A^i ∂_i f."""
    f = as_expr(f)
    A.chart.validate_expression(f)
    return simplify(
        sum_of(
            Mul((component, partial_derivative(f, index)))
            for index, component in enumerate(A.components)
            if not component.is_zero()
        )
    )


def divergence(A, V=None):
    """(1/σ) Σ_i ∂_i(σ A^i)."""
    if V is None:
        V = VolumeForm.coordinate(A.chart)
    _chart_of(A, V)
    if V.is_unit:
        return simplify(
            sum_of(partial_derivative(component, index) for index, component in enumerate(A))
        )
    sigma = V.density
    total = sum_of(
        partial_derivative(Mul((sigma, component)), index)
        for index, component in enumerate(A)
        if not component.is_zero()
    )
    return simplify(Div(total, sigma))


def multiplier_residual(A, m, V=None):
    """A(m) + m·div A; identically zero exactly when m is a last multiplier."""
    m = as_expr(m)
    return simplify(Add((apply_field(A, m), Mul((m, divergence(A, V))))))


def adjoint_apply(A, m, V=None):
    """A*(m) = -A(m) - m·div A."""
    return simplify(Neg(multiplier_residual(A, m, V)))


def scale_field(f, X):
    f = as_expr(f)
    return VectorField(X.chart, tuple(Mul((f, component)) for component in X))


def add_fields(*vectors):
    chart = _chart_of(*vectors)
    return VectorField(
        chart, tuple(Add(tuple(parts)) for parts in zip(*(vector.components for vector in vectors)))
    )


def lie_bracket(X, Y):
    """[X, Y]^k = Σ_i (X^i ∂_i Y^k - Y^i ∂_i X^k)."""
    chart = _chart_of(X, Y)
    return VectorField(
        chart, tuple(Add((apply_field(X, y), Neg(apply_field(Y, x)))) for x, y in zip(X, Y))
    )


def _check_sampler(sampler, *items):
    _chart_of(sampler, *items)
    return sampler


def check_last_multiplier(A, m, V, sampler, tol=None):
    """
    Both routes to the same identity: the residual A(m) + m·div A and div(mA).  They must each
    vanish on the domain and agree with one another at every sample.
    """
    if V is None:
        V = VolumeForm.coordinate(A.chart)
    _check_sampler(sampler, A, V)
    m = simplify(as_expr(m))
    trivial = m.is_zero()
    if trivial:
        log.warning("Multiplier m ≡ 0 satisfies the last multiplier equation trivially")

    residual = multiplier_residual(A, m, V)
    divergence_route = divergence(scale_field(m, A), V)
    return CheckVerdict.combine(
        "last_multiplier",
        zero_on_domain(residual, sampler, tol, label="residual"),
        zero_on_domain(divergence_route, sampler, tol, label="div(mA)"),
        agree_on_domain(residual, divergence_route, sampler, label="residual = div(mA)"),
        trivial=trivial,
    )


def check_inverse_multiplier(A, h, V, sampler, tol=None):
    """A(h) = (div A)·h, cross-checked by confirming that 1/h is a last multiplier."""
    if V is None:
        V = VolumeForm.coordinate(A.chart)
    _check_sampler(sampler, A, V)
    h = simplify(as_expr(h))
    require_nonvanishing(h, sampler, "Inverse multiplier")

    residual = simplify(Add((apply_field(A, h), Neg(Mul((h, divergence(A, V)))))))
    verdict = zero_on_domain(residual, sampler, tol, label="inverse_multiplier")
    if not verdict.passed:
        return verdict
    reciprocal = check_last_multiplier(A, simplify(Div(ONE, h)), V, sampler, tol)
    return CheckVerdict.combine("inverse_multiplier", verdict, reciprocal.relabel("1/h"))


def check_first_integral(A, f, sampler, tol=None):
    _check_sampler(sampler, A)
    return zero_on_domain(apply_field(A, f), sampler, tol, label="first_integral")
