"""
Exterior calculus on a chart.  A k-form is stored densely by strictly increasing 0-based
multi-index; absent indices are zero coefficients.
"""

import logging
from dataclasses import dataclass
from itertools import product

from .exceptions import ChartMismatchError, DegreeError
from .expressions import ONE, ZERO, Add, Chart, Div, Mul, Neg, as_expr, partial_derivative, simplify
from .fields import VolumeForm
from .sampling import CheckVerdict, Sampler, require_nonvanishing, zero_on_domain

__all__ = [
    "DifferentialForm",
    "wedge",
    "exterior_derivative",
    "interior_volume",
    "witten_derivative",
    "marsden_derivative",
    "scale_form",
    "add_forms",
    "form_zero_on_domain",
    "check_def11",
    "check_witten_characterization",
    "check_marsden_closed",
    "check_exact_potential",
]

log = logging.getLogger(__name__)


def _sorted_with_sign(indices):
    """(sign, sorted indices) of a wedge of coordinate differentials; sign 0 on repeats."""
    if len(set(indices)) != len(indices):
        return 0, None
    items = list(indices)
    sign = 1
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j] > items[j + 1]:
                items[j], items[j + 1] = items[j + 1], items[j]
                sign = -sign
    return sign, tuple(items)


@dataclass(frozen=True, eq=False)
class DifferentialForm:
    chart: Chart
    degree: int
    coefficients: dict

    def __post_init__(self):
        n = self.chart.dim
        # d of a top-degree form is the (flagged) zero (n+1)-form
        if not 0 <= self.degree <= n and not (self.degree == n + 1 and not self.coefficients):
            raise DegreeError(f"Degree {self.degree} is out of range for a {n}-dimensional chart")
        coefficients = {}
        for indices, coefficient in dict(self.coefficients).items():
            indices = tuple(indices)
            if len(indices) != self.degree:
                raise DegreeError(f"Multi-index {indices} does not have {self.degree} entries")
            if any(not 0 <= index < n for index in indices):
                raise DegreeError(
                    f"Multi-index {indices} is out of range for {self.chart.coord_names}"
                )
            if any(a >= b for a, b in zip(indices, indices[1:])):
                raise DegreeError(f"Multi-index {indices} is not strictly increasing")
            coefficient = simplify(as_expr(coefficient))
            self.chart.validate_expression(coefficient)
            if not coefficient.is_zero():
                coefficients[indices] = coefficient
        object.__setattr__(self, "coefficients", dict(sorted(coefficients.items())))

    @classmethod
    def zero(cls, chart, degree):
        return cls(chart, degree, {})

    @classmethod
    def scalar(cls, chart, f):
        return cls(chart, 0, {(): f})

    @classmethod
    def one_form(cls, chart, components):
        if len(components) != chart.dim:
            raise DegreeError(f"A 1-form on {chart.coord_names} needs {chart.dim} components")
        return cls(chart, 1, {(index,): value for index, value in enumerate(components)})

    @classmethod
    def volume(cls, chart, density=ONE):
        return cls(chart, chart.dim, {tuple(range(chart.dim)): density})

    def coefficient(self, indices) -> object:
        return self.coefficients.get(tuple(indices), ZERO)

    @property
    def components(self) -> tuple:
        """Coefficients of a 1-form in coordinate order."""
        if self.degree != 1:
            raise DegreeError(f"Components are only defined for 1-forms, not {self.degree}-forms")
        return tuple(self.coefficient((index,)) for index in range(self.chart.dim))

    def is_zero(self) -> bool:
        return not self.coefficients

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return (self.chart, self.degree, self.coefficients) == (
            other.chart,
            other.degree,
            other.coefficients,
        )

    def __hash__(self):
        return hash((self.chart, self.degree, tuple(self.coefficients.items())))

    def __str__(self):
        if not self.coefficients:
            return "0"
        names = self.chart.coord_names
        parts = []
        for indices, coefficient in self.coefficients.items():
            basis = "^".join(f"d{names[index]}" for index in indices)
            if not basis:
                parts.append(str(coefficient))
            elif coefficient == ONE:
                parts.append(basis)
            else:
                parts.append(f"({coefficient}) {basis}")
        return " + ".join(parts)


def _same_chart(*forms):
    chart = forms[0].chart
    for form in forms[1:]:
        if form.chart != chart:
            raise ChartMismatchError(
                f"Forms live on {chart.coord_names} and {form.chart.coord_names}"
            )
    return chart


def _collect(terms):
    return {key: Add(tuple(value)) for key, value in terms.items()}


def add_forms(*forms):
    chart = _same_chart(*forms)
    degree = forms[0].degree
    if any(form.degree != degree for form in forms):
        raise DegreeError("Only forms of equal degree can be added")
    terms = {}
    for form in forms:
        for indices, coefficient in form.coefficients.items():
            terms.setdefault(indices, []).append(coefficient)
    return DifferentialForm(chart, degree, _collect(terms))


def scale_form(f, a):
    f = as_expr(f)
    return DifferentialForm(
        a.chart, a.degree, {key: Mul((f, value)) for key, value in a.coefficients.items()}
    )


def wedge(a, b):
    chart = _same_chart(a, b)
    degree = a.degree + b.degree
    if degree > chart.dim:
        raise DegreeError(
            f"Wedge of degrees {a.degree} and {b.degree} exceeds dimension {chart.dim}"
        )
    terms = {}
    for (left, first), (right, second) in product(a.coefficients.items(), b.coefficients.items()):
        sign, indices = _sorted_with_sign(left + right)
        if sign == 0:
            continue
        terms.setdefault(indices, []).append(Mul((as_expr(sign), first, second)))
    return DifferentialForm(chart, degree, _collect(terms))


def exterior_derivative(a):
    """d(c dx^I) = Σ_i ∂_i c dx^i ∧ dx^I."""
    n = a.chart.dim
    if a.degree >= n:
        log.warning(
            "Exterior derivative of a %s-form on a %s-dimensional chart is zero", a.degree, n
        )
        return DifferentialForm.zero(a.chart, n + 1)
    terms = {}
    for indices, coefficient in a.coefficients.items():
        for index in sorted(coefficient.free_indices):
            sign, target = _sorted_with_sign((index,) + indices)
            if sign == 0:
                continue
            terms.setdefault(target, []).append(
                Mul((as_expr(sign), partial_derivative(coefficient, index)))
            )
    return DifferentialForm(a.chart, a.degree + 1, _collect(terms))


def interior_volume(A, V):
    """Ω = i_A V, with coefficient (-1)^(i-1) σ A^i on dx^1 ∧ .. dx^i omitted .. ∧ dx^n."""
    if A.chart != V.chart:
        raise ChartMismatchError(f"Field on {A.chart.coord_names}, volume on {V.chart.coord_names}")
    n = A.chart.dim
    coefficients = {}
    for index, component in enumerate(A):
        indices = tuple(j for j in range(n) if j != index)
        sign = -1 if index % 2 else 1
        coefficients[indices] = Mul((as_expr(sign), V.density, component))
    return DifferentialForm(A.chart, n - 1, coefficients)


def witten_derivative(f, t, a):
    """d_{tf}(a) = t df ∧ a + da."""
    f = as_expr(f)
    derivative = exterior_derivative(a)
    if as_expr(t).is_zero() or a.degree >= a.chart.dim:
        return derivative
    df = exterior_derivative(DifferentialForm.scalar(a.chart, f))
    return add_forms(scale_form(t, wedge(df, a)), derivative)


def marsden_derivative(f, a, sampler=None):
    """d^f(a) = (1/f) d(f a); refuses functions that vanish on the domain."""
    f = simplify(as_expr(f))
    if f == ONE:
        return exterior_derivative(a)
    require_nonvanishing(f, sampler or Sampler.default(a.chart), "Marsden weight")
    return scale_form(Div(ONE, f), exterior_derivative(scale_form(f, a)))


def form_zero_on_domain(form, sampler, tol=None, label="form"):
    """Every coefficient of ``form`` must vanish on the domain."""
    if form.is_zero():
        return zero_on_domain(ZERO, sampler, tol, label=label)
    names = sampler.chart.coord_names
    verdicts = []
    for indices, coefficient in form.coefficients.items():
        basis = "^".join(f"d{names[index]}" for index in indices) or "1"
        verdicts.append(zero_on_domain(coefficient, sampler, tol, label=f"{label}[{basis}]"))
    if len(verdicts) == 1:
        return verdicts[0].relabel(label)
    return CheckVerdict.combine(label, *verdicts)


def _trivial(m):
    trivial = simplify(as_expr(m)).is_zero()
    if trivial:
        log.warning("Multiplier m ≡ 0 satisfies d(mΩ) = 0 trivially")
    return trivial


def check_def11(A, m, V, sampler, tol=None):
    """d(mΩ) = dm ∧ Ω + m dΩ must vanish for Ω = i_A V."""
    V = V or VolumeForm.coordinate(A.chart)
    omega = interior_volume(A, V)
    closed = exterior_derivative(scale_form(m, omega))
    verdict = form_zero_on_domain(closed, sampler, tol, label="def11")
    return verdict.relabel("def11", trivial=_trivial(m))


def check_witten_characterization(A, m, V, sampler, tol=None):
    """d_m Ω - (1 - m) dΩ must vanish."""
    V = V or VolumeForm.coordinate(A.chart)
    m = as_expr(m)
    omega = interior_volume(A, V)
    left = witten_derivative(m, 1, omega)
    right = scale_form(Add((ONE, Neg(m))), exterior_derivative(omega))
    residual = add_forms(left, scale_form(-1, right))
    verdict = form_zero_on_domain(residual, sampler, tol, label="witten")
    return verdict.relabel("witten", trivial=_trivial(m))


def check_marsden_closed(A, m, V, sampler, tol=None):
    """Ω is d^m-closed; needs m nonvanishing on the domain."""
    V = V or VolumeForm.coordinate(A.chart)
    omega = interior_volume(A, V)
    residual = marsden_derivative(m, omega, sampler)
    return form_zero_on_domain(residual, sampler, tol, label="marsden")


def check_exact_potential(A, m, V, alpha, sampler, tol=None):
    """
    Local exactness mΩ = dα for a supplied (n-2)-form α.  When it holds, d(mΩ) = ddα = 0, so α
    certifies m as a last multiplier without differentiating m.
    """
    V = V or VolumeForm.coordinate(A.chart)
    n = A.chart.dim
    if n < 2:
        raise DegreeError("An exact potential needs a chart of dimension at least 2")
    if alpha.degree != n - 2:
        raise DegreeError(f"Potential must be a {n - 2}-form, got degree {alpha.degree}")
    omega = interior_volume(A, V)
    residual = add_forms(scale_form(m, omega), scale_form(-1, exterior_derivative(alpha)))
    return CheckVerdict.combine(
        "exact_potential",
        form_zero_on_domain(residual, sampler, tol, label="mΩ - dα"),
        check_def11(A, m, V, sampler, tol),
    )
