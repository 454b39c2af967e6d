"""
Riemannian operators on a chart and the last-multiplier constructions that use them:
gradient fields, Helmholtz-decomposed fields, the porous-medium reduction, harmonic squares,
rotationally symmetric surfaces, Helmholtz-equation pairs and m-harmonic 1-forms.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

from .exceptions import (
    ChartMismatchError,
    DegreeError,
    DivergenceFreeError,
    HelmholtzPreconditionError,
    MetricError,
    NonProductMetricError,
    PreconditionError,
    RadicandError,
)
from .expressions import (
    ONE,
    ZERO,
    Add,
    Chart,
    Div,
    Func,
    Mul,
    Neg,
    Pow,
    as_expr,
    const,
    partial_derivative,
    product_of,
    simplify,
    sum_of,
)
from .fields import (
    VectorField,
    VolumeForm,
    add_fields,
    apply_field,
    check_last_multiplier,
    divergence,
    lie_bracket,
    multiplier_residual,
    scale_field,
)
from .forms import (
    DifferentialForm,
    add_forms,
    exterior_derivative,
    form_zero_on_domain,
    scale_form,
)
from .sampling import (
    CheckVerdict,
    Sampler,
    agree_on_domain,
    require_positive,
    zero_on_domain,
)

__all__ = [
    "Metric",
    "volume_density",
    "gradient",
    "laplacian",
    "inner_product",
    "raise_index",
    "lower_index",
    "codifferential_1form",
    "check_helmholtz_residual",
    "check_gradient_multiplier",
    "porous_medium_residual",
    "porous_link_residual",
    "check_porous_residual",
    "check_harmonic_square",
    "radial_harmonic_square",
    "rotsym_distance_multiplier",
    "conformal_coordinate_integrand",
    "helmholtz_pair_multiplier",
    "check_m_harmonic",
    "check_bracket_first_integral",
    "check_log_kernel",
    "check_mutual_harmonic",
    "check_gas_dynamics",
]

log = logging.getLogger(__name__)

# Derived identities hold exactly; this only absorbs round-off
IDENTITY_TOLERANCE = 1e-9

ROTSYM_DOMAIN = ((0.5, 2.0), (0.0, 3.0))


def _determinant(matrix):
    size = len(matrix)
    if size == 1:
        return matrix[0][0]
    if size == 2:
        return Add((Mul((matrix[0][0], matrix[1][1])), Neg(Mul((matrix[0][1], matrix[1][0])))))
    terms = []
    for column, entry in enumerate(matrix[0]):
        if entry.is_zero():
            continue
        minor = [row[:column] + row[column + 1 :] for row in matrix[1:]]
        cofactor = Mul((entry, simplify(_determinant(minor))))
        terms.append(cofactor if column % 2 == 0 else Neg(cofactor))
    return sum_of(terms)


def _minor(matrix, row, column):
    return [
        entries[:column] + entries[column + 1 :]
        for index, entries in enumerate(matrix)
        if index != row
    ]


@dataclass(frozen=True, eq=False)
class Metric:
    chart: Chart
    matrix: tuple
    validate: bool = True

    def __post_init__(self):
        n = self.chart.dim
        rows = tuple(tuple(simplify(as_expr(entry)) for entry in row) for row in self.matrix)
        if len(rows) != n or any(len(row) != n for row in rows):
            raise MetricError(f"Metric must be a {n}x{n} matrix")
        for i in range(n):
            for j in range(n):
                self.chart.validate_expression(rows[i][j])
                if j > i and rows[i][j] != rows[j][i]:
                    raise MetricError(
                        f"Metric is not symmetric: g[{i + 1}][{j + 1}] = {rows[i][j]} but "
                        f"g[{j + 1}][{i + 1}] = {rows[j][i]}"
                    )
        object.__setattr__(self, "matrix", rows)
        if self.validate:
            self.check(Sampler.default(self.chart))

    @classmethod
    def euclidean(cls, chart):
        n = chart.dim
        return cls(chart, tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, chart, entries, validate=True):
        n = chart.dim
        return cls(
            chart,
            tuple(tuple(entries[i] if i == j else ZERO for j in range(n)) for i in range(n)),
            validate=validate,
        )

    @classmethod
    def rotationally_symmetric(cls, phi, chart=None):
        """g = dt^2 + φ(t)^2 dθ^2 on the chart (t, θ)."""
        chart = chart or Chart(("t", "theta"), ROTSYM_DOMAIN)
        if chart.dim != 2:
            raise MetricError("A rotationally symmetric metric lives on a 2-dimensional chart")
        phi = simplify(as_expr(phi))
        if phi.free_indices - {0}:
            raise MetricError(f"Profile {phi} may only depend on {chart.coord_names[0]}")
        require_positive(phi, Sampler.default(chart), "Profile φ", error_class=MetricError)
        return cls.diagonal(chart, (ONE, Pow(phi, 2)))

    def __getitem__(self, key):
        i, j = key
        return self.matrix[i][j]

    @cached_property
    def is_diagonal(self) -> bool:
        n = self.chart.dim
        return all(self.matrix[i][j].is_zero() for i in range(n) for j in range(n) if i != j)

    @cached_property
    def is_euclidean(self) -> bool:
        n = self.chart.dim
        return self.is_diagonal and all(self.matrix[i][i] == ONE for i in range(n))

    @cached_property
    def determinant(self):
        if self.is_diagonal:
            return simplify(product_of(self.matrix[i][i] for i in range(self.chart.dim)))
        return simplify(_determinant(self.matrix))

    @cached_property
    def inverse(self) -> tuple:
        n = self.chart.dim
        if self.is_diagonal:
            return tuple(
                tuple(simplify(Div(ONE, self.matrix[i][i])) if i == j else ZERO for j in range(n))
                for i in range(n)
            )
        if n == 1:
            return ((simplify(Div(ONE, self.matrix[0][0])),),)
        det = self.determinant
        inverse = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                cofactor = simplify(_determinant(_minor(self.matrix, j, i)))
                if (i + j) % 2:
                    cofactor = Neg(cofactor)
                inverse[i][j] = inverse[j][i] = simplify(Div(cofactor, det))
        return tuple(tuple(row) for row in inverse)

    @cached_property
    def density(self):
        """√det g."""
        if self.is_euclidean:
            return ONE
        if self.is_diagonal:
            return simplify(
                product_of(Func("sqrt", self.matrix[i][i]) for i in range(self.chart.dim))
            )
        return simplify(Func("sqrt", self.determinant))

    @cached_property
    def volume_form(self):
        return VolumeForm(self.chart, self.density, validate=False)

    def check(self, sampler, tol=IDENTITY_TOLERANCE):
        """det g > 0 and g·g^-1 = I at the samples; raises MetricError otherwise."""
        require_positive(self.determinant, sampler, "Metric determinant", error_class=MetricError)
        n = self.chart.dim
        if self.is_diagonal:
            return self
        for i in range(n):
            for j in range(n):
                entry = sum_of(Mul((self.matrix[i][k], self.inverse[k][j])) for k in range(n))
                if i == j:
                    entry = Add((entry, const(-1)))
                verdict = zero_on_domain(simplify(entry), sampler, tol, label="g g^-1 = I")
                if not verdict.passed:
                    raise MetricError(f"Metric inverse fails at {verdict.witness}")
        return self


def _chart(g, *expressions):
    for expr in expressions:
        g.chart.validate_expression(as_expr(expr))
    return g.chart


def volume_density(g):
    return g.density


def gradient(g, u):
    """(∇u)^i = Σ_j g^{ij} ∂_j u."""
    u = as_expr(u)
    chart = _chart(g, u)
    n = chart.dim
    derivatives = [partial_derivative(u, j) for j in range(n)]
    if g.is_euclidean:
        return VectorField(chart, tuple(derivatives))
    return VectorField(
        chart,
        tuple(
            sum_of(
                Mul((g.inverse[i][j], derivatives[j]))
                for j in range(n)
                if not g.inverse[i][j].is_zero()
            )
            for i in range(n)
        ),
    )


def laplacian(g, u):
    """Δu = div_{V_g} ∇u."""
    return divergence(gradient(g, u), g.volume_form)


def inner_product(g, f, h):
    """<∇f, ∇h>_g = g^{-1}(df, dh)."""
    f, h = as_expr(f), as_expr(h)
    chart = _chart(g, f, h)
    n = chart.dim
    df = [partial_derivative(f, i) for i in range(n)]
    dh = [partial_derivative(h, j) for j in range(n)]
    return simplify(
        sum_of(
            Mul((g.inverse[i][j], df[i], dh[j]))
            for i in range(n)
            for j in range(n)
            if not g.inverse[i][j].is_zero()
        )
    )


def raise_index(g, w):
    """The g-dual vector field of a 1-form."""
    if w.degree != 1:
        raise DegreeError(f"Only 1-forms can be raised, got a {w.degree}-form")
    if w.chart != g.chart:
        raise ChartMismatchError("Form and metric live on different charts")
    n = g.chart.dim
    components = w.components
    return VectorField(
        g.chart,
        tuple(sum_of(Mul((g.inverse[i][j], components[j])) for j in range(n)) for i in range(n)),
    )


def lower_index(g, X):
    """The g-dual 1-form of a vector field."""
    if X.chart != g.chart:
        raise ChartMismatchError("Field and metric live on different charts")
    n = g.chart.dim
    return DifferentialForm.one_form(
        g.chart,
        [sum_of(Mul((g.matrix[i][j], X[j])) for j in range(n)) for i in range(n)],
    )


def codifferential_1form(g, w):
    """δw = -div_{V_g}(w♯)."""
    return simplify(Neg(divergence(raise_index(g, w), g.volume_form)))


def _sampler_for(g, sampler):
    if sampler.chart != g.chart:
        raise ChartMismatchError("Sampler and metric live on different charts")
    return sampler


def check_gradient_multiplier(g, u, m, sampler, tol=None):
    """
    m Δu + <∇u, ∇m> = 0, checked against div(m∇u) pointwise and against the rearranged
    identity Δ(um) + mΔu - uΔm = 2(mΔu + <∇u, ∇m>).
    """
    _sampler_for(g, sampler)
    u, m = simplify(as_expr(u)), simplify(as_expr(m))
    residual = simplify(Add((Mul((m, laplacian(g, u))), inner_product(g, u, m))))
    divergence_route = divergence(scale_field(m, gradient(g, u)), g.volume_form)
    rearranged = simplify(
        Add(
            (
                laplacian(g, Mul((u, m))),
                Mul((m, laplacian(g, u))),
                Neg(Mul((u, laplacian(g, m)))),
                Mul((const(-2), residual)),
            )
        )
    )
    return CheckVerdict.combine(
        "gradient_multiplier",
        zero_on_domain(residual, sampler, tol, label="mΔu + <∇u,∇m>"),
        zero_on_domain(divergence_route, sampler, tol, label="div(m∇u)"),
        agree_on_domain(residual, divergence_route, sampler, label="residual = div(m∇u)"),
        zero_on_domain(rearranged, sampler, IDENTITY_TOLERANCE, label="Δ(um) identity"),
    )


def check_helmholtz_residual(g, X, u, m, sampler, tol=None):
    """X(m) + <∇u, ∇m> + mΔu = 0 for A = X + ∇u with X divergence-free."""
    _sampler_for(g, sampler)
    free = zero_on_domain(divergence(X, g.volume_form), sampler, tol, label="div X")
    if not free.passed:
        raise DivergenceFreeError(
            f"div X does not vanish (max {free.max_abs_residual:.3e} at {free.witness})"
        )
    u, m = as_expr(u), as_expr(m)
    residual = simplify(
        Add((apply_field(X, m), inner_product(g, u, m), Mul((m, laplacian(g, u)))))
    )
    verdict = zero_on_domain(residual, sampler, tol, label="helmholtz_residual")
    field_route = check_last_multiplier(
        add_fields(X, gradient(g, u)), m, g.volume_form, sampler, tol
    )
    return CheckVerdict.combine("helmholtz_residual", verdict, field_route.relabel("X + ∇u"))


def _product_parts(g):
    """Splits dt^2 + g_N; raises NonProductMetricError for anything else."""
    n = g.chart.dim
    if n < 2:
        raise NonProductMetricError("A cylinder I x N needs at least one fiber coordinate")
    if g.matrix[0][0] != ONE:
        raise NonProductMetricError(f"g_tt must be 1, got {g.matrix[0][0]}")
    for j in range(1, n):
        if not g.matrix[0][j].is_zero():
            raise NonProductMetricError(f"Cross term g_t{g.chart.coord_names[j]} must vanish")
        for i in range(1, n):
            if 0 in g.matrix[i][j].free_indices:
                raise NonProductMetricError(
                    "Fiber metric may not depend on the cylinder coordinate"
                )
    return g


def _fiber_gradient(g, u):
    components = list(gradient(g, u).components)
    components[0] = ZERO
    return VectorField(g.chart, tuple(components))


def _porous_gradient(g, u, reading):
    if reading == "fiber":
        return _fiber_gradient(g, u)
    if reading == "product":
        return gradient(g, u)
    raise ValueError(f"Unknown porous-medium reading {reading!r}")


def porous_medium_residual(g, u, reading="fiber"):
    """
    u_t - Δ(u^2) on the cylinder I x N.  The "fiber" reading takes Δ on N; the "product"
    reading uses the full Laplacian of dt^2 + g_N.
    """
    _product_parts(g)
    u = as_expr(u)
    square = simplify(Pow(u, 2))
    laplace = divergence(_porous_gradient(g, square, reading), g.volume_form)
    return simplify(Add((partial_derivative(u, 0), Neg(laplace))))


def porous_link_residual(g, u, reading="fiber"):
    """-2 times the multiplier residual of u for -1/2 ∂_t + ∇u."""
    _product_parts(g)
    drift = VectorField.coordinate_field(g.chart, 0, const("-1/2"))
    field = add_fields(drift, _porous_gradient(g, u, reading))
    return simplify(Mul((const(-2), multiplier_residual(field, u, g.volume_form))))


def check_porous_residual(g, u, sampler, tol=None, reading="fiber"):
    _sampler_for(g, sampler)
    residual = porous_medium_residual(g, u, reading)
    link = porous_link_residual(g, u, reading)
    return CheckVerdict.combine(
        "porous_residual",
        zero_on_domain(residual, sampler, tol, label="u_t - Δ(u²)"),
        agree_on_domain(residual, link, sampler, label="-2 x multiplier residual"),
    )


def check_harmonic_square(g, u, sampler, tol=None):
    """Δ(u^2) = 0, which holds exactly when u is a last multiplier of ∇u."""
    _sampler_for(g, sampler)
    u = as_expr(u)
    verdict = zero_on_domain(laplacian(g, Pow(u, 2)), sampler, tol, label="Δ(u²)")
    equivalent = check_gradient_multiplier(g, u, u, sampler, tol)
    if verdict.passed != equivalent.passed:
        log.error("Harmonic square and gradient multiplier disagree for u=%s", u)
    return CheckVerdict.combine("harmonic_square", verdict, equivalent.relabel("u LM of ∇u"))


def radial_harmonic_square(chart, C1, C2, sign=1, sampler=None):
    """
    u = ±√(C1 ln r + C2) in dimension 2, ±√(C1 r^(2-n) + C2) otherwise; r is the Euclidean
    distance to the origin, which the chart box must exclude.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    n = chart.dim
    radius = Func("sqrt", sum_of(Pow(x, 2) for x in chart.coordinates))
    if n == 2:
        radial = Func("ln", radius)
    else:
        radial = Pow(radius, 2 - n)
    radicand = simplify(Add((Mul((const(C1), radial)), const(C2))))
    require_positive(
        radicand, sampler or Sampler.default(chart), "Radicand", error_class=RadicandError
    )
    return simplify(Mul((const(sign), Func("sqrt", radicand))))


def rotsym_distance_multiplier(phi, chart=None):
    """g = dt^2 + φ^2 dθ^2 and m = 1/φ, the multiplier of ∇t = ∂_t."""
    g = Metric.rotationally_symmetric(phi, chart)
    phi = simplify(as_expr(phi))
    return g, simplify(Div(ONE, phi))


def conformal_coordinate_integrand(phi):
    """dT/dt = 1/φ: integrating it gives coordinates with g = φ^2 (dT^2 + dθ^2)."""
    return simplify(Div(ONE, as_expr(phi)))


def _helmholtz(g, f, k, sampler, name):
    residual = simplify(Add((laplacian(g, f), Mul((const(k) * const(k), f)))))
    verdict = zero_on_domain(residual, sampler, IDENTITY_TOLERANCE, label=f"Δ{name} + k²{name}")
    if not verdict.passed:
        raise HelmholtzPreconditionError(
            f"{name} = {f} does not solve Δf + k²f = 0 for k = {k} "
            f"(residual {verdict.max_abs_residual:.3e} at {verdict.witness})"
        )
    return verdict


def helmholtz_pair_multiplier(g, a, b, k, sampler, tol=None):
    """
    For Helmholtz solutions a > 0 and b with the same k, m = a^2 is a last multiplier of ∇u,
    u = b/a.  Returns (m, u, verdict).
    """
    _sampler_for(g, sampler)
    a, b = simplify(as_expr(a)), simplify(as_expr(b))
    require_positive(a, sampler, "a", error_class=PreconditionError)
    preconditions = (_helmholtz(g, a, k, sampler, "a"), _helmholtz(g, b, k, sampler, "b"))
    m, u = simplify(Pow(a, 2)), simplify(Div(b, a))
    # √m Δv = v Δ√m with v = u√m = b and √m = a
    square_root_identity = simplify(
        Add((Mul((a, laplacian(g, b))), Neg(Mul((b, laplacian(g, a))))))
    )
    verdict = CheckVerdict.combine(
        "helmholtz_pair",
        *preconditions,
        check_gradient_multiplier(g, u, m, sampler, tol),
        zero_on_domain(
            square_root_identity, sampler, IDENTITY_TOLERANCE, label="√mΔv - vΔ√m"
        ),
    )
    return m, u, verdict


def check_m_harmonic(g, m, w, sampler, tol=None, phi=None):
    """
    w closed and m-coclosed: dw = 0 and δ(m w) = 0.  Given a potential ``phi`` with w = dφ,
    δ(m w) must also equal -div_{V_g}(m ∇φ) and the gradient multiplier check for (φ, m) joins
    the verdict.
    """
    if w.degree != 1:
        raise DegreeError(f"m-harmonic forms are 1-forms, got degree {w.degree}")
    _sampler_for(g, sampler)
    closed = form_zero_on_domain(exterior_derivative(w), sampler, tol, label="closed")
    coclosed = zero_on_domain(
        codifferential_1form(g, scale_form(m, w)), sampler, tol, label="m-coclosed"
    )
    components = [
        closed.relabel("closed", reason="closed"),
        coclosed.relabel("m-coclosed", reason="m-coclosed"),
    ]
    if phi is not None:
        components.extend(_potential_components(g, m, w, phi, sampler, tol))
    return CheckVerdict.combine("m_harmonic", *components)


def _potential_components(g, m, w, phi, sampler, tol):
    phi = as_expr(phi)
    _chart(g, phi)
    dphi = exterior_derivative(DifferentialForm.scalar(g.chart, phi))
    coclosed = codifferential_1form(g, scale_form(m, w))
    flux = divergence(scale_field(m, gradient(g, phi)), g.volume_form)
    return (
        form_zero_on_domain(add_forms(w, scale_form(-1, dphi)), sampler, tol, label="w = dφ"),
        agree_on_domain(coclosed, Neg(flux), sampler, label="δ(m dφ) = -div(m∇φ)"),
        check_gradient_multiplier(g, phi, m, sampler, tol),
    )


def check_gas_dynamics(g, m, phi, sampler, tol=None):
    """
    (1/√det g) ∂_i(√det g g^{ij} m ∂_j φ) = 0 written out in coordinates, compared with
    -δ(m dφ) and with the gradient multiplier check for (φ, m).
    """
    _sampler_for(g, sampler)
    m, phi = as_expr(m), as_expr(phi)
    n = g.chart.dim
    density = g.density
    flux = [
        sum_of(
            Mul((density, g.inverse[i][j], m, partial_derivative(phi, j)))
            for j in range(n)
            if not g.inverse[i][j].is_zero()
        )
        for i in range(n)
    ]
    local = simplify(Div(sum_of(partial_derivative(f, i) for i, f in enumerate(flux)), density))
    dphi = exterior_derivative(DifferentialForm.scalar(g.chart, phi))
    coclosed = simplify(Neg(codifferential_1form(g, scale_form(m, dphi))))
    return CheckVerdict.combine(
        "gas_dynamics",
        zero_on_domain(local, sampler, tol, label="gas dynamics"),
        agree_on_domain(local, coclosed, sampler, label="= -δ(m dφ)"),
        check_gradient_multiplier(g, phi, m, sampler, tol),
    )


def check_bracket_first_integral(g, a, b, m, sampler, tol=None):
    """
    If m is a last multiplier of ∇a and ∇b, it is a first integral of [∇a, ∇b].  Hypotheses
    are verified first and reported with reason "hypothesis".
    """
    hypotheses = [
        check_gradient_multiplier(g, a, m, sampler, tol).relabel("m LM of ∇a"),
        check_gradient_multiplier(g, b, m, sampler, tol).relabel("m LM of ∇b"),
    ]
    if not all(verdict.passed for verdict in hypotheses):
        return CheckVerdict.combine("bracket_first_integral", *hypotheses, reason="hypothesis")
    bracket_field = lie_bracket(gradient(g, a), gradient(g, b))
    conclusion = zero_on_domain(
        apply_field(bracket_field, m), sampler, tol, label="[∇a,∇b](m)"
    ).relabel("[∇a,∇b](m)", reason="conclusion")
    return CheckVerdict.combine("bracket_first_integral", *hypotheses, conclusion)


def check_log_kernel(g, u, m, sampler, tol=None):
    """For m > 0: m is a last multiplier of ∇u iff g^-1(d ln m, du) + Δu = 0."""
    _sampler_for(g, sampler)
    m = simplify(as_expr(m))
    require_positive(m, sampler, "m", error_class=PreconditionError)
    kernel = simplify(Add((inner_product(g, Func("ln", m), u), laplacian(g, u))))
    return CheckVerdict.combine(
        "log_kernel",
        zero_on_domain(kernel, sampler, tol, label="g^-1(d ln m, du) + Δu"),
        check_gradient_multiplier(g, u, m, sampler, tol),
    )


def check_mutual_harmonic(g, u, m, sampler, tol=None):
    """u a last multiplier of ∇m and m a last multiplier of ∇u together force Δ(um) = 0."""
    hypotheses = [
        check_gradient_multiplier(g, m, u, sampler, tol).relabel("u LM of ∇m"),
        check_gradient_multiplier(g, u, m, sampler, tol).relabel("m LM of ∇u"),
    ]
    if not all(verdict.passed for verdict in hypotheses):
        return CheckVerdict.combine("mutual_harmonic", *hypotheses, reason="hypothesis")
    conclusion = zero_on_domain(laplacian(g, Mul((as_expr(u), as_expr(m)))), sampler, tol)
    return CheckVerdict.combine(
        "mutual_harmonic", *hypotheses, conclusion.relabel("Δ(um)", reason="conclusion")
    )
