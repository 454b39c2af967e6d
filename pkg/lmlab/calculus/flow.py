"""
Trajectory view of last multipliers: along the flow of A the quantity m(x(t))·exp(∫ div A)
is constant exactly when m is a last multiplier.  Fixed-step RK4 throughout.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, FlowError, FlowSingularityError, TrajectoryExitError
from .expressions import as_expr, evaluate, partial_derivative
from .fields import VolumeForm, divergence
from .sampling import CheckVerdict

__all__ = ["Trajectory", "DriftReport", "integrate", "transport_drift", "jacobian_invariant_drift"]

log = logging.getLogger(__name__)

BOX_ENLARGEMENT = 0.5
NONVANISHING_GUARD = 1e-12


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    points: np.ndarray
    jacobians: np.ndarray | None = None

    @property
    def end(self):
        return self.points[-1]

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class DriftReport:
    invariant_initial: float
    max_abs_drift: float
    drift_at_end: float
    steps: int
    mean_abs_drift: float = 0.0
    final_point: tuple = field(default=())
    liouville_gap: float | None = None
    trajectory: Trajectory | None = field(default=None, repr=False, compare=False)

    def as_verdict(self, label, max_drift):
        return CheckVerdict(
            label=label,
            passed=bool(self.max_abs_drift <= max_drift),
            tolerance=max_drift,
            max_abs_residual=self.max_abs_drift,
            mean_abs_residual=self.mean_abs_drift,
            max_scaled_residual=self.max_abs_drift,
            witness=self.final_point,
            samples_used=self.steps,
            samples_skipped=0,
        )


def _vector_function(expressions):
    expressions = [as_expr(expr) for expr in expressions]

    def run(point):
        try:
            return np.array([evaluate(expr, point) for expr in expressions])
        except DomainError as err:
            raise FlowSingularityError(f"Singular evaluation at {tuple(point)}: {err}")

    return run


def _step_count(dt, T):
    if not dt > 0:
        raise FlowError(f"Step dt must be positive, got {dt}")
    if T < dt:
        raise FlowError(f"Horizon T={T} is shorter than the step dt={dt}")
    return max(1, int(round(T / dt)))


def _run(rhs, state, dt, T, chart, dim, on_step=None):
    """
    Classical RK4 over the augmented ``state``; its first ``dim`` entries are the chart point.
    The step is T/round(T/dt) so the horizon is hit exactly.
    """
    steps = _step_count(dt, T)
    h = T / steps
    box = chart.enlarged(BOX_ENLARGEMENT)
    if not chart.contains(state[:dim]):
        raise FlowError(f"Initial point {tuple(state[:dim])} is outside {chart.domain}")

    states = np.empty((steps + 1, state.size))
    states[0] = state
    for step in range(steps):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * h * k1)
        k3 = rhs(state + 0.5 * h * k2)
        k4 = rhs(state + h * k3)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(state)):
            raise FlowSingularityError(f"Non-finite state after step {step + 1}")
        if not box.contains(state[:dim]):
            raise TrajectoryExitError(
                f"Trajectory left {box.domain} at t={(step + 1) * h:.6g}, x={tuple(state[:dim])}"
            )
        states[step + 1] = state
    times = np.linspace(0.0, T, steps + 1)
    return times, states


def integrate(A, x0, dt, T):
    """x' = A(x) from x0 over [0, T]."""
    dim = A.chart.dim
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (dim,):
        raise FlowError(f"Initial point needs {dim} coordinates")
    velocity = _vector_function(A.components)
    times, states = _run(velocity, x0, dt, T, A.chart, dim)
    return Trajectory(times=times, points=states)


def _invariant_series(m, points, weights):
    multiplier = _vector_function([m])
    values = np.empty(len(points))
    for index, point in enumerate(points):
        value = multiplier(point)[0]
        if abs(value) < NONVANISHING_GUARD:
            raise FlowSingularityError(
                f"Multiplier {m} vanishes along the trajectory at {tuple(point)}"
            )
        values[index] = value * weights[index]
    return values


def _report(values, steps, final_point, liouville_gap=None, trajectory=None):
    drift = values - values[0]
    return DriftReport(
        invariant_initial=float(values[0]),
        max_abs_drift=float(np.max(np.abs(drift))),
        drift_at_end=float(drift[-1]),
        steps=steps,
        mean_abs_drift=float(np.mean(np.abs(drift))),
        final_point=tuple(float(v) for v in final_point),
        liouville_gap=liouville_gap,
        trajectory=trajectory,
    )


def transport_drift(A, m, V, x0, dt, T):
    """
    Drift of I(t) = m(x(t))·exp(s(t)), s' = div A, with s integrated in the same RK stages as x.
    """
    dim = A.chart.dim
    V = V or VolumeForm.coordinate(A.chart)
    field_and_divergence = _vector_function(tuple(A.components) + (divergence(A, V),))

    def rhs(state):
        return field_and_divergence(state[:dim])

    start = np.append(np.asarray(x0, dtype=float), 0.0)
    if start.shape != (dim + 1,):
        raise FlowError(f"Initial point needs {dim} coordinates")
    times, states = _run(rhs, start, dt, T, A.chart, dim)
    values = _invariant_series(as_expr(m), states[:, :dim], np.exp(states[:, dim]))
    trajectory = Trajectory(times=times, points=states[:, :dim])
    report = _report(values, len(times) - 1, states[-1, :dim], trajectory=trajectory)
    log.debug("Transport drift for m=%s: %s", m, report)
    return report


def jacobian_invariant_drift(A, m, x0, dt, T):
    """
    Co-integrates J' = DA(x) J, J(0) = I, and reports the drift of m(x(t))·det J(t) with the
    coordinate volume.  ``liouville_gap`` is max |det J - exp(∫ div A)|; the report's trajectory
    keeps every J.
    """
    dim = A.chart.dim
    derivative_matrix = [
        partial_derivative(component, j) for component in A.components for j in range(dim)
    ]
    velocity = _vector_function(A.components)
    jacobian = _vector_function(derivative_matrix)
    div = _vector_function([divergence(A)])

    def rhs(state):
        point = state[:dim]
        J = state[dim : dim + dim * dim].reshape(dim, dim)
        DA = jacobian(point).reshape(dim, dim)
        return np.concatenate((velocity(point), (DA @ J).ravel(), div(point)))

    start = np.concatenate((np.asarray(x0, dtype=float), np.eye(dim).ravel(), [0.0]))
    if start.shape != (dim + dim * dim + 1,):
        raise FlowError(f"Initial point needs {dim} coordinates")
    times, states = _run(rhs, start, dt, T, A.chart, dim)

    jacobians = states[:, dim : dim + dim * dim].reshape(-1, dim, dim)
    determinants = np.linalg.det(jacobians)
    gap = float(np.max(np.abs(determinants - np.exp(states[:, -1]))))
    values = _invariant_series(as_expr(m), states[:, :dim], determinants)
    trajectory = Trajectory(times=times, points=states[:, :dim], jacobians=jacobians)
    report = _report(
        values, len(times) - 1, states[-1, :dim], liouville_gap=gap, trajectory=trajectory
    )
    log.debug("Jacobian drift for m=%s: %s", m, report)
    return report
