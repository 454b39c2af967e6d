"""
Sampling-based zero testing.  "Identically zero on the chart" is approximated by evaluating at
``count`` deterministic points of the domain box and comparing each value with the local scale
of the expression (the largest additive term at that point).
"""

import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from ..apps import app
from .exceptions import ChartMismatchError, NonvanishingError, SamplingError
from .expressions import Chart, evaluate_many

__all__ = [
    "Sampler",
    "CheckVerdict",
    "zero_on_domain",
    "agree_on_domain",
    "require_nonvanishing",
    "require_positive",
    "require_same_chart",
]

log = logging.getLogger(__name__)

_should_log, log_method = app.get_verbose_logging

AGREEMENT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Sampler:
    """Deterministic point source: point ``k`` depends only on ``(seed, k)`` and the chart box."""

    chart: Chart
    seed: int = 42
    count: int = 64
    guard_tol: float = 1e-6

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("Sampler count must be positive")
        if not self.guard_tol > 0:
            raise ValueError("Sampler guard_tol must be positive")

    @classmethod
    def default(cls, chart, **overrides):
        options = dict(app.sampler_defaults, **overrides)
        return cls(chart, **options)

    def derive(self, stream):
        """An independent sampler for sub-task ``stream`` (per-check seeds)."""
        state = np.random.SeedSequence([self.seed, stream]).generate_state(1, dtype=np.uint64)
        return replace(self, seed=int(state[0]))

    def with_chart(self, chart):
        return replace(self, chart=chart)

    def points(self):
        return _sample_points(self.chart, self.seed, self.count)


@lru_cache(maxsize=256)
def _sample_points(chart, seed, count):
    lower, upper = chart.lower, chart.upper
    points = np.empty((count, chart.dim))
    for index in range(count):
        rng = np.random.default_rng([seed, index])
        points[index] = rng.uniform(lower, upper)
    points.setflags(write=False)
    return points


@dataclass(frozen=True)
class CheckVerdict:
    label: str
    passed: bool
    tolerance: float
    max_abs_residual: float
    mean_abs_residual: float
    max_scaled_residual: float
    witness: tuple | None
    samples_used: int
    samples_skipped: int
    trivial: bool = False
    reason: str | None = None
    components: tuple = field(default=())

    @property
    def failed_components(self) -> list:
        return [component for component in self.components if not component.passed]

    def relabel(self, label, **changes):
        return replace(self, label=label, **changes)

    @classmethod
    def combine(cls, label, *verdicts, reason=None, trivial=False):
        """All-must-pass composite; residual figures come from the worst component."""
        verdicts = [verdict for verdict in verdicts if verdict is not None]
        if not verdicts:
            raise ValueError("Nothing to combine")
        failing = [verdict for verdict in verdicts if not verdict.passed]
        pool = failing or verdicts
        worst = pool[0]
        for verdict in pool[1:]:
            if verdict.max_scaled_residual > worst.max_scaled_residual:
                worst = verdict
        if reason is None and failing:
            reason = failing[0].reason or failing[0].label
        return cls(
            label=label,
            passed=not failing,
            tolerance=worst.tolerance,
            max_abs_residual=max(verdict.max_abs_residual for verdict in verdicts),
            mean_abs_residual=worst.mean_abs_residual,
            max_scaled_residual=worst.max_scaled_residual,
            witness=worst.witness,
            samples_used=worst.samples_used,
            samples_skipped=worst.samples_skipped,
            trivial=trivial or any(verdict.trivial for verdict in verdicts),
            reason=reason,
            components=tuple(verdicts),
        )

    def summary(self) -> str:
        status = "passed" if self.passed else "failed"
        return (
            f"{self.label}: {status} (max |r|={self.max_abs_residual:.3e}, "
            f"scaled={self.max_scaled_residual:.3e}, tol={self.tolerance:.1e}, "
            f"used={self.samples_used}, skipped={self.samples_skipped})"
        )


def require_same_chart(*charts):
    charts = [chart for chart in charts if chart is not None]
    for chart in charts[1:]:
        if chart != charts[0]:
            raise ChartMismatchError(
                f"Chart {chart.coord_names} differs from {charts[0].coord_names}"
            )
    return charts[0] if charts else None


def _terms_and_values(expr, points, guard_tol):
    terms = expr.additive_terms() or (expr,)
    ok = np.ones(points.shape[0], dtype=bool)
    values = np.zeros(points.shape[0])
    scale = np.zeros(points.shape[0])
    for term in terms:
        term_values, term_ok = evaluate_many(term, points, guard_tol)
        ok &= term_ok
        values = values + term_values
        scale = np.maximum(scale, np.abs(term_values))
    return values, scale, ok


def _verdict(label, values, scale, ok, sampler, tol, points, trivial=False):
    used = int(np.count_nonzero(ok))
    skipped = sampler.count - used
    if skipped * 2 > sampler.count:
        raise SamplingError(
            f"{label}: {skipped} of {sampler.count} samples skipped near singularities on "
            f"{sampler.chart.domain}"
        )
    residual = np.abs(values[ok])
    scaled = residual / (1.0 + scale[ok])
    # the witness is the first sample attaining max |e|
    witness = tuple(float(v) for v in points[ok][int(np.argmax(residual))])
    verdict = CheckVerdict(
        label=label,
        passed=bool(np.all(scaled <= tol)),
        tolerance=tol,
        max_abs_residual=float(residual.max()),
        mean_abs_residual=float(residual.mean()),
        max_scaled_residual=float(scaled.max()),
        witness=witness,
        samples_used=used,
        samples_skipped=skipped,
        trivial=trivial,
    )
    if _should_log:
        log_method(verdict.summary())
    return verdict


def zero_on_domain(expr, sampler, tol=None, label="zero", skip_expr=None):
    """
    Samples ``expr`` and passes iff every used sample satisfies |e| <= tol * (1 + local scale).
    Points where any denominator is smaller than the sampler guard are skipped; ``skip_expr``
    adds the singular set of another expression (used when comparing residuals).
    """
    if tol is None:
        tol = app.tolerance
    if not tol > 0:
        raise ValueError("Tolerance must be positive")
    sampler.chart.validate_expression(expr)
    points = sampler.points()
    values, scale, ok = _terms_and_values(expr, points, sampler.guard_tol)
    if skip_expr is not None:
        ok &= evaluate_many(skip_expr, points, sampler.guard_tol)[1]
    return _verdict(label, values, scale, ok, sampler, tol, points)


def agree_on_domain(first, second, sampler, tol=AGREEMENT_TOLERANCE, label="agreement"):
    """Pointwise agreement of two expressions relative to the larger of their term scales."""
    points = sampler.points()
    first_values, first_scale, first_ok = _terms_and_values(first, points, sampler.guard_tol)
    second_values, second_scale, second_ok = _terms_and_values(second, points, sampler.guard_tol)
    return _verdict(
        label,
        first_values - second_values,
        np.maximum(first_scale, second_scale),
        first_ok & second_ok,
        sampler,
        tol,
        points,
    )


def require_nonvanishing(expr, sampler, what="function"):
    """Raises NonvanishingError when |expr| < guard at more than half the samples."""
    values, ok = evaluate_many(expr, sampler.points(), sampler.guard_tol)
    vanishing = ~ok | (np.abs(values) < sampler.guard_tol)
    if np.count_nonzero(vanishing) * 2 > sampler.count:
        raise NonvanishingError(
            f"{what} {expr} vanishes or is singular at {np.count_nonzero(vanishing)} of "
            f"{sampler.count} samples"
        )
    return expr


def require_positive(expr, sampler, what="function", error_class=NonvanishingError):
    """Raises ``error_class`` unless ``expr`` is positive at every non-singular sample."""
    values, ok = evaluate_many(expr, sampler.points(), sampler.guard_tol)
    if np.count_nonzero(~ok) * 2 > sampler.count:
        raise SamplingError(f"{what} {expr} is singular at most samples")
    if np.any(values[ok] <= 0):
        index = int(np.argmax(ok & (values <= 0)))
        point = tuple(float(v) for v in sampler.points()[index])
        raise error_class(f"{what} {expr} is not positive at {point}")
    return expr
