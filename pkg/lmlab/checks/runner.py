import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..apps import app
from ..calculus.exceptions import LMLabException
from .base import get_check

__all__ = ["Report", "ReportEntry", "run_checks", "run_check"]

log = logging.getLogger(__name__)

_should_log, log_method = app.get_verbose_logging


@dataclass(frozen=True)
class ReportEntry:
    name: str
    kind: str
    verdict: object = None
    error: str | None = None
    seconds: float = 0.0
    seed: int | None = None
    tolerance: float | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.verdict is not None and self.verdict.passed

    def _verdict_value(self, name):
        if self.verdict is None:
            return None
        return getattr(self.verdict, name)

    @property
    def max_abs_residual(self):
        return self._verdict_value("max_abs_residual")

    @property
    def mean_abs_residual(self):
        return self._verdict_value("mean_abs_residual")

    @property
    def max_scaled_residual(self):
        return self._verdict_value("max_scaled_residual")

    @property
    def witness(self):
        return self._verdict_value("witness")

    @property
    def samples_used(self):
        return self._verdict_value("samples_used")

    @property
    def samples_skipped(self):
        return self._verdict_value("samples_skipped")

    @property
    def trivial(self):
        return bool(self._verdict_value("trivial"))

    @property
    def reason(self):
        if self.error is not None:
            return "error"
        return self._verdict_value("reason")

    @property
    def components(self):
        return list(self._verdict_value("components") or ())


@dataclass
class Report:
    name: str
    entries: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    seed: int | None = None
    tolerance: float | None = None

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    @property
    def failed(self) -> list:
        return [entry for entry in self.entries if not entry.passed]

    def __len__(self):
        return len(self.entries)

    def as_text(self, timings=True) -> str:
        lines = ["%s (seed %s)" % (self.name or "document", self.seed)]
        for entry in self.entries:
            status = "PASS" if entry.passed else "FAIL"
            line = "  [%s] %s (%s)" % (status, entry.name, entry.kind)
            if entry.error is not None:
                line += ": %s" % entry.error
            else:
                line += ": max |r| = %.3e, scaled = %.3e, used %d, skipped %d" % (
                    entry.max_abs_residual,
                    entry.max_scaled_residual,
                    entry.samples_used,
                    entry.samples_skipped,
                )
                if not entry.passed:
                    line += ", reason %s, witness %s" % (
                        entry.reason,
                        "(" + ", ".join("%.6g" % value for value in entry.witness) + ")",
                    )
            if timings:
                line += " [%.3fs]" % entry.seconds
            lines.append(line)
        for warning in self.warnings:
            lines.append("  warning: %s" % warning)
        lines.append(
            "%s: %d of %d checks passed"
            % ("PASSED" if self.passed else "FAILED", len(self) - len(self.failed), len(self))
        )
        return "\n".join(lines)


def run_check(document, index, request):
    """Runs one request; execution errors are captured on the entry, never raised."""
    check = get_check(request.kind)
    sampler = document.sampler.derive(index)
    tolerance = request.tolerance if request.tolerance is not None else document.tolerance
    start = time.perf_counter()
    verdict, error = None, None
    try:
        verdict = check.run(document, sampler, tolerance, **request.arguments)
    except LMLabException as err:
        error = "%s: %s" % (err.__class__.__name__, err)
    except Exception as err:  # Reported, not raised: one bad check must not sink the document
        log.exception("Check %r (%s) crashed", request.name, request.kind)
        error = "%s: %s" % (err.__class__.__name__, err)
    seconds = time.perf_counter() - start

    entry = ReportEntry(
        name=request.name,
        kind=request.kind,
        verdict=verdict,
        error=error,
        seconds=seconds,
        seed=sampler.seed,
        tolerance=tolerance,
    )
    if _should_log:
        log_method("%s (%s): passed=%s in %.3fs", entry.name, entry.kind, entry.passed, seconds)
    return entry


def run_checks(document, max_workers=None) -> Report:
    """
    Runs every check request of ``document``.  Results keep document order regardless of
    ``max_workers``; each check samples with its own seed derived from the document seed and
    its index.
    """
    report = Report(name=document.name, seed=document.sampler.seed, tolerance=document.tolerance)
    requests = list(document.checks)
    if not requests:
        message = "Document %r contains no checks" % (document.name or document.path)
        log.warning(message)
        report.warnings.append(message)
        return report

    max_workers = max_workers or app.max_workers
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            entries = list(
                executor.map(run_check, [document] * len(requests), range(len(requests)), requests)
            )
    else:
        entries = [run_check(document, index, request) for index, request in enumerate(requests)]

    for entry in entries:
        if entry.trivial:
            message = "Check %r passed with the trivial multiplier m = 0" % entry.name
            log.warning(message)
            report.warnings.append(message)
    report.entries = entries
    return report
