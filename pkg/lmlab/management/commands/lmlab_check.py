import json

from django.core.management.base import BaseCommand, CommandError

from lmlab.calculus.exceptions import DocumentError
from lmlab.checks import run_checks
from lmlab.documents import load_document
from lmlab.encoders import ReportJSONEncoder
from lmlab.serializers import ReportSerializer


def document_error(err):
    """CommandError for an unusable document (exit status 2)."""
    detail = json.dumps(err.errors, indent=2, cls=ReportJSONEncoder)
    return CommandError("Invalid document %s:\n%s" % (err.path or "", detail), returncode=2)


class Command(BaseCommand):
    help = "Runs the checks of a problem document and reports their verdicts."
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument("document", help="Path to a JSON problem document")
        parser.add_argument("--seed", type=int, help="Override the document sampler seed")
        parser.add_argument("--tol", type=float, help="Override every check tolerance")
        parser.add_argument("--format", choices=("text", "json"), default="text")
        parser.add_argument(
            "--timings", action="store_true", help="Include per-check timings in JSON output"
        )
        parser.add_argument(
            "--components", action="store_true", help="Include sub-verdicts in JSON output"
        )
        parser.add_argument("--workers", type=int, help="Checks to run concurrently")

    def handle(self, *args, **options):
        if options["tol"] is not None and not options["tol"] > 0:
            raise CommandError("--tol must be positive", returncode=2)
        if options["seed"] is not None and options["seed"] < 0:
            raise CommandError("--seed must be non-negative", returncode=2)

        try:
            document = load_document(
                options["document"], seed=options["seed"], tolerance=options["tol"]
            )
        except DocumentError as err:
            raise document_error(err)

        report = run_checks(document, max_workers=options["workers"])
        if options["format"] == "json":
            data = ReportSerializer(
                report,
                context={
                    "include_timings": options["timings"],
                    "include_components": options["components"],
                },
            ).data
            self.stdout.write(json.dumps(data, indent=2, cls=ReportJSONEncoder))
        else:
            self.stdout.write(report.as_text())

        if not report.passed:
            raise CommandError(
                "%d of %d checks failed" % (len(report.failed), len(report)), returncode=1
            )
