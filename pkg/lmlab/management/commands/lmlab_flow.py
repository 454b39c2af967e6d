import json

from django.core.management.base import BaseCommand, CommandError

from lmlab.calculus.exceptions import DocumentError, FlowError, LMLabException
from lmlab.calculus.flow import jacobian_invariant_drift, transport_drift
from lmlab.checks import Argument
from lmlab.documents import load_document
from lmlab.encoders import ReportJSONEncoder

from .lmlab_check import document_error

DRIFT_FIELDS = (
    "invariant_initial",
    "max_abs_drift",
    "drift_at_end",
    "mean_abs_drift",
    "steps",
    "final_point",
    "liouville_gap",
)


class Command(BaseCommand):
    help = (
        "Integrates a field of a problem document and reports the drift of m·exp(∫div A) and of "
        "m·det J along the trajectory."
    )
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument("document", help="Path to a JSON problem document")
        parser.add_argument("--field", required=True, help="Field name or components")
        parser.add_argument("--multiplier", required=True, help="Scalar name or expression")
        parser.add_argument("--x0", required=True, type=float, nargs="+", help="Initial point")
        parser.add_argument("--dt", type=float, default=0.01)
        parser.add_argument("--T", type=float, default=1.0)
        parser.add_argument(
            "--method", choices=("transport", "jacobian", "both"), default="both"
        )
        parser.add_argument(
            "--max-drift", type=float, help="Exit with status 1 when a drift exceeds this"
        )
        parser.add_argument("--format", choices=("text", "json"), default="text")

    def resolve(self, document, options):
        field = options["field"]
        if field not in document.fields:
            field = [part.strip() for part in field.split(",")]
        try:
            return (
                Argument("field").resolve(field, document),
                Argument("scalar").resolve(options["multiplier"], document),
                Argument("point").resolve(options["x0"], document),
            )
        except LMLabException as err:
            raise CommandError(str(err), returncode=2)

    def handle(self, *args, **options):
        try:
            document = load_document(options["document"])
        except DocumentError as err:
            raise document_error(err)
        field, multiplier, x0 = self.resolve(document, options)

        reports = {}
        try:
            if options["method"] in ("transport", "both"):
                reports["transport"] = transport_drift(
                    field, multiplier, document.volume, x0, options["dt"], options["T"]
                )
            if options["method"] in ("jacobian", "both"):
                reports["jacobian"] = jacobian_invariant_drift(
                    field, multiplier, x0, options["dt"], options["T"]
                )
        except FlowError as err:
            raise CommandError("%s: %s" % (err.__class__.__name__, err), returncode=1)

        data = {
            name: {key: getattr(report, key) for key in DRIFT_FIELDS}
            for name, report in reports.items()
        }
        if options["format"] == "json":
            self.stdout.write(json.dumps(data, indent=2, cls=ReportJSONEncoder))
        else:
            for name, values in data.items():
                self.stdout.write("%s drift:" % name)
                for key, value in values.items():
                    if value is not None:
                        self.stdout.write("  %s: %s" % (key, value))

        limit = options["max_drift"]
        if limit is not None:
            exceeded = [name for name, report in reports.items() if report.max_abs_drift > limit]
            if exceeded:
                raise CommandError(
                    "Drift above %g for %s" % (limit, ", ".join(exceeded)), returncode=1
                )
