import logging

from rest_framework import serializers
from rest_framework.exceptions import ValidationError

from ..apps import app
from ..calculus.expressions import Chart
from ..calculus.fields import VectorField, VolumeForm
from ..calculus.forms import DifferentialForm
from ..calculus.parsing import parse_scalar
from ..calculus.poisson import PoissonStructure, StructureConstants, lie_poisson
from ..calculus.riemann import Metric
from ..calculus.sampling import Sampler
from ..calculus.exceptions import CheckException
from ..checks import ANY, get_check
from ..documents import SCHEMA_VERSION, CheckRequest, ProblemDocument
from .utils import BUILD_ERRORS, ExpressionField, PairIndexField, build_or_error

__all__ = ["ProblemDocumentSerializer"]

log = logging.getLogger(__name__)

RESERVED_CHECK_KEYS = ("name", "kind", "tolerance")


class ChartSerializer(serializers.Serializer):
    coordinates = serializers.ListField(child=serializers.CharField(), min_length=1)
    domain = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2)
    )

    def validate(self, data):
        return build_or_error(
            "domain",
            Chart,
            tuple(data["coordinates"]),
            tuple(tuple(interval) for interval in data["domain"]),
        )


class SamplerSerializer(serializers.Serializer):
    seed = serializers.IntegerField(min_value=0, max_value=2**64 - 1, required=False)
    count = serializers.IntegerField(min_value=1, required=False)
    guard = serializers.FloatField(required=False)

    def validate_guard(self, value):
        if not value > 0:
            raise ValidationError("Guard tolerance must be positive")
        return value


class StructureSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=ANY)
    density = ExpressionField(required=False)
    matrix = serializers.ListField(
        child=serializers.ListField(child=ExpressionField()), required=False
    )
    phi = ExpressionField(required=False)
    bivector = serializers.DictField(child=ExpressionField(), required=False)
    structure_constants = serializers.ListField(
        child=serializers.ListField(min_length=4, max_length=4), required=False
    )

    requirements = {"metric": ("matrix",), "rotsym": ("phi",)}

    def validate(self, data):
        for name in self.requirements.get(data["kind"], ()):
            if name not in data:
                raise ValidationError({name: ["Required for %s structures" % data["kind"]]})
        if data["kind"] == "poisson" and ("bivector" in data) == ("structure_constants" in data):
            raise ValidationError(
                {"bivector": ["Poisson structures need one of bivector, structure_constants"]}
            )
        return data


class ProblemDocumentSerializer(serializers.Serializer):
    """
    Validates a problem document and builds a ProblemDocument.  Every expression is parsed against
    the chart; scalars may use parameters and earlier scalars, and everything after them may use
    any scalar by name.
    """

    version = serializers.IntegerField()
    name = serializers.CharField(required=False, allow_blank=True, default="")
    chart = ChartSerializer()
    structure = StructureSerializer(required=False)
    parameters = serializers.DictField(child=serializers.FloatField(), required=False, default=dict)
    scalars = serializers.DictField(child=ExpressionField(), required=False, default=dict)
    forms = serializers.DictField(child=serializers.JSONField(), required=False, default=dict)
    sampler = SamplerSerializer(required=False)
    tolerance = serializers.FloatField(required=False)
    checks = serializers.ListField(child=serializers.DictField(), required=False, default=list)

    def get_fields(self):
        fields = super(ProblemDocumentSerializer, self).get_fields()
        # "fields" is the document key for vector fields; it can't be a class attribute here
        fields["fields"] = serializers.DictField(
            child=serializers.ListField(child=ExpressionField()), required=False, default=dict
        )
        return fields

    def validate_version(self, value):
        if value != SCHEMA_VERSION:
            raise ValidationError(
                "Unsupported document version %r (expected %d)" % (value, SCHEMA_VERSION)
            )
        return value

    def validate_tolerance(self, value):
        if not value > 0:
            raise ValidationError("Tolerance must be positive")
        return value

    def validate(self, attrs):
        chart = attrs["chart"]
        document = ProblemDocument(
            chart=chart,
            structure_kind=None,
            structure=None,
            sampler=None,
            tolerance=None,
            name=attrs.get("name", ""),
            version=attrs["version"],
            path=self.context.get("path"),
        )
        document.parameters = self._build_parameters(chart, attrs.get("parameters", {}))
        document.scalars = self._build_scalars(document, attrs.get("scalars", {}))
        self._build_structure(document, attrs.get("structure") or {"kind": "volume"})
        document.fields = self._build_fields(document, attrs.get("fields", {}))
        document.forms = self._build_forms(document, attrs.get("forms", {}))
        document.sampler = self._build_sampler(chart, attrs.get("sampler") or {})
        document.tolerance = self._pick(attrs.get("tolerance"), "tolerance", app.tolerance)
        document.checks = self._build_checks(document, attrs.get("checks", []))
        return {"document": document}

    def create(self, validated_data):
        return validated_data["document"]

    # Validation helpers
    def _pick(self, value, override, default):
        if self.context.get(override) is not None:
            return self.context[override]
        return default if value is None else value

    def _build_parameters(self, chart, parameters):
        errors = {}
        for name in parameters:
            if not name.isidentifier() or name in chart.coord_names:
                errors[name] = ["Parameter names must be identifiers distinct from coordinates"]
        if errors:
            raise ValidationError({"parameters": errors})
        return dict(parameters)

    def _build_scalars(self, document, sources):
        scalars, errors = {}, {}
        taken = set(document.chart.coord_names) | set(document.parameters)
        for name, source in sources.items():
            if not name.isidentifier() or name in taken:
                errors[name] = [
                    "Scalar names must be identifiers distinct from coordinates and parameters"
                ]
                continue
            try:
                scalars[name] = parse_scalar(
                    source, document.chart, document.parameters, names=scalars
                )
            except BUILD_ERRORS as err:
                errors[name] = [str(err)]
        if errors:
            raise ValidationError({"scalars": errors})
        return scalars

    def _parse(self, document, source):
        return parse_scalar(source, document.chart, document.parameters, names=document.scalars)

    def _build_structure(self, document, data):
        kind = data["kind"]
        chart = document.chart

        def build():
            if kind == "volume":
                return VolumeForm(chart, self._parse(document, data.get("density", "1")))
            if kind == "euclidean":
                return Metric.euclidean(chart)
            if kind == "metric":
                matrix = tuple(
                    tuple(self._parse(document, entry) for entry in row) for row in data["matrix"]
                )
                return Metric(chart, matrix)
            if kind == "rotsym":
                return Metric.rotationally_symmetric(self._parse(document, data["phi"]), chart)
            if "structure_constants" in data:
                constants = StructureConstants.from_entries(chart.dim, data["structure_constants"])
                return lie_poisson(constants, chart)
            upper = {}
            for key, source in data["bivector"].items():
                i, j = PairIndexField().to_internal_value(key)
                upper[(i, j)] = self._parse(document, source)
            return PoissonStructure(chart, upper)

        try:
            document.structure = build()
        except ValidationError as err:
            raise ValidationError({"structure": err.detail})
        except BUILD_ERRORS as err:
            raise ValidationError({"structure": [str(err)]})
        document.structure_kind = kind

    def _build_fields(self, document, sources):
        fields, errors = {}, {}
        for name, components in sources.items():
            try:
                fields[name] = VectorField(
                    document.chart, tuple(self._parse(document, source) for source in components)
                )
            except BUILD_ERRORS as err:
                errors[name] = [str(err)]
        if errors:
            raise ValidationError({"fields": errors})
        return fields

    def _build_form(self, document, source):
        if isinstance(source, list):
            return DifferentialForm.one_form(
                document.chart, [self._parse(document, str(item)) for item in source]
            )
        if not isinstance(source, dict) or "degree" not in source:
            raise ValueError("A form is a 1-form component list or {degree, coefficients}")
        coefficients = {}
        for key, value in dict(source.get("coefficients", {})).items():
            indices = tuple(int(part) - 1 for part in str(key).split(",") if part.strip())
            coefficients[indices] = self._parse(document, str(value))
        return DifferentialForm(document.chart, int(source["degree"]), coefficients)

    def _build_forms(self, document, sources):
        forms, errors = {}, {}
        for name, source in sources.items():
            try:
                forms[name] = self._build_form(document, source)
            except BUILD_ERRORS as err:
                errors[name] = [str(err)]
        if errors:
            raise ValidationError({"forms": errors})
        return forms

    def _build_sampler(self, chart, data):
        defaults = app.sampler_defaults
        return build_or_error(
            "sampler",
            Sampler,
            chart,
            seed=self._pick(data.get("seed"), "seed", defaults["seed"]),
            count=data.get("count", defaults["count"]),
            guard_tol=data.get("guard", defaults["guard_tol"]),
        )

    def _build_checks(self, document, requests):
        checks, errors, names = [], {}, set()
        for index, raw in enumerate(requests):
            kind = raw.get("kind")
            name = str(raw.get("name") or "%s-%d" % (kind, index + 1))
            try:
                check = get_check(kind)
            except CheckException as err:
                errors[index] = {"kind": [str(err)]}
                continue
            problems = {}
            if name in names:
                problems["name"] = ["Duplicate check name %r" % name]
            names.add(name)
            if not check.supports(document.structure_kind):
                problems["kind"] = [
                    "%s checks need a %s structure, the document has %r"
                    % (kind, " or ".join(check.structures), document.structure_kind)
                ]
            tolerance = raw.get("tolerance")
            if tolerance is not None and (
                isinstance(tolerance, bool)
                or not isinstance(tolerance, (int, float))
                or not tolerance > 0
            ):
                problems["tolerance"] = ["Tolerance must be a positive number"]
            raw_arguments = {
                key: value for key, value in raw.items() if key not in RESERVED_CHECK_KEYS
            }
            arguments, argument_errors = check.resolve_arguments(raw_arguments, document)
            problems.update({key: [message] for key, message in argument_errors.items()})
            if problems:
                errors[index] = problems
                continue
            if self.context.get("tolerance") is not None:
                tolerance = None
            checks.append(
                CheckRequest(name=name, kind=kind, arguments=arguments, tolerance=tolerance)
            )
        if errors:
            raise ValidationError({"checks": errors})
        return checks
