import logging

from ..calculus import exceptions
from ..calculus.expressions import as_expr
from ..calculus.fields import VectorField
from ..calculus.forms import DifferentialForm
from ..calculus.parsing import parse_scalar

__all__ = ["Check", "Argument", "registry", "get_check", "ANY", "RIEMANNIAN", "POISSON"]

log = logging.getLogger(__name__)

ANY = ("volume", "euclidean", "metric", "rotsym", "poisson")
RIEMANNIAN = ("euclidean", "metric", "rotsym")
POISSON = ("poisson",)

# Failures raised while resolving a raw argument value
RESOLVE_ERRORS = (
    exceptions.LMLabException,
    ValueError,
    TypeError,
    ZeroDivisionError,
    RecursionError,
)

registry = {}


def get_check(kind):
    if not isinstance(kind, str):
        raise exceptions.CheckException("Check kind must be a string, got %r" % (kind,))
    try:
        return registry[kind]
    except KeyError:
        raise exceptions.CheckException(
            "Unknown check kind %r; known kinds are %s" % (kind, ", ".join(sorted(registry)))
        )


def register(cls):
    if cls.kind in registry:
        fail_registration_action(cls, "Check kind of %(cls)r is already registered.")
    registry[cls.kind] = cls()


def fail_registration_action(cls, msg):
    raise exceptions.CheckRegistrationException(msg % {"cls": cls})


class CheckType(type):
    def __new__(cls, name, bases, attrs):
        cls = super(CheckType, cls).__new__(cls, name, bases, attrs)

        if attrs.get("__noregister__", False):
            cls.register = cls.fail_register
        else:
            cls.__noregister__ = False  # Avoid inheritance confusion
            cls.register = classmethod(register)
            cls.register()
        return cls

    def fail_register(cls):
        fail_registration_action(
            cls, "Check %(cls)r with __noregister__=True cannot be registered."
        )


class Argument(object):
    """
    One named input of a check.  ``resolve()`` turns the raw JSON value into a calculus object
    against a partially built document (chart, parameters, scalars, fields and forms known).
    """

    def __init__(self, type, required=True, default=None, choices=None):
        self.type = type
        self.required = required
        self.default = default
        self.choices = choices

    def resolve(self, value, document):
        return getattr(self, "resolve_%s" % self.type)(value, document)

    def resolve_scalar(self, value, document):
        if isinstance(value, bool):
            raise exceptions.ExpressionError("Expected an expression, got a boolean")
        if isinstance(value, str) and value in document.scalars:
            return document.scalars[value]
        if isinstance(value, (int, float)):
            return as_expr(value)
        if not isinstance(value, str):
            raise exceptions.ExpressionError("Expected an expression string, got %r" % (value,))
        return parse_scalar(value, document.chart, document.parameters, names=document.scalars)

    def resolve_field(self, value, document):
        if isinstance(value, str):
            try:
                return document.fields[value]
            except KeyError:
                raise exceptions.UndefinedNameError("field", value)
        if isinstance(value, (list, tuple)):
            return VectorField(
                document.chart, tuple(self.resolve_scalar(item, document) for item in value)
            )
        raise exceptions.ExpressionError("Expected a field name or component list")

    def resolve_form(self, value, document):
        if isinstance(value, str):
            try:
                return document.forms[value]
            except KeyError:
                raise exceptions.UndefinedNameError("form", value)
        if isinstance(value, (list, tuple)):
            return DifferentialForm.one_form(
                document.chart, [self.resolve_scalar(item, document) for item in value]
            )
        raise exceptions.ExpressionError("Expected a form name or 1-form component list")

    def resolve_potential(self, value, document):
        """An (n-2)-form: a scalar on 2-dimensional charts, a 1-form on 3-dimensional ones."""
        dim = document.chart.dim
        if dim == 2:
            return DifferentialForm.scalar(document.chart, self.resolve_scalar(value, document))
        if dim == 3:
            return self.resolve_form(value, document)
        raise exceptions.DegreeError("Potentials are supported on 2- and 3-dimensional charts")

    def resolve_number(self, value, document):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise exceptions.ExpressionError("Expected a number, got %r" % (value,))
        return float(value)

    def resolve_point(self, value, document):
        if not isinstance(value, (list, tuple)) or len(value) != document.chart.dim:
            raise exceptions.ChartError(
                "Expected a point with %d coordinates, got %r" % (document.chart.dim, value)
            )
        return tuple(self.resolve_number(item, document) for item in value)

    def resolve_choice(self, value, document):
        if value not in self.choices:
            raise exceptions.ExpressionError(
                "Expected one of %s, got %r" % (", ".join(self.choices), value)
            )
        return value


class Check(metaclass=CheckType):
    """
    A named kind of verification.  Subclasses declare the document structures they work with and
    their ``arguments``, and implement ``run()`` returning a CheckVerdict.
    """

    __noregister__ = True

    kind = None
    structures = ANY
    arguments = {}

    def resolve_arguments(self, raw, document):
        """Returns ``(arguments, errors)``; errors map argument names to messages."""
        arguments, errors = {}, {}
        unknown = set(raw) - set(self.arguments)
        for name in sorted(unknown):
            errors[name] = "Unexpected argument for %s checks" % self.kind
        for name, argument in self.arguments.items():
            if name not in raw:
                if argument.required:
                    errors[name] = "This argument is required for %s checks" % self.kind
                else:
                    arguments[name] = argument.default
                continue
            try:
                arguments[name] = argument.resolve(raw[name], document)
            except RESOLVE_ERRORS as err:
                errors[name] = str(err)
        return arguments, errors

    def supports(self, structure_kind):
        return structure_kind in self.structures

    def run(self, document, sampler, tolerance, **arguments):
        raise NotImplementedError
