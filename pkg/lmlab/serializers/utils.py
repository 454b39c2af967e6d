from rest_framework import serializers
from rest_framework.exceptions import ValidationError

from ..calculus import exceptions

# Failures raised while turning document text into calculus objects
BUILD_ERRORS = (
    exceptions.LMLabException,
    ValueError,
    TypeError,
    ZeroDivisionError,
    RecursionError,
)


def build_or_error(path, builder, *args, **kwargs):
    """Calls ``builder``; calculus errors become a ValidationError keyed by ``path``."""
    try:
        return builder(*args, **kwargs)
    except BUILD_ERRORS as err:
        raise ValidationError({path: [str(err)]})


class PairIndexField(serializers.Field):
    """A "i,j" bivector key (1-based) as a 0-based ``(i, j)`` tuple."""

    def to_internal_value(self, data):
        try:
            i, j = (int(part) for part in str(data).split(","))
        except ValueError:
            raise ValidationError("Bivector keys look like \"1,2\", got %r" % (data,))
        return (i - 1, j - 1)

    def to_representation(self, value):
        return "%d,%d" % (value[0] + 1, value[1] + 1)


class ExpressionField(serializers.CharField):
    """Expression source text; numbers are accepted and kept as their decimal spelling."""

    def __init__(self, **kwargs):
        kwargs.setdefault("trim_whitespace", True)
        super(ExpressionField, self).__init__(**kwargs)

    def to_representation(self, value):
        return str(value)


class PointField(serializers.ListField):
    child = serializers.FloatField()

    def to_representation(self, data):
        if data is None:
            return None
        return [float(value) for value in data]
