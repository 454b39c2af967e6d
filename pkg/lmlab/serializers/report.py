from rest_framework import serializers

from .utils import PointField

__all__ = ["VerdictSerializer", "ReportEntrySerializer", "ReportSerializer"]


class OptionalFieldsMixin(object):
    """Drops the fields in ``Meta.optional`` unless their context switch is set."""

    def to_representation(self, instance):
        data = super(OptionalFieldsMixin, self).to_representation(instance)
        for name, switch in getattr(self.Meta, "optional", {}).items():
            if not self.context.get(switch):
                data.pop(name, None)
        return data


class VerdictSerializer(serializers.Serializer):
    label = serializers.CharField()
    passed = serializers.BooleanField()
    tolerance = serializers.FloatField()
    max_abs_residual = serializers.FloatField()
    mean_abs_residual = serializers.FloatField()
    max_scaled_residual = serializers.FloatField()
    witness = PointField(allow_null=True)
    samples_used = serializers.IntegerField()
    samples_skipped = serializers.IntegerField()
    trivial = serializers.BooleanField()
    reason = serializers.CharField(allow_null=True)
    components = serializers.SerializerMethodField()

    def get_components(self, verdict):
        return VerdictSerializer(verdict.components, many=True, context=self.context).data


class ReportEntrySerializer(OptionalFieldsMixin, serializers.Serializer):
    name = serializers.CharField()
    kind = serializers.CharField()
    passed = serializers.BooleanField()
    max_abs_residual = serializers.FloatField(allow_null=True)
    mean_abs_residual = serializers.FloatField(allow_null=True)
    max_scaled_residual = serializers.FloatField(allow_null=True)
    witness = PointField(allow_null=True)
    samples_used = serializers.IntegerField(allow_null=True)
    samples_skipped = serializers.IntegerField(allow_null=True)
    tolerance = serializers.FloatField(allow_null=True)
    seed = serializers.IntegerField(allow_null=True)
    trivial = serializers.BooleanField()
    reason = serializers.CharField(allow_null=True)
    error = serializers.CharField(allow_null=True)
    components = VerdictSerializer(many=True)
    seconds = serializers.FloatField()

    class Meta:
        optional = {"seconds": "include_timings", "components": "include_components"}


class ReportSerializer(serializers.Serializer):
    name = serializers.CharField()
    passed = serializers.BooleanField()
    seed = serializers.IntegerField(allow_null=True)
    tolerance = serializers.FloatField(allow_null=True)
    count = serializers.SerializerMethodField()
    failed = serializers.SerializerMethodField()
    checks = ReportEntrySerializer(source="entries", many=True)
    warnings = serializers.ListField(child=serializers.CharField())

    def get_count(self, report):
        return len(report.entries)

    def get_failed(self, report):
        return len(report.failed)
