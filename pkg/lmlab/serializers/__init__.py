from .document import ProblemDocumentSerializer
from .report import ReportEntrySerializer, ReportSerializer, VerdictSerializer
from .utils import ExpressionField, PairIndexField, PointField

__all__ = [
    "ProblemDocumentSerializer",
    "ReportEntrySerializer",
    "ReportSerializer",
    "VerdictSerializer",
    "ExpressionField",
    "PairIndexField",
    "PointField",
]
