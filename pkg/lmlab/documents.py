"""Problem documents: the validated, fully parsed form of a JSON problem file."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .calculus.exceptions import DocumentError
from .calculus.fields import VolumeForm

__all__ = [
    "ProblemDocument",
    "CheckRequest",
    "load_document",
    "parse_document",
    "bundled_fixtures",
]

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CheckRequest:
    name: str
    kind: str
    arguments: dict
    tolerance: float | None = None


@dataclass
class ProblemDocument:
    chart: object
    structure_kind: str
    structure: object
    sampler: object
    tolerance: float
    name: str = ""
    version: int = SCHEMA_VERSION
    parameters: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict)
    forms: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    path: str | None = None

    @property
    def metric(self):
        if self.structure_kind in ("euclidean", "metric", "rotsym"):
            return self.structure
        return None

    @property
    def poisson(self):
        if self.structure_kind == "poisson":
            return self.structure
        return None

    @property
    def volume(self) -> VolumeForm:
        if self.structure_kind == "volume":
            return self.structure
        if self.metric is not None:
            return self.metric.volume_form
        return VolumeForm.coordinate(self.chart)


def parse_document(data, path=None, seed=None, tolerance=None):
    """Validates already-decoded JSON ``data``; raises DocumentError with the serializer errors."""
    from .serializers import ProblemDocumentSerializer

    serializer = ProblemDocumentSerializer(
        data=data, context={"path": path, "seed": seed, "tolerance": tolerance}
    )
    if not serializer.is_valid():
        raise DocumentError(serializer.errors, path)
    return serializer.save()


def load_document(path, seed=None, tolerance=None) -> ProblemDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise DocumentError({"file": [str(err)]}, str(path))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise DocumentError(
            {"json": [f"{err.msg} at line {err.lineno} column {err.colno}"]}, str(path)
        )
    document = parse_document(data, path=str(path), seed=seed, tolerance=tolerance)
    log.info("Loaded %s with %d checks", path, len(document.checks))
    return document


FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"


def bundled_fixtures() -> list:
    """Paths of the golden problem documents shipped with the package, sorted by name."""
    return sorted(FIXTURES_DIR.glob("*.json"))
