"""
Knot and d-record file loading.

Files are parsed with PyYAML (JSON is a subset), validated against the
bundled Draft-7 schemas, then parsed into pydantic models and finally into
knot descriptors. Every failure surfaces as a DsliceError with per-field
ErrorDetail entries.
"""

import json
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, Optional, Sequence, Tuple, Union

import yaml
from jsonschema import Draft7Validator
from pydantic import BaseModel, Field, ValidationError

from .config import SCHEMA_DIR, get_settings
from .dinv import DEntry, DRecord, DRecordSet, Relation
from .errors import ErrorDetail, InvalidExpressionError, MalformedRecordError, UnknownKnotError
from .knots import (
    CoverFact,
    FactRecord,
    KnotExpr,
    Leaf,
    SeifertMatrix,
    Sum,
    TwoBridge,
    parse_expression,
)
from .laurent import LaurentPoly, to_fraction
from .logging_config import get_logger

logger = get_logger(__name__)

Rational = Union[int, str]

KNOT_SCHEMA = "knots.schema.json"
DRECORD_SCHEMA = "drecords.schema.json"


class FactModel(BaseModel):
    q: int
    invariant_factors: List[int]
    doubly_vanishing: bool
    provenance: str = Field(..., min_length=1)


class KnotRecordModel(BaseModel):
    name: str
    kind: Literal["seifert", "two_bridge", "facts", "sum"]
    description: Optional[str] = None
    matrix: Optional[List[List[int]]] = None
    p: Optional[int] = None
    q: Optional[int] = None
    alexander: Optional[Dict[str, Rational]] = None
    facts: List[FactModel] = Field(default_factory=list)
    terms: Optional[List[Tuple[str, int]]] = None


class KnotFileModel(BaseModel):
    knots: List[KnotRecordModel]


class BoundModel(BaseModel):
    rel: Relation
    value: Rational


class DRecordModel(BaseModel):
    element: List[int]
    value: Optional[Rational] = None
    bound: Optional[BoundModel] = None
    provenance: str = Field(..., min_length=1)


class DRecordFileModel(BaseModel):
    knot: str
    q: int
    description: Optional[str] = None
    invariant_factors: Optional[List[int]] = None
    records: List[DRecordModel]


@lru_cache(maxsize=None)
def _validator(schema_name: str) -> Draft7Validator:
    with open(SCHEMA_DIR / schema_name, "r", encoding="utf-8") as f:
        return Draft7Validator(json.load(f))


def read_structured(path: Path) -> Any:
    """Read a YAML or JSON file."""
    path = Path(path)
    if not path.exists():
        raise MalformedRecordError(f"File not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise MalformedRecordError(f"{path}: not valid YAML/JSON: {e}") from e


def validate_schema(data: Any, schema_name: str, source: str) -> None:
    errors = sorted(_validator(schema_name).iter_errors(data), key=lambda e: list(e.path))
    if errors:
        details = [
            ErrorDetail(field=".".join(str(p) for p in e.path) or "<root>", message=e.message, code="SCHEMA")
            for e in errors
        ]
        raise MalformedRecordError(f"{source}: {len(errors)} schema violation(s)", details=details)


def _parse_model(model, data: Any, source: str):
    try:
        return model.model_validate(data)
    except ValidationError as e:
        details = [
            ErrorDetail(field=".".join(str(p) for p in err["loc"]), message=err["msg"], code=err["type"])
            for err in e.errors()
        ]
        raise MalformedRecordError(f"{source}: invalid record", details=details) from e


def build_descriptor(record: KnotRecordModel) -> Union[SeifertMatrix, TwoBridge, FactRecord]:
    if record.kind == "seifert":
        return SeifertMatrix.from_rows(record.matrix or [], record.name)
    if record.kind == "two_bridge":
        return TwoBridge(record.p, record.q, record.name)
    alexander = LaurentPoly.from_dict({int(e): to_fraction(c) for e, c in (record.alexander or {}).items()})
    facts = tuple(
        CoverFact(f.q, tuple(f.invariant_factors), f.doubly_vanishing, f.provenance) for f in record.facts
    )
    return FactRecord(record.name, alexander, facts)


class KnotLibrary:
    """
    Named knots from one or more knot files.

    Example:
        library = KnotLibrary.load([Path("my_knots.yaml")])
        expr = library.expression("K + (-1)K_3")
    """

    def __init__(self):
        self._records: Dict[str, KnotRecordModel] = {}
        self._sources: Dict[str, str] = {}
        self._resolved: Dict[str, KnotExpr] = {}

    @classmethod
    def load(cls, paths: Iterable[Path] = (), include_corpus: bool = True) -> "KnotLibrary":
        library = cls()
        if include_corpus:
            library.add_file(get_settings().corpus_dir / "knots.yaml")
        for path in paths:
            library.add_file(Path(path))
        library.check()
        return library

    def add_file(self, path: Path) -> None:
        source = str(path)
        data = read_structured(path)
        validate_schema(data, KNOT_SCHEMA, source)
        model = _parse_model(KnotFileModel, data, source)
        for record in model.knots:
            if record.name in self._records:
                raise MalformedRecordError(
                    f"{source}: knot {record.name!r} already defined in {self._sources[record.name]}"
                )
            self._records[record.name] = record
            self._sources[record.name] = source
        logger.debug(f"Loaded {len(model.knots)} knots from {source}")

    def names(self) -> List[str]:
        return sorted(self._records)

    def check(self) -> None:
        """Build every record so invalid matrices and dangling sum terms fail at load time."""
        for name in self._records:
            self.resolve(name)

    def resolve(self, name: str, _stack: Tuple[str, ...] = ()) -> KnotExpr:
        if name in self._resolved:
            return self._resolved[name]
        record = self._records.get(name)
        if record is None:
            raise UnknownKnotError(f"Knot {name!r} is not defined")
        if name in _stack:
            raise InvalidExpressionError(f"sum records form a cycle: {' -> '.join(_stack + (name,))}")
        if record.kind == "sum":
            expr: KnotExpr = Sum(tuple((self.resolve(term, _stack + (name,)), n) for term, n in record.terms))
        else:
            expr = Leaf(name, build_descriptor(record))
        self._resolved[name] = expr
        return expr

    def expression(self, text: str) -> KnotExpr:
        return parse_expression(text, self.resolve)


def resolve_drecord_path(text: str) -> Path:
    """A path as given, else a file of that name in the bundled d-record corpus."""
    path = Path(text)
    if path.exists():
        return path
    bundled = get_settings().corpus_dir / "drecords" / text
    if bundled.exists():
        return bundled
    raise MalformedRecordError(f"d-record file not found: {text}")


def load_drecords(path: Path) -> DRecordSet:
    source = str(path)
    data = read_structured(path)
    validate_schema(data, DRECORD_SCHEMA, source)
    model = _parse_model(DRecordFileModel, data, source)
    records = []
    for record in model.records:
        if record.bound is not None:
            entry = DEntry.bound(record.bound.rel, to_fraction(record.bound.value), record.provenance)
        else:
            entry = DEntry.exact(to_fraction(record.value), record.provenance)
        records.append(DRecord(tuple(record.element), entry))
    factors = tuple(model.invariant_factors) if model.invariant_factors is not None else None
    return DRecordSet(model.knot, model.q, tuple(records), factors, source)


def load_sources(paths: Sequence[str]) -> Dict[Tuple[str, int], DRecordSet]:
    sources: Dict[Tuple[str, int], DRecordSet] = {}
    for text in paths:
        record_set = load_drecords(resolve_drecord_path(text))
        key = (record_set.knot, record_set.q)
        if key in sources:
            raise MalformedRecordError(f"two d-record files for {record_set.knot} at q={record_set.q}")
        sources[key] = record_set
    return sources
