"""On-disk formats: the project dataset (CSV) and the parameter document (JSON).

The dataset is a plain comma-separated file with a mandatory header; factor
columns accept either level labels or decimal ratings.  The parameter
document bundles everything an estimate needs (schema, multiplier values,
dependency rules, curve coefficients, provenance) under a versioned JSON
layout.  Loading validates every invariant rather than trusting the file;
floats serialize via ``repr`` so a save/load cycle is exact.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
import tempfile
from dataclasses import dataclass, replace
from typing import Sequence

from .bank import MultiplierBank
from .errors import DocumentError, NfaError, ParseError
from .models import ModelCoefficients, ModelInputs, get_model
from .rules import DependencyRule, DependencySet, validate_rules
from .schema import DIRECTIONS, FactorDefinition, FactorSchema
from .training import ProjectRecord

FORMAT_VERSION = 1

_ID_PATTERN = re.compile(r"[A-Za-z0-9_]+\Z")

_FIXED_COLUMNS = ("id", "size", "model_id")
_TAIL_COLUMNS = ("actual_effort", "weight")


@dataclass(frozen=True)
class ParameterDocument:
    """Everything needed to reproduce an estimate, as persisted to disk."""

    schema: FactorSchema
    params: MultiplierBank
    rules: DependencySet
    coefficients: ModelCoefficients
    provenance: str = ""

    def __post_init__(self):
        self.params.validate_for(self.schema)
        violations = validate_rules(self.rules, self.schema)
        if violations:
            first = violations[0]
            raise DocumentError(
                f"$.rules[{first.rule_index}]", first.reason
            )
        get_model(self.schema.model_binding)

    def get_model(self):
        """The back-end model this document is bound to."""
        return get_model(self.schema.model_binding)


def dataset_columns(schema: FactorSchema) -> tuple[str, ...]:
    """Header for a dataset bound to ``schema``, in canonical order."""
    return _FIXED_COLUMNS + schema.factor_ids + _TAIL_COLUMNS


def parse_dataset_csv(text: str, schema: FactorSchema) -> list[ProjectRecord]:
    """Parse a dataset file into validated records.

    The header must contain ``id``, ``size``, ``model_id``, one column per
    schema factor, and ``actual_effort``; ``weight`` is optional and
    defaults to 1.  Factor cells hold a level label or a decimal rating in
    ``[0, K - 1]``.  The first problem aborts the parse with its line number
    and column name.
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ParseError("dataset is empty; a header row is required")
    header = [h.strip() for h in reader.fieldnames]
    required = set(_FIXED_COLUMNS) | set(schema.factor_ids) | {"actual_effort"}
    allowed = required | {"weight"}
    for name in header:
        if name not in allowed:
            raise ParseError("unknown column", line=1, column=name)
    seen = set(header)
    if len(seen) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise ParseError(f"duplicate columns {dupes}", line=1)
    for name in dataset_columns(schema):
        if name not in seen and name != "weight":
            raise ParseError("missing column", line=1, column=name)

    records: list[ProjectRecord] = []
    for raw in reader:
        line = reader.line_num
        if raw.get(None) is not None:
            raise ParseError(
                f"row has {len(header) + len(raw[None])} cells, header has "
                f"{len(header)}",
                line=line,
            )
        row = {k.strip(): (v or "").strip() for k, v in raw.items() if k is not None}
        if any(v is None for v in raw.values()):
            raise ParseError(
                f"row has fewer cells than the {len(header)}-column header",
                line=line,
            )

        record_id = row["id"]
        if not _ID_PATTERN.match(record_id):
            raise ParseError(
                f"id {record_id!r} must match [A-Za-z0-9_]+", line=line, column="id"
            )
        size = _parse_number(row["size"], line, "size")
        if not size > 0:
            raise ParseError(f"size must be positive, got {size}", line=line, column="size")
        model_id = row["model_id"]
        try:
            get_model(model_id)
        except NfaError as e:
            raise ParseError(str(e), line=line, column="model_id") from None

        ratings: dict[str, float] = {}
        for factor in schema.factors:
            cell = row[factor.id]
            try:
                ratings[factor.id] = factor.coerce_rating(cell)
            except NfaError as e:
                raise ParseError(str(e), line=line, column=factor.id) from None

        effort = _parse_number(row["actual_effort"], line, "actual_effort")
        if not effort > 0:
            raise ParseError(
                f"actual effort must be positive, got {effort}",
                line=line,
                column="actual_effort",
            )
        weight = 1.0
        if row.get("weight", "") != "":
            weight = _parse_number(row["weight"], line, "weight")
            if weight < 0:
                raise ParseError(
                    f"weight must be non-negative, got {weight}",
                    line=line,
                    column="weight",
                )
        records.append(
            ProjectRecord(
                id=record_id,
                inputs=ModelInputs(size=size, model_id=model_id),
                ratings=ratings,
                actual_effort=effort,
                weight=weight,
            )
        )
    return records


def _parse_number(cell: str, line: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"not a number: {cell!r}", line=line, column=column) from None
    if not math.isfinite(value):
        raise ParseError(f"not finite: {cell!r}", line=line, column=column)
    return value


def format_dataset_csv(records: Sequence[ProjectRecord], schema: FactorSchema) -> str:
    """Render records back to the canonical CSV layout (repr-exact floats)."""
    lines = [",".join(dataset_columns(schema))]
    for r in records:
        cells = [r.id, repr(r.inputs.size), r.inputs.model_id]
        cells += [repr(r.ratings[fid]) for fid in schema.factor_ids]
        cells += [repr(r.actual_effort), repr(r.weight)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_text_atomic(path: str, text: str) -> None:
    """Write via a same-directory temp file and rename, so readers never see
    a half-written file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".nfa-tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def read_dataset(path: str, schema: FactorSchema) -> list[ProjectRecord]:
    with open(path, encoding="utf-8") as handle:
        return parse_dataset_csv(handle.read(), schema)


def append_records(
    path: str, new_records: Sequence[ProjectRecord], schema: FactorSchema
) -> list[ProjectRecord]:
    """Append to a dataset file, creating it if absent; returns the full set."""
    existing = read_dataset(path, schema) if os.path.exists(path) else []
    combined = list(existing) + list(new_records)
    write_text_atomic(path, format_dataset_csv(combined, schema))
    return combined


def save_parameter_document(doc: ParameterDocument) -> str:
    """Serialize a document to its canonical JSON text."""
    payload = {
        "format_version": FORMAT_VERSION,
        "schema": {
            "model_binding": doc.schema.model_binding,
            "factors": [
                {
                    "id": f.id,
                    "name": f.name,
                    "level_labels": list(f.level_labels),
                    "direction": f.direction,
                    "initial_fmp": list(f.initial_fmp),
                }
                for f in doc.schema.factors
            ],
        },
        "fmp": {
            fid: list(row)
            for fid, row in zip(doc.schema.factor_ids, doc.params.rows)
        },
        "rules": rules_to_payload(doc.rules),
        "coefficients": {"a": doc.coefficients.a, "b": doc.coefficients.b},
        "provenance": doc.provenance,
    }
    return json.dumps(payload, indent=2) + "\n"


def load_parameter_document(text: str) -> ParameterDocument:
    """Parse and fully validate a parameter document.

    Nothing in the file is trusted: shapes, positivity, monotone directions,
    and rule validity are all re-checked, and problems name the offending
    field path.
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError("$", f"not valid JSON: {e}") from None
    root = _require_object(payload, "$")
    _require_keys(
        root,
        "$",
        required=("format_version", "schema", "fmp", "rules", "coefficients", "provenance"),
    )
    version = root["format_version"]
    if version != FORMAT_VERSION:
        raise DocumentError(
            "$.format_version", f"unsupported format version {version!r}"
        )

    schema = _load_schema(root["schema"])
    params = _load_fmp(root["fmp"], schema)
    rules = rules_from_payload(root["rules"], schema, path="$.rules")
    coefficients = _load_coefficients(root["coefficients"])
    provenance = root["provenance"]
    if not isinstance(provenance, str):
        raise DocumentError("$.provenance", "must be a string")
    try:
        return ParameterDocument(
            schema=schema,
            params=params,
            rules=rules,
            coefficients=coefficients,
            provenance=provenance,
        )
    except DocumentError:
        raise
    except NfaError as e:
        raise DocumentError("$", str(e)) from None


def _require_object(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise DocumentError(path, f"must be an object, got {type(value).__name__}")
    return value


def _require_keys(obj: dict, path: str, required: tuple, optional: tuple = ()) -> None:
    for key in obj:
        if key not in required and key not in optional:
            raise DocumentError(f"{path}.{key}", "unknown key")
    for key in required:
        if key not in obj:
            raise DocumentError(f"{path}.{key}", "missing")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(path, f"must be a number, got {value!r}")
    return float(value)


def _load_schema(raw) -> FactorSchema:
    obj = _require_object(raw, "$.schema")
    _require_keys(obj, "$.schema", required=("model_binding", "factors"))
    binding = obj["model_binding"]
    if not isinstance(binding, str):
        raise DocumentError("$.schema.model_binding", "must be a string")
    try:
        get_model(binding)
    except NfaError as e:
        raise DocumentError("$.schema.model_binding", str(e)) from None
    factors_raw = obj["factors"]
    if not isinstance(factors_raw, list) or not factors_raw:
        raise DocumentError("$.schema.factors", "must be a non-empty array")
    factors = []
    for i, entry in enumerate(factors_raw):
        path = f"$.schema.factors[{i}]"
        fobj = _require_object(entry, path)
        _require_keys(
            fobj,
            path,
            required=("id", "name", "level_labels", "direction", "initial_fmp"),
        )
        for key in ("id", "name", "direction"):
            if not isinstance(fobj[key], str):
                raise DocumentError(f"{path}.{key}", "must be a string")
        if fobj["direction"] not in DIRECTIONS:
            raise DocumentError(
                f"{path}.direction", f"must be one of {DIRECTIONS}"
            )
        labels = fobj["level_labels"]
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise DocumentError(f"{path}.level_labels", "must be an array of strings")
        fmp_raw = fobj["initial_fmp"]
        if not isinstance(fmp_raw, list):
            raise DocumentError(f"{path}.initial_fmp", "must be an array of numbers")
        initial = tuple(
            _number(v, f"{path}.initial_fmp[{k}]") for k, v in enumerate(fmp_raw)
        )
        try:
            factors.append(
                FactorDefinition(
                    id=fobj["id"],
                    name=fobj["name"],
                    level_labels=tuple(labels),
                    direction=fobj["direction"],
                    initial_fmp=initial,
                )
            )
        except NfaError as e:
            raise DocumentError(path, str(e)) from None
    try:
        return FactorSchema(factors=tuple(factors), model_binding=binding)
    except NfaError as e:
        raise DocumentError("$.schema", str(e)) from None


def _load_fmp(raw, schema: FactorSchema) -> MultiplierBank:
    obj = _require_object(raw, "$.fmp")
    for fid in obj:
        if fid not in schema:
            raise DocumentError(f"$.fmp.{fid}", "unknown key")
    rows = []
    for factor in schema.factors:
        path = f"$.fmp.{factor.id}"
        if factor.id not in obj:
            raise DocumentError(path, "shape mismatch: missing multiplier row")
        row_raw = obj[factor.id]
        if not isinstance(row_raw, list):
            raise DocumentError(path, "must be an array of numbers")
        row = [_number(v, f"{path}[{k}]") for k, v in enumerate(row_raw)]
        if len(row) != factor.level_count:
            raise DocumentError(
                path,
                f"shape mismatch: expected {factor.level_count} values, got {len(row)}",
            )
        for k, v in enumerate(row):
            if not math.isfinite(v) or v <= 0:
                raise DocumentError(f"{path}[{k}]", f"must be positive, got {v}")
        pairs = list(zip(row, row[1:]))
        if factor.direction == "increasing" and any(a > b for a, b in pairs):
            raise DocumentError(
                path, f"monotonicity violated at factor {factor.id!r}: values must be non-decreasing"
            )
        if factor.direction == "decreasing" and any(a < b for a, b in pairs):
            raise DocumentError(
                path, f"monotonicity violated at factor {factor.id!r}: values must be non-increasing"
            )
        rows.append(tuple(row))
    return MultiplierBank(tuple(rows))


def rules_to_payload(rules: DependencySet) -> list[dict]:
    """Dependency rules in their JSON wire/document shape."""
    return [
        {
            "antecedents": [[fid, level] for fid, level in r.antecedents],
            "target": r.target,
            "delta": r.delta,
            "note": r.note,
        }
        for r in rules.rules
    ]


def rules_from_payload(raw, schema: FactorSchema, path: str = "$.rules") -> DependencySet:
    """Parse and validate the JSON shape of a dependency rule list.

    Shared between the parameter document loader and the rule-editing
    endpoint; problems name the offending field path under ``path``.
    """
    if not isinstance(raw, list):
        raise DocumentError(path, "must be an array")
    rules = []
    for i, entry in enumerate(raw):
        rpath = f"{path}[{i}]"
        obj = _require_object(entry, rpath)
        _require_keys(obj, rpath, required=("antecedents", "target", "delta"), optional=("note",))
        ants_raw = obj["antecedents"]
        if not isinstance(ants_raw, list):
            raise DocumentError(f"{rpath}.antecedents", "must be an array of [factor, level] pairs")
        antecedents = []
        for k, pair in enumerate(ants_raw):
            ppath = f"{rpath}.antecedents[{k}]"
            if not (isinstance(pair, list) and len(pair) == 2):
                raise DocumentError(ppath, "must be a [factor, level] pair")
            fid, level = pair
            if not isinstance(fid, str):
                raise DocumentError(ppath, "factor id must be a string")
            if isinstance(level, bool) or not isinstance(level, int):
                raise DocumentError(ppath, "level must be an integer")
            antecedents.append((fid, level))
        target = obj["target"]
        if not isinstance(target, str):
            raise DocumentError(f"{rpath}.target", "must be a string")
        delta = _number(obj["delta"], f"{rpath}.delta")
        note = obj.get("note", "")
        if not isinstance(note, str):
            raise DocumentError(f"{rpath}.note", "must be a string")
        rules.append(
            DependencyRule(
                antecedents=tuple(antecedents), target=target, delta=delta, note=note
            )
        )
    rule_set = DependencySet(tuple(rules))
    violations = validate_rules(rule_set, schema)
    if violations:
        first = violations[0]
        raise DocumentError(f"{path}[{first.rule_index}]", first.reason)
    return rule_set


def _load_coefficients(raw) -> ModelCoefficients:
    obj = _require_object(raw, "$.coefficients")
    _require_keys(obj, "$.coefficients", required=("a", "b"))
    a = _number(obj["a"], "$.coefficients.a")
    b = _number(obj["b"], "$.coefficients.b")
    try:
        return ModelCoefficients(a, b)
    except NfaError as e:
        raise DocumentError("$.coefficients", str(e)) from None


def read_parameter_document(path: str) -> ParameterDocument:
    with open(path, encoding="utf-8") as handle:
        return load_parameter_document(handle.read())


def write_parameter_document(path: str, doc: ParameterDocument) -> None:
    write_text_atomic(path, save_parameter_document(doc))


def attach_coefficients(
    records: Sequence[ProjectRecord], doc: ParameterDocument
) -> list[ProjectRecord]:
    """Resolve the document's calibrated coefficients into matching records.

    A record picks up ``doc.coefficients`` when its model is the document's
    bound model and it does not already carry explicit coefficients; other
    records keep their registry defaults.
    """
    out = []
    for r in records:
        if r.inputs.model_id == doc.schema.model_binding and r.inputs.coefficients is None:
            out.append(replace(r, inputs=r.inputs.with_coefficients(doc.coefficients)))
        else:
            out.append(r)
    return out
