"""Domain types for schemata, instance data and gold alignments, plus file ingestion.

All types are immutable after construction and safe to share between threads.
Text is normalized to Unicode NFC at load time so that downstream byte-level
comparisons (sorting, hashing, caching) are stable across platforms.
"""

from __future__ import annotations

import csv
import json
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ParseError, ValidationError


class DataKind(str, Enum):
    TEXTUAL = "textual"
    NUMERIC = "numeric"
    MIXED = "mixed"
    EMPTY = "empty"


# Plain decimal numbers: optional sign, at most one decimal point.
# Thousands separators and exponents are deliberately rejected.
_NUMBER_RE = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)")

# Fraction of numeric values at or above which a column counts as numeric /
# at or below which it counts as textual; anything in between is mixed.
# Both bounds spelled out so exact 90%/10% ratios are not lost to rounding.
_NUMERIC_MAJORITY = 0.9
_NUMERIC_MINORITY = 0.1


def _nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def _is_usable(value: str) -> bool:
    """Empty and whitespace-only cells carry no embeddable content."""
    return value.strip() != ""


def classify_data_kind(instances: Iterable[str]) -> DataKind:
    """Classify a column by the share of its non-empty values that parse as numbers."""
    usable = [v.strip() for v in instances if _is_usable(v)]
    if not usable:
        return DataKind.EMPTY
    numeric = sum(1 for v in usable if _NUMBER_RE.fullmatch(v))
    ratio = numeric / len(usable)
    if ratio >= _NUMERIC_MAJORITY:
        return DataKind.NUMERIC
    if ratio <= _NUMERIC_MINORITY:
        return DataKind.TEXTUAL
    return DataKind.MIXED


@dataclass(frozen=True)
class Attribute:
    """A column of a table. ``data_kind`` is always derived from ``instances``."""

    name: str
    comment: str | None = None
    instances: tuple[str, ...] = ()
    data_kind: DataKind = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.name:
            raise ValidationError("attribute name must be non-empty")
        derived = classify_data_kind(self.instances)
        if self.data_kind is None:
            object.__setattr__(self, "data_kind", derived)
        elif self.data_kind != derived:
            raise ValidationError(
                f"attribute {self.name!r}: declared data_kind {self.data_kind.value!r} "
                f"does not match instances (expected {derived.value!r})"
            )

    @property
    def usable_instances(self) -> list[str]:
        return [v for v in self.instances if _is_usable(v)]


@dataclass(frozen=True)
class Table:
    name: str
    comment: str | None = None
    attributes: tuple[Attribute, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ValidationError("table name must be non-empty")
        seen = set()
        for attr in self.attributes:
            if attr.name in seen:
                raise ValidationError(
                    f"table {self.name!r}: duplicate attribute name {attr.name!r}"
                )
            seen.add(attr.name)

    def attribute(self, name: str) -> Attribute:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        raise ValidationError(f"table {self.name!r} has no attribute {name!r}")

    @property
    def attribute_names(self) -> list[str]:
        return [a.name for a in self.attributes]


@dataclass(frozen=True)
class Schema:
    name: str
    tables: tuple[Table, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ValidationError("schema name must be non-empty")
        seen = set()
        for table in self.tables:
            if table.name in seen:
                raise ValidationError(
                    f"schema {self.name!r}: duplicate table name {table.name!r}"
                )
            seen.add(table.name)

    def table(self, name: str) -> Table:
        for table in self.tables:
            if table.name == name:
                return table
        raise ValidationError(f"schema {self.name!r} has no table {name!r}")

    @property
    def table_names(self) -> list[str]:
        return [t.name for t in self.tables]


@dataclass(frozen=True)
class GoldAlignment:
    """Human-curated correct correspondences at table and attribute level."""

    table_pairs: frozenset[tuple[str, str]] = frozenset()
    attribute_pairs: frozenset[tuple[tuple[str, str], tuple[str, str]]] = frozenset()

    def validate_against(self, source: Schema, target: Schema) -> None:
        src_tables = set(source.table_names)
        tgt_tables = set(target.table_names)
        for src, tgt in self.table_pairs:
            if src not in src_tables:
                raise ValidationError(f"alignment references unknown source table {src!r}")
            if tgt not in tgt_tables:
                raise ValidationError(f"alignment references unknown target table {tgt!r}")
        for (s_tbl, s_attr), (t_tbl, t_attr) in self.attribute_pairs:
            if s_tbl not in src_tables:
                raise ValidationError(f"alignment references unknown source table {s_tbl!r}")
            if t_tbl not in tgt_tables:
                raise ValidationError(f"alignment references unknown target table {t_tbl!r}")
            if s_attr not in source.table(s_tbl).attribute_names:
                raise ValidationError(
                    f"alignment references unknown source attribute {s_tbl!r}.{s_attr!r}"
                )
            if t_attr not in target.table(t_tbl).attribute_names:
                raise ValidationError(
                    f"alignment references unknown target attribute {t_tbl!r}.{t_attr!r}"
                )


def _require(mapping: Mapping, key: str, context: str):
    if key not in mapping:
        raise ParseError(f"{context}: missing field {key!r}")
    return mapping[key]


def _load_json(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top-level value must be an object")
    return doc


def load_schema(path: str | Path) -> Schema:
    """Load a schema file. Instance lists are left empty; see load_instances."""
    doc = _load_json(path)
    body = _require(doc, "schema", str(path))
    if not isinstance(body, dict):
        raise ParseError(f"{path}: 'schema' must be an object")
    tables = []
    for ti, tdoc in enumerate(_require(body, "tables", f"{path}: schema")):
        if not isinstance(tdoc, dict):
            raise ParseError(f"{path}: schema.tables[{ti}] must be an object")
        attrs = []
        for ai, adoc in enumerate(tdoc.get("attributes", [])):
            if not isinstance(adoc, dict):
                raise ParseError(f"{path}: schema.tables[{ti}].attributes[{ai}] must be an object")
            attrs.append(
                Attribute(
                    name=_nfc(str(_require(adoc, "name", f"{path}: tables[{ti}].attributes[{ai}]"))),
                    comment=_nfc(str(adoc["comment"])) if adoc.get("comment") is not None else None,
                )
            )
        tables.append(
            Table(
                name=_nfc(str(_require(tdoc, "name", f"{path}: tables[{ti}]"))),
                comment=_nfc(str(tdoc["comment"])) if tdoc.get("comment") is not None else None,
                attributes=tuple(attrs),
            )
        )
    return Schema(name=_nfc(str(_require(body, "name", f"{path}: schema"))), tables=tuple(tables))


def schema_to_dict(schema: Schema) -> dict:
    """Structural counterpart of load_schema (instances are not part of the format)."""
    return {
        "schema": {
            "name": schema.name,
            "tables": [
                {
                    "name": t.name,
                    "comment": t.comment,
                    "attributes": [
                        {"name": a.name, "comment": a.comment} for a in t.attributes
                    ],
                }
                for t in schema.tables
            ],
        }
    }


def save_schema(schema: Schema, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(schema_to_dict(schema), indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def load_instances(schema: Schema, mapping: Mapping[str, str | Path]) -> Schema:
    """Fill instance lists from CSV files, table by table.

    Each CSV's header row must name a subset of the table's attributes.
    Empty cells are kept as empty strings; data kinds are recomputed for the
    filled attributes. Schema structure (names, order, comments) is untouched.
    """
    known = set(schema.table_names)
    for table_name in mapping:
        if table_name not in known:
            raise ValidationError(f"instance mapping references unknown table {table_name!r}")

    tables = []
    for table in schema.tables:
        if table.name not in mapping:
            tables.append(table)
            continue
        path = Path(mapping[table.name])
        columns = _read_csv_columns(path, table)
        attrs = tuple(
            Attribute(
                name=a.name,
                comment=a.comment,
                instances=tuple(columns.get(a.name, a.instances)),
            )
            for a in table.attributes
        )
        tables.append(Table(name=table.name, comment=table.comment, attributes=attrs))
    return Schema(name=schema.name, tables=tuple(tables))


def _read_csv_columns(path: Path, table: Table) -> dict[str, list[str]]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc

    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{path}: missing header row") from None
    header = [_nfc(h) for h in header]

    declared = set(table.attribute_names)
    for name in header:
        if name not in declared:
            raise ValidationError(
                f"{path}: header names unknown attribute {name!r} of table {table.name!r}"
            )
    if len(set(header)) != len(header):
        raise ValidationError(f"{path}: duplicate column in header")

    columns: dict[str, list[str]] = {name: [] for name in header}
    for row_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(
                f"{path}: row {row_no}: expected {len(header)} fields, got {len(row)}"
            )
        for name, cell in zip(header, row):
            columns[name].append(_nfc(cell))
    return columns


def load_alignment(path: str | Path) -> GoldAlignment:
    """Load a gold alignment file; duplicate pairs collapse by set semantics."""
    doc = _load_json(path)
    table_pairs = set()
    for i, pair in enumerate(doc.get("table_pairs", [])):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError(f"{path}: table_pairs[{i}] must be a [source, target] pair")
        table_pairs.add((_nfc(str(pair[0])), _nfc(str(pair[1]))))
    attribute_pairs = set()
    for i, pair in enumerate(doc.get("attribute_pairs", [])):
        try:
            (s_tbl, s_attr), (t_tbl, t_attr) = pair
        except (TypeError, ValueError):
            raise ParseError(
                f"{path}: attribute_pairs[{i}] must be [[srcTable, srcAttr], [tgtTable, tgtAttr]]"
            ) from None
        attribute_pairs.add(
            ((_nfc(str(s_tbl)), _nfc(str(s_attr))), (_nfc(str(t_tbl)), _nfc(str(t_attr))))
        )
    return GoldAlignment(
        table_pairs=frozenset(table_pairs),
        attribute_pairs=frozenset(attribute_pairs),
    )
