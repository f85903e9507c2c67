"""On-disk formats: dataset and transform CSV, shapelet / model / report JSON.

Floats are written with ``repr`` so every value reads back bit-identical, and
every file is written to a temporary sibling first and renamed into place.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .core import ClassLabel, LabeledDataset, Shapelet, TimeSeries, TransformMatrix
from .errors import IoError, ParseError, ShapeletAnomalyError

SHAPELET_SCHEMA_VERSION = 1


def atomic_write_text(path, text: str) -> None:
    """Write *text* (UTF-8, LF) to *path* via a temporary file and rename."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path} is not UTF-8 text") from exc
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def sha256_of(path) -> str:
    h = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for block in iter(lambda: fh.read(1 << 20), b""):
                h.update(block)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return h.hexdigest()


def dump_json(doc) -> str:
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def load_json(path) -> dict:
    try:
        return json.loads(read_text(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg})", row=exc.lineno) from exc


def _fmt(v) -> str:
    return repr(float(v))


def _parse_float(token: str, row: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token.strip()!r}", row=row) from None
    if not np.isfinite(v):
        raise ParseError(f"non-finite value {token.strip()!r}", row=row)
    return v


def _parse_label(token: str, row: int) -> ClassLabel:
    try:
        return ClassLabel.parse(token)
    except ValueError:
        raise ParseError(f"unknown class label {token.strip()!r}", row=row) from None


def _data_lines(text: str, path):
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError(f"{path} is empty", row=1)
    header = [h.strip() for h in lines[0].split(",")]
    body = [(k + 2, line) for k, line in enumerate(lines[1:]) if line.strip()]
    return header, body


# -- dataset CSV ----------------------------------------------------------------

def format_dataset(dataset: LabeledDataset) -> str:
    m = max(len(ts) for ts in dataset.series)
    out = ["label," + ",".join(f"t{i}" for i in range(m))]
    for ts, lab in dataset:
        out.append(str(int(lab)) + "," + ",".join(map(_fmt, ts.samples)))
    return "\n".join(out) + "\n"


def write_dataset(path, dataset: LabeledDataset) -> None:
    atomic_write_text(path, format_dataset(dataset))


def parse_dataset(text: str, sample_rate_hz: float = 1.0, path="<dataset>") -> LabeledDataset:
    """Rows ``label,v0,...``; label is a class id or name. Rows may be shorter
    than the header (variable-length series) but never longer."""
    header, body = _data_lines(text, path)
    if header[0].lower() != "label":
        raise ParseError("first header column must be 'label'", row=1)
    width = len(header) - 1
    if width < 1:
        raise ParseError("header lists no sample columns", row=1)
    entries = []
    for row, line in body:
        cells = line.split(",")
        label = _parse_label(cells[0], row)
        if len(cells) - 1 > width:
            raise ParseError(f"{len(cells) - 1} values but the header has {width}", row=row)
        values = [_parse_float(c, row) for c in cells[1:]]
        if len(values) < 3:
            raise ParseError(f"series has {len(values)} values, at least 3 are required", row=row)
        entries.append((TimeSeries(np.array(values), sample_rate_hz), label))
    if not entries:
        raise ParseError(f"{path} contains no series", row=2)
    try:
        return LabeledDataset(tuple(entries))
    except ShapeletAnomalyError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def read_dataset(path, sample_rate_hz: float = 1.0) -> LabeledDataset:
    return parse_dataset(read_text(path), sample_rate_hz, path)


# -- shapelet JSON --------------------------------------------------------------

def shapelet_record(sh: Shapelet) -> dict:
    return {
        "id": sh.identifier,
        "values": [float(v) for v in sh.values],
        "source_series_index": int(sh.source_series_index),
        "start_offset": int(sh.start_offset),
        "length": sh.length,
        "info_gain": float(sh.info_gain),
        "split_threshold": float(sh.split_threshold),
        "class_hint": int(sh.class_hint),
    }


def shapelet_document(shapelets, config: dict | None = None, stats: dict | None = None) -> dict:
    doc = {
        "schema_version": SHAPELET_SCHEMA_VERSION,
        "kind": "shapelet_set",
        "config": config or {},
        "shapelets": [shapelet_record(s) for s in shapelets],
    }
    if stats is not None:
        doc["stats"] = stats
    return doc


def write_shapelets(path, shapelets, config: dict | None = None, stats: dict | None = None) -> None:
    atomic_write_text(path, dump_json(shapelet_document(shapelets, config, stats)))


def parse_shapelets(doc) -> tuple[list, dict]:
    """Return ``(shapelets, config)`` from a shapelet-set document."""
    if not isinstance(doc, dict) or doc.get("schema_version") != SHAPELET_SCHEMA_VERSION:
        raise ParseError("not a shapelet-set document of a supported version")
    out = []
    for k, rec in enumerate(doc.get("shapelets", [])):
        try:
            sh = Shapelet(
                values=np.array(rec["values"], dtype=np.float64),
                source_series_index=int(rec["source_series_index"]),
                start_offset=int(rec["start_offset"]),
                info_gain=float(rec["info_gain"]),
                split_threshold=float(rec["split_threshold"]),
                class_hint=ClassLabel.parse(rec["class_hint"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"shapelet {k} is malformed: {exc}") from exc
        if "length" in rec and int(rec["length"]) != sh.length:
            raise ParseError(f"shapelet {k} length field disagrees with its values")
        out.append(sh)
    return out, dict(doc.get("config", {}))


def read_shapelets(path) -> tuple[list, dict]:
    return parse_shapelets(load_json(path))


# -- transform CSV ----------------------------------------------------------------

def format_transform(matrix: TransformMatrix) -> str:
    out = [",".join(matrix.feature_ids) + ",label"]
    for row, lab in zip(matrix.values, matrix.labels):
        out.append(",".join(map(_fmt, row)) + f",{int(lab)}")
    return "\n".join(out) + "\n"


def write_transform(path, matrix: TransformMatrix) -> None:
    atomic_write_text(path, format_transform(matrix))


def parse_transform(text: str, path="<transform>") -> TransformMatrix:
    header, body = _data_lines(text, path)
    if header[-1].lower() != "label":
        raise ParseError("last header column must be 'label'", row=1)
    ids = tuple(header[:-1])
    rows, labels = [], []
    for row, line in body:
        cells = line.split(",")
        if len(cells) != len(header):
            raise ParseError(f"{len(cells)} cells but the header has {len(header)}", row=row)
        labels.append(_parse_label(cells[-1], row))
        vals = [_parse_float(c, row) for c in cells[:-1]]
        if any(v < 0 for v in vals):
            raise ParseError("distances must be non-negative", row=row)
        rows.append(vals)
    values = np.array(rows, dtype=np.float64).reshape(len(rows), len(ids))
    return TransformMatrix(values=values, labels=tuple(labels), feature_ids=ids)


def read_transform(path) -> TransformMatrix:
    return parse_transform(read_text(path), path)
