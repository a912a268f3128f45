"""CSV ingestion and the versioned JSON model document.

CSV dialect: comma separated, mandatory header, '.' decimal point, LF line
endings on output. JSON output is sorted and indented so identical content
gives identical bytes; non-finite floats are written as ``null``.
"""

import csv
from dataclasses import dataclass
import hashlib
import json
import math

import numpy as np

from .copulas import CopulaFit, CopulaSpec
from .errors import DataError, DomainError
from .joint import JointModel
from .marginals import MarginalFit
from .preprocess import Dataset, ScalerParams
from .regression import RegressionModel

FORMAT = "windcop-model"
SCHEMA_VERSION = 1
MODEL_TYPES = ("regression", "marginal", "copula", "joint")


@dataclass(frozen=True)
class CsvLoad:
    dataset: Dataset
    dropped: tuple = ()  # ((line number, reason), ...)
    filtered: int = 0


def _parse_float(cell):
    x = float(cell)
    if not math.isfinite(x):
        raise ValueError(cell)
    return x


def read_csv(path, drop_bad_rows=False, max_speed=None, speed_columns=None, response=None):
    """Read a numeric CSV into a :class:`Dataset`.

    Rows with non-numeric or missing cells raise :class:`DataError` naming the
    file line, unless ``drop_bad_rows`` is set. ``max_speed`` drops rows in
    which any of ``speed_columns`` (default: all) exceeds the cut.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        if not header or any(h == "" for h in header):
            raise DataError(f"{path}: header has empty column names")
        try:
            _parse_float(header[0])
        except ValueError:
            pass
        else:
            raise DataError(f"{path}: first row looks numeric; a header row is required")
        rows, dropped = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            reason = None
            if len(row) != len(header):
                reason = f"expected {len(header)} fields, got {len(row)}"
            else:
                try:
                    rows.append([_parse_float(c) for c in row])
                    continue
                except ValueError:
                    bad = next(c for c in row if not _is_float(c))
                    reason = f"non-numeric value {bad!r}"
            if not drop_bad_rows:
                raise DataError(f"{path}: line {line_no}: {reason} (use --drop-bad-rows to skip)")
            dropped.append((line_no, reason))
    if not rows:
        raise DataError(f"{path}: no data rows")
    values = np.array(rows, dtype=float)
    filtered = 0
    if max_speed is not None:
        cols = list(speed_columns) if speed_columns else header
        missing = [c for c in cols if c not in header]
        if missing:
            raise DataError(f"{path}: unknown columns {missing}")
        idx = [header.index(c) for c in cols]
        keep = np.all(values[:, idx] <= max_speed, axis=1)
        filtered = int(np.count_nonzero(~keep))
        values = values[keep]
        if values.shape[0] == 0:
            raise DataError(f"{path}: no rows left after --max-speed {max_speed}")
    if response is not None and response not in header:
        raise DataError(f"{path}: response column {response!r} not found; columns are {header}")
    return CsvLoad(Dataset(tuple(header), values, response), tuple(dropped), filtered)


def read_manifest(path):
    """``(name, path)`` rows of a manifest CSV with a ``path`` column and optional ``name``."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
            fields = [f.strip() for f in reader.fieldnames or []]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        return []
    if "path" not in fields:
        raise DataError(f"{path}: manifest needs a 'path' column, found {fields}")
    out = []
    for row in rows:
        p = (row.get("path") or "").strip()
        if not p:
            continue
        name = (row.get("name") or "").strip() or p
        out.append((name, p))
    return out


def _is_float(cell):
    try:
        _parse_float(cell)
        return True
    except ValueError:
        return False


def fmt(x):
    """Shortest round-trip text for a number."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    return repr(x) if math.isfinite(x) else ("nan" if math.isnan(x) else ("inf" if x > 0 else "-inf"))


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else fmt(c) for c in row])


def jsonable(obj):
    """Convert numpy scalars/arrays and tuples to JSON types; non-finite floats become ``None``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def dumps(doc):
    return json.dumps(jsonable(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, doc):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(doc))


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def regression_to_dict(m):
    return {"kind": m.kind, "intercept": m.intercept, "coefficients": list(map(float, m.coefficients)),
            "hyperparams": m.hyperparams, "column_names": list(m.column_names), "iterations": m.iterations,
            "converged": m.converged, "members": [regression_to_dict(x) for x in m.members],
            "scaler": m.scaler.to_dict() if m.scaler is not None else None}


def regression_from_dict(d):
    try:
        return RegressionModel(
            d["kind"], float(d["intercept"]), np.array(d["coefficients"], dtype=float), dict(d.get("hyperparams", {})),
            tuple(d.get("column_names", ())), int(d.get("iterations", 0)), bool(d.get("converged", True)),
            [regression_from_dict(x) for x in d.get("members", [])],
            ScalerParams.from_dict(d["scaler"]) if d.get("scaler") else None)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed regression model: {exc}") from None


_ENCODERS = {
    "regression": (RegressionModel, regression_to_dict, regression_from_dict),
    "marginal": (MarginalFit, MarginalFit.to_dict, MarginalFit.from_dict),
    "copula": (CopulaFit, CopulaFit.to_dict, CopulaFit.from_dict),
    "joint": (JointModel, JointModel.to_dict, JointModel.from_dict),
}


def model_document(model, tool_version, extra=None):
    for kind, (cls, enc, _) in _ENCODERS.items():
        if isinstance(model, cls):
            doc = {"format": FORMAT, "version": SCHEMA_VERSION, "tool_version": tool_version, "type": kind,
                   "model": enc(model)}
            if extra:
                doc.update(extra)
            return doc
    if isinstance(model, CopulaSpec):
        return {"format": FORMAT, "version": SCHEMA_VERSION, "tool_version": tool_version, "type": "copula_spec",
                "model": model.to_dict()}
    raise DomainError(f"cannot serialize {type(model).__name__}")


def load_model(path, expected=None):
    """Load a model document; ``expected`` restricts the accepted model types."""
    doc = read_json(path)
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise DataError(f"{path}: not a {FORMAT} document")
    if doc.get("version") != SCHEMA_VERSION:
        raise DataError(f"{path}: unsupported schema version {doc.get('version')!r}, expected {SCHEMA_VERSION}")
    kind = doc.get("type")
    if expected is not None and kind not in expected:
        raise DataError(f"{path}: holds a {kind} model, expected {' or '.join(expected)}")
    try:
        if kind == "copula_spec":
            return CopulaSpec.from_dict(doc["model"]), doc
        return _ENCODERS[kind][2](doc["model"]), doc
    except KeyError as exc:
        raise DataError(f"{path}: malformed model document (missing {exc})") from None
