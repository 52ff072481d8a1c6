"""JSON state files and deterministic record serialization.

Numbers are written with 17 significant digits so that a dumped state
re-parses bit for bit; non-finite floats become the strings ``"inf"``,
``"-inf"`` and ``"nan"``.
"""

import csv
import io as _io
import json
import math
from numbers import Real

from .errors import ValidationError
from .spectrum import ContinuousSpectrum, DiscreteSpectrum, build_continuous, build_state


def format_number(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent=2, _level=0):
    """``json.dumps`` replacement with fixed 17-digit floats and stable key order."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, Real)):
        return format_number(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):
        return dumps(obj.item(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _number(entry, key, where):
    if key not in entry:
        raise ValidationError(f"{where}: missing field {key!r}")
    v = entry[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{where}: field {key!r} must be a number, got {v!r}")
    if not math.isfinite(v):
        raise ValidationError(f"{where}: field {key!r} must be finite")
    return float(v)


def parse_state(doc):
    """Build a discrete or continuous spectrum from a decoded JSON document."""
    if not isinstance(doc, dict):
        raise ValidationError("state document must be a JSON object")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise ValidationError("'name' must be a string")
    has_levels, has_density = "levels" in doc, "density" in doc
    if has_levels and has_density:
        raise ValidationError("a state has either 'levels' or 'density', not both "
                              "(mixed discrete and continuous spectra are not supported)")
    if not (has_levels or has_density):
        raise ValidationError("state document needs a 'levels' or 'density' array")
    key, second = ("levels", "weight") if has_levels else ("density", "rho")
    entries = doc[key]
    if not isinstance(entries, list):
        raise ValidationError(f"{key!r} must be an array")
    pairs = []
    for i, entry in enumerate(entries):
        where = f"{key}[{i}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where} must be an object")
        pairs.append((_number(entry, "energy", where), _number(entry, second, where)))
    if has_levels:
        return build_state(pairs, name=name)
    return build_continuous(pairs, name=name)


def loads_state(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from None
    return parse_state(doc)


def load_state(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read state file {path!r}: {exc.strerror}") from None
    return loads_state(text)


def state_document(state, **extra):
    doc = {}
    if state.name is not None:
        doc["name"] = state.name
    if isinstance(state, DiscreteSpectrum):
        doc["levels"] = [{"energy": float(e), "weight": float(w)}
                         for e, w in zip(state.energies, state.weights)]
    elif isinstance(state, ContinuousSpectrum):
        doc["density"] = [{"energy": float(e), "rho": float(r)}
                          for e, r in zip(state.energies, state.density)]
    else:
        raise TypeError(f"not a spectrum: {type(state).__name__}")
    doc.update(extra)
    return doc


def dump_state(state, **extra):
    return dumps(state_document(state, **extra)) + "\n"


def to_csv(records, columns):
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([_csv_cell(rec.get(c)) for c in columns])
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else format_number(v).strip('"')
    return v
