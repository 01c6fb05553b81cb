"""Reading and writing ``.ifs`` files.

The format is a JSON object::

    {
      "name": "converse pair for y = x",
      "maps": [
        {"ratio": 0.5, "angle": "0",  "translation": [0, 0]},
        {"ratio": 0.5, "angle": "pi", "translation": [1, 1]}
      ]
    }

``angle`` is a number (radians) or one of the strings ``"0"``, ``"pi"``,
``"-pi"``, ``"pi/N"``, ``"M*pi/N"``.  Unknown keys are rejected.
"""

from __future__ import annotations

import json
import math
import re

from .similitude import IFS, Similitude

TOP_KEYS = {"name", "source", "maps"}
MAP_KEYS = {"ratio", "angle", "translation"}
_PI_RE = re.compile(r"^\s*(?:(-?\d+)\s*\*\s*)?(-)?pi(?:\s*/\s*(\d+))?\s*$")


class IfsParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(msg + where)
        self.line, self.column = line, column


class IfsValidationError(ValueError):
    def __init__(self, msg: str, map_index: int | None = None):
        prefix = f"map {map_index}: " if map_index is not None else ""
        super().__init__(prefix + msg)
        self.map_index = map_index


def parse_angle(value) -> float:
    if isinstance(value, bool):
        raise ValueError("angle must be a number or a pi literal")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ValueError("angle must be a number or a pi literal")
    text = value.strip()
    if text == "0":
        return 0.0
    m = _PI_RE.match(text)
    if m:
        mult = int(m.group(1)) if m.group(1) else 1
        if m.group(2):
            mult = -mult
        den = int(m.group(3)) if m.group(3) else 1
        if den == 0:
            raise ValueError("zero denominator in angle")
        if mult == 1 and den == 1:
            return math.pi
        return mult * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"cannot read angle {value!r}") from None


def parse_ifs(text: str) -> IFS:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IfsParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise IfsParseError("top level must be an object")
    extra = set(doc) - TOP_KEYS
    if extra:
        raise IfsParseError(f"unknown keys {sorted(extra)}")
    maps = doc.get("maps")
    if not isinstance(maps, list) or not maps:
        raise IfsValidationError("'maps' must be a nonempty list")
    built = []
    for i, entry in enumerate(maps):
        if not isinstance(entry, dict):
            raise IfsValidationError("each map must be an object", i)
        extra = set(entry) - MAP_KEYS
        if extra:
            raise IfsValidationError(f"unknown keys {sorted(extra)}", i)
        if "ratio" not in entry:
            raise IfsValidationError("missing 'ratio'", i)
        ratio = entry["ratio"]
        if isinstance(ratio, bool) or not isinstance(ratio, (int, float)):
            raise IfsValidationError("ratio must be a number", i)
        if not 0.0 < ratio < 1.0:
            raise IfsValidationError(f"ratio {ratio!r} is outside (0, 1)", i)
        try:
            angle = parse_angle(entry.get("angle", 0.0))
        except ValueError as exc:
            raise IfsValidationError(str(exc), i) from None
        tr = entry.get("translation", [0.0, 0.0])
        if (not isinstance(tr, list) or len(tr) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in tr)):
            raise IfsValidationError("translation must be a list of two numbers", i)
        built.append(Similitude(float(ratio), angle, (float(tr[0]), float(tr[1]))))
    return IFS(tuple(built), name=str(doc.get("name", "")), source=str(doc.get("source", "")))


def _angle_literal(angle: float):
    if angle == 0.0:
        return "0"
    if angle == math.pi:
        return "pi"
    return angle


def serialize_ifs(ifs: IFS) -> str:
    doc = {}
    if ifs.name:
        doc["name"] = ifs.name
    if ifs.source:
        doc["source"] = ifs.source
    doc["maps"] = [
        {"ratio": m.ratio, "angle": _angle_literal(m.angle), "translation": list(m.translation)}
        for m in ifs.maps
    ]
    return json.dumps(doc, indent=2) + "\n"


def read_ifs(path) -> IFS:
    with open(path, encoding="utf-8") as fh:
        return parse_ifs(fh.read())
