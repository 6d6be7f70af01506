"""Canonical text form for wire values and the conformance corpus format.

Corpus files hold one vector per line::

    hex-octets TAB canonical-text TAB expect

where ``expect`` is ``ok`` or an error kind (``truncation`` / ``protocol``
/ ``reference`` / ``depth``).  Error lines carry ``-`` as the text column.
Blank lines and ``#`` comments are skipped.

The canonical text form is typed JSON so vectors can be both rendered and
parsed exactly: ``{"t":"int","v":300}``, ``{"t":"str","v":"abc"}``,
``{"t":"array","v":[...],"assoc":{...}}`` and so on.  Object and
associative keys are rendered in sorted order, matching the encoder's
canonical key order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .values import AmfDate, MixedArray, Undefined, undefined


def _untype(v: object) -> object:
    if v is undefined or isinstance(v, Undefined):
        return {"t": "undefined"}
    if v is None:
        return {"t": "null"}
    if isinstance(v, bool):
        return {"t": "bool", "v": v}
    if isinstance(v, int):
        return {"t": "int", "v": v}
    if isinstance(v, float):
        return {"t": "double", "v": v}
    if isinstance(v, str):
        return {"t": "str", "v": v}
    if isinstance(v, (bytes, bytearray)):
        return {"t": "bytes", "v": bytes(v).hex()}
    if isinstance(v, AmfDate):
        return {"t": "date", "v": v.millis}
    if isinstance(v, MixedArray):
        node: dict = {"t": "array", "v": [_untype(item) for item in v.dense]}
        if v.assoc:
            node["assoc"] = {k: _untype(v.assoc[k]) for k in sorted(v.assoc)}
        return node
    if isinstance(v, (list, tuple)):
        return {"t": "array", "v": [_untype(item) for item in v]}
    if isinstance(v, dict):
        return {"t": "object", "v": {k: _untype(v[k]) for k in sorted(v)}}
    raise ValueError(f"no canonical form for {type(v).__name__}")


def _retype(node: object) -> object:
    if not isinstance(node, dict) or "t" not in node:
        raise ValueError(f"malformed canonical node: {node!r}")
    tag = node["t"]
    if tag == "undefined":
        return undefined
    if tag == "null":
        return None
    if tag == "bool":
        return bool(node["v"])
    if tag == "int":
        return int(node["v"])
    if tag == "double":
        return float(node["v"])
    if tag == "str":
        return str(node["v"])
    if tag == "bytes":
        return bytes.fromhex(node["v"])
    if tag == "date":
        return AmfDate(float(node["v"]))
    if tag == "array":
        dense = [_retype(item) for item in node["v"]]
        assoc = {k: _retype(item) for k, item in node.get("assoc", {}).items()}
        if assoc:
            return MixedArray(dense, assoc)
        return dense
    if tag == "object":
        return {k: _retype(item) for k, item in node["v"].items()}
    raise ValueError(f"unknown canonical tag {tag!r}")


def to_text(v: object) -> str:
    """Render a value in its canonical one-line text form."""
    return json.dumps(_untype(v), separators=(",", ":"), ensure_ascii=True)


def from_text(text: str) -> object:
    """Parse a canonical text form back into a value."""
    return _retype(json.loads(text))


@dataclass(frozen=True)
class Vector:
    octets: bytes
    text: str
    expect: str  # "ok" or an error kind
    lineno: int


def parse_corpus(text: str) -> list[Vector]:
    vectors = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"corpus line {lineno}: want 3 tab-separated fields")
        hex_octets, canonical, expect = parts
        vectors.append(Vector(bytes.fromhex(hex_octets), canonical, expect, lineno))
    return vectors
