#!/usr/bin/env python3
"""Regenerate tests/data/amf3_corpus.txt from the independent oracle.

Hex octets for ok-vectors come from tests/amf3_oracle.py (the rule
transcription, not the shipped codec); error vectors are hand-assembled
octet sequences with the expected error kind.  The generated file is
committed; rerun this only when the corpus itself is being extended.
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import amf3_oracle as oracle  # noqa: E402

from flexdesk.conformance import to_text  # noqa: E402
from flexdesk.values import AmfDate, MixedArray, undefined  # noqa: E402

OK_VALUES = [
    # one vector per marker
    undefined,
    None,
    False,
    True,
    0,
    1.5,
    "abc",
    AmfDate(1234.5),
    [1, 2],
    {"a": 1},
    b"\x00\xff\x10",
    # integer payloads at every u29 width threshold
    1,
    0x7F,
    0x80,
    0x3FFF,
    0x4000,
    0x1FFFFF,
    0x200000,
    2**28 - 1,          # widest positive integer: payload 0x0FFFFFFF
    -1,                 # payload 0x1FFFFFFF, the u29 maximum
    -(2**28),           # widest negative integer: payload 0x10000000
    -300,
    # doubles, including values too wide for the integer marker
    0.0,
    -0.0,
    -2.5,
    float(2**28),       # promoted: out of signed 29-bit range
    float(-(2**28) - 1),
    float(2**53),
    float("inf"),
    float("-inf"),
    float("nan"),
    1e308,
    # strings
    "",
    "a",
    "héllo",            # multi-octet utf-8
    "日本語",
    "x" * 0x40,         # 2-octet length head
    # string references inside one call
    ["repeat", "repeat"],
    ["repeat", "repeat", "repeat"],
    ["ab", "cd", "ab", "cd"],
    {"key": "key"},     # key and value share one table entry
    # arrays
    [],
    [None, True, "s", 7],
    [[1], [2, 3]],
    MixedArray([1, 2], {"k": "v"}),
    MixedArray([], {"a": 1, "b": 2}),
    # objects
    {},
    {"a": 1, "b": "two", "c": None},
    {"outer": {"inner": [1.5, "deep"]}},
    # fault shape used on every error path
    {"code": "auth.required", "details": None, "message": "login first"},
    {"code": "gateway.no_such_target", "details": "nope.nope", "message": "no such target"},
    # byte arrays
    b"",
    b"hello",
    AmfDate(0.0),
    AmfDate(-86400000.0),
]

# hand-assembled invalid inputs: (hex, expected error kind)
ERROR_VECTORS = [
    ("", "truncation"),                 # empty input
    ("04", "truncation"),               # integer marker, no payload
    ("0480", "truncation"),             # u29 continuation octet at end of input
    ("05", "truncation"),               # double marker, no payload
    ("053ff0", "truncation"),           # double cut short
    ("06", "truncation"),               # string marker, no head
    ("0607 6162", "truncation"),        # string claims 3 octets, has 2
    ("0905 01 0401", "truncation"),     # array claims 2 dense items, has 1
    ("09ffffffff", "truncation"),       # array claims 2^28-1 items
    ("0a0b 01 0361", "truncation"),     # object key with no value
    ("0c07 6162", "truncation"),        # bytearray claims 3 octets, has 2
    ("08 01 3ff0", "truncation"),       # date cut short
    ("07", "protocol"),                 # xml marker unsupported
    ("0b", "protocol"),                 # xml-string marker unsupported
    ("0d", "protocol"),                 # vector marker unsupported
    ("ff", "protocol"),                 # unknown marker
    ("0a07 01", "protocol"),            # externalizable traits
    ("0a13 01 0361 0401 01", "protocol"),  # sealed traits
    ("0a0b 0childname", "protocol"),    # placeholder, replaced below
    ("0a03 01", "protocol"),            # non-dynamic traits
    ("0602", "reference"),              # string ref 1, empty table
    ("0600", "reference"),              # string ref 0, empty table
    ("0900", "reference"),              # array ref 0, empty table
    ("0a00", "reference"),              # object ref 0, empty table
    ("0800", "reference"),              # date ref 0, empty table
    ("0c00", "reference"),              # bytearray ref 0, empty table
    ("0a01", "reference"),              # traits ref 0, empty traits table
    ("09 03 01 " * 65 + "01", "depth"),  # 65 nested single-item arrays
]

# typed (named) object traits: 0x0A, inline+dynamic traits 0x0B, class name "T"
ERROR_VECTORS[18] = ("0a0b 0354 01", "protocol")


def main() -> None:
    lines = ["# AMF3 conformance corpus: hex-octets TAB canonical-text TAB expect"]
    lines.append("# ok vectors are bit-exact in both directions; generated by scripts/make_amf3_corpus.py")
    for value in OK_VALUES:
        octets = oracle.value(value)
        lines.append(f"{octets.hex()}\t{to_text(value)}\tok")
    for hex_octets, kind in ERROR_VECTORS:
        lines.append(f"{hex_octets.replace(' ', '')}\t-\t{kind}")
    out = ROOT / "tests" / "data" / "amf3_corpus.txt"
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    ok = len(OK_VALUES)
    err = len(ERROR_VECTORS)
    print(f"wrote {out} ({ok} ok + {err} error vectors)")


if __name__ == "__main__":
    main()
