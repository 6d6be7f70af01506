"""Encoder/decoder for AMF3 values and the remoting packet envelope.

Wire rules implemented here:

* U29: 1-4 octet variable-length unsigned integer, high bit of the first
  three octets is a continuation flag, the fourth octet (when present)
  contributes a full 8 bits.  The encoder always emits the minimal form;
  the decoder accepts any form.
* Markers: undefined=0x00 null=0x01 false=0x02 true=0x03 integer=0x04
  double=0x05 string=0x06 date=0x08 array=0x09 object=0x0A bytearray=0x0C.
  Everything else is rejected.
* Strings: U29 head, low bit 1 = inline (length = head >> 1, UTF-8
  octets follow), low bit 0 = back-reference into the per-call string
  table.  The empty string is always inline (0x01) and never enters the
  table.
* Integers: signed values in [-2^28, 2^28-1] as U29 of the low 29 bits;
  anything wider is emitted as a big-endian IEEE-754 double.
* Arrays: U29 head (dense_count << 1) | 1, associative pairs terminated
  by the empty key, then the dense items.
* Objects: anonymous dynamic objects only (traits head 0x0B, empty class
  name, key/value pairs, empty-key terminator).  Sealed, typed and
  externalizable traits are rejected.
* Reference tables are scoped to a single encode/decode call.  The
  encoder emits back-references for repeated strings only; the decoder
  additionally resolves object/array/date/bytearray and traits
  references.
* Object and associative keys are emitted in sorted order so that equal
  dicts encode to identical octets regardless of insertion order.

Packet envelope (all integers big-endian): version u16 (always 3),
header count u16, headers (name u16+UTF-8, must-understand u8 0/1, body
length u32, body value), message count u16, messages (target u16+UTF-8,
response u16+UTF-8, body length u32, body value).  The decoder ignores
the body-length fields and parses the value itself; trailing octets
after the declared structure are an error.

Every decode error carries the absolute octet offset at which decoding
failed, and a ``kind`` string used by the conformance corpus
(truncation / protocol / reference / depth).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from .values import INT_MAX, INT_MIN, AmfDate, MixedArray, Undefined, undefined

AMF_CONTENT_TYPE = "application/x-amf"

MAX_DEPTH = 64

_MARKER_UNDEFINED = 0x00
_MARKER_NULL = 0x01
_MARKER_FALSE = 0x02
_MARKER_TRUE = 0x03
_MARKER_INTEGER = 0x04
_MARKER_DOUBLE = 0x05
_MARKER_STRING = 0x06
_MARKER_DATE = 0x08
_MARKER_ARRAY = 0x09
_MARKER_OBJECT = 0x0A
_MARKER_BYTEARRAY = 0x0C


class AmfError(Exception):
    """Base class for wire-format failures."""

    kind = "protocol"

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (octet {offset})"
        super().__init__(message)


class TruncatedError(AmfError):
    """Input ended before the declared structure was complete."""

    kind = "truncation"


class ProtocolError(AmfError):
    """Structurally invalid input: bad marker, version, traits or text."""

    kind = "protocol"


class BadReferenceError(AmfError):
    """Back-reference index with no matching reference-table entry."""

    kind = "reference"


class DepthError(AmfError):
    """Container nesting deeper than MAX_DEPTH."""

    kind = "depth"


class EncodeError(AmfError):
    """Encoder input violates a value invariant (range, keys, depth)."""

    kind = "encode"


def encode_u29(n: int) -> bytes:
    """Encode an unsigned integer < 2^29 in the minimal 1-4 octet form."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 0 or n > 0x1FFFFFFF:
        raise EncodeError(f"u29 out of range: {n!r}")
    if n < 0x80:
        return bytes((n,))
    if n < 0x4000:
        return bytes((0x80 | (n >> 7), n & 0x7F))
    if n < 0x200000:
        return bytes((0x80 | (n >> 14), 0x80 | ((n >> 7) & 0x7F), n & 0x7F))
    return bytes(
        (0x80 | (n >> 22), 0x80 | ((n >> 15) & 0x7F), 0x80 | ((n >> 8) & 0x7F), n & 0xFF)
    )


def decode_u29(data: bytes, offset: int = 0) -> tuple[int, int]:
    """Decode a U29 starting at ``offset``; returns (value, octets consumed)."""
    n = 0
    for i in range(3):
        if offset + i >= len(data):
            raise TruncatedError("truncated u29", offset=len(data))
        byte = data[offset + i]
        if byte & 0x80:
            n = (n << 7) | (byte & 0x7F)
        else:
            return (n << 7) | byte, i + 1
    if offset + 3 >= len(data):
        raise TruncatedError("truncated u29", offset=len(data))
    return (n << 8) | data[offset + 3], 4


class _Encoder:
    """One encode call: an output buffer plus its private string table."""

    def __init__(self) -> None:
        self.buf = bytearray()
        self.strings: dict[str, int] = {}

    def write_utf8(self, s: str) -> None:
        if s == "":
            self.buf.append(0x01)
            return
        index = self.strings.get(s)
        if index is not None:
            self.buf += encode_u29(index << 1)
            return
        self.strings[s] = len(self.strings)
        raw = s.encode("utf-8")
        if len(raw) > 0x0FFFFFFF:
            raise EncodeError("string longer than the wire format can carry")
        self.buf += encode_u29((len(raw) << 1) | 1)
        self.buf += raw

    def write_key(self, key: object) -> None:
        if not isinstance(key, str) or key == "":
            raise EncodeError(f"object keys must be non-empty strings, got {key!r}")
        self.write_utf8(key)

    def write_value(self, v: object, depth: int = 0) -> None:
        if v is undefined or isinstance(v, Undefined):
            self.buf.append(_MARKER_UNDEFINED)
        elif v is None:
            self.buf.append(_MARKER_NULL)
        elif isinstance(v, bool):
            self.buf.append(_MARKER_TRUE if v else _MARKER_FALSE)
        elif isinstance(v, int) and INT_MIN <= v <= INT_MAX:
            self.buf.append(_MARKER_INTEGER)
            self.buf += encode_u29(v & 0x1FFFFFFF)
        elif isinstance(v, (int, float)):
            self.buf.append(_MARKER_DOUBLE)
            try:
                self.buf += struct.pack(">d", float(v))
            except OverflowError:
                raise EncodeError(f"integer too large for a double: {v!r}") from None
        elif isinstance(v, str):
            self.buf.append(_MARKER_STRING)
            self.write_utf8(v)
        elif isinstance(v, AmfDate):
            self.buf.append(_MARKER_DATE)
            self.buf.append(0x01)
            self.buf += struct.pack(">d", v.millis)
        elif isinstance(v, (bytes, bytearray, memoryview)):
            raw = bytes(v)
            if len(raw) > 0x0FFFFFFF:
                raise EncodeError("byte array longer than the wire format can carry")
            self.buf.append(_MARKER_BYTEARRAY)
            self.buf += encode_u29((len(raw) << 1) | 1)
            self.buf += raw
        elif isinstance(v, MixedArray):
            self._write_array(v.dense, v.assoc, depth)
        elif isinstance(v, (list, tuple)):
            self._write_array(list(v), {}, depth)
        elif isinstance(v, dict):
            if depth >= MAX_DEPTH:
                raise DepthError(f"nesting deeper than {MAX_DEPTH}")
            self.buf.append(_MARKER_OBJECT)
            self.buf.append(0x0B)  # inline traits, dynamic, zero sealed members
            self.buf.append(0x01)  # anonymous class name
            for key in sorted(v):
                self.write_key(key)
                self.write_value(v[key], depth + 1)
            self.buf.append(0x01)
        else:
            raise EncodeError(f"type {type(v).__name__} is not wire-encodable")

    def _write_array(self, dense: list, assoc: dict, depth: int) -> None:
        if depth >= MAX_DEPTH:
            raise DepthError(f"nesting deeper than {MAX_DEPTH}")
        if len(dense) > 0x0FFFFFFF:
            raise EncodeError("array longer than the wire format can carry")
        self.buf.append(_MARKER_ARRAY)
        self.buf += encode_u29((len(dense) << 1) | 1)
        for key in sorted(assoc):
            self.write_key(key)
            self.write_value(assoc[key], depth + 1)
        self.buf.append(0x01)
        for item in dense:
            self.write_value(item, depth + 1)


def encode_value(v: object) -> bytes:
    """Encode one value with fresh reference tables; deterministic."""
    enc = _Encoder()
    enc.write_value(v)
    return bytes(enc.buf)


class _Decoder:
    """One decode call over ``data`` starting at ``pos``, with fresh tables.

    ``objects`` holds every decoded array/object/date/bytearray so that
    back-references resolve to the already-built (aliased) value;
    ``traits`` only ever holds the anonymous-dynamic traits this dialect
    accepts, but index arithmetic is honoured for compatibility.
    """

    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos
        self.strings: list[str] = []
        self.objects: list[object] = []
        self.traits: list[str] = []

    def need(self, count: int) -> None:
        if self.pos + count > len(self.data):
            raise TruncatedError("unexpected end of input", offset=len(self.data))

    def read_u29(self) -> int:
        n, used = decode_u29(self.data, self.pos)
        self.pos += used
        return n

    def read_utf8(self) -> str:
        head = self.read_u29()
        if head & 1 == 0:
            index = head >> 1
            if index >= len(self.strings):
                raise BadReferenceError(
                    f"string reference {index} with {len(self.strings)} entries",
                    offset=self.pos,
                )
            return self.strings[index]
        length = head >> 1
        self.need(length)
        raw = self.data[self.pos : self.pos + length]
        self.pos += length
        try:
            s = raw.decode("utf-8")
        except UnicodeDecodeError:
            raise ProtocolError("invalid UTF-8 in string", offset=self.pos) from None
        if s:
            self.strings.append(s)
        return s

    def read_object_ref(self, index: int) -> object:
        if index >= len(self.objects):
            raise BadReferenceError(
                f"object reference {index} with {len(self.objects)} entries",
                offset=self.pos,
            )
        return self.objects[index]

    def read_value(self, depth: int = 0) -> object:
        self.need(1)
        marker = self.data[self.pos]
        marker_at = self.pos
        self.pos += 1
        if marker == _MARKER_UNDEFINED:
            return undefined
        if marker == _MARKER_NULL:
            return None
        if marker == _MARKER_FALSE:
            return False
        if marker == _MARKER_TRUE:
            return True
        if marker == _MARKER_INTEGER:
            n = self.read_u29()
            return n - 0x20000000 if n & 0x10000000 else n
        if marker == _MARKER_DOUBLE:
            self.need(8)
            (x,) = struct.unpack_from(">d", self.data, self.pos)
            self.pos += 8
            return x
        if marker == _MARKER_STRING:
            return self.read_utf8()
        if marker == _MARKER_DATE:
            head = self.read_u29()
            if head & 1 == 0:
                return self.read_object_ref(head >> 1)
            self.need(8)
            (millis,) = struct.unpack_from(">d", self.data, self.pos)
            self.pos += 8
            date = AmfDate(millis)
            self.objects.append(date)
            return date
        if marker == _MARKER_ARRAY:
            return self._read_array(depth)
        if marker == _MARKER_OBJECT:
            return self._read_object(depth)
        if marker == _MARKER_BYTEARRAY:
            head = self.read_u29()
            if head & 1 == 0:
                return self.read_object_ref(head >> 1)
            length = head >> 1
            self.need(length)
            raw = self.data[self.pos : self.pos + length]
            self.pos += length
            self.objects.append(raw)
            return raw
        raise ProtocolError(f"unknown marker 0x{marker:02X}", offset=marker_at)

    def _enter(self, depth: int) -> None:
        if depth >= MAX_DEPTH:
            raise DepthError(f"nesting deeper than {MAX_DEPTH}", offset=self.pos)

    def _read_array(self, depth: int) -> object:
        head = self.read_u29()
        if head & 1 == 0:
            return self.read_object_ref(head >> 1)
        self._enter(depth)
        count = head >> 1
        # Every dense item takes at least one octet; reject absurd counts early.
        if count > len(self.data) - self.pos:
            raise TruncatedError(
                f"array claims {count} items but input ends", offset=self.pos
            )
        array = MixedArray()
        slot = len(self.objects)
        self.objects.append(array)
        while True:
            key = self.read_utf8()
            if key == "":
                break
            if key in array.assoc:
                raise ProtocolError(f"duplicate key {key!r}", offset=self.pos)
            array.assoc[key] = self.read_value(depth + 1)
        for _ in range(count):
            array.dense.append(self.read_value(depth + 1))
        if not array.assoc:
            self.objects[slot] = array.dense
            return array.dense
        return array

    def _read_object(self, depth: int) -> dict:
        head = self.read_u29()
        if head & 1 == 0:
            ref = self.read_object_ref(head >> 1)
            if not isinstance(ref, dict):
                raise ProtocolError("object reference to a non-object", offset=self.pos)
            return ref
        if head & 2 == 0:
            index = head >> 2
            if index >= len(self.traits):
                raise BadReferenceError(
                    f"traits reference {index} with {len(self.traits)} entries",
                    offset=self.pos,
                )
        else:
            if head & 4:
                raise ProtocolError("externalizable objects are not supported", offset=self.pos)
            if head & 8 == 0 or head >> 4 != 0:
                raise ProtocolError("only anonymous dynamic objects are supported", offset=self.pos)
            class_name = self.read_utf8()
            if class_name != "":
                raise ProtocolError(f"typed object {class_name!r} is not supported", offset=self.pos)
            self.traits.append("anonymous-dynamic")
        self._enter(depth)
        obj: dict[str, object] = {}
        self.objects.append(obj)
        while True:
            key = self.read_utf8()
            if key == "":
                return obj
            if key in obj:
                raise ProtocolError(f"duplicate key {key!r}", offset=self.pos)
            obj[key] = self.read_value(depth + 1)


def decode_value(data: bytes, offset: int = 0) -> tuple[object, int]:
    """Decode one value; returns (value, octets consumed from ``offset``)."""
    dec = _Decoder(data, offset)
    value = dec.read_value()
    return value, dec.pos - offset


@dataclass
class AmfHeader:
    name: str
    must_understand: bool
    value: object


@dataclass
class AmfMessage:
    target_uri: str
    response_uri: str
    body: object


@dataclass
class AmfPacket:
    version: int = 3
    headers: list[AmfHeader] = field(default_factory=list)
    messages: list[AmfMessage] = field(default_factory=list)


def _pack_text(out: bytearray, s: str, what: str) -> None:
    raw = s.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise EncodeError(f"{what} longer than 65535 octets")
    out += struct.pack(">H", len(raw))
    out += raw


def encode_packet(p: AmfPacket) -> bytes:
    """Encode a packet; every header/message body gets fresh tables."""
    if p.version != 3:
        raise EncodeError(f"unsupported packet version {p.version}")
    if len(p.headers) > 0xFFFF or len(p.messages) > 0xFFFF:
        raise EncodeError("too many headers or messages")
    out = bytearray()
    out += struct.pack(">HH", 3, len(p.headers))
    for header in p.headers:
        if not header.name:
            raise EncodeError("header name must be non-empty")
        _pack_text(out, header.name, "header name")
        out.append(1 if header.must_understand else 0)
        body = encode_value(header.value)
        out += struct.pack(">I", len(body))
        out += body
    out += struct.pack(">H", len(p.messages))
    for message in p.messages:
        _pack_text(out, message.target_uri, "target uri")
        _pack_text(out, message.response_uri, "response uri")
        body = encode_value(message.body)
        out += struct.pack(">I", len(body))
        out += body
    return bytes(out)


class _PacketReader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def need(self, count: int) -> None:
        if self.pos + count > len(self.data):
            raise TruncatedError("unexpected end of packet", offset=len(self.data))

    def read_u16(self) -> int:
        self.need(2)
        (n,) = struct.unpack_from(">H", self.data, self.pos)
        self.pos += 2
        return n

    def read_text(self) -> str:
        length = self.read_u16()
        self.need(length)
        raw = self.data[self.pos : self.pos + length]
        try:
            s = raw.decode("utf-8")
        except UnicodeDecodeError:
            raise ProtocolError("invalid UTF-8 in envelope", offset=self.pos) from None
        self.pos += length
        return s

    def read_body(self) -> object:
        self.need(4)
        self.pos += 4  # declared body length is advisory; parse the value itself
        dec = _Decoder(self.data, self.pos)
        value = dec.read_value()
        self.pos = dec.pos
        return value


def decode_packet(data: bytes) -> AmfPacket:
    """Decode a whole packet; trailing octets are a protocol error."""
    reader = _PacketReader(data)
    version = reader.read_u16()
    if version != 3:
        raise ProtocolError(f"unsupported version {version}", offset=0)
    headers = []
    for _ in range(reader.read_u16()):
        name = reader.read_text()
        if name == "":
            raise ProtocolError("empty header name", offset=reader.pos)
        reader.need(1)
        must = reader.data[reader.pos]
        if must not in (0, 1):
            raise ProtocolError(f"must-understand octet {must:#x}", offset=reader.pos)
        reader.pos += 1
        headers.append(AmfHeader(name, bool(must), reader.read_body()))
    messages = []
    for _ in range(reader.read_u16()):
        target = reader.read_text()
        response = reader.read_text()
        messages.append(AmfMessage(target, response, reader.read_body()))
    if reader.pos != len(data):
        raise ProtocolError(
            f"{len(data) - reader.pos} trailing octets after packet", offset=reader.pos
        )
    return AmfPacket(version=3, headers=headers, messages=messages)
