/**
 * AMF3 value + packet codec, mirroring the server's wire rules bit for bit.
 *
 * Value mapping: `undefined`/`null`/booleans/strings map to themselves;
 * numbers encode with the integer marker when they are integral, inside
 * the signed 29-bit range and not negative zero, as a double otherwise
 * (wrap in {@link Dbl} to force the double marker); `Uint8Array` is a
 * byte array; {@link AmfDate} carries millis-since-epoch; plain arrays
 * are dense arrays; {@link MixedArray} adds associative string keys;
 * plain objects are anonymous dynamic objects.
 *
 * The encoder emits minimal U29 forms, back-references repeated strings
 * within one call, and writes object/associative keys in codepoint order
 * so equal values encode identically.  The decoder is liberal (any U29
 * form, object/array/date/bytearray/traits references) and rejects
 * sealed, typed and externalizable objects.  Reference tables are per
 * encode/decode call; nesting is capped at 64 containers.
 */

export const INT_MIN = -(2 ** 28);
export const INT_MAX = 2 ** 28 - 1;
export const MAX_DEPTH = 64;
export const AMF_CONTENT_TYPE = "application/x-amf";

const MARKER = {
  undefined: 0x00,
  null: 0x01,
  false: 0x02,
  true: 0x03,
  integer: 0x04,
  double: 0x05,
  string: 0x06,
  date: 0x08,
  array: 0x09,
  object: 0x0a,
  bytearray: 0x0c,
} as const;

export type ErrorKind = "truncation" | "protocol" | "reference" | "depth" | "encode";

export class AmfError extends Error {
  constructor(message: string, readonly kind: ErrorKind, readonly offset?: number) {
    super(offset === undefined ? message : `${message} (octet ${offset})`);
    this.name = "AmfError";
  }
}

/** Wire date: milliseconds since the Unix epoch as a double. */
export class AmfDate {
  constructor(readonly millis: number) {}
  toDate(): Date {
    return new Date(this.millis);
  }
}

/** Forces the double marker for integral numbers (e.g. 0.0 on the wire). */
export class Dbl {
  constructor(readonly value: number) {}
}

/** Array with a dense part plus associative string keys. */
export class MixedArray {
  constructor(
    public dense: AmfValue[] = [],
    public assoc: Record<string, AmfValue> = {},
  ) {}
}

export interface AmfObject {
  [key: string]: AmfValue;
}

export type AmfValue =
  | undefined
  | null
  | boolean
  | number
  | string
  | Uint8Array
  | AmfDate
  | Dbl
  | AmfValue[]
  | MixedArray
  | AmfObject;

export interface AmfHeader {
  name: string;
  mustUnderstand: boolean;
  value: AmfValue;
}

export interface AmfMessage {
  targetUri: string;
  responseUri: string;
  body: AmfValue;
}

export interface AmfPacket {
  version: number;
  headers: AmfHeader[];
  messages: AmfMessage[];
}

const utf8Encoder = new TextEncoder();
const utf8Decoder = new TextDecoder("utf-8", { fatal: true });

/** Sort in Unicode codepoint order (not UTF-16 code-unit order). */
export function compareCodepoints(a: string, b: string): number {
  const as = Array.from(a);
  const bs = Array.from(b);
  const n = Math.min(as.length, bs.length);
  for (let i = 0; i < n; i++) {
    const ca = as[i].codePointAt(0)!;
    const cb = bs[i].codePointAt(0)!;
    if (ca !== cb) return ca - cb;
  }
  return as.length - bs.length;
}

export function encodeU29(n: number): Uint8Array {
  if (!Number.isInteger(n) || n < 0 || n > 0x1fffffff) {
    throw new AmfError(`u29 out of range: ${n}`, "encode");
  }
  if (n < 0x80) return Uint8Array.of(n);
  if (n < 0x4000) return Uint8Array.of(0x80 | (n >> 7), n & 0x7f);
  if (n < 0x200000) {
    return Uint8Array.of(0x80 | (n >> 14), 0x80 | ((n >> 7) & 0x7f), n & 0x7f);
  }
  return Uint8Array.of(
    0x80 | (n >> 22),
    0x80 | ((n >> 15) & 0x7f),
    0x80 | ((n >> 8) & 0x7f),
    n & 0xff,
  );
}

export function decodeU29(data: Uint8Array, offset = 0): [number, number] {
  let n = 0;
  for (let i = 0; i < 3; i++) {
    if (offset + i >= data.length) {
      throw new AmfError("truncated u29", "truncation", data.length);
    }
    const byte = data[offset + i];
    if (byte & 0x80) {
      n = (n << 7) | (byte & 0x7f);
    } else {
      return [(n << 7) | byte, i + 1];
    }
  }
  if (offset + 3 >= data.length) {
    throw new AmfError("truncated u29", "truncation", data.length);
  }
  // (n << 8) can cross 2^31; stay in float arithmetic
  return [n * 256 + data[offset + 3], 4];
}

class ByteWriter {
  private chunks: number[] = [];

  byte(b: number): void {
    this.chunks.push(b);
  }

  bytes(data: Uint8Array): void {
    for (const b of data) this.chunks.push(b);
  }

  u16(n: number): void {
    this.chunks.push((n >> 8) & 0xff, n & 0xff);
  }

  u32(n: number): void {
    this.chunks.push((n >>> 24) & 0xff, (n >>> 16) & 0xff, (n >>> 8) & 0xff, n & 0xff);
  }

  double(x: number): void {
    const view = new DataView(new ArrayBuffer(8));
    view.setFloat64(0, x, false);
    for (let i = 0; i < 8; i++) this.chunks.push(view.getUint8(i));
  }

  take(): Uint8Array {
    return Uint8Array.from(this.chunks);
  }
}

class Encoder {
  readonly out = new ByteWriter();
  private strings = new Map<string, number>();

  writeUtf8(s: string): void {
    if (s === "") {
      this.out.byte(0x01);
      return;
    }
    const index = this.strings.get(s);
    if (index !== undefined) {
      this.out.bytes(encodeU29(index << 1));
      return;
    }
    this.strings.set(s, this.strings.size);
    const raw = utf8Encoder.encode(s);
    this.out.bytes(encodeU29((raw.length << 1) | 1));
    this.out.bytes(raw);
  }

  private writeKey(key: string): void {
    if (typeof key !== "string" || key === "") {
      throw new AmfError(`object keys must be non-empty strings, got ${String(key)}`, "encode");
    }
    this.writeUtf8(key);
  }

  writeValue(v: AmfValue, depth = 0): void {
    if (v === undefined) {
      this.out.byte(MARKER.undefined);
    } else if (v === null) {
      this.out.byte(MARKER.null);
    } else if (typeof v === "boolean") {
      this.out.byte(v ? MARKER.true : MARKER.false);
    } else if (typeof v === "number") {
      if (Number.isInteger(v) && v >= INT_MIN && v <= INT_MAX && !Object.is(v, -0)) {
        this.out.byte(MARKER.integer);
        this.out.bytes(encodeU29(v & 0x1fffffff));
      } else {
        this.out.byte(MARKER.double);
        this.out.double(v);
      }
    } else if (v instanceof Dbl) {
      this.out.byte(MARKER.double);
      this.out.double(v.value);
    } else if (typeof v === "string") {
      this.out.byte(MARKER.string);
      this.writeUtf8(v);
    } else if (v instanceof AmfDate) {
      this.out.byte(MARKER.date);
      this.out.byte(0x01);
      this.out.double(v.millis);
    } else if (v instanceof Uint8Array) {
      this.out.byte(MARKER.bytearray);
      this.out.bytes(encodeU29((v.length << 1) | 1));
      this.out.bytes(v);
    } else if (v instanceof MixedArray) {
      this.writeArray(v.dense, v.assoc, depth);
    } else if (Array.isArray(v)) {
      this.writeArray(v, {}, depth);
    } else if (typeof v === "object") {
      if (depth >= MAX_DEPTH) throw new AmfError(`nesting deeper than ${MAX_DEPTH}`, "depth");
      this.out.byte(MARKER.object);
      this.out.byte(0x0b); // inline traits, dynamic, zero sealed members
      this.out.byte(0x01); // anonymous class name
      for (const key of Object.keys(v).sort(compareCodepoints)) {
        this.writeKey(key);
        this.writeValue((v as AmfObject)[key], depth + 1);
      }
      this.out.byte(0x01);
    } else {
      throw new AmfError(`value of type ${typeof v} is not wire-encodable`, "encode");
    }
  }

  private writeArray(dense: AmfValue[], assoc: Record<string, AmfValue>, depth: number): void {
    if (depth >= MAX_DEPTH) throw new AmfError(`nesting deeper than ${MAX_DEPTH}`, "depth");
    this.out.byte(MARKER.array);
    this.out.bytes(encodeU29((dense.length << 1) | 1));
    for (const key of Object.keys(assoc).sort(compareCodepoints)) {
      this.writeKey(key);
      this.writeValue(assoc[key], depth + 1);
    }
    this.out.byte(0x01);
    for (const item of dense) this.writeValue(item, depth + 1);
  }
}

export function encodeValue(v: AmfValue): Uint8Array {
  const encoder = new Encoder();
  encoder.writeValue(v);
  return encoder.out.take();
}

class Decoder {
  pos: number;
  private strings: string[] = [];
  private objects: unknown[] = [];
  private traits: string[] = [];

  constructor(readonly data: Uint8Array, pos = 0) {
    this.pos = pos;
  }

  need(count: number): void {
    if (this.pos + count > this.data.length) {
      throw new AmfError("unexpected end of input", "truncation", this.data.length);
    }
  }

  readU29(): number {
    const [n, used] = decodeU29(this.data, this.pos);
    this.pos += used;
    return n;
  }

  readDouble(): number {
    this.need(8);
    const view = new DataView(this.data.buffer, this.data.byteOffset + this.pos, 8);
    this.pos += 8;
    return view.getFloat64(0, false);
  }

  readUtf8(): string {
    const head = this.readU29();
    if ((head & 1) === 0) {
      const index = head >> 1;
      if (index >= this.strings.length) {
        throw new AmfError(
          `string reference ${index} with ${this.strings.length} entries`,
          "reference",
          this.pos,
        );
      }
      return this.strings[index];
    }
    const length = head >> 1;
    this.need(length);
    let s: string;
    try {
      s = utf8Decoder.decode(this.data.subarray(this.pos, this.pos + length));
    } catch {
      throw new AmfError("invalid UTF-8 in string", "protocol", this.pos);
    }
    this.pos += length;
    if (s !== "") this.strings.push(s);
    return s;
  }

  private objectRef(index: number): unknown {
    if (index >= this.objects.length) {
      throw new AmfError(
        `object reference ${index} with ${this.objects.length} entries`,
        "reference",
        this.pos,
      );
    }
    return this.objects[index];
  }

  private enter(depth: number): void {
    if (depth >= MAX_DEPTH) {
      throw new AmfError(`nesting deeper than ${MAX_DEPTH}`, "depth", this.pos);
    }
  }

  readValue(depth = 0): AmfValue {
    this.need(1);
    const markerAt = this.pos;
    const marker = this.data[this.pos++];
    switch (marker) {
      case MARKER.undefined:
        return undefined;
      case MARKER.null:
        return null;
      case MARKER.false:
        return false;
      case MARKER.true:
        return true;
      case MARKER.integer: {
        const n = this.readU29();
        return n & 0x10000000 ? n - 0x20000000 : n;
      }
      case MARKER.double:
        return this.readDouble();
      case MARKER.string:
        return this.readUtf8();
      case MARKER.date: {
        const head = this.readU29();
        if ((head & 1) === 0) return this.objectRef(head >> 1) as AmfValue;
        const date = new AmfDate(this.readDouble());
        this.objects.push(date);
        return date;
      }
      case MARKER.array:
        return this.readArray(depth);
      case MARKER.object:
        return this.readObject(depth);
      case MARKER.bytearray: {
        const head = this.readU29();
        if ((head & 1) === 0) return this.objectRef(head >> 1) as AmfValue;
        const length = head >> 1;
        this.need(length);
        const raw = this.data.slice(this.pos, this.pos + length);
        this.pos += length;
        this.objects.push(raw);
        return raw;
      }
      default:
        throw new AmfError(
          `unknown marker 0x${marker.toString(16).padStart(2, "0")}`,
          "protocol",
          markerAt,
        );
    }
  }

  private readArray(depth: number): AmfValue {
    const head = this.readU29();
    if ((head & 1) === 0) return this.objectRef(head >> 1) as AmfValue;
    this.enter(depth);
    const count = head >> 1;
    if (count > this.data.length - this.pos) {
      throw new AmfError(`array claims ${count} items but input ends`, "truncation", this.pos);
    }
    const array = new MixedArray();
    const slot = this.objects.length;
    this.objects.push(array);
    for (;;) {
      const key = this.readUtf8();
      if (key === "") break;
      if (key in array.assoc) {
        throw new AmfError(`duplicate key '${key}'`, "protocol", this.pos);
      }
      array.assoc[key] = this.readValue(depth + 1);
    }
    for (let i = 0; i < count; i++) array.dense.push(this.readValue(depth + 1));
    if (Object.keys(array.assoc).length === 0) {
      this.objects[slot] = array.dense;
      return array.dense;
    }
    return array;
  }

  private readObject(depth: number): AmfValue {
    const head = this.readU29();
    if ((head & 1) === 0) {
      const ref = this.objectRef(head >> 1);
      const plain =
        typeof ref === "object" &&
        ref !== null &&
        !(ref instanceof MixedArray) &&
        !(ref instanceof AmfDate) &&
        !(ref instanceof Uint8Array) &&
        !Array.isArray(ref);
      if (!plain) {
        throw new AmfError("object reference to a non-object", "protocol", this.pos);
      }
      return ref as AmfValue;
    }
    if ((head & 2) === 0) {
      const index = head >> 2;
      if (index >= this.traits.length) {
        throw new AmfError(
          `traits reference ${index} with ${this.traits.length} entries`,
          "reference",
          this.pos,
        );
      }
    } else {
      if (head & 4) {
        throw new AmfError("externalizable objects are not supported", "protocol", this.pos);
      }
      if ((head & 8) === 0 || head >> 4 !== 0) {
        throw new AmfError("only anonymous dynamic objects are supported", "protocol", this.pos);
      }
      const className = this.readUtf8();
      if (className !== "") {
        throw new AmfError(`typed object '${className}' is not supported`, "protocol", this.pos);
      }
      this.traits.push("anonymous-dynamic");
    }
    this.enter(depth);
    const obj: AmfObject = {};
    this.objects.push(obj);
    for (;;) {
      const key = this.readUtf8();
      if (key === "") return obj;
      if (key in obj) {
        throw new AmfError(`duplicate key '${key}'`, "protocol", this.pos);
      }
      obj[key] = this.readValue(depth + 1);
    }
  }
}

export function decodeValue(data: Uint8Array, offset = 0): [AmfValue, number] {
  const decoder = new Decoder(data, offset);
  const value = decoder.readValue();
  return [value, decoder.pos - offset];
}

function packText(out: ByteWriter, s: string, what: string): void {
  const raw = utf8Encoder.encode(s);
  if (raw.length > 0xffff) throw new AmfError(`${what} longer than 65535 octets`, "encode");
  out.u16(raw.length);
  out.bytes(raw);
}

export function encodePacket(packet: AmfPacket): Uint8Array {
  if (packet.version !== 3) {
    throw new AmfError(`unsupported packet version ${packet.version}`, "encode");
  }
  const out = new ByteWriter();
  out.u16(3);
  out.u16(packet.headers.length);
  for (const header of packet.headers) {
    if (!header.name) throw new AmfError("header name must be non-empty", "encode");
    packText(out, header.name, "header name");
    out.byte(header.mustUnderstand ? 1 : 0);
    const body = encodeValue(header.value);
    out.u32(body.length);
    out.bytes(body);
  }
  out.u16(packet.messages.length);
  for (const message of packet.messages) {
    packText(out, message.targetUri, "target uri");
    packText(out, message.responseUri, "response uri");
    const body = encodeValue(message.body);
    out.u32(body.length);
    out.bytes(body);
  }
  return out.take();
}

class PacketReader {
  pos = 0;

  constructor(readonly data: Uint8Array) {}

  need(count: number): void {
    if (this.pos + count > this.data.length) {
      throw new AmfError("unexpected end of packet", "truncation", this.data.length);
    }
  }

  u16(): number {
    this.need(2);
    const n = (this.data[this.pos] << 8) | this.data[this.pos + 1];
    this.pos += 2;
    return n;
  }

  text(): string {
    const length = this.u16();
    this.need(length);
    let s: string;
    try {
      s = utf8Decoder.decode(this.data.subarray(this.pos, this.pos + length));
    } catch {
      throw new AmfError("invalid UTF-8 in envelope", "protocol", this.pos);
    }
    this.pos += length;
    return s;
  }

  body(): AmfValue {
    this.need(4);
    this.pos += 4; // declared body length is advisory; parse the value itself
    const decoder = new Decoder(this.data, this.pos);
    const value = decoder.readValue();
    this.pos = decoder.pos;
    return value;
  }
}

export function decodePacket(data: Uint8Array): AmfPacket {
  const reader = new PacketReader(data);
  const version = reader.u16();
  if (version !== 3) {
    throw new AmfError(`unsupported version ${version}`, "protocol", 0);
  }
  const headers: AmfHeader[] = [];
  const headerCount = reader.u16();
  for (let i = 0; i < headerCount; i++) {
    const name = reader.text();
    if (name === "") throw new AmfError("empty header name", "protocol", reader.pos);
    reader.need(1);
    const must = reader.data[reader.pos];
    if (must !== 0 && must !== 1) {
      throw new AmfError(`must-understand octet ${must}`, "protocol", reader.pos);
    }
    reader.pos += 1;
    headers.push({ name, mustUnderstand: must === 1, value: reader.body() });
  }
  const messages: AmfMessage[] = [];
  const messageCount = reader.u16();
  for (let i = 0; i < messageCount; i++) {
    const targetUri = reader.text();
    const responseUri = reader.text();
    messages.push({ targetUri, responseUri, body: reader.body() });
  }
  if (reader.pos !== data.length) {
    throw new AmfError(
      `${data.length - reader.pos} trailing octets after packet`,
      "protocol",
      reader.pos,
    );
  }
  return { version: 3, headers, messages };
}

export function hexToBytes(hex: string): Uint8Array {
  const clean = hex.replace(/\s+/g, "");
  const out = new Uint8Array(clean.length / 2);
  for (let i = 0; i < out.length; i++) {
    out[i] = parseInt(clean.slice(i * 2, i * 2 + 2), 16);
  }
  return out;
}

export function bytesToHex(data: Uint8Array): string {
  return Array.from(data, (b) => b.toString(16).padStart(2, "0")).join("");
}
