"""Self-describing little-endian binary frames for containers.

Layout::

    "DACC" | version u8 = 1 | property count u32 | property*

    property = name_len u16, name utf-8, kind u8, shape u8 (0 scalar, 1 array),
               [rank u8, extent u32 * rank], payload

Well-known properties travel under reserved names (``_value`` ...).  Text is
``u32 length + utf-8``; Bool is one byte; Char a u32 code point; TimeStamp
``u32 seconds, u32 nanoseconds``; floats are raw IEEE bits.
"""

from __future__ import annotations

import enum
import math
import struct

import numpy as np

from .arrays import DTYPES, ArrayValue, has_invalid_chars
from .catalog import Adaptor, Array, CatalogSpec, Container, Scalar, WellKnown, property_id, traverse
from .kinds import NS_PER_SEC, ScalarKind, ScalarValue, TimeStamp, is_unicode_scalar

__all__ = ["MAGIC", "VERSION", "DecodeFailure", "DecodeError", "encode", "decode"]

MAGIC = b"DACC"
VERSION = 1

K = ScalarKind

_FIXED = {
    K.Int8: struct.Struct("<b"),
    K.Int16: struct.Struct("<h"),
    K.Int32: struct.Struct("<i"),
    K.Int64: struct.Struct("<q"),
    K.UInt8: struct.Struct("<B"),
    K.UInt16: struct.Struct("<H"),
    K.UInt32: struct.Struct("<I"),
    K.UInt64: struct.Struct("<Q"),
    K.Float32: struct.Struct("<f"),
    K.Float64: struct.Struct("<d"),
    K.Bool: struct.Struct("<B"),
    K.Char: struct.Struct("<I"),
    K.Enum16: struct.Struct("<H"),
    K.TimeStamp: struct.Struct("<II"),
}
_U8 = struct.Struct("<B")
_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")

_WIRE_NAME = {m: m.value for m in WellKnown}
_FROM_WIRE = {m.value: m for m in WellKnown}


class DecodeFailure(enum.Enum):
    BadMagic = "BadMagic"
    BadVersion = "BadVersion"
    Truncated = "Truncated"
    MalformedRecord = "MalformedRecord"
    TrailingBytes = "TrailingBytes"


class DecodeError(ValueError):
    def __init__(self, classification: DecodeFailure, detail: str = ""):
        super().__init__(f"{classification.value}: {detail}" if detail else classification.value)
        self.classification = classification


# ---------------------------------------------------------------- encode


def _scalar_bytes(v: ScalarValue) -> bytes:
    kind = v.kind
    if kind is K.Text:
        raw = v.payload.encode("utf-8")
        return _U32.pack(len(raw)) + raw
    if kind is K.Char:
        return _FIXED[kind].pack(ord(v.payload))
    if kind is K.TimeStamp:
        return _FIXED[kind].pack(*v.payload)
    return _FIXED[kind].pack(v.payload)


def _name_bytes(pid) -> bytes:
    name = _WIRE_NAME[pid] if isinstance(pid, WellKnown) else pid
    raw = name.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise ValueError(f"property name too long to encode ({len(raw)} bytes)")
    return _U16.pack(len(raw)) + raw


class _EncodeAdaptor(Adaptor):
    def __init__(self):
        self.parts: list[bytes] = []

    def on_scalar(self, pid, value):
        self.parts += [_name_bytes(pid), _U8.pack(value.kind), b"\x00", _scalar_bytes(value)]

    def on_array(self, pid, array):
        if array.rank > 0xFF or max(array.dims) > 0xFFFF_FFFF:
            raise ValueError(f"dims {array.dims} exceed the wire format")
        head = [_name_bytes(pid), _U8.pack(array.kind), b"\x01", _U8.pack(array.rank)]
        head += [_U32.pack(d) for d in array.dims]
        self.parts += head
        if array.kind is K.Text:
            for s in array.data:
                raw = s.encode("utf-8")
                self.parts += [_U32.pack(len(raw)), raw]
        else:
            self.parts.append(array.data.tobytes())


def encode(c: Container) -> bytes:
    adaptor = _EncodeAdaptor()
    traverse(c, adaptor)
    return b"".join([MAGIC, _U8.pack(VERSION), _U32.pack(len(c.spec)), *adaptor.parts])


# ---------------------------------------------------------------- decode


class _Reader:
    __slots__ = ("buf", "pos")

    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    @property
    def remaining(self) -> int:
        return len(self.buf) - self.pos

    def take(self, n: int) -> bytes:
        if n > self.remaining:
            raise DecodeError(DecodeFailure.Truncated, f"need {n} bytes at offset {self.pos}")
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, st: struct.Struct):
        return st.unpack(self.take(st.size))

    def u8(self) -> int:
        return self.unpack(_U8)[0]

    def u16(self) -> int:
        return self.unpack(_U16)[0]

    def u32(self) -> int:
        return self.unpack(_U32)[0]


def _malformed(detail: str):
    raise DecodeError(DecodeFailure.MalformedRecord, detail)


def _utf8(raw: bytes, what: str) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        _malformed(f"{what} is not valid utf-8")


def _read_text(r: _Reader) -> str:
    return _utf8(r.take(r.u32()), "text payload")


def _read_scalar(r: _Reader, kind: ScalarKind) -> ScalarValue:
    if kind is K.Text:
        return ScalarValue._make(kind, _read_text(r))
    fields = r.unpack(_FIXED[kind])
    if kind is K.TimeStamp:
        sec, ns = fields
        if ns >= NS_PER_SEC:
            _malformed(f"timestamp nanoseconds {ns}")
        return ScalarValue._make(kind, TimeStamp(sec, ns))
    (x,) = fields
    if kind is K.Bool:
        if x > 1:
            _malformed(f"bool byte {x}")
        return ScalarValue._make(kind, x == 1)
    if kind is K.Char:
        if not is_unicode_scalar(x):
            _malformed(f"char code point {x:#x}")
        return ScalarValue._make(kind, chr(x))
    return ScalarValue._make(kind, x)


def _read_array(r: _Reader, kind: ScalarKind) -> ArrayValue:
    rank = r.u8()
    if rank == 0:
        _malformed("array rank 0")
    dims = tuple(r.u32() for _ in range(rank))
    if 0 in dims:
        _malformed(f"zero extent in {dims}")
    n = math.prod(dims)
    if kind is K.Text:
        if 4 * n > r.remaining:
            raise DecodeError(DecodeFailure.Truncated, f"{n} text elements cannot fit")
        buf = np.empty(n, dtype=object)
        for i in range(n):
            buf[i] = _read_text(r)
        return ArrayValue._make(kind, dims, buf)
    dtype = DTYPES[kind]
    buf = np.frombuffer(r.take(n * dtype.itemsize), dtype=dtype).copy()
    if kind is K.Bool and buf.view(np.uint8).max() > 1:
        _malformed("bool array byte > 1")
    if kind is K.Char and has_invalid_chars(buf):
        _malformed("char array holds an invalid code point")
    if kind is K.TimeStamp and int(buf["nanoseconds"].max()) >= NS_PER_SEC:
        _malformed("timestamp nanoseconds >= 10**9")
    return ArrayValue._make(kind, dims, buf)


def decode(frame: bytes) -> Container:
    """Rebuild a container from :func:`encode` output; raises :class:`DecodeError`."""
    frame = bytes(frame)
    head = frame[:4]
    if head != MAGIC[:len(head)]:
        raise DecodeError(DecodeFailure.BadMagic)
    r = _Reader(frame)
    r.take(4)
    version = r.u8()
    if version != VERSION:
        raise DecodeError(DecodeFailure.BadVersion, f"version {version}")
    count = r.u32()
    entries = []
    bindings = {}
    for _ in range(count):
        name = _utf8(r.take(r.u16()), "property name")
        pid = _FROM_WIRE.get(name)
        if pid is None:
            try:
                pid = property_id(name)
            except ValueError as exc:
                _malformed(str(exc))
        if pid in bindings:
            _malformed(f"duplicate property {pid}")
        code = r.u8()
        if code > max(K):
            _malformed(f"unknown kind code {code}")
        kind = K(code)
        shape = r.u8()
        if shape == 0:
            entries.append((pid, Scalar(kind)))
            bindings[pid] = _read_scalar(r, kind)
        elif shape == 1:
            entries.append((pid, Array(kind)))
            bindings[pid] = _read_array(r, kind)
        else:
            _malformed(f"shape code {shape}")
    if r.remaining:
        raise DecodeError(DecodeFailure.TrailingBytes, f"{r.remaining} bytes after last property")
    return Container(CatalogSpec(entries), bindings)
