"""Scalar kinds, tagged scalar values and lossless canonical promotion."""

from __future__ import annotations

import enum
import math
import struct
from typing import Any, NamedTuple

__all__ = [
    "ScalarKind",
    "CanonicalKind",
    "TimeStamp",
    "ScalarValue",
    "promote_kind",
    "promote_value",
    "canonical_domain",
    "kind_bounds",
    "is_unicode_scalar",
    "f32",
    "NS_PER_SEC",
    "TIMESTAMP_MAX_NS",
]

NS_PER_SEC = 1_000_000_000
U32_MAX = 0xFFFF_FFFF
TIMESTAMP_MAX_NS = U32_MAX * NS_PER_SEC + NS_PER_SEC - 1


class ScalarKind(enum.IntEnum):
    """The closed universe of 15 scalar kinds.

    The integer values are the wire codes used by :mod:`dataaccess.codec`.
    """

    Int8 = 0
    Int16 = 1
    Int32 = 2
    Int64 = 3
    UInt8 = 4
    UInt16 = 5
    UInt32 = 6
    UInt64 = 7
    Float32 = 8
    Float64 = 9
    Bool = 10
    Char = 11
    Enum16 = 12
    TimeStamp = 13
    Text = 14

    @property
    def is_integer(self) -> bool:
        return self <= ScalarKind.UInt64

    @property
    def is_float(self) -> bool:
        return self in (ScalarKind.Float32, ScalarKind.Float64)

    @property
    def is_numeric(self) -> bool:
        return self <= ScalarKind.Float64


class CanonicalKind(enum.Enum):
    CInt64 = "CInt64"
    CUInt64 = "CUInt64"
    CFloat64 = "CFloat64"
    CText = "CText"
    CTimeStamp = "CTimeStamp"


class TimeStamp(NamedTuple):
    seconds: int
    nanoseconds: int

    @property
    def total_ns(self) -> int:
        return self.seconds * NS_PER_SEC + self.nanoseconds

    @classmethod
    def from_ns(cls, total: int) -> TimeStamp:
        return cls(*divmod(total, NS_PER_SEC))

    def __str__(self) -> str:
        return f"{self.seconds}.{self.nanoseconds:09d}"


_K = ScalarKind

_INT_BOUNDS = {
    _K.Int8: (-(1 << 7), (1 << 7) - 1),
    _K.Int16: (-(1 << 15), (1 << 15) - 1),
    _K.Int32: (-(1 << 31), (1 << 31) - 1),
    _K.Int64: (-(1 << 63), (1 << 63) - 1),
    _K.UInt8: (0, (1 << 8) - 1),
    _K.UInt16: (0, (1 << 16) - 1),
    _K.UInt32: (0, (1 << 32) - 1),
    _K.UInt64: (0, (1 << 64) - 1),
    _K.Bool: (0, 1),
    _K.Char: (0, 0x10FFFF),
    _K.Enum16: (0, 0xFFFF),
    _K.TimeStamp: (0, TIMESTAMP_MAX_NS),
}


def kind_bounds(kind: ScalarKind) -> tuple[int, int]:
    """Integer domain ``(lo, hi)`` of an integer-valued kind.

    Bool, Char and Enum16 report the domain of their promoted image;
    TimeStamp reports total nanoseconds.
    """
    try:
        return _INT_BOUNDS[kind]
    except KeyError:
        raise ValueError(f"{kind.name} has no integer domain") from None


def is_unicode_scalar(cp: int) -> bool:
    return 0 <= cp <= 0x10FFFF and not 0xD800 <= cp <= 0xDFFF


_F32 = struct.Struct("<f")


def f32(x: float) -> float:
    """Round a float to the nearest binary32 value (raises OverflowError)."""
    return _F32.unpack(_F32.pack(x))[0]


def _bits(x: float) -> bytes:
    return struct.pack("<d", x)


_PROMOTION = {
    _K.Int8: CanonicalKind.CInt64,
    _K.Int16: CanonicalKind.CInt64,
    _K.Int32: CanonicalKind.CInt64,
    _K.Int64: CanonicalKind.CInt64,
    _K.UInt8: CanonicalKind.CUInt64,
    _K.UInt16: CanonicalKind.CUInt64,
    _K.UInt32: CanonicalKind.CUInt64,
    _K.UInt64: CanonicalKind.CUInt64,
    _K.Bool: CanonicalKind.CUInt64,
    _K.Char: CanonicalKind.CUInt64,
    _K.Enum16: CanonicalKind.CUInt64,
    _K.Float32: CanonicalKind.CFloat64,
    _K.Float64: CanonicalKind.CFloat64,
    _K.Text: CanonicalKind.CText,
    _K.TimeStamp: CanonicalKind.CTimeStamp,
}

_DOMAIN = {
    CanonicalKind.CInt64: _K.Int64,
    CanonicalKind.CUInt64: _K.UInt64,
    CanonicalKind.CFloat64: _K.Float64,
    CanonicalKind.CText: _K.Text,
    CanonicalKind.CTimeStamp: _K.TimeStamp,
}


def promote_kind(kind: ScalarKind) -> CanonicalKind:
    return _PROMOTION[kind]


def canonical_domain(canonical: CanonicalKind) -> ScalarKind:
    """The scalar kind whose value domain equals the canonical kind's."""
    return _DOMAIN[canonical]


def _check_payload(kind: ScalarKind, payload: Any) -> Any:
    """Validate ``payload`` for ``kind`` and return its normalized form."""
    if kind.is_integer or kind is _K.Enum16:
        if type(payload) is not int:
            raise TypeError(f"{kind.name} payload must be int, got {type(payload).__name__}")
        lo, hi = _INT_BOUNDS[kind]
        if not lo <= payload <= hi:
            raise ValueError(f"{payload} outside {kind.name} domain [{lo}, {hi}]")
        return payload
    if kind is _K.Float64:
        if type(payload) is not float:
            raise TypeError(f"Float64 payload must be float, got {type(payload).__name__}")
        return payload
    if kind is _K.Float32:
        if type(payload) is not float:
            raise TypeError(f"Float32 payload must be float, got {type(payload).__name__}")
        try:
            narrowed = f32(payload)
        except OverflowError:
            raise ValueError(f"{payload!r} is not a binary32 value") from None
        if math.isnan(payload):
            return narrowed
        if _bits(narrowed) != _bits(payload):
            raise ValueError(f"{payload!r} is not a binary32 value; use f32() to round")
        return payload
    if kind is _K.Bool:
        if type(payload) is not bool:
            raise TypeError(f"Bool payload must be bool, got {type(payload).__name__}")
        return payload
    if kind is _K.Char:
        if type(payload) is not str or len(payload) != 1:
            raise TypeError("Char payload must be a one-character str")
        if not is_unicode_scalar(ord(payload)):
            raise ValueError(f"U+{ord(payload):04X} is not a unicode scalar value")
        return payload
    if kind is _K.TimeStamp:
        if not isinstance(payload, tuple) or len(payload) != 2:
            raise TypeError("TimeStamp payload must be (seconds, nanoseconds)")
        sec, ns = payload
        if type(sec) is not int or type(ns) is not int:
            raise TypeError("TimeStamp fields must be int")
        if not 0 <= sec <= U32_MAX:
            raise ValueError(f"seconds {sec} outside u32")
        if not 0 <= ns < NS_PER_SEC:
            raise ValueError(f"nanoseconds {ns} must be < 10**9")
        return TimeStamp(sec, ns)
    if kind is _K.Text:
        if type(payload) is not str:
            raise TypeError(f"Text payload must be str, got {type(payload).__name__}")
        payload.encode("utf-8")  # rejects lone surrogates
        return payload
    raise TypeError(f"unknown kind {kind!r}")


class ScalarValue:
    """An immutable (kind, payload) pair whose payload always matches kind.

    Float payloads compare bitwise, so NaNs with equal bits are equal and
    ``0.0 != -0.0``.
    """

    __slots__ = ("kind", "payload")

    kind: ScalarKind
    payload: Any

    def __init__(self, kind: ScalarKind, payload: Any) -> None:
        kind = ScalarKind(kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "payload", _check_payload(kind, payload))

    @classmethod
    def _make(cls, kind: ScalarKind, payload: Any) -> ScalarValue:
        # trusted constructor: payload already validated by the caller
        self = object.__new__(cls)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "payload", payload)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("ScalarValue is immutable")

    def __delattr__(self, name):
        raise AttributeError("ScalarValue is immutable")

    def __reduce__(self):
        return (ScalarValue, (self.kind, self.payload))

    def _key(self):
        if self.kind.is_float:
            return _bits(self.payload)
        return self.payload

    def __eq__(self, other):
        if not isinstance(other, ScalarValue):
            return NotImplemented
        return self.kind is other.kind and self._key() == other._key()

    def __hash__(self):
        return hash((self.kind, self._key()))

    def __repr__(self):
        return f"{self.kind.name}({self.payload!r})"

    # single-element view shared with ArrayValue for dynamic access
    @property
    def count(self) -> int:
        return 1

    def element(self, index: int) -> ScalarValue:
        if index != 0:
            raise IndexError(f"index {index} out of range for scalar")
        return self


# widening applied to payloads on promotion; None means unchanged
PROMOTE_PAYLOAD: dict[ScalarKind, Any] = dict.fromkeys(ScalarKind)
PROMOTE_PAYLOAD[_K.Bool] = int
PROMOTE_PAYLOAD[_K.Char] = ord


def promote_value(v: ScalarValue) -> ScalarValue:
    """Widen ``v`` losslessly into the domain of its canonical kind."""
    kind = v.kind
    widen = PROMOTE_PAYLOAD[kind]
    payload = v.payload if widen is None else widen(v.payload)
    return ScalarValue._make(_DOMAIN[_PROMOTION[kind]], payload)
