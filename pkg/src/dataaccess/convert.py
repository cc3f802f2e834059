"""Range-checked conversion among the 15 scalar kinds.

Every ordered kind pair is convertible in principle.  Conversion widens the
source to its canonical kind (see :func:`dataaccess.kinds.promote_kind`) and
dispatches on ``(canonical source, destination)``, so only 5 x 15 routines
exist instead of 15 x 15.

Policy:

* out-of-range values raise ``RangeError``; nothing is clamped
* float -> integer rounds half away from zero, then range-checks
* integer -> float is nearest-representable (ties to even)
* Float64 -> Float32 raises ``RangeError`` only if rounding overflows
* text parsing trims ASCII whitespace and must consume the whole remainder
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Any, Callable, Mapping

import numpy as np

from .kinds import (
    NS_PER_SEC,
    PROMOTE_PAYLOAD,
    TIMESTAMP_MAX_NS,
    U32_MAX,
    CanonicalKind,
    ScalarKind,
    ScalarValue,
    TimeStamp,
    f32,
    is_unicode_scalar,
    kind_bounds,
    promote_kind,
)

__all__ = [
    "ErrorClass",
    "ConversionError",
    "ConverterRegistry",
    "AuditReport",
    "UNSUPPORTED_PAIRS",
    "convert",
    "registry_lookup",
    "instantiation_audit",
    "default_registry",
    "format_float32",
    "parse_float32",
]

K = ScalarKind
C = CanonicalKind

Routine = Callable[[Any, ScalarKind], Any]


class ErrorClass(enum.Enum):
    RangeError = "RangeError"
    InvalidValue = "InvalidValue"
    ParseError = "ParseError"
    UnsupportedPair = "UnsupportedPair"


class ConversionError(ValueError):
    """A classified conversion failure.

    ``index`` is set by array copies (multi-index of the failing element)
    and ``property_id`` by container assignment.
    """

    def __init__(self, classification: ErrorClass, src_kind: ScalarKind | None = None,
                 dst_kind: ScalarKind | None = None, value: str | None = None):
        super().__init__(classification)
        self.classification = classification
        self.src_kind = src_kind
        self.dst_kind = dst_kind
        self.value = value
        self.index: tuple[int, ...] | None = None
        self.property_id: Any = None

    def __str__(self):
        msg = self.classification.value
        if self.src_kind is not None:
            msg += f": {self.value} {self.src_kind.name} -> {self.dst_kind.name}"
        if self.index is not None:
            msg += f" at index {self.index}"
        if self.property_id is not None:
            msg += f" in property {self.property_id}"
        return msg


def _fail(classification: ErrorClass):
    raise ConversionError(classification)


UNSUPPORTED_PAIRS = frozenset(
    pair
    for k in (K.Bool, K.Char, K.Enum16)
    for pair in ((K.TimeStamp, k), (k, K.TimeStamp))
)


# ---------------------------------------------------------------- rounding

_F32_MAX = float(np.finfo(np.float32).max)
# smallest magnitude that rounds to infinity in binary32
_F32_OVERFLOW = 2.0**128 - 2.0**103


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _round_half_away(x: float) -> int:
    t = math.trunc(x)
    frac = x - t  # exact for finite doubles
    if frac >= 0.5:
        t += 1
    elif frac <= -0.5:
        t -= 1
    return t


def _next_f32(r: float, toward: float) -> float:
    with np.errstate(over="ignore"):
        return float(np.nextafter(np.float32(r), np.float32(math.copysign(math.inf, toward - r))))


def _narrow_f32(d: float, exact_sign: Callable[[], int]) -> float:
    """Round to binary32 a value whose nearest double is ``d``.

    ``exact_sign()`` returns the sign of (true value - d); it is consulted
    only when ``d`` sits exactly on a binary32 rounding boundary, the one
    case where double rounding can differ from direct rounding.
    """
    if abs(d) == _F32_OVERFLOW:
        s = exact_sign() * _sign(d)
        if s < 0:
            return math.copysign(_F32_MAX, d)
        _fail(ErrorClass.RangeError)
    try:
        r = f32(d)
    except OverflowError:
        _fail(ErrorClass.RangeError)
    if r == d or d != d:
        return r
    other = _next_f32(r, d)
    if (r + other) / 2 != d:
        return r
    s = exact_sign()
    if s == 0:
        return r
    lo, hi = (r, other) if r < d else (other, r)
    return hi if s > 0 else lo


def _int_to_f32(n: int) -> float:
    d = float(n)
    return _narrow_f32(d, lambda: _sign(n - int(d)))


def _ratio_to_f32(num: int, den: int) -> float:
    d = num / den
    return _narrow_f32(d, lambda: _sign(Fraction(num, den) - Fraction(d)))


_FLOAT_RE = re.compile(
    r"[+-]?(?:(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?"
    r"|(?i:inf|infinity|nan))"
)
_INT_RE = re.compile(r"[+-]?[0-9]+")
_TS_RE = re.compile(r"([0-9]+)(?:\.([0-9]{1,9}))?")
_WS = " \t\n\r\x0b\x0c"


def _parse_float(text: str) -> float:
    t = text.strip(_WS)
    if _FLOAT_RE.fullmatch(t) is None:
        _fail(ErrorClass.ParseError)
    d = float(t)
    if d in (math.inf, -math.inf) and t.lstrip("+-")[:1] not in "iI":
        _fail(ErrorClass.RangeError)
    return d


def parse_float32(text: str) -> float:
    """Parse decimal text to the correctly rounded binary32 value."""
    d = _parse_float(text)
    if d != d or d in (math.inf, -math.inf):
        return f32(d)
    t = text.strip(_WS)
    return _narrow_f32(d, lambda: _sign(Fraction(t) - Fraction(d)))


def format_float32(x: float) -> str:
    """Shortest decimal string that parses back to the binary32 ``x``."""
    return str(np.float32(x))


def _format_float64(x: float) -> str:
    return repr(x)


# ---------------------------------------------------------------- routines
#
# Each factory call returns a fresh function object, so the registry's
# instance count is the number of table entries.


def _int_to_int(dst: ScalarKind) -> Routine:
    lo, hi = kind_bounds(dst)

    def routine(x, src):
        if lo <= x <= hi:
            return x
        _fail(ErrorClass.RangeError)
    return routine


def _int_to_bool() -> Routine:
    def routine(x, src):
        if x == 0 or x == 1:
            return x == 1
        _fail(ErrorClass.RangeError)
    return routine


def _int_to_char() -> Routine:
    def routine(x, src):
        if is_unicode_scalar(x):
            return chr(x)
        _fail(ErrorClass.RangeError)
    return routine


def _int_to_timestamp() -> Routine:
    def routine(x, src):
        if 0 <= x <= TIMESTAMP_MAX_NS:
            return TimeStamp(*divmod(x, NS_PER_SEC))
        _fail(ErrorClass.RangeError)
    return routine


def _int_to_float64() -> Routine:
    def routine(x, src):
        return float(x)
    return routine


def _int_to_float32() -> Routine:
    def routine(x, src):
        return _int_to_f32(x)
    return routine


def _int_to_text() -> Routine:
    def routine(x, src):
        if src is K.Bool:
            return "true" if x else "false"
        if src is K.Char:
            return chr(x)
        return str(x)
    return routine


def _float_to_int(dst: ScalarKind) -> Routine:
    inner = {K.Bool: _int_to_bool, K.Char: _int_to_char}.get(dst)
    check = inner() if inner else _int_to_int(dst)

    def routine(x, src):
        if x - x != 0.0:  # nan or inf
            _fail(ErrorClass.InvalidValue)
        return check(_round_half_away(x), src)
    return routine


def _float_to_float32() -> Routine:
    def routine(x, src):
        try:
            return f32(x)
        except OverflowError:
            _fail(ErrorClass.RangeError)
    return routine


def _identity() -> Routine:
    def routine(x, src):
        return x
    return routine


def _float_to_timestamp() -> Routine:
    def routine(x, src):
        if x - x != 0.0:
            _fail(ErrorClass.InvalidValue)
        if not -1.0 < x < 2.0**33:
            _fail(ErrorClass.RangeError)
        num, den = x.as_integer_ratio()
        q, r = divmod(abs(num) * NS_PER_SEC, den)
        if 2 * r >= den:
            q += 1
        if num < 0 and q:
            _fail(ErrorClass.RangeError)
        if q > TIMESTAMP_MAX_NS:
            _fail(ErrorClass.RangeError)
        return TimeStamp(*divmod(q, NS_PER_SEC))
    return routine


def _float_to_text() -> Routine:
    def routine(x, src):
        if src is K.Float32:
            return format_float32(x)
        return _format_float64(x)
    return routine


def _text_to_int(dst: ScalarKind) -> Routine:
    lo, hi = kind_bounds(dst)
    match = _INT_RE.fullmatch

    def routine(x, src):
        t = x.strip(_WS)
        if match(t) is None:
            _fail(ErrorClass.ParseError)
        n = int(t)
        if lo <= n <= hi:
            return n
        _fail(ErrorClass.RangeError)
    return routine


def _text_to_float64() -> Routine:
    def routine(x, src):
        return _parse_float(x)
    return routine


def _text_to_float32() -> Routine:
    def routine(x, src):
        return parse_float32(x)
    return routine


def _text_to_bool() -> Routine:
    def routine(x, src):
        t = x.strip(_WS).lower()
        if t == "true":
            return True
        if t == "false":
            return False
        _fail(ErrorClass.ParseError)
    return routine


def _text_to_char() -> Routine:
    def routine(x, src):
        # a lone whitespace character is itself a valid Char
        t = x if len(x) == 1 else x.strip(_WS)
        if len(t) != 1:
            _fail(ErrorClass.ParseError)
        return t
    return routine


def _text_to_timestamp() -> Routine:
    def routine(x, src):
        m = _TS_RE.fullmatch(x.strip(_WS))
        if m is None:
            _fail(ErrorClass.ParseError)
        sec = int(m.group(1))
        if sec > U32_MAX:
            _fail(ErrorClass.RangeError)
        frac = m.group(2) or ""
        return TimeStamp(sec, int(frac.ljust(9, "0")) if frac else 0)
    return routine


def _timestamp_to_int(dst: ScalarKind) -> Routine:
    lo, hi = kind_bounds(dst)

    def routine(x, src):
        n = x.seconds * NS_PER_SEC + x.nanoseconds
        if lo <= n <= hi:
            return n
        _fail(ErrorClass.RangeError)
    return routine


def _timestamp_to_float64() -> Routine:
    def routine(x, src):
        return (x.seconds * NS_PER_SEC + x.nanoseconds) / NS_PER_SEC
    return routine


def _timestamp_to_float32() -> Routine:
    def routine(x, src):
        return _ratio_to_f32(x.seconds * NS_PER_SEC + x.nanoseconds, NS_PER_SEC)
    return routine


def _timestamp_to_text() -> Routine:
    def routine(x, src):
        return f"{x.seconds}.{x.nanoseconds:09d}"
    return routine


def _unsupported() -> Routine:
    def routine(x, src):
        _fail(ErrorClass.UnsupportedPair)
    return routine


_INTEGER_DSTS = (K.Int8, K.Int16, K.Int32, K.Int64, K.UInt8, K.UInt16, K.UInt32, K.UInt64)


def _integer_source_row() -> dict[ScalarKind, Routine]:
    row = {k: _int_to_int(k) for k in _INTEGER_DSTS}
    row.update({
        K.Enum16: _int_to_int(K.Enum16),
        K.Float32: _int_to_float32(),
        K.Float64: _int_to_float64(),
        K.Bool: _int_to_bool(),
        K.Char: _int_to_char(),
        K.TimeStamp: _int_to_timestamp(),
        K.Text: _int_to_text(),
    })
    return row


def _build_default_routines() -> dict[tuple[CanonicalKind, ScalarKind], Routine]:
    rows: dict[CanonicalKind, dict[ScalarKind, Routine]] = {
        C.CInt64: _integer_source_row(),
        C.CUInt64: _integer_source_row(),
    }

    row = {k: _float_to_int(k) for k in _INTEGER_DSTS + (K.Bool, K.Char, K.Enum16)}
    row.update({
        K.Float32: _float_to_float32(),
        K.Float64: _identity(),
        K.TimeStamp: _float_to_timestamp(),
        K.Text: _float_to_text(),
    })
    rows[C.CFloat64] = row

    row = {k: _text_to_int(k) for k in _INTEGER_DSTS + (K.Enum16,)}
    row.update({
        K.Float32: _text_to_float32(),
        K.Float64: _text_to_float64(),
        K.Bool: _text_to_bool(),
        K.Char: _text_to_char(),
        K.TimeStamp: _text_to_timestamp(),
        K.Text: _identity(),
    })
    rows[C.CText] = row

    row = {k: _timestamp_to_int(k) for k in _INTEGER_DSTS}
    row.update({
        K.Float32: _timestamp_to_float32(),
        K.Float64: _timestamp_to_float64(),
        K.Bool: _unsupported(),
        K.Char: _unsupported(),
        K.Enum16: _unsupported(),
        K.TimeStamp: _identity(),
        K.Text: _timestamp_to_text(),
    })
    rows[C.CTimeStamp] = row

    return {(c, k): fn for c, row in rows.items() for k, fn in row.items()}


# ---------------------------------------------------------------- registry


class ConverterRegistry:
    """Immutable table of conversion routines keyed by (canonical, destination)."""

    __slots__ = ("_table", "_promotion", "_kinds", "_canonicals", "_instance_count")

    def __init__(self, routines: Mapping[tuple[Any, Any], Routine],
                 promotion: Mapping[Any, Any]):
        kinds = tuple(promotion)
        canonicals = tuple(dict.fromkeys(promotion.values()))
        missing = [(c, k) for c in canonicals for k in kinds if (c, k) not in routines]
        if missing:
            raise ValueError(f"registry is not total; missing {missing}")
        extra = set(routines) - {(c, k) for c in canonicals for k in kinds}
        if extra:
            raise ValueError(f"registry has keys outside the universe: {sorted(map(str, extra))}")
        table = dict(routines)
        object.__setattr__(self, "_table", MappingProxyType(table))
        object.__setattr__(self, "_promotion", MappingProxyType(dict(promotion)))
        object.__setattr__(self, "_kinds", kinds)
        object.__setattr__(self, "_canonicals", canonicals)
        object.__setattr__(self, "_instance_count", len({id(fn) for fn in table.values()}))

    def __setattr__(self, name, value):
        raise AttributeError("ConverterRegistry is immutable")

    @property
    def table(self) -> Mapping[tuple[Any, Any], Routine]:
        return self._table

    @property
    def kinds(self) -> tuple:
        return self._kinds

    @property
    def canonicals(self) -> tuple:
        return self._canonicals

    @property
    def instance_count(self) -> int:
        return self._instance_count

    def lookup(self, src_canonical, dst) -> Routine:
        return self._table[(src_canonical, dst)]


_PROMOTION_MAP = {k: promote_kind(k) for k in ScalarKind}
_DEFAULT = ConverterRegistry(_build_default_routines(), _PROMOTION_MAP)


def default_registry() -> ConverterRegistry:
    return _DEFAULT


def registry_lookup(src_canonical: CanonicalKind, dst: ScalarKind) -> Routine:
    return _DEFAULT.lookup(src_canonical, dst)


def _render(v: ScalarValue) -> str:
    return repr(v.payload)


def convert(v: ScalarValue, dst: ScalarKind, registry: ConverterRegistry | None = None) -> ScalarValue:
    """Convert ``v`` to kind ``dst``; raise :class:`ConversionError` on failure."""
    src = v.kind
    if src is dst:
        return v
    if (src, dst) in UNSUPPORTED_PAIRS:
        raise ConversionError(ErrorClass.UnsupportedPair, src, dst, _render(v))
    table = _DEFAULT._table if registry is None else registry._table
    widen = PROMOTE_PAYLOAD[src]
    x = v.payload if widen is None else widen(v.payload)
    try:
        payload = table[(_PROMOTION_MAP[src], dst)](x, src)
    except ConversionError as exc:
        exc.src_kind, exc.dst_kind, exc.value = src, dst, _render(v)
        raise
    return ScalarValue._make(dst, payload)


@dataclass(frozen=True)
class AuditReport:
    full_matrix: int
    registry: int
    reduction_percent: float


def instantiation_audit(registry: ConverterRegistry | None = None) -> AuditReport:
    """Count converter routines against the naive all-pairs matrix."""
    reg = _DEFAULT if registry is None else registry
    full = len(reg.kinds) ** 2
    count = reg.instance_count
    return AuditReport(full, count, round(100.0 * (1 - count / full), 1))
