"""Exact-arithmetic conversion oracle.

Independent of the library's conversion code: every numeric result is
computed with ``Fraction`` and rounded to binary formats with integer
arithmetic; text is scanned character by character.  The outcome of a
conversion is one of

* ``("ok", payload)``
* ``("float-text", value, kind)``  float -> Text: any shortest round-trip string
* ``("err", classification_name)``
"""

from __future__ import annotations

import math
import struct
from fractions import Fraction

from dataaccess.kinds import ScalarKind as K

NS = 10**9
WS = " \t\n\r\x0b\x0c"

BOUNDS = {
    K.Int8: (-128, 127),
    K.Int16: (-32768, 32767),
    K.Int32: (-2147483648, 2147483647),
    K.Int64: (-9223372036854775808, 9223372036854775807),
    K.UInt8: (0, 255),
    K.UInt16: (0, 65535),
    K.UInt32: (0, 4294967295),
    K.UInt64: (0, 18446744073709551615),
    K.Enum16: (0, 65535),
    K.Bool: (0, 1),
    K.Char: (0, 0x10FFFF),
}
TS_MAX_NS = 4294967295 * NS + NS - 1

UNSUPPORTED = {
    (K.TimeStamp, K.Bool), (K.TimeStamp, K.Char), (K.TimeStamp, K.Enum16),
    (K.Bool, K.TimeStamp), (K.Char, K.TimeStamp), (K.Enum16, K.TimeStamp),
}

FORMATS = {K.Float32: (24, -126, 127), K.Float64: (53, -1022, 1023)}


class Overflow(Exception):
    pass


def round_binary(q: Fraction, kind: K) -> Fraction:
    """Nearest (ties-to-even) value of the binary format; raises Overflow."""
    p, emin, emax = FORMATS[kind]
    if q == 0:
        return Fraction(0)
    sign = -1 if q < 0 else 1
    a = abs(q)
    e = a.numerator.bit_length() - a.denominator.bit_length()
    while Fraction(2) ** e > a:
        e -= 1
    while Fraction(2) ** (e + 1) <= a:
        e += 1
    e = max(e, emin)
    ulp = Fraction(2) ** (e - (p - 1))
    m = a / ulp
    n = m.numerator // m.denominator
    r = m - n
    if r > Fraction(1, 2) or (r == Fraction(1, 2) and n % 2 == 1):
        n += 1
    result = n * ulp
    if result >= Fraction(2) ** (emax + 1):
        raise Overflow
    return sign * result


def to_float(q: Fraction, negative_zero: bool = False) -> float:
    if q == 0:
        return -0.0 if negative_zero else 0.0
    return q.numerator / q.denominator  # exact: q is representable


def round_half_away(q: Fraction) -> int:
    a = abs(q)
    n = a.numerator // a.denominator
    if a - n >= Fraction(1, 2):
        n += 1
    return -n if q < 0 else n


# ---------------------------------------------------------------- scanners


def _digits(s: str) -> bool:
    return len(s) > 0 and all("0" <= ch <= "9" for ch in s)


def scan_int(t: str):
    """Integer from ``[+-]?digits``, or None."""
    body = t[1:] if t[:1] in ("+", "-") else t
    if not _digits(body):
        return None
    n = 0
    for ch in body:
        n = n * 10 + (ord(ch) - 48)
    return -n if t[:1] == "-" else n


def scan_float(t: str):
    """``("num", Fraction, negative)``, ``("inf", sign)``, ``("nan",)`` or None."""
    neg = t[:1] == "-"
    body = t[1:] if t[:1] in ("+", "-") else t
    low = body.lower()
    if low in ("inf", "infinity"):
        return ("inf", -1 if neg else 1)
    if low == "nan":
        return ("nan",)
    mant, exp = body, "0"
    for marker in ("e", "E"):
        if marker in body:
            mant, exp = body.split(marker, 1)
            break
    if exp[:1] in ("+", "-"):
        exp_digits = exp[1:]
    else:
        exp_digits = exp
    if not _digits(exp_digits):
        return None
    if mant.count(".") > 1:
        return None
    whole, _, frac = mant.partition(".")
    if not (whole == "" or _digits(whole)) or not (frac == "" or _digits(frac)):
        return None
    if whole == "" and frac == "":
        return None
    e = scan_int(exp)
    digits = (whole + frac).lstrip("0") or "0"
    e -= len(frac)
    n = scan_int(digits)
    if n == 0:
        return ("num", Fraction(0), neg)
    # bound huge exponents before building the fraction
    mag = len(digits) + e
    if mag > 400:
        return ("num", "overflow", neg)
    if mag < -400:
        return ("num", Fraction(0), neg)
    q = Fraction(n) * Fraction(10) ** e
    return ("num", -q if neg else q, neg)


# ---------------------------------------------------------------- oracle


def _exact(kind: K, payload):
    """Numeric meaning of a payload: int, Fraction, or ("nan"/"inf", sign)."""
    if kind is K.Bool:
        return int(payload)
    if kind is K.Char:
        return ord(payload)
    if kind in BOUNDS:
        return payload
    if kind in FORMATS:
        if payload != payload:
            return ("nan", 0)
        if payload in (math.inf, -math.inf):
            return ("inf", 1 if payload > 0 else -1)
        return Fraction(payload)
    raise AssertionError(kind)


def _int_dst(n: int, dst: K):
    lo, hi = BOUNDS[dst]
    if not lo <= n <= hi:
        return ("err", "RangeError")
    if dst is K.Bool:
        return ("ok", n == 1)
    if dst is K.Char:
        if 0xD800 <= n <= 0xDFFF:
            return ("err", "RangeError")
        return ("ok", chr(n))
    return ("ok", n)


def _float_dst(q, dst: K, negative_zero=False):
    if isinstance(q, tuple):
        if q[0] == "nan":
            return ("ok", math.nan)
        return ("ok", math.inf if q[1] > 0 else -math.inf)
    try:
        r = round_binary(Fraction(q), dst)
    except Overflow:
        return ("err", "RangeError")
    neg_zero = negative_zero or (r == 0 and q < 0)
    return ("ok", to_float(r, neg_zero))


def _ts_from_ns(n: int):
    if not 0 <= n <= TS_MAX_NS:
        return ("err", "RangeError")
    return ("ok", (n // NS, n % NS))


def _text(src: K, payload):
    if src is K.Bool:
        return "true" if payload else "false"
    if src is K.Char:
        return payload
    if src is K.TimeStamp:
        s, ns = payload
        return str(s) + "." + str(ns).rjust(9, "0")
    return str(payload)


def oracle(src: K, payload, dst: K):
    if src is dst:
        return ("ok", payload)
    if (src, dst) in UNSUPPORTED:
        return ("err", "UnsupportedPair")

    if dst is K.Text:
        if src in FORMATS:
            return ("float-text", payload, src)
        return ("ok", _text(src, payload))

    if src is K.Text:
        return _from_text(payload, dst)

    if src is K.TimeStamp:
        total = payload[0] * NS + payload[1]
        if dst in FORMATS:
            return _float_dst(Fraction(total, NS), dst)
        return _int_dst(total, dst)

    x = _exact(src, payload)
    if dst in FORMATS:
        negz = src in FORMATS and x == 0 and math.copysign(1.0, payload) < 0
        return _float_dst(x, dst, negz)
    if isinstance(x, tuple):
        return ("err", "InvalidValue")
    if dst is K.TimeStamp:
        if isinstance(x, Fraction):
            return _ts_from_ns(round_half_away(x * NS))
        return _ts_from_ns(x)
    if isinstance(x, Fraction):
        x = round_half_away(x)
    return _int_dst(x, dst)


def _from_text(s: str, dst: K):
    t = s.strip(WS)
    if dst is K.Char:
        t = s if len(s) == 1 else t
        return ("ok", t) if len(t) == 1 else ("err", "ParseError")
    if dst is K.Bool:
        low = t.lower()
        if low == "true":
            return ("ok", True)
        if low == "false":
            return ("ok", False)
        return ("err", "ParseError")
    if dst in BOUNDS:
        n = scan_int(t)
        return ("err", "ParseError") if n is None else _int_dst(n, dst)
    if dst in FORMATS:
        r = scan_float(t)
        if r is None:
            return ("err", "ParseError")
        if r[0] == "nan":
            return ("ok", math.nan)
        if r[0] == "inf":
            return ("ok", math.inf * r[1])
        if r[1] == "overflow":
            return ("err", "RangeError")
        return _float_dst(r[1], dst, negative_zero=r[2])
    if dst is K.TimeStamp:
        whole, dot, frac = t.partition(".")
        if not _digits(whole) or (dot and not (_digits(frac) and len(frac) <= 9)):
            return ("err", "ParseError")
        sec = scan_int(whole)
        if sec > 4294967295:
            return ("err", "RangeError")
        return ("ok", (sec, scan_int(frac.ljust(9, "0")) if dot else 0))
    raise AssertionError(dst)


# ---------------------------------------------------------------- float text


def significant_digits(text: str) -> int:
    body = text.lstrip("+-").lower()
    mant = body.split("e", 1)[0]
    digits = mant.replace(".", "").lstrip("0").rstrip("0")
    return max(len(digits), 1)


def _parses_to(text: str, value: float, kind: K) -> bool:
    r = scan_float(text.strip(WS))
    if r is None:
        return False
    if r[0] == "nan":
        return value != value
    if r[0] == "inf":
        return value == math.inf * r[1]
    if r[1] == "overflow" or value != value or value in (math.inf, -math.inf):
        return False
    try:
        q = round_binary(r[1], kind)
    except Overflow:
        return False
    got = to_float(q, r[2] or (q == 0 and r[1] < 0))
    return struct.pack("<d", got) == struct.pack("<d", value)


def shortest_digits(value: float, kind: K) -> int:
    """Fewest significant decimal digits of any string that rounds to ``value``."""
    if value != value or value in (math.inf, -math.inf) or value == 0:
        return 1
    for p in range(1, 18):
        base = Fraction(f"{value:.{p - 1}e}")
        exp10 = int(f"{value:.{p - 1}e}".split("e")[1]) - (p - 1)
        step = Fraction(10) ** exp10
        for cand in (base - step, base, base + step):
            r = cand
            try:
                if to_float(round_binary(r, kind), value < 0) == value:
                    return p
            except Overflow:
                pass
    raise AssertionError(value)


def float_text_ok(text: str, value: float, kind: K) -> bool:
    if not _parses_to(text, value, kind):
        return False
    if value != value or value in (math.inf, -math.inf):
        return True
    return significant_digits(text) <= shortest_digits(value, kind)
