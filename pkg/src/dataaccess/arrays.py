"""Multi-dimensional arrays: sub-array extraction, chunked reads, converting copies.

Arrays are stored as a flat row-major numpy buffer (last dimension
contiguous).  Same-kind copies move whole contiguous runs at once; the
``force_slow`` hook makes every copy go element by element instead, which
is what the fast path is benchmarked against.
"""

from __future__ import annotations

import math
from typing import Any, Iterable, Sequence

import numpy as np

from .convert import ConversionError, convert
from .kinds import NS_PER_SEC, ScalarKind, ScalarValue, TimeStamp, _check_payload

__all__ = [
    "BoundsError",
    "ArrayValue",
    "ChunkCursor",
    "subarray",
    "read_chunk",
    "copy_convert",
    "position",
    "locate",
    "DTYPES",
]

K = ScalarKind

TIMESTAMP_DTYPE = np.dtype([("seconds", "<u4"), ("nanoseconds", "<u4")])

DTYPES = {
    K.Int8: np.dtype("<i1"),
    K.Int16: np.dtype("<i2"),
    K.Int32: np.dtype("<i4"),
    K.Int64: np.dtype("<i8"),
    K.UInt8: np.dtype("<u1"),
    K.UInt16: np.dtype("<u2"),
    K.UInt32: np.dtype("<u4"),
    K.UInt64: np.dtype("<u8"),
    K.Float32: np.dtype("<f4"),
    K.Float64: np.dtype("<f8"),
    K.Bool: np.dtype("?"),
    K.Char: np.dtype("<u4"),
    K.Enum16: np.dtype("<u2"),
    K.TimeStamp: TIMESTAMP_DTYPE,
    K.Text: np.dtype(object),
}


class BoundsError(IndexError):
    pass


def position(dims: Sequence[int], idx: int) -> tuple[int, ...]:
    """Row-major multi-index of linear offset ``idx``."""
    pos = []
    for d in reversed(dims):
        idx, x = divmod(idx, d)
        pos.append(x)
    return tuple(reversed(pos))


def locate(dims: Sequence[int], pos: Sequence[int]) -> int:
    idx = 0
    for d, x in zip(dims, pos):
        idx = idx * d + x
    return idx


def _box(kind: ScalarKind, raw) -> ScalarValue:
    if kind.is_integer or kind is K.Enum16:
        return ScalarValue._make(kind, int(raw))
    if kind.is_float:
        return ScalarValue._make(kind, float(raw))
    if kind is K.Bool:
        return ScalarValue._make(kind, bool(raw))
    if kind is K.Char:
        return ScalarValue._make(kind, chr(raw))
    if kind is K.TimeStamp:
        return ScalarValue._make(kind, TimeStamp(int(raw[0]), int(raw[1])))
    return ScalarValue._make(kind, raw)


def _unbox(kind: ScalarKind, payload):
    if kind is K.Char:
        return ord(payload)
    return payload


def has_invalid_chars(buf: np.ndarray) -> bool:
    """True if a Char buffer holds surrogates or code points past U+10FFFF."""
    return bool(((buf > 0x10FFFF) | ((buf >= 0xD800) & (buf <= 0xDFFF))).any())


def _validate_buffer(kind: ScalarKind, buf: np.ndarray) -> None:
    if kind is K.Char:
        if has_invalid_chars(buf):
            raise ValueError("Char array holds a non-scalar code point")
    elif kind is K.TimeStamp:
        if buf.size and int(buf["nanoseconds"].max()) >= NS_PER_SEC:
            raise ValueError("TimeStamp nanoseconds must be < 10**9")
    elif kind is K.Text:
        for s in buf:
            _check_payload(K.Text, s)


class ArrayValue:
    """An immutable typed array of arbitrary rank.

    ``values`` is either a numpy array with the kind's storage dtype or an
    iterable of scalar payloads in row-major order.
    """

    __slots__ = ("kind", "dims", "data")

    kind: ScalarKind
    dims: tuple[int, ...]
    data: np.ndarray

    def __init__(self, kind: ScalarKind, dims: Sequence[int], values: Iterable[Any] | np.ndarray):
        kind = ScalarKind(kind)
        dims = tuple(int(d) for d in dims)
        if not dims:
            raise ValueError("rank must be >= 1")
        if any(d < 1 for d in dims):
            raise ValueError(f"extents must be >= 1, got {dims}")
        dtype = DTYPES[kind]
        if isinstance(values, np.ndarray):
            if values.dtype != dtype:
                raise TypeError(f"{kind.name} array needs dtype {dtype}, got {values.dtype}")
            buf = np.array(values.reshape(-1), dtype=dtype, copy=True)
            _validate_buffer(kind, buf)
        else:
            items = [_unbox(kind, _check_payload(kind, p)) for p in values]
            if kind is K.Text:
                buf = np.empty(len(items), dtype=object)
                buf[:] = items
            else:
                buf = np.array(items, dtype=dtype) if items else np.empty(0, dtype)
        if buf.size != math.prod(dims):
            raise ValueError(f"{buf.size} elements do not fill dims {dims}")
        buf.flags.writeable = False
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", buf)

    @classmethod
    def _make(cls, kind: ScalarKind, dims: tuple[int, ...], buf: np.ndarray) -> ArrayValue:
        buf.flags.writeable = False
        self = object.__new__(cls)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", buf)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("ArrayValue is immutable")

    def __reduce__(self):
        return (ArrayValue, (self.kind, self.dims, self.data))

    @property
    def rank(self) -> int:
        return len(self.dims)

    @property
    def count(self) -> int:
        return self.data.size

    def element(self, index: int) -> ScalarValue:
        """Element at linear row-major ``index`` as a tagged scalar."""
        if not 0 <= index < self.data.size:
            raise IndexError(f"index {index} out of range for {self.data.size} elements")
        return _box(self.kind, self.data[index])

    def __getitem__(self, pos: Sequence[int]) -> ScalarValue:
        if len(pos) != len(self.dims) or any(not 0 <= x < d for x, d in zip(pos, self.dims)):
            raise BoundsError(f"{tuple(pos)} out of range for dims {self.dims}")
        return _box(self.kind, self.data[locate(self.dims, pos)])

    def payloads(self) -> list:
        return [_box(self.kind, raw).payload for raw in self.data]

    def __eq__(self, other):
        if not isinstance(other, ArrayValue):
            return NotImplemented
        if self.kind is not other.kind or self.dims != other.dims:
            return False
        if self.kind is K.Text:
            return list(self.data) == list(other.data)
        return self.data.tobytes() == other.data.tobytes()

    __hash__ = None

    def __repr__(self):
        return f"ArrayValue({self.kind.name}, dims={self.dims})"


def _check_bounds(a: ArrayValue, offsets: Sequence[int], lengths: Sequence[int]) -> None:
    if len(offsets) != a.rank or len(lengths) != a.rank:
        raise BoundsError(f"offsets/lengths must have rank {a.rank}")
    for o, n, d in zip(offsets, lengths, a.dims):
        if n < 1 or o < 0 or o + n > d:
            raise BoundsError(
                f"sub-array offsets {tuple(offsets)} lengths {tuple(lengths)} "
                f"exceed dims {a.dims}")


def _copy_block(src: np.ndarray, dims: Sequence[int], offsets: Sequence[int],
                lengths: Sequence[int], out: np.ndarray, fast: bool) -> None:
    # recursive N-d copy; the innermost run is contiguous in both buffers
    rank = len(dims)
    sstride = [1] * rank
    dstride = [1] * rank
    for d in range(rank - 2, -1, -1):
        sstride[d] = sstride[d + 1] * dims[d + 1]
        dstride[d] = dstride[d + 1] * lengths[d + 1]
    run = lengths[-1]
    last_off = offsets[-1]

    def rec(d, sbase, dbase):
        if d == rank - 1:
            s0 = sbase + last_off
            if fast:
                out[dbase:dbase + run] = src[s0:s0 + run]
            else:
                for j in range(run):
                    out[dbase + j] = src[s0 + j]
            return
        for i in range(lengths[d]):
            rec(d + 1, sbase + (offsets[d] + i) * sstride[d], dbase + i * dstride[d])

    rec(0, 0, 0)


def subarray(a: ArrayValue, offsets: Sequence[int], lengths: Sequence[int],
             *, force_slow: bool = False) -> ArrayValue:
    """Copy out the block starting at ``offsets`` with extents ``lengths``."""
    _check_bounds(a, offsets, lengths)
    lengths = tuple(int(n) for n in lengths)
    out = np.empty(math.prod(lengths), dtype=a.data.dtype)
    _copy_block(a.data, a.dims, offsets, lengths, out, not force_slow)
    return ArrayValue._make(a.kind, lengths, out)


def copy_convert(src: ArrayValue, dst_kind: ScalarKind, *, force_slow: bool = False) -> ArrayValue:
    """Copy ``src`` converting every element to ``dst_kind``.

    Same-kind copies are a single block copy unless ``force_slow`` is set.
    Fails on the first bad element; the error carries its multi-index.
    """
    buf = src.data
    n = buf.size
    if dst_kind is src.kind:
        if not force_slow:
            return ArrayValue._make(src.kind, src.dims, buf.copy())
        out = np.empty(n, dtype=buf.dtype)
        for i in range(n):
            out[i] = buf[i]
        return ArrayValue._make(src.kind, src.dims, out)

    kind = src.kind
    out = np.empty(n, dtype=DTYPES[dst_kind])
    for i in range(n):
        try:
            v = convert(_box(kind, buf[i]), dst_kind)
        except ConversionError as exc:
            exc.index = position(src.dims, i)
            raise
        out[i] = _unbox(dst_kind, v.payload)
    return ArrayValue._make(dst_kind, src.dims, out)


class ChunkCursor:
    """Sequential reader over an array's row-major linearization.

    Chunks ignore dimension boundaries.  One cursor serves one reader.
    """

    __slots__ = ("source", "position")

    def __init__(self, source: ArrayValue, position: int = 0):
        if not 0 <= position <= source.count:
            raise ValueError(f"position {position} outside [0, {source.count}]")
        self.source = source
        self.position = position

    @property
    def remaining(self) -> int:
        return self.source.count - self.position

    def read(self, requested_len: int) -> np.ndarray:
        if requested_len < 1:
            raise ValueError("requested_len must be >= 1")
        start = self.position
        stop = min(start + requested_len, self.source.count)
        self.position = stop
        return self.source.data[start:stop]


def read_chunk(cursor: ChunkCursor, requested_len: int) -> np.ndarray:
    """Next ``min(requested_len, remaining)`` elements; empty once exhausted."""
    return cursor.read(requested_len)
