"""The four benchmark experiments.

Each experiment checks its body's result before any timing is trusted and
returns :class:`BenchRow` records (plus a fitted model or ratio summary).
"""

from __future__ import annotations

import math
import random
import string
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..arrays import ArrayValue, ChunkCursor, copy_convert, read_chunk
from ..catalog import Adaptor, Array, CatalogSpec, Container, Scalar, WellKnown, assign, get_element_dyn, \
    standard_spec, traverse
from ..convert import UNSUPPORTED_PAIRS, ConversionError, convert
from ..kinds import ScalarKind, ScalarValue, f32
from .fit import CostFit, fit_chunk_costs
from .harness import BenchConfig, BenchRow, ConfigurationError, InvariantViolation, measure

__all__ = [
    "DEFAULT_SIZES",
    "pair_category",
    "bench_pairs",
    "bench_chunks",
    "bench_dispatch",
    "bench_fastpath",
    "ChunkResult",
    "DispatchResult",
    "FastPathResult",
    "SyntheticTimer",
]

K = ScalarKind

DEFAULT_SIZES = tuple(2**p for p in range(6, 21))

_SIGNED = {K.Int8, K.Int16, K.Int32, K.Int64}
_UNSIGNED = {K.UInt8, K.UInt16, K.UInt32, K.UInt64}


def pair_category(src: ScalarKind, dst: ScalarKind) -> list[str]:
    """Flags used by the ratio summaries."""
    flags = []
    if src is dst:
        flags.append("identity")
    elif src.is_numeric and dst.is_numeric:
        flags.append("numeric")
    elif (src is K.Text and dst.is_numeric) or (dst is K.Text and src.is_numeric):
        flags.append("string")
    if (src in _SIGNED and dst in _UNSIGNED) or (src in _UNSIGNED and dst in _SIGNED):
        flags.append("mixed-sign")
    elif src in _SIGNED | _UNSIGNED and dst in _SIGNED | _UNSIGNED and src is not dst:
        flags.append("same-sign")
    if (src, dst) in UNSUPPORTED_PAIRS:
        flags.append("unsupported")
    return flags


def _sample(kind: ScalarKind, rng: random.Random) -> ScalarValue:
    # small, everyday magnitudes: representable in most kinds
    if kind.is_integer or kind is K.Enum16:
        return ScalarValue(kind, rng.randint(0, 100))
    if kind is K.Float64:
        return ScalarValue(kind, rng.randint(0, 400) / 4)
    if kind is K.Float32:
        return ScalarValue(kind, f32(rng.randint(0, 400) / 4))
    if kind is K.Bool:
        return ScalarValue(kind, rng.random() < 0.5)
    if kind is K.Char:
        return ScalarValue(kind, rng.choice(string.ascii_letters))
    if kind is K.TimeStamp:
        return ScalarValue(kind, (rng.randint(0, 100), rng.randrange(10**9)))
    return ScalarValue(kind, "".join(rng.choices(string.ascii_lowercase, k=8)))


def _source_value(src: ScalarKind, dst: ScalarKind, rng: random.Random) -> tuple[ScalarValue, bool]:
    """A source value that converts to ``dst`` if one is easy to find."""
    try:
        x = convert(_sample(dst, rng), src)
        convert(x, dst)
        return x, True
    except ConversionError:
        pass
    x = _sample(src, rng)
    try:
        convert(x, dst)
        return x, True
    except ConversionError:
        return x, False


def _container(value: ScalarValue, rng: random.Random) -> Container:
    return Container(standard_spec(Scalar(value.kind)), {
        WellKnown.Value: value,
        WellKnown.AlarmStatus: ScalarValue(K.Enum16, rng.randrange(4)),
        WellKnown.AlarmSeverity: ScalarValue(K.Enum16, rng.randrange(3)),
        WellKnown.TimeStamp: ScalarValue(K.TimeStamp, (rng.randrange(2**31), rng.randrange(10**9))),
    })


def bench_pairs(sizes: Sequence[int], config: BenchConfig, seed: int = 0,
                pairs: Iterable[tuple[ScalarKind, ScalarKind]] | None = None) -> list[BenchRow]:
    """Time container assignment for every ordered kind pair and array size.

    For each size an array of that many source containers is assigned
    element-wise into destination containers of the other kind; the row
    reports the per-assignment cost.  Sweeping sizes exposes cache effects.
    """
    sizes = list(sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ConfigurationError(f"sizes must be a nonempty list of positive counts, got {sizes}")
    if pairs is None:
        pairs = [(s, d) for s in ScalarKind for d in ScalarKind]
    pairs = list(pairs)
    rows = []
    for size in sizes:
        for src, dst in pairs:
            rows.append(_bench_pair(src, dst, size, config, random.Random(f"{seed}:{src}:{dst}:{size}")))
    return rows


def _bench_pair(src, dst, size, config, rng) -> BenchRow:
    values = []
    all_ok = True
    for _ in range(size):
        v, ok = _source_value(src, dst, rng)
        values.append(v)
        all_ok &= ok
    srcs = [_container(v, rng) for v in values]
    dsts = [_container(_sample(dst, rng), rng) for _ in range(size)]
    pairs = list(zip(srcs, dsts))

    if all_ok:
        def body():
            for s, d in pairs:
                assign(s, d)
    else:
        def body():
            for s, d in pairs:
                try:
                    assign(s, d)
                except ConversionError:
                    pass

    body()
    for v, (_, d) in zip(values, pairs):
        try:
            expected = convert(v, dst)
        except ConversionError:
            continue
        if d[WellKnown.Value] != expected:
            raise InvariantViolation(f"{src.name}->{dst.name}: assigned {d[WellKnown.Value]!r}, "
                                     f"expected {expected!r}")

    t = measure(body, config, ops=size)
    flags = pair_category(src, dst)
    if not all_ok:
        flags.append("error")
    return BenchRow("pairs", src.name, dst.name, size, None, config.repeats,
                    t.median_ns, t.min_ns, t.median_ns, ";".join(flags))


# ---------------------------------------------------------------- chunks


class SyntheticTimer:
    """Stand-in clock reporting ``per_element * n + per_chunk * c + overhead``.

    Lets the regression be checked against known coefficients.
    """

    def __init__(self, per_element: float, per_chunk: float, overhead: float = 0.0,
                 noise: float = 0.0, seed: int = 0):
        self.per_element = per_element
        self.per_chunk = per_chunk
        self.overhead = overhead
        self.noise = noise
        self._rng = random.Random(seed)

    def __call__(self, elements: int, chunks: int) -> float:
        t = self.per_element * elements + self.per_chunk * chunks + self.overhead
        if self.noise:
            t *= 1 + self._rng.uniform(-self.noise, self.noise)
        return t


@dataclass(frozen=True)
class ChunkResult:
    rows: list[BenchRow]
    fit: CostFit


def _chunked_copy(a: ArrayValue, chunk_len: int, out: np.ndarray) -> int:
    # one transport buffer refill per chunk
    cursor = ChunkCursor(a)
    pos = 0
    chunks = 0
    while True:
        chunk = read_chunk(cursor, chunk_len)
        n = chunk.size
        if not n:
            return chunks
        out[pos:pos + n] = chunk
        pos += n
        chunks += 1


def bench_chunks(total_elements: Sequence[int], chunk_lens: Sequence[int], config: BenchConfig,
                 seed: int = 0, synthetic: SyntheticTimer | None = None) -> ChunkResult:
    """Time chunked reads of Int32 arrays and fit ``a*elements + b*chunks + c``."""
    if any(n < 1 for n in total_elements) or any(c < 1 for c in chunk_lens):
        raise ConfigurationError("element totals and chunk lengths must be positive")
    configs = sorted({(n, c) for n in total_elements for c in chunk_lens})
    shapes = {(n, math.ceil(n / c)) for n, c in configs}
    if len(shapes) < 6:
        raise ConfigurationError(
            f"need >= 6 distinct (elements, chunks) configurations, got {len(shapes)}")

    rng = np.random.default_rng(seed)
    rows = []
    for n, c in configs:
        a = ArrayValue(K.Int32, [n], rng.integers(-2**31, 2**31, n, dtype=np.int32))
        out = np.empty(n, dtype=np.int32)
        chunks = _chunked_copy(a, c, out)
        if chunks != math.ceil(n / c) or out.tobytes() != a.data.tobytes():
            raise InvariantViolation(f"chunked read of {n} by {c} did not reassemble")
        if synthetic is None:
            t = measure(lambda: _chunked_copy(a, c, out), config)
            median, low = t.median_ns, t.min_ns
        else:
            for _ in range(config.warmup):
                _chunked_copy(a, c, out)
            samples = []
            for _ in range(config.repeats):
                _chunked_copy(a, c, out)
                samples.append(synthetic(n, chunks))
            median, low = float(np.median(samples)), float(min(samples))
        rows.append(BenchRow("chunks", "Int32", "Int32", n, c, config.repeats,
                             median, low, median / n, "synthetic" if synthetic else ""))

    fit = fit_chunk_costs([(r.size, math.ceil(r.size / r.chunk_len), r.median_ns) for r in rows])
    return ChunkResult(rows, fit)


# ---------------------------------------------------------------- dispatch


@dataclass(frozen=True)
class DispatchResult:
    rows: list[BenchRow]
    callback_ns: float
    dynamic_ns: float
    ratio: float
    total: float


class _SumAdaptor(Adaptor):
    def __init__(self):
        self.total = 0.0

    def on_array(self, pid, array):
        s = 0.0
        for x in array.data.tolist():
            s += x
        self.total = s


def _sum_callback(c: Container) -> float:
    adaptor = _SumAdaptor()
    traverse(c, adaptor)
    return adaptor.total


def _sum_dynamic(c: Container, n: int) -> float:
    s = 0.0
    pid = WellKnown.Value
    for i in range(n):
        s += get_element_dyn(c, pid, i).payload
    return s


def bench_dispatch(elements: int, config: BenchConfig, seed: int = 0) -> DispatchResult:
    """Sum a Float64 array property via traversal and via per-element access."""
    if elements < 1:
        raise ConfigurationError("elements must be >= 1")
    data = np.random.default_rng(seed).standard_normal(elements)
    c = Container(CatalogSpec([(WellKnown.Value, Array(K.Float64))]),
                  {WellKnown.Value: ArrayValue(K.Float64, [elements], data)})

    via_callback = _sum_callback(c)
    via_dynamic = _sum_dynamic(c, elements)
    if via_callback != via_dynamic:
        raise InvariantViolation(f"dispatch sums differ: {via_callback!r} != {via_dynamic!r}")

    sink = []
    cb = measure(lambda: sink.append(_sum_callback(c)), config)
    dyn = measure(lambda: sink.append(_sum_dynamic(c, elements)), config)
    if any(s != via_callback for s in sink):
        raise InvariantViolation("dispatch sum changed between repeats")

    rows = [
        BenchRow("dispatch", "Float64", "", elements, None, config.repeats,
                 cb.median_ns, cb.min_ns, cb.median_ns / elements, "callback"),
        BenchRow("dispatch", "Float64", "", elements, None, config.repeats,
                 dyn.median_ns, dyn.min_ns, dyn.median_ns / elements, "dynamic"),
    ]
    return DispatchResult(rows, cb.median_ns, dyn.median_ns, dyn.median_ns / cb.median_ns, via_callback)


# ---------------------------------------------------------------- fast path


@dataclass(frozen=True)
class FastPathResult:
    rows: list[BenchRow]
    fast_ns: float
    elementwise_ns: float
    speedup: float


def bench_fastpath(elements: int, config: BenchConfig, seed: int = 0,
                   force_slow: bool = False) -> FastPathResult:
    """Same-kind Float64 array copy: block copy versus element-wise.

    ``force_slow`` routes the "fast" side through the element-wise path too.
    """
    if elements < 1:
        raise ConfigurationError("elements must be >= 1")
    a = ArrayValue(K.Float64, [elements], np.random.default_rng(seed).standard_normal(elements))

    fast = copy_convert(a, K.Float64, force_slow=force_slow)
    slow = copy_convert(a, K.Float64, force_slow=True)
    if fast.data.tobytes() != a.data.tobytes() or slow.data.tobytes() != a.data.tobytes():
        raise InvariantViolation("fast-path and element-wise copies are not bit-identical")

    t_fast = measure(lambda: copy_convert(a, K.Float64, force_slow=force_slow), config)
    t_slow = measure(lambda: copy_convert(a, K.Float64, force_slow=True), config)
    rows = [
        BenchRow("fastpath", "Float64", "Float64", elements, None, config.repeats,
                 t_fast.median_ns, t_fast.min_ns, t_fast.median_ns / elements,
                 "fast;forced-slow" if force_slow else "fast"),
        BenchRow("fastpath", "Float64", "Float64", elements, None, config.repeats,
                 t_slow.median_ns, t_slow.min_ns, t_slow.median_ns / elements, "elementwise"),
    ]
    return FastPathResult(rows, t_fast.median_ns, t_slow.median_ns, t_slow.median_ns / t_fast.median_ns)
