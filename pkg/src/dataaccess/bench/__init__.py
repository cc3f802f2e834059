"""Benchmark harness reproducing the conversion/dispatch measurements."""

from .experiments import (
    DEFAULT_SIZES,
    ChunkResult,
    DispatchResult,
    FastPathResult,
    SyntheticTimer,
    bench_chunks,
    bench_dispatch,
    bench_fastpath,
    bench_pairs,
    pair_category,
)
from .fit import CostFit, fit_chunk_costs
from .harness import BenchConfig, BenchRow, ConfigurationError, InvariantViolation, measure
from .report import emit_report, rows_from_json, summarize
