"""Timing primitives: warmup, median-of-repeats, result rows."""

from __future__ import annotations

import statistics
import time
from dataclasses import asdict, dataclass, fields
from typing import Any, Callable

__all__ = [
    "BenchConfig",
    "BenchRow",
    "Timing",
    "ConfigurationError",
    "InvariantViolation",
    "measure",
    "COLUMNS",
]


class ConfigurationError(ValueError):
    """Benchmark parameters that cannot produce a meaningful run."""


class InvariantViolation(RuntimeError):
    """A benchmark body produced a wrong result; its timings are void."""


@dataclass(frozen=True)
class BenchConfig:
    repeats: int = 30
    warmup: int = 5
    min_repeats: int = 30
    min_warmup: int = 5
    noise_floor_ns: float = 5_000.0

    def __post_init__(self):
        if self.repeats < self.min_repeats:
            raise ConfigurationError(f"repeats {self.repeats} < minimum {self.min_repeats}")
        if self.warmup < self.min_warmup:
            raise ConfigurationError(f"warmup {self.warmup} < minimum {self.min_warmup}")

    @classmethod
    def quick(cls, repeats: int = 7, warmup: int = 2) -> BenchConfig:
        """Relaxed minimums for smoke runs and tests."""
        return cls(repeats=repeats, warmup=warmup, min_repeats=1, min_warmup=0)


@dataclass(frozen=True)
class Timing:
    median_ns: float
    min_ns: float
    samples: tuple[float, ...]


def measure(body: Callable[[], Any], config: BenchConfig, ops: int = 1,
            clock: Callable[[], int] = time.perf_counter_ns) -> Timing:
    """Per-operation median and minimum over ``config.repeats`` timed calls.

    ``body`` performs ``ops`` operations per call.
    """
    for _ in range(config.warmup):
        body()
    samples = []
    for _ in range(config.repeats):
        t0 = clock()
        body()
        samples.append((clock() - t0) / ops)
    return Timing(statistics.median(samples), min(samples), tuple(samples))


COLUMNS = (
    "experiment", "src_kind", "dst_kind", "size", "chunk_len", "repeats",
    "median_ns", "min_ns", "per_element_ns", "flags",
)


@dataclass(frozen=True)
class BenchRow:
    experiment: str
    src_kind: str
    dst_kind: str
    size: int
    chunk_len: int | None
    repeats: int
    median_ns: float
    min_ns: float
    per_element_ns: float | None
    flags: str = ""

    def __post_init__(self):
        if not self.median_ns >= self.min_ns >= 0:
            raise InvariantViolation(f"row {self.experiment}: median {self.median_ns} < min {self.min_ns}")

    @property
    def flag_set(self) -> frozenset[str]:
        return frozenset(self.flags.split(";")) - {""}

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> BenchRow:
        return cls(**{f.name: d[f.name] for f in fields(cls)})


assert tuple(f.name for f in fields(BenchRow)) == COLUMNS
