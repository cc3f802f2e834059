"""Least-squares cost model for chunked array reads."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .harness import ConfigurationError

__all__ = ["CostFit", "fit_chunk_costs"]


@dataclass(frozen=True)
class CostFit:
    per_element_ns: float
    per_chunk_ns: float
    intercept_ns: float
    r2: float
    configurations: int


def fit_chunk_costs(samples: Sequence[tuple[int, int, float]]) -> CostFit:
    """Fit ``time = a*elements + b*chunks + c`` to ``(elements, chunks, ns)`` samples.

    Raises ConfigurationError for fewer than 6 distinct configurations or a
    rank-deficient design (e.g. chunks proportional to elements).
    """
    distinct = {(n, c) for n, c, _ in samples}
    if len(distinct) < 6:
        raise ConfigurationError(f"need >= 6 distinct configurations, got {len(distinct)}")
    X = np.array([[n, c, 1.0] for n, c, _ in samples], dtype=float)
    y = np.array([t for _, _, t in samples], dtype=float)
    # column scaling keeps the rank test meaningful when elements >> chunks
    scale = np.abs(X).max(axis=0)
    Xs = X / scale
    if np.linalg.matrix_rank(Xs) < 3:
        raise ConfigurationError("degenerate chunk configurations: design matrix is rank deficient")
    coef, *_ = np.linalg.lstsq(Xs, y, rcond=None)
    coef = coef / scale
    resid = y - X @ coef
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return CostFit(float(coef[0]), float(coef[1]), float(coef[2]), r2, len(distinct))
