"""Tile metrics and two-sample statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import TileGrid


@dataclass(frozen=True)
class MetricPoint:
    density: float
    symmetry: float

    def __post_init__(self):
        for name in ("density", "symmetry"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} {value} outside [0, 1]")


def density(seg: TileGrid, solid_set: Iterable[str]) -> float:
    if not seg.tiles:
        raise ValueError("density of an empty grid")
    solid = set(solid_set)
    return sum(ch in solid for ch in seg.tiles) / len(seg.tiles)


def symmetry(seg: TileGrid) -> float:
    """Matching tiles over mirrored row pairs plus mirrored column pairs.

    Row pass compares row i with row R-1-i for i < R//2 (every column);
    column pass compares column j with column C-1-j for j < C//2 (every row).
    An odd middle row/column is not compared. The score is matches divided by
    ``(R//2)*C + (C//2)*R``; grids with nothing to compare score 1.
    """
    if not seg.tiles:
        raise ValueError("symmetry of an empty grid")
    a = seg.as_array()
    R, C = a.shape
    h = R // 2
    w = C // 2
    matches = int(np.sum(a[:h, :] == a[::-1, :][:h, :])) + int(np.sum(a[:, :w] == a[:, ::-1][:, :w]))
    total = h * C + w * R
    return matches / total if total else 1.0


def metric_point(seg: TileGrid, solid_set: Iterable[str]) -> MetricPoint:
    return MetricPoint(density(seg, solid_set), symmetry(seg))


def novelty(generated: Sequence[TileGrid], training: Iterable[TileGrid]) -> float:
    """Fraction of ``generated`` with no exact copy in ``training``."""
    if not generated:
        return 0.0
    seen = {g.tiles if isinstance(g, TileGrid) else g for g in training}
    keys = [g.tiles if isinstance(g, TileGrid) else g for g in generated]
    return sum(k not in seen for k in keys) / len(keys)


def _as_points(points) -> np.ndarray:
    if len(points) and isinstance(points[0], MetricPoint):
        return np.array([(p.density, p.symmetry) for p in points], dtype=np.float64)
    arr = np.asarray(points, dtype=np.float64)
    return arr.reshape(len(arr), -1)


def _mean_pairwise(x: np.ndarray, y: np.ndarray, chunk: int = 2048) -> float:
    total = 0.0
    for start in range(0, len(x), chunk):
        d = x[start:start + chunk, None, :] - y[None, :, :]
        total += float(np.sqrt((d * d).sum(axis=-1)).sum())
    return total / (len(x) * len(y))


def e_distance(a, b) -> float:
    """Energy distance 2E|a-b| - E|a-a'| - E|b-b'| (V-statistic, Euclidean)."""
    x = _as_points(a)
    y = _as_points(b)
    if not len(x) or not len(y):
        raise ValueError("energy distance needs two non-empty samples")
    value = 2.0 * _mean_pairwise(x, y) - _mean_pairwise(x, x) - _mean_pairwise(y, y)
    return max(value, 0.0) if value > -1e-12 else value


def rankdata(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based) with ties sharing their mean rank."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def rank_sum_test(a: Sequence[float], b: Sequence[float], *, continuity: bool = True) -> float:
    """Two-sided Wilcoxon rank-sum (Mann-Whitney U) p-value.

    Normal approximation with tie-corrected variance and, by default, a 0.5
    continuity correction. Returns 1.0 when every value is tied.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    n1, n2 = len(x), len(y)
    if not n1 or not n2:
        raise ValueError("rank-sum test needs two non-empty samples")
    ranks = rankdata(np.concatenate([x, y]))
    u1 = ranks[:n1].sum() - n1 * (n1 + 1) / 2.0
    n = n1 + n2
    _, counts = np.unique(np.concatenate([x, y]), return_counts=True)
    tie = float(np.sum(counts ** 3 - counts))
    var = n1 * n2 / 12.0 * ((n + 1) - tie / (n * (n - 1))) if n > 1 else 0.0
    if var <= 0.0:
        return 1.0
    mean = n1 * n2 / 2.0
    diff = abs(u1 - mean)
    if continuity:
        diff = max(diff - 0.5, 0.0)
    z = diff / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


# --- batch forms over tile-index arrays (N, rows, cols) ----------------------

def density_batch(idx: np.ndarray, vocabulary: str, solid_set: Iterable[str]) -> np.ndarray:
    solid = [i for i, ch in enumerate(vocabulary) if ch in set(solid_set)]
    return np.isin(idx, solid).reshape(len(idx), -1).mean(axis=1)


def symmetry_batch(idx: np.ndarray) -> np.ndarray:
    """Vectorised :func:`symmetry` for a stack of index grids."""
    n, R, C = idx.shape
    h, w = R // 2, C // 2
    total = h * C + w * R
    if not total:
        return np.ones(n)
    rows = (idx[:, :h, :] == idx[:, ::-1, :][:, :h, :]).reshape(n, -1).sum(axis=1)
    cols = (idx[:, :, :w] == idx[:, :, ::-1][:, :, :w]).reshape(n, -1).sum(axis=1)
    return (rows + cols) / total
