"""Sequential-locality statistics over a (graph, vertex sequence) pair."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateSizeError, SeqLocalError
from .graph import Graph, VertexSequence, edge_distances

METRIC_KINDS = ("sequential", "logarithmic", "squared", "step")


@dataclass(frozen=True)
class AffinityMetric:
    """Affinity ``J`` as a function of the sequential distance ``d = |a - b|``.

    ``step`` uses the threshold ``r``: ``J = 1`` when ``d > r`` and 0 otherwise.
    """

    kind: str = "sequential"
    r: int | None = None

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise SeqLocalError(f"unknown metric {self.kind!r}")
        if self.kind == "step" and (self.r is None or self.r < 0):
            raise SeqLocalError("step metric needs a threshold r >= 0")

    @property
    def integer_valued(self) -> bool:
        return self.kind != "logarithmic"

    def value(self, d, n: int):
        """Evaluate ``J`` at distance(s) ``d`` for a sequence of length ``n``."""
        d = np.asarray(d)
        if self.kind == "sequential":
            return d
        if self.kind == "squared":
            return d * d
        if self.kind == "step":
            return (d > self.r).astype(np.int64)
        return -np.log1p(-d / n)

    def __str__(self):
        return f"step({self.r})" if self.kind == "step" else self.kind


SEQUENTIAL = AffinityMetric("sequential")
LOGARITHMIC = AffinityMetric("logarithmic")


@dataclass(frozen=True)
class StatValue:
    raw_sum: float
    normalized: float
    beta: float
    statistic_kind: str
    z: float | None = None


def beta_sequential(n: int, m: int) -> float:
    return m * (n + 1) / 3


@lru_cache(maxsize=256)
def log_moments(n: int) -> tuple[float, float]:
    """Mean and standard deviation of ``-log(1 - X/N)`` for triangular ``X``."""
    if n < 2:
        raise DegenerateSizeError("log moments need N >= 2")
    k = np.arange(1, n, dtype=float)
    klogk = k * np.log(k)
    c = 2.0 / (n * (n - 1))
    s1 = c * klogk.sum()
    mu = math.log(n) - s1
    var = c * (k * np.log(k) ** 2).sum() - s1 * s1
    return mu, math.sqrt(max(var, 0.0))


def _require_edges(g: Graph):
    if g.m_edges == 0:
        raise DegenerateSizeError("statistic undefined for a graph without edges")


def h_stat(g: Graph, s: VertexSequence, metric: AffinityMetric = SEQUENTIAL) -> StatValue:
    """General locality sum ``sum_{i<j} A_ij J(|pi_i - pi_j|)`` with its normalization.

    Only the sequential and logarithmic metrics carry a normalization; the others
    report the raw sum (``beta = 1``).
    """
    _require_edges(g)
    d = edge_distances(g, s)
    n, m = g.n_vertices, g.m_edges
    raw = metric.value(d, n) * g.mult
    raw_sum = int(raw.sum()) if metric.integer_valued else float(raw.sum())
    if metric.kind == "sequential":
        beta = beta_sequential(n, m)
        normalized = raw_sum / beta
        z = _z1_from_h1(normalized, n, m) if n >= 3 else None
        return StatValue(raw_sum, normalized, beta, "H1", z)
    if metric.kind == "logarithmic":
        mu, sigma = log_moments(n)
        beta = mu * m
        normalized = raw_sum / beta
        z = mu / sigma * math.sqrt(m) * (normalized - 1) if sigma > 0 else None
        return StatValue(raw_sum, normalized, beta, "HG", z)
    return StatValue(raw_sum, float(raw_sum), 1.0, f"HJ({metric})")


def h1(g: Graph, s: VertexSequence) -> float:
    return h_stat(g, s, SEQUENTIAL).normalized


def z1_scale(n: int, m: int) -> float:
    if n < 3:
        raise DegenerateSizeError(f"z1 needs N >= 3 (got N={n})")
    return math.sqrt(2 * m * (n + 1) / (n - 2))


def _z1_from_h1(h: float, n: int, m: int) -> float:
    return z1_scale(n, m) * (h - 1)


def z1(g: Graph, s: VertexSequence) -> float:
    """Standardized H1 under the fixed-M uniform null."""
    if g.n_vertices < 3:
        raise DegenerateSizeError(f"z1 needs N >= 3 (got N={g.n_vertices})")
    _require_edges(g)
    return _z1_from_h1(h1(g, s), g.n_vertices, g.m_edges)


def hg(g: Graph, s: VertexSequence) -> StatValue:
    return h_stat(g, s, LOGARITHMIC)


def zg(g: Graph, s: VertexSequence) -> float:
    if g.n_vertices < 3:
        raise DegenerateSizeError(f"z_G needs N >= 3 (got N={g.n_vertices})")
    value = hg(g, s)
    return value.z


def zg_from_raw(raw_sum, n: int, m: int):
    """Vectorized z_G from raw logarithmic sums (used by the samplers)."""
    mu, sigma = log_moments(n)
    if sigma == 0:
        raise DegenerateSizeError("z_G undefined for N = 2")
    return mu / sigma * math.sqrt(m) * (np.asarray(raw_sum) / (mu * m) - 1)


def micro_locality(g: Graph, s: VertexSequence) -> list[float | None]:
    """Per-vertex median distance to neighbours (``None`` for isolated vertices).

    Multiedges enter the sample once per copy.
    """
    d = edge_distances(g, s)
    samples: list[list[int]] = [[] for _ in range(g.n_vertices)]
    for u, v, w, dist in zip(g.src.tolist(), g.dst.tolist(), g.mult.tolist(), d.tolist()):
        samples[u].extend([dist] * w)
        samples[v].extend([dist] * w)
    return [float(np.median(x)) if x else None for x in samples]
