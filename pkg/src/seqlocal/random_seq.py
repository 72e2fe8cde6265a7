"""Null model of uniformly random vertex sequences for a fixed graph."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats as sps

from .errors import DegenerateSizeError, SizeCapError
from .graph import Graph, VertexSequence, parallel_pairs, wedge_count
from .stats import z1, z1_scale

DEFAULT_ENUM_CAP = 9


def randseq_variance(n: int, m: int, m3: int, parallel: int = 0):
    """Variance of z1 over uniformly random sequences.

    ``parallel`` counts pairs of parallel edge copies; it is zero for simple
    graphs, where the result reduces to the closed form in ``(N, M, M3)``.
    The value is exact for ``N = 3`` as well (no disjoint edge pairs exist).
    Returned as a :class:`~fractions.Fraction`.
    """
    if n < 3:
        raise DegenerateSizeError(f"random-sequence variance needs N >= 3 (got {n})")
    if m < 1:
        raise DegenerateSizeError("random-sequence variance needs M >= 1")
    base = Fraction(n + 1, n - 2) * (
        Fraction(5 * n - 8, 5 * (n + 1))
        + Fraction(m3 * (n - 4), 5 * m * (n + 1))
        - Fraction(2 * m, 5 * (n + 1))
    )
    if not parallel:
        return base
    # parallel copies share both endpoints: move them from the disjoint-pair
    # term E|d||d'| = (N+1)(5N+4)/45 to the squared term E[d^2] = N(N+1)/6
    shift = Fraction(2 * parallel) * (Fraction(n * (n + 1), 6) - Fraction((n + 1) * (5 * n + 4), 45))
    return base + Fraction(18, m * (n + 1) * (n - 2)) * shift


def graph_randseq_variance(g: Graph):
    return randseq_variance(g.n_vertices, g.m_edges, wedge_count(g), parallel_pairs(g))


def z1_factor(g: Graph, s: VertexSequence) -> float:
    """z1 in units of its random-sequence standard deviation."""
    var = graph_randseq_variance(g)
    if var <= 0:
        raise DegenerateSizeError("random-sequence variance is zero for this graph")
    return z1(g, s) / math.sqrt(var)


@dataclass
class SequenceNullSummary:
    n: int
    m: int
    m3: int
    n_sequences_evaluated: int | str
    histogram: dict  # raw sum -> count
    mean_z1: float
    var_z1: float
    mean_raw: Fraction | float = 0.0
    var_raw: Fraction | float = 0.0
    n_distinct_matrices: int | None = None
    exhaustive: bool = False
    n_total: int = 0
    extra: dict = field(default_factory=dict)

    def z_of(self, raw_sum) -> float:
        scale = z1_scale(self.n, self.m)
        return scale * (3 * raw_sum / (self.m * (self.n + 1)) - 1)

    def z_values(self) -> dict:
        return {raw: self.z_of(raw) for raw in sorted(self.histogram)}

    def min_z1(self) -> float:
        return self.z_of(min(self.histogram))

    def p_value(self, z: float, strict: bool = False) -> float:
        """Fraction of evaluated sequences with z1 <= z (``<`` when ``strict``)."""
        tol = 1e-12
        hits = 0
        for raw, c in self.histogram.items():
            zr = self.z_of(raw)
            if (zr < z - tol) if strict else (zr <= z + tol):
                hits += c
        return hits / self.n_total

    def p_value_se(self, z: float) -> float:
        p = self.p_value(z)
        return math.sqrt(p * (1 - p) / self.n_total)

    def histogram_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["raw_sum", "count"])
        for raw in sorted(self.histogram):
            w.writerow([raw, self.histogram[raw]])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "n": self.n, "m": self.m, "m3": self.m3,
            "n_sequences_evaluated": self.n_sequences_evaluated,
            "exhaustive": self.exhaustive,
            "mean_z1": float(self.mean_z1), "var_z1": float(self.var_z1),
            "var_z1_formula": float(self.extra["var_formula"]) if "var_formula" in self.extra else None,
            "min_z1": self.min_z1(),
            "n_distinct_matrices": self.n_distinct_matrices,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _raw_sums(g: Graph, perms: np.ndarray) -> np.ndarray:
    # perms[k, i] is the 0-based position of vertex i in sequence k
    return (np.abs(perms[:, g.src] - perms[:, g.dst]) * g.mult).sum(axis=1)


def _matrix_keys(g: Graph, perms: np.ndarray) -> np.ndarray:
    a, b = perms[:, g.src], perms[:, g.dst]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    codes = lo * g.n_vertices + hi
    codes = np.repeat(codes, g.mult, axis=1)
    return np.sort(codes, axis=1)


def _summarize(g: Graph, hist: dict, total: int, exhaustive: bool, label) -> SequenceNullSummary:
    n, m = g.n_vertices, g.m_edges
    mean_raw = Fraction(sum(k * c for k, c in hist.items()), total)
    var_raw = Fraction(sum(k * k * c for k, c in hist.items()), total) - mean_raw**2
    # z1 = c (3 raw / (M (N+1)) - 1) with c^2 = 2M(N+1)/(N-2)
    var_z = Fraction(18, m * (n + 1) * (n - 2)) * var_raw
    mean_z = z1_scale(n, m) * float(Fraction(3, m * (n + 1)) * mean_raw - 1)
    if not exhaustive:
        # unbiased sample variance
        var_z = var_z * total / (total - 1) if total > 1 else var_z
    return SequenceNullSummary(
        n=n, m=m, m3=wedge_count(g), n_sequences_evaluated=label, histogram=dict(sorted(hist.items())),
        mean_z1=mean_z, var_z1=var_z, mean_raw=mean_raw, var_raw=var_raw,
        exhaustive=exhaustive, n_total=total,
    )


def exact_seq_distribution(g: Graph, cap: int = DEFAULT_ENUM_CAP,
                           count_distinct: bool = True) -> SequenceNullSummary:
    """Enumerate z1 over all ``N!`` sequences.

    Permutations are processed in blocks sharing the first vertex's position
    and the block histograms are merged.
    """
    n = g.n_vertices
    if n > cap:
        raise SizeCapError(f"N={n} exceeds the enumeration cap {cap}; use sampled_seq_distribution")
    if n < 3 or g.m_edges < 1:
        raise DegenerateSizeError("enumeration needs N >= 3 and M >= 1")
    hist: dict[int, int] = {}
    keys = set() if count_distinct else None
    rest = list(range(n))
    for first in range(n):
        others = [p for p in rest if p != first]
        tail = np.array(list(itertools.permutations(others)), dtype=np.int64).reshape(-1, n - 1)
        block = np.empty((tail.shape[0], n), dtype=np.int64)
        block[:, 0] = first
        block[:, 1:] = tail
        vals, counts = np.unique(_raw_sums(g, block), return_counts=True)
        for v, c in zip(vals.tolist(), counts.tolist()):
            hist[v] = hist.get(v, 0) + c
        if keys is not None:
            keys.update(map(bytes, np.unique(_matrix_keys(g, block), axis=0)))
    total = math.factorial(n)
    out = _summarize(g, hist, total, True, "all (N!)")
    out.n_distinct_matrices = len(keys) if keys is not None else None
    out.extra["var_formula"] = graph_randseq_variance(g)
    return out


def sampled_seq_distribution(g: Graph, n_samples: int, seed=None, chunk: int = 20000) -> SequenceNullSummary:
    """Monte Carlo estimate of the random-sequence null from uniform shuffles."""
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    n = g.n_vertices
    if n < 3 or g.m_edges < 1:
        raise DegenerateSizeError("sequence null needs N >= 3 and M >= 1")
    rng = np.random.default_rng(seed)
    hist: dict[int, int] = {}
    done = 0
    while done < n_samples:
        k = min(chunk, n_samples - done)
        perms = rng.permuted(np.tile(np.arange(n, dtype=np.int64), (k, 1)), axis=1)
        vals, counts = np.unique(_raw_sums(g, perms), return_counts=True)
        for v, c in zip(vals.tolist(), counts.tolist()):
            hist[v] = hist.get(v, 0) + c
        done += k
    out = _summarize(g, hist, n_samples, False, n_samples)
    out.extra["var_formula"] = graph_randseq_variance(g)
    return out


def er_vs_random_curve(n: int, m: int, m3_ratios, z_values=None) -> dict:
    """Cumulative probabilities of z1 under the ER and random-sequence nulls.

    The random-sequence side is a normal approximation with the exact variance;
    the curve metadata says so.
    """
    if z_values is None:
        z_values = np.linspace(-4, 0, 81)
    c = 2 * m / n
    rows = []
    for ratio in m3_ratios:
        m3 = ratio * c * m
        var = (n + 1) / (n - 2) * (
            (5 * n - 8) / (5 * (n + 1)) + m3 * (n - 4) / (5 * m * (n + 1)) - 2 * m / (5 * (n + 1))
        )
        sd = math.sqrt(var)
        for z in np.asarray(z_values, dtype=float):
            rows.append({
                "m3_ratio": float(ratio), "z1": float(z), "variance": var,
                "p_er": float(sps.norm.cdf(z)), "p_random": float(sps.norm.cdf(z / sd)),
            })
    return {
        "n": n, "m": m, "c": c,
        "p_random_method": "normal approximation with the exact random-sequence variance",
        "rows": rows,
    }


def curve_to_csv(curve: dict) -> str:
    buf = io.StringIO()
    cols = ["m3_ratio", "z1", "variance", "p_er", "p_random"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in curve["rows"]:
        w.writerow([repr(row[c]) for c in cols])
    return buf.getvalue()
