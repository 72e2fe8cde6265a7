"""Null distributions and tests under the fixed-M Erdos-Renyi model.

Three views of the same null are provided:

* the iid approximation, where each edge draws an independent triangular
  distance (:func:`exact_h1_distribution_iid`, normal limit in
  :func:`test_unoptimized`);
* the exact uniform-multigraph count (:func:`exact_h_distribution_multigraph`);
* the canonical (Poisson edge count) variant (:func:`canonical_h_distribution`).
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy import stats as sps

from . import _slots
from .errors import DegenerateSizeError, InfeasibleError, SeqLocalError, SizeCapError
from .graph import Graph, VertexSequence
from .stats import SEQUENTIAL, AffinityMetric, h1, log_moments, z1  # noqa: F401  (log_moments re-exported)
from .tables import DistributionTable, TestReport

DEFAULT_MAX_CELLS = 10**7
# exact big-integer DP is used while (cells x kernel width) stays below this
EXACT_WORK_LIMIT = 5 * 10**7

SIDEDNESS = ("two-sided", "one-sided-lower")


def n_multisets(n: int, m: int) -> int:
    """Number of size-``m`` multisets from ``n`` elements, ``C(n + m - 1, m)``."""
    if n == 0:
        return 1 if m == 0 else 0
    return math.comb(n + m - 1, m)


def triangular_pmf(n: int) -> DistributionTable:
    """Distance between two distinct uniform positions in ``1..N``."""
    if n < 2:
        raise DegenerateSizeError("triangular distribution needs N >= 2")
    total = n * (n - 1) // 2
    return DistributionTable.from_counts({x: n - x for x in range(1, n)}, total)


def pair_population(n: int, metric: AffinityMetric = SEQUENTIAL) -> dict[int, int]:
    """Number of vertex pairs at each affinity value (integer metrics only)."""
    if not metric.integer_valued:
        raise SeqLocalError(f"exact tables need an integer-valued metric, not {metric}")
    counts: dict[int, int] = {}
    for x in range(1, n):
        v = int(metric.value(x, n))
        counts[v] = counts.get(v, 0) + (n - x)
    return counts


def _check_cells(cells: int, max_cells: int):
    if cells > max_cells:
        raise SizeCapError(
            f"exact table needs {cells} DP cells (cap {max_cells}); "
            "use the normal approximation instead"
        )


def exact_h1_distribution_iid(n: int, m: int, precision: str = "auto",
                              max_cells: int = DEFAULT_MAX_CELLS) -> DistributionTable:
    """M-fold convolution of the triangular distance distribution.

    ``precision`` is ``"exact"`` (rational), ``"float"`` (extended-precision
    floats) or ``"auto"``, which picks exact arithmetic for small tables.
    """
    if n < 2 or m < 1:
        raise DegenerateSizeError("need N >= 2 and M >= 1")
    support_len = m * (n - 2) + 1
    cells = support_len * m
    _check_cells(cells, max_cells)
    if precision == "auto":
        precision = "exact" if cells * (n - 1) <= EXACT_WORK_LIMIT else "float"
    if precision == "exact":
        kernel = np.array([n - x for x in range(1, n)], dtype=object)
        acc = np.array([1], dtype=object)
        for _ in range(m):
            acc = np.convolve(acc, kernel)
        total = (n * (n - 1) // 2) ** m
        return DistributionTable.from_counts({m + k: int(c) for k, c in enumerate(acc)}, total)
    if precision != "float":
        raise SeqLocalError(f"unknown precision {precision!r}")
    kernel = np.array([2 * (n - x) for x in range(1, n)], dtype=np.longdouble) / (n * (n - 1))
    acc = np.ones(1, dtype=np.longdouble)
    for _ in range(m):
        acc = np.convolve(acc, kernel)
    return DistributionTable.from_array(acc, offset=m)


def exact_h_distribution_multigraph(n: int, m: int, metric: AffinityMetric = SEQUENTIAL,
                                    max_cells: int = 10**6) -> DistributionTable:
    """Distribution of ``sum A_ij J_ij`` over all multigraphs with exactly M edges.

    Coefficient extraction from ``prod_v (1 - t^v z)^(-n_v)``, where ``n_v`` is
    the number of vertex pairs with affinity ``v``; counts are exact integers.
    """
    if n < 2 or m < 1:
        raise DegenerateSizeError("need N >= 2 and M >= 1")
    pop = pair_population(n, metric)
    vmax = max(pop)
    width = m * vmax + 1
    _check_cells((m + 1) * width, max_cells)
    dp = np.zeros((m + 1, width), dtype=object)
    dp[:, :] = 0
    dp[0, 0] = 1
    for v, size in sorted(pop.items()):
        new = np.zeros_like(dp)
        new[:, :] = 0
        for j in range(m + 1):
            shift = j * v
            if shift >= width:
                break
            coef = n_multisets(size, j)
            new[j:, shift:] += coef * dp[: m + 1 - j, : width - shift]
        dp = new
    total = n_multisets(n * (n - 1) // 2, m)
    counts = {s: int(c) for s, c in enumerate(dp[m]) if c}
    assert sum(counts.values()) == total
    return DistributionTable.from_counts(counts, total)


def default_k_max(m: int) -> int:
    return int(math.ceil(m + 12 * math.sqrt(m) + 20))


def canonical_h_distribution(n: int, m: int, metric: AffinityMetric = SEQUENTIAL,
                             k_max: int | None = None,
                             max_cells: int = DEFAULT_MAX_CELLS) -> DistributionTable:
    """Null table when only the mean edge count is fixed (Poisson(M) mixture).

    Edge counts beyond ``k_max`` are dropped; the dropped Poisson mass is kept
    in ``truncated_mass``.
    """
    if n < 2 or m < 1:
        raise DegenerateSizeError("need N >= 2 and M >= 1")
    if k_max is None:
        k_max = default_k_max(m)
    if k_max < m + 10 * math.sqrt(m):
        raise SeqLocalError(f"k_max={k_max} is below M + 10 sqrt(M); tail would be too heavy")
    pop = pair_population(n, metric)
    vmax = max(pop)
    width = k_max * vmax + 1
    _check_cells(width * (k_max + 1), max_cells)
    total_pairs = n * (n - 1) // 2
    kernel = np.zeros(vmax + 1, dtype=np.longdouble)
    for v, size in pop.items():
        kernel[v] = np.longdouble(size) / total_pairs
    weights = sps.poisson.pmf(np.arange(k_max + 1), m)
    mix = np.zeros(width, dtype=np.longdouble)
    cur = np.ones(1, dtype=np.longdouble)
    for k in range(k_max + 1):
        mix[: cur.size] += np.longdouble(weights[k]) * cur
        if k < k_max:
            cur = np.convolve(cur, kernel)
    truncated = float(sps.poisson.sf(k_max, m))
    return DistributionTable.from_array(mix, truncated_mass=truncated)


def _p_value(z: float, sided: str) -> float:
    if sided == "two-sided":
        return float(min(1.0, 2 * sps.norm.cdf(-abs(z))))
    if sided == "one-sided-lower":
        return float(sps.norm.cdf(z))
    raise SeqLocalError(f"unknown sidedness {sided!r}")


def test_unoptimized(g: Graph, s: VertexSequence | None = None, alpha: float = 0.05,
                     sided: str = "two-sided") -> TestReport:
    """z1 test of a given (not optimized) sequence against the fixed-M ER null."""
    if not 0 < alpha < 1:
        raise SeqLocalError("alpha must lie in (0, 1)")
    if s is None:
        s = VertexSequence.identity(g.n_vertices)
    z = z1(g, s)
    return TestReport(
        statistic_kind="H1",
        observed=h1(g, s),
        z=z,
        p_value=_p_value(z, sided),
        null={
            "model": "ER fixed-M, iid approximation",
            "constraint": "microcanonical",
            "variant": "iid-triangular",
            "approximation": "normal",
            "sidedness": sided,
            "n": g.n_vertices,
            "m": g.m_edges,
        },
        alpha=alpha,
        sidedness=sided,
    )


test_unoptimized.__test__ = False


def sample_er(n: int, m: int, simple: bool = True, seed=None) -> Graph:
    """Uniform graph with N vertices and exactly M edges.

    ``simple=False`` draws the M slots with repetition (the multigraph null).
    """
    slots = n * (n - 1) // 2
    if simple and m > slots:
        raise InfeasibleError(f"M={m} exceeds C(N,2)={slots} for a simple graph")
    if n < 2 and m > 0:
        raise InfeasibleError("need N >= 2 to place an edge")
    rng = np.random.default_rng(seed)
    ranks = _slots.draw(rng, slots, m, replace=not simple)
    i, j = _slots.unrank(ranks, n, 1, n - 1)
    return Graph.from_edges(n, zip(i.tolist(), j.tolist()))


def sample_er_distances(n: int, m: int, simple: bool, n_samples: int, seed=None) -> np.ndarray:
    """Identity-sequence edge distances for a batch of ER samples, shape ``(n_samples, M)``."""
    slots = n * (n - 1) // 2
    if simple and m > slots:
        raise InfeasibleError(f"M={m} exceeds C(N,2)={slots} for a simple graph")
    rng = np.random.default_rng(seed)
    ranks = _slots.draw_batch(rng, slots, m, not simple, n_samples)
    return _slots.rank_distance(ranks, n, 1, n - 1)
