"""Acceptance criteria, one marked group per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary (see
conftest.py).  Criterion 8 needs the real datasets: point SEQLOCAL_DATA at a
directory holding ``<name>.edges`` files in their original vertex order.
"""
import itertools
import math
import os
import warnings
from collections import Counter
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from seqlocal.er_null import (exact_h1_distribution_iid, exact_h_distribution_multigraph,
                              sample_er_distances)
from seqlocal.graph import Graph, VertexSequence, load_edge_list, wedge_count
from seqlocal.ordering import spectral_ordering
from seqlocal.orgm import OrgmParams, orgm_h1_moments, sample_orgm_distances, split_edges
from seqlocal.orgm_fit import fit_bandwidth, in_envelope_test, max_average_ratio
from seqlocal.power import analytic_power, empirical_power
from seqlocal.random_seq import exact_seq_distribution, randseq_variance, z1_factor
from seqlocal.stats import z1_scale

from .helpers import path, triangle_pendant
from .test_er_null import iid_oracle, multigraph_oracle
from .test_orgm import orgm_oracle, small_cases
from .test_random_seq import enumerated_z1_moments

acceptance = pytest.mark.acceptance


def report(label, ok, detail):
    print(f"{label}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


# 1

@acceptance(1)
def test_c1_iid_table_equals_enumeration():
    checked = 0
    for n in range(2, 7):
        for m in range(1, 5):
            assert exact_h1_distribution_iid(n, m, precision="exact").as_dict() == iid_oracle(n, m), (n, m)
            checked += 1
    assert report("criterion 1a", True, f"{checked} (N, M) pairs, exact")


@acceptance(1)
def test_c1_multigraph_table_equals_enumeration():
    checked = 0
    for n in range(2, 6):
        for m in range(1, 5):
            assert exact_h_distribution_multigraph(n, m).as_dict() == multigraph_oracle(n, m), (n, m)
            checked += 1
    assert report("criterion 1b", True, f"{checked} (N, M) pairs, exact")


# 2

@acceptance(2)
def test_c2_random_sequence_variance():
    rng = np.random.default_rng(2024)
    graphs = 0
    while graphs < 24:
        n = int(rng.integers(4, 8))
        slots = list(itertools.combinations(range(n), 2))
        m = int(rng.integers(1, len(slots) + 1))
        pick = rng.choice(len(slots), size=m, replace=False)
        g = Graph.from_edges(n, [slots[k] for k in pick])
        shift, var = enumerated_z1_moments(g)
        assert shift == 0
        assert var == randseq_variance(n, g.m_edges, wedge_count(g)), g.edges
        graphs += 1
    summ = exact_seq_distribution(path(3))
    zs = Counter()
    for raw, c in summ.histogram.items():
        zs[round(summ.z_of(raw), 12)] += c
    assert summ.var_z1 == Fraction(1, 2)
    assert zs == {-1.0: 2, 0.5: 4}
    assert report("criterion 2", True, f"{graphs} graphs exact; path-3 variance 1/2")


# 3

@acceptance(3)
def test_c3_triangle_pendant():
    summ = exact_seq_distribution(triangle_pendant())
    assert summ.n_total == 24
    assert summ.n_distinct_matrices == 12
    assert summ.min_z1() == pytest.approx(-1.1180, abs=0.005)
    assert report("criterion 3", True, f"24 sequences, 12 matrices, min z1 {summ.min_z1():.4f}")


# 4

@acceptance(4)
def test_c4_orgm_moments_monte_carlo():
    n, m, r, eps, n_samples = 50, 200, 20, 0.1, 100_000
    p = OrgmParams.banded(n, r, *split_edges(n, m, r, eps))
    mean, var = orgm_h1_moments(p)
    h = sample_orgm_distances(p, n_samples, seed=4).sum(axis=1) / (m * (n + 1) / 3)
    se_mean = math.sqrt(h.var(ddof=1) / n_samples)
    c = h - h.mean()
    se_var = math.sqrt((np.mean(c**4) - np.mean(c**2) ** 2) / n_samples)
    dm, dv = abs(h.mean() - mean) / se_mean, abs(h.var(ddof=1) - var) / se_var
    ok = dm < 3 and dv < 3
    report("criterion 4a", ok, f"mean off by {dm:.2f} SE, variance off by {dv:.2f} SE")
    assert ok


@acceptance(4)
def test_c4_orgm_moments_enumeration():
    count = 0
    for n, r, m_in, m_out, simple in small_cases(6, 4):
        p = OrgmParams.banded(n, r, m_in, m_out, simple)
        assert orgm_h1_moments(p, exact=True) == orgm_oracle(n, r, m_in, m_out, simple)
        count += 1
    assert report("criterion 4b", True, f"{count} parameter sets exact")


# 5

@acceptance(5)
def test_c5_normal_calibration():
    n, m = 100, 250
    d = sample_er_distances(n, m, simple=True, n_samples=10_000, seed=5)
    z = z1_scale(n, m) * (d.sum(axis=1) / (m * (n + 1) / 3) - 1)
    ok = -0.05 <= z.mean() <= 0.05 and 0.85 <= z.var(ddof=1) <= 1.15
    report("criterion 5", ok, f"mean {z.mean():.4f}, variance {z.var(ddof=1):.4f}")
    assert ok


# 6

@acceptance(6)
def test_c6_power_small_near_flat():
    worst = 0.0
    for r in range(1, 50):
        for eps in np.linspace(0.8, 1.0, 11):
            try:
                worst = max(worst, analytic_power(50, 200, r, float(eps)))
            except ValueError:
                continue  # infeasible cell
    report("criterion 6a", worst <= 0.10, f"max power for eps >= 0.8 is {worst:.4f}")
    assert worst <= 0.10


@acceptance(6)
def test_c6_power_not_one_at_wide_band():
    r = round(0.75 * 50)
    pw = analytic_power(50, 200, r, 0.0)
    report("criterion 6b", pw < 0.99, f"power at r/N=0.75, eps=0 is {pw:.4f}")
    assert pw < 0.99


@acceptance(6)
def test_c6_power_equals_alpha_at_eps_one():
    powers = {r: analytic_power(50, 200, r, 1.0) for r in range(5, 50)}
    worst_r = max(powers, key=lambda r: abs(powers[r] - 0.05))
    ok = all(abs(p - 0.05) <= 0.01 for p in powers.values())
    report("criterion 6c", ok,
           f"power at eps=1 spans [{min(powers.values()):.4f}, {max(powers.values()):.4f}], "
           f"worst r={worst_r}")
    assert ok


# 7

@acceptance(7)
def test_c7_hg_power_dominance():
    cells = [(0.2, 0.2), (0.4, 0.1), (0.5, 0.3), (0.6, 0.0), (0.8, 0.2)]
    rows = []
    for k, (rn, eps) in enumerate(cells):
        r = round(rn * 50)
        seed = np.random.SeedSequence(7, spawn_key=(k,))
        ph1 = empirical_power(50, 200, r, eps, statistic="H1", n_samples=200, seed=seed)
        phg = empirical_power(50, 200, r, eps, statistic="HG", n_samples=200, seed=seed)
        rows.append((rn, eps, ph1, phg))
    ok = all(phg >= ph1 - 0.05 for _, _, ph1, phg in rows)
    report("criterion 7", ok, "; ".join(f"r/N={a} eps={b}: H1 {c:.3f} HG {d:.3f}" for a, b, c, d in rows))
    assert ok


# 8

TABLE1 = {
    # name: (N, M, r*, z1 factor)
    "tribes": (16, 58, 8, -3.563),
    "montreal": (29, 75, 8, -1.275),
    "states": (49, 107, 6, -9.017),
    "highschool": (70, 366, 9, -10.884),
    "polbooks": (105, 441, 21, -13.551),
    "adjnoun": (112, 425, 30, -3.323),
    "football": (115, 613, 23, -3.476),
    "ugandan": (181, 774, 70, -3.888),
    "celegans": (297, 2359, 82, -12.655),
    "transport": (369, 441, 15, -10.846),
}


def _datasets():
    root = os.environ.get("SEQLOCAL_DATA")
    if not root:
        return {}
    found = {}
    for name in TABLE1:
        f = Path(root) / f"{name}.edges"
        if f.exists():
            found[name] = load_edge_list(f.read_bytes())
    return found


@acceptance(8)
def test_c8_table1():
    data = _datasets()
    if not data:
        warnings.warn("criterion 8 skipped: set SEQLOCAL_DATA to a directory of <name>.edges files")
        pytest.skip("Table 1 datasets unavailable")
    problems = []
    for name, g in data.items():
        _, _, r_star, factor = TABLE1[name]
        got = z1_factor(g, VertexSequence.identity(g.n_vertices))
        if abs(got - factor) > 0.01:
            problems.append(f"{name} z1 factor {got:.3f} vs {factor}")
        s = spectral_ordering(g).sequence
        fit = fit_bandwidth(g, s, "simple")
        if abs(fit.r_star - r_star) > 2:
            problems.append(f"{name} r* {fit.r_star} vs {r_star}")
        if name == "tribes":
            p = in_envelope_test(g, s, fit.r_star).p_value
            if not 0.06 <= p <= 0.25:
                problems.append(f"tribes p {p:.3f}")
    report("criterion 8", not problems, "; ".join(problems) or f"{len(data)} datasets")
    assert not problems


# 9

def _appendix_constants(n):
    pos = np.arange(1, n + 1)
    d = np.abs(pos[:, None] - pos[None, :])
    # ordered triples (i, j, k) of distinct positions
    chain = Fraction(0)
    count3 = 0
    for j in range(n):
        row = np.delete(d[j], j)
        s = int(row.sum())
        chain += s * s - int((row * row).sum())
        count3 += (n - 1) * (n - 2)
    # ordered quadruples of distinct positions: (i, j) and (k, l) disjoint
    total = Fraction(0)
    count4 = 0
    for i, j in itertools.permutations(range(n), 2):
        mask = np.ones(n, dtype=bool)
        mask[[i, j]] = False
        sub = d[np.ix_(mask, mask)]
        total += int(d[i, j]) * int(sub.sum())
        count4 += (n - 2) * (n - 3)
    return chain / count3, total / count4


@acceptance(9)
def test_c9_appendix_constants():
    for n in range(4, 31):
        e3, e4 = _appendix_constants(n)
        assert e3 == Fraction((n + 1) * (7 * n + 4), 60), n
        assert e4 == Fraction((n + 1) * (5 * n + 4), 45), n
    assert report("criterion 9", True, "N = 4..30 exact")


# 10

@acceptance(10)
def test_c10_max_average_ratio():
    one = max_average_ratio(50, 1)
    val = max_average_ratio(105, 21)
    ok = one == 1 and abs(val - 1.9793) <= 1e-4
    report("criterion 10", ok, f"r=1 -> {one}, (105, 21) -> {val:.5f}")
    assert ok
