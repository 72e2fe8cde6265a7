import itertools
import json
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqlocal.errors import DegenerateSizeError, SizeCapError
from seqlocal.graph import Graph, VertexSequence, apply_permutation, wedge_count
from seqlocal.random_seq import (curve_to_csv, er_vs_random_curve, exact_seq_distribution,
                                 graph_randseq_variance, randseq_variance, sampled_seq_distribution,
                                 z1_factor)
from seqlocal.er_null import sample_er
from seqlocal.stats import z1

from .helpers import path, triangle_pendant


def enumerated_z1_moments(g):
    """Mean and variance of z1 over all N! sequences, in exact rationals."""
    n, m = g.n_vertices, g.m_edges
    raws = []
    for perm in itertools.permutations(range(n)):
        raws.append(sum(w * abs(perm[u] - perm[v]) for u, v, w in g.edges))
    k = len(raws)
    mean_raw = Fraction(sum(raws), k)
    var_raw = Fraction(sum(x * x for x in raws), k) - mean_raw**2
    mean_z_shift = Fraction(3, m * (n + 1)) * mean_raw - 1
    return mean_z_shift, Fraction(18, m * (n + 1) * (n - 2)) * var_raw


@st.composite
def small_graphs(draw, min_n=4, max_n=7, multi=False):
    n = draw(st.integers(min_n, max_n))
    slots = list(itertools.combinations(range(n), 2))
    if multi:
        chosen = draw(st.lists(st.sampled_from(slots), min_size=1, max_size=10))
    else:
        chosen = draw(st.lists(st.sampled_from(slots), min_size=1, max_size=len(slots), unique=True))
    return Graph.from_edges(n, chosen)


def test_formula_examples():
    assert randseq_variance(4, 4, 5) == Fraction(2, 5)
    assert randseq_variance(3, 2, 1) == Fraction(1, 2)
    with pytest.raises(DegenerateSizeError):
        randseq_variance(2, 1, 0)


def test_path3_enumeration():
    summ = exact_seq_distribution(path(3))
    zs = Counter()
    for raw, c in summ.histogram.items():
        zs[round(summ.z_of(raw), 12)] += c
    assert zs == {-1.0: 2, 0.5: 4}
    assert summ.var_z1 == Fraction(1, 2)


@given(small_graphs())
@settings(max_examples=40, deadline=None)
def test_variance_formula_equals_enumeration(g):
    shift, var = enumerated_z1_moments(g)
    assert shift == 0
    assert var == randseq_variance(g.n_vertices, g.m_edges, wedge_count(g))


@given(small_graphs(multi=True))
@settings(max_examples=30, deadline=None)
def test_multigraph_variance_equals_enumeration(g):
    _, var = enumerated_z1_moments(g)
    assert var == graph_randseq_variance(g)


def test_triangle_pendant_enumeration():
    summ = exact_seq_distribution(triangle_pendant())
    assert summ.n_total == 24
    assert summ.n_distinct_matrices == 12
    assert summ.min_z1() == pytest.approx(math.sqrt(20) * (0.75 - 1))
    assert summ.var_z1 == Fraction(2, 5)
    assert summ.mean_z1 == pytest.approx(0.0, abs=1e-12)
    zmin = summ.min_z1()
    assert summ.p_value(zmin) == pytest.approx(4 / 24)
    assert summ.p_value(zmin, strict=True) == 0


def test_enumeration_cap():
    with pytest.raises(SizeCapError):
        exact_seq_distribution(path(10))


@given(small_graphs(max_n=6), st.randoms())
@settings(max_examples=20, deadline=None)
def test_histogram_invariant_under_relabeling(g, rnd):
    order = list(range(g.n_vertices))
    rnd.shuffle(order)
    h = apply_permutation(g, VertexSequence.from_order(order))
    a, b = exact_seq_distribution(g), exact_seq_distribution(h)
    assert a.histogram == b.histogram
    assert a.n_distinct_matrices == b.n_distinct_matrices


def test_z1_factor():
    assert z1_factor(path(3), VertexSequence.identity(3)) == pytest.approx(-1 / math.sqrt(0.5))
    g = triangle_pendant()
    for perm in itertools.permutations(range(1, 5)):
        s = VertexSequence(perm)
        if abs(z1(g, s)) < 1e-12:
            assert z1_factor(g, s) == 0


def test_sampled_null():
    g = sample_er(34, 78, seed=8)
    n_samples = 100_000
    summ = sampled_seq_distribution(g, n_samples, seed=1)
    assert abs(summ.mean_z1) < 4 / math.sqrt(n_samples)
    # standard error of the sample variance from the fourth central moment
    zs = np.repeat([summ.z_of(r) for r in summ.histogram], list(summ.histogram.values()))
    m4 = np.mean((zs - zs.mean()) ** 4)
    se = math.sqrt((m4 - zs.var() ** 2) / n_samples)
    assert abs(float(summ.var_z1) - float(graph_randseq_variance(g))) < 3 * se
    again = sampled_seq_distribution(g, 1000, seed=5)
    assert again.histogram == sampled_seq_distribution(g, 1000, seed=5).histogram


def test_summary_serialization():
    summ = exact_seq_distribution(triangle_pendant())
    data = json.loads(summ.to_json())
    assert data["n_sequences_evaluated"] == "all (N!)"
    assert data["var_z1_formula"] == pytest.approx(0.4)
    assert summ.histogram_csv().splitlines()[0] == "raw_sum,count"


def test_er_vs_random_curve():
    curve = er_vs_random_curve(100, 200, [0.5, 1.0, 2.0], np.linspace(-4, 0, 41))
    assert "normal approximation" in curve["p_random_method"]
    for row in curve["rows"]:
        if row["z1"] == 0:
            assert (row["p_er"], row["p_random"]) == pytest.approx((0.5, 0.5))
        elif row["variance"] > 1:
            assert row["p_er"] < row["p_random"]
    assert curve_to_csv(curve).splitlines()[0] == "m3_ratio,z1,variance,p_er,p_random"
