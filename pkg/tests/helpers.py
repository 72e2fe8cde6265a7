"""Small graphs and enumerators shared by the tests."""
import itertools

from seqlocal.graph import Graph


def triangle_pendant():
    return Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def all_simple_graphs(n, m):
    slots = list(itertools.combinations(range(n), 2))
    for chosen in itertools.combinations(slots, m):
        yield Graph.from_edges(n, chosen)
