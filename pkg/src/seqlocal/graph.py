"""Graph and vertex-sequence data model, edge-list I/O and structural counts.

Vertex ids are 0-based everywhere in files and in :class:`Graph`.  Sequence
positions follow the 1-based convention of the locality formulas: vertex ``i``
sits at position ``positions[i]`` in ``1..N``.
"""
from __future__ import annotations

import io
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import EdgeListError, SeqLocalError


@dataclass(frozen=True)
class Graph:
    """Undirected multigraph without self-loops.

    ``edges`` holds ``(u, v, multiplicity)`` triples with ``u < v``, sorted and
    unique; build instances through :meth:`from_edges` unless the triples are
    already canonical.
    """

    n_vertices: int
    edges: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        if self.n_vertices < 1:
            raise SeqLocalError("a graph needs at least one vertex")
        prev = None
        for u, v, w in self.edges:
            if u == v:
                raise SeqLocalError(f"self-loop at vertex {u}")
            if not (0 <= u < v < self.n_vertices):
                raise SeqLocalError(f"edge ({u}, {v}) not canonical or out of range")
            if w < 1:
                raise SeqLocalError(f"edge ({u}, {v}) has multiplicity {w}")
            if prev is not None and (u, v) <= prev:
                raise SeqLocalError("edges must be sorted and unique")
            prev = (u, v)

    @classmethod
    def from_edges(cls, n_vertices: int, pairs: Iterable) -> "Graph":
        """Aggregate ``(u, v)`` or ``(u, v, w)`` items into a canonical graph."""
        counts: Counter = Counter()
        for item in pairs:
            u, v = int(item[0]), int(item[1])
            w = int(item[2]) if len(item) > 2 else 1
            if u == v:
                raise SeqLocalError(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            counts[(u, v)] += w
        edges = tuple((u, v, w) for (u, v), w in sorted(counts.items()))
        return cls(n_vertices, edges)

    @property
    def n(self) -> int:
        return self.n_vertices

    @cached_property
    def m_edges(self) -> int:
        return sum(w for _, _, w in self.edges)

    @property
    def m(self) -> int:
        return self.m_edges

    @cached_property
    def is_simple(self) -> bool:
        return all(w == 1 for _, _, w in self.edges)

    @cached_property
    def src(self) -> np.ndarray:
        return np.array([u for u, _, _ in self.edges], dtype=np.int64)

    @cached_property
    def dst(self) -> np.ndarray:
        return np.array([v for _, v, _ in self.edges], dtype=np.int64)

    @cached_property
    def mult(self) -> np.ndarray:
        return np.array([w for _, _, w in self.edges], dtype=np.int64)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        np.add.at(deg, self.src, self.mult)
        np.add.at(deg, self.dst, self.mult)
        return deg

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        a[self.src, self.dst] = self.mult
        a[self.dst, self.src] = self.mult
        return a

    def edge_multiset(self) -> Counter:
        return Counter({(u, v): w for u, v, w in self.edges})


@dataclass(frozen=True)
class VertexSequence:
    """Permutation of ``1..N``; ``positions[i]`` is the position of vertex ``i``."""

    positions: tuple[int, ...] = field()

    def __post_init__(self):
        n = len(self.positions)
        if sorted(self.positions) != list(range(1, n + 1)):
            raise SeqLocalError("sequence is not a bijection onto 1..N")

    @classmethod
    def identity(cls, n: int) -> "VertexSequence":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_order(cls, order: Iterable[int]) -> "VertexSequence":
        """Build from a vertex order: ``order[k]`` is the vertex placed at position k+1."""
        order = [int(v) for v in order]
        pos = [0] * len(order)
        for k, v in enumerate(order):
            if not 0 <= v < len(order):
                raise SeqLocalError(f"vertex {v} out of range")
            pos[v] = k + 1
        return cls(tuple(pos))

    def __len__(self) -> int:
        return len(self.positions)

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.positions, dtype=np.int64)

    def order(self) -> list[int]:
        """Vertices listed by position."""
        out = [0] * len(self.positions)
        for v, p in enumerate(self.positions):
            out[p - 1] = v
        return out

    def reversed(self) -> "VertexSequence":
        n = len(self.positions)
        return VertexSequence(tuple(n + 1 - p for p in self.positions))


def _as_text(text) -> str:
    if isinstance(text, (bytes, bytearray)):
        return bytes(text).decode("utf-8")
    if isinstance(text, str):
        return text
    data = text.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise EdgeListError(lineno, f"malformed {what} {token!r}") from None
    return value


def load_edge_list(text) -> Graph:
    """Parse an edge list (bytes, str or a readable stream).

    Lines are ``u v`` or ``u v w``; ``#`` starts a comment line and an optional
    first line ``%N <int>`` fixes the vertex count.
    """
    declared = None
    pairs = []
    max_id = -1
    seen_content = False
    for lineno, raw in enumerate(_as_text(text).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("%"):
            parts = line[1:].split()
            if seen_content or len(parts) != 2 or parts[0] != "N":
                raise EdgeListError(lineno, "header must be the first line and read '%N <int>'")
            declared = _parse_int(parts[1], lineno, "vertex count")
            if declared < 1:
                raise EdgeListError(lineno, "vertex count must be positive")
            seen_content = True
            continue
        seen_content = True
        parts = line.split()
        if len(parts) not in (2, 3):
            raise EdgeListError(lineno, f"expected 2 or 3 fields, got {len(parts)}")
        u = _parse_int(parts[0], lineno, "vertex id")
        v = _parse_int(parts[1], lineno, "vertex id")
        w = _parse_int(parts[2], lineno, "multiplicity") if len(parts) == 3 else 1
        if u < 0 or v < 0:
            raise EdgeListError(lineno, "negative vertex id")
        if u == v:
            raise EdgeListError(lineno, f"self-loop at vertex {u}")
        if w < 1:
            raise EdgeListError(lineno, "multiplicity must be a positive integer")
        max_id = max(max_id, u, v)
        pairs.append((u, v, w))
    if declared is None:
        if max_id < 0:
            raise EdgeListError(0, "no edges and no '%N' header")
        n = max_id + 1
    else:
        if max_id >= declared:
            raise EdgeListError(0, f"vertex id {max_id} exceeds declared N={declared}")
        n = declared
    return Graph.from_edges(n, pairs)


def dump_edge_list(g: Graph) -> str:
    """Serialize with an explicit ``%N`` header so isolated vertices survive."""
    out = io.StringIO()
    out.write(f"%N {g.n_vertices}\n")
    for u, v, w in g.edges:
        out.write(f"{u} {v}\n" if w == 1 else f"{u} {v} {w}\n")
    return out.getvalue()


def load_sequence(text, n: int | None = None) -> VertexSequence:
    """One 1-based position per line; line ``i`` holds the position of vertex ``i``."""
    values = []
    for lineno, raw in enumerate(_as_text(text).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        values.append(_parse_int(line, lineno, "position"))
    if n is not None and len(values) != n:
        raise SeqLocalError(f"sequence has {len(values)} entries, graph has N={n}")
    return VertexSequence(tuple(values))


def dump_sequence(s: VertexSequence) -> str:
    return "".join(f"{p}\n" for p in s.positions)


def wedge_count(g: Graph) -> int:
    """Number of pairs of distinct edges sharing exactly one endpoint (M3).

    Equals ``sum_i C(d_i, 2)`` on simple graphs; parallel copies of a multiedge
    share both endpoints and are excluded.
    """
    deg = g.degrees
    total = int(np.sum(deg * (deg - 1) // 2))
    parallel = int(np.sum(g.mult * (g.mult - 1) // 2))
    return total - 2 * parallel


def parallel_pairs(g: Graph) -> int:
    """Number of pairs of distinct edge copies joining the same two vertices."""
    return int(np.sum(g.mult * (g.mult - 1) // 2))


def apply_permutation(g: Graph, s: VertexSequence) -> Graph:
    """Relabel vertex ``i`` as ``positions[i] - 1`` (the matrix ``P^T A P``)."""
    if len(s) != g.n_vertices:
        raise SeqLocalError(f"sequence length {len(s)} != N={g.n_vertices}")
    pos = s.positions
    return Graph.from_edges(g.n_vertices, ((pos[u] - 1, pos[v] - 1, w) for u, v, w in g.edges))


def check_sequence(g: Graph, s: VertexSequence) -> None:
    if len(s) != g.n_vertices:
        raise SeqLocalError(f"sequence length {len(s)} != N={g.n_vertices}")


def edge_distances(g: Graph, s: VertexSequence) -> np.ndarray:
    """Sequential distance ``|pi_u - pi_v|`` per stored edge (not expanded)."""
    check_sequence(g, s)
    pos = s.array
    return np.abs(pos[g.src] - pos[g.dst])


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted vertex lists, in order of their smallest vertex."""
    parent = list(range(g.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, _ in g.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    groups: dict[int, list[int]] = {}
    for x in range(g.n_vertices):
        groups.setdefault(find(x), []).append(x)
    return [groups[k] for k in sorted(groups)]
