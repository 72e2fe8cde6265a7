"""Vertex orderings that concentrate edges near the diagonal."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .errors import DegenerateSizeError, SeqLocalError
from .graph import Graph, VertexSequence, connected_components

DENSE_LIMIT = 2000
EIG_TOL = 1e-10
EIG_MAXITER = 10_000


@dataclass
class OrderingResult:
    sequence: VertexSequence
    method: str
    diagnostics: dict = field(default_factory=dict)


def _components_by_size(g: Graph):
    deg = g.degrees
    comps = [c for c in connected_components(g) if len(c) > 1 or deg[c[0]] > 0]
    isolated = [c[0] for c in connected_components(g) if len(c) == 1 and deg[c[0]] == 0]
    # stable sort keeps smallest-vertex order among equal sizes
    comps.sort(key=len, reverse=True)
    return comps, sorted(isolated)


def _sub_adjacency(g: Graph, verts: list[int]) -> csr_matrix:
    idx = {v: k for k, v in enumerate(verts)}
    keep = np.isin(g.src, verts)
    rows = [idx[u] for u in g.src[keep].tolist()]
    cols = [idx[v] for v in g.dst[keep].tolist()]
    w = g.mult[keep].astype(float)
    k = len(verts)
    a = csr_matrix((w, (rows, cols)), shape=(k, k))
    return a + a.T


def _fiedler(a: csr_matrix):
    """Second eigenpair of the normalized Laplacian.

    The vector is returned as ``D^{-1/2} v`` (the random-walk form), which is
    monotone along paths; the raw eigenvector bends at low-degree ends.
    """
    k = a.shape[0]
    if k == 2:
        return 1.0, np.array([-1.0, 1.0])
    deg = np.asarray(a.sum(axis=1)).ravel()
    dinv = 1 / np.sqrt(deg)
    # normalized adjacency; L = I - S shares its eigenvectors
    s = a.multiply(dinv[:, None]).multiply(dinv[None, :]).tocsr()
    if k <= DENSE_LIMIT:
        vals, vecs = np.linalg.eigh(np.eye(k) - s.toarray())
        return float(vals[1]), dinv * vecs[:, 1]
    # largest eigenvalues of S + I (spectrum in [0, 2]) after deflating the
    # trivial vector sqrt(d); fixed start vector for determinism
    triv = np.sqrt(deg) / np.linalg.norm(np.sqrt(deg))
    v0 = np.ones(k) + np.arange(k) / k
    v0 -= triv * (triv @ v0)

    def matvec(x):
        x = x - triv * (triv @ x)
        y = s @ x + x
        return y - triv * (triv @ y)

    op = LinearOperator((k, k), matvec=matvec, dtype=float)
    try:
        vals, vecs = eigsh(op, k=1, which="LA", v0=v0, tol=EIG_TOL, maxiter=EIG_MAXITER)
    except ArpackNoConvergence as exc:
        raise SeqLocalError(
            f"eigen-solver did not converge (tol={EIG_TOL}, maxiter={EIG_MAXITER})") from exc
    return float(2 - vals[0]), dinv * vecs[:, 0]


def _fix_sign(v: np.ndarray) -> np.ndarray:
    # first clearly nonzero entry (in vertex-id order) is made negative
    nz = np.flatnonzero(np.abs(v) > 1e-9 * np.abs(v).max())
    if nz.size and v[nz[0]] > 0:
        return -v
    return v


def spectral_ordering(g: Graph) -> OrderingResult:
    """Sort vertices by the Fiedler vector of the normalized Laplacian.

    Each connected component is ordered on its own; components follow in
    decreasing size and isolated vertices come last in input order.
    """
    if g.m_edges == 0:
        raise DegenerateSizeError("spectral ordering needs at least one edge")
    comps, isolated = _components_by_size(g)
    order: list[int] = []
    fiedler = []
    for comp in comps:
        lam, v = _fiedler(_sub_adjacency(g, comp))
        v = _fix_sign(v)
        # lexsort: last key is primary; ties fall back to vertex id
        ranked = np.lexsort((np.asarray(comp), np.round(v, 12)))
        order.extend(comp[k] for k in ranked)
        fiedler.append(lam)
    order.extend(isolated)
    return OrderingResult(
        VertexSequence.from_order(order), "spectral",
        {"fiedler_value": fiedler[0], "component_fiedler_values": fiedler,
         "n_components": len(comps), "n_isolated": len(isolated)},
    )


def _neighbors(g: Graph) -> list[list[int]]:
    nb: list[set] = [set() for _ in range(g.n_vertices)]
    for u, v in zip(g.src.tolist(), g.dst.tolist()):
        nb[u].add(v)
        nb[v].add(u)
    deg = g.degrees
    return [sorted(s, key=lambda x: (deg[x], x)) for s in nb]


def _bfs_levels(nb, start):
    level = {start: 0}
    q = deque([start])
    while q:
        u = q.popleft()
        for w in nb[u]:
            if w not in level:
                level[w] = level[u] + 1
                q.append(w)
    return level


def _pseudo_peripheral(nb, comp, deg) -> int:
    """George-Liu iteration from the minimum-degree vertex."""
    x = min(comp, key=lambda v: (deg[v], v))
    level = _bfs_levels(nb, x)
    ecc = max(level.values())
    while True:
        last = [v for v, lv in level.items() if lv == ecc]
        y = min(last, key=lambda v: (deg[v], v))
        ly = _bfs_levels(nb, y)
        ey = max(ly.values())
        if ey <= ecc:
            return x
        x, level, ecc = y, ly, ey


def rcm_ordering(g: Graph) -> OrderingResult:
    """Reversed Cuthill-McKee, per component, components by decreasing size."""
    nb = _neighbors(g)
    deg = g.degrees
    comps, isolated = _components_by_size(g)
    order: list[int] = []
    for comp in comps:
        start = _pseudo_peripheral(nb, comp, deg)
        seen = {start}
        cm = [start]
        head = 0
        while head < len(cm):
            for w in nb[cm[head]]:
                if w not in seen:
                    seen.add(w)
                    cm.append(w)
            head += 1
        order.extend(reversed(cm))
    order.extend(isolated)
    seq = VertexSequence.from_order(order)
    pos = seq.array
    bw = int(np.abs(pos[g.src] - pos[g.dst]).max()) if g.m_edges else 0
    return OrderingResult(seq, "rcm", {"bandwidth": bw, "n_components": len(comps),
                                       "n_isolated": len(isolated)})


def bandwidth(g: Graph, s: VertexSequence) -> int:
    if g.m_edges == 0:
        return 0
    pos = s.array
    return int(np.abs(pos[g.src] - pos[g.dst]).max())
