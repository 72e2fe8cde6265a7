"""Ordered random graph model (ORGM).

Edges are placed uniformly inside an envelope region ``omega_in`` (``M_in`` of
them) and uniformly in its complement ``omega_out`` (``M_out``), either as
simple graphs or with repetition.  The planted sequence is the identity.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import _slots
from .errors import DegenerateSizeError, InfeasibleError, NotSupportedError, SeqLocalError
from .graph import Graph


@dataclass(frozen=True)
class EnvelopeSpec:
    """Banded (``|i - j| <= r``) or block-diagonal envelope."""

    kind: str
    r: int | None = None
    blocks: tuple[int, ...] | None = None

    @classmethod
    def banded(cls, r: int) -> "EnvelopeSpec":
        return cls("banded", r=int(r))

    @classmethod
    def block_diagonal(cls, sizes) -> "EnvelopeSpec":
        return cls("block_diagonal", blocks=tuple(int(b) for b in sizes))

    def validate(self, n: int):
        if self.kind == "banded":
            if self.r is None or not 1 <= self.r <= n - 1:
                raise SeqLocalError(f"bandwidth r={self.r} outside [1, N-1] for N={n}")
        elif self.kind == "block_diagonal":
            if not self.blocks or any(b < 1 for b in self.blocks) or sum(self.blocks) != n:
                raise SeqLocalError(f"block sizes {self.blocks} must be positive and sum to N={n}")
        else:
            raise SeqLocalError(f"unknown envelope kind {self.kind!r}")

    def block_labels(self, n: int) -> np.ndarray:
        return np.repeat(np.arange(len(self.blocks)), self.blocks)

    def in_envelope(self, i, j, n: int):
        i, j = np.asarray(i), np.asarray(j)
        if self.kind == "banded":
            return np.abs(j - i) <= self.r
        lab = self.block_labels(n)
        return lab[i] == lab[j]


def omega_sizes(n: int, envelope: EnvelopeSpec) -> tuple[int, int]:
    """Sizes of the in-envelope and out-of-envelope slot sets."""
    envelope.validate(n)
    total = n * (n - 1) // 2
    if envelope.kind == "banded":
        r = envelope.r
        inside = r * (2 * n - r - 1) // 2
    else:
        inside = sum(b * (b - 1) // 2 for b in envelope.blocks)
    return inside, total - inside


@dataclass(frozen=True)
class OrgmParams:
    n: int
    envelope: EnvelopeSpec
    m_in: int
    m_out: int
    simple: bool = True

    def __post_init__(self):
        self.envelope.validate(self.n)
        if self.m_in < 0 or self.m_out < 0:
            raise SeqLocalError("edge counts must be nonnegative")
        w_in, w_out = omega_sizes(self.n, self.envelope)
        if self.m_in > 0 and w_in == 0:
            raise InfeasibleError("in-envelope region is empty")
        if self.m_out > 0 and w_out == 0:
            raise InfeasibleError("out-of-envelope region is empty")
        if self.simple and (self.m_in > w_in or self.m_out > w_out):
            raise InfeasibleError(
                f"simple ORGM needs M_in <= {w_in} and M_out <= {w_out} "
                f"(got {self.m_in}, {self.m_out})"
            )

    @classmethod
    def banded(cls, n: int, r: int, m_in: int, m_out: int, simple: bool = True) -> "OrgmParams":
        return cls(n, EnvelopeSpec.banded(r), m_in, m_out, simple)

    @property
    def m(self) -> int:
        return self.m_in + self.m_out

    @cached_property
    def omega(self) -> tuple[int, int]:
        return omega_sizes(self.n, self.envelope)

    @property
    def eps(self) -> float | None:
        """Density ratio outside vs inside the envelope (``None`` if M_in = 0)."""
        w_in, w_out = self.omega
        if self.m_in == 0:
            return None
        if w_out == 0:
            return 0.0
        return (self.m_out / w_out) / (self.m_in / w_in)

    def to_json(self) -> str:
        payload = {"n": self.n, "m_in": self.m_in, "m_out": self.m_out, "simple": self.simple}
        if self.envelope.kind == "banded":
            payload["r"] = self.envelope.r
        else:
            payload["blocks"] = list(self.envelope.blocks)
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "OrgmParams":
        data = json.loads(text)
        env = EnvelopeSpec.banded(data["r"]) if "r" in data else EnvelopeSpec.block_diagonal(data["blocks"])
        return cls(data["n"], env, data["m_in"], data["m_out"], data.get("simple", True))


def split_edges(n: int, m: int, r: int, eps: float) -> tuple[int, int]:
    """Invert the density-ratio definition: ``(M, eps, r) -> (M_in, M_out)``."""
    w_in, w_out = omega_sizes(n, EnvelopeSpec.banded(r))
    if eps < 0:
        raise SeqLocalError("density ratio must be nonnegative")
    m_out = int(round(m * eps * w_out / (w_in + eps * w_out)))
    return m - m_out, m_out


def _block_slots(n: int, envelope: EnvelopeSpec):
    lab = envelope.block_labels(n)
    iu, ju = np.triu_indices(n, 1)
    same = lab[iu] == lab[ju]
    return (iu[same], ju[same]), (iu[~same], ju[~same])


def sample_orgm(p: OrgmParams, seed=None) -> Graph:
    """One uniform draw from the ORGM (identity is the planted sequence)."""
    rng = np.random.default_rng(seed)
    w_in, w_out = p.omega
    a = _slots.draw(rng, w_in, p.m_in, replace=not p.simple)
    b = _slots.draw(rng, w_out, p.m_out, replace=not p.simple)
    if p.envelope.kind == "banded":
        r = p.envelope.r
        i1, j1 = _slots.unrank(a, p.n, 1, r)
        i2, j2 = _slots.unrank(b, p.n, r + 1, p.n - 1)
    else:
        (ii, ji), (io, jo) = _block_slots(p.n, p.envelope)
        i1, j1, i2, j2 = ii[a], ji[a], io[b], jo[b]
    i = np.concatenate([i1, i2]).tolist()
    j = np.concatenate([j1, j2]).tolist()
    return Graph.from_edges(p.n, zip(i, j))


def sample_orgm_distances(p: OrgmParams, n_samples: int, seed=None, chunk: int = 2000) -> np.ndarray:
    """Identity-sequence edge distances for ``n_samples`` draws, shape ``(n_samples, M)``."""
    if p.envelope.kind != "banded":
        raise NotSupportedError("batch distance sampling is implemented for banded envelopes")
    rng = np.random.default_rng(seed)
    w_in, w_out = p.omega
    r = p.envelope.r
    out = np.empty((n_samples, p.m), dtype=np.int64)
    for start in range(0, n_samples, chunk):
        k = min(chunk, n_samples - start)
        a = _slots.draw_batch(rng, w_in, p.m_in, not p.simple, k)
        b = _slots.draw_batch(rng, w_out, p.m_out, not p.simple, k)
        out[start:start + k, : p.m_in] = _slots.rank_distance(a, p.n, 1, r)
        out[start:start + k, p.m_in:] = _slots.rank_distance(b, p.n, r + 1, p.n - 1)
    return out


def element_moments(m: int, size: int, simple: bool):
    """``E[A]``, ``E[A^2]`` and ``E[A A']`` (distinct slots) for one ORGM region."""
    if m == 0:
        return Fraction(0), Fraction(0), Fraction(0)
    first = Fraction(m, size)
    if simple:
        cross = Fraction(m * (m - 1), size * (size - 1)) if size > 1 else Fraction(0)
        return first, first, cross
    diag = first * Fraction(size + 2 * m - 1, size + 1)
    cross = Fraction(m * (m - 1), size * (size + 1))
    return first, diag, cross


def banded_distance_sums(n: int, r: int):
    """Closed-form distance sums for the banded envelope.

    Returns the polynomial factors multiplying the element moments in the
    first and second moments of H1: in/out first-order sums, the diagonal
    in/out terms, the in/in and out/out cross terms and the in/out product.
    """
    n, r = Fraction(n), Fraction(r)
    s_in = r * (r + 1) * (3 * n - 2 * r - 1) / 6
    s_out = (n**3 - n * (3 * r**2 + 3 * r + 1) + r * (2 * r**2 + 3 * r + 1)) / 6
    diag_in = r**2 * (r + 1) ** 2 / 6 * (n * (2 * r + 1) / (r * (r + 1)) - Fraction(3, 2))
    diag_out = (n - r) * (n - r - 1) / 12 * ((n + r + Fraction(1, 2)) ** 2 + 2 * r * (r + 1) - Fraction(1, 4))
    cross_in = r**2 * (r + 1) ** 2 / 6 * ((3 * n - 2 * r - 1) ** 2 / 6 - n * (2 * r + 1) / (r * (r + 1)) + Fraction(3, 2))
    cross_out = (n - r) * (n + 2 * r) * (n - r - 1) * (n - r + 1) * (n - r - 2) * (n + 2 * r + 2) / 36
    in_out = r * (r + 1) * (n - r) * (n - r - 1) * (n + 2 * r + 1) * (3 * n - 2 * r - 1) / 36
    return s_in, s_out, diag_in, diag_out, cross_in, cross_out, in_out


def orgm_h1_moments(p: OrgmParams, exact: bool = False):
    """Mean and variance of H1 (identity sequence) under a banded ORGM.

    With ``exact=True`` the values are :class:`~fractions.Fraction`.
    """
    if p.envelope.kind != "banded":
        raise NotSupportedError("closed-form H1 moments exist only for banded envelopes")
    if p.n < 3:
        raise DegenerateSizeError("ORGM moments need N >= 3")
    if p.m < 1:
        raise DegenerateSizeError("ORGM moments need at least one edge")
    w_in, w_out = p.omega
    if w_in < 2:
        raise DegenerateSizeError("in-envelope region has fewer than two slots")
    s_in, s_out, diag_in, diag_out, cross_in, cross_out, in_out = banded_distance_sums(p.n, p.envelope.r)
    a_in, d_in, c_in = element_moments(p.m_in, w_in, p.simple)
    a_out, d_out, c_out = element_moments(p.m_out, w_out, p.simple)
    beta = Fraction(p.m * (p.n + 1), 3)
    mean = (a_in * s_in + a_out * s_out) / beta
    second = (
        d_in * diag_in
        + d_out * diag_out
        + c_in * cross_in
        + c_out * cross_out
        + 2 * a_in * a_out * in_out
    ) / beta**2
    var = second - mean**2
    if exact:
        return mean, var
    return float(mean), float(var)


def orgm_h1_normal(p: OrgmParams) -> tuple[float, float]:
    """Normal approximation ``(mean, std)`` of H1 under the ORGM."""
    mean, var = orgm_h1_moments(p, exact=True)
    if var < 0:
        raise ArithmeticError(f"negative H1 variance {float(var)} for {p}")
    return float(mean), math.sqrt(var)
