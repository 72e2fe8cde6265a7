"""Result containers shared by the null models: distribution tables and test reports."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np


@dataclass(frozen=True)
class DistributionTable:
    """Discrete distribution over integer raw sums.

    ``probabilities`` holds :class:`~fractions.Fraction` values when ``exact`` is
    true and floats otherwise.
    """

    support: tuple[int, ...]
    probabilities: tuple
    exact: bool = False
    truncated_mass: float = 0.0

    @classmethod
    def from_counts(cls, counts: dict[int, int], total: int) -> "DistributionTable":
        keys = sorted(k for k, c in counts.items() if c)
        return cls(tuple(keys), tuple(Fraction(counts[k], total) for k in keys), exact=True)

    @classmethod
    def from_array(cls, probs, offset: int = 0, tol: float = 0.0, truncated_mass: float = 0.0):
        probs = np.asarray(probs)
        idx = np.nonzero(probs > tol)[0]
        return cls(
            tuple(int(i) + offset for i in idx),
            tuple(float(probs[i]) for i in idx),
            exact=False,
            truncated_mass=truncated_mass,
        )

    def as_dict(self) -> dict[int, Any]:
        return dict(zip(self.support, self.probabilities))

    def pmf(self, x: int):
        return self.as_dict().get(x, Fraction(0) if self.exact else 0.0)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.support, dtype=float)

    @property
    def probs(self) -> np.ndarray:
        return np.asarray([float(p) for p in self.probabilities])

    def total(self):
        return sum(self.probabilities, Fraction(0) if self.exact else 0.0)

    def mean(self):
        return sum((x * p for x, p in zip(self.support, self.probabilities)), Fraction(0) if self.exact else 0.0)

    def variance(self):
        mu = self.mean()
        zero = Fraction(0) if self.exact else 0.0
        return sum(((x - mu) ** 2 * p for x, p in zip(self.support, self.probabilities)), zero)

    def cdf(self, x) -> float:
        """``P[raw <= x]``."""
        return float(sum(p for k, p in zip(self.support, self.probabilities) if k <= x))

    def total_variation(self, other: "DistributionTable") -> float:
        a, b = self.as_dict(), other.as_dict()
        return 0.5 * sum(abs(float(a.get(k, 0)) - float(b.get(k, 0))) for k in set(a) | set(b))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["raw_sum", "probability"])
        for x, p in zip(self.support, self.probabilities):
            w.writerow([x, repr(float(p))])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "exact": self.exact,
            "truncated_mass": self.truncated_mass,
            "support": list(self.support),
            "probability": [float(p) for p in self.probabilities],
        }
        if self.exact:
            payload["probability_exact"] = [f"{p.numerator}/{p.denominator}" for p in self.probabilities]
        return json.dumps(payload, sort_keys=True)


@dataclass
class TestReport:
    """Outcome of one hypothesis test, with the null model spelled out."""

    statistic_kind: str
    observed: float
    z: float | None
    p_value: float
    null: dict
    alpha: float
    sidedness: str
    decision: str = ""
    details: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")
        if not self.decision:
            self.decision = "reject" if self.p_value < self.alpha else "not-reject"

    @property
    def rejected(self) -> bool:
        return self.decision == "reject"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "TestReport":
        return cls(**data)
