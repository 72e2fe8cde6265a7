"""Power of the unoptimized-sequence test against ORGM alternatives."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .errors import DegenerateSizeError, SeqLocalError
from .orgm import OrgmParams, orgm_h1_normal, sample_orgm_distances, split_edges
from .stats import log_moments, zg_from_raw


def critical_value(n: int, m: int, alpha: float = 0.05) -> float:
    """One-sided lower cutoff ``E*`` on H1 under the ER null."""
    if n < 3:
        raise DegenerateSizeError("critical value needs N >= 3")
    if not 0 < alpha < 1:
        raise SeqLocalError("alpha must lie in (0, 1)")
    return 1 + sps.norm.ppf(alpha) * math.sqrt((n - 2) / (2 * m * (n + 1)))


def orgm_params(n: int, m: int, r: int, eps: float, simple: bool = True) -> OrgmParams:
    m_in, m_out = split_edges(n, m, r, eps)
    return OrgmParams.banded(n, r, m_in, m_out, simple)


def analytic_power(n: int, m: int, r: int, eps: float, alpha: float = 0.05,
                   simple: bool = True) -> float:
    """Normal-approximation power of the one-sided H1 test against a banded ORGM."""
    params = orgm_params(n, m, r, eps, simple)
    e_star = critical_value(n, m, alpha)
    mean, std = orgm_h1_normal(params)
    if std == 0:
        return 1.0 if mean < e_star else 0.0
    return float(sps.norm.cdf((e_star - mean) / std))


def empirical_power(n: int, m: int, r: int, eps: float, alpha: float = 0.05,
                    statistic: str = "H1", n_samples: int = 100, seed=None,
                    simple: bool = True) -> float:
    """Rejection rate of the one-sided test over ORGM samples (identity sequence)."""
    params = orgm_params(n, m, r, eps, simple)
    d = sample_orgm_distances(params, n_samples, seed)
    if statistic == "H1":
        h = d.sum(axis=1) / (m * (n + 1) / 3)
        return float(np.mean(h < critical_value(n, m, alpha)))
    if statistic == "HG":
        raw = -np.log1p(-d / n).sum(axis=1)
        return float(np.mean(zg_from_raw(raw, n, m) < sps.norm.ppf(alpha)))
    raise SeqLocalError(f"unknown statistic {statistic!r}")


@dataclass
class PowerGrid:
    """Power over a 2-D parameter plane; infeasible cells are NaN."""

    x_name: str
    x_values: list
    y_name: str
    y_values: list
    cells: np.ndarray  # shape (len(y_values), len(x_values))
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"{self.y_name}\\{self.x_name}"] + [repr(float(x)) for x in self.x_values])
        for y, row in zip(self.y_values, self.cells):
            w.writerow([repr(float(y))] + ["" if np.isnan(v) else repr(float(v)) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "metadata": self.metadata,
            "x_name": self.x_name, "x_values": [float(x) for x in self.x_values],
            "y_name": self.y_name, "y_values": [float(y) for y in self.y_values],
            "cells": [[None if np.isnan(v) else float(v) for v in row] for row in self.cells],
        }, sort_keys=True)


def _cell_power(n, m, r, eps, mode, alpha, statistic, n_samples, seed, simple):
    if mode == "analytic":
        if statistic != "H1":
            raise SeqLocalError("analytic power exists only for H1")
        return analytic_power(n, m, r, eps, alpha, simple)
    return empirical_power(n, m, r, eps, alpha, statistic, n_samples, seed, simple)


def power_grid(grid: str, x_values, y_values, *, n: int | None = None, m: int | None = None,
               r_over_n: float | None = None, eps: float | None = None, mode: str = "analytic",
               alpha: float = 0.05, statistic: str = "H1", n_samples: int = 100, seed: int = 0,
               simple: bool = True) -> PowerGrid:
    """Power over ``(r/N, eps)`` at fixed ``(N, M)`` (``grid="r-eps"``) or over
    ``(N, 2M/N)`` at fixed ``(r/N, eps)`` (``grid="n-degree"``).

    Empirical cells draw from ``SeedSequence(seed, spawn_key=(cell,))`` so the
    result does not depend on evaluation order.
    """
    if mode not in ("analytic", "empirical"):
        raise SeqLocalError(f"unknown mode {mode!r}")
    cells = np.full((len(y_values), len(x_values)), np.nan)
    for iy, y in enumerate(y_values):
        for ix, x in enumerate(x_values):
            if grid == "r-eps":
                nn, mm, r, e = n, m, int(round(x * n)), y
            elif grid == "n-degree":
                nn = int(x)
                mm = int(round(y * nn / 2))
                r, e = int(round(r_over_n * nn)), eps
            else:
                raise SeqLocalError(f"unknown grid {grid!r}")
            cell_seed = np.random.SeedSequence(seed, spawn_key=(iy * len(x_values) + ix,))
            try:
                cells[iy, ix] = _cell_power(nn, mm, r, e, mode, alpha, statistic, n_samples,
                                            cell_seed, simple)
            except SeqLocalError:
                pass
    if grid == "r-eps":
        names = ("r/N", "eps")
        fixed = {"n": n, "m": m}
    else:
        names = ("N", "2M/N")
        fixed = {"r_over_n": r_over_n, "eps": eps}
    meta = {"grid": grid, "mode": mode, "alpha": alpha, "statistic": statistic,
            "variant": "simple" if simple else "multigraph", **fixed}
    if mode == "empirical":
        meta.update(n_samples=n_samples, seed=seed)
    return PowerGrid(names[0], list(x_values), names[1], list(y_values), cells, meta)


__all__ = ["critical_value", "analytic_power", "empirical_power", "power_grid", "PowerGrid",
           "orgm_params", "log_moments"]
