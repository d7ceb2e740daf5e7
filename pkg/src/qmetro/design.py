"""Average-case and worst-case experiment designs over a Fisher table."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LpError, NumericalError, ShapeError
from .fisher import FisherTable
from .lp import OPTIMAL, StandardLp, solve, solve_minimax

AVERAGE = "average-case"
WORST = "worst-case"
SUPPORT_TOL = 1e-8
SIMPLEX_TOL = 1e-10


@dataclass
class SupportEntry:
    index: int
    phi: float
    beta: float
    weight: float


@dataclass
class DesignDistribution:
    weights: np.ndarray
    objective: float
    kind: str
    support: list[SupportEntry]
    certificate: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_distribution(self.weights)


@dataclass
class ExperimentCounts:
    counts: np.ndarray
    total: int
    lower_bound: float
    upper_bound: float


def check_distribution(weights, tol: float = SIMPLEX_TOL) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ShapeError("design weights must be a nonempty vector")
    if np.any(w < -tol) or abs(w.sum() - 1.0) > tol:
        raise ValueError(f"weights are not a probability vector (min {w.min():.3e}, sum {w.sum():.15f})")
    return w


def _support(table: FisherTable, weights: np.ndarray) -> list[SupportEntry]:
    out = []
    for k in np.nonzero(weights > SUPPORT_TOL)[0]:
        phi, beta = table.grid.labels(k)
        out.append(SupportEntry(int(k), phi, beta, float(weights[k])))
    return out


def _regular_rows(table: FisherTable) -> np.ndarray:
    rows = np.nonzero(table.regular_configs)[0]
    if rows.size == 0:
        raise NumericalError("every configuration has a singular Fisher entry")
    return rows


def averaged_fisher(table: FisherTable) -> np.ndarray:
    """Prior-weighted Fisher information per configuration (NaN where singular)."""
    return table.G @ table.prior


def average_case(table: FisherTable) -> DesignDistribution:
    """All weight on the configuration with the largest prior-averaged Fisher information."""
    if table.n_config == 0 or table.n_theta == 0:
        raise ShapeError("empty Fisher table")
    rows = _regular_rows(table)
    g_avg = averaged_fisher(table)
    k = int(rows[np.argmax(g_avg[rows])])
    weights = np.zeros(table.n_config)
    weights[k] = 1.0
    return DesignDistribution(weights, float(g_avg[k]), AVERAGE, _support(table, weights), g_avg)


def average_case_lp(table: FisherTable) -> float:
    """Optimal average-case objective found by the generic LP solver.

    Serves as an independent check on :func:`average_case`.
    """
    rows = _regular_rows(table)
    g_avg = averaged_fisher(table)[rows]
    lp = StandardLp(g_avg, np.ones((1, rows.size)), [1.0], ["="])
    sol = solve(lp)
    if sol.status != OPTIMAL:
        raise LpError(f"average-case LP ended with status {sol.status}")
    return sol.value


def worst_case(table: FisherTable) -> DesignDistribution:
    """Maximize the smallest Fisher information over the theta samples."""
    if table.n_config == 0 or table.n_theta == 0:
        raise ShapeError("empty Fisher table")
    rows = _regular_rows(table)
    game = solve_minimax(table.G[rows])
    weights = np.zeros(table.n_config)
    weights[rows] = game.weights
    curve = evaluate_curve(table, weights)
    return DesignDistribution(weights, float(curve.min()), WORST, _support(table, weights), game.dual)


def evaluate_curve(table: FisherTable, weights) -> np.ndarray:
    """``F(lambda, theta_r) = sum_k lambda_k G[k, r]`` for every theta sample."""
    w = check_distribution(weights)
    if w.size != table.n_config:
        raise ShapeError(f"{w.size} weights for {table.n_config} configurations")
    used = w > 0
    if np.any(table.singular[used]):
        raise NumericalError("design puts weight on a singular configuration")
    return w[used] @ table.G[used]


def objective(table: FisherTable, weights, kind: str) -> float:
    curve = evaluate_curve(table, weights)
    if kind == AVERAGE:
        return float(curve @ table.prior)
    if kind == WORST:
        return float(curve.min())
    raise ValueError(f"unknown design kind {kind!r}")


def apportion(weights, total: int) -> np.ndarray:
    """Largest-remainder rounding of ``total * weights`` to integers summing to ``total``.

    Leftover units go to the largest fractional parts; ties go to the lowest index.
    """
    w = check_distribution(weights)
    if total < 1:
        raise ValueError("total number of experiments must be at least 1")
    exact = np.maximum(w, 0.0) * total
    counts = np.floor(exact).astype(int)
    leftover = total - int(counts.sum())
    order = np.argsort(-(exact - counts), kind="stable")
    counts[order[:leftover]] += 1
    return counts


def round_counts(weights, l_expt: int, table: FisherTable, kind: str = AVERAGE) -> ExperimentCounts:
    """Integer experiment counts plus computable bounds on the integer optimum.

    ``upper_bound`` is the relaxed objective at ``weights``; ``lower_bound`` is
    the objective at ``counts / l_expt``.
    """
    counts = apportion(weights, l_expt)
    upper = objective(table, weights, kind)
    lower = objective(table, counts / l_expt, kind)
    return ExperimentCounts(counts, int(l_expt), lower, upper)
