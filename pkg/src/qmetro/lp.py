"""Dense two-phase simplex with Bland's rule, plus the matrix-game front end.

The solver targets small problems (hundreds of rows, up to a few thousand
columns) where a deterministic vertex solution and an exact dual certificate
matter more than speed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import LpError, ShapeError

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-9
MAX_ITER = 100_000

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_KINDS = ("<=", "=", ">=")


@dataclass
class StandardLp:
    """``maximize c.x`` subject to ``A[i].x (kind_i) b[i]``.

    ``free[j]`` marks variable ``j`` as unrestricted in sign; all other
    variables are nonnegative.  Set ``maximize=False`` to minimize instead.
    """

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    kinds: Sequence[str]
    free: np.ndarray | None = None
    maximize: bool = True

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float)
        m, n = self.A.shape
        if self.c.shape != (n,) or self.b.shape != (m,):
            raise ShapeError(f"inconsistent LP dimensions: c {self.c.shape}, A {self.A.shape}, b {self.b.shape}")
        if len(self.kinds) != m or any(k not in _KINDS for k in self.kinds):
            raise ShapeError(f"kinds must be {m} entries from {_KINDS}")
        self.free = np.zeros(n, dtype=bool) if self.free is None else np.asarray(self.free, dtype=bool)
        if self.free.shape != (n,):
            raise ShapeError("free mask must have one entry per variable")
        for name, arr in (("c", self.c), ("A", self.A), ("b", self.b)):
            if not np.all(np.isfinite(arr)):
                raise ShapeError(f"{name} has non-finite entries")

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape


@dataclass
class LpSolution:
    x: np.ndarray
    value: float
    status: str
    dual: np.ndarray
    iterations: int
    basis: list[int] = field(default_factory=list, repr=False)


class _Tableau:
    """Row-reduced tableau ``B^-1 [A | b]`` with a reduced-cost row."""

    def __init__(self, A, b, basis):
        self.T = A.copy()
        self.rhs = b.copy()
        self.basis = list(basis)
        self.rows = list(range(len(basis)))
        self.iterations = 0

    def pivot(self, i, j):
        T = self.T
        piv = T[i, j]
        T[i] /= piv
        self.rhs[i] /= piv
        col = T[:, j].copy()
        col[i] = 0.0
        nz = np.nonzero(col)[0]
        if nz.size:
            T[nz] -= np.outer(col[nz], T[i])
            self.rhs[nz] -= col[nz] * self.rhs[i]
        self.basis[i] = j
        self.iterations += 1

    def run(self, cost, allowed):
        """Maximize ``cost.x`` over the current basis; Bland's rule throughout."""
        while True:
            if self.iterations > MAX_ITER:
                raise LpError("simplex iteration limit exceeded")
            cb = cost[self.basis]
            reduced = cost - cb @ self.T
            candidates = np.nonzero((reduced > PIVOT_TOL) & allowed)[0]
            if candidates.size == 0:
                return OPTIMAL
            j = int(candidates[0])
            col = self.T[:, j]
            rows = np.nonzero(col > PIVOT_TOL)[0]
            if rows.size == 0:
                return UNBOUNDED
            ratios = np.maximum(self.rhs[rows], 0.0) / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
            i = int(min(ties, key=lambda r: self.basis[r]))
            self.pivot(i, j)


def solve(lp: StandardLp) -> LpSolution:
    """Solve ``lp`` with the two-phase simplex method.

    Returns an optimal vertex together with row duals ``y`` (oriented so that
    ``b.y`` equals the optimal value), or a solution whose ``status`` is
    ``"infeasible"`` or ``"unbounded"``.
    """
    m, n = lp.shape
    sense = 1.0 if lp.maximize else -1.0

    # columns: x+ for every var, x- for free vars, one slack per inequality row
    free_idx = np.nonzero(lp.free)[0]
    ineq = [i for i, k in enumerate(lp.kinds) if k != "="]
    n_struct = n + free_idx.size
    n_cols = n_struct + len(ineq)

    A = np.zeros((m, n_cols))
    A[:, :n] = lp.A
    A[:, n:n_struct] = -lp.A[:, free_idx]
    b = lp.b.copy()
    c = np.zeros(n_cols)
    c[:n] = sense * lp.c
    c[n:n_struct] = -sense * lp.c[free_idx]

    row_sign = np.ones(m)
    slack_of = {}
    for s, i in enumerate(ineq):
        col = n_struct + s
        slack_of[i] = col
        A[i, col] = 1.0 if lp.kinds[i] == "<=" else -1.0
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    row_sign[neg] = -1.0

    basis = [-1] * m
    for i, col in slack_of.items():
        if A[i, col] == 1.0:
            basis[i] = col
    art_rows = [i for i in range(m) if basis[i] < 0]
    n_all = n_cols + len(art_rows)
    full = np.zeros((m, n_all))
    full[:, :n_cols] = A
    for a, i in enumerate(art_rows):
        full[i, n_cols + a] = 1.0
        basis[i] = n_cols + a

    tab = _Tableau(full, b, basis)
    allowed = np.ones(n_all, dtype=bool)

    if art_rows:
        phase1 = np.zeros(n_all)
        phase1[n_cols:] = -1.0
        tab.run(phase1, allowed)
        infeas = float(np.sum(tab.rhs[[i for i, j in enumerate(tab.basis) if j >= n_cols]]))
        if infeas > FEAS_TOL * (1.0 + np.abs(b).max(initial=0.0)):
            return LpSolution(np.full(n, np.nan), np.nan, INFEASIBLE, np.full(m, np.nan), tab.iterations)
        _drive_out_artificials(tab, n_cols)
        allowed[n_cols:] = False

    cost = np.zeros(n_all)
    cost[:n_cols] = c
    status = tab.run(cost, allowed)
    if status == UNBOUNDED:
        return LpSolution(np.full(n, np.nan), np.inf * sense, UNBOUNDED, np.full(m, np.nan), tab.iterations)

    # recompute the vertex and duals from the original data for a clean certificate
    live = tab.rows
    cols = tab.basis
    B = full[np.ix_(live, cols)]
    z = np.zeros(n_all)
    z[cols] = np.linalg.solve(B, b[live])
    y_t = np.zeros(m)
    y_t[live] = np.linalg.solve(B.T, cost[cols])
    x = z[:n].copy()
    x[free_idx] -= z[n:n_struct]
    x[~lp.free] = np.maximum(x[~lp.free], 0.0)
    dual = sense * row_sign * y_t
    return LpSolution(x, float(lp.c @ x), OPTIMAL, dual, tab.iterations, list(tab.basis))


def _drive_out_artificials(tab: _Tableau, n_cols: int) -> None:
    """Pivot zero-level artificials out of the basis; delete redundant rows."""
    redundant = []
    for i, j in enumerate(tab.basis):
        if j < n_cols:
            continue
        cand = np.nonzero(np.abs(tab.T[i, :n_cols]) > PIVOT_TOL)[0]
        if cand.size:
            tab.pivot(i, int(cand[0]))
        else:
            redundant.append(i)
    if redundant:
        keep = [i for i in range(len(tab.basis)) if i not in redundant]
        tab.T = tab.T[keep]
        tab.rhs = tab.rhs[keep]
        tab.basis = [tab.basis[i] for i in keep]
        tab.rows = [tab.rows[i] for i in keep]


def certificate_residuals(lp: StandardLp, sol: LpSolution) -> dict[str, float]:
    """Primal/dual feasibility and duality gap of an optimal solution.

    Keys: ``primal`` (worst constraint violation), ``dual`` (worst reduced
    cost sign violation), ``gap`` (``|c.x - b.y|``).
    """
    sense = 1.0 if lp.maximize else -1.0
    x, y = sol.x, sol.dual
    ax = lp.A @ x
    viol = [0.0]
    for i, k in enumerate(lp.kinds):
        if k == "<=":
            viol.append(ax[i] - lp.b[i])
        elif k == ">=":
            viol.append(lp.b[i] - ax[i])
        else:
            viol.append(abs(ax[i] - lp.b[i]))
    viol.append(float(np.max(-x[~lp.free], initial=0.0)))

    # dual feasibility for the sense-adjusted maximization
    ys = sense * y
    dviol = [0.0]
    for i, k in enumerate(lp.kinds):
        if k == "<=":
            dviol.append(-ys[i])
        elif k == ">=":
            dviol.append(ys[i])
    red = sense * lp.c - lp.A.T @ ys
    dviol.extend(red[~lp.free].tolist())
    dviol.extend(np.abs(red[lp.free]).tolist())
    return {
        "primal": float(max(viol)),
        "dual": float(max(dviol)),
        "gap": float(abs(lp.c @ x - lp.b @ y)),
    }


@dataclass
class MinimaxSolution:
    weights: np.ndarray
    value: float
    dual: np.ndarray
    lp: StandardLp = field(repr=False)
    solution: LpSolution = field(repr=False)


def minimax_lp(G) -> StandardLp:
    """Epigraph form of ``max_lambda min_r (G^T lambda)_r`` over the simplex."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or 0 in G.shape:
        raise ShapeError("G must be a nonempty matrix")
    n_cfg, n_th = G.shape
    A = np.zeros((n_th + 1, n_cfg + 1))
    A[:n_th, :n_cfg] = -G.T
    A[:n_th, n_cfg] = 1.0
    A[n_th, :n_cfg] = 1.0
    b = np.zeros(n_th + 1)
    b[n_th] = 1.0
    c = np.zeros(n_cfg + 1)
    c[n_cfg] = 1.0
    free = np.zeros(n_cfg + 1, dtype=bool)
    free[n_cfg] = True
    return StandardLp(c, A, b, ["<="] * n_th + ["="], free)


def solve_minimax(G) -> MinimaxSolution:
    """Optimal mixed row strategy of the matrix game ``G`` (rows maximize).

    Returns the row weights, the game value ``t = min_r (G^T lambda)_r`` and
    the dual distribution over columns.
    """
    lp = minimax_lp(G)
    sol = solve(lp)
    if sol.status != OPTIMAL:
        raise LpError(f"minimax LP ended with status {sol.status}")
    n_cfg, n_th = np.shape(G)
    weights = np.maximum(sol.x[:n_cfg], 0.0)
    weights /= weights.sum()
    value = float(np.min(np.asarray(G, dtype=float).T @ weights))
    return MinimaxSolution(weights, value, sol.dual[:n_th], lp, sol)
