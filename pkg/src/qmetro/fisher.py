"""Classical and quantum Fisher information over configuration grids."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import InputFamily, ParamChannel, PovmFamily, check_povm, evolve, evolve_derivative
from .errors import NumericalError, ShapeError, SingularFisherError
from .matkernel import herm_eig, sld_solve

logger = logging.getLogger(__name__)

EPS_P = 1e-12
EPS_D = 1e-9


@dataclass(frozen=True)
class ConfigGrid:
    """Flattened (POVM, input) configurations.

    Flat index ``k * n_input + l`` addresses POVM ``k`` with input ``l``
    (POVM-major, input-minor).
    """

    phis: np.ndarray
    betas: np.ndarray

    @property
    def n_povm(self) -> int:
        return len(self.phis)

    @property
    def n_input(self) -> int:
        return len(self.betas)

    def __len__(self) -> int:
        return self.n_povm * self.n_input

    def index(self, povm_index: int, input_index: int) -> int:
        return povm_index * self.n_input + input_index

    def split(self, flat: int) -> tuple[int, int]:
        """Return ``(povm_index, input_index)`` for a flat index."""
        return divmod(int(flat), self.n_input)

    def labels(self, flat: int) -> tuple[float, float]:
        """Return ``(phi, beta)`` for a flat index."""
        k, l = self.split(flat)
        return float(self.phis[k]), float(self.betas[l])


@dataclass(frozen=True)
class FisherTable:
    """``G[k, r] = g(config k, theta_r)`` plus the prior over the theta samples.

    Entries at which the Fisher information diverges are NaN in ``G`` and
    True in ``singular``.
    """

    G: np.ndarray
    thetas: np.ndarray
    prior: np.ndarray
    singular: np.ndarray
    grid: ConfigGrid

    def __post_init__(self):
        n_cfg, n_th = self.G.shape
        if self.thetas.shape != (n_th,) or self.prior.shape != (n_th,):
            raise ShapeError("thetas and prior must match the number of table columns")
        if self.singular.shape != self.G.shape:
            raise ShapeError("singular mask must match G")
        if len(self.grid) != n_cfg:
            raise ShapeError("configuration grid size must match the number of table rows")

    @property
    def n_config(self) -> int:
        return self.G.shape[0]

    @property
    def n_theta(self) -> int:
        return self.G.shape[1]

    @property
    def regular_configs(self) -> np.ndarray:
        """Boolean mask of configurations with no singular entry."""
        return ~self.singular.any(axis=1)


def uniform_prior(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def normalize_prior(prior, n: int) -> np.ndarray:
    if prior is None:
        return uniform_prior(n)
    p = np.asarray(prior, dtype=float)
    if p.shape != (n,):
        raise ShapeError(f"prior has length {p.size}, expected {n}")
    if np.any(p < 0) or not np.all(np.isfinite(p)) or p.sum() <= 0:
        raise ValueError("prior weights must be finite, nonnegative and not all zero")
    return p / p.sum()


def fisher_from_probs(p: np.ndarray, dp: np.ndarray) -> float:
    """``sum_i dp_i^2 / p_i`` with the zero-probability convention.

    A term with ``p_i <= EPS_P`` contributes zero if ``|dp_i| <= EPS_D`` and
    raises SingularFisherError otherwise.
    """
    small = p <= EPS_P
    if np.any(small & (np.abs(dp) > EPS_D)):
        raise SingularFisherError("singular Fisher point: zero-probability outcome with nonzero slope")
    keep = ~small
    return float(np.sum(dp[keep] ** 2 / p[keep]))


def _probs_and_slopes(povm, sigma, dsigma):
    # sigma/dsigma are Hermitian by construction; discard the roundoff imaginary part
    p = np.clip(np.array([np.trace(m @ sigma).real for m in povm]), 0.0, 1.0)
    dp = np.array([np.trace(m @ dsigma).real for m in povm])
    return p, dp


def config_fisher(ch: ParamChannel, rho, povm: Sequence[np.ndarray], theta: float) -> float:
    povm = check_povm(povm)
    sigma = evolve(ch, rho, theta)
    dsigma = evolve_derivative(ch, rho, theta)
    if povm[0].shape != sigma.shape:
        raise ShapeError("POVM and state dimensions differ")
    return fisher_from_probs(*_probs_and_slopes(povm, sigma, dsigma))


def _input_rows(ch, rho, povms, thetas):
    """Fisher values for one input state against every POVM; shape (n_povm, n_theta)."""
    rows = np.zeros((len(povms), len(thetas)))
    flags = np.zeros(rows.shape, dtype=bool)
    for r, theta in enumerate(thetas):
        sigma = evolve(ch, rho, theta)
        dsigma = evolve_derivative(ch, rho, theta)
        for k, povm in enumerate(povms):
            try:
                rows[k, r] = fisher_from_probs(*_probs_and_slopes(povm, sigma, dsigma))
            except SingularFisherError:
                rows[k, r] = np.nan
                flags[k, r] = True
    return rows, flags


def build_table(
    ch: ParamChannel,
    inputs: InputFamily,
    povms: PovmFamily,
    thetas,
    prior=None,
    workers: int = 1,
) -> FisherTable:
    """Fill ``G`` for every (POVM, input) pair and theta sample.

    Rows follow the :class:`ConfigGrid` ordering.  ``workers > 1`` evaluates
    inputs concurrently; assembly order is fixed so the result does not depend
    on scheduling.
    """
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 1 or thetas.size == 0 or len(inputs) == 0 or len(povms) == 0:
        raise ShapeError("theta, input and POVM grids must be nonempty")
    prior = normalize_prior(prior, thetas.size)

    def job(rho):
        return _input_rows(ch, rho, povms.povms, thetas)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, inputs.states))
    else:
        parts = [job(rho) for rho in inputs.states]

    n_in, n_pv = len(inputs), len(povms)
    G = np.empty((n_pv * n_in, thetas.size))
    singular = np.empty(G.shape, dtype=bool)
    for l, (rows, flags) in enumerate(parts):
        G[l::n_in] = rows
        singular[l::n_in] = flags
    n_flag = int(singular.sum())
    if n_flag:
        logger.warning("%d singular Fisher entries flagged", n_flag)
    return FisherTable(G, thetas, prior, singular, ConfigGrid(povms.phis, inputs.betas))


def qfi(ch: ParamChannel, rho, theta: float) -> float:
    """Quantum Fisher information ``Tr(S^2 sigma)`` of the channel output."""
    sigma = evolve(ch, rho, theta)
    dsigma = evolve_derivative(ch, rho, theta)
    s = sld_solve(sigma, dsigma)
    return max(float(np.trace(s @ s @ sigma).real), 0.0)


def qfi_grid(ch: ParamChannel, states: Sequence[np.ndarray], thetas) -> np.ndarray:
    """QFI for every (state, theta) pair; shape (n_states, n_theta)."""
    return np.array([[qfi(ch, rho, t) for t in thetas] for rho in states])


def pure_qfi_bound(h) -> float:
    """``(lambda_max - lambda_min)^2`` of a Hermitian generator."""
    values = herm_eig(h).values
    return float((values[-1] - values[0]) ** 2)


def f_max(table: FisherTable, r: int) -> tuple[float, int]:
    """Largest Fisher value in column ``r`` and the first config attaining it."""
    if not 0 <= r < table.n_theta:
        raise IndexError(f"theta index {r} out of range")
    col = table.G[:, r]
    if np.all(table.singular[:, r]):
        raise NumericalError(f"every configuration is singular at theta index {r}")
    k = int(np.nanargmax(col))
    return float(col[k]), k


def f_max_curve(table: FisherTable) -> np.ndarray:
    return np.array([f_max(table, r)[0] for r in range(table.n_theta)])
