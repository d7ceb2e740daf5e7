"""Parametrized quantum channel, input states and POVMs.

The channel applies ``U(theta) = exp(-i theta H0)`` and then a fixed set of
Kraus operators ``A_k``, so the effective Kraus elements are
``Q_k(theta) = A_k U(theta)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    IncompletePovmError,
    NotDensityMatrixError,
    NotHermitianError,
    NumericalError,
    ShapeError,
)
from .matkernel import as_square, dagger, herm_eig, is_density_matrix, is_hermitian, is_psd

COMPLETENESS_TOL = 1e-10
IMAG_ERROR_TOL = 1e-9


def _check_completeness(ops: Sequence[np.ndarray], what: str) -> None:
    d = ops[0].shape[0]
    total = sum(dagger(a) @ a for a in ops) if what == "Kraus set" else sum(ops)
    err = np.max(np.abs(total - np.eye(d)))
    if err > COMPLETENESS_TOL:
        raise IncompletePovmError(f"{what} is not complete (deviation {err:.3e})")


@dataclass(frozen=True)
class ParamChannel:
    """``rho -> sum_k A_k U(theta) rho U(theta)^dagger A_k^dagger``."""

    hamiltonian: np.ndarray
    kraus: tuple[np.ndarray, ...]
    _eig: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        h = as_square(self.hamiltonian, "hamiltonian")
        if not is_hermitian(h):
            raise NotHermitianError("hamiltonian must be Hermitian")
        if len(self.kraus) == 0:
            raise ShapeError("at least one Kraus operator is required")
        kraus = tuple(as_square(a, "Kraus operator") for a in self.kraus)
        if any(a.shape != h.shape for a in kraus):
            raise ShapeError("Kraus operators must match the Hamiltonian dimension")
        _check_completeness(kraus, "Kraus set")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "kraus", kraus)
        object.__setattr__(self, "_eig", tuple(herm_eig(h)))

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def unitary(self, theta: float) -> np.ndarray:
        values, vectors = self._eig
        return (vectors * np.exp(-1j * theta * values)) @ dagger(vectors)

    def _apply_kraus(self, x: np.ndarray) -> np.ndarray:
        return sum(a @ x @ dagger(a) for a in self.kraus)

    def _check_input(self, rho) -> np.ndarray:
        rho = as_square(rho, "rho")
        if rho.shape != self.hamiltonian.shape:
            raise ShapeError(f"state of shape {rho.shape} does not match channel dimension {self.dim}")
        return rho


def unitary_with_noise(hamiltonian, kraus: Sequence | None = None) -> ParamChannel:
    h = np.asarray(hamiltonian, dtype=complex)
    if kraus is None:
        kraus = [np.eye(h.shape[0], dtype=complex)]
    return ParamChannel(h, tuple(kraus))


def qubit_input(beta: float) -> np.ndarray:
    """Density matrix of ``cos(beta)|0> + sin(beta)|1>``."""
    v = np.array([np.cos(beta), np.sin(beta)], dtype=complex)
    return np.outer(v, v.conj())


def qubit_povm(phi: float) -> list[np.ndarray]:
    """Two-outcome projective POVM ``{|z><z|, I - |z><z|}``, ``|z> = cos(phi)|0> + sin(phi)|1>``."""
    m1 = qubit_input(phi)
    return [m1, np.eye(2, dtype=complex) - m1]


def amplitude_damping(gamma: float) -> list[np.ndarray]:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"damping probability must lie in [0, 1], got {gamma}")
    a1 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    a2 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return [a1, a2]


@dataclass(frozen=True)
class InputFamily:
    betas: np.ndarray
    states: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.betas) != len(self.states):
            raise ShapeError("one state per beta label is required")
        for s in self.states:
            if not is_density_matrix(s, 1e-12):
                raise NotDensityMatrixError("input states must be density matrices")

    @classmethod
    def qubit(cls, betas) -> "InputFamily":
        betas = np.asarray(betas, dtype=float)
        return cls(betas, tuple(qubit_input(b) for b in betas))

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class PovmFamily:
    phis: np.ndarray
    povms: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        if len(self.phis) != len(self.povms):
            raise ShapeError("one POVM per phi label is required")
        for povm in self.povms:
            check_povm(povm)

    @classmethod
    def qubit(cls, phis) -> "PovmFamily":
        phis = np.asarray(phis, dtype=float)
        return cls(phis, tuple(tuple(qubit_povm(p)) for p in phis))

    def __len__(self) -> int:
        return len(self.povms)


def check_povm(povm: Sequence[np.ndarray]) -> list[np.ndarray]:
    if len(povm) == 0:
        raise IncompletePovmError("POVM has no elements")
    elems = [as_square(m, "POVM element") for m in povm]
    if any(m.shape != elems[0].shape for m in elems):
        raise ShapeError("POVM elements differ in shape")
    for m in elems:
        if not is_psd(m, 1e-12):
            raise IncompletePovmError("POVM elements must be positive semidefinite")
    _check_completeness(elems, "POVM")
    return elems


def evolve(ch: ParamChannel, rho, theta: float) -> np.ndarray:
    """Channel output ``sigma(theta)``."""
    rho = ch._check_input(rho)
    u = ch.unitary(theta)
    return ch._apply_kraus(u @ rho @ dagger(u))


def evolve_derivative(ch: ParamChannel, rho, theta: float) -> np.ndarray:
    """Analytic ``d sigma / d theta = sum_k A_k (-i [H0, U rho U^dagger]) A_k^dagger``."""
    rho = ch._check_input(rho)
    u = ch.unitary(theta)
    x = u @ rho @ dagger(u)
    h = ch.hamiltonian
    return ch._apply_kraus(-1j * (h @ x - x @ h))


def _real_traces(povm: Sequence[np.ndarray], x: np.ndarray) -> np.ndarray:
    vals = np.array([np.trace(m @ x) for m in povm])
    worst = np.max(np.abs(vals.imag))
    if worst > IMAG_ERROR_TOL:
        raise NumericalError(f"trace has imaginary residue {worst:.3e}; operator is not Hermitian")
    return vals.real


def outcome_probs(sigma, povm: Sequence[np.ndarray]) -> np.ndarray:
    """``p_i = Tr(M_i sigma)``, clamped to ``[0, 1]``."""
    sigma = as_square(sigma, "sigma")
    elems = check_povm(povm)
    if elems[0].shape != sigma.shape:
        raise ShapeError("POVM and state dimensions differ")
    return np.clip(_real_traces(elems, sigma), 0.0, 1.0)


def prob_gradient(ch: ParamChannel, rho, povm: Sequence[np.ndarray], theta: float) -> np.ndarray:
    """``d p_i / d theta = Tr(M_i d sigma/d theta)``."""
    elems = check_povm(povm)
    dsigma = evolve_derivative(ch, rho, theta)
    if elems[0].shape != dsigma.shape:
        raise ShapeError("POVM and state dimensions differ")
    return _real_traces(elems, dsigma)
