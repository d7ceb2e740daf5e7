import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.linalg import expm

from oracles import H0, closed_form_u
from qmetro.errors import NotDensityMatrixError, NotHermitianError, ShapeError
from qmetro.matkernel import (
    herm_eig,
    is_hermitian,
    is_psd,
    is_unitary,
    propagator,
    sld_solve,
)

angles = st.floats(-10, 10, allow_nan=False)


def random_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def random_unitary(rng, d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, d, rank=None):
    rank = rank or d
    a = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


class TestHermEig:
    def test_identity(self):
        assert_allclose(herm_eig(np.eye(2)).values, [1, 1])

    def test_h0_matches_characteristic_polynomial(self):
        # tr H0 = 0, det H0 = -1
        roots = np.sort(np.roots([1, -np.trace(H0).real, np.linalg.det(H0).real]).real)
        assert_allclose(herm_eig(H0).values, roots, atol=1e-14)
        assert_allclose(roots, [-1, 1], atol=1e-14)

    def test_diagonal(self):
        e = herm_eig(np.diag([2.0, 5.0]))
        assert_allclose(e.values, [2, 5])
        assert_allclose(np.abs(e.vectors), np.eye(2))

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_reconstruction(self, rng, d):
        a = random_hermitian(rng, d)
        vals, vecs = herm_eig(a)
        norm = np.linalg.norm(a, 2)
        assert np.all(np.diff(vals) >= 0)
        assert np.max(np.abs(a @ vecs - vecs * vals)) <= 1e-12 * norm
        assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(d))) <= 1e-12

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            herm_eig([[0, 1], [0, 0]])

    def test_rejects_non_square(self):
        with pytest.raises(ShapeError):
            herm_eig(np.zeros((2, 3)))

    def test_conjugation_invariance(self, rng):
        for d in (2, 4):
            a = random_hermitian(rng, d)
            u = random_unitary(rng, d)
            assert_allclose(herm_eig(u @ a @ u.conj().T).values, herm_eig(a).values, atol=1e-10)

    def test_predicates(self, rng):
        assert is_hermitian(H0) and not is_hermitian([[0, 1], [0, 0]])
        assert is_psd(np.diag([1.0, 0.0])) and not is_psd(np.diag([1.0, -0.1]))
        assert is_unitary(random_unitary(rng, 3)) and not is_unitary(2 * np.eye(2))


class TestPropagator:
    def test_zero_angle(self):
        assert_allclose(propagator(H0, 0.0), np.eye(2), atol=1e-15)

    def test_quarter_turn(self):
        assert_allclose(propagator(H0, np.pi / 2), -1j * H0, atol=1e-14)

    @given(angles)
    def test_closed_form_and_unitary(self, theta):
        u = propagator(H0, theta)
        assert_allclose(u, closed_form_u(theta), atol=1e-12)
        assert is_unitary(u, 1e-12)

    def test_matches_general_expm(self, rng):
        h = random_hermitian(rng, 4)
        assert_allclose(propagator(h, 0.7), expm(-0.7j * h), atol=1e-12)

    @given(angles, angles)
    def test_group_property(self, t1, t2):
        assert_allclose(propagator(H0, t1) @ propagator(H0, t2), propagator(H0, t1 + t2), atol=1e-10)


class TestSld:
    def test_maximally_mixed(self):
        s = sld_solve(np.eye(2) / 2, 0.5 * np.array([[0, 1], [1, 0]]))
        assert_allclose(s, [[0, 1], [1, 0]], atol=1e-14)

    @pytest.mark.parametrize("a", [0.1, -0.2, 0.25])
    def test_diagonal(self, a):
        s = sld_solve(np.diag([0.75, 0.25]), np.diag([a, -a]))
        assert_allclose(s, np.diag([4 * a / 3, -4 * a]), atol=1e-14)

    def test_pure_state_support_convention(self):
        c = 0.3 - 0.2j
        s = sld_solve(np.diag([1.0, 0.0]), np.array([[0, c], [np.conj(c), 0]]))
        assert_allclose(s, [[0, 2 * c], [2 * np.conj(c), 0]], atol=1e-14)

    @pytest.mark.parametrize("rank", [1, 2, 3])
    def test_residual_on_support(self, rng, rank):
        d = 3
        sigma = random_density(rng, d, rank)
        h = random_hermitian(rng, d)
        dsigma = -1j * (h @ sigma - sigma @ h)
        s = sld_solve(sigma, dsigma)
        vals, vecs = np.linalg.eigh(sigma)
        p = vecs[:, vals > 1e-10]
        proj = p @ p.conj().T
        resid = proj @ (s @ sigma + sigma @ s - 2 * dsigma) @ proj
        assert np.linalg.norm(resid) <= 1e-10
        assert is_hermitian(s, 1e-12)

    def test_rejects_bad_sigma(self):
        with pytest.raises(NotDensityMatrixError):
            sld_solve(np.diag([1.0, 1.0]), np.zeros((2, 2)))
        with pytest.raises(NotDensityMatrixError):
            sld_solve(np.diag([1.2, -0.2]), np.zeros((2, 2)))

    def test_rejects_traceful_derivative(self):
        with pytest.raises(NotDensityMatrixError):
            sld_solve(np.eye(2) / 2, np.eye(2))

    @settings(max_examples=30)
    @given(st.floats(0.01, 0.99), st.floats(-2, 2))
    def test_qubit_diagonal_family(self, p, a):
        # sigma = diag(p, 1-p), dsigma = diag(a, -a): S = diag(a/p, -a/(1-p))
        s = sld_solve(np.diag([p, 1 - p]), np.diag([a, -a]))
        assert_allclose(np.diag(s).real, [a / p, -a / (1 - p)], rtol=1e-12, atol=1e-12)
