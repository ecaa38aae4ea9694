import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import logm, sqrtm
from scipy.stats import unitary_group

from kondo_entanglement import densmat
from kondo_entanglement.densmat import DensityMatrixError, rho2_free_from_g, werner_matrix
from kondo_entanglement.entanglement import (assess, concurrence, min_pt_eigenvalue, negativity,
                                             partial_transpose, von_neumann_entropy)

SINGLET = densmat.singlet_projector()


def random_state(rng, rank=4):
    a = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    m = a @ a.conj().T
    return m / np.trace(m).real


def reference_concurrence(m):
    """Wootters by the non-Hermitian R = rho (sy sy) rho* (sy sy) route."""
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    lam = np.sqrt(np.abs(np.sort(np.linalg.eigvals(m @ yy @ m.conj() @ yy).real)[::-1]))
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def test_entropy_examples():
    assert von_neumann_entropy(densmat.impurity_rho()) == pytest.approx(1.0, abs=1e-12)
    assert von_neumann_entropy(SINGLET) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(np.diag([0.75, 0.25])) == pytest.approx(
        -0.75 * math.log2(0.75) - 0.25 * math.log2(0.25), abs=1e-15)
    assert von_neumann_entropy(np.diag([0.75, 0.25])) == pytest.approx(0.811278, abs=1e-6)
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0, abs=1e-14)


def test_entropy_rejects_bad_trace():
    with pytest.raises(DensityMatrixError):
        von_neumann_entropy(np.eye(2) * 0.6)
    von_neumann_entropy(np.eye(2) * (0.5 + 1e-10))


def test_entropy_against_matrix_log():
    rng = np.random.default_rng(3)
    m = random_state(rng)
    ref = -np.trace(m @ logm(m)).real / math.log(2)
    assert von_neumann_entropy(m) == pytest.approx(ref, abs=1e-10)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_entropy_unitary_invariance(seed, rank):
    rng = np.random.default_rng(seed)
    m = random_state(rng, rank)
    u = unitary_group.rvs(4, random_state=seed)
    s = von_neumann_entropy(m)
    assert abs(von_neumann_entropy(u @ m @ u.conj().T) - s) <= 1e-9
    assert 0.0 <= s <= 2.0 + 1e-12


def test_negativity_examples():
    assert negativity(SINGLET) == pytest.approx(0.5, abs=1e-14)
    assert negativity(np.eye(4) / 4) == 0.0
    assert concurrence(SINGLET) == pytest.approx(1.0, abs=1e-12)
    assert concurrence(np.eye(4) / 4) == 0.0


@pytest.mark.parametrize("p", np.linspace(-1 / 3, 1, 25))
def test_werner_closed_forms(p):
    m = werner_matrix(p)
    assert negativity(m) == pytest.approx(max(0.0, (3 * p - 1) / 4), abs=1e-12)
    assert concurrence(m) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-7)


def test_threshold_and_two_thirds():
    assert negativity(werner_matrix(1 / 3)) == 0.0
    assert concurrence(werner_matrix(1 / 3)) == 0.0
    assert concurrence(werner_matrix(2 / 3)) == pytest.approx(0.5, abs=1e-12)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_random_states_measures(seed, rank):
    m = random_state(np.random.default_rng(seed), rank)
    c = concurrence(m)
    assert c == pytest.approx(reference_concurrence(m), abs=1e-6)
    assert 0.0 <= c <= 1.0 + 1e-12
    n = negativity(m)
    assert 0.0 <= n <= 0.5 + 1e-12
    if n > 1e-9 or c > 1e-6:
        assert (n > 0) and (c > 0)
    # either slot gives the same spectrum for two qubits
    w0 = np.linalg.eigvalsh(partial_transpose(m, 0))
    w1 = np.linalg.eigvalsh(partial_transpose(m, 1))
    np.testing.assert_allclose(w0, w1, atol=1e-12)


def test_partial_transpose_layout():
    # |u><d| on slot 2 becomes |d><u|
    m = np.zeros((4, 4))
    m[0, 1] = 1.0  # |uu><ud|
    pt = partial_transpose(m, 1)
    assert pt[1, 0] == 1.0 and np.count_nonzero(pt) == 1
    pt0 = partial_transpose(np.eye(4)[:, [2]] @ np.eye(4)[[0], :], 0)  # |du><uu| -> |uu><du|
    assert pt0[0, 2] == 1.0 and np.count_nonzero(pt0) == 1
    with pytest.raises(ValueError):
        partial_transpose(m, 2)


def test_rejects_non_states():
    with pytest.raises(DensityMatrixError):
        negativity(np.eye(4))
    with pytest.raises(DensityMatrixError):
        concurrence(np.diag([0.6, 0.5, 0.0, -0.1]))
    with pytest.raises(DensityMatrixError):
        negativity(np.eye(2) / 2)


def test_assess_examples():
    r = assess(werner_matrix(0.2))
    assert (r.entangled, r.concurrence, r.negativity) == (False, 0.0, 0.0)
    r = assess(werner_matrix(0.5), condition_lhs=1.5)
    assert r.entangled
    assert r.concurrence == pytest.approx(0.25, abs=1e-12)
    assert r.negativity == pytest.approx(0.125, abs=1e-12)
    assert r.werner_p == pytest.approx(0.5, abs=1e-15)
    assert r.to_dict()["condition_lhs"] == 1.5
    state, _ = densmat.normalize_to_werner(rho2_free_from_g(math.sqrt(0.6)))
    assert assess(state).entangled


def test_assess_rejects_bad_condition():
    with pytest.raises(ValueError):
        assess(werner_matrix(0.1), condition_lhs=-1.0)


def test_concurrence_uses_matrix_sqrt():
    m = random_state(np.random.default_rng(11), 2)
    s = sqrtm(m)
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    ev = np.sort(np.sqrt(np.abs(np.linalg.eigvals(s @ yy @ m.conj() @ yy @ s))))[::-1]
    assert concurrence(m) == pytest.approx(max(0.0, ev[0] - ev[1:].sum()), abs=1e-8)
