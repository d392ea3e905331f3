import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symgm.linalg import (
    TOL,
    bloch_to_state,
    canonical_phase,
    density_to_bloch,
    fidelity,
    frame_operator,
    hermitian_eig,
    inner,
    is_density_matrix,
    largest_eigenvalue,
    normalize,
    projector,
    purity,
    state_to_bloch,
)
from symgm.sampling import child_rngs, make_rng, random_ket, worker_count

angles = st.floats(0, np.pi), st.floats(0, 2 * np.pi)


def test_inner_conjugates_first_argument():
    a = np.array([1j, 0])
    b = np.array([1, 0])
    assert inner(a, b) == -1j
    with pytest.raises(ValueError):
        inner(a, np.ones(3))


def test_normalize_rejects_zero():
    with pytest.raises(ValueError):
        normalize(np.zeros(3))


def test_canonical_phase_first_entry_real_positive():
    v = canonical_phase(np.exp(0.7j) * np.array([0.6, 0.8j]))
    assert v[0].imag == 0 and v[0].real > 0
    assert np.allclose(v, [0.6, 0.8j])


def test_hermitian_eig_ascending_and_reconstructs():
    rng = make_rng(3)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    vals, vecs = hermitian_eig(h)
    assert np.all(np.diff(vals) >= 0)
    assert np.allclose(vecs @ np.diag(vals) @ vecs.conj().T, h, atol=TOL.algebraic)
    assert largest_eigenvalue(h) == pytest.approx(vals[-1])
    with pytest.raises(ValueError):
        hermitian_eig(a)


def test_frame_operator_of_basis_is_identity():
    assert np.allclose(frame_operator(np.eye(3)), np.eye(3))


def test_density_checks():
    rho = projector([1, 1j]) / 2
    assert is_density_matrix(rho)
    assert purity(rho) == pytest.approx(1.0)
    assert purity(np.eye(2) / 2) == pytest.approx(0.5)
    assert not is_density_matrix(np.diag([1.5, -0.5]))


@given(*angles)
def test_bloch_round_trip(theta, phi):
    r = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    ket = bloch_to_state(r)
    assert np.allclose(state_to_bloch(ket), r, atol=1e-12)
    assert np.allclose(density_to_bloch(projector(ket)), r, atol=1e-12)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_fidelity_bounds(seed):
    rng = make_rng(seed)
    a, b = random_ket(rng, 3), random_ket(rng, 3)
    f = fidelity(a, b)
    assert -1e-15 <= f <= 1 + 1e-12
    assert fidelity(a, np.exp(1.3j) * a) == pytest.approx(1.0)


def test_bloch_rejects_non_unit():
    with pytest.raises(ValueError):
        bloch_to_state([0, 0, 0.5])


def test_rng_streams_are_reproducible():
    a = [r.normal() for r in child_rngs(7, 3)]
    b = [r.normal() for r in child_rngs(7, 3)]
    assert a == b and len(set(a)) == 3


def test_worker_count_reads_environment(monkeypatch):
    monkeypatch.setenv("SYMGM_THREADS", "4")
    assert worker_count() == 4
    monkeypatch.delenv("SYMGM_THREADS")
    assert worker_count() == 1
