import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import fibonacci_sphere, hemisphere_grid
from symgm.linalg import bloch_to_state, fidelity, normalize
from symgm.majorana import bloch_points, half_sphere_check, majorana_extract
from symgm.sampling import make_rng, random_unit_vectors
from symgm.states import build_symmetric, dicke_amplitudes, symmetric_state

TETRAHEDRON = np.array(
    [[0, 0, 1]]
    + [[2 * math.sqrt(2) / 3 * math.cos(p), 2 * math.sqrt(2) / 3 * math.sin(p), -1 / 3] for p in (0, 2 * math.pi / 3, 4 * math.pi / 3)]
)


def test_ghz_stars_sit_on_the_equator():
    pts = majorana_extract(np.array([1, 0, 0, 1]) / math.sqrt(2)).points
    assert np.allclose(pts[:, 2], 0, atol=1e-12)
    angles = sorted(np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * math.pi))
    assert np.allclose(np.diff(angles), 2 * math.pi / 3)


def test_dicke_basis_states_use_the_poles():
    # |N=3, k=1>: two stars at |0>, one at |1>
    pts = majorana_extract([0, 1, 0, 0]).points
    z = sorted(pts[:, 2])
    assert np.allclose(z, [-1, 1, 1])
    assert np.allclose(majorana_extract([0, 0, 1]).points[:, 2], [-1, -1])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_round_trip_random_amplitudes(seed, n):
    rng = make_rng(seed)
    amps = normalize(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1))
    mp = majorana_extract(amps)
    assert mp.fidelity >= 1 - 1e-7
    rebuilt = dicke_amplitudes(build_symmetric(mp.multiset()))
    assert fidelity(rebuilt, amps) >= 1 - 1e-7


def test_stars_of_a_symmetrized_state_are_its_kets():
    rng = make_rng(8)
    dirs = random_unit_vectors(rng, 4)
    s = symmetric_state([bloch_to_state(r) for r in dirs])
    got = majorana_extract(s).points
    for p in bloch_points(s):
        assert np.min(np.linalg.norm(got - p, axis=1)) < 1e-6


def test_tetrahedron_is_not_in_a_hemisphere():
    hs = half_sphere_check(TETRAHEDRON)
    assert not hs.inside
    assert hemisphere_grid(TETRAHEDRON, fibonacci_sphere(200_000)) < -0.3


def test_antipodal_pair_is_on_the_boundary():
    hs = half_sphere_check([[0, 0, 1], [0, 0, -1]])
    assert hs.inside
    assert hs.margin == pytest.approx(0, abs=1e-9)
    assert abs(hs.witness[2]) < 1e-9


def test_octahedron_fails_and_cap_passes():
    octa = np.vstack([np.eye(3), -np.eye(3)])
    assert not half_sphere_check(octa).inside
    hs = half_sphere_check([[0, 0, 1], [0.6, 0, 0.8], [0, 0.6, 0.8]])
    assert hs.inside and hs.margin > 0.8


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 7))
def test_half_sphere_agrees_with_direction_grid(seed, m):
    pts = random_unit_vectors(make_rng(seed), m)
    hs = half_sphere_check(pts)
    grid = hemisphere_grid(pts, fibonacci_sphere(20_000))
    if abs(grid) > 0.05:
        assert hs.inside == (grid > 0)
    if hs.inside:
        assert np.min(pts @ hs.witness) >= -1e-9
        assert hs.margin >= grid - 1e-6
