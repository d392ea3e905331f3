import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_symmetric, dense_overlap
from symgm.sampling import make_rng, random_ket
from symgm.states import (
    KetMultiset,
    build_symmetric,
    dense_expand,
    dicke_amplitudes,
    dicke_to_dense,
    multiset_from_json,
    multiset_to_json,
    product_overlap,
    product_state,
    symmetric_state,
)


def _random_multiset(seed, d, mults):
    rng = make_rng(seed)
    return KetMultiset(np.array([random_ket(rng, d) for _ in mults]), tuple(mults))


def test_multiset_validation():
    with pytest.raises(ValueError):
        KetMultiset(np.eye(2), (1,))
    with pytest.raises(ValueError):
        KetMultiset(np.eye(2), (1, 0))
    with pytest.raises(ValueError):
        KetMultiset(np.array([[2.0, 0.0]]), (1,))
    with pytest.raises(ValueError):
        KetMultiset(np.zeros((1, 2)), (1,))
    ms = KetMultiset(np.eye(2), (2, 1))
    assert ms.total == 3 and ms.dim == 2
    with pytest.raises(ValueError):
        ms.kets[0, 0] = 5


def test_merge_identifies_global_phase():
    ms = KetMultiset(np.array([[1, 0], [1j, 0], [0, 1]]), (1, 2, 1)).merged()
    assert ms.mults == (3, 1)


def test_w_state_normalization():
    s = symmetric_state(np.eye(2), [2, 1])
    assert s.perm_A == pytest.approx(2.0)
    assert s.norm_const == pytest.approx(math.sqrt(3))
    w = np.zeros(8)
    w[[1, 2, 4]] = 1 / math.sqrt(3)
    assert np.allclose(dense_expand(s), w)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, (1, 2)), (3, (2, 1, 1)), (2, (1, 1, 1, 1))]))
def test_dense_expand_matches_permutation_sum(seed, shape):
    d, mults = shape
    ms = _random_multiset(seed, d, mults)
    s = build_symmetric(ms)
    dense = dense_expand(s)
    assert np.linalg.norm(dense) == pytest.approx(1, abs=1e-10)
    ref = brute_symmetric(ms.kets, ms.mults)
    assert abs(np.vdot(ref, dense)) == pytest.approx(1, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_product_overlap_matches_dense_contraction(seed):
    ms = _random_multiset(seed, 3, (2, 1, 2))
    s = build_symmetric(ms)
    phi = random_ket(make_rng(seed + 1), 3)
    dense = dense_expand(s)
    assert product_overlap(s, phi) == pytest.approx(dense_overlap(dense, phi, s.N), rel=1e-9)
    assert product_overlap(s, phi) == pytest.approx(abs(np.vdot(product_state(phi, s.N), dense)) ** 2)


def test_product_overlap_dimension_mismatch():
    s = symmetric_state(np.eye(2), [1, 1])
    with pytest.raises(ValueError):
        product_overlap(s, [1, 0, 0])
    assert product_overlap(s, [1, 0]) == 0.0


def test_dicke_amplitudes_match_dense():
    ms = _random_multiset(4, 2, (2, 1, 1))
    s = build_symmetric(ms)
    amps = dicke_amplitudes(s)
    assert np.linalg.norm(amps) == pytest.approx(1)
    assert np.allclose(dicke_to_dense(amps), dense_expand(s))


def test_dense_size_limit():
    s = symmetric_state([[1, 0]], [21])
    with pytest.raises(ValueError):
        dense_expand(s)


def test_json_round_trip():
    ms = _random_multiset(2, 3, (1, 4))
    doc = json.loads(json.dumps(multiset_to_json(ms)))
    back = multiset_from_json(doc)
    assert back.mults == ms.mults
    assert np.allclose(back.kets, ms.kets)


@pytest.mark.parametrize(
    "doc",
    [
        {"kets": [[[1, 0], [0, 0]]]},
        {"dim": 3, "kets": [[[1, 0], [0, 0]]]},
        {"dim": 2, "kets": [[[1, 0], [0, 0]]], "mults": [0]},
        {"dim": 2, "kets": "nope"},
    ],
)
def test_json_rejects_malformed(doc):
    with pytest.raises(ValueError):
        multiset_from_json(doc)
