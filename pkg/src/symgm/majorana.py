"""Majorana (stellar) representation of symmetric multiqubit states.

Convention: with Dicke amplitudes ``a_k`` the star polynomial is

    p(z) = sum_k (-1)^k sqrt(C(N, k)) a_k z^(N - k) = prod_l (alpha_l z - beta_l),

so each root ``z`` is a star ket proportional to (1, z), and every missing
leading degree is a star at |1> (south pole).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import linprog, minimize

from .linalg import fidelity, normalize, state_to_bloch
from .states import KetMultiset, SymmetricState, build_symmetric, dicke_amplitudes

MIN_ROUND_TRIP_FIDELITY = 1 - 1e-7


@dataclass(frozen=True)
class MajoranaPoints:
    points: np.ndarray  # (N, 3) Bloch vectors
    kets: np.ndarray  # (N, 2) star kets
    fidelity: float  # round-trip fidelity with the source state

    def multiset(self) -> KetMultiset:
        return KetMultiset.from_kets(self.kets)


def _polish(coeffs: np.ndarray, z: complex, steps: int = 4) -> complex:
    dp = np.polyder(coeffs)
    best, best_val = z, abs(np.polyval(coeffs, z))
    for _ in range(steps):
        d = np.polyval(dp, z)
        if d == 0:
            break
        z = z - np.polyval(coeffs, z) / d
        val = abs(np.polyval(coeffs, z))
        if val < best_val:
            best, best_val = z, val
    return best


def majorana_extract(state) -> MajoranaPoints:
    """Star points of a symmetric qubit state.

    ``state`` is a :class:`SymmetricState` with d=2 or a vector of N+1 Dicke
    amplitudes. Raises ``RuntimeError`` if the recovered stars do not
    reproduce the state.
    """
    if isinstance(state, SymmetricState):
        amps = dicke_amplitudes(state)
    else:
        amps = np.asarray(state, dtype=complex)
    if amps.ndim != 1 or amps.size < 2:
        raise ValueError("need at least two Dicke amplitudes")
    amps = normalize(amps)
    n = amps.size - 1
    coeffs = np.array(
        [(-1) ** k * math.sqrt(math.comb(n, k)) * amps[k] for k in range(n + 1)], dtype=complex
    )
    scale = np.max(np.abs(coeffs))
    coeffs[np.abs(coeffs) < 1e-14 * scale] = 0
    roots = [_polish(np.trim_zeros(coeffs, "f"), z) for z in np.roots(coeffs)]
    kets = [normalize([1.0, z]) for z in roots]
    kets += [np.array([0.0, 1.0], dtype=complex)] * (n - len(roots))
    kets = np.array(kets)

    rebuilt = dicke_amplitudes(build_symmetric(KetMultiset.from_kets(kets)))
    fid = fidelity(amps, normalize(rebuilt))
    if fid < MIN_ROUND_TRIP_FIDELITY:
        raise RuntimeError(f"Majorana root finding did not converge (fidelity {fid:.3e})")
    points = np.array([state_to_bloch(k) for k in kets])
    return MajoranaPoints(points, kets, fid)


def bloch_points(s: SymmetricState) -> np.ndarray:
    """Bloch vectors of a qubit multiset's kets, repeated by multiplicity.

    For a symmetrized qubit state these are exactly its Majorana points.
    """
    if s.dim != 2:
        raise ValueError("Bloch points need qubit kets")
    return np.array([state_to_bloch(k) for k in s.ms.expanded()])


class HalfSphere(NamedTuple):
    inside: bool
    witness: np.ndarray | None  # unit n with min_j n.r_j >= 0
    margin: float  # min_j n.r_j at the witness


def _min_dot(n, pts):
    return float(np.min(pts @ n))


def half_sphere_check(points, tol: float = 1e-9) -> HalfSphere:
    """Is there a closed hemisphere containing all ``points``?

    Decided by linear programming: maximize t subject to n.r_j >= t over the
    cube |n_i| <= 1. A positive optimum gives a strict witness; a zero optimum
    is resolved by searching for any nonzero feasible n on the cone
    n.r_j >= 0. The witness is then pushed towards max_n min_j n.r_j on the
    unit sphere.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        return HalfSphere(True, np.array([0.0, 0.0, 1.0]), 1.0)
    m = len(pts)
    a_ub = np.hstack([-pts, np.ones((m, 1))])
    res = linprog(
        c=[0, 0, 0, -1],
        A_ub=a_ub,
        b_ub=np.zeros(m),
        bounds=[(-1, 1)] * 3 + [(None, 2)],
        method="highs",
    )
    witness = None
    if res.status == 0 and -res.fun > tol:
        witness = res.x[:3]
    else:
        for i in range(3):
            for sgn in (1.0, -1.0):
                c = np.zeros(3)
                c[i] = -sgn
                r = linprog(c=c, A_ub=-pts, b_ub=np.zeros(m), bounds=[(-1, 1)] * 3, method="highs")
                if r.status == 0 and -r.fun > tol:
                    witness = r.x
                    break
            if witness is not None:
                break
    if witness is None:
        return HalfSphere(False, None, float("nan"))

    witness = witness / np.linalg.norm(witness)
    best = _min_dot(witness, pts)
    # maximize t s.t. n.r_j >= t, |n| <= 1, starting from the LP witness
    x0 = np.append(witness, best)
    sol = minimize(
        lambda x: -x[3],
        x0,
        jac=lambda x: np.array([0, 0, 0, -1.0]),
        method="SLSQP",
        constraints=[
            {"type": "ineq", "fun": lambda x: pts @ x[:3] - x[3], "jac": lambda x: np.hstack([pts, -np.ones((m, 1))])},
            {"type": "ineq", "fun": lambda x: 1 - x[:3] @ x[:3], "jac": lambda x: np.append(-2 * x[:3], 0)},
        ],
        options={"ftol": 1e-14, "maxiter": 200},
    )
    # SLSQP can flag a line-search failure at the optimum; the candidate is rescored anyway
    if np.linalg.norm(sol.x[:3]) > 0:
        cand = sol.x[:3] / np.linalg.norm(sol.x[:3])
        if _min_dot(cand, pts) > best:
            witness, best = cand, _min_dot(cand, pts)
    return HalfSphere(best >= -tol, witness, best)
