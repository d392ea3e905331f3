"""Geometric measure of symmetrized states via maximum likelihood.

For |Psi> = c P_sym (x)_j |psi_j>^{n_j} the squared overlap with a symmetric
product state is (N!/perm A) prod_j |<phi|psi_j>|^{2 n_j}. Up to the constant
this is the likelihood of the pure state |phi> for "counts" n_j on the
rank-one POVM {|psi_j><psi_j|}, so

    Lambda^2 <= (N!/perm A) max_rho L(rho) <= (N!/perm A) prod_j (g f_j)^{n_j},

with g the largest eigenvalue of sum_j |psi_j><psi_j| and f_j = n_j / N. The
last bound is tight exactly when the frequencies are realized by a pure state;
whenever max_rho L is attained on a pure state the GM is additive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import least_squares

from .linalg import TOL, bloch_to_state, canonical_phase, fidelity, frame_operator, hermitian_eig, purity
from .majorana import bloch_points, half_sphere_check
from .permanents import gram_permanent
from .sampling import child_rngs, random_ket
from .states import SymmetricState, dense_expand, product_overlap

LOG2 = math.log(2)


@dataclass(frozen=True)
class RankOnePovm:
    """Kets |psi_j> (rows, subnormalized allowed) with outcome counts n_j.

    Counts are integers when the object describes a symmetrized state; the
    estimation routines accept any non-negative weights.
    """

    kets: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        kets = np.array(self.kets, dtype=complex)
        counts = np.array(self.counts, dtype=float)
        if kets.ndim != 2 or len(kets) != len(counts):
            raise ValueError("kets must be (M, d) with one count per ket")
        if np.any(counts < 0) or counts.sum() <= 0:
            raise ValueError("counts must be non-negative with positive total")
        object.__setattr__(self, "kets", kets)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_state(cls, s: SymmetricState) -> RankOnePovm:
        return cls(s.ms.kets, np.array(s.ms.mults, dtype=float))

    @property
    def dim(self) -> int:
        return self.kets.shape[1]

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    @property
    def freqs(self) -> np.ndarray:
        return self.counts / self.total

    @property
    def frame(self) -> np.ndarray:
        """Pi = sum_j |psi_j><psi_j|."""
        return frame_operator(self.kets)

    @property
    def pi_max(self) -> float:
        g = float(hermitian_eig(self.frame)[0][-1])
        if g <= 0:
            raise ValueError("POVM frame operator vanishes")
        return g

    def probabilities(self, rho) -> np.ndarray:
        return np.real(np.einsum("ji,ik,jk->j", self.kets.conj(), rho, self.kets))


def gm_lower_bound(p: RankOnePovm) -> float:
    """-log2[(N!/perm A) prod_j (g f_j)^{n_j}] in bits; zero counts drop out."""
    counts = np.rint(p.counts).astype(int)
    if not np.allclose(counts, p.counts):
        raise ValueError("the GM bound needs integer counts")
    used = counts > 0
    kets, n = p.kets[used], counts[used]
    total = int(n.sum())
    perm = gram_permanent(kets, n).real
    gf = p.pi_max * n / total
    log_lam = math.lgamma(total + 1) - math.log(perm) + float(np.dot(n, np.log(gf)))
    return -log_lam / LOG2


# -- maximum likelihood ------------------------------------------------------


@dataclass(frozen=True)
class MlResult:
    rho_ml: np.ndarray
    likelihood_max: float  # prod_j p_j^{n_j}
    log_likelihood: float  # natural log of the above
    purity: float
    is_pure_max: bool
    pure_maximizer: np.ndarray | None
    iterations: int
    converged: bool
    residual: float


def _log_likelihood(p: RankOnePovm, rho, used) -> float:
    probs = p.probabilities(rho)[used]
    if np.any(probs <= 0):
        return -math.inf
    return float(np.dot(p.counts[used], np.log(probs)))


def _dilute(rho, r, eps):
    t = np.eye(len(rho)) + eps * r
    out = t @ rho @ t.conj().T
    out = (out + out.conj().T) / 2
    return out / np.real(np.trace(out))


def _best_dilution(p, used, kets, rho, r, eps, logl):
    """(eps, rho, logl) of the best step among eps/2, eps, 2 eps, or None."""
    floor = logl - 1e-14 * abs(logl)
    while eps >= 1e-12:
        best = None
        for e in (eps / 2, eps, min(2 * eps, 1e4)):
            cand = _dilute(rho, r, e)
            val = _log_likelihood(p, cand, used)
            if val >= floor and (best is None or val > best[2]):
                best = (e, cand, val)
        if best is not None:
            return best
        eps /= 4
    return None


def ml_maximize(
    p: RankOnePovm,
    max_iter: int = 20000,
    tol: float = 1e-11,
    seed: int = 0,
    restarts: int = 8,
) -> MlResult:
    """Maximize L(rho) = prod_j <psi_j|rho|psi_j>^{n_j} over density matrices.

    Diluted R-rho-R iteration: rho <- (I + eR) rho (I + eR) / tr, where
    R = sum_j (f_j / p_j) |psi_j><psi_j|. Each iteration tries e/2, e and 2e
    (e starts at 1, capped at 1e4) and keeps the best; if none improves, e is
    halved until one does, so the likelihood never decreases.

    After convergence the maximum is declared pure if tr(rho^2) is within
    ``TOL.purity`` of one, or if some pure state inside the support of the
    iterate attains the same likelihood (the maximizer set can be a face
    holding both mixed and pure states).
    """
    d = p.dim
    used = p.counts > 0
    f = p.freqs[used]
    kets = p.kets[used]
    rho = np.eye(d, dtype=complex) / d
    logl = _log_likelihood(p, rho, used)
    if logl == -math.inf:
        rho = frame_operator(kets)
        rho /= np.trace(rho)
        logl = _log_likelihood(p, rho, used)

    eps = 1.0
    residual = math.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        probs = np.real(np.einsum("ji,ik,jk->j", kets.conj(), rho, kets))
        r = kets.T @ (kets.conj() * (f / probs)[:, None])
        residual = float(np.linalg.norm(r @ rho - rho))
        if residual < tol:
            converged = True
            break
        step = _best_dilution(p, used, kets, rho, r, eps, logl)
        if step is None:
            break
        eps, rho, logl = step

    pur = purity(rho)
    pure_state = None
    is_pure = pur > 1 - TOL.purity
    if is_pure:
        pure_state = canonical_phase(hermitian_eig(rho)[1][:, -1])
    else:
        vals, vecs = hermitian_eig(rho)
        support = vecs[:, vals > 1e-8 * vals[-1]]
        proj = kets @ support.conj()  # components of each ket in the support basis
        best = _maximize_pure_likelihood(proj, p.counts[used], seed=seed, restarts=restarts)
        if best.log_value >= logl - TOL.purity:
            is_pure = True
            pure_state = canonical_phase(support @ best.phi)
    return MlResult(
        rho_ml=rho,
        likelihood_max=math.exp(logl),
        log_likelihood=logl,
        purity=pur,
        is_pure_max=is_pure,
        pure_maximizer=pure_state,
        iterations=it,
        converged=converged,
        residual=residual,
    )


# -- pure-state likelihood / product overlap ---------------------------------


class _PureOptimum(NamedTuple):
    phi: np.ndarray
    log_value: float  # sum_j n_j ln |<phi|psi_j>|^2
    candidates: list  # (log_value, phi) for every restart


def _pure_objective(kets, weights, phi) -> float:
    ov = np.abs(kets.conj() @ phi) ** 2
    if np.any(ov[weights > 0] == 0):
        return -math.inf
    return float(np.dot(weights, np.log(np.where(weights > 0, ov, 1.0))))


def _ascend_pure(kets, weights, phi, max_iter=5000, tol=1e-12, delta=1e-14):
    """Fixed-point ascent phi <- normalize(phi + e (M(phi) phi / N - phi)).

    M(phi) = sum_j n_j |psi_j><psi_j| / max(|<phi|psi_j>|^2, delta); e = 1 is
    the plain fixed-point map, halved when the objective would drop.
    """
    total = float(weights.sum())
    value = _pure_objective(kets, weights, phi)
    eps = 1.0
    for _ in range(max_iter):
        amp = kets.conj() @ phi  # <psi_j|phi>
        ov = np.maximum(np.abs(amp) ** 2, delta)
        step = kets.T @ (weights * amp / ov) / total  # M(phi) phi / N
        if np.linalg.norm(step - phi) < tol:
            break
        while eps > 1e-12:
            cand = phi + eps * (step - phi)
            cand /= np.linalg.norm(cand)
            cand_value = _pure_objective(kets, weights, cand)
            if cand_value >= value:
                break
            eps /= 2
        else:
            break
        moved = np.linalg.norm(cand - phi)
        phi, value = cand, cand_value
        eps = min(2 * eps, 1.0)
        if moved < tol:
            break
    return phi, value


def _maximize_pure_likelihood(kets, weights, seed=0, restarts=32, seeds=()) -> _PureOptimum:
    """Multi-start maximization of sum_j n_j ln|<phi|psi_j>|^2 over unit phi."""
    kets = np.asarray(kets, dtype=complex)
    weights = np.asarray(weights, dtype=float)
    d = kets.shape[1]
    rngs = child_rngs(seed, restarts + 1)
    starts = []
    jitter = rngs[-1]
    for k in list(seeds) + list(kets[weights > 0]):
        k = np.asarray(k, dtype=complex)
        if np.linalg.norm(k) > 0:
            k = k / np.linalg.norm(k) + 1e-3 * random_ket(jitter, d)
            starts.append(k / np.linalg.norm(k))
    starts += [random_ket(r, d) for r in rngs[:restarts]]

    candidates = []
    for phi0 in starts:
        phi, value = _ascend_pure(kets, weights, phi0)
        candidates.append((value, phi))
    # deterministic tie-break: first best in start order
    best_idx = max(range(len(candidates)), key=lambda i: (candidates[i][0], -i))
    value, phi = candidates[best_idx]
    return _PureOptimum(phi, value, candidates)


# -- compatibility ------------------------------------------------------------


class Compatibility(NamedTuple):
    compatible: bool
    witness: np.ndarray | None
    residual: float
    inconclusive: bool = False


def compatibility_qubit(theta: float, f) -> Compatibility:
    """Can one qubit state reproduce frequencies f on {|0>,|1>} and {|t+>,|t->}?

    ``f = (f00, f01, f10, f11)``, each basis pair summing to one. With
    h_j = f_j0 - f_j1 the Bloch vector s must satisfy s.r0 = h0, s.r1 = h1;
    solving in the x-z plane gives v = h0 s0 + h1 s1 with the dual basis
    s0 = (-cot t, 0, 1), s1 = (csc t, 0, 0), and a pure solution exists iff
    |v| <= 1. The witness tops v up with a y component to unit length.
    ``residual`` is |v| - 1.
    """
    f00, f01, f10, f11 = (float(x) for x in f)
    if abs(f00 + f01 - 1) > 1e-12 or abs(f10 + f11 - 1) > 1e-12:
        raise ValueError("each basis' frequencies must sum to 1")
    h0, h1 = f00 - f01, f10 - f11
    s = math.sin(theta)
    if abs(s) < 1e-12:
        # the two bases coincide (t = 0) or swap (t = pi)
        target = h0 if math.cos(theta) > 0 else -h0
        ok = abs(h1 - target) <= 1e-12 and abs(h0) <= 1
        v = np.array([math.sqrt(max(0.0, 1 - h0 * h0)), 0.0, h0])
        return Compatibility(ok, _bloch_ket(v) if ok else None, abs(h1 - target))
    v = np.array([-h0 * math.cos(theta) / s + h1 / s, 0.0, h0])
    length = float(np.linalg.norm(v))
    if length > 1:
        return Compatibility(False, None, length - 1)
    v[1] = math.sqrt(max(0.0, 1 - length * length))
    return Compatibility(True, _bloch_ket(v), length - 1)


def _bloch_ket(r) -> np.ndarray:
    return bloch_to_state(r / np.linalg.norm(r))


def compatibility_general(
    p: RankOnePovm,
    restarts: int = 8,
    seed: int = 0,
    seeds=(),
    tol: float = TOL.compat,
) -> Compatibility:
    """Search for a pure state with |<phi|psi_j>|^2 = g f_j for all j.

    Minimizes D(phi) = sum_j (|<phi|psi_j>|^2 - g f_j)^2 by nonlinear least squares
    from several starts (trust region); compatible iff min D < ``tol``. A small but
    non-negligible minimum (below 1e-8) is flagged inconclusive.
    """
    d = p.dim
    target = p.pi_max * p.freqs
    kets = p.kets

    def residuals(x):
        phi = x[:d] + 1j * x[d:]
        phi = phi / np.linalg.norm(phi)
        return np.abs(kets.conj() @ phi) ** 2 - target

    rngs = child_rngs(seed, restarts)
    starts = [np.asarray(s, dtype=complex) for s in seeds] + [random_ket(r, d) for r in rngs]
    best_d, best_phi = math.inf, None
    for phi0 in starts:
        x0 = np.concatenate([phi0.real, phi0.imag])
        sol = least_squares(residuals, x0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        dval = float(np.sum(sol.fun ** 2))
        if dval < best_d:
            phi = sol.x[:d] + 1j * sol.x[d:]
            best_d, best_phi = dval, canonical_phase(phi / np.linalg.norm(phi))
        if best_d < tol * 1e-3:
            break
    ok = best_d < tol
    return Compatibility(ok, best_phi if ok else None, best_d, (not ok) and best_d < 1e-8)


# -- GM of symmetrized states -------------------------------------------------


@dataclass(frozen=True)
class GmResult:
    lambda_sq: float
    gm: float  # bits
    saturated: bool
    additive: bool
    witness: np.ndarray
    witnesses: tuple = ()
    lower_bound: float = math.nan  # bits

    def __post_init__(self):
        if not 0 < self.lambda_sq <= 1 + 1e-9:
            raise ValueError(f"overlap {self.lambda_sq} outside (0, 1]")


def _distinct_witnesses(candidates, best_value, tol=1e-7):
    out = []
    for value, phi in sorted(candidates, key=lambda c: -c[0]):
        if value < best_value + math.log1p(-tol):
            break
        phi = canonical_phase(phi)
        if all(fidelity(phi, w) < 1 - 1e-6 for w in out):
            out.append(phi)
    return tuple(out)


def gm_optimize(s: SymmetricState, restarts: int = 32, seed: int = 0, certify: bool = True) -> GmResult:
    """Geometric measure by direct maximization over symmetric product states.

    The overlap is maximized from ``restarts`` random starts plus every ket of
    the multiset. ``saturated`` reports whether the frequency bound is attained
    (checked through :func:`compatibility_general` seeded with the optimum);
    ``additive`` is ``saturated`` or an :func:`additivity_certify` certificate.
    """
    p = RankOnePovm.from_state(s)
    opt = _maximize_pure_likelihood(s.ms.kets, p.counts, seed=seed, restarts=restarts)
    witness = canonical_phase(opt.phi)
    lam = product_overlap(s, witness)
    bound = gm_lower_bound(p)
    gm = -math.log2(lam)
    saturated = False
    if gm - bound < 1e-4:
        saturated = compatibility_general(p, seeds=[witness], seed=seed).compatible
    additive = saturated
    if certify and not additive:
        additive = additivity_certify(s, seed=seed)
    return GmResult(
        lambda_sq=lam,
        gm=gm,
        saturated=saturated,
        additive=additive,
        witness=witness,
        witnesses=_distinct_witnesses(opt.candidates, opt.log_value),
        lower_bound=bound,
    )


# -- additivity ---------------------------------------------------------------


@dataclass(frozen=True)
class AdditivityCertificate:
    few_kets: bool  # at most three distinct kets
    half_sphere: bool | None  # qubit stars in a closed hemisphere (None if d != 2)
    ml_pure: bool | None  # likelihood maximum attained on a pure state (None if not run)

    @property
    def certified(self) -> bool:
        return bool(self.few_kets or self.half_sphere or self.ml_pure)


def additivity_certificate(s: SymmetricState, seed: int = 0, run_all: bool = False) -> AdditivityCertificate:
    """Sufficient conditions for G(Psi (x) Phi) = G(Psi) + G(Phi), cheapest first."""
    few = len(s.ms) <= 3
    half = None
    ml = None
    if s.dim == 2 and (run_all or not few):
        half = half_sphere_check(bloch_points(s)).inside
    if run_all or not (few or half):
        ml = ml_maximize(RankOnePovm.from_state(s), seed=seed).is_pure_max
    return AdditivityCertificate(few, half, ml)


def additivity_certify(s: SymmetricState, seed: int = 0) -> bool:
    """True when additivity is certified; False means "not certified"."""
    return additivity_certificate(s, seed=seed).certified


# -- joint state of two symmetric states ---------------------------------------

MAX_PAIR_TENSOR = 1 << 16


def _contract_all_but_one(t: np.ndarray, phi_conj: np.ndarray) -> np.ndarray:
    out = t
    for _ in range(t.ndim - 1):
        out = out @ phi_conj
    return out


def _ascend_symmetric_tensor(t, phi, max_iter=5000, tol=1e-12):
    """Maximize |<phi^{N}|T>|^2 for a permutation-symmetric tensor T."""
    pc = phi.conj()
    w = _contract_all_but_one(t, pc)
    g = pc @ w
    value = abs(g) ** 2
    eps = 1.0
    for _ in range(max_iter):
        if value == 0:
            break
        step = np.conj(g) * w / value  # <phi|step> = 1
        if np.linalg.norm(step - phi) < tol:
            break
        while eps > 1e-12:
            cand = phi + eps * (step - phi)
            cand /= np.linalg.norm(cand)
            cw = _contract_all_but_one(t, cand.conj())
            cg = cand.conj() @ cw
            if abs(cg) ** 2 >= value:
                break
            eps /= 2
        else:
            break
        moved = np.linalg.norm(cand - phi)
        phi, w, g, value = cand, cw, cg, abs(cg) ** 2
        eps = min(2 * eps, 1.0)
        if moved < tol:
            break
    return phi, value


def joint_tensor(s1: SymmetricState, s2: SymmetricState) -> np.ndarray:
    """Tensor of Psi (x) Phi with party k holding the pair (A_k, B_k)."""
    if s1.N != s2.N:
        raise ValueError("both states need the same number of parties")
    n, d1, d2 = s1.N, s1.dim, s2.dim
    if (d1 * d2) ** n > MAX_PAIR_TENSOR:
        raise ValueError(f"joint tensor too large: ({d1}*{d2})^{n} > {MAX_PAIR_TENSOR}")
    t1 = dense_expand(s1).reshape((d1,) * n)
    t2 = dense_expand(s2).reshape((d2,) * n)
    joint = np.multiply.outer(t1, t2)
    order = [ax for k in range(n) for ax in (k, n + k)]
    return joint.transpose(order).reshape((d1 * d2,) * n)


def tensor_product_overlap(s1: SymmetricState, s2: SymmetricState, restarts: int = 64, seed: int = 0):
    """(Lambda^2, witness) of the joint state, over symmetric product states."""
    t = joint_tensor(s1, s2)
    dim = t.shape[0]
    best = (-1.0, None)
    for rng in child_rngs(seed, restarts):
        phi, value = _ascend_symmetric_tensor(t, random_ket(rng, dim))
        if value > best[0]:
            best = (value, phi)
    return best[0], canonical_phase(best[1])


def gm_tensor_product(s1: SymmetricState, s2: SymmetricState, restarts: int = 64, seed: int = 0) -> float:
    """GM (bits) of the joint state Psi (x) Phi."""
    lam, _ = tensor_product_overlap(s1, s2, restarts=restarts, seed=seed)
    return -math.log2(lam)
