"""Measurement families: Heisenberg-Weyl operators, MUBs in prime dimension,
HW-covariant SIC-POVMs for d = 2, 3, and GMs of the states they generate."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .estimation import (
    Compatibility,
    GmResult,
    RankOnePovm,
    additivity_certify,
    compatibility_general,
    compatibility_qubit,
    gm_lower_bound,
    gm_optimize,
)
from .linalg import canonical_phase, fidelity
from .permanents import DickeCounts, gram, permanent_dicke, permanent_ryser
from .sampling import make_rng, random_ket, worker_count
from .states import KetMultiset, SymmetricState, build_symmetric, product_overlap


def _root_of_unity(k: int, d: int) -> complex:
    return complex(np.exp(2j * np.pi * (k % d) / d))


def hw_operators(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Shift X|e_k> = |e_{k+1 mod d}> and phase Z|e_k> = w^k |e_k>, w = e^{2 pi i/d}."""
    if d < 1:
        raise ValueError("dimension must be positive")
    x = np.zeros((d, d), dtype=complex)
    for k in range(d):
        x[(k + 1) % d, k] = 1
    z = np.diag([_root_of_unity(k, d) for k in range(d)])
    return x, z


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, math.isqrt(n) + 1))


# -- two qubit bases ----------------------------------------------------------------


def dicke_state(c: DickeCounts) -> SymmetricState:
    """Symmetrization of |0>^n00 |1>^n01 |t+>^n10 |t->^n11."""
    used = [i for i, n in enumerate(c.counts) if n > 0]
    return build_symmetric(KetMultiset(c.kets()[used], tuple(c.counts[i] for i in used)))


def dicke_frequencies(c: DickeCounts) -> tuple[float, float, float, float]:
    """Per-basis frequencies f_jk = n_jk / N_j (a basis with N_j = 0 gets (1/2, 1/2))."""
    n0, n1 = c.n00 + c.n01, c.n10 + c.n11
    f0 = (c.n00 / n0, c.n01 / n0) if n0 else (0.5, 0.5)
    f1 = (c.n10 / n1, c.n11 / n1) if n1 else (0.5, 0.5)
    return f0 + f1


def dicke_gm_bound(c: DickeCounts) -> float:
    """-log2[(N!/perm A) prod f_jk^{n_jk}] with per-basis frequencies, in bits."""
    f = dicke_frequencies(c)
    log_lam = math.lgamma(c.total + 1) - math.log(permanent_dicke(c))
    log_lam += sum(n * math.log(fj) for n, fj in zip(c.counts, f) if n > 0)
    return -log_lam / math.log(2)


def dicke_compatibility(c: DickeCounts) -> Compatibility:
    """Closed-form saturation test; a single populated basis is always compatible."""
    if c.n00 + c.n01 and c.n10 + c.n11:
        return compatibility_qubit(c.theta, dicke_frequencies(c))
    kets = c.kets()[:2] if c.n10 + c.n11 == 0 else c.kets()[2:]
    f = dicke_frequencies(c)[:2] if c.n10 + c.n11 == 0 else dicke_frequencies(c)[2:]
    witness = math.sqrt(f[0]) * kets[0] + math.sqrt(f[1]) * kets[1]
    return Compatibility(True, canonical_phase(witness), 0.0)


# -- MUBs ---------------------------------------------------------------------


@dataclass(frozen=True)
class MubSet:
    dim: int
    bases: np.ndarray  # (b, d, d); bases[j, k] is ket k of basis j

    @property
    def count(self) -> int:
        return self.bases.shape[0]

    def kets(self) -> np.ndarray:
        return self.bases.reshape(-1, self.dim)


def _xz_eigenbasis(d: int, a: int) -> np.ndarray:
    """Eigenbasis of X Z^a, rows ordered by eigenvalue index m.

    From (X Z^a v)_{k+1} = w^{ak} v_k = lambda v_{k+1}: with
    lambda = mu w^m and mu^d = w^{a d(d-1)/2},
    v_k = mu^{-k} w^{-mk + a k(k-1)/2} / sqrt(d).
    """
    k = np.arange(d)
    mu = np.exp(1j * np.pi * a * (d - 1) / d)
    rows = []
    for m in range(d):
        phase = np.exp(2j * np.pi * ((-m * k + a * (k * (k - 1) // 2)) % d) / d)
        rows.append(canonical_phase(mu ** (-k) * phase / np.sqrt(d)))
    return np.array(rows)


def build_mubs(d: int, b: int | None = None) -> MubSet:
    """``b`` mutually unbiased bases in prime dimension ``d`` (default all d+1):
    the Z eigenbasis followed by eigenbases of X Z^a, a = 0..d-1."""
    if not is_prime(d):
        raise ValueError(f"MUB construction needs a prime dimension, got {d}")
    b = d + 1 if b is None else b
    if not 1 <= b <= d + 1:
        raise ValueError(f"number of bases must lie in [1, {d + 1}]")
    bases = [np.eye(d, dtype=complex)] + [_xz_eigenbasis(d, a) for a in range(d)]
    return MubSet(d, np.array(bases[:b]))


def check_mubs(m: MubSet, tol: float = 1e-10) -> bool:
    """|<e^j_k|e^l_m>|^2 == (1/d)(1 - d_jl) + d_jl d_km for every pair."""
    kets = m.kets()
    ov = np.abs(kets.conj() @ kets.T) ** 2
    labels = np.repeat(np.arange(m.count), m.dim)
    same = labels[:, None] == labels[None, :]
    expected = np.where(same, np.eye(len(kets)), 1 / m.dim)
    return bool(np.max(np.abs(ov - expected)) < tol)


def mub_state(m: MubSet, reps) -> SymmetricState:
    """Symmetrize every ket of basis j with multiplicity ``reps[j]``."""
    reps = [int(n) for n in reps]
    if len(reps) != m.count or min(reps) < 1:
        raise ValueError("need one positive multiplicity per basis")
    mults = np.repeat(reps, m.dim)
    return build_symmetric(KetMultiset(m.kets(), tuple(mults)))


def mub_state_gm(m: MubSet, reps, restarts: int = 32, seed: int = 0) -> GmResult:
    """GM of the MUB-generated state.

    The bound -log2(N!/(d^N perm A)) holds with equality iff some pure state is
    unbiased to every ket, which never happens for a complete set. When the
    bound is saturated its value is returned; otherwise the GM comes from
    direct optimization.
    """
    s = mub_state(m, reps)
    d, n = m.dim, s.N
    bound = -(math.lgamma(n + 1) - n * math.log(d) - math.log(s.perm_A)) / math.log(2)
    saturated = False
    witness = None
    if m.count < d + 1:
        comp = compatibility_general(RankOnePovm.from_state(s), seed=seed)
        saturated, witness = comp.compatible, comp.witness
    if saturated:
        lam = product_overlap(s, witness)
        return GmResult(
            lambda_sq=lam,
            gm=-math.log2(lam),
            saturated=True,
            additive=True,
            witness=witness,
            witnesses=(witness,),
            lower_bound=bound,
        )
    res = gm_optimize(s, restarts=restarts, seed=seed)
    return GmResult(
        lambda_sq=res.lambda_sq,
        gm=res.gm,
        saturated=False,
        additive=res.additive,
        witness=res.witness,
        witnesses=res.witnesses,
        lower_bound=bound,
    )


# -- SIC-POVMs ------------------------------------------------------------------


@dataclass(frozen=True)
class SicPovm:
    dim: int
    kets: np.ndarray  # (d^2, d), normalized
    fiducial: np.ndarray
    labels: tuple  # (k1, k2) for each ket


def qubit_fiducial() -> np.ndarray:
    return np.array(
        [math.sqrt((3 + math.sqrt(3)) / 6), np.exp(1j * np.pi / 4) * math.sqrt((3 - math.sqrt(3)) / 6)]
    )


def qutrit_fiducial(t: float) -> np.ndarray:
    """(|e1> - e^{it}|e2>)/sqrt(2)."""
    return np.array([0, 1, -np.exp(1j * t)]) / math.sqrt(2)


def hw_orbit(fiducial) -> SicPovm:
    """The d^2 kets X^{k1} Z^{k2}|psi>, lexicographic in (k1, k2)."""
    psi = np.asarray(fiducial, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    d = len(psi)
    x, z = hw_operators(d)
    kets, labels = [], []
    for k1 in range(d):
        for k2 in range(d):
            kets.append(np.linalg.matrix_power(x, k1) @ np.linalg.matrix_power(z, k2) @ psi)
            labels.append((k1, k2))
    return SicPovm(d, np.array(kets), psi, tuple(labels))


def verify_fiducial(psi, tol: float = 1e-9) -> bool:
    """|<psi|X^{k1} Z^{k2}|psi>| == 1/sqrt(d+1) for all (k1, k2) != (0, 0)."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    d = len(psi)
    x, z = hw_operators(d)
    target = 1 / math.sqrt(d + 1)
    for k1 in range(d):
        for k2 in range(d):
            if k1 == k2 == 0:
                continue
            op = np.linalg.matrix_power(x, k1) @ np.linalg.matrix_power(z, k2)
            if abs(abs(np.vdot(psi, op @ psi)) - target) > tol:
                return False
    return True


def verify_sic(kets, tol: float = 1e-9) -> bool:
    """Pairwise |<psi_j|psi_k>|^2 == (1 + d delta_jk)/(d+1), and sum_j |psi_j><psi_j| == d I."""
    kets = np.asarray(kets, dtype=complex)
    if kets.ndim != 2:
        return False
    n, d = kets.shape
    if n != d * d:
        return False
    ov = np.abs(kets.conj() @ kets.T) ** 2
    expected = (1 + d * np.eye(n)) / (d + 1)
    if np.max(np.abs(ov - expected)) > tol:
        return False
    frame = kets.T @ kets.conj()
    return bool(np.linalg.norm(frame - d * np.eye(d)) < tol)


def two_design_check(s: SicPovm, trials: int = 100, seed: int = 0, tol: float = 1e-9) -> bool:
    """For random phi: sum_j |<phi|psi_j>|^4 == 2d/(d+1) and sum_j |<phi|psi_j>|^2 == d."""
    d = s.dim
    rng = make_rng(seed)
    probes = [random_ket(rng, d) for _ in range(trials)] + [s.kets[0]]
    for phi in probes:
        p = np.abs(s.kets.conj() @ phi) ** 2
        if abs(p.sum() - d) > tol or abs((p ** 2).sum() - 2 * d / (d + 1)) > tol:
            return False
    return True


def sic_state(s: SicPovm) -> SymmetricState:
    return build_symmetric(KetMultiset.from_kets(s.kets))


def sic_overlap_formula(d: int, perm_a: float) -> float:
    """Lambda^2 = (d^2)! / ((d+1)^(d^2-1) perm A)."""
    n = d * d
    return math.exp(math.lgamma(n + 1) - (n - 1) * math.log(d + 1) - math.log(perm_a))


def sic_state_gm(s: SicPovm, cross_check: bool = True, restarts: int = 32, seed: int = 0) -> GmResult:
    """GM of the symmetrized SIC state from the closed form.

    The closest product states are exactly the d^2 kets raised to the N-th
    power. With ``cross_check`` the value is compared with direct optimization
    (RuntimeError on a mismatch beyond 1e-6 bits).
    """
    if not verify_sic(s.kets):
        raise ValueError("kets do not form a SIC-POVM")
    state = sic_state(s)
    lam = sic_overlap_formula(s.dim, state.perm_A)
    gm = -math.log2(lam)
    if cross_check:
        opt = gm_optimize(state, restarts=restarts, seed=seed, certify=False)
        if abs(opt.gm - gm) > 1e-6:
            raise RuntimeError(f"SIC GM formula {gm} disagrees with optimization {opt.gm}")
    bound = gm_lower_bound(RankOnePovm.from_state(state))
    witnesses = tuple(canonical_phase(k) for k in s.kets)
    return GmResult(
        lambda_sq=lam,
        gm=gm,
        saturated=bool(gm - bound < 1e-9),
        additive=additivity_certify(state, seed=seed),
        witness=witnesses[0],
        witnesses=witnesses,
        lower_bound=bound,
    )


# -- d = 3 family scan ------------------------------------------------------------

SCAN_POINTS = 121


class ScanRow(NamedTuple):
    t: float
    perm_A: float
    perm_closed: float
    G_bits: float
    G_closed: float


def qutrit_perm_closed(t: float) -> float:
    return 27 / 32 * (61 - math.cos(9 * t))


def qutrit_gm_closed(t: float) -> float:
    return math.log2(16 * (61 - math.cos(9 * t)) / 105)


def default_grid(points: int = SCAN_POINTS) -> np.ndarray:
    if points < 2:
        return np.array([0.0])
    return np.linspace(0, np.pi / 3, points)


def _scan_row(t: float) -> ScanRow:
    orbit = hw_orbit(qutrit_fiducial(t))
    perm = permanent_ryser(gram(orbit.kets)).real
    g = -math.log2(sic_overlap_formula(3, perm))
    return ScanRow(t, perm, qutrit_perm_closed(t), g, qutrit_gm_closed(t))


def sic_scan_d3(t_grid=None) -> list[ScanRow]:
    """Ryser permanent of the 9x9 Gram and GM for each fiducial parameter t.

    Grid points are independent; with ``SYMGM_THREADS`` > 1 they are spread
    over a thread pool. Rows come back in ascending t either way.
    """
    grid = default_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    ts = sorted(float(x) for x in grid)
    workers = worker_count()
    if workers <= 1 or len(ts) < 2:
        return [_scan_row(t) for t in ts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_scan_row, ts))


def scan_mismatches(rows, rel_tol: float = 1e-9) -> list[ScanRow]:
    return [r for r in rows if abs(r.perm_A - r.perm_closed) > rel_tol * r.perm_closed]


def scan_to_csv(rows) -> str:
    """CSV with header ``t,perm_A,G_bits``, 12 significant digits, ascending t."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "perm_A", "G_bits"])
    for r in rows:
        w.writerow([f"{r.t:.12g}", f"{r.perm_A:.12g}", f"{r.G_bits:.12g}"])
    return buf.getvalue()


def witnesses_match_kets(witnesses, kets, tol: float = 1e-7) -> bool:
    """Each witness coincides (up to phase) with some ket, and vice versa."""
    kets = [k / np.linalg.norm(k) for k in kets]
    fwd = all(max(fidelity(w, k) for k in kets) > 1 - tol for w in witnesses)
    back = all(max(fidelity(w, k) for w in witnesses) > 1 - tol for k in kets)
    return fwd and back
