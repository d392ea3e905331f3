"""Symmetrized product states.

A state ``c * P_sym (|psi_1>^{n_1} ... |psi_M>^{n_M})`` is stored implicitly as
its ket multiset plus the Gram permanent; overlaps with product states are then
closed-form and never touch the d^N-dimensional tensor. :func:`dense_expand`
exists for verification on small systems.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import as_ket, inner
from .permanents import gram_permanent, permanent_repeated

MAX_DENSE_SIZE = 1 << 20


@dataclass(frozen=True)
class KetMultiset:
    """Kets (rows of ``kets``, shape (M, d)) with positive multiplicities."""

    kets: np.ndarray
    mults: tuple[int, ...]

    def __post_init__(self):
        kets = np.array(self.kets, dtype=complex)
        if kets.ndim == 1:
            kets = kets[None, :]
        if kets.ndim != 2 or kets.shape[0] == 0 or kets.shape[1] == 0:
            raise ValueError("need a non-empty (M, d) array of kets")
        mults = tuple(int(n) for n in self.mults)
        if len(mults) != kets.shape[0]:
            raise ValueError(f"{kets.shape[0]} kets but {len(mults)} multiplicities")
        if any(n < 1 for n in mults):
            raise ValueError("multiplicities must be positive integers")
        if not np.all(np.isfinite(kets)):
            raise ValueError("kets have non-finite entries")
        norms = np.linalg.norm(kets, axis=1)
        if np.any(norms == 0) or np.any(norms > 1 + 1e-12):
            raise ValueError("every ket needs norm in (0, 1]")
        kets.setflags(write=False)
        object.__setattr__(self, "kets", kets)
        object.__setattr__(self, "mults", mults)

    @property
    def dim(self) -> int:
        return self.kets.shape[1]

    @property
    def total(self) -> int:
        return sum(self.mults)

    def __len__(self) -> int:
        return len(self.mults)

    def expanded(self) -> np.ndarray:
        return np.repeat(self.kets, self.mults, axis=0)

    def merged(self, tol: float = 1e-12) -> KetMultiset:
        """Merge entries equal up to a global phase (same norm, parallel)."""
        kets: list[np.ndarray] = []
        mults: list[int] = []
        for k, n in zip(self.kets, self.mults):
            nk = np.linalg.norm(k)
            for i, other in enumerate(kets):
                no = np.linalg.norm(other)
                if abs(nk - no) <= tol and abs(abs(inner(other, k)) - nk * no) <= tol:
                    mults[i] += n
                    break
            else:
                kets.append(k)
                mults.append(n)
        return KetMultiset(np.array(kets), tuple(mults))

    @classmethod
    def from_kets(cls, kets, mults=None) -> KetMultiset:
        kets = np.asarray(kets, dtype=complex)
        if mults is None:
            mults = [1] * len(kets)
        return cls(kets, tuple(mults))


@dataclass(frozen=True)
class SymmetricState:
    """Normalized symmetrized state; ``norm_const = sqrt(N!/perm_A)``."""

    ms: KetMultiset
    perm_A: float
    norm_const: float = field(init=False)

    def __post_init__(self):
        if not self.perm_A > 0:
            raise ValueError(f"Gram permanent must be positive, got {self.perm_A}")
        object.__setattr__(self, "norm_const", math.sqrt(math.exp(self.log_prefactor)))

    @property
    def N(self) -> int:
        return self.ms.total

    @property
    def dim(self) -> int:
        return self.ms.dim

    @property
    def log_prefactor(self) -> float:
        """ln(N!/perm_A)."""
        return math.lgamma(self.N + 1) - math.log(self.perm_A)


def build_symmetric(ms: KetMultiset) -> SymmetricState:
    """Normalize ``P_sym`` of the multiset via its Gram permanent."""
    ms = ms.merged()
    perm = gram_permanent(ms.kets, ms.mults)
    if abs(perm.imag) > 1e-9 * max(1.0, abs(perm.real)):
        raise ValueError(f"Gram permanent is not real: {perm}")
    if perm.real <= 0:
        raise ValueError("symmetrized state vanishes (Gram permanent <= 0)")
    return SymmetricState(ms, float(perm.real))


def symmetric_state(kets, mults=None) -> SymmetricState:
    return build_symmetric(KetMultiset.from_kets(kets, mults))


def log_product_overlap(s: SymmetricState, phi) -> float:
    """ln |<phi|^{N} |Psi>|^2, ``-inf`` when ``phi`` is orthogonal to some ket."""
    phi = as_ket(phi)
    if phi.shape[0] != s.dim:
        raise ValueError(f"dimension mismatch: state has d={s.dim}, phi has {phi.shape[0]}")
    phi = phi / np.linalg.norm(phi)
    ov = np.abs(s.ms.kets.conj() @ phi) ** 2
    if np.any(ov == 0):
        return -math.inf
    return s.log_prefactor + float(np.dot(s.ms.mults, np.log(ov)))


def product_overlap(s: SymmetricState, phi) -> float:
    """|<phi|^{N} |Psi>|^2 = (N!/perm A) prod_j |<phi|psi_j>|^{2 n_j}."""
    v = log_product_overlap(s, phi)
    return 0.0 if v == -math.inf else math.exp(v)


def _occupation_patterns(n: int, d: int):
    """All (m_0..m_{d-1}) with sum n."""
    if d == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _occupation_patterns(n - first, d - 1):
            yield (first,) + rest


def dense_expand(s: SymmetricState) -> np.ndarray:
    """Full tensor of the state, flattened in row-major party order.

    The amplitude at index (i_1..i_N) depends only on how many parties sit in
    each level, and equals ``c * perm(B) / N!`` with ``B[k, l] = a_k[i_l]``;
    one repeated-row permanent per occupation pattern suffices.
    """
    d, n = s.dim, s.N
    if d ** n > MAX_DENSE_SIZE:
        raise ValueError(f"dense tensor too large: {d}^{n} > {MAX_DENSE_SIZE}")
    base = n + 1
    keys, amps = [], []
    log_fact = math.lgamma(n + 1)
    for pattern in _occupation_patterns(n, d):
        keys.append(sum(m * base ** x for x, m in enumerate(pattern)))
        amps.append(permanent_repeated(s.ms.kets, s.ms.mults, pattern))
    keys = np.array(keys)
    amps = np.array(amps) * s.norm_const / math.exp(log_fact)
    order = np.argsort(keys)
    keys, amps = keys[order], amps[order]

    # key of each flat index: sum over parties of base**level
    key = np.zeros((d,) * n, dtype=np.int64)
    contrib = base ** np.arange(d, dtype=np.int64)
    for axis in range(n):
        shape = [1] * n
        shape[axis] = d
        key = key + contrib.reshape(shape)
    return amps[np.searchsorted(keys, key.ravel())]


def product_state(phi, n: int) -> np.ndarray:
    out = np.array([1.0 + 0j])
    for _ in range(n):
        out = np.kron(out, phi)
    return out


# -- qubit symmetric states in the Dicke basis --------------------------------


def dicke_amplitudes(s: SymmetricState) -> np.ndarray:
    """Amplitudes <N,k|Psi>, k = number of |1> excitations, for qubit states."""
    if s.dim != 2:
        raise ValueError("Dicke amplitudes are defined for qubits only")
    coef = np.array([1.0 + 0j])
    for (alpha, beta), n in zip(s.ms.kets, s.ms.mults):
        for _ in range(n):
            coef = np.convolve(coef, [alpha, beta])
    n = s.N
    binom = np.array([math.comb(n, k) for k in range(n + 1)], dtype=float)
    return s.norm_const * coef / np.sqrt(binom)


def dicke_to_dense(amps) -> np.ndarray:
    """Expand Dicke-basis amplitudes to the 2^N computational-basis vector."""
    amps = np.asarray(amps, dtype=complex)
    n = len(amps) - 1
    idx = np.arange(2 ** n)
    weight = np.array([bin(i).count("1") for i in idx])
    binom = np.array([math.comb(n, k) for k in range(n + 1)], dtype=float)
    return amps[weight] / np.sqrt(binom[weight])


# -- JSON state files ----------------------------------------------------------


def multiset_from_json(doc) -> KetMultiset:
    """Parse ``{"dim": d, "kets": [[[re, im], ...], ...], "mults": [...]}``."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    try:
        d = int(doc["dim"])
        kets = np.array(
            [[complex(float(re), float(im)) for re, im in ket] for ket in doc["kets"]],
            dtype=complex,
        )
        mults = doc.get("mults") or [1] * len(kets)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state document: {exc}") from exc
    if kets.ndim != 2 or kets.shape[1] != d:
        raise ValueError(f"kets do not match dim={d}")
    return KetMultiset(kets, tuple(mults))


def multiset_to_json(ms: KetMultiset) -> dict:
    return {
        "dim": ms.dim,
        "kets": [[[float(a.real), float(a.imag)] for a in ket] for ket in ms.kets],
        "mults": list(ms.mults),
    }
