"""Permanents of Gram matrices.

Three routes are provided:

* :func:`permanent_ryser` -- Ryser inclusion-exclusion with Gray-code subset
  order, O(2^N N), for any square matrix.
* :func:`permanent_multiset` -- the same formula with repeated rows/columns
  grouped, O(prod(n_j + 1) M^2). Much cheaper for Gram matrices of kets with
  large multiplicities.
* :func:`permanent_dicke` -- closed-form sum for the two-basis qubit family
  built from |0>, |1>, |t+>, |t->; polynomial in the counts.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

MAX_RYSER_N = 30
# multinomials up to this total stay exact integers
EXACT_MULTINOMIAL_N = 20


def gram(ms, mults=None) -> np.ndarray:
    """Gram matrix <a_j|a_k> over the expanded ket list.

    ``ms`` is either a :class:`~symgm.states.KetMultiset` or a sequence of kets
    (then ``mults`` gives their multiplicities, default all ones). Row order
    follows the multiset order, each ket repeated ``n_j`` times.
    """
    if mults is None and hasattr(ms, "mults"):
        kets, mults = ms.kets, ms.mults
    else:
        kets = ms
    kets = np.asarray(kets, dtype=complex)
    if kets.ndim != 2 or kets.shape[0] == 0:
        raise ValueError("need a non-empty list of kets")
    if mults is None:
        mults = [1] * kets.shape[0]
    expanded = np.repeat(kets, [int(n) for n in mults], axis=0)
    return expanded.conj() @ expanded.T


def permanent_ryser(m) -> complex:
    """Exact permanent by Ryser's formula with Gray-code subset iteration."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return 1 + 0j
    if n > MAX_RYSER_N:
        raise ValueError(f"matrix too large for exact permanent (N={n} > {MAX_RYSER_N})")

    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    gray = 0
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1
        gray ^= 1 << j
        if gray >> j & 1:
            row_sums += a[:, j]
        else:
            row_sums -= a[:, j]
        term = np.prod(row_sums)
        if bin(gray).count("1") & 1:
            total -= term
        else:
            total += term
    return complex(total * (-1) ** n)


def permanent_repeated(m, row_mults, col_mults) -> complex:
    """Permanent of ``m`` with row i repeated ``row_mults[i]`` times and column j
    repeated ``col_mults[j]`` times.

    Ryser's formula where choosing ``s_j`` of the ``c_j`` identical columns of
    type ``j`` carries a binomial weight and identical rows give a power. Cost
    is ``prod(c_j + 1)`` row-sum evaluations.
    """
    m = np.asarray(m, dtype=complex)
    rows = np.asarray([int(n) for n in row_mults])
    cols = np.asarray([int(n) for n in col_mults])
    if m.shape != (len(rows), len(cols)):
        raise ValueError(f"matrix shape {m.shape} does not match multiplicities")
    if np.any(rows < 0) or np.any(cols < 0):
        raise ValueError("multiplicities must be non-negative")
    n_total = int(rows.sum())
    if n_total != int(cols.sum()):
        raise ValueError("row and column multiplicities must have equal totals")
    m, rows = m[rows > 0], rows[rows > 0]
    m, cols = m[:, cols > 0], cols[cols > 0]
    if n_total == 0:
        return 1 + 0j

    binoms = [np.array([math.comb(int(c), s) for s in range(c + 1)], dtype=float) for c in cols]
    total = 0j
    it = itertools.product(*[range(c + 1) for c in cols])
    while True:
        block = np.array(list(itertools.islice(it, 1 << 16)), dtype=int)
        if block.size == 0:
            break
        row_sums = block @ m.T  # (K, rows): sum_j s_j m_ij
        terms = np.prod(row_sums ** rows, axis=1)
        weight = np.ones(len(block))
        for j, b in enumerate(binoms):
            weight *= b[block[:, j]]
        sign = np.where(block.sum(axis=1) & 1, -1.0, 1.0)
        total += np.sum(sign * weight * terms)
    return complex(total * (-1) ** n_total)


def permanent_multiset(kets, mults) -> complex:
    """Permanent of the Gram matrix of ``kets`` repeated ``mults`` times."""
    kets = np.asarray(kets, dtype=complex)
    return permanent_repeated(kets.conj() @ kets.T, mults, mults)


def gram_permanent(kets, mults) -> complex:
    """Gram permanent by whichever exact route is cheaper."""
    mults = [int(n) for n in mults]
    n = sum(mults)
    if math.prod(c + 1 for c in mults) * len(mults) <= (1 << min(n, 62)) * n:
        return permanent_multiset(kets, mults)
    return permanent_ryser(gram(kets, mults))


# -- two-basis qubit family ---------------------------------------------------


@dataclass(frozen=True)
class DickeCounts:
    """Multiplicities of |0>, |1>, |t+>, |t-> with t = ``theta``."""

    n00: int
    n01: int
    n10: int
    n11: int
    theta: float

    def __post_init__(self):
        if min(self.counts) < 0:
            raise ValueError("counts must be non-negative")
        if self.total < 1:
            raise ValueError("need at least one ket")

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return (self.n00, self.n01, self.n10, self.n11)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def kets(self) -> np.ndarray:
        """Rows |0>, |1>, |t+>, |t->."""
        c, s = np.cos(self.theta / 2), np.sin(self.theta / 2)
        return np.array([[1, 0], [0, 1], [c, s], [s, -c]], dtype=complex)


def _multinomial(n: int, parts, exact: bool):
    if exact:
        r = math.factorial(n)
        for p in parts:
            r //= math.factorial(p)
        return r
    return math.exp(math.lgamma(n + 1) - sum(math.lgamma(p + 1) for p in parts))


def permanent_dicke(c: DickeCounts) -> float:
    """Permanent of the Gram matrix of a :class:`DickeCounts` multiset.

    Sums over the number of cross-type pairings (a, b, c, f, g) between the
    four ket types; every admissible tuple satisfies

        a+b <= n00, c+f <= n01, a+c <= n10, b+f <= n11,
        g <= a+b, g <= a+c, f+g >= a.

    Loop bounds below are these constraints solved for each variable in turn,
    so no iteration is wasted; an empty admissible set gives 0.
    """
    n00, n01, n10, n11 = c.counts
    exact = c.total <= EXACT_MULTINOMIAL_N
    cos_h, sin_h = math.cos(c.theta / 2), math.sin(c.theta / 2)

    total = 0.0
    for a in range(min(n00, n10) + 1):
        for b in range(min(n00 - a, n11) + 1):
            m00 = _multinomial(n00, (a, b, n00 - a - b), exact)
            for cc in range(min(n01, n10 - a) + 1):
                for f in range(min(n01 - cc, n11 - b) + 1):
                    m01 = _multinomial(n01, (cc, f, n01 - cc - f), exact)
                    for g in range(max(0, a - f), min(a + b, a + cc) + 1):
                        m10 = _multinomial(n10, (g, a + cc - g, n10 - a - cc), exact)
                        m11 = _multinomial(n11, (a + b - g, f + g - a, n11 - b - f), exact)
                        sign = -1.0 if (g - a) & 1 else 1.0
                        total += (
                            sign
                            * cos_h ** (2 * f + 2 * g)
                            * sin_h ** (2 * a + 2 * b + 2 * cc - 2 * g)
                            * m00 * m01 * m10 * m11
                        )
    if exact:
        prefactor = math.prod(math.factorial(n) for n in c.counts)
    else:
        prefactor = math.exp(sum(math.lgamma(n + 1) for n in c.counts))
    return float(prefactor * total)
