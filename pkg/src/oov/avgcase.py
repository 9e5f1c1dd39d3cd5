"""Average-case structure: sparse-query bitmap plus one candidate list per t-set."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import BitVec, ContractError, OVInstance, binom_leq, colex_rank, lowest_bits
from .tables import (
    BuildStats,
    CandidateTable,
    QueryStats,
    SparseBitmap,
    build_candidate_table,
    build_sparse_bitmap,
)


def as_fraction(value) -> Fraction:
    """Parse ``3/4``, ``0.75``, ints, floats and Fractions exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value).strip())


def choose_t_avg(n: int, p, eps) -> int:
    """Smallest ``t`` with ``(1/p)**t >= 6 * n**eps``, evaluated exactly.

    With ``eps = a/b`` the test is ``(1/p)**(t*b) >= 6**b * n**a``, so no
    floating point is involved.
    """
    p = as_fraction(p)
    eps = as_fraction(eps)
    if not 0 < p < 1:
        raise ContractError(f"p must lie in (0, 1), got {p}")
    if not 0 < eps < 1:
        raise ContractError(f"eps must lie in (0, 1), got {eps}")
    if n < 2:
        raise ContractError(f"need n >= 2, got {n}")
    inv = 1 / p
    a, b = eps.numerator, eps.denominator
    target = Fraction(6**b * n**a)
    t = 0
    power = Fraction(1)
    step = inv**b
    while power < target:
        power *= step
        t += 1
    return t


def clamp_t(t: int, d: int) -> int:
    return max(1, min(t, d))


# ---------------------------------------------------------------------------
# B_p sampling

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1


def splitmix64(seed: int, counters: np.ndarray) -> np.ndarray:
    """SplitMix64 output for each counter value (stateless, counter-based)."""
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK64) + (counters.astype(np.uint64) + np.uint64(1)) * np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))


def sample_instance(n: int, d: int, p, seed: int) -> OVInstance:
    """Draw ``n`` vectors whose bits are independently 0 with probability ``p``.

    Bit ``c`` of vector ``j`` uses SplitMix64 counter ``j*d + c`` and is zero
    iff the 64-bit output is below ``floor(p * 2**64)``.
    """
    if n < 1 or d < 1:
        raise ContractError(f"need n, d >= 1, got n={n}, d={d}")
    p = as_fraction(p)
    if not 0 <= p <= 1:
        raise ContractError(f"p must lie in [0, 1], got {p}")
    counters = np.arange(n * d, dtype=np.uint64)
    draws = splitmix64(seed, counters).reshape(n, d)
    if p == 1:
        ones = np.zeros((n, d), dtype=np.bool_)
    else:
        threshold = (p.numerator << 64) // p.denominator
        ones = draws >= np.uint64(threshold)
    packed = np.packbits(ones, axis=1, bitorder="little")
    rows = tuple(int.from_bytes(r.tobytes(), "little") for r in packed)
    return OVInstance(d, rows)


# ---------------------------------------------------------------------------
# structure


@dataclass(eq=False)
class AvgStructure:
    dim: int
    t: int
    sparse: SparseBitmap
    candidates: CandidateTable

    @property
    def rows(self) -> tuple[int, ...]:
        return self.candidates.rows

    @property
    def accountedBits(self) -> int:
        return binom_leq(self.dim, self.t - 1) + self.dim * self.candidates.stored

    def query(self, q: int, stats: QueryStats | None = None) -> bool:
        t = self.t
        if q.bit_count() < t:
            if stats is not None:
                stats.bitmapLookups += 1
            return self.sparse.lookup(q)
        lo, hi = self.candidates.span(colex_rank(lowest_bits(q, t)))
        rows = self.candidates.rows
        ent = self.candidates._ent
        if stats is not None:
            for j in range(lo, hi):
                stats.candidateChecks += 1
                if rows[ent[j]] & q == 0:
                    return True
            return False
        for j in range(lo, hi):
            if rows[ent[j]] & q == 0:
                return True
        return False

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AvgStructure)
            and (self.dim, self.t) == (other.dim, other.t)
            and self.sparse == other.sparse
            and self.candidates == other.candidates
        )


def avg_build(X: OVInstance, t: int, stats: BuildStats | None = None) -> AvgStructure:
    if not 1 <= t <= X.dim:
        raise ContractError(
            f"t={t} outside [1, {X.dim}]; clamp t to the dimension or use the full-bitmap oracle"
        )
    sparse = build_sparse_bitmap(X.rows, X.dim, t, stats=stats)
    table = build_candidate_table(X.rows, X.dim, t, stats=stats)
    return AvgStructure(X.dim, t, sparse, table)


def avg_query(S: AvgStructure, q: BitVec, stats: QueryStats | None = None) -> bool:
    if q.dim != S.dim:
        raise ContractError(f"query dimension {q.dim} != structure dimension {S.dim}")
    return S.query(q.bits, stats)
