"""Bit vectors, coordinate sets and subset ranking.

Conventions used throughout the package:

* Coordinates are 0-based. Coordinate ``j`` of a vector lives in bit ``j`` of
  a Python ``int`` (least-significant bit is coordinate 0).
* The text form of a vector is a ``{0,1}`` string whose character ``j`` is
  coordinate ``j``, so ``"1010"`` has coordinates 0 and 2 set.
* Size-``t`` subsets are ranked in colexicographic order, which coincides
  with ascending order of their bitmasks. The rank of ``{c_0 < ... < c_{t-1}}``
  is ``sum(comb(c_j, j + 1))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence


class ContractError(ValueError):
    """Raised when an operation's preconditions are violated."""


# ---------------------------------------------------------------------------
# binomials


@lru_cache(maxsize=None)
def binom(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=None)
def binom_row_prefix(d: int) -> tuple[int, ...]:
    """``out[w] = sum(binom(d, u) for u < w)`` for ``w`` in ``0..d+1``."""
    out = [0]
    for w in range(d + 1):
        out.append(out[-1] + math.comb(d, w))
    return tuple(out)


def binom_leq(d: int, t: int) -> int:
    """Exact ``sum_{w=0}^{t} binom(d, w)``; ``t < 0`` gives 0 and ``t > d`` saturates."""
    if d < 0:
        raise ContractError(f"binom_leq needs d >= 0, got {d}")
    if t < 0:
        return 0
    return binom_row_prefix(d)[min(t, d) + 1]


# ---------------------------------------------------------------------------
# colex ranking of bitmasks

_TABLE_BITS = 16


def _build_colex_table() -> tuple[list[int], list[int]]:
    size = 1 << _TABLE_BITS
    rank = [0] * size
    pop = [0] * size
    for mask in range(1, size):
        top = mask.bit_length() - 1
        rest = mask ^ (1 << top)
        pop[mask] = pop[rest] + 1
        # the highest member is element number pop-1 and contributes comb(top, pop)
        rank[mask] = rank[rest] + math.comb(top, pop[mask])
    return rank, pop


_COLEX16, _POP16 = _build_colex_table()


def colex_rank(mask: int) -> int:
    """Rank of the subset encoded by ``mask`` among subsets of equal size."""
    if mask < 0:
        raise ContractError("mask must be non-negative")
    low = mask & 0xFFFF
    r = _COLEX16[low]
    j = _POP16[low] + 1
    mask >>= _TABLE_BITS
    base = _TABLE_BITS
    while mask:
        lb = mask & -mask
        r += binom(base + lb.bit_length() - 1, j)
        j += 1
        mask ^= lb
    return r


def colex_unrank(rank: int, t: int) -> int:
    """Inverse of :func:`colex_rank` for subsets of size ``t``."""
    mask = 0
    for j in range(t, 0, -1):
        # largest c with binom(c, j) <= rank
        c = j - 1
        while binom(c + 1, j) <= rank:
            c += 1
        rank -= binom(c, j)
        mask |= 1 << c
    return mask


def iter_weight_masks(d: int, w: int) -> Iterator[int]:
    """All masks over ``d`` bits with popcount ``w``, in ascending (colex) order."""
    if w < 0 or w > d:
        return
    if w == 0:
        yield 0
        return
    mask = (1 << w) - 1
    limit = 1 << d
    while mask < limit:
        yield mask
        # Gosper's hack
        low = mask & -mask
        ripple = mask + low
        mask = ripple | (((mask ^ ripple) >> 2) // low)


def lowest_bits(mask: int, t: int) -> int:
    """The ``t`` lowest set bits of ``mask`` (``mask`` must have at least ``t``)."""
    rest = mask
    for _ in range(t):
        rest &= rest - 1
    return mask ^ rest


def set_positions(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True, slots=True)
class BitVec:
    """A vector in ``{0,1}^dim`` packed into a Python integer."""

    dim: int
    bits: int

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise ContractError(f"dimension must be non-negative, got {self.dim}")
        if self.bits < 0 or self.bits >> self.dim:
            raise ContractError(f"bits {self.bits:#x} do not fit in dimension {self.dim}")

    @classmethod
    def from_str(cls, text: str) -> BitVec:
        text = text.strip()
        if any(ch not in "01" for ch in text):
            raise ContractError(f"not a 0/1 string: {text!r}")
        return cls(len(text), int(text[::-1], 2) if text else 0)

    @classmethod
    def from_indices(cls, dim: int, indices: Iterable[int]) -> BitVec:
        bits = 0
        for j in indices:
            if not 0 <= j < dim:
                raise ContractError(f"coordinate {j} out of range for dimension {dim}")
            bits |= 1 << j
        return cls(dim, bits)

    @classmethod
    def zeros(cls, dim: int) -> BitVec:
        return cls(dim, 0)

    @classmethod
    def ones(cls, dim: int) -> BitVec:
        return cls(dim, (1 << dim) - 1)

    def __str__(self) -> str:
        return format(self.bits, f"0{self.dim}b")[::-1] if self.dim else ""

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.dim:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def __len__(self) -> int:
        return self.dim

    def popcount(self) -> int:
        return self.bits.bit_count()

    def support(self) -> list[int]:
        return set_positions(self.bits)


@dataclass(frozen=True, slots=True)
class CoordSet:
    """A subset of the coordinates ``[0, dim)``, kept sorted."""

    dim: int
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        prev = -1
        for j in self.members:
            if j <= prev:
                raise ContractError("coordinate set members must be strictly increasing")
            if j >= self.dim:
                raise ContractError(f"coordinate {j} out of range for dimension {self.dim}")
            prev = j

    @classmethod
    def of(cls, dim: int, members: Iterable[int]) -> CoordSet:
        return cls(dim, tuple(sorted(set(members))))

    @classmethod
    def from_mask(cls, dim: int, mask: int) -> CoordSet:
        if mask >> dim:
            raise ContractError(f"mask {mask:#x} does not fit in dimension {dim}")
        return cls(dim, tuple(set_positions(mask)))

    @property
    def mask(self) -> int:
        m = 0
        for j in self.members:
            m |= 1 << j
        return m

    def complement(self) -> CoordSet:
        return CoordSet.from_mask(self.dim, ((1 << self.dim) - 1) ^ self.mask)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)


@dataclass(frozen=True)
class OVInstance:
    """An ordered multiset of ``n`` vectors sharing dimension ``dim``."""

    dim: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ContractError(f"instance dimension must be >= 1, got {self.dim}")
        if not self.rows:
            raise ContractError("an instance needs at least one vector")
        limit = 1 << self.dim
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ContractError(f"row {r:#x} does not fit in dimension {self.dim}")

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVec]) -> OVInstance:
        if not vectors:
            raise ContractError("an instance needs at least one vector")
        dim = vectors[0].dim
        for v in vectors:
            if v.dim != dim:
                raise ContractError(f"mixed dimensions {dim} and {v.dim}")
        return cls(dim, tuple(v.bits for v in vectors))

    @classmethod
    def from_strings(cls, lines: Iterable[str]) -> OVInstance:
        return cls.from_vectors([BitVec.from_str(s) for s in lines])

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def vectors(self) -> list[BitVec]:
        return [BitVec(self.dim, r) for r in self.rows]

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, j: int) -> BitVec:
        return BitVec(self.dim, self.rows[j])


# ---------------------------------------------------------------------------
# operations


def _check_dim(a: int, b: int, what: str = "dimension") -> None:
    if a != b:
        raise ContractError(f"{what} mismatch: {a} != {b}")


def is_orthogonal(x: BitVec, q: BitVec) -> bool:
    _check_dim(x.dim, q.dim)
    return x.bits & q.bits == 0


def restrict(v: BitVec, coords: CoordSet) -> BitVec:
    _check_dim(v.dim, coords.dim)
    return BitVec(len(coords), compressor(v.dim, coords.mask)(v.bits))


def is_zero_on(v: BitVec, coords: CoordSet) -> bool:
    _check_dim(v.dim, coords.dim)
    return v.bits & coords.mask == 0


def rank_subset(coords: CoordSet, t: int) -> int:
    if len(coords) != t:
        raise ContractError(f"expected a {t}-subset, got {len(coords)} members")
    return colex_rank(coords.mask)


def unrank_subset(rank: int, d: int, t: int) -> CoordSet:
    if not 0 <= t <= d:
        raise ContractError(f"need 0 <= t <= d, got t={t}, d={d}")
    if not 0 <= rank < binom(d, t):
        raise ContractError(f"rank {rank} outside [0, {binom(d, t)})")
    return CoordSet.from_mask(d, colex_unrank(rank, t))


def sparse_rank(d: int, q: int) -> int:
    """Rank of ``q`` in the weight-major, colex-minor order of ``{0,1}^d``."""
    return binom_row_prefix(d)[q.bit_count()] + colex_rank(q)


def rank_sparse_query(q: BitVec, t: int) -> int:
    if q.popcount() >= t:
        raise ContractError(f"query weight {q.popcount()} is not below t={t}")
    return sparse_rank(q.dim, q.bits)


# ---------------------------------------------------------------------------
# coordinate compression (software pext)


class Compressor:
    """Gathers the bits of a fixed coordinate mask into the low bits of the result.

    Works a byte at a time through precomputed 256-entry tables.
    """

    __slots__ = ("keep", "dim", "out_dim", "_tables")

    def __init__(self, dim: int, keep: int) -> None:
        self.dim = dim
        self.keep = keep
        self.out_dim = keep.bit_count()
        tables = []
        offset = 0
        for base in range(0, dim, 8):
            sub = (keep >> base) & 0xFF
            positions = [b for b in range(8) if sub >> b & 1]
            table = [0] * 256
            for byte in range(256):
                out = 0
                for k, b in enumerate(positions):
                    if byte >> b & 1:
                        out |= 1 << k
                table[byte] = out << offset
            tables.append(table)
            offset += len(positions)
        self._tables = tuple(tables)

    def __call__(self, x: int) -> int:
        out = 0
        for table in self._tables:
            out |= table[x & 0xFF]
            x >>= 8
        return out


@lru_cache(maxsize=4096)
def compressor(dim: int, keep: int) -> Compressor:
    return Compressor(dim, keep)
