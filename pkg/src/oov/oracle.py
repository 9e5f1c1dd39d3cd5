"""Ground truth: linear scan and the dense all-queries bitmap."""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernels
from .core import BitVec, ContractError, OVInstance

DENSE_DIM_CAP = _kernels.DENSE_DIM_CAP


def linear_scan_query(X: OVInstance, q: BitVec) -> bool:
    """Scan the vectors in stored order; stop at the first orthogonal one."""
    if q.dim != X.dim:
        raise ContractError(f"query dimension {q.dim} != instance dimension {X.dim}")
    qb = q.bits
    for x in X.rows:
        if x & qb == 0:
            return True
    return False


def linear_scan_bits(rows, q: int) -> bool:
    for x in rows:
        if x & q == 0:
            return True
    return False


@dataclass(frozen=True)
class FullBitmap:
    """One answer bit per query in ``{0,1}^dim``; bit ``q`` answers query ``q``."""

    dim: int
    bits: bytes

    def __post_init__(self) -> None:
        if len(self.bits) != max(1, (1 << self.dim) // 8):
            raise ContractError(f"bitmap of {len(self.bits)} bytes does not match dimension {self.dim}")

    def lookup(self, q: int) -> bool:
        return bool(self.bits[q >> 3] >> (q & 7) & 1)

    def __len__(self) -> int:
        return 1 << self.dim


def dense_answers(rows, dim: int) -> FullBitmap:
    if dim > DENSE_DIM_CAP:
        raise ContractError(
            f"refusing a dense bitmap over dimension {dim}: 2^{dim} bits exceeds the cap of 2^{DENSE_DIM_CAP}"
        )
    table = _kernels.orthogonal_table(rows, dim)
    return FullBitmap(dim, _kernels.pack_bits(table))


def build_full_bitmap(X: OVInstance) -> FullBitmap:
    return dense_answers(X.rows, X.dim)


def query_full_bitmap(B: FullBitmap, q: BitVec) -> bool:
    if q.dim != B.dim:
        raise ContractError(f"query dimension {q.dim} != bitmap dimension {B.dim}")
    return B.lookup(q.bits)
