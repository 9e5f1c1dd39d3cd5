"""Uniform build/query front end over the three OV engines."""

from __future__ import annotations

from typing import Protocol

from .avgcase import AvgStructure, as_fraction, avg_build, choose_t_avg, clamp_t
from .core import BitVec, ContractError, OVInstance, colex_rank, lowest_bits
from .oracle import linear_scan_bits
from .tables import BuildStats, QueryStats
from .worstcase import WorstNode, ov_pre, space_account

ENGINES = ("oracle", "avg", "worst")


class Engine(Protocol):
    kind: str
    dim: int

    def query(self, q: BitVec) -> bool: ...

    def query_bits(self, q: int, stats: QueryStats | None = None, shortcircuit: bool = True) -> bool: ...

    @property
    def params(self) -> dict: ...


def _check(dim: int, q: BitVec) -> None:
    if q.dim != dim:
        raise ContractError(f"query dimension {q.dim} != structure dimension {dim}")


class OracleEngine:
    """Linear scan over the stored vectors."""

    kind = "oracle"

    def __init__(self, instance: OVInstance) -> None:
        self.instance = instance
        self.dim = instance.dim

    @property
    def params(self) -> dict:
        return {}

    @property
    def accounted_bits(self) -> int:
        return self.instance.n * self.dim

    def query(self, q: BitVec) -> bool:
        _check(self.dim, q)
        return linear_scan_bits(self.instance.rows, q.bits)

    def query_bits(self, q: int, stats: QueryStats | None = None, shortcircuit: bool = True) -> bool:
        if stats is None and shortcircuit:
            return linear_scan_bits(self.instance.rows, q)
        found = False
        for x in self.instance.rows:
            if stats is not None:
                stats.candidateChecks += 1
            if x & q == 0:
                found = True
                if shortcircuit:
                    break
        return found


class AvgEngine:
    kind = "avg"

    def __init__(self, structure: AvgStructure, p=None, eps=None) -> None:
        self.structure = structure
        self.dim = structure.dim
        self.p = p
        self.eps = eps

    @classmethod
    def build(cls, instance: OVInstance, t: int | None = None, p=None, eps=None, stats=None) -> AvgEngine:
        """Explicit ``t``, or the smallest ``t`` for ``(p, eps)`` clamped to ``[1, d]`` (defaults 1/2, 1/2)."""
        if t is not None:
            if p is not None or eps is not None:
                raise ContractError("give either t or (p, eps), not both")
            return cls(avg_build(instance, t, stats))
        p = as_fraction("1/2" if p is None else p)
        eps = as_fraction("1/2" if eps is None else eps)
        t = clamp_t(choose_t_avg(max(instance.n, 2), p, eps), instance.dim)
        return cls(avg_build(instance, t, stats), p, eps)

    @property
    def params(self) -> dict:
        out: dict = {"t": self.structure.t}
        if self.p is not None:
            out["p"] = str(self.p)
        if self.eps is not None:
            out["eps"] = str(self.eps)
        return out

    @property
    def accounted_bits(self) -> int:
        return self.structure.accountedBits

    def query(self, q: BitVec) -> bool:
        _check(self.dim, q)
        return self.structure.query(q.bits)

    def query_bits(self, q: int, stats: QueryStats | None = None, shortcircuit: bool = True) -> bool:
        # a single candidate list: short-circuiting only changes the counters on hits
        if shortcircuit or stats is None:
            return self.structure.query(q, stats)
        found = self.structure.query(q, None)
        if q.bit_count() < self.structure.t:
            stats.bitmapLookups += 1
        else:
            lo, hi = self.structure.candidates.span(colex_rank(lowest_bits(q, self.structure.t)))
            stats.candidateChecks += hi - lo
        return found


class WorstEngine:
    kind = "worst"

    def __init__(self, root: WorstNode, i: int) -> None:
        self.root = root
        self.dim = root.dim
        self.i = i

    @classmethod
    def build(cls, instance: OVInstance, i: int | None = None, stats: BuildStats | None = None) -> WorstEngine:
        if i is None:
            i = min(2, instance.dim)
        return cls(ov_pre(instance, i, stats), i)

    @property
    def params(self) -> dict:
        return {"i": self.i}

    @property
    def accounted_bits(self) -> int:
        return space_account(self.root).accountedBits

    def query(self, q: BitVec) -> bool:
        _check(self.dim, q)
        return self.root.contains(q.bits)

    def query_bits(self, q: int, stats: QueryStats | None = None, shortcircuit: bool = True) -> bool:
        if stats is None and shortcircuit:
            return self.root.contains(q)
        return self.root.query(q, stats if stats is not None else QueryStats(), shortcircuit)


def make_engine(kind: str, instance: OVInstance, **params) -> Engine:
    if kind == "oracle":
        return OracleEngine(instance)
    if kind == "avg":
        return AvgEngine.build(instance, **params)
    if kind == "worst":
        return WorstEngine.build(instance, **params)
    raise ContractError(f"unknown engine {kind!r}; expected one of {', '.join(ENGINES)}")
