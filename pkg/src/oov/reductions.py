"""Partial Match, Subset/Containment Query and DNF evaluation on top of any OV engine.

Each adapter encodes its inputs as an :class:`~oov.core.OVInstance`, builds one
of the interchangeable engines from :mod:`oov.engines` and encodes every query
so that "some encoded input is orthogonal to the encoded query" is exactly the
original problem's answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import BitVec, ContractError, CoordSet, OVInstance
from .engines import Engine, make_engine

WILDCARD = "*"


@dataclass(frozen=True)
class PMPattern:
    """A pattern over ``{0, 1, *}``."""

    dim: int
    symbols: str

    def __post_init__(self) -> None:
        if len(self.symbols) != self.dim:
            raise ContractError(f"pattern length {len(self.symbols)} != dimension {self.dim}")
        if any(ch not in "01*" for ch in self.symbols):
            raise ContractError(f"pattern symbols must be 0, 1 or *: {self.symbols!r}")

    @classmethod
    def parse(cls, text: str) -> PMPattern:
        text = text.strip()
        return cls(len(text), text)

    def matches(self, x: BitVec) -> bool:
        return all(s == WILDCARD or int(s) == x[j] for j, s in enumerate(self.symbols))


# ---------------------------------------------------------------------------
# partial match: coordinate j becomes the pair (2j, 2j+1)


def pm_encode_input(x: BitVec) -> BitVec:
    bits = 0
    for j in range(x.dim):
        bits |= 1 << (2 * j + 1 - x[j])
    return BitVec(2 * x.dim, bits)


def pm_encode_query(y: PMPattern) -> BitVec:
    bits = 0
    for j, s in enumerate(y.symbols):
        if s == "0":
            bits |= 1 << (2 * j)
        elif s == "1":
            bits |= 1 << (2 * j + 1)
    return BitVec(2 * y.dim, bits)


# ---------------------------------------------------------------------------
# subset / containment


def _indicator(S: CoordSet) -> BitVec:
    return BitVec(S.dim, S.mask)


def subset_encode_input(S: CoordSet) -> BitVec:
    return _indicator(S.complement())


def subset_encode_query(q: CoordSet) -> BitVec:
    return _indicator(q)


def containment_encode_input(S: CoordSet) -> BitVec:
    return _indicator(S)


def containment_encode_query(q: CoordSet) -> BitVec:
    return _indicator(q.complement())


# ---------------------------------------------------------------------------
# DNF

Literal = tuple[int, bool]


@dataclass(frozen=True)
class DNFFormula:
    """Disjunction of conjunctive clauses; a literal is ``(variable, positive)``."""

    varCount: int
    clauses: tuple[frozenset[Literal], ...]

    def __post_init__(self) -> None:
        if not self.clauses:
            raise ContractError("a DNF formula needs at least one clause")
        for clause in self.clauses:
            if not clause:
                raise ContractError("DNF clauses must be non-empty")
            seen: dict[int, bool] = {}
            for var, positive in clause:
                if not 0 <= var < self.varCount:
                    raise ContractError(f"variable {var} out of range for {self.varCount} variables")
                if seen.get(var, positive) != positive:
                    raise ContractError(f"clause uses both polarities of variable {var}")
                seen[var] = positive

    @classmethod
    def of(cls, var_count: int, clauses: Iterable[Iterable[Literal]]) -> DNFFormula:
        return cls(var_count, tuple(frozenset(c) for c in clauses))

    def evaluate(self, a: BitVec) -> bool:
        return any(all(a[v] == int(pos) for v, pos in clause) for clause in self.clauses)

    def is_monotone(self) -> bool:
        return all(pos for clause in self.clauses for _, pos in clause)


def dnf_encode_clause(clause: Iterable[Literal], var_count: int) -> BitVec:
    bits = 0
    for var, positive in clause:
        bits |= 1 << (2 * var + (0 if positive else 1))
    return BitVec(2 * var_count, bits)


def dnf_encode(phi: DNFFormula) -> OVInstance:
    return OVInstance.from_vectors([dnf_encode_clause(c, phi.varCount) for c in phi.clauses])


def dnf_encode_assignment(a: BitVec) -> BitVec:
    bits = 0
    for j in range(a.dim):
        bits |= 1 << (2 * j + a[j])
    return BitVec(2 * a.dim, bits)


# ---------------------------------------------------------------------------
# indexes


class _Index:
    def __init__(self, instance: OVInstance, engine: str, params: dict) -> None:
        self.instance = instance
        self.engine: Engine = make_engine(engine, instance, **params)

    def _ask(self, q: BitVec) -> bool:
        return self.engine.query(q)


class PartialMatchIndex(_Index):
    def __init__(self, vectors: Sequence[BitVec], engine: str = "worst", **params) -> None:
        super().__init__(OVInstance.from_vectors([pm_encode_input(x) for x in vectors]), engine, params)

    def query(self, pattern: PMPattern | str) -> bool:
        if isinstance(pattern, str):
            pattern = PMPattern.parse(pattern)
        return self._ask(pm_encode_query(pattern))


class SubsetQueryIndex(_Index):
    """Is the query contained in some stored set?"""

    def __init__(self, sets: Sequence[CoordSet], engine: str = "worst", **params) -> None:
        super().__init__(OVInstance.from_vectors([subset_encode_input(S) for S in sets]), engine, params)

    def query(self, q: CoordSet) -> bool:
        return self._ask(subset_encode_query(q))


class ContainmentQueryIndex(_Index):
    """Does some stored set lie inside the query?"""

    def __init__(self, sets: Sequence[CoordSet], engine: str = "worst", **params) -> None:
        super().__init__(OVInstance.from_vectors([containment_encode_input(S) for S in sets]), engine, params)

    def query(self, q: CoordSet) -> bool:
        return self._ask(containment_encode_query(q))


class DNFIndex(_Index):
    def __init__(self, phi: DNFFormula, engine: str = "worst", **params) -> None:
        self.formula = phi
        super().__init__(dnf_encode(phi), engine, params)

    def query(self, a: BitVec) -> bool:
        return self._ask(dnf_encode_assignment(a))
