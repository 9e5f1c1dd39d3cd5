from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oov.core import BitVec, ContractError, CoordSet, is_orthogonal
from oov.engines import ENGINES
from oov.reductions import (
    ContainmentQueryIndex,
    DNFFormula,
    DNFIndex,
    PartialMatchIndex,
    PMPattern,
    SubsetQueryIndex,
    containment_encode_input,
    containment_encode_query,
    dnf_encode,
    dnf_encode_assignment,
    dnf_encode_clause,
    pm_encode_input,
    pm_encode_query,
    subset_encode_input,
    subset_encode_query,
)


def bv(s):
    return BitVec.from_str(s)


def cs(d, *m):
    return CoordSet.of(d, m)


def pm_match(x, y):
    return is_orthogonal(pm_encode_input(bv(x)), pm_encode_query(PMPattern.parse(y)))


def test_pm_examples():
    assert str(pm_encode_input(bv("10"))) == "1001"
    assert str(pm_encode_query(PMPattern.parse("1*"))) == "0100"
    assert pm_match("10", "1*")
    assert not pm_match("10", "0*")
    assert pm_encode_query(PMPattern.parse("***")).bits == 0
    assert all(pm_match(x, "**") for x in ("00", "01", "10", "11"))


def test_pm_pattern_validation():
    with pytest.raises(ContractError):
        PMPattern(3, "01")
    with pytest.raises(ContractError):
        PMPattern.parse("0?1")


def test_subset_examples():
    S, q = cs(3, 0, 1), cs(3, 0)
    assert str(subset_encode_input(S)) == "001" and str(subset_encode_query(q)) == "100"
    assert is_orthogonal(subset_encode_input(S), subset_encode_query(q))
    assert not is_orthogonal(subset_encode_input(cs(3, 0)), subset_encode_query(cs(3, 0, 1)))
    assert subset_encode_query(cs(3)).bits == 0


def test_containment_examples():
    S, q = cs(3, 2), cs(3, 1, 2)
    assert str(containment_encode_input(S)) == "001" and str(containment_encode_query(q)) == "100"
    assert is_orthogonal(containment_encode_input(S), containment_encode_query(q))
    assert not is_orthogonal(containment_encode_input(cs(3, 0, 2)), containment_encode_query(cs(3, 2)))
    assert containment_encode_input(cs(3)).bits == 0


def test_dnf_examples():
    phi = DNFFormula.of(2, [[(0, True), (1, False)]])
    assert str(dnf_encode_clause(phi.clauses[0], 2)) == "1001"
    assert str(dnf_encode_assignment(bv("10"))) == "0110"
    for engine in ENGINES:
        idx = DNFIndex(phi, engine)
        assert idx.query(bv("10"))
        assert not idx.query(bv("11"))
    single = DNFIndex(DNFFormula.of(3, [[(0, True)]]), "oracle")
    assert single.query(bv("100")) and single.query(bv("111")) and not single.query(bv("011"))


def test_dnf_rejects_bad_clauses():
    with pytest.raises(ContractError, match="polarities"):
        DNFFormula.of(2, [[(0, True), (0, False)]])
    with pytest.raises(ContractError):
        DNFFormula.of(2, [[]])
    with pytest.raises(ContractError):
        DNFFormula.of(2, [[(2, True)]])
    with pytest.raises(ContractError):
        DNFFormula.of(2, [])


def test_encoders_preserve_counts_and_dimensions():
    rng = random.Random(0)
    vecs = [BitVec(7, rng.randrange(128)) for _ in range(9)]
    idx = PartialMatchIndex(vecs, "oracle")
    assert idx.instance.n == 9 and idx.instance.dim == 14
    sets = [CoordSet.from_mask(7, rng.randrange(128)) for _ in range(9)]
    assert SubsetQueryIndex(sets, "oracle").instance.dim == 7
    phi = DNFFormula.of(5, [[(0, True), (3, False)], [(4, True)]])
    X = dnf_encode(phi)
    assert X.n == 2 and X.dim == 10


@given(st.integers(min_value=1, max_value=12), st.integers(min_value=1, max_value=4), st.data())
def test_monotone_dnf_gives_sparse_vectors(v, w, data):
    w = min(w, v)
    clauses = data.draw(st.lists(st.sets(st.integers(0, v - 1), min_size=w, max_size=w), min_size=1, max_size=10))
    phi = DNFFormula.of(v, [[(x, True) for x in c] for c in clauses])
    assert phi.is_monotone()
    assert all(x.bit_count() == w for x in dnf_encode(phi).rows)


def _random_pattern(rng, d):
    return PMPattern(d, "".join(rng.choice("01**") for _ in range(d)))


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("engine", ENGINES)
def test_adapters_against_direct_semantics(seed, engine):
    rng = random.Random(seed * 31 + len(engine))
    d = rng.randint(1, 8)
    n = rng.randint(1, 60)
    vecs = [BitVec(d, rng.randrange(1 << d)) for _ in range(n)]
    pm = PartialMatchIndex(vecs, engine)
    for _ in range(100):
        y = _random_pattern(rng, d)
        assert pm.query(y) == any(y.matches(x) for x in vecs)

    D = rng.randint(1, 16)
    sets = [CoordSet.from_mask(D, rng.randrange(1 << D) | rng.randrange(1 << D)) for _ in range(n)]
    sub = SubsetQueryIndex(sets, engine)
    con = ContainmentQueryIndex(sets, engine)
    for _ in range(100):
        q = CoordSet.from_mask(D, rng.randrange(1 << D) & rng.randrange(1 << D))
        assert sub.query(q) == any(set(q) <= set(S) for S in sets)
        big = CoordSet.from_mask(D, rng.randrange(1 << D) | rng.randrange(1 << D))
        assert con.query(big) == any(set(S) <= set(big) for S in sets)

    v = rng.randint(1, 8)
    clauses = []
    for _ in range(rng.randint(1, 30)):
        vs = rng.sample(range(v), rng.randint(1, v))
        clauses.append([(x, rng.random() < 0.5) for x in vs])
    phi = DNFFormula.of(v, clauses)
    idx = DNFIndex(phi, engine)
    for a in range(1 << v):
        assert idx.query(BitVec(v, a)) == phi.evaluate(BitVec(v, a))
