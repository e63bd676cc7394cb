import itertools
from fractions import Fraction

import pytest

from zonalbound.codes import (
    BUDGET,
    EXHAUSTED,
    FOUND,
    HALLUCINATION,
    INCONCLUSIVE,
    GramCandidate,
    hallucination_probe,
    petersen_gram,
    realizable,
    search_code,
)
from zonalbound.delsarte import SHARP, AngleSet, sharpness_verdict
from zonalbound.errors import InvalidCode
from zonalbound.psdcomp import SymMatrix, psd_rank

F = Fraction


def const_gram(m, v):
    return SymMatrix([[1 if i == j else v for j in range(m)] for i in range(m)])


def test_realizable_examples():
    X13 = AngleSet([F(-1, 3), F(1, 3)])
    assert realizable(GramCandidate(petersen_gram(), X13), 5)
    assert not realizable(GramCandidate(petersen_gram(), X13), 4)
    assert not realizable(GramCandidate(const_gram(3, -1), AngleSet([-1])), 2)
    assert realizable(GramCandidate(const_gram(2, -1), AngleSet([-1])), 1)


def test_gram_candidate_validation():
    with pytest.raises(InvalidCode):
        GramCandidate(SymMatrix([[2, 0], [0, 1]]), AngleSet([0]))
    with pytest.raises(InvalidCode):
        GramCandidate(const_gram(2, F(1, 2)), AngleSet([0]))


def test_search_examples():
    r = search_code(2, [F(-1, 2)], 3)
    assert r.status == FOUND and psd_rank(r.witness.gram) == 2
    assert search_code(2, [-1], 3).status == EXHAUSTED


def test_search_petersen():
    r = search_code(5, [F(-1, 3), F(1, 3)], 10)
    assert r.status == FOUND
    assert realizable(r.witness, 5) and r.witness.m == 10


def test_search_budget():
    r = search_code(10, [-1, F(-1, 2), F(1, 2)], 46, budget=500)
    assert r.status == BUDGET and r.nodes == 500


CASES = [
    (n, X, m)
    for n in (1, 2, 3, 4)
    for X in ([-1], [F(-1, 2)], [0], [F(-1, 3), F(1, 3)], [-1, 0], [F(-1, 2), F(1, 2)], [F(-1, 4), F(1, 2)])
    for m in (2, 3, 4, 5)
]


@pytest.mark.parametrize("n,X,m", CASES)
def test_pruned_matches_brute_force(n, X, m):
    fast = search_code(n, X, m)
    brute = search_code(n, X, m, prune=False, symmetry=False)
    nosym = search_code(n, X, m, symmetry=False)
    assert fast.status == brute.status == nosym.status
    assert fast.nodes <= brute.nodes


def test_brute_force_is_really_exhaustive():
    # 2^(5*4/2) assignments, each visited once per entry level
    r = search_code(1, [F(-1, 3), F(1, 3)], 5, prune=False, symmetry=False)
    assert r.status == EXHAUSTED
    assert r.nodes == sum(2**k for k in range(1, 11))


@pytest.mark.parametrize("n,X,m", [(2, [-1, 0], 4), (3, [F(-1, 3)], 4), (5, [F(-1, 3), F(1, 3)], 10), (4, [-1, 0], 8)])
def test_found_shrinks(n, X, m):
    r = search_code(n, X, m)
    assert r.status == FOUND
    G = r.witness.gram
    for size in range(m - 1, 1, -1):
        sub = GramCandidate(G.principal(range(size)), AngleSet(X))
        assert realizable(sub, n)
        assert search_code(n, X, size).status == FOUND


def test_probe_sharp_instances():
    v = hallucination_probe(5, [F(-1, 3), F(1, 3)])
    assert v.outcome == SHARP and v.bound_floor == 10 and v.witness.m == 10
    assert sharpness_verdict(v.certificate, v.witness) == SHARP
    v = hallucination_probe(2, [F(-1, 2)])
    assert v.outcome == SHARP and v.bound_floor == 3


def test_probe_inconclusive_at_small_budget():
    v = hallucination_probe(10, [-1, F(-1, 2), F(1, 2)], budget=1000)
    assert v.bound_floor == 46 and v.outcome == INCONCLUSIVE
    assert v.search_stats["nodes"] == 1000


def test_probe_hallucination_path():
    # the LP gives exactly 5 for equiangular 1/2 in R^4, but the only
    # candidate Gram (all off-diagonal 1/2) has rank 5
    v = hallucination_probe(4, [F(1, 2)])
    assert v.bound_floor == 5 and v.certificate.bound_raw == 5
    assert v.outcome == HALLUCINATION
    assert psd_rank(const_gram(5, F(1, 2))) == 5
    assert search_code(4, [F(1, 2)], 4).status == FOUND


def test_probe_non_integer_bound_is_inconclusive():
    v = hallucination_probe(2, [F(-1, 3)])
    assert v.certificate.bound_raw.denominator != 1
    assert v.outcome == INCONCLUSIVE
