import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zonalbound.codes import GramCandidate, petersen_gram, realizable
from zonalbound.delsarte import (
    GAP,
    SHARP,
    UNVERIFIED,
    AngleSet,
    delsarte_bound,
    delsarte_constant,
    interval_delsarte,
    sharpness_verdict,
    theta_min,
)
from zonalbound.errors import BudgetExceeded, InfeasibleCap, InvalidCode, OutOfDomain
from zonalbound.orthopoly import eval_normalized, gegenbauer
from zonalbound.psdcomp import SymMatrix

F = Fraction


def gram(m, off):
    return SymMatrix([[1 if i == j else off(i, j) for j in range(m)] for i in range(m)])


def test_hand_lp_examples():
    c = delsarte_constant(2, [-1], 1)
    assert c.gbar == F(1, 2) and c.bound_floor == 2 and c.coeffs == [F(1, 2)]
    c = delsarte_constant(3, [F(-1, 2)], 1)
    assert c.gbar == F(1, 3) and c.bound_floor == 3


def test_stabilized_examples():
    c = delsarte_bound(10, [-1, F(-1, 2), F(1, 2)])
    assert c.bound_floor == 46 and c.bound_raw == 46
    assert all(r <= 0 for r in c.residuals.values())
    assert c.metadata["stabilized"]
    c = delsarte_bound(5, [F(-1, 3), F(1, 3)])
    assert c.bound_floor == 10
    c = delsarte_bound(2, [-1])
    assert c.gbar == F(1, 2) and c.metadata["schedule"][0]["gbar"] == F(1, 2)


def test_certificate_invariants_on_return():
    c = delsarte_bound(10, [-1, F(-1, 2), F(1, 2)])
    assert c.gbar + sum(c.coeffs) == 1
    assert all(f >= 0 for f in c.coeffs)
    fam = gegenbauer(10)
    for t in c.X:
        direct = c.gbar + sum(f * eval_normalized(fam, k, t) for k, f in zip(c.degrees, c.coeffs))
        assert direct == c.residuals[t] <= 0
    assert c.witness_poly()(1) == 1
    assert c.bound_floor == math.floor(c.bound_raw)


def test_budget_exceeded_returns_best():
    with pytest.raises(BudgetExceeded) as info:
        delsarte_bound(10, [-1, F(-1, 2), F(1, 2)], N_start=2, N_step=1, stability_window=50, hard_cap=6)
    assert info.value.best is not None and info.value.best.metadata["stabilized"] is False


def test_infeasible_cap_reported():
    # every P̂_1 = t is positive at t = 1/2, so degree 1 cannot push g below 0 there
    with pytest.raises(InfeasibleCap):
        delsarte_constant(3, [F(1, 2)], 1)


angle_pool = [F(-1), F(-1, 2), F(-1, 3), F(0), F(1, 4), F(1, 3), F(1, 2)]


def gbar_or_none(n, X, N, degrees=None):
    try:
        return delsarte_constant(n, X, N, degrees).gbar
    except InfeasibleCap:
        return None


@given(st.sampled_from([2, 3, 4, 6]), st.sets(st.sampled_from(angle_pool), min_size=1, max_size=3), st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_monotone_in_degree_cap(n, X, N):
    small, large = gbar_or_none(n, X, N), gbar_or_none(n, X, N + 2)
    if small is not None:
        assert large is not None and large >= small


@given(st.sampled_from([3, 5]), st.sets(st.sampled_from(angle_pool), min_size=1, max_size=3), st.sampled_from(angle_pool))
@settings(max_examples=40, deadline=None)
def test_monotone_in_angle_set(n, X, extra):
    bigger = set(X) | {extra}
    g_small, g_big = gbar_or_none(n, X, 8), gbar_or_none(n, bigger, 8)
    if g_big is not None:
        assert g_small is not None and g_big <= g_small


WITNESSES = [
    # (n, X, Gram)
    (3, [-1], gram(2, lambda i, j: -1)),
    (2, [F(-1, 2)], gram(3, lambda i, j: F(-1, 2))),
    (2, [-1, 0], gram(4, lambda i, j: -1 if (i - j) % 2 == 0 else 0)),
    (4, [F(-1, 4)], gram(5, lambda i, j: F(-1, 4))),
    (6, [F(-1, 6)], gram(7, lambda i, j: F(-1, 6))),
    (5, [F(-1, 3), F(1, 3)], petersen_gram()),
]


@pytest.mark.parametrize("n,X,G", WITNESSES)
def test_bound_dominates_constructed_codes(n, X, G):
    code = GramCandidate(G, AngleSet(X))
    assert realizable(code, n)
    cert = delsarte_bound(n, X)
    assert cert.bound_raw >= G.dim
    assert sharpness_verdict(cert, code) in (SHARP, GAP)


def test_simplex_codes_are_sharp():
    for n in (2, 3, 4, 6):
        G = gram(n + 1, lambda i, j: F(-1, n))
        cert = delsarte_bound(n, [F(-1, n)])
        assert cert.bound_raw == n + 1
        assert sharpness_verdict(cert, GramCandidate(G, AngleSet([F(-1, n)]))) == SHARP


def test_even_restriction_not_better():
    X = [F(-1, 3), F(1, 3)]
    for N in (4, 6, 8):
        even = delsarte_constant(5, X, N, degrees=[k for k in range(2, N + 1, 2)]).gbar
        assert even <= delsarte_constant(5, X, N).gbar


def test_sharpness_verdicts():
    pet = delsarte_bound(5, [F(-1, 3), F(1, 3)])
    assert sharpness_verdict(pet, GramCandidate(petersen_gram(), AngleSet([F(-1, 3), F(1, 3)]))) == SHARP
    big = delsarte_bound(10, [-1, F(-1, 2), F(1, 2)])
    assert sharpness_verdict(big) == UNVERIFIED
    tri = delsarte_constant(3, [F(-1, 2)], 1)
    pair = GramCandidate(gram(2, lambda i, j: F(-1, 2)), AngleSet([F(-1, 2)]))
    assert sharpness_verdict(tri, pair) == GAP


def test_sharpness_rejects_foreign_angles():
    tri = delsarte_constant(3, [F(-1, 2)], 1)

    class Fake:
        gram = gram(2, lambda i, j: F(1, 5))

    with pytest.raises(InvalidCode):
        sharpness_verdict(tri, Fake())


def test_interval_examples():
    c = interval_delsarte(3, F(-1, 2), 1)
    assert c.gbar == F(1, 3) and c.bound_floor == 3 and c.metadata["certified"]
    c = interval_delsarte(2, 0, 4)
    assert c.metadata["certified"] and c.bound_raw >= 4


def test_interval_certificate_is_nonpositive_on_interval():
    c = interval_delsarte(3, F(1, 2), 6)
    assert c.metadata["certified"]
    g = c.witness_poly()
    for i in range(201):
        t = F(-1) + F(3, 2) * F(i, 200)
        assert g(t) <= 0
    # kissing configuration on S^2 has 12 points at angle >= 60 degrees
    assert c.bound_raw >= 12


def test_interval_relaxing_angle_grows_bound():
    tight = interval_delsarte(3, F(-1, 2), 1).bound_raw
    wide = interval_delsarte(3, F(-1, 5), 1).bound_raw
    assert wide >= tight


def test_theta_examples():
    r = theta_min(3, 0, 50)
    assert (r.m, r.k_argmin, r.theta_ratio, r.status) == (F(-1, 2), 2, F(1, 3), "ok")
    assert r.heuristic_cutoff
    r = theta_min(4, F(-1, 2), 50)
    assert (r.m, r.k_argmin) == (F(-1, 2), 1)
    r = theta_min(3, F(1, 2), 1)
    assert r.status == "Inconclusive" and r.m == F(1, 2)


def test_domain_errors():
    with pytest.raises(OutOfDomain):
        AngleSet([1])
    with pytest.raises(ValueError):
        AngleSet([0, 0])
    with pytest.raises(OutOfDomain):
        interval_delsarte(3, 1, 2)
    with pytest.raises(OutOfDomain):
        theta_min(3, 1, 5)
    with pytest.raises(OutOfDomain):
        delsarte_constant(1, [-1], 1)
