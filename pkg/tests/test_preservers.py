from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zonalbound.errors import ShapeError
from zonalbound.preservers import (
    MEMBER,
    NOT_MEMBER,
    FiniteFunction,
    PreserverForm,
    _preserver_columns,
    cone_membership,
    fit_preserver_form,
    form_from_fit,
    gegenbauer_restriction,
    hull_cap,
    hull_membership,
    preserver_fuzz,
    verify_membership,
)
from zonalbound.psdcomp import COMPLETABLE, PartialSymMatrix, apply_entrywise, complete_psd

F = Fraction
X5 = [F(-1), F(-1, 2), F(0), F(1, 2), F(1)]


def test_finite_function_invariants():
    f = FiniteFunction([1, 0, -1], [3, 2, 1])
    assert f.X == (-1, 0, 1) and f.values == (1, 2, 3)
    with pytest.raises(ValueError):
        FiniteFunction([0, F(1, 2)], [1, 1])
    with pytest.raises(ShapeError):
        FiniteFunction([0, 1], [1])


def test_cone_examples():
    gens = [gegenbauer_restriction(X5, 5, k) for k in range(5)]
    res = cone_membership(gens[0], gens)
    assert res.status == MEMBER and res.coefficients == [1, 0, 0, 0, 0]
    target = gegenbauer_restriction(X5, 5, 7)
    res = cone_membership(target, gens)
    assert verify_membership(target, gens, res)
    neg = FiniteFunction([0, 1], [0, -1])
    res = cone_membership(neg, [FiniteFunction([0, 1], [1, 1]), FiniteFunction([0, 1], [0, 1])])
    assert res.status == NOT_MEMBER
    y = res.certificate
    assert y[0] * 0 + y[1] * -1 < 0


def test_mismatched_points():
    with pytest.raises(ShapeError):
        cone_membership(FiniteFunction([0, 1], [1, 1]), [FiniteFunction([-1, 1], [1, 1])])


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=4),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.booleans())
@settings(max_examples=80, deadline=None)
def test_certificates_reverify(gen_vals, target_vals, hull):
    X = [F(-1), F(1, 3), F(1)]
    gens = [FiniteFunction(X, v) for v in gen_vals]
    target = FiniteFunction(X, target_vals)
    res = (hull_membership if hull else cone_membership)(target, gens)
    assert verify_membership(target, gens, res, hull)
    # the Farkas vector separates independently of the LP
    if res.status == NOT_MEMBER:
        y = res.certificate
        extra = y[3] if hull else 0
        assert sum(a * b for a, b in zip(y, target.values)) + extra < 0
        for g in gens:
            assert sum(a * b for a, b in zip(y, g.values)) + extra >= 0


def test_hull_cap_examples():
    assert hull_cap([-1, 1], 3, 10) == 1
    assert hull_cap([1], 4, 10) == 0
    assert hull_cap([-1, 0, 1], 3, 10) == 2  # regression value


def works(X, n, N):
    gens = [gegenbauer_restriction(X, n, k) for k in range(N + 1)]
    return all(hull_membership(gegenbauer_restriction(X, n, N + s), gens).status == MEMBER for s in (1, 2))


@pytest.mark.parametrize("n", [3, 5])
def test_hull_cap_monotone_on_nested_sets(n):
    chain = [[F(1)], [F(-1), F(1)], [F(-1), F(0), F(1)], [F(-1), F(0), F(1, 2), F(1)], X5]
    caps = [hull_cap(X, n, 20) for X in chain]
    assert all(c is not None for c in caps)
    assert caps == sorted(caps)
    for X, N in zip(chain, caps):
        for sub in chain[: chain.index(X)]:
            assert works(sub, n, N)


def test_fit_examples():
    for X in ([-1, 0, 1], [-1, F(1, 2), 1], X5):
        res = fit_preserver_form(FiniteFunction.from_callable(X, lambda x: x * x), 4)
        assert res.status == MEMBER
        form = form_from_fit(res)
        assert all(form(x) == x * x for x in X)
    chi = FiniteFunction([-1, 0, 1], [1, 0, 1])
    res = fit_preserver_form(chi, 3)
    assert res.status == MEMBER and form_from_fit(res).is_admissible()
    res = fit_preserver_form(FiniteFunction([-1, 0, 1], [1, 0, -1]), 5)
    assert res.status == NOT_MEMBER


def test_fit_prefers_monomial_on_interior_points():
    res = fit_preserver_form(FiniteFunction.from_callable(X5, lambda x: x * x), 4)
    form = form_from_fit(res)
    assert (form.a, form.b, form.c) == (0, 0, (0, 0, 1, 0, 0))


@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4), st.integers(0, 3))
@settings(max_examples=40, deadline=None)
def test_fit_monotone_in_degree(vals, D):
    f = FiniteFunction([F(-1), F(-1, 3), F(1, 2), F(1)], vals)
    if fit_preserver_form(f, D).status == MEMBER:
        assert fit_preserver_form(f, D + 2).status == MEMBER


def test_fit_farkas_reverifies():
    X = [F(-1), F(0), F(1)]
    f = FiniteFunction(X, [1, 0, -1])
    res = fit_preserver_form(f, 3)
    gens = [FiniteFunction(X, col) for col in _preserver_columns(f.X, 3)]
    assert verify_membership(f, gens, res)


def test_fuzz_identity_and_square():
    assert preserver_fuzz(PreserverForm(0, 0, (0, 1)), 100, 3, 1).violations == 0
    rep = preserver_fuzz(PreserverForm(0, 0, (0, 0, 1)), 200, 3, 42)
    assert rep.violations == 0 and rep.completable + rep.unknown == 200


def test_fuzz_motivating_matrix_image():
    P = PartialSymMatrix([[1, None, -1], [None, 2, 1], [-1, 1, None]])
    assert complete_psd(apply_entrywise(P, PreserverForm(0, 0, (0, 0, 1)).polynomial())).status == COMPLETABLE


def test_fuzz_negative_control():
    rep = preserver_fuzz(PreserverForm(0, 0, (0, -1)), 200, 3, 42, negative_control=True)
    assert rep.violations >= 1 and rep.first_violation is not None
    with pytest.raises(ValueError):
        preserver_fuzz(PreserverForm(0, 0, (0, -1)), 10, 3, 42)


def test_fuzz_reproducible():
    a = preserver_fuzz(PreserverForm(0, 0, (1, 0, 1)), 50, 4, 7)
    b = preserver_fuzz(PreserverForm(0, 0, (1, 0, 1)), 50, 4, 7)
    assert (a.completable, a.unknown, a.violations) == (b.completable, b.unknown, b.violations)
