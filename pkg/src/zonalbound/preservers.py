"""Cone and hull membership on finite point sets, and partial positivity preservers.

Everything here reduces to exact LP feasibility. Member verdicts are
re-verified by substitution; NotMember verdicts carry a Farkas vector y with
y . target < 0 <= y . g for every generator g (for hull membership y has one
extra component for the sum-to-one row).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ShapeError
from .orthopoly import eval_normalized, gegenbauer
from .poly import DensePoly
from .psdcomp import COMPLETABLE, INFEASIBLE, PartialSymMatrix, apply_entrywise, complete_psd, verify_completion
from .rational import RationalLike, to_q
from .simplex import EQ, OPTIMAL, lp_from_rows, solve_lp, verify_farkas

MEMBER, NOT_MEMBER = "Member", "NotMember"


@dataclass(frozen=True)
class FiniteFunction:
    X: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __init__(self, X: Sequence[RationalLike], values: Sequence[RationalLike]):
        pts = [to_q(x) for x in X]
        vals = [to_q(v) for v in values]
        if len(pts) != len(vals):
            raise ShapeError("need one value per point")
        if len(set(pts)) != len(pts):
            raise ValueError("points must be distinct")
        if any(not -1 <= x <= 1 for x in pts):
            raise ValueError("points must lie in [-1, 1]")
        if 1 not in pts:
            raise ValueError("the point set must contain 1")
        order = sorted(range(len(pts)), key=lambda i: pts[i])
        object.__setattr__(self, "X", tuple(pts[i] for i in order))
        object.__setattr__(self, "values", tuple(vals[i] for i in order))

    @classmethod
    def from_callable(cls, X, f) -> "FiniteFunction":
        pts = [to_q(x) for x in X]
        return cls(pts, [f(x) for x in pts])


def gegenbauer_restriction(X: Sequence[RationalLike], n: int, k: int) -> FiniteFunction:
    fam = gegenbauer(n)
    return FiniteFunction.from_callable(X, lambda t: eval_normalized(fam, k, t))


@dataclass
class Membership:
    status: str
    coefficients: list = field(default_factory=list)
    certificate: list = field(default_factory=list)


def _membership(target: FiniteFunction, generators: Sequence[FiniteFunction], hull: bool) -> Membership:
    for g in generators:
        if g.X != target.X:
            raise ShapeError("generators and target must share the point set")
    k = len(generators)
    rows = [([g.values[i] for g in generators], EQ, target.values[i]) for i in range(len(target.X))]
    if hull:
        rows.append(([1] * k, EQ, 1))
    lp = lp_from_rows([0] * k, rows)
    out = solve_lp(lp)
    if out.status == OPTIMAL:
        res = Membership(MEMBER, coefficients=out.primal)
    else:
        res = Membership(NOT_MEMBER, certificate=out.farkas)
    assert verify_membership(target, generators, res, hull)
    return res


def verify_membership(target, generators, res: Membership, hull: bool = False) -> bool:
    """Re-check a verdict without the LP: substitution for Member, Farkas for NotMember."""
    if res.status == MEMBER:
        lam = res.coefficients
        if any(v < 0 for v in lam) or (hull and sum(lam) != 1):
            return False
        return all(
            sum((l * g.values[i] for l, g in zip(lam, generators)), Fraction(0)) == target.values[i]
            for i in range(len(target.X))
        )
    y = res.certificate
    npts = len(target.X)
    # Farkas sign convention from the LP: y . target + (hull ? y_last : 0) < 0, y . g (+ y_last) >= 0.
    extra = y[npts] if hull else Fraction(0)
    tgt = sum((y[i] * target.values[i] for i in range(npts)), Fraction(0)) + extra
    if tgt >= 0:
        return False
    return all(
        sum((y[i] * g.values[i] for i in range(npts)), Fraction(0)) + extra >= 0 for g in generators
    )


def cone_membership(target: FiniteFunction, generators: Sequence[FiniteFunction]) -> Membership:
    return _membership(target, generators, hull=False)


def hull_membership(target: FiniteFunction, generators: Sequence[FiniteFunction]) -> Membership:
    return _membership(target, generators, hull=True)


def hull_cap(X: Sequence[RationalLike], n: int, N_max: int) -> Optional[int]:
    """Smallest N <= N_max with P̂_{N+1}, P̂_{N+2} in the hull of P̂_0..P̂_N on X, else None."""
    pts = sorted({to_q(x) for x in X})
    if 1 not in pts:
        raise ValueError("the point set must contain 1")
    restr = [gegenbauer_restriction(pts, n, k) for k in range(N_max + 3)]
    for N in range(N_max + 1):
        gens = restr[: N + 1]
        if all(hull_membership(restr[N + s], gens).status == MEMBER for s in (1, 2)):
            return N
    return None


@dataclass
class PreserverForm:
    """a*chi(x = +-1) + b*x*chi(x = +-1) + sum_i c_i x^i."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: tuple = ()

    def __post_init__(self):
        self.a, self.b = to_q(self.a), to_q(self.b)
        self.c = tuple(to_q(v) for v in self.c)

    def is_admissible(self) -> bool:
        return self.a >= 0 and self.b >= 0 and all(v >= 0 for v in self.c)

    def polynomial(self) -> DensePoly:
        return DensePoly(self.c)

    def __call__(self, x: RationalLike) -> Fraction:
        x = to_q(x)
        chi = 1 if x in (1, -1) else 0
        return self.a * chi + self.b * x * chi + self.polynomial()(x)


def _preserver_columns(X: Sequence[Fraction], D: int) -> list[list[Fraction]]:
    cols = [
        [Fraction(1 if x in (1, -1) else 0) for x in X],
        [x if x in (1, -1) else Fraction(0) for x in X],
    ]
    cols += [[x**i for x in X] for i in range(D + 1)]
    return cols


def fit_preserver_form(f: FiniteFunction, D: int) -> Membership:
    """Is f on X a nonnegative combination of chi, x*chi and 1, x, ..., x^D?

    Among feasible forms the lowest-degree one is preferred (the objective
    charges degree i for c_i and D+1 for a and b). ``coefficients`` holds
    (a, b, c_0..c_D) for Member.
    """
    X = f.X
    cols = _preserver_columns(X, D)
    rows = [([col[i] for col in cols], EQ, f.values[i]) for i in range(len(X))]
    cost = [-(D + 1), -(D + 1)] + [-i for i in range(D + 1)]
    lp = lp_from_rows(cost, rows)
    out = solve_lp(lp)
    gens = [FiniteFunction(X, col) for col in cols]
    if out.status == OPTIMAL:
        res = Membership(MEMBER, coefficients=out.primal)
    else:
        assert verify_farkas(lp, out.farkas)
        res = Membership(NOT_MEMBER, certificate=out.farkas)
    assert verify_membership(f, gens, res)
    return res


def form_from_fit(res: Membership) -> PreserverForm:
    a, b, *c = res.coefficients
    return PreserverForm(a, b, tuple(c))


def random_partial_psd(rng: random.Random, m: int, scale: int = 4, mask_prob: float = 0.5) -> PartialSymMatrix:
    """A^T A with small integer A, scaled into [-1, 1], with random symmetric holes."""
    A = [[rng.randint(-scale, scale) for _ in range(m)] for _ in range(m)]
    M = [[sum(A[k][i] * A[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
    peak = max(abs(v) for row in M for v in row) or 1
    entries = [[Fraction(M[i][j], peak) for j in range(m)] for i in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if rng.random() < mask_prob:
                entries[i][j] = entries[j][i] = None
    return PartialSymMatrix(entries)


@dataclass
class FuzzReport:
    seed: int
    trials: int
    size: int
    completable: int = 0
    unknown: int = 0
    violations: int = 0
    first_violation: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.violations == 0


def preserver_fuzz(
    form: PreserverForm, trials: int, m: int, seed: int, negative_control: bool = False
) -> FuzzReport:
    """Push random partial PSD matrices through the form's polynomial part.

    A violation is an image whose completion attempt returns a verified
    Infeasible certificate. Inadmissible forms (negative coefficients) are
    only accepted with ``negative_control=True``.
    """
    if not form.is_admissible() and not negative_control:
        raise ValueError("form has negative coefficients; pass negative_control=True")
    poly = form.polynomial()
    report = FuzzReport(seed, trials, m)
    for trial in range(trials):
        rng = random.Random(seed * 1_000_003 + trial)
        P = random_partial_psd(rng, m)
        image = apply_entrywise(P, poly)
        res = complete_psd(image)
        if res.status == COMPLETABLE:
            report.completable += 1
        elif res.status == INFEASIBLE:
            if verify_completion(image, res):
                report.violations += 1
                if report.first_violation is None:
                    report.first_violation = {
                        "trial": trial,
                        "input": P,
                        "image": image,
                        "certificate_indices": res.certificate_indices,
                    }
        else:
            report.unknown += 1
    return report
