"""Exact two-phase simplex over the rationals with Bland's rule.

Every outcome carries a certificate that is re-checked exactly before it is
returned: a dual solution for Optimal, a Farkas vector for Infeasible and a
primal ray for Unbounded.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ShapeError
from .rational import RationalLike, to_q

LE, EQ, GE = "<=", "=", ">="
OPTIMAL, INFEASIBLE, UNBOUNDED = "Optimal", "Infeasible", "Unbounded"

_ZERO = Fraction(0)


@dataclass
class LinearProgram:
    """maximize objective . x  s.t.  A x (relations) rhs, x_j >= 0 unless free[j]."""

    objective: list
    A: list
    relations: list
    rhs: list
    free: Optional[list] = None

    def __post_init__(self):
        self.objective = [to_q(c) for c in self.objective]
        nvar = len(self.objective)
        if nvar == 0:
            raise ShapeError("a linear program needs at least one variable")
        if not (len(self.A) == len(self.relations) == len(self.rhs)):
            raise ShapeError("A, relations and rhs must have the same number of rows")
        rows = []
        for i, row in enumerate(self.A):
            if len(row) != nvar:
                raise ShapeError(f"row {i} has {len(row)} entries, expected {nvar}")
            rows.append([to_q(v) for v in row])
        self.A = rows
        self.rhs = [to_q(v) for v in self.rhs]
        for rel in self.relations:
            if rel not in (LE, EQ, GE):
                raise ShapeError(f"unknown relation {rel!r}")
        if self.free is None:
            self.free = [False] * nvar
        elif len(self.free) != nvar:
            raise ShapeError("free flags must match the number of variables")

    @property
    def nvar(self) -> int:
        return len(self.objective)


@dataclass
class LPOutcome:
    status: str
    optimum: Optional[Fraction] = None
    primal: list = field(default_factory=list)
    dual: list = field(default_factory=list)
    farkas: list = field(default_factory=list)
    ray: list = field(default_factory=list)
    pivots: int = 0


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), _ZERO)


def _solve_square(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(M)
    aug = [list(M[i]) + [rhs[i]] for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[c])]
    return [aug[i][n] for i in range(n)]


class _Tableau:
    def __init__(self, rows, basis, ncols):
        self.T = rows  # each row: ncols coefficients followed by rhs
        self.basis = basis
        self.ncols = ncols
        self.pivots = 0

    def pivot(self, r: int, c: int) -> None:
        row = self.T[r]
        inv = 1 / row[c]
        row = [v * inv for v in row]
        self.T[r] = row
        for i, other in enumerate(self.T):
            if i != r and other[c] != 0:
                f = other[c]
                self.T[i] = [v - f * w for v, w in zip(other, row)]
        self.basis[r] = c
        self.pivots += 1

    def run(self, cost: list[Fraction], allowed: list[bool]) -> Optional[int]:
        """Maximize cost . x over the tableau. Returns an unbounded column or None."""
        while True:
            # reduced profit of column j: cost_j - cost_B . column_j
            entering = None
            in_basis = set(self.basis)
            for j in range(self.ncols):
                if not allowed[j] or j in in_basis:
                    continue
                profit = cost[j] - sum(
                    (cost[b] * self.T[i][j] for i, b in enumerate(self.basis) if self.T[i][j]),
                    _ZERO,
                )
                if profit > 0:
                    entering = j
                    break
            if entering is None:
                return None
            leave = None
            best = None
            for i, row in enumerate(self.T):
                a = row[entering]
                if a > 0:
                    ratio = row[-1] / a
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[i] < self.basis[leave])
                    ):
                        best, leave = ratio, i
            if leave is None:
                return entering
            self.pivot(leave, entering)

    def values(self) -> list[Fraction]:
        x = [_ZERO] * self.ncols
        for i, b in enumerate(self.basis):
            x[b] = self.T[i][-1]
        return x


def solve_lp(lp: LinearProgram) -> LPOutcome:
    """Solve ``lp`` exactly; the outcome's certificates are verified before return."""
    m, nvar = len(lp.A), lp.nvar

    # Columns: structural (free vars split into +/-), then slacks, then artificials.
    col_var: list[tuple[int, int]] = []
    for j in range(nvar):
        col_var.append((j, 1))
        if lp.free[j]:
            col_var.append((j, -1))
    n_struct = len(col_var)

    sigma = [(-1 if lp.rhs[i] < 0 else 1) for i in range(m)]
    kappa = [{LE: 1, GE: -1, EQ: 0}[rel] for rel in lp.relations]
    slack_col: dict[int, int] = {}
    ncols = n_struct
    for i in range(m):
        if kappa[i]:
            slack_col[i] = ncols
            ncols += 1
    n_real = ncols

    rows: list[list[Fraction]] = []
    basis: list[int] = []
    art_rows: list[int] = []
    for i in range(m):
        row = [_ZERO] * n_real
        for c, (j, s) in enumerate(col_var):
            row[c] = sigma[i] * s * lp.A[i][j]
        if i in slack_col:
            row[slack_col[i]] = Fraction(sigma[i] * kappa[i])
        rows.append(row)
        if i in slack_col and sigma[i] * kappa[i] == 1:
            basis.append(slack_col[i])
        else:
            basis.append(-1)
            art_rows.append(i)
    n_art = len(art_rows)
    ncols = n_real + n_art
    for i in range(m):
        rows[i] += [_ZERO] * n_art
    for k, i in enumerate(art_rows):
        rows[i][n_real + k] = Fraction(1)
        basis[i] = n_real + k
    A_std = [list(r) for r in rows]
    for i in range(m):
        rows[i].append(sigma[i] * lp.rhs[i])

    tab = _Tableau(rows, basis, ncols)

    def duals(cost: list[Fraction]) -> list[Fraction]:
        B = [[A_std[r][tab.basis[c]] for r in range(len(A_std))] for c in range(len(tab.basis))]
        u = _solve_square(B, [cost[b] for b in tab.basis])
        return u

    # Phase 1: maximize -sum(artificials).
    if n_art:
        cost1 = [_ZERO] * n_real + [Fraction(-1)] * n_art
        tab.run(cost1, [True] * ncols)
        if _dot(cost1, tab.values()) < 0:
            u = duals(cost1)
            y = [sigma[i] * u[i] for i in range(m)]
            _check_farkas(lp, y)
            return LPOutcome(INFEASIBLE, farkas=y, pivots=tab.pivots)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        keep = []
        for r in range(len(tab.T)):
            if tab.basis[r] >= n_real:
                c = next((c for c in range(n_real) if tab.T[r][c] != 0), None)
                if c is None:
                    continue
                tab.pivot(r, c)
            keep.append(r)
        tab.T = [tab.T[r] for r in keep]
        tab.basis = [tab.basis[r] for r in keep]
        A_std = [A_std[r] for r in keep]
        kept_rows = keep
    else:
        kept_rows = list(range(m))

    allowed = [c < n_real for c in range(ncols)]
    cost2 = [_ZERO] * ncols
    for c, (j, s) in enumerate(col_var):
        cost2[c] = s * lp.objective[j]
    unbounded_col = tab.run(cost2, allowed)
    xs = tab.values()
    primal = [_ZERO] * nvar
    for c, (j, s) in enumerate(col_var):
        primal[j] += s * xs[c]

    if unbounded_col is not None:
        d = [_ZERO] * ncols
        d[unbounded_col] = Fraction(1)
        for i, b in enumerate(tab.basis):
            d[b] = -tab.T[i][unbounded_col]
        ray = [_ZERO] * nvar
        for c, (j, s) in enumerate(col_var):
            ray[j] += s * d[c]
        _check_primal(lp, primal)
        _check_ray(lp, ray)
        return LPOutcome(UNBOUNDED, primal=primal, ray=ray, pivots=tab.pivots)

    optimum = _dot(lp.objective, primal)
    u_kept = duals(cost2)
    y = [_ZERO] * m
    for pos, r in enumerate(kept_rows):
        y[r] = sigma[r] * u_kept[pos]
    _check_primal(lp, primal)
    _check_dual(lp, y, optimum)
    return LPOutcome(OPTIMAL, optimum=optimum, primal=primal, dual=y, pivots=tab.pivots)


def _row_ok(lhs: Fraction, rel: str, rhs: Fraction) -> bool:
    return lhs <= rhs if rel == LE else lhs >= rhs if rel == GE else lhs == rhs


def _check_primal(lp: LinearProgram, x: list[Fraction]) -> None:
    for j, v in enumerate(x):
        assert lp.free[j] or v >= 0, "primal violates a sign constraint"
    for row, rel, b in zip(lp.A, lp.relations, lp.rhs):
        assert _row_ok(_dot(row, x), rel, b), "primal violates a constraint"


def _dual_signs_ok(lp: LinearProgram, y: list[Fraction]) -> bool:
    return all(
        (rel == EQ) or (rel == LE and v >= 0) or (rel == GE and v <= 0)
        for rel, v in zip(lp.relations, y)
    )


def _check_dual(lp: LinearProgram, y: list[Fraction], optimum: Fraction) -> None:
    assert _dual_signs_ok(lp, y), "dual violates a sign constraint"
    for j in range(lp.nvar):
        col = sum((y[i] * lp.A[i][j] for i in range(len(lp.A))), _ZERO)
        if lp.free[j]:
            assert col == lp.objective[j], "dual equality constraint violated"
        else:
            assert col >= lp.objective[j], "dual constraint violated"
    assert _dot(y, lp.rhs) == optimum, "strong duality check failed"


def _check_farkas(lp: LinearProgram, y: list[Fraction]) -> None:
    assert verify_farkas(lp, y), "infeasibility certificate failed to verify"


def verify_farkas(lp: LinearProgram, y: list[Fraction]) -> bool:
    """True iff ``y`` proves that ``lp`` has no feasible point."""
    if not _dual_signs_ok(lp, y):
        return False
    for j in range(lp.nvar):
        col = sum((y[i] * lp.A[i][j] for i in range(len(lp.A))), _ZERO)
        if (lp.free[j] and col != 0) or col < 0:
            return False
    return _dot(y, lp.rhs) < 0


def _check_ray(lp: LinearProgram, d: list[Fraction]) -> None:
    for j, v in enumerate(d):
        assert lp.free[j] or v >= 0, "ray leaves the sign constraints"
    for row, rel in zip(lp.A, lp.relations):
        assert _row_ok(_dot(row, d), rel, _ZERO), "ray leaves the feasible region"
    assert _dot(lp.objective, d) > 0, "ray does not improve the objective"


def lp_from_rows(
    objective: Sequence[RationalLike],
    rows: Sequence[tuple[Sequence[RationalLike], str, RationalLike]],
    free: Optional[Sequence[bool]] = None,
) -> LinearProgram:
    """Build a program from ``(coefficients, relation, rhs)`` triples."""
    return LinearProgram(
        list(objective),
        [list(r[0]) for r in rows],
        [r[1] for r in rows],
        [r[2] for r in rows],
        None if free is None else list(free),
    )
