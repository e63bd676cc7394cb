"""Exact PSD tests and completion of partially specified symmetric matrices."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import networkx as nx
import numpy as np

from .errors import PreconditionViolation, ShapeError
from .poly import DensePoly
from .rational import fmt_q, to_q

COMPLETABLE, INFEASIBLE, UNKNOWN = "Completable", "Infeasible", "Unknown"
CHORDAL, PROJECTION = "Chordal", "Projection"
PROJECTION_TOL = 1e-10


@dataclass(frozen=True)
class SymMatrix:
    entries: tuple[tuple[Fraction, ...], ...]

    def __init__(self, entries):
        rows = tuple(tuple(to_q(v) for v in row) for row in entries)
        m = len(rows)
        if any(len(r) != m for r in rows):
            raise ShapeError("matrix must be square")
        for i in range(m):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ShapeError(f"matrix is not symmetric at ({i}, {j})")
        object.__setattr__(self, "entries", rows)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def principal(self, idx: Sequence[int]) -> "SymMatrix":
        return SymMatrix([[self.entries[i][j] for j in idx] for i in idx])

    def as_lists(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]


@dataclass(frozen=True)
class PartialSymMatrix:
    """Symmetric matrix whose unspecified entries are ``None``."""

    entries: tuple[tuple[Optional[Fraction], ...], ...]

    def __init__(self, entries, mask=None):
        m = len(entries)
        rows = []
        for i, row in enumerate(entries):
            if len(row) != m:
                raise ShapeError("matrix must be square")
            out = []
            for j, v in enumerate(row):
                known = v is not None and (mask is None or mask[i][j])
                out.append(to_q(v) if known else None)
            rows.append(tuple(out))
        for i in range(m):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ShapeError(f"specification is not symmetric at ({i}, {j})")
        object.__setattr__(self, "entries", tuple(rows))

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def mask(self) -> list[list[bool]]:
        return [[v is not None for v in row] for row in self.entries]

    def is_specified(self, i: int, j: int) -> bool:
        return self.entries[i][j] is not None

    def is_full(self) -> bool:
        return all(v is not None for row in self.entries for v in row)

    def specified_graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.dim))
        g.add_edges_from(
            (i, j) for i in range(self.dim) for j in range(i + 1, self.dim) if self.is_specified(i, j)
        )
        return g


@dataclass
class CompletionResult:
    status: str
    method: str
    witness: Optional[SymMatrix] = None
    certificate_indices: Optional[tuple[int, ...]] = None
    certificate: Optional[SymMatrix] = None


def is_psd_exact(M: Union[SymMatrix, Sequence[Sequence]]) -> bool:
    """Exact PSD test by symmetric elimination on positive diagonal pivots."""
    A = M.as_lists() if isinstance(M, SymMatrix) else [[to_q(v) for v in r] for r in M]
    n = len(A)
    active = list(range(n))
    while active:
        if any(A[i][i] < 0 for i in active):
            return False
        piv = next((i for i in active if A[i][i] > 0), None)
        if piv is None:
            return all(A[i][j] == 0 for i in active for j in active)
        active.remove(piv)
        p = A[piv][piv]
        col = {i: A[i][piv] for i in active}
        for i in active:
            ci = col[i]
            if ci == 0:
                continue
            f = ci / p
            row = A[i]
            for j in active:
                cj = col[j]
                if cj:
                    row[j] -= f * cj
    return True


def rank_exact(rows: Sequence[Sequence[Fraction]]) -> int:
    A = [[to_q(v) for v in r] for r in rows]
    rank = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(A)) if A[r][c] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        pr = A[rank]
        for r in range(rank + 1, len(A)):
            if A[r][c] != 0:
                f = A[r][c] / pr[c]
                A[r] = [a - f * b for a, b in zip(A[r], pr)]
        rank += 1
    return rank


def psd_rank(M: SymMatrix) -> int:
    if not is_psd_exact(M):
        raise PreconditionViolation("psd_rank called on a matrix that is not PSD")
    return rank_exact(M.entries)


def apply_entrywise(P: PartialSymMatrix, f: Union[DensePoly, Sequence, Callable]) -> PartialSymMatrix:
    """Apply ``f`` to every specified entry; unspecified entries stay unspecified.

    ``f`` may be a DensePoly, a coefficient list (index = degree) or a callable
    returning exact rationals.
    """
    if not isinstance(f, DensePoly) and not callable(f):
        f = DensePoly(f)
    return PartialSymMatrix(
        [[None if v is None else to_q(f(v)) for v in row] for row in P.entries]
    )


def _mcs_order(g: nx.Graph) -> list[int]:
    """Maximum cardinality search; reversed visit order is a PEO when g is chordal."""
    weight = {v: 0 for v in g.nodes}
    visited: list[int] = []
    remaining = set(g.nodes)
    while remaining:
        v = max(sorted(remaining), key=lambda u: weight[u])
        visited.append(v)
        remaining.remove(v)
        for u in g.neighbors(v):
            if u in remaining:
                weight[u] += 1
    return visited[::-1]


def is_chordal(g: nx.Graph) -> bool:
    order = _mcs_order(g)
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [u for u in g.neighbors(v) if pos[u] > pos[v]]
        if not later:
            continue
        first = min(later, key=lambda u: pos[u])
        if any(u != first and not g.has_edge(first, u) for u in later):
            return False
    return True


def maximal_cliques(g: nx.Graph) -> list[tuple[int, ...]]:
    return sorted(tuple(sorted(c)) for c in nx.find_cliques(g))


def _check_cliques(P: PartialSymMatrix, g: nx.Graph) -> Optional[CompletionResult]:
    for clique in maximal_cliques(g):
        sub = SymMatrix([[P.entries[i][j] for j in clique] for i in clique])
        if not is_psd_exact(sub):
            return CompletionResult(INFEASIBLE, CHORDAL, certificate_indices=clique, certificate=sub)
    return None


def _solve_consistent(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Some exact solution of A z = b, assuming one exists (A PSD, b in its range)."""
    n = len(A)
    aug = [list(A[i]) + [b[i]] for i in range(n)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    z = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        z[c] = aug[i][n]
    return z


def _chordal_complete(P: PartialSymMatrix) -> CompletionResult:
    m = P.dim
    g = P.specified_graph()
    bad = _check_cliques(P, g)
    if bad is not None:
        return bad
    M = [[P.entries[i][j] for j in range(m)] for i in range(m)]
    while True:
        missing = [(i, j) for i in range(m) for j in range(i + 1, m) if not g.has_edge(i, j)]
        if not missing:
            break
        for u, v in missing:
            g.add_edge(u, v)
            if is_chordal(g):
                break
            g.remove_edge(u, v)
        else:  # pragma: no cover - chordal graphs always admit such an edge
            raise AssertionError("no chordality-preserving edge found")
        # the new edge lies in the unique maximal clique C + {u, v}
        C = sorted(set(g.neighbors(u)) & set(g.neighbors(v)))
        A_C = [[M[i][j] for j in C] for i in C]
        z_u = _solve_consistent(A_C, [M[i][u] for i in C])
        x0 = sum((z_u[k] * M[C[k]][v] for k in range(len(C))), Fraction(0))
        M[u][v] = M[v][u] = x0
    W = SymMatrix(M)
    assert is_psd_exact(W), "chordal completion produced a non-PSD witness"
    return CompletionResult(COMPLETABLE, CHORDAL, witness=W)


def _projection_complete(P: PartialSymMatrix, max_iter: int = 20000) -> CompletionResult:
    m = P.dim
    g = P.specified_graph()
    bad = _check_cliques(P, g)
    if bad is not None:
        bad.method = PROJECTION
        return bad
    mask = np.array(P.mask)
    target = np.array([[float(v) if v is not None else 0.0 for v in row] for row in P.entries])
    scale = max(1.0, float(np.abs(target).max()))
    for margin in (1e-3, 1e-6, 0.0):
        X = target.copy()
        p_incr = np.zeros_like(X)
        q_incr = np.zeros_like(X)
        for _ in range(max_iter):
            # Dykstra: alternate the shifted PSD cone and the affine specification set.
            Y = X + p_incr
            w, V = np.linalg.eigh((Y + Y.T) / 2)
            Z = (V * np.maximum(w, margin * scale)) @ V.T
            p_incr = Y - Z
            Y2 = Z + q_incr
            X_new = np.where(mask, target, Y2)
            q_incr = Y2 - X_new
            resid = np.abs(X_new - Z).max()
            X = X_new
            if resid < PROJECTION_TOL * scale:
                break
        for denom in (10**3, 10**6, 10**9):
            cand = [
                [
                    P.entries[i][j]
                    if P.entries[i][j] is not None
                    else Fraction(float((X[i, j] + X[j, i]) / 2)).limit_denominator(denom)
                    for j in range(m)
                ]
                for i in range(m)
            ]
            W = SymMatrix(cand)
            if is_psd_exact(W):
                return CompletionResult(COMPLETABLE, PROJECTION, witness=W)
    return CompletionResult(UNKNOWN, PROJECTION)


FREE_DIAGONAL_ROUNDS = 8


def complete_psd(P: PartialSymMatrix) -> CompletionResult:
    """Decide PSD completability exactly for chordal patterns, best effort otherwise.

    Unspecified diagonal entries are filled with a large value that is
    quadrupled whenever the only obstruction found involves one of them. An
    Infeasible verdict is only returned with a certificate made entirely of
    specified entries.
    """
    free = [i for i in range(P.dim) if P.entries[i][i] is None]
    if not free:
        return _complete_fixed_diagonal(P)
    t = 1 + sum((abs(v) for row in P.entries for v in row if v is not None), Fraction(0))
    for _ in range(FREE_DIAGONAL_ROUNDS):
        filled = PartialSymMatrix(
            [[t if (i == j and v is None) else v for j, v in enumerate(row)]
             for i, row in enumerate(P.entries)]
        )
        result = _complete_fixed_diagonal(filled)
        if result.status == COMPLETABLE:
            _assert_witness(P, result.witness)
            return result
        if result.status == UNKNOWN:
            return result
        fixed = tuple(i for i in result.certificate_indices if i not in free)
        sub = SymMatrix([[P.entries[i][j] for j in fixed] for i in fixed])
        if len(fixed) == len(result.certificate_indices) or not is_psd_exact(sub):
            return CompletionResult(INFEASIBLE, result.method, certificate_indices=fixed, certificate=sub)
        t *= 4
    return CompletionResult(UNKNOWN, CHORDAL if is_chordal(P.specified_graph()) else PROJECTION)


def _complete_fixed_diagonal(P: PartialSymMatrix) -> CompletionResult:
    if P.is_full():
        W = SymMatrix(P.entries)
        if is_psd_exact(W):
            return CompletionResult(COMPLETABLE, CHORDAL, witness=W)
        return CompletionResult(
            INFEASIBLE, CHORDAL, certificate_indices=tuple(range(P.dim)), certificate=W
        )
    if is_chordal(P.specified_graph()):
        result = _chordal_complete(P)
    else:
        result = _projection_complete(P)
    if result.status == COMPLETABLE:
        _assert_witness(P, result.witness)
    return result


def _assert_witness(P: PartialSymMatrix, W: SymMatrix) -> None:
    for i in range(P.dim):
        for j in range(P.dim):
            v = P.entries[i][j]
            assert v is None or W[i, j] == v, "witness disagrees with a specified entry"
    assert is_psd_exact(W), "witness is not PSD"


def verify_completion(P: PartialSymMatrix, result: CompletionResult) -> bool:
    """Independent re-check of a completion verdict."""
    if result.status == COMPLETABLE:
        try:
            _assert_witness(P, result.witness)
        except AssertionError:
            return False
        return True
    if result.status == INFEASIBLE:
        idx = result.certificate_indices
        full = all(P.entries[i][j] is not None for i in idx for j in idx)
        return full and not is_psd_exact(
            SymMatrix([[P.entries[i][j] for j in idx] for i in idx])
        )
    return True


def matrix_to_json(M: Union[SymMatrix, PartialSymMatrix]) -> dict:
    return {
        "dim": M.dim,
        "entries": [[None if v is None else fmt_q(v) for v in row] for row in M.entries],
        "mask": [[v is not None for v in row] for row in M.entries],
    }


def partial_from_json(obj: Union[dict, str]) -> PartialSymMatrix:
    if isinstance(obj, str):
        obj = json.loads(obj)
    entries = obj["entries"]
    mask = obj.get("mask")
    dim = obj.get("dim", len(entries))
    if len(entries) != dim:
        raise ShapeError("dim does not match the number of rows")
    return PartialSymMatrix(entries, mask)


def sym_from_json(obj: Union[dict, str]) -> SymMatrix:
    P = partial_from_json(obj)
    if not P.is_full():
        raise ShapeError("expected a fully specified matrix")
    return SymMatrix(P.entries)
