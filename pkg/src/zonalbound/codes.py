"""Gram-matrix realizability of constrained-angle codes and the hallucination probe."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .delsarte import SHARP, AngleSet, DelsarteCertificate, delsarte_bound, sharpness_verdict
from .errors import BudgetExceeded, InvalidCode
from .psdcomp import SymMatrix, is_psd_exact, psd_rank

FOUND, EXHAUSTED, BUDGET = "Found", "ExhaustedNoCode", "BudgetExceeded"
HALLUCINATION, INCONCLUSIVE = "HallucinationCandidate", "Inconclusive"
DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class GramCandidate:
    gram: SymMatrix
    X: AngleSet

    def __post_init__(self):
        X = self.X if isinstance(self.X, AngleSet) else AngleSet(self.X)
        object.__setattr__(self, "X", X)
        g = self.gram
        for i in range(g.dim):
            if g[i, i] != 1:
                raise InvalidCode("Gram diagonal must be 1")
            for j in range(i + 1, g.dim):
                if g[i, j] not in X:
                    raise InvalidCode(f"off-diagonal entry {g[i, j]} not in the angle set")

    @property
    def m(self) -> int:
        return self.gram.dim


def realizable(code: GramCandidate, n: int) -> bool:
    """Unit-diagonal Gram of a point set on S^{n-1}: PSD with rank at most n."""
    return is_psd_exact(code.gram) and psd_rank(code.gram) <= n


def petersen_gram() -> SymMatrix:
    """-1/3 on Petersen-graph edges, 1/3 on non-edges, 1 on the diagonal."""
    verts = list(itertools.combinations(range(5), 2))
    rows = []
    for a in verts:
        row = []
        for b in verts:
            if a == b:
                row.append(Fraction(1))
            elif set(a).isdisjoint(b):
                row.append(Fraction(-1, 3))
            else:
                row.append(Fraction(1, 3))
        rows.append(row)
    return SymMatrix(rows)


@dataclass
class SearchResult:
    status: str
    witness: Optional[GramCandidate] = None
    nodes: int = 0
    budget: int = 0


class _Search:
    """Point-by-point DFS with an incremental exact LDL^T of the Gram prefix.

    Column k of the Gram matrix (inner products of point k with points
    0..k-1) is filled one entry at a time. After each entry the partial LDL
    row is updated, so PSD violations and rank overflow prune immediately.
    Symmetry breaking: the prefix of column k over rows 0..j-1 must be
    lexicographically <= the same prefix of column j, for every j < k. Any
    code can be relabeled greedily to satisfy this, so no code is lost.
    """

    def __init__(self, n, values, m, budget, prune=True, symmetry=True):
        self.n, self.m, self.budget = n, m, budget
        self.values = sorted(values, reverse=True)
        self.prune, self.symmetry = prune, symmetry
        self.G = [[Fraction(0)] * m for _ in range(m)]
        self.L = [[Fraction(0)] * m for _ in range(m)]
        self.D = [Fraction(0)] * m
        self.rank = 0
        self.nodes = 0

    def run(self) -> SearchResult:
        for i in range(self.m):
            self.G[i][i] = Fraction(1)
        self.D[0] = Fraction(1)
        self.L[0][0] = Fraction(1)
        self.rank = 1
        if self.n < 1:
            return SearchResult(EXHAUSTED, nodes=0, budget=self.budget)
        try:
            found = self._column(1) if self.m > 1 else True
        except BudgetExceeded:
            return SearchResult(BUDGET, nodes=self.nodes, budget=self.budget)
        if not found:
            return SearchResult(EXHAUSTED, nodes=self.nodes, budget=self.budget)
        gram = SymMatrix(self.G)
        return SearchResult(FOUND, GramCandidate(gram, AngleSet(self.values)), self.nodes, self.budget)

    def _column(self, k: int) -> bool:
        if k == self.m:
            if self.prune:
                return True
            gram = SymMatrix(self.G)
            return is_psd_exact(gram) and psd_rank(gram) <= self.n
        return self._entry(k, 0, Fraction(0))

    def _entry(self, k: int, j: int, partial: Fraction) -> bool:
        """Assign G[j][k]; ``partial`` is sum_{i<j} L[k][i]^2 D[i]."""
        if j == k:
            dk = 1 - partial
            if self.prune:
                if dk < 0:
                    return False
                if dk > 0 and self.rank >= self.n:
                    return False
            self.D[k] = dk
            bump = 1 if dk > 0 else 0
            self.rank += bump
            ok = self._column(k + 1)
            self.rank -= bump
            return ok
        for v in self.values:
            if self.nodes >= self.budget:
                raise BudgetExceeded("search budget exhausted")
            self.nodes += 1
            self.G[j][k] = self.G[k][j] = v
            if self.symmetry and j + 1 < k and not self._canonical(k, j + 1):
                continue
            w = v - sum((self.L[k][i] * self.D[i] * self.L[j][i] for i in range(j)), Fraction(0))
            if self.D[j] > 0:
                lkj = w / self.D[j]
                new_partial = partial + lkj * lkj * self.D[j]
            else:
                if self.prune and w != 0:
                    continue
                lkj = Fraction(0)
                new_partial = partial
            if self.prune and new_partial > 1:
                continue
            self.L[k][j] = lkj
            if self._entry(k, j + 1, new_partial):
                return True
        return False

    def _canonical(self, k: int, j: int) -> bool:
        # column k prefix over rows 0..j-1 must not exceed column j's
        for r in range(j):
            a, b = self.G[r][k], self.G[r][j]
            if a != b:
                return a < b
        return True


def search_code(
    n: int,
    X,
    m: int,
    budget: int = DEFAULT_BUDGET,
    prune: bool = True,
    symmetry: bool = True,
) -> SearchResult:
    """Look for an m-point code in R^n whose pairwise inner products lie in X."""
    if m < 2:
        raise ValueError("target size must be at least 2")
    X = X if isinstance(X, AngleSet) else AngleSet(X)
    result = _Search(n, X.values, m, budget, prune, symmetry).run()
    if result.status == FOUND:
        result.witness = GramCandidate(result.witness.gram, X)
        assert realizable(result.witness, n), "search returned an unrealizable Gram matrix"
    return result


@dataclass
class ProbeVerdict:
    bound_floor: Optional[int]
    outcome: str
    certificate: Optional[DelsarteCertificate] = None
    witness: Optional[GramCandidate] = None
    search_stats: dict = field(default_factory=dict)


def hallucination_probe(n: int, X, lp_config: Optional[dict] = None, budget: int = DEFAULT_BUDGET) -> ProbeVerdict:
    """Compute the stabilized Delsarte bound and look for a code attaining it."""
    X = X if isinstance(X, AngleSet) else AngleSet(X)
    try:
        cert = delsarte_bound(n, X, **(lp_config or {}))
    except BudgetExceeded as exc:
        cert = exc.best
        return ProbeVerdict(
            None if cert is None else cert.bound_floor, INCONCLUSIVE, cert, None,
            {"reason": "degree cap budget exceeded"},
        )
    raw = cert.bound_raw
    if raw is None or raw.denominator != 1:
        return ProbeVerdict(cert.bound_floor, INCONCLUSIVE, cert, None, {"reason": "bound is not an integer"})
    target = cert.bound_floor
    if target < 2:
        # a single point is always a code
        return ProbeVerdict(target, SHARP, cert, None, {"nodes": 0, "budget": budget})
    res = search_code(n, X, target, budget)
    stats = {"nodes": res.nodes, "budget": budget, "search": res.status}
    if res.status == FOUND:
        assert sharpness_verdict(cert, res.witness) == SHARP
        return ProbeVerdict(target, SHARP, cert, res.witness, stats)
    if res.status == EXHAUSTED:
        return ProbeVerdict(target, HALLUCINATION, cert, None, stats)
    return ProbeVerdict(target, INCONCLUSIVE, cert, None, stats)
