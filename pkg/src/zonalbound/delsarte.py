"""Delsarte linear-programming bounds for spherical codes with constrained angles.

For an angle set X in [-1, 1) and a degree cap N the bound solves

    maximize gbar  s.t.  gbar + sum_k f_k = 1,
                         gbar + sum_k f_k P̂_k(t) <= 0  for t in X,
                         gbar, f_k >= 0,

with P̂_k the 1-normalized zonal polynomials of S^{n-1}. Any code whose
pairwise inner products lie in X has at most 1/gbar points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import BudgetExceeded, InfeasibleCap, InvalidCode, OutOfDomain
from .orthopoly import darboux_envelope, eval_normalized, gegenbauer, normalized_poly
from .poly import DensePoly, isolate_roots, refine_interval
from .rational import RationalLike, to_q
from .simplex import EQ, INFEASIBLE, LE, OPTIMAL, lp_from_rows, solve_lp

DEFAULT_N_STEP = 4
DEFAULT_WINDOW = 2
DEFAULT_HARD_CAP = 120

SHARP, GAP, UNVERIFIED = "Sharp", "Gap", "Unverified"


@dataclass(frozen=True)
class AngleSet:
    values: tuple[Fraction, ...]

    def __init__(self, values: Iterable[RationalLike]):
        vals = [to_q(v) for v in values]
        if len(set(vals)) != len(vals):
            raise ValueError("duplicate angles")
        for v in vals:
            if not -1 <= v < 1:
                raise OutOfDomain(f"angle {v} outside [-1, 1)")
        object.__setattr__(self, "values", tuple(sorted(vals)))

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __contains__(self, t):
        return to_q(t) in self.values

    def is_symmetric(self) -> bool:
        return all(-v in self.values or v == -1 for v in self.values)


@dataclass
class DelsarteCertificate:
    n: int
    X: AngleSet
    degree_cap: int
    gbar: Fraction
    coeffs: list  # f_1..f_N
    residuals: dict
    degrees: tuple = ()
    metadata: dict = field(default_factory=dict)

    @property
    def bound_raw(self) -> Optional[Fraction]:
        return None if self.gbar == 0 else 1 / self.gbar

    @property
    def bound_floor(self) -> Optional[int]:
        raw = self.bound_raw
        return None if raw is None else math.floor(raw)

    def witness_poly(self) -> DensePoly:
        """g(t) = gbar + sum_k f_k P̂_k(t)."""
        fam = gegenbauer(self.n)
        g = DensePoly([self.gbar])
        for k, f in zip(self.degrees, self.coeffs):
            if f:
                g = g + normalized_poly(fam, k) * f
        return g

    def check(self) -> None:
        """Exact soundness checks; raises AssertionError on any failure."""
        assert self.gbar >= 0 and all(f >= 0 for f in self.coeffs)
        assert self.gbar + sum(self.coeffs) == 1, "normalization g(1) = 1 fails"
        fam = gegenbauer(self.n)
        for t in self.X:
            r = self.gbar + sum(
                (f * eval_normalized(fam, k, t) for k, f in zip(self.degrees, self.coeffs) if f),
                Fraction(0),
            )
            assert r == self.residuals[t], "stored residual is stale"
            assert r <= 0, f"witness is positive at constrained angle {t}"


def _as_angles(X) -> AngleSet:
    return X if isinstance(X, AngleSet) else AngleSet(X)


def _delsarte_lp(n: int, points: Sequence[Fraction], degrees: Sequence[int]):
    fam = gegenbauer(n)
    nvar = 1 + len(degrees)
    rows = [([1] * nvar, EQ, 1)]
    for t in points:
        rows.append(([1] + [eval_normalized(fam, k, t) for k in degrees], LE, 0))
    return lp_from_rows([1] + [0] * len(degrees), rows)


def delsarte_constant(
    n: int, X, N: int, degrees: Optional[Sequence[int]] = None
) -> DelsarteCertificate:
    """Optimal gbar at degree cap N (optionally restricted to ``degrees``)."""
    if n < 2:
        raise OutOfDomain("dimension must be at least 2")
    if N < 1:
        raise OutOfDomain("degree cap must be at least 1")
    X = _as_angles(X)
    if not len(X):
        raise ValueError("angle set must be nonempty")
    degs = tuple(range(1, N + 1)) if degrees is None else tuple(k for k in degrees if 1 <= k <= N)
    out = solve_lp(_delsarte_lp(n, X.values, degs))
    if out.status == INFEASIBLE:
        raise InfeasibleCap(f"no admissible witness of degree <= {N} for n={n}, X={list(map(str, X))}")
    assert out.status == OPTIMAL, "Delsarte LP cannot be unbounded (gbar <= 1)"
    gbar, coeffs = out.primal[0], out.primal[1:]
    fam = gegenbauer(n)
    residuals = {
        t: gbar + sum((f * eval_normalized(fam, k, t) for k, f in zip(degs, coeffs) if f), Fraction(0))
        for t in X
    }
    cert = DelsarteCertificate(n, X, N, gbar, list(coeffs), residuals, degs)
    cert.check()
    return cert


def delsarte_bound(
    n: int,
    X,
    N_start: Optional[int] = None,
    N_step: int = DEFAULT_N_STEP,
    stability_window: int = DEFAULT_WINDOW,
    hard_cap: int = DEFAULT_HARD_CAP,
) -> DelsarteCertificate:
    """Raise the degree cap until gbar repeats over ``stability_window`` consecutive caps.

    Caps whose LP is infeasible are recorded and skipped. Returns the
    certificate at the first cap of the stable run.
    """
    X = _as_angles(X)
    if N_start is None:
        N_start = 2 * (len(X) + 1)
    if N_start < 1 or N_step < 1 or stability_window < 1:
        raise OutOfDomain("N_start, N_step and stability_window must be positive")
    schedule: list[dict] = []
    run: list[DelsarteCertificate] = []
    best: Optional[DelsarteCertificate] = None
    N = N_start
    while N <= hard_cap:
        try:
            cert = delsarte_constant(n, X, N)
        except InfeasibleCap:
            schedule.append({"cap": N, "gbar": None})
            run = []
            N += N_step
            continue
        schedule.append({"cap": N, "gbar": cert.gbar})
        if run and cert.gbar != run[-1].gbar:
            run = []
        run.append(cert)
        best = cert if best is None or cert.gbar > best.gbar else best
        if len(run) >= stability_window:
            chosen = run[0]
            chosen.metadata.update(
                schedule=schedule, stabilized=True, stability_window=stability_window
            )
            return chosen
        N += N_step
    if best is not None:
        best.metadata.update(schedule=schedule, stabilized=False, stability_window=stability_window)
    raise BudgetExceeded(f"degree cap exceeded hard maximum {hard_cap}", best=best)


def _chebyshev_grid(a: Fraction, b: Fraction, size: int, denom: int) -> list[Fraction]:
    pts = {a, b}
    mid, half = (a + b) / 2, (b - a) / 2
    for i in range(1, size - 1):
        c = Fraction(math.cos(math.pi * i / (size - 1))).limit_denominator(denom)
        p = mid + half * c
        if a < p < b:
            pts.add(p)
    return sorted(pts)


def _nonpositive_on(g: DensePoly, a: Fraction, b: Fraction) -> bool:
    """Exact test that g <= 0 on [a, b].

    Write g = (t-a)^p (t-b)^q h with h(a), h(b) != 0. On (a, b) the sign of g
    is (-1)^q sign(h), and every root-free piece of (a, b) touches a or b or
    contains an endpoint of an isolating interval of h, so probing h there
    decides the sign everywhere.
    """
    if g.is_zero():
        return True
    if g(a) > 0 or g(b) > 0:
        return False
    h, q = g, 0
    while h(a) == 0:
        h = h.divmod(DensePoly([-a, 1]))[0]
    while h(b) == 0:
        h = h.divmod(DensePoly([-b, 1]))[0]
        q += 1
    sign = -1 if q % 2 else 1
    probes = [a, b]
    if h.degree >= 1:
        for lo, hi in isolate_roots(h, a, b).intervals:
            probes += [e for e in (lo, hi) if a <= e <= b]
    return all(sign * h(p) <= 0 for p in probes)


def _max_upper_bound(g: DensePoly, a: Fraction, b: Fraction, width: Fraction) -> Fraction:
    """Rational upper bound on max g over [a, b] from its critical points."""
    best = max(g(a), g(b))
    dg = g.derivative()
    if dg.degree < 1:
        return best
    lip = sum((abs(c) * max(abs(a), abs(b)) ** i for i, c in enumerate(dg.coeffs)), Fraction(0))
    for lo, hi in isolate_roots(dg, a, b).intervals:
        lo, hi = refine_interval(dg.monic(), (lo, hi), width)
        best = max(best, g((lo + hi) / 2) + lip * (hi - lo) / 2)
    return best


def _positive_peaks(g: DensePoly, a: Fraction, b: Fraction, denom: int) -> set[Fraction]:
    """Rational points near the interior local maxima where g is positive."""
    dg = g.derivative()
    if dg.degree < 1:
        return set()
    peaks = set()
    for lo, hi in isolate_roots(dg, a, b).intervals:
        lo, hi = refine_interval(dg.monic(), (lo, hi), Fraction(1, denom * denom))
        t = ((lo + hi) / 2).limit_denominator(denom)
        if a < t < b and g(t) > 0:
            peaks.add(t)
    return peaks


def _grid_constant(n: int, points: Sequence[Fraction], N: int, batch: int = 4) -> DelsarteCertificate:
    """delsarte_constant on a large grid by constraint generation.

    Solves on a small active subset and adds the most violated grid points
    until the witness is nonpositive on the whole grid. The relaxation's
    optimum is then feasible for the full grid, hence equal to its optimum.
    """
    step = max(1, len(points) // (N + 2))
    active = sorted(set(points[::step]) | {points[0], points[-1]})
    while True:
        cert = delsarte_constant(n, active, N)
        g = cert.witness_poly()
        worst = sorted(((g(t), t) for t in points if t not in active and g(t) > 0), reverse=True)
        if not worst:
            cert.metadata["active_points"] = len(active)
            return cert
        active = sorted(set(active) | {t for _v, t in worst[:batch]})


def interval_delsarte(
    n: int,
    cos_theta: RationalLike,
    N: int,
    grid: int = 32,
    retries: int = 2,
) -> DelsarteCertificate:
    """Delsarte bound with g <= 0 imposed on the whole interval [-1, cos_theta].

    The LP is solved on a Chebyshev-spaced rational grid that is refined on
    failure, with the failed witness's positive peaks added to the next grid. If the grid witness is never exactly nonpositive on the interval,
    it is lowered by a certified rational bound on its positive excess and
    renormalized, which keeps the certificate valid at a slightly weaker bound.
    """
    c = to_q(cos_theta)
    if not -1 < c < 1:
        raise OutOfDomain("cos_theta must lie in (-1, 1)")
    a = Fraction(-1)
    size = grid
    last = None
    attempts = []
    extra: set[Fraction] = set()
    for attempt in range(retries + 1):
        points = sorted(set(_chebyshev_grid(a, c, size, 16 * size)) | extra)
        cert = _grid_constant(n, points, N)
        g = cert.witness_poly()
        last = (cert, g, points)
        ok = _nonpositive_on(g, a, c)
        attempts.append({"grid": len(points), "gbar": cert.gbar, "certified": ok})
        if ok:
            return _finish_interval(n, c, N, cert, attempts, "exact")
        # exchange step: the next grid also pins down where this witness went positive
        extra |= _positive_peaks(g, a, c, 16 * size)
        size *= 2
    cert, g, points = last
    excess = _max_upper_bound(g, a, c, Fraction(1, 10**12))
    if excess > 0 and cert.gbar > excess:
        scale = 1 / (1 - excess)
        shifted = DelsarteCertificate(
            n, cert.X, N, (cert.gbar - excess) * scale, [f * scale for f in cert.coeffs],
            {}, cert.degrees,
        )
        if _nonpositive_on(shifted.witness_poly(), a, c):
            return _finish_interval(n, c, N, shifted, attempts, "shifted")
    cert.metadata.update(certified=False, numeric_only=True, attempts=attempts)
    return _finish_interval(n, c, N, cert, attempts, None)


def _finish_interval(n, c, N, cert, attempts, how) -> DelsarteCertificate:
    fam = gegenbauer(n)
    grid_points = cert.X
    cert.X = AngleSet([Fraction(-1), c]) if c != -1 else AngleSet([c])
    cert.residuals = {
        t: cert.gbar
        + sum((f * eval_normalized(fam, k, t) for k, f in zip(cert.degrees, cert.coeffs) if f), Fraction(0))
        for t in cert.X
    }
    cert.metadata.update(
        interval=(Fraction(-1), c),
        grid_size=len(grid_points),
        attempts=attempts,
        certified=how is not None,
        certification=how,
    )
    if how is not None:
        cert.check()
    return cert


@dataclass
class ThetaResult:
    n: int
    t: Fraction
    k_max: int
    m: Fraction
    k_argmin: int
    theta_ratio: Optional[Fraction]
    status: str  # "ok" or "Inconclusive"
    tail_envelope: Optional[Fraction]
    heuristic_cutoff: bool = True

    @property
    def theta_float(self) -> Optional[float]:
        """Approximate theta value (surface area of S^{n-1} times the ratio)."""
        if self.theta_ratio is None:
            return None
        omega = 2 * math.pi ** (self.n / 2) / math.gamma(self.n / 2)
        return omega * float(self.theta_ratio)


def theta_min(n: int, t: RationalLike, K_max: int) -> ThetaResult:
    """Minimum of P̂_k(t) over 0 <= k <= K_max and the ratio m/(m-1)."""
    t = to_q(t)
    if n < 3:
        raise OutOfDomain("theta_min needs n >= 3")
    if abs(t) >= 1:
        raise OutOfDomain("theta_min needs |t| < 1")
    if K_max < 1:
        raise OutOfDomain("K_max must be at least 1")
    fam = gegenbauer(n)
    m, arg = Fraction(1), 0
    for k in range(1, K_max + 1):
        v = eval_normalized(fam, k, t)
        if v < m:
            m, arg = v, k
    tail = darboux_envelope(n, K_max + 1, t)
    if m >= 0:
        return ThetaResult(n, t, K_max, m, arg, None, "Inconclusive", tail)
    captured = tail < -m
    return ThetaResult(n, t, K_max, m, arg, m / (m - 1), "ok" if captured else "Inconclusive", tail)


def sharpness_verdict(cert: DelsarteCertificate, code=None) -> str:
    """Sharp if ``code`` is a realizable code meeting the bound exactly, Gap if smaller."""
    if code is None:
        return UNVERIFIED
    from .codes import realizable

    gram = code.gram
    for i in range(gram.dim):
        if gram[i, i] != 1:
            raise InvalidCode("Gram diagonal must be 1")
        for j in range(i + 1, gram.dim):
            if gram[i, j] not in cert.X:
                raise InvalidCode(f"Gram entry {gram[i, j]} is not an allowed angle")
    if not realizable(code, cert.n):
        raise InvalidCode("code is not realizable in this dimension")
    size = gram.dim
    raw = cert.bound_raw
    if raw is None:
        return GAP
    assert size <= raw, "a realizable code exceeds its Delsarte bound"
    return SHARP if size == raw else GAP
