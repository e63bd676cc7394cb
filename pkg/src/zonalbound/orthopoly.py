"""Jacobi/Gegenbauer and Krawtchouk families evaluated exactly.

Gegenbauer polynomials for the sphere S^{n-1} are handled as Jacobi(a, a)
with a = (n-3)/2 (this gives the Chebyshev family for n = 2), and are only
exposed in 1-normalized form, where the competing normalizations agree.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DegenerateInput, DegreeOutOfRange, NormalizationError, OutOfDomain
from .poly import DensePoly, count_roots_detail, isolate_roots, poly_gcd, sturm_root_count
from .rational import RationalLike, binom_q, to_q

DARBOUX_SAFETY = 2


@dataclass(eq=False)
class OrthoFamily:
    """A Jacobi(alpha, beta) or Krawtchouk(n) family with an append-only cache."""

    kind: str
    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)
    n: Optional[int] = None
    _cache: list = field(default_factory=list, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if self.kind == "jacobi":
            self.alpha, self.beta = to_q(self.alpha), to_q(self.beta)
            if self.alpha <= -1 or self.beta <= -1:
                raise OutOfDomain("Jacobi parameters must exceed -1")
        elif self.kind == "krawtchouk":
            if self.n is None or self.n < 1:
                raise OutOfDomain("Krawtchouk family needs a positive n")
        else:
            raise ValueError(f"unknown family kind {self.kind!r}")

    @property
    def key(self) -> tuple:
        if self.kind == "jacobi":
            return ("jacobi", self.alpha, self.beta)
        return ("krawtchouk", self.n)

    def __eq__(self, other):
        return isinstance(other, OrthoFamily) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def normalization_point(self) -> Fraction:
        return Fraction(0) if self.kind == "krawtchouk" else Fraction(1)

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        if self.kind == "krawtchouk":
            return Fraction(0), Fraction(self.n)
        return Fraction(-1), Fraction(1)

    def poly(self, k: int) -> DensePoly:
        if k < 0:
            raise DegreeOutOfRange("degree must be nonnegative")
        if self.kind == "krawtchouk" and k > self.n:
            raise DegreeOutOfRange(f"Krawtchouk({self.n}) has no degree {k} member")
        if k < len(self._cache):
            return self._cache[k]
        with self._lock:
            while len(self._cache) <= k:
                self._cache.append(self._build(len(self._cache)))
        return self._cache[k]

    def _build(self, k: int) -> DensePoly:
        if self.kind == "krawtchouk":
            return _krawtchouk_poly(self.n, k)
        a, b = self.alpha, self.beta
        if k == 0:
            return DensePoly([1])
        if k == 1:
            # (a+1) + (a+b+2)(x-1)/2
            return DensePoly([(a + 1) - (a + b + 2) / 2, (a + b + 2) / 2])
        s = 2 * k + a + b
        lead = 2 * k * (k + a + b) * (s - 2)
        c1 = (s - 1) * s * (s - 2)
        c0 = (s - 1) * (a * a - b * b)
        c2 = 2 * (k + a - 1) * (k + b - 1) * s
        p1, p2 = self._cache[k - 1], self._cache[k - 2]
        x_p1 = DensePoly((0,) + p1.coeffs)
        return (x_p1 * c1 + p1 * c0 - p2 * c2) * (1 / lead)


def jacobi(alpha: RationalLike, beta: RationalLike) -> OrthoFamily:
    return OrthoFamily("jacobi", to_q(alpha), to_q(beta))


def legendre() -> OrthoFamily:
    return jacobi(0, 0)


def krawtchouk(n: int) -> OrthoFamily:
    return OrthoFamily("krawtchouk", n=n)


_GEGENBAUER: dict[int, OrthoFamily] = {}
_GEG_LOCK = threading.Lock()


def gegenbauer(n: int) -> OrthoFamily:
    """Zonal family of S^{n-1}; shared instance per dimension so caches are reused."""
    if n < 2:
        raise OutOfDomain("sphere dimension n must be at least 2")
    with _GEG_LOCK:
        if n not in _GEGENBAUER:
            a = Fraction(n - 3, 2)
            _GEGENBAUER[n] = jacobi(a, a)
        return _GEGENBAUER[n]


def _falling_binomial_poly(shift: int, sign: int, k: int) -> DensePoly:
    """C(shift + sign*d, k) as a polynomial in d."""
    out = DensePoly([1])
    for i in range(k):
        out = out * DensePoly([Fraction(shift - i, i + 1), Fraction(sign, i + 1)])
    return out


def _krawtchouk_poly(n: int, j: int) -> DensePoly:
    total = DensePoly()
    for k in range(j + 1):
        term = _falling_binomial_poly(0, 1, k) * _falling_binomial_poly(n, -1, j - k)
        total = total + (term if k % 2 == 0 else -term)
    return total


def family_poly(family: OrthoFamily, k: int) -> DensePoly:
    return family.poly(k)


def value_at_one(family: OrthoFamily, k: int) -> Fraction:
    """Value at the normalization point (t = 1 for Jacobi, d = 0 for Krawtchouk)."""
    return family.poly(k)(family.normalization_point)


def jacobi_value_at_one_closed_form(alpha: RationalLike, k: int) -> Fraction:
    """C(k + alpha, k)."""
    return binom_q(to_q(alpha) + k, k)


def eval_normalized(family: OrthoFamily, k: int, t: RationalLike) -> Fraction:
    at_one = value_at_one(family, k)
    if at_one == 0:
        raise NormalizationError(f"degree {k} member vanishes at the normalization point")
    return family.poly(k)(to_q(t)) / at_one


def normalized_poly(family: OrthoFamily, k: int) -> DensePoly:
    at_one = value_at_one(family, k)
    if at_one == 0:
        raise NormalizationError(f"degree {k} member vanishes at the normalization point")
    return family.poly(k) * (1 / at_one)


def leading_coeff(family: OrthoFamily, k: int) -> Fraction:
    return family.poly(k).lead


def norm_ratio(family: OrthoFamily, k: int) -> Fraction:
    """h_k / h_0 where h_k is the weighted squared norm of the degree-k member.

    Rational whenever the parameters are, unlike h_k itself.
    """
    if family.kind == "krawtchouk":
        # binomial weight C(n, d) on d = 0..n
        return Fraction(math.comb(family.n, k))
    if k == 0:
        return Fraction(1)
    a, b = family.alpha, family.beta
    num = Fraction(1)
    den = Fraction(math.factorial(k)) * (2 * k + a + b + 1)
    for i in range(k):
        num *= (a + 1 + i) * (b + 1 + i)
    for i in range(k - 1):
        den *= a + b + 2 + i
    return num / den


def christoffel_darboux(
    family: OrthoFamily, m: int, x: RationalLike, y: RationalLike
) -> Fraction:
    """Weighted kernel sum_{i<=m} p_i(x) p_i(y) / (h_i/h_0) by the quotient formula.

    Dividing by the norm ratios makes the sum the orthonormal kernel (times
    h_0), for which the two-term quotient is exact.
    """
    x, y = to_q(x), to_q(y)
    if x == y:
        raise DegenerateInput("x == y; use christoffel_darboux_direct")
    pm, pm1 = family.poly(m), family.poly(m + 1)
    scale = pm.lead / (pm1.lead * norm_ratio(family, m))
    return scale * (pm1(x) * pm(y) - pm(x) * pm1(y)) / (x - y)


def christoffel_darboux_direct(
    family: OrthoFamily, m: int, x: RationalLike, y: RationalLike
) -> Fraction:
    x, y = to_q(x), to_q(y)
    total = Fraction(0)
    for i in range(m + 1):
        p = family.poly(i)
        total += p(x) * p(y) / norm_ratio(family, i)
    return total


def interlacing_check(family: OrthoFamily, k: int) -> bool:
    """True iff the k+1 roots of p_{k+1} strictly interlace the k roots of p_k.

    Isolating intervals of p_k are shrunk until p_{k+1} has no root in them;
    then each gap between consecutive p_k roots, and each outer ray, must
    hold exactly one root of p_{k+1}.
    """
    if k < 1:
        raise DegreeOutOfRange("interlacing needs k >= 1")
    p, q = family.poly(k), family.poly(k + 1)
    if poly_gcd(p, q).degree > 0:
        return False
    iso = isolate_roots(p)
    if len(iso.intervals) != k:
        return False
    intervals = []
    for lo, hi in iso.intervals:
        while q(lo) == 0 or q(hi) == 0 or sturm_root_count(q, lo, hi) > 0:
            lo, hi = _shrink(p, lo, hi)
        intervals.append((lo, hi))
    q_iso = isolate_roots(q)
    if len(q_iso.intervals) != k + 1:
        return False
    outer_lo = min(q_iso.intervals[0][0], intervals[0][0]) - 1
    outer_hi = max(q_iso.intervals[-1][1], intervals[-1][1]) + 1
    gaps = [(outer_lo, intervals[0][0])]
    gaps += [(intervals[i][1], intervals[i + 1][0]) for i in range(k - 1)]
    gaps.append((intervals[-1][1], outer_hi))
    return all(sturm_root_count(q, a, b) == 1 for a, b in gaps)


def _shrink(p: DensePoly, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    mid = (lo + hi) / 2
    if p(mid) == 0:
        quarter = (hi - lo) / 4
        return mid - quarter, mid + quarter
    return (lo, mid) if sturm_root_count(p, lo, mid) == 1 else (mid, hi)


def zero_density_onset(
    family: OrthoFamily, lo: RationalLike, hi: RationalLike, n_max: int
) -> Optional[int]:
    """Smallest n0 <= n_max such that every member of degree n0..n_max has a root in [lo, hi]."""
    lo, hi = to_q(lo), to_q(hi)
    onset = None
    for n in range(n_max, -1, -1):
        count, boundary = _count_closed(family.poly(n), lo, hi)
        if count + len(boundary) == 0:
            break
        onset = n
    return onset


def _count_closed(p: DensePoly, lo: Fraction, hi: Fraction):
    if p.degree < 1:
        return 0, []
    return count_roots_detail(p, lo, hi)


def darboux_envelope(n: int, k: int, t: RationalLike) -> Fraction:
    """Heuristic bound on |P̂_k(t)| for the zonal family of S^{n-1}.

    Safety factor times the leading Darboux term k(theta) / sqrt(k), divided
    by the value at 1, capped at 1 (the normalized family never exceeds 1 in
    absolute value on [-1, 1]). Not rigorous; used only to pick scan cutoffs.
    The float result is rounded up to the next representable value before
    conversion, so the returned rational is never below the float estimate.
    """
    t = to_q(t)
    if abs(t) >= 1:
        raise OutOfDomain("darboux envelope needs |t| < 1")
    if k < 1:
        raise DegreeOutOfRange("darboux envelope needs k >= 1")
    if n < 3:
        raise OutOfDomain("darboux envelope needs n >= 3")
    a = (n - 3) / 2
    theta = math.acos(float(t))
    amp = (math.sin(theta / 2) * math.cos(theta / 2)) ** (-a - 0.5) / math.sqrt(math.pi)
    at_one = math.exp(math.lgamma(k + a + 1) - math.lgamma(a + 1) - math.lgamma(k + 1))
    bound = DARBOUX_SAFETY * amp / (math.sqrt(k) * at_one)
    if bound >= 1:
        return Fraction(1)
    return Fraction(math.nextafter(bound, math.inf))


def product_expand(family: OrthoFamily, i: int, j: int) -> list[Fraction]:
    """Coefficients c with P̂_i P̂_j = sum_k c_k P̂_k, k = 0..i+j.

    Solved top-down in the monomial basis, which is triangular because P̂_k
    has exact degree k.
    """
    if family.kind != "jacobi" or family.alpha != family.beta:
        raise ValueError("product_expand needs a Gegenbauer (symmetric Jacobi) family")
    rest = normalized_poly(family, i) * normalized_poly(family, j)
    coeffs = [Fraction(0)] * (i + j + 1)
    for k in range(i + j, -1, -1):
        basis = normalized_poly(family, k)
        c = rest.coeffs[k] / basis.lead if rest.degree == k else Fraction(0)
        coeffs[k] = c
        if c:
            rest = rest - basis * c
    assert rest.is_zero()
    return coeffs
