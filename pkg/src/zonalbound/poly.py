"""Dense univariate polynomials over the rationals, with Sturm root counting."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DegenerateInput
from .rational import RationalLike, to_q

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _trim(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    end = len(coeffs)
    while end and coeffs[end - 1] == 0:
        end -= 1
    return tuple(coeffs[:end])


@dataclass(frozen=True)
class DensePoly:
    """Polynomial stored as coefficients indexed by degree.

    The zero polynomial is the empty tuple; otherwise the last coefficient is
    nonzero.
    """

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        object.__setattr__(self, "coeffs", _trim([to_q(c) for c in coeffs]))

    @classmethod
    def constant(cls, c: RationalLike) -> "DensePoly":
        return cls([c])

    @classmethod
    def x(cls) -> "DensePoly":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else _ZERO

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, t: RationalLike) -> Fraction:
        t = to_q(t)
        acc = _ZERO
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __add__(self, other: "DensePoly") -> "DensePoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return DensePoly(out)

    def __neg__(self) -> "DensePoly":
        return DensePoly([-c for c in self.coeffs])

    def __sub__(self, other: "DensePoly") -> "DensePoly":
        return self + (-other)

    def __mul__(self, other) -> "DensePoly":
        if not isinstance(other, DensePoly):
            s = to_q(other)
            return DensePoly([c * s for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return DensePoly()
        out = [_ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return DensePoly(out)

    __rmul__ = __mul__

    def scale(self, s: RationalLike) -> "DensePoly":
        return self * to_q(s)

    def compose_neg(self) -> "DensePoly":
        """Return p(-t)."""
        return DensePoly([c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs)])

    def derivative(self) -> "DensePoly":
        return DensePoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def antiderivative(self) -> "DensePoly":
        return DensePoly([_ZERO] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def integrate(self, lo: RationalLike, hi: RationalLike) -> Fraction:
        F = self.antiderivative()
        return F(hi) - F(lo)

    def divmod(self, other: "DensePoly") -> tuple["DensePoly", "DensePoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.lead
        if len(rem) - 1 < dq:
            return DensePoly(), self
        quot = [_ZERO] * (len(rem) - dq)
        for shift in range(len(rem) - 1 - dq, -1, -1):
            c = rem[shift + dq] / lead
            quot[shift] = c
            if c:
                for i, b in enumerate(other.coeffs):
                    rem[shift + i] -= c * b
        return DensePoly(quot), DensePoly(rem[:dq])

    def __mod__(self, other: "DensePoly") -> "DensePoly":
        return self.divmod(other)[1]

    def monic(self) -> "DensePoly":
        return self * (1 / self.lead) if self.coeffs else self

    def __repr__(self) -> str:
        return f"DensePoly({[str(c) for c in self.coeffs]})"


def poly_gcd(a: DensePoly, b: DensePoly) -> DensePoly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def sturm_sequence(p: DensePoly) -> list[DensePoly]:
    if p.is_zero():
        raise DegenerateInput("Sturm sequence of the zero polynomial")
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    seq.pop()
    # Positive rescaling keeps the sign pattern and stops denominators growing.
    return [q * (1 / abs(q.lead)) for q in seq]


def _sign_changes(seq: Sequence[DensePoly], t: Fraction) -> int:
    changes = 0
    prev = 0
    for q in seq:
        v = q(t)
        if v == 0:
            continue
        s = 1 if v > 0 else -1
        if prev and s != prev:
            changes += 1
        prev = s
    return changes


def _strip_root(p: DensePoly, r: Fraction) -> DensePoly:
    lin = DensePoly([-r, 1])
    while not p.is_zero() and p(r) == 0:
        p = p.divmod(lin)[0]
    return p


def count_roots_detail(
    poly: DensePoly, lo: RationalLike, hi: RationalLike
) -> tuple[int, list[Fraction]]:
    """Distinct real roots in the open interval ``(lo, hi)`` plus the endpoints that are roots.

    Endpoint roots are divided out exactly before counting.
    """
    lo, hi = to_q(lo), to_q(hi)
    if poly.is_zero():
        raise DegenerateInput("root count of the zero polynomial")
    if not lo < hi:
        raise DegenerateInput("need lo < hi")
    boundary = [e for e in (lo, hi) if poly(e) == 0]
    p = poly
    for e in boundary:
        p = _strip_root(p, e)
    seq = sturm_sequence(p)
    return _sign_changes(seq, lo) - _sign_changes(seq, hi), boundary


def sturm_root_count(poly: DensePoly, lo: RationalLike, hi: RationalLike) -> int:
    """Exact number of distinct real roots in ``(lo, hi)``."""
    return count_roots_detail(poly, lo, hi)[0]


def cauchy_bound(p: DensePoly) -> Fraction:
    """All real roots lie strictly inside ``(-B, B)``."""
    return 1 + max((abs(c / p.lead) for c in p.coeffs[:-1]), default=_ZERO)


@dataclass(frozen=True)
class RootIsolation:
    poly: DensePoly
    intervals: tuple[tuple[Fraction, Fraction], ...]


def _nonroot_near(p: DensePoly, m: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    # Nudge a bisection point off a root while staying inside (lo, hi).
    if p(m) != 0:
        return m
    step = (hi - lo) / 7
    k = 1
    while True:
        for cand in (m + step / k, m - step / k):
            if lo < cand < hi and p(cand) != 0:
                return cand
        k += 1


def isolate_roots(
    poly: DensePoly,
    lo: RationalLike | None = None,
    hi: RationalLike | None = None,
    max_width: RationalLike | None = None,
) -> RootIsolation:
    """Disjoint sorted open intervals, each holding exactly one real root of ``poly``.

    Endpoints are never roots. Without ``lo``/``hi`` the whole real line is
    searched. Roots at a supplied ``lo``/``hi`` are excluded.
    """
    if poly.is_zero():
        raise DegenerateInput("cannot isolate roots of the zero polynomial")
    p = poly
    B = cauchy_bound(p)
    lo = -B if lo is None else to_q(lo)
    hi = B if hi is None else to_q(hi)
    for e in (lo, hi):
        p = _strip_root(p, e)
    p = p * (1 / p.lead) if p.coeffs else p
    if p.degree < 1:
        return RootIsolation(poly, ())
    seq = sturm_sequence(p)
    width = None if max_width is None else to_q(max_width)

    out: list[tuple[Fraction, Fraction]] = []
    stack = [(lo, hi, _sign_changes(seq, lo), _sign_changes(seq, hi))]
    while stack:
        a, b, va, vb = stack.pop()
        n = va - vb
        if n == 0:
            continue
        if n == 1 and (width is None or b - a <= width):
            out.append((a, b))
            continue
        m = _nonroot_near(p, (a + b) / 2, a, b)
        vm = _sign_changes(seq, m)
        stack.append((m, b, vm, vb))
        stack.append((a, m, va, vm))
    out.sort()
    return RootIsolation(poly, tuple(out))


def refine_interval(
    p: DensePoly, interval: tuple[Fraction, Fraction], width: RationalLike
) -> tuple[Fraction, Fraction]:
    """Shrink an isolating interval of a squarefree-at-that-root ``p`` by bisection."""
    a, b = interval
    width = to_q(width)
    seq = sturm_sequence(p)
    va = _sign_changes(seq, a)
    while b - a > width:
        m = _nonroot_near(p, (a + b) / 2, a, b)
        vm = _sign_changes(seq, m)
        if va - vm == 1:
            b = m
        else:
            a, va = m, vm
    return a, b
