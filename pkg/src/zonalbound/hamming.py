"""Positive definite functions on the Hamming cube {-1, 1}^n via Krawtchouk expansions.

A function of the inner product is stored by its values at distance d = 0..n,
i.e. at inner product 1 - 2d/n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import DegreeOutOfRange
from .rational import RationalLike, to_q


@dataclass(frozen=True)
class CubeFunction:
    n: int
    values: tuple[Fraction, ...]

    def __init__(self, n: int, values: Sequence[RationalLike]):
        if len(values) != n + 1:
            raise ValueError(f"need {n + 1} values for the {n}-cube, got {len(values)}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", tuple(to_q(v) for v in values))

    @classmethod
    def from_inner_product(cls, n: int, f: Callable[[Fraction], RationalLike]) -> "CubeFunction":
        return cls(n, [f(1 - Fraction(2 * d, n)) for d in range(n + 1)])

    def __mul__(self, other: "CubeFunction") -> "CubeFunction":
        if other.n != self.n:
            raise ValueError("cube dimensions differ")
        return CubeFunction(self.n, [a * b for a, b in zip(self.values, other.values)])


@dataclass(frozen=True)
class KrawtchoukExpansion:
    n: int
    coefficients: tuple[Fraction, ...]

    def reconstruct(self) -> CubeFunction:
        return CubeFunction(
            self.n,
            [
                sum((a * krawtchouk_value(self.n, j, d) for j, a in enumerate(self.coefficients)), Fraction(0))
                for d in range(self.n + 1)
            ],
        )


def krawtchouk_value(n: int, j: int, d: int) -> int:
    """K_j^{(n)}(d) = sum_k (-1)^k C(d, k) C(n-d, j-k)."""
    if not (0 <= j <= n and 0 <= d <= n):
        raise DegreeOutOfRange(f"need 0 <= j, d <= n (got n={n}, j={j}, d={d})")
    return sum((-1) ** k * math.comb(d, k) * math.comb(n - d, j - k) for k in range(j + 1))


def expand(f: CubeFunction) -> KrawtchoukExpansion:
    """Solve [K_j(d)] a = f exactly."""
    n = f.n
    aug = [[Fraction(krawtchouk_value(n, j, d)) for j in range(n + 1)] + [f.values[d]] for d in range(n + 1)]
    for c in range(n + 1):
        piv = next(r for r in range(c, n + 1) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for r in range(n + 1):
            if r != c and aug[r][c] != 0:
                s = aug[r][c]
                aug[r] = [v - s * w for v, w in zip(aug[r], aug[c])]
    out = KrawtchoukExpansion(n, tuple(aug[j][n + 1] for j in range(n + 1)))
    assert out.reconstruct() == f, "Krawtchouk reconstruction failed"
    return out


def is_pd_on_cube(f: CubeFunction) -> tuple[bool, KrawtchoukExpansion]:
    exp = expand(f)
    return all(a >= 0 for a in exp.coefficients), exp


def nearest_distance(n: int, u: RationalLike) -> int:
    """d_n = n(1-u)/2 rounded to the nearest integer, ties to even."""
    return round(n * (1 - to_q(u)) / 2)


def limit_probe(j: int, u: RationalLike, n: int) -> tuple[Fraction, Fraction]:
    """(j!/n^j K_j^{(n)}(d_n), its distance from u^j)."""
    u = to_q(u)
    if not -1 <= u <= 1:
        raise ValueError("u must lie in [-1, 1]")
    d = nearest_distance(n, u)
    scaled = Fraction(math.factorial(j) * krawtchouk_value(n, j, d), n**j)
    return scaled, abs(scaled - u**j)


def convergence_table(j: int, u: RationalLike, ns: Sequence[int]) -> list[tuple[int, int, Fraction, Fraction]]:
    """Rows (n, d_n, scaled, error) for the CSV emitter."""
    rows = []
    for n in ns:
        scaled, err = limit_probe(j, u, n)
        rows.append((n, nearest_distance(n, u), scaled, err))
    return rows
