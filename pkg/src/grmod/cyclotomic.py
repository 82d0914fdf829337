"""Arithmetic in ``Z[zeta_e] = Z[x] / Phi_e(x)`` in the power basis.

Polynomials are coefficient tuples, lowest degree first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import GrmodError
from .linalg import Matrix, from_columns


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _exact_divide(num: Sequence[int], den: Sequence[int]) -> tuple[int, ...]:
    # den is monic
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            out[i - dn] = c
            for j, b in enumerate(den):
                num[i - dn + j] -= c * b
    if any(num[:dn]):
        raise ArithmeticError("polynomial division left a remainder")
    return tuple(out)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(e: int) -> tuple[int, ...]:
    """Coefficients of ``Phi_e``, lowest degree first.

    >>> cyclotomic_polynomial(6)
    (1, -1, 1)
    """
    if e < 1:
        raise ValueError(f"e must be positive, got {e}")
    poly: tuple[int, ...] = (-1,) + (0,) * (e - 1) + (1,)
    for d in _divisors(e)[:-1]:
        poly = _exact_divide(poly, cyclotomic_polynomial(d))
    return poly


def euler_phi(e: int) -> int:
    return len(cyclotomic_polynomial(e)) - 1


@dataclass(frozen=True)
class CycloRing:
    """The ring ``Z[zeta_e]``."""

    e: int

    def __post_init__(self):
        if self.e < 1:
            raise ValueError(f"e must be positive, got {self.e}")

    @property
    def phi_coeffs(self) -> tuple[int, ...]:
        return cyclotomic_polynomial(self.e)

    @property
    def phi_e(self) -> int:
        return len(self.phi_coeffs) - 1

    def element(self, coeffs: Sequence[int]) -> "CycloElement":
        return CycloElement(self, reduce_poly(self, coeffs))

    @property
    def one(self) -> "CycloElement":
        return self.element([1])

    @property
    def zero(self) -> "CycloElement":
        return self.element([])

    @property
    def zeta(self) -> "CycloElement":
        return zeta_power(self, 1)

    def __repr__(self):
        return f"CycloRing({self.e})"


def reduce_poly(ring: CycloRing, coeffs: Sequence[int]) -> tuple[int, ...]:
    phi = ring.phi_coeffs
    n = len(phi) - 1
    c = list(coeffs) + [0] * max(0, n - len(coeffs))
    for i in range(len(c) - 1, n - 1, -1):
        a = c[i]
        if a:
            for j, b in enumerate(phi):
                c[i - n + j] -= a * b
    return tuple(c[:n])


@dataclass(frozen=True)
class CycloElement:
    ring: CycloRing
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.ring.phi_e:
            raise ValueError(
                f"expected {self.ring.phi_e} coefficients for {self.ring}, got {len(self.coeffs)}"
            )

    def _check(self, other):
        if not isinstance(other, CycloElement):
            return self.ring.element([other])
        if other.ring != self.ring:
            raise GrmodError(f"ring mismatch: {self.ring} vs {other.ring}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return CycloElement(self.ring, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloElement(self.ring, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        return cyclo_mul(self, self._check(other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        out, base = self.ring.one, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __repr__(self):
        return f"CycloElement(e={self.ring.e}, {list(self.coeffs)})"


def cyclo_mul(a: CycloElement, b: CycloElement) -> CycloElement:
    if a.ring != b.ring:
        raise GrmodError(f"ring mismatch: {a.ring} vs {b.ring}")
    prod_ = [0] * max(1, len(a.coeffs) + len(b.coeffs) - 1)
    for i, x in enumerate(a.coeffs):
        if x:
            for j, y in enumerate(b.coeffs):
                prod_[i + j] += x * y
    return CycloElement(a.ring, reduce_poly(a.ring, prod_))


def zeta_power(ring: CycloRing, k: int) -> CycloElement:
    """``zeta_e ** k`` for any integer ``k``."""
    k %= ring.e
    return CycloElement(ring, reduce_poly(ring, [0] * k + [1]))


def regular_rep(a: CycloElement) -> Matrix:
    """Matrix of multiplication by ``a``; column j holds the coefficients of ``a * zeta^j``."""
    ring = a.ring
    cols = [(a * zeta_power(ring, j)).coeffs for j in range(ring.phi_e)]
    return from_columns(cols, ring.phi_e)


def companion_matrix(e: int) -> Matrix:
    return regular_rep(CycloRing(e).zeta)
