"""Finite abelian groups, their subgroups, and characters valued in ``Z[zeta_e]``.

Group elements are exponent tuples ``(g_1, ..., g_r)`` with
``0 <= g_j < n_j`` for ``G = Z/n_1 x ... x Z/n_r``.  A character is the
vector ``a`` with ``chi(gen_j) = zeta_e ** a_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from math import gcd, lcm, prod
from typing import Iterable, Sequence

from .cyclotomic import CycloElement, CycloRing, zeta_power
from .errors import CapExceeded, GrmodError, NotCyclic
from .linalg import LatticeBasis, hermite_lattice, present_quotient

Element = tuple[int, ...]

DEFAULT_SUBGROUP_CAP = 512


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    p = 2
    while p * p <= n:
        if n % p == 0:
            return False
        p += 1
    return True


def prime_power(n: int) -> tuple[int, int] | None:
    """``(p, k)`` with ``n == p**k``, ``k >= 1``; ``None`` otherwise."""
    if n < 2:
        return None
    p = next(q for q in range(2, n + 1) if n % q == 0)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return (p, k) if n == 1 else None


@dataclass(frozen=True)
class FiniteAbelianGroup:
    cyclic_orders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "cyclic_orders", tuple(int(n) for n in self.cyclic_orders))
        if any(n < 1 for n in self.cyclic_orders):
            raise ValueError(f"cyclic orders must be positive: {self.cyclic_orders}")

    @classmethod
    def parse(cls, spec: str) -> "FiniteAbelianGroup":
        """Parse ``"2x4"`` style specs."""
        try:
            orders = tuple(int(x) for x in spec.lower().split("x"))
        except ValueError:
            raise ValueError(f"bad group spec {spec!r}") from None
        return cls(orders)

    @property
    def rank(self) -> int:
        return len(self.cyclic_orders)

    @property
    def order(self) -> int:
        return prod(self.cyclic_orders)

    @property
    def exponent(self) -> int:
        return lcm(*self.cyclic_orders) if self.cyclic_orders else 1

    @property
    def is_cyclic(self) -> bool:
        return self.exponent == self.order

    @property
    def identity(self) -> Element:
        return (0,) * self.rank

    def generator(self, j: int) -> Element:
        return tuple(int(i == j) % n for i, n in enumerate(self.cyclic_orders))

    def elements(self) -> list[Element]:
        return list(product(*(range(n) for n in self.cyclic_orders)))

    def normalize(self, g: Sequence[int]) -> Element:
        if len(g) != self.rank:
            raise GrmodError(f"element {tuple(g)} does not belong to {self}")
        return tuple(x % n for x, n in zip(g, self.cyclic_orders))

    def add(self, g: Element, h: Element) -> Element:
        return tuple((a + b) % n for a, b, n in zip(g, h, self.cyclic_orders))

    def neg(self, g: Element) -> Element:
        return tuple(-a % n for a, n in zip(g, self.cyclic_orders))

    def mul(self, c: int, g: Element) -> Element:
        return tuple((c * a) % n for a, n in zip(g, self.cyclic_orders))

    def element_order(self, g: Element) -> int:
        return lcm(*(n // gcd(a, n) for a, n in zip(g, self.cyclic_orders))) if g else 1

    def __str__(self):
        return "x".join(map(str, self.cyclic_orders)) or "1"


@dataclass(frozen=True)
class Character:
    """``chi(g) = zeta_e ** (a . g)``."""

    group: FiniteAbelianGroup
    a: tuple[int, ...]
    e: int

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(x % self.e for x in self.a))
        if len(self.a) != self.group.rank:
            raise GrmodError(f"character vector {self.a} has wrong length for {self.group}")
        for n, x in zip(self.group.cyclic_orders, self.a):
            if (n * x) % self.e:
                raise GrmodError(f"{self.a} is not a character of {self.group} with e={self.e}")

    def exponent_at(self, g: Sequence[int]) -> int:
        """``k`` with ``chi(g) = zeta_e ** k``, ``0 <= k < e``."""
        return sum(x * y for x, y in zip(self.a, g)) % self.e

    @property
    def is_trivial(self) -> bool:
        return not any(self.a)

    def conjugate(self) -> "Character":
        return Character(self.group, tuple(-x for x in self.a), self.e)

    def __mul__(self, other: "Character") -> "Character":
        if other.group != self.group or other.e != self.e:
            raise GrmodError("characters of different groups")
        return Character(self.group, tuple(x + y for x, y in zip(self.a, other.a)), self.e)

    def __pow__(self, i: int) -> "Character":
        return Character(self.group, tuple(i * x for x in self.a), self.e)


def trivial_character(group: FiniteAbelianGroup, e: int | None = None) -> Character:
    return Character(group, group.identity, e or group.exponent)


def enumerate_characters(group: FiniteAbelianGroup, e: int | None = None) -> list[Character]:
    """All ``|G|`` characters with values in ``Z[zeta_e]``, ordered lexicographically on ``a``."""
    e = e or group.exponent
    if e % group.exponent:
        raise GrmodError(f"Z[zeta_{e}] does not contain the values of all characters of {group}")
    steps = [range(0, e, e // n) for n in group.cyclic_orders]
    return [Character(group, a, e) for a in sorted(product(*steps))]


def character_value(chi: Character, g: Sequence[int]) -> CycloElement:
    g = chi.group.normalize(g)
    return zeta_power(CycloRing(chi.e), chi.exponent_at(g))


# ---------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True)
class SubgroupOfG:
    group: FiniteAbelianGroup
    elements: tuple[Element, ...]

    def __post_init__(self):
        els = tuple(sorted({self.group.normalize(g) for g in self.elements}))
        object.__setattr__(self, "elements", els)
        s = set(els)
        if self.group.identity not in s:
            raise GrmodError("subgroup must contain the identity")
        for g in els:
            if self.group.neg(g) not in s:
                raise GrmodError("subset is not closed under negation")
        gens = self.generators
        for g in els:
            for h in gens:
                if self.group.add(g, h) not in s:
                    raise GrmodError("subset is not closed under addition")

    @classmethod
    def generated_by(cls, group: FiniteAbelianGroup, gens: Iterable[Sequence[int]]) -> "SubgroupOfG":
        return cls(group, tuple(_span(group, [group.normalize(g) for g in gens])))

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def generators(self) -> list[Element]:
        """A small generating set, chosen greedily."""
        G = self.group
        span = {G.identity}
        gens = []
        for g in sorted(self.elements, key=lambda x: (-G.element_order(x), x)):
            if g not in span:
                gens.append(g)
                span = set(_span(G, gens))
                if len(span) == len(self.elements):
                    break
        return gens

    @cached_property
    def decomposition(self) -> tuple[tuple[int, ...], tuple[Element, ...]]:
        """Invariant-factor orders and matching generators (as elements of ``G``)."""
        G = self.group
        if self.order == 1:
            return (), ()
        L = hermite_lattice([list(g) for g in self.generators], G.cyclic_orders)
        pres = present_quotient(L, LatticeBasis.diagonal(G.cyclic_orders))
        return tuple(pres.moduli), tuple(G.normalize(v) for v in pres.lifts)

    @property
    def is_cyclic(self) -> bool:
        return len(self.decomposition[0]) <= 1

    def as_group(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup(self.decomposition[0] or (1,))

    def embedding(self) -> tuple[Element, ...]:
        """Images in ``G`` of the generators of :meth:`as_group`."""
        return self.decomposition[1] or (self.group.identity,)

    def __contains__(self, g) -> bool:
        return tuple(g) in set(self.elements)

    def label(self) -> str:
        return "{" + ",".join("(" + ",".join(map(str, g)) + ")" for g in self.elements) + "}"


def _span(group: FiniteAbelianGroup, gens: Sequence[Element]) -> list[Element]:
    span = {group.identity}
    for g in gens:
        new = set(span)
        frontier = list(span)
        while frontier:
            nxt = []
            for x in frontier:
                y = group.add(x, g)
                if y not in new:
                    new.add(y)
                    nxt.append(y)
            frontier = nxt
        span = new
    return sorted(span)


def cyclic_subgroup(group: FiniteAbelianGroup, g: Sequence[int]) -> SubgroupOfG:
    return SubgroupOfG.generated_by(group, [g])


def trivial_subgroup(group: FiniteAbelianGroup) -> SubgroupOfG:
    return SubgroupOfG(group, (group.identity,))


def whole_group(group: FiniteAbelianGroup) -> SubgroupOfG:
    return SubgroupOfG(group, tuple(group.elements()))


def enumerate_subgroups(
    group: FiniteAbelianGroup, prime_only: bool = False, cap: int = DEFAULT_SUBGROUP_CAP
) -> list[SubgroupOfG]:
    """Prime-order subgroups, or all subgroups, sorted by (order, elements)."""
    if not prime_only and group.order > cap:
        raise CapExceeded(f"|G| = {group.order} exceeds the subgroup-enumeration cap {cap}")
    cyclic: dict[tuple, SubgroupOfG] = {}
    for g in group.elements():
        o = group.element_order(g)
        if prime_only and not is_prime(o):
            continue
        key = tuple(_span(group, [g]))
        if key not in cyclic:
            cyclic[key] = SubgroupOfG(group, key)
    if prime_only:
        return sorted(cyclic.values(), key=lambda h: (h.order, h.elements))
    found = dict(cyclic)
    frontier = list(cyclic)
    while frontier:
        nxt = []
        for key in frontier:
            for c in cyclic:
                joined = tuple(sorted({group.add(x, y) for x in key for y in c}))
                if joined not in found:
                    found[joined] = SubgroupOfG(group, joined)
                    nxt.append(joined)
        frontier = nxt
    return sorted(found.values(), key=lambda h: (h.order, h.elements))


def restrict_character(chi: Character, H: SubgroupOfG) -> Character:
    """Restriction of ``chi`` to ``H``, as a character of ``H.as_group()``."""
    if H.group != chi.group:
        raise GrmodError("H is not a subgroup of the character's group")
    return Character(H.as_group(), tuple(chi.exponent_at(h) for h in H.embedding()), chi.e)


def find_generator_character(group: FiniteAbelianGroup, tau: Element, e: int | None = None) -> Character:
    """The character with ``chi(tau) = zeta_n`` for a generator ``tau`` of cyclic ``G``."""
    e = e or group.exponent
    n = group.order
    if not group.is_cyclic:
        raise NotCyclic(f"{group} is not cyclic")
    tau = group.normalize(tau)
    if group.element_order(tau) != n:
        raise NotCyclic(f"{tau} does not generate {group}")
    target = (e // n) % e
    for chi in enumerate_characters(group, e):
        if chi.exponent_at(tau) == target:
            return chi
    raise AssertionError("unreachable: a generator always has such a character")
