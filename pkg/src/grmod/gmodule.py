"""Finite ``R[G]``-modules, ``R = Z[zeta_e]``, ``G`` finite abelian.

A module is ``(+) Z/d_i`` together with one integer matrix per cyclic
factor of ``G`` (the action of that factor's generator) and a matrix for
the action of ``zeta_e``.  Matrices act on column vectors and are only
meaningful modulo ``diag(d)``; entries of row ``i`` are kept reduced mod
``d_i``.  Subgroups are :class:`ModSubgroup` objects wrapping a canonical
lattice that contains ``diag(d) Z^k``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import prod
from typing import Mapping, Sequence, Union

from . import linalg as la
from .cyclotomic import CycloElement, CycloRing, regular_rep, zeta_power
from .errors import (
    CapExceeded,
    DimensionMismatch,
    GrmodError,
    InvalidModule,
    NotCyclic,
    NotStable,
)
from .groups import (
    Character,
    Element,
    FiniteAbelianGroup,
    SubgroupOfG,
    find_generator_character,
    is_prime,
)
from .linalg import LatticeBasis, Matrix

DEFAULT_PERMUTATION_CAP = 64

MatrixT = tuple[tuple[int, ...], ...]


def _freeze(a) -> MatrixT:
    return tuple(tuple(int(x) for x in row) for row in a)


@dataclass(frozen=True)
class GModule:
    group: FiniteAbelianGroup
    ring: CycloRing
    diag: tuple[int, ...]
    gens: tuple[MatrixT, ...]
    zeta: MatrixT

    @classmethod
    def build(
        cls,
        group: FiniteAbelianGroup,
        diag: Sequence[int],
        gens: Sequence[Sequence[Sequence[int]]],
        zeta: Sequence[Sequence[int]] | None = None,
        e: int | None = None,
    ) -> "GModule":
        """Normalizing constructor.

        ``zeta`` may be omitted only when ``phi(e) == 1``; it then defaults
        to the scalar ``zeta_e`` (``1`` for ``e = 1``, ``-1`` for ``e = 2``).
        """
        ring = CycloRing(e if e is not None else group.exponent)
        d = tuple(int(x) for x in diag)
        k = len(d)
        if any(x < 1 for x in d):
            raise DimensionMismatch(f"moduli must be positive: {d}")
        if len(gens) != group.rank:
            raise DimensionMismatch(f"{group} needs {group.rank} generator actions, got {len(gens)}")
        if zeta is None:
            if ring.phi_e != 1:
                raise DimensionMismatch(f"zeta action is required for e = {ring.e}")
            z = ring.zeta.coeffs[0]
            zeta = la.scale(z, la.identity(k))
        for a in list(gens) + [zeta]:
            if len(a) != k or any(len(row) != k for row in a):
                raise DimensionMismatch(f"expected {k}x{k} action matrices")
        return cls(
            group,
            ring,
            d,
            tuple(_freeze(la.reduce_rows(t, d)) for t in gens),
            _freeze(la.reduce_rows(zeta, d)),
        )

    # -- basic data ---------------------------------------------------------

    @property
    def k(self) -> int:
        return len(self.diag)

    @property
    def order(self) -> int:
        return prod(self.diag)

    @property
    def e(self) -> int:
        return self.ring.e

    @cached_property
    def full(self) -> LatticeBasis:
        return LatticeBasis.standard(self.k)

    @cached_property
    def zero(self) -> LatticeBasis:
        return LatticeBasis.diagonal(self.diag)

    def reduce(self, a) -> Matrix:
        return la.reduce_rows(a, self.diag)

    def mul(self, a, b) -> Matrix:
        return self.reduce(la.matmul(a, b))

    def identity_matrix(self) -> Matrix:
        return self.reduce(la.identity(self.k))

    def power(self, a, p: int) -> Matrix:
        out = self.identity_matrix()
        base = [list(r) for r in a]
        while p:
            if p & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            p >>= 1
        return out

    @cached_property
    def _act_cache(self) -> dict:
        return {}

    def act(self, g: Sequence[int]) -> Matrix:
        """Matrix of the group element ``g``."""
        g = self.group.normalize(g)
        cache = self._act_cache
        if g not in cache:
            out = self.identity_matrix()
            for t, x in zip(self.gens, g):
                if x:
                    out = self.mul(out, self.power(t, x))
            cache[g] = out
        return cache[g]

    @cached_property
    def _zeta_powers(self) -> list[Matrix]:
        out = [self.identity_matrix()]
        for _ in range(self.e - 1):
            out.append(self.mul(out[-1], self.zeta))
        return out

    def zeta_pow(self, k: int) -> Matrix:
        """``Z ** (k mod e)``."""
        return self._zeta_powers[k % self.e]

    def scalar_matrix(self, c: CycloElement | int) -> Matrix:
        """Action of a ring element: ``sum_b c_b Z**b``."""
        if not isinstance(c, CycloElement):
            c = self.ring.element([c])
        if c.ring != self.ring:
            raise GrmodError(f"coefficient in {c.ring}, module over {self.ring}")
        out = la.zeros(self.k, self.k)
        for b, cb in enumerate(c.coeffs):
            if cb:
                out = la.matadd(out, la.scale(cb, self.zeta_pow(b)))
        return self.reduce(out)

    def check_character(self, chi: Character) -> None:
        if chi.group != self.group:
            raise GrmodError(f"character of {chi.group} used on a module over {self.group}")
        if chi.e != self.e:
            raise GrmodError(f"character valued in Z[zeta_{chi.e}] on a module over Z[zeta_{self.e}]")

    @cached_property
    def validation(self) -> "ValidationReport":
        return validate_module(self)

    def require_valid(self) -> None:
        rep = self.validation
        if not rep.ok:
            raise InvalidModule("; ".join(v.identity for v in rep.violations))

    def subgroup(self, lattice: LatticeBasis) -> "ModSubgroup":
        return ModSubgroup(self, lattice)

    def __repr__(self):
        return f"GModule(G={self.group}, e={self.e}, diag={list(self.diag)})"


# ---------------------------------------------------------------------------
# subgroups and quotients


@dataclass(frozen=True)
class ModSubgroup:
    parent: GModule = field(repr=False)
    lattice: LatticeBasis

    @property
    def order(self) -> int:
        return self.parent.order // self.lattice.det

    @property
    def invariants(self) -> list[int]:
        return la.quotient_invariants(self.lattice, self.parent.zero)

    def __le__(self, other: "ModSubgroup") -> bool:
        return other.lattice.contains_lattice(self.lattice)

    def __and__(self, other: "ModSubgroup") -> "ModSubgroup":
        return ModSubgroup(self.parent, la.lattice_intersection(self.lattice, other.lattice))

    def __add__(self, other: "ModSubgroup") -> "ModSubgroup":
        gens = self.lattice.columns() + other.lattice.columns()
        return ModSubgroup(self.parent, la.hermite_lattice(gens, self.parent.diag))


@dataclass(frozen=True)
class QuotientGroup:
    """``outer / inner`` for two subgroups ``inner <= outer`` of one module."""

    outer: ModSubgroup = field(repr=False)
    inner: ModSubgroup = field(repr=False)
    order: int
    invariants: tuple[int, ...]

    @classmethod
    def of(cls, outer: ModSubgroup, inner: ModSubgroup) -> "QuotientGroup":
        return cls(
            outer,
            inner,
            la.lattice_index(outer.lattice, inner.lattice),
            tuple(la.quotient_invariants(outer.lattice, inner.lattice)),
        )


def kernel(M: GModule, u) -> ModSubgroup:
    return ModSubgroup(M, la.kernel_mod(M.reduce(u), M.diag))


def image(M: GModule, u) -> ModSubgroup:
    return ModSubgroup(M, la.image_mod(M.reduce(u), M.diag))


def whole(M: GModule) -> ModSubgroup:
    return ModSubgroup(M, M.full)


def trivial(M: GModule) -> ModSubgroup:
    return ModSubgroup(M, M.zero)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    identity: str
    witness: MatrixT | None = None


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        return [v.identity for v in self.violations] or ["valid"]


def _differs(M: GModule, a, b) -> Matrix | None:
    diff = la.reduce_rows(la.matsub(a, b), M.diag)
    return diff if any(any(r) for r in diff) else None


def validate_module(M: GModule) -> ValidationReport:
    """Check every axiom of an ``R[G]``-module structure on ``(+) Z/d_i``."""
    out: list[Violation] = []
    d = M.diag
    named = [(f"T{j}", t) for j, t in enumerate(M.gens)] + [("Z", M.zeta)]
    endo_ok = True
    for name, a in named:
        try:
            la.check_endomorphism(a, d)
        except GrmodError as exc:
            endo_ok = False
            out.append(Violation(f"{name} is not an endomorphism: {exc}", a))
    if not endo_ok:
        return ValidationReport(tuple(out))
    I = M.identity_matrix()
    for j, (t, n) in enumerate(zip(M.gens, M.group.cyclic_orders)):
        w = _differs(M, M.power(t, n), I)
        if w:
            out.append(Violation(f"T{j}^{n} != I", _freeze(w)))
    for i in range(len(M.gens)):
        for j in range(i + 1, len(M.gens)):
            w = _differs(M, M.mul(M.gens[i], M.gens[j]), M.mul(M.gens[j], M.gens[i]))
            if w:
                out.append(Violation(f"T{i}T{j} != T{j}T{i}", _freeze(w)))
    for j, t in enumerate(M.gens):
        w = _differs(M, M.mul(M.zeta, t), M.mul(t, M.zeta))
        if w:
            out.append(Violation(f"Z T{j} != T{j} Z", _freeze(w)))
    phi = M.ring.phi_coeffs
    acc = la.zeros(M.k, M.k)
    zp = M.identity_matrix()
    for c in phi:
        acc = la.matadd(acc, la.scale(c, zp))
        zp = M.mul(zp, M.zeta)
    w = _differs(M, acc, la.zeros(M.k, M.k))
    if w:
        out.append(Violation(f"Phi_{M.e}(Z) != 0", _freeze(w)))
    return ValidationReport(tuple(out))


# ---------------------------------------------------------------------------
# group ring elements

Coefficient = Union[CycloElement, int]


def group_ring_action(M: GModule, element: Mapping[Sequence[int], Coefficient]) -> Matrix:
    """Matrix of ``sum_s c_s * s`` acting on ``M``."""
    out = la.zeros(M.k, M.k)
    for g, c in element.items():
        out = la.matadd(out, la.matmul(M.scalar_matrix(c), M.act(g)))
    return M.reduce(out)


def quasi_idempotent(M: GModule, chi: Character) -> dict[Element, CycloElement]:
    """The group ring element ``sum_s conj(chi)(s) s``."""
    M.check_character(chi)
    return {g: zeta_power(M.ring, -chi.exponent_at(g)) for g in M.group.elements()}


def quasi_idempotent_matrix(M: GModule, chi: Character) -> Matrix:
    M.check_character(chi)
    out = la.zeros(M.k, M.k)
    for g in M.group.elements():
        out = la.matadd(out, la.matmul(M.zeta_pow(-chi.exponent_at(g)), M.act(g)))
    return M.reduce(out)


def norm_matrix(M: GModule, H: SubgroupOfG) -> Matrix:
    out = la.zeros(M.k, M.k)
    for h in H.elements:
        out = la.matadd(out, M.act(h))
    return M.reduce(out)


# ---------------------------------------------------------------------------
# isotypic components and twisted degree-0 cohomology


def _intersect_all(M: GModule, subs: list[ModSubgroup]) -> ModSubgroup:
    if not subs:
        return whole(M)
    acc = subs[0]
    for s in subs[1:]:
        acc = acc & s
    return acc


def isotypic_component(M: GModule, chi: Character) -> ModSubgroup:
    """``{m : s m = chi(s) m for all s}``."""
    M.check_character(chi)
    M.require_valid()
    subs = [kernel(M, la.matsub(t, M.zeta_pow(a))) for t, a in zip(M.gens, chi.a)]
    return _intersect_all(M, subs)


def quasi_idempotent_image(M: GModule, chi: Character) -> ModSubgroup:
    M.require_valid()
    return image(M, quasi_idempotent_matrix(M, chi))


def h0_chi(M: GModule, chi: Character) -> QuotientGroup:
    """Twisted Tate group ``M^chi / eps_chi M``."""
    return QuotientGroup.of(isotypic_component(M, chi), quasi_idempotent_image(M, chi))


def default_generator(G: FiniteAbelianGroup) -> Element:
    if not G.is_cyclic:
        raise NotCyclic(f"{G} is not cyclic")
    return (1,) * G.rank


def _linear_factor(M: GModule, tau_m: Matrix, zeta_exp: int) -> Matrix:
    return M.reduce(la.matsub(tau_m, M.zeta_pow(zeta_exp)))


def correction_numerator_maps(M: GModule, tau: Element) -> list[Matrix]:
    """``P_i = prod_{j=i+1}^{n-1} (tau - zeta_n^j)`` for ``i = 0..n-1`` (``P_{n-1} = 1``)."""
    n = M.group.order
    step = M.e // n
    t = M.act(tau)
    P = [None] * n
    P[n - 1] = M.identity_matrix()
    for i in range(n - 2, -1, -1):
        P[i] = M.mul(P[i + 1], _linear_factor(M, t, (i + 1) * step))
    return P


def _cyclic_setup(M: GModule, tau: Sequence[int] | None) -> tuple[Element, Character]:
    G = M.group
    if not G.is_cyclic:
        raise NotCyclic(f"{G} is not cyclic")
    if M.e % G.order:
        raise GrmodError(f"Z[zeta_{M.e}] does not contain the {G.order}-th roots of unity")
    tau = G.normalize(tau) if tau is not None else default_generator(G)
    return tau, find_generator_character(G, tau, M.e)


def s_chi(M: GModule, i: int, tau: Sequence[int] | None = None) -> QuotientGroup:
    """Correction module ``(M^{chi^i} & P_i M) / eps_{chi^i} M`` for cyclic ``G``."""
    n = M.group.order
    tau, chi = _cyclic_setup(M, tau)
    if not 0 <= i < n:
        raise ValueError(f"index {i} outside 0..{n - 1}")
    P = correction_numerator_maps(M, tau)[i]
    psi = chi ** i
    num = isotypic_component(M, psi) & image(M, P)
    return QuotientGroup.of(num, quasi_idempotent_image(M, psi))


def s_chi_all(M: GModule, tau: Sequence[int] | None = None) -> list[QuotientGroup]:
    n = M.group.order
    tau, chi = _cyclic_setup(M, tau)
    P = correction_numerator_maps(M, tau)
    out = []
    for i in range(n):
        psi = chi ** i
        num = isotypic_component(M, psi) & image(M, P[i])
        out.append(QuotientGroup.of(num, quasi_idempotent_image(M, psi)))
    return out


def twist(M: GModule, chi: Character) -> GModule:
    """``M`` with the action ``s . m = conj(chi)(s) s m``."""
    M.check_character(chi)
    M.require_valid()
    gens = [M.mul(M.zeta_pow(-a), t) for t, a in zip(M.gens, chi.a)]
    return GModule.build(M.group, M.diag, gens, M.zeta, M.e)


# ---------------------------------------------------------------------------
# ordinary Tate cohomology in degrees -1 and 0


@dataclass(frozen=True)
class CohomologyReport:
    h_minus1_order: int
    h0_order: int
    h_minus1_invariants: tuple[int, ...]
    h0_invariants: tuple[int, ...]
    herbrand: Fraction
    fixed_order: int = 0
    norm_image_order: int = 0
    norm_kernel_order: int = 0
    augmentation_order: int = 0


def fixed_points(M: GModule, H: SubgroupOfG) -> ModSubgroup:
    return _intersect_all(M, [kernel(M, la.matsub(M.act(h), M.identity_matrix())) for h in H.generators])


def augmentation_image(M: GModule, H: SubgroupOfG) -> ModSubgroup:
    """``I_H M``, generated by ``(h - 1) M`` over generators ``h`` of ``H``."""
    cols = []
    I = M.identity_matrix()
    for h in H.generators:
        cols.extend(la.columns(M.reduce(la.matsub(M.act(h), I))))
    return ModSubgroup(M, la.hermite_lattice(cols, M.diag))


def _check_subgroup(M: GModule, H: SubgroupOfG) -> None:
    if H.group != M.group:
        raise GrmodError(f"subgroup of {H.group} used with a module over {M.group}")


def tate_pair(M: GModule, H: SubgroupOfG) -> CohomologyReport:
    _check_subgroup(M, H)
    M.require_valid()
    N = norm_matrix(M, H)
    h0 = QuotientGroup.of(fixed_points(M, H), image(M, N))
    hm1 = QuotientGroup.of(kernel(M, N), augmentation_image(M, H))
    return CohomologyReport(
        h_minus1_order=hm1.order,
        h0_order=h0.order,
        h_minus1_invariants=hm1.invariants,
        h0_invariants=h0.invariants,
        herbrand=Fraction(h0.order, hm1.order),
        fixed_order=h0.outer.order,
        norm_image_order=h0.inner.order,
        norm_kernel_order=hm1.outer.order,
        augmentation_order=hm1.inner.order,
    )


def herbrand_check(M: GModule, H: SubgroupOfG) -> Fraction:
    if not H.is_cyclic:
        raise NotCyclic("the Herbrand quotient needs a cyclic subgroup")
    return tate_pair(M, H).herbrand


# ---------------------------------------------------------------------------
# constructions


def _dual_matrix(a, d: Sequence[int]) -> Matrix:
    # f_i(e_j) = delta_ij / d_i is the dual basis of Hom(M, Q/Z)
    k = len(d)
    return [[(d[j] * a[i][j]) // d[i] for i in range(k)] for j in range(k)]


def pontryagin_dual(M: GModule) -> GModule:
    """``Hom(M, Q/Z)`` with ``(s f)(m) = f(s^-1 m)`` and ``(r f)(m) = f(r m)``."""
    M.require_valid()
    gens = [
        _dual_matrix(M.power(t, n - 1), M.diag) for t, n in zip(M.gens, M.group.cyclic_orders)
    ]
    return GModule.build(M.group, M.diag, gens, _dual_matrix(M.zeta, M.diag), M.e)


def _check_stable(M: GModule, S: ModSubgroup) -> None:
    for a in list(M.gens) + [M.zeta]:
        for c in S.lattice.columns():
            if not S.lattice.contains(la.matvec(a, c)):
                raise NotStable("the subgroup is not stable under the module action")


def restrict_to_submodule(M: GModule, S: ModSubgroup) -> GModule:
    """A module presentation of the stable subgroup ``S``."""
    _check_stable(M, S)
    pres = la.present_quotient(S.lattice, M.zero)
    return GModule.build(
        M.group, pres.moduli, [pres.transport(t) for t in M.gens], pres.transport(M.zeta), M.e
    )


def quotient_module(M: GModule, S: ModSubgroup) -> GModule:
    """A module presentation of ``M / S`` for a stable subgroup ``S``."""
    _check_stable(M, S)
    pres = la.present_quotient(M.full, S.lattice)
    return GModule.build(
        M.group, pres.moduli, [pres.transport(t) for t in M.gens], pres.transport(M.zeta), M.e
    )


def canonicalize(M: GModule) -> GModule:
    """Re-present ``M`` on its invariant factors."""
    return quotient_module(M, trivial(M))


def restrict_to_subgroup(M: GModule, H: SubgroupOfG) -> GModule:
    """``M`` as an ``R[H]``-module, ``H`` presented by its own cyclic decomposition."""
    _check_subgroup(M, H)
    gens = [M.act(h) for h in H.embedding()]
    return GModule.build(H.as_group(), M.diag, gens, M.zeta, M.e)


def factor_module(M: GModule, j: int) -> GModule:
    """``M`` as a module over the j-th cyclic factor of ``G`` (generator ``(1)``)."""
    return GModule.build(
        FiniteAbelianGroup((M.group.cyclic_orders[j],)), M.diag, [M.gens[j]], M.zeta, M.e
    )


def extend_scalars(M0: GModule, ring: CycloRing) -> GModule:
    """``M0 (x)_Z Z[zeta_e]``; coordinates grouped in blocks ``m * zeta^b``."""
    if M0.ring.phi_e != 1:
        raise GrmodError("scalar extension starts from a module over Z")
    f = ring.phi_e
    k = M0.k
    C = regular_rep(ring.zeta)
    big = f * k

    def blockdiag(t):
        out = la.zeros(big, big)
        for b in range(f):
            for i in range(k):
                for j in range(k):
                    out[b * k + i][b * k + j] = t[i][j]
        return out

    Z = la.zeros(big, big)
    for r in range(f):
        for b in range(f):
            if C[r][b]:
                for i in range(k):
                    Z[r * k + i][b * k + i] = C[r][b]
    return GModule.build(M0.group, M0.diag * f, [blockdiag(t) for t in M0.gens], Z, ring.e)


# ---------------------------------------------------------------------------
# the permutation module Z[M]


@dataclass(frozen=True)
class FixedPointCheck:
    holds: bool
    rank_invariants: int
    rank_generated: int
    witness: tuple[int, ...] | None


def module_elements(M: GModule) -> list[tuple[int, ...]]:
    return list(product(*(range(x) for x in M.diag)))


def permutation_lattice_check(M: GModule, H: SubgroupOfG, cap: int = DEFAULT_PERMUTATION_CAP) -> FixedPointCheck:
    """Compare ``Z[M]^H`` with ``Z[M^H] + N_H Z[M]`` inside ``Z^|M|``.

    ``H`` must have prime order.  The left side is computed as the integer
    kernel of ``h - 1`` on the permutation lattice, the right side from its
    generators; equality is tested on canonical echelon forms.
    """
    _check_subgroup(M, H)
    if not is_prime(H.order):
        raise GrmodError(f"|H| = {H.order} is not prime")
    if M.order > cap:
        raise CapExceeded(f"|M| = {M.order} exceeds the permutation-module cap {cap}")
    M.require_valid()
    els = module_elements(M)
    index = {m: i for i, m in enumerate(els)}
    N = len(els)
    h = H.generators[0]
    A = M.act(h)

    def move(m):
        return tuple(x % dd for x, dd in zip(la.matvec(A, m), M.diag))

    perm = [index[move(m)] for m in els]
    diff = la.zeros(N, N)
    for i, j in enumerate(perm):
        diff[j][i] += 1
        diff[i][i] -= 1
    lhs = la.echelon_lattice(la.integer_kernel(diff, N), N)
    gens = []
    for i, j in enumerate(perm):
        if i == j:
            v = [0] * N
            v[i] = 1
            gens.append(v)
        v = [0] * N
        cur = i
        for _ in range(H.order):
            v[cur] += 1
            cur = perm[cur]
        gens.append(v)
    rhs = la.echelon_lattice(gens, N)
    witness = None
    if lhs != rhs:
        for v in lhs:
            if not la.echelon_contains(rhs, v):
                witness = tuple(v)
                break
    return FixedPointCheck(lhs == rhs, len(lhs), len(rhs), witness)


# ---------------------------------------------------------------------------
# module files


class ModuleFormatError(GrmodError, ValueError):
    pass


def module_to_dict(M: GModule) -> dict:
    return {
        "group": {"cyclic_orders": list(M.group.cyclic_orders)},
        "ring_exponent": M.e,
        "diag": list(M.diag),
        "generator_actions": [[list(r) for r in t] for t in M.gens],
        "zeta_action": [list(r) for r in M.zeta],
    }


def module_from_dict(data) -> GModule:
    try:
        group = FiniteAbelianGroup(tuple(data["group"]["cyclic_orders"]))
        e = data.get("ring_exponent")
        return GModule.build(group, data["diag"], data["generator_actions"], data.get("zeta_action"), e)
    except GrmodError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ModuleFormatError(f"malformed module description: {exc!r}") from exc


def dumps_module(M: GModule) -> str:
    return json.dumps(module_to_dict(M), sort_keys=True) + "\n"


def loads_module(text: str) -> GModule:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModuleFormatError(f"not valid JSON: {exc}") from exc
    return module_from_dict(data)
