"""Seeded random modules and exact checks of order formulas and
cohomological vanishing criteria on concrete instances.

Every check is an equality of integers (or of subgroups) recomputed from
scratch; nothing is cached between an identity and its verdict.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod
from typing import Callable, Sequence

from . import linalg as la
from .cyclotomic import CycloRing, companion_matrix, zeta_power
from .errors import CapExceeded, GrmodError, NotCyclic
from .gmodule import (
    DEFAULT_PERMUTATION_CAP,
    GModule,
    ModSubgroup,
    QuotientGroup,
    correction_numerator_maps,
    factor_module,
    fixed_points,
    h0_chi,
    image,
    isotypic_component,
    kernel,
    pontryagin_dual,
    permutation_lattice_check,
    quasi_idempotent_image,
    quotient_module,
    restrict_to_subgroup,
    restrict_to_submodule,
    s_chi_all,
    tate_pair,
    _cyclic_setup,
)
from .groups import (
    DEFAULT_SUBGROUP_CAP,
    Element,
    FiniteAbelianGroup,
    SubgroupOfG,
    cyclic_subgroup,
    enumerate_characters,
    enumerate_subgroups,
    is_prime,
    prime_power,
)
from .oracle import DEFAULT_ORACLE_CAP, oracle

DEFAULT_LATTICE_CAP = 10**6


@dataclass(frozen=True)
class Caps:
    lattice: int = DEFAULT_LATTICE_CAP
    oracle: int = DEFAULT_ORACLE_CAP
    subgroups: int = DEFAULT_SUBGROUP_CAP
    permutation: int = DEFAULT_PERMUTATION_CAP

    @classmethod
    def parse(cls, text: str | None, base: "Caps | None" = None) -> "Caps":
        """Parse ``"lattice=1000000,oracle=4096"``; unknown names are errors."""
        caps = base or cls()
        if not text:
            return caps
        values = {}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            name, sep, value = part.partition("=")
            name = name.strip()
            if not sep or name not in cls.__dataclass_fields__:
                raise ValueError(f"bad cap setting {part!r}")
            values[name] = int(value)
            if values[name] < 1:
                raise ValueError(f"cap {name} must be positive")
        return replace(caps, **values)

    @classmethod
    def from_env(cls) -> "Caps":
        return cls.parse(os.environ.get("GRMOD_CAPS"))

    def to_dict(self) -> dict:
        return {
            "lattice": self.lattice,
            "oracle": self.oracle,
            "subgroups": self.subgroups,
            "permutation": self.permutation,
        }


def derive_seed(seed: int, *parts) -> int:
    """A 64-bit seed for one instance, a pure function of its arguments."""
    text = ":".join(str(x) for x in (seed,) + parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


# ---------------------------------------------------------------------------
# random modules: quotients of free modules by action-closed relations


@dataclass(frozen=True)
class RandomModuleSpec:
    seed: int
    group: FiniteAbelianGroup
    rank: int = 1
    modulus: int = 2
    extra_relations: int = 0
    e: int | None = None

    def __post_init__(self):
        if self.rank < 1 or self.modulus < 1 or self.extra_relations < 0:
            raise ValueError("rank and modulus must be positive, extra_relations non-negative")
        if self.e is not None and self.e % self.group.exponent and self.e != 1:
            raise ValueError(f"e = {self.e} is not 1 or a multiple of exp(G) = {self.group.exponent}")

    @property
    def ring_exponent(self) -> int:
        return self.e if self.e is not None else self.group.exponent

    @property
    def free_rank(self) -> int:
        return self.rank * self.group.order * CycloRing(self.ring_exponent).phi_e

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "group": list(self.group.cyclic_orders),
            "rank": self.rank,
            "modulus": self.modulus,
            "extra_relations": self.extra_relations,
            "ring_exponent": self.ring_exponent,
        }


@lru_cache(maxsize=64)
def free_module(group: FiniteAbelianGroup, e: int, rank: int, modulus: int) -> GModule:
    """``(R[G] / c R[G])^s`` on the basis ``zeta^b g f_c`` (index ``c*|G|*phi + g*phi + b``)."""
    ring = CycloRing(e)
    f = ring.phi_e
    els = group.elements()
    idx = {g: i for i, g in enumerate(els)}
    block = len(els) * f
    K = rank * block
    gens = []
    for j in range(group.rank):
        gj = group.generator(j)
        T = la.zeros(K, K)
        for c in range(rank):
            for g in els:
                src = c * block + idx[g] * f
                dst = c * block + idx[group.add(g, gj)] * f
                for b in range(f):
                    T[dst + b][src + b] = 1
        gens.append(T)
    C = companion_matrix(e)
    Z = la.zeros(K, K)
    for c in range(rank):
        for g in els:
            base = c * block + idx[g] * f
            for r in range(f):
                for b in range(f):
                    Z[base + r][base + b] = C[r][b]
    return GModule.build(group, [modulus] * K, gens, Z, e)


GroupRingElement = dict  # Element -> CycloElement


def _combine(ring: CycloRing, terms) -> GroupRingElement:
    out: GroupRingElement = {}
    for g, c in terms:
        out[g] = out.get(g, ring.zero) + c
    return out


def _gr_mul(G: FiniteAbelianGroup, ring: CycloRing, a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    return _combine(ring, [(G.add(g, h), x * y) for g, x in a.items() for h, y in b.items()])


def _random_factor(G: FiniteAbelianGroup, ring: CycloRing, modulus: int, rng: random.Random) -> GroupRingElement:
    # Mostly zero divisors of R[G]: a random element is usually a unit
    # modulo c and would collapse the quotient.
    els = G.elements()
    one = G.identity
    kind = rng.choice(("binomial", "binomial", "binomial", "norm", "norm", "scalar", "sparse"))
    g = rng.choice(els)
    o = G.element_order(g)
    b = (ring.e // gcd(ring.e, o)) * rng.randrange(o) if ring.e % o == 0 else 0
    if kind == "binomial":
        return _combine(ring, [(g, ring.one), (one, -zeta_power(ring, b))])
    if kind == "norm":
        return _combine(ring, [(G.mul(t, g), zeta_power(ring, -b * t)) for t in range(o)])
    if kind == "scalar":
        divisors = [p for p in _prime_divisors(modulus)] or [modulus]
        return {one: ring.element([rng.choice(divisors)])}
    terms = []
    for _ in range(rng.randint(1, 3)):
        c = ring.element([rng.randint(-2, 2)]) * zeta_power(ring, rng.randrange(ring.e))
        terms.append((rng.choice(els), c))
    return _combine(ring, terms)


def _random_relation(spec: RandomModuleSpec, rng: random.Random) -> list[int]:
    G = spec.group
    ring = CycloRing(spec.ring_exponent)
    f = ring.phi_e
    els = G.elements()
    block = len(els) * f
    vec = [0] * (spec.rank * block)
    comps = [rng.randrange(spec.rank)]
    if spec.rank > 1 and rng.random() < 0.3:
        comps.append(rng.randrange(spec.rank))
    for comp in comps:
        elt: GroupRingElement = {G.identity: ring.one}
        for _ in range(rng.randint(1, 3)):
            elt = _gr_mul(G, ring, elt, _random_factor(G, ring, spec.modulus, rng))
        for i, g in enumerate(els):
            if g in elt:
                for b, x in enumerate(elt[g].coeffs):
                    vec[comp * block + i * f + b] += x
    return vec


def _closure(spec: RandomModuleSpec, v: Sequence[int]) -> list[list[int]]:
    """``g zeta^b v`` for all ``g`` and ``b < phi(e)``, by index arithmetic on the free basis."""
    G = spec.group
    e = spec.ring_exponent
    f = CycloRing(e).phi_e
    C = companion_matrix(e)
    powers = [la.identity(f)]
    for _ in range(f - 1):
        powers.append(la.matmul(C, powers[-1]))
    els = G.elements()
    idx = {g: i for i, g in enumerate(els)}
    block = len(els) * f
    out = []
    for g in els:
        w = [0] * len(v)
        for c in range(spec.rank):
            for h in els:
                src = c * block + idx[h] * f
                dst = c * block + idx[G.add(h, g)] * f
                w[dst:dst + f] = v[src:src + f]
        for P in powers:
            u = []
            for start in range(0, len(w), f):
                seg = w[start:start + f]
                u.extend(sum(a * x for a, x in zip(row, seg)) for row in P)
            out.append(u)
    return out


@dataclass(frozen=True)
class GeneratedModule:
    spec: RandomModuleSpec
    module: GModule
    relations_used: int


def generate_module(spec: RandomModuleSpec, cap: int = DEFAULT_LATTICE_CAP, grow: bool = False,
                    max_relations: int = 400) -> GeneratedModule:
    """Build ``F / N``; with ``grow`` keep adding relations until ``|M| <= cap``."""
    e = spec.ring_exponent
    F = free_module(spec.group, e, spec.rank, spec.modulus)
    rng = random.Random(spec.seed)
    L = F.zero
    used = skipped = 0
    while used < spec.extra_relations or (grow and L.det > cap and used < max_relations):
        nxt = la.hermite_extend(L, _closure(spec, _random_relation(spec, rng)), F.diag)
        if nxt.det == 1 and L.det > 1 and skipped < 20:
            # keep the quotient non-zero when another draw can
            skipped += 1
            continue
        L = nxt
        used += 1
    if L.det > cap:
        raise CapExceeded(f"|M| = {L.det} exceeds the lattice cap {cap}")
    # L is closed under the action by construction, so the quotient is
    # presented directly; the result is still validated by its consumers.
    pres = la.present_quotient(F.full, L)
    M = GModule.build(
        F.group, pres.moduli, [pres.transport(t) for t in F.gens], pres.transport(F.zeta), F.e
    )
    return GeneratedModule(spec, M, used)


def random_module(spec: RandomModuleSpec, cap: int = DEFAULT_LATTICE_CAP) -> GModule:
    """``(R[G]/c)^s`` modulo ``spec.extra_relations`` random action-closed relations."""
    return generate_module(spec, cap).module


# ---------------------------------------------------------------------------
# per-instance results


@dataclass
class InstanceCheck:
    """Outcome of one verifier on one module.

    ``hypothesis`` is ``None`` for unconditional identities.  When it is
    ``False`` only the unconditional consistency checks are present.
    """

    theorem: str
    hypothesis: bool | None = None
    checks: dict[str, bool] = field(default_factory=dict)
    sides: dict[str, object] = field(default_factory=dict)
    rows: list[dict] = field(default_factory=list)

    @property
    def vacuous(self) -> bool:
        return self.hypothesis is False

    @property
    def failures(self) -> list[str]:
        return [name for name, ok in self.checks.items() if not ok]

    @property
    def passed(self) -> bool:
        return not self.failures


def _divides_all(invariants: Sequence[int], n: int) -> bool:
    return all(n % x == 0 for x in invariants)


# ---------------------------------------------------------------------------
# cyclic groups: order formula with correction modules


@dataclass
class CharacterRow:
    i: int
    character: tuple[int, ...]
    isotypic: int
    eps_image: int
    h0: int
    h0_invariants: tuple[int, ...]
    s: int
    s_invariants: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "label": f"chi^{self.i}",
            "i": self.i,
            "character": list(self.character),
            "isotypic": self.isotypic,
            "eps_image": self.eps_image,
            "h0": self.h0,
            "h0_invariants": list(self.h0_invariants),
            "s": self.s,
            "s_invariants": list(self.s_invariants),
        }


@dataclass
class DecompositionReport:
    group: FiniteAbelianGroup
    tau: Element
    order: int
    rows: list[CharacterRow]
    kernel_orders: list[int]
    quotient_orders: list[int]
    checks: dict[str, bool]

    @property
    def totals(self) -> dict[str, int]:
        return {
            "order": self.order,
            "prod_isotypic": prod(r.isotypic for r in self.rows),
            "prod_eps_image": prod(r.eps_image for r in self.rows),
            "prod_s": prod(r.s for r in self.rows),
            "prod_h0": prod(r.h0 for r in self.rows),
        }

    @property
    def formula_a(self) -> bool:
        return self.checks["isotypic_formula"]

    @property
    def formula_b(self) -> bool:
        return self.checks["image_formula"]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "group": list(self.group.cyclic_orders),
            "tau": list(self.tau),
            "rows": [r.to_dict() for r in self.rows],
            "totals": self.totals,
            "kernel_orders": self.kernel_orders,
            "quotient_orders": self.quotient_orders,
            "checks": dict(self.checks),
        }

    def as_check(self) -> InstanceCheck:
        sides = dict(self.totals)
        sides["tau"] = list(self.tau)
        sides["kernel_orders"] = list(self.kernel_orders)
        return InstanceCheck("thm2.2", None, dict(self.checks), sides, [r.to_dict() for r in self.rows])


def verify_cyclic_decomposition(M: GModule, tau: Sequence[int] | None = None) -> DecompositionReport:
    """Check both order formulas for cyclic ``G`` and the kernel chain behind them."""
    tau, chi = _cyclic_setup(M, tau)
    M.require_valid()
    n = M.group.order
    P = correction_numerator_maps(M, tau)
    t = M.act(tau)
    step = M.e // n
    rows: list[CharacterRow] = []
    numerators: list[ModSubgroup] = []
    for i in range(n):
        psi = chi ** i
        iso = isotypic_component(M, psi)
        eps = quasi_idempotent_image(M, psi)
        num = iso & image(M, P[i])
        h0 = QuotientGroup.of(iso, eps)
        s = QuotientGroup.of(num, eps)
        numerators.append(num)
        rows.append(CharacterRow(i, psi.a, iso.order, eps.order, h0.order, h0.invariants, s.order, s.invariants))
    # ker P'_i with P'_i = prod_{j >= i} (tau - zeta^j) = (tau - zeta^i) P_i
    kernels = []
    pushed = []
    for i in range(n):
        full = M.mul(P[i], M.reduce(la.matsub(t, M.zeta_pow(i * step))))
        ker = kernel(M, full)
        kernels.append(ker)
        cols = [la.matvec(P[i], c) for c in ker.lattice.columns()]
        pushed.append(ModSubgroup(M, la.hermite_lattice(cols, M.diag)))
    kernel_orders = [k.order for k in kernels]
    quotient_orders = [rows[i].isotypic // pushed[i].order for i in range(n)]

    checks: dict[str, bool] = {}
    lhs = M.order
    for r in rows:
        lhs *= r.h0
    rhs = prod(r.isotypic for r in rows) * prod(r.s for r in rows)
    checks["isotypic_formula"] = lhs == rhs
    checks["image_formula"] = M.order == prod(r.eps_image for r in rows) * prod(r.s for r in rows)
    checks["kernel_chain_start"] = kernel_orders[0] == M.order
    for i in range(n):
        nxt = kernel_orders[i + 1] if i + 1 < n else 1
        checks[f"kernel_chain[{i}]"] = kernel_orders[i] * quotient_orders[i] == nxt * rows[i].isotypic
        checks[f"pushed_kernel_is_numerator[{i}]"] = pushed[i].lattice == numerators[i].lattice
        checks[f"quotient_is_h0_over_s[{i}]"] = quotient_orders[i] * rows[i].s == rows[i].h0
        checks[f"killed_by_n[{i}]"] = _divides_all(rows[i].h0_invariants, n) and _divides_all(rows[i].s_invariants, n)
    checks["first_correction_trivial"] = rows[0].s == 1
    checks["last_correction_is_h0"] = rows[-1].s == rows[-1].h0
    return DecompositionReport(M.group, tau, M.order, rows, kernel_orders, quotient_orders, checks)


# ---------------------------------------------------------------------------
# arbitrary abelian groups: induction over cyclic factors


def permute_factors(M: GModule, order: Sequence[int]) -> GModule:
    """``M`` over the same group with its cyclic factors listed in ``order``."""
    r = M.group.rank
    if sorted(order) != list(range(r)):
        raise GrmodError(f"{list(order)} is not a permutation of the {r} cyclic factors")
    G = FiniteAbelianGroup(tuple(M.group.cyclic_orders[j] for j in order))
    return GModule.build(G, M.diag, [M.gens[j] for j in order], M.zeta, M.e)


def _isotypic_over_prefix(M: GModule, psi_a: Sequence[int]) -> ModSubgroup:
    """``{m : T_j m = zeta^{a_j} m for j < len(a)}``."""
    acc = ModSubgroup(M, M.full)
    for t, a in zip(M.gens, psi_a):
        acc = acc & kernel(M, la.matsub(t, M.zeta_pow(a)))
    return acc


def _prefix_characters(M: GModule, i: int) -> list[tuple[int, ...]]:
    if i == 0:
        return [()]
    return [chi.a for chi in enumerate_characters(FiniteAbelianGroup(M.group.cyclic_orders[:i]), M.e)]


def verify_abelian_decomposition(M: GModule, order: Sequence[int] | None = None) -> InstanceCheck:
    """Order formula for abelian ``G``, inducting over the factors in ``order``."""
    M.require_valid()
    order = list(order) if order is not None else list(range(M.group.rank))
    Mp = permute_factors(M, order)
    if M.e % M.group.exponent:
        raise GrmodError(f"Z[zeta_{M.e}] does not contain the values of all characters of {M.group}")
    lhs = Fraction(M.order)
    rows = []
    for i, n_i in enumerate(Mp.group.cyclic_orders):
        for psi_a in _prefix_characters(Mp, i):
            sub = _isotypic_over_prefix(Mp, psi_a)
            N = factor_module(restrict_to_submodule(Mp, sub), i)
            corrections = s_chi_all(N)
            _, chi = _cyclic_setup(N, None)
            for t, S in enumerate(corrections):
                h0 = h0_chi(N, chi ** t)
                lhs *= Fraction(h0.order, S.order)
                rows.append({
                    "label": f"factor {i} psi={list(psi_a)} chi^{t}",
                    "factor": order[i],
                    "psi": list(psi_a),
                    "t": t,
                    "sub_order": sub.order,
                    "h0": h0.order,
                    "s": S.order,
                })
    rhs = prod(isotypic_component(Mp, chi).order for chi in enumerate_characters(Mp.group, Mp.e))
    return InstanceCheck(
        "thm3.1",
        None,
        {f"order_formula{tuple(order)}": lhs == rhs},
        {"order": M.order, "factor_order": order, "corrected": str(lhs), "prod_isotypic": rhs},
        rows,
    )


# ---------------------------------------------------------------------------
# ordinary Tate cohomology: criteria at prime-order subgroups


def _subgroup_rows(M: GModule, cap: int) -> list[tuple[SubgroupOfG, object]]:
    return [(H, tate_pair(M, H)) for H in enumerate_subgroups(M.group, cap=cap)]


def _row(H: SubgroupOfG, rep) -> dict:
    return {
        "label": H.label(),
        "subgroup_order": H.order,
        "h0": rep.h0_order,
        "h_minus1": rep.h_minus1_order,
    }


def verify_prime_order_h0_criterion(M: GModule, cap: int = DEFAULT_SUBGROUP_CAP) -> InstanceCheck:
    """Hypothesis: degree-0 Tate groups vanish at prime-order ``H``.
    Conclusion: they vanish at every subgroup."""
    M.require_valid()
    reps = _subgroup_rows(M, cap)
    hyp = all(rep.h0_order == 1 for H, rep in reps if is_prime(H.order))
    out = InstanceCheck("thm4.4", hyp, rows=[_row(H, r) for H, r in reps])
    if hyp:
        for H, rep in reps:
            out.checks[f"h0_vanishes{H.label()}"] = rep.h0_order == 1
    out.sides["subgroups"] = len(reps)
    return out


def verify_cohomological_triviality(M: GModule, cap: int = DEFAULT_SUBGROUP_CAP) -> InstanceCheck:
    """Hypothesis: degrees -1 and 0 vanish at prime-order ``H``.
    Conclusion: both vanish at every subgroup.  The Herbrand route
    (quotient 1 plus degree 0 at prime order) must select the same
    instances."""
    M.require_valid()
    reps = _subgroup_rows(M, cap)
    primes = [(H, rep) for H, rep in reps if is_prime(H.order)]
    hyp = all(rep.h0_order == 1 and rep.h_minus1_order == 1 for _, rep in primes)
    herbrand_route = all(rep.h0_order == 1 and rep.herbrand == 1 for _, rep in primes)
    out = InstanceCheck("thm4.6", hyp, rows=[_row(H, r) for H, r in reps])
    for H, rep in primes:
        out.checks[f"herbrand_is_one{H.label()}"] = rep.herbrand == 1
    out.checks["herbrand_route_agrees"] = herbrand_route == hyp
    if hyp:
        for H, rep in reps:
            out.checks[f"both_vanish{H.label()}"] = rep.h0_order == 1 and rep.h_minus1_order == 1
    out.sides["subgroups"] = len(reps)
    return out


def _order_p_subgroup(G: FiniteAbelianGroup) -> tuple[int, SubgroupOfG]:
    pp = prime_power(G.order)
    if not G.is_cyclic or pp is None:
        raise NotCyclic(f"{G} is not cyclic of prime-power order")
    p = pp[0]
    (H,) = enumerate_subgroups(G, prime_only=True)
    return p, H


def _formula_checks(M: GModule, prefix: str = "") -> dict[str, bool]:
    chars = enumerate_characters(M.group, M.e)
    iso = prod(isotypic_component(M, c).order for c in chars)
    eps = prod(quasi_idempotent_image(M, c).order for c in chars)
    return {f"{prefix}order_is_prod_isotypic": M.order == iso, f"{prefix}order_is_prod_images": M.order == eps}


def verify_prime_power_isotypic(M: GModule) -> InstanceCheck:
    """Cyclic ``G`` of order ``p^n``; hypothesis: twisted degree-0 groups of
    the order-``p`` subgroup vanish for all its characters."""
    M.require_valid()
    if M.e % M.group.exponent:
        raise GrmodError(f"Z[zeta_{M.e}] does not contain the values of all characters of {M.group}")
    _, H = _order_p_subgroup(M.group)
    MH = restrict_to_subgroup(M, H)
    out = InstanceCheck("thm4.10", None)
    hyp = True
    for chi in enumerate_characters(MH.group, M.e):
        o = h0_chi(MH, chi).order
        out.rows.append({"label": f"H chi={list(chi.a)}", "h0": o})
        hyp &= o == 1
    out.hypothesis = hyp
    if hyp:
        for psi in enumerate_characters(M.group, M.e):
            out.checks[f"h0_vanishes[{','.join(map(str, psi.a))}]"] = h0_chi(M, psi).order == 1
        out.checks.update(_formula_checks(M))
    return out


def verify_order_two_criterion(M: GModule) -> InstanceCheck:
    """Cyclic 2-group; hypothesis: the fixed points of the order-2 element
    ``u`` equal ``(1 + u) M``."""
    M.require_valid()
    p, H = _order_p_subgroup(M.group)
    if p != 2:
        raise NotCyclic(f"{M.group} is not a cyclic 2-group")
    if M.e % M.group.exponent:
        raise GrmodError(f"Z[zeta_{M.e}] does not contain the values of all characters of {M.group}")
    u = H.generators[0]
    plus = fixed_points(M, H)
    norm = image(M, la.matadd(M.identity_matrix(), M.act(u)))
    hyp = plus.lattice == norm.lattice
    out = InstanceCheck("cor4.11", hyp, sides={"fixed": plus.order, "norm_image": norm.order})
    if hyp:
        MH = restrict_to_subgroup(M, H)
        for chi in enumerate_characters(MH.group, M.e):
            out.checks[f"subgroup_h0_vanishes[{chi.a[0]}]"] = h0_chi(MH, chi).order == 1
        out.checks.update(_formula_checks(M))
    return out


def verify_prime_power_factors(M: GModule, order: Sequence[int] | None = None) -> InstanceCheck:
    """``G`` a product of cyclic prime-power factors; hypothesis checked on
    the order-``p_i`` subgroup of each factor acting on each isotypic
    component of the preceding factors."""
    M.require_valid()
    if M.e % M.group.exponent:
        raise GrmodError(f"Z[zeta_{M.e}] does not contain the values of all characters of {M.group}")
    order = list(order) if order is not None else list(range(M.group.rank))
    Mp = permute_factors(M, order)
    for n_i in Mp.group.cyclic_orders:
        if n_i != 1 and prime_power(n_i) is None:
            raise GrmodError(f"cyclic factor of order {n_i} is not a prime power")
    out = InstanceCheck("thm4.12", None, sides={"factor_order": order})
    hyp = True
    for i, n_i in enumerate(Mp.group.cyclic_orders):
        if n_i == 1:
            continue
        p = prime_power(n_i)[0]
        for psi_a in _prefix_characters(Mp, i):
            N = factor_module(restrict_to_submodule(Mp, _isotypic_over_prefix(Mp, psi_a)), i)
            H = cyclic_subgroup(N.group, (n_i // p,))
            NH = restrict_to_subgroup(N, H)
            for chi in enumerate_characters(NH.group, M.e):
                o = h0_chi(NH, chi).order
                out.rows.append({"label": f"factor {i} psi={list(psi_a)} chi={list(chi.a)}", "h0": o})
                hyp &= o == 1
    out.hypothesis = hyp
    if hyp:
        for psi in enumerate_characters(M.group, M.e):
            out.checks[f"h0_vanishes[{','.join(map(str, psi.a))}]"] = h0_chi(M, psi).order == 1
        out.checks.update(_formula_checks(M))
    return out


def verify_permutation_module(M: GModule, cap: int = DEFAULT_PERMUTATION_CAP) -> InstanceCheck:
    """``Z[M]^H = Z[M^H] + N_H Z[M]`` at every prime-order subgroup."""
    out = InstanceCheck("prop4.2", None, sides={"order": M.order})
    for H in enumerate_subgroups(M.group, prime_only=True):
        res = permutation_lattice_check(M, H, cap)
        out.checks[f"fixed_lattice_generated{H.label()}"] = res.holds
        out.rows.append({"label": H.label(), "rank_invariants": res.rank_invariants,
                         "rank_generated": res.rank_generated})
    return out


def verify_herbrand(M: GModule, cap: int = DEFAULT_SUBGROUP_CAP) -> InstanceCheck:
    M.require_valid()
    out = InstanceCheck("herbrand", None)
    for H in enumerate_subgroups(M.group, cap=cap):
        if not H.is_cyclic:
            continue
        rep = tate_pair(M, H)
        out.checks[f"quotient_is_one{H.label()}"] = rep.herbrand == 1
        out.rows.append(_row(H, rep))
    return out


def verify_duality(M: GModule, cap: int = DEFAULT_SUBGROUP_CAP) -> InstanceCheck:
    """The dual swaps the orders of the degree -1 and 0 groups."""
    M.require_valid()
    D = pontryagin_dual(M)
    out = InstanceCheck("duality", None, sides={"dual_valid": D.validation.ok})
    out.checks["dual_is_module"] = D.validation.ok
    for H in enumerate_subgroups(M.group, cap=cap):
        a, b = tate_pair(M, H), tate_pair(D, H)
        out.checks[f"h0_dual_is_h_minus1{H.label()}"] = b.h0_order == a.h_minus1_order
        out.checks[f"h_minus1_dual_is_h0{H.label()}"] = b.h_minus1_order == a.h0_order
        out.rows.append({"label": H.label(), "h0": a.h0_order, "h_minus1": a.h_minus1_order,
                         "dual_h0": b.h0_order, "dual_h_minus1": b.h_minus1_order})
    return out


# ---------------------------------------------------------------------------
# lattice path vs enumeration


def lattice_table(M: GModule, subgroup_cap: int = DEFAULT_SUBGROUP_CAP) -> dict[str, int]:
    """The table of :func:`grmod.oracle.oracle`, computed on lattices."""
    G = M.group
    out = {"M": M.order}
    if M.e % G.exponent == 0:
        for chi in enumerate_characters(G, M.e):
            key = ",".join(map(str, chi.a))
            iso = isotypic_component(M, chi)
            eps = quasi_idempotent_image(M, chi)
            out[f"isotypic[{key}]"] = iso.order
            out[f"eps_image[{key}]"] = eps.order
            out[f"h0chi[{key}]"] = QuotientGroup.of(iso, eps).order
        if G.is_cyclic and M.e % G.order == 0:
            for i, S in enumerate(s_chi_all(M)):
                out[f"S_num[{i}]"] = S.outer.order
                out[f"S[{i}]"] = S.order
    for H in enumerate_subgroups(G, cap=subgroup_cap):
        rep = tate_pair(M, H)
        key = H.label()
        out[f"fixed[{key}]"] = rep.fixed_order
        out[f"norm_image[{key}]"] = rep.norm_image_order
        out[f"norm_kernel[{key}]"] = rep.norm_kernel_order
        out[f"augmentation[{key}]"] = rep.augmentation_order
    return out


def compare_with_oracle(M: GModule, caps: Caps = Caps()) -> InstanceCheck:
    ref = oracle(M, caps.oracle, caps.subgroups)
    got = lattice_table(M, caps.subgroups)
    out = InstanceCheck("oracle-diff", None, sides={"order": M.order, "entries": len(ref)})
    out.checks["same_keys"] = set(ref) == set(got)
    for key in sorted(ref):
        out.checks[f"agrees:{key}"] = got.get(key) == ref[key]
        if got.get(key) != ref[key]:
            out.rows.append({"label": key, "oracle": ref[key], "lattice": got.get(key)})
    return out


# ---------------------------------------------------------------------------
# campaigns


THEOREM_IDS = (
    "thm2.2",
    "thm3.1",
    "thm4.4",
    "thm4.6",
    "thm4.10",
    "cor4.11",
    "thm4.12",
    "prop4.2",
    "herbrand",
    "duality",
    "oracle-diff",
)


@dataclass
class InstanceResult:
    index: int
    seed: int
    kind: str
    spec: dict
    module: dict
    check: InstanceCheck

    @property
    def violations(self) -> list[str]:
        return [f"instance {self.index}: {name}" for name in self.check.failures]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "seed": self.seed,
            "kind": self.kind,
            "spec": self.spec,
            "module": self.module,
            "hypothesis": self.check.hypothesis,
            "vacuous": self.check.vacuous,
            "checks": dict(self.check.checks),
            "sides": _jsonable(self.check.sides),
            "rows": _jsonable(self.check.rows),
        }


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


@dataclass
class VerificationReport:
    theorem: str
    seed: int
    count: int
    caps: Caps
    instances: list[InstanceResult]
    min_nonvacuous: int = 0

    @property
    def violations(self) -> list[str]:
        return [v for inst in self.instances for v in inst.violations]

    @property
    def nonvacuous(self) -> int:
        return sum(1 for inst in self.instances if not inst.check.vacuous)

    @property
    def hypothesis_true(self) -> int:
        return sum(1 for inst in self.instances if inst.check.hypothesis is True)

    @property
    def passed(self) -> bool:
        return not self.violations and self.nonvacuous >= self.min_nonvacuous

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "seed": self.seed,
            "count": self.count,
            "caps": self.caps.to_dict(),
            "instances": [i.to_dict() for i in self.instances],
            "summary": {
                "violations": self.violations,
                "nonvacuous": self.nonvacuous,
                "hypothesis_true": self.hypothesis_true,
                "vacuous": self.count - self.nonvacuous,
                "min_nonvacuous": self.min_nonvacuous,
                "passed": self.passed,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instance", "seed", "row_type", "label", "key", "value"])
        for inst in self.instances:
            d = inst.to_dict()
            base = [inst.index, inst.seed]
            w.writerow(base + ["totals", "", "kind", inst.kind])
            w.writerow(base + ["totals", "", "hypothesis", json.dumps(d["hypothesis"])])
            for key, val in sorted(d["module"].items()):
                w.writerow(base + ["totals", "module", key, json.dumps(val)])
            for key, val in sorted(d["sides"].items()):
                w.writerow(base + ["totals", "sides", key, json.dumps(val, sort_keys=True)])
            for key, val in sorted(d["checks"].items()):
                w.writerow(base + ["check", "", key, json.dumps(val)])
            for row in d["rows"]:
                label = str(row.get("label", ""))
                for key, val in sorted(row.items()):
                    if key != "label":
                        w.writerow(base + ["row", label, key, json.dumps(val, sort_keys=True)])
        return buf.getvalue()


_CYCLIC_ORDERS = (2, 3, 4, 5, 6, 8, 9, 12)
_PRODUCT_GROUPS = ((2, 2), (2, 4), (3, 3), (2, 2, 2))
_CRITERION_GROUPS = ((2,), (3,), (4,), (2, 2), (6,), (5,), (8,), (2, 4), (3, 3), (2, 2, 2), (9,), (12,))
_PRIME_POWER_CYCLIC = ((2,), (4,), (8,), (3,), (9,), (5,), (7,))
_TWO_POWER_CYCLIC = ((2,), (4,), (8,))
_PRIME_POWER_PRODUCTS = ((2, 2), (2, 4), (3, 3), (2, 3), (4,), (2, 2, 2), (3, 2))
_GENERAL_GROUPS = ((2,), (3,), (4,), (2, 2), (6,), (2, 4), (3, 3), (8,), (5,))
_SMALL_GROUPS = ((2,), (3,), (6,), (2, 2))
_SMALL_PRIMES = (2, 3, 5, 7, 11)


def _prime_divisors(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if n % p == 0 and is_prime(p)]


def _modulus(rng: random.Random, n: int, kind: str) -> int:
    coprime = [q for q in _SMALL_PRIMES if n % q]
    if kind == "divisible":
        q = rng.choice(coprime[:3])
        return q * q if rng.random() < 0.2 else q
    primes = _prime_divisors(n) or [2]
    p = rng.choice(primes)
    return rng.choice((p, p, p * p, p * rng.choice(coprime[:2])))


def _induced_modulus(rng: random.Random, free_rank: int, cap: int) -> int | None:
    options = [c for c in range(2, 10) if c ** free_rank <= cap]
    return rng.choice(options) if options else None


def _draw(theorem: str, index: int, rng: random.Random, caps: Caps) -> tuple[str, RandomModuleSpec]:
    """Choose the module distribution for one campaign instance."""
    seed = rng.getrandbits(64)
    cap = caps.lattice

    def build(orders, e, kind, rank=1):
        G = FiniteAbelianGroup(tuple(orders))
        probe = RandomModuleSpec(seed, G, rank, 2, 0, e)
        if kind == "induced":
            c = _induced_modulus(rng, probe.free_rank, cap)
            if c is not None:
                return kind, replace(probe, modulus=c)
            kind = "divisible"
        c = _modulus(rng, G.order, kind)
        return kind, replace(probe, modulus=c, extra_relations=rng.randint(1, 3))

    if theorem == "thm2.2":
        n = _CYCLIC_ORDERS[index % len(_CYCLIC_ORDERS)]
        e = 2 * n if n % 2 and index % 3 == 0 else n
        kind = ("quotient", "quotient", "divisible", "induced")[rng.randrange(4)]
        return build((n,), e, kind, rank=rng.choice((1, 1, 2)))
    if theorem == "thm3.1":
        orders = _PRODUCT_GROUPS[index % len(_PRODUCT_GROUPS)]
        kind = ("quotient", "quotient", "divisible", "induced")[rng.randrange(4)]
        return build(orders, None, kind)
    if theorem in ("thm4.4", "thm4.6"):
        orders = _CRITERION_GROUPS[index % len(_CRITERION_GROUPS)]
        kind = ("induced", "induced", "divisible", "quotient", "quotient")[index % 5]
        e = 1 if index % 3 else None
        return build(orders, e, kind, rank=rng.choice((1, 1, 2)))
    if theorem == "thm4.10":
        orders = _PRIME_POWER_CYCLIC[index % len(_PRIME_POWER_CYCLIC)]
        kind = ("induced", "divisible", "quotient", "quotient")[index % 4]
        return build(orders, None, kind)
    if theorem == "cor4.11":
        orders = _TWO_POWER_CYCLIC[index % len(_TWO_POWER_CYCLIC)]
        kind = ("induced", "divisible", "quotient", "quotient")[index % 4]
        return build(orders, None, kind)
    if theorem == "thm4.12":
        orders = _PRIME_POWER_PRODUCTS[index % len(_PRIME_POWER_PRODUCTS)]
        kind = ("induced", "divisible", "quotient", "quotient")[index % 4]
        return build(orders, None, kind)
    if theorem == "prop4.2":
        orders = _SMALL_GROUPS[index % len(_SMALL_GROUPS)]
        cap = caps.permutation
        return build(orders, 1, ("quotient", "induced")[index % 2])
    if theorem in ("herbrand", "duality", "oracle-diff"):
        orders = _GENERAL_GROUPS[index % len(_GENERAL_GROUPS)]
        if theorem == "oracle-diff":
            cap = caps.oracle
        kind = ("quotient", "quotient", "divisible", "induced")[rng.randrange(4)]
        e = 1 if rng.random() < 0.3 else None
        return build(orders, e, kind)
    raise GrmodError(f"unknown theorem id {theorem!r}")


def _instance_cap(theorem: str, caps: Caps) -> int:
    if theorem == "prop4.2":
        return min(caps.permutation, caps.lattice)
    if theorem == "oracle-diff":
        return min(caps.oracle, caps.lattice)
    return caps.lattice


def run_verifier(theorem: str, M: GModule, rng: random.Random, caps: Caps) -> InstanceCheck:
    """Run the verifier for ``theorem`` on one module."""
    if theorem == "thm2.2":
        n = M.group.order
        units = [u for u in range(1, n) if gcd(u, n) == 1] or [0]
        tau = (rng.choice(units) % n,) if n > 1 else (0,)
        return verify_cyclic_decomposition(M, tau).as_check()
    if theorem == "thm3.1":
        r = M.group.rank
        first = verify_abelian_decomposition(M, list(range(r)))
        second_order = list(range(r))[::-1]
        if r > 2:
            rng.shuffle(second_order)
            if second_order == list(range(r)):
                second_order = second_order[::-1]
        second = verify_abelian_decomposition(M, second_order)
        first.checks.update(second.checks)
        first.sides = {"first": first.sides, "second": second.sides}
        first.rows = first.rows + second.rows
        return first
    if theorem == "thm4.4":
        return verify_prime_order_h0_criterion(M, caps.subgroups)
    if theorem == "thm4.6":
        return verify_cohomological_triviality(M, caps.subgroups)
    if theorem == "thm4.10":
        out = verify_prime_power_isotypic(M)
        if prime_power(M.group.order)[0] == 2:
            side = verify_order_two_criterion(M)
            out.sides["order_two_hypothesis"] = side.hypothesis
            out.checks.update({f"order_two:{k}": v for k, v in side.checks.items()})
        return out
    if theorem == "cor4.11":
        return verify_order_two_criterion(M)
    if theorem == "thm4.12":
        return verify_prime_power_factors(M)
    if theorem == "prop4.2":
        return verify_permutation_module(M, caps.permutation)
    if theorem == "herbrand":
        return verify_herbrand(M, caps.subgroups)
    if theorem == "duality":
        return verify_duality(M, caps.subgroups)
    if theorem == "oracle-diff":
        return compare_with_oracle(M, caps)
    raise GrmodError(f"unknown theorem id {theorem!r}")


def campaign_instance(theorem: str, seed: int, index: int, caps: Caps = Caps()) -> InstanceResult:
    """One instance; a pure function of ``(theorem, seed, index, caps)``."""
    inst_seed = derive_seed(seed, theorem, index)
    rng = random.Random(inst_seed)
    kind, spec = _draw(theorem, index, rng, caps)
    gen = generate_module(spec, _instance_cap(theorem, caps), grow=kind != "induced")
    M = gen.module
    check = run_verifier(theorem, M, rng, caps)
    spec_d = spec.to_dict()
    spec_d["relations_used"] = gen.relations_used
    module = {"diag": list(M.diag), "order": M.order}
    return InstanceResult(index, inst_seed, kind, spec_d, module, check)


def campaign(theorem: str, count: int, seed: int = 0, caps: Caps | None = None,
             min_nonvacuous: int = 0, progress: Callable[[int], None] | None = None) -> VerificationReport:
    """Run ``count`` seeded instances of one verifier."""
    if theorem not in THEOREM_IDS:
        raise GrmodError(f"unknown theorem id {theorem!r}; expected one of {', '.join(THEOREM_IDS)}")
    if count < 0:
        raise ValueError("count must be non-negative")
    caps = caps or Caps()
    instances = []
    for index in range(count):
        instances.append(campaign_instance(theorem, seed, index, caps))
        if progress:
            progress(index)
    return VerificationReport(theorem, seed, count, caps, instances, min_nonvacuous)
