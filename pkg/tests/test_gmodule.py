import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grmod import linalg as la
from grmod.cyclotomic import CycloRing, cyclotomic_polynomial, euler_phi
from grmod.errors import DimensionMismatch, GrmodError, InvalidModule, NotStable
from grmod.gmodule import (
    GModule,
    ModSubgroup,
    ModuleFormatError,
    canonicalize,
    correction_numerator_maps,
    dumps_module,
    extend_scalars,
    group_ring_action,
    h0_chi,
    isotypic_component,
    loads_module,
    pontryagin_dual,
    permutation_lattice_check,
    quasi_idempotent_image,
    quasi_idempotent_matrix,
    quotient_module,
    restrict_to_submodule,
    s_chi,
    s_chi_all,
    tate_pair,
    trivial,
    twist,
    validate_module,
    whole,
)
from grmod.groups import (
    Character,
    FiniteAbelianGroup,
    SubgroupOfG,
    enumerate_characters,
    enumerate_subgroups,
    trivial_character,
    trivial_subgroup,
    whole_group,
)
from grmod.theorems import RandomModuleSpec, generate_module

Z2 = FiniteAbelianGroup((2,))
Z3 = FiniteAbelianGroup((3,))


def chars(M):
    return enumerate_characters(M.group, M.e)


def z3_extended():
    return extend_scalars(GModule.build(Z3, (3,), [[[1]]], e=1), CycloRing(3))


# -- validation ------------------------------------------------------------


def test_trivial_action_is_valid_over_z():
    assert validate_module(GModule.build(Z2, (4,), [[[1]]], e=1)).ok


def test_scalar_zeta_default(z4_minus_one):
    assert z4_minus_one.zeta == ((3,),)
    assert validate_module(z4_minus_one).ok


def test_identity_zeta_is_not_a_root_of_phi_2():
    M = GModule.build(Z2, (4,), [[[1]]], [[1]], e=2)
    assert not validate_module(M).ok


def test_non_involution_is_rejected():
    rep = validate_module(GModule.build(Z2, (4,), [[[2]]], e=1))
    assert not rep.ok
    with pytest.raises(InvalidModule):
        GModule.build(Z2, (4,), [[[2]]], e=1).require_valid()


def test_non_commuting_actions_are_named():
    G = FiniteAbelianGroup((2, 2))
    T0 = [[0, 1], [1, 0]]
    T1 = [[1, 0], [0, 2]]
    rep = validate_module(GModule.build(G, (3, 3), [T0, T1], e=1))
    assert not rep.ok
    assert "T0T1 != T1T0" in rep.lines()


def test_shape_errors():
    with pytest.raises(DimensionMismatch):
        GModule.build(Z2, (4,), [], e=1)
    with pytest.raises(DimensionMismatch):
        GModule.build(Z2, (4,), [[[1, 0]]], e=1)
    with pytest.raises(DimensionMismatch):
        GModule.build(Z3, (3,), [[[1]]], e=3)


# -- group ring action and the quasi-idempotents ---------------------------


def test_group_ring_action_examples(z4_minus_one):
    M = z4_minus_one
    assert group_ring_action(M, {(0,): 1}) == [[1]]
    assert group_ring_action(M, {(0,): 1, (1,): 1}) == [[0]]
    chi = Character(Z2, (1,), 2)
    assert quasi_idempotent_matrix(M, chi) == [[2]]
    assert group_ring_action(M, {(0,): 1, (1,): -1}) == [[2]]


def test_z4_minus_one_table(z4_minus_one):
    M = z4_minus_one
    chi0, chi = chars(M)
    assert isotypic_component(M, chi0).order == 2
    assert isotypic_component(M, chi).order == 4
    assert quasi_idempotent_image(M, chi0).order == 1
    assert quasi_idempotent_image(M, chi).order == 2
    assert h0_chi(M, chi0).order == 2
    assert h0_chi(M, chi).order == 2
    assert [q.order for q in s_chi_all(M)] == [1, 2]
    assert s_chi(M, 1).order == h0_chi(M, chi).order


def test_z3_extended_scalars_table():
    M = z3_extended()
    assert M.diag == (3, 3) and M.order == 9
    assert [isotypic_component(M, c).order for c in chars(M)] == [9, 3, 3]
    assert [q.order for q in s_chi_all(M)] == [1, 3, 3]


def test_trivial_action_components():
    M = GModule.build(Z2, (6,), [[[1]]])
    chi0 = trivial_character(Z2, 2)
    assert isotypic_component(M, chi0) == whole(M)
    assert quasi_idempotent_image(M, chi0).order == 3


def test_n_divisible_module_has_trivial_h0():
    M = GModule.build(Z3, (2, 2), [[[0, 1], [1, 1]]], [[0, 1], [1, 1]], e=3)
    assert validate_module(M).ok
    for c in chars(M):
        assert h0_chi(M, c).order == 1


def test_twist_examples(z4_minus_one):
    triv = GModule.build(Z2, (4,), [[[1]]])
    chi0, chi = chars(triv)
    assert twist(triv, chi0) == triv
    assert twist(triv, chi).gens == (((3,),),)
    assert twist(twist(z4_minus_one, chi), chi.conjugate()) == z4_minus_one


# -- ordinary Tate cohomology ----------------------------------------------


def test_tate_pair_examples(z4_minus_one):
    triv = GModule.build(Z2, (2,), [[[1]]])
    for M in (triv, z4_minus_one):
        rep = tate_pair(M, whole_group(Z2))
        assert (rep.h0_order, rep.h_minus1_order, rep.herbrand) == (2, 2, 1)
        rep = tate_pair(M, trivial_subgroup(Z2))
        assert (rep.h0_order, rep.h_minus1_order) == (1, 1)


def test_tate_pair_rejects_foreign_subgroup(z4_minus_one):
    with pytest.raises(GrmodError):
        tate_pair(z4_minus_one, whole_group(Z3))


# -- constructions ---------------------------------------------------------


def test_dual_examples(z4_minus_one):
    triv = GModule.build(Z2, (5,), [[[1]]])
    assert pontryagin_dual(triv) == triv
    assert pontryagin_dual(z4_minus_one).gens == (((3,),),)


def test_dual_of_mixed_moduli_is_valid():
    G = FiniteAbelianGroup((2,))
    M = GModule.build(G, (2, 4), [[[1, 0], [2, 1]]], e=1)
    assert validate_module(M).ok
    D = pontryagin_dual(M)
    assert validate_module(D).ok
    assert pontryagin_dual(D) == M


def test_restrict_to_submodule_examples(z4_minus_one):
    G = FiniteAbelianGroup((2, 2))
    M = GModule.build(G, (2, 2), [[[0, 1], [1, 0]], [[1, 0], [0, 1]]], e=1)
    assert restrict_to_submodule(M, whole(M)).order == 4
    assert restrict_to_submodule(M, trivial(M)).diag == ()
    diagonal = ModSubgroup(M, la.hermite_lattice([[1, 1]], M.diag))
    sub = restrict_to_submodule(M, diagonal)
    assert sub.diag == (2,)
    assert sub.gens == (((1,),), ((1,),))
    line = ModSubgroup(M, la.hermite_lattice([[1, 0]], M.diag))
    with pytest.raises(NotStable):
        restrict_to_submodule(M, line)
    q = quotient_module(M, diagonal)
    assert q.order == 2 and validate_module(q).ok


def test_canonicalize_keeps_invariants():
    M = GModule.build(FiniteAbelianGroup((1,)), (6, 4), [[[1, 0], [0, 1]]], e=1)
    assert canonicalize(M).diag == (2, 12)


def test_extend_scalars_examples():
    M0 = GModule.build(Z2, (4,), [[[3]]], e=1)
    assert extend_scalars(M0, CycloRing(1)) == M0
    assert extend_scalars(M0, CycloRing(2)).order == 4
    assert extend_scalars(M0, CycloRing(5)).order == 256
    M = z3_extended()
    assert M.zeta == ((0, 2), (1, 2))
    with pytest.raises(GrmodError):
        extend_scalars(M, CycloRing(3))


# -- identities on random modules -------------------------------------------

CYCLIC = [(2,), (3,), (4,), (5,), (6,)]
ABELIAN = CYCLIC + [(2, 2), (2, 4), (3, 3)]


@st.composite
def modules(draw, groups=ABELIAN):
    spec = RandomModuleSpec(
        seed=draw(st.integers(0, 10**6)),
        group=FiniteAbelianGroup(draw(st.sampled_from(groups))),
        rank=draw(st.integers(1, 2)),
        modulus=draw(st.sampled_from([2, 3, 4, 5, 6, 9])),
        extra_relations=draw(st.integers(0, 3)),
    )
    return generate_module(spec, 4096, grow=True).module


@settings(max_examples=40)
@given(modules())
def test_quasi_idempotent_squares_to_n_times_itself(M):
    n = M.group.order
    for c in chars(M):
        E = quasi_idempotent_matrix(M, c)
        assert M.mul(E, E) == M.reduce(la.scale(n, E))


@settings(max_examples=40)
@given(modules(CYCLIC))
def test_trivial_quasi_idempotent_is_a_product_of_linear_factors(M):
    n = M.group.order
    P0 = correction_numerator_maps(M, (1,))[0]
    assert quasi_idempotent_matrix(M, trivial_character(M.group, M.e)) == P0
    assert len(P0) == M.k and n >= 2


@settings(max_examples=40)
@given(modules())
def test_cohomology_groups_are_killed_by_n(M):
    n = M.group.order
    for c in chars(M):
        assert all(n % x == 0 for x in h0_chi(M, c).invariants)
    for H in enumerate_subgroups(M.group):
        rep = tate_pair(M, H)
        assert all(H.order % x == 0 for x in rep.h0_invariants + rep.h_minus1_invariants)
    if M.group.is_cyclic:
        for q in s_chi_all(M):
            assert all(n % x == 0 for x in q.invariants)


@settings(max_examples=30)
@given(modules())
def test_dual_is_a_valid_involution(M):
    D = pontryagin_dual(M)
    assert validate_module(D).ok and D.order == M.order
    assert pontryagin_dual(D) == M


@settings(max_examples=30)
@given(modules(), st.data())
def test_twist_moves_isotypic_components(M, data):
    cs = chars(M)
    chi = data.draw(st.sampled_from(cs))
    psi = data.draw(st.sampled_from(cs))
    T = twist(M, chi)
    assert validate_module(T).ok
    assert isotypic_component(T, psi).order == isotypic_component(M, psi * chi).order
    assert h0_chi(T, psi).order == h0_chi(M, psi * chi).order


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.sampled_from([3, 4, 5, 6, 8]))
def test_extend_scalars_order(seed, e):
    rng = random.Random(seed)
    n = rng.choice([1, 2, 3])
    d = [rng.choice([2, 3, 4]) for _ in range(rng.randint(1, 2))]
    gens = [[[1 if i == j else 0 for j in range(len(d))] for i in range(len(d))]]
    if n == 2 and rng.random() < 0.5:
        gens = [[[-1 if i == j else 0 for j in range(len(d))] for i in range(len(d))]]
    M0 = GModule.build(FiniteAbelianGroup((n,)), d, gens, e=1)
    M = extend_scalars(M0, CycloRing(e))
    assert validate_module(M).ok
    assert M.order == M0.order ** euler_phi(e)


# -- the permutation module Z[M] -------------------------------------------


def test_permutation_lattice_examples(z4_minus_one):
    triv = GModule.build(Z2, (3,), [[[1]]])
    assert permutation_lattice_check(triv, whole_group(Z2)).holds
    check = permutation_lattice_check(z4_minus_one, whole_group(Z2))
    assert check.holds and check.rank_invariants == 3
    C = [[0, -1], [1, -1]]
    M = GModule.build(Z3, (3, 3), [C], [[1, 0], [0, 1]], e=1)
    assert validate_module(M).ok
    assert permutation_lattice_check(M, whole_group(Z3)).holds


def test_permutation_lattice_rejects_composite_subgroups():
    M = GModule.build(FiniteAbelianGroup((4,)), (2,), [[[1]]], e=1)
    with pytest.raises(GrmodError):
        permutation_lattice_check(M, whole_group(M.group))


# -- files -----------------------------------------------------------------


@settings(max_examples=25)
@given(modules())
def test_file_round_trip(M):
    assert loads_module(dumps_module(M)) == M


def test_malformed_files():
    with pytest.raises(ModuleFormatError):
        loads_module("{")
    with pytest.raises(ModuleFormatError):
        loads_module('{"group": {}}')
