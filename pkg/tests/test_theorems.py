import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grmod.errors import CapExceeded, GrmodError, NotCyclic
from grmod.gmodule import GModule, validate_module
from grmod.groups import FiniteAbelianGroup
from grmod.theorems import (
    THEOREM_IDS,
    Caps,
    RandomModuleSpec,
    campaign,
    campaign_instance,
    derive_seed,
    free_module,
    generate_module,
    permute_factors,
    random_module,
    verify_abelian_decomposition,
    verify_cohomological_triviality,
    verify_cyclic_decomposition,
    verify_duality,
    verify_herbrand,
    verify_order_two_criterion,
    verify_permutation_module,
    verify_prime_order_h0_criterion,
    verify_prime_power_factors,
    verify_prime_power_isotypic,
)

Z2 = FiniteAbelianGroup((2,))
V4 = FiniteAbelianGroup((2, 2))


def zero_module(G):
    return GModule.build(G, (), [[] for _ in G.cyclic_orders], [], e=G.exponent)


def induced(orders, c, e=None, rank=1):
    return random_module(RandomModuleSpec(0, FiniteAbelianGroup(orders), rank, c, 0, e))


def klein_four_over_f4():
    """F_4^2 with x = s - 1 sending u -> v and y = w^2 x, w a generator of F_4*.

    Every order-2 subgroup has trivial degree-0 and degree -1 Tate groups,
    but the whole group does not.
    """
    s = [[1, 0, 0, 0], [0, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1]]
    t = [[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 1, 0], [1, 0, 0, 1]]
    return GModule.build(V4, (2, 2, 2, 2), [s, t], e=1)


# -- random modules ----------------------------------------------------------


def test_unit_modulus_gives_zero_module():
    assert random_module(RandomModuleSpec(3, FiniteAbelianGroup((4,)), 1, 1)).order == 1


@pytest.mark.parametrize("orders,e,rank,c", [((2,), None, 1, 3), ((3,), None, 2, 2), ((2, 2), 1, 1, 3), ((3,), 6, 1, 2)])
def test_free_quotient_order(orders, e, rank, c):
    spec = RandomModuleSpec(0, FiniteAbelianGroup(orders), rank, c, 0, e)
    M = random_module(spec)
    assert M.order == c ** spec.free_rank
    assert spec.free_rank == rank * spec.group.order * __import__("grmod").cyclotomic.euler_phi(spec.ring_exponent)
    assert validate_module(M).ok


def test_free_module_is_valid():
    assert validate_module(free_module(FiniteAbelianGroup((2, 2)), 4, 1, 3)).ok


def test_generation_is_deterministic():
    spec = RandomModuleSpec(11, FiniteAbelianGroup((6,)), 1, 2, 3)
    assert random_module(spec) == random_module(spec)
    assert derive_seed(1, "a", 2) == derive_seed(1, "a", 2) != derive_seed(1, "a", 3)


def test_generation_respects_cap():
    with pytest.raises(CapExceeded):
        random_module(RandomModuleSpec(0, FiniteAbelianGroup((3,)), 2, 7, 0), cap=1000)
    M = generate_module(RandomModuleSpec(0, FiniteAbelianGroup((3,)), 2, 7, 0), 1000, grow=True).module
    assert M.order <= 1000 and validate_module(M).ok


@settings(max_examples=40)
@given(st.integers(0, 10**9), st.sampled_from([(2,), (4,), (6,), (2, 2), (3, 3)]), st.integers(1, 4))
def test_generated_modules_are_valid(seed, orders, rels):
    spec = RandomModuleSpec(seed, FiniteAbelianGroup(orders), 1, 6, rels)
    M = generate_module(spec, 10**5, grow=True).module
    assert validate_module(M).ok


def test_caps_parsing():
    caps = Caps.parse("lattice=500,oracle=64")
    assert (caps.lattice, caps.oracle, caps.subgroups) == (500, 64, 512)
    with pytest.raises(ValueError):
        Caps.parse("bogus=1")


# -- cyclic decomposition ---------------------------------------------------


def test_cyclic_decomposition_of_z4_minus_one(z4_minus_one):
    rep = verify_cyclic_decomposition(z4_minus_one)
    assert rep.passed
    assert rep.totals == {"order": 4, "prod_isotypic": 8, "prod_eps_image": 2, "prod_s": 2, "prod_h0": 4}
    assert [(r.isotypic, r.eps_image, r.h0, r.s) for r in rep.rows] == [(2, 1, 2, 1), (4, 2, 2, 2)]


def test_divisible_module_satisfies_the_plain_formula():
    M = induced((3,), 2)
    rep = verify_cyclic_decomposition(M)
    assert rep.passed
    t = rep.totals
    assert t["order"] == t["prod_isotypic"] == t["prod_eps_image"] == 64
    assert all(r.h0 == 1 and r.s == 1 for r in rep.rows)


def test_cyclic_decomposition_rejects_products():
    with pytest.raises(NotCyclic):
        verify_cyclic_decomposition(induced((2, 2), 2))


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4, 6, 8, 9]), st.integers(1, 3))
def test_cyclic_decomposition_on_random_modules(seed, n, rels):
    spec = RandomModuleSpec(seed, FiniteAbelianGroup((n,)), 1, n, rels)
    M = generate_module(spec, 10**5, grow=True).module
    rep = verify_cyclic_decomposition(M)
    assert rep.passed, rep.checks


# -- products of cyclic groups -------------------------------------------------


def test_product_decomposition_examples(z4_minus_one):
    assert verify_abelian_decomposition(z4_minus_one).passed
    M = induced((2, 2), 2, e=2)
    assert M.order == 16
    assert verify_abelian_decomposition(M, [0, 1]).passed
    assert verify_abelian_decomposition(M, [1, 0]).passed


def test_permute_factors_swaps_actions():
    M = induced((2, 4), 2)
    P = permute_factors(M, [1, 0])
    assert P.group.cyclic_orders == (4, 2)
    assert P.gens == (M.gens[1], M.gens[0])


# -- criteria with hypotheses ---------------------------------------------


def test_prime_order_criterion_examples():
    rep = verify_prime_order_h0_criterion(induced((2, 2), 3, e=1))
    assert rep.hypothesis is True and rep.passed
    rep = verify_prime_order_h0_criterion(GModule.build(Z2, (2,), [[[1]]]))
    assert rep.hypothesis is False and rep.vacuous and rep.passed
    rep = verify_prime_order_h0_criterion(zero_module(Z2))
    assert rep.hypothesis is True and rep.passed


def test_cohomological_triviality_examples(z4_minus_one):
    rep = verify_cohomological_triviality(induced((6,), 2))
    assert rep.hypothesis is True and rep.passed
    M = GModule.build(FiniteAbelianGroup((4,)), (4,), [[[3]]], e=2)
    rep = verify_cohomological_triviality(M)
    assert rep.hypothesis is False and rep.passed
    assert verify_cohomological_triviality(zero_module(V4)).passed


def test_prime_order_vanishing_does_not_reach_the_klein_four_group():
    M = klein_four_over_f4()
    assert validate_module(M).ok
    for verify in (verify_prime_order_h0_criterion, verify_cohomological_triviality):
        rep = verify(M)
        assert rep.hypothesis is True
        assert rep.failures == [
            next(k for k in rep.checks if k.endswith("{(0,0),(0,1),(1,0),(1,1)}") and "herbrand" not in k)
        ]
    whole = {r["label"]: r for r in verify_prime_order_h0_criterion(M).rows}["{(0,0),(0,1),(1,0),(1,1)}"]
    assert (whole["h0"], whole["h_minus1"]) == (4, 4)


def test_prime_power_isotypic_examples(z4_minus_one):
    rep = verify_prime_power_isotypic(induced((4,), 3))
    assert rep.hypothesis is True and rep.passed
    rep = verify_prime_power_isotypic(z4_minus_one)
    assert rep.hypothesis is False and rep.passed
    assert verify_prime_power_isotypic(zero_module(FiniteAbelianGroup((9,)))).passed
    with pytest.raises(NotCyclic):
        verify_prime_power_isotypic(induced((6,), 2))


def test_order_two_criterion_examples(z4_minus_one):
    assert verify_order_two_criterion(induced((4,), 2)).hypothesis is True
    rep = verify_order_two_criterion(z4_minus_one)
    assert rep.hypothesis is False and rep.passed
    with pytest.raises(NotCyclic):
        verify_order_two_criterion(induced((3,), 2))


def test_prime_power_factor_examples():
    rep = verify_prime_power_factors(induced((2, 2), 3))
    assert rep.hypothesis is True and rep.passed
    rep = verify_prime_power_factors(induced((2, 4), 2), [1, 0])
    assert rep.hypothesis is True and rep.passed
    with pytest.raises(GrmodError):
        verify_prime_power_factors(induced((6,), 2))


def test_permutation_module_examples(z4_minus_one):
    assert verify_permutation_module(z4_minus_one).passed
    assert verify_permutation_module(klein_four_over_f4(), cap=16).passed


def test_herbrand_and_duality(z4_minus_one):
    M = klein_four_over_f4()
    for N in (z4_minus_one, M, induced((3, 3), 2, e=1)):
        assert verify_herbrand(N).passed
        assert verify_duality(N).passed


# -- campaigns -------------------------------------------------------------


def test_empty_campaign_passes():
    rep = campaign("thm2.2", 0)
    assert rep.passed and rep.instances == [] and rep.violations == []


def test_unknown_theorem():
    with pytest.raises(GrmodError):
        campaign("thm9.9", 1)


def test_campaign_json_is_byte_identical():
    a = campaign("herbrand", 8, seed=5).to_json()
    b = campaign("herbrand", 8, seed=5).to_json()
    assert a == b
    assert json.loads(a)["summary"]["passed"] is True
    assert campaign("herbrand", 8, seed=6).to_json() != a


def test_instances_do_not_depend_on_count():
    rep = campaign("duality", 4, seed=2)
    assert rep.instances[3].to_dict() == campaign_instance("duality", 2, 3).to_dict()


def test_min_nonvacuous_is_enforced():
    rep = campaign("thm4.10", 4, seed=0, min_nonvacuous=5)
    assert not rep.violations and not rep.passed


@pytest.mark.parametrize("theorem", THEOREM_IDS)
def test_every_campaign_runs(theorem):
    rep = campaign(theorem, 6, seed=3, caps=Caps(lattice=5000))
    assert rep.passed, rep.violations
    assert rep.to_csv().startswith("instance,seed,row_type,label,key,value\n")
