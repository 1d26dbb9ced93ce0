import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mapcone.artin import dual_numbers, standard, truncation_extension
from mapcone.dgla import Complex, SubcomplexPair
from mapcone.exactalg import GradedMap, GradedVectorSpace
from mapcone.fixtures import random_injective_pairs, remark_pairs
from mapcone.grassmann import (
    GraphChart, GrassSetup, NotMaurerCartan, classical_lift, cohomology_transform, compare_routes,
    conjugated_differential, equal_mod_aut0, first_order_element, gauge_equivalent_grass, gauge_to_group,
    grass_to_classical, mc_defect, mc_to_grass, membership_by_defect, membership_by_submodule, random_grass,
    random_hom0, tangent_dimension_cone, tangent_dimension_direct, tangent_dimension_formula,
)

ONE = Fraction(1)
PAIRS = dict(remark_pairs())


@pytest.mark.parametrize("pair", random_injective_pairs(1, 6), ids=lambda p: str(sorted(p.V)))
def test_tangent_three_ways(pair):
    s = GrassSetup(pair)
    assert tangent_dimension_direct(s) == tangent_dimension_formula(s) == tangent_dimension_cone(s)


@pytest.mark.parametrize("n,k", [(2, 1), (3, 1), (4, 2), (5, 2)])
def test_zero_differential_is_the_classical_grassmannian(n, k):
    W = GradedVectorSpace({0: [f"w{i}" for i in range(n)]})
    pair = SubcomplexPair(Complex(W, GradedMap.zero(W, W, 1)), {0: [{f"w{i}": ONE} for i in range(k)]})
    s = GrassSetup(pair)
    assert tangent_dimension_formula(s) == tangent_dimension_direct(s) == k * (n - k)


def test_non_injective_pair_has_no_formula():
    s = GrassSetup(PAIRS["ker_im"])
    with pytest.raises(ValueError):
        tangent_dimension_formula(s)
    # the other two routes still agree
    assert tangent_dimension_direct(s) == tangent_dimension_cone(s)


def test_pairs_are_subcomplexes():
    for p in PAIRS.values():
        assert p.check().ok
    bad = SubcomplexPair(PAIRS["ker_im"].W, {0: [{"w0": ONE}]})
    assert not bad.check().ok


@settings(max_examples=30)
@given(st.sampled_from(sorted(PAIRS)), st.sampled_from(["eps", "t3", "xy"]), st.integers(0, 10 ** 6))
def test_membership_routes_agree(pname, aname, seed):
    s, A = GrassSetup(PAIRS[pname]), standard(aname)
    a = random_hom0(s, A, random.Random(seed), density=0.5)
    assert mc_defect(s, A, a) == conjugated_differential(s, A, a)
    assert membership_by_defect(s, A, a) == membership_by_submodule(s, A, a)


def test_non_member_raises():
    s = GrassSetup(PAIRS["ker_only"])
    # moving w1 towards w0 is not a deformation of the subcomplex ⟨w1⟩
    a = first_order_element(s, {"w0<-w1": ONE})
    with pytest.raises(NotMaurerCartan):
        mc_to_grass(s, dual_numbers(), a)


def _elements(pair, aname, n, seed=0):
    s, A, rng = GrassSetup(pair), standard(aname), random.Random(seed)
    out = []
    while len(out) < n:
        e = random_grass(s, A, rng)
        if e is not None:
            out.append(e)
    return out


@pytest.mark.parametrize("aname", ["eps", "t3", "xy"])
def test_cohomology_routes(aname):
    for pair in random_injective_pairs(2, 4):
        for e in _elements(pair, aname, 2):
            assert compare_routes(e).ok
            assert compare_routes(e, rng=random.Random(9)).ok


def test_classical_normal_form_is_independent_of_choices():
    e = _elements(random_injective_pairs(3, 1)[0], "t3", 1)[0]
    forms = [grass_to_classical(e, rng=random.Random(k)).classes for k in range(4)]
    assert all(f == forms[0] for f in forms) and forms[0] == cohomology_transform(e)


def test_gauge_action_moves_within_aut0_class():
    e = _elements(PAIRS["ker_im"], "t3", 1, seed=4)[0]
    s, A = e.setup, e.A
    m = {(f, "t"): ONE for f in list(s.LW.space.in_degree(-1))[:1]}
    e2 = gauge_to_group(e, {}, m)
    assert equal_mod_aut0(e, e2) is not None
    assert gauge_equivalent_grass(e, e2) is not None


@pytest.mark.parametrize("aname", ["eps", "t3"])
def test_orbit_routes_on_ker_im(aname):
    elems = _elements(PAIRS["ker_im"], aname, 5, seed=11)
    for i in range(len(elems)):
        for j in range(i, len(elems)):
            g = gauge_equivalent_grass(elems[i], elems[j]) is not None
            s = equal_mod_aut0(elems[i], elems[j]) is not None
            assert g == s
        assert equal_mod_aut0(elems[i], elems[i]) is not None


def test_classical_lift_reduces():
    pair = random_injective_pairs(0, 1)[0]
    e = _elements(pair, "t3", 1)[0]
    chart = GraphChart(pair.W.space, e.setup.V)
    lifted = classical_lift(e.submodule, chart, truncation_extension(3))
    assert lifted.is_free() and lifted.rank_by_degree() == e.submodule.rank_by_degree()
