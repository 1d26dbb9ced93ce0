import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mapcone.dgla import (
    Dgla, DglaMorphism, SubcomplexPair, affine_line, change_basis, exterior_dgca, from_half_table,
    heisenberg, hom_dgla, interval_dgca, is_quasiiso, preserving_subalgebra, quotient_morphism,
    random_complex, random_subcomplex, rank_one_complex, restriction_morphism, sl2, tensor_dgla,
    tensor_exterior, tensor_morphism,
)
from mapcone.exactalg import GradedMap, GradedVectorSpace
from mapcone.fixtures import lie_inclusion, random_morphisms, remark_pairs, unit_inclusion
from mapcone.artin import polynomial_forms

ONE = Fraction(1)


@pytest.mark.parametrize("g", [sl2(), heisenberg(), affine_line(), tensor_exterior(sl2(), 1),
                               tensor_exterior(heisenberg(), -1), tensor_dgla(sl2(), interval_dgca())],
                         ids=lambda g: g.name)
def test_shipped_dglas_are_valid(g):
    assert g.check().ok


def test_broken_jacobi_names_a_triple():
    S = GradedVectorSpace({0: ["a", "b", "c"]})
    half = {("a", "b"): {"c": ONE}, ("b", "c"): {"a": ONE}, ("a", "c"): {"a": ONE}}
    g = from_half_table(S, GradedMap.zero(S, S, 1), half)
    r = g.check()
    assert not r.ok and r.name == "jacobi" and len(r.witness) == 3


def test_broken_d_squared():
    S = GradedVectorSpace({0: ["a"], 1: ["b"], 2: ["c"]})
    g = Dgla(S, GradedMap(S, S, 1, {"a": {"b": ONE}, "b": {"c": ONE}}))
    assert g.check().name == "d^2"


def test_hom_dgla_dimensions():
    W = rank_one_complex()
    L = hom_dgla(W.space, W.d)
    dims = {d: L.space.dim(d) for d in L.space.degrees()}
    oracle = {k: sum(W.space.dim(i) * W.space.dim(i + k) for i in (0, 1)) for k in (-1, 0, 1)}
    assert dims == oracle == {-1: 4, 0: 8, 1: 4}
    assert L.check().ok


def test_preserving_codimension_on_a_kernel_line():
    pair = dict(remark_pairs())["ker_only"]
    W = pair.W
    LW = hom_dgla(W.space, W.d)
    LVW, inc = preserving_subalgebra(pair)
    assert LW.space.dim(0) - LVW.space.dim(0) == 1
    assert inc.check().ok


@pytest.mark.parametrize("name", ["ker_im", "ker_other", "other_im", "ker_only"])
def test_restriction_and_quotient_are_morphisms(name):
    pair = dict(remark_pairs())[name]
    assert pair.check().ok
    LVW, inc = preserving_subalgebra(pair)
    _, res = restriction_morphism(pair, LVW, inc)
    _, quo = quotient_morphism(pair, LVW, inc)
    assert res.check().ok and quo.check().ok


def test_subcomplex_pair_rejects_non_subcomplex():
    W = rank_one_complex()
    assert not SubcomplexPair(W, {0: [{"w0": ONE}]}).check().ok


@given(st.integers(0, 10_000))
def test_preserving_inclusion_is_quasiiso_for_quasiiso_pairs(seed):
    rng = random.Random(seed)
    W = random_complex(rng, {0: rng.randint(1, 2), 1: rng.randint(1, 2)})
    V = random_subcomplex(rng, W, quasi_iso=True)
    pair = SubcomplexPair(W, V)
    _, inc = preserving_subalgebra(pair)
    assert is_quasiiso(inc).ok


@given(st.integers(0, 10_000))
def test_random_complexes_square_to_zero(seed):
    rng = random.Random(seed)
    W = random_complex(rng, {0: 2, 1: 2, 2: 1})
    assert W.d.compose(W.d).is_zero()
    V = random_subcomplex(rng, W)
    assert SubcomplexPair(W, V).check().ok


def test_fixture_morphisms_are_valid():
    fams = random_morphisms(0)
    assert len(fams) >= 20
    for name, f in fams:
        assert f.check().ok, name


@given(st.integers(0, 10_000))
def test_basis_change_gives_isomorphic_dgla(seed):
    g, iso = change_basis(sl2(), random.Random(seed))
    assert g.check().ok and iso.check().ok


def test_morphism_composition():
    f = unit_inclusion(sl2(), 1).compose(lie_inclusion())
    assert f.check().ok
    bad = DglaMorphism(affine_line(), sl2(), GradedMap(affine_line().space, sl2().space, 0, {"h": {"h": ONE}, "e": {"e": ONE}}))
    # [h, e] = e in the source but [h, e] = 2e in sl2
    assert not bad.check().ok


@pytest.mark.parametrize("R", [exterior_dgca(1), exterior_dgca(2), interval_dgca(), polynomial_forms(3)],
                         ids=lambda R: R.name)
def test_dgcas_are_valid(R):
    assert R.check().ok


def test_tensor_morphism_with_dgca():
    f = tensor_morphism(lie_inclusion(), interval_dgca())
    assert f.check().ok
