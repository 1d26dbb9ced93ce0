import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mapcone.artin import polynomial_forms
from mapcone.cone import build_cone
from mapcone.dgla import Dgla, from_half_table, hom_dgla, rank_one_complex, sl2, tensor_dgla, tensor_exterior
from mapcone.exactalg import GradedMap, GradedVectorSpace, MultilinearMap
from mapcone.fixtures import lie_inclusion, random_morphisms, unit_inclusion
from mapcone.linfty import (
    ArityCapError, check_linear_criterion, check_linfty, check_morphism, check_symmetric, compose,
    dgla_brackets, from_dgla, identity_morphism, linear_morphism,
)

ONE = Fraction(1)


def as_linear(f):
    src, tgt = from_dgla(f.source), from_dgla(f.target)
    f1 = GradedMap(src.susp, tgt.susp, 0, dict(f.map.cols))
    return linear_morphism(src, tgt, f1)


@pytest.mark.parametrize("g", [sl2(), tensor_exterior(sl2(), 1), hom_dgla(rank_one_complex().space, rank_one_complex().d),
                               tensor_dgla(sl2(), polynomial_forms(2))], ids=lambda g: g.name)
def test_dglas_satisfy_linfty_relations(g):
    assert check_linfty(from_dgla(g), 4).ok


def test_decalage_signs_on_hom_dgla():
    W = rank_one_complex()
    g = hom_dgla(W.space, W.d)
    V = from_dgla(g)
    for a in g.labels:
        assert V.q(1, [a]) == {k: -c for k, c in g.dif({a: ONE}).items()}
        for b in g.labels:
            expect = {k: (-1) ** (g.deg(a) % 2) * c for k, c in g.basis_bracket(a, b).items()}
            assert V.q(2, [a, b]) == expect


def _broken(kind):
    if kind == "d2":
        S = GradedVectorSpace({0: ["a"], 1: ["b"], 2: ["c"]})
        return Dgla(S, GradedMap(S, S, 1, {"a": {"b": ONE}, "b": {"c": ONE}}))
    if kind == "leibniz":
        # d[a,c] = 0 but [da,c] = e
        S = GradedVectorSpace({0: ["a"], 1: ["b", "c"], 2: ["e"]})
        return from_half_table(S, GradedMap(S, S, 1, {"a": {"b": ONE}}), {("b", "c"): {"e": ONE}})
    S = GradedVectorSpace({0: ["a", "b", "c"]})
    return from_half_table(S, GradedMap.zero(S, S, 1),
                           {("a", "b"): {"c": ONE}, ("b", "c"): {"a": ONE}, ("a", "c"): {"a": ONE}})


def test_arity_one_is_d_squared():
    g = _broken("d2")
    assert not check_linfty(from_dgla(g), 1).ok and g.check_d2().name == "d^2"
    assert check_linfty(from_dgla(sl2()), 1).ok


def test_arity_two_detects_leibniz():
    g = _broken("leibniz")
    assert not g.check_leibniz().ok
    assert check_linfty(from_dgla(g), 1).ok and not check_linfty(from_dgla(g), 2).ok


def test_arity_three_detects_jacobi():
    g = _broken("jacobi")
    assert not g.check_jacobi().ok
    r = check_linfty(from_dgla(g), 3)
    assert check_linfty(from_dgla(g), 2).ok and not r.ok and len(r.witness) == 3


def test_symmetry_of_decalaged_brackets():
    for t in dgla_brackets(sl2()).values():
        assert check_symmetric(t).ok
    S = GradedVectorSpace({1: ["x", "y"]})
    bad = MultilinearMap(S, S, 2, 1, {("x", "y"): {"x": ONE}, ("y", "x"): {"x": ONE}})
    assert not check_symmetric(bad).ok


def test_arity_cap_is_enforced():
    V = from_dgla(sl2(), arity_cap=3)
    with pytest.raises(ArityCapError):
        check_linfty(V, 4)


def test_linear_criterion_both_directions():
    good = as_linear(lie_inclusion())
    assert check_morphism(good, 3).ok and check_linear_criterion(good, 3).ok
    f = lie_inclusion()
    bad_map = GradedMap(f.source.space, f.target.space, 0, {"h": {"h": ONE}, "e": {"e": ONE}})
    src, tgt = from_dgla(f.source), from_dgla(f.target)
    bad = linear_morphism(src, tgt, GradedMap(src.susp, tgt.susp, 0, dict(bad_map.cols)))
    assert not check_morphism(bad, 3).ok and not check_linear_criterion(bad, 3).ok


def test_identity_and_composition():
    V = from_dgla(sl2())
    assert check_morphism(identity_morphism(V), 3).ok
    F = as_linear(lie_inclusion())
    G = as_linear(unit_inclusion(sl2(), 1))
    GF = compose(G, F)
    assert check_morphism(GF, 3).ok


@st.composite
def cone_vectors(draw):
    fams = random_morphisms(0)
    name, chi = fams[draw(st.integers(0, len(fams) - 1))]
    cone = build_cone(chi, 5)
    S = cone.space
    vecs = []
    for _ in range(draw(st.integers(2, 4))):
        dl = draw(st.sampled_from(cone.L.space.degrees() or [0]))
        dm = draw(st.sampled_from(cone.M.space.degrees() or [0]))
        v = {}
        for lab in S.labels:
            side, x = lab.split(":", 1)
            deg_ok = (side == "L" and cone.L.deg(x) == dl) or (side == "M" and cone.M.deg(x) == dm)
            if deg_ok and draw(st.booleans()):
                v[lab] = Fraction(draw(st.integers(-2, 2)))
        vecs.append({k: c for k, c in v.items() if c})
    return cone, vecs


@given(cone_vectors())
def test_closed_form_on_vectors_matches_expansion(cv):
    cone, vecs = cv
    fast = cone.linf.vector_eval(vecs)
    if fast is not None:
        assert {k: c for k, c in fast.items() if c} == cone.linf.qv_expanded(vecs)
