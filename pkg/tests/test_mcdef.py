import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mapcone.artin import t_map, dual_numbers, dual_to_t3, forms_evaluate, mc_curvature, standard, truncated, truncation_extension
from mapcone.cone import build_cone
from mapcone.dgla import DglaMorphism, from_half_table, sl2, tensor_exterior
from mapcone.exactalg import GradedMap, GradedVectorSpace, vscale
from mapcone.fixtures import heisenberg_center, lie_inclusion, random_morphisms
from mapcone.linfty import from_dgla
from mapcone.mcdef import (
    McElement, act_gauge, alpha_map, alpha_preimage, compare_cone_residuals, cone_mc_system,
    gauge_certificate, gauge_equivalent, gauge_from_homotopy, homotopy_equivalent, homotopy_from_gauge,
    is_mc_element, linfty_residual, mc_pushforward, mc_residual, obstruction_image, random_gauge, random_mc,
    tangent_and_obstruction, validate_homotopy,
)
from mapcone.linfty import linear_morphism

ONE = Fraction(1)


def yz_host():
    """y in degree 1, z in degree 2, [y,y] = z, d = 0."""
    S = GradedVectorSpace({1: ["y"], 2: ["z"]})
    return from_half_table(S, GradedMap.zero(S, S, 1), {("y", "y"): {"z": ONE}}, "yz")


def test_yz_host_is_a_dgla():
    assert yz_host().check().ok


def test_dgla_residual_is_minus_curvature():
    g, A = yz_host(), truncated(3)
    x = {("y", "t"): ONE}
    assert mc_residual(McElement(g, A, x)) == {("z", "t^2"): Fraction(-1, 2)}
    assert mc_residual(McElement(g, A, x)) == vscale(mc_curvature(g, A, x), -1)
    assert is_mc_element(McElement(g, dual_numbers(), {("y", "e"): ONE}))


def test_linfty_and_dgla_residuals_agree():
    g, A = tensor_exterior(sl2(), 1), truncated(4)
    rng = random.Random(3)
    for _ in range(5):
        x = {(v, a): Fraction(rng.randint(-2, 2)) for v in g.space.in_degree(1) for a in A.basis}
        x = {k: c for k, c in x.items() if c}
        assert linfty_residual(from_dgla(g), A, x) == mc_residual(McElement(g, A, x))


def _cone_hosts():
    return [build_cone(chi, 5) for _, chi in random_morphisms(0)[:10]]


@settings(max_examples=25)
@given(st.data())
def test_cone_residual_routes_agree(data):
    cone = data.draw(st.sampled_from(_cone_hosts()))
    A = standard(data.draw(st.sampled_from(["eps", "t3", "xy", "t4"])))
    labs = list(cone.linf.susp.in_degree(0))
    gamma = data.draw(st.fixed_dictionaries({}, optional={(v, a): st.integers(-2, 2).map(Fraction)
                                                           for v in labs for a in A.basis}))
    gamma = {k: c for k, c in gamma.items() if c}
    assert compare_cone_residuals(cone, A, gamma).ok


def test_cone_mc_system_vanishes_on_random_mc():
    rng = random.Random(5)
    A = truncated(3)
    for cone in _cone_hosts():
        g = random_mc(cone, A, rng)
        if g is None:
            continue
        assert is_mc_element(g)
        curv, gauge = cone_mc_system(cone, A, g.value)
        assert not curv and not gauge


@pytest.mark.parametrize("seed", range(4))
def test_gauge_and_homotopy_on_cones(seed):
    rng = random.Random(seed)
    A = truncated(3)
    cone = build_cone(heisenberg_center() if seed % 2 else lie_inclusion(), 5)
    g0 = random_mc(cone, A, rng)
    p = random_gauge(cone, A, rng)
    g1 = act_gauge(g0, p)
    assert is_mc_element(g1)
    assert gauge_equivalent(g0, g1) is not None
    w = homotopy_equivalent(g0, g1)
    assert w is not None and validate_homotopy(g0, g1, w).ok
    hw = homotopy_from_gauge(g0, p)
    assert validate_homotopy(g0, g1, hw).ok
    assert act_gauge(g0, gauge_from_homotopy(g0, hw)).value == g1.value


def test_gauge_and_homotopy_on_a_dgla():
    rng = random.Random(1)
    g, A = tensor_exterior(sl2(), 1), truncated(4)
    g0 = random_mc(g, A, rng)
    p = random_gauge(g, A, rng)
    g1 = act_gauge(g0, p)
    w = homotopy_from_gauge(g0, p)
    assert validate_homotopy(g0, g1, w).ok
    assert forms_evaluate(w.data["path"], 1) == g1.value
    assert act_gauge(g0, gauge_from_homotopy(g0, w)).value == g1.value


def test_inequivalent_elements_have_a_certificate():
    g, A = yz_host(), dual_numbers()
    g0, g1 = McElement(g, A, {("y", "e"): ONE}), McElement(g, A, {("y", "e"): Fraction(2)})
    assert gauge_equivalent(g0, g1) is None
    assert homotopy_equivalent(g0, g1) is None
    assert gauge_certificate(g0, g1) is not None


def test_tangent_and_obstruction():
    g = yz_host()
    r = tangent_and_obstruction(g, dual_to_t3(), McElement(g, dual_numbers(), {("y", "e"): ONE}))
    assert r.lifted is None and r.tangent_dim == 1
    assert r.obstruction == {("z", "t^2"): Fraction(1, 2)} and any(r.class_coords)


def test_unobstructed_lift():
    g = tensor_exterior(sl2(), 1)
    rng = random.Random(2)
    for k in (2, 3):
        x = random_mc(g, truncated(k), rng)
        r = tangent_and_obstruction(g, truncation_extension(k), x)
        if not any(r.class_coords):
            assert r.lifted is not None and is_mc_element(r.lifted)
            assert truncation_extension(k).project(r.lifted.value) == x.value


def test_obstruction_classes_push_forward():
    g = yz_host()
    f = DglaMorphism(g, g, GradedMap(g.space, g.space, 0, {"y": {"y": Fraction(2)}, "z": {"z": Fraction(4)}}))
    assert f.check().ok
    r = tangent_and_obstruction(g, dual_to_t3(), McElement(g, dual_numbers(), {("y", "e"): ONE}))
    assert obstruction_image(f, g, g, r.class_coords) == [4 * c for c in r.class_coords]


def test_pushforward_along_a_linear_morphism():
    f = lie_inclusion()
    g, h = tensor_exterior(f.source, 1), tensor_exterior(f.target, 1)
    fx = GradedMap(g.space, h.space, 0, {lab: _tensor_image(f, lab) for lab in g.labels})
    src, tgt = from_dgla(g), from_dgla(h)
    F = linear_morphism(src, tgt, GradedMap(src.susp, tgt.susp, 0, dict(fx.cols)))
    A = truncated(3)
    x = random_mc(g, A, random.Random(1))
    assert any(v.endswith("x") for v, _ in x.value)
    assert mc_pushforward(F, McElement(src, A, x.value)).value == t_map(fx, x.value)


def _tensor_image(f, lab):
    # labels of g ⊗ Λ(x) are v and vx
    base, tail = (lab, "") if lab in f.source.labels else (lab[:-1], "x")
    return {k + tail: c for k, c in f.map.apply({base: ONE}).items()}


def test_path_splitting_round_trip():
    M, A = sl2(), truncated(3)
    c = {("h*s", "t"): ONE, ("e*s^2", "t^2"): Fraction(-1)}
    x = {}
    gamma = alpha_map(M, A, x, c)
    x2, c2 = alpha_preimage(M, A, gamma)
    assert x2 == x and alpha_map(M, A, x2, c2) == gamma
