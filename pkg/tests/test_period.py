from fractions import Fraction

import pytest

from mapcone.artin import TDegreeCapError, standard, truncation_extension
from mapcone.cone import check_cartan
from mapcone.grassmann import NotMaurerCartan
from mapcone.period import (
    GaussManinSetup, ToyDolbeaultModel, conjugated_differential_check, first_order_check,
    hodge_filtration, kodaira_check, period_map, period_morphism, shipped_model, transversality_check,
)

ONE = Fraction(1)
XI = {("dzb.d/dz", "t"): ONE}
MODELS = ["elliptic", "torus2", "affine", "affine_conj"]


@pytest.mark.parametrize("name", MODELS)
def test_shipped_models_validate(name):
    m = shipped_model(name)
    assert m.validation.ok and check_cartan(m.cartan()).ok


@pytest.mark.parametrize("name", MODELS)
def test_models_survive_serialization(name):
    m = shipped_model(name)
    m2 = ToyDolbeaultModel.from_dict(m.to_dict())
    assert m2.to_dict() == m.to_dict() and m2.class_names() == m.class_names()


def test_hodge_filtration_of_the_elliptic_curve():
    m = shipped_model("elliptic")
    assert hodge_filtration(m, 1).V == {1: [{"dz": ONE}], 2: [{"dz^dzb": ONE}]}
    assert hodge_filtration(m, 0).V.keys() == {0, 1, 2}


def test_kahler_type():
    assert all(shipped_model("elliptic").kahler_type().values())
    # the non-Kähler affine model fails injectivity at F²
    assert shipped_model("affine").kahler_type() == {0: True, 1: True, 2: False, 3: True}


def test_elliptic_period_map():
    # e^{tξ} dz = dz + t dz̄ and dz ∧ dz̄ is fixed
    m = shipped_model("elliptic")
    for B in ("t2", "t3"):
        res = period_map(m, 1, standard(B), XI)
        assert res.generators() == {1: ["[dz]+t[dzb]"], 2: ["[dz^dzb]"]}


def test_lie_derivative_vanishes_on_the_elliptic_curve():
    pm = period_morphism(shipped_model("elliptic"), 1)
    assert pm.lift.cols == {}
    assert all(r.ok for r in pm.checks)


def test_affine_period_generators():
    m = shipped_model("affine")
    res = period_map(m, 1, standard("t2"), {("q1.d/p1", "t"): ONE})
    assert res.generators()[1] == ["[p1]+t[q1]"]


@pytest.mark.parametrize("name", ["elliptic", "torus2", "affine"])
def test_first_order(name):
    m = shipped_model(name)
    for p, inj in m.kahler_type().items():
        if inj and p <= m.top_holomorphic:
            assert first_order_check(m, p).ok


def test_non_mc_xi_rejected():
    m = shipped_model("torus2")
    # [ξ, ξ] ≠ 0 would need a nonabelian K; a degree-0 ξ is rejected outright
    with pytest.raises(ValueError):
        period_map(m, 1, standard("t2"), {("d/dz1", "t"): ONE})
    with pytest.raises(ValueError):
        period_map(m, 1, standard("t2"), {("dzb1.d/dz1", "1"): ONE})


def test_not_maurer_cartan_in_affine_model():
    m = shipped_model("affine")
    with pytest.raises(NotMaurerCartan):
        period_map(m, 1, standard("t3"), {("q1.d/p1", "t"): ONE, ("q2.d/p2", "t"): ONE})


def test_conjugated_differential():
    for name, xi in [("elliptic", XI), ("torus2", {("dzb1.d/dz2", "t"): ONE})]:
        assert conjugated_differential_check(shipped_model(name), standard("t3"), xi).ok


def test_transversality_is_sharp_on_the_elliptic_curve():
    rep = transversality_check(GaussManinSetup(standard("t2")), shipped_model("elliptic"), XI, 1)
    assert rep.ok and rep.sharp
    assert rep.witness == {"element": {"dz*1*1": "1", "dzb*t*s": "1"}, "nabla": {"dzb*t*ds": "-1"}}


def test_s_degree_cap():
    with pytest.raises(TDegreeCapError):
        GaussManinSetup(standard("t3"), cap=1)
    GaussManinSetup(standard("t3"), cap=1, scaling="constant")
    with pytest.raises(ValueError):
        GaussManinSetup(standard("t3"), scaling="linear")


def test_kodaira_obstruction_dies():
    xi = {("q1.d/p1", "t"): ONE, ("q2.d/p2", "t"): ONE}
    rep = kodaira_check(shipped_model("affine"), 1, truncation_extension(2), xi)
    assert rep.source.lifted is None
    assert [int(c) for c in rep.source.class_coords] == [0, 1]
    assert list(rep.image) == [0] and list(rep.target.class_coords) == [0]
    assert rep.compatible and rep.kernel_property and rep.target_unobstructed
