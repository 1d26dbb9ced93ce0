from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mapcone.artin import dual_to_t3, standard, truncation_extension
from mapcone.cone import build_cone
from mapcone.dgla import sl2
from mapcone.fixtures import random_injective_pairs, random_morphisms, remark_pairs
from mapcone.linfty import check_linfty
from mapcone.period import shipped_model
from mapcone.textformat import FormatError, dumps, loads, parse_tensor, tensor_string

fracs = st.fractions(max_denominator=50)


def roundtrip(obj):
    text = dumps(obj)
    back = loads(text)
    assert dumps(back) == text
    return back


@pytest.mark.parametrize("name,chi", random_morphisms(0)[:8], ids=[n for n, _ in random_morphisms(0)[:8]])
def test_morphisms(name, chi):
    back = roundtrip(chi)
    assert back.map.cols == chi.map.cols and back.check().ok


@pytest.mark.parametrize("name", ["eps", "xy", "t3", "t5"])
def test_artin(name):
    assert roundtrip(standard(name)).table == standard(name).table


def test_extensions_pairs_models():
    for ext in (dual_to_t3(), truncation_extension(3)):
        assert roundtrip(ext).check().ok
    for _, p in remark_pairs():
        assert roundtrip(p).V == p.V
    for p in random_injective_pairs(0, 3):
        assert roundtrip(p).check().ok
    for name in ("elliptic", "affine"):
        assert roundtrip(shipped_model(name)).class_names() == shipped_model(name).class_names()


def test_cone_as_linfty_document():
    cone = build_cone(random_morphisms(0)[0][1], 4)
    V = loads(dumps(cone.linf, max_arity=3))
    assert check_linfty(V, 3).ok


def test_dgla():
    g = roundtrip(sl2())
    assert g.check().ok


@given(st.dictionaries(st.tuples(st.sampled_from(["x", "y", "hx"]), st.sampled_from(["t", "t^2", "e"])),
                       fracs.filter(bool), max_size=5))
def test_tensor_strings(x):
    assert parse_tensor(tensor_string(x)) == x


def test_tensor_parsing():
    assert parse_tensor("2*x@t + -1/2*y@t^2") == {("x", "t"): 2, ("y", "t^2"): Fraction(-1, 2)}
    assert parse_tensor("0") == {}
    with pytest.raises(FormatError):
        parse_tensor("2*x")


@pytest.mark.parametrize("text", [
    "kind: artin\nname: a\nbasis: [t]\ntable: {}\nnilpotency: 2\nweights: {t: 0.5}",
    "kind: dgla\nspace: {0: [a]}\nbracket: [[a, a, {a: 0.25}]]",
    "kind: nonsense",
    "[1, 2",
    "kind: map\n",
])
def test_rejections(text):
    with pytest.raises(FormatError):
        loads(text)


def test_floats_rejected_in_coefficients():
    text = dumps(random_morphisms(0)[0][1]).replace("'1'", "1.0", 1)
    if "1.0" in text:
        with pytest.raises(FormatError):
            loads(text)
