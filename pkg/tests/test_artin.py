from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from mapcone.artin import (
    ONE, ArtinLocalAlgebra, Operator, PolyForms, SmallExtension, bch, bch_many, dual_to_t3,
    exp_action, gauge_action, is_mc, log_unipotent, standard, tensor, truncated, truncation_extension,
)
from mapcone.dgla import hom_label, sl2, tensor_exterior
from mapcone.exactalg import GradedVectorSpace

SL2 = {"h": sympy.Matrix([[1, 0], [0, -1]]), "e": sympy.Matrix([[0, 1], [0, 0]]), "f": sympy.Matrix([[0, 0], [1, 0]])}
t = sympy.Symbol("t")


@pytest.mark.parametrize("name", ["eps", "xy", "t2", "t3", "t4", "t5", "t6"])
def test_standard_algebras_valid(name):
    assert standard(name).check().ok


def test_wrong_nilpotency_index():
    A = truncated(3)
    assert not ArtinLocalAlgebra("bad", A.basis, A.table, 2, A.weights).check().ok
    assert not ArtinLocalAlgebra("bad", A.basis, A.table, 4, A.weights).check().ok


def test_inhomogeneous_weights_rejected():
    A = ArtinLocalAlgebra("w", ("x", "y", "z"), {("x", "y"): {"z": 1}}, 3, {"x": 1, "y": 1, "z": 1})
    assert A.check().name == "weight homogeneity"


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_truncation_extensions(k):
    assert truncation_extension(k).check().ok


def test_dual_numbers_extension():
    ext = dual_to_t3()
    assert ext.check().ok
    assert ext.project({("h", "t"): 2, ("h", "t^2"): 5, ("e", ONE): 1}) == {("h", "e"): 2, ("e", ONE): 1}


def test_kernel_must_be_annihilated():
    big, small = truncated(4), truncated(2)
    bad = SmallExtension(big, small, {"t": {"t": Fraction(1)}}, "t^2")
    assert not bad.check().ok


# matrix oracle: sl2 ⊗ t K[t]/(t^N) inside 2×2 matrices over K[t]

def to_matrix(x):
    M = sympy.zeros(2, 2)
    for (lab, a), c in x.items():
        p = 0 if a == ONE else (1 if a == "t" else int(a.split("^")[1]))
        M += sympy.Rational(c.numerator, c.denominator) * t ** p * SL2[lab]
    return M


def trunc(M, N):
    return M.applyfunc(lambda e: sympy.expand(e) - sum(sympy.expand(e).coeff(t, k) * t ** k
                                                         for k in range(N, 4 * N)))


def mexp(X, N):
    out, term = sympy.eye(2), sympy.eye(2)
    for k in range(1, N):
        term = trunc(term * X / k, N)
        out += term
    return trunc(out, N)


def mlog(U, N):
    Y = U - sympy.eye(2)
    out, power = sympy.zeros(2, 2), sympy.eye(2)
    for k in range(1, N):
        power = trunc(power * Y, N)
        out += sympy.Rational((-1) ** (k + 1), k) * power
    return trunc(out, N)


coef = st.integers(-3, 3).map(Fraction)


@st.composite
def sl2_elements(draw, N):
    A = truncated(N)
    return {(lab, a): draw(coef) for lab in "hef" for a in A.basis if draw(st.booleans())}


@given(st.data())
def test_bch_against_matrices(data):
    N = data.draw(st.integers(2, 5))
    A, g = truncated(N), sl2()
    x, y = data.draw(sl2_elements(N)), data.draw(sl2_elements(N))
    expected = mlog(trunc(mexp(to_matrix(x), N) * mexp(to_matrix(y), N), N), N)
    assert sympy.simplify(to_matrix(bch(g, A, x, y)) - expected) == sympy.zeros(2, 2)


@given(st.data())
def test_gauge_action_is_conjugation_when_d_vanishes(data):
    N = data.draw(st.integers(2, 4))
    A, g = truncated(N), sl2()
    a, y = data.draw(sl2_elements(N)), data.draw(sl2_elements(N))
    E = mexp(to_matrix(a), N)
    expected = trunc(E * to_matrix(y) * mexp(-to_matrix(a), N), N)
    assert sympy.expand(to_matrix(gauge_action(g, A, a, y)) - expected) == sympy.zeros(2, 2)


@given(st.data())
def test_gauge_group_law(data):
    A = truncated(4)
    g = tensor_exterior(sl2(), 1)
    el = st.fixed_dictionaries({}, optional={(lab, a): coef for lab in g.labels if g.deg(lab) == 0 for a in A.basis})
    mc = st.fixed_dictionaries({}, optional={(lab, a): coef for lab in g.labels if g.deg(lab) == 1 for a in A.basis})
    a, b, y = data.draw(el), data.draw(el), data.draw(mc)
    lhs = gauge_action(g, A, bch(g, A, a, b), y)
    rhs = gauge_action(g, A, a, gauge_action(g, A, b, y))
    assert lhs == rhs


def test_gauge_action_preserves_mc():
    A = truncated(4)
    g = tensor_exterior(sl2(), 1)
    x = {("e.x", "t"): Fraction(1)} if "e.x" in g.labels else tensor({g.labels[-1]: 1}, "t")
    a = {("h", "t"): Fraction(1), ("f", "t^2"): Fraction(-2)}
    if is_mc(g, A, x):
        assert is_mc(g, A, gauge_action(g, A, a, x))


def test_bch_associative():
    A, g = truncated(5), sl2()
    x, y, z = {("e", "t"): 1}, {("f", "t"): 1}, {("h", "t^2"): 1}
    assert bch(g, A, bch(g, A, x, y), z) == bch(g, A, x, bch(g, A, y, z)) == bch_many(g, A, x, y, z)


@given(st.data())
def test_exp_log_inverse(data):
    W = GradedVectorSpace({0: ["u", "v"], 1: ["w"]})
    A = truncated(data.draw(st.integers(2, 5)))
    labels = [hom_label(p, q) for p, q in [("u", "u"), ("u", "v"), ("v", "u"), ("v", "v"), ("w", "w")]]
    a = data.draw(st.fixed_dictionaries({}, optional={(l, b): coef for l in labels for b in A.basis}))
    a = {k: c for k, c in a.items() if c}
    op = exp_action(W, A, a)
    assert log_unipotent(op) == Operator.from_hom(W, A, a)


def test_poly_forms_stokes():
    P = PolyForms(lambda lab: 0, lambda lab: {}, lambda a, b: {}, 6)
    x = {(3, 0, "v"): Fraction(2), (1, 0, "w"): Fraction(1)}
    # ∫₀¹ dx = x(1) − x(0)
    assert P.integral(P.d(x)) == {"v": 2, "w": 1}
    assert P.t_derivative(P.integral_0t(P.d(x))) == P.t_derivative(x)
