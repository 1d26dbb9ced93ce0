from fractions import Fraction
from itertools import permutations

import pytest
import sympy
from hypothesis import given, strategies as st

from mapcone.exactalg import (
    Basis, GradedMap, GradedVectorSpace, LinearSolver, Permutation, cohomology,
    cohomology_dims_by_rank, decalage, frac, fstr, intersect_spans, koszul_sign, nullspace,
    rank, rref, solve, span_basis, sym_normalize, sym_words, unshuffles, MultilinearMap,
)

small = st.integers(-3, 3).map(Fraction)


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    m = draw(st.integers(1, max_rows))
    n = draw(st.integers(1, max_cols))
    return draw(st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m)), n


@given(matrices())
def test_rank_matches_sympy(mn):
    rows, n = mn
    assert rank(rows, n) == sympy.Matrix(rows).rank()


@given(matrices())
def test_rank_nullity(mn):
    rows, n = mn
    ker = nullspace(rows, n)
    assert rank(rows, n) + len(ker) == n
    for x in ker:
        assert all(sum(r[j] * x[j] for j in range(n)) == 0 for r in rows)


@given(matrices())
def test_rref_rows_are_reduced(mn):
    rows, n = mn
    R, piv = rref(rows, n)
    for i, p in enumerate(piv):
        assert R[i][p] == 1
        assert all(R[k][p] == 0 for k in range(len(R)) if k != i)


@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solver_agrees_with_solve(mn, b):
    rows, n = mn
    rhs = b[: len(rows)]
    x1 = solve(rows, rhs, n)
    x2 = LinearSolver(rows, n).solve_sparse({i: c for i, c in enumerate(rhs) if c})
    assert (x1 is None) == (x2 is None)
    if x2 is not None:
        assert [sum(r[j] * x2[j] for j in range(n)) for r in rows] == rhs


@given(matrices(4, 4))
def test_consistent_systems_are_solved(mn):
    rows, n = mn
    x = [Fraction(j - 1) for j in range(n)]
    rhs = [sum(r[j] * x[j] for j in range(n)) for r in rows]
    y = solve(rows, rhs, n)
    assert y is not None and [sum(r[j] * y[j] for j in range(n)) for r in rows] == rhs


def test_fractions_are_exact():
    assert fstr(frac("6/4")) == "3/2"
    with pytest.raises(TypeError):
        frac(0.5)


def test_basis_coordinates_and_spans():
    labels = ["a", "b", "c"]
    B = Basis([{"a": Fraction(1), "b": Fraction(1)}, {"c": Fraction(2)}], labels)
    assert B.coords({"a": Fraction(3), "b": Fraction(3), "c": Fraction(1)}) == [3, Fraction(1, 2)]
    assert not B.contains({"a": Fraction(1)})
    assert len(span_basis([{"a": 1}, {"a": 2}, {"b": 1}], labels)) == 2
    meet = intersect_spans([{"a": 1}, {"b": 1}], [{"b": 1}, {"c": 1}], labels)
    assert len(meet) == 1 and Basis(meet, labels).contains({"b": 1})


def test_graded_space_shift_and_duplicates():
    V = GradedVectorSpace({0: ["x"], 1: ["y", "z"]})
    assert V.shift(1).degree("y") == 0 and V.dim(1) == 2
    with pytest.raises(ValueError):
        GradedVectorSpace({0: ["x"], 1: ["x"]})


# ------------------------------------------------------------ signs

def _adjacent_factorization_sign(images, degrees):
    """Brute force: every adjacent transposition swaps two neighbours."""
    word = list(images)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                if degrees[word[i] - 1] % 2 and degrees[word[i + 1] - 1] % 2:
                    sign = -sign
                word[i], word[i + 1] = word[i + 1], word[i]
                changed = True
    return sign


def test_three_cycle_sign():
    sigma = Permutation((2, 3, 1))
    t12, t23 = Permutation.transposition(3, 1, 2), Permutation.transposition(3, 2, 3)
    assert t12.compose(t23) == sigma or t23.compose(t12) == sigma
    # one swap of the two odd vectors, one swap involving the even one
    assert koszul_sign(sigma, [1, 1, 2]) == _adjacent_factorization_sign((2, 3, 1), [1, 1, 2]) == -1


@given(st.permutations(range(1, 6)), st.lists(st.integers(-2, 3), min_size=5, max_size=5))
def test_koszul_sign_brute_force(images, degrees):
    assert koszul_sign(Permutation(tuple(images)), degrees) == _adjacent_factorization_sign(images, degrees)


@given(st.permutations(range(1, 5)), st.permutations(range(1, 5)),
       st.lists(st.integers(0, 3), min_size=4, max_size=4))
def test_koszul_sign_is_multiplicative(a, b, degrees):
    s, t = Permutation(tuple(a)), Permutation(tuple(b))
    permuted = [degrees[s(i) - 1] for i in range(1, 5)]
    assert koszul_sign(s.compose(t), degrees) == koszul_sign(s, degrees) * koszul_sign(t, permuted)


def test_unshuffles_by_brute_force():
    us = unshuffles(2, 1)
    assert len(us) == 3
    brute = [p for p in permutations((1, 2, 3)) if p[0] < p[1]]
    assert sorted(u.images for u in us) == sorted(brute)


def test_symmetric_words_skip_repeated_odd_labels():
    V = GradedVectorSpace({0: ["x"], 1: ["y"]})
    assert list(sym_words(V, 2)) == [("x", "x"), ("x", "y")]
    assert sym_normalize(("y", "y"), V)[0] == 0
    assert sym_normalize(("y", "x"), V) == (1, ("x", "y"))


def test_decalage_of_differential_and_bracket():
    V = GradedVectorSpace({0: ["v"], 1: ["w"]})
    d = MultilinearMap(V, V, 1, 1, {("v",): {"w": Fraction(1)}})
    q1 = decalage(d, 1)
    assert q1.value(("v",)) == {"w": -1}
    br = MultilinearMap(V, V, 2, 0, {("v", "w"): {"w": Fraction(1)}, ("w", "v"): {"w": Fraction(-1)}})
    q2 = decalage(br, 1)
    # (−1)^{deg v}[v, w] with deg v = 0
    assert q2.value(("v", "w")) == {"w": 1}


# ------------------------------------------------------------ cohomology

def test_rank_one_complex_cohomology():
    V = GradedVectorSpace({0: ["w0", "w1"], 1: ["w2", "w3"]})
    d = GradedMap(V, V, 1, {"w0": {"w2": Fraction(1)}})
    H = cohomology(V, d)
    assert H.dims() == {0: 1, 1: 1} == cohomology_dims_by_rank(V, d)


def test_acyclic_complex():
    V = GradedVectorSpace({0: ["a"], 1: ["b"]})
    d = GradedMap(V, V, 1, {"a": {"b": Fraction(1)}})
    assert cohomology(V, d).dims() == {}


@st.composite
def complexes(draw):
    """d = A∘B style: pick d0 then d1 in the kernel-compatible form d1 = C·P with P·d0 = 0."""
    n0, n1, n2 = draw(st.integers(0, 3)), draw(st.integers(1, 3)), draw(st.integers(0, 3))
    V = GradedVectorSpace({0: [f"a{i}" for i in range(n0)], 1: [f"b{i}" for i in range(n1)],
                           2: [f"c{i}" for i in range(n2)]})
    d0 = draw(st.lists(st.lists(small, min_size=n0, max_size=n0), min_size=n1, max_size=n1))
    ker = nullspace([[d0[i][j] for i in range(n1)] for j in range(n0)], n1) if n0 else [
        [Fraction(int(i == j)) for i in range(n1)] for j in range(n1)]
    cols: dict = {}
    for j in range(n0):
        cols[f"a{j}"] = {f"b{i}": d0[i][j] for i in range(n1) if d0[i][j]}
    if ker and n2:
        coeffs = draw(st.lists(st.lists(small, min_size=len(ker), max_size=len(ker)), min_size=n2, max_size=n2))
        for i in range(n1):
            # d1 = Σ_k coeffs[r][k] · ker_k^T, so d1 ∘ d0 = 0
            cols[f"b{i}"] = {f"c{r}": sum(coeffs[r][k] * ker[k][i] for k in range(len(ker)))
                             for r in range(n2)}
    return V, GradedMap(V, V, 1, cols)


@given(complexes())
def test_cohomology_two_ways(Vd):
    V, d = Vd
    assert d.compose(d).is_zero()
    H = cohomology(V, d)
    assert H.dims() == cohomology_dims_by_rank(V, d)
    for n, reps in H.reps.items():
        for i, r in enumerate(reps):
            assert H.classify(r, n) == [int(i == j) for j in range(len(reps))]
