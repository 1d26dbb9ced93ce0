"""L∞-algebras as brackets q_k on V[1], their coderivation, and morphisms."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .exactalg import (
    CheckResult, GradedMap, GradedVectorSpace, MultilinearMap, Vec, decalage,
    koszul_sign, positions_sign, sym_normalize, sym_words, unshuffles, vacc,
    vclean,
)
from .dgla import Dgla

DEFAULT_ARITY_CAP = 6


class ArityCapError(ValueError):
    pass


@lru_cache(maxsize=None)
def _unshuffle_splits(n: int) -> tuple:
    """All (k, first, rest) index splits of range(n) with the unshuffle permutation."""
    out = []
    for k in range(1, n + 1):
        for s in unshuffles(k, n - k):
            idx = [i - 1 for i in s.images]
            out.append((k, tuple(idx[:k]), tuple(idx[k:]), s))
    return tuple(out)


@lru_cache(maxsize=None)
def set_partitions(n: int) -> tuple:
    """Set partitions of range(n), blocks sorted by their minimum."""
    if n == 0:
        return ((),)
    out = []
    for p in set_partitions(n - 1):
        for i in range(len(p)):
            out.append(tuple(b + (n - 1,) if j == i else b for j, b in enumerate(p)))
        out.append(p + ((n - 1,),))
    return tuple(tuple(sorted(p, key=lambda b: b[0])) for p in out)


class LInftyAlgebra:
    """Brackets q_k: ⊙ᵏ(V[1]) → V[1] of degree 1.

    ``fn(k, word)`` returns q_k on a canonical (sorted) basis word of V[1].
    Values are cached; ``vanishes_above`` marks q_k = 0 for larger k.
    """

    def __init__(self, V: GradedVectorSpace, fn: Callable[[int, tuple], Mapping],
                 arity_cap: int = DEFAULT_ARITY_CAP, vanishes_above: int | None = None,
                 name: str = ""):
        self.V = V
        self.susp = V.shift(1)
        self._fn = fn
        self.arity_cap = arity_cap
        self.vanishes_above = vanishes_above
        self.name = name
        self._cache: dict = {}
        self.vector_eval: Callable[[Sequence[Mapping]], Mapping] | None = None

    def sdeg(self, label: str) -> int:
        """Degree in V[1]."""
        return self.susp.degree(label)

    def q(self, k: int, word: Sequence[str]) -> Vec:
        """q_k on a basis word in any order (Koszul sign applied)."""
        if self.vanishes_above is not None and k > self.vanishes_above:
            return {}
        if k > self.arity_cap:
            raise ArityCapError(f"arity {k} exceeds cap {self.arity_cap}")
        sign, w = sym_normalize(word, self.susp)
        if sign == 0:
            return {}
        val = self._cache.get(w)
        if val is None:
            val = vclean(self._fn(k, w))
            self._cache[w] = val
        if sign == 1:
            return val
        return {a: -c for a, c in val.items()}

    def qv(self, vecs: Sequence[Mapping]) -> Vec:
        """q_k on vectors (a closed form if one is installed, else expansion)."""
        if self.vector_eval is not None and len(vecs) > 1:
            if self.vanishes_above is not None and len(vecs) > self.vanishes_above:
                return {}
            if len(vecs) > self.arity_cap:
                raise ArityCapError(f"arity {len(vecs)} exceeds cap {self.arity_cap}")
            out = self.vector_eval(vecs)
            if out is not None:
                return vclean(out)
        return self.qv_expanded(vecs)

    def qv_expanded(self, vecs: Sequence[Mapping]) -> Vec:
        """q_k on vectors, by multilinear expansion over basis words."""
        k = len(vecs)
        acc: dict = {}

        def rec(i, word, coeff):
            if i == k:
                v = self.q(k, word)
                if v:
                    vacc(acc, v, coeff)
                return
            for lab, c in vecs[i].items():
                rec(i + 1, word + (lab,), coeff * c)

        rec(0, (), Fraction(1))
        return acc

    def words(self, n: int):
        return sym_words(self.susp, n)


def from_brackets(V: GradedVectorSpace, tables: Mapping[int, MultilinearMap],
                  arity_cap: int = DEFAULT_ARITY_CAP, name: str = "") -> LInftyAlgebra:
    """L∞ algebra from per-arity structure constants on V[1] words."""
    top = max(tables) if tables else 0

    def fn(k, w):
        t = tables.get(k)
        return t.value(w) if t is not None else {}

    return LInftyAlgebra(V, fn, arity_cap, top, name)


def dgla_brackets(g: Dgla) -> dict:
    """q₁, q₂ as decalages (into V[1]) of d and [,]."""
    mu1 = MultilinearMap(g.space, g.space, 1, 1, {(a,): v for a, v in g.d.cols.items()})
    mu2 = MultilinearMap(g.space, g.space, 2, 0, dict(g.table))
    return {1: decalage(mu1, 1), 2: decalage(mu2, 1)}


def from_dgla(g: Dgla, arity_cap: int = DEFAULT_ARITY_CAP) -> LInftyAlgebra:
    """q₁(v) = −dv, q₂(v⊙w) = (−1)^{deg v}[v,w], q_k = 0 for k ≥ 3."""
    return from_brackets(g.space, dgla_brackets(g), arity_cap, name=g.name)


def check_symmetric(t: MultilinearMap) -> CheckResult:
    """q(…v_i, v_{i+1}…) = (−1)^{|v_i||v_{i+1}|} q(…v_{i+1}, v_i…) on stored entries."""
    S = t.source
    for w, v in t.entries.items():
        for i in range(len(w) - 1):
            sw = w[:i] + (w[i + 1], w[i]) + w[i + 2:]
            s = -1 if (S.degree(w[i]) * S.degree(w[i + 1])) % 2 else 1
            other = t.entries.get(sw, {})
            if vclean({k: v.get(k, 0) - s * other.get(k, 0) for k in set(v) | set(other)}):
                return CheckResult.failed("symmetry", w)
    return CheckResult.passed("symmetry")


def q_squared(V: LInftyAlgebra, word: Sequence[str]) -> Vec:
    """V[1]-component of Q² on v_1⊙…⊙v_n (basis labels)."""
    n = len(word)
    degs = [V.sdeg(w) for w in word]
    acc: dict = {}
    for k, first, rest, sigma in _unshuffle_splits(n):
        inner = V.q(k, [word[i] for i in first])
        if not inner:
            continue
        eps = koszul_sign(sigma, degs)
        tail = [word[i] for i in rest]
        for lab, c in inner.items():
            out = V.q(n - k + 1, [lab] + tail)
            if out:
                vacc(acc, out, eps * c)
    return acc


def check_linfty(V: LInftyAlgebra, max_arity: int, labels: Sequence[str] | None = None) -> CheckResult:
    """Q² = 0 on every basis word of ⊙ⁿ(V[1]), n ≤ max_arity."""
    if max_arity > V.arity_cap:
        raise ArityCapError(f"max_arity {max_arity} exceeds cap {V.arity_cap}")
    for n in range(1, max_arity + 1):
        for w in sym_words(V.susp, n, labels):
            tdeg = sum(V.sdeg(x) for x in w) + 2
            if not V.susp.dim(tdeg):
                continue
            val = q_squared(V, w)
            if val:
                return CheckResult.failed("linfty", w, f"Q^2 = {val}")
    return CheckResult.passed("linfty")


# ------------------------------------------------------------ morphisms

class LInftyMorphism:
    """Taylor coefficients f_n: ⊙ⁿ(V[1]) → W[1] of degree 0."""

    def __init__(self, source: LInftyAlgebra, target: LInftyAlgebra,
                 fn: Callable[[int, tuple], Mapping], arity_cap: int = DEFAULT_ARITY_CAP,
                 vanishes_above: int | None = None, name: str = ""):
        self.source = source
        self.target = target
        self._fn = fn
        self.arity_cap = arity_cap
        self.vanishes_above = vanishes_above
        self.name = name
        self._cache: dict = {}

    def f(self, n: int, word: Sequence[str]) -> Vec:
        if self.vanishes_above is not None and n > self.vanishes_above:
            return {}
        if n > self.arity_cap:
            raise ArityCapError(f"arity {n} exceeds cap {self.arity_cap}")
        sign, w = sym_normalize(word, self.source.susp)
        if sign == 0:
            return {}
        val = self._cache.get(w)
        if val is None:
            val = vclean(self._fn(n, w))
            self._cache[w] = val
        return val if sign == 1 else {a: -c for a, c in val.items()}

    def fv(self, vecs: Sequence[Mapping]) -> Vec:
        n = len(vecs)
        acc: dict = {}

        def rec(i, word, coeff):
            if i == n:
                v = self.f(n, word)
                if v:
                    vacc(acc, v, coeff)
                return
            for lab, c in vecs[i].items():
                rec(i + 1, word + (lab,), coeff * c)

        rec(0, (), Fraction(1))
        return acc

    def is_linear(self) -> bool:
        return self.vanishes_above is not None and self.vanishes_above <= 1


def linear_morphism(source: LInftyAlgebra, target: LInftyAlgebra, f1: GradedMap,
                    name: str = "") -> LInftyMorphism:
    """f₁ given on the shared labels of V and V[1]; f_n = 0 for n ≥ 2."""
    if f1.degree != 0:
        raise ValueError("a linear L∞ morphism has degree 0")
    return LInftyMorphism(source, target, lambda n, w: f1.cols.get(w[0], {}),
                          max(1, source.arity_cap), 1, name)


def identity_morphism(V: LInftyAlgebra) -> LInftyMorphism:
    return linear_morphism(V, V, GradedMap.identity(V.susp), "id")


def _partition_terms(word: Sequence[str], degs: Sequence[int]):
    """Yield (sign, blocks) over set partitions of the word."""
    n = len(word)
    for p in set_partitions(n):
        order = [i for b in p for i in b]
        yield positions_sign(order, degs), p


def morphism_defect(F: LInftyMorphism, word: Sequence[str]) -> Vec:
    """(F∘Q − Q'∘F) on a basis word, projected to W[1]."""
    src, tgt = F.source, F.target
    n = len(word)
    degs = [src.sdeg(w) for w in word]
    acc: dict = {}
    # F ∘ Q
    for k, first, rest, sigma in _unshuffle_splits(n):
        inner = src.q(k, [word[i] for i in first])
        if not inner:
            continue
        eps = koszul_sign(sigma, degs)
        tail = [word[i] for i in rest]
        for lab, c in inner.items():
            out = F.f(n - k + 1, [lab] + tail)
            if out:
                vacc(acc, out, eps * c)
    # Q' ∘ F
    for sign, blocks in _partition_terms(word, degs):
        vals = []
        for b in blocks:
            v = F.f(len(b), [word[i] for i in b])
            if not v:
                break
            vals.append(v)
        else:
            out = tgt.qv(vals)
            if out:
                vacc(acc, out, -sign)
    return acc


def check_morphism(F: LInftyMorphism, max_arity: int) -> CheckResult:
    """F commutes with the codifferentials on all basis words up to max_arity."""
    if max_arity > min(F.source.arity_cap, F.target.arity_cap):
        raise ArityCapError("max_arity exceeds an arity cap")
    for n in range(1, max_arity + 1):
        for w in F.source.words(n):
            tdeg = sum(F.source.sdeg(x) for x in w) + 1
            if not F.target.susp.dim(tdeg):
                continue
            val = morphism_defect(F, w)
            if val:
                return CheckResult.failed("morphism", w, f"defect {val}")
    return CheckResult.passed("morphism")


def check_linear_criterion(F: LInftyMorphism, max_arity: int) -> CheckResult:
    """p_n(f₁v₁⊙…⊙f₁vₙ) = f₁(q_n(v₁⊙…⊙vₙ)) for all n ≤ max_arity."""
    src, tgt = F.source, F.target
    for n in range(1, max_arity + 1):
        for w in src.words(n):
            lhs = tgt.qv([F.f(1, [x]) for x in w])
            rhs = F.fv([src.q(n, w)]) if n >= 1 else {}
            if vclean({k: lhs.get(k, 0) - rhs.get(k, 0) for k in set(lhs) | set(rhs)}):
                return CheckResult.failed("linear criterion", w)
    return CheckResult.passed("linear criterion")


def compose(G: LInftyMorphism, F: LInftyMorphism) -> LInftyMorphism:
    """G ∘ F as coalgebra maps, truncated at the smaller arity cap."""
    cap = min(G.arity_cap, F.arity_cap)

    def fn(n, w):
        degs = [F.source.sdeg(x) for x in w]
        acc: dict = {}
        for sign, blocks in _partition_terms(w, degs):
            vals = []
            for b in blocks:
                v = F.f(len(b), [w[i] for i in b])
                if not v:
                    break
                vals.append(v)
            else:
                out = G.fv(vals)
                if out:
                    vacc(acc, out, sign)
        return acc

    va = None
    if F.vanishes_above is not None and G.vanishes_above is not None:
        va = F.vanishes_above * G.vanishes_above
    return LInftyMorphism(F.source, G.target, fn, cap, va, f"{G.name}∘{F.name}")
