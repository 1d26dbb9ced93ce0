"""The suspended mapping cone of a DGLA morphism and its L∞ structure.

Labels of the cone are ``"L:<l>"`` and ``"M:<m>"``.  In C_χ[1] an element of
L keeps its label and drops one degree; an element of M keeps its M-degree.
Closed-form brackets are assembled on words of type ⊙ⁿM ⊗ L[1]; the
independent route evaluates nested binary trees in the path object H_χ.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import comb, factorial
from typing import Mapping, Sequence

from .artin import PolyForms
from .dgla import Dgla, DglaMorphism
from .exactalg import (
    CheckResult, GradedMap, GradedVectorSpace, Permutation, Vec, koszul_sign,
    positions_sign, sym_words, vacc, vclean, vscale,
)
from .linfty import DEFAULT_ARITY_CAP, LInftyAlgebra, LInftyMorphism, from_dgla


def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


# ------------------------------------------------------------- Bernoulli

def _poly_integrate(p: Sequence[Fraction]) -> list[Fraction]:
    """Antiderivative vanishing at 0; p[k] is the coefficient of t^k."""
    return [Fraction(0)] + [c / (k + 1) for k, c in enumerate(p)]


@dataclass
class BernoulliTable:
    """φ_n, I_n and B_n from the recursion φ₁ = t, φ_{n+1} = ∫₀ᵗφ_n − t·I_n."""

    values: list = field(default_factory=list)
    phi: list = field(default_factory=list)
    I: list = field(default_factory=list)

    @staticmethod
    def build(n: int) -> "BernoulliTable":
        phi = [None, [Fraction(0), Fraction(1)]]
        I = [None]
        for k in range(1, n + 1):
            Ik = sum(_poly_integrate(phi[k]))
            I.append(Ik)
            if k < n:
                nxt = _poly_integrate(phi[k])
                nxt[1] -= Ik
                phi.append(nxt)
        vals = [Fraction(1)] + [-factorial(k) * I[k] for k in range(1, n + 1)]
        return BernoulliTable(vals, phi, I)


@lru_cache(maxsize=None)
def _table(n: int) -> BernoulliTable:
    return BernoulliTable.build(n)


def bernoulli(n: int) -> Fraction:
    """B_n = −n!·I_n (n ≥ 1), B₀ = 1."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return _table(max(n, 1)).values[n]


def bernoulli_classical(n: int) -> Fraction:
    """Σ_{k=0}^{n} C(n+1,k) B_k = 0 for n ≥ 1."""
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, k) * B[k] for k in range(m)) / (m + 1))
    return B[n]


def bernoulli_series(n: int) -> Fraction:
    """Coefficient of xⁿ in x/(eˣ − 1) = 1 − x/2 + x²/12 − x⁴/720 + ⋯, i.e. B_n/n!."""
    return bernoulli(n) / factorial(n)


# ------------------------------------------------------------- the cone

def cone_space(L: Dgla, M: Dgla) -> GradedVectorSpace:
    """C_χ with C^i = L^i ⊕ M^{i−1}."""
    out: dict = {}
    for d in L.space.degrees():
        out.setdefault(d, []).extend("L:" + l for l in L.space.in_degree(d))
    for d in M.space.degrees():
        out.setdefault(d + 1, []).extend("M:" + m for m in M.space.in_degree(d))
    return GradedVectorSpace(out)


def cone_vec(l: Mapping | None = None, m: Mapping | None = None) -> Vec:
    out = {}
    for k, c in (l or {}).items():
        if c:
            out["L:" + k] = c
    for k, c in (m or {}).items():
        if c:
            out["M:" + k] = c
    return out


def cone_split(v: Mapping) -> tuple[Vec, Vec]:
    l, m = {}, {}
    for k, c in v.items():
        if k.startswith("L:"):
            l[k[2:]] = c
        else:
            m[k[2:]] = c
    return l, m


def nested_bracket_sum(M: Dgla, ms: Sequence[str], base: Mapping) -> Vec:
    """Σ_{σ∈S_n} ε(σ) [m_σ(1),[…[m_σ(n), base]…]] with ε for M-degrees."""
    n = len(ms)
    degs = [M.deg(m) for m in ms]
    acc: dict = {}
    for p in permutations(range(n)):
        eps = koszul_sign(Permutation(tuple(i + 1 for i in p)), degs)
        val = dict(base)
        for i in reversed(p):
            if not val:
                break
            val = M.bracket({ms[i]: Fraction(1)}, val)
        if val:
            vacc(acc, val, eps)
    return acc


def nested_bracket_vectors(M: Dgla, ms: Sequence[Mapping], degs: Sequence[int], base: Mapping) -> Vec:
    """nested_bracket_sum for homogeneous vectors m_i of M-degrees degs."""
    n = len(ms)
    acc: dict = {}
    for p in permutations(range(n)):
        eps = koszul_sign(Permutation(tuple(i + 1 for i in p)), degs)
        val = dict(base)
        for i in reversed(p):
            if not val:
                break
            val = M.bracket(ms[i], val)
        if val:
            vacc(acc, val, eps)
    return acc


class ConeAlgebra:
    """C_χ with its closed-form L∞ brackets.

    ``coefficients`` overrides B_n (for negative controls); ``half`` is the
    factor in ⟨m ⊙ l⟩₂ (½ unless deliberately perturbed).
    """

    def __init__(self, chi: DglaMorphism, arity_cap: int = DEFAULT_ARITY_CAP,
                 coefficients: Mapping[int, Fraction] | None = None, half: Fraction = Fraction(1, 2)):
        self.chi = chi
        self.L, self.M = chi.source, chi.target
        self.space = cone_space(self.L, self.M)
        self.arity_cap = arity_cap
        self._coef = dict(coefficients or {})
        self._half = Fraction(half)
        self.linf = LInftyAlgebra(self.space, self._bracket, arity_cap, None, f"C({chi.source.name}->{chi.target.name})")
        self.linf.vector_eval = self.bracket_vectors

    def B(self, n: int) -> Fraction:
        return self._coef.get(n, bernoulli(n))

    def differential(self) -> GradedMap:
        """δ(l,m) = (dl, χ(l) − dm) on C_χ."""
        cols = {}
        for lab in self.space.labels:
            l, m = cone_split({lab: Fraction(1)})
            dl = self.L.dif(l)
            dm = self.M.dif(m)
            chil = self.chi(l)
            cols[lab] = cone_vec(dl, {k: chil.get(k, 0) - dm.get(k, 0) for k in set(chil) | set(dm)})
        return GradedMap(self.space, self.space, 1, cols)

    def _bracket(self, k: int, word: tuple) -> Vec:
        if k == 1:
            l, m = cone_split({word[0]: Fraction(1)})
            dl = self.L.dif(l)
            chil = self.chi(l)
            dm = self.M.dif(m)
            return cone_vec(vscale(dl, -1), {x: dm.get(x, 0) - chil.get(x, 0) for x in set(chil) | set(dm)})
        ls = [i for i, w in enumerate(word) if w.startswith("L:")]
        mi = [i for i, w in enumerate(word) if w.startswith("M:")]
        if k == 2 and len(ls) == 2:
            a, b = word[0][2:], word[1][2:]
            return cone_vec(vscale(self.L.basis_bracket(a, b), _sgn(self.L.deg(a))))
        if len(ls) != 1:
            return {}
        # reorder to m_1 … m_n ⊙ l with the Koszul sign in C_χ[1]
        order = mi + ls
        sdegs = [self.linf.susp.degree(w) for w in word]
        sign = positions_sign(order, sdegs)
        ms = [word[i][2:] for i in mi]
        l = word[ls[0]][2:]
        chil = self.chi({l: Fraction(1)})
        n = len(ms)
        if n == 1:
            c = self._half * _sgn(self.M.deg(ms[0]) + 1)
            return cone_vec(None, vscale(self.M.bracket({ms[0]: Fraction(1)}, chil), sign * c))
        total = sum(self.M.deg(m) for m in ms)
        c = -_sgn(total) * self.B(n) / factorial(n)
        if c == 0:
            return {}
        return cone_vec(None, vscale(nested_bracket_sum(self.M, ms, chil), sign * c))


    def bracket_vectors(self, vecs: Sequence[Mapping]) -> Vec | None:
        """q_k (k ≥ 2) on vectors whose L- and M-parts are homogeneous.

        Same closed forms as on basis words, with brackets taken on whole
        vectors; returns None if some part is inhomogeneous.
        """
        parts = []
        for v in vecs:
            l, m = cone_split(v)
            dl = {self.L.deg(x) for x in l}
            dm = {self.M.deg(x) for x in m}
            if len(dl) > 1 or len(dm) > 1:
                return None
            parts.append((l, dl.pop() if dl else None, m, dm.pop() if dm else None))
        k = len(vecs)
        acc: dict = {}
        if k == 2 and all(p[0] for p in parts):
            (l1, d1, _, _), (l2, _, _, _) = parts
            vacc(acc, cone_vec(self.L.bracket(l1, l2)), _sgn(d1))
        for j, (l, dl, _, _) in enumerate(parts):
            if not l:
                continue
            others = [i for i in range(k) if i != j]
            if any(not parts[i][2] for i in others):
                continue
            sdegs = [dl - 1 if i == j else parts[i][3] for i in range(k)]
            sign = positions_sign(others + [j], sdegs)
            ms = [parts[i][2] for i in others]
            mdegs = [parts[i][3] for i in others]
            chil = self.chi(l)
            if not chil:
                continue
            n = len(ms)
            if n == 1:
                c = self._half * _sgn(mdegs[0] + 1)
                val = self.M.bracket(ms[0], chil)
            else:
                c = -_sgn(sum(mdegs)) * self.B(n) / factorial(n)
                if c == 0:
                    continue
                val = nested_bracket_vectors(self.M, ms, mdegs, chil)
            if val:
                vacc(acc, cone_vec(None, val), sign * c)
        return acc


def build_cone(chi: DglaMorphism, arity_cap: int = DEFAULT_ARITY_CAP, **kw) -> ConeAlgebra:
    r = chi.check()
    if not r.ok:
        raise ValueError(f"invalid DGLA morphism: {r.name} at {r.witness}")
    return ConeAlgebra(chi, arity_cap, **kw)


# ------------------------------------------------------------ path object

class PathObject:
    """H_χ ⊆ L × M[t,dt] with ι, π, K; elements are pairs (l, m-form)."""

    def __init__(self, chi: DglaMorphism, tcap: int):
        self.chi = chi
        self.L, self.M = chi.source, chi.target
        self.tcap = tcap
        M = self.M
        self.forms = PolyForms(M.deg, lambda m: M.dif({m: Fraction(1)}),
                               M.basis_bracket, tcap)
        self.cspace = cone_space(self.L, self.M)

    # membership and degrees
    def is_member(self, h) -> bool:
        l, m = h
        F = self.forms
        at0 = {k: c for k, c in m.items() if k[1] == 0 and k[0] == 0}
        return not at0 and vclean(F.evaluate(m, 1)) == vclean(self.chi(l))

    def hdegree(self, h) -> int | None:
        """Degree in H_χ (not suspended)."""
        l, m = h
        for k in l:
            return self.L.deg(k)
        for key in m:
            return self.forms.degree_of(key)
        return None

    def add(self, h1, h2, c=1):
        l = dict(h1[0]); vacc(l, h2[0], c)
        m = dict(h1[1]); vacc(m, h2[1], c)
        return l, m

    # the maps of the homotopy retraction
    def iota(self, gamma: Mapping):
        l, m = cone_split(gamma)
        F = self.forms
        form = F.const(self.chi(l), 1, 0)
        vacc(form, F.const(m, 0, 1))
        return l, form

    def pi(self, h) -> Vec:
        l, m = h
        return cone_vec(l, self.forms.integral(m))

    def K(self, h):
        _, m = h
        F = self.forms
        total = F.integral(m)
        out = F.const(total, 1, 0)
        vacc(out, F.integral_0t(m), -1)
        return {}, out

    def q1(self, h):
        l, m = h
        return vscale(self.L.dif(l), -1), vscale(self.forms.d(m), -1)

    def q2(self, h1, h2):
        deg = self.hdegree(h1)
        if deg is None or (not h2[0] and not h2[1]):
            return {}, {}
        s = _sgn(deg)
        l = vscale(self.L.bracket(h1[0], h2[0]), s)
        m = vscale(self.forms.bracket(h1[1], h2[1]), s)
        return l, m

    def spanning_set(self) -> list:
        """Elements spanning H_χ up to the t-degree cap."""
        F = self.forms
        out = []
        for l in self.L.labels:
            out.append(({l: Fraction(1)}, F.const(self.chi({l: Fraction(1)}), 1, 0)))
        for m in self.M.labels:
            for i in range(0, self.tcap):  # ∫₀ᵗ raises the degree by one
                out.append(({}, F.const({m: Fraction(1)}, i, 1)))
            for i in range(1, self.tcap):
                f = F.const({m: Fraction(1)}, i, 0)
                vacc(f, F.const({m: Fraction(1)}, i + 1, 0), -1)
                out.append(({}, f))
        return out

    def check_retraction(self) -> CheckResult:
        """πι = Id and Id − ιπ = Kq₁ + q₁K on a spanning set."""
        for lab in self.cspace.labels:
            if vclean(self.pi(self.iota({lab: Fraction(1)}))) != {lab: Fraction(1)}:
                return CheckResult.failed("pi iota", lab)
        for h in self.spanning_set():
            if not self.is_member(h):
                return CheckResult.failed("membership", h)
            lhs = self.add(h, self.iota(self.pi(h)), -1)
            rhs = self.add(self.K(self.q1(h)), self.q1(self.K(h)))
            if vclean(lhs[0]) != vclean(rhs[0]) or vclean(lhs[1]) != vclean(rhs[1]):
                return CheckResult.failed("homotopy identity", h)
        return CheckResult.passed("retraction")


def transfer_bracket_oracle(chi: DglaMorphism, n: int, tcap: int | None = None):
    """⟨γ₁⊙…⊙γ_n⟩_n by nested binary trees in H_χ.

    Returns a function of a word of cone labels.  The sum over S_n is
    organised by first-chosen element: the Koszul sign of a listing factors
    as (moving the chosen element to the front) × (sign of the rest).
    """
    if n < 1:
        raise ValueError("n ≥ 1")
    P = PathObject(chi, tcap if tcap is not None else n + 1)
    sdeg = lambda lab: P.cspace.degree(lab) - 1

    def evaluate(word: Sequence[str]) -> Vec:
        word = list(word)
        if len(word) != n:
            raise ValueError("arity mismatch")
        if n == 1:
            return P.pi(P.q1(P.iota({word[0]: Fraction(1)})))
        degs = [sdeg(w) for w in word]
        iotas = [P.iota({w: Fraction(1)}) for w in word]
        memo: dict = {}

        def front_sign(a, S):
            e = degs[a] * sum(degs[b] for b in S if b < a)
            return _sgn(e)

        def Y(S: tuple):
            if len(S) == 1:
                return iotas[S[0]]
            if S in memo:
                return memo[S]
            acc = ({}, {})
            for a in S:
                rest = tuple(b for b in S if b != a)
                inner = Y(rest)
                if not inner[0] and not inner[1]:
                    continue
                val = P.K(P.q2(iotas[a], inner))
                acc = P.add(acc, val, front_sign(a, S))
            memo[S] = acc
            return acc

        S = tuple(range(n))
        total = ({}, {})
        for a in S:
            rest = tuple(b for b in S if b != a)
            inner = Y(rest)
            total = P.add(total, P.q2(iotas[a], inner), front_sign(a, S))
        return vscale(P.pi(total), Fraction(_sgn(n - 2), 2))

    return evaluate


def compare_with_oracle(cone: ConeAlgebra, n: int, words=None) -> CheckResult:
    """Closed-form ⟨⟩_n against the transfer oracle on all basis words."""
    oracle = transfer_bracket_oracle(cone.chi, n)
    ws = words if words is not None else sym_words(cone.linf.susp, n)
    for w in ws:
        a = cone.linf.q(n, w)
        b = vclean(oracle(w))
        if vclean(a) != b:
            return CheckResult.failed("oracle", w, f"closed {a} oracle {b}")
    return CheckResult.passed("oracle")


# ------------------------------------------------------- Cartan homotopies

@dataclass(frozen=True)
class CartanHomotopyData:
    L: Dgla
    M: Dgla
    i: GradedMap  # degree −1, L → M

    def delta_i(self) -> GradedMap:
        """δi = d∘i + i∘d."""
        return self.M.d.compose(self.i) + self.i.compose(self.L.d)

    def delta_morphism(self) -> DglaMorphism:
        return DglaMorphism(self.L, self.M, self.delta_i())


def check_cartan(data: CartanHomotopyData) -> CheckResult:
    """i([a,b]) = [i a, δi b], [i a, i b] = 0, δi a DGLA morphism, and the symmetric form."""
    if data.i.degree != -1:
        return CheckResult.failed("cartan degree", None)
    L, M, i = data.L, data.M, data.i
    di = data.delta_i()
    for a in L.labels:
        ea = {a: Fraction(1)}
        for b in L.labels:
            eb = {b: Fraction(1)}
            iab = i.apply(L.basis_bracket(a, b))
            r1 = M.bracket(i.apply(ea), di.apply(eb))
            if vclean(iab) != vclean(r1):
                return CheckResult.failed("i[a,b] = [ia, δi b]", (a, b))
            if vclean(M.bracket(i.apply(ea), i.apply(eb))):
                return CheckResult.failed("[ia, ib] = 0", (a, b))
            half = dict(vscale(r1, Fraction(1, 2)))
            vacc(half, M.bracket(di.apply(ea), i.apply(eb)), Fraction(_sgn(L.deg(a)), 2))
            if vclean(half) != vclean(iab):
                return CheckResult.failed("symmetrised identity", (a, b))
    r = data.delta_morphism().check()
    if not r.ok:
        return CheckResult.failed("δi is a DGLA morphism", r.witness, r.name)
    return CheckResult.passed("cartan")


def tilde_i(data: CartanHomotopyData, cone: ConeAlgebra | None = None,
            check: bool = True) -> tuple[LInftyMorphism, ConeAlgebra]:
    """ĩ(a) = (a, i(a)) as a linear L∞ morphism L → C_{δi}."""
    if check:
        r = check_cartan(data)
        if not r.ok:
            raise ValueError(f"not a Cartan homotopy: {r.name} at {r.witness}")
    if cone is None:
        cone = ConeAlgebra(data.delta_morphism())
    src = from_dgla(data.L, cone.arity_cap)
    cols = {a: cone_vec({a: Fraction(1)}, data.i.apply({a: Fraction(1)})) for a in data.L.labels}
    f1 = GradedMap(src.susp, cone.linf.susp, 0, cols)
    from .linfty import linear_morphism
    return linear_morphism(src, cone.linf, f1, "tilde_i"), cone


def tensor_cartan(data: CartanHomotopyData, R) -> CartanHomotopyData:
    """i ⊗ Id_R on L ⊗ R → M ⊗ R for a DGCA R."""
    from .dgla import tensor_dgla, tensor_label
    LR, MR = tensor_dgla(data.L, R), tensor_dgla(data.M, R)
    cols = {}
    for a in data.L.labels:
        for r in R.space.labels:
            ia = data.i.apply({a: Fraction(1)})
            # (i ⊗ id)(a ⊗ r) = i(a) ⊗ r  (i sits to the left of a)
            cols[tensor_label(a, r)] = {tensor_label(m, r): c for m, c in ia.items()}
    return CartanHomotopyData(LR, MR, GradedMap(LR.space, MR.space, -1, cols))


def cone_tensor_linfty(cone: ConeAlgebra, R) -> LInftyAlgebra:
    """C_χ ⊗ R with brackets extended R-multilinearly (Koszul signs in C_χ[1])."""
    from .dgla import tensor_label, split_tensor_label
    V = cone.linf
    sp: dict = {}
    for lab in cone.space.labels:
        for r in R.space.labels:
            sp.setdefault(cone.space.degree(lab) + R.space.degree(r), []).append(tensor_label(lab, r))
    S = GradedVectorSpace(sp)
    sdeg = V.sdeg

    def fn(k, word):
        parts = [split_tensor_label(w) for w in word]
        vs = [p[0] for p in parts]
        rs = [p[1] for p in parts]
        acc: dict = {}
        if k == 1:
            v, r = vs[0], rs[0]
            for x, c in V.q(1, [v]).items():
                acc[tensor_label(x, r)] = acc.get(tensor_label(x, r), 0) + c
            s = _sgn(sdeg(v))
            for y, c in R.dif({r: Fraction(1)}).items():
                key = tensor_label(v, y)
                acc[key] = acc.get(key, 0) + s * c
            return vclean(acc)
        e = 0
        for i in range(k):
            for j in range(i + 1, k):
                e += R.space.degree(rs[i]) * sdeg(vs[j])
        prod = {rs[0]: Fraction(1)}
        for r in rs[1:]:
            prod = R.mul(prod, {r: Fraction(1)})
            if not prod:
                return {}
        val = V.q(k, vs)
        for x, c in val.items():
            for y, cy in prod.items():
                key = tensor_label(x, y)
                acc[key] = acc.get(key, 0) + _sgn(e) * c * cy
        return vclean(acc)

    return LInftyAlgebra(S, fn, cone.arity_cap, None, "C⊗R")
