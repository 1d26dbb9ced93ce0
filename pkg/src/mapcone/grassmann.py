"""Deformations of a subcomplex V ⊆ (W, d) and their cohomological shadow.

An element over A is a ∈ Hom⁰(W,W) ⊗ m_A such that e^a(V⊗A) is again a
subcomplex.  Equivalently e^{−a} ∗ 0 = e^{−a} d e^{a} − d preserves V, so
(e^{−a}∗0, a) is a Maurer-Cartan element of the cone of L_{V,W} ↪ L_W.

Submodules of X ⊗ A are stored as K-subspaces (A is finite over K) in
reduced echelon form, degree by degree, which makes equality canonical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .artin import (
    ONE, ArtinLocalAlgebra, Operator, SmallExtension, bch, bch_many, exp_action,
    exp_operator, gauge_action, log_unipotent, t_dif, t_map,
)
from .cone import ConeAlgebra, build_cone
from .dgla import (
    Complex, Dgla, DglaMorphism, SubcomplexPair, hom_apply, hom_dgla,
    preserving_subalgebra, quotient_basis,
)
from .exactalg import (
    Basis, CheckResult, GradedVectorSpace, cohomology, fstr, independent_subset,
    induced_map_ranks, intersect_spans, nullspace, rank, rref, solve, span_basis,
    vacc, vclean, vscale,
)
from .mcdef import (
    InternalInconsistency, McElement, OrbitProblem, gauge_equivalent,
    join_cone_element, random_mc, split_cone_element,
)


# ------------------------------------------------------------ submodules

def t_mul(A: ArtinLocalAlgebra, x: Mapping, b: str) -> dict:
    """x · b for a tensor dict x and a basis element b of A."""
    acc: dict = {}
    for (v, a), c in x.items():
        for m, cm in A.mul_basis(a, b).items():
            acc[(v, m)] = acc.get((v, m), 0) + c * cm
    return vclean(acc)


class Submodule:
    """An A-submodule of X ⊗ A for a graded space X, generated by homogeneous tensors."""

    def __init__(self, X: GradedVectorSpace, A: ArtinLocalAlgebra, gens: Sequence[Mapping]):
        self.X, self.A = X, A
        self.gens = [vclean(g) for g in gens if vclean(g)]
        by_deg: dict = {}
        for g in self.gens:
            degs = {X.degree(v) for (v, _) in g}
            if len(degs) != 1:
                raise ValueError("generators must be homogeneous")
            by_deg.setdefault(degs.pop(), []).append(g)
        self._rows: dict = {}
        for deg in X.degrees():
            amb = self.ambient(deg)
            vecs = [t_mul(A, g, b) for g in by_deg.get(deg, []) for b in A.labels]
            dense = [[v.get(k, Fraction(0)) for k in amb] for v in vecs]
            rows = rref(dense, len(amb))[0] if dense else []
            self._rows[deg] = [r for r in rows if any(r)]

    def ambient(self, deg: int) -> list:
        return [(x, a) for x in self.X.in_degree(deg) for a in self.A.labels]

    def degrees(self) -> list[int]:
        return [d for d in self.X.degrees() if self._rows.get(d)]

    def kbasis(self, deg: int) -> list[dict]:
        amb = self.ambient(deg)
        return [vclean(dict(zip(amb, r))) for r in self._rows.get(deg, [])]

    def dim(self, deg: int | None = None) -> int:
        if deg is None:
            return sum(len(r) for r in self._rows.values())
        return len(self._rows.get(deg, []))

    def canonical(self) -> tuple:
        return tuple((d, tuple(tuple(r) for r in self._rows[d])) for d in self.degrees())

    def __eq__(self, other) -> bool:
        return (isinstance(other, Submodule) and self.X == other.X
                and self.A.labels == other.A.labels and self.canonical() == other.canonical())

    def __hash__(self):
        return hash(self.canonical())

    def contains(self, v: Mapping) -> bool:
        v = vclean(v)
        if not v:
            return True
        degs = {self.X.degree(x) for (x, _) in v}
        for deg in degs:
            part = {k: c for k, c in v.items() if self.X.degree(k[0]) == deg}
            if not Basis(self.kbasis(deg), self.ambient(deg)).contains(part):
                return False
        return True

    def contains_module(self, other: "Submodule") -> bool:
        return all(self.contains(v) for d in other.degrees() for v in other.kbasis(d))

    def reduction(self, deg: int) -> list[dict]:
        """Basis of the image of the submodule under A → K (the ONE-coefficients)."""
        vecs = [{x: c for (x, a), c in v.items() if a == ONE} for v in self.kbasis(deg)]
        return span_basis([v for v in vecs if v], self.X.in_degree(deg))

    def mdim(self, deg: int) -> int:
        """dim of m_A · S in degree deg."""
        m = list(self.A.basis)
        vecs = [t_mul(self.A, v, b) for v in self.kbasis(deg) for b in m]
        amb = self.ambient(deg)
        return rank([[v.get(k, Fraction(0)) for k in amb] for v in vecs], len(amb)) if vecs else 0

    def is_free(self) -> bool:
        n = len(self.A.labels)
        return all(self.dim(d) == (self.dim(d) - self.mdim(d)) * n for d in self.X.degrees())

    def rank_by_degree(self) -> dict:
        return {d: self.dim(d) - self.mdim(d) for d in self.degrees()}

    def generator_strings(self) -> dict:
        """Reduced basis as {degree: [[label, alabel, "p/q"], ...]}."""
        out = {}
        for d in self.degrees():
            out[str(d)] = [[[x, a, fstr(c)] for (x, a), c in sorted(v.items())] for v in self.kbasis(d)]
        return out


def module_image(op: Operator, vecs: Mapping, A: ArtinLocalAlgebra) -> list[dict]:
    """op(v ⊗ 1) for every basis vector v of a subspace given per degree."""
    out = []
    for deg in sorted(vecs):
        for v in vecs[deg]:
            out.append(op.apply({(x, ONE): c for x, c in v.items()}))
    return out


def dif_tensor(W: Complex, x: Mapping) -> dict:
    """(d ⊗ 1)(x) on W ⊗ A."""
    acc: dict = {}
    for (v, a), c in x.items():
        for u, cu in W.d.apply({v: Fraction(1)}).items():
            acc[(u, a)] = acc.get((u, a), 0) + c * cu
    return vclean(acc)


# ------------------------------------------------------------------ setup

class GrassSetup:
    """The data attached to V ⊆ W: L_W, L_{V,W}, cohomology and the inclusion test."""

    def __init__(self, pair: SubcomplexPair):
        r = pair.check()
        if not r.ok:
            raise ValueError(f"invalid subcomplex pair: {r.name}")
        self.pair = pair
        self.W = pair.W
        self.V = {d: [vclean(v) for v in vs] for d, vs in pair.V.items() if vs}
        self.LW = hom_dgla(self.W.space, self.W.d, "L_W")
        self.LVW, self.inc = preserving_subalgebra(pair)
        self.HW = cohomology(self.W.space, self.W.d)
        self.Vc, self.vin = pair.sub_complex()
        self.HV = cohomology(self.Vc.space, self.Vc.d)
        self._cones: dict = {}
        self._harmonic_alg: dict = {}

    # cohomology bookkeeping
    @cached_property
    def injective(self) -> bool:
        ranks = induced_map_ranks(self.vin, self.HV, self.HW)
        return all(ranks.get(n, 0) == self.HV.dim(n) for n in self.HV.space.degrees())

    def require_injective(self):
        if not self.injective:
            raise ValueError("H*(V) → H*(W) is not injective")

    @cached_property
    def hspace(self) -> GradedVectorSpace:
        return GradedVectorSpace({n: [f"H{n}.{i}" for i in range(self.HW.dim(n))]
                                  for n in self.W.space.degrees() if self.HW.dim(n)})

    def classify(self, z: Mapping, n: int) -> dict:
        """Class of a W-cocycle of degree n in H*(W) coordinates."""
        if not vclean(z):
            return {}
        c = self.HW.classify(z, n)
        return vclean({f"H{n}.{i}": x for i, x in enumerate(c)})

    def classify_tensor(self, z: Mapping) -> dict:
        """Class of a d-cocycle of W ⊗ A in H*(W) ⊗ A."""
        by_a: dict = {}
        for (v, a), c in z.items():
            by_a.setdefault(a, {})[v] = c
        out: dict = {}
        for a, vec in by_a.items():
            n = self.W.space.vec_degree(vec)
            for h, c in self.classify(vec, n).items():
                out[(h, a)] = c
        return vclean(out)

    def h_of_v(self, A: ArtinLocalAlgebra) -> Submodule:
        """Image of H*(V) in H*(W), tensored with A."""
        gens = []
        for n in self.HV.space.degrees():
            for r in self.HV.reps.get(n, []):
                z = self.vin.apply(r)
                gens.append({(h, ONE): c for h, c in self.classify(z, n).items()})
        return Submodule(self.hspace, A, gens)

    # L_{V,W} membership
    def preserves_v(self, f: Mapping) -> bool:
        """f(V) ⊆ V for f ∈ Hom*(W,W) homogeneous."""
        for deg, vecs in self.V.items():
            for v in vecs:
                fv = hom_apply(f, v)
                if not fv:
                    continue
                tdeg = self.W.space.vec_degree(fv)
                if not Basis(self.V.get(tdeg, []), self.W.space.in_degree(tdeg)).contains(fv):
                    return False
        return True

    def lvw_coords(self, x: Mapping, deg: int) -> dict | None:
        """Coordinates in L_{V,W} of a tensor over Hom^deg ⊗ A, or None."""
        labs = self.LVW.space.in_degree(deg)
        B = Basis([self.inc.map.apply({p: Fraction(1)}) for p in labs], self.LW.space.in_degree(deg))
        by_a: dict = {}
        for (f, a), c in x.items():
            by_a.setdefault(a, {})[f] = c
        out: dict = {}
        for a, vec in by_a.items():
            c = B.coords(vec)
            if c is None:
                return None
            for p, y in zip(labs, c):
                if y:
                    out[(p, a)] = y
        return out

    def cone(self, arity_cap: int = 8) -> ConeAlgebra:
        if arity_cap not in self._cones:
            self._cones[arity_cap] = build_cone(self.inc, arity_cap)
        return self._cones[arity_cap]


# --------------------------------------------------------------- elements

@dataclass
class GrassElement:
    setup: GrassSetup
    A: ArtinLocalAlgebra
    a: dict
    submodule: Submodule
    defect: dict = field(default_factory=dict)  # e^{−a} ∗ 0, a tensor over Hom¹

    def cone_element(self, arity_cap: int = 8) -> McElement:
        st = self.setup
        x = st.lvw_coords(self.defect, 1)
        if x is None:
            raise InternalInconsistency("defect left L_{V,W} after membership passed")
        return McElement(st.cone(arity_cap), self.A, join_cone_element(x, self.a))


class NotMaurerCartan(ValueError):
    pass


def _check_hom0(setup: GrassSetup, A: ArtinLocalAlgebra, a: Mapping):
    for (f, al), c in a.items():
        if al == ONE:
            raise ValueError("a must have coefficients in the maximal ideal")
        if setup.LW.space.degree(f) != 0:
            raise ValueError("a must have degree 0")


def mc_defect(setup: GrassSetup, A: ArtinLocalAlgebra, a: Mapping) -> dict:
    """e^{−a} ∗ 0 in Hom¹(W,W) ⊗ m_A, by the gauge formula."""
    return vclean(gauge_action(setup.LW, A, vscale(a, -1), {}))


def conjugated_differential(setup: GrassSetup, A: ArtinLocalAlgebra, a: Mapping) -> dict:
    """e^{−a} d e^{a} − d by operator composition."""
    W = setup.W.space
    e = exp_action(W, A, a)
    einv = exp_action(W, A, vscale(a, -1))
    d = Operator(W, A, {w: {(u, ONE): c for u, c in setup.W.d.apply({w: Fraction(1)}).items()}
                        for w in W.labels})
    return (einv.compose(d).compose(e) + d.scale(-1)).to_hom()


def membership_by_defect(setup: GrassSetup, A: ArtinLocalAlgebra, a: Mapping) -> bool:
    x = mc_defect(setup, A, a)
    by_a: dict = {}
    for (f, al), c in x.items():
        by_a.setdefault(al, {})[f] = c
    return all(setup.preserves_v(f) for f in by_a.values())


def grass_submodule(setup: GrassSetup, A: ArtinLocalAlgebra, a: Mapping) -> Submodule:
    return Submodule(setup.W.space, A, module_image(exp_action(setup.W.space, A, a), setup.V, A))


def membership_by_submodule(setup: GrassSetup, A: ArtinLocalAlgebra, a: Mapping,
                            S: Submodule | None = None) -> bool:
    S = S or grass_submodule(setup, A, a)
    return all(S.contains(dif_tensor(setup.W, v)) for d in S.degrees() for v in S.kbasis(d))


def mc_to_grass(setup: GrassSetup, A: ArtinLocalAlgebra, a: Mapping) -> GrassElement:
    """Check both forms of the condition on e^a and return the element.

    Raises NotMaurerCartan if both fail and InternalInconsistency if they
    disagree.
    """
    a = vclean(a)
    _check_hom0(setup, A, a)
    defect = mc_defect(setup, A, a)
    if defect != conjugated_differential(setup, A, a):
        raise InternalInconsistency("e^{-a}*0 differs from e^{-a} d e^{a} - d")
    S = grass_submodule(setup, A, a)
    m1 = membership_by_defect(setup, A, a)
    m2 = membership_by_submodule(setup, A, a, S)
    if m1 != m2:
        raise InternalInconsistency("the two membership tests disagree")
    if not m1:
        raise NotMaurerCartan("e^a(V⊗A) is not a subcomplex")
    if not S.is_free():
        raise InternalInconsistency("e^a(V⊗A) is not free")
    return GrassElement(setup, A, a, S, defect)


def gauge_to_group(elem: GrassElement, l: Mapping, m: Mapping) -> GrassElement:
    """(e^l, e^{dm}) ∗ e^a = e^{dm} e^a e^{−l}, computed by composing operators."""
    st, A = elem.setup, elem.A
    l, m = vclean(l), vclean(m)
    for (f, al), _ in l.items():
        if st.LW.space.degree(f) != 0 or al == ONE:
            raise ValueError("l must lie in L⁰_{V,W} ⊗ m_A")
    for (f, al), _ in m.items():
        if st.LW.space.degree(f) != -1 or al == ONE:
            raise ValueError("m must lie in Hom⁻¹(W,W) ⊗ m_A")
    if st.lvw_coords(l, 0) is None:
        raise ValueError("l does not preserve V")
    W = st.W.space
    dm = t_dif(st.LW, m)
    op = exp_action(W, A, dm).compose(exp_action(W, A, elem.a)).compose(exp_action(W, A, vscale(l, -1)))
    new = log_unipotent(op).to_hom()
    if new != vclean(bch_many(st.LW, A, dm, elem.a, vscale(l, -1))):
        raise InternalInconsistency("operator product and BCH disagree")
    out = mc_to_grass(st, A, new)
    if out.submodule != Submodule(W, A, [exp_action(W, A, dm).apply(v) for d in elem.submodule.degrees()
                                        for v in elem.submodule.kbasis(d)]):
        raise InternalInconsistency("e^l changed the submodule")
    return out


# ---------------------------------------------------- cohomology transform

def cohomology_transform(elem: GrassElement) -> Submodule:
    """Image of H*(e^a(V⊗A), d) in H*(W) ⊗ A.

    Cycles of (V⊗A, d_a) with d_a = e^{−a} d e^{a} are pushed by e^a and
    classified in H*(W) ⊗ A.
    """
    st, A = elem.setup, elem.A
    st.require_injective()
    W = st.W.space
    e = exp_action(W, A, elem.a)
    einv = exp_action(W, A, vscale(elem.a, -1))
    gens = []
    for deg in sorted(st.V):
        src = [{(x, b): c for x, c in v.items()} for v in st.V[deg] for b in A.labels]
        images = [einv.apply(dif_tensor(st.W, e.apply(s))) for s in src]
        tgt = Submodule(W, A, [{(x, ONE): c for x, c in v.items()} for v in st.V.get(deg + 1, [])])
        if any(not tgt.contains(im) for im in images):
            raise InternalInconsistency("d_a does not preserve V ⊗ A")
        amb = [(x, b) for x in W.in_degree(deg + 1) for b in A.labels]
        rows = [[im.get(k, Fraction(0)) for im in images] for k in amb]
        ker = nullspace(rows, len(src)) if amb else [[Fraction(int(i == j)) for j in range(len(src))]
                                                      for i in range(len(src))]
        for x in ker:
            z: dict = {}
            for c, s in zip(x, src):
                if c:
                    vacc(z, s, c)
            z = e.apply(vclean(z))
            if dif_tensor(st.W, z):
                raise InternalInconsistency("pushed cycle is not closed")
            gens.append(st.classify_tensor(z))
    out = Submodule(st.hspace, A, gens)
    if not out.is_free() or out.rank_by_degree() != {n: st.HV.dim(n) for n in st.HV.space.degrees()
                                                     if st.HV.dim(n)}:
        raise InternalInconsistency("cohomology transform is not a free lift of H*(V)")
    return out


# -------------------------------------------------- harmonic representatives

@dataclass
class HarmonicSplitting:
    HW: dict  # degree -> basis of ℋ_W
    HV: dict  # degree -> basis of ℋ_V = ℋ_W ∩ V

    def pair(self, W: Complex) -> SubcomplexPair:
        return SubcomplexPair(W, {d: v for d, v in self.HW.items() if v})


def harmonic_split(setup: GrassSetup) -> HarmonicSplitting:
    """ℋ_W ⊆ Z(W) with ℋ_W ⊕ B(W) = Z(W) and (ℋ_W ∩ V) ⊕ B(V) = Z(V)."""
    setup.require_injective()
    W, HW = setup.W, setup.HW
    hw, hv = {}, {}
    for n in W.space.degrees():
        labs = list(W.space.in_degree(n))
        V = setup.V.get(n, [])
        ZW, BW = HW.cocycles.get(n, []), HW.boundaries.get(n, [])
        ZV = [setup.vin.apply(z) for z in setup.HV.cocycles.get(n, [])]
        BV = [setup.vin.apply(b) for b in setup.HV.boundaries.get(n, [])]
        if len(intersect_spans(V, ZW, labs)) != len(span_basis(ZV, labs)):
            raise ValueError("Z(V) ≠ V ∩ Z(W)")
        if len(intersect_spans(V, BW, labs)) != len(span_basis(BV, labs)):
            raise ValueError("B(V) ≠ V ∩ B(W)")
        dense = lambda vs: [[v.get(l, Fraction(0)) for l in labs] for v in vs]
        keep = independent_subset(dense(BV + ZV), len(labs))
        hv_n = [ZV[i - len(BV)] for i in keep if i >= len(BV)]
        base = BW + hv_n
        keep = independent_subset(dense(base + ZW), len(labs))
        hw_n = hv_n + [ZW[i - len(base)] for i in keep if i >= len(base)]
        if len(hw_n) != HW.dim(n):
            raise InternalInconsistency("harmonic complement has the wrong size")
        if len(intersect_spans(hw_n, V, labs)) != len(hv_n):
            raise InternalInconsistency("ℋ_W ∩ V is larger than ℋ_V")
        if hw_n:
            hw[n] = hw_n
        if hv_n:
            hv[n] = hv_n
    return HarmonicSplitting(hw, hv)


# ------------------------------------------------- classical normalization

@dataclass
class ClassicalForm:
    alpha: dict  # preserves ℋ_W
    m: dict  # e^α(V⊗A) = e^{dm} e^a(V⊗A)
    harmonic: Submodule  # e^α(ℋ_V ⊗ A) ⊆ ℋ_W ⊗ A
    classes: Submodule  # the same read in H*(W) ⊗ A


def _sub_basis(dg: Dgla, inc: DglaMorphism | None, deg: int) -> list[dict]:
    if inc is None:
        return [{l: Fraction(1)} for l in dg.space.in_degree(deg)]
    return [inc.map.apply({p: Fraction(1)}) for p in inc.source.space.in_degree(deg)]


def grass_to_classical(elem: GrassElement, split: HarmonicSplitting | None = None,
                       rng=None) -> ClassicalForm:
    """Normalize e^a so that it preserves ℋ_W ⊗ A and read off e^α(ℋ_V ⊗ A).

    Weight by weight, writes the weight-(k+1) part y of log(e^{−α} e^{dm} e^{a})
    as δα − dδm + δl with δα preserving ℋ_W and δl preserving V, then updates
    α and m.  With ``rng`` a random solution is chosen at every stage instead
    of the minimal one.
    """
    st, A = elem.setup, elem.A
    split = split or harmonic_split(st)
    W = st.W.space
    LW = st.LW
    key = repr(sorted((d, [sorted(v.items()) for v in vs]) for d, vs in split.HW.items()))
    if key not in st._harmonic_alg:
        st._harmonic_alg[key] = preserving_subalgebra(split.pair(st.W))
    LZW, zinc = st._harmonic_alg[key]
    h0 = list(LW.space.in_degree(0))
    gens = ([("alpha", v) for v in _sub_basis(LZW, zinc, 0)]
            + [("m", {f: Fraction(1)}) for f in LW.space.in_degree(-1)]
            + [("l", v) for v in _sub_basis(st.LVW, st.inc, 0)])
    images = []
    for kind, v in gens:
        if kind == "alpha":
            images.append(v)
        elif kind == "m":
            images.append(vscale(LW.dif(v), -1))
        else:
            images.append(v)
    rows = [[im.get(f, Fraction(0)) for im in images] for f in h0]
    kernel = nullspace(rows, len(gens)) if rows else []
    alpha: dict = {}
    m: dict = {}
    for k in range(A.max_weight()):
        F = (exp_action(W, A, vscale(alpha, -1)).compose(exp_action(W, A, t_dif(LW, m)))
             .compose(exp_action(W, A, elem.a)))
        y = log_unipotent(F).to_hom()
        for b in [b for b in A.basis if A.weight(b) == k + 1]:
            yb = {f: c for (f, al), c in y.items() if al == b}
            sol = solve(rows, [yb.get(f, Fraction(0)) for f in h0], len(gens))
            if sol is None:
                raise InternalInconsistency(f"normalization system inconsistent at weight {k + 1}")
            sol = list(sol)
            if rng is not None:
                for kv in kernel:
                    c = rng.randint(-2, 2)
                    sol = [s + c * x for s, x in zip(sol, kv)]
            for c, (kind, v) in zip(sol, gens):
                if not c or kind == "l":
                    continue
                vacc(alpha if kind == "alpha" else m, {(f, b): x for f, x in v.items()}, c)
        alpha, m = vclean(alpha), vclean(m)
    ea = exp_action(W, A, alpha)
    target = Submodule(W, A, module_image(exp_action(W, A, t_dif(LW, m)).compose(exp_action(W, A, elem.a)),
                                          st.V, A))
    if Submodule(W, A, module_image(ea, st.V, A)) != target:
        raise InternalInconsistency("normalized element moved the submodule")
    harm_w = Submodule(W, A, [{(x, ONE): c for x, c in v.items()} for vs in split.HW.values() for v in vs])
    moved = module_image(ea, split.HW, A)
    if not all(harm_w.contains(v) for v in moved):
        raise InternalInconsistency("normalized element does not preserve ℋ_W ⊗ A")
    hv_img = module_image(ea, split.HV, A)
    harmonic = Submodule(W, A, hv_img)
    classes = Submodule(st.hspace, A, [st.classify_tensor(v) for v in hv_img])
    return ClassicalForm(alpha, m, harmonic, classes)


def compare_routes(elem: GrassElement, rng=None) -> CheckResult:
    """cohomology_transform against the harmonic normalization."""
    a = cohomology_transform(elem)
    b = grass_to_classical(elem, rng=rng).classes
    if a != b:
        return CheckResult.failed("two routes", {"transform": a.generator_strings(),
                                                 "classical": b.generator_strings()})
    return CheckResult.passed("two routes")


# ------------------------------------------------------------- tangents

def tangent_dimension_direct(setup: GrassSetup) -> int:
    """Over K[ε]: {a : δa preserves V} modulo L⁰_{V,W} + B⁰(Hom)."""
    LW = setup.LW
    h0, h1 = list(LW.space.in_degree(0)), list(LW.space.in_degree(1))
    p1 = _sub_basis(setup.LVW, setup.inc, 1)
    cols = [LW.dif({f: Fraction(1)}) for f in h0] + [vscale(p, -1) for p in p1]
    rows = [[c.get(g, Fraction(0)) for c in cols] for g in h1]
    if rows:
        ns = nullspace(rows, len(cols))
    else:
        ns = [[Fraction(int(i == j)) for j in range(len(cols))] for i in range(len(cols))]
    admissible = [vclean(dict(zip(h0, x[: len(h0)]))) for x in ns]
    adm = len(span_basis([v for v in admissible if v], h0))
    trivial = _sub_basis(setup.LVW, setup.inc, 0) + [LW.dif({f: Fraction(1)}) for f in LW.space.in_degree(-1)]
    triv = len(span_basis([v for v in trivial if v], h0))
    return adm - triv


def tangent_dimension_formula(setup: GrassSetup) -> int:
    """Σ_i dim Hom(H^i V, H^i W / H^i V)."""
    setup.require_injective()
    return sum(setup.HV.dim(n) * (setup.HW.dim(n) - setup.HV.dim(n)) for n in setup.W.space.degrees())


def tangent_dimension_cone(setup: GrassSetup) -> int:
    cone = setup.cone()
    return cohomology(cone.space, cone.differential()).dim(1)


def first_order_element(setup: GrassSetup, f: Mapping) -> Mapping:
    """f ⊗ ε as an element over the dual numbers."""
    return {(k, "e"): c for k, c in f.items()}


# ------------------------------------------------- equality modulo Aut⁰

class GraphChart:
    """Coordinates of a free lift S of V in W ⊗ A as the graph of V ⊗ A → Q ⊗ m_A."""

    def __init__(self, X: GradedVectorSpace, V: Mapping):
        self.X = X
        self.V = {d: vs for d, vs in V.items() if vs}
        self.Q = quotient_basis(X, self.V)
        self.bases = {}
        for d in X.degrees():
            vs = self.V.get(d, [])
            self.bases[d] = Basis(list(vs) + [{q: Fraction(1)} for q in self.Q.get(d, [])], X.in_degree(d))

    def split(self, x: Mapping) -> tuple[dict, dict]:
        """(V-coordinates keyed (d, j, a), Q-part keyed (q, a)) of a homogeneous tensor."""
        vpart, qpart = {}, {}
        by_a: dict = {}
        for (v, a), c in x.items():
            by_a.setdefault(a, {})[v] = c
        for a, vec in by_a.items():
            d = self.X.vec_degree(vec)
            c = self.bases[d].coords(vec)
            nv = len(self.V.get(d, []))
            for j in range(nv):
                if c[j]:
                    vpart[(d, j, a)] = c[j]
            for q, y in zip(self.Q.get(d, []), c[nv:]):
                if y:
                    qpart[(q, a)] = y
        return vpart, qpart

    def coordinates(self, S: Submodule) -> dict:
        A = S.A
        out: dict = {}
        for d, vs in self.V.items():
            kb = S.kbasis(d)
            splits = [self.split(v) for v in kb]
            keys = sorted({k for vp, _ in splits for k in vp}, key=str)
            for j in range(len(vs)):
                want = {(d, j, ONE): Fraction(1)}
                keys_j = sorted(set(keys) | set(want), key=str)
                rows = [[vp.get(k, Fraction(0)) for vp, _ in splits] for k in keys_j]
                sol = solve(rows, [want.get(k, Fraction(0)) for k in keys_j], len(kb))
                if sol is None:
                    raise ValueError("submodule is not a lift of V")
                for c, (_, qp) in zip(sol, splits):
                    if c:
                        for (q, a), y in qp.items():
                            key = (f"{q}|{d}.{j}", a)
                            out[key] = out.get(key, 0) + c * y
        return vclean(out)


def equal_mod_aut0(e0: GrassElement, e1: GrassElement):
    """m with e^{dm}(S₀) = S₁, or None (certified weight by weight)."""
    st, A = e0.setup, e0.A
    W, LW = st.W.space, st.LW
    chart = GraphChart(W, st.V)
    labs = list(LW.space.in_degree(-1))
    targets = list(LW.space.in_degree(0))
    cols = [LW.dif({v: Fraction(1)}) for v in labs]
    rows = [[c.get(t, Fraction(0)) for t in targets] for c in cols]
    keep = independent_subset(rows, len(targets)) if labs else []
    nlabs = [labs[i] for i in keep]
    dimg = [cols[i] for i in keep]

    def nu_from_exact(b):
        out: dict = {}
        by_a: dict = {}
        for (v, a), c in b.items():
            by_a.setdefault(a, {})[v] = c
        mat = [[img.get(t, Fraction(0)) for img in dimg] for t in targets]
        for a, vec in by_a.items():
            sol = solve(mat, [vec.get(t, Fraction(0)) for t in targets], len(dimg))
            if sol is None:
                raise InternalInconsistency("BCH of exact elements is not exact")
            for c, v in zip(sol, nlabs):
                if c:
                    out[(v, a)] = c
        return out

    S0 = e0.submodule
    gens0 = [v for d in S0.degrees() for v in S0.kbasis(d)]

    def act(nu):
        op = exp_action(W, A, t_dif(LW, nu))
        return chart.coordinates(Submodule(W, A, [op.apply(v) for v in gens0]))

    def compose(p, q):
        return nu_from_exact(bch(LW, A, t_dif(LW, p), t_dif(LW, q)))

    dirs = [({(v, a): Fraction(1)}, A.weight(a)) for v in nlabs for a in A.basis if a != ONE]
    prob = OrbitProblem(A, dirs, act, compose, chart.coordinates(S0), chart.coordinates(e1.submodule))
    nu, cert = prob.solve()
    if nu is None:
        return None
    if act(nu) != chart.coordinates(e1.submodule):
        raise InternalInconsistency("Aut⁰ witness fails validation")
    return nu


def gauge_equivalent_grass(e0: GrassElement, e1: GrassElement):
    """Gauge equivalence of the corresponding cone Maurer-Cartan elements."""
    n = e0.A.nilpotency + 1
    return gauge_equivalent(e0.cone_element(max(8, n)), e1.cone_element(max(8, n)))


# ------------------------------------------------------------- sampling

def random_hom0(setup: GrassSetup, A: ArtinLocalAlgebra, rng, density: float = 0.3, span: int = 2) -> dict:
    out = {}
    for f in setup.LW.space.in_degree(0):
        for b in A.basis:
            if b != ONE and rng.random() < density:
                c = rng.randint(-span, span)
                if c:
                    out[(f, b)] = Fraction(c)
    return out


def random_grass(setup: GrassSetup, A: ArtinLocalAlgebra, rng, density: float = 0.5) -> GrassElement | None:
    """A random element, from a random MC element of the cone."""
    g = random_mc(setup.cone(max(8, A.nilpotency + 1)), A, rng, density)
    if g is None:
        return None
    _, a = split_cone_element(g.value)
    return mc_to_grass(setup, A, a)


def classical_lift(sub: Submodule, chart: GraphChart, ext: SmallExtension) -> Submodule:
    """Lift a free lift of V over ext.small to ext.big by lifting graph coordinates.

    The classical Grassmann functor has no obstructions: any coefficient
    lift of the graph map is again a graph.
    """
    coords = chart.coordinates(sub)
    pre: dict = {}
    for b in ext.big.basis:
        img = ext.proj.get(b, {})
        if len(img) == 1:
            (a, c), = img.items()
            pre.setdefault(a, (b, c))
    gens = []
    for d, vs in chart.V.items():
        for j, v in enumerate(vs):
            g = {(x, ONE): c for x, c in v.items()}
            for (key, a), y in coords.items():
                q, idx = key.split("|")
                if idx == f"{d}.{j}":
                    b, cb = pre[a]
                    g[(q, b)] = g.get((q, b), 0) + y / cb
            gens.append(g)
    out = Submodule(sub.X, ext.big, gens)
    proj = [ext_project(ext, v) for dd in out.degrees() for v in out.kbasis(dd)]
    if Submodule(sub.X, ext.small, proj) != sub:
        raise InternalInconsistency("classical lift does not reduce to the input")
    return out


def ext_project(ext: SmallExtension, x: Mapping) -> dict:
    return ext.project(x)
