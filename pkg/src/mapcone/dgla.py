"""Differential graded Lie algebras, Hom complexes and subcomplex data."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .exactalg import (
    Basis, CheckResult, GradedMap, GradedVectorSpace, Vec, cohomology,
    induced_map_ranks, intersect_spans, nullspace, span_basis, vacc, vadd,
    vclean, vscale,
)


def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


@dataclass(frozen=True)
class Dgla:
    """(space, d, [,]) with the bracket given on ordered basis pairs.

    Validity is checked by :meth:`check`, never at construction, so broken
    structures can be built for negative tests.
    """

    space: GradedVectorSpace
    d: GradedMap
    table: Mapping = field(default_factory=dict)  # (a, b) -> Vec
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "table", {k: vclean(v) for k, v in self.table.items() if vclean(v)})

    @property
    def labels(self) -> list[str]:
        return self.space.labels

    def deg(self, label: str) -> int:
        return self.space.degree(label)

    def dif(self, x: Mapping) -> Vec:
        return self.d.apply(x)

    def bracket(self, x: Mapping, y: Mapping) -> Vec:
        acc: dict = {}
        for a, ca in x.items():
            for b, cb in y.items():
                v = self.table.get((a, b))
                if v:
                    vacc(acc, v, ca * cb)
        return acc

    def basis_bracket(self, a: str, b: str) -> Vec:
        return self.table.get((a, b), {})

    def is_abelian(self) -> bool:
        return not self.table

    def check(self) -> CheckResult:
        """d² = 0, antisymmetry, Jacobi and Leibniz on all basis tuples."""
        for r in (self.check_d2(), self.check_antisymmetry(), self.check_leibniz(), self.check_jacobi()):
            if not r.ok:
                return r
        return CheckResult.passed("dgla")

    def check_d2(self) -> CheckResult:
        for a in self.labels:
            v = self.dif(self.dif({a: Fraction(1)}))
            if v:
                return CheckResult.failed("d^2", (a,), "d(d(a)) != 0")
        return CheckResult.passed("d^2")

    def check_antisymmetry(self) -> CheckResult:
        for a in self.labels:
            for b in self.labels:
                lhs = self.basis_bracket(a, b)
                rhs = vscale(self.basis_bracket(b, a), -_sgn(self.deg(a) * self.deg(b)))
                if vclean(vadd(lhs, rhs, -1)):
                    return CheckResult.failed("antisymmetry", (a, b))
                for k in lhs:
                    if self.deg(k) != self.deg(a) + self.deg(b):
                        return CheckResult.failed("bracket degree", (a, b))
        return CheckResult.passed("antisymmetry")

    def check_jacobi(self) -> CheckResult:
        L = self.labels
        for a in L:
            ea = {a: Fraction(1)}
            for b in L:
                eb = {b: Fraction(1)}
                ab = self.basis_bracket(a, b)
                for c in L:
                    ec = {c: Fraction(1)}
                    lhs = self.bracket(ea, self.basis_bracket(b, c))
                    rhs = vadd(self.bracket(ab, ec),
                               self.bracket(eb, self.basis_bracket(a, c)),
                               _sgn(self.deg(a) * self.deg(b)))
                    if vclean(vadd(lhs, rhs, -1)):
                        return CheckResult.failed("jacobi", (a, b, c))
        return CheckResult.passed("jacobi")

    def check_leibniz(self) -> CheckResult:
        for a in self.labels:
            ea = {a: Fraction(1)}
            for b in self.labels:
                eb = {b: Fraction(1)}
                lhs = self.dif(self.basis_bracket(a, b))
                rhs = vadd(self.bracket(self.dif(ea), eb), self.bracket(ea, self.dif(eb)),
                           _sgn(self.deg(a)))
                if vclean(vadd(lhs, rhs, -1)):
                    return CheckResult.failed("leibniz", (a, b))
        return CheckResult.passed("leibniz")


def abelian_dgla(space: GradedVectorSpace, d: GradedMap | None = None, name: str = "") -> Dgla:
    return Dgla(space, d or GradedMap.zero(space, space, 1), {}, name)


def from_half_table(space: GradedVectorSpace, d: GradedMap, half: Mapping, name: str = "") -> Dgla:
    """Complete a bracket table by graded antisymmetry."""
    table = {}
    for (a, b), v in half.items():
        table[(a, b)] = dict(v)
        table[(b, a)] = vscale(v, -_sgn(space.degree(a) * space.degree(b)))
    return Dgla(space, d, table, name)


@dataclass(frozen=True)
class DglaMorphism:
    source: Dgla
    target: Dgla
    map: GradedMap

    def __call__(self, x: Mapping) -> Vec:
        return self.map.apply(x)

    def check(self) -> CheckResult:
        if self.map.degree != 0:
            return CheckResult.failed("morphism degree", None)
        for a in self.source.labels:
            ea = {a: Fraction(1)}
            if vclean(vadd(self(self.source.dif(ea)), self.target.dif(self(ea)), -1)):
                return CheckResult.failed("morphism commutes with d", (a,))
            for b in self.source.labels:
                eb = {b: Fraction(1)}
                lhs = self(self.source.basis_bracket(a, b))
                rhs = self.target.bracket(self(ea), self(eb))
                if vclean(vadd(lhs, rhs, -1)):
                    return CheckResult.failed("morphism preserves bracket", (a, b))
        return CheckResult.passed("morphism")

    def compose(self, other: "DglaMorphism") -> "DglaMorphism":
        """self ∘ other."""
        return DglaMorphism(other.source, self.target, self.map.compose(other.map))


def identity_morphism(g: Dgla) -> DglaMorphism:
    return DglaMorphism(g, g, GradedMap.identity(g.space))


def zero_morphism(g: Dgla, h: Dgla) -> DglaMorphism:
    return DglaMorphism(g, h, GradedMap.zero(g.space, h.space, 0))


# --------------------------------------------------------------- Hom DGLA

def hom_label(t: str, s: str) -> str:
    return f"{t}<-{s}"


def split_hom_label(label: str) -> tuple[str, str]:
    t, s = label.split("<-", 1)
    return t, s


def hom_space(V: GradedVectorSpace, W: GradedVectorSpace) -> GradedVectorSpace:
    out: dict = {}
    for s in V.labels:
        for t in W.labels:
            out.setdefault(W.degree(t) - V.degree(s), []).append(hom_label(t, s))
    return GradedVectorSpace(out)


def hom_apply(f: Mapping, w: Mapping) -> Vec:
    """Apply an element of Hom*(V, W) (a vector over t<-s labels) to w."""
    acc: dict = {}
    for lab, c in f.items():
        t, s = split_hom_label(lab)
        x = w.get(s)
        if x:
            acc[t] = acc.get(t, 0) + c * x
    return vclean(acc)


def hom_compose(f: Mapping, g: Mapping) -> Vec:
    """f ∘ g for elements of Hom*(W, W) given on elementary labels."""
    by_target: dict = {}
    for lab, c in g.items():
        t, s = split_hom_label(lab)
        by_target.setdefault(t, []).append((s, c))
    acc: dict = {}
    for lab, c in f.items():
        t, s = split_hom_label(lab)
        for r, c2 in by_target.get(s, ()):
            k = hom_label(t, r)
            acc[k] = acc.get(k, 0) + c * c2
    return vclean(acc)


def map_to_hom(f: GradedMap) -> Vec:
    return {hom_label(t, s): c for s, col in f.cols.items() for t, c in col.items()}


def hom_to_map(f: Mapping, V: GradedVectorSpace, W: GradedVectorSpace, degree: int) -> GradedMap:
    cols: dict = {}
    for lab, c in f.items():
        t, s = split_hom_label(lab)
        cols.setdefault(s, {})[t] = c
    return GradedMap(V, W, degree, cols)


def hom_dgla(W: GradedVectorSpace, dW: GradedMap, name: str = "Hom") -> Dgla:
    """Hom*(W, W) with [f,g] = fg − (−1)^{|f||g|} gf and δf = d∘f − (−1)^{|f|} f∘d."""
    H = hom_space(W, W)
    dvec = map_to_hom(dW)
    cols = {}
    for f in H.labels:
        ef = {f: Fraction(1)}
        cols[f] = vadd(hom_compose(dvec, ef), hom_compose(ef, dvec), -_sgn(H.degree(f)))
    table = {}
    for f in H.labels:
        tf, sf = split_hom_label(f)
        for g in H.labels:
            tg, sg = split_hom_label(g)
            v: dict = {}
            if sf == tg:
                v[hom_label(tf, sg)] = Fraction(1)
            if sg == tf:
                k = hom_label(tg, sf)
                v[k] = v.get(k, 0) - _sgn(H.degree(f) * H.degree(g))
            v = vclean(v)
            if v:
                table[(f, g)] = v
    return Dgla(H, GradedMap(H, H, 1, cols), table, name)


# ------------------------------------------------------- sub and quotient

def sub_dgla(g: Dgla, basis: Mapping[int, Sequence[Mapping]], prefix: str = "s",
             name: str = "") -> tuple[Dgla, DglaMorphism]:
    """Sub-DGLA spanned by the given homogeneous vectors, with its inclusion.

    Raises ValueError if the span is not closed under d and the bracket.
    """
    vecs, labels, degs = [], [], {}
    for d in sorted(basis):
        for v in basis[d]:
            lab = f"{prefix}{len(labels)}"
            vecs.append(vclean(v))
            labels.append(lab)
            degs.setdefault(d, []).append(lab)
    S = GradedVectorSpace(degs)
    coords = Basis(vecs, g.labels)

    def express(v: Mapping, what: str) -> Vec:
        if not vclean(v):
            return {}
        c = coords.coords(v)
        if c is None:
            raise ValueError(f"span not closed under {what}")
        return vclean(dict(zip(labels, c)))

    dcols = {lab: express(g.dif(v), "d") for lab, v in zip(labels, vecs)}
    table = {}
    for la, va in zip(labels, vecs):
        for lb, vb in zip(labels, vecs):
            w = express(g.bracket(va, vb), "bracket")
            if w:
                table[(la, lb)] = w
    sub = Dgla(S, GradedMap(S, S, 1, dcols), table, name or f"sub({g.name})")
    inc = DglaMorphism(sub, g, GradedMap(S, g.space, 0, dict(zip(labels, vecs))))
    return sub, inc


def change_basis(g: Dgla, rng: random.Random, prefix: str = "b") -> tuple[Dgla, DglaMorphism]:
    """Isomorphic copy of g in a random unitriangular basis, with the isomorphism."""
    basis = {}
    for d in g.space.degrees():
        ls = g.space.in_degree(d)
        vecs = []
        for i, l in enumerate(ls):
            v = {l: Fraction(1)}
            for j in range(i):
                c = rng.choice([-1, 0, 0, 1, 2])
                if c:
                    v[ls[j]] = Fraction(c)
            vecs.append(v)
        basis[d] = vecs
    return sub_dgla(g, basis, prefix, name=g.name)


# ------------------------------------------------------ subcomplex pairs

@dataclass(frozen=True)
class Complex:
    """A finite cochain complex (space, d)."""

    space: GradedVectorSpace
    d: GradedMap

    def cohomology(self):
        return cohomology(self.space, self.d)


@dataclass(frozen=True)
class SubcomplexPair:
    """V ⊆ W (optionally U ⊆ V) given by homogeneous basis vectors per degree."""

    W: Complex
    V: Mapping  # degree -> list of Vec
    U: Mapping | None = None

    def _sub_ok(self, sub: Mapping) -> CheckResult:
        for deg, vecs in sub.items():
            for v in vecs:
                if self.W.space.vec_degree(v) not in (None, deg):
                    return CheckResult.failed("subspace degree", (deg, v))
                dv = self.W.d.apply(v)
                if dv and not Basis(sub.get(deg + 1, []), self.W.space.in_degree(deg + 1)).contains(dv):
                    return CheckResult.failed("subcomplex", (deg, v))
        return CheckResult.passed("subcomplex")

    def check(self) -> CheckResult:
        r = self._sub_ok(self.V)
        if not r.ok or self.U is None:
            return r
        r = self._sub_ok(self.U)
        if not r.ok:
            return r
        for deg, vecs in self.U.items():
            B = Basis(self.V.get(deg, []), self.W.space.in_degree(deg))
            for u in vecs:
                if not B.contains(u):
                    return CheckResult.failed("U inside V", (deg, u))
        return CheckResult.passed("subcomplex")

    def sub_complex(self, which: str = "V", prefix: str = "v") -> tuple[Complex, GradedMap]:
        return induced_subcomplex(self.W, self.V if which == "V" else self.U, prefix)

    def quotient_complex(self, prefix: str = "q") -> tuple[Complex, GradedMap]:
        return induced_quotient(self.W, self.V, prefix)


def induced_subcomplex(W: Complex, sub: Mapping, prefix: str = "v") -> tuple[Complex, GradedMap]:
    """The subcomplex with its own basis, plus the inclusion into W."""
    labels, degs, vecs = [], {}, []
    for deg in sorted(sub):
        for v in sub[deg]:
            lab = f"{prefix}{len(labels)}"
            labels.append(lab)
            vecs.append(vclean(v))
            degs.setdefault(deg, []).append(lab)
    S = GradedVectorSpace(degs)
    dcols = {}
    for lab, v in zip(labels, vecs):
        dv = W.d.apply(v)
        if not dv:
            continue
        deg = S.degree(lab) + 1
        tl = list(S.in_degree(deg))
        c = Basis([vecs[labels.index(t)] for t in tl], W.space.in_degree(deg)).coords(dv)
        if c is None:
            raise ValueError("not a subcomplex")
        dcols[lab] = vclean(dict(zip(tl, c)))
    inc = GradedMap(S, W.space, 0, dict(zip(labels, vecs)))
    return Complex(S, GradedMap(S, S, 1, dcols)), inc


def quotient_basis(W: GradedVectorSpace, sub: Mapping) -> dict:
    """Per degree: labels of W forming a complement of the subspace (first free columns)."""
    out = {}
    for deg in W.degrees():
        ls = W.in_degree(deg)
        vecs = sub.get(deg, [])
        rows = [[v.get(l, Fraction(0)) for l in ls] for v in vecs]
        keep = []
        cur = list(rows)
        from .exactalg import rank
        r = rank(cur, len(ls)) if cur else 0
        for j, l in enumerate(ls):
            trial = cur + [[Fraction(int(i == j)) for i in range(len(ls))]]
            r2 = rank(trial, len(ls))
            if r2 > r:
                keep.append(l)
                cur, r = trial, r2
        out[deg] = keep
    return out


def induced_quotient(W: Complex, sub: Mapping, prefix: str = "q") -> tuple[Complex, GradedMap]:
    """W/V on complementary basis labels (renamed with prefix) and the projection."""
    comp = quotient_basis(W.space, sub)
    names = {l: f"{prefix}{l}" for ls in comp.values() for l in ls}
    Q = GradedVectorSpace({deg: [names[l] for l in ls] for deg, ls in comp.items()})
    proj_cols = {}
    for deg in W.space.degrees():
        ls = W.space.in_degree(deg)
        gens = list(sub.get(deg, [])) + [{l: Fraction(1)} for l in comp.get(deg, [])]
        B = Basis(gens, ls)
        nsub = len(sub.get(deg, []))
        for l in ls:
            c = B.coords({l: Fraction(1)})
            proj_cols[l] = vclean({names[m]: x for m, x in zip(comp.get(deg, []), c[nsub:])})
    proj = GradedMap(W.space, Q, 0, proj_cols)
    dcols = {names[l]: proj.apply(W.d.apply({l: Fraction(1)})) for ls in comp.values() for l in ls}
    return Complex(Q, GradedMap(Q, Q, 1, dcols)), proj


def _preserving_conditions(H: GradedVectorSpace, W: Complex, sub: Mapping, deg: int):
    """Rows of the linear system g(sub) ⊆ sub for g ∈ Hom^deg, in H.in_degree(deg) coordinates."""
    cols = H.in_degree(deg)
    comp_maps = {}
    rows = []
    for sdeg, vecs in sub.items():
        tdeg = sdeg + deg
        tl = W.space.in_degree(tdeg)
        if not tl:
            continue
        if tdeg not in comp_maps:
            gens = list(sub.get(tdeg, []))
            comp = [l for l in quotient_basis(W.space, sub).get(tdeg, [])]
            comp_maps[tdeg] = (Basis(gens + [{l: Fraction(1)} for l in comp], tl), len(gens), comp)
        B, ns, comp = comp_maps[tdeg]
        for v in vecs:
            # coefficient of complement coordinate c in g(v), linear in g
            images = []
            for f in cols:
                gv = hom_apply({f: Fraction(1)}, v)
                coords = B.coords(gv) if gv else [Fraction(0)] * (ns + len(comp))
                images.append(coords[ns:])
            for ci in range(len(comp)):
                rows.append([img[ci] for img in images])
    return rows


def preserving_subalgebra(pair: SubcomplexPair) -> tuple[Dgla, DglaMorphism]:
    """L_{V,W} = {g : g(V) ⊆ V}, intersected with L_{U,W} when U is given."""
    r = pair.check()
    if not r.ok:
        raise ValueError(f"invalid subcomplex pair: {r.name}")
    LW = hom_dgla(pair.W.space, pair.W.d, "L_W")
    H = LW.space
    basis = {}
    for deg in H.degrees():
        cols = H.in_degree(deg)
        rows = _preserving_conditions(H, pair.W, pair.V, deg)
        if pair.U is not None:
            rows += _preserving_conditions(H, pair.W, pair.U, deg)
        if rows:
            ns = nullspace(rows, len(cols))
        else:
            ns = [[Fraction(int(i == j)) for i in range(len(cols))] for j in range(len(cols))]
        vecs = [vclean(dict(zip(cols, x))) for x in ns]
        if vecs:
            basis[deg] = vecs
    name = "L_{V,W}" if pair.U is None else "L_{U,V,W}"
    return sub_dgla(LW, basis, "p", name)


def restriction_morphism(pair: SubcomplexPair, LVW: Dgla, inc: DglaMorphism,
                         which: str = "V") -> tuple[Dgla, DglaMorphism]:
    """f ↦ f|_V from L_{V,W} to L_V = Hom*(V, V)."""
    Vc, vin = pair.sub_complex(which)
    LV = hom_dgla(Vc.space, Vc.d, "L_V")
    vecs = {lab: vin.apply({lab: Fraction(1)}) for lab in Vc.space.labels}
    bases = {}
    for deg in Vc.space.degrees():
        bases[deg] = Basis([vecs[l] for l in Vc.space.in_degree(deg)], pair.W.space.in_degree(deg))
    cols = {}
    for p in LVW.labels:
        f = inc({p: Fraction(1)})
        img: dict = {}
        for s in Vc.space.labels:
            fv = hom_apply(f, vecs[s])
            if not fv:
                continue
            tdeg = pair.W.space.vec_degree(fv)
            c = bases[tdeg].coords(fv)
            if c is None:
                raise ValueError("element does not preserve V")
            for t, x in zip(Vc.space.in_degree(tdeg), c):
                if x:
                    img[hom_label(t, s)] = img.get(hom_label(t, s), 0) + x
        cols[p] = vclean(img)
    return LV, DglaMorphism(LVW, LV, GradedMap(LVW.space, LV.space, 0, cols))


def quotient_morphism(pair: SubcomplexPair, LVW: Dgla, inc: DglaMorphism) -> tuple[Dgla, DglaMorphism]:
    """Induced action on W/V: L_{V,W} → L_{W/V}."""
    Qc, proj = pair.quotient_complex()
    LQ = hom_dgla(Qc.space, Qc.d, "L_{W/V}")
    # lift of each quotient basis label: the W label it came from
    lift = {}
    for l in pair.W.space.labels:
        img = proj.apply({l: Fraction(1)})
        if len(img) == 1:
            (q, c), = img.items()
            if c == 1 and q == "q" + l:
                lift[q] = {l: Fraction(1)}
    cols = {}
    for p in LVW.labels:
        f = inc({p: Fraction(1)})
        img: dict = {}
        for s in Qc.space.labels:
            fv = proj.apply(hom_apply(f, lift[s]))
            for t, x in fv.items():
                img[hom_label(t, s)] = img.get(hom_label(t, s), 0) + x
        cols[p] = vclean(img)
    return LQ, DglaMorphism(LVW, LQ, GradedMap(LVW.space, LQ.space, 0, cols))


# -------------------------------------------------------- quasi-isomorphisms

@dataclass
class QuasiIsoReport:
    ok: bool
    ranks: dict
    source_dims: dict
    target_dims: dict

    def __bool__(self) -> bool:
        return self.ok


def is_quasiiso(f, d_source: GradedMap | None = None, d_target: GradedMap | None = None) -> QuasiIsoReport:
    """True iff H^i(f) is bijective in every degree."""
    if isinstance(f, DglaMorphism):
        d_source, d_target, f = f.source.d, f.target.d, f.map
    if f.degree != 0:
        raise ValueError("chain maps have degree 0")
    if not (f.compose(d_source) == d_target.compose(f)):
        raise ValueError("not a chain map")
    HV = cohomology(f.source, d_source)
    HW = cohomology(f.target, d_target)
    ranks = induced_map_ranks(f, HV, HW)
    ok = all(ranks.get(n, 0) == HV.dim(n) == HW.dim(n)
             for n in set(HV.space.degrees()) | set(HW.space.degrees()))
    return QuasiIsoReport(ok, ranks, HV.dims(), HW.dims())


# ------------------------------------------------------------- fixtures

def rank_one_complex() -> Complex:
    """W⁰ = W¹ = Q², with d of rank 1 (w0 ↦ w2)."""
    W = GradedVectorSpace({0: ["w0", "w1"], 1: ["w2", "w3"]})
    return Complex(W, GradedMap(W, W, 1, {"w0": {"w2": Fraction(1)}}))


def random_complex(rng: random.Random, dims: Mapping[int, int], prefix: str = "w",
                   scramble: bool = True) -> Complex:
    """Random complex with prescribed dimensions and d² = 0.

    Built from a split form (cohomology ⊕ C ⊕ B with d: C ≅ B) and then
    conjugated by a random unitriangular base change in each degree.
    """
    degs = sorted(dims)
    labels = {}
    k = 0
    for deg in degs:
        labels[deg] = [f"{prefix}{k + i}" for i in range(dims[deg])]
        k += dims[deg]
    W = GradedVectorSpace(labels)
    cols: dict = {}
    used_target = {deg: 0 for deg in degs}  # positions consumed as boundaries
    for deg in degs:
        src = labels[deg]
        tgt = labels.get(deg + 1, [])
        free_src = [s for i, s in enumerate(src) if i >= used_target[deg]]
        avail = len(tgt) - used_target.get(deg + 1, 0)
        r = rng.randint(0, max(0, min(len(free_src), avail)))
        for i in range(r):
            s = free_src[len(free_src) - 1 - i]
            t = tgt[used_target[deg + 1] + i]
            cols[s] = {t: Fraction(1)}
        if deg + 1 in used_target:
            used_target[deg + 1] += r
    d = GradedMap(W, W, 1, cols)
    if not scramble:
        return Complex(W, d)
    # conjugate by P (unitriangular per degree)
    P, Pinv = {}, {}
    for deg in degs:
        ls = labels[deg]
        n = len(ls)
        M = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i):
                M[i][j] = Fraction(rng.choice([-1, 0, 1, 2]))
        Minv = _unitri_inverse(M)
        for j, s in enumerate(ls):
            P[s] = vclean({ls[i]: M[i][j] for i in range(n)})
            Pinv[s] = vclean({ls[i]: Minv[i][j] for i in range(n)})
    Pm = GradedMap(W, W, 0, P)
    Pim = GradedMap(W, W, 0, Pinv)
    return Complex(W, Pm.compose(d).compose(Pim))


def _unitri_inverse(M):
    n = len(M)
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            s = sum(M[i][k] * inv[k][j] for k in range(j, i))
            inv[i][j] = -s
    return inv


def random_subcomplex(rng: random.Random, W: Complex, quasi_iso: bool = False,
                      injective: bool = False) -> Mapping:
    """A random subcomplex V ⊆ W.

    The generated V is spanned by random vectors closed up under d.  With
    ``injective`` it is retried until H(V) → H(W) is injective; with
    ``quasi_iso`` until the inclusion is a quasi-isomorphism.
    """
    for _ in range(200):
        gens: dict = {}
        for deg in W.space.degrees():
            ls = W.space.in_degree(deg)
            for _ in range(rng.randint(0, len(ls))):
                v = vclean({l: Fraction(rng.randint(-2, 2)) for l in ls})
                if v:
                    gens.setdefault(deg, []).append(v)
        sub = close_under_d(W, gens)
        if quasi_iso or injective:
            Vc, inc = induced_subcomplex(W, sub)
            HV = cohomology(Vc.space, Vc.d)
            HW = cohomology(W.space, W.d)
            ranks = induced_map_ranks(inc, HV, HW)
            inj = all(ranks.get(n, 0) == HV.dim(n) for n in HV.space.degrees())
            if not inj:
                continue
            if quasi_iso and not all(HV.dim(n) == HW.dim(n) for n in W.space.degrees()):
                continue
        return sub
    raise RuntimeError("could not sample a subcomplex with the requested property")


def close_under_d(W: Complex, gens: Mapping) -> dict:
    out: dict = {}
    for deg in W.space.degrees():
        vecs = list(gens.get(deg, [])) + [W.d.apply(v) for v in out.get(deg - 1, [])]
        vecs = [v for v in vecs if v]
        b = span_basis(vecs, W.space.in_degree(deg)) if vecs else []
        if b:
            out[deg] = b
    return out


def sl2(name: str = "sl2") -> Dgla:
    S = GradedVectorSpace({0: ["h", "e", "f"]})
    half = {("h", "e"): {"e": Fraction(2)}, ("h", "f"): {"f": Fraction(-2)},
            ("e", "f"): {"h": Fraction(1)}}
    return from_half_table(S, GradedMap.zero(S, S, 1), half, name)


def heisenberg(name: str = "heis") -> Dgla:
    S = GradedVectorSpace({0: ["x", "y", "z"]})
    return from_half_table(S, GradedMap.zero(S, S, 1), {("x", "y"): {"z": Fraction(1)}}, name)


def affine_line(name: str = "aff") -> Dgla:
    S = GradedVectorSpace({0: ["h", "e"]})
    return from_half_table(S, GradedMap.zero(S, S, 1), {("h", "e"): {"e": Fraction(1)}}, name)


def tensor_exterior(g: Dgla, k: int, name: str = "") -> Dgla:
    """g ⊗ Λ(x) with deg x = k and d(x) = 0 (g concentrated in degree 0 or graded)."""
    sp: dict = {}
    for d in g.space.degrees():
        for l in g.space.in_degree(d):
            sp.setdefault(d, []).append(l)
            sp.setdefault(d + k, []).append(l + "x")
    S = GradedVectorSpace(sp)
    dcols = {}
    for l in g.labels:
        dl = g.dif({l: Fraction(1)})
        if dl:
            dcols[l] = dl
            # d(a ⊗ x) = da ⊗ x   (x is closed and sits to the right)
            dcols[l + "x"] = {m + "x": c for m, c in dl.items()}
    table = {}
    for (a, b), v in g.table.items():
        table[(a, b)] = dict(v)
        # [a, b⊗x] = [a,b]⊗x ; [a⊗x, b] = (−1)^{k·|b|}[a,b]⊗x
        table[(a, b + "x")] = {m + "x": c for m, c in v.items()}
        s = _sgn(k * g.deg(b))
        table[(a + "x", b)] = {m + "x": s * c for m, c in v.items()}
    return Dgla(S, GradedMap(S, S, 1, dcols), table, name or f"{g.name}⊗Λ{k}")


# ------------------------------------------------ graded commutative algebras

@dataclass(frozen=True)
class Dgca:
    """Finite-dimensional unital DG commutative algebra; the unit is "1"."""

    space: GradedVectorSpace
    d: GradedMap
    table: Mapping  # (a, b) -> Vec, for non-unit a, b
    name: str = ""

    def mul_basis(self, a: str, b: str) -> Vec:
        if a == "1":
            return {b: Fraction(1)}
        if b == "1":
            return {a: Fraction(1)}
        return self.table.get((a, b), {})

    def mul(self, x: Mapping, y: Mapping) -> Vec:
        acc: dict = {}
        for a, ca in x.items():
            for b, cb in y.items():
                v = self.mul_basis(a, b)
                if v:
                    vacc(acc, v, ca * cb)
        return vclean(acc)

    def dif(self, x: Mapping) -> Vec:
        return self.d.apply(x)

    def check(self) -> CheckResult:
        S = self.space
        for a in S.labels:
            ea = {a: Fraction(1)}
            if self.dif(self.dif(ea)):
                return CheckResult.failed("d^2", (a,))
            for b in S.labels:
                eb = {b: Fraction(1)}
                ab = self.mul(ea, eb)
                if vclean(vadd(ab, self.mul(eb, ea), -_sgn(S.degree(a) * S.degree(b)))):
                    return CheckResult.failed("graded commutative", (a, b))
                rhs = vadd(self.mul(self.dif(ea), eb), self.mul(ea, self.dif(eb)), _sgn(S.degree(a)))
                if vclean(vadd(self.dif(ab), rhs, -1)):
                    return CheckResult.failed("leibniz", (a, b))
                for c in S.labels:
                    ec = {c: Fraction(1)}
                    if vclean(vadd(self.mul(ab, ec), self.mul(ea, self.mul(eb, ec)), -1)):
                        return CheckResult.failed("associative", (a, b, c))
        return CheckResult.passed("dgca")


def exterior_dgca(k: int) -> Dgca:
    """Λ(x) with deg x = k, d = 0 (x² = 0 also for even k)."""
    S = GradedVectorSpace({0: ["1"], k: ["x"]} if k else {0: ["1", "x"]})
    return Dgca(S, GradedMap.zero(S, S, 1), {}, f"Λ{k}")


def interval_dgca() -> Dgca:
    """K⟨1, u, du⟩ with u² = 0, u·du = 0, d u = du."""
    S = GradedVectorSpace({0: ["1", "u"], 1: ["du"]})
    return Dgca(S, GradedMap(S, S, 1, {"u": {"du": Fraction(1)}}), {}, "K[u,du]/(u²,u du)")


def tensor_label(v: str, r: str) -> str:
    return f"{v}*{r}"


def split_tensor_label(label: str) -> tuple[str, str]:
    v, r = label.rsplit("*", 1)
    return v, r


def tensor_dgla(g: Dgla, R: Dgca) -> Dgla:
    """g ⊗ R: [v⊗r, w⊗s] = (−1)^{|r||w|}[v,w]⊗rs, d(v⊗r) = dv⊗r + (−1)^{|v|}v⊗dr."""
    sp: dict = {}
    for v in g.labels:
        for r in R.space.labels:
            sp.setdefault(g.deg(v) + R.space.degree(r), []).append(tensor_label(v, r))
    S = GradedVectorSpace(sp)
    dcols = {}
    for v in g.labels:
        for r in R.space.labels:
            acc: dict = {}
            for x, c in g.dif({v: Fraction(1)}).items():
                acc[tensor_label(x, r)] = acc.get(tensor_label(x, r), 0) + c
            s = _sgn(g.deg(v))
            for y, c in R.dif({r: Fraction(1)}).items():
                acc[tensor_label(v, y)] = acc.get(tensor_label(v, y), 0) + s * c
            dcols[tensor_label(v, r)] = vclean(acc)
    table = {}
    for (a, b), br in g.table.items():
        for r in R.space.labels:
            for s_ in R.space.labels:
                rs = R.mul_basis(r, s_)
                if not rs:
                    continue
                sign = _sgn(R.space.degree(r) * g.deg(b))
                val = {tensor_label(m, y): sign * c * cy for m, c in br.items() for y, cy in rs.items()}
                table[(tensor_label(a, r), tensor_label(b, s_))] = val
    return Dgla(S, GradedMap(S, S, 1, dcols), table, f"{g.name}⊗{R.name}")


def tensor_morphism(f: DglaMorphism, R: Dgca) -> DglaMorphism:
    """f ⊗ Id_R."""
    src, tgt = tensor_dgla(f.source, R), tensor_dgla(f.target, R)
    cols = {}
    for v in f.source.labels:
        fv = f.map.apply({v: Fraction(1)})
        for r in R.space.labels:
            cols[tensor_label(v, r)] = {tensor_label(x, r): c for x, c in fv.items()}
    return DglaMorphism(src, tgt, GradedMap(src.space, tgt.space, 0, cols))
