"""Maurer-Cartan elements, gauge and homotopy equivalence, pushforward and lifting.

Hosts are a :class:`Dgla`, a :class:`ConeAlgebra` or a bare
:class:`LInftyAlgebra`.  Coefficients are tensor dicts keyed by
(label, A-label); for a cone the labels are the cone labels, so (l, m)
with l ∈ L¹⊗m_A and m ∈ M⁰⊗m_A is one dict.

Both equivalence deciders solve weight by weight.  Suppose g·x₀ ≡ x₁ up to
weight k.  Any better g' is g·s with s in the stabiliser of x₀ modulo weight
k+1, and s ↦ (s·x₀ − x₀) in weight k+1 is a homomorphism from a unipotent
group to a vector group, so its image is the image of the stabiliser's Lie
algebra under the infinitesimal action.  One linear system per weight
therefore decides existence, and an inconsistent system is a certificate.
The deciders differ in how the orbit map is evaluated: directly by the gauge
formulas, or as the s = 1 end of an explicit path in the host ⊗ K[s,ds].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Mapping, Sequence

from .artin import (
    ONE, ArtinLocalAlgebra, SmallExtension, ad_power_series, bch, bch_many,
    dexp_inverse, forms_const, forms_ds_part, forms_evaluate, forms_integrate_01,
    forms_integrate_0s, gauge_action, mc_curvature, polynomial_forms, t_add,
    t_bracket, t_dif, t_map, t_upto, t_weight,
)
from .cone import ConeAlgebra, cone_split
from .dgla import Dgla, DglaMorphism, tensor_dgla, tensor_morphism
from .exactalg import (
    CheckResult, cohomology, nullspace, solve, vacc, vclean, vscale,
)
from .linfty import ArityCapError, LInftyAlgebra, LInftyMorphism


class InternalInconsistency(RuntimeError):
    """Two formulations that must agree did not: an implementation bug."""


def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


# ----------------------------------------------------------- elements

@dataclass(frozen=True)
class McElement:
    host: object  # Dgla | ConeAlgebra | LInftyAlgebra
    A: ArtinLocalAlgebra
    value: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "value", vclean(self.value))

    @property
    def is_zero(self) -> bool:
        return not self.value


@dataclass
class EquivalenceWitness:
    kind: str  # "gauge" or "homotopy"
    data: dict
    certificate: object = None


def _linf(host) -> LInftyAlgebra:
    if isinstance(host, ConeAlgebra):
        return host.linf
    if isinstance(host, LInftyAlgebra):
        return host
    raise TypeError("host has no L∞ structure")


def _apply_q(V: LInftyAlgebra, terms: Sequence, A: ArtinLocalAlgebra, n: int) -> dict:
    """Σ over multisets of size n of q_n(γ…γ)/n!, γ = Σ terms (label, a, c)."""
    acc: dict = {}

    def rec(start, chosen, mult, prod, coeff):
        if len(chosen) == n:
            val = V.q(n, [terms[i][0] for i in chosen])
            if not val:
                return
            for lab, c in val.items():
                for a, ca in prod.items():
                    k = (lab, a)
                    acc[k] = acc.get(k, 0) + coeff * c * ca
            return
        for i in range(start, len(terms)):
            lab, a, c = terms[i]
            p = A.mul(prod, {a: Fraction(1)})
            if not p:
                continue
            m = mult.get(i, 0) + 1
            mult[i] = m
            rec(i, chosen + [i], mult, p, coeff * c / m)
            mult[i] = m - 1

    rec(0, [], {}, {ONE: Fraction(1)}, Fraction(1))
    return acc


def linfty_residual(V: LInftyAlgebra, A: ArtinLocalAlgebra, gamma: Mapping) -> dict:
    """Σ_{n≥1} q_n(γ^{⊙n})/n! for γ ∈ (V[1])⁰ ⊗ m_A."""
    N = A.nilpotency
    if V.arity_cap < N and V.vanishes_above is None:
        raise ArityCapError(f"arity cap {V.arity_cap} below nilpotency index {N}")
    for (lab, a) in gamma:
        if a == ONE:
            raise ValueError("coefficients must lie in the maximal ideal")
        if V.sdeg(lab) != 0:
            raise ValueError(f"{lab} is not of degree 0 in V[1]")
    terms = [(lab, a, c) for (lab, a), c in sorted(gamma.items()) if c]
    acc: dict = {}
    top = N - 1 if V.vanishes_above is None else min(N - 1, V.vanishes_above)
    for n in range(1, top + 1):
        vacc(acc, _apply_q(V, terms, A, n))
    return vclean(acc)


def mc_residual(gamma: McElement) -> dict:
    """Residual in suspended coordinates.

    For a DGLA host this is −(dx + ½[x,x]); for a cone it is the bracket sum,
    and :func:`cone_residual_system` gives the independent evaluation.
    """
    h = gamma.host
    if isinstance(h, Dgla):
        return vscale(mc_curvature(h, gamma.A, gamma.value), -1)
    return linfty_residual(_linf(h), gamma.A, gamma.value)


def is_mc_element(gamma: McElement) -> bool:
    return not mc_residual(gamma)


def split_cone_element(x: Mapping) -> tuple[dict, dict]:
    l, m = {}, {}
    for (lab, a), c in x.items():
        if lab.startswith("L:"):
            l[(lab[2:], a)] = c
        else:
            m[(lab[2:], a)] = c
    return l, m


def join_cone_element(l: Mapping, m: Mapping) -> dict:
    out = {("L:" + v, a): c for (v, a), c in l.items() if c}
    out.update({("M:" + v, a): c for (v, a), c in m.items() if c})
    return out


def cone_residual_system(cone: ConeAlgebra, A: ArtinLocalAlgebra, gamma: Mapping) -> dict:
    """(−(dl + ½[l,l]), −D_m⁻¹(e^m ∗ χ(l))) with D_m = Σ ad_mⁿ/(n+1)!."""
    l, m = split_cone_element(gamma)
    first = vscale(mc_curvature(cone.L, A, l), -1)
    chil = t_map(cone.chi.map, l)
    e = gauge_action(cone.M, A, m, chil)
    second = vscale(dexp_inverse(cone.M, A, m, e), -1)
    return vclean(join_cone_element(first, second))


def cone_mc_system(cone: ConeAlgebra, A: ArtinLocalAlgebra, gamma: Mapping) -> tuple[dict, dict]:
    """(dl + ½[l,l], e^m ∗ χ(l)); both vanish exactly on solutions."""
    l, m = split_cone_element(gamma)
    return mc_curvature(cone.L, A, l), gauge_action(cone.M, A, m, t_map(cone.chi.map, l))


def compare_cone_residuals(cone: ConeAlgebra, A: ArtinLocalAlgebra, gamma: Mapping) -> CheckResult:
    a = linfty_residual(cone.linf, A, gamma)
    b = cone_residual_system(cone, A, gamma)
    if a != b:
        return CheckResult.failed("cone residual routes", gamma, f"brackets {a} system {b}")
    return CheckResult.passed("cone residual routes")


# --------------------------------------------------- pushforward

def mc_pushforward(F: LInftyMorphism, gamma: McElement, target_host=None, check: bool = True) -> McElement:
    """Σ_n f_n(γ^{⊙n})/n!."""
    if check and not is_mc_element(gamma):
        raise ValueError("input is not a Maurer-Cartan element")
    A = gamma.A
    terms = [(lab, a, c) for (lab, a), c in sorted(gamma.value.items()) if c]
    N = A.nilpotency
    top = N - 1 if F.vanishes_above is None else min(N - 1, F.vanishes_above)
    acc: dict = {}

    class _Adapter:
        def q(self, n, word):
            return F.f(n, word)

    for n in range(1, top + 1):
        vacc(acc, _apply_q(_Adapter(), terms, A, n))
    host = target_host if target_host is not None else F.target
    out = McElement(host, A, acc)
    if check and not is_mc_element(out):
        raise InternalInconsistency("pushforward of an MC element is not MC")
    return out


# --------------------------------------------------- generic orbit solver

@lru_cache(maxsize=None)
def _derivative_weights(n: int) -> tuple:
    """w_j with p'(0) = Σ_j w_j p(j), j = 0..n−1, for deg p < n."""
    out = []
    for j in range(n):
        den = Fraction(1)
        for m in range(n):
            if m != j:
                den *= j - m
        tot = Fraction(0)
        for k in range(n):
            if k == j:
                continue
            num = Fraction(1)
            for m in range(n):
                if m not in (j, k):
                    num *= -m
            tot += num
        out.append(tot / den)
    return tuple(out)


@dataclass
class OrbitProblem:
    """Find p with act(p) = target, p built from directions e_i (weights w_i)."""

    A: ArtinLocalAlgebra
    directions: list  # list of (param dict, weight)
    act: Callable[[Mapping], dict]
    compose: Callable[[Mapping, Mapping], dict]  # p•q: q acts first
    source: dict
    target: dict

    def weight_part(self, x, lo, hi):
        return {k: c for k, c in x.items() if lo <= self.A.weight(k[1]) <= hi}

    def infinitesimal(self) -> list:
        n = self.A.max_weight() + 1
        w = _derivative_weights(n)
        out = []
        for e, _ in self.directions:
            acc: dict = {}
            for j in range(n):
                if w[j]:
                    vacc(acc, self.act(vscale(e, j)) if j else self.source, w[j])
            out.append(vclean(acc))
        return out

    def solve(self):
        A = self.A
        top = A.max_weight()
        if self.weight_part(self.source, 0, 0) or self.weight_part(self.target, 0, 0):
            raise ValueError("points must lie in the maximal ideal")
        infs = None
        g: dict = {}
        for k in range(top):
            cur = self.act(g)
            diff = dict(self.target)
            vacc(diff, cur, -1)
            diff = vclean(diff)
            if self.weight_part(diff, 0, k):
                raise InternalInconsistency(f"lower weights drifted at weight {k}")
            rho = self.weight_part(diff, k + 1, k + 1)
            if not rho:
                continue
            if infs is None:
                infs = self.infinitesimal()
            idx = [i for i, (_, wt) in enumerate(self.directions) if wt <= k + 1]
            keys = sorted({key for i in idx for key in self.weight_part(infs[i], 0, k + 1)} | set(rho))
            rows = [[infs[i].get(key, Fraction(0)) for i in idx] for key in keys]
            rhs = [rho.get(key, Fraction(0)) for key in keys]
            sol = solve(rows, rhs, len(idx)) if idx else None
            if sol is None:
                return None, {"weight": k + 1, "residual": rho}
            h: dict = {}
            for c, i in zip(sol, idx):
                if c:
                    vacc(h, self.directions[i][0], c)
            g = self.compose(g, vclean(h))
        if vclean(self.act(g)) != vclean(self.target):
            raise InternalInconsistency("orbit solver did not reach the target")
        return g, None


def _directions(space_labels: Sequence[str], A: ArtinLocalAlgebra, prefix: str = "") -> list:
    return [({(prefix + v, a): Fraction(1)}, A.weight(a)) for v in space_labels for a in A.basis]


# ------------------------------------------------------------- DGLA hosts

class _DglaGauge:
    def __init__(self, g: Dgla, A: ArtinLocalAlgebra):
        self.g, self.A = g, A

    def directions(self):
        return _directions(self.g.space.in_degree(0), self.A)

    def compose(self, p, q):
        return bch(self.g, self.A, p, q)

    def act(self, p, x0):
        return vclean(gauge_action(self.g, self.A, p, x0))


class _DglaPaths(_DglaGauge):
    """Orbit map through the path e^{s·g} ∗ x₀ in g ⊗ K[s,ds]."""

    def __init__(self, g: Dgla, A: ArtinLocalAlgebra):
        super().__init__(g, A)
        self.T = A.nilpotency
        self.omega = polynomial_forms(self.T)
        self.gs = tensor_dgla(g, self.omega)

    def path(self, p, x0):
        return vclean(gauge_action(self.gs, self.A, forms_const(p, 1), forms_const(x0, 0)))

    def act(self, p, x0):
        return forms_evaluate(self.path(p, x0), 1)


def _check_pair(g0: McElement, g1: McElement):
    if g0.host is not g1.host or g0.A is not g1.A and g0.A != g1.A:
        raise ValueError("hosts differ")
    for x in (g0, g1):
        if not is_mc_element(x):
            raise ValueError("inputs must be Maurer-Cartan elements")


# ------------------------------------------------------------- cone hosts

class _ConeGauge:
    """(λ, ν) ∈ L⁰⊗m × N⊗m, N a complement of ker d in M⁻¹."""

    def __init__(self, cone: ConeAlgebra, A: ArtinLocalAlgebra):
        self.cone, self.A = cone, A
        L, M = cone.L, cone.M
        self.L, self.M = L, M
        labs = M.space.in_degree(-1)
        cols = [M.dif({v: Fraction(1)}) for v in labs]
        targets = M.space.in_degree(0)
        # greedy complement of the kernel: keep labels whose images stay independent
        from .exactalg import independent_subset
        rows = [[c.get(t, Fraction(0)) for t in targets] for c in cols]
        keep = independent_subset(rows, len(targets)) if labs else []
        self.nlabels = [labs[i] for i in keep]
        self._dimages = [cols[i] for i in keep]

    def directions(self):
        return (_directions(self.L.space.in_degree(0), self.A, "L:")
                + _directions(self.nlabels, self.A, "N:"))

    @staticmethod
    def split(p):
        lam = {(k[0][2:], k[1]): c for k, c in p.items() if k[0].startswith("L:")}
        nu = {(k[0][2:], k[1]): c for k, c in p.items() if k[0].startswith("N:")}
        return lam, nu

    @staticmethod
    def join(lam, nu):
        out = {("L:" + v, a): c for (v, a), c in lam.items() if c}
        out.update({("N:" + v, a): c for (v, a), c in nu.items() if c})
        return out

    def d_nu(self, nu):
        return t_dif(self.M, nu)

    def nu_from_exact(self, b):
        """ν in the complement with dν = b (coefficientwise in A)."""
        out: dict = {}
        targets = self.M.space.in_degree(0)
        by_a: dict = {}
        for (v, a), c in b.items():
            by_a.setdefault(a, {})[v] = c
        for a, vec in by_a.items():
            rows = [[img.get(t, Fraction(0)) for img in self._dimages] for t in targets]
            sol = solve(rows, [vec.get(t, Fraction(0)) for t in targets], len(self._dimages))
            if sol is None:
                raise InternalInconsistency("product of exact elements is not exact")
            for c, v in zip(sol, self.nlabels):
                if c:
                    out[(v, a)] = c
        return out

    def compose(self, p, q):
        l1, n1 = self.split(p)
        l2, n2 = self.split(q)
        lam = bch(self.L, self.A, l1, l2)
        b = bch(self.M, self.A, self.d_nu(n1), self.d_nu(n2))
        return self.join(lam, self.nu_from_exact(b))

    def act(self, p, x0):
        lam, nu = self.split(p)
        l0, m0 = split_cone_element(x0)
        l1 = gauge_action(self.L, self.A, lam, l0)
        m1 = bch_many(self.M, self.A, self.d_nu(nu), m0, vscale(t_map(self.cone.chi.map, lam), -1))
        return vclean(join_cone_element(l1, m1))


class _ConePaths(_ConeGauge):
    """(l̃, m̃) = (e^{sλ} ∗ l₀, d(sν) ∙ m₀ ∙ (−χ(sλ))) in the cone over K[s,ds]."""

    def __init__(self, cone: ConeAlgebra, A: ArtinLocalAlgebra):
        super().__init__(cone, A)
        self.T = A.nilpotency
        self.omega = polynomial_forms(self.T)
        self.Ls = tensor_dgla(self.L, self.omega)
        self.Ms = tensor_dgla(self.M, self.omega)
        self.chis = tensor_morphism(cone.chi, self.omega)

    def path(self, p, x0):
        lam, nu = self.split(p)
        l0, m0 = split_cone_element(x0)
        slam = forms_const(lam, 1)
        lt = gauge_action(self.Ls, self.A, slam, forms_const(l0, 0))
        dsnu = t_dif(self.Ms, forms_const(nu, 1))
        mt = bch_many(self.Ms, self.A, dsnu, forms_const(m0, 0),
                      vscale(t_map(self.chis.map, slam), -1))
        return vclean(lt), vclean(mt)

    def act(self, p, x0):
        lt, mt = self.path(p, x0)
        return vclean(join_cone_element(forms_evaluate(lt, 1), forms_evaluate(mt, 1)))


def _engine(host, A, kind: str):
    if isinstance(host, Dgla):
        return (_DglaGauge if kind == "gauge" else _DglaPaths)(host, A)
    if isinstance(host, ConeAlgebra):
        return (_ConeGauge if kind == "gauge" else _ConePaths)(host, A)
    raise TypeError("equivalence is decided for DGLA and cone hosts")


def _decide(g0: McElement, g1: McElement, kind: str):
    _check_pair(g0, g1)
    eng = _engine(g0.host, g0.A, kind)
    x0, x1 = dict(g0.value), dict(g1.value)
    prob = OrbitProblem(g0.A, eng.directions(), lambda p: eng.act(p, x0), eng.compose, x0, x1)
    return eng, prob.solve()


def gauge_equivalent(g0: McElement, g1: McElement) -> EquivalenceWitness | None:
    """A gauge element p with p ∗ γ₀ = γ₁, or None (certified)."""
    eng, (p, cert) = _decide(g0, g1, "gauge")
    if p is None:
        return None
    if eng.act(p, dict(g0.value)) != vclean(g1.value):
        raise InternalInconsistency("gauge witness fails validation")
    return EquivalenceWitness("gauge", {"param": p})


def gauge_certificate(g0: McElement, g1: McElement):
    """The failing weight and residual when no gauge exists."""
    _, (p, cert) = _decide(g0, g1, "gauge")
    return cert


def homotopy_equivalent(g0: McElement, g1: McElement) -> EquivalenceWitness | None:
    """A path γ(s,ds) ∈ MC over K[s,ds] ⊗ A from γ₀ to γ₁, or None."""
    eng, (p, cert) = _decide(g0, g1, "homotopy")
    if p is None:
        return None
    path = eng.path(p, dict(g0.value))
    w = EquivalenceWitness("homotopy", {"param": p, "path": path, "engine": eng})
    r = validate_homotopy(g0, g1, w)
    if not r.ok:
        raise InternalInconsistency(f"homotopy witness fails: {r.name}")
    return w


def homotopy_from_gauge(g0: McElement, p: Mapping) -> EquivalenceWitness:
    """The path s ↦ e^{s·p} ∗ γ₀ (cone: the (l̃, m̃) construction)."""
    eng = _engine(g0.host, g0.A, "homotopy")
    return EquivalenceWitness("homotopy", {"param": dict(p), "path": eng.path(p, dict(g0.value)), "engine": eng})


def constant_homotopy(g0: McElement) -> EquivalenceWitness:
    return homotopy_from_gauge(g0, {})


def validate_homotopy(g0: McElement, g1: McElement, w: EquivalenceWitness) -> CheckResult:
    eng = w.data["engine"]
    path = w.data["path"]
    A = g0.A
    if isinstance(g0.host, Dgla):
        if mc_curvature(eng.gs, A, path):
            return CheckResult.failed("path is not MC", None)
        ends = forms_evaluate(path, 0), forms_evaluate(path, 1)
    else:
        lt, mt = path
        if mc_curvature(eng.Ls, A, lt):
            return CheckResult.failed("path L-part is not MC", None)
        if vclean(gauge_action(eng.Ms, A, mt, t_map(eng.chis.map, lt))):
            return CheckResult.failed("path M-part equation fails", None)
        ends = tuple(vclean(join_cone_element(forms_evaluate(lt, t), forms_evaluate(mt, t))) for t in (0, 1))
    if ends[0] != vclean(g0.value):
        return CheckResult.failed("path start", ends[0])
    if ends[1] != vclean(g1.value):
        return CheckResult.failed("path end", ends[1])
    return CheckResult.passed("homotopy")


def solve_path_generator(gs: Dgla, A: ArtinLocalAlgebra, u: Mapping, T: int) -> dict:
    """λ(s) with λ(0) = 0 and Σ ad_λⁿ(λ̇)/(n+1)! = −u(s) (Picard iteration).

    For an MC path x(s) + u(s)ds one then has x(s) + u(s)ds = e^{λ(s)} ∗ x(0).
    """
    lam: dict = {}
    for _ in range(A.nilpotency + 1):
        rhs = dexp_inverse(gs, A, lam, vscale(u, -1))
        nxt = forms_integrate_0s(rhs, T)
        if nxt == lam:
            break
        lam = nxt
    return lam


def gauge_from_homotopy(g0: McElement, w: EquivalenceWitness) -> dict:
    """Extract a gauge parameter from a homotopy (time-ordered exponential).

    Cone case: λ from the L-part; μ̃ = m̃ ∙ χ(λ) ∙ (−m₀) is closed, and
    ν = −∫₀¹ μ⁻¹(s) ds where μ̃ = μ⁰ + μ⁻¹ ds.
    """
    eng = w.data["engine"]
    path = w.data["path"]
    A = g0.A
    if isinstance(g0.host, Dgla):
        lam = solve_path_generator(eng.gs, A, forms_ds_part(path), eng.T)
        return forms_evaluate(lam, 1)
    lt, mt = path
    lam_s = solve_path_generator(eng.Ls, A, forms_ds_part(lt), eng.T)
    _, m0 = split_cone_element(g0.value)
    mu = bch_many(eng.Ms, A, mt, t_map(eng.chis.map, lam_s), vscale(forms_const(m0, 0), -1))
    if vclean(t_dif(eng.Ms, mu)):
        raise InternalInconsistency("μ̃ is not closed")
    nu_full = vscale(forms_integrate_01(forms_ds_part(mu)), -1)
    b = t_dif(eng.M, nu_full)
    nu = eng.nu_from_exact(b) if b else {}
    return eng.join(forms_evaluate(lam_s, 1), nu)


def act_gauge(g0: McElement, p: Mapping) -> McElement:
    eng = _engine(g0.host, g0.A, "gauge")
    return McElement(g0.host, g0.A, eng.act(p, dict(g0.value)))


# --------------------------------------------------- deformation summaries

def h_dims(host) -> dict:
    """Cohomology dimensions of the host complex (unsuspended degrees)."""
    if isinstance(host, Dgla):
        return cohomology(host.space, host.d).dims()
    if isinstance(host, ConeAlgebra):
        return cohomology(host.space, host.differential()).dims()
    raise TypeError("unsupported host")


def tangent_dimension(host) -> int:
    return h_dims(host).get(1, 0)


def partition_by_equivalence(elements: Sequence[McElement]) -> list[list[int]]:
    classes: list[list[int]] = []
    for i, x in enumerate(elements):
        for cl in classes:
            if gauge_equivalent(elements[cl[0]], x) is not None:
                cl.append(i)
                break
        else:
            classes.append([i])
    return classes


# ----------------------------------------------------------- obstructions

@dataclass
class LiftResult:
    lifted: McElement | None
    obstruction: dict  # cocycle r ⊗ kernel, curvature convention, host labels
    class_coords: list  # coordinates in the chosen H² basis
    tangent_dim: int


def _host_complex(host):
    if isinstance(host, Dgla):
        return host.space, host.d
    if isinstance(host, ConeAlgebra):
        return host.space, host.differential()
    raise TypeError("unsupported host")


def naive_lift(ext: SmallExtension, x: Mapping) -> dict:
    """Preimage of each A-coefficient under the projection (first match)."""
    pre: dict = {}
    for b in ext.big.basis:
        img = ext.proj.get(b, {})
        if len(img) == 1:
            (a, c), = img.items()
            pre.setdefault(a, (b, c))
    out: dict = {}
    for (v, a), c in x.items():
        if a not in pre:
            raise ValueError(f"no simple preimage for {a}")
        b, cb = pre[a]
        out[(v, b)] = out.get((v, b), 0) + c / cb
    return vclean(out)


def tangent_and_obstruction(host, ext: SmallExtension, gamma: McElement) -> LiftResult:
    """Lift γ along A' → A or return its obstruction class in H².

    The obstruction is the curvature of a naive lift (dx + ½[x,x] for a DGLA,
    minus the bracket residual in general), a cocycle with values in the
    kernel; a lift exists iff its class vanishes.
    """
    r = ext.check()
    if not r.ok:
        raise ValueError(f"not a small extension: {r.name}")
    if not is_mc_element(gamma):
        raise ValueError("input is not a Maurer-Cartan element")
    big = ext.big
    xl = naive_lift(ext, gamma.value)
    res = mc_residual(McElement(host, big, xl))
    curv = vscale(res, -1)
    if ext.project(curv):
        raise InternalInconsistency("curvature of a lift does not lie in the kernel")
    k = ext.kernel
    if any(a != k for (_, a) in curv):
        raise InternalInconsistency("curvature is not kernel-valued")
    rvec = {v: c for (v, _), c in curv.items()}
    space, d = _host_complex(host)
    H = cohomology(space, d)
    coords = H.classify(rvec, 2) if rvec else [Fraction(0)] * H.dim(2)
    tdim = H.dim(1)
    if any(coords):
        return LiftResult(None, curv, coords, tdim)
    # r = dc for some c of degree 1: the lift x − c⊗k is MC
    c = d_preimage(space, d, rvec, 2) if rvec else {}
    fixed = dict(xl)
    if rvec:
        vacc(fixed, {(v, k): cv for v, cv in c.items()}, -1)
    out = McElement(host, big, fixed)
    if not is_mc_element(out):
        raise InternalInconsistency("corrected lift is not MC")
    return LiftResult(out, curv, coords, tdim)


def d_preimage(space, d, v: Mapping, n: int) -> dict | None:
    """Some c of degree n−1 with dc = v, or None."""
    src = space.in_degree(n - 1)
    tgt = space.in_degree(n)
    cols = [d.apply({s: Fraction(1)}) for s in src]
    rows = [[c.get(t, Fraction(0)) for c in cols] for t in tgt]
    sol = solve(rows, [v.get(t, Fraction(0)) for t in tgt], len(src))
    if sol is None:
        return None
    return {s: c for s, c in zip(src, sol) if c}


def obstruction_image(f: DglaMorphism | LInftyMorphism, source_host, target_host, coords: Sequence) -> list:
    """H²(f₁) applied to a class given by coordinates."""
    sspace, sd = _host_complex(source_host)
    tspace, td = _host_complex(target_host)
    HS, HT = cohomology(sspace, sd), cohomology(tspace, td)
    rep = HS.representative(coords, 2)
    if isinstance(f, DglaMorphism):
        img = f.map.apply(rep)
    else:
        img = f.fv([rep])
    return HT.classify(img, 2) if img else [Fraction(0)] * HT.dim(2)


# ------------------------------------------------------ splitting of M[s,ds]

def path_algebra(M: Dgla, T: int) -> tuple[Dgla, object]:
    omega = polynomial_forms(T)
    return tensor_dgla(M, omega), omega


def alpha_map(M: Dgla, A: ArtinLocalAlgebra, x: Mapping, c: Mapping, T: int | None = None) -> dict:
    """(x, c(s)) ↦ e^{c} ∗ x in M[s,ds] ⊗ A; c is keyed ('v*s^i', a) with i ≥ 1."""
    T = T or A.nilpotency
    Ms, _ = path_algebra(M, T)
    return vclean(gauge_action(Ms, A, c, forms_const(x, 0)))


def alpha_preimage(M: Dgla, A: ArtinLocalAlgebra, gamma: Mapping, T: int | None = None) -> tuple[dict, dict]:
    """Recover (x, c) from an MC element of M[s,ds] ⊗ A."""
    T = T or A.nilpotency
    Ms, _ = path_algebra(M, T)
    x = forms_evaluate(gamma, 0)
    c = solve_path_generator(Ms, A, forms_ds_part(gamma), T)
    return x, c


def alpha_tangent_rank(M: Dgla, T: int) -> tuple[int, int]:
    """(rank, dim source) of (x, c) ↦ x − dc on Z¹(M) ⊕ C⁰."""
    Ms, omega = path_algebra(M, T)
    from .exactalg import span_basis
    z1 = nullspace([[M.dif({v: Fraction(1)}).get(t, Fraction(0)) for v in M.space.in_degree(1)]
                    for t in M.space.in_degree(2)], len(M.space.in_degree(1))) if M.space.in_degree(2) \
        else [[Fraction(int(i == j)) for j in range(len(M.space.in_degree(1)))] for i in range(len(M.space.in_degree(1)))]
    labs1 = M.space.in_degree(1)
    images = []
    for vec in z1:
        x = {v: c for v, c in zip(labs1, vec) if c}
        images.append({f"{v}*1": c for v, c in x.items()})
    for v in M.space.in_degree(0):
        for i in range(1, T + 1):
            lab = f"{v}*{'s' if i == 1 else f's^{i}'}"
            images.append(vscale(Ms.dif({lab: Fraction(1)}), -1))
    targets = Ms.space.in_degree(1)
    from .exactalg import rank
    rows = [[im.get(t, Fraction(0)) for t in targets] for im in images]
    return (rank(rows, len(targets)) if rows else 0), len(images)


# ------------------------------------------------------- random elements

def _linear_part(host):
    """(degree-0 suspended labels, degree-1 suspended labels, q₁ as a function)."""
    if isinstance(host, Dgla):
        return (list(host.space.in_degree(1)), list(host.space.in_degree(2)),
                lambda v: vscale(host.dif({v: Fraction(1)}), -1))
    V = _linf(host)
    return list(V.susp.in_degree(0)), list(V.susp.in_degree(1)), lambda v: V.q(1, [v])


def random_mc(host, A: ArtinLocalAlgebra, rng, density: float = 0.5, span: int = 2) -> McElement | None:
    """A random MC element built weight by weight, or None if obstructed.

    At each weight the new component solves q₁(γ_w) = −R_w and adds a random
    q₁-cocycle; the choice is exact throughout.
    """
    src, tgt, q1 = _linear_part(host)
    cols = [q1(v) for v in src]
    rows = [[c.get(t, Fraction(0)) for c in cols] for t in tgt]
    kernel = nullspace(rows, len(src)) if tgt else [[Fraction(int(i == j)) for j in range(len(src))] for i in range(len(src))]
    gamma: dict = {}
    for w in range(1, A.max_weight() + 1):
        res = mc_residual(McElement(host, A, gamma)) if gamma else {}
        for a in [b for b in A.basis if A.weight(b) == w]:
            R = {v: c for (v, b), c in res.items() if b == a}
            sol = solve(rows, [-R.get(t, Fraction(0)) for t in tgt], len(src)) if R else [Fraction(0)] * len(src)
            if sol is None:
                return None
            vec = list(sol)
            for k in kernel:
                if rng.random() < density:
                    c = rng.randint(-span, span)
                    vec = [x + c * y for x, y in zip(vec, k)]
            for v, c in zip(src, vec):
                if c:
                    gamma[(v, a)] = c
    out = McElement(host, A, gamma)
    if not is_mc_element(out):
        raise InternalInconsistency("random MC construction failed")
    return out


def random_gauge(host, A: ArtinLocalAlgebra, rng, density: float = 0.4, span: int = 2) -> dict:
    eng = _engine(host, A, "gauge")
    p: dict = {}
    for e, _ in eng.directions():
        if rng.random() < density:
            vacc(p, e, rng.randint(-span, span))
    return vclean(p)
