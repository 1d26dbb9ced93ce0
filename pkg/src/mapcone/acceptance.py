"""The ten acceptance criteria as callable checks with a fixed default seed."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .artin import standard, truncation_extension, dual_to_t3
from .cone import _table, bernoulli, bernoulli_classical, bernoulli_series, build_cone, compare_with_oracle
from .dgla import SubcomplexPair
from .exactalg import CheckResult
from .fixtures import random_injective_pairs, random_morphisms, remark_pairs
from .grassmann import (
    GrassSetup, NotMaurerCartan, Submodule, compare_routes, equal_mod_aut0,
    gauge_equivalent_grass, membership_by_defect, membership_by_submodule, random_grass,
    random_hom0, tangent_dimension_cone, tangent_dimension_direct, tangent_dimension_formula,
)
from .linfty import check_linfty
from .mcdef import (
    McElement, act_gauge, compare_cone_residuals, gauge_equivalent, homotopy_equivalent,
    is_mc_element, random_gauge, random_mc,
)
from .period import (
    GaussManinSetup, conjugated_differential_check, first_order_check, kodaira_check,
    period_map, shipped_model, transversality_check,
)

DEFAULT_SEED = 20240601
STANDARD_ARTIN = ("eps", "xy", "t2", "t3", "t4", "t5", "t6")


@dataclass
class CriterionResult:
    number: int
    title: str
    ok: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"criterion {self.number:2d} [{'PASS' if self.ok else 'FAIL'}] {self.title}"


def _timed(number: int, title: str, fn) -> CriterionResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    return CriterionResult(number, title, ok, detail, time.perf_counter() - t0)


# --------------------------------------------------------------- 1

def criterion_1(seed: int = DEFAULT_SEED) -> CriterionResult:
    def run():
        _table.cache_clear()
        t0 = time.perf_counter()
        bad = [n for n in range(21) if bernoulli(n) != bernoulli_classical(n)]
        series = (bernoulli_series(2), bernoulli_series(4))
        elapsed = time.perf_counter() - t0
        ok = not bad and series == (Fraction(1, 12), Fraction(-1, 720)) and elapsed < 1.0
        return ok, {"mismatches": bad, "x^2 coefficient": str(series[0]), "x^4 coefficient": str(series[1]),
                    "under_one_second": elapsed < 1.0}
    return _timed(1, "Bernoulli recursion equals the binomial recurrence, n <= 20", run)


# --------------------------------------------------------------- 2, 3

def criterion_2(seed: int = DEFAULT_SEED) -> CriterionResult:
    def run():
        t0 = time.perf_counter()
        fams = random_morphisms(seed)
        fails = []
        for name, chi in fams:
            r = check_linfty(build_cone(chi, 4).linf, 4)
            if not r.ok:
                fails.append((name, str(r.witness)))
        elapsed = time.perf_counter() - t0
        return (len(fams) >= 20 and not fails and elapsed < 120), {
            "morphisms": len(fams), "failures": fails, "under_two_minutes": elapsed < 120}
    return _timed(2, "L-infinity relations on cones up to arity 4", run)


def criterion_3(seed: int = DEFAULT_SEED) -> CriterionResult:
    def run():
        fails = []
        fams = random_morphisms(seed)
        for name, chi in fams:
            cone = build_cone(chi, 5)
            for n in range(2, 6):
                r = compare_with_oracle(cone, n)
                if not r.ok:
                    fails.append((name, n, str(r.witness)))
        return not fails, {"morphisms": len(fams), "failures": fails}
    return _timed(3, "closed-form Bernoulli brackets equal the transfer oracle, arities 2-5", run)


# --------------------------------------------------------------- 4, 5

def _mc_hosts(seed: int):
    fams = random_morphisms(seed)
    hosts = []
    for name, chi in fams:
        cone = build_cone(chi, 6)
        if cone.space.dim(1) or cone.space.dim(0):
            hosts.append((name, cone))
    return hosts


def criterion_4(seed: int = DEFAULT_SEED, target: int = 50) -> CriterionResult:
    def run():
        rng = random.Random(seed)
        hosts = _mc_hosts(seed)
        algebras = [standard(n) for n in ("eps", "xy", "t3", "t4")]
        pairs = agree = equiv = 0
        fails = []
        tries = 0
        while pairs < target and tries < 20 * target:
            tries += 1
            name, host = hosts[tries % len(hosts)]
            A = algebras[tries % len(algebras)]
            g0 = random_mc(host, A, rng)
            if g0 is None or g0.is_zero and rng.random() < 0.5:
                continue
            if rng.random() < 0.5:
                g1 = act_gauge(g0, random_gauge(host, A, rng))
            else:
                g1 = random_mc(host, A, rng)
                if g1 is None:
                    continue
            a = gauge_equivalent(g0, g1) is not None
            b = homotopy_equivalent(g0, g1) is not None
            pairs += 1
            equiv += a
            if a == b:
                agree += 1
            else:
                fails.append((name, A.name))
        return (pairs >= target and agree == pairs and 0 < equiv < pairs), {
            "pairs": pairs, "agree": agree, "equivalent": equiv, "failures": fails}
    return _timed(4, "gauge and homotopy equivalence agree", run)


def _random_cone_input(cone, A, rng) -> dict:
    out = {}
    for v in cone.linf.susp.in_degree(0):
        for a in A.basis:
            if rng.random() < 0.5:
                c = rng.randint(-2, 2)
                if c:
                    out[(v, a)] = Fraction(c)
    return out


def criterion_5(seed: int = DEFAULT_SEED, target: int = 100) -> CriterionResult:
    def run():
        rng = random.Random(seed + 5)
        hosts = _mc_hosts(seed)
        algebras = [standard(n) for n in ("eps", "xy", "t3", "t4")]
        count = 0
        fails = []
        tries = 0
        while count < target and tries < 50 * target:
            tries += 1
            name, cone = hosts[tries % len(hosts)]
            A = algebras[tries % len(algebras)]
            g = _random_cone_input(cone, A, rng)
            if not g or is_mc_element(McElement(cone, A, g)):
                continue
            count += 1
            r = compare_cone_residuals(cone, A, g)
            if not r.ok:
                fails.append((name, A.name))
        return (count >= target and not fails), {"inputs": count, "failures": fails}
    return _timed(5, "cone residual equals the two-equation system", run)


# --------------------------------------------------------------- 6, 7

def criterion_6(seed: int = DEFAULT_SEED, samples: int = 100, orbit_samples: int = 10) -> CriterionResult:
    def run():
        rng = random.Random(seed + 6)
        detail: dict = {"membership": {}, "orbits": {}}
        ok = True
        for pname, pair in remark_pairs():
            st = GrassSetup(pair)
            for aname in STANDARD_ARTIN:
                A = standard(aname)
                agree = members = 0
                for _ in range(samples):
                    a = random_hom0(st, A, rng)
                    m1 = membership_by_defect(st, A, a)
                    m2 = membership_by_submodule(st, A, a)
                    agree += m1 == m2
                    members += m1
                ok &= agree == samples
                detail["membership"][f"{pname}/{aname}"] = {"agree": agree, "members": members}
        pair = dict(remark_pairs())["ker_im"]
        st = GrassSetup(pair)
        for aname in ("eps", "t3"):
            A = standard(aname)
            elems = []
            while len(elems) < orbit_samples:
                e = random_grass(st, A, rng)
                if e is not None:
                    elems.append(e)
            counts = {"both": 0, "neither": 0, "mismatch": 0}
            for i in range(len(elems)):
                for j in range(i, len(elems)):
                    g = gauge_equivalent_grass(elems[i], elems[j]) is not None
                    s = equal_mod_aut0(elems[i], elems[j]) is not None
                    counts["both" if g and s else "neither" if not g and not s else "mismatch"] += 1
            ok &= counts["mismatch"] == 0 and counts["both"] > 0 and counts["neither"] > 0
            detail["orbits"][aname] = counts
        return ok, detail
    return _timed(6, "membership routes agree; gauge orbits match submodules mod Aut0", run)


def criterion_7(seed: int = DEFAULT_SEED, count: int = 10, per_algebra: int = 2) -> CriterionResult:
    def run():
        rng = random.Random(seed + 7)
        pairs = random_injective_pairs(seed, count)
        rows = []
        ok = len(pairs) >= 10
        compared = 0
        for pair in pairs:
            st = GrassSetup(pair)
            dims = (tangent_dimension_direct(st), tangent_dimension_formula(st), tangent_dimension_cone(st))
            rows.append(dims)
            ok &= len(set(dims)) == 1
            for aname in ("eps", "t3", "xy"):
                A = standard(aname)
                for _ in range(per_algebra):
                    e = random_grass(st, A, rng)
                    if e is None:
                        continue
                    compared += 1
                    ok &= compare_routes(e).ok and compare_routes(e, rng=rng).ok
        return ok and compared > 0, {"tangent_dims": rows, "elements_compared": compared}
    return _timed(7, "tangent dimension formula and the two cohomology routes", run)


# --------------------------------------------------------------- 8, 9, 10

def elliptic_expected(model, B) -> Submodule:
    st = model.setup(1)
    cls = lambda lab: st.classify({lab: Fraction(1)}, model.alg.space.degree(lab))
    one = {(h, "1"): c for h, c in cls("dz").items()}
    for h, c in cls("dzb").items():
        one[(h, "t")] = one.get((h, "t"), 0) + c
    top = {(h, "1"): c for h, c in cls("dz^dzb").items()}
    return Submodule(st.hspace, B, [one, top])


def criterion_8(seed: int = DEFAULT_SEED) -> CriterionResult:
    def run():
        t0 = time.perf_counter()
        model = shipped_model("elliptic")
        B = standard("t2")
        res = period_map(model, 1, B, {("dzb.d/dz", "t"): Fraction(1)})
        same = res.submodule == elliptic_expected(model, B)
        fo = [first_order_check(model, p) for p in (0, 1, 2)]
        elapsed = time.perf_counter() - t0
        ok = same and all(r.ok for r in fo) and elapsed < 1.0
        return ok, {"generators": {str(k): v for k, v in res.generators().items()},
                    "first_order": [r.ok for r in fo], "under_one_second": elapsed < 1.0}
    return _timed(8, "period map on the elliptic model and dP = i", run)


DOLBEAULT_XI = {
    "elliptic": {("dzb.d/dz", "t"): Fraction(1)},
    "torus2": {("dzb1.d/dz1", "t"): Fraction(1), ("dzb2.d/dz1", "t"): Fraction(2),
               ("dzb1.d/dz2", "t"): Fraction(-1)},
}


def criterion_9(seed: int = DEFAULT_SEED) -> CriterionResult:
    def run():
        ok = True
        detail = {}
        for name, xi in DOLBEAULT_XI.items():
            model = shipped_model(name)
            B = standard("t2")
            row = {"conjugated": conjugated_differential_check(model, B, xi).ok}
            for scaling in ("weight", "constant"):
                gm = GaussManinSetup(B, scaling=scaling)
                for p in range(0, model.top_holomorphic + 1):
                    rep = transversality_check(gm, model, xi, p)
                    row[f"{scaling}/p={p}"] = rep.ok
                    ok &= rep.ok
            ok &= row["conjugated"]
            detail[name] = row
        return ok, detail
    return _timed(9, "conjugated differential identity and transversality", run)


def criterion_10(seed: int = DEFAULT_SEED) -> CriterionResult:
    def run():
        model = shipped_model("affine")
        xi = {("q1.d/p1", "t"): Fraction(1), ("q2.d/p2", "t"): Fraction(1)}
        rep = kodaira_check(model, 1, truncation_extension(2), xi)
        obstructed = rep.source.lifted is None and any(rep.source.class_coords)
        ok = obstructed and rep.compatible and rep.target_unobstructed and rep.kernel_property
        return ok, {"source_class": [str(c) for c in rep.source.class_coords],
                    "pushed_class": [str(c) for c in rep.image],
                    "target_class": [str(c) for c in rep.target.class_coords],
                    "target_unobstructed": rep.target_unobstructed}
    return _timed(10, "obstructions push forward along the period morphism and die", run)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


def run_all(seed: int = DEFAULT_SEED) -> list[CriterionResult]:
    return [CRITERIA[i](seed) for i in sorted(CRITERIA)]
