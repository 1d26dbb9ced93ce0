"""Seeded families of small DGLA morphisms and subcomplex pairs used by tests and the CLI."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .dgla import (
    Dgla, DglaMorphism, SubcomplexPair, abelian_dgla, affine_line, change_basis,
    heisenberg, identity_morphism, preserving_subalgebra, quotient_morphism,
    random_complex, random_subcomplex, rank_one_complex, restriction_morphism, sl2,
    sub_dgla, tensor_exterior, zero_morphism,
)
from .exactalg import GradedMap, nullspace

MAX_DIM = 3
DEGREE_RANGE = (-2, 3)


def small_enough(g: Dgla) -> bool:
    lo, hi = DEGREE_RANGE
    return all(lo <= d <= hi and g.space.dim(d) <= MAX_DIM for d in g.space.degrees())


def lie_inclusion() -> DglaMorphism:
    """aff ↪ sl2, h ↦ h/2, e ↦ e."""
    return DglaMorphism(affine_line(), sl2(), GradedMap(affine_line().space, sl2().space, 0,
                                                        {"h": {"h": Fraction(1, 2)}, "e": {"e": Fraction(1)}}))


def unit_inclusion(g: Dgla, k: int) -> DglaMorphism:
    """g → g ⊗ Λ(x), a ↦ a ⊗ 1."""
    gx = tensor_exterior(g, k)
    return DglaMorphism(g, gx, GradedMap(g.space, gx.space, 0, {l: {l: Fraction(1)} for l in g.labels}))


def augmentation(g: Dgla, k: int) -> DglaMorphism:
    """g ⊗ Λ(x) → g, x ↦ 0."""
    gx = tensor_exterior(g, k)
    return DglaMorphism(gx, g, GradedMap(gx.space, g.space, 0, {l: {l: Fraction(1)} for l in g.labels}))


def heisenberg_center() -> DglaMorphism:
    h = heisenberg()
    z, inc = sub_dgla(h, {0: [{"z": Fraction(1)}]}, "c", "center")
    return inc


def heisenberg_quotient() -> DglaMorphism:
    h = heisenberg()
    from .exactalg import GradedVectorSpace
    Q = abelian_dgla(GradedVectorSpace({0: ["x", "y"]}), name="ab2")
    return DglaMorphism(h, Q, GradedMap(h.space, Q.space, 0, {"x": {"x": Fraction(1)}, "y": {"y": Fraction(1)}}))


def random_chain_map(rng: random.Random, dims_s: dict, dims_t: dict) -> DglaMorphism:
    """A random chain map between random complexes, as abelian DGLAs."""
    S = random_complex(rng, dims_s, "a")
    T = random_complex(rng, dims_t, "b")
    unknowns = [(s, t) for s in S.space.labels for t in T.space.labels if S.space.degree(s) == T.space.degree(t)]
    rows = []
    for s in S.space.labels:
        for t in T.space.labels:
            if T.space.degree(t) != S.space.degree(s) + 1:
                continue
            # (f d − d f)(s) at t, linear in f
            row = []
            ds = S.d.apply({s: Fraction(1)})
            for (a, b) in unknowns:
                c = Fraction(0)
                if b == t:
                    c += ds.get(a, 0)
                if a == s:
                    c -= T.d.apply({b: Fraction(1)}).get(t, 0)
                row.append(c)
            rows.append(row)
    ker = nullspace(rows, len(unknowns)) if rows else [
        [Fraction(int(i == j)) for j in range(len(unknowns))] for i in range(len(unknowns))]
    coeffs = [Fraction(0)] * len(unknowns)
    for k in ker:
        c = rng.randint(-2, 2)
        coeffs = [x + c * y for x, y in zip(coeffs, k)]
    cols: dict = {}
    for (a, b), c in zip(unknowns, coeffs):
        if c:
            cols.setdefault(a, {})[b] = c
    return DglaMorphism(abelian_dgla(S.space, S.d, "S"), abelian_dgla(T.space, T.d, "T"),
                        GradedMap(S.space, T.space, 0, cols))


def _hom_morphisms(rng: random.Random, dims: dict) -> list[tuple[str, DglaMorphism]]:
    W = random_complex(rng, dims)
    V = random_subcomplex(rng, W)
    pair = SubcomplexPair(W, V)
    LVW, inc = preserving_subalgebra(pair)
    out = [("preserving_inclusion", inc)]
    _, res = restriction_morphism(pair, LVW, inc)
    out.append(("restriction", res))
    _, quo = quotient_morphism(pair, LVW, inc)
    out.append(("quotient", quo))
    return out


def random_morphisms(seed: int = 0, count: int = 24) -> list[tuple[str, DglaMorphism]]:
    """At least ``count`` DGLA morphisms with per-degree dims ≤ 3 in degrees [−2, 3]."""
    rng = random.Random(seed)
    out: list[tuple[str, DglaMorphism]] = [
        ("aff_in_sl2", lie_inclusion()),
        ("heis_center", heisenberg_center()),
        ("heis_quotient", heisenberg_quotient()),
        ("zero_sl2_heis", zero_morphism(sl2(), heisenberg())),
        ("identity_aff", identity_morphism(affine_line())),
        ("aff_in_sl2_unit", unit_inclusion(sl2(), 1).compose(lie_inclusion())),
    ]
    for g in (affine_line(), heisenberg(), sl2()):
        for k in (1, 2, -1):
            out.append((f"unit_{g.name}_{k}", unit_inclusion(g, k)))
        out.append((f"augment_{g.name}_1", augmentation(g, 1)))
    while len(out) < count + 8:
        kind = rng.choice(["basis", "chain", "chain", "hom"])
        if kind == "basis":
            name, f = rng.choice(out)
            out.append((f"{name}_rebased", _rebase_source(f, rng)))
        elif kind == "chain":
            ds = {d: rng.randint(0, 2) for d in range(rng.randint(-2, 0), rng.randint(1, 3))}
            dt = {d: rng.randint(0, 2) for d in ds}
            ds = {d: n for d, n in ds.items() if n} or {0: 1}
            dt = {d: n for d, n in dt.items() if n} or {0: 1}
            out.append(("chain_map", random_chain_map(rng, ds, dt)))
        elif kind == "hom":
            out.extend(_hom_morphisms(rng, {0: 1, 1: 1} if rng.random() < 0.5 else {0: 1, 1: 1, 2: 1}))
    keep = [(n, f) for n, f in out if small_enough(f.source) and small_enough(f.target)]
    return keep[: max(count, len(keep))]


def _rebase_source(f: DglaMorphism, rng: random.Random) -> DglaMorphism:
    """f ∘ iso for a random unitriangular basis change of the source."""
    _, iso = change_basis(f.source, rng)
    return f.compose(iso)


# -------------------------------------------------------- subcomplex pairs

def remark_pairs() -> list[tuple[str, SubcomplexPair]]:
    """Lines V⁰, V¹ in the rank-one complex W⁰ = W¹ = K² (w0 ↦ w2)."""
    W = rank_one_complex()
    one = Fraction(1)
    return [
        ("ker_im", SubcomplexPair(W, {0: [{"w1": one}], 1: [{"w2": one}]})),
        ("ker_other", SubcomplexPair(W, {0: [{"w1": one}], 1: [{"w3": one}]})),
        ("other_im", SubcomplexPair(W, {0: [{"w0": one}], 1: [{"w2": one}]})),
        ("ker_only", SubcomplexPair(W, {0: [{"w1": one}]})),
    ]


def random_injective_pairs(seed: int = 0, count: int = 10) -> list[SubcomplexPair]:
    """Pairs V ⊆ W with H*(V) → H*(W) injective."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        W = random_complex(rng, {0: rng.randint(1, 3), 1: rng.randint(1, 3), 2: rng.randint(0, 2)})
        out.append(SubcomplexPair(W, random_subcomplex(rng, W, injective=True)))
    return out


REGISTRY: dict[str, Callable] = {
    "morphisms": random_morphisms,
    "remark_pairs": remark_pairs,
    "injective_pairs": random_injective_pairs,
}
