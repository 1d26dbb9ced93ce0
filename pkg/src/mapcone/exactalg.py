"""Exact rational linear algebra on graded vector spaces.

Vectors are sparse dicts ``{label: Fraction}``.  A graded space owns an
ordered list of labels, each with an integer degree.  Everything downstream
(brackets, maps, cohomology) is stored as structure constants on labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

Vec = dict  # label -> Fraction


def frac(x) -> Fraction:
    """Parse an int, Fraction or "p/q" string into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; use exact fractions")
    return Fraction(x)


def fstr(x: Fraction) -> str:
    return str(frac(x))


# ---------------------------------------------------------------- vectors

def vclean(v: Mapping) -> Vec:
    return {k: c for k, c in v.items() if c != 0}


def vadd(a: Mapping, b: Mapping, scale=1) -> Vec:
    out = dict(a)
    s = frac(scale)
    if s == 0:
        return out
    for k, c in b.items():
        x = out.get(k, 0) + s * c
        if x:
            out[k] = x
        else:
            out.pop(k, None)
    return out


def vacc(acc: dict, b: Mapping, scale=1) -> None:
    """In-place ``acc += scale * b``."""
    if scale == 0:
        return
    for k, c in b.items():
        x = acc.get(k, 0) + scale * c
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)


def vscale(a: Mapping, s) -> Vec:
    s = frac(s)
    if s == 0:
        return {}
    return {k: s * c for k, c in a.items()}


def vsum(vs: Iterable[Mapping]) -> Vec:
    acc: dict = {}
    for v in vs:
        vacc(acc, v)
    return acc


def vequal(a: Mapping, b: Mapping) -> bool:
    return vclean(a) == vclean(b)


# ---------------------------------------------------------- linear algebra
# Thin wrappers over sympy's DomainMatrix on QQ; inputs and outputs are
# lists of Fraction rows.

def _to_dm(rows: Sequence[Sequence], ncols: int) -> DomainMatrix:
    data = [[QQ(int(frac(x).numerator), int(frac(x).denominator)) for x in r] for r in rows]
    return DomainMatrix(data, (len(rows), ncols), QQ)


def _from_q(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[Fraction]], tuple[int, ...]]:
    if not rows or ncols == 0:
        return [], ()
    R, piv = _to_dm(rows, ncols).rref()
    out = [[_from_q(x) for x in r] for r in R.to_list()[: len(piv)]]
    return out, tuple(piv)


def rank(rows: Sequence[Sequence], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows @ x = 0}, one vector per free column."""
    R, piv = rref(rows, ncols)
    free = [j for j in range(ncols) if j not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, p in enumerate(piv):
            x[p] = -R[i][f]
        basis.append(x)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence, ncols: int) -> list[Fraction] | None:
    """One solution of rows @ x = rhs (free variables set to 0), or None."""
    if not rows:
        return [Fraction(0)] * ncols
    aug = [list(r) + [frac(b)] for r, b in zip(rows, rhs)]
    R, piv = rref(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(piv):
        x[p] = R[i][ncols]
    return x


class LinearSolver:
    """Solve rows @ x = b for many right-hand sides after one elimination.

    Row-reduces [rows | I] once; the right block E satisfies E·rows = R.
    """

    def __init__(self, rows: Sequence[Sequence], ncols: int):
        self.m, self.n = len(rows), ncols
        if not self.m:
            self.E, self.piv = [], ()
            return
        aug = [list(r) + [Fraction(int(i == j)) for j in range(self.m)] for i, r in enumerate(rows)]
        R, piv = rref(aug, ncols + self.m)
        self.piv = piv
        self.E = [r[ncols:] for r in R]
        # column-sparse copy of E: b_j contributes to rows listed here
        self._ecols: list = [[] for _ in range(self.m)]
        for r, row in enumerate(self.E):
            for j, e in enumerate(row):
                if e:
                    self._ecols[j].append((r, e))

    def solve_sparse(self, b: Mapping[int, Fraction]) -> list[Fraction] | None:
        acc: dict = {}
        for j, c in b.items():
            for r, e in self._ecols[j] if self.m else ():
                acc[r] = acc.get(r, 0) + e * c
        x = [Fraction(0)] * self.n
        for r, y in acc.items():
            if not y:
                continue
            p = self.piv[r] if r < len(self.piv) else self.n
            if p >= self.n:
                return None
            x[p] = Fraction(y)
        return x


def independent_subset(vectors: Sequence[Sequence], ncols: int) -> list[int]:
    """Indices of the first linearly independent vectors, in order."""
    if not vectors:
        return []
    cols = [[v[i] for v in vectors] for i in range(ncols)]
    return list(rref(cols, len(vectors))[1])


class Basis:
    """Coordinates with respect to a list of sparse vectors in a labeled space."""

    def __init__(self, vectors: Sequence[Mapping], labels: Sequence[str]):
        self.vectors = [vclean(v) for v in vectors]
        self.labels = list(labels)
        self._index = {l: i for i, l in enumerate(self.labels)}
        self._rows = [[v.get(l, Fraction(0)) for v in self.vectors] for l in self.labels]
        self._solver = None

    def dense(self, v: Mapping) -> list[Fraction]:
        out = [Fraction(0)] * len(self.labels)
        for k, c in v.items():
            out[self._index[k]] = c
        return out

    def coords(self, v: Mapping) -> list[Fraction] | None:
        if not self.vectors:
            return [] if not vclean(v) else None
        if self._solver is None:
            self._solver = LinearSolver(self._rows, len(self.vectors))
        return self._solver.solve_sparse({self._index[k]: frac(c) for k, c in v.items() if c})

    def contains(self, v: Mapping) -> bool:
        return self.coords(v) is not None

    def combine(self, coords: Sequence) -> Vec:
        acc: dict = {}
        for c, v in zip(coords, self.vectors):
            vacc(acc, v, frac(c))
        return acc


def span_basis(vectors: Sequence[Mapping], labels: Sequence[str]) -> list[Vec]:
    """Extract a basis (first independent vectors) of the span."""
    idx = {l: i for i, l in enumerate(labels)}
    dense = []
    for v in vectors:
        row = [Fraction(0)] * len(labels)
        for k, c in v.items():
            row[idx[k]] = c
        dense.append(row)
    keep = independent_subset(dense, len(labels))
    return [vclean(vectors[i]) for i in keep]


def intersect_spans(a: Sequence[Mapping], b: Sequence[Mapping], labels: Sequence[str]) -> list[Vec]:
    """Basis of span(a) ∩ span(b)."""
    if not a or not b:
        return []
    idx = {l: i for i, l in enumerate(labels)}
    n = len(a) + len(b)
    rows = [[Fraction(0)] * n for _ in labels]
    for j, v in enumerate(a):
        for k, c in v.items():
            rows[idx[k]][j] = c
    for j, v in enumerate(b):
        for k, c in v.items():
            rows[idx[k]][len(a) + j] = -c
    out = []
    for x in nullspace(rows, n):
        acc: dict = {}
        for j, v in enumerate(a):
            vacc(acc, v, x[j])
        if acc:
            out.append(acc)
    return span_basis(out, labels)


# ------------------------------------------------------------ graded spaces

@dataclass(frozen=True)
class GradedVectorSpace:
    """Finite-dimensional Z-graded space with named basis vectors."""

    basis: tuple  # tuple of (degree, tuple of labels), sorted by degree

    def __init__(self, basis: Mapping[int, Sequence[str]] | Sequence = ()):
        items = basis.items() if isinstance(basis, Mapping) else basis
        norm = tuple(sorted((int(d), tuple(ls)) for d, ls in items if len(ls)))
        seen = set()
        for _, ls in norm:
            for l in ls:
                if l in seen:
                    raise ValueError(f"duplicate basis label {l!r}")
                seen.add(l)
        object.__setattr__(self, "basis", norm)

    @property
    def labels(self) -> list[str]:
        return [l for _, ls in self.basis for l in ls]

    @property
    def _deg(self) -> dict:
        cache = self.__dict__.get("_degcache")
        if cache is None:
            cache = {l: d for d, ls in self.basis for l in ls}
            object.__setattr__(self, "_degcache", cache)
        return cache

    @property
    def order(self) -> dict:
        cache = self.__dict__.get("_ordcache")
        if cache is None:
            cache = {l: i for i, l in enumerate(self.labels)}
            object.__setattr__(self, "_ordcache", cache)
        return cache

    def degree(self, label: str) -> int:
        return self._deg[label]

    def __contains__(self, label) -> bool:
        return label in self._deg

    def degrees(self) -> list[int]:
        return [d for d, _ in self.basis]

    def in_degree(self, d: int) -> tuple:
        for e, ls in self.basis:
            if e == d:
                return ls
        return ()

    def dim(self, d: int | None = None) -> int:
        if d is None:
            return sum(len(ls) for _, ls in self.basis)
        return len(self.in_degree(d))

    def shift(self, n: int) -> "GradedVectorSpace":
        """V[n]: degree d becomes d - n."""
        return GradedVectorSpace({d - n: ls for d, ls in self.basis})

    def relabel(self, prefix: str) -> "GradedVectorSpace":
        return GradedVectorSpace({d: [prefix + l for l in ls] for d, ls in self.basis})

    def direct_sum(self, other: "GradedVectorSpace") -> "GradedVectorSpace":
        out: dict = {}
        for d, ls in self.basis + other.basis:
            out.setdefault(d, []).extend(ls)
        return GradedVectorSpace(out)

    def vec_degree(self, v: Mapping) -> int | None:
        """Degree of a homogeneous nonzero vector, None for zero; raises if mixed."""
        degs = {self.degree(k) for k, c in v.items() if c}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("vector is not homogeneous")
        return degs.pop()


# -------------------------------------------------------------- graded maps

@dataclass(frozen=True)
class GradedMap:
    """Homogeneous linear map; ``cols[s]`` is the image of basis vector s."""

    source: GradedVectorSpace
    target: GradedVectorSpace
    degree: int
    cols: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "cols", {s: vclean(v) for s, v in self.cols.items() if vclean(v)})

    def check(self) -> list[str]:
        errs = []
        for s, v in self.cols.items():
            if s not in self.source:
                errs.append(f"unknown source label {s}")
                continue
            for t in v:
                if t not in self.target:
                    errs.append(f"unknown target label {t}")
                elif self.target.degree(t) != self.source.degree(s) + self.degree:
                    errs.append(f"{s}->{t} has wrong degree")
        return errs

    def apply(self, v: Mapping) -> Vec:
        acc: dict = {}
        for k, c in v.items():
            col = self.cols.get(k)
            if col:
                vacc(acc, col, c)
        return acc

    def __call__(self, v: Mapping) -> Vec:
        return self.apply(v)

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self ∘ other."""
        return GradedMap(other.source, self.target, self.degree + other.degree,
                         {s: self.apply(v) for s, v in other.cols.items()})

    def __add__(self, other: "GradedMap") -> "GradedMap":
        cols = dict(self.cols)
        for s, v in other.cols.items():
            cols[s] = vadd(cols.get(s, {}), v)
        return GradedMap(self.source, self.target, self.degree, cols)

    def scale(self, c) -> "GradedMap":
        return GradedMap(self.source, self.target, self.degree,
                         {s: vscale(v, c) for s, v in self.cols.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedMap) and self.degree == other.degree
                and self.cols == other.cols)

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.cols))))

    def is_zero(self) -> bool:
        return not self.cols

    def block(self, d: int) -> list[list[Fraction]]:
        """Matrix from source degree d to target degree d + degree."""
        src = self.source.in_degree(d)
        tgt = self.target.in_degree(d + self.degree)
        return [[self.cols.get(s, {}).get(t, Fraction(0)) for s in src] for t in tgt]

    @staticmethod
    def identity(V: GradedVectorSpace) -> "GradedMap":
        return GradedMap(V, V, 0, {l: {l: Fraction(1)} for l in V.labels})

    @staticmethod
    def zero(V: GradedVectorSpace, W: GradedVectorSpace, degree: int = 0) -> "GradedMap":
        return GradedMap(V, W, degree, {})

    @staticmethod
    def from_blocks(V, W, degree, blocks: Mapping[int, Sequence[Sequence]]) -> "GradedMap":
        cols: dict = {}
        for d, mat in blocks.items():
            src = V.in_degree(d)
            tgt = W.in_degree(d + degree)
            for j, s in enumerate(src):
                cols[s] = {t: frac(mat[i][j]) for i, t in enumerate(tgt) if mat[i][j]}
        return GradedMap(V, W, degree, cols)


# ------------------------------------------------------------- permutations

@dataclass(frozen=True)
class Permutation:
    """Bijection of {1..n}; ``images[i-1] = sigma(i)``."""

    images: tuple

    def __post_init__(self):
        imgs = tuple(int(x) for x in self.images)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise ValueError(f"not a permutation: {imgs}")
        object.__setattr__(self, "images", imgs)

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def compose(self, other: "Permutation") -> "Permutation":
        """(self ∘ other)(i) = self(other(i))."""
        return Permutation(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, s in enumerate(self.images, 1):
            inv[s - 1] = i
        return Permutation(tuple(inv))

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(1, n + 1)))

    @staticmethod
    def transposition(n: int, i: int, j: int) -> "Permutation":
        imgs = list(range(1, n + 1))
        imgs[i - 1], imgs[j - 1] = imgs[j - 1], imgs[i - 1]
        return Permutation(tuple(imgs))


def koszul_sign(sigma: Permutation, degrees: Sequence[int]) -> int:
    """ε(σ) with v_σ(1)⊙…⊙v_σ(n) = ε(σ) v_1⊙…⊙v_n.

    Bubble-sorts the word (σ(1),…,σ(n)) back to the identity; every adjacent
    swap of v_i past v_j contributes (−1)^{deg v_i · deg v_j}.
    """
    if len(degrees) != sigma.n:
        raise ValueError("degree list length does not match the permutation")
    word = list(sigma.images)
    sign = 1
    n = len(word)
    for end in range(n - 1, 0, -1):
        for i in range(end):
            if word[i] > word[i + 1]:
                if degrees[word[i] - 1] % 2 and degrees[word[i + 1] - 1] % 2:
                    sign = -sign
                word[i], word[i + 1] = word[i + 1], word[i]
    return sign


def positions_sign(order: Sequence[int], degrees: Sequence[int]) -> int:
    """Koszul sign of listing items in ``order`` (0-based indices)."""
    sign = 1
    for a in range(len(order)):
        da = degrees[order[a]] % 2
        if not da:
            continue
        for b in range(a + 1, len(order)):
            if order[a] > order[b] and degrees[order[b]] % 2:
                sign = -sign
    return sign


def unshuffles(k: int, m: int) -> list[Permutation]:
    """S(k, m): permutations increasing on the first k and the last m slots."""
    n = k + m
    out = []
    for first in combinations(range(1, n + 1), k):
        rest = [i for i in range(1, n + 1) if i not in first]
        out.append(Permutation(tuple(first) + tuple(rest)))
    return out


# ---------------------------------------------------- symmetric words

def sym_normalize(word: Sequence[str], space: GradedVectorSpace) -> tuple[int, tuple]:
    """Sort a word of basis labels into canonical order in ⊙ⁿ(space).

    Returns (sign, sorted word); sign 0 when an odd label repeats.
    """
    order = space.order
    keys = [order[w] for w in word]
    perm = sorted(range(len(word)), key=lambda i: keys[i])
    degs = [space.degree(w) for w in word]
    sign = positions_sign(perm, degs)
    out = tuple(word[i] for i in perm)
    for a, b in zip(out, out[1:]):
        if a == b and space.degree(a) % 2:
            return 0, out
    return sign, out


def sym_words(space: GradedVectorSpace, n: int, labels: Sequence[str] | None = None):
    """Canonical basis words of ⊙ⁿ(space) (odd labels never repeat)."""
    from itertools import combinations_with_replacement
    labels = list(space.labels if labels is None else labels)
    for w in combinations_with_replacement(labels, n):
        ok = True
        for a, b in zip(w, w[1:]):
            if a == b and space.degree(a) % 2:
                ok = False
                break
        if ok:
            yield w


# ------------------------------------------------------ multilinear maps

@dataclass(frozen=True)
class MultilinearMap:
    """f: V^{⊗k} → W of a fixed degree, stored on ordered basis tuples."""

    source: GradedVectorSpace
    target: GradedVectorSpace
    arity: int
    degree: int
    entries: Mapping = field(default_factory=dict)

    def value(self, word: tuple) -> Vec:
        return self.entries.get(tuple(word), {})

    def apply(self, vecs: Sequence[Mapping]) -> Vec:
        if len(vecs) != self.arity:
            raise ValueError("arity mismatch")
        acc: dict = {}
        _expand(vecs, 0, (), Fraction(1), lambda w, c: vacc(acc, self.value(w), c))
        return acc


def _expand(vecs, i, word, coeff, emit):
    if i == len(vecs):
        emit(word, coeff)
        return
    for k, c in vecs[i].items():
        _expand(vecs, i + 1, word + (k,), coeff * c, emit)


def multilinear_expand(vecs: Sequence[Mapping], emit: Callable) -> None:
    """Call emit(word, coeff) for every term of v_1 ⊗ … ⊗ v_k."""
    _expand(list(vecs), 0, (), Fraction(1), emit)


def decalage_sign(k: int, i: int, degrees: Sequence[int]) -> int:
    """(−1)^{k·i + Σ_j (k−j)·deg(v_j)}, degrees taken in the unshifted space."""
    e = k * i + sum((k - j) * d for j, d in enumerate(degrees, 1))
    return -1 if e % 2 else 1


def decalage(f: MultilinearMap, l: int) -> MultilinearMap:
    """dec(f): (V[1])^{⊗k} → W[l], of degree i + k − l."""
    k, i = f.arity, f.degree
    entries = {}
    for w, v in f.entries.items():
        if len(w) != k:
            raise ValueError("arity mismatch in structure constants")
        s = decalage_sign(k, i, [f.source.degree(x) for x in w])
        entries[w] = vscale(v, s)
    return MultilinearMap(f.source.shift(1), f.target.shift(l), k, i + k - l, entries)


def undecalage(g: MultilinearMap, l: int) -> MultilinearMap:
    """Inverse of :func:`decalage`."""
    k = g.arity
    i = g.degree - k + l
    src = g.source.shift(-1)
    entries = {}
    for w, v in g.entries.items():
        s = decalage_sign(k, i, [src.degree(x) for x in w])
        entries[w] = vscale(v, s)
    return MultilinearMap(src, g.target.shift(-l), k, i, entries)


# -------------------------------------------------------------- cohomology

@dataclass
class Cohomology:
    """Cohomology of (V, d) with chosen representatives.

    ``cocycles[n]``, ``boundaries[n]`` are bases of Z^n, B^n;
    ``reps[n]`` are cocycles completing B^n to Z^n (first independent ones
    in declared basis order).
    """

    space: GradedVectorSpace
    d: GradedMap
    cocycles: dict
    boundaries: dict
    reps: dict

    def dim(self, n: int) -> int:
        return len(self.reps.get(n, []))

    def dims(self) -> dict:
        return {n: len(r) for n, r in self.reps.items() if r}

    def total_dim(self) -> int:
        return sum(len(r) for r in self.reps.values())

    def classify(self, v: Mapping, n: int) -> list[Fraction]:
        """Coordinates of the class of cocycle v in degree n (w.r.t. reps)."""
        labels = self.space.in_degree(n)
        gens = self.reps.get(n, []) + self.boundaries.get(n, [])
        if not gens:
            if vclean(v):
                raise ValueError("not a cocycle")
            return []
        c = Basis(gens, labels).coords(v)
        if c is None:
            raise ValueError("vector is not a cocycle")
        return c[: len(self.reps.get(n, []))]

    def is_coboundary(self, v: Mapping, n: int) -> bool:
        return Basis(self.boundaries.get(n, []), self.space.in_degree(n)).contains(v)

    def representative(self, coords: Sequence, n: int) -> Vec:
        return Basis(self.reps.get(n, []), self.space.in_degree(n)).combine(coords)


def cohomology(V: GradedVectorSpace, d: GradedMap, check: bool = True) -> Cohomology:
    if d.degree != 1:
        raise ValueError("differential must have degree 1")
    if check and not d.compose(d).is_zero():
        raise ValueError("d∘d ≠ 0")
    cocycles, boundaries, reps = {}, {}, {}
    for n in V.degrees():
        labels = V.in_degree(n)
        mat = d.block(n)
        if mat:
            ker = nullspace(mat, len(labels))
        else:
            ker = [[Fraction(int(i == j)) for i in range(len(labels))] for j in range(len(labels))]
        Z = [vclean(dict(zip(labels, x))) for x in ker]
        prev = V.in_degree(n - 1)
        B = span_basis([d.apply({s: Fraction(1)}) for s in prev], labels) if prev else []
        gens = B + Z
        keep = independent_subset([[g.get(l, Fraction(0)) for l in labels] for g in gens], len(labels))
        R = [gens[i] for i in keep if i >= len(B)]
        cocycles[n], boundaries[n], reps[n] = Z, B, R
    return Cohomology(V, d, cocycles, boundaries, reps)


def cohomology_dims_by_rank(V: GradedVectorSpace, d: GradedMap) -> dict:
    """dim H^n = dim V^n − rank d^n − rank d^{n−1}, an independent count."""
    out = {}
    for n in V.degrees():
        r_out = rank(d.block(n), V.dim(n)) if V.dim(n + 1) else 0
        r_in = rank(d.block(n - 1), V.dim(n - 1)) if V.dim(n - 1) else 0
        h = V.dim(n) - r_out - r_in
        if h:
            out[n] = h
    return out


def induced_map_ranks(f: GradedMap, HV: Cohomology, HW: Cohomology) -> dict:
    """Rank of H^n(f) for every degree n where source or target is nonzero."""
    out = {}
    for n in sorted(set(HV.space.degrees()) | set(HW.space.degrees())):
        reps = HV.reps.get(n, [])
        rows = [HW.classify(f.apply(r), n + f.degree) for r in reps]
        ncols = HW.dim(n + f.degree)
        out[n] = rank(rows, ncols) if rows and ncols else 0
    return out


# ------------------------------------------------------------ check results

@dataclass
class CheckResult:
    """Outcome of a verification: ``witness`` names the first failure."""

    ok: bool
    name: str = ""
    witness: object = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    @staticmethod
    def passed(name: str = "") -> "CheckResult":
        return CheckResult(True, name)

    @staticmethod
    def failed(name: str, witness=None, detail: str = "") -> "CheckResult":
        return CheckResult(False, name, witness, detail)


def all_checks(name: str, results: Iterable[CheckResult]) -> CheckResult:
    for r in results:
        if not r.ok:
            return r
    return CheckResult.passed(name)
