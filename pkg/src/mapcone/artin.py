"""Local Artinian coefficient algebras and computations in g ⊗ m_A.

Elements of g ⊗ A are sparse dicts keyed by (g-label, A-label).  The unit of
A has the label ``"1"``; everything else spans the maximal ideal.  Each
basis element of m_A carries a weight (its m-adic order) and products are
weight-homogeneous, which is what the order-by-order solvers rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import factorial
from typing import Callable, Mapping, Sequence

from .exactalg import CheckResult, GradedVectorSpace, vacc, vclean, vscale
from .dgla import Dgla, hom_label, split_hom_label

ONE = "1"


@dataclass(frozen=True)
class ArtinLocalAlgebra:
    """A = K ⊕ m_A with a commutative multiplication table on m_A."""

    name: str
    basis: tuple  # labels of m_A
    table: Mapping  # (a, b) -> Vec over basis
    nilpotency: int  # N with m^N = 0
    weights: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "table", {k: vclean(v) for k, v in self.table.items() if vclean(v)})
        if not self.weights:
            object.__setattr__(self, "weights", infer_weights(self.basis, self.table))

    @property
    def labels(self) -> list[str]:
        return [ONE] + list(self.basis)

    def weight(self, a: str) -> int:
        return 0 if a == ONE else self.weights[a]

    def max_weight(self) -> int:
        return max(self.weights.values(), default=0)

    def mul_basis(self, a: str, b: str) -> Mapping:
        if a == ONE:
            return {b: Fraction(1)}
        if b == ONE:
            return {a: Fraction(1)}
        return self.table.get((a, b)) or self.table.get((b, a)) or {}

    def mul(self, x: Mapping, y: Mapping) -> dict:
        acc: dict = {}
        for a, ca in x.items():
            for b, cb in y.items():
                v = self.mul_basis(a, b)
                if v:
                    vacc(acc, v, ca * cb)
        return acc

    def check(self) -> CheckResult:
        B = self.basis
        for a in B:
            for b in B:
                if vclean(self.mul_basis(a, b)) != vclean(self.mul_basis(b, a)):
                    return CheckResult.failed("commutative", (a, b))
                for k in self.mul_basis(a, b):
                    if self.weights[k] != self.weights[a] + self.weights[b]:
                        return CheckResult.failed("weight homogeneity", (a, b))
                for c in B:
                    l = self.mul(self.mul_basis(a, b), {c: Fraction(1)})
                    r = self.mul({a: Fraction(1)}, self.mul_basis(b, c))
                    if vclean(l) != vclean(r):
                        return CheckResult.failed("associative", (a, b, c))
        # m^N = 0 and m^{N-1} != 0
        power = {b: Fraction(1) for b in B}
        spans = [[{b: Fraction(1)} for b in B]]
        for k in range(2, self.nilpotency + 1):
            nxt = []
            for v in spans[-1]:
                for b in B:
                    w = self.mul(v, {b: Fraction(1)})
                    if w:
                        nxt.append(w)
            spans.append(nxt)
        if spans[-1]:
            return CheckResult.failed("nilpotency", self.nilpotency)
        if self.nilpotency > 1 and not spans[-2]:
            return CheckResult.failed("nilpotency index not minimal", self.nilpotency)
        return CheckResult.passed("artin")


def infer_weights(basis: Sequence[str], table: Mapping) -> dict:
    """m-adic order of each basis element: 1 + longest factorisation chain."""
    w = {b: 1 for b in basis}
    changed = True
    while changed:
        changed = False
        for (a, b), v in table.items():
            for k in v:
                nw = w[a] + w[b]
                if nw > w[k]:
                    w[k] = nw
                    changed = True
    return w


def dual_numbers() -> ArtinLocalAlgebra:
    """K[ε]/(ε²)."""
    return ArtinLocalAlgebra("eps", ("e",), {}, 2, {"e": 1})


def _tpow(i: int, var: str = "t") -> str:
    return var if i == 1 else f"{var}^{i}"


def truncated(k: int, var: str = "t") -> ArtinLocalAlgebra:
    """K[t]/(t^k), k ≥ 2."""
    basis = tuple(_tpow(i, var) for i in range(1, k))
    table = {}
    for i in range(1, k):
        for j in range(1, k):
            if i + j < k:
                table[(_tpow(i, var), _tpow(j, var))] = {_tpow(i + j, var): Fraction(1)}
    return ArtinLocalAlgebra(f"{var}{k}", basis, table, k, {_tpow(i, var): i for i in range(1, k)})


def square_zero_plane() -> ArtinLocalAlgebra:
    """K[x,y]/(x², xy, y²)."""
    return ArtinLocalAlgebra("xy", ("x", "y"), {}, 2, {"x": 1, "y": 1})


STANDARD = {
    "eps": dual_numbers,
    "xy": square_zero_plane,
    **{f"t{k}": (lambda k=k: truncated(k)) for k in range(2, 7)},
}


def standard(name: str) -> ArtinLocalAlgebra:
    if name not in STANDARD:
        raise KeyError(f"unknown Artin fixture {name!r}; known: {sorted(STANDARD)}")
    return STANDARD[name]()


@dataclass(frozen=True)
class SmallExtension:
    """A' → A surjective with one-dimensional kernel killed by m_{A'}."""

    big: ArtinLocalAlgebra
    small: ArtinLocalAlgebra
    proj: Mapping  # label of m_{A'} -> Vec over m_A
    kernel: str  # label in m_{A'} spanning the kernel

    def project(self, x: Mapping) -> dict:
        acc: dict = {}
        for (v, a), c in x.items():
            if a == ONE:
                acc[(v, ONE)] = acc.get((v, ONE), 0) + c
                continue
            for b, cb in self.proj.get(a, {}).items():
                acc[(v, b)] = acc.get((v, b), 0) + c * cb
        return vclean(acc)

    def check(self) -> CheckResult:
        for a in self.big.basis:
            for b in self.big.basis:
                lhs = {}
                for k, c in self.big.mul_basis(a, b).items():
                    vacc(lhs, self.proj.get(k, {}), c)
                rhs = self.small.mul(self.proj.get(a, {}), self.proj.get(b, {}))
                if vclean(lhs) != vclean(rhs):
                    return CheckResult.failed("projection is multiplicative", (a, b))
            if self.big.mul_basis(a, self.kernel):
                return CheckResult.failed("kernel not annihilated", a)
        if self.proj.get(self.kernel):
            return CheckResult.failed("kernel maps to zero", self.kernel)
        images = [self.proj.get(a, {}) for a in self.big.basis if a != self.kernel]
        from .exactalg import rank
        rows = [[v.get(b, Fraction(0)) for b in self.small.basis] for v in images]
        if len(self.big.basis) != len(self.small.basis) + 1 or rank(rows, len(self.small.basis)) != len(self.small.basis):
            return CheckResult.failed("not a small extension", None)
        return CheckResult.passed("small extension")


def truncation_extension(k: int) -> SmallExtension:
    """K[t]/(t^{k+1}) → K[t]/(t^k)."""
    big, small = truncated(k + 1), truncated(k)
    proj = {_tpow(i): {_tpow(i): Fraction(1)} for i in range(1, k)}
    return SmallExtension(big, small, proj, _tpow(k))


def dual_to_t3() -> SmallExtension:
    """K[t]/(t³) → K[ε]/(ε²), t ↦ ε."""
    big, small = truncated(3), dual_numbers()
    return SmallExtension(big, small, {"t": {"e": Fraction(1)}}, "t^2")


# ------------------------------------------------------ tensor elements

@dataclass(frozen=True)
class TensorElement:
    """Σ v_i ⊗ a_i in (host) ⊗ A, coefficients keyed by (v, a)."""

    host: GradedVectorSpace
    A: ArtinLocalAlgebra
    coeffs: Mapping

    def __post_init__(self):
        object.__setattr__(self, "coeffs", vclean(self.coeffs))

    def degree(self) -> int | None:
        ds = {self.host.degree(v) for (v, a) in self.coeffs}
        if len(ds) > 1:
            raise ValueError("element is not homogeneous")
        return ds.pop() if ds else None

    def in_maximal_ideal(self) -> bool:
        return all(a != ONE for (_, a) in self.coeffs)

    def __add__(self, other: "TensorElement") -> "TensorElement":
        acc = dict(self.coeffs)
        vacc(acc, other.coeffs)
        return TensorElement(self.host, self.A, acc)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        acc = dict(self.coeffs)
        vacc(acc, other.coeffs, -1)
        return TensorElement(self.host, self.A, acc)

    def scale(self, c) -> "TensorElement":
        return TensorElement(self.host, self.A, vscale(self.coeffs, c))

    def is_zero(self) -> bool:
        return not self.coeffs

    def component(self, a: str) -> dict:
        return {v: c for (v, b), c in self.coeffs.items() if b == a}


def tensor(v: Mapping, a: str, c=1) -> dict:
    """v ⊗ a as a tensor dict."""
    return {(k, a): Fraction(c) * x for k, x in v.items() if x}


def t_weight(A: ArtinLocalAlgebra, x: Mapping, w: int) -> dict:
    return {k: c for k, c in x.items() if A.weight(k[1]) == w}


def t_upto(A: ArtinLocalAlgebra, x: Mapping, w: int) -> dict:
    return {k: c for k, c in x.items() if A.weight(k[1]) <= w}


def t_bracket(g: Dgla, A: ArtinLocalAlgebra, x: Mapping, y: Mapping) -> dict:
    """[v⊗a, w⊗b] = [v,w] ⊗ ab (A sits in degree 0)."""
    acc: dict = {}
    for (v, a), ca in x.items():
        for (w, b), cb in y.items():
            br = g.table.get((v, w))
            if not br:
                continue
            ab = A.mul_basis(a, b)
            for m, cm in ab.items():
                s = ca * cb * cm
                for u, cu in br.items():
                    k = (u, m)
                    val = acc.get(k, 0) + s * cu
                    if val:
                        acc[k] = val
                    else:
                        acc.pop(k, None)
    return acc


def t_map(f, x: Mapping) -> dict:
    """Apply a linear map (GradedMap or callable on Vec) coefficientwise."""
    acc: dict = {}
    apply = f.apply if hasattr(f, "apply") else f
    for (v, a), c in x.items():
        for u, cu in apply({v: Fraction(1)}).items():
            k = (u, a)
            val = acc.get(k, 0) + c * cu
            if val:
                acc[k] = val
            else:
                acc.pop(k, None)
    return acc


def t_dif(g: Dgla, x: Mapping) -> dict:
    return t_map(g.d, x)


def t_add(*xs: Mapping, scales: Sequence | None = None) -> dict:
    acc: dict = {}
    for i, x in enumerate(xs):
        vacc(acc, x, 1 if scales is None else scales[i])
    return acc


def t_scale(x: Mapping, c) -> dict:
    return vscale(x, c)


# ----------------------------------------------------------------- BCH

def _compositions(m: int, parts: int):
    """Sequences of `parts` pairs (r_i, s_i) with r_i + s_i ≥ 1 and total m."""
    if parts == 0:
        if m == 0:
            yield ()
        return
    for tot in range(1, m - parts + 2):
        for r in range(tot + 1):
            for rest in _compositions(m - tot, parts - 1):
                yield ((r, tot - r),) + rest


def bch(g: Dgla, A: ArtinLocalAlgebra, x: Mapping, y: Mapping) -> dict:
    """x∙y = log(e^x e^y) by the Dynkin series, words of length < N."""
    N = A.nilpotency
    acc: dict = dict(x)
    vacc(acc, y)
    for m in range(2, N):
        for n in range(1, m + 1):
            coeff0 = Fraction((-1) ** (n - 1), n * m)
            for comp in _compositions(m, n):
                denom = 1
                word = []
                for r, s in comp:
                    denom *= factorial(r) * factorial(s)
                    word += ["x"] * r + ["y"] * s
                # right-nested bracket [w1,[w2,…,w_m]]
                letters = {"x": x, "y": y}
                val = letters[word[-1]]
                for lt in reversed(word[:-1]):
                    if not val:
                        break
                    val = t_bracket(g, A, letters[lt], val)
                if val:
                    vacc(acc, val, coeff0 / denom)
    return acc


def bch_many(g: Dgla, A: ArtinLocalAlgebra, *xs: Mapping) -> dict:
    out: dict = {}
    for x in xs:
        out = bch(g, A, out, x) if out else dict(x)
    return out


def ad_power_series(g: Dgla, A: ArtinLocalAlgebra, a: Mapping, z: Mapping,
                    coeff: Callable[[int], Fraction]) -> dict:
    """Σ_n coeff(n) ad_aⁿ(z), stopping once the iterate vanishes."""
    acc: dict = {}
    term = dict(z)
    n = 0
    while term:
        c = coeff(n)
        if c:
            vacc(acc, term, c)
        term = t_bracket(g, A, a, term)
        n += 1
        if n > A.nilpotency + 1:
            break
    return acc


def gauge_action(g: Dgla, A: ArtinLocalAlgebra, a: Mapping, y: Mapping) -> dict:
    """e^a ∗ y = y + Σ_{n≥0} ad_aⁿ/(n+1)! ([a,y] − da)."""
    z = t_add(t_bracket(g, A, a, y), t_dif(g, a), scales=[1, -1])
    out = dict(y)
    vacc(out, ad_power_series(g, A, a, z, lambda n: Fraction(1, factorial(n + 1))))
    return out


def is_mc(g: Dgla, A: ArtinLocalAlgebra, x: Mapping) -> bool:
    return not mc_curvature(g, A, x)


def mc_curvature(g: Dgla, A: ArtinLocalAlgebra, x: Mapping) -> dict:
    """dx + ½[x,x]."""
    return t_add(t_dif(g, x), t_bracket(g, A, x, x), scales=[1, Fraction(1, 2)])


# ------------------------------------------------ operators on W ⊗ A

class Operator:
    """A-linear operator on W ⊗ A, stored by its values on w ⊗ 1."""

    def __init__(self, W: GradedVectorSpace, A: ArtinLocalAlgebra, cols: Mapping):
        self.W, self.A = W, A
        self.cols = {w: vclean(v) for w, v in cols.items()}

    @staticmethod
    def identity(W, A) -> "Operator":
        return Operator(W, A, {w: {(w, ONE): Fraction(1)} for w in W.labels})

    @staticmethod
    def from_hom(W, A, a: Mapping) -> "Operator":
        """Element of Hom*(W,W) ⊗ A keyed by ('t<-s', alabel)."""
        cols: dict = {}
        for (lab, al), c in a.items():
            t, s = split_hom_label(lab)
            col = cols.setdefault(s, {})
            col[(t, al)] = col.get((t, al), 0) + c
        return Operator(W, A, cols)

    def to_hom(self) -> dict:
        out = {}
        for s, col in self.cols.items():
            for (t, al), c in col.items():
                out[(hom_label(t, s), al)] = c
        return vclean(out)

    def apply(self, x: Mapping) -> dict:
        acc: dict = {}
        for (w, a), c in x.items():
            col = self.cols.get(w)
            if not col:
                continue
            for (u, b), cb in col.items():
                for m, cm in self.A.mul_basis(a, b).items():
                    k = (u, m)
                    acc[k] = acc.get(k, 0) + c * cb * cm
        return vclean(acc)

    def compose(self, other: "Operator") -> "Operator":
        """self ∘ other."""
        return Operator(self.W, self.A, {w: self.apply(col) for w, col in other.cols.items()})

    def __add__(self, other: "Operator") -> "Operator":
        cols = {w: dict(c) for w, c in self.cols.items()}
        for w, c in other.cols.items():
            vacc(cols.setdefault(w, {}), c)
        return Operator(self.W, self.A, cols)

    def scale(self, c) -> "Operator":
        return Operator(self.W, self.A, {w: vscale(v, c) for w, v in self.cols.items()})

    def is_zero(self) -> bool:
        return not any(self.cols.values())

    def __eq__(self, other) -> bool:
        keys = set(self.cols) | set(other.cols)
        return all(vclean(self.cols.get(k, {})) == vclean(other.cols.get(k, {})) for k in keys)

    def minus_identity(self) -> "Operator":
        return self + Operator.identity(self.W, self.A).scale(-1)


def exp_operator(op: Operator) -> Operator:
    """Σ opᵏ/k! for a nilpotent operator (values in W ⊗ m_A)."""
    out = Operator.identity(op.W, op.A)
    term = Operator.identity(op.W, op.A)
    k = 0
    while True:
        k += 1
        term = op.compose(term).scale(Fraction(1, k))
        if term.is_zero():
            return out
        out = out + term


def log_unipotent(op: Operator) -> Operator:
    """log of an operator ≡ Id mod m_A."""
    n = op.minus_identity()
    out = Operator(op.W, op.A, {})
    power = Operator.identity(op.W, op.A)
    k = 0
    while True:
        k += 1
        power = n.compose(power)
        if power.is_zero():
            return out
        out = out + power.scale(Fraction((-1) ** (k + 1), k))


def exp_action(W: GradedVectorSpace, A: ArtinLocalAlgebra, a: Mapping) -> Operator:
    """e^a on W ⊗ A for a ∈ Hom⁰(W,W) ⊗ m_A."""
    return exp_operator(Operator.from_hom(W, A, a))


# ---------------------------------------------------- polynomial forms

class TDegreeCapError(ValueError):
    pass


class PolyForms:
    """K[t,dt] ⊗ X with a t-degree cap.

    Elements are dicts keyed by (i, e, lab) meaning tⁱ (dt)^e ⊗ lab.
    ``deg`` gives host degrees, ``dhost`` the host differential on a label,
    ``bhost`` the host bracket of two labels (both returning dicts of labels).
    """

    def __init__(self, deg: Callable[[object], int], dhost: Callable, bhost: Callable, tcap: int):
        self.deg, self.dhost, self.bhost, self.tcap = deg, dhost, bhost, tcap

    def _key(self, i, e, lab):
        if i > self.tcap:
            raise TDegreeCapError(f"t-degree {i} exceeds cap {self.tcap}")
        return (i, e, lab)

    def const(self, v: Mapping, i: int = 0, e: int = 0, c=1) -> dict:
        return {self._key(i, e, lab): Fraction(c) * x for lab, x in v.items() if x}

    def d(self, x: Mapping) -> dict:
        acc: dict = {}
        for (i, e, lab), c in x.items():
            if e == 0 and i > 0:
                k = self._key(i - 1, 1, lab)
                acc[k] = acc.get(k, 0) + i * c
            s = -1 if e else 1
            for m, cm in self.dhost(lab).items():
                k = (i, e, m)
                acc[k] = acc.get(k, 0) + s * c * cm
        return vclean(acc)

    def bracket(self, x: Mapping, y: Mapping) -> dict:
        acc: dict = {}
        for (i, e, a), ca in x.items():
            for (j, f, b), cb in y.items():
                if e and f:
                    continue
                s = -1 if (f and self.deg(a) % 2) else 1
                br = self.bhost(a, b)
                if not br:
                    continue
                key_i = i + j
                for m, cm in br.items():
                    k = self._key(key_i, e + f, m)
                    acc[k] = acc.get(k, 0) + s * ca * cb * cm
        return vclean(acc)

    def mul_scalar_poly(self, x: Mapping, poly: Mapping[int, Fraction], dt: int = 0) -> dict:
        """(Σ p_k t^k (dt)^dt) · x, scalar form on the left."""
        acc: dict = {}
        for (i, e, lab), c in x.items():
            if e and dt:
                continue
            for k, pk in poly.items():
                key = self._key(i + k, e + dt, lab)
                acc[key] = acc.get(key, 0) + pk * c
        return vclean(acc)

    def degree_of(self, key) -> int:
        i, e, lab = key
        return e + self.deg(lab)

    def evaluate(self, x: Mapping, t0) -> dict:
        """Restriction to t = t0, dt = 0."""
        t0 = Fraction(t0)
        acc: dict = {}
        for (i, e, lab), c in x.items():
            if e == 0:
                acc[lab] = acc.get(lab, 0) + c * t0 ** i
        return vclean(acc)

    def integral(self, x: Mapping, a=0, b=1) -> dict:
        """∫_a^b: only dt-terms contribute."""
        a, b = Fraction(a), Fraction(b)
        acc: dict = {}
        for (i, e, lab), c in x.items():
            if e == 1:
                acc[lab] = acc.get(lab, 0) + c * (b ** (i + 1) - a ** (i + 1)) / (i + 1)
        return vclean(acc)

    def integral_0t(self, x: Mapping) -> dict:
        """∫_0^t as a polynomial form (no dt)."""
        acc: dict = {}
        for (i, e, lab), c in x.items():
            if e == 1:
                k = self._key(i + 1, 0, lab)
                acc[k] = acc.get(k, 0) + c / (i + 1)
        return vclean(acc)

    def t_derivative(self, x: Mapping) -> dict:
        acc: dict = {}
        for (i, e, lab), c in x.items():
            if e == 0 and i > 0:
                k = (i - 1, 0, lab)
                acc[k] = acc.get(k, 0) + i * c
        return vclean(acc)


# ------------------------------------------- truncated forms as a DGCA

def _spow(i: int, var: str) -> str:
    return "1" if i == 0 else (var if i == 1 else f"{var}^{i}")


def _sform(i: int, var: str) -> str:
    return f"d{var}" if i == 0 else f"{_spow(i, var)} d{var}"


def polynomial_forms(T: int, var: str = "s"):
    """K[s,ds]/(s^{T+1}, s^T ds), a finite DGCA (the ideal is d-closed).

    Truncation is exact on elements where sⁱ carries m_A-weight ≥ i,
    which is the case for every path built by the solvers.
    """
    from .dgla import Dgca
    from .exactalg import GradedMap
    zero = [_spow(i, var) for i in range(T + 1)]
    one = [_sform(i, var) for i in range(T)]
    S = GradedVectorSpace({0: zero, 1: one} if one else {0: zero})
    dcols = {_spow(i, var): {_sform(i - 1, var): Fraction(i)} for i in range(1, T + 1)}
    table = {}
    for i in range(1, T + 1):
        for j in range(1, T + 1):
            if i + j <= T:
                table[(_spow(i, var), _spow(j, var))] = {_spow(i + j, var): Fraction(1)}
        for j in range(T):
            if i + j < T:
                table[(_spow(i, var), _sform(j, var))] = {_sform(i + j, var): Fraction(1)}
                table[(_sform(j, var), _spow(i, var))] = {_sform(i + j, var): Fraction(1)}
    return Dgca(S, GradedMap(S, S, 1, dcols), table, f"K[{var},d{var}]/{T}")


def forms_parse(label: str) -> tuple[int, int]:
    """(power of s, number of ds) for a label of :func:`polynomial_forms`."""
    e = 1 if label.endswith("ds") or label.split(" ")[-1].startswith("d") else 0
    head = label.split(" ")[0]
    if e and " " not in label:
        return 0, 1
    if head == "1":
        return 0, 0
    return (int(head.split("^")[1]) if "^" in head else 1), e


def forms_evaluate(x: Mapping, t0) -> dict:
    """Restrict tensor dict keyed ('v*form', a) to s = t0, ds = 0."""
    from .dgla import split_tensor_label
    t0 = Fraction(t0)
    acc: dict = {}
    for (lab, a), c in x.items():
        v, r = split_tensor_label(lab)
        i, e = forms_parse(r)
        if e == 0:
            acc[(v, a)] = acc.get((v, a), 0) + c * t0 ** i
    return vclean(acc)


def forms_ds_part(x: Mapping) -> dict:
    """u with x = (ds-free) + u·ds, returned keyed ('v*s^i', a)."""
    from .dgla import split_tensor_label, tensor_label
    acc: dict = {}
    for (lab, a), c in x.items():
        v, r = split_tensor_label(lab)
        i, e = forms_parse(r)
        if e:
            var = r.split("d")[-1]
            k = (tensor_label(v, _spow(i, var)), a)
            acc[k] = acc.get(k, 0) + c
    return vclean(acc)


def forms_integrate_0s(x: Mapping, T: int, var: str = "s") -> dict:
    """∫₀ˢ of a ds-free polynomial path (as coefficient of dσ)."""
    from .dgla import split_tensor_label, tensor_label
    acc: dict = {}
    for (lab, a), c in x.items():
        v, r = split_tensor_label(lab)
        i, e = forms_parse(r)
        if e:
            raise ValueError("integrand must be ds-free")
        if i + 1 > T:
            raise TDegreeCapError(f"s-degree {i + 1} exceeds cap {T}")
        k = (tensor_label(v, _spow(i + 1, var)), a)
        acc[k] = acc.get(k, 0) + c / (i + 1)
    return vclean(acc)


def forms_integrate_01(x: Mapping) -> dict:
    """∫₀¹ of a ds-free polynomial path, as a tensor dict over the host."""
    from .dgla import split_tensor_label
    acc: dict = {}
    for (lab, a), c in x.items():
        v, r = split_tensor_label(lab)
        i, _ = forms_parse(r)
        acc[(v, a)] = acc.get((v, a), 0) + c / (i + 1)
    return vclean(acc)


def forms_const(x: Mapping, i: int = 0, var: str = "s") -> dict:
    """sⁱ·x for x keyed (v, a)."""
    from .dgla import tensor_label
    return {(tensor_label(v, _spow(i, var)), a): c for (v, a), c in x.items() if c}


def dexp_inverse(g: Dgla, A: ArtinLocalAlgebra, a: Mapping, z: Mapping) -> dict:
    """w with Σ_{n≥0} ad_aⁿ(w)/(n+1)! = z (Neumann series; ad_a is nilpotent)."""
    w = dict(z)
    for _ in range(A.nilpotency + 1):
        corr = ad_power_series(g, A, a, t_bracket(g, A, a, w), lambda n: Fraction(1, factorial(n + 2)))
        nxt = dict(z)
        vacc(nxt, corr, -1)
        nxt = vclean(nxt)
        if nxt == vclean(w):
            return nxt
        w = nxt
    return vclean(w)
