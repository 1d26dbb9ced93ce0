"""Declarative YAML format for spaces, maps, DGLAs, L∞ brackets, Artin algebras, pairs and models.

Every document is a mapping with a ``kind`` key. Coefficients are exact
fraction strings "p/q" (integers are accepted on input, floats never).

    kind: space
    degrees: {0: [a, b], 1: [c]}

    kind: map
    source: <space>            target: <space>
    degree: 1
    entries: [[a, c, "1/2"], ...]          # source label, target label, coefficient

    kind: dgla
    name: sl2
    space: <space>
    d: [[s, t, "p/q"], ...]
    bracket: [[a, b, {c: "p/q"}], ...]     # [a, b] = Σ c

    kind: morphism
    source: <dgla>   target: <dgla>   map: [[s, t, "p/q"], ...]

    kind: linfty
    name: ...   space: <space>   arity_cap: 6
    brackets: {1: [[[a], {b: "p/q"}]], 2: [[[a, b], {...}]], ...}   # q_k on sorted words of V[1]

    kind: artin
    name: t3   basis: [t, t^2]   nilpotency: 3
    table: [[t, t, {t^2: "1"}]]   weights: {t: 1, t^2: 2}

    kind: extension
    big: <artin>   small: <artin>   proj: {t: {t: "1"}}   kernel: t^2

    kind: pair
    complex: {space: <space>, d: [[s, t, "p/q"]]}
    V: {0: [{w1: "1"}]}   U: null

    kind: model
    name: elliptic   holomorphic: [dz]   antiholomorphic: [dzb]
    structure: {"p1,p2": {p2: "1"}}   dbar: {q2: {q1^q2: "-1"}}

Tensor elements (for example a Maurer-Cartan ξ ∈ K¹ ⊗ m_B) use the one-line
form ``"dzb.d/dz@t + 1/2*dzb.d/dz@t^2"``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping

import yaml

from .artin import ArtinLocalAlgebra, SmallExtension
from .dgla import Complex, Dgla, DglaMorphism, SubcomplexPair
from .exactalg import GradedMap, GradedVectorSpace, MultilinearMap, frac, fstr, sym_normalize, vclean
from .linfty import LInftyAlgebra, from_brackets
from .period import ToyDolbeaultModel


class FormatError(ValueError):
    """Input text does not describe a valid object of the requested kind."""


def _coef(c) -> Fraction:
    if isinstance(c, bool) or isinstance(c, float):
        raise FormatError(f"coefficient {c!r} is not an exact fraction")
    try:
        return frac(c)
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise FormatError(f"bad coefficient {c!r}") from e


def _vec_out(v: Mapping) -> dict:
    return {str(k): fstr(c) for k, c in sorted(vclean(v).items())}


def _vec_in(v) -> dict:
    if v is None:
        return {}
    if not isinstance(v, Mapping):
        raise FormatError(f"expected a label -> coefficient mapping, got {v!r}")
    return vclean({str(k): _coef(c) for k, c in v.items()})


def _need(doc, key: str):
    if not isinstance(doc, Mapping) or key not in doc:
        raise FormatError(f"missing key {key!r}")
    return doc[key]


def _kind(doc, kind: str):
    if not isinstance(doc, Mapping):
        raise FormatError("document must be a mapping")
    if doc.get("kind", kind) != kind:
        raise FormatError(f"expected kind {kind!r}, got {doc.get('kind')!r}")


# ----------------------------------------------------------------- spaces and maps

def space_to_doc(V: GradedVectorSpace) -> dict:
    return {"kind": "space", "degrees": {d: list(ls) for d, ls in V.basis}}


def space_from_doc(doc) -> GradedVectorSpace:
    _kind(doc, "space")
    degs = _need(doc, "degrees") or {}
    try:
        return GradedVectorSpace({int(d): [str(l) for l in ls] for d, ls in degs.items()})
    except (TypeError, ValueError, AttributeError) as e:
        raise FormatError(str(e)) from e


def _entries_out(cols: Mapping) -> list:
    return [[s, t, fstr(c)] for s in sorted(cols) for t, c in sorted(cols[s].items()) if c]


def _entries_in(rows, source: GradedVectorSpace, target: GradedVectorSpace) -> dict:
    cols: dict = {}
    for row in rows or []:
        if not isinstance(row, (list, tuple)) or len(row) != 3:
            raise FormatError(f"map entry must be [source, target, coefficient], got {row!r}")
        s, t, c = str(row[0]), str(row[1]), _coef(row[2])
        if s not in source or t not in target:
            raise FormatError(f"unknown label in entry {row!r}")
        cols.setdefault(s, {})[t] = cols.get(s, {}).get(t, 0) + c
    return cols


def map_to_doc(f: GradedMap) -> dict:
    return {"kind": "map", "source": space_to_doc(f.source), "target": space_to_doc(f.target),
            "degree": f.degree, "entries": _entries_out(f.cols)}


def map_from_doc(doc) -> GradedMap:
    _kind(doc, "map")
    S, T = space_from_doc(_need(doc, "source")), space_from_doc(_need(doc, "target"))
    f = GradedMap(S, T, int(doc.get("degree", 0)), _entries_in(doc.get("entries"), S, T))
    errs = f.check()
    if errs:
        raise FormatError("; ".join(errs))
    return f


# ----------------------------------------------------------------- DGLAs

def dgla_to_doc(g: Dgla) -> dict:
    return {"kind": "dgla", "name": g.name, "space": space_to_doc(g.space), "d": _entries_out(g.d.cols),
            "bracket": [[a, b, _vec_out(v)] for (a, b), v in sorted(g.table.items())]}


def dgla_from_doc(doc) -> Dgla:
    _kind(doc, "dgla")
    V = space_from_doc(_need(doc, "space"))
    d = GradedMap(V, V, 1, _entries_in(doc.get("d"), V, V))
    errs = d.check()
    if errs:
        raise FormatError("; ".join(errs))
    table: dict = {}
    for row in doc.get("bracket") or []:
        if not isinstance(row, (list, tuple)) or len(row) != 3:
            raise FormatError(f"bracket entry must be [a, b, {{c: coef}}], got {row!r}")
        a, b, v = str(row[0]), str(row[1]), _vec_in(row[2])
        if a not in V or b not in V or any(k not in V for k in v):
            raise FormatError(f"unknown label in bracket entry {row!r}")
        table[(a, b)] = v
    return Dgla(V, d, table, str(doc.get("name", "")))


def morphism_to_doc(f: DglaMorphism) -> dict:
    return {"kind": "morphism", "source": dgla_to_doc(f.source), "target": dgla_to_doc(f.target),
            "map": _entries_out(f.map.cols)}


def morphism_from_doc(doc) -> DglaMorphism:
    _kind(doc, "morphism")
    S, T = dgla_from_doc(_need(doc, "source")), dgla_from_doc(_need(doc, "target"))
    f = GradedMap(S.space, T.space, 0, _entries_in(doc.get("map"), S.space, T.space))
    errs = f.check()
    if errs:
        raise FormatError("; ".join(errs))
    return DglaMorphism(S, T, f)


# ----------------------------------------------------------------- L∞ brackets

def linfty_to_doc(V: LInftyAlgebra, max_arity: int) -> dict:
    """Structure constants of q_1..q_max_arity on all sorted words of V[1]."""
    br = {}
    for k in range(1, max_arity + 1):
        rows = [[list(w), _vec_out(V.q(k, w))] for w in V.words(k) if vclean(V.q(k, w))]
        if rows:
            br[k] = rows
    return {"kind": "linfty", "name": V.name, "space": space_to_doc(V.V), "arity_cap": V.arity_cap,
            "brackets": br}


def linfty_from_doc(doc) -> LInftyAlgebra:
    _kind(doc, "linfty")
    V = space_from_doc(_need(doc, "space"))
    S = V.shift(1)
    tables = {}
    for k, rows in (doc.get("brackets") or {}).items():
        k = int(k)
        ent = {}
        for row in rows or []:
            if not isinstance(row, (list, tuple)) or len(row) != 2:
                raise FormatError(f"bracket entry must be [[labels...], {{c: coef}}], got {row!r}")
            word = tuple(str(x) for x in row[0])
            if len(word) != k or any(x not in S for x in word):
                raise FormatError(f"bad word {row[0]!r} for arity {k}")
            sign, w = sym_normalize(word, S)
            if sign == 0:
                raise FormatError(f"word {row[0]!r} vanishes by graded symmetry")
            ent[w] = {a: sign * c for a, c in _vec_in(row[1]).items()}
        tables[k] = MultilinearMap(S, S, k, 1, ent)
    return from_brackets(V, tables, int(doc.get("arity_cap", 6)), str(doc.get("name", "")))


# ----------------------------------------------------------------- Artin algebras

def artin_to_doc(A: ArtinLocalAlgebra) -> dict:
    return {"kind": "artin", "name": A.name, "basis": list(A.basis), "nilpotency": A.nilpotency,
            "table": [[a, b, _vec_out(v)] for (a, b), v in sorted(A.table.items())],
            "weights": {a: int(w) for a, w in A.weights.items()}}


def artin_from_doc(doc, validate: bool = True) -> ArtinLocalAlgebra:
    _kind(doc, "artin")
    basis = [str(b) for b in _need(doc, "basis")]
    table = {}
    weights = doc.get("weights") or {}
    if not isinstance(weights, Mapping) or any(isinstance(w, bool) or not isinstance(w, int) for w in weights.values()):
        raise FormatError(f"weights must be integers, got {weights!r}")
    for row in doc.get("table") or []:
        if not isinstance(row, (list, tuple)) or len(row) != 3:
            raise FormatError(f"table entry must be [a, b, {{c: coef}}], got {row!r}")
        a, b, v = str(row[0]), str(row[1]), _vec_in(row[2])
        if a not in basis or b not in basis or any(k not in basis for k in v):
            raise FormatError(f"unknown label in table entry {row!r}")
        table[(a, b)] = v
    try:
        A = ArtinLocalAlgebra(str(doc.get("name", "")), basis, table, int(_need(doc, "nilpotency")),
                              {str(k): w for k, w in weights.items()})
    except (KeyError, ValueError) as e:
        raise FormatError(f"bad Artin algebra: {e}") from e
    if validate:
        r = A.check()
        if not r.ok:
            raise FormatError(f"invalid Artin algebra: {r.name} {r.witness}")
    return A


def extension_to_doc(e: SmallExtension) -> dict:
    return {"kind": "extension", "big": artin_to_doc(e.big), "small": artin_to_doc(e.small),
            "proj": {a: _vec_out(v) for a, v in sorted(e.proj.items())}, "kernel": e.kernel}


def extension_from_doc(doc) -> SmallExtension:
    _kind(doc, "extension")
    return SmallExtension(artin_from_doc(_need(doc, "big")), artin_from_doc(_need(doc, "small")),
                          {str(a): _vec_in(v) for a, v in (doc.get("proj") or {}).items()},
                          str(_need(doc, "kernel")))


# ----------------------------------------------------------------- pairs and models

def _subspace_out(sub: Mapping | None):
    if sub is None:
        return None
    return {int(d): [_vec_out(v) for v in vecs] for d, vecs in sorted(sub.items())}


def _subspace_in(sub, W: GradedVectorSpace):
    if sub is None:
        return None
    out = {}
    for d, vecs in sub.items():
        vs = [_vec_in(v) for v in vecs or []]
        if any(k not in W for v in vs for k in v):
            raise FormatError("subspace vector uses an unknown label")
        out[int(d)] = vs
    return out


def pair_to_doc(p: SubcomplexPair) -> dict:
    return {"kind": "pair", "complex": {"space": space_to_doc(p.W.space), "d": _entries_out(p.W.d.cols)},
            "V": _subspace_out(p.V), "U": _subspace_out(p.U)}


def pair_from_doc(doc) -> SubcomplexPair:
    _kind(doc, "pair")
    c = _need(doc, "complex")
    W = space_from_doc(_need(c, "space"))
    d = GradedMap(W, W, 1, _entries_in(c.get("d"), W, W))
    return SubcomplexPair(Complex(W, d), _subspace_in(_need(doc, "V"), W) or {}, _subspace_in(doc.get("U"), W))


def model_to_doc(m: ToyDolbeaultModel) -> dict:
    return {"kind": "model", **m.to_dict()}


def model_from_doc(doc) -> ToyDolbeaultModel:
    _kind(doc, "model")
    data = {k: v for k, v in doc.items() if k != "kind"}
    try:
        data["structure"] = {k: _vec_out(_vec_in(v)) for k, v in (data.get("structure") or {}).items()}
        data["dbar"] = {k: _vec_out(_vec_in(v)) for k, v in (data.get("dbar") or {}).items()}
        return ToyDolbeaultModel.from_dict({"name": _need(data, "name"), **data})
    except (KeyError, ValueError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"bad model: {e}") from e


# ----------------------------------------------------------------- tensors

_TERM = re.compile(r"^\s*(?:([+-]?\s*[0-9]+(?:/[0-9]+)?)\s*\*)?\s*([^@\s]+)\s*@\s*(\S+)\s*$")


def parse_tensor(text: str) -> dict:
    """``"2*x@t + -1/2*y@t^2"`` → {("x", "t"): 2, ("y", "t^2"): -1/2}."""
    out: dict = {}
    text = text.strip()
    if not text or text == "0":
        return out
    for term in re.split(r"\s+\+\s+|,", text):
        sign = 1
        term = term.strip()
        if term.startswith("- ") or (term.startswith("-") and "*" not in term):
            sign, term = -1, term[1:]
        m = _TERM.match(term)
        if not m:
            raise FormatError(f"cannot parse tensor term {term!r}")
        c = _coef(m.group(1).replace(" ", "")) if m.group(1) else Fraction(1)
        key = (m.group(2), m.group(3))
        out[key] = out.get(key, 0) + sign * c
    return vclean(out)


def tensor_string(x: Mapping) -> str:
    terms = []
    for (v, a), c in sorted(vclean(x).items()):
        terms.append(f"{v}@{a}" if c == 1 else f"{fstr(c)}*{v}@{a}")
    return " + ".join(terms) or "0"


# ----------------------------------------------------------------- generic entry points

DUMPERS = {
    GradedVectorSpace: space_to_doc, GradedMap: map_to_doc, Dgla: dgla_to_doc, DglaMorphism: morphism_to_doc,
    ArtinLocalAlgebra: artin_to_doc, SmallExtension: extension_to_doc, SubcomplexPair: pair_to_doc,
    ToyDolbeaultModel: model_to_doc,
}

LOADERS = {
    "space": space_from_doc, "map": map_from_doc, "dgla": dgla_from_doc, "morphism": morphism_from_doc,
    "linfty": linfty_from_doc, "artin": artin_from_doc, "extension": extension_from_doc,
    "pair": pair_from_doc, "model": model_from_doc,
}


def to_doc(obj, max_arity: int = 4) -> dict:
    if isinstance(obj, LInftyAlgebra):
        return linfty_to_doc(obj, max_arity)
    for cls, fn in DUMPERS.items():
        if isinstance(obj, cls):
            return fn(obj)
    raise TypeError(f"no text form for {type(obj).__name__}")


def from_doc(doc):
    if not isinstance(doc, Mapping) or doc.get("kind") not in LOADERS:
        raise FormatError(f"unknown document kind {doc.get('kind') if isinstance(doc, Mapping) else doc!r}")
    return LOADERS[doc["kind"]](doc)


def dumps(obj, max_arity: int = 4) -> str:
    return yaml.safe_dump(to_doc(obj, max_arity), sort_keys=False, default_flow_style=None, width=100)


def loads(text: str):
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise FormatError(f"not valid YAML: {e}") from e
    return from_doc(doc)
