"""JSON spec files.

Every file is ``{"format_version": 1, "kind": ..., "payload": {...}}`` with
rationals written as strings "p/q" (or "p").  Parsing decodes the payload
into objects and re-encodes it, so a parsed SpecFile always holds the
canonical payload and ``write_spec(parse_spec(s))`` is the canonical form
of ``s``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .dressing import GroupElement
from .homsp import ClassificationData, KSample, RobinsonDatum
from .liealg import LieAlgebra, LieAlgebraError, LieMorphism, MatrixRep, MetrizedLieAlgebra, abelian
from .lingpd import LinearGroupoid, LinearModule
from .manin import DiracManinTriple
from .ratlin import Mat, Subspace, SymBilinearForm, SymBivector, fmt, span, to_fraction

FORMAT_VERSION = 1
KINDS = ("triple", "groupoid", "module", "classification", "robinson", "rep", "algebra")


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class SpecFile:
    kind: str
    payload: dict
    format_version: int = FORMAT_VERSION


# ------------------------------------------------------------- primitives


def _q(x) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise SpecError(f"rationals must be strings or integers, got {x!r}")
    try:
        return to_fraction(x)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise SpecError(str(e)) from None


def _mat(data, nrows=None, ncols=None, what="matrix") -> Mat:
    if not isinstance(data, list) or any(not isinstance(r, list) for r in data):
        raise SpecError(f"{what} must be a list of rows")
    rows = [[_q(a) for a in r] for r in data]
    if nrows is not None and len(rows) != nrows:
        raise SpecError(f"{what} has {len(rows)} rows, expected {nrows}")
    try:
        m = Mat(rows, ncols=ncols if rows else (ncols or 0))
    except ValueError as e:
        raise SpecError(f"{what}: {e}") from None
    return m


def _square(data, n, what) -> Mat:
    return _mat(data, n, n, what)


def _subspace(data, n, what) -> Subspace:
    if not isinstance(data, list):
        raise SpecError(f"{what} must be a list of vectors")
    vs = [[_q(a) for a in v] for v in data]
    for v in vs:
        if len(v) != n:
            raise SpecError(f"{what}: vector of length {len(v)} in dimension {n}")
    return span(n, vs)


def _vec_out(v) -> list[str]:
    return [fmt(a) for a in v]


def _sub_out(s: Subspace) -> list[list[str]]:
    return s.to_json()


def _req(p: dict, key: str, what: str):
    if not isinstance(p, dict):
        raise SpecError(f"{what} must be an object")
    if key not in p:
        raise SpecError(f"{what} is missing '{key}'")
    return p[key]


# ---------------------------------------------------------------- algebra


def algebra_from(p: dict, what="algebra") -> LieAlgebra:
    basis = _req(p, "basis", what)
    if not isinstance(basis, list) or not all(isinstance(b, str) for b in basis):
        raise SpecError(f"{what}.basis must be a list of labels")
    recs = _req(p, "brackets", what)
    if not isinstance(recs, list):
        raise SpecError(f"{what}.brackets must be a list of records")
    try:
        return LieAlgebra.from_records(len(basis), [{**r, "coeff": _q(r["coeff"])} for r in recs], basis)
    except (KeyError, TypeError) as e:
        raise SpecError(f"{what}.brackets: malformed record ({e})") from None
    except LieAlgebraError as e:
        raise SpecError(f"{what}.brackets: {e}") from None


def algebra_to(L: LieAlgebra) -> dict:
    return {"basis": list(L.labels), "brackets": L.to_records()}


def metrized_to(M: MetrizedLieAlgebra) -> dict:
    return {**algebra_to(M.algebra), "metric": M.metric.gram.to_json()}


def metrized_from(p: dict) -> tuple[LieAlgebra, SymBilinearForm | None]:
    L = algebra_from(p)
    metric = None
    if "metric" in p:
        g = _square(p["metric"], L.dim, "metric")
        if not g.is_symmetric():
            raise SpecError("metric must be symmetric")
        metric = SymBilinearForm(g)
    return L, metric


# ---------------------------------------------------------------- rep


def rep_from(p: dict) -> MatrixRep:
    L = algebra_from(_req(p, "algebra", "rep"), "rep.algebra")
    r = _req(p, "rep_dim", "rep")
    if not isinstance(r, int) or r < 0:
        raise SpecError("rep_dim must be a nonnegative integer")
    ims = _req(p, "images", "rep")
    if not isinstance(ims, list) or len(ims) != L.dim:
        raise SpecError("rep needs one image per basis vector")
    return MatrixRep(L, r, tuple(_square(m, r, "rep image") for m in ims))


def rep_to(r: MatrixRep) -> dict:
    return {"algebra": algebra_to(r.algebra), "rep_dim": r.rep_dim, "images": [m.to_json() for m in r.images]}


# ---------------------------------------------------------------- triple


@dataclass(frozen=True)
class TripleSpec:
    triple: DiracManinTriple
    rep: MatrixRep | None = None
    elements: tuple[GroupElement, ...] = ()


def triple_from(p: dict) -> TripleSpec:
    L = algebra_from(p, "triple")
    n = L.dim
    B = _square(_req(p, "beta", "triple"), n, "beta")
    if not B.is_symmetric():
        raise SpecError("beta must be symmetric")
    g = _subspace(_req(p, "g", "triple"), n, "g")
    h = _subspace(_req(p, "h", "triple"), n, "h")
    samples = tuple(_square(m, n, "sample") for m in p.get("samples", []))
    name = p.get("name", "")
    if not isinstance(name, str):
        raise SpecError("name must be a string")
    t = DiracManinTriple(L, SymBivector(B), g, h, samples, name)
    rep, els = None, ()
    if "rep" in p:
        rp = _req(p, "rep", "triple")
        rep = MatrixRep(L, _req(rp, "rep_dim", "rep"), tuple(_square(m, rp["rep_dim"], "rep image") for m in _req(rp, "images", "rep")))
        els = tuple(GroupElement(rep, _square(m, rep.rep_dim, "element")) for m in p.get("elements", []))
    elif p.get("elements"):
        raise SpecError("group elements need a rep")
    return TripleSpec(t, rep, els)


def triple_to(t: DiracManinTriple, rep: MatrixRep | None = None, elements=()) -> dict:
    p = {
        **algebra_to(t.d),
        "beta": t.beta.gram.to_json(),
        "g": _sub_out(t.g),
        "h": _sub_out(t.h),
        "samples": [m.to_json() for m in t.samples],
    }
    if t.name:
        p["name"] = t.name
    if rep is not None:
        p["rep"] = {"rep_dim": rep.rep_dim, "images": [m.to_json() for m in rep.images]}
        p["elements"] = [e.matrix.to_json() for e in elements]
    return p


# ---------------------------------------------------------------- groupoid


@dataclass(frozen=True)
class GroupoidSpec:
    groupoid: LinearGroupoid
    metric: SymBilinearForm | None = None
    r: Subspace | None = None
    algebra: LieAlgebra | None = None


def groupoid_from(p: dict) -> GroupoidSpec:
    n = _req(p, "dim", "groupoid")
    if not isinstance(n, int) or n < 0:
        raise SpecError("dim must be a nonnegative integer")
    G = LinearGroupoid(n, _subspace(_req(p, "units", "groupoid"), n, "units"),
                       _square(_req(p, "s", "groupoid"), n, "s"), _square(_req(p, "t", "groupoid"), n, "t"))
    metric = r = alg = None
    if "metric" in p:
        m = _square(p["metric"], n, "metric")
        if not m.is_symmetric():
            raise SpecError("metric must be symmetric")
        metric = SymBilinearForm(m)
    if "r" in p:
        r = _subspace(p["r"], n, "r")
    if "algebra" in p:
        alg = algebra_from(p["algebra"], "groupoid.algebra")
        if alg.dim != n:
            raise SpecError("groupoid algebra has the wrong dimension")
    return GroupoidSpec(G, metric, r, alg)


def groupoid_to(G: LinearGroupoid, metric=None, r=None, algebra=None) -> dict:
    p = {"dim": G.dim, "units": _sub_out(G.units), "s": G.s_map.to_json(), "t": G.t_map.to_json()}
    if metric is not None:
        p["metric"] = metric.gram.to_json()
    if r is not None:
        p["r"] = _sub_out(r)
    if algebra is not None:
        p["algebra"] = algebra_to(algebra)
    return p


def module_from(p: dict) -> LinearModule:
    G = groupoid_from(_req(p, "groupoid", "module")).groupoid
    P_dim = _req(p, "P_dim", "module")
    if not isinstance(P_dim, int) or P_dim < 0:
        raise SpecError("P_dim must be a nonnegative integer")
    u = _mat(_req(p, "u", "module"), G.dim, P_dim, "u")
    A = _mat(_req(p, "A", "module"), P_dim, G.dim, "A")
    return LinearModule(G, P_dim, u, A)


def module_to(M: LinearModule) -> dict:
    return {"groupoid": groupoid_to(M.over), "P_dim": M.P_dim, "u": M.u_map.to_json(), "A": M.core_act.to_json()}


# ---------------------------------------------------------- classification


def classification_from(p: dict) -> tuple[ClassificationData, TripleSpec | None]:
    ts = triple_from(p["triple"]) if "triple" in p else None
    n = algebra_from(_req(p, "n", "classification"), "classification.n")
    N = n.dim
    G = _square(_req(p, "gamma_n", "classification"), N, "gamma_n")
    if not G.is_symmetric():
        raise SpecError("gamma_n must be symmetric")
    u = _subspace(_req(p, "u", "classification"), N, "u")
    k = _subspace(_req(p, "k", "classification"), N, "k")
    fm = _mat(_req(p, "f_n", "classification"), None, N, "f_n")
    d = ts.triple.d if ts else abelian(fm.nrows)
    if fm.nrows != d.dim:
        raise SpecError("f_n has the wrong number of rows for the triple")
    samples = []
    for s in p.get("samples", []):
        samples.append(KSample(_square(_req(s, "A_n", "sample"), N, "A_n"), _square(_req(s, "A_d", "sample"), d.dim, "A_d")))
    data = ClassificationData(n, SymBilinearForm(G), u, k, LieMorphism(n, d, fm), tuple(samples))
    return data, ts


def classification_to(data: ClassificationData, ts: TripleSpec | None = None) -> dict:
    p = {
        "n": algebra_to(data.n),
        "gamma_n": data.gamma_n.gram.to_json(),
        "u": _sub_out(data.u),
        "k": _sub_out(data.k),
        "f_n": data.f_n.matrix.to_json(),
        "samples": [{"A_n": s.A_n.to_json(), "A_d": s.A_d.to_json()} for s in data.K_samples if s.A_n is not None],
    }
    if ts is not None:
        p["triple"] = triple_to(ts.triple, ts.rep, ts.elements)
    return p


def robinson_from(p: dict) -> tuple[RobinsonDatum, TripleSpec | None]:
    ts = triple_from(p["triple"]) if "triple" in p else None
    if ts is None:
        raise SpecError("a robinson spec needs its triple")
    n = ts.triple.dim
    c = _subspace(_req(p, "c", "robinson"), n, "c")
    k = _subspace(_req(p, "k", "robinson"), n, "k")
    samples = tuple(KSample(None, _square(m, n, "sample")) for m in p.get("samples", []))
    return RobinsonDatum(c, k, samples), ts


def robinson_to(datum: RobinsonDatum, ts: TripleSpec) -> dict:
    return {
        "triple": triple_to(ts.triple, ts.rep, ts.elements),
        "c": _sub_out(datum.c),
        "k": _sub_out(datum.k),
        "samples": [s.A_d.to_json() for s in datum.samples],
    }


# ----------------------------------------------------------- file level


_DECODERS = {
    "triple": (triple_from, lambda ts: triple_to(ts.triple, ts.rep, ts.elements)),
    "groupoid": (groupoid_from, lambda gs: groupoid_to(gs.groupoid, gs.metric, gs.r, gs.algebra)),
    "module": (module_from, module_to),
    "classification": (classification_from, lambda x: classification_to(*x)),
    "robinson": (robinson_from, lambda x: robinson_to(*x)),
    "rep": (rep_from, rep_to),
    "algebra": (
        metrized_from,
        lambda x: metrized_to(MetrizedLieAlgebra(*x)) if x[1] is not None else algebra_to(x[0]),
    ),
}


def decode(spec: SpecFile) -> Any:
    dec, _ = _DECODERS[spec.kind]
    try:
        return dec(spec.payload)
    except SpecError:
        raise
    except (ValueError, TypeError, KeyError) as e:
        raise SpecError(f"{spec.kind}: {e}") from None


def encode(kind: str, obj) -> SpecFile:
    if kind not in _DECODERS:
        raise SpecError(f"unknown kind {kind!r}")
    return SpecFile(kind, _DECODERS[kind][1](obj))


def parse_spec(text: str) -> SpecFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"invalid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise SpecError("a spec file must be a JSON object")
    version = raw.get("format_version")
    if version != FORMAT_VERSION:
        raise SpecError(f"unsupported format_version {version!r}")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise SpecError(f"unknown kind {kind!r}")
    payload = raw.get("payload")
    if not isinstance(payload, dict):
        raise SpecError("payload must be an object")
    obj = decode(SpecFile(kind, payload))
    return encode(kind, obj)


def write_spec(spec: SpecFile) -> str:
    doc = {"format_version": spec.format_version, "kind": spec.kind, "payload": spec.payload}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load(path_or_text: str) -> tuple[SpecFile, Any]:
    spec = parse_spec(path_or_text)
    return spec, decode(spec)
