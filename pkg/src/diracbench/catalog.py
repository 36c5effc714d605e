"""Canonical examples: abelian doubles, Cartan-Dirac triples, the quasi-Poisson
translation, and the named fixtures E1-E4 used throughout the tests."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .dressing import GroupElement
from .liealg import (
    LieAlgebra,
    MatrixRep,
    MetrizedLieAlgebra,
    abelian,
    direct_sum,
    form_invariance_witness,
    metrized_direct_sum,
    opposite,
    sl2,
    sl2_defining_rep,
    trace_form,
)
from .lingpd import LinearGroupoid
from .manin import DiracManinTriple, ManinError, validate_triple
from .ratlin import (
    Mat,
    Subspace,
    SymBivector,
    full_space,
    is_coisotropic,
    projection_along,
    span,
    subspace_sum,
    unit_vec,
    zero_space,
)


class CatalogError(ValueError):
    pass


# ------------------------------------------------------------- abelian


def build_abelian_double(n: int, beta, g_idx: Sequence[int], h_idx: Sequence[int] | None = None,
                         name: str = "") -> DiracManinTriple:
    """Abelian d = Q^n with coordinate subspaces g and h (h defaults to the complement)."""
    beta = beta if isinstance(beta, SymBivector) else SymBivector(Mat(beta))
    if h_idx is None:
        h_idx = [i for i in range(n) if i not in set(g_idx)]
    g = span(n, [unit_vec(n, i) for i in g_idx])
    h = span(n, [unit_vec(n, i) for i in h_idx])
    if not is_coisotropic(g, beta):
        raise CatalogError("g is not beta-coisotropic")
    return DiracManinTriple(abelian(n), beta, g, h, (Mat.identity(n),), name)


def E1() -> DiracManinTriple:
    return build_abelian_double(2, [[0, 1], [1, 0]], [0], name="E1")


def E2() -> DiracManinTriple:
    """The Cartan-Dirac triple of the 1-dim metrized algebra."""
    return build_cartan_dirac(MetrizedLieAlgebra(abelian(1), _form([[1]])), "first", (Mat.identity(2),), name="E2")


def E3() -> DiracManinTriple:
    """A non-exact triple: beta = diag(1, 0) has a 1-dim kernel."""
    return build_abelian_double(2, [[1, 0], [0, 0]], [0], name="E3")


def E4() -> DiracManinTriple:
    """beta = identity with g = span e1: g fails to be coisotropic (deliberately invalid)."""
    return DiracManinTriple(abelian(2), SymBivector(Mat.identity(2)), span(2, [(1, 0)]),
                            span(2, [(0, 1)]), (Mat.identity(2),), "E4")


def _form(rows):
    from .ratlin import SymBilinearForm

    return SymBilinearForm(Mat(rows))


def abelian_rep(n: int) -> MatrixRep:
    """Faithful rep of Q^n by (n+1)x(n+1) matrices supported on the first row."""
    ims = []
    for i in range(n):
        rows = [[0] * (n + 1) for _ in range(n + 1)]
        rows[0][i + 1] = 1
        ims.append(Mat(rows))
    return MatrixRep(abelian(n), n + 1, tuple(ims))


def abelian_group_element(rep: MatrixRep, x) -> GroupElement:
    """exp(x) = 1 + rho(x) for the abelian rep above."""
    return GroupElement(rep, Mat.identity(rep.rep_dim) + rep(x))


def abelian_h_elements(t: DiracManinTriple, scalars=(1, -2, Fraction(1, 3))) -> list[GroupElement]:
    rep = abelian_rep(t.dim)
    out = [GroupElement.identity(rep)]
    for v in t.h.vectors():
        out += [abelian_group_element(rep, tuple(c * a for a in v)) for c in scalars]
    return out


# -------------------------------------------------------------- Cartan-Dirac


def build_cartan_dirac(h_alg: MetrizedLieAlgebra, slot: str = "first", samples=(), name: str = "") -> DiracManinTriple:
    """(h + hbar, diagonal, slot copy of h), beta the inverse of the block metric.

    ``slot`` picks which summand is the subalgebra h (and hence on which
    summand the group H acts by conjugation).
    """
    if slot not in ("first", "second"):
        raise CatalogError("slot must be 'first' or 'second'")
    w = form_invariance_witness(h_alg.algebra, h_alg.metric.gram)
    if w is not None:
        raise CatalogError(f"metric on h is not ad-invariant at {w}")
    M = metrized_direct_sum(h_alg, opposite(h_alg))
    m = h_alg.dim
    n = 2 * m
    diag = span(n, [unit_vec(m, i) + unit_vec(m, i) for i in range(m)])
    first = span(n, [unit_vec(n, i) for i in range(m)])
    second = span(n, [unit_vec(n, m + i) for i in range(m)])
    hsub = first if slot == "first" else second
    beta = M.metric.dual()
    return DiracManinTriple(M.algebra, beta, diag, hsub, tuple(samples), name)


def cartan_dirac_rep(h_rep: MatrixRep) -> MatrixRep:
    """Block-diagonal rep of h + h built from a rep of h."""
    r = h_rep.rep_dim
    Z = Mat.zeros(r, r)
    ims = [Mat.block([[a, Z], [Z, Z]]) for a in h_rep.images]
    ims += [Mat.block([[Z, Z], [Z, a]]) for a in h_rep.images]
    return MatrixRep(direct_sum(h_rep.algebra, h_rep.algebra), 2 * r, tuple(ims))


def cartan_dirac_element(rep_d: MatrixRep, hmat: Mat, slot: str = "first") -> GroupElement:
    r = hmat.nrows
    I, Z = Mat.identity(r), Mat.zeros(r, r)
    blocks = [[hmat, Z], [Z, I]] if slot == "first" else [[I, Z], [Z, hmat]]
    return GroupElement(rep_d, Mat.block(blocks))


SL2_SAMPLES = (
    Mat([[2, 0], [0, Fraction(1, 2)]]),
    Mat([[1, 1], [0, 1]]),
    Mat([[1, 0], [-3, 1]]),
    Mat([[2, 1], [1, 1]]),
)


def sl2_metrized() -> MetrizedLieAlgebra:
    return MetrizedLieAlgebra(sl2(), trace_form(sl2_defining_rep()))


def sl2_cartan_dirac(slot: str = "first") -> tuple[DiracManinTriple, MatrixRep, list[GroupElement]]:
    rep = cartan_dirac_rep(sl2_defining_rep())
    els = [cartan_dirac_element(rep, m, slot) for m in SL2_SAMPLES]
    t = build_cartan_dirac(sl2_metrized(), slot, tuple(e.Ad for e in els), name=f"sl2-cartan-dirac-{slot}")
    return t, rep, els


# ----------------------------------------------------------- quasi-Poisson


def build_quasi_poisson(d: LieAlgebra, h: Subspace, g: Subspace, h_prime: Subspace, beta: SymBivector,
                        samples=(), name: str = "") -> DiracManinTriple:
    """The triple (d, g + h', h)_beta attached to a quadruple d = h + g + h'."""
    n = d.dim
    if h.dim + g.dim + h_prime.dim != n or subspace_sum(subspace_sum(h, g), h_prime) != full_space(n):
        raise CatalogError("h, g, h' do not split d")
    return DiracManinTriple(d, beta, subspace_sum(g, h_prime), h, tuple(samples), name)


def sl2_quasi_poisson() -> tuple[DiracManinTriple, MatrixRep, list[GroupElement]]:
    """Triangular decomposition e | H | f of sl2 with beta dual to the trace form."""
    rep = sl2_defining_rep()
    beta = trace_form(rep).dual()
    els = [GroupElement(rep, Mat([[1, a], [0, 1]])) for a in (1, -2, Fraction(1, 3))]
    t = build_quasi_poisson(
        sl2(), span(3, [(1, 0, 0)]), span(3, [(0, 0, 1)]), span(3, [(0, 1, 0)]), beta,
        tuple(e.Ad for e in els), name="sl2-quasi-poisson",
    )
    return t, rep, els


# ------------------------------------------------------------ random data


def random_subspace(rng: random.Random, n: int, k: int) -> Subspace:
    while True:
        s = span(n, [[rng.randint(-2, 2) for _ in range(n)] for _ in range(k)])
        if s.dim == k:
            return s


def random_complement(rng: random.Random, s: Subspace) -> Subspace:
    from .ratlin import are_complementary

    while True:
        c = random_subspace(rng, s.ambient_dim, s.ambient_dim - s.dim)
        if are_complementary(s, c):
            return c


def random_groupoid(rng: random.Random, n: int, k: int | None = None) -> LinearGroupoid:
    """Random V0 with random complements ker s, ker t (idempotents onto V0)."""
    if k is None:
        k = rng.randint(0, n)
    if k == n:
        return LinearGroupoid(n, full_space(n), Mat.identity(n), Mat.identity(n))
    if k == 0:
        return LinearGroupoid(n, zero_space(n), Mat.zeros(n, n), Mat.zeros(n, n))
    V0 = random_subspace(rng, n, k)
    s = projection_along(V0, random_complement(rng, V0))
    t = projection_along(V0, random_complement(rng, V0))
    return LinearGroupoid(n, V0, s, t)


def fixtures() -> dict[str, DiracManinTriple]:
    """The valid shipped triples (E4 is excluded because it is invalid by design)."""
    return {
        "E1": E1(),
        "E2": E2(),
        "E3": E3(),
        "sl2-cartan-dirac": sl2_cartan_dirac()[0],
        "sl2-quasi-poisson": sl2_quasi_poisson()[0],
    }


# ------------------------------------------------------------ shipped files


def E2_rep_elements(t: DiracManinTriple | None = None):
    """Unipotent elements (1 a; 0 1) in the first slot of the E2 double."""
    rep = cartan_dirac_rep(abelian_rep(1))
    els = [cartan_dirac_element(rep, Mat([[1, a], [0, 1]])) for a in (1, -2, Fraction(1, 3))]
    return rep, els


def fixture_specs() -> dict:
    """File name -> SpecFile for every shipped fixture, built from the builders."""
    from .homsp import RobinsonDatum
    from .specfile import GroupoidSpec, TripleSpec, encode

    e1, e2 = E1(), E2()
    e1_els = abelian_h_elements(e1)
    rep2, els2 = E2_rep_elements()
    cd, cd_rep, cd_els = sl2_cartan_dirac()
    qp, qp_rep, qp_els = sl2_quasi_poisson()
    out = {
        "E1.dmt.json": encode("triple", TripleSpec(e1, e1_els[0].rep, tuple(e1_els))),
        "E2.dmt.json": encode("triple", TripleSpec(e2, rep2, tuple(els2))),
        "E3.dmt.json": encode("triple", TripleSpec(E3())),
        "E4.dmt.json": encode("triple", TripleSpec(E4())),
        "sl2-cartan-dirac.dmt.json": encode("triple", TripleSpec(cd, cd_rep, tuple(cd_els))),
        "sl2-quasi-poisson.dmt.json": encode("triple", TripleSpec(qp, qp_rep, tuple(qp_els))),
        "E1.rob.json": encode("robinson", (RobinsonDatum(span(2, [(0, 1)]), span(2, [(0, 1)])), TripleSpec(e1))),
        "E2.rob.json": encode("robinson", (RobinsonDatum(span(2, [(1, -1)]), zero_space(2)), TripleSpec(e2))),
        "random-4.lgd.json": encode("groupoid", GroupoidSpec(random_groupoid(random.Random(7), 4, 2))),
        "sl2.rep.json": encode("rep", sl2_defining_rep()),
    }
    return out


def write_fixtures(directory) -> list[str]:
    from pathlib import Path

    from .specfile import write_spec

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    names = []
    for name, spec in fixture_specs().items():
        (d / name).write_text(write_spec(spec), encoding="utf-8")
        names.append(name)
    return names
