"""Classification data for Dirac actions on homogeneous spaces H/K.

A datum is (n, gamma_n, u, k, f_n) together with sample automorphism pairs
for K: n is a metrized Lie algebra, u a Lagrangian subalgebra, k a
subalgebra of u that f_n carries into h, and f_n: n -> d a morphism with
f_n(gamma_n) = beta.  Robinson's construction produces such a datum from a
beta-coisotropic subalgebra c of d by reducing c + d* inside the double.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .checks import Checks
from .dressing import (
    GroupElement,
    bullet_on_q,
    bullet_matrix_g,
    dressing_field,
    dressing_field_ambient,
    projections,
    q_groupoid,
    semidirect_compose,
    SemidirectElement,
    th_g_lift_inverse,
)
from .liealg import (
    LieAlgebra,
    LieMorphism,
    MetrizedLieAlgebra,
    check_jacobi,
    form_invariance_witness,
    morphism_witness,
    subalgebra_witness,
)
from .manin import DiracManinTriple, ManinPair, build_double, is_exact, reduce_coisotropic
from .ratlin import (
    Mat,
    Subspace,
    SymBilinearForm,
    SymBivector,
    Vec,
    annihilator,
    coisotropy_witness,
    image,
    intersect,
    is_coisotropic,
    kernel,
    orth_complement,
    preimage,
    pushforward,
    quotient,
    span,
    vadd,
    zero_space,
)


class ClassificationError(ValueError):
    pass


@dataclass(frozen=True)
class KSample:
    """An element of K: its action A_n on n, its Ad-action A_d on d, and
    optionally the group element itself (needed for group-level checks)."""

    A_n: Mat | None
    A_d: Mat
    element: GroupElement | None = None


@dataclass(frozen=True)
class ClassificationData:
    n: LieAlgebra
    gamma_n: SymBilinearForm
    u: Subspace
    k: Subspace
    f_n: LieMorphism
    K_samples: tuple[KSample, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "K_samples", tuple(self.K_samples))

    @property
    def metrized(self) -> MetrizedLieAlgebra:
        return MetrizedLieAlgebra(self.n, self.gamma_n)

    @property
    def gamma(self) -> SymBivector:
        return self.gamma_n.dual()


def validate_classification(data: ClassificationData, t: DiracManinTriple) -> Checks:
    c = Checks()
    n, G = data.n, data.gamma_n
    j = check_jacobi(n)
    c.add("n satisfies Jacobi", j.ok, j.first_failing_triple)
    c.add("(i) gamma_n nondegenerate", G.is_nondegenerate(), G.kernel())
    w = form_invariance_witness(n, G.gram)
    c.add("(i) gamma_n ad-invariant", w is None, w)
    w = morphism_witness(data.f_n)
    c.add("(ii) f_n is a Lie algebra morphism", w is None, w)
    if G.is_nondegenerate():
        fg = pushforward(data.f_n.matrix, data.gamma)
        c.add("(ii) f_n(gamma_n) = beta", fg == t.beta, fg.gram)
    else:
        c.add("(ii) f_n(gamma_n) = beta", False, "gamma_n is degenerate")
    w = subalgebra_witness(n, data.u)
    c.add("(iii) u is a subalgebra", w is None, w)
    perp = orth_complement(data.u, G)
    c.add("(iii) u is Lagrangian", perp == data.u, perp)
    c.add("(iii) k is contained in u", data.k <= data.u, data.k)
    w = subalgebra_witness(n, data.k)
    c.add("(iii) k is a subalgebra", w is None, w)
    fk = image(data.f_n.matrix, data.k)
    c.add("(iii) f_n maps k into h", fk <= t.h, fk)
    c.add("(iii) f_n is injective on k", fk.dim == data.k.dim, data.k)
    for i, kap in enumerate(data.k.vectors()):
        ad = n.adjoint(kap)
        c.add(f"k generator {i}: ad preserves u", image(ad, data.u) <= data.u, kap)
    for i, s in enumerate(data.K_samples):
        An, Ad = s.A_n, s.A_d
        if An is None:
            c.add(f"K sample {i}: has an action on n", False, "A_n missing")
            continue
        w = morphism_witness(LieMorphism(n, n, An)) if An.is_invertible() else "singular"
        c.add(f"K sample {i}: A_n automorphism of n", w is None, w)
        c.add(f"K sample {i}: A_n preserves gamma_n", An.T @ G.gram @ An == G.gram)
        c.add(f"K sample {i}: A_n preserves u", image(An, data.u) == data.u)
        c.add(f"K sample {i}: A_n preserves k", image(An, data.k) == data.k)
        w = morphism_witness(LieMorphism(t.d, t.d, Ad)) if Ad.is_invertible() else "singular"
        c.add(f"K sample {i}: A_d automorphism of d", w is None, w)
        c.add(f"K sample {i}: A_d preserves beta", pushforward(Ad, t.beta) == t.beta)
        c.add(f"K sample {i}: A_d preserves h", image(Ad, t.h) == t.h)
        lhs, rhs = data.f_n.matrix @ An, Ad @ data.f_n.matrix
        c.add(f"K sample {i}: f_n equivariant", lhs == rhs, lhs - rhs)
    return c


# ----------------------------------------------------------------- F_n


def _g_to_q(t: DiracManinTriple, P: ManinPair) -> Mat:
    """d -> q: pr_g along h, then embed g into q."""
    return P.g_embedding @ t.g.coordinate_map() @ projections(t)[0]


def build_F_n(data: ClassificationData, t: DiracManinTriple, P: ManinPair | None = None) -> Mat:
    """F_n: q -> n with <F_n(lam), zeta>_n = <lam, pr_g f_n(zeta)>_q."""
    if P is None:
        P, _ = q_groupoid(t)
    Phi = _g_to_q(t, P) @ data.f_n.matrix
    return data.gamma_n.gram.inverse() @ Phi.T @ P.q.metric.gram


def check_F_n(data: ClassificationData, t: DiracManinTriple, P: ManinPair | None = None) -> Checks:
    if P is None:
        P, _ = q_groupoid(t)
    F = build_F_n(data, t, P)
    c = Checks()
    bad = next((x for x in P.g.vectors() if any(F @ x)), None)
    c.add("F_n vanishes on g", bad is None, bad)
    # second path: lam |-> mu_lam in ann(h) = g*, then f_n^*(mu) = G_n^-1 f_n^T mu
    muq = _g_to_q(t, P).T @ P.q.metric.gram
    ann_h = annihilator(t.h)
    bad = next((x for x in Mat.identity(P.q.dim).columns() if not ann_h.contains(muq @ x)), None)
    c.add("mu_lambda annihilates h", bad is None, bad)
    F2 = data.gamma_n.gram.inverse() @ data.f_n.matrix.T @ muq
    c.add("F_n equals f_n^* on g* = q/g", F == F2, F - F2)
    c.add("pr_g f_n F_n = t_q - s_q",
          _pr_g_f_n_q(data, t, P) @ F == q_groupoid(t)[1].groupoid.t_map - q_groupoid(t)[1].groupoid.s_map)
    return c


def _pr_g_f_n_q(data, t, P) -> Mat:
    return _g_to_q(t, P) @ data.f_n.matrix


# ------------------------------------------------------------ normal form


@dataclass(frozen=True)
class NFElement:
    """A representative (h, zeta) of a point of H x_K n."""

    h: GroupElement
    zeta: Vec


@dataclass
class NormalForm:
    data: ClassificationData
    triple: DiracManinTriple
    F_n: Mat
    pair: ManinPair

    def __post_init__(self):
        pr_g, _ = projections(self.triple)
        self._pg_fn = self.triple.g.coordinate_map() @ pr_g @ self.data.f_n.matrix

    def moment(self, y: NFElement) -> Vec:
        """u_P(h, zeta) = h . pr_g f_n(zeta), as a vector of g inside d."""
        t = self.triple
        xi = self._pg_fn @ y.zeta
        return t.g.inclusion() @ (bullet_matrix_g(t, y.h) @ xi)

    def moment_q(self, y: NFElement) -> Vec:
        t = self.triple
        return self.pair.g_embedding @ (t.g.coordinate_map() @ self.moment(y))

    def action(self, x: SemidirectElement, y: NFElement) -> NFElement:
        """(g, lam) o (h, zeta) = (g h, zeta + F_n(h^-1 . lam))."""
        t = self.triple
        _, MG = q_groupoid(t)
        s = MG.groupoid.s_map @ x.lam
        if s != self.moment_q(y):
            raise ClassificationError(f"not composable: s = {s}, u = {self.moment_q(y)}")
        lam = bullet_on_q(t, y.h.inverse(), self.pair) @ x.lam
        return NFElement(x.h @ y.h, vadd(y.zeta, self.F_n @ lam))

    def anchor(self, y: NFElement) -> Vec:
        """a_P(h, zeta) = Ad_{h^-1} pr_h Ad_h f_n(zeta), in h coordinates."""
        return dressing_field(self.triple, y.h, self.data.f_n.matrix @ y.zeta)

    def anchor_via_lift(self, y: NFElement) -> Vec:
        """The h-component of f_n(zeta) under the trivialization h + g -> d."""
        tau, _ = th_g_lift_inverse(self.triple, y.h, self.data.f_n.matrix @ y.zeta)
        return self.triple.h.coordinates(tau)

    def k_translate(self, y: NFElement, s: KSample) -> NFElement:
        """(h, zeta) -> (h k^-1, k . zeta), another representative of the same point."""
        if s.element is None or s.A_n is None:
            raise ClassificationError("K sample lacks a group element or an action on n")
        return NFElement(y.h @ s.element.inverse(), s.A_n @ y.zeta)


def normal_form(data: ClassificationData, t: DiracManinTriple) -> NormalForm:
    P, _ = q_groupoid(t)
    return NormalForm(data, t, build_F_n(data, t, P), P)


def check_normal_form(nf: NormalForm, hs: Sequence[GroupElement], zetas: Sequence[Vec]) -> Checks:
    """Module laws on exhaustive basis-generated composables.

    y ranges over (h, zeta) for h in hs and zeta in zetas; x2 over the
    semidirect elements with source u(y); x1 over those with source t(x2).
    """
    from .dressing import elements_with_source, sd_target, semidirect_unit

    t = nf.triple
    c = Checks()
    bad = {k: None for k in ("unit", "moment", "assoc", "descent", "anchor")}
    n_pairs = n_triples = 0
    for h in hs:
        for zeta in zetas:
            y = NFElement(h, tuple(zeta))
            if nf.anchor(y) != nf.anchor_via_lift(y) and bad["anchor"] is None:
                bad["anchor"] = (y.h.matrix, y.zeta)
            uq = nf.moment_q(y)
            u = semidirect_unit(t, h.rep, uq)
            if nf.action(u, y) != NFElement(u.h @ y.h, y.zeta) and bad["unit"] is None:
                bad["unit"] = y.zeta
            ks = [s for s in nf.data.K_samples if s.element is not None]
            for s in ks:
                if nf.moment(nf.k_translate(y, s)) != nf.moment(y) and bad["descent"] is None:
                    bad["descent"] = ("moment", y.zeta)
            for x2 in elements_with_source(t, uq, hs):
                n_pairs += 1
                z = nf.action(x2, y)
                if nf.moment_q(z) != sd_target(t, x2) and bad["moment"] is None:
                    bad["moment"] = (x2.lam, y.zeta)
                for s in ks:
                    z2 = nf.action(x2, nf.k_translate(y, s))
                    if z2 != nf.k_translate(z, s) and bad["descent"] is None:
                        bad["descent"] = ("action", x2.lam, y.zeta)
                for x1 in elements_with_source(t, sd_target(t, x2), hs[:2]):
                    n_triples += 1
                    lhs = nf.action(semidirect_compose(t, x1, x2), y)
                    rhs = nf.action(x1, z)
                    if lhs != rhs and bad["assoc"] is None:
                        bad["assoc"] = (x1.lam, x2.lam, y.zeta)
    c.add("unit law", bad["unit"] is None, bad["unit"])
    c.add("u(x o y) = t(x)", bad["moment"] is None, bad["moment"])
    c.add("associativity with the semidirect product", bad["assoc"] is None, bad["assoc"])
    c.add("K-descent", bad["descent"] is None, bad["descent"])
    c.add("anchor = dressing field of f_n", bad["anchor"] is None, bad["anchor"])
    c.info["composable_pairs"] = n_pairs
    c.info["composable_triples"] = n_triples
    return c


# ------------------------------------------------------------ fiber reduction


@dataclass(frozen=True)
class FiberReduction:
    metric: SymBilinearForm
    projection: Mat
    lift: Mat
    l: Subspace
    algebra: LieAlgebra | None = None

    @property
    def dim(self) -> int:
        return self.metric.dim


def reduce_fibers(data: ClassificationData) -> FiberReduction:
    """p = k^perp / k with its induced metric, and l = u / k."""
    G = data.gamma_n
    kp = orth_complement(data.k, G)
    if not data.k <= kp:
        raise ClassificationError("k is not isotropic")
    coords = kp.coordinate_map()
    k_c = span(kp.dim, [coords @ v for v in data.k.vectors()])
    qs = quotient(kp.dim, k_c)
    proj = qs.projection @ coords
    lift = kp.inclusion() @ qs.section
    metric = SymBilinearForm(lift.T @ G.gram @ lift)
    if not metric.is_nondegenerate():
        raise ClassificationError("the metric does not descend to a nondegenerate metric on p")
    if not data.u <= kp:
        raise ClassificationError("u is not contained in k^perp")
    l = span(qs.dim, [proj @ v for v in data.u.vectors()])
    alg = None
    if subalgebra_witness(data.n, kp) is None:
        from .liealg import LieAlgebraError, subquotient

        try:
            alg = subquotient(data.n, kp, data.k).algebra
        except LieAlgebraError:
            alg = None
    return FiberReduction(metric, proj, lift, l, alg)


# ------------------------------------------------------------ transitivity


def check_transitive(data: ClassificationData, t: DiracManinTriple) -> bool:
    f = data.f_n.matrix
    fu = image(f, data.u)
    if fu.dim != data.u.dim:
        return False
    return intersect(fu, t.h) == image(f, data.k)


# ------------------------------------------------------------ Robinson


@dataclass(frozen=True)
class RobinsonDatum:
    c: Subspace
    k: Subspace
    samples: tuple[KSample, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))


def validate_robinson(datum: RobinsonDatum, t: DiracManinTriple) -> Checks:
    c = Checks()
    w = subalgebra_witness(t.d, datum.c)
    c.add("c is a subalgebra", w is None, w)
    w = coisotropy_witness(datum.c, t.beta)
    c.add("c is beta-coisotropic", w is None, w)
    ch = intersect(datum.c, t.h)
    c.add("c meets h in k", ch == datum.k, ch)
    for i, s in enumerate(datum.samples):
        c.add(f"K sample {i}: preserves c", image(s.A_d, datum.c) == datum.c)
        c.add(f"K sample {i}: preserves k", image(s.A_d, datum.k) == datum.k)
    return c


@dataclass(frozen=True)
class RobinsonBuild:
    data: ClassificationData
    projection: Mat
    lift: Mat
    C: Subspace


def robinson_reduce(t: DiracManinTriple, c: Subspace):
    D = build_double(t.d, t.beta)
    C = preimage(D.s_map, c)
    red = reduce_coisotropic(D.dtilde, C, [f"n{i}" for i in range(2 * c.dim)])
    return D, C, red


def robinson_build(datum: RobinsonDatum, t: DiracManinTriple) -> RobinsonBuild:
    rep = validate_robinson(datum, t)
    if not rep.ok:
        raise ClassificationError(f"invalid Robinson datum: {[x.name for x in rep.failures()]}")
    D, C, red = robinson_reduce(t, datum.c)
    nalg = red.reduced
    d = t.dim
    if nalg.dim != datum.c.dim + d - red.c_perp.dim or nalg.dim != 2 * datum.c.dim:
        raise ClassificationError("dimension bookkeeping failed for the Robinson reduction")
    emb = lambda vs: [red.projection @ D.embed_d(x) for x in vs]
    u = span(nalg.dim, emb(datum.c.vectors()))
    k = span(nalg.dim, emb(datum.k.vectors()))
    f_n = LieMorphism(nalg.algebra, t.d, D.t_map @ red.lift)
    samples = []
    for s in datum.samples:
        Ad = s.A_d
        big = Mat.block([[Ad, Mat.zeros(d, d)], [Mat.zeros(d, d), Ad.inverse().T]])
        samples.append(KSample(red.projection @ big @ red.lift, Ad, s.element))
    data = ClassificationData(nalg.algebra, nalg.metric, u, k, f_n, tuple(samples))
    return RobinsonBuild(data, red.projection, red.lift, C)


def comparison_map(data: ClassificationData, t: DiracManinTriple) -> tuple[Mat, RobinsonBuild]:
    """The map zeta + f_n^*(mu) |-> [f_n(zeta) + mu] from n to the reduction of c = f_n(u).

    Solved from its values on u and on f_n^*(d*); raises if these do not span
    n or the prescription is inconsistent.
    """
    f = data.f_n.matrix
    c = image(f, data.u)
    k = image(f, data.k)
    rb = robinson_build(RobinsonDatum(c, k), t)
    D = build_double(t.d, t.beta)
    d = t.dim
    Ginv = data.gamma_n.gram.inverse()
    srcs, vals = [], []
    for zeta in data.u.vectors():
        srcs.append(zeta)
        vals.append(rb.projection @ D.embed_d(f @ zeta))
    for mu in Mat.identity(d).columns():
        srcs.append(Ginv @ (f.T @ mu))
        vals.append(rb.projection @ D.embed_dual(mu))
    X = Mat(srcs, ncols=data.n.dim)
    if X.rank() != data.n.dim:
        raise ClassificationError("u and f_n^*(d*) do not span n")
    Mt = X.solve_matrix(Mat(vals, ncols=rb.data.n.dim))
    if Mt is None:
        raise ClassificationError("the comparison map is not well defined")
    return Mt.T, rb


def check_comparison_map(data: ClassificationData, t: DiracManinTriple) -> Checks:
    M, rb = comparison_map(data, t)
    tgt = rb.data
    c = Checks()
    c.add("comparison map is bijective", M.is_square() and M.is_invertible())
    w = morphism_witness(LieMorphism(data.n, tgt.n, M))
    c.add("comparison map preserves brackets", w is None, w)
    c.add("comparison map is isometric", M.T @ tgt.gamma_n.gram @ M == data.gamma_n.gram)
    c.add("comparison map carries u to u", image(M, data.u) == tgt.u)
    c.add("comparison map intertwines f_n", tgt.f_n.matrix @ M == data.f_n.matrix)
    return c


def check_exact_case(data: ClassificationData, t: DiracManinTriple) -> tuple[bool, Subspace | None]:
    if not is_exact(t):
        raise ClassificationError("the triple is not exact")
    f = data.f_n.matrix
    if data.n.dim != t.dim or not f.is_invertible():
        return False, None
    return True, image(f, data.u)


# ------------------------------------------------------------ LA precursor


@dataclass(frozen=True)
class LAClassData:
    u_alg: LieAlgebra
    k: Subspace
    f_u: LieMorphism


def validate_la_data(lad: LAClassData, t: DiracManinTriple) -> Checks:
    c = Checks()
    w = morphism_witness(lad.f_u)
    c.add("f_u is a Lie algebra morphism", w is None, w)
    w = subalgebra_witness(lad.u_alg, lad.k)
    c.add("k is a subalgebra", w is None, w)
    fk = image(lad.f_u.matrix, lad.k)
    c.add("f_u maps k into h", fk <= t.h, fk)
    return c


def la_moment(lad: LAClassData, t: DiracManinTriple, h: GroupElement, zeta) -> Vec:
    """u_L([(h, zeta mod k)]) = pr_g(Ad_h f_u(zeta))."""
    from .dressing import ehat_moment

    return ehat_moment(t, h, lad.f_u.matrix @ tuple(zeta))


# ------------------------------------------------------------ search


def search_coisotropic(
    t: DiracManinTriple,
    candidates: Sequence[Sequence],
    k: Subspace | None = None,
    lagrangian: bool = False,
    dim: int | None = None,
    samples: Sequence[Mat] = (),
) -> list[Subspace]:
    """All distinct spans of candidate subsets that are beta-coisotropic subalgebras
    meeting h in k (any k when None), optionally Lagrangian and of a given dimension.

    Subsets are visited in lexicographic order of their index tuples and the
    first occurrence of each subspace is kept.
    """
    n = t.dim
    vecs = [tuple(v) for v in candidates]
    idx = sorted(
        (s for r in range(1, len(vecs) + 1) for s in combinations(range(len(vecs)), r))
    )
    seen, out = set(), []
    for subset in idx:
        c = span(n, [vecs[i] for i in subset])
        if c in seen:
            continue
        seen.add(c)
        if dim is not None and c.dim != dim:
            continue
        if not is_coisotropic(c, t.beta) or subalgebra_witness(t.d, c) is not None:
            continue
        if k is not None and intersect(c, t.h) != k:
            continue
        if lagrangian and span(n, [t.beta.sharp(mu) for mu in annihilator(c).vectors()]) != c:
            continue
        if any(image(A, c) != c for A in samples):
            continue
        out.append(c)
    return out
