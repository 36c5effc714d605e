"""Group-level formulas on rational matrix groups.

Group elements are invertible rational matrices h acting on a faithful
representation of d; Ad_h is recovered by solving rho(Ad_h x) = h rho(x) h^-1.
The dressing action of d on H in left trivialization is

    rho(lambda)_h = Ad_{h^-1} pr_h Ad_h lambda,

with pr_h the projection onto h along g.  The bullet action of H on g is
h . xi = pr_g Ad_h xi, and it extends uniquely to the Manin pair q as the
action preserving the metric and the source and target maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .checks import Checks
from .liealg import LieMorphism, MatrixRep, morphism_witness
from .lingpd import LinearGroupoid, MetrizedLinearGroupoid, from_manin_pair, invert
from .manin import DiracManinTriple, ManinPair, build_q_pair, is_exact
from .ratlin import (
    Mat,
    Subspace,
    Vec,
    image,
    is_coisotropic,
    kernel,
    orth_complement,
    projection_along,
    pushforward,
    vadd,
    vsub,
)


class DressingError(ValueError):
    pass


def adjoint_of(rep: MatrixRep, h: Mat, lam=None):
    """Ad_h as a matrix on d, or Ad_h(lam) when lam is given."""
    A = _adjoint_matrix(rep, h)
    return A if lam is None else A @ tuple(lam)


@lru_cache(maxsize=4096)
def _adjoint_matrix(rep: MatrixRep, h: Mat) -> Mat:
    if h.shape != (rep.rep_dim, rep.rep_dim) or not h.is_invertible():
        raise DressingError("group element is not an invertible matrix of the rep size")
    hi = h.inverse()
    R = rep.flat_matrix()
    cols = []
    for im in rep.images:
        conj = h @ im @ hi
        x = R.solve(sum(conj.rows, ()))
        if x is None:
            raise DressingError("h does not normalize the image of d")
        cols.append(x)
    return Mat.from_columns(cols, nrows=rep.algebra.dim)


@lru_cache(maxsize=4096)
def _mat_inverse(m: Mat) -> Mat:
    return m.inverse()


@dataclass(frozen=True)
class GroupElement:
    rep: MatrixRep
    matrix: Mat

    def __post_init__(self):
        adjoint_of(self.rep, self.matrix)

    @property
    def Ad(self) -> Mat:
        return adjoint_of(self.rep, self.matrix)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if other.rep != self.rep:
            raise DressingError("group elements use different representations")
        return GroupElement(self.rep, self.matrix @ other.matrix)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.rep, _mat_inverse(self.matrix))

    @classmethod
    def identity(cls, rep: MatrixRep) -> "GroupElement":
        return cls(rep, Mat.identity(rep.rep_dim))

    def is_identity(self) -> bool:
        return self.matrix == Mat.identity(self.rep.rep_dim)


@dataclass(frozen=True)
class TrivializedTangent:
    base: GroupElement
    vector: Vec


def check_group_element(t: DiracManinTriple, h: GroupElement) -> Checks:
    c = Checks()
    A = h.Ad
    w = morphism_witness(LieMorphism(t.d, t.d, A))
    c.add("Ad_h is an automorphism of d", A.is_invertible() and w is None, w)
    c.add("Ad_h preserves h", image(A, t.h) == t.h, image(A, t.h))
    pb = pushforward(A, t.beta)
    c.add("Ad_h preserves beta", pb == t.beta, pb.gram)
    return c


@lru_cache(maxsize=4096)
def _require_valid(t: DiracManinTriple, h: GroupElement) -> bool:
    rep = check_group_element(t, h)
    if not rep.ok:
        raise DressingError(f"invalid group element: {[x.name for x in rep.failures()]}")
    return True


@lru_cache(maxsize=256)
def projections(t: DiracManinTriple) -> tuple[Mat, Mat]:
    return t.pr_g(), t.pr_h()


def dressing_field_ambient(t: DiracManinTriple, h: GroupElement, lam) -> Vec:
    """rho(lam)_h = Ad_{h^-1} pr_h Ad_h lam, as a vector of d lying in h."""
    _require_valid(t, h)
    _, pr_h = projections(t)
    return h.inverse().Ad @ (pr_h @ (h.Ad @ tuple(lam)))


def dressing_field(t: DiracManinTriple, h: GroupElement, lam) -> Vec:
    """The dressing vector field at h, in the canonical coordinates of h."""
    return t.h.coordinates(dressing_field_ambient(t, h, lam))


def dressing_matrix(t: DiracManinTriple, h: GroupElement) -> Mat:
    """The linear map lam |-> rho(lam)_h on d (ambient values)."""
    _require_valid(t, h)
    _, pr_h = projections(t)
    return h.inverse().Ad @ pr_h @ h.Ad


def ehat_moment(t: DiracManinTriple, h: GroupElement, lam) -> Vec:
    """u(h, lam) = pr_g(Ad_h lam)."""
    _require_valid(t, h)
    pr_g, _ = projections(t)
    return pr_g @ (h.Ad @ tuple(lam))


def bullet_on_g(t: DiracManinTriple, h: GroupElement, xi) -> Vec:
    xi = tuple(xi)
    if not t.g.contains(xi):
        raise DressingError("xi is not in g")
    return ehat_moment(t, h, xi)


def bullet_matrix_g(t: DiracManinTriple, h: GroupElement) -> Mat:
    """h . on g, in the canonical coordinates of g."""
    _require_valid(t, h)
    pr_g, _ = projections(t)
    return t.g.coordinate_map() @ pr_g @ h.Ad @ t.g.inclusion()


@lru_cache(maxsize=64)
def q_groupoid(t: DiracManinTriple) -> tuple[ManinPair, MetrizedLinearGroupoid]:
    P = build_q_pair(t)
    return P, from_manin_pair(P)


def bullet_on_q(t: DiracManinTriple, h: GroupElement, P: ManinPair | None = None) -> Mat:
    """The unique extension of the bullet action to q preserving the metric, s and t.

    It preserves g (acting by bullet) and r = ker t; on r it is the
    contragredient of the g-action under the perfect pairing g x r.
    """
    if P is None or P is q_groupoid(t)[0]:
        return _bullet_on_q(t, h)
    return _bullet_on_q_uncached(t, h, P)


@lru_cache(maxsize=4096)
def _bullet_on_q(t: DiracManinTriple, h: GroupElement) -> Mat:
    return _bullet_on_q_uncached(t, h, q_groupoid(t)[0])


def _bullet_on_q_uncached(t: DiracManinTriple, h: GroupElement, P: ManinPair) -> Mat:
    Bg = bullet_matrix_g(t, h)
    E = P.g_embedding
    R = P.r.inclusion()
    G = P.q.metric.gram
    Pi = E.T @ G @ R
    X = Pi.inverse() @ Bg.inverse().T @ Pi
    T = E.hstack(R)
    blk = Mat.block([[Bg, Mat.zeros(Bg.nrows, X.ncols)], [Mat.zeros(X.nrows, Bg.ncols), X]])
    return T @ blk @ T.inverse()


def check_bullet_on_q(t: DiracManinTriple, hs: list[GroupElement]) -> Checks:
    P, MG = q_groupoid(t)
    G = MG.groupoid
    c = Checks()
    rp = orth_complement(P.r, P.q.metric)
    for i, h in enumerate(hs):
        M = bullet_on_q(t, h, P)
        c.add(f"h{i}: metric preserved", M.T @ P.q.metric.gram @ M == P.q.metric.gram)
        c.add(f"h{i}: r perp preserved", image(M, rp) == rp)
        c.add(f"h{i}: s equivariant", M @ G.s_map == G.s_map @ M)
        c.add(f"h{i}: t equivariant", M @ G.t_map == G.t_map @ M)
        Bd = P.g_embedding @ bullet_matrix_g(t, h) @ t.g.coordinate_map() @ P.fq.matrix
        c.add(f"h{i}: extends the bullet action on g",
              all(M @ x == Bd @ x for x in P.g.vectors()))
        for j, k in enumerate(hs):
            c.add(f"h{i} h{j}: group law", bullet_on_q(t, h @ k, P) == M @ bullet_on_q(t, k, P))
    return c


# ---------------------------------------------------- semidirect product


@dataclass(frozen=True)
class SemidirectElement:
    h: GroupElement
    lam: Vec


def sd_source(t: DiracManinTriple, x: SemidirectElement) -> Vec:
    _, MG = q_groupoid(t)
    return MG.groupoid.s_map @ x.lam


def sd_target(t: DiracManinTriple, x: SemidirectElement) -> Vec:
    P, MG = q_groupoid(t)
    return bullet_on_q(t, x.h, P) @ (MG.groupoid.t_map @ x.lam)


def semidirect_compose(t: DiracManinTriple, x: SemidirectElement, y: SemidirectElement) -> SemidirectElement:
    """(h1, l1) o (h2, l2) = (h1 h2, l2 + h2^-1 . (l1 - s l1))."""
    P, MG = q_groupoid(t)
    s1 = sd_source(t, x)
    t2 = sd_target(t, y)
    if s1 != t2:
        raise DressingError(f"not composable: s = {s1}, t = {t2}")
    core = vsub(x.lam, s1)
    lam = vadd(y.lam, bullet_on_q(t, y.h.inverse(), P) @ core)
    return SemidirectElement(x.h @ y.h, lam)


def semidirect_invert(t: DiracManinTriple, x: SemidirectElement) -> SemidirectElement:
    P, MG = q_groupoid(t)
    return SemidirectElement(x.h.inverse(), bullet_on_q(t, x.h, P) @ invert(MG.groupoid, x.lam))


def elements_with_source(t: DiracManinTriple, xi_q, hs) -> list[SemidirectElement]:
    """(h, xi + w) for h in hs and w in {0} + a basis of ker s_q: the basis-generated
    elements whose source is the unit xi."""
    _, MG = q_groupoid(t)
    xi_q = tuple(xi_q)
    ws = [None] + kernel(MG.groupoid.s_map).vectors()
    return [SemidirectElement(h, xi_q if w is None else vadd(xi_q, w)) for h in hs for w in ws]


def check_semidirect(t: DiracManinTriple, hs, units_q) -> Checks:
    """Groupoid laws of H x q on exhaustive basis-generated composables.

    For each unit xi, y ranges over the elements with source xi, x over the
    elements with source t(y), and w over those with source t(x).
    """
    c = Checks()
    rep = hs[0].rep
    e = GroupElement.identity(rep)
    bad = {k: None for k in ("unit", "source", "target", "assoc", "inverse")}
    count = 0
    for xi in units_q:
        for y in elements_with_source(t, xi, hs):
            ty = sd_target(t, y)
            if semidirect_compose(t, semidirect_unit(t, rep, ty), y) != y and bad["unit"] is None:
                bad["unit"] = y.lam
            if semidirect_compose(t, y, semidirect_unit(t, rep, sd_source(t, y))) != y and bad["unit"] is None:
                bad["unit"] = y.lam
            yi = semidirect_invert(t, y)
            if (semidirect_compose(t, y, yi) != semidirect_unit(t, rep, ty)
                    or semidirect_compose(t, yi, y) != semidirect_unit(t, rep, sd_source(t, y))) and bad["inverse"] is None:
                bad["inverse"] = y.lam
            for x in elements_with_source(t, ty, hs):
                xy = semidirect_compose(t, x, y)
                if sd_source(t, xy) != sd_source(t, y) and bad["source"] is None:
                    bad["source"] = (x.lam, y.lam)
                if sd_target(t, xy) != sd_target(t, x) and bad["target"] is None:
                    bad["target"] = (x.lam, y.lam)
                for w in elements_with_source(t, sd_target(t, x), hs[:2]):
                    count += 1
                    lhs = semidirect_compose(t, semidirect_compose(t, w, x), y)
                    rhs = semidirect_compose(t, w, xy)
                    if lhs != rhs and bad["assoc"] is None:
                        bad["assoc"] = (w.lam, x.lam, y.lam)
    c.add("unit laws", bad["unit"] is None, bad["unit"])
    c.add("inverse laws", bad["inverse"] is None, bad["inverse"])
    c.add("s(xy) = s(y)", bad["source"] is None, bad["source"])
    c.add("t(xy) = t(x)", bad["target"] is None, bad["target"])
    c.add("associativity", bad["assoc"] is None, bad["assoc"])
    c.info["composable_triples"] = count
    return c


def semidirect_unit(t: DiracManinTriple, rep: MatrixRep, xi_q) -> SemidirectElement:
    return SemidirectElement(GroupElement.identity(rep), tuple(xi_q))


# ------------------------------------------------------------ stabilizers


@dataclass(frozen=True)
class StabilizerReport:
    kernel: Subspace
    equals_ad_hinv_g: bool
    equals_ad_h_g: bool
    coisotropic: bool


def stabilizer_kernel(t: DiracManinTriple, h: GroupElement) -> StabilizerReport:
    K = kernel(dressing_matrix(t, h))
    return StabilizerReport(
        K,
        K == image(h.inverse().Ad, t.g),
        K == image(h.Ad, t.g),
        is_coisotropic(K, t.beta),
    )


# ---------------------------------------------------------- exact splitting


def exact_splitting(t: DiracManinTriple, h: GroupElement, nu_h) -> Vec:
    """sigma(nu) = nu - 1/2 Ad_{h^-1} (1 - pr_{h perp}) Ad_h nu.

    pr_{h perp} projects onto the orthogonal of h (for the metric beta^{-1})
    along g; nu is given in the canonical coordinates of h.
    """
    if not is_exact(t):
        raise DressingError("the triple is not exact")
    _require_valid(t, h)
    nu = t.h.inclusion() @ tuple(nu_h)
    one_minus = _one_minus_pr_hperp(t)
    corr = h.inverse().Ad @ (one_minus @ (h.Ad @ nu))
    return vsub(nu, tuple(Fraction(1, 2) * a for a in corr))


@lru_cache(maxsize=64)
def _one_minus_pr_hperp(t: DiracManinTriple) -> Mat:
    hp = orth_complement(t.h, t.beta.dual())
    return projection_along(t.g, hp)


def check_exact_splitting(t: DiracManinTriple, h: GroupElement) -> Checks:
    c = Checks()
    metric = t.beta.dual()
    k = t.h.dim
    sig = [exact_splitting(t, h, tuple(1 if i == j else 0 for j in range(k))) for i in range(k)]
    bad = next(((i, j) for i in range(k) for j in range(i, k) if metric(sig[i], sig[j])), None)
    c.add("splitting image is isotropic", bad is None, bad)
    bad = next((i for i in range(k) if dressing_field(t, h, sig[i]) != tuple(1 if j == i else 0 for j in range(k))), None)
    c.add("anchor o splitting = id", bad is None, bad)
    return c


# ------------------------------------------------------------ trivialization


def th_g_lift(t: DiracManinTriple, h: GroupElement, tau, xi) -> Vec:
    """(tau, xi) in h + g |-> tau + Ad_{h^-1} xi in d."""
    tau, xi = tuple(tau), tuple(xi)
    if not t.h.contains(tau) or not t.g.contains(xi):
        raise DressingError("tau must lie in h and xi in g")
    return vadd(tau, h.inverse().Ad @ xi)


def th_g_lift_inverse(t: DiracManinTriple, h: GroupElement, zeta) -> tuple[Vec, Vec]:
    pr_g, pr_h = projections(t)
    y = h.Ad @ tuple(zeta)
    return h.inverse().Ad @ (pr_h @ y), pr_g @ y


def anchor_q(t: DiracManinTriple, h: GroupElement, lam_q) -> Vec:
    """The anchor of H x q at h: the dressing field of f_q(lam)."""
    P, _ = q_groupoid(t)
    return dressing_field(t, h, P.fq.matrix @ tuple(lam_q))
