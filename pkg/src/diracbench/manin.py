"""Dirac-Manin triples, the double d x d*_beta, coisotropic reduction and the
Manin pair (q, g) with its morphism f_q to d.

The double is written in the block basis (d, d*): a vector is (x, mu) with
x in d and mu in d*.  Its metric is <(x,mu),(y,nu)> = mu(y) + nu(x) + beta(mu,nu),
so the gram is [[0, I], [I, B]] where B is the gram of beta.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .checks import Checks
from .liealg import (
    LieAlgebra,
    LieAlgebraError,
    LieMorphism,
    MetrizedLieAlgebra,
    check_jacobi,
    form_invariance_witness,
    morphism_witness,
    subalgebra_witness,
    subquotient,
)
from .ratlin import (
    Mat,
    Subspace,
    SymBilinearForm,
    SymBivector,
    annihilator,
    are_complementary,
    coisotropy_witness,
    full_space,
    image,
    intersect,
    orth_complement,
    preimage,
    projection_along,
    pushforward,
    span,
    unit_vec,
    zero_vec,
)


class ManinError(ValueError):
    pass


def bivector_invariance_witness(L: LieAlgebra, beta: SymBivector):
    """First basis index i with ad(e_i) B + B ad(e_i)^T != 0, or None.

    In terms of the coadjoint matrices this reads coad^T B + B coad = 0.
    """
    if beta.dim != L.dim:
        raise ManinError("bivector and algebra dimensions differ")
    B = beta.gram
    for i in range(L.dim):
        co = L.coadjoint(unit_vec(L.dim, i))
        m = co.T @ B + B @ co
        if not m.is_zero():
            return i
    return None


def check_ad_invariant_bivector(L: LieAlgebra, beta: SymBivector) -> bool:
    return bivector_invariance_witness(L, beta) is None


@dataclass(frozen=True)
class DiracManinTriple:
    d: LieAlgebra
    beta: SymBivector
    g: Subspace
    h: Subspace
    samples: tuple[Mat, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        n = self.d.dim
        if self.beta.dim != n or self.g.ambient_dim != n or self.h.ambient_dim != n:
            raise ManinError("triple components live in different dimensions")
        for A in self.samples:
            if A.shape != (n, n):
                raise ManinError("equivariance sample has the wrong size")

    @property
    def dim(self) -> int:
        return self.d.dim

    def pr_g(self) -> Mat:
        """Projection of d onto g along h."""
        return projection_along(self.g, self.h)

    def pr_h(self) -> Mat:
        """Projection of d onto h along g."""
        return projection_along(self.h, self.g)

    def adapted_basis(self) -> Mat:
        """Columns: canonical basis of g followed by canonical basis of h."""
        return Mat.from_columns(self.g.vectors() + self.h.vectors(), nrows=self.dim)


def check_equivariance(t: DiracManinTriple) -> Checks:
    c = Checks()
    d, B = t.d, t.beta
    for idx, A in enumerate(t.samples):
        inv = A.is_invertible()
        w = morphism_witness(LieMorphism(d, d, A)) if inv else None
        c.add(f"sample {idx}: automorphism of d", inv and w is None, w if inv else "singular")
        c.add(f"sample {idx}: preserves beta", pushforward(A, B) == B, pushforward(A, B).gram)
        c.add(f"sample {idx}: preserves h", image(A, t.h) == t.h, image(A, t.h))
    for idx, tau in enumerate(t.h.vectors()):
        ad = d.adjoint(tau)
        ok_h = image(ad, t.h) <= t.h
        c.add(f"generator {idx}: ad preserves h", ok_h, tau)
        m = ad @ B.gram + B.gram @ ad.T
        c.add(f"generator {idx}: ad annihilates beta", m.is_zero(), tau)
    return c


def is_exact(t: DiracManinTriple) -> bool:
    """beta nondegenerate and g Lagrangian for the metric beta^{-1}."""
    if not t.beta.is_nondegenerate():
        return False
    return orth_complement(t.g, t.beta.dual()) == t.g


def validate_triple(t: DiracManinTriple) -> Checks:
    c = Checks()
    d = t.d
    j = check_jacobi(d)
    c.add("d satisfies Jacobi", j.ok, j.first_failing_triple)
    w = bivector_invariance_witness(d, t.beta)
    c.add("beta ad-invariant", w is None, {"basis_index": w})
    w = subalgebra_witness(d, t.g)
    c.add("g is a subalgebra", w is None, w)
    w = coisotropy_witness(t.g, t.beta)
    c.add(
        "g is beta-coisotropic",
        w is None,
        None if w is None else {"annihilator_vectors": list(w), "beta": t.beta(*w)},
    )
    w = subalgebra_witness(d, t.h)
    c.add("h is a subalgebra", w is None, w)
    c.add(
        "g and h complementary",
        are_complementary(t.g, t.h),
        {"dim_g": t.g.dim, "dim_h": t.h.dim, "intersection": intersect(t.g, t.h)},
    )
    c.extend(check_equivariance(t))
    c.info["exact"] = is_exact(t)
    return c


# --------------------------------------------------------------- the double


@dataclass(frozen=True)
class Double:
    d: LieAlgebra
    beta: SymBivector
    dtilde: MetrizedLieAlgebra
    s_map: Mat
    t_map: Mat
    beta_tilde: SymBivector

    @property
    def n(self) -> int:
        return self.d.dim

    def embed_d(self, x) -> tuple:
        return tuple(x) + zero_vec(self.n)

    def embed_dual(self, mu) -> tuple:
        return zero_vec(self.n) + tuple(mu)


def build_double(d: LieAlgebra, beta: SymBivector) -> Double:
    n = d.dim
    w = bivector_invariance_witness(d, beta)
    if w is not None:
        raise ManinError(f"beta is not ad-invariant (fails at basis vector {w})")
    B = beta.gram
    N = 2 * n
    co = [d.coadjoint(unit_vec(n, i)) for i in range(n)]
    sc = [[zero_vec(N)] * N for _ in range(N)]
    for i in range(n):
        for j in range(n):
            sc[i][j] = d.sc[i][j] + zero_vec(n)
            # [e_i, eps_j] = coad(e_i) eps_j
            v = zero_vec(n) + co[i].col(j)
            sc[i][n + j] = v
            sc[n + j][i] = tuple(-a for a in v)
    for i in range(n):
        co_bi = d.coadjoint(B.col(i))
        for j in range(n):
            # [eps_i, eps_j]_beta = coad(beta# eps_i) eps_j
            sc[n + i][n + j] = zero_vec(n) + co_bi.col(j)
    labels = tuple(d.labels) + tuple(f"{a}*" for a in d.labels)
    try:
        alg = LieAlgebra(N, sc, labels)
    except LieAlgebraError as e:
        raise ManinError(f"the dual bracket is not skew: {e}") from None
    I, Z = Mat.identity(n), Mat.zeros(n, n)
    gram = Mat.block([[Z, I], [I, B]])
    dtilde = MetrizedLieAlgebra(alg, SymBilinearForm(gram))
    s_map = Mat.block([[I, Z]])
    t_map = Mat.block([[I, B]])
    beta_tilde = SymBivector(Mat.block([[-B, I], [I, Z]]))
    assert gram @ beta_tilde.gram == Mat.identity(N)
    return Double(d, beta, dtilde, s_map, t_map, beta_tilde)


def check_double(D: Double) -> Checks:
    c = Checks()
    j = check_jacobi(D.dtilde.algebra)
    c.add("double satisfies Jacobi", j.ok, j.first_failing_triple)
    w = form_invariance_witness(D.dtilde.algebra, D.dtilde.metric.gram)
    c.add("double metric ad-invariant", w is None, w)
    c.add("double metric nondegenerate", D.dtilde.metric.is_nondegenerate())
    c.add(
        "beta_tilde inverts the metric",
        D.dtilde.metric.gram @ D.beta_tilde.gram == Mat.identity(2 * D.n),
    )
    sb = pushforward(D.s_map, D.beta_tilde)
    tb = pushforward(D.t_map, D.beta_tilde)
    c.add("s(beta_tilde) = -beta", sb == -D.beta, sb.gram)
    c.add("t(beta_tilde) = beta", tb == D.beta, tb.gram)
    for name, m in (("s", D.s_map), ("t", D.t_map)):
        w = morphism_witness(LieMorphism(D.dtilde.algebra, D.d, m))
        c.add(f"{name} is a Lie algebra morphism", w is None, w)
    return c


# ------------------------------------------------------ coisotropic reduction


@dataclass(frozen=True)
class Reduction:
    """M_red = c / c^perp, with projection (ambient c -> M_red) and lift."""

    reduced: MetrizedLieAlgebra
    projection: Mat
    lift: Mat
    c: Subspace
    c_perp: Subspace


def reduce_coisotropic(M: MetrizedLieAlgebra, c: Subspace, labels=None) -> Reduction:
    L = M.algebra
    w = subalgebra_witness(L, c)
    if w is not None:
        raise ManinError(f"c is not a subalgebra: bracket {w[2]} leaves c")
    cp = orth_complement(c, M.metric)
    if not cp <= c:
        raise ManinError("c is not coisotropic: c^perp is not contained in c")
    for x in c.vectors():
        ad = L.adjoint(x)
        for y in cp.vectors():
            if not cp.contains(ad @ y):
                raise ManinError(f"c^perp is not an ideal in c: [{x}, {y}] leaves it")
    sq = subquotient(L, c, cp, labels)
    gram = sq.lift.T @ M.metric.gram @ sq.lift
    red = MetrizedLieAlgebra(sq.algebra, SymBilinearForm(gram))
    if not red.metric.is_nondegenerate():
        raise ManinError("reduced metric is degenerate")
    return Reduction(red, sq.projection, sq.lift, c, cp)


# ------------------------------------------------------------- Manin pair q


@dataclass(frozen=True)
class ManinPair:
    q: MetrizedLieAlgebra
    g: Subspace
    fq: LieMorphism | None = None
    r: Subspace | None = None
    reduction: Reduction | None = None
    double: Double | None = None
    g_embedding: Mat | None = None

    @property
    def gamma_q(self) -> SymBivector:
        return self.q.metric.dual()


def build_q_pair(t: DiracManinTriple) -> ManinPair:
    """q = (g x d*_beta) / (g x d*_beta)^perp with f_q the descent of t_map.

    When the triple carries h, the natural complement r = f_q^{-1}(h) is attached.
    """
    D = build_double(t.d, t.beta)
    n = t.dim
    C = preimage(D.s_map, t.g)
    labels = [f"q{i}" for i in range(2 * t.g.dim)]
    red = reduce_coisotropic(D.dtilde, C, labels)
    q = red.reduced
    if q.dim != 2 * t.g.dim:
        raise ManinError(f"dim q = {q.dim}, expected 2 dim g = {2 * t.g.dim}")
    for v in red.c_perp.vectors():
        if any(D.t_map @ v):
            raise ManinError(f"t does not vanish on the perp: {v}")
    fq = LieMorphism(q.algebra, t.d, D.t_map @ red.lift)
    g_emb = red.projection @ Mat.from_columns([D.embed_d(x) for x in t.g.vectors()], nrows=2 * n) \
        if t.g.dim else Mat.zeros(q.dim, 0)
    g_q = span(q.dim, g_emb.columns())
    r = None
    if t.h is not None and t.h.ambient_dim == n:
        r = preimage(fq.matrix, t.h)
    return ManinPair(q, g_q, fq, r, red, D, g_emb)


def check_q_pair(t: DiracManinTriple, P: ManinPair) -> Checks:
    c = Checks()
    q = P.q
    c.add("dim q = 2 dim g", q.dim == 2 * t.g.dim, {"dim_q": q.dim, "dim_g": t.g.dim})
    c.extend(q.validate(), "q: ")
    w = subalgebra_witness(q.algebra, P.g)
    c.add("g is a subalgebra of q", w is None, w)
    c.add("g is Lagrangian in q", q.is_lagrangian(P.g), q.perp(P.g))
    w = morphism_witness(P.fq)
    c.add("f_q is a Lie algebra morphism", w is None, w)
    incl = Mat.from_columns(t.g.vectors(), nrows=t.dim) if t.g.dim else Mat.zeros(t.dim, 0)
    c.add("f_q restricted to g is the inclusion", P.fq.matrix @ P.g_embedding == incl)
    fg = pushforward(P.fq.matrix, P.gamma_q)
    c.add("f_q(gamma_q) = beta", fg == t.beta, fg.gram)
    return c


def fq_is_bijective(P: ManinPair) -> bool:
    m = P.fq.matrix
    return m.is_square() and m.is_invertible()


# -------------------------------------------------- beta <-> (gamma_g, phi)


def build_beta(gamma_g: SymBivector, phi: Mat, d_dim: int, g: Subspace, h: Subspace) -> SymBivector:
    """Assemble beta from its g*-g* block gamma_g and its g*-h* block phi.

    d* = g* + h* where g* = ann(h) and h* = ann(g), identified through the
    canonical bases of g and h.  The h*-h* block is zero.
    """
    if g.ambient_dim != d_dim or h.ambient_dim != d_dim or not are_complementary(g, h):
        raise ManinError("g and h do not split d")
    if gamma_g.dim != g.dim or phi.shape != (g.dim, h.dim):
        raise ManinError("gamma_g or phi has the wrong shape")
    T = Mat.from_columns(g.vectors() + h.vectors(), nrows=d_dim)
    adapted = Mat.block([[gamma_g.gram, phi], [phi.T, Mat.zeros(h.dim, h.dim)]])
    return SymBivector(T @ adapted @ T.T)


def extract_gamma_phi(t: DiracManinTriple) -> tuple[SymBivector, Mat]:
    T = t.adapted_basis()
    Ti = T.inverse()
    adapted = Ti @ t.beta.gram @ Ti.T
    kg, kh = t.g.dim, t.h.dim
    if not adapted.submatrix(range(kg, kg + kh), range(kg, kg + kh)).is_zero():
        raise ManinError("g is not beta-coisotropic")
    gamma = SymBivector(adapted.submatrix(range(kg), range(kg)))
    phi = adapted.submatrix(range(kg), range(kg, kg + kh))
    return gamma, phi
