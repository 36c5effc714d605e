"""Linear groupoids: the unit fiber of a VB-groupoid over a group.

A linear groupoid is a vector space V with a unit subspace V0 and two
idempotent projections s, t of V onto V0.  Linearity of the graph of the
multiplication together with the unit laws forces

    x o y = x + y - s(x)        (defined when s(x) = t(y))
    x^-1  = s(x) + t(x) - x

so the multiplication is never stored.  Modules act by
x o y = y + A(x - s(x)) when s(x) = u(y), with A given on ker(s).
Duals (Pradines) live on V* and are verified against the pairing law
<mu1 o mu2, v1 o v2> = <mu1, v1> + <mu2, v2>.
"""

from __future__ import annotations

from dataclasses import dataclass

from .checks import Checks
from .manin import ManinPair
from .ratlin import (
    Mat,
    QuotientSpace,
    Subspace,
    SymBilinearForm,
    SymBivector,
    Vec,
    are_complementary,
    column_space,
    dot,
    image,
    kernel,
    orth_complement,
    projection_along,
    pushforward,
    quotient,
    span,
    vadd,
    vsub,
)


class GroupoidError(ValueError):
    pass


@dataclass(frozen=True)
class LinearGroupoid:
    dim: int
    units: Subspace
    s_map: Mat
    t_map: Mat

    def __post_init__(self):
        n = self.dim
        if self.units.ambient_dim != n or self.s_map.shape != (n, n) or self.t_map.shape != (n, n):
            raise GroupoidError("groupoid data have inconsistent dimensions")

    @property
    def core(self) -> QuotientSpace:
        return quotient(self.dim, self.units)

    def core_from_ker_s(self) -> Mat:
        """ker(s) -> core, restricted from the quotient projection (columns on ker s basis)."""
        return self.core.projection @ kernel(self.s_map).inclusion()

    def core_from_ker_t(self) -> Mat:
        return self.core.projection @ kernel(self.t_map).inclusion()

    def is_vacant(self) -> bool:
        return self.core.dim == 0

    def source(self, x) -> Vec:
        return self.s_map @ tuple(x)

    def target(self, x) -> Vec:
        return self.t_map @ tuple(x)

    def composable(self, x, y) -> bool:
        return self.source(x) == self.target(y)

    def composable_space(self) -> Subspace:
        """{(x, y) : s(x) = t(y)} inside V + V."""
        return kernel(self.s_map.hstack(-self.t_map))

    def compose_matrix(self) -> Mat:
        """The map (x, y) |-> x + y - s(x) on V + V."""
        I = Mat.identity(self.dim)
        return (I - self.s_map).hstack(I)


def validate_groupoid(G: LinearGroupoid) -> Checks:
    c = Checks()
    n = G.dim
    for name, m in (("s", G.s_map), ("t", G.t_map)):
        c.add(f"{name} is idempotent", m @ m == m, m @ m - m)
        c.add(f"image of {name} is the unit space", column_space(m) == G.units, column_space(m))
    ks, kt = kernel(G.s_map), kernel(G.t_map)
    c.add("ker s is a core model", G.core_from_ker_s().is_invertible() if ks.dim else G.core.dim == 0)
    c.add("ker t is a core model", G.core_from_ker_t().is_invertible() if kt.dim else G.core.dim == 0)
    return c


def make_groupoid(dim: int, units: Subspace, s_map: Mat, t_map: Mat) -> LinearGroupoid:
    G = LinearGroupoid(dim, units, s_map, t_map)
    rep = validate_groupoid(G)
    if not rep.ok:
        raise GroupoidError(f"invalid groupoid data: {[c.name for c in rep.failures()]}")
    return G


def compose(G: LinearGroupoid, x, y) -> Vec:
    x, y = tuple(x), tuple(y)
    sx = G.source(x)
    if sx != G.target(y):
        raise GroupoidError(f"not composable: s(x) = {sx}, t(y) = {G.target(y)}")
    return vsub(vadd(x, y), sx)


def invert(G: LinearGroupoid, x) -> Vec:
    x = tuple(x)
    return vsub(vadd(G.source(x), G.target(x)), x)


def forced_composition(G: LinearGroupoid) -> Mat:
    """Solve for the unique linear map on composables satisfying both unit laws.

    Returns the matrix of that map on V + V (evaluated on the composable
    subspace it agrees with ``compose_matrix``); raises if the unit laws do
    not determine it.
    """
    n = G.dim
    I = Mat.identity(n)
    # spanning set of the composable space: (x, s x) and (t y, y)
    pairs = [(e, G.s_map @ e) for e in I.columns()] + [(G.t_map @ e, e) for e in I.columns()]
    values = [p[0] for p in pairs[:n]] + [p[1] for p in pairs[n:]]
    X = Mat([a + b for a, b in pairs], ncols=2 * n)
    comp = G.composable_space()
    if span(2 * n, X.rows) != comp:
        raise GroupoidError("unit pairs do not span the composable space")
    # unknown M (n x 2n): X M^T = values
    Mt = X.solve_matrix(Mat(values, ncols=n))
    if Mt is None:
        raise GroupoidError("unit laws are inconsistent with a linear multiplication")
    return Mt.T


# --------------------------------------------------------------- Pradines


@dataclass(frozen=True)
class DualGroupoid:
    groupoid: LinearGroupoid
    composition: Mat
    pairing_checks: Checks


def _pairing_defect(G, Gd, comp_v, comp_mu):
    n = G.dim
    for a in comp_mu:
        mu1, mu2 = a[:n], a[n:]
        m_mu = compose(Gd, mu1, mu2)
        for b in comp_v:
            v1, v2 = b[:n], b[n:]
            lhs = dot(m_mu, compose(G, v1, v2))
            rhs = dot(mu1, v1) + dot(mu2, v2)
            if lhs != rhs:
                return {"mu": a, "v": b, "lhs": lhs, "rhs": rhs}
    return None


def dualize(G: LinearGroupoid) -> LinearGroupoid:
    return dualize_verified(G).groupoid


def dualize_verified(G: LinearGroupoid) -> DualGroupoid:
    """The Pradines dual on V*, with the composition solved from the pairing law."""
    n = G.dim
    I = Mat.identity(n)
    from .ratlin import annihilator

    units = annihilator(G.units)
    # s*(mu) remembers mu on ker t, t*(mu) remembers mu on ker s
    sd = (I - G.t_map).T
    td = (I - G.s_map).T
    Gd = LinearGroupoid(n, units, sd, td)
    rep = validate_groupoid(Gd)
    if not rep.ok:
        raise GroupoidError("dual groupoid data failed validation (internal error)")

    comp_v = G.composable_space().vectors()
    comp_mu = Gd.composable_space().vectors()
    # <xi, m(v1, v2)> = <mu1, v1> + <mu2, v2> for all composable (v1, v2)
    Mv = G.compose_matrix()
    lhs = Mat([Mv @ b for b in comp_v], ncols=n) if comp_v else Mat.zeros(0, n)
    solved = []
    for a in comp_mu:
        rhs = tuple(dot(a[:n], b[:n]) + dot(a[n:], b[n:]) for b in comp_v)
        xi = lhs.solve(rhs)
        if xi is None:
            raise GroupoidError(f"pairing system inconsistent at {a} (internal error)")
        if kernel(lhs).dim:
            raise GroupoidError("pairing system does not determine the dual product")
        solved.append(xi)
    checks = Checks()
    forced = [compose(Gd, a[:n], a[n:]) for a in comp_mu]
    checks.add("solved dual product equals the forced formula", solved == forced,
               next(((a, x, y) for a, x, y in zip(comp_mu, solved, forced) if x != y), None))
    w = _pairing_defect(G, Gd, comp_v, comp_mu)
    checks.add("pairing law on composable bases", w is None, w)
    ks, kt = kernel(G.s_map), kernel(G.t_map)
    ok_s = all(dot(sd @ mu, v) == dot(mu, v) for mu in I.columns() for v in kt.vectors())
    ok_t = all(dot(td @ mu, v) == dot(mu, v) for mu in I.columns() for v in ks.vectors())
    checks.add("dual source restricts to ker t", ok_s)
    checks.add("dual target restricts to ker s", ok_t)
    if not checks.ok:
        raise GroupoidError(f"dual groupoid verification failed: {checks.failures()}")
    return DualGroupoid(Gd, Gd.compose_matrix(), checks)


# ----------------------------------------------------------------- modules


@dataclass(frozen=True)
class LinearModule:
    """A module over G on P: x o y = y + A(x - s x) when s(x) = u(y).

    ``u_map`` is P -> V (image in the units); ``core_act`` is V -> P and is
    stored canonicalized as A(1 - s), i.e. through the projection onto ker s.
    """

    over: LinearGroupoid
    P_dim: int
    u_map: Mat
    core_act: Mat

    def __post_init__(self):
        n = self.over.dim
        if self.u_map.shape != (n, self.P_dim) or self.core_act.shape != (self.P_dim, n):
            raise GroupoidError("module data have inconsistent dimensions")
        canon = self.core_act @ (Mat.identity(n) - self.over.s_map)
        object.__setattr__(self, "core_act", canon)

    def moment(self, y) -> Vec:
        return self.u_map @ tuple(y)

    def composable_space(self) -> Subspace:
        return kernel(self.over.s_map.hstack(-self.u_map))

    def act_matrix(self) -> Mat:
        """(x, y) |-> y + A(x - s x) on V + P."""
        return self.core_act.hstack(Mat.identity(self.P_dim))


def validate_module(M: LinearModule) -> Checks:
    c = Checks()
    G = M.over
    c.add("moment lands in the units", image(M.u_map, span(M.P_dim, Mat.identity(M.P_dim).rows)) <= G.units)
    lhs = M.u_map @ M.core_act
    rhs = G.t_map - G.s_map
    c.add("u(A w) = t(w) on ker s", lhs == rhs, lhs - rhs)
    return c


def make_module(G: LinearGroupoid, P_dim: int, u_map: Mat, core_act: Mat) -> LinearModule:
    M = LinearModule(G, P_dim, u_map, core_act)
    rep = validate_module(M)
    if not rep.ok:
        raise GroupoidError(f"invalid module data: {[c.name for c in rep.failures()]}")
    return M


def act(M: LinearModule, x, y) -> Vec:
    x, y = tuple(x), tuple(y)
    if M.over.source(x) != M.moment(y):
        raise GroupoidError(f"not composable: s(x) = {M.over.source(x)}, u(y) = {M.moment(y)}")
    return vadd(y, M.core_act @ x)


def units_module(G: LinearGroupoid) -> LinearModule:
    """G acting on its own units: x o eta = t(x), in canonical unit coordinates."""
    C = G.units.coordinate_map()
    return make_module(G, G.units.dim, G.units.inclusion(), C @ G.t_map)


def left_translation_module(G: LinearGroupoid) -> LinearModule:
    return make_module(G, G.dim, G.t_map, Mat.identity(G.dim))


@dataclass(frozen=True)
class DualModule:
    module: LinearModule
    pairing_checks: Checks


def dual_module(M: LinearModule, Gd: LinearGroupoid | None = None) -> LinearModule:
    return dual_module_verified(M, Gd).module


def dual_module_verified(M: LinearModule, Gd: LinearGroupoid | None = None) -> DualModule:
    G = M.over
    n, p = G.dim, M.P_dim
    if Gd is None:
        Gd = dualize(G)
    # dual moment: the transpose of the core-to-P map w |-> w o 0
    ud = M.core_act.T
    Ad = M.u_map.T
    Md = LinearModule(Gd, p, ud, Ad)
    checks = Checks()
    checks.extend(validate_module(Md), "dual module: ")

    comp = M.composable_space().vectors()
    comp_d = Md.composable_space().vectors()
    act_m = M.act_matrix()
    lhs = Mat([act_m @ b for b in comp], ncols=p) if comp else Mat.zeros(0, p)
    if p and kernel(lhs).dim:
        raise GroupoidError("pairing system does not determine the dual action")
    bad = None
    for a in comp_d:
        rhs = tuple(dot(a[:n], b[:n]) + dot(a[n:], b[n:]) for b in comp)
        zeta = lhs.solve(rhs)
        if zeta is None:
            raise GroupoidError(f"dual action pairing system inconsistent at {a} (internal error)")
        if zeta != act(Md, a[:n], a[n:]) and bad is None:
            bad = (a, zeta)
    checks.add("solved dual action equals the transposed formula", bad is None, bad)
    if not checks.ok:
        raise GroupoidError(f"dual module verification failed: {checks.failures()}")
    return DualModule(Md, checks)


# -------------------------------------------------------- metrized groupoids


@dataclass(frozen=True)
class MetrizedLinearGroupoid:
    groupoid: LinearGroupoid
    metric: SymBilinearForm
    g: Subspace
    r: Subspace

    @property
    def gamma(self) -> SymBivector:
        return self.metric.dual()


def multiplicativity_witness(G: LinearGroupoid, metric: SymBilinearForm):
    """Polarized check of <x o y, x' o y'> = <x, x'> + <y, y'> on a composable basis."""
    n = G.dim
    comp = G.composable_space().vectors()
    m = G.compose_matrix()
    prods = [m @ c for c in comp]
    for a, ca in enumerate(comp):
        for b in range(a, len(comp)):
            cb = comp[b]
            lhs = metric(prods[a], prods[b])
            rhs = metric(ca[:n], cb[:n]) + metric(ca[n:], cb[n:])
            if lhs != rhs:
                return {"pair": (ca, cb), "lhs": lhs, "rhs": rhs}
    return None


def from_manin_pair(pair: ManinPair, r: Subspace | None = None) -> MetrizedLinearGroupoid:
    q = pair.q
    m = q.dim
    g = pair.g
    r = pair.r if r is None else r
    if r is None:
        raise GroupoidError("no complement r supplied")
    if not are_complementary(r, g):
        raise GroupoidError("r is not a complement of g")
    rp = orth_complement(r, q.metric)
    if not are_complementary(rp, g):
        raise GroupoidError("r^perp is not a complement of g")
    s = projection_along(g, rp)
    t = projection_along(g, r)
    G = LinearGroupoid(m, g, s, t)
    rep = validate_groupoid(G)
    if not rep.ok:
        raise GroupoidError("metrized groupoid data invalid")
    w = multiplicativity_witness(G, q.metric)
    if w is not None:
        raise GroupoidError(f"metric is not multiplicative for this r: {w}")
    return MetrizedLinearGroupoid(G, q.metric, g, r)


def check_metrized(MG: MetrizedLinearGroupoid) -> Checks:
    c = Checks()
    G = MG.groupoid
    c.extend(validate_groupoid(G))
    w = multiplicativity_witness(G, MG.metric)
    c.add("metric multiplicative on composables", w is None, w)
    I = Mat.identity(G.dim)
    rp = orth_complement(MG.r, MG.metric)
    pr_rp = projection_along(rp, MG.g)
    c.add("s = 1 - pr_(r perp)", G.s_map == I - pr_rp)
    c.add("t = 1 - pr_r", G.t_map == I - projection_along(MG.r, MG.g))
    # lambda1 o lambda2 = lambda2 + pr_(r perp)(lambda1) on a composable basis
    n = G.dim
    bad = next(
        (v for v in G.composable_space().vectors()
         if compose(G, v[:n], v[n:]) != vadd(v[n:], pr_rp @ v[:n])),
        None,
    )
    c.add("product is lambda2 + pr_(r perp)(lambda1)", bad is None, bad)
    ts, ss = pushforward(G.t_map, MG.gamma), pushforward(G.s_map, MG.gamma)
    c.add("t(gamma_q) = -s(gamma_q)", ts == -ss, (ts.gram, ss.gram))
    return c


def gamma_g(MG: MetrizedLinearGroupoid) -> SymBivector:
    """gamma_g = t(gamma_q) = -s(gamma_q), in the canonical coordinates of g."""
    G = MG.groupoid
    ts = pushforward(G.t_map, MG.gamma)
    ss = pushforward(G.s_map, MG.gamma)
    if ts != -ss:
        raise GroupoidError("t(gamma_q) and -s(gamma_q) disagree")
    C = MG.g.coordinate_map()
    return pushforward(C, ts)


# ----------------------------------------------------------- moment action


@dataclass(frozen=True)
class MetrizedModule:
    module: LinearModule
    metric: SymBilinearForm
    F_p: Mat
    checks: Checks


def moment_to_action(MG: MetrizedLinearGroupoid, P_dim: int, metric_P: SymBilinearForm, u_map: Mat) -> MetrizedModule:
    """The module with action lambda o z = z + F_p(lambda), where
    <F_p(lambda), z>_P = <lambda, u(z)>_q."""
    if not metric_P.is_nondegenerate():
        raise GroupoidError("metric on P is degenerate")
    G = MG.groupoid
    if metric_P.dim != P_dim or u_map.shape != (G.dim, P_dim):
        raise GroupoidError("moment data have inconsistent dimensions")
    F = metric_P.gram.inverse() @ u_map.T @ MG.metric.gram
    M = LinearModule(G, P_dim, u_map, F)
    c = Checks()
    c.add("F_p vanishes on g", all(not any(F @ x) for x in MG.g.vectors()))
    c.extend(validate_module(M))
    n = G.dim
    comp = M.composable_space().vectors()
    am = M.act_matrix()
    bad = None
    for a, ca in enumerate(comp):
        for cb in comp[a:]:
            lhs = metric_P(am @ ca, am @ cb)
            rhs = MG.metric(ca[:n], cb[:n]) + metric_P(ca[n:], cb[n:])
            if lhs != rhs:
                bad = {"pair": (ca, cb), "lhs": lhs, "rhs": rhs}
                break
        if bad:
            break
    c.add("metric preserved by the action", bad is None, bad)
    bad = next((v for v in comp if u_map @ (am @ v) != G.t_map @ v[:n]), None)
    c.add("u(lambda o z) = t(lambda)", bad is None, bad)
    up = pushforward(u_map, metric_P.dual())
    tg = pushforward(G.t_map, MG.gamma)
    c.add("u_p(gamma_p) = gamma_g", up == tg, (up.gram, tg.gram))
    if not c.ok:
        raise GroupoidError(f"moment map is not admissible: {[x.name for x in c.failures()]}")
    return MetrizedModule(M, metric_P, F, c)
