import random

import pytest
import sympy
from fractions import Fraction
from hypothesis import given, settings, strategies as st

from diracbench import catalog
from diracbench.catalog import random_groupoid
from diracbench.liealg import MetrizedLieAlgebra, abelian
from diracbench.lingpd import (
    GroupoidError,
    LinearGroupoid,
    LinearModule,
    act,
    check_metrized,
    compose,
    dual_module,
    dual_module_verified,
    dualize,
    dualize_verified,
    forced_composition,
    from_manin_pair,
    gamma_g,
    invert,
    left_translation_module,
    make_groupoid,
    make_module,
    moment_to_action,
    multiplicativity_witness,
    units_module,
    validate_groupoid,
    validate_module,
)
from diracbench.manin import ManinPair, build_q_pair
from diracbench.ratlin import (
    Mat,
    SymBilinearForm,
    SymBivector,
    dot,
    full_space,
    kernel,
    pushforward,
    span,
    zero_space,
)

from strategies import abelian_triples, groupoids, vectors


def unit_groupoid(n):
    return make_groupoid(n, full_space(n), Mat.identity(n), Mat.identity(n))


def pair_like():
    p = Mat([[1, 0], [0, 0]])
    return make_groupoid(2, span(2, [(1, 0)]), p, p)


def composable_triples(G):
    """Basis of {(x, y, z) : s x = t y, s y = t z}."""
    n = G.dim
    Z = Mat.zeros(n, n)
    eqs = Mat.block([[G.s_map, -G.t_map, Z], [Z, G.s_map, -G.t_map]])
    return kernel(eqs).vectors()


def assert_groupoid_laws(G):
    n = G.dim
    for v in G.composable_space().vectors():
        x, y = v[:n], v[n:]
        xy = compose(G, x, y)
        assert G.source(xy) == G.source(y) and G.target(xy) == G.target(x)
    for v in composable_triples(G):
        x, y, z = v[:n], v[n:2 * n], v[2 * n:]
        assert compose(G, compose(G, x, y), z) == compose(G, x, compose(G, y, z))
    for x in Mat.identity(n).columns():
        xi = invert(G, x)
        assert compose(G, x, xi) == G.target(x)
        assert compose(G, xi, x) == G.source(x)
        assert compose(G, x, G.source(x)) == x
        assert compose(G, G.target(x), x) == x


class TestGroupoids:
    def test_unit_groupoid(self):
        G = unit_groupoid(2)
        x = (1, 2)
        assert compose(G, x, x) == x and invert(G, x) == x
        with pytest.raises(GroupoidError):
            compose(G, (1, 0), (0, 1))

    def test_pair_like(self):
        G = pair_like()
        assert compose(G, (0, 1), (0, 1)) == (0, 2)
        assert_groupoid_laws(G)

    def test_invalid(self):
        with pytest.raises(GroupoidError):
            make_groupoid(2, span(2, [(1, 0)]), Mat([[1, 0], [0, 1]]), Mat([[1, 0], [0, 0]]))

    def test_q_from_E2_valid(self):
        MG = from_manin_pair(build_q_pair(catalog.E2()))
        assert validate_groupoid(MG.groupoid).ok

    def test_core_models(self):
        G = random_groupoid(random.Random(3), 5, 2)
        assert G.core.dim == 3
        assert G.core_from_ker_s().is_invertible() and G.core_from_ker_t().is_invertible()

    @given(groupoids())
    def test_laws(self, G):
        assert validate_groupoid(G).ok
        assert_groupoid_laws(G)

    @given(groupoids())
    def test_forced_composition(self, G):
        n = G.dim
        F = forced_composition(G)
        for v in G.composable_space().vectors():
            assert F @ v == G.compose_matrix() @ v


class TestDuals:
    def test_unit_groupoid(self):
        # the unit groupoid is vacant, so its dual is the group V* (units = 0)
        Gd = dualize(unit_groupoid(3))
        assert Gd.units == zero_space(3) and Gd.core.dim == 3

    def test_vacant_dual_is_group(self):
        Gd = dualize(unit_groupoid(2))
        assert dualize(Gd).units == full_space(2)
        G = make_groupoid(2, zero_space(2), Mat.zeros(2, 2), Mat.zeros(2, 2))
        assert G.core.dim == 2
        # a group (units = 0) dualizes to a vacant groupoid and back
        assert dualize(G).core.dim == 0

    def test_pair_like_oracle(self):
        # oracle: sympy solves <xi, v1 o v2> = <mu1, v1> + <mu2, v2> independently
        G = pair_like()
        D = dualize_verified(G)
        Gd = D.groupoid
        comp_v = G.composable_space().vectors()
        xi = sympy.symbols("x0 x1")
        for a in Gd.composable_space().vectors():
            eqs = []
            for b in comp_v:
                prod = compose(G, b[:2], b[2:])
                lhs = sum(xi[i] * sympy.Rational(str(prod[i])) for i in range(2))
                rhs = sum(sympy.Rational(str(p * q)) for p, q in zip(a, b))
                eqs.append(sympy.Eq(lhs, rhs))
            sol = sympy.solve(eqs, xi, dict=True)
            assert len(sol) == 1
            want = tuple(Fraction(str(sol[0][x])) for x in xi)
            assert compose(Gd, a[:2], a[2:]) == want
        assert dualize(Gd).s_map == G.s_map and dualize(Gd).t_map == G.t_map

    @given(groupoids())
    def test_pradines(self, G):
        D = dualize_verified(G)
        assert D.pairing_checks.ok
        Gdd = dualize(D.groupoid)
        assert (Gdd.units, Gdd.s_map, Gdd.t_map) == (G.units, G.s_map, G.t_map)
        assert (G.core.dim == 0) == (D.groupoid.units.dim == 0)
        assert_groupoid_laws(D.groupoid)

    def test_ten_random(self):
        rng = random.Random(2024)
        for _ in range(10):
            n = rng.randint(1, 6)
            G = random_groupoid(rng, n)
            D = dualize_verified(G)
            assert D.pairing_checks.ok
            assert dualize(D.groupoid).s_map == G.s_map


class TestModules:
    def test_units_module(self):
        G = pair_like()
        M = units_module(G)
        assert validate_module(M).ok
        assert act(M, (3, 5), (3,)) == (3,)

    def test_left_translation(self):
        G = random_groupoid(random.Random(5), 4, 2)
        M = left_translation_module(G)
        for v in M.composable_space().vectors():
            assert act(M, v[:4], v[4:]) == compose(G, v[:4], v[4:])

    def test_invalid_module(self):
        G = pair_like()
        with pytest.raises(GroupoidError):
            make_module(G, 1, Mat([[1], [0]]), Mat([[0, 5]]))

    def test_zero_module(self):
        G = pair_like()
        M = LinearModule(G, 0, Mat.zeros(2, 0), Mat.zeros(0, 2))
        # not a valid module unless t = s on the core; here t - s = 0
        assert validate_module(M).ok
        assert dual_module(M).P_dim == 0

    def test_dual_of_units_module_oracle(self):
        G = random_groupoid(random.Random(11), 3, 1)
        M = units_module(G)
        Dm = dual_module_verified(M)
        assert Dm.pairing_checks.ok
        Md = Dm.module
        n, p = 3, M.P_dim
        for a in Md.composable_space().vectors():
            nu = act(Md, a[:n], a[n:])
            for b in M.composable_space().vectors():
                assert dot(nu, act(M, b[:n], b[n:])) == dot(a[:n], b[:n]) + dot(a[n:], b[n:])

    def test_vacant_dual_module_is_group_action(self):
        G = unit_groupoid(2)
        Md = dual_module(units_module(G))
        assert Md.over.units.dim == 0

    @given(groupoids(max_dim=5), st.data())
    def test_module_laws(self, G, data):
        M = left_translation_module(G)
        n = G.dim
        Z = Mat.zeros(n, n)
        trip = kernel(Mat.block([[G.s_map, -G.t_map, Z], [Z, G.s_map, -M.u_map]])).vectors()
        for v in trip:
            x1, x2, y = v[:n], v[n:2 * n], v[2 * n:]
            assert act(M, compose(G, x1, x2), y) == act(M, x1, act(M, x2, y))
        for v in M.composable_space().vectors():
            assert M.moment(act(M, v[:n], v[n:])) == G.target(v[:n])
        y = data.draw(vectors(n))
        assert act(M, M.moment(y), y) == y
        assert dual_module_verified(M).pairing_checks.ok


class TestMetrized:
    def test_fixtures(self):
        for name, t in catalog.fixtures().items():
            MG = from_manin_pair(build_q_pair(t))
            assert check_metrized(MG).ok, name

    def test_r_equal_g_rejected(self):
        P = build_q_pair(catalog.E1())
        with pytest.raises(GroupoidError):
            from_manin_pair(P, P.g)

    def test_hand_example(self):
        q = MetrizedLieAlgebra(abelian(2), SymBilinearForm(Mat([[0, 1], [1, 0]])))
        P = ManinPair(q, span(2, [(1, 0)]))
        MG = from_manin_pair(P, span(2, [(0, 1)]))
        G = MG.groupoid
        assert G.s_map == Mat([[1, 0], [0, 0]]) and G.t_map == Mat([[1, 0], [0, 0]])
        assert gamma_g(MG) == SymBivector.zero(1)

    def test_gamma_g_values(self):
        # g Lagrangian in a Manin triple (E1): gamma_g = 0; E2 is not a Manin triple
        assert gamma_g(from_manin_pair(build_q_pair(catalog.E1()))) == SymBivector.zero(1)
        assert gamma_g(from_manin_pair(build_q_pair(catalog.E2()))).gram == Mat([[-1]])

    def test_gamma_g_oracle_one_dim(self):
        q = MetrizedLieAlgebra(abelian(2), SymBilinearForm(Mat.diag([1, -1])))
        P = ManinPair(q, span(2, [(1, 1)]))
        MG = from_manin_pair(P, span(2, [(1, 0)]))
        G = MG.groupoid
        # oracle: sympy pushforwards of the inverse metric
        gq = sympy.Matrix([[1, 0], [0, -1]]).inv()
        T = sympy.Matrix([[sympy.Rational(str(a)) for a in r] for r in G.t_map.rows])
        S = sympy.Matrix([[sympy.Rational(str(a)) for a in r] for r in G.s_map.rows])
        assert T * gq * T.T == -(S * gq * S.T)
        gg = gamma_g(MG).gram
        assert gg[0, 0] == Fraction(str((T * gq * T.T)[0, 0]))

    def test_gamma_scales(self):
        P = build_q_pair(catalog.E2())
        MG = from_manin_pair(P)
        q2 = MetrizedLieAlgebra(P.q.algebra, SymBilinearForm(P.q.metric.gram * Fraction(1, 3)))
        MG2 = from_manin_pair(ManinPair(q2, P.g, r=P.r))
        assert gamma_g(MG2).gram == gamma_g(MG).gram * 3

    @given(abelian_triples())
    def test_random(self, t):
        MG = from_manin_pair(build_q_pair(t))
        assert check_metrized(MG).ok
        C = MG.g.coordinate_map()
        assert gamma_g(MG) == pushforward(C @ MG.groupoid.t_map, MG.gamma)


class TestMomentAction:
    def test_zero_moment(self):
        MG = from_manin_pair(build_q_pair(catalog.E1()))
        mm = moment_to_action(MG, 1, SymBilinearForm(Mat([[1]])), Mat.zeros(2, 1))
        assert mm.F_p.is_zero()
        lam = kernel(MG.groupoid.s_map).vectors()[0]
        assert act(mm.module, lam, (7,)) == (7,)

    def test_left_translation(self):
        for name, t in catalog.fixtures().items():
            MG = from_manin_pair(build_q_pair(t))
            G = MG.groupoid
            mm = moment_to_action(MG, G.dim, MG.metric, G.t_map)
            assert mm.checks.ok, name
            n = G.dim
            for v in mm.module.composable_space().vectors():
                assert act(mm.module, v[:n], v[n:]) == compose(G, v[:n], v[n:]), name

    def test_inadmissible(self):
        MG = from_manin_pair(build_q_pair(catalog.E2()))
        with pytest.raises(GroupoidError):
            moment_to_action(MG, 1, SymBilinearForm(Mat([[1]])), Mat.zeros(2, 1))

    def test_degenerate_metric(self):
        MG = from_manin_pair(build_q_pair(catalog.E1()))
        with pytest.raises(GroupoidError):
            moment_to_action(MG, 1, SymBilinearForm(Mat([[0]])), Mat.zeros(2, 1))

    @given(abelian_triples())
    def test_random_left_translation(self, t):
        MG = from_manin_pair(build_q_pair(t))
        G = MG.groupoid
        mm = moment_to_action(MG, G.dim, MG.metric, G.t_map)
        up = pushforward(G.t_map, MG.metric.dual())
        assert up == pushforward(G.t_map, MG.gamma)
        assert mm.checks.ok
