from fractions import Fraction
from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from diracbench import catalog
from diracbench.dressing import GroupElement, projections, q_groupoid
from diracbench.homsp import (
    ClassificationData,
    ClassificationError,
    KSample,
    LAClassData,
    RobinsonDatum,
    build_F_n,
    check_comparison_map,
    check_exact_case,
    check_F_n,
    check_normal_form,
    check_transitive,
    la_moment,
    normal_form,
    reduce_fibers,
    robinson_build,
    search_coisotropic,
    validate_classification,
    validate_la_data,
    validate_robinson,
)
from diracbench.liealg import LieMorphism, check_jacobi
from diracbench.manin import build_double, is_exact
from diracbench.ratlin import (
    Mat,
    SymBilinearForm,
    full_space,
    intersect,
    is_coisotropic,
    span,
    zero_space,
)

from strategies import abelian_triples, small_triples


def trivial_datum(t):
    """n = the double, u = d, k = 0, f_n = t_map."""
    D = build_double(t.d, t.beta)
    n = t.dim
    u = span(2 * n, [D.embed_d(x) for x in Mat.identity(n).columns()])
    return ClassificationData(D.dtilde.algebra, D.dtilde.metric, u, zero_space(2 * n),
                              LieMorphism(D.dtilde.algebra, t.d, D.t_map))


def robinson(t, c, samples=()):
    return robinson_build(RobinsonDatum(c, intersect(c, t.h), samples), t).data


E2_CANDIDATES = [(1, 1), (1, -1), (1, 0), (0, 1)]


class TestValidate:
    def test_trivial_datum(self):
        t = catalog.E1()
        assert validate_classification(trivial_datum(t), t).ok

    def test_u_not_lagrangian(self):
        t = catalog.E1()
        data = trivial_datum(t)
        bad = ClassificationData(data.n, data.gamma_n, full_space(4), data.k, data.f_n)
        failed = {c.name for c in validate_classification(bad, t).failures()}
        assert failed == {"(iii) u is Lagrangian"}

    def test_f_n_scaled(self):
        t = catalog.E1()
        data = trivial_datum(t)
        bad = ClassificationData(data.n, data.gamma_n, data.u, data.k,
                                 LieMorphism(data.n, t.d, data.f_n.matrix * 2))
        failed = {c.name for c in validate_classification(bad, t).failures()}
        assert failed == {"(ii) f_n(gamma_n) = beta"}

    def test_missing_sample_action(self):
        t = catalog.E1()
        data = trivial_datum(t)
        bad = ClassificationData(data.n, data.gamma_n, data.u, data.k, data.f_n, (KSample(None, Mat.identity(2)),))
        assert not validate_classification(bad, t).ok


class TestFn:
    def test_trivial_datum(self):
        t = catalog.E1()
        data = trivial_datum(t)
        F = build_F_n(data, t)
        P, _ = q_groupoid(t)
        for x in P.g.vectors():
            assert not any(F @ x)
        assert check_F_n(data, t).ok

    def test_zero_beta(self):
        t = catalog.build_abelian_double(2, [[0, 0], [0, 0]], [0])
        data = robinson(t, full_space(2))
        assert check_F_n(data, t).ok

    def test_sympy_oracle(self):
        # oracle: <F_n(lam), zeta> = <lam, pr_g f_n(zeta)> by a sympy solve
        t = catalog.E2()
        data = robinson(t, span(2, [(1, -1)]))
        P, _ = q_groupoid(t)
        F = build_F_n(data, t)
        Gn = sympy.Matrix([[sympy.Rational(str(a)) for a in r] for r in data.gamma_n.gram.rows])
        Gq = sympy.Matrix([[sympy.Rational(str(a)) for a in r] for r in P.q.metric.gram.rows])
        pr_g, _ = projections(t)
        Phi = P.g_embedding @ t.g.coordinate_map() @ pr_g @ data.f_n.matrix
        Ph = sympy.Matrix([[sympy.Rational(str(a)) for a in r] for r in Phi.rows])
        X = sympy.Matrix(2, 2, sympy.symbols("x0:4"))
        sol = sympy.solve(list(X.T * Gn - Gq * Ph), list(X))
        want = X.subs(sol)
        assert F == Mat([[Fraction(str(want[i, j])) for j in range(2)] for i in range(2)])

    def test_fixtures(self):
        for name, t in catalog.fixtures().items():
            assert check_F_n(robinson(t, t.g), t).ok, name


class TestRobinson:
    def test_E2_g(self):
        t = catalog.E2()
        data = robinson(t, t.g)
        assert data.n.dim == 2 and data.u.dim == 1 and data.k.dim == 0
        assert is_exact(t)
        assert check_exact_case(data, t) == (True, t.g)

    def test_E1_g(self):
        t = catalog.E1()
        data = robinson(t, t.g)
        assert data.n.dim == 2
        assert check_exact_case(data, t) == (True, t.g)

    def test_whole_d(self):
        for name, t in catalog.fixtures().items():
            data = robinson(t, full_space(t.dim))
            assert data.n.dim == 2 * t.dim
            assert validate_classification(data, t).ok, name
            assert check_transitive(data, t), name

    def test_invalid_datum(self):
        t = catalog.E4()
        with pytest.raises(ClassificationError):
            robinson_build(RobinsonDatum(span(2, [(1, 0)]), zero_space(2)), t)
        t = catalog.E1()
        assert not validate_robinson(RobinsonDatum(t.g, t.h), t).ok

    def test_E2_by_hand(self):
        # oracle: the reduction of c + d* in the 4-dim double, by sympy
        t = catalog.E2()
        D = build_double(t.d, t.beta)
        G = sympy.Matrix([[sympy.Rational(str(a)) for a in r] for r in D.dtilde.metric.gram.rows])
        C = sympy.Matrix([[1, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]).T
        perp = (C.T * G).nullspace()
        assert len(perp) == 1
        red_dim = C.shape[1] - len(perp)
        assert robinson(t, span(2, [(1, -1)])).n.dim == red_dim

    @settings(max_examples=25)
    @given(abelian_triples())
    def test_random_abelian(self, t):
        data = robinson(t, t.g)
        assert validate_classification(data, t).ok
        assert check_transitive(data, t)
        assert check_comparison_map(data, t).ok
        if is_exact(t):
            assert check_exact_case(data, t) == (True, t.g)

    @settings(max_examples=10)
    @given(small_triples())
    def test_random_basis(self, t):
        data = robinson(t, t.g)
        assert validate_classification(data, t).ok
        assert check_comparison_map(data, t).ok


class TestTransitive:
    def test_zero_f(self):
        t = catalog.E1()
        data = trivial_datum(t)
        zero = ClassificationData(data.n, data.gamma_n, data.u, data.k, LieMorphism(data.n, t.d, Mat.zeros(2, 4)))
        assert not check_transitive(zero, t)

    def test_image_meets_h_too_much(self):
        t = catalog.E1()
        assert not check_transitive(trivial_datum(t), t)


class TestExactCase:
    def test_dim_too_big(self):
        t = catalog.E1()
        data = robinson(t, full_space(2))
        assert check_exact_case(data, t) == (False, None)

    def test_E2_other_lagrangian(self):
        t = catalog.E2()
        c = span(2, [(1, -1)])
        assert check_exact_case(robinson(t, c), t) == (True, c)

    def test_not_exact(self):
        t = catalog.E3()
        with pytest.raises(ClassificationError):
            check_exact_case(robinson(t, t.g), t)


class TestFibers:
    def test_k_zero(self):
        t = catalog.E1()
        data = trivial_datum(t)
        fr = reduce_fibers(data)
        assert fr.dim == 4 and fr.l.dim == 2

    def test_one_dim_k(self):
        t = catalog.E1()
        data = trivial_datum(t)
        k = span(4, [(0, 1, 0, 0)])
        fr = reduce_fibers(ClassificationData(data.n, data.gamma_n, data.u, k, data.f_n))
        assert fr.dim == 2 and fr.l.dim == 1
        assert fr.metric.is_nondegenerate()
        G = fr.metric
        assert all(G(x, y) == 0 for x in fr.l.vectors() for y in fr.l.vectors())

    def test_k_equals_u(self):
        t = catalog.E1()
        data = trivial_datum(t)
        fr = reduce_fibers(ClassificationData(data.n, data.gamma_n, data.u, data.u, data.f_n))
        assert fr.dim == 0

    def test_not_isotropic(self):
        t = catalog.E1()
        data = trivial_datum(t)
        with pytest.raises(ClassificationError):
            reduce_fibers(ClassificationData(data.n, data.gamma_n, data.u, span(4, [(1, 0, 1, 0)]), data.f_n))


class TestNormalForm:
    def test_E1_with_K(self):
        t = catalog.E1()
        els = catalog.abelian_h_elements(t)
        samples = [KSample(None, h.Ad, h) for h in els[1:3]]
        c = span(2, [(0, 1)])
        data = robinson(t, c, samples)
        assert data.k.dim == 1
        nf = normal_form(data, t)
        zs = Mat.identity(data.n.dim).columns()
        ch = check_normal_form(nf, els[:3], zs)
        assert ch.ok, ch

    def test_E1_abelian_formula(self):
        # bullet is trivial: (g, lam) o (h, zeta) = (gh, zeta + F_n(lam - s lam))
        t = catalog.E1()
        els = catalog.abelian_h_elements(t)
        data = robinson(t, t.g)
        nf = normal_form(data, t)
        P, MG = q_groupoid(t)
        from diracbench.dressing import SemidirectElement, elements_with_source
        from diracbench.homsp import NFElement

        y = NFElement(els[1], (1, 2))
        for x in elements_with_source(t, nf.moment_q(y), els[:2]):
            z = nf.action(x, y)
            core = tuple(a - b for a, b in zip(x.lam, MG.groupoid.s_map @ x.lam))
            assert z.zeta == tuple(a + b for a, b in zip(y.zeta, nf.F_n @ core))

    def test_E2(self):
        t = catalog.E2()
        rep, els = catalog.E2_rep_elements()
        hs = [GroupElement.identity(rep)] + els
        data = robinson(t, span(2, [(1, -1)]))
        ch = check_normal_form(normal_form(data, t), hs[:3], Mat.identity(2).columns())
        assert ch.ok, ch

    def test_quasi_poisson(self):
        t, rep, els = catalog.sl2_quasi_poisson()
        hs = [GroupElement.identity(rep)] + els[:1]
        data = robinson(t, t.g)
        ch = check_normal_form(normal_form(data, t), hs, Mat.identity(data.n.dim).columns())
        assert ch.ok, ch


class TestLA:
    def test_moment(self):
        t = catalog.E1()
        els = catalog.abelian_h_elements(t)
        lad = LAClassData(t.d, t.h, LieMorphism(t.d, t.d, Mat.identity(2)))
        assert validate_la_data(lad, t).ok
        pr_g, _ = projections(t)
        assert la_moment(lad, t, els[0], (3, 4)) == pr_g @ (3, 4) == (3, 0)
        for h in els:
            assert la_moment(lad, t, h, (0, 5)) == (0, 0)

    def test_sl2_k_invariance(self):
        t, rep, els = catalog.sl2_quasi_poisson()
        lad = LAClassData(t.d, t.h, LieMorphism(t.d, t.d, Mat.identity(3)))
        for h in els:
            base = la_moment(lad, t, h, (1, 2, 3))
            assert la_moment(lad, t, h, (1 + 7, 2, 3)) == base


class TestSearch:
    def test_E2(self):
        t = catalog.E2()
        got = search_coisotropic(t, E2_CANDIDATES, k=zero_space(2), lagrangian=True, dim=1)
        assert got == [span(2, [(1, 1)]), span(2, [(1, -1)])]

    def test_E2_brute_force_oracle(self):
        t = catalog.E2()
        want = set()
        for r in range(1, 5):
            for sub in combinations(E2_CANDIDATES, r):
                c = span(2, sub)
                if c.dim == 1 and is_coisotropic(c, t.beta) and intersect(c, t.h).dim == 0:
                    want.add(c)
        got = search_coisotropic(t, E2_CANDIDATES, k=zero_space(2), lagrangian=True, dim=1)
        assert set(got) == want and len(got) == len(want)

    def test_empty(self):
        assert search_coisotropic(catalog.E2(), []) == []

    def test_only_h(self):
        t = catalog.E2()
        assert search_coisotropic(t, [(1, 0), (2, 0)], k=zero_space(2)) == []

    def test_deterministic_order(self):
        t = catalog.E1()
        cands = [(0, 1), (1, 0), (1, 1)]
        got = search_coisotropic(t, cands)
        assert got == search_coisotropic(t, cands)
        assert got[0] == span(2, [(0, 1)])

    def test_lagrangian_E1(self):
        t = catalog.E1()
        got = search_coisotropic(t, [(1, 0), (0, 1), (1, 1)], lagrangian=True)
        assert got == [span(2, [(1, 0)]), span(2, [(0, 1)])]
