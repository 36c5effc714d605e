from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from diracbench import catalog
from diracbench.liealg import MetrizedLieAlgebra, abelian, check_jacobi, check_morphism, sl2, sl2_defining_rep, trace_form
from diracbench.manin import (
    DiracManinTriple,
    ManinError,
    build_beta,
    build_double,
    build_q_pair,
    check_ad_invariant_bivector,
    check_double,
    check_equivariance,
    check_q_pair,
    extract_gamma_phi,
    fq_is_bijective,
    is_exact,
    reduce_coisotropic,
    validate_triple,
)
from diracbench.ratlin import (
    Mat,
    SymBilinearForm,
    SymBivector,
    full_space,
    preimage,
    pushforward,
    span,
    zero_space,
)

from strategies import abelian_triples, bivectors, small_triples

I2 = Mat.identity(2)


def all_fixtures():
    return catalog.fixtures()


class TestInvariantBivectors:
    def test_zero_and_abelian(self):
        assert check_ad_invariant_bivector(sl2(), SymBivector.zero(3))
        assert check_ad_invariant_bivector(abelian(2), SymBivector(Mat([[1, 2], [2, 5]])))

    def test_sl2_trace_inverse(self):
        assert check_ad_invariant_bivector(sl2(), trace_form(sl2_defining_rep()).dual())

    def test_sl2_non_invariant(self):
        assert not check_ad_invariant_bivector(sl2(), SymBivector(Mat.identity(3)))

    @given(bivectors(2))
    def test_abelian_always_invariant(self, beta):
        assert check_ad_invariant_bivector(abelian(2), beta)


class TestValidate:
    def test_E1(self):
        rep = validate_triple(catalog.E1())
        assert rep.ok and rep.info["exact"]

    def test_E2_data(self):
        t = catalog.E2()
        assert t.beta.gram == Mat.diag([1, -1])
        assert t.g == span(2, [(1, 1)]) and t.h == span(2, [(1, 0)])
        rep = validate_triple(t)
        assert rep.ok and rep.info["exact"]

    def test_E4_fails_coisotropy(self):
        rep = validate_triple(catalog.E4())
        assert not rep.ok
        assert [c.name for c in rep.failures()] == ["g is beta-coisotropic"]
        w = rep["g is beta-coisotropic"].witness
        assert w["annihilator_vectors"][0] == (0, 1) and w["beta"] == 1

    def test_E3_not_exact(self):
        rep = validate_triple(catalog.E3())
        assert rep.ok and not rep.info["exact"]

    def test_fixtures_valid(self):
        for name, t in all_fixtures().items():
            assert validate_triple(t).ok, name

    def test_equivariance_examples(self):
        t = catalog.E2()
        empty = DiracManinTriple(t.d, t.beta, t.g, t.h, (), "")
        assert check_equivariance(empty).ok
        assert check_equivariance(t).ok
        swap = DiracManinTriple(t.d, t.beta, t.g, t.h, (Mat([[0, 1], [1, 0]]),), "")
        rep = check_equivariance(swap)
        failed = {c.name for c in rep.failures()}
        # the swap also negates beta = diag(1, -1)
        assert failed == {"sample 0: preserves h", "sample 0: preserves beta"}

    def test_sl2_samples_are_automorphisms(self):
        t = catalog.sl2_cartan_dirac()[0]
        assert len(t.samples) >= 3
        assert check_equivariance(t).ok

    def test_dimension_mismatch(self):
        with pytest.raises(ManinError):
            DiracManinTriple(abelian(2), SymBivector.zero(3), span(2, []), span(2, []))


class TestDouble:
    def test_one_dim_zero_beta(self):
        D = build_double(abelian(1), SymBivector.zero(1))
        assert D.dtilde.algebra.is_abelian()
        assert D.dtilde.metric.gram == Mat([[0, 1], [1, 0]])

    def test_E1(self):
        t = catalog.E1()
        D = build_double(t.d, t.beta)
        B = t.beta.gram
        assert D.dtilde.algebra.is_abelian() and D.dtilde.dim == 4
        assert D.beta_tilde.gram == Mat.block([[-B, I2], [I2, Mat.zeros(2, 2)]])
        assert pushforward(D.s_map, D.beta_tilde) == -t.beta
        assert pushforward(D.t_map, D.beta_tilde) == t.beta

    def test_beta_tilde_oracle(self):
        # oracle: sympy inverse of the block gram
        t = catalog.sl2_quasi_poisson()[0]
        D = build_double(t.d, t.beta)
        G = sympy.Matrix([[sympy.Rational(str(a)) for a in r] for r in D.dtilde.metric.gram.rows]).inv()
        assert D.beta_tilde.gram == Mat([[Fraction(str(a)) for a in G.row(i)] for i in range(G.rows)])

    def test_sl2(self):
        t = catalog.sl2_cartan_dirac()[0]
        D = build_double(t.d, t.beta)
        assert D.dtilde.dim == 12
        assert check_double(D).ok
        D3 = build_double(sl2(), trace_form(sl2_defining_rep()).dual())
        assert check_jacobi(D3.dtilde.algebra).ok

    def test_non_invariant_rejected(self):
        with pytest.raises(ManinError):
            build_double(sl2(), SymBivector(Mat.identity(3)))

    def test_fixtures(self):
        for name, t in all_fixtures().items():
            assert check_double(build_double(t.d, t.beta)).ok, name

    @settings(max_examples=15)
    @given(small_triples())
    def test_random_basis(self, t):
        assert check_double(build_double(t.d, t.beta)).ok


class TestReduction:
    def test_whole_space(self):
        M = MetrizedLieAlgebra(sl2(), trace_form(sl2_defining_rep()))
        red = reduce_coisotropic(M, full_space(3))
        assert red.reduced.dim == 3 and red.c_perp.dim == 0
        assert red.reduced.metric.gram == M.metric.gram

    def test_E1_double(self):
        t = catalog.E1()
        D = build_double(t.d, t.beta)
        c = span(4, [(1, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
        red = reduce_coisotropic(D.dtilde, c)
        assert red.reduced.dim == 2 and red.c_perp.dim == 1

    def test_lagrangian_gives_zero(self):
        M = MetrizedLieAlgebra(abelian(2), SymBilinearForm(Mat([[0, 1], [1, 0]])))
        red = reduce_coisotropic(M, span(2, [(1, 0)]))
        assert red.reduced.dim == 0

    def test_not_coisotropic(self):
        M = MetrizedLieAlgebra(abelian(2), SymBilinearForm(Mat.identity(2)))
        with pytest.raises(ManinError):
            reduce_coisotropic(M, span(2, [(1, 0)]))

    def test_not_subalgebra(self):
        M = MetrizedLieAlgebra(sl2(), trace_form(sl2_defining_rep()))
        with pytest.raises(ManinError):
            reduce_coisotropic(M, span(3, [(1, 0, 0), (0, 1, 0)]))


class TestQPair:
    def test_E1(self):
        P = build_q_pair(catalog.E1())
        assert P.q.dim == 2 and fq_is_bijective(P)

    def test_zero_g(self):
        t = DiracManinTriple(abelian(2), SymBivector.zero(2), zero_space(2), full_space(2))
        P = build_q_pair(t)
        assert P.q.dim == 0
        assert check_q_pair(t, P).ok

    def test_E2_split_signature(self):
        t = catalog.E2()
        P = build_q_pair(t)
        assert P.q.dim == 2
        assert P.gamma_q.gram.det() < 0
        assert pushforward(P.fq.matrix, P.gamma_q) == t.beta

    def test_E2_oracle(self):
        # oracle: reduce by hand with sympy. C = s^-1(g) in the 4-dim double,
        # pick the complement of C^perp spanned by (1,1,0,0) and (0,0,1,0).
        t = catalog.E2()
        D = build_double(t.d, t.beta)
        G = sympy.Matrix([[sympy.Rational(str(a)) for a in r] for r in D.dtilde.metric.gram.rows])
        C = preimage(D.s_map, t.g)
        Cm = sympy.Matrix([[sympy.Rational(str(a)) for a in v] for v in C.vectors()]).T
        perp = (Cm.T * G).nullspace()
        assert len(perp) == 1
        lifts = sympy.Matrix([[1, 0], [1, 0], [0, 1], [0, 0]])
        red_gram = lifts.T * G * lifts
        P = build_q_pair(t)
        assert sympy.sign(red_gram.det()) == sympy.sign(sympy.Rational(str(P.q.metric.gram.det())))

    def test_fixtures(self):
        for name, t in all_fixtures().items():
            P = build_q_pair(t)
            assert check_q_pair(t, P).ok, name
            assert check_morphism(P.fq)

    def test_exactness(self):
        fx = all_fixtures()
        for name in ("E1", "E2", "sl2-cartan-dirac"):
            assert is_exact(fx[name]) and fq_is_bijective(build_q_pair(fx[name])), name
        for name in ("E3", "sl2-quasi-poisson"):
            assert not is_exact(fx[name]) and not fq_is_bijective(build_q_pair(fx[name])), name

    @settings(max_examples=15)
    @given(small_triples())
    def test_random_basis(self, t):
        P = build_q_pair(t)
        assert check_q_pair(t, P).ok
        assert fq_is_bijective(P) == is_exact(t)

    @given(abelian_triples())
    def test_random_abelian(self, t):
        assert validate_triple(t).ok
        P = build_q_pair(t)
        assert check_q_pair(t, P).ok
        assert fq_is_bijective(P) == is_exact(t)


class TestBetaDictionary:
    def test_zero(self):
        g, h = span(2, [(1, 0)]), span(2, [(0, 1)])
        assert build_beta(SymBivector.zero(1), Mat.zeros(1, 1), 2, g, h) == SymBivector.zero(2)

    def test_E1(self):
        gamma, phi = extract_gamma_phi(catalog.E1())
        assert gamma.gram == Mat([[0]]) and phi == Mat([[1]])

    def test_E2_roundtrip(self):
        t = catalog.E2()
        gamma, phi = extract_gamma_phi(t)
        assert build_beta(gamma, phi, 2, t.g, t.h) == t.beta
        # g is Lagrangian but not a Manin triple (beta restricted to ann(h) is nonzero)
        assert gamma.gram == Mat([[-1]])

    def test_nondegenerate_blocks(self):
        g = span(4, [(1, 0, 0, 0), (0, 1, 0, 0)])
        h = span(4, [(1, 1, 1, 0), (0, 2, 0, 1)])
        beta = build_beta(SymBivector(Mat.diag([1, 2])), Mat([[1, 1], [0, 1]]), 4, g, h)
        assert beta.is_nondegenerate()

    def test_bad_split(self):
        with pytest.raises(ManinError):
            build_beta(SymBivector.zero(1), Mat.zeros(1, 1), 2, span(2, [(1, 0)]), span(2, [(1, 0)]))

    def test_fixtures_roundtrip(self):
        for name, t in all_fixtures().items():
            gamma, phi = extract_gamma_phi(t)
            assert build_beta(gamma, phi, t.dim, t.g, t.h) == t.beta, name
            assert pushforward(t.g.coordinate_map() @ t.pr_g(), t.beta) == gamma, name

    @given(abelian_triples())
    def test_roundtrip(self, t):
        gamma, phi = extract_gamma_phi(t)
        assert build_beta(gamma, phi, t.dim, t.g, t.h) == t.beta
