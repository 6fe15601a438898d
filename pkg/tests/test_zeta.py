import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dworklab.arith import teichmuller
from dworklab.laurent import FrobeniusLift, LaurentPoly, family_poly
from dworklab.polytope import interior, newton_polytope, whole_polytope
from dworklab.hasse_witt import lambda_unit_root
from dworklab.zeta import (
    BudgetExceededError,
    FiniteField,
    asd_alpha,
    count_torus_points,
    eigenvalue_crosscheck,
    elliptic_point_count_extension,
    frobenius_trace_elliptic,
    lambda_at_teichmuller,
    teichmuller_specialize,
    unit_root_elliptic,
)

SIMPLICIAL2 = LaurentPoly(2, {(1, 0): 1, (0, 1): 1, (-1, -1): 1})


class TestFiniteField:
    @pytest.mark.parametrize("p,s", [(3, 2), (5, 2), (3, 3), (7, 2)])
    def test_field_axioms_sampled(self, p, s):
        F = FiniteField(p, s)
        # multiplicative order of units divides q - 1
        for a in list(F.units())[: p + 2]:
            assert F.pow(a, F.q - 1) == 1
        # distributivity spot check
        a, b, c = 1, min(p, F.q - 1), F.q - 1
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))

    def test_modulus_irreducible(self):
        F = FiniteField(5, 2)
        # x^2 + mod[1] x + mod[0] has no roots
        for x in range(5):
            assert (x * x + F.modulus[1] * x + F.modulus[0]) % 5 != 0


class TestCountTorusPoints:
    def test_line_over_f3(self):
        f = LaurentPoly(2, {(1, 0): 1, (0, 1): 1, (0, 0): 1})
        assert count_torus_points(f, 3, 1) == 1

    def test_x_minus_a(self):
        for p, s in ((3, 1), (5, 1), (5, 2), (7, 1)):
            f = LaurentPoly(1, {(1,): 1, (0,): -2})
            assert count_torus_points(f, p, s) == 1

    def test_no_roots(self):
        f = LaurentPoly(1, {(2,): 1, (0,): 1})
        # x^2 = -1 has no solution mod 7 (7 = 3 mod 4)
        assert count_torus_points(f, 7, 1) == 0

    def test_multiplicative_over_disjoint_blocks(self):
        # f(x) * nothing in y: count over (x, y) torus = count_x * (q - 1)
        f1 = LaurentPoly(1, {(1,): 1, (0,): 1})
        f2 = LaurentPoly(2, {(1, 0): 1, (0, 0): 1})
        for p in (3, 5):
            assert count_torus_points(f2, p, 1) == count_torus_points(
                f1, p, 1
            ) * (p - 1)

    def test_budget(self):
        f = LaurentPoly(4, {(1, 1, 1, 1): 1})
        with pytest.raises(BudgetExceededError):
            count_torus_points(f, 97, 2)


class TestEllipticTrace:
    def test_a5_minus_one_zero(self):
        data = frobenius_trace_elliptic(-1, 0, 5)
        assert data.a_p == -2
        assert data.affine_count == 7

    def test_supersingular(self):
        assert frobenius_trace_elliptic(0, 1, 5).a_p == 0

    def test_singular_rejected(self):
        with pytest.raises(ValueError):
            frobenius_trace_elliptic(0, 0, 5)

    @pytest.mark.parametrize("A,B,p", [(-1, 0, 5), (1, 1, 7), (-2, 1, 11), (3, 4, 13)])
    def test_hasse_bound(self, A, B, p):
        data = frobenius_trace_elliptic(A, B, p)
        assert data.a_p**2 <= 4 * p

    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_extension_counts_from_unit_root(self, s):
        # #E(F_{p^s}) = 1 + p^s - a^s - (p/a)^s with a the unit root
        p = 5
        cnt = elliptic_point_count_extension(-1, 0, p, s)
        prec = s + 2
        mod = p**prec
        a = unit_root_elliptic(-1, 0, p, prec)
        conj = p * pow(a, -1, mod) % mod
        pred = (1 + p**s - pow(a, s, mod) - pow(conj, s, mod)) % mod
        assert cnt % mod == pred


class TestAsdAlpha:
    def test_alpha_1(self):
        assert asd_alpha(-1, 0, 1) == 1

    def test_even_vanishes(self):
        assert asd_alpha(-1, 0, 8) == 0

    def test_alpha_5(self):
        assert asd_alpha(-1, 0, 5) == -2

    def test_modular_agrees(self):
        for m in (5, 25, 75):
            assert asd_alpha(1, 1, m, 125) == asd_alpha(1, 1, m) % 125

    def test_alpha_p_congruent_a_p(self):
        for A, B, p in ((-1, 0, 5), (1, 1, 7), (-2, 1, 11)):
            a_p = frobenius_trace_elliptic(A, B, p).a_p
            assert (asd_alpha(A, B, p) - a_p) % p == 0


class TestUnitRoot:
    def test_hensel_values(self):
        assert unit_root_elliptic(-1, 0, 5, 1) == 3
        assert unit_root_elliptic(-1, 0, 5, 2) == 13
        assert unit_root_elliptic(-1, 0, 5, 3) == 113

    def test_quadratic_relation(self):
        for s in (1, 2, 3, 4):
            lam = unit_root_elliptic(-1, 0, 5, s)
            assert (lam * lam + 2 * lam + 5) % 5**s == 0

    def test_supersingular_raises(self):
        with pytest.raises(ValueError):
            unit_root_elliptic(0, 1, 5, 2)


class TestEigenvalueCrosscheck:
    def test_n1_pinned(self):
        f = LaurentPoly(1, {(1,): 1, (0,): -2})
        rep = eigenvalue_crosscheck(f, 5, 2)
        assert rep["pass"]
        assert all(c["trace"] == 2 for c in rep["cells"])
        assert all(c["torus_count"] == 1 for c in rep["cells"])

    def test_elliptic_as_torus_hypersurface(self):
        f = LaurentPoly(2, {(0, 2): 1, (3, 0): -1, (1, 0): 1})
        rep = eigenvalue_crosscheck(f, 5, 2)
        assert rep["pass"]

    @pytest.mark.parametrize("c,p", [(2, 5), (1, 7)])
    def test_simplicial_members(self, c, p):
        f = LaurentPoly(2, {(1, 0): 1, (0, 1): 1, (-1, -1): 1, (0, 0): c})
        rep = eigenvalue_crosscheck(f, p, 2)
        assert rep["pass"]


class TestTeichmullerSpecialize:
    def test_constant_terms_at_zero(self):
        from dworklab.arith import TPoly

        M = [[TPoly([4, 1, 1]), TPoly([])], [TPoly([2]), TPoly([0, 9])]]
        out = teichmuller_specialize(M, 0, 5, 2)
        assert out == [[4, 0], [2, 0]]

    def test_sum_at_one(self):
        from dworklab.arith import TPoly

        M = [[TPoly([4, 1, 1])]]
        assert teichmuller_specialize(M, 1, 5, 2) == [[6]]

    @pytest.mark.parametrize("a", [1, 2, 3, 4])
    def test_two_route_agreement(self, a):
        # specialising the family at tau(a) = running the integer fibre
        p, s = 7, 2
        ft = family_poly(SIMPLICIAL2)
        P = newton_polytope(SIMPLICIAL2.support())
        mu = interior(P)
        spec = lambda_at_teichmuller(ft, mu, a, p, s)
        tau = teichmuller(a, p, s).value
        fi = LaurentPoly(
            2, {(0, 0): 1, (1, 0): -tau, (0, 1): -tau, (-1, -1): -tau}
        )
        lam = lambda_unit_root(fi, mu, p, FrobeniusLift.identity(), s)
        assert spec == lam.entries
