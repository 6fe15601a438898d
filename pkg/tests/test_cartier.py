import math
import random

import pytest

from dworklab.arith import TPoly
from dworklab.laurent import FrobeniusLift, LaurentPoly, family_poly
from dworklab.linalg import RankDeficiencyError
from dworklab.polytope import interior, newton_polytope, vertex_star, whole_polytope
from dworklab.hasse_witt import hw_matrix, lambda_unit_root
from dworklab.cartier import (
    CartierInterpolation,
    FormalExpansion,
    cartier_shift,
    cartier_via_formula,
    default_probes,
    derivative_order_failures,
    expand_origin,
    expand_vertex,
    formal_derivative_order,
    interpolate_cartier,
    theta_rational,
    theta_t_rational,
    unit_root_projection_check,
    vertex_budget,
)

ID = FrobeniusLift.identity()
TRIANGLE = LaurentPoly(2, {(0, 0): 1, (1, 0): 1, (0, 1): 1})
ONE2 = LaurentPoly.constant(2, 1)
SIMPLICIAL2 = LaurentPoly(2, {(1, 0): 1, (0, 1): 1, (-1, -1): 1})


class TestExpandVertex:
    def test_geometric_binomials(self):
        E = expand_vertex(ONE2, TRIANGLE, 1, (0, 0), 14)
        for a in range(6):
            for b in range(6):
                assert E.coefficient((a, b)) == (-1) ** (a + b) * math.comb(a + b, a)
                assert E.is_complete((a, b))

    def test_empty_numerator(self):
        E = expand_vertex(LaurentPoly(2), TRIANGLE, 1, (0, 0), 5)
        assert E.coeffs == {}

    def test_unit_square_multiplicative(self):
        # 1/((1+x)(1+y)) has (-1)^(a+b) coefficients; contributions to a
        # single index come from several geometric powers, which the
        # completeness certificate must account for
        f = LaurentPoly(2, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1})
        E = expand_vertex(ONE2, f, 1, (0, 0), 12)
        for a in range(5):
            for b in range(5):
                if E.is_complete((a, b)):
                    assert E.coefficient((a, b)) == (-1) ** (a + b)

    def test_incomplete_when_budget_small(self):
        f = LaurentPoly(2, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1})
        E = expand_vertex(ONE2, f, 1, (0, 0), 1)
        # (1,1) receives a second contribution from ell^2, so budget 1 cannot
        # certify it
        assert not E.is_complete((1, 1))

    def test_second_vertex(self):
        # expansion at (1,0): support lives in the shifted cone
        E = expand_vertex(ONE2, TRIANGLE, 1, (1, 0), 10)
        assert E.coefficient((-1, 0)) == 1  # leading term x^{-1}
        assert E.coefficient((0, 0)) == 0

    def test_supercongruence_family_closed_form(self):
        # (1-x1)(1-x2) - t x1 x2 expanded at 0: c_u(t) = sum binom(u1,m) binom(u2,m) t^m
        f = LaurentPoly(
            2,
            {(0, 0): TPoly([1]), (1, 0): TPoly([-1]), (0, 1): TPoly([-1]),
             (1, 1): TPoly([1, -1])},
        )
        E = expand_vertex(ONE2, f, 1, (0, 0), 16)
        for u in ((1, 1), (2, 1), (3, 3), (2, 4)):
            expect = TPoly(
                [
                    math.comb(u[0], m) * math.comb(u[1], m)
                    for m in range(min(u) + 1)
                ]
            )
            got = E.coefficient(u)
            got = got if isinstance(got, TPoly) else TPoly([got])
            assert got == expect

    def test_budget_helper_certifies(self):
        targets = [(6, 2), (0, 7)]
        S = vertex_budget(TRIANGLE, (0, 0), 1, ONE2, targets)
        E = expand_vertex(ONE2, TRIANGLE, 1, (0, 0), S)
        assert all(E.is_complete(v) for v in targets)


class TestExpandOrigin:
    def test_central_binomials(self):
        g = LaurentPoly(1, {(1,): 1, (-1,): 1})
        E = expand_origin(LaurentPoly.constant(1, 1), g, 1, 9)
        assert E.coefficient((0,)) == TPoly([1, 0, 2, 0, 6, 0, 20, 0, 70])

    def test_pole_two(self):
        g = LaurentPoly(1, {(1,): 1, (-1,): 1})
        E = expand_origin(LaurentPoly.constant(1, 1), g, 2, 7)
        # c_0 for 1/f^2: sum binom(m+1,1) t^m [x^0] g^m
        expect = TPoly([(m + 1) * (math.comb(m, m // 2) if m % 2 == 0 else 0) for m in range(7)])
        assert E.coefficient((0,)) == expect

    def test_targets_pruning_consistent(self):
        E_full = expand_origin(ONE2, SIMPLICIAL2, 1, 14)
        E_cut = expand_origin(ONE2, SIMPLICIAL2, 1, 14, targets=[(2, 1), (0, 0)])
        for v in ((2, 1), (0, 0)):
            assert E_cut.coefficient(v) == E_full.coefficient(v)


class TestCartierShift:
    def test_index_decimation(self):
        E = FormalExpansion(
            "vertex", 2, {(0, 0): 1, (3, 0): 5, (1, 0): 2},
            base=(0, 0), budget=10, psi=(1, 1), delta=1,
            shifts=((0, 0),), cone_normals=((1, 0), (0, 1)),
        )
        out = cartier_shift(E, 3)
        assert out.coeffs == {(0, 0): 1, (1, 0): 5}

    def test_origin_mode_keeps_t(self):
        g = LaurentPoly(1, {(1,): 1, (-1,): 1})
        E = expand_origin(LaurentPoly.constant(1, 1), g, 1, 9)
        out = cartier_shift(E, 3)
        assert out.coefficient((0,)) == E.coefficient((0,))

    def test_double_shift(self):
        E = expand_vertex(ONE2, TRIANGLE, 1, (0, 0), 20)
        once = cartier_shift(cartier_shift(E, 3), 3)
        nine = cartier_shift(E, 9)
        assert once.coeffs == nine.coeffs

    def test_completeness_follows_decimation(self):
        E = expand_vertex(ONE2, TRIANGLE, 1, (0, 0), 10)
        out = cartier_shift(E, 3)
        assert out.is_complete((3, 0)) == E.is_complete((9, 0))


class TestCartierViaFormula:
    def test_mod_p_is_hasse_witt(self):
        # single-term structure: C_p(x^u / f) = sum HW_{u,v} x^v / f^sigma mod p
        f = TRIANGLE
        P = newton_polytope(f.support())
        pts = whole_polytope(P).lattice_points(1)
        hw = hw_matrix(f, whole_polytope(P), 5, 1)
        for iu, u in enumerate(pts):
            img = cartier_via_formula(LaurentPoly.monomial(2, u), f, 1, 5, ID, 1)
            assert len(img.terms) == 1
            _, Q0, pole = img.terms[0]
            assert pole == 1
            for iv, v in enumerate(pts):
                assert (Q0.coefficient_at(v) - hw.entries[iu][iv]) % 5 == 0

    def test_rejects_p_equal_two(self):
        with pytest.raises(ValueError):
            cartier_via_formula(ONE2, TRIANGLE, 1, 2, ID, 1)

    def test_gauss_constant_term_preserved(self):
        # C_p(1/(x-a)): the constant expansion coefficient is fixed
        f = LaurentPoly(1, {(1,): 1, (0,): -3})
        img = cartier_via_formula(LaurentPoly.constant(1, 1), f, 1, 5, ID, 2)
        b = (0,)
        S = vertex_budget(f, b, 3, LaurentPoly.constant(1, 1), [(10,)])
        direct = expand_vertex(LaurentPoly.constant(1, 1), f, 1, b, S, 25)
        formula = img.expansion(b, S)
        assert formula.coefficient((0,)) % 25 == direct.coefficient((0,)) % 25


def random_unit_vertex_poly(rng, n, p):
    """Sparse Laurent polynomial guaranteed to have a p-unit vertex coefficient."""
    while True:
        terms = {}
        for _ in range(rng.randint(2, 4)):
            e = tuple(rng.randint(-2, 2) for _ in range(n))
            c = rng.randint(-4, 4)
            if c:
                terms[e] = c
        f = LaurentPoly(n, terms)
        if f.is_zero() or len(f.terms) < 2:
            continue
        try:
            P = newton_polytope(f.support())
        except ValueError:
            continue
        base = None
        for v in P.vertices:
            if f.coefficient_at(v) % p:
                base = v
                break
        if base is None:
            continue
        return f, base


class TestRouteEquivalence:
    @pytest.mark.parametrize("p", [3, 5])
    def test_seeded_random_polys(self, p):
        rng = random.Random(p)
        for trial in range(6):
            f, base = random_unit_vertex_poly(rng, 2, p)
            m = rng.randint(1, 3)
            N = rng.randint(1, 3)
            _assert_routes_agree(f, base, m, p, N, bound=1)


def _assert_routes_agree(f, base, m, p, N, bound):
    import itertools

    one = LaurentPoly.constant(f.n, 1)
    box = list(itertools.product(range(-bound, bound + 1), repeat=f.n))
    img = cartier_via_formula(one, f, m, p, ID, N)
    S = vertex_budget(f, base, m, one, [tuple(p * x for x in v) for v in box])
    S = max(S, max(vertex_budget(f, base, pole, Q, box) for _, Q, pole in img.terms) if img.terms else S)
    E = expand_vertex(one, f, m, base, S, p**N)
    direct = cartier_shift(E, p)
    formula = img.expansion(base, S)
    checked = 0
    for v in box:
        if direct.is_complete(v) and formula.is_complete(v):
            checked += 1
            assert (direct.coefficient(v) - formula.coefficient(v)) % p**N == 0, (
                f, base, m, p, N, v,
            )
    assert checked > 0


class TestThetaOperations:
    def test_commutation_with_decimation(self):
        E = expand_vertex(ONE2, TRIANGLE, 1, (0, 0), 16)
        p = 3
        for i in range(2):
            lhs = cartier_shift(E.theta(i), p)
            rhs = cartier_shift(E, p).theta(i).scaled(p)
            for v in [(0, 0), (1, 0), (1, 1), (2, 1)]:
                assert lhs.coefficient(v) == rhs.coefficient(v)

    def test_theta_rational_expansion(self):
        # expansion of theta_i(h/f^m) = coefficientwise multiplication by v_i
        num, m2 = theta_rational(ONE2, TRIANGLE, 1, 0)
        S = 14
        E_direct = expand_vertex(num, TRIANGLE, m2, (0, 0), S)
        E_theta = expand_vertex(ONE2, TRIANGLE, 1, (0, 0), S).theta(0)
        for v in [(1, 0), (2, 1), (0, 3), (3, 2)]:
            assert E_direct.coefficient(v) == E_theta.coefficient(v)

    def test_theta_t_rational_expansion(self):
        num, m2 = theta_t_rational(
            LaurentPoly.constant(2, TPoly([1])), family_poly(SIMPLICIAL2), 1
        )
        E_direct = expand_origin(num, SIMPLICIAL2, m2, 8)
        E_base = expand_origin(ONE2, SIMPLICIAL2, 1, 8)
        for v in [(0, 0), (1, 0), (1, 1)]:
            assert E_direct.coefficient(v).truncate(7) == E_base.coefficient(
                v
            ).theta().truncate(7)


class TestDerivativeOrder:
    def test_theta_image_passes(self):
        E = expand_vertex(ONE2, TRIANGLE, 1, (0, 0), 14).theta(0)
        # theta_1 multiplies by v_1; full derivative criterion needs gcd, so
        # use theta applied in both variables via sum: check the simple one
        # coordinate case on indices with gcd dividing v_1
        assert formal_derivative_order(
            FormalExpansion(
                "vertex", 2,
                {v: c for v, c in E.coeffs.items() if v[1] == 0},
                modulus=None, base=(0, 0), budget=E.budget, psi=E.psi,
                delta=E.delta, shifts=E.shifts, cone_normals=E.cone_normals,
            ),
            1, 3, 2,
        )

    def test_plain_expansion_fails_at_k1(self):
        E = expand_vertex(ONE2, TRIANGLE, 1, (0, 0), 14)
        assert not formal_derivative_order(E, 1, 3, 2)
        bad = derivative_order_failures(E, 1, 3, 2)
        assert any(v == (3, 0) for v, _, _ in bad)

    def test_zero_expansion_passes(self):
        E = FormalExpansion("vertex", 2, {}, base=(0, 0), budget=5,
                            psi=(1, 1), delta=1, shifts=(), cone_normals=())
        for k in (1, 2, 3):
            assert formal_derivative_order(E, k, 5, 3)


class TestInterpolation:
    def test_matches_beta_route(self):
        f = LaurentPoly(2, {(1, 0): 1, (0, 1): 1, (-1, -1): 1, (0, 0): 2})
        P = newton_polytope(f.support())
        lam = lambda_unit_root(f, whole_polytope(P), 5, ID, 2)
        interp = interpolate_cartier(f, whole_polytope(P), 1, 5, ID, 2)
        assert [[x % 25 for x in row] for row in interp.matrix] == lam.entries

    def test_family_gamma_relation(self):
        from dworklab.cy import constant_term_series

        ft = family_poly(SIMPLICIAL2)
        P = newton_polytope(SIMPLICIAL2.support())
        T = 30
        interp = interpolate_cartier(
            ft, interior(P), 1, 5, FrobeniusLift.t_power(5), 1,
            t_trunc=T, g=SIMPLICIAL2,
        )
        lam = interp.matrix[0][0]
        T_l = interp.t_trunc
        gam = constant_term_series(SIMPLICIAL2, T).to_tpoly_mod(5, 1)
        lhs = (lam * gam.subs_t_power(5)).truncate(T_l) % 5
        assert lhs == (gam % 5).truncate(T_l)

    def test_x_minus_a_identity(self):
        f = LaurentPoly(1, {(1,): 1, (0,): -3})
        P = newton_polytope(f.support())
        interp = interpolate_cartier(f, whole_polytope(P), 1, 5, ID, 2)
        assert [[x % 25 for x in row] for row in interp.matrix] == [[1, 0], [0, 1]]

    def test_vertex_independence(self):
        # triangle has three unit vertices; Lambda must not depend on the one
        # used for expansion
        f = TRIANGLE
        P = newton_polytope(f.support())
        st0 = vertex_star(P, (0, 0))
        results = []
        for b in P.vertices:
            probes = default_probes(st0, 1, b)
            interp = interpolate_cartier(
                f, st0, 1, 5, ID, 2, probes=probes, seed=3
            )
            results.append([[x % 25 for x in r] for r in interp.matrix])
        assert results[0] == results[1] == results[2]

    def test_mu_stability(self):
        f = LaurentPoly(2, {(1, 0): 1, (0, 1): 1, (-1, -1): 1, (0, 0): 2})
        P = newton_polytope(f.support())
        pts = whole_polytope(P).lattice_points(1)
        lam = lambda_unit_root(f, whole_polytope(P), 5, ID, 2)
        for v_star in P.vertices:
            mu = vertex_star(P, v_star)
            inside = [i for i, u in enumerate(pts) if mu.contains(u)]
            outside = [i for i, u in enumerate(pts) if not mu.contains(u)]
            for i in inside:
                for j in outside:
                    assert lam.entries[i][j] % 25 == 0

    def test_divisibility_contract(self):
        # expansions of theta images stay divisible by p^s after s decimations
        E = expand_vertex(ONE2, TRIANGLE, 1, (0, 0), 40).theta(0).theta(1)
        p = 3
        shifted = cartier_shift(cartier_shift(E, p), p)
        for v, c in shifted.coeffs.items():
            if shifted.is_complete(v):
                assert c % p**2 == 0


class TestProjection:
    def test_basis_element_projects_to_itself(self):
        f = LaurentPoly(2, {(1, 0): 1, (0, 1): 1, (-1, -1): 1, (0, 0): 2})
        P = newton_polytope(f.support())
        ok = unit_root_projection_check(
            f, whole_polytope(P), 5, ID, (LaurentPoly.monomial(2, (0, 0)), 1), 2
        )
        assert ok

    def test_theta_projects_to_derivative(self):
        f = LaurentPoly(2, {(1, 0): 1, (0, 1): 1, (-1, -1): 1, (0, 0): 2})
        P = newton_polytope(f.support())
        omega = theta_rational(LaurentPoly.monomial(2, (1, 0)), f, 1, 1)
        assert unit_root_projection_check(f, whole_polytope(P), 5, ID, omega, 2)

    def test_gauss_fixed_point_extra_p(self):
        # C_p(omega) - omega lands in p * (formal derivatives) at a vertex star
        f = TRIANGLE
        p = 5
        b = (0, 0)
        S = vertex_budget(f, b, 1, ONE2, [(p * a, p * c) for a in range(4) for c in range(4)])
        E = expand_vertex(ONE2, f, 1, b, S, p**2)
        shifted = cartier_shift(E, p)
        diff = shifted + E.scaled(-1)
        assert formal_derivative_order(diff, 1, p, 2, extra=1)
