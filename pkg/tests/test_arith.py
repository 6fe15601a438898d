import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dworklab.arith import (
    GAMMA_PRODUCT_BOUND,
    NonUnitError,
    PadicScalar,
    TPoly,
    TruncatedSeries,
    gamma_p,
    gamma_ratio_check,
    teichmuller,
    val_p,
)

PRIMES = (3, 5, 7, 11, 13)


class TestTeichmuller:
    def test_zero(self):
        assert teichmuller(0, 5, 3).value == 0

    def test_one_fixed_point(self):
        assert teichmuller(1, 7, 4).value == 1

    def test_iteration_oracle(self):
        # iterate x -> x^5 mod 25 from 2 until stable: 2^5 = 32 = 7, 7^5 = 7
        assert teichmuller(2, 5, 2).value == 7

    @given(st.integers(-50, 50), st.sampled_from(PRIMES), st.integers(1, 6))
    def test_is_root_of_unity(self, a, p, N):
        t = teichmuller(a, p, N)
        assert pow(t.value, p, p**N) == t.value

    @given(st.integers(-50, 50), st.sampled_from(PRIMES), st.integers(1, 6))
    def test_congruent_to_a(self, a, p, N):
        assert (teichmuller(a, p, N).value - a) % p == 0

    @given(st.integers(-50, 50), st.integers(-50, 50), st.sampled_from(PRIMES))
    def test_depends_on_residue_only(self, a, b, p):
        if (a - b) % p == 0:
            assert teichmuller(a, p, 4).value == teichmuller(b, p, 4).value

    @given(st.integers(1, 60), st.sampled_from(PRIMES), st.integers(1, 5))
    def test_unit_order_divides_p_minus_1(self, a, p, N):
        if a % p:
            assert pow(teichmuller(a, p, N).value, p - 1, p**N) == 1


class TestGammaP:
    def test_gamma_1_is_minus_one(self):
        for p, N in ((5, 3), (7, 2), (11, 2)):
            assert gamma_p(1, p, N).value == p**N - 1

    def test_gamma_2_is_one(self):
        assert gamma_p(2, 5, 3).value == 1

    def test_gamma_5_wilson(self):
        # -4! = -24 = 1 mod 5
        assert gamma_p(5, 5, 1).value == 1

    def test_rejects_p_in_denominator(self):
        with pytest.raises(NonUnitError):
            gamma_p(Fraction(1, 5), 5, 2)

    def test_rejects_oversized_product(self):
        with pytest.raises(ValueError):
            gamma_p(1, 11, 8)  # 11^8 > bound
        assert 11**8 > GAMMA_PRODUCT_BOUND

    def test_ratio_check_examples(self):
        assert gamma_ratio_check(5, 1, 2)
        assert gamma_ratio_check(7, 1, 2)
        assert gamma_ratio_check(5, 2, 3)

    @pytest.mark.parametrize("p,s", [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (7, 2), (11, 1), (13, 1)])
    def test_ratio_check_grid(self, p, s):
        assert gamma_ratio_check(p, s, s + 1)

    def test_ratio_equals_central_binomial_ratio(self):
        # writing m! = (-1)^(m+1) Gamma_p(m+1) p^floor(m/p) floor(m/p)! twice
        # gives binom(p^s-1, .) / binom(p^{s-1}-1, .) = -Gamma ratio exactly
        # (odd p), hence = (-1)^((p-1)/2) mod p^s by the ratio congruence
        for p, s in ((5, 2), (7, 2), (11, 1)):
            N = s + 1
            mod = p**s
            num = math.comb(p**s - 1, (p**s - 1) // 2)
            den = math.comb(p ** (s - 1) - 1, (p ** (s - 1) - 1) // 2)
            lhs = num * pow(den, -1, mod) % mod
            g = gamma_p(p**s, p, N).value * pow(
                gamma_p((p**s + 1) // 2, p, N).value ** 2, -1, p**N
            )
            assert (lhs + g) % mod == 0
            assert (lhs - (-1) ** ((p - 1) // 2)) % mod == 0


class TestPadicScalar:
    @given(
        st.integers(-1000, 1000),
        st.integers(-1000, 1000),
        st.sampled_from(PRIMES),
        st.integers(1, 5),
    )
    def test_ring_homomorphism(self, a, b, p, N):
        mod = p**N
        xa, xb = PadicScalar(p, N, a), PadicScalar(p, N, b)
        assert (xa + xb).value == (a + b) % mod
        assert (xa * xb).value == (a * b) % mod
        assert (xa - xb).value == (a - b) % mod

    def test_valuation(self):
        assert PadicScalar(5, 3, 50).valuation() == 2
        assert PadicScalar(5, 3, 0).valuation() == 3
        assert PadicScalar(5, 3, 7).valuation() == 0

    def test_division_by_non_unit_raises(self):
        with pytest.raises(NonUnitError):
            PadicScalar(5, 3, 1) / PadicScalar(5, 3, 10)

    def test_inverse(self):
        x = PadicScalar(7, 3, 3)
        assert (x * x.inverse()).value == 1


class TestTPoly:
    def test_arithmetic(self):
        a = TPoly([1, 2])
        b = TPoly([1, -1])
        assert (a * b).coeffs == (1, 1, -2)
        assert (a + b).coeffs == (2, 1)
        assert (a - a).coeffs == ()

    def test_subs_t_power(self):
        assert TPoly([1, 2, 3]).subs_t_power(3).coeffs == (1, 0, 0, 2, 0, 0, 3)

    def test_inverse_series(self):
        a = TPoly([1, 3, 5])
        inv = a.inverse_series(8, 7**2)
        assert ((a * inv) % 49).truncate(8) == TPoly([1])

    def test_theta(self):
        assert TPoly([4, 5, 6]).theta().coeffs == (0, 5, 12)

    def test_compose(self):
        # (1 + t)^2 composed with t^2 + t
        f = TPoly([1, 2, 1])
        g = TPoly([0, 1, 1])
        expect = TPoly([1, 2, 3, 2, 1])
        assert f.compose(g) == expect


class TestTruncatedSeries:
    @given(st.lists(st.integers(-9, 9), min_size=1, max_size=8))
    def test_invert_round_trip(self, coeffs):
        if coeffs[0] == 0:
            coeffs[0] = 1
        s = TruncatedSeries([Fraction(c) for c in coeffs])
        prod = s * s.invert()
        assert prod[0] == 1
        assert all(prod[i] == 0 for i in range(1, s.T))

    def test_exp_log_round_trip(self):
        s = TruncatedSeries([Fraction(0), Fraction(1), Fraction(1, 2)], 8)
        assert s.exp().log() == s

    def test_reversion(self):
        s = TruncatedSeries(
            [Fraction(0), Fraction(1), Fraction(3), Fraction(-2)], 10
        )
        inv = s.reversion()
        assert s.compose(inv) == TruncatedSeries.identity(10)
        assert inv.compose(s) == TruncatedSeries.identity(10)

    def test_to_tpoly_mod_rejects_p_denominator(self):
        s = TruncatedSeries([Fraction(1, 5)], 1)
        with pytest.raises(NonUnitError):
            s.to_tpoly_mod(5, 2)


def test_val_p():
    assert val_p(0, 5, cap=9) == 9
    assert val_p(250, 5) == 3
    assert val_p(7, 5) == 0
