"""Exact arithmetic substrate.

Everything downstream works over one of these rings:

* plain Python ``int`` (arbitrary precision, used whenever exactness is free),
* ``Z/p^N`` residues, wrapped as :class:`PadicScalar` at API boundaries and
  as bare ints inside matrix kernels,
* exact polynomials in one variable ``t`` (:class:`TPoly`), the coefficient
  ring of one-parameter families,
* truncated power series with rational coefficients (:class:`TruncatedSeries`),
  the substrate for Picard-Fuchs solutions and mirror maps.

No floating point is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

# Ceiling for the direct product loop in gamma_p: p^N must stay below this.
GAMMA_PRODUCT_BOUND = 10**7


class NonUnitError(ArithmeticError):
    """Division by an element that is not a unit in the working ring."""


def val_p(n: int, p: int, cap: int | None = None) -> int:
    """p-adic valuation of an integer; 0 maps to `cap` (or a huge sentinel)."""
    if n == 0:
        return cap if cap is not None else 10**9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v if cap is None else min(v, cap)


def val_p_fraction(x, p: int, cap: int | None = None) -> int:
    """p-adic valuation of an int or Fraction (negative for p in denominator)."""
    if isinstance(x, int):
        return val_p(x, p, cap)
    x = Fraction(x)
    if x == 0:
        return cap if cap is not None else 10**9
    v = val_p(x.numerator, p) - val_p(x.denominator, p)
    return v if cap is None else min(v, cap)


def inv_mod(a: int, modulus: int) -> int:
    """Inverse of a unit mod `modulus`; raises NonUnitError otherwise."""
    try:
        return pow(a, -1, modulus)
    except ValueError:
        raise NonUnitError(f"{a} is not invertible modulo {modulus}") from None


@dataclass(frozen=True)
class PadicScalar:
    """An element of Z/p^N regarded as a p-adic integer known to precision N."""

    p: int
    N: int
    value: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("precision exponent N must be >= 1")
        object.__setattr__(self, "value", self.value % self.p**self.N)

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def _coerce(self, other) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            if (other.p, other.N) != (self.p, self.N):
                raise ValueError("mixed p-adic contexts")
            return other
        if isinstance(other, int):
            return PadicScalar(self.p, self.N, other)
        if isinstance(other, Fraction):
            return PadicScalar(
                self.p,
                self.N,
                other.numerator * inv_mod(other.denominator, self.modulus),
            )
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return PadicScalar(self.p, self.N, self.value + o.value)

    __radd__ = __add__

    def __neg__(self):
        return PadicScalar(self.p, self.N, -self.value)

    def __sub__(self, other):
        o = self._coerce(other)
        return PadicScalar(self.p, self.N, self.value - o.value)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        return PadicScalar(self.p, self.N, self.value * o.value)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return PadicScalar(self.p, self.N, pow(self.value, k, self.modulus))

    def valuation(self) -> int:
        """ord_p of the residue; N means 'zero to working precision'."""
        return val_p(self.value, self.p, cap=self.N)

    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def inverse(self) -> "PadicScalar":
        if not self.is_unit():
            raise NonUnitError(
                f"residue {self.value} has positive valuation mod {self.p}^{self.N}"
            )
        return PadicScalar(self.p, self.N, inv_mod(self.value, self.modulus))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()


def teichmuller(a: int, p: int, N: int) -> PadicScalar:
    """Teichmuller lift: the unique root of X^p = X congruent to a mod p.

    Computed by the fixed-point iteration x <- x^p mod p^N, which gains at
    least one digit of stability per step, so at most N iterations are needed.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    modulus = p**N
    x = a % modulus
    for _ in range(N + 1):
        y = pow(x, p, modulus)
        if y == x:
            break
        x = y
    return PadicScalar(p, N, x)


def _gamma_p_int(n: int, p: int, modulus: int) -> int:
    # Morita gamma at a non-negative integer: (-1)^n prod_{0<j<n, p∤j} j.
    acc = 1
    for j in range(1, n):
        if j % p:
            acc = acc * j % modulus
    return (-acc if n % 2 else acc) % modulus


def gamma_p(x, p: int, N: int) -> PadicScalar:
    """Morita p-adic gamma function evaluated modulo p^N.

    For an integer n >= 1, Gamma_p(n) = (-1)^n prod_{0<j<n, p | j absent} j.
    The function is continuous on Z_p, so a rational x with denominator prime
    to p is evaluated at its integer representative mod p^N.  The direct
    product loop is O(p^N), guarded by GAMMA_PRODUCT_BOUND.
    """
    if p == 2:
        raise ValueError("gamma_p requires an odd prime")
    modulus = p**N
    if modulus > GAMMA_PRODUCT_BOUND:
        raise ValueError(
            f"p^N = {modulus} exceeds the gamma product bound {GAMMA_PRODUCT_BOUND}"
        )
    if isinstance(x, PadicScalar):
        if (x.p, x.N) != (p, N):
            raise ValueError("mixed p-adic contexts")
        rep = x.value
    elif isinstance(x, Fraction):
        if x.denominator % p == 0:
            raise NonUnitError("gamma_p argument must be a p-adic integer")
        rep = x.numerator * inv_mod(x.denominator, modulus) % modulus
    else:
        rep = x % modulus
    return PadicScalar(p, N, _gamma_p_int(rep, p, modulus))


def gamma_ratio_check(p: int, s: int, N: int) -> bool:
    """Check Gamma_p(p^s) / Gamma_p((p^s+1)/2)^2 = (-1)^((p+1)/2) mod p^s.

    The left side equals the ratio of central binomial coefficients
    binom(p^s-1, (p^s-1)/2) / binom(p^{s-1}-1, (p^{s-1}-1)/2) up to sign,
    which controls how the 1x1 beta matrices of an elliptic curve stabilise.
    """
    if p == 2:
        raise ValueError("odd primes only")
    if N < s:
        raise ValueError("need working precision N >= s")
    modulus = p**N
    num = gamma_p(p**s, p, N).value
    den = gamma_p((p**s + 1) // 2, p, N).value
    den2 = pow(den, 2, modulus)
    if den2 % p == 0:
        raise NonUnitError("internal error: gamma value is not a unit")
    lhs = num * inv_mod(den2, modulus) % p**s
    rhs = (-1) ** ((p + 1) // 2) % p**s
    return lhs == rhs


class TPoly:
    """Exact dense polynomial in one variable t.

    Coefficients are plain ints (or Fractions for the few exact-rational
    uses).  Instances are immutable by convention; all operations return new
    polynomials with trailing zeros stripped.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def const(c) -> "TPoly":
        return TPoly([c])

    @staticmethod
    def t_power(k: int, c=1) -> "TPoly":
        return TPoly([0] * k + [c])

    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, TPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == (TPoly([other])).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __getitem__(self, d: int):
        return self.coeffs[d] if 0 <= d < len(self.coeffs) else 0

    def _coerce(self, other):
        if isinstance(other, TPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return TPoly([other])
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return TPoly([self[i] + o[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return TPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.coeffs or not o.coeffs:
            return TPoly()
        out = [0] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] += a * b
        return TPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = TPoly([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __mod__(self, modulus: int):
        return TPoly([c % modulus for c in self.coeffs])

    def truncate(self, T: int) -> "TPoly":
        return TPoly(self.coeffs[:T])

    def subs_t_power(self, k: int) -> "TPoly":
        """Substitute t -> t^k."""
        if not self.coeffs:
            return TPoly()
        out = [0] * ((len(self.coeffs) - 1) * k + 1)
        for i, c in enumerate(self.coeffs):
            out[i * k] = c
        return TPoly(out)

    def compose(self, other: "TPoly", T: int | None = None,
                modulus: int | None = None) -> "TPoly":
        """Horner composition self(other), optionally truncated mod t^T."""
        acc = TPoly()
        for c in reversed(self.coeffs):
            acc = acc * other + TPoly([c])
            if T is not None:
                acc = acc.truncate(T)
            if modulus is not None:
                acc = acc % modulus
        return acc

    def theta(self) -> "TPoly":
        """t d/dt."""
        return TPoly([i * c for i, c in enumerate(self.coeffs)])

    def evaluate(self, x, modulus: int | None = None):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
            if modulus is not None:
                acc %= modulus
        return acc

    def min_val_p(self, p: int, cap: int) -> int:
        """Gauss valuation: min p-adic valuation over all coefficients."""
        if not self.coeffs:
            return cap
        return min(val_p(c, p, cap) for c in self.coeffs)

    def inverse_series(self, T: int, modulus: int | None = None) -> "TPoly":
        """Multiplicative inverse as a series mod t^T; needs a unit constant term."""
        c0 = self[0]
        if modulus is not None:
            try:
                c0inv = inv_mod(c0, modulus)
            except NonUnitError:
                raise NonUnitError("constant term is not a unit") from None
        else:
            if c0 in (1, -1):
                c0inv = c0
            elif isinstance(c0, Fraction) or isinstance(self[0], Fraction):
                c0inv = Fraction(1, 1) / c0
            else:
                raise NonUnitError("constant term is not a unit over Z")
        inv = [0] * T
        inv[0] = c0inv
        for d in range(1, T):
            s = sum(self[i] * inv[d - i] for i in range(1, d + 1))
            v = -c0inv * s
            inv[d] = v % modulus if modulus is not None else v
        return TPoly(inv)

    def __repr__(self):
        return f"TPoly({list(self.coeffs)!r})"


class TruncatedSeries:
    """Power series known modulo t^T, with exact (usually rational) coefficients."""

    __slots__ = ("coeffs", "T")

    def __init__(self, coeffs, T: int | None = None):
        cs = list(coeffs)
        if T is None:
            T = len(cs)
        if len(cs) < T:
            cs = cs + [Fraction(0)] * (T - len(cs))
        self.coeffs = cs[:T]
        self.T = T

    @staticmethod
    def zero(T: int) -> "TruncatedSeries":
        return TruncatedSeries([], T)

    @staticmethod
    def one(T: int) -> "TruncatedSeries":
        return TruncatedSeries([Fraction(1)], T)

    @staticmethod
    def identity(T: int) -> "TruncatedSeries":
        return TruncatedSeries([Fraction(0), Fraction(1)], T)

    def __getitem__(self, d: int):
        return self.coeffs[d] if 0 <= d < self.T else 0

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        n = min(self.T, other.T)
        return all(self[i] == other[i] for i in range(n))

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            if other.T != self.T:
                n = min(self.T, other.T)
                return TruncatedSeries(other.coeffs[:n], n), TruncatedSeries(self.coeffs[:n], n)
            return other, self
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries([other], self.T), self
        return None, None

    def __add__(self, other):
        o, s = self._coerce(other)
        if o is None:
            return NotImplemented
        return TruncatedSeries([s[i] + o[i] for i in range(s.T)], s.T)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs], self.T)

    def __sub__(self, other):
        o, s = self._coerce(other)
        if o is None:
            return NotImplemented
        return TruncatedSeries([s[i] - o[i] for i in range(s.T)], s.T)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries([c * other for c in self.coeffs], self.T)
        o, s = self._coerce(other)
        if o is None:
            return NotImplemented
        out = [Fraction(0)] * s.T
        for i, a in enumerate(s.coeffs):
            if a == 0:
                continue
            for j in range(s.T - i):
                b = o[j]
                if b:
                    out[i + j] += a * b
        return TruncatedSeries(out, s.T)

    __rmul__ = __mul__

    def invert(self) -> "TruncatedSeries":
        """Multiplicative inverse; requires a unit (nonzero) constant term."""
        if self[0] == 0:
            raise NonUnitError("series has zero constant term")
        c0inv = Fraction(1, 1) / self[0]
        inv = [Fraction(0)] * self.T
        inv[0] = c0inv
        for d in range(1, self.T):
            inv[d] = -c0inv * sum(self[i] * inv[d - i] for i in range(1, d + 1))
        return TruncatedSeries(inv, self.T)

    def __truediv__(self, other):
        o, s = self._coerce(other)
        if o is None:
            return NotImplemented
        return s * o.invert()

    def theta(self) -> "TruncatedSeries":
        """t d/dt."""
        return TruncatedSeries([i * c for i, c in enumerate(self.coeffs)], self.T)

    def derivative(self) -> "TruncatedSeries":
        return TruncatedSeries(
            [i * self.coeffs[i] for i in range(1, self.T)], self.T - 1
        )

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(t)); inner must have zero constant term."""
        if inner[0] != 0:
            raise ValueError("composition needs inner series with zero constant term")
        T = min(self.T, inner.T)
        acc = TruncatedSeries.zero(T)
        for c in reversed(self.coeffs[:T]):
            acc = acc * TruncatedSeries(inner.coeffs[:T], T)
            acc = acc + c
        return acc

    def subs_t_power(self, k: int) -> "TruncatedSeries":
        out = [Fraction(0)] * self.T
        for i, c in enumerate(self.coeffs):
            if i * k >= self.T:
                break
            out[i * k] = c
        return TruncatedSeries(out, self.T)

    def exp(self) -> "TruncatedSeries":
        """exp of a series with zero constant term."""
        if self[0] != 0:
            raise ValueError("exp needs zero constant term")
        out = [Fraction(0)] * self.T
        out[0] = Fraction(1)
        # E' = f' E, solved term by term: (d+1) e_{d+1} = sum (i+1) f_{i+1} e_{d-i}
        for d in range(self.T - 1):
            s = sum((i + 1) * self[i + 1] * out[d - i] for i in range(d + 1))
            out[d + 1] = Fraction(s, d + 1)
        return TruncatedSeries(out, self.T)

    def log(self) -> "TruncatedSeries":
        """log of a series with constant term 1."""
        if self[0] != 1:
            raise ValueError("log needs constant term 1")
        # log f = integral of f'/f
        ratio = self.derivative() * TruncatedSeries(self.coeffs, self.T - 1).invert()
        out = [Fraction(0)] * self.T
        for d in range(1, self.T):
            out[d] = Fraction(ratio[d - 1], d)
        return TruncatedSeries(out, self.T)

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse of a series t + O(t^2), by Newton iteration."""
        if self[0] != 0 or self[1] == 0:
            raise ValueError("reversion needs form c1*t + O(t^2), c1 != 0")
        if self[1] != 1:
            raise ValueError("reversion implemented for monic series t + O(t^2)")
        T = self.T
        g = TruncatedSeries.identity(T)
        for _ in range(max(1, T.bit_length() + 1)):
            fg = self.compose(g)
            err = fg - TruncatedSeries.identity(T)
            if all(c == 0 for c in err.coeffs):
                break
            fpg = self.derivative_full().compose(g)
            g = g - err * fpg.invert()
        return g

    def derivative_full(self) -> "TruncatedSeries":
        """d/dt padded back to length T (top coefficient unknown, set to 0)."""
        out = [i * self.coeffs[i] for i in range(1, self.T)] + [Fraction(0)]
        return TruncatedSeries(out, self.T)

    def min_val_p(self, p: int, cap: int = 64) -> int:
        return min(
            (val_p_fraction(c, p, cap) for c in self.coeffs), default=cap
        )

    def to_tpoly_mod(self, p: int, N: int) -> TPoly:
        """Reduce mod p^N; rejects coefficients with p in the denominator."""
        modulus = p**N
        out = []
        for c in self.coeffs:
            if isinstance(c, Fraction):
                if c.denominator % p == 0:
                    raise NonUnitError(
                        f"coefficient {c} is not p-integral at p={p}"
                    )
                out.append(c.numerator * inv_mod(c.denominator, modulus) % modulus)
            else:
                out.append(c % modulus)
        return TPoly(out)

    def __repr__(self):
        return f"TruncatedSeries({self.coeffs!r})"
