"""Exact univariate arithmetic in the Hall-Littlewood parameter.

``IntPoly`` is an integer polynomial in a single abstract symbol and
``RationalFunction`` is its field of fractions, kept in a canonical reduced
form.  Everything else in the package uses these as the symbolic coefficient
ring; plain ``int`` and ``fractions.Fraction`` mix in freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Union

__all__ = [
    "IntPoly",
    "RationalFunction",
    "IntegralityFailure",
    "PoleError",
    "arith",
    "eval_at",
    "substitute",
    "to_int_poly",
    "as_rf",
    "T",
    "Interval",
]

Scalar = Union[int, Fraction]


class PoleError(ZeroDivisionError):
    """Raised when a rational function is evaluated at a root of its denominator."""


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class IntPoly:
    """Polynomial with integer coefficients, stored densely from degree 0 upward.

    The zero polynomial has no coefficients.  Instances are immutable and
    hashable.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable[int] = ()):
        self.c = _trim(int(x) for x in coeffs)

    @classmethod
    def _raw(cls, c: tuple[int, ...]) -> "IntPoly":
        obj = object.__new__(cls)
        obj.c = c
        return obj

    @classmethod
    def const(cls, a: int) -> "IntPoly":
        return cls._raw((a,)) if a else cls._raw(())

    @classmethod
    def monomial(cls, k: int, a: int = 1) -> "IntPoly":
        if k < 0:
            raise ValueError("IntPoly exponents must be nonnegative")
        return cls._raw((0,) * k + (a,)) if a else cls._raw(())

    @classmethod
    def from_terms(cls, terms: dict[int, int]) -> "IntPoly":
        if not terms:
            return cls._raw(())
        top = max(terms)
        c = [0] * (top + 1)
        for k, a in terms.items():
            c[k] += a
        return cls(c)

    # -- basic properties -------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def is_one(self) -> bool:
        return self.c == (1,)

    @property
    def lc(self) -> int:
        return self.c[-1] if self.c else 0

    def terms(self) -> dict[int, int]:
        return {k: a for k, a in enumerate(self.c) if a}

    def content(self) -> int:
        g = 0
        for a in self.c:
            g = gcd(g, a)
        return g

    def low_order(self) -> int:
        for k, a in enumerate(self.c):
            if a:
                return k
        return 0

    def __eq__(self, other):
        if isinstance(other, IntPoly):
            return self.c == other.c
        if isinstance(other, int):
            return self.c == ((other,) if other else ())
        return NotImplemented

    def __hash__(self):
        return hash(("IntPoly", self.c))

    def __bool__(self):
        return bool(self.c)

    # -- ring operations -------------------------------------------------
    def __neg__(self):
        return IntPoly._raw(tuple(-a for a in self.c))

    def __add__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        elif not isinstance(other, IntPoly):
            return NotImplemented
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] += x
        return IntPoly._raw(_trim(out))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        elif not isinstance(other, IntPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return IntPoly._raw(())
            return IntPoly._raw(tuple(a * other for a in self.c))
        if not isinstance(other, IntPoly):
            return NotImplemented
        a, b = self.c, other.c
        if not a or not b:
            return IntPoly._raw(())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return IntPoly._raw(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of IntPoly; use RationalFunction")
        result = IntPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale_down(self, d: int) -> "IntPoly":
        """Exact division of every coefficient by the integer ``d``."""
        out = []
        for a in self.c:
            q, r = divmod(a, d)
            if r:
                raise ArithmeticError(f"{d} does not divide {self}")
            out.append(q)
        return IntPoly._raw(tuple(out))

    def primitive(self) -> tuple[int, "IntPoly"]:
        cont = self.content()
        if cont == 0:
            return 0, self
        if self.lc < 0:
            cont = -cont
        return cont, self.scale_down(cont)

    def shift(self, k: int) -> "IntPoly":
        """Multiply by symbol**k for k >= 0, or divide exactly for k < 0."""
        if not self.c or k == 0:
            return self
        if k > 0:
            return IntPoly._raw((0,) * k + self.c)
        if any(self.c[:-k]):
            raise ArithmeticError("inexact shift")
        return IntPoly._raw(self.c[-k:])

    # -- division ---------------------------------------------------------
    def divmod_q(self, other: "IntPoly") -> tuple[list[Fraction], list[Fraction]]:
        """Division over the rationals; returns (quotient, remainder) coefficient lists."""
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        rem = [Fraction(a) for a in self.c]
        dq = other.degree
        lc = other.lc
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            f = rem[k] / lc
            if f:
                quot[k - dq] = f
                for j, b in enumerate(other.c):
                    rem[k - dq + j] -= f * b
        while rem and rem[-1] == 0:
            rem.pop()
        return quot, rem

    def exact_div(self, other: "IntPoly") -> "IntPoly":
        """Quotient over the integers; raises if ``other`` does not divide ``self``."""
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.c)
        dq = other.degree
        lc = other.lc
        quot = [0] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            if rem[k]:
                f, r = divmod(rem[k], lc)
                if r:
                    raise ArithmeticError("inexact polynomial division")
                quot[k - dq] = f
                for j, b in enumerate(other.c):
                    rem[k - dq + j] -= f * b
        if any(rem):
            raise ArithmeticError("inexact polynomial division")
        return IntPoly(quot)

    def pseudo_rem(self, other: "IntPoly") -> "IntPoly":
        rem = list(self.c)
        dq = other.degree
        lc = other.lc
        while len(rem) - 1 >= dq and rem:
            k = len(rem) - 1
            f = rem[k]
            rem = [a * lc for a in rem]
            for j, b in enumerate(other.c):
                rem[k - dq + j] -= f * b
            rem = list(_trim(rem))
        return IntPoly(rem)

    def __call__(self, x):
        acc = 0
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def compose(self, g):
        """Substitute ``g`` (any ring element) for the symbol."""
        acc = 0
        for a in reversed(self.c):
            acc = acc * g + a
        return acc

    # -- display ------------------------------------------------------------
    def __repr__(self):
        return f"IntPoly({list(self.c)})"

    def format(self, var: str = "t") -> str:
        if not self.c:
            return "0"
        parts = []
        for k, a in enumerate(self.c):
            if not a:
                continue
            if k == 0:
                mono = str(abs(a))
            else:
                v = var if k == 1 else f"{var}^{k}"
                mono = v if abs(a) == 1 else f"{abs(a)}*{v}"
            sign = "-" if a < 0 else "+"
            parts.append((sign, mono))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, mono in parts[1:]:
            s += sign + mono
        return s

    def __str__(self):
        return self.format()


def poly_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd over Z[t] with positive leading coefficient (primitive PRS)."""
    if a.is_zero():
        return b.primitive()[1] if b else b
    if b.is_zero():
        return a.primitive()[1]
    ca, pa = a.primitive()
    cb, pb = b.primitive()
    if pa.degree < pb.degree:
        pa, pb = pb, pa
    while not pb.is_zero():
        r = pa.pseudo_rem(pb)
        pa = pb
        pb = r.primitive()[1] if r else r
    if pa.lc < 0:
        pa = -pa
    return pa


class RationalFunction:
    """Reduced quotient of two ``IntPoly`` values.

    Canonical form: numerator and denominator are coprime over Q, their
    combined integer content is 1, and the denominator has a positive leading
    coefficient.  Polynomials (denominator 1) take a fast path that skips gcd
    work, which keeps the branching sums cheap.
    """

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        num = _as_poly(num)
        den = _as_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = _reduce(num, den)

    @classmethod
    def _raw(cls, num: IntPoly, den: IntPoly) -> "RationalFunction":
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def symbol(cls) -> "RationalFunction":
        return cls._raw(IntPoly.monomial(1), _ONE_POLY)

    @classmethod
    def from_fraction(cls, x: Scalar) -> "RationalFunction":
        x = Fraction(x)
        return cls(IntPoly.const(x.numerator), IntPoly.const(x.denominator))

    # -- predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return Fraction(self.num.c[0] if self.num.c else 0, self.den.c[0])

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, IntPoly)):
            return self == as_rf(other)
        return NotImplemented

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant_value())
        return hash((self.num.c, self.den.c))

    # -- arithmetic -------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, (int, Fraction, IntPoly)):
            return as_rf(other)
        return None

    def __neg__(self):
        return RationalFunction._raw(-self.num, self.den)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den.is_one() and o.den.is_one():
            return RationalFunction._raw(self.num + o.num, _ONE_POLY)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den.is_one() and o.den.is_one():
            return RationalFunction._raw(self.num * o.num, _ONE_POLY)
        if self.num.is_zero() or o.num.is_zero():
            return RationalFunction._raw(IntPoly(), _ONE_POLY)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            if self.num.is_zero():
                raise ZeroDivisionError("negative power of zero")
            inv = RationalFunction(self.den, self.num)
            return inv ** (-k)
        if self.den.is_one():
            return RationalFunction._raw(self.num**k, _ONE_POLY)
        return RationalFunction._raw(self.num**k, self.den**k)._renorm()

    def _renorm(self):
        # powers of a reduced fraction stay reduced; only the sign may need fixing
        if self.den.lc < 0:
            return RationalFunction._raw(-self.num, -self.den)
        return self

    # -- evaluation and substitution ---------------------------------------------
    def eval_at(self, t0: Scalar) -> Fraction:
        t0 = Fraction(t0)
        d = self.den(t0)
        if d == 0:
            raise PoleError(f"pole at t={t0}")
        return Fraction(self.num(t0)) / d

    def compose(self, g):
        """Substitute ``g`` (a RationalFunction or a number) for the symbol."""
        if isinstance(g, RationalFunction):
            if g == T:
                return self
            num = as_rf(self.num.compose(g))
            if self.den.is_one():
                return num
            return num / as_rf(self.den.compose(g))
        return self.eval_at(g)

    def substitute(self, sigma: str) -> "RationalFunction":
        return substitute(self, sigma)

    # -- display / serialization ----------------------------------------------------
    def format(self, var: str = "t") -> str:
        n = self.num.format(var)
        if self.den.is_one():
            return n
        d = self.den.format(var)
        if len(self.num.terms()) > 1:
            n = f"({n})"
        if len(self.den.terms()) > 1 or self.den.degree > 0 and self.den.lc != 1:
            d = f"({d})"
        return f"{n}/{d}"

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"RationalFunction({self.format()!r})"

    def to_json(self) -> dict:
        return {
            "num": [[k, str(a)] for k, a in sorted(self.num.terms().items())],
            "den": [[k, str(a)] for k, a in sorted(self.den.terms().items())],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RationalFunction":
        num = IntPoly.from_terms({int(k): int(a) for k, a in doc["num"]})
        den = IntPoly.from_terms({int(k): int(a) for k, a in doc["den"]})
        return cls(num, den)


_ONE_POLY = IntPoly._raw((1,))


def _as_poly(x) -> IntPoly:
    if isinstance(x, IntPoly):
        return x
    if isinstance(x, int):
        return IntPoly.const(x)
    if isinstance(x, (list, tuple)):
        return IntPoly(x)
    raise TypeError(f"cannot interpret {x!r} as an integer polynomial")


def _reduce(num: IntPoly, den: IntPoly) -> tuple[IntPoly, IntPoly]:
    if num.is_zero():
        return num, _ONE_POLY
    if den.degree > 0:
        # strip common powers of the symbol first; cheap and very common here
        k = min(num.low_order(), den.low_order())
        if k:
            num, den = num.shift(-k), den.shift(-k)
        if den.degree > 0:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num.exact_div(g), den.exact_div(g)
    c = gcd(num.content(), den.content())
    if den.lc < 0:
        c = -c
    if c != 1:
        num, den = num.scale_down(c), den.scale_down(c)
    return num, den


def as_rf(x) -> RationalFunction:
    """Coerce an int, Fraction, IntPoly or RationalFunction to a RationalFunction."""
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, IntPoly):
        return RationalFunction._raw(x, _ONE_POLY)
    if isinstance(x, int):
        return RationalFunction._raw(IntPoly.const(x), _ONE_POLY)
    if isinstance(x, Fraction):
        return RationalFunction.from_fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational function")


T = RationalFunction.symbol()


def arith(op: str, a, b) -> RationalFunction:
    a, b = as_rf(a), as_rf(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def eval_at(f, t0: Scalar) -> Fraction:
    return as_rf(f).eval_at(t0)


def substitute(f, sigma: str) -> RationalFunction:
    """Apply one of the substitutions t -> -t, t -> t^2, t -> 1/t."""
    f = as_rf(f)
    if sigma in ("-t", "neg"):
        flip = lambda p: IntPoly(a if k % 2 == 0 else -a for k, a in enumerate(p.c))
        return RationalFunction(flip(f.num), flip(f.den))
    if sigma in ("t^2", "t2", "square"):
        sq = lambda p: IntPoly.from_terms({2 * k: a for k, a in p.terms().items()})
        return RationalFunction(sq(f.num), sq(f.den))
    if sigma in ("1/t", "inv"):
        # p(1/t) = rev(p) / t^deg p
        rev = lambda p: IntPoly(reversed(p.c))
        dn, dd = f.num.degree, f.den.degree
        num, den = rev(f.num), rev(f.den)
        if dd > dn:
            num = num.shift(dd - dn)
        else:
            den = den.shift(dn - dd)
        return RationalFunction(num, den)
    raise ValueError(f"unknown substitution {sigma!r}")


@dataclass(frozen=True)
class IntegralityFailure:
    """Outcome of ``to_int_poly`` when the denominator does not divide the numerator."""

    value: RationalFunction
    remainder: RationalFunction

    def __bool__(self):
        return False


def to_int_poly(f) -> IntPoly | IntegralityFailure:
    """Return ``f`` as an integer polynomial, or a failure report carrying the remainder."""
    f = as_rf(f)
    if f.den.is_one():
        return f.num
    quot, rem = f.num.divmod_q(f.den)
    if rem:
        lcm = 1
        for r in rem:
            lcm = lcm * r.denominator // gcd(lcm, r.denominator)
        rpoly = IntPoly([int(r * lcm) for r in rem])
        return IntegralityFailure(f, RationalFunction(rpoly, IntPoly.const(lcm) * f.den))
    # divisible over Q only: report the non-integral part of the quotient
    whole = IntPoly([q.numerator // q.denominator for q in quot])
    return IntegralityFailure(f, f - whole)


class Interval:
    """Closed interval [lo, hi] with rational endpoints; used for certified approximations."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = Fraction(lo)
        hi = lo if hi is None else Fraction(hi)
        if lo > hi:
            raise ValueError("empty interval")
        self.lo, self.hi = lo, hi

    @classmethod
    def around(cls, center, radius) -> "Interval":
        center, radius = Fraction(center), abs(Fraction(radius))
        return cls(center - radius, center + radius)

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> Fraction:
        return (self.hi - self.lo) / 2

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= Fraction(x) <= self.hi

    def _co(self, other):
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, Fraction)):
            return Interval(other)
        return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        prods = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return Interval(min(prods), max(prods))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval division by an interval containing 0")
        return self * Interval(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o / self

    def __repr__(self):
        return f"Interval({self.lo}, {self.hi})"

    def to_json(self) -> list[str]:
        return [str(self.lo), str(self.hi)]
