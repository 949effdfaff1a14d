"""Hall-Littlewood P and Q polynomials over integer signatures.

Two independent constructions are provided: the symmetrization formula
(``hl_p_sym``) and branching over Gelfand-Tsetlin patterns (``skew_eval``,
``skew_poly``).  The branching sums are evaluated by a level-by-level
transfer over intermediate signatures, which aggregates patterns that share
a level instead of listing them one by one.

The coefficient ring is duck-typed: the parameter and the variable values may
be ``RationalFunction`` (symbolic) or ``int``/``Fraction`` (numeric).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .exactnum import Interval, RationalFunction, as_rf
from .sigcore import Signature, interlace

__all__ = [
    "LaurentSymPoly",
    "GeometricTail",
    "Specialization",
    "GTPattern",
    "GTGuardError",
    "branch_coeff",
    "skew_eval",
    "skew_poly",
    "skew_states",
    "gt_patterns",
    "hl_p",
    "hl_q",
    "hl_p_sym",
    "principal",
    "pochhammer",
    "cauchy",
    "expand_in_hl",
    "spec_eval_q",
    "spec_concat_q",
    "skew_q_tail",
    "GT_GUARD",
]

GT_GUARD = 10**6


class GTGuardError(RuntimeError):
    """Raised when a branching sum would visit more transitions than the guard allows."""


# ---------------------------------------------------------------------------
# symmetric Laurent polynomials


class LaurentSymPoly:
    """Sparse Laurent polynomial in ``nvars`` variables: exponent tuple -> coefficient."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {}
        for e, c in (terms or {}).items():
            if c:
                if len(e) != nvars:
                    raise ValueError("exponent length does not match nvars")
                self.terms[tuple(e)] = c

    @classmethod
    def one(cls, nvars: int) -> "LaurentSymPoly":
        return cls(nvars, {(0,) * nvars: 1})

    def copy(self) -> "LaurentSymPoly":
        out = LaurentSymPoly(self.nvars)
        out.terms = dict(self.terms)
        return out

    def __eq__(self, other):
        if not isinstance(other, LaurentSymPoly):
            return NotImplemented
        if self.nvars != other.nvars or self.terms.keys() != other.terms.keys():
            return False
        return all(as_rf(c) == as_rf(other.terms[e]) for e, c in self.terms.items())

    def __add__(self, other: "LaurentSymPoly"):
        out = self.copy()
        for e, c in other.terms.items():
            v = out.terms.get(e, 0) + c
            if v:
                out.terms[e] = v
            else:
                out.terms.pop(e, None)
        return out

    def __neg__(self):
        return LaurentSymPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentSymPoly):
            return LaurentSymPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        acc: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return LaurentSymPoly(self.nvars, acc)

    __rmul__ = __mul__

    def map_exponents(self, fn) -> "LaurentSymPoly":
        acc: dict = {}
        for e, c in self.terms.items():
            k = tuple(fn(e))
            acc[k] = acc.get(k, 0) + c
        return LaurentSymPoly(self.nvars, acc)

    def shifted(self, d: int) -> "LaurentSymPoly":
        """Multiply by (x_1 ... x_n)^d."""
        return self.map_exponents(lambda e: (a + d for a in e))

    def leading(self) -> tuple[int, ...]:
        return max(self.terms)

    def is_symmetric(self) -> bool:
        for e, c in self.terms.items():
            for perm in set(itertools.permutations(e)):
                other = self.terms.get(perm)
                if other is None or as_rf(other) != as_rf(c):
                    return False
        return True

    def evaluate(self, values: Sequence):
        if len(values) != self.nvars:
            raise ValueError("wrong number of values")
        values = [Fraction(v) if isinstance(v, int) else v for v in values]
        total = 0
        for e, c in self.terms.items():
            term = c
            for v, a in zip(values, e):
                if a:
                    term = term * v**a
            total = total + term
        return total

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [[list(e), as_rf(c).to_json()] for e, c in sorted(self.terms.items())],
        }

    def __repr__(self):
        return f"LaurentSymPoly({self.nvars}, {len(self.terms)} terms)"


# ---------------------------------------------------------------------------
# specializations


@dataclass(frozen=True)
class GeometricTail:
    """The infinite list first, first*ratio, first*ratio^2, ..."""

    first: object
    ratio: object

    def values(self, count: int) -> list:
        out, x = [], self.first
        for _ in range(count):
            out.append(x)
            x = x * self.ratio
        return out


@dataclass(frozen=True)
class Specialization:
    """A finite list of values plus any number of geometric tails."""

    finite: tuple = ()
    tails: tuple = ()

    @classmethod
    def of(cls, *values) -> "Specialization":
        return cls(tuple(values))

    @classmethod
    def geometric(cls, first, ratio, count: int | None = None) -> "Specialization":
        tail = GeometricTail(first, ratio)
        if count is None:
            return cls((), (tail,))
        return cls(tuple(tail.values(count)))

    def __or__(self, other: "Specialization") -> "Specialization":
        return Specialization(self.finite + other.finite, self.tails + other.tails)

    @property
    def is_finite(self) -> bool:
        return not self.tails


# ---------------------------------------------------------------------------
# branching coefficients


@lru_cache(maxsize=None)
def _one_minus_pow(param, m: int):
    return 1 - param**m


def _mults(sig: Sequence[int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for x in sig:
        out[x] = out.get(x, 0) + 1
    return out


def _psi(outer, inner, param):
    # product over values i with m_i(inner) = m_i(outer) + 1 of (1 - t^{m_i(inner)})
    mo, mi = _mults(outer), _mults(inner)
    c = 1
    for v, m in mi.items():
        if m == mo.get(v, 0) + 1:
            c = c * _one_minus_pow(param, m)
    return c


def _phi(outer, inner, param):
    # product over values i with m_i(outer) = m_i(inner) + 1 of (1 - t^{m_i(outer)})
    mo, mi = _mults(outer), _mults(inner)
    c = 1
    for v, m in mo.items():
        if m == mi.get(v, 0) + 1:
            c = c * _one_minus_pow(param, m)
    return c


def branch_coeff(kind: str, outer: Sequence[int], inner: Sequence[int], param):
    """psi_{outer/inner} for one P-branching step, or phi_{outer/inner} for one Q step."""
    if kind == "psi":
        if not interlace("P", inner, outer):
            raise ValueError(f"{inner} does not P-interlace {outer}")
        return _psi(tuple(outer), tuple(inner), param)
    if kind == "phi":
        if not interlace("Q", inner, outer):
            raise ValueError(f"{inner} does not Q-interlace {outer}")
        return _phi(tuple(outer), tuple(inner), param)
    raise ValueError(f"unknown coefficient kind {kind!r}")


# ---------------------------------------------------------------------------
# level-by-level transfer over Gelfand-Tsetlin patterns


def _next_levels(kind: str, kappa: tuple, outer: tuple, steps_left: int | None) -> Iterator[tuple]:
    """Signatures one branching step above ``kappa`` that can still reach ``outer``.

    ``steps_left`` is the number of steps remaining after this one; ``None``
    drops the reachability bound and only keeps the result inside ``outer``.
    """
    L = len(kappa)
    width = L + 1 if kind == "P" else L
    ranges = []
    for i in range(width):
        lo = kappa[i] if i < L else None
        hi = kappa[i - 1] if i >= 1 else None
        top = outer[i]
        hi = top if hi is None else min(hi, top)
        if steps_left is not None and i + steps_left < len(outer):
            bound = outer[i + steps_left]
            lo = bound if lo is None else max(lo, bound)
        if lo is None:
            # only possible for P when steps_left is None: unbounded below
            raise ValueError("open-ended P branching needs a reachability bound")
        if lo > hi:
            return
        ranges.append(range(hi, lo - 1, -1))
    for parts in itertools.product(*ranges):
        yield parts


def _coeff(kind: str, nxt, kappa, param):
    return _psi(nxt, kappa, param) if kind == "P" else _phi(nxt, kappa, param)


def _check_shapes(kind: str, outer, inner, k: int) -> None:
    if kind == "P":
        if len(outer) != len(inner) + k:
            raise ValueError("P branching needs len(outer) = len(inner) + #vars")
    elif kind == "Q":
        if len(outer) != len(inner):
            raise ValueError("Q branching needs equal lengths")
    else:
        raise ValueError(f"unknown kind {kind!r}")


def _numeric(x):
    return Fraction(x) if isinstance(x, int) else x


def skew_eval(kind: str, outer, inner, vars: Sequence | Specialization, param, guard: int = GT_GUARD):
    """Evaluate P_{outer/inner} or Q_{outer/inner} at finitely many values."""
    if isinstance(vars, Specialization):
        if vars.tails:
            raise ValueError("skew_eval takes finite specializations only")
        vars = vars.finite
    outer, inner = tuple(outer), tuple(inner)
    k = len(vars)
    _check_shapes(kind, outer, inner, k)
    if k == 0:
        return 1 if outer == inner else 0
    values = [_numeric(x) for x in vars]
    states = {inner: 1}
    visited = 0
    for j, x in enumerate(values):
        left = k - j - 1
        new: dict = {}
        for kappa, val in states.items():
            base = sum(kappa)
            for nxt in _next_levels(kind, kappa, outer, left):
                visited += 1
                if visited > guard:
                    raise GTGuardError(f"more than {guard} branching transitions")
                w = val * _coeff(kind, nxt, kappa, param)
                d = sum(nxt) - base
                if d:
                    w = w * x**d
                new[nxt] = new.get(nxt, 0) + w
        states = new
        if not states:
            return 0
    return states.get(outer, 0)


def skew_states(outer, inner, vars: Sequence, param, guard: int = GT_GUARD) -> dict:
    """Q-branching from ``inner`` over ``vars`` without requiring the end to be ``outer``.

    Returns {rho: Q_{rho/inner}(vars)} for every rho between inner and outer.
    """
    outer, inner = tuple(outer), tuple(inner)
    states = {inner: 1}
    visited = 0
    for x in (_numeric(v) for v in vars):
        new: dict = {}
        for kappa, val in states.items():
            base = sum(kappa)
            for nxt in _next_levels("Q", kappa, outer, None):
                visited += 1
                if visited > guard:
                    raise GTGuardError(f"more than {guard} branching transitions")
                w = val * _phi(nxt, kappa, param)
                d = sum(nxt) - base
                if d:
                    w = w * x**d
                new[nxt] = new.get(nxt, 0) + w
        states = new
    return states


def skew_poly(
    kind: str,
    outer,
    inner,
    k: int,
    param,
    var_map: Sequence[tuple[int, object]] | None = None,
    nvars: int | None = None,
    guard: int = GT_GUARD,
) -> LaurentSymPoly:
    """P_{outer/inner} or Q_{outer/inner} in ``k`` symbolic variables.

    ``var_map[j] = (i, c)`` substitutes c * x_i for the j-th branching variable;
    this is how P(x_1, x_1 t, ..., x_n, x_n t) is built without expanding in 2n
    variables.
    """
    outer, inner = tuple(outer), tuple(inner)
    _check_shapes(kind, outer, inner, k)
    if var_map is None:
        var_map = [(j, 1) for j in range(k)]
        nvars = k
    elif nvars is None:
        nvars = max(i for i, _ in var_map) + 1
    zero = (0,) * nvars
    states: dict = {inner: {zero: 1}}
    visited = 0
    for j in range(k):
        left = k - j - 1
        target, mult = var_map[j]
        new: dict = {}
        for kappa, poly in states.items():
            base = sum(kappa)
            for nxt in _next_levels(kind, kappa, outer, left):
                visited += 1
                if visited > guard:
                    raise GTGuardError(f"more than {guard} branching transitions")
                c = _coeff(kind, nxt, kappa, param)
                d = sum(nxt) - base
                if d and mult != 1:
                    c = c * mult**d
                bucket = new.setdefault(nxt, {})
                for e, v in poly.items():
                    if d:
                        e = e[:target] + (e[target] + d,) + e[target + 1 :]
                    bucket[e] = bucket.get(e, 0) + v * c
        states = new
    return LaurentSymPoly(nvars, states.get(outer, {}) if k else ({zero: 1} if outer == inner else {}))


@dataclass(frozen=True)
class GTPattern:
    """A chain of interlacing signatures, bottom first."""

    kind: str
    chain: tuple

    def coefficient(self, param):
        c = 1
        for a, b in zip(self.chain, self.chain[1:]):
            c = c * _coeff(self.kind, b, a, param)
        return c

    def weight(self) -> tuple[int, ...]:
        return tuple(sum(b) - sum(a) for a, b in zip(self.chain, self.chain[1:]))


def gt_patterns(kind: str, outer, inner, k: int, guard: int = GT_GUARD) -> Iterator[GTPattern]:
    """Depth-first listing of every Gelfand-Tsetlin pattern from inner to outer."""
    outer, inner = tuple(outer), tuple(inner)
    _check_shapes(kind, outer, inner, k)
    count = 0

    def rec(chain):
        nonlocal count
        level = len(chain) - 1
        if level == k:
            if chain[-1] == outer:
                count += 1
                if count > guard:
                    raise GTGuardError(f"more than {guard} patterns")
                yield GTPattern(kind, tuple(chain))
            return
        for nxt in _next_levels(kind, chain[-1], outer, k - level - 1):
            chain.append(nxt)
            yield from rec(chain)
            chain.pop()

    yield from rec([inner])


@lru_cache(maxsize=4096)
def hl_p(lam: tuple, param) -> LaurentSymPoly:
    """P_lambda(x_1..x_n; param) with n = len(lambda), via branching."""
    lam = tuple(lam)
    return skew_poly("P", lam, (), len(lam), param)


def hl_q(lam: tuple, k: int, param) -> LaurentSymPoly:
    """Q_{lambda/0[n]}(x_1..x_k; param) via branching, lambda with nonnegative parts."""
    lam = tuple(lam)
    return skew_poly("Q", lam, (0,) * len(lam), k, param)


# ---------------------------------------------------------------------------
# symmetrization formula (independent construction)


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _divide_by_difference(poly: dict, i: int, j: int) -> dict:
    """Exact quotient of ``poly`` by (x_i - x_j)."""
    # group by the exponent of x_i; h_{a-1} = g_a + x_j h_a from the top down
    groups: dict[int, dict] = {}
    for e, c in poly.items():
        rest = e[:i] + (0,) + e[i + 1 :]
        groups.setdefault(e[i], {})[rest] = c
    if not groups:
        return {}
    top = max(groups)
    low = min(groups)
    quotient: dict = {}
    h: dict = {}
    for a in range(top, low, -1):
        g = groups.get(a, {})
        nxt = dict(g)
        for e, c in h.items():
            e2 = e[:j] + (e[j] + 1,) + e[j + 1 :]
            nxt[e2] = nxt.get(e2, 0) + c
        h = {e: c for e, c in nxt.items() if c}
        for e, c in h.items():
            quotient[e[:i] + (a - 1,) + e[i + 1 :]] = c
    # remainder check: g_low + x_j h_low must vanish
    rem = dict(groups.get(low, {}))
    for e, c in h.items():
        e2 = e[:j] + (e[j] + 1,) + e[j + 1 :]
        rem[e2] = rem.get(e2, 0) + c
    if any(rem.values()):
        raise ArithmeticError("not divisible by x_i - x_j")
    return quotient


def _perm_sign(p: Sequence[int]) -> int:
    sign, seen = 1, set()
    for s in range(len(p)):
        if s in seen:
            continue
        length, x = 0, s
        while x not in seen:
            seen.add(x)
            x = p[x]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _v_factor(lam: Sequence[int], param):
    # V_lambda(t) = prod over values of [m]_t!, [m]_t! = prod_{k<=m} (1 + t + ... + t^{k-1})
    out = 1
    for m in _mults(lam).values():
        for k in range(2, m + 1):
            out = out * sum((param**i for i in range(k)), 0 * param)
    return out


def hl_p_sym(lam: Sequence[int], n: int, param) -> LaurentSymPoly:
    """P_lambda via the symmetrization formula over S_n."""
    lam = Signature(lam)
    if len(lam) != n:
        raise ValueError("len(lambda) must equal n")
    if n == 0:
        return LaurentSymPoly(0, {(): 1})
    d = min(min(lam), 0)
    base = tuple(x - d for x in lam)
    f = {base: 1}
    for i in range(n):
        for j in range(i + 1, n):
            ei = tuple(1 if k == i else 0 for k in range(n))
            ej = tuple(1 if k == j else 0 for k in range(n))
            f = _poly_mul(f, {ei: 1, ej: -param})
    anti: dict = {}
    for perm in itertools.permutations(range(n)):
        s = _perm_sign(perm)
        for e, c in f.items():
            e2 = [0] * n
            for i, a in enumerate(e):
                e2[perm[i]] = a
            e2 = tuple(e2)
            anti[e2] = anti.get(e2, 0) + s * c
    anti = {e: c for e, c in anti.items() if c}
    for i in range(n):
        for j in range(i + 1, n):
            anti = _divide_by_difference(anti, i, j)
    v = _v_factor(lam, param)
    terms = {tuple(a + d for a in e): c / v if not isinstance(c, int) else Fraction(c) / v for e, c in anti.items()}
    return LaurentSymPoly(n, terms)


# ---------------------------------------------------------------------------
# principal specializations


def pochhammer(a, q, m: int):
    """(a; q)_m = prod_{i<m} (1 - a q^i)."""
    out = 1
    x = a
    for _ in range(m):
        out = out * (1 - x)
        x = x * q
    return out


def principal(kind: str, lam: Sequence[int], x, J: int | None, param):
    """Closed forms for P_lambda(x, x t, ..., x t^{J-1}) and Q_{lambda/0[n]}(same).

    ``J=None`` means the infinite progression (Q only).
    """
    lam = Signature(lam)
    n = len(lam)
    x = _numeric(x)
    param = _numeric(param)
    if kind == "P":
        if J != n:
            raise ValueError("P principal specialization needs J = len(lambda)")
        denom = 1
        for m in _mults(lam).values():
            denom = denom * pochhammer(param, param, m)
        return x**lam.size * param**lam.weighted * pochhammer(param, param, n) / denom
    if kind == "Q":
        if n and lam[-1] < 0:
            return 0
        m0 = sum(1 for v in lam if v == 0)
        value = x**lam.size * param**lam.weighted
        if J is not None:
            if m0 + J - n < 0:
                return 0
            value = value * pochhammer(param, param, J) / pochhammer(param, param, m0 + J - n)
        return value
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# Cauchy kernel


def _at(x, t0):
    if isinstance(x, RationalFunction):
        return x.eval_at(t0)
    return Fraction(x)


def _pair_factor(param, a, b):
    ab = a * b
    if ab == 1:
        raise ZeroDivisionError("Cauchy kernel diverges: x_i y_j = 1")
    return (1 - param * ab) / (1 - ab)


def cauchy(spec_a: Specialization, spec_b: Specialization, param, mode: str = "exact", t0=None, tol=None):
    """Pi_param(spec_a; spec_b) = prod (1 - param x y)/(1 - x y).

    Exact mode accepts geometric tails whose ratio equals the parameter: that
    product telescopes to 1/(1 - x * first).  Numeric mode evaluates at ``t0``
    and returns an ``Interval`` of width at most ``2 * tol``.
    """
    if spec_a.tails and spec_b.tails:
        raise ValueError("at most one side may carry geometric tails")
    if spec_a.tails:
        spec_a, spec_b = spec_b, spec_a
    if mode == "exact":
        value = 1
        for a in spec_a.finite:
            for b in spec_b.finite:
                value = value * _pair_factor(param, _numeric(a), _numeric(b))
            for tail in spec_b.tails:
                if tail.ratio != param:
                    raise ValueError("exact Cauchy kernel needs tail ratio equal to the parameter")
                ab = _numeric(a) * tail.first
                if ab == 1:
                    raise ZeroDivisionError("Cauchy kernel diverges")
                value = value / (1 - ab)
        return value
    if mode != "numeric":
        raise ValueError(f"unknown mode {mode!r}")
    if t0 is None or tol is None:
        raise ValueError("numeric mode needs t0 and tol")
    t0, tol = Fraction(t0), Fraction(tol)
    tau = _at(param, t0)
    A = [_at(a, t0) for a in spec_a.finite]
    partial = Fraction(1)
    for a in A:
        for b in spec_b.finite:
            partial *= _pair_factor(tau, a, _at(b, t0))
    tails = [(_at(tl.first, t0), _at(tl.ratio, t0)) for tl in spec_b.tails]
    for _, r in tails:
        if abs(r) >= 1:
            raise ValueError("tail ratio must satisfy |ratio| < 1 at t0")
    if not tails or not A:
        return Interval(partial)
    N = 8
    while True:
        value = partial
        bound = Fraction(0)
        ok = True
        for a in A:
            for f, r in tails:
                z = a * f
                for j in range(N):
                    value *= _pair_factor(tau, z * r**j, 1)
                zN = abs(z) * abs(r) ** N
                if zN > Fraction(1, 2) or abs(tau) * zN > Fraction(1, 2):
                    ok = False
                bound += 2 * (1 + abs(tau)) * zN / (1 - abs(r))
        if ok and bound <= Fraction(1, 2):
            radius = 2 * bound * abs(value)
            if radius <= tol:
                return Interval.around(value, radius)
        N *= 2


# ---------------------------------------------------------------------------
# Q at geometric tails (numeric with a certified bound)


def skew_q_tail(outer, inner, tail: GeometricTail, param, t0, tol) -> Interval:
    """Q_{outer/inner}(tail; param) at t0, as an interval of half-width <= tol.

    Truncating after N values leaves sum_{rho != outer} Q_{rho/inner}(first N)
    Q_{outer/rho}(rest); every branching step contributes at most 2^n in
    coefficient size and at most C(d+n-1, n-1) strips of size d, which gives
    |Q_{outer/rho}(rest)| <= exp(L) - 1 with
    L = 2^{2n+1} n |first| |ratio|^N / (1 - |ratio|).
    """
    outer, inner = tuple(outer), tuple(inner)
    n = len(outer)
    if n != len(inner):
        raise ValueError("Q branching needs equal lengths")
    if outer == inner:
        return Interval(1)
    if any(o < i for o, i in zip(outer, inner)):
        return Interval(0)
    t0, tol = Fraction(t0), Fraction(tol)
    tau = _at(param, t0)
    f, r = _at(tail.first, t0), _at(tail.ratio, t0)
    if abs(r) >= 1 or abs(tau) > 1:
        raise ValueError("need |ratio| < 1 and |param| <= 1 at t0")
    N = 16
    while True:
        ys = [f * r**j for j in range(N)]
        states = skew_states(outer, inner, ys, tau)
        center = states.get(outer, Fraction(0))
        wN = abs(f) * abs(r) ** N
        L = 2 ** (2 * n + 1) * n * wN / (1 - abs(r))
        if wN <= Fraction(1, 2) and L <= Fraction(1, 2):
            rest = sum((abs(v) for rho, v in states.items() if rho != outer), Fraction(0))
            radius = rest * 2 * L
            if radius <= tol:
                return Interval.around(center, radius)
        N *= 2


def spec_eval_q(outer, inner, spec: Specialization, param, t0=None, tol=None):
    """Q_{outer/inner}(spec): exact for finite specs, an Interval when tails are present."""
    outer, inner = tuple(outer), tuple(inner)
    if spec.is_finite:
        return skew_eval("Q", outer, inner, spec.finite, param)
    pieces = [Specialization(spec.finite)] + [Specialization((), (tl,)) for tl in spec.tails]
    share = Fraction(tol) / (4 * max(1, len(pieces)))
    return _concat_many(outer, inner, pieces, param, t0, share)


def _between(inner, outer) -> Iterator[tuple]:
    ranges = [range(i, o + 1) for i, o in zip(inner, outer)]
    for parts in itertools.product(*ranges):
        if all(parts[i] >= parts[i + 1] for i in range(len(parts) - 1)):
            yield parts


def _concat_many(outer, inner, pieces, param, t0, tol):
    if len(pieces) == 1:
        p = pieces[0]
        if p.is_finite:
            v = skew_eval("Q", outer, inner, p.finite, param if t0 is None else _at(param, t0))
            return v if t0 is None else Interval(_at(v, t0) if isinstance(v, RationalFunction) else v)
        return skew_q_tail(outer, inner, p.tails[0], param, t0, tol)
    head, rest = pieces[0], pieces[1:]
    total = 0
    for kappa in _between(inner, outer):
        low = _concat_many(kappa, inner, [head], param, t0, tol)
        if (isinstance(low, Interval) and low.lo == low.hi == 0) or (not isinstance(low, Interval) and low == 0):
            continue
        high = _concat_many(outer, kappa, rest, param, t0, tol)
        total = total + low * high
    return total


def spec_concat_q(outer, inner, psi1: Specialization, psi2: Specialization, param, t0=None, tol=None):
    """sum over kappa of Q_{outer/kappa}(psi2) Q_{kappa/inner}(psi1)."""
    outer, inner = tuple(outer), tuple(inner)
    if len(outer) != len(inner):
        raise ValueError("Q branching needs equal lengths")
    if any(o < i for o, i in zip(outer, inner)):
        return 0
    numeric = not (psi1.is_finite and psi2.is_finite)
    if numeric and (t0 is None or tol is None):
        raise ValueError("geometric tails need t0 and tol")
    total = 0
    for kappa in _between(inner, outer):
        a = spec_eval_q(kappa, inner, psi1, param, t0, Fraction(tol) / 4 if numeric else None)
        if not numeric or isinstance(a, Interval) and (a.lo != 0 or a.hi != 0) or (not isinstance(a, Interval) and a != 0):
            b = spec_eval_q(outer, kappa, psi2, param, t0, Fraction(tol) / 4 if numeric else None)
            if numeric:
                a = a if isinstance(a, Interval) else Interval(_at(a, t0))
                b = b if isinstance(b, Interval) else Interval(_at(b, t0))
            total = total + a * b
    return total


# ---------------------------------------------------------------------------
# expansion in the P basis


def expand_in_hl(f: LaurentSymPoly, param) -> dict:
    """Coefficients c_lambda with f = sum c_lambda P_lambda(x; param)."""
    if not f.is_symmetric():
        raise ValueError("expand_in_hl needs a symmetric polynomial")
    rest = dict(f.terms)
    out: dict = {}
    while rest:
        lead = max(rest)
        lam = Signature(lead)
        c = rest[lead]
        out[lam] = c
        for e, v in hl_p(tuple(lam), param).terms.items():
            nv = rest.get(e, 0) - c * v
            if nv:
                rest[e] = nv
            else:
                rest.pop(e, None)
    return out
