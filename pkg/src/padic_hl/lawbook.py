"""Exact singular-number laws for alternating and Hermitian p-adic matrices.

Every law takes the Hall-Littlewood parameter ``t`` either as an exact
rational (``Fraction``) or symbolically (``T`` from ``exactnum``, or any
``RationalFunction`` of it).  With ``t = 1/q`` the values are probabilities.

Case names:

* product / joint product: ``alt`` (2n x 2n alternating), ``her`` (n x n Hermitian)
* corner transitions: ``alt_odd_to_even`` (2n+1 -> 2n), ``alt_even_to_odd``
  (2n -> 2n-1), ``her`` (n -> n-1)
* Haar and corners of invertible matrices: ``alt_even`` (size 2n),
  ``alt_odd`` (size 2n+1), ``her`` (size n); ``n`` is the signature length.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .exactnum import Interval, RationalFunction, T, as_rf
from .heckecoeff import lr_coeff, lr_table
from .hlpoly import (
    GeometricTail,
    Specialization,
    cauchy,
    pochhammer,
    principal,
    skew_eval,
    skew_q_tail,
)
from .sigcore import Signature, enumerate_signatures

__all__ = [
    "LawSpec",
    "ExactDistribution",
    "NegativeMassError",
    "parse_t",
    "invertible_prob",
    "product_prob",
    "product_support",
    "corner_prob",
    "corner_support",
    "haar_sn_prob",
    "haar_total",
    "corner_invertible_prob",
    "corner_invertible_total",
    "skew_q_infinite",
    "matrix_haar_prob",
    "joint_weight",
    "exact_distribution",
]


class NegativeMassError(ArithmeticError):
    """A total that must be a probability came out negative or above one."""


def parse_t(value):
    if isinstance(value, (Fraction, RationalFunction)):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        if value.strip() in ("t", "T"):
            return T
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a parameter")


def _ev(c, t):
    """Evaluate a coefficient (RationalFunction in the symbol) at the parameter t."""
    c = as_rf(c)
    if isinstance(t, RationalFunction):
        return c if t == T else c.compose(t)
    return c.eval_at(t)


def _one(t):
    return as_rf(1) if isinstance(t, RationalFunction) else Fraction(1)


def _geom(first, ratio, count: int) -> tuple:
    out, x = [], first
    for _ in range(count):
        out.append(x)
        x = x * ratio
    return tuple(out)


def _finite_cauchy(xs, ys, param):
    return cauchy(Specialization(tuple(xs)), Specialization(tuple(ys)), param)


def _telescoped(xs, tails, param):
    return cauchy(Specialization(tuple(xs)), Specialization((), tuple(tails)), param)


# ---------------------------------------------------------------------------
# invertibility


def invertible_prob(case: str, size: int, q) -> Fraction:
    """Probability that a Haar alternating / Hermitian matrix of this size is invertible."""
    if size < 1:
        raise ValueError("size must be >= 1")
    q = Fraction(q) if not isinstance(q, RationalFunction) else q
    out = 1
    if case == "alt":
        if size % 2:
            return 0 * q
        for j in range(1, size // 2 + 1):
            out = out * (1 - 1 / q ** (2 * j - 1))
        return out
    if case == "her":
        for j in range(1, size + 1):
            out = out * (1 + 1 / (-q) ** j)
        return out
    raise ValueError(f"unknown case {case!r}")


# ---------------------------------------------------------------------------
# product process


def _product_dims(case: str, mu, nu, lam) -> int:
    n = len(nu)
    if len(lam) != n:
        raise ValueError("len(lambda) must equal len(nu)")
    if case == "alt":
        if len(mu) != 2 * n:
            raise ValueError("alt product needs len(mu) = 2 len(nu)")
    elif case == "her":
        if len(mu) != n:
            raise ValueError("her product needs len(mu) = len(nu)")
    else:
        raise ValueError(f"unknown case {case!r}")
    return n


def product_prob(case: str, mu, nu, lam, t):
    """P(SN(B^T A B) = lambda) for invariant A with SN nu and B Haar in K pi_mu K."""
    mu, nu, lam = Signature(mu), Signature(nu), Signature(lam)
    n = _product_dims(case, mu, nu, lam)
    t = parse_t(t)
    c = lr_coeff(case, mu, nu, lam)
    if c.is_zero():
        return 0 * _one(t)
    if case == "alt":
        tau = t**2
        num = _ev(c, t) * principal("P", lam, 1, n, tau)
        den = principal("P", mu, 1, 2 * n, t) * principal("P", nu, 1, n, tau)
    else:
        tau = -t
        num = _ev(c, t) * principal("P", lam, 1, n, tau)
        den = principal("P", mu, 1, n, t**2) * principal("P", nu, 1, n, tau)
    return num / den


def product_support(case: str, mu, nu) -> list[Signature]:
    """Every lambda that can carry product-process mass, from degree and part bounds."""
    mu, nu = Signature(mu), Signature(nu)
    n = len(nu)
    if case == "alt":
        size = mu.size + nu.size
        hi = (mu[0] + mu[1] if len(mu) >= 2 else 0) + (nu[0] if n else 0)
        lo = (mu[-1] + mu[-2] if len(mu) >= 2 else 0) + (nu[-1] if n else 0)
    else:
        size = 2 * mu.size + nu.size
        hi = 2 * (mu[0] if mu else 0) + (nu[0] if n else 0)
        lo = 2 * (mu[-1] if mu else 0) + (nu[-1] if n else 0)
    return list(enumerate_signatures(n, lo, hi, size=size, guard=10**6))


# ---------------------------------------------------------------------------
# corner transitions


def corner_support(case: str, given, cutoff: int) -> Iterator[Signature]:
    """Targets of a corner step with first part <= cutoff (other parts are bounded by ``given``)."""
    g = Signature(given)
    if case == "alt_odd_to_even":
        n = len(g)
        if n == 0:
            yield Signature(())
            return
        rest = [range(g[i], g[i - 1] + 1) for i in range(1, n)]
        for first in range(g[0], cutoff + 1):
            for tail in itertools.product(*rest):
                parts = (first,) + tail
                if all(parts[i] >= parts[i + 1] for i in range(n - 1)):
                    yield Signature(parts)
    elif case == "alt_even_to_odd":
        n = len(g)
        ranges = [range(g[i + 1], g[i] + 1) for i in range(n - 1)]
        for parts in itertools.product(*ranges):
            if all(parts[i] >= parts[i + 1] for i in range(len(parts) - 1)):
                yield Signature(parts)
    elif case == "her":
        n = len(g)
        if n == 1:
            yield Signature(())
            return
        rest = [range(g[i + 1], g[i - 1] + 1) for i in range(1, n - 1)]
        for first in range(g[1], cutoff + 1):
            for tail in itertools.product(*rest):
                parts = (first,) + tail
                if all(parts[i] >= parts[i + 1] for i in range(len(parts) - 1)):
                    yield Signature(parts)
    else:
        raise ValueError(f"unknown corner case {case!r}")


def _her_kappas(lam, nu) -> Iterator[tuple]:
    k = len(nu)
    ranges = []
    for i in range(k):
        lo = max(lam[i + 1], nu[i + 1] if i + 1 < k else lam[i + 1])
        hi = min(lam[i], nu[i])
        if lo > hi:
            return
        ranges.append(range(lo, hi + 1))
    for parts in itertools.product(*ranges):
        if all(parts[i] >= parts[i + 1] for i in range(k - 1)):
            yield parts


def corner_prob(case: str, given, target, t, check: bool = True):
    """Law of the singular numbers of the top-left corner one size down."""
    g, x = Signature(given), Signature(target)
    t = parse_t(t)
    one = _one(t)
    if case == "alt_odd_to_even":
        nu, lam = g, x
        n = len(nu)
        if len(lam) != n:
            raise ValueError("alt_odd_to_even maps Sig_n to Sig_n")
        tau = t**2
        q = skew_eval("Q", lam, nu, (t,), tau)
        if not q:
            return 0 * one
        num = q * principal("P", lam, 1, n, tau)
        den = principal("P", nu, 1, n, tau) * _finite_cauchy((t,), _geom(one, tau, n), tau)
        return num / den
    if case == "alt_even_to_odd":
        lam, nu = g, x
        n = len(lam)
        if len(nu) != n - 1:
            raise ValueError("alt_even_to_odd maps Sig_n to Sig_{n-1}")
        tau = t**2
        p = skew_eval("P", lam, nu, (one,), tau)
        if not p:
            return 0 * one
        return p * principal("P", nu, tau, n - 1, tau) / principal("P", lam, 1, n, tau)
    if case == "her":
        lam, nu = g, x
        n = len(lam)
        if len(nu) != n - 1:
            raise ValueError("her corner maps Sig_n to Sig_{n-1}")
        tau = -t
        total = 0 * one
        for kappa in _her_kappas(lam, nu):
            a = skew_eval("P", lam, kappa, (one,), tau)
            if a:
                total = total + a * skew_eval("Q", nu, kappa, (-one,), tau)
        if not total:
            return total
        ys = tuple(-(tau**j) for j in range(1, n))
        value = (
            total
            * principal("P", nu, tau, n - 1, tau)
            / (principal("P", lam, 1, n, tau) * _finite_cauchy((one,), ys, tau))
        )
        if check and not isinstance(value, RationalFunction) and not (0 <= value <= 1):
            raise NegativeMassError(f"Hermitian corner total {value} outside [0, 1]")
        return value
    raise ValueError(f"unknown corner case {case!r}")


# ---------------------------------------------------------------------------
# Haar singular-number laws


_HAAR_CASES = ("alt_even", "alt_odd", "her")


def _haar_rate(case: str, t, i: int):
    """Per-index exponent base: the closed forms are C * prod rate_i^{lambda_i} / denominators."""
    if case == "alt_even":
        return t ** (4 * i - 3)
    if case == "alt_odd":
        return t ** (4 * i - 1)
    if case == "her":
        return t ** (2 * i - 1)
    raise ValueError(f"unknown Haar case {case!r}")


def _haar_const(case: str, n: int, t):
    if case == "alt_even":
        return pochhammer(t, t, 2 * n)
    if case == "alt_odd":
        return pochhammer(t**2, t, 2 * n)
    return pochhammer(t**2, t**2, n)


def _haar_block(case: str, m: int, t):
    if case == "her":
        return pochhammer(-t, -t, m)
    return pochhammer(t**2, t**2, m)


def haar_sn_prob(case: str, n: int, lam, t, form: str = "closed", tol=None):
    """Law of SN for a matrix with i.i.d. Haar entries (subject to the symmetry)."""
    lam = Signature(lam)
    if len(lam) != n:
        raise ValueError("len(lambda) must be n")
    t = parse_t(t)
    if n and lam[-1] < 0:
        return 0 * _one(t)
    if form == "closed":
        value = _haar_const(case, n, t)
        for i, part in enumerate(lam, start=1):
            value = value * _haar_rate(case, t, i) ** part
        for m in lam.mults().values():
            value = value / _haar_block(case, m, t)
        return value
    if form not in ("hl_exact", "hl_numeric"):
        raise ValueError(f"unknown form {form!r}")
    one = _one(t)
    if case == "alt_even":
        tau, first = t**2, t
    elif case == "alt_odd":
        tau, first = t**2, t**3
    elif case == "her":
        tau, first = -t, t
    else:
        raise ValueError(f"unknown Haar case {case!r}")
    p = principal("P", lam, 1, n, tau)
    xs = _geom(one, tau, n)
    tail = GeometricTail(first, tau)
    if form == "hl_exact":
        return p * principal("Q", lam, first, None, tau) / _telescoped(xs, (tail,), tau)
    if isinstance(t, RationalFunction):
        raise ValueError("hl_numeric needs a numeric t")
    tol = Fraction(tol if tol is not None else Fraction(1, 10**12))
    q = skew_q_tail(lam, (0,) * n, tail, tau, t, tol / 4)
    pi = cauchy(Specialization(xs), Specialization((), (tail,)), tau, mode="numeric", t0=t, tol=tol / 4)
    return Interval(p) * q / pi


def _pattern_total(n: int, rate: Callable[[int], object], block_weight: Callable[[tuple, bool], object], one):
    """Exact sum over all lambda in Sig_n^+ of prod rate(i)^{lambda_i} * block_weight.

    lambda is split into blocks of equal parts with multiplicities (m_1..m_k)
    and values v_1 > ... > v_k >= 0.  With S_l the product of the rates of the
    first l blocks, summing the geometric series in the gaps gives
    prod_{l<k} S_l / (1 - S_l) times 1 / (1 - S_k) when v_k may be 0.  The
    weight may depend on whether the last block sits at zero, so the two
    cases are kept apart.
    """
    total = 0 * one
    for k in range(1, n + 1):
        for cuts in itertools.combinations(range(1, n), k - 1):
            bounds = (0,) + cuts + (n,)
            ms = tuple(bounds[j + 1] - bounds[j] for j in range(k))
            S, idx, prods = one, 1, []
            for m in ms:
                for _ in range(m):
                    S = S * rate(idx)
                    idx += 1
                prods.append(S)
            gaps = one
            for s in prods[:-1]:
                gaps = gaps * s / (1 - s)
            last = prods[-1]
            # last block at zero: no factor from its gap; above zero: last/(1-last)
            total = total + gaps * block_weight(ms, True)
            total = total + gaps * last / (1 - last) * block_weight(ms, False)
    if n == 0:
        total = block_weight((), False)
    return total


def haar_total(case: str, n: int, t):
    """Exact total mass of the closed-form Haar law over all of Sig_n^+ (equals 1)."""
    t = parse_t(t)
    one = _one(t)
    const = _haar_const(case, n, t)

    def weight(ms, _zero):
        w = const
        for m in ms:
            w = w / _haar_block(case, m, t)
        return w

    return _pattern_total(n, lambda i: _haar_rate(case, t, i), weight, one)


# ---------------------------------------------------------------------------
# corners of invertible matrices


def _ci_params(case: str, n: int, m: int, t):
    if m <= n:
        raise ValueError("need m > n")
    if case == "alt_even":
        return t**2, t, m - n
    if case == "alt_odd":
        return t**2, t**3, m - n - 1
    if case == "her":
        return -t, t, m - n
    raise ValueError(f"unknown case {case!r}")


def corner_invertible_prob(case: str, n: int, m: int, lam, t):
    """SN law of the top-left corner of a Haar element of the invertible symmetric class.

    alt_even: 2n corner of size 2m; alt_odd: 2n+1 corner of size 2m; her: n corner of size m.
    """
    lam = Signature(lam)
    if len(lam) != n:
        raise ValueError("len(lambda) must be n")
    t = parse_t(t)
    tau, first, J = _ci_params(case, n, m, t)
    one = _one(t)
    if n and lam[-1] < 0:
        return 0 * one
    xs = _geom(one, tau, n)
    ys = _geom(first, tau, J)
    q = principal("Q", lam, first, J, tau)
    if not q:
        return 0 * one
    return principal("P", lam, 1, n, tau) * q / _finite_cauchy(xs, ys, tau)


def corner_invertible_total(case: str, n: int, m: int, t):
    """Exact total mass of corner_invertible_prob over Sig_n^+, by the block-pattern sum."""
    t = parse_t(t)
    tau, first, J = _ci_params(case, n, m, t)
    one = _one(t)
    xs = _geom(one, tau, n)
    pi = _finite_cauchy(xs, _geom(first, tau, J), tau)
    base = pochhammer(tau, tau, n) * pochhammer(tau, tau, J) / pi

    def rate(i):
        return first * tau ** (2 * (i - 1))

    def weight(ms, zero_last):
        w = base
        for mm in ms:
            w = w / pochhammer(tau, tau, mm)
        m0 = ms[-1] if (zero_last and ms) else 0
        if m0 + J - n < 0:
            return 0 * one
        return w / pochhammer(tau, tau, m0 + J - n)

    return _pattern_total(n, rate, weight, one)


# ---------------------------------------------------------------------------
# matrix-Haar law for the multiplying matrices, and skew Q at infinite lists


def matrix_haar_prob(case: str, mu, t):
    """SN law of a square matrix with i.i.d. Haar entries (no symmetry).

    ``alt``: 2n x 2n over the base ring (parameter t); ``her``: n x n over the
    quadratic extension (parameter t^2).  This is the law of SN(B) in the
    joint product process.
    """
    mu = Signature(mu)
    t = parse_t(t)
    tau = t if case == "alt" else t**2
    one = _one(t)
    k = len(mu)
    if k and mu[-1] < 0:
        return 0 * one
    tail = GeometricTail(tau, tau)
    return (
        principal("P", mu, 1, k, tau)
        * principal("Q", mu, tau, None, tau)
        / _telescoped(_geom(one, tau, k), (tail,), tau)
    )


def skew_q_infinite(case: str, outer, inner, t, route: str = "coproduct", tol=None):
    """Q_{outer/inner} at the infinite list used by the product process.

    alt: Q_{outer/inner}(t, t^2, t^3, ...; t^2)
    her: Q_{outer/inner}(t, -t, t^2, -t^2, ...; -t)

    ``coproduct`` is exact: it expands the skew function through the
    alternating / Hermitian coefficients and principal Q values.
    ``truncated`` evaluates the branching sum over two geometric tails with a
    certified error bound and returns an Interval.
    """
    outer, inner = Signature(outer), Signature(inner)
    n = len(inner)
    t = parse_t(t)
    one = _one(t)
    d = outer.size - inner.size
    if route == "coproduct":
        if case == "alt":
            mus = enumerate_signatures(2 * n, 0, max(d, 0), size=d, guard=10**6) if d >= 0 else []
            total = 0 * one
            for mu in mus:
                c = lr_coeff("alt", mu, inner, outer)
                if c:
                    total = total + _ev(c, t) * principal("Q", mu, t, None, t)
            return total
        if case == "her":
            if d < 0 or d % 2:
                return 0 * one
            total = 0 * one
            for mu in enumerate_signatures(n, 0, d // 2, size=d // 2, guard=10**6):
                c = lr_coeff("her", mu, inner, outer)
                if c:
                    total = total + _ev(c, t) * principal("Q", mu, t**2, None, t**2)
            return total
        raise ValueError(f"unknown case {case!r}")
    if route != "truncated":
        raise ValueError(f"unknown route {route!r}")
    if isinstance(t, RationalFunction):
        raise ValueError("truncated route needs a numeric t")
    from .hlpoly import spec_concat_q

    tol = Fraction(tol if tol is not None else Fraction(1, 10**10))
    if case == "alt":
        tau = t**2
        a, b = GeometricTail(t, tau), GeometricTail(tau, tau)
    elif case == "her":
        tau = -t
        a, b = GeometricTail(t, tau), GeometricTail(-t, tau)
    else:
        raise ValueError(f"unknown case {case!r}")
    return spec_concat_q(outer, inner, Specialization((), (a,)), Specialization((), (b,)), tau, t0=t, tol=tol)


# ---------------------------------------------------------------------------
# joint laws


def _process_norm(a_vals, b_vals, tail, tau):
    """Partition function of the corners process P(a_1) Q(b_1) P(a_2) Q(b_2) ... Q(tail).

    By the skew Cauchy identity each P-side value a_i pairs with every Q-side
    value b_j at or above its level: Z = prod_{i <= j} Pi(a_i; b_j).
    """
    z = 1
    for i, a in enumerate(a_vals):
        for b in b_vals[i:]:
            z = z * _finite_cauchy((a,), (b,), tau)
        z = z * _telescoped((a,), (tail,), tau)
    return z


def _joint_corners_alt_process(chain, t):
    n = (len(chain) + 1) // 2
    tau = t**2
    one = _one(t)
    lams = chain[0::2]
    nus = chain[1::2]
    value = skew_eval("P", lams[0], (), (tau ** (n - 1),), tau)
    for k in range(1, n):
        nu = nus[k - 1]
        a = skew_eval("Q", lams[k - 1], nu, (t ** (2 * k + 1 - 2 * n),), tau)
        if not a:
            return 0 * one
        b = skew_eval("P", lams[k], nu, (tau ** (n - k - 1),), tau)
        value = value * a * b
    if not value:
        return 0 * one
    value = value * principal("Q", lams[-1], t, None, tau)
    a_vals = [tau ** (n - k) for k in range(1, n + 1)]
    b_vals = [t ** (2 * k + 1 - 2 * n) for k in range(1, n)]
    return value / _process_norm(a_vals, b_vals, GeometricTail(t, tau), tau)


def _joint_corners_her_process(chain, t):
    n = len(chain)
    tau = -t
    one = _one(t)
    head = skew_eval("P", chain[0], (), (tau ** (n - 1),), tau)
    if not head:
        return 0 * one
    # the chain is fixed, so the sum over hidden nu^(i) in Sig_i^+ factorizes by level
    value = head
    for i in range(1, n):
        lam_i, lam_next = chain[i - 1], chain[i]
        level = 0 * one
        ranges = [range(max(lam_i[j + 1] if j + 1 < i else 0, 0), lam_i[j] + 1) for j in range(i)]
        for nu in itertools.product(*ranges):
            if any(nu[j] < nu[j + 1] for j in range(i - 1)):
                continue
            a = skew_eval("Q", lam_i, nu, (-(tau ** (i + 1 - n)),), tau)
            if a:
                level = level + a * skew_eval("P", lam_next, nu, (tau ** (n - i - 1),), tau)
        value = value * level
        if not value:
            return value
    if not value:
        return value
    value = value * principal("Q", chain[-1], t, None, tau)
    a_vals = [tau ** (n - k) for k in range(1, n + 1)]
    b_vals = [-(tau ** (k + 1 - n)) for k in range(1, n)]
    return value / _process_norm(a_vals, b_vals, GeometricTail(t, tau), tau)


def _check_corner_chain(case: str, chain) -> None:
    lens = [len(c) for c in chain]
    if case == "alt":
        want = [(j + 2) // 2 for j in range(len(chain))]
        if len(chain) % 2 == 0 or lens != want:
            raise ValueError("alt corners chain is (lambda2, nu3, lambda4, ..., lambda2n) with lengths 1,1,2,2,...,n")
    elif case == "her":
        if lens != list(range(1, len(chain) + 1)):
            raise ValueError("her corners chain is (lambda1, ..., lambdan) with lengths 1..n")
    else:
        raise ValueError(f"unknown case {case!r}")


def _joint_product_process(case: str, chain, t):
    lam0 = chain[0]
    n = len(lam0)
    one = _one(t)
    if case == "alt":
        tau, first = t**2, t
        b_tails = (GeometricTail(t, tau), GeometricTail(tau, tau))
    else:
        tau, first = -t, t
        b_tails = (GeometricTail(t, tau), GeometricTail(-t, tau))
    xs = _geom(one, tau, n)
    value = principal("Q", lam0, first, None, tau)
    for a, b in zip(chain, chain[1:]):
        if not value:
            return value
        value = value * skew_q_infinite(case, b, a, t)
    value = value * principal("P", chain[-1], 1, n, tau)
    pi_a = _telescoped(xs, (GeometricTail(first, tau),), tau)
    pi_b = _telescoped(xs, b_tails, tau)
    return value / (pi_a * pi_b ** (len(chain) - 1))


def _joint_product_steps(case: str, chain, t):
    lam0 = chain[0]
    n = len(lam0)
    one = _one(t)
    haar = "alt_even" if case == "alt" else "her"
    value = haar_sn_prob(haar, n, lam0, t)
    for a, b in zip(chain, chain[1:]):
        d = Signature(b).size - Signature(a).size
        step = 0 * one
        if case == "alt":
            mus = enumerate_signatures(2 * n, 0, d, size=d, guard=10**6) if d >= 0 else []
        else:
            mus = enumerate_signatures(n, 0, d // 2, size=d // 2, guard=10**6) if d >= 0 and d % 2 == 0 else []
        for mu in mus:
            p = product_prob(case, mu, a, b, t)
            if p:
                step = step + matrix_haar_prob(case, mu, t) * p
        value = value * step
        if not value:
            return value
    return value


def joint_weight(family: str, case: str, chain: Sequence, t, route: str = "steps"):
    """Joint law of singular numbers along a corners chain or a product chain.

    corners/alt: chain (lambda2, nu3, lambda4, ..., lambda2n) of a Haar 2n x 2n alternating matrix.
    corners/her: chain (lambda1, ..., lambdan) of a Haar n x n Hermitian matrix.
    product: chain (lambda, lambda1, ..., lambdak) for A, B1^* A B1, ...

    ``steps`` multiplies the Haar law at the start by one-step transition
    laws; ``process`` evaluates the Hall-Littlewood process formula directly.
    """
    chain = [Signature(c) for c in chain]
    t = parse_t(t)
    one = _one(t)
    if family == "corners":
        _check_corner_chain(case, chain)
        if route == "process":
            if case == "alt":
                return _joint_corners_alt_process(chain, t)
            return _joint_corners_her_process(chain, t)
        if route != "steps":
            raise ValueError(f"unknown route {route!r}")
        if case == "alt":
            n = (len(chain) + 1) // 2
            value = haar_sn_prob("alt_even", n, chain[-1], t)
            for j in range(len(chain) - 1, 0, -1):
                upper, lower = chain[j], chain[j - 1]
                step = "alt_even_to_odd" if j % 2 == 0 else "alt_odd_to_even"
                if not value:
                    return value
                value = value * corner_prob(step, upper, lower, t)
            return value
        n = len(chain)
        value = haar_sn_prob("her", n, chain[-1], t)
        for j in range(n - 1, 0, -1):
            if not value:
                return value
            value = value * corner_prob("her", chain[j], chain[j - 1], t)
        return value
    if family == "product":
        if any(len(c) != len(chain[0]) for c in chain):
            raise ValueError("product chain signatures must share one length")
        if case not in ("alt", "her"):
            raise ValueError(f"unknown case {case!r}")
        if route == "process":
            return _joint_product_process(case, chain, t)
        if route != "steps":
            raise ValueError(f"unknown route {route!r}")
        return _joint_product_steps(case, chain, t)
    raise ValueError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# distributions


@dataclass
class LawSpec:
    family: str
    case: str
    n: int | None = None
    m: int | None = None
    given: Signature | None = None
    mu: Signature | None = None
    nu: Signature | None = None
    t: object = None

    def __post_init__(self):
        for name in ("given", "mu", "nu"):
            v = getattr(self, name)
            if v is not None:
                setattr(self, name, Signature(v))
        if self.t is not None:
            self.t = parse_t(self.t)


@dataclass
class ExactDistribution:
    atoms: dict
    tail_mass: object
    cutoff: int
    meta: dict = field(default_factory=dict)

    def prob(self, lam) -> object:
        return self.atoms.get(Signature(lam), 0)

    def total(self):
        return sum(self.atoms.values(), 0) + self.tail_mass

    def to_json(self) -> dict:
        def fmt(x):
            if isinstance(x, RationalFunction):
                return x.format("t")
            return str(Fraction(x))

        return {
            "atoms": [[lam.to_json(), fmt(p)] for lam, p in sorted(self.atoms.items(), reverse=True)],
            "tail": fmt(self.tail_mass),
            "cutoff": self.cutoff,
        }


def _geometric_tail(weight: Callable[[int], object], start: int):
    """Sum of weight(k) for k >= start, given weight is geometric from start on."""
    w0, w1, w2 = weight(start), weight(start + 1), weight(start + 2)
    if not w0:
        if w1 or w2:
            raise ArithmeticError("tail is not geometric")
        return w0
    r = w1 / w0
    if w2 != w1 * r:
        raise ArithmeticError("tail is not geometric past the cutoff")
    return w0 / (1 - r)


def exact_distribution(spec: LawSpec, cutoff: int) -> ExactDistribution:
    """All atoms with parts <= cutoff, plus the exact mass beyond it."""
    t = spec.t
    if t is None:
        raise ValueError("LawSpec.t must be set")
    one = _one(t)
    atoms: dict = {}
    if spec.family == "product":
        for lam in product_support(spec.case, spec.mu, spec.nu):
            p = product_prob(spec.case, spec.mu, spec.nu, lam, t)
            if p:
                atoms[lam] = p
        tail = one - sum(atoms.values(), 0 * one)
        if tail != 0:
            raise NegativeMassError(f"product law does not sum to one: defect {tail}")
        return ExactDistribution(atoms, tail, cutoff)
    if spec.family in ("haar", "corner_invertible"):
        n = spec.n
        for lam in enumerate_signatures(n, 0, cutoff, guard=10**6):
            if spec.family == "haar":
                p = haar_sn_prob(spec.case, n, lam, t)
            else:
                p = corner_invertible_prob(spec.case, n, spec.m, lam, t)
            if p:
                atoms[lam] = p
        tail = one - sum(atoms.values(), 0 * one)
    elif spec.family == "corner":
        g = spec.given
        if g and cutoff < g[0]:
            raise ValueError("cutoff must be at least the largest conditioning part")
        for lam in corner_support(spec.case, g, cutoff):
            p = corner_prob(spec.case, g, lam, t)
            if p:
                atoms[lam] = p
        tail = 0 * one
        if spec.case in ("alt_odd_to_even", "her") and (len(g) if spec.case != "her" else len(g) - 1) > 0:
            # first part is unbounded; every other part ranges over a finite box
            width = len(g) if spec.case == "alt_odd_to_even" else len(g) - 1
            if spec.case == "alt_odd_to_even":
                rest_ranges = [range(g[i], g[i - 1] + 1) for i in range(1, width)]
            else:
                rest_ranges = [range(g[i + 1], g[i - 1] + 1) for i in range(1, width)]
            for rest in itertools.product(*rest_ranges):
                if any(rest[i] < rest[i + 1] for i in range(len(rest) - 1)):
                    continue

                def w(first, rest=rest):
                    return corner_prob(spec.case, g, (first,) + rest, t)

                tail = tail + _geometric_tail(w, cutoff + 1)
    else:
        raise ValueError(f"exact_distribution does not cover family {spec.family!r}")
    if not isinstance(tail, RationalFunction) and tail < 0:
        raise NegativeMassError(f"negative tail mass {tail}")
    return ExactDistribution(atoms, tail, cutoff)
