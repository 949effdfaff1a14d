import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from padic_hl.exactnum import Interval, T
from padic_hl.hlpoly import (
    GeometricTail,
    LaurentSymPoly,
    Specialization,
    branch_coeff,
    cauchy,
    expand_in_hl,
    gt_patterns,
    hl_p,
    hl_p_sym,
    hl_q,
    pochhammer,
    principal,
    skew_eval,
    skew_poly,
    spec_concat_q,
)
from padic_hl.sigcore import enumerate_signatures

THIRD = Fraction(1, 3)


def _sigs(n, high, low=0):
    return [tuple(s) for s in enumerate_signatures(n, low, high)]


def _b(lam, param):
    """prod over nonzero part values of (param; param)_{m}, the Q/P rescaling."""
    out = 1
    for v in set(lam) - {0}:
        out = out * pochhammer(param, param, lam.count(v))
    return out


# --- examples ---------------------------------------------------------------


def test_hl_p_sym_examples():
    assert hl_p_sym((1, 0), 2, T) == LaurentSymPoly(2, {(1, 0): 1, (0, 1): 1})
    assert hl_p_sym((1, 1), 2, T) == LaurentSymPoly(2, {(1, 1): 1})
    assert hl_p_sym((2, 0), 2, T) == LaurentSymPoly(2, {(2, 0): 1, (0, 2): 1, (1, 1): 1 - T})


def test_branch_coeff_examples():
    # matches the x1 x2 coefficient of P_(2,0)
    assert branch_coeff("psi", (2, 0), (1,), T) == 1 - T
    assert branch_coeff("psi", (1, 0), (0,), T) == 1
    assert branch_coeff("phi", (2, 1), (2, 1), T) == 1


def test_skew_eval_examples():
    x = Fraction(5, 7)
    assert skew_eval("P", (2, 0), (1,), [x], T) == (1 - T) * x
    assert skew_eval("Q", (3, 1), (3, 1), [x], T) == 1
    assert skew_eval("P", (0, 0), (1,), [x], T) == 0


def test_skew_eval_matches_coefficient_extraction():
    # P_(2,0)(x1, x2) = sum_mu P_mu(x1) P_{(2,0)/mu}(x2)
    full = hl_p_sym((2, 0), 2, T)
    x1, x2 = Fraction(2), Fraction(3)
    split = sum(hl_p(mu, T).evaluate([x1]) * skew_eval("P", (2, 0), mu, [x2], T) for mu in [(0,), (1,), (2,)])
    assert full.evaluate([x1, x2]) == split


def test_principal_examples():
    assert principal("P", (0, 0), 1, 2, T) == 1
    assert principal("Q", (1, 1, 1), 1, 1, T) == 0
    assert principal("Q", (1, 0, 0), 1, 1, T) != 0
    for j in range(5):
        assert principal("Q", (j,), T, None, T) == T**j


def test_principal_infinite_q_is_limit_of_truncation():
    for j in range(4):
        closed = principal("Q", (j,), THIRD, None, THIRD)
        truncated = skew_eval("Q", (j,), (0,), [THIRD**i for i in range(1, 41)], THIRD)
        assert abs(closed - truncated) < Fraction(1, 10**12)


def test_cauchy_examples():
    assert cauchy(Specialization.of(T), Specialization.of(1), T**2) == 1 + T + T**2
    x, y = Fraction(1, 2), Fraction(1, 5)
    assert cauchy(Specialization.of(x), Specialization.of(y), T) == (1 - T * x * y) / (1 - x * y)


def test_cauchy_numeric_tail_matches_truncation():
    tol = Fraction(1, 10**12)
    spec = Specialization((), (GeometricTail(T, -T),))
    box = cauchy(Specialization.of(1), spec, -T, mode="numeric", t0=THIRD, tol=tol)
    assert isinstance(box, Interval) and box.hi - box.lo <= 2 * tol
    truncated = Fraction(1)
    for j in range(80):
        y = THIRD * (-THIRD) ** j
        truncated *= (1 + THIRD * y) / (1 - y)
    assert box.contains(truncated) or abs(box.mid - truncated) < tol


def test_cauchy_exact_tail_telescopes():
    spec = Specialization.geometric(T, T)
    assert cauchy(Specialization.of(1), spec, T) == 1 / (1 - T)


def test_expand_in_hl_examples():
    assert expand_in_hl(hl_p((2, 0), T), T) == {(2, 0): 1}
    x1x2 = LaurentSymPoly(2, {(1, 1): 1})
    s = LaurentSymPoly(2, {(1, 0): 1, (0, 1): 1})
    got = expand_in_hl(s * s, T)
    assert got == {(2, 0): 1, (1, 1): 1 + T}
    assert expand_in_hl(x1x2 * hl_p((1, 0), T), T) == {(2, 1): 1}


def test_expand_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        expand_in_hl(LaurentSymPoly(2, {(1, 0): 1}), T)


def test_spec_concat_examples():
    psi1 = Specialization.of(THIRD, Fraction(1, 7))
    assert spec_concat_q((2, 1), (0, 0), psi1, Specialization(), THIRD) == skew_eval("Q", (2, 1), (0, 0), psi1.finite, THIRD)
    assert spec_concat_q((2, 1), (2, 1), psi1, psi1, THIRD) == 1


def test_spec_concat_finite_is_concatenation():
    a, b = Specialization.of(Fraction(1, 2)), Specialization.of(Fraction(1, 3), Fraction(1, 5))
    for outer in [(2, 0), (2, 1), (3, 1)]:
        assert spec_concat_q(outer, (0, 0), a, b, T) == skew_eval("Q", outer, (0, 0), a.finite + b.finite, T)


def test_spec_concat_hermitian_tails_match_truncation():
    t = THIRD
    tails_plus = Specialization((), (GeometricTail(t, t),))
    tails_minus = Specialization((), (GeometricTail(-t, t),))
    interleaved = []
    for j in range(1, 31):
        interleaved += [t**j, -(t**j)]
    for outer, inner in [((2, 0), (0, 0)), ((2, 1), (1, 0)), ((3, 1), (1, 1))]:
        box = spec_concat_q(outer, inner, tails_plus, tails_minus, -t, t0=t, tol=Fraction(1, 10**11))
        direct = skew_eval("Q", outer, inner, interleaved, -t)
        assert abs(box.mid - direct) < Fraction(1, 10**10)


def test_gt_patterns_sum_to_polynomial():
    lam = (2, 1, 0)
    total = LaurentSymPoly(3)
    for pat in gt_patterns("P", lam, (), 3):
        total = total + LaurentSymPoly(3, {pat.weight(): pat.coefficient(T)})
    assert total == hl_p(lam, T)


# --- properties ---------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symmetrization_equals_branching(n):
    for lam in _sigs(n, 3):
        poly = hl_p_sym(lam, n, T)
        assert poly == skew_poly("P", lam, (), n, T)
        assert poly.is_symmetric()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_negative_parts_via_shift(n):
    for lam in _sigs(n, 1, low=-1):
        shifted = tuple(v + 1 for v in lam)
        assert hl_p(lam, T) == hl_p(shifted, T).shifted(-1)
        assert hl_p_sym(lam, n, T) == hl_p(lam, T)


@pytest.mark.parametrize("d", [-1, 1, 2])
def test_shift_identity_for_skew_p(d):
    k = 1
    for mu in _sigs(2, 2):
        for lam in _sigs(3, 2):
            base = skew_poly("P", lam, mu, k, T)
            moved = skew_poly("P", tuple(v + d for v in lam), tuple(v + d for v in mu), k, T)
            assert moved == base.shifted(d)


def test_inverting_variables_negates_signature():
    for lam in _sigs(2, 2, low=-1):
        neg = tuple(-v for v in reversed(lam))
        flipped = hl_p(lam, T).map_exponents(lambda e: tuple(-a for a in e))
        assert flipped == hl_p(neg, T)


def test_q_is_rescaled_p_for_straight_shapes():
    for n in (1, 2, 3):
        for lam in _sigs(n, 2):
            assert hl_q(lam, n, T) == LaurentSymPoly(n, {e: c * _b(lam, T) for e, c in hl_p(lam, T).terms.items()})


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_principal_p_equals_direct_evaluation(n):
    x = Fraction(3, 2)
    for lam in _sigs(n, 6):
        if sum(lam) > 6:
            continue
        assert hl_p(lam, T).evaluate([x * T**i for i in range(n)]) == principal("P", lam, x, n, T)


def test_skew_cauchy_identity_coefficients():
    for nu in _sigs(2, 2):
        for mu in _sigs(3, 2):
            for b in range(5):
                lhs = sum(
                    (
                        skew_eval("Q", k, mu, [1], T) * skew_eval("P", k, nu, [1], T)
                        for k in _sigs(3, max(mu[0], nu[0]) + b)
                        if sum(k) == sum(mu) + b
                    ),
                    0 * T,
                )
                rhs = 0 * T
                for j in range(b + 1):
                    for tau in _sigs(2, 2):
                        if sum(nu) - sum(tau) == b - j:
                            c = 1 if j == 0 else 1 - T
                            rhs += c * skew_eval("Q", nu, tau, [1], T) * skew_eval("P", mu, tau, [1], T)
                assert lhs == rhs


def test_expand_round_trip_on_random_products():
    rng = random.Random(5)
    pool = _sigs(2, 2)
    for _ in range(50):
        a, b = rng.choice(pool), rng.choice(pool)
        f = hl_p(a, T) * hl_p(b, T)
        table = expand_in_hl(f, T)
        rebuilt = LaurentSymPoly(2)
        for lam, c in table.items():
            rebuilt = rebuilt + LaurentSymPoly(2, {e: c * v for e, v in hl_p(tuple(lam), T).terms.items()})
        assert rebuilt == f


@given(st.lists(st.integers(0, 3), min_size=1, max_size=3), st.fractions(0, 1, max_denominator=9))
def test_p_is_symmetric_under_permuted_values(parts, t):
    lam = tuple(sorted(parts, reverse=True))
    n = len(lam)
    poly = hl_p(lam, t)
    vals = [Fraction(2), Fraction(-1, 3), Fraction(5, 4)][:n]
    ref = poly.evaluate(vals)
    for perm in itertools.permutations(vals):
        assert poly.evaluate(list(perm)) == ref
