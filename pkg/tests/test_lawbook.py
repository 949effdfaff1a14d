from fractions import Fraction

import pytest

from padic_hl import lawbook as lb
from padic_hl.exactnum import Interval, T, substitute
from padic_hl.heckecoeff import lr_coeff
from padic_hl.lawbook import LawSpec
from padic_hl.sigcore import enumerate_signatures

TS = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 5)]
THIRD = Fraction(1, 3)


def _sigs(n, high, low=0):
    return [tuple(s) for s in enumerate_signatures(n, low, high)]


def _prod(factors):
    out = 1
    for f in factors:
        out = out * f
    return out


# --- product process ------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3])
def test_pieri_probability(n):
    # exhaustive lattice counts at p = 3, n = 2 give 9/10 = 1/(1 + t^2): see the Hecke tests
    nu = (1,) + (0,) * (n - 1)
    want = (1 - T**2) / (1 - T ** (2 * n))
    assert lb.product_prob("alt", (1,) + (0,) * (2 * n - 1), nu, (2,) + (0,) * (n - 1), T) == want
    assert lb.product_prob("her", (1,) + (0,) * (n - 1), nu, (3,) + (0,) * (n - 1), T) == want


@pytest.mark.parametrize("nu", [(0,), (1, 0), (2, 1)])
@pytest.mark.parametrize("N", [0, 1, 2])
def test_constant_mu_is_deterministic(nu, N):
    n = len(nu)
    lam = tuple(v + 2 * N for v in nu)
    for case, mu in (("alt", (N,) * (2 * n)), ("her", (N,) * n)):
        support = lb.product_support(case, mu, nu)
        probs = {l: lb.product_prob(case, mu, nu, l, T) for l in support}
        assert {l: p for l, p in probs.items() if p} == {lam: 1}
        dist = lb.exact_distribution(LawSpec("product", case, mu=mu, nu=nu, t=THIRD), cutoff=6)
        assert dict(dist.atoms) == {lam: 1}


@pytest.mark.parametrize("case", ["alt", "her"])
def test_product_normalization(case):
    for n in (1, 2):
        for nu in _sigs(n, 2):
            for mu in _sigs(2 * n if case == "alt" else n, 2):
                support = lb.product_support(case, mu, nu)
                assert sum(lb.product_prob(case, mu, nu, l, T) for l in support) == 1


@pytest.mark.parametrize("r", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2])
def test_alt_row_coefficient_reduces_to_standard(r, n):
    mu_alt = (r,) + (0,) * (2 * n - 1)
    mu_std = (r,) + (0,) * (n - 1)
    for nu in _sigs(n, 2):
        size = sum(nu) + r
        for kappa in enumerate_signatures(n, 0, size, size=size):
            alt = lr_coeff("alt", mu_alt, nu, kappa)
            std = substitute(lr_coeff("std", mu_std, nu, kappa), "t^2")
            assert alt == (1 + T) * std


# --- corners ----------------------------------------------------------------------


def test_corner_examples():
    d = 1 + T**2
    assert lb.corner_prob("alt_odd_to_even", (0,), (0,), T) == 1 / (1 + T + T**2)
    assert lb.corner_prob("alt_odd_to_even", (0,), (3,), T) == (1 - T**2) * T**3 / (1 + T + T**2)
    assert lb.corner_prob("her", (0, 0), (0,), T) == (1 - T) / d
    assert lb.corner_prob("her", (0, 0), (2,), T) == (1 - T**2) * T**2 / d
    assert lb.corner_prob("her", (3, 0), (0,), T) == 1 / d
    assert lb.corner_prob("her", (3, 0), (2,), T) == (1 - T**2) * T**2 / d
    assert lb.corner_prob("her", (3, 0), (3,), T) == T**4 / d
    assert lb.corner_prob("her", (3, 0), (1,), T) == 0
    assert lb.corner_prob("her", (3, 0), (5,), T) == 0


@pytest.mark.parametrize("t", TS)
def test_corner_normalization(t):
    for case, lengths in (("alt_odd_to_even", (1, 2)), ("alt_even_to_odd", (1, 2)), ("her", (1, 2, 3))):
        for n in lengths:
            for given in _sigs(n, 2):
                dist = lb.exact_distribution(LawSpec("corner", case, given=given, t=t), cutoff=4)
                assert dist.total() == 1, (case, given)


@pytest.mark.parametrize("t", TS)
def test_her_corner_values_are_probabilities(t):
    for n in (2, 3):
        for given in _sigs(n, 2):
            for target in lb.corner_support("her", given, 5):
                assert 0 <= lb.corner_prob("her", given, target, t) <= 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_zero_given_corner_is_invertible_corner(n):
    for kappa in _sigs(n - 1, 3):
        assert lb.corner_prob("her", (0,) * n, kappa, T) == lb.corner_invertible_prob("her", n - 1, n, kappa, T)


def test_exact_distribution_her_corner_tail():
    dist = lb.exact_distribution(LawSpec("corner", "her", given=(0, 0), t=THIRD), cutoff=6)
    t = THIRD
    assert dist.tail_mass == t**7 * (1 - t**2) / ((1 + t**2) * (1 - t))
    assert dist.prob((0,)) == (1 - t) / (1 + t**2)
    assert dist.total() == 1


# --- Haar laws ------------------------------------------------------------------


def test_haar_examples():
    for j in range(5):
        assert lb.haar_sn_prob("her", 1, (j,), T) == T**j * (1 - T)
    for n in (1, 2, 3):
        assert lb.haar_sn_prob("her", n, (0,) * n, T) == _prod(1 + (-T) ** i for i in range(1, n + 1))
    assert lb.haar_sn_prob("alt_even", 2, (0, 0), T) == (1 - T) * (1 - T**3)


@pytest.mark.parametrize("case", ["alt_even", "alt_odd", "her"])
def test_haar_closed_form_equals_process_form(case):
    for n in (1, 2, 3):
        for lam in _sigs(n, 2):
            closed = lb.haar_sn_prob(case, n, lam, T)
            assert lb.haar_sn_prob(case, n, lam, T, form="hl_exact") == closed
    for lam in [(0, 0), (1, 0), (2, 1)]:
        box = lb.haar_sn_prob(case, 2, lam, THIRD, form="hl_numeric", tol=Fraction(1, 10**12))
        assert isinstance(box, Interval)
        assert abs(box.mid - lb.haar_sn_prob(case, 2, lam, THIRD)) < Fraction(1, 10**11)


@pytest.mark.parametrize("case", ["alt_even", "alt_odd", "her"])
@pytest.mark.parametrize("t", TS)
def test_haar_totals(case, t):
    for n in (1, 2, 3):
        assert lb.haar_total(case, n, t) == 1
        dist = lb.exact_distribution(LawSpec("haar", case, n=n, t=t), cutoff=5)
        assert dist.total() == 1


def test_invertible_probabilities():
    assert lb.invertible_prob("alt", 2, 2) == Fraction(1, 2)
    assert lb.invertible_prob("alt", 4, 2) == Fraction(7, 16)
    assert lb.invertible_prob("her", 2, 3) == Fraction(20, 27)
    for n in (1, 2, 3):
        assert lb.invertible_prob("her", n, 3) == lb.haar_sn_prob("her", n, (0,) * n, THIRD)
        assert lb.invertible_prob("alt", 2 * n, 3) == lb.haar_sn_prob("alt_even", n, (0,) * n, THIRD)


# --- invertible corners ------------------------------------------------------------


@pytest.mark.parametrize("case", ["alt_even", "alt_odd", "her"])
@pytest.mark.parametrize("t", TS)
def test_corner_invertible_totals(case, t):
    for n in (1, 2):
        for m in (n + 1, n + 2, n + 4):
            assert lb.corner_invertible_total(case, n, m, t) == 1


def test_corner_invertible_small_case():
    t = THIRD
    zero = lb.corner_invertible_prob("her", 1, 2, (0,), t)
    rest = sum(lb.corner_invertible_prob("her", 1, 2, (j,), t) for j in range(1, 60))
    assert abs(zero + rest - 1) < Fraction(1, 10**20)
    one = lb.corner_invertible_prob("her", 1, 2, (1,), t)
    assert 0 < one < 1


@pytest.mark.parametrize("case", ["alt_even", "alt_odd", "her"])
def test_corner_invertible_converges_to_haar(case):
    for n in (1, 2):
        for lam in _sigs(n, 4):
            if sum(lam) > 4:
                continue
            gap = lb.corner_invertible_prob(case, n, n + 40, lam, THIRD) - lb.haar_sn_prob(case, n, lam, THIRD)
            assert abs(gap) < Fraction(1, 10**8)


# --- joint laws ----------------------------------------------------------------------


def test_single_level_alt_chain():
    assert lb.joint_weight("corners", "alt", [(0,)], THIRD) == lb.haar_sn_prob("alt_even", 1, (0,), THIRD)


@pytest.mark.parametrize("case", ["alt", "her"])
def test_joint_routes_agree(case):
    t = THIRD
    if case == "her":
        chains = [[(a,), b] for b in _sigs(2, 2) for a in range(4)]
        chains += [[(a,), b, c] for c in [(1, 0, 0), (2, 1, 0)] for b in _sigs(2, 2) for a in range(3)]
    else:
        chains = [[(a,), (b,), c] for c in _sigs(2, 2) for b in range(3) for a in range(4)]
    for chain in chains:
        steps = lb.joint_weight("corners", case, chain, t, "steps")
        process = lb.joint_weight("corners", case, chain, t, "process")
        assert steps == process, chain
    for lam in _sigs(2 if case == "her" else 1, 2):
        for lam1 in _sigs(len(lam), 3):
            steps = lb.joint_weight("product", case, [lam, lam1], t, "steps")
            assert steps == lb.joint_weight("product", case, [lam, lam1], t, "process")


@pytest.mark.parametrize("case", ["alt", "her"])
def test_skew_q_routes_agree(case):
    for inner, outer in [((0,), (1,)), ((0,), (2,)), ((1, 0), (2, 1)), ((1, 0), (3, 0)), ((0, 0), (2, 2))]:
        exact = lb.skew_q_infinite(case, outer, inner, THIRD)
        box = lb.skew_q_infinite(case, outer, inner, THIRD, route="truncated", tol=Fraction(1, 10**10))
        assert abs(box.mid - exact) < Fraction(1, 10**9)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        lb.haar_sn_prob("her", 2, (1,), THIRD)
    with pytest.raises(ValueError):
        lb.corner_invertible_prob("her", 2, 2, (0, 0), THIRD)
    with pytest.raises(ValueError):
        lb.joint_weight("corners", "her", [(0, 0)], THIRD)
    assert lb.parse_t("t") == T and lb.parse_t("1/3") == THIRD
