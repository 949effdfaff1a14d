from fractions import Fraction

import pytest

from padic_hl import lawbook as lb
from padic_hl import veristat as vs
from padic_hl.padicring import RingCfg
from padic_hl.sigcore import Signature

CFG = RingCfg(3, 8)
CUT = CFG.K - 4
T3 = Fraction(1, 3)


def _law(**kw):
    return lb.exact_distribution(lb.LawSpec(**kw), CUT)


# --- histogram and comparison mechanics --------------------------------------------


def test_histogram_must_add_up():
    with pytest.raises(ValueError):
        vs.Histogram({Signature((0,)): 3}, 0, 5, 1, CUT)
    h = vs.Histogram({Signature((0,)): 3}, 1, 5, 1, CUT)
    assert h.to_json()["total"] == 5


def test_empty_histogram_is_degenerate():
    ref = _law(family="haar", case="her", n=1, t=T3)
    with pytest.raises(vs.DegenerateHistogramError):
        vs.compare(vs.Histogram({}, 0, 0, 0, CUT), ref)


def test_cutoff_mismatch_is_rejected():
    ref = lb.exact_distribution(lb.LawSpec(family="haar", case="her", n=1, t=T3), CUT + 1)
    with pytest.raises(ValueError):
        vs.compare(vs.Histogram({Signature((0,)): 1}, 0, 1, 0, CUT), ref)


def test_mass_on_impossible_cell_fails():
    ref = _law(family="product", case="her", mu=(1, 0), nu=(0, 0), t=T3)
    h = vs.Histogram({Signature((3, 0)): 10, Signature((2, 0)): 90}, 0, 100, 0, CUT)
    rep = vs.compare(h, ref)
    assert rep.p_value == 0.0 and not rep.passed


def test_calibration_pass_rate():
    ref = _law(family="haar", case="her", n=2, t=T3)
    passes = sum(vs.compare(vs.sample_from_law(ref, 20000, seed), ref).passed for seed in range(100))
    # nominal rate is 0.999 at the default threshold
    assert passes >= 97


def test_wrong_law_is_rejected():
    h = vs.run_experiment(lb.LawSpec(family="haar", case="her", n=2), 20000, 1, cfg=CFG)
    good = vs.compare(h, _law(family="haar", case="her", n=2, t=T3))
    bad = vs.compare(h, _law(family="haar", case="her", n=2, t=Fraction(1, 9)))
    assert good.passed and not bad.passed
    assert bad.tv_distance > good.tv_distance


def test_discard_cap_is_enforced():
    ref = _law(family="haar", case="her", n=1, t=T3)
    h = vs.sample_from_law(ref, 10000, 3)
    n0 = h.counts[Signature((0,))]
    moved = vs.Histogram({**h.counts, Signature((0,)): n0 - 500}, 500, h.total, h.tail_bin, CUT)
    rep = vs.compare(moved, ref, discard_cap=1e-2)
    assert rep.discard_fraction == 0.05 and not rep.passed


# --- experiments -------------------------------------------------------------------


def test_hermitian_one_by_one_is_geometric():
    h = vs.run_experiment(lb.LawSpec(family="haar", case="her", n=1), 30000, 5, cfg=CFG)
    rep = vs.compare(h, _law(family="haar", case="her", n=1, t=T3))
    assert rep.passed
    # P(v = k) = (1 - 1/p) p^{-k}
    assert abs(h.counts[Signature((0,))] / h.total - 2 / 3) < 0.012


def test_constant_product_is_a_single_atom():
    h = vs.run_experiment(lb.LawSpec(family="product", case="alt", mu=(1, 1), nu=(0,)), 2000, 6, cfg=CFG)
    # B is p times a unit, so every singular number moves up by 2
    assert h.counts == {Signature((2,)): 2000}


def test_corner_of_unit_hermitian_form():
    h = vs.run_experiment(lb.LawSpec(family="corner", case="her", given=(0, 0)), 20000, 7, cfg=CFG)
    assert vs.compare(h, _law(family="corner", case="her", given=(0, 0), t=T3)).passed


def test_precision_must_cover_cutoff():
    with pytest.raises(ValueError):
        vs.run_experiment(lb.LawSpec(family="haar", case="her", n=1), 10, 0, cfg=CFG, cutoff=5)


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_workers_do_not_change_results(backend):
    spec = lb.LawSpec(family="haar", case="alt_even", n=2)
    a = vs.run_experiment(spec, 9000, 9, 1, cfg=CFG, backend=backend)
    b = vs.run_experiment(spec, 9000, 9, 3, cfg=CFG, backend=backend)
    assert (a.counts, a.tail_bin, a.discarded) == (b.counts, b.tail_bin, b.discarded)


def test_backends_give_identical_histograms():
    spec = lb.LawSpec(family="product", case="her", mu=(1, 0), nu=(1, 0))
    a = vs.run_experiment(spec, 5000, 10, cfg=CFG, backend="numpy")
    b = vs.run_experiment(spec, 5000, 10, cfg=CFG, backend="numba")
    assert a.counts == b.counts


# --- exhaustive oracles ------------------------------------------------------------


@pytest.mark.parametrize("case,size,q", [("alt", 2, 3), ("alt", 4, 3), ("alt", 3, 3), ("her", 1, 3), ("her", 2, 3), ("her", 2, 5)])
def test_invertible_fraction_matches_closed_form(case, size, q):
    assert vs.brute_force("invertible_fraction", case=case, size=size, q=q) == lb.invertible_prob(case, size, q)


def test_residue_distribution_examples():
    assert vs.brute_force("residue_distribution", case="alt", size=2, q=3) == {0: Fraction(2, 3), 2: Fraction(1, 3)}
    assert vs.brute_force("residue_distribution", case="her", size=1, q=3) == {0: Fraction(2, 3), 1: Fraction(1, 3)}
    law = vs.brute_force("residue_distribution", case="alt", size=3, q=3)
    assert set(law) <= {1, 3} and sum(law.values()) == 1


def test_coset_count_examples():
    assert vs.brute_force("coset_count", mu=(1, 0), n=2, p=2) == 3
    assert vs.brute_force("coset_count", mu=(1, 0), p=3) == 4
    assert vs.brute_force("coset_count", mu=(1, 0, 0), p=3) == 13
    with pytest.raises(ValueError):
        vs.brute_force("coset_count", mu=(1, 0), n=3)
    with pytest.raises(ValueError):
        vs.brute_force("no_such_oracle")


def test_product_transition_matches_law():
    got = vs.brute_force("product_transition", case="her", mu=(1, 0), nu=(0, 0), p=3)
    for lam, pr in got.items():
        assert pr == lb.product_prob("her", (1, 0), (0, 0), lam, T3)
    assert sum(got.values()) == 1
