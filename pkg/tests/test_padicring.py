import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import chi2

from padic_hl.kernels import draw_limit, get_backend, init_states
from padic_hl.padicring import (
    BaseElem,
    ExtElem,
    NonUnitError,
    RingCfg,
    SplitMix64,
    Valuation,
    involution_ops,
    ring_arith,
    sample,
    smallest_nonresidue,
    stream_seed,
    valuation,
)

CFG = RingCfg(3, 8)
residues = st.integers(0, CFG.modulus - 1)
ext_elems = st.builds(lambda a, b: ExtElem(a, b, CFG), residues, residues)


def test_config_validation():
    assert CFG.d == 2 and CFG.modulus == 3**8 and CFG.q == 3
    assert smallest_nonresidue(7) == 3
    with pytest.raises(ValueError):
        RingCfg(2, 4)
    with pytest.raises(ValueError):
        RingCfg(9, 2)
    with pytest.raises(ValueError):
        RingCfg(3, 30)
    with pytest.raises(ValueError):
        RingCfg(5, 2, d=4)


def test_ring_arith_examples():
    s = ExtElem(0, 1, CFG)
    assert ring_arith("mul", 1 + s, 1 - s) == ExtElem(1 - CFG.d, 0, CFG)
    with pytest.raises(NonUnitError):
        ring_arith("inv", BaseElem(3, CFG))
    small = RingCfg(3, 2, d=2)
    x = ExtElem(1, 1, small)
    y = ring_arith("inv", x)
    # brute-force linear solve over Z/9 for (1+s)(a+bs) = 1
    sols = [(a, b) for a in range(9) for b in range(9) if ((a + 2 * b) % 9, (a + b) % 9) == (1, 0)]
    assert sols == [(y.a, y.b)]
    assert x * y == ExtElem(1, 0, small)


def test_valuation_examples():
    cfg = RingCfg(3, 5)
    assert valuation(BaseElem(9, cfg)) == Valuation(2, True)
    assert valuation(BaseElem(0, cfg)).v == 5 and not valuation(BaseElem(0, cfg)).exact
    assert valuation(BaseElem(3 * (1 + 3**4), cfg)) == Valuation(1, True)
    assert valuation(ExtElem(9, 3, cfg)).v == 1


def test_involution_examples():
    s = ExtElem(0, 1, CFG)
    ops = involution_ops(s)
    assert ops.conj == ExtElem(0, -1, CFG)
    assert ops.trace == BaseElem(0, CFG)
    assert ops.norm == BaseElem(-CFG.d, CFG)
    real = ExtElem(5, 0, CFG)
    assert involution_ops(real).conj == real
    u = ExtElem(2, 1, CFG)
    assert valuation(involution_ops(ExtElem(3, 0, CFG) * u).norm).v % 2 == 0


@given(ext_elems, ext_elems)
def test_norm_is_multiplicative(x, y):
    assert (x * y).norm() == x.norm() * y.norm()


@given(ext_elems)
def test_trace_argument(x):
    # v(tr x) and v(tr(s x)) cannot both exceed v(x) when p is odd
    v = valuation(x).v
    if v >= CFG.K:
        return
    s = ExtElem(0, 1, CFG)
    assert min(valuation(x.trace()).v, valuation((s * x).trace()).v) <= v


@given(residues, residues)
def test_valuation_is_additive(a, b):
    va, vb = valuation(BaseElem(a, CFG)), valuation(BaseElem(b, CFG))
    if va.exact and vb.exact and va.v + vb.v < CFG.K:
        assert valuation(BaseElem(a * b, CFG)).v == va.v + vb.v


@given(ext_elems)
def test_units_invert(x):
    if x.norm().x % CFG.p == 0:
        with pytest.raises(NonUnitError):
            x.inv()
    else:
        assert x * x.inv() == ExtElem(1, 0, CFG)


def test_sampled_valuations_are_geometric():
    rng = SplitMix64(1)
    N, p = 100000, CFG.p
    counts = np.zeros(CFG.K + 1, int)
    for _ in range(N):
        counts[valuation(sample("base", CFG, rng)).v] += 1
    for j in range(4):
        prob = p**-j * (1 - 1 / p)
        sigma = math.sqrt(N * prob * (1 - prob))
        assert abs(counts[j] - N * prob) < 4 * sigma


def test_ext_components_are_independent_uniform():
    rng = SplitMix64(2)
    N, p = 45000, CFG.p
    table = np.zeros((p, p), int)
    for _ in range(N):
        x = sample("ext", CFG, rng)
        table[x.a % p, x.b % p] += 1
    expected = N / p**2
    stat = ((table - expected) ** 2 / expected).sum()
    assert chi2.sf(stat, p * p - 1) > 1e-4


def test_unit_conditioned_never_divisible_by_p():
    rng = SplitMix64(3)
    assert all(sample("base_unit_conditioned", CFG, rng).x % 3 for _ in range(5000))


def test_streams_are_deterministic_and_distinct():
    a = [SplitMix64(7, 0).next64() for _ in range(2)]
    assert a[0] == a[1]
    firsts = {SplitMix64(7, k).next64() for k in range(1000)}
    assert len(firsts) == 1000
    assert stream_seed(7, 0) != stream_seed(8, 0)


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_batch_draws_match_scalar_generator(backend):
    kern = get_backend(backend)
    M = CFG.modulus
    states = init_states(5, 100, 64)
    batch = kern.draw(states, M, draw_limit(M), 3)
    for i in range(64):
        rng = SplitMix64(5, 100 + i)
        assert [rng.below(M) for _ in range(3)] == list(batch[i])
        assert int(states[i]) == rng.state


def test_rejection_threshold_is_exact():
    assert draw_limit(1 << 10) == 0
    m = 3**8
    assert int(draw_limit(m)) == ((1 << 64) // m) * m
