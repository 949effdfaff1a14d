"""Monte Carlo experiments, goodness-of-fit comparison, and exhaustive oracles.

Every sample index i draws from its own SplitMix64 stream keyed by (seed, i),
and chunk boundaries are fixed multiples of ``CHUNK``.  Histograms therefore do
not depend on the number of worker threads.

A sample whose elimination reaches a block that vanishes mod p^K is censored:
its remaining singular numbers are at least K.  Censored samples are counted
in ``Histogram.discarded``.  Because K exceeds the cutoff, they are also known
to lie beyond the cutoff, so :func:`compare` counts them in the tail cell.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import chi2

from . import randmat as rm
from .kernels import get_backend, init_states
from .lawbook import ExactDistribution, LawSpec
from .padicring import RingCfg
from .sigcore import Signature

__all__ = [
    "Histogram",
    "ComparisonReport",
    "DegenerateHistogramError",
    "run_experiment",
    "compare",
    "sample_from_law",
    "brute_force",
    "invertible_fraction",
    "coset_count",
    "residue_distribution",
    "product_transition",
    "CHUNK",
    "DEFAULT_P_THRESHOLD",
    "DEFAULT_DISCARD_CAP",
]

CHUNK = 4096
DEFAULT_P_THRESHOLD = 1e-3
DEFAULT_DISCARD_CAP = 1e-2
MIN_EXPECTED = 5.0
BRUTE_FORCE_LIMIT = 10**7


class DegenerateHistogramError(ValueError):
    """The comparison has no usable cells."""


@dataclass
class Histogram:
    counts: dict
    discarded: int
    total: int
    tail_bin: int
    cutoff: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if sum(self.counts.values()) + self.tail_bin + self.discarded != self.total:
            raise ValueError("histogram counts do not add up to the total")

    def to_json(self) -> dict:
        return {
            "counts": [[lam.to_json(), c] for lam, c in sorted(self.counts.items(), reverse=True)],
            "discarded": self.discarded,
            "tail_bin": self.tail_bin,
            "total": self.total,
            "cutoff": self.cutoff,
            **({"meta": self.meta} if self.meta else {}),
        }


@dataclass
class ComparisonReport:
    tv_distance: Fraction
    chi_square: float
    dof: int
    p_value: float
    passed: bool
    discard_fraction: float
    p_threshold: float
    discard_cap: float
    cells: list = field(default_factory=list)

    @property
    def pass_(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        return {
            "tv_distance": float(self.tv_distance),
            "tv_distance_exact": str(self.tv_distance),
            "chi_square": self.chi_square,
            "dof": self.dof,
            "p_value": self.p_value,
            "pass": self.passed,
            "discard_fraction": self.discard_fraction,
            "p_threshold": self.p_threshold,
            "discard_cap": self.discard_cap,
        }


# ---------------------------------------------------------------------------
# experiments


def _experiment(spec: LawSpec, cfg: RingCfg, states: np.ndarray, kern):
    """Draw one chunk of matrices for ``spec`` and return (parts, censored)."""
    fam, case = spec.family, spec.case
    if fam == "haar":
        if case == "her":
            return rm.batch_sn("her", rm.batch_haar_her(spec.n, cfg, states, kern), cfg, kern)
        if case in ("alt_even", "alt_odd"):
            N = 2 * spec.n + (case == "alt_odd")
            return rm.batch_sn("alt", rm.batch_haar_alt(N, cfg, states, kern), cfg, kern)
    elif fam == "corner":
        g = spec.given
        n = len(g)
        if case == "her":
            re, im = rm.batch_invariant("her", g, n, cfg, states, kern)
            k = n - 1
            return rm.batch_sn("her", (re[:, :k, :k], im[:, :k, :k]), cfg, kern)
        if case == "alt_odd_to_even":
            A = rm.batch_invariant("alt", g, 2 * n + 1, cfg, states, kern)
            return rm.batch_sn("alt", A[:, : 2 * n, : 2 * n], cfg, kern)
        if case == "alt_even_to_odd":
            A = rm.batch_invariant("alt", g, 2 * n, cfg, states, kern)
            return rm.batch_sn("alt", A[:, : 2 * n - 1, : 2 * n - 1], cfg, kern)
    elif fam == "corner_invertible":
        n, m = spec.n, spec.m
        if case == "her":
            re, im = rm.batch_haar_invertible("her", m, cfg, states, kern)
            return rm.batch_sn("her", (re[:, :n, :n], im[:, :n, :n]), cfg, kern)
        if case in ("alt_even", "alt_odd"):
            k = 2 * n + (case == "alt_odd")
            A, _ = rm.batch_haar_invertible("alt", 2 * m, cfg, states, kern)
            return rm.batch_sn("alt", A[:, :k, :k], cfg, kern)
    elif fam == "product":
        mu, nu = spec.mu, spec.nu
        if case == "her":
            A = rm.batch_invariant("her", nu, len(nu), cfg, states, kern)
            Bm = rm.batch_double_coset("her", mu, cfg, states, kern)
            return rm.batch_sn("her", rm.batch_sandwich("her", A, Bm, cfg, kern), cfg, kern)
        if case == "alt":
            A = rm.batch_invariant("alt", nu, 2 * len(nu), cfg, states, kern)
            Bm, _ = rm.batch_double_coset("alt", mu, cfg, states, kern)
            return rm.batch_sn("alt", rm.batch_sandwich("alt", A, Bm, cfg, kern), cfg, kern)
    raise ValueError(f"no matrix experiment for family={fam!r} case={case!r}")


def _chunk_job(spec, cfg, seed, start, count, backend):
    kern = get_backend(backend)
    states = init_states(seed, start, count)
    return _experiment(spec, cfg, states, kern)


def default_threads() -> int:
    return int(os.environ.get("PADIC_HL_THREADS", "1"))


def run_experiment(
    spec: LawSpec,
    samples: int,
    seed: int,
    workers: int | None = None,
    *,
    cfg: RingCfg | None = None,
    cutoff: int | None = None,
    backend: str | None = None,
) -> Histogram:
    """Sample ``samples`` matrices for ``spec`` and histogram their singular numbers."""
    cfg = cfg or RingCfg(3, 8)
    cutoff = cfg.K - 4 if cutoff is None else cutoff
    if cfg.K < cutoff + 4:
        raise ValueError(f"precision K={cfg.K} must be at least cutoff + 4 = {cutoff + 4}")
    workers = workers or default_threads()
    if samples < 0:
        raise ValueError("samples must be nonnegative")
    backend = backend or get_backend().NAME
    starts = list(range(0, samples, CHUNK))
    jobs = [(s, min(CHUNK, samples - s)) for s in starts]
    if workers == 1:
        results = [_chunk_job(spec, cfg, seed, s, c, backend) for s, c in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda j: _chunk_job(spec, cfg, seed, j[0], j[1], backend), jobs))
    counts: dict = {}
    discarded = tail = 0
    for parts, cens in results:
        discarded += int(cens.sum())
        good = parts[~cens]
        if good.shape[0] == 0:
            continue
        over = good[:, 0] > cutoff if good.shape[1] else np.zeros(good.shape[0], bool)
        tail += int(over.sum())
        rows, cnt = np.unique(good[~over], axis=0, return_counts=True)
        for row, c in zip(rows, cnt):
            key = Signature(tuple(int(x) for x in row))
            counts[key] = counts.get(key, 0) + int(c)
    meta = {"p": cfg.p, "K": cfg.K, "seed": seed, "family": spec.family, "case": spec.case}
    return Histogram(counts, discarded, samples, tail, cutoff, meta)


# ---------------------------------------------------------------------------
# comparison


def _as_fraction(x) -> Fraction:
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    raise TypeError("comparison needs a numeric law (set t to a number)")


def compare(
    h: Histogram,
    ref: ExactDistribution,
    p_threshold: float = DEFAULT_P_THRESHOLD,
    discard_cap: float = DEFAULT_DISCARD_CAP,
) -> ComparisonReport:
    """Pearson chi-square and total variation of a histogram against an exact law."""
    if h.total == 0:
        raise DegenerateHistogramError("empty histogram")
    if ref.cutoff != h.cutoff:
        raise ValueError(f"cutoffs differ: law {ref.cutoff}, histogram {h.cutoff}")
    N = h.total
    probs = {lam: _as_fraction(p) for lam, p in ref.atoms.items()}
    tail_p = _as_fraction(ref.tail_mass)
    tail_obs = h.tail_bin + h.discarded
    cells = []
    impossible = 0
    tv = Fraction(0)
    for lam in set(probs) | set(h.counts):
        p = probs.get(lam, Fraction(0))
        obs = h.counts.get(lam, 0)
        tv += abs(Fraction(obs, N) - p)
        if p == 0:
            impossible += obs
            continue
        if p * N >= MIN_EXPECTED:
            cells.append((lam, obs, p))
        else:
            tail_p += p
            tail_obs += obs
    tv += abs(Fraction(h.tail_bin + h.discarded, N) - _as_fraction(ref.tail_mass))
    tv /= 2
    if tail_p > 0:
        cells.append(("tail", tail_obs, tail_p))
    elif tail_obs:
        impossible += tail_obs
    if len(cells) < 2 and not impossible:
        raise DegenerateHistogramError("fewer than two cells with enough expected mass")
    if impossible:
        stat, pval = float("inf"), 0.0
    else:
        stat = sum((obs - float(p) * N) ** 2 / (float(p) * N) for _, obs, p in cells)
        pval = float(chi2.sf(stat, len(cells) - 1))
    discard_fraction = h.discarded / N
    passed = pval > p_threshold and discard_fraction < discard_cap
    report_cells = [
        {"cell": c if c == "tail" else Signature(c).to_json(), "observed": o, "expected": float(p) * N}
        for c, o, p in cells
    ]
    return ComparisonReport(tv, stat, max(len(cells) - 1, 0), pval, passed, discard_fraction, p_threshold, discard_cap, report_cells)


def sample_from_law(ref: ExactDistribution, samples: int, seed: int) -> Histogram:
    """Histogram drawn directly from an exact law by multinomial sampling (calibration)."""
    keys = sorted(ref.atoms)
    probs = [float(_as_fraction(ref.atoms[k])) for k in keys] + [float(_as_fraction(ref.tail_mass))]
    probs = np.clip(np.array(probs), 0.0, None)
    probs /= probs.sum()
    draws = np.random.default_rng(seed).multinomial(samples, probs)
    counts = {k: int(c) for k, c in zip(keys, draws[:-1]) if c}
    return Histogram(counts, 0, samples, int(draws[-1]), ref.cutoff)


# ---------------------------------------------------------------------------
# exhaustive oracles over the residue field and over lattices


def _check_space(size: int) -> None:
    if size > BRUTE_FORCE_LIMIT:
        raise ValueError(f"search space {size} exceeds {BRUTE_FORCE_LIMIT}")


def _fq_elements(q: int, ext: bool):
    """Elements of F_q (pairs (a, 0)) or F_{q^2} = F_q[s]/(s^2 - d) (pairs (a, b))."""
    if ext:
        return [(a, b) for a in range(q) for b in range(q)]
    return [(a, 0) for a in range(q)]


def _rank_mod_p(rows, p: int, d: int) -> int:
    """Rank over F_p or F_{p^2} of a matrix of (a, b) pairs."""
    R = [list(r) for r in rows]
    n = len(R)
    m = len(R[0]) if n else 0
    rank = 0
    for c in range(m):
        piv = next((i for i in range(rank, n) if R[i][c] != (0, 0)), None)
        if piv is None:
            continue
        R[rank], R[piv] = R[piv], R[rank]
        a, b = R[rank][c]
        nrm = (a * a - d * b * b) % p
        ninv = pow(nrm, -1, p)
        inv = (a * ninv % p, -b * ninv % p)
        for i in range(n):
            if i == rank or R[i][c] == (0, 0):
                continue
            x = R[i][c]
            f = ((x[0] * inv[0] + d * x[1] * inv[1]) % p, (x[0] * inv[1] + x[1] * inv[0]) % p)
            R[i] = [
                ((y[0] - f[0] * z[0] - d * f[1] * z[1]) % p, (y[1] - f[0] * z[1] - f[1] * z[0]) % p)
                for y, z in zip(R[i], R[rank])
            ]
        rank += 1
    return rank


def _symmetric_residue_matrices(case: str, size: int, q: int):
    """Every alternating (case alt) or Hermitian (case her) matrix over the residue field."""
    from .padicring import smallest_nonresidue

    d = smallest_nonresidue(q) if case == "her" else 1
    if case == "alt":
        slots = list(itertools.combinations(range(size), 2))
        _check_space(q ** len(slots))
        for vals in itertools.product(range(q), repeat=len(slots)):
            A = [[(0, 0)] * size for _ in range(size)]
            for (i, j), v in zip(slots, vals):
                A[i][j] = (v, 0)
                A[j][i] = (-v % q, 0)
            yield A, d
    elif case == "her":
        slots = list(itertools.combinations(range(size), 2))
        _check_space(q**size * q ** (2 * len(slots)))
        for diag in itertools.product(range(q), repeat=size):
            for vals in itertools.product(_fq_elements(q, True), repeat=len(slots)):
                A = [[(0, 0)] * size for _ in range(size)]
                for i, x in enumerate(diag):
                    A[i][i] = (x, 0)
                for (i, j), (a, b) in zip(slots, vals):
                    A[i][j] = (a, b)
                    A[j][i] = (a, -b % q)
                yield A, d
    else:
        raise ValueError(f"unknown case {case!r}")


def invertible_fraction(case: str, size: int, q: int) -> Fraction:
    """Exact fraction of invertible alternating / Hermitian matrices over the residue field."""
    good = total = 0
    for A, d in _symmetric_residue_matrices(case, size, q):
        total += 1
        good += _rank_mod_p(A, q, d) == size
    return Fraction(good, total)


def residue_distribution(case: str, size: int, q: int) -> dict:
    """Exact law of the corank of the reduction mod p."""
    counts: dict = {}
    total = 0
    for A, d in _symmetric_residue_matrices(case, size, q):
        total += 1
        c = size - _rank_mod_p(A, q, d)
        counts[c] = counts.get(c, 0) + 1
    return {c: Fraction(k, total) for c, k in sorted(counts.items())}


def _hnf_lattices(mu: Signature, p: int, ext: bool):
    """Lower-triangular column Hermite forms of the lattices L with O^n / L of type mu.

    Each sublattice of O^n of full rank has a unique basis matrix H with
    H[j][j] = p^{e_j} and H[i][j] reduced mod p^{e_i} for i > j.  Those whose
    elementary divisors are p^{mu_i} are yielded as lists of (a, b) pairs.
    """
    n = len(mu)
    total = mu.size
    K = total + 1
    d = _nonres(p) if ext else 0
    w = 2 if ext else 1
    _check_space(sum(p ** (w * sum(e * i for i, e in enumerate(es))) for es in itertools.product(range(total + 1), repeat=n) if sum(es) == total))
    for es in itertools.product(range(total + 1), repeat=n):
        if sum(es) != total:
            continue
        slots = [(i, j) for i in range(n) for j in range(i)]
        ranges = []
        for i, _j in slots:
            vals = range(p ** es[i])
            ranges.append([(a, b) for a in vals for b in vals] if ext else [(a, 0) for a in vals])
        for offs in itertools.product(*ranges):
            H = [[(0, 0)] * n for _ in range(n)]
            for j in range(n):
                H[j][j] = (p ** es[j], 0)
            for (i, j), x in zip(slots, offs):
                H[i][j] = x
            if _elementary_divisors(H, p, K, d) == tuple(mu):
                yield H


def _nonres(p: int) -> int:
    from .padicring import smallest_nonresidue

    return smallest_nonresidue(p)


def _elementary_divisors(H, p: int, K: int, d: int) -> tuple:
    """Exponents of the elementary divisors of a square matrix, from gcds of minors."""
    n = len(H)
    M = p**K
    sums = [0]
    for k in range(1, n + 1):
        best = K
        for rs in itertools.combinations(range(n), k):
            for cs in itertools.combinations(range(n), k):
                a, b = rm._det_ext([[H[i][j] for j in cs] for i in rs], d, M)
                best = min(best, rm._val_int(a, p, K), rm._val_int(b, p, K))
        sums.append(best)
    parts = [sums[k] - sums[k - 1] for k in range(1, n + 1)]
    return tuple(sorted(parts, reverse=True))


def coset_count(mu, n: int | None = None, p: int = 2, ext: bool = False) -> int:
    """Number of left cosets gK inside K pi_mu K, counted as lattices of type mu."""
    mu = Signature(mu)
    if n is not None and n != len(mu):
        raise ValueError("n must equal len(mu)")
    return sum(1 for _ in _hnf_lattices(mu, p, ext))


def product_transition(case: str, mu, nu, p: int) -> dict:
    """Exact law of SN(B^T A B) / SN(B^* A B) with A canonical of type nu, B uniform over cosets of type mu.

    Right multiplication of B by K does not change the singular numbers, so
    the Haar law on the double coset reduces to the uniform law on coset
    representatives, i.e. on lattices of type mu.
    """
    mu, nu = Signature(mu), Signature(nu)
    ext = case == "her"
    if case == "alt" and len(mu) != 2 * len(nu):
        raise ValueError("alt needs len(mu) = 2 len(nu)")
    if case == "her" and len(mu) != len(nu):
        raise ValueError("her needs len(mu) = len(nu)")
    K = 2 * mu.size + nu.size + 2
    cfg = RingCfg(p, K, _nonres(p) if ext else None)
    canon = rm.canonical_matrix("her" if ext else "alt", nu, None, cfg)
    counts: dict = {}
    total = 0
    for H in _hnf_lattices(mu, p, ext):
        re = np.array([[x[0] for x in row] for row in H], np.int64)
        if ext:
            im = np.array([[x[1] for x in row] for row in H], np.int64)
            Bm = rm.LocalMatrix(re, cfg, "none", im)
        else:
            Bm = rm.LocalMatrix(re, cfg, "none")
        res = rm.sn_minors(rm.transform(canon, "sandwich", B=Bm))
        if not res.reliable:
            raise ArithmeticError("precision too small for the product oracle")
        counts[res.signature] = counts.get(res.signature, 0) + 1
        total += 1
    return {lam: Fraction(c, total) for lam, c in sorted(counts.items(), reverse=True)}


def brute_force(kind: str, **kw):
    """Dispatch: invertible_fraction, coset_count, residue_distribution, product_transition."""
    table = {
        "invertible_fraction": invertible_fraction,
        "coset_count": coset_count,
        "residue_distribution": residue_distribution,
        "product_transition": product_transition,
    }
    if kind not in table:
        raise ValueError(f"unknown brute-force kind {kind!r}")
    return table[kind](**kw)
