"""Random matrices over Z/p^K and its quadratic extension, and their singular numbers.

Matrices are stored as int64 residue arrays: ``re`` always, ``im`` (the
coefficient of s) for extension entries.  Singular numbers come from two
independent routes:

* :func:`sn_minors`, the minors characterization (all k x k minors for
  Hermitian matrices, principal Pfaffians for alternating ones), in pure
  Python integers;
* :func:`sn_elim`, congruence elimination in the batch kernels.

The ``batch_*`` functions draw many matrices at once from per-sample streams
and are what the Monte Carlo driver uses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .kernels import draw_limit, get_backend
from .padicring import BaseElem, ExtElem, RingCfg, SplitMix64
from .sigcore import Signature

__all__ = [
    "LocalMatrix",
    "SNResult",
    "PrecisionError",
    "RejectionError",
    "canonical_matrix",
    "sample_matrix",
    "sn_minors",
    "sn_elim",
    "transform",
    "batch_haar_gl",
    "batch_haar_alt",
    "batch_haar_her",
    "batch_invariant",
    "batch_double_coset",
    "batch_sn",
    "MINORS_BOUND",
]

MINORS_BOUND = 6
REJECTION_ROUNDS = 200
PRECISION_MARGIN = 1


class PrecisionError(ValueError):
    """Requested singular numbers do not fit below the precision K."""


class RejectionError(RuntimeError):
    """Rejection sampling exceeded its retry cap."""


@dataclass(frozen=True)
class SNResult:
    signature: Signature
    reliable: bool

    def to_json(self) -> dict:
        return {"signature": self.signature.to_json(), "reliable": self.reliable}


@dataclass
class LocalMatrix:
    re: np.ndarray
    cfg: RingCfg
    symmetry: str = "none"
    im: np.ndarray | None = None
    _checked: bool = field(default=False, repr=False)

    def __post_init__(self):
        M = self.cfg.modulus
        self.re = np.asarray(self.re, dtype=np.int64) % M
        if self.im is not None:
            self.im = np.asarray(self.im, dtype=np.int64) % M
        if self.re.ndim != 2:
            raise ValueError("matrix must be 2-D")
        if self.symmetry not in ("none", "alternating", "hermitian"):
            raise ValueError(f"unknown symmetry {self.symmetry!r}")
        if self.symmetry == "alternating":
            if self.im is not None and self.im.any():
                raise ValueError("alternating matrices have base-ring entries")
            if self.re.shape[0] != self.re.shape[1]:
                raise ValueError("alternating matrices are square")
            if np.diag(self.re).any() or ((self.re + self.re.T) % M).any():
                raise ValueError("matrix is not alternating")
        if self.symmetry == "hermitian":
            if self.im is None:
                self.im = np.zeros_like(self.re)
            if self.re.shape[0] != self.re.shape[1]:
                raise ValueError("hermitian matrices are square")
            if (self.re != self.re.T).any() or ((self.im + self.im.T) % M).any():
                raise ValueError("matrix is not hermitian")

    @property
    def ext(self) -> bool:
        return self.im is not None

    @property
    def shape(self) -> tuple:
        return self.re.shape

    def entry(self, i: int, j: int):
        if self.ext:
            return ExtElem(int(self.re[i, j]), int(self.im[i, j]), self.cfg)
        return BaseElem(int(self.re[i, j]), self.cfg)

    def entries(self) -> list:
        return [[self.entry(i, j) for j in range(self.shape[1])] for i in range(self.shape[0])]

    def to_json(self) -> list:
        if self.ext:
            return [[f"{a}+{b}s" for a, b in zip(ra, rb)] for ra, rb in zip(self.re.tolist(), self.im.tolist())]
        return [[str(a) for a in row] for row in self.re.tolist()]


# ---------------------------------------------------------------------------
# canonical forms


def canonical_matrix(case: str, lam, size: int | None = None, cfg: RingCfg | None = None) -> LocalMatrix:
    lam = Signature(lam)
    if cfg is None:
        raise ValueError("canonical_matrix needs a RingCfg")
    if lam and lam[-1] < 0:
        raise ValueError("canonical matrices need nonnegative parts")
    if lam and lam[0] >= cfg.K:
        raise PrecisionError(f"part {lam[0]} does not fit below precision {cfg.K}")
    p = cfg.p
    if case == "her":
        n = len(lam) if size is None else size
        if n != len(lam):
            raise ValueError("her canonical size equals len(lambda)")
        return LocalMatrix(np.diag([p**x for x in lam]).astype(np.int64), cfg, "hermitian")
    if case == "alt":
        n = len(lam)
        size = 2 * n if size is None else size
        if size not in (2 * n, 2 * n + 1):
            raise ValueError("alt canonical size must be 2 len(lambda) or 2 len(lambda) + 1")
        A = np.zeros((size, size), np.int64)
        for i, x in enumerate(lam):
            A[2 * i, 2 * i + 1] = p**x
            A[2 * i + 1, 2 * i] = -(p**x)
        return LocalMatrix(A, cfg, "alternating")
    raise ValueError(f"unknown case {case!r}")


# ---------------------------------------------------------------------------
# batch samplers


def _draw(states, cfg: RingCfg, count: int, kern):
    M = cfg.modulus
    return kern.draw(states, M, draw_limit(M), count)


def batch_haar_gl(n: int, cfg: RingCfg, states: np.ndarray, ext: bool, kern=None):
    """Haar elements of GL_n over the base ring (ext=False) or the extension ring, by rejection."""
    kern = kern or get_backend()
    B = states.shape[0]
    width = n * n * (2 if ext else 1)
    re = np.zeros((B, n, n), np.int64)
    im = np.zeros((B, n, n), np.int64)
    todo = np.arange(B)
    for _ in range(REJECTION_ROUNDS):
        sub = states[todo]
        x = _draw(sub, cfg, width, kern)
        states[todo] = sub
        r = x[:, : n * n].reshape(-1, n, n)
        i = x[:, n * n :].reshape(-1, n, n) if ext else np.zeros_like(r)
        re[todo], im[todo] = r, i
        ok = kern.unit_det_mask(r, i, cfg.d, cfg.p, ext)
        todo = todo[~ok]
        if todo.size == 0:
            return re, (im if ext else None)
    raise RejectionError(f"GL_{n} rejection sampling did not finish in {REJECTION_ROUNDS} rounds")


def batch_haar_alt(N: int, cfg: RingCfg, states: np.ndarray, kern=None) -> np.ndarray:
    kern = kern or get_backend()
    B = states.shape[0]
    iu, ju = np.triu_indices(N, 1)
    x = _draw(states, cfg, iu.size, kern)
    A = np.zeros((B, N, N), np.int64)
    A[:, iu, ju] = x
    A[:, ju, iu] = (-x) % cfg.modulus
    return A


def batch_haar_her(n: int, cfg: RingCfg, states: np.ndarray, kern=None):
    kern = kern or get_backend()
    B = states.shape[0]
    M = cfg.modulus
    iu, ju = np.triu_indices(n, 1)
    x = _draw(states, cfg, n + 2 * iu.size, kern)
    re = np.zeros((B, n, n), np.int64)
    im = np.zeros((B, n, n), np.int64)
    diag = np.arange(n)
    re[:, diag, diag] = x[:, :n]
    a, b = x[:, n : n + iu.size], x[:, n + iu.size :]
    re[:, iu, ju] = a
    re[:, ju, iu] = a
    im[:, iu, ju] = b
    im[:, ju, iu] = (-b) % M
    return re, im


def batch_haar_invertible(case: str, size: int, cfg: RingCfg, states: np.ndarray, kern=None):
    """Haar elements of the symmetric class conditioned on a unit determinant, by rejection."""
    kern = kern or get_backend()
    B = states.shape[0]
    ext = case == "her"
    re = np.zeros((B, size, size), np.int64)
    im = np.zeros((B, size, size), np.int64)
    todo = np.arange(B)
    for _ in range(REJECTION_ROUNDS):
        sub = states[todo]
        if ext:
            r, i = batch_haar_her(size, cfg, sub, kern)
        else:
            r = batch_haar_alt(size, cfg, sub, kern)
            i = np.zeros_like(r)
        states[todo] = sub
        re[todo], im[todo] = r, i
        ok = kern.unit_det_mask(r, i, cfg.d, cfg.p, ext)
        todo = todo[~ok]
        if todo.size == 0:
            return re, (im if ext else None)
    raise RejectionError(f"invertible {case} rejection sampling did not finish in {REJECTION_ROUNDS} rounds")


def _conj_t(re, im, M):
    return np.swapaxes(re, 1, 2).copy(), (-np.swapaxes(im, 1, 2)) % M


def _check_parts(lam: Signature, cfg: RingCfg) -> None:
    if lam and lam[-1] < 0:
        raise ValueError("matrix experiments need nonnegative parts")
    if lam and lam[0] > cfg.K - 1 - PRECISION_MARGIN:
        raise PrecisionError(f"part {lam[0]} too close to precision {cfg.K}")


def batch_invariant(case: str, lam, size: int, cfg: RingCfg, states: np.ndarray, kern=None):
    """U pi_lambda U^* (her) or U pi^alt_lambda U^T (alt) with U Haar in GL."""
    kern = kern or get_backend()
    lam = Signature(lam)
    _check_parts(lam, cfg)
    M = cfg.modulus
    canon = canonical_matrix(case, lam, size, cfg)
    B = states.shape[0]
    if case == "her":
        ur, ui = batch_haar_gl(size, cfg, states, True, kern)
        P = np.broadcast_to(canon.re, (B, size, size)).copy()
        Z = np.zeros_like(P)
        tr, ti = kern.matmul_ext(ur, ui, P, Z, cfg.d, M)
        vr, vi = _conj_t(ur, ui, M)
        return kern.matmul_ext(tr, ti, vr, vi, cfg.d, M)
    U, _ = batch_haar_gl(size, cfg, states, False, kern)
    P = np.broadcast_to(canon.re, (B, size, size)).copy()
    T = kern.matmul_base(U, P, M)
    return kern.matmul_base(T, np.swapaxes(U, 1, 2).copy(), M)


def batch_double_coset(case: str, mu, cfg: RingCfg, states: np.ndarray, kern=None):
    """V1 pi_mu V2 with V1, V2 Haar: the Haar law on the double coset of pi_mu."""
    kern = kern or get_backend()
    mu = Signature(mu)
    _check_parts(mu, cfg)
    M = cfg.modulus
    n = len(mu)
    B = states.shape[0]
    ext = case == "her"
    D = np.broadcast_to(np.diag([cfg.p**x for x in mu]).astype(np.int64), (B, n, n)).copy()
    v1r, v1i = batch_haar_gl(n, cfg, states, ext, kern)
    v2r, v2i = batch_haar_gl(n, cfg, states, ext, kern)
    if ext:
        Z = np.zeros_like(D)
        tr, ti = kern.matmul_ext(v1r, v1i, D, Z, cfg.d, M)
        return kern.matmul_ext(tr, ti, v2r, v2i, cfg.d, M)
    return kern.matmul_base(kern.matmul_base(v1r, D, M), v2r, M), None


def batch_sandwich(case: str, A, Bm, cfg: RingCfg, kern=None):
    """B^* A B (her, A and B given as (re, im)) or B^T A B (alt)."""
    kern = kern or get_backend()
    M = cfg.modulus
    if case == "her":
        (ar, ai), (br, bi) = A, Bm
        cr, ci = _conj_t(br, bi, M)
        tr, ti = kern.matmul_ext(cr, ci, ar, ai, cfg.d, M)
        return kern.matmul_ext(tr, ti, br, bi, cfg.d, M)
    bt = np.swapaxes(Bm, 1, 2).copy()
    return kern.matmul_base(kern.matmul_base(bt, A, M), Bm, M)


def batch_sn(case: str, A, cfg: RingCfg, kern=None):
    """Singular numbers of a batch; returns (parts, censored)."""
    kern = kern or get_backend()
    if case == "her":
        re, im = A
        return kern.sn_her(np.ascontiguousarray(re), np.ascontiguousarray(im), cfg.d, cfg.p, cfg.K)
    return kern.sn_alt(np.ascontiguousarray(A), cfg.p, cfg.K)


# ---------------------------------------------------------------------------
# single-matrix interface


def sample_matrix(
    kind: str,
    cfg: RingCfg,
    rng: SplitMix64,
    *,
    n: int | None = None,
    case: str | None = None,
    lam=None,
    ext: bool = True,
    kern=None,
) -> LocalMatrix:
    """kind: haar_gl (n, ext), haar_alt (n = N), haar_her (n), invariant (case, lam, n = size)."""
    states = np.array([rng.state], dtype=np.uint64)
    if kind == "haar_gl":
        re, im = batch_haar_gl(n, cfg, states, ext, kern)
        out = LocalMatrix(re[0], cfg, "none", None if im is None else im[0])
    elif kind == "haar_alt":
        out = LocalMatrix(batch_haar_alt(n, cfg, states, kern)[0], cfg, "alternating")
    elif kind == "haar_her":
        re, im = batch_haar_her(n, cfg, states, kern)
        out = LocalMatrix(re[0], cfg, "hermitian", im[0])
    elif kind == "invariant":
        lam = Signature(lam)
        if case == "her":
            re, im = batch_invariant("her", lam, len(lam), cfg, states, kern)
            out = LocalMatrix(re[0], cfg, "hermitian", im[0])
        elif case == "alt":
            size = n if n is not None else 2 * len(lam)
            out = LocalMatrix(batch_invariant("alt", lam, size, cfg, states, kern)[0], cfg, "alternating")
        else:
            raise ValueError(f"unknown case {case!r}")
    else:
        raise ValueError(f"unknown sample kind {kind!r}")
    rng.state = int(states[0])
    return out


def _val_int(x: int, p: int, K: int) -> int:
    if x == 0:
        return K
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return min(v, K)


def _ext_mul(x, y, d, M):
    return ((x[0] * y[0] + d * x[1] * y[1]) % M, (x[0] * y[1] + x[1] * y[0]) % M)


def _det_ext(rows, d, M):
    """Determinant of a square matrix of (a, b) pairs by dynamic programming over column sets."""
    k = len(rows)
    acc = {0: (1, 0)}
    for r in range(k):
        nxt: dict = {}
        for mask, val in acc.items():
            # sign of placing column c after the columns already used
            for c in range(k):
                if mask >> c & 1:
                    continue
                above = bin(mask >> (c + 1)).count("1")
                term = _ext_mul(val, rows[r][c], d, M)
                if above % 2:
                    term = (-term[0] % M, -term[1] % M)
                old = nxt.get(mask | 1 << c, (0, 0))
                nxt[mask | 1 << c] = ((old[0] + term[0]) % M, (old[1] + term[1]) % M)
        acc = nxt
    return acc[(1 << k) - 1]


def _pfaffian(A: list, idx: tuple, M: int, memo: dict) -> int:
    if not idx:
        return 1
    if idx in memo:
        return memo[idx]
    i = idx[0]
    total = 0
    for pos in range(1, len(idx)):
        j = idx[pos]
        if A[i][j] == 0:
            continue
        rest = idx[1:pos] + idx[pos + 1 :]
        term = A[i][j] * _pfaffian(A, rest, M, memo)
        total += -term if (pos - 1) % 2 else term
    memo[idx] = total % M
    return memo[idx]


def sn_minors(A: LocalMatrix, bound: int = MINORS_BOUND) -> SNResult:
    """Singular numbers from minimal valuations of minors (pure Python oracle)."""
    cfg = A.cfg
    p, K, M, d = cfg.p, cfg.K, cfg.modulus, cfg.d
    N = A.shape[0]
    if N > bound:
        raise ValueError(f"minors oracle is limited to size {bound}")
    if A.symmetry == "hermitian":
        n = N
        rows = [[(int(A.re[i, j]), int(A.im[i, j])) for j in range(N)] for i in range(N)]
        sums = []
        for k in range(1, n + 1):
            best = K
            for rs in itertools.combinations(range(N), k):
                for cs in itertools.combinations(range(N), k):
                    a, b = _det_ext([[rows[i][j] for j in cs] for i in rs], d, M)
                    best = min(best, _val_int(a, p, K), _val_int(b, p, K))
                    if best == 0:
                        break
                if best == 0:
                    break
            sums.append(best)
    elif A.symmetry == "alternating":
        n = N // 2
        mat = [[int(A.re[i, j]) for j in range(N)] for i in range(N)]
        memo: dict = {}
        sums = []
        for k in range(1, n + 1):
            best = K
            for idx in itertools.combinations(range(N), 2 * k):
                best = min(best, _val_int(_pfaffian(mat, idx, M, memo), p, K))
                if best == 0:
                    break
            sums.append(best)
    else:
        raise ValueError("sn_minors needs a symmetry tag")
    # sums[k-1] = lambda_n + ... + lambda_{n-k+1}; a value of K means "at least K"
    parts_low = []
    reliable = True
    prev = 0
    for s in sums:
        if s >= K:
            reliable = False
            break
        parts_low.append(s - prev)
        prev = s
    parts_low += [K] * (n - len(parts_low))
    return SNResult(Signature(tuple(reversed(parts_low))), reliable)


def sn_elim(A: LocalMatrix, kern=None) -> SNResult:
    """Singular numbers by congruence elimination (fast path)."""
    kern = kern or get_backend()
    if A.symmetry == "hermitian":
        parts, cens = batch_sn("her", (A.re[None], A.im[None]), A.cfg, kern)
    elif A.symmetry == "alternating":
        parts, cens = batch_sn("alt", A.re[None], A.cfg, kern)
    else:
        raise ValueError("sn_elim needs a symmetry tag")
    return SNResult(Signature(tuple(int(x) for x in parts[0])), not bool(cens[0]))


def transform(A: LocalMatrix, action: str, *, k: int | None = None, B: LocalMatrix | None = None) -> LocalMatrix:
    """corner: top-left k x k block; sandwich: B^* A B (hermitian) or B^T A B (alternating)."""
    if action == "corner":
        if k is None or not 0 <= k <= A.shape[0]:
            raise ValueError("corner size out of range")
        im = None if A.im is None else A.im[:k, :k]
        return LocalMatrix(A.re[:k, :k], A.cfg, A.symmetry, im)
    if action == "sandwich":
        if B is None or B.shape[0] != A.shape[1]:
            raise ValueError("sandwich dimensions do not match")
        M = A.cfg.modulus
        kern = get_backend()
        if A.symmetry == "hermitian":
            bi = B.im if B.im is not None else np.zeros_like(B.re)
            cr, ci = batch_sandwich("her", (A.re[None], A.im[None]), (B.re[None], bi[None]), A.cfg, kern)
            return LocalMatrix(cr[0], A.cfg, "hermitian", ci[0])
        if A.symmetry == "alternating":
            if B.im is not None and B.im.any():
                raise ValueError("alternating sandwich needs a base-ring B")
            return LocalMatrix(batch_sandwich("alt", A.re[None], B.re[None], A.cfg, kern)[0], A.cfg, "alternating")
        raise ValueError("sandwich needs a symmetry tag")
    raise ValueError(f"unknown action {action!r}")


@lru_cache(maxsize=None)
def _warm(name: str) -> bool:
    """Compile every kernel once on tiny inputs (numba caches to disk after the first run)."""
    kern = get_backend(name)
    cfg = RingCfg(3, 2)
    st = np.zeros(1, np.uint64)
    batch_sn("her", batch_haar_her(2, cfg, st, kern), cfg, kern)
    batch_sn("alt", batch_haar_alt(4, cfg, st, kern), cfg, kern)
    batch_invariant("her", (0, 0), 2, cfg, st, kern)
    batch_invariant("alt", (0, 0), 4, cfg, st, kern)
    return True
