"""Pure-numpy backend: the numba algorithms vectorized over the batch axis."""

from __future__ import annotations

import numpy as np

NAME = "numpy"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _next(states: np.ndarray, idx: np.ndarray) -> np.ndarray:
    s = states[idx] + _GOLDEN
    states[idx] = s
    z = (s ^ (s >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def draw(states, m, limit, count):
    B = states.shape[0]
    out = np.empty((B, count), np.int64)
    mm = np.uint64(m)
    everyone = np.arange(B)
    with np.errstate(over="ignore"):
        for c in range(count):
            x = _next(states, everyone)
            if limit:
                bad = np.nonzero(x >= limit)[0]
                while bad.size:
                    x[bad] = _next(states, bad)
                    bad = bad[x[bad] >= limit]
            out[:, c] = (x % mm).astype(np.int64)
    return out


def _val(x: np.ndarray, p: int, K: int) -> np.ndarray:
    """Valuation of residues mod p^K, with K for zero."""
    v = np.zeros(x.shape, np.int64)
    pj = 1
    for _ in range(K):
        pj *= p
        v += x % pj == 0
    return v


def _powmod(a: np.ndarray, e: int, m: int) -> np.ndarray:
    result = np.ones_like(a)
    base = a % m
    while e:
        if e & 1:
            result = (result * base) % m
        base = (base * base) % m
        e >>= 1
    return result


def _inv(a: np.ndarray, p: int, K: int) -> np.ndarray:
    """Inverse of units mod p^K via Euler's theorem."""
    M = p**K
    return _powmod(a, p ** (K - 1) * (p - 1) - 1, M)


def unit_det_mask(re, im, d, p, ext):
    R = re % p
    I = im % p if ext else np.zeros_like(R)
    B, n, _ = R.shape
    ok = np.ones(B, bool)
    rows = np.arange(B)
    for c in range(n):
        nz = (R[:, c:, c] != 0) | (I[:, c:, c] != 0)
        has = nz.any(axis=1)
        ok &= has
        piv = c + np.argmax(nz, axis=1)
        piv = np.where(has, piv, c)
        for arr in (R, I):
            top = arr[rows, c, :].copy()
            arr[rows, c, :] = arr[rows, piv, :]
            arr[rows, piv, :] = top
        a = R[:, c, c]
        b = I[:, c, c]
        nrm = (a * a - d * ((b * b) % p)) % p
        nrm = np.where(has, nrm, 1)
        ninv = _powmod(nrm, p - 2, p)
        ia = (a * ninv) % p
        ib = ((p - b) * ninv) % p
        xa = R[:, c + 1 :, c]
        xb = I[:, c + 1 :, c]
        fa = (xa * ia[:, None] + d * ((xb * ib[:, None]) % p)) % p
        fb = (xa * ib[:, None] + xb * ia[:, None]) % p
        ya = R[:, c, c:][:, None, :]
        yb = I[:, c, c:][:, None, :]
        fa3, fb3 = fa[:, :, None], fb[:, :, None]
        newR = (R[:, c + 1 :, c:] - fa3 * ya - d * ((fb3 * yb) % p)) % p
        newI = (I[:, c + 1 :, c:] - fa3 * yb - fb3 * ya) % p
        R[:, c + 1 :, c:] = newR
        I[:, c + 1 :, c:] = newI
    return ok


def matmul_base(A, Bm, M):
    return np.matmul(A, Bm) % M


def matmul_ext(Ar, Ai, Br, Bi, d, M):
    rr = np.matmul(Ar, Br) % M
    ii = np.matmul(Ai, Bi) % M
    ri = (np.matmul(Ar, Bi) + np.matmul(Ai, Br)) % M
    return (rr + d * ii) % M, ri


def _swap(arrs, idx, a, b):
    """Swap rows and columns a[k] <-> b[k] in sample idx[k] of every array."""
    for arr in arrs:
        ra = arr[idx, a, :].copy()
        arr[idx, a, :] = arr[idx, b, :]
        arr[idx, b, :] = ra
        ca = arr[idx, :, a].copy()
        arr[idx, :, a] = arr[idx, :, b]
        arr[idx, :, b] = ca


def sn_her(re, im, d, p, K):
    B, n, _ = re.shape
    M = p**K
    R = re.copy()
    I = im.copy()
    found = np.full((B, n), K, np.int64)
    cens = np.zeros(B, bool)
    live = np.arange(B)
    iu, ju = np.triu_indices(n)
    for r in range(n):
        if live.size == 0:
            break
        sel = (iu >= r) & (ju >= r)
        ii, jj = iu[sel], ju[sel]
        V = np.minimum(_val(R[live][:, ii, jj], p, K), _val(I[live][:, ii, jj], p, K))
        # diagonal first, then row-major off-diagonal, matching the loop backend
        score = 2 * V + (ii != jj)[None, :]
        order = np.concatenate([np.nonzero(ii == jj)[0], np.nonzero(ii != jj)[0]])
        pick = order[np.argmin(score[:, order], axis=1)]
        best = V[np.arange(live.size), pick]
        done = best >= K
        cens[live[done]] = True
        keep = ~done
        live, best, bi, bj = live[keep], best[keep], ii[pick][keep], jj[pick][keep]
        off = np.nonzero(bi != bj)[0]
        if off.size:
            s_, i_, j_ = live[off], bi[off], bj[off]
            xa = R[s_, j_, i_]
            cand = (R[s_, i_, i_] + 2 * xa + R[s_, j_, j_]) % M
            use_s = (_val(cand, p, K) != best[off]).astype(np.int64)
            ua, ub = 1 - use_s, use_s
            ya, yb = R[s_, j_, :], I[s_, j_, :]
            R[s_, i_, :] = (R[s_, i_, :] + ua[:, None] * ya + d * ub[:, None] * yb) % M
            I[s_, i_, :] = (I[s_, i_, :] + ua[:, None] * yb + ub[:, None] * ya) % M
            ya, yb = R[s_, :, j_], I[s_, :, j_]
            R[s_, :, i_] = (R[s_, :, i_] + ua[:, None] * ya - d * ub[:, None] * yb) % M
            I[s_, :, i_] = (I[s_, :, i_] + ua[:, None] * yb - ub[:, None] * ya) % M
        rr = np.full(live.size, r)
        _swap((R, I), live, rr, bi)
        pw = p**best
        winv = _inv(R[live, r, r] // pw, p, K)
        ca = ((R[live, r + 1 :, r] // pw[:, None]) * winv[:, None]) % M
        cb = ((I[live, r + 1 :, r] // pw[:, None]) * winv[:, None]) % M
        ya = R[live, r, r + 1 :][:, None, :]
        yb = I[live, r, r + 1 :][:, None, :]
        ca3, cb3 = ca[:, :, None], cb[:, :, None]
        blockR = R[live, r + 1 :, r + 1 :]
        blockI = I[live, r + 1 :, r + 1 :]
        R[live, r + 1 :, r + 1 :] = (blockR - ca3 * ya - d * ((cb3 * yb) % M)) % M
        I[live, r + 1 :, r + 1 :] = (blockI - ca3 * yb - cb3 * ya) % M
        found[live, r] = best
    return found[:, ::-1].copy(), cens


def sn_alt(A0, p, K):
    B, N, _ = A0.shape
    h = N // 2
    M = p**K
    A = A0.copy()
    found = np.full((B, h), K, np.int64)
    cens = np.zeros(B, bool)
    live = np.arange(B)
    iu, ju = np.triu_indices(N, 1)
    for step in range(h):
        if live.size == 0:
            break
        r = 2 * step
        sel = iu >= r
        ii, jj = iu[sel], ju[sel]
        V = _val(A[live][:, ii, jj], p, K)
        pick = np.argmin(V, axis=1)
        best = V[np.arange(live.size), pick]
        done = best >= K
        cens[live[done]] = True
        keep = ~done
        live, best, bi, bj = live[keep], best[keep], ii[pick][keep], jj[pick][keep]
        rr = np.full(live.size, r)
        _swap((A,), live, rr, bi)
        bj = np.where(bj == r, bi, bj)
        _swap((A,), live, rr + 1, bj)
        pw = p**best
        uinv = _inv(A[live, r, r + 1] // pw, p, K)
        x1 = (A[live, r + 2 :, r + 1] // pw[:, None])[:, :, None]
        x0 = (A[live, r + 2 :, r] // pw[:, None])[:, :, None]
        y0 = A[live, r, r + 2 :][:, None, :]
        y1 = A[live, r + 1, r + 2 :][:, None, :]
        X = (x1 * y0 - x0 * y1) % M
        A[live, r + 2 :, r + 2 :] = (A[live, r + 2 :, r + 2 :] - X * uinv[:, None, None]) % M
        found[live, step] = best
    return found[:, ::-1].copy(), cens
