"""Numba backend: one compiled loop per sample, released from the GIL."""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_ZERO = np.uint64(0)


@njit(cache=True, nogil=True)
def _next(states, b):
    s = states[b] + _GOLDEN
    states[b] = s
    z = (s ^ (s >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def draw(states, m, limit, count):
    B = states.shape[0]
    out = np.empty((B, count), np.int64)
    mm = np.uint64(m)
    for b in range(B):
        for c in range(count):
            x = _next(states, b)
            while limit != _ZERO and x >= limit:
                x = _next(states, b)
            out[b, c] = np.int64(x % mm)
    return out


@njit(cache=True, nogil=True)
def _val(x, p, K):
    if x == 0:
        return K
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@njit(cache=True, nogil=True)
def _inv(a, m):
    # extended Euclid; a is a unit mod m
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 != 0:
        qq = r0 // r1
        r0, r1 = r1, r0 - qq * r1
        s0, s1 = s1, s0 - qq * s1
    return s0 % m


@njit(cache=True, nogil=True)
def unit_det_mask(re, im, d, p, ext):
    B, n, _ = re.shape
    out = np.zeros(B, np.bool_)
    for b in range(B):
        R = re[b] % p
        I = im[b] % p
        ok = True
        for c in range(n):
            piv = -1
            for i in range(c, n):
                if R[i, c] != 0 or (ext and I[i, c] != 0):
                    piv = i
                    break
            if piv < 0:
                ok = False
                break
            if piv != c:
                for j in range(n):
                    R[c, j], R[piv, j] = R[piv, j], R[c, j]
                    I[c, j], I[piv, j] = I[piv, j], I[c, j]
            a = R[c, c]
            bb = I[c, c] if ext else 0
            nrm = (a * a - d * ((bb * bb) % p)) % p
            ninv = _inv(nrm, p)
            # inverse of the pivot: conj / norm
            ia = (a * ninv) % p
            ib = ((p - bb) * ninv) % p
            for i in range(c + 1, n):
                xa = R[i, c]
                xb = I[i, c] if ext else 0
                if xa == 0 and xb == 0:
                    continue
                fa = (xa * ia + d * ((xb * ib) % p)) % p
                fb = (xa * ib + xb * ia) % p
                for j in range(c, n):
                    ya = R[c, j]
                    yb = I[c, j] if ext else 0
                    R[i, j] = (R[i, j] - fa * ya - d * ((fb * yb) % p)) % p
                    if ext:
                        I[i, j] = (I[i, j] - fa * yb - fb * ya) % p
        out[b] = ok
    return out


@njit(cache=True, nogil=True)
def matmul_base(A, Bm, M):
    nb, n, k = A.shape
    m = Bm.shape[2]
    out = np.zeros((nb, n, m), np.int64)
    for b in range(nb):
        for i in range(n):
            for j in range(m):
                s = 0
                for l in range(k):
                    s += A[b, i, l] * Bm[b, l, j]
                out[b, i, j] = s % M
    return out


@njit(cache=True, nogil=True)
def matmul_ext(Ar, Ai, Br, Bi, d, M):
    nb, n, k = Ar.shape
    m = Br.shape[2]
    outr = np.zeros((nb, n, m), np.int64)
    outi = np.zeros((nb, n, m), np.int64)
    for b in range(nb):
        for i in range(n):
            for j in range(m):
                sr = 0
                si = 0
                sd = 0
                for l in range(k):
                    sr += Ar[b, i, l] * Br[b, l, j]
                    sd += Ai[b, i, l] * Bi[b, l, j]
                    si += Ar[b, i, l] * Bi[b, l, j] + Ai[b, i, l] * Br[b, l, j]
                outr[b, i, j] = (sr + d * (sd % M)) % M
                outi[b, i, j] = si % M
    return outr, outi


@njit(cache=True, nogil=True)
def _swap_her(R, I, i, j):
    n = R.shape[0]
    if i == j:
        return
    for c in range(n):
        R[i, c], R[j, c] = R[j, c], R[i, c]
        I[i, c], I[j, c] = I[j, c], I[i, c]
    for c in range(n):
        R[c, i], R[c, j] = R[c, j], R[c, i]
        I[c, i], I[c, j] = I[c, j], I[c, i]


@njit(cache=True, nogil=True)
def sn_her(re, im, d, p, K):
    B, n, _ = re.shape
    M = p**K
    parts = np.full((B, n), K, np.int64)
    cens = np.zeros(B, np.bool_)
    for b in range(B):
        R = re[b].copy()
        I = im[b].copy()
        found = np.full(n, K, np.int64)
        for r in range(n):
            best = K + 1
            bi = -1
            bj = -1
            for i in range(r, n):
                v = _val(R[i, i], p, K)
                if v < best:
                    best, bi, bj = v, i, i
            for i in range(r, n):
                for j in range(i + 1, n):
                    v = min(_val(R[i, j], p, K), _val(I[i, j], p, K))
                    if v < best:
                        best, bi, bj = v, i, j
            if best >= K:
                cens[b] = True
                break
            if bi != bj:
                # row_i += u row_j, col_i += conj(u) col_j with u in {1, s}; new diagonal is
                # a_ii + Tr(u a_ji) + Nm(u) a_jj, and one choice of u has valuation exactly best
                xa, xb = R[bj, bi], I[bj, bi]
                cand = (R[bi, bi] + 2 * xa + R[bj, bj]) % M
                use_s = _val(cand, p, K) != best
                if use_s:
                    ua, ub = 0, 1
                else:
                    ua, ub = 1, 0
                for c in range(n):
                    ya, yb = R[bj, c], I[bj, c]
                    R[bi, c] = (R[bi, c] + ua * ya + d * ub * yb) % M
                    I[bi, c] = (I[bi, c] + ua * yb + ub * ya) % M
                for c in range(n):
                    ya, yb = R[c, bj], I[c, bj]
                    # multiply by conj(u) = ua - ub s
                    R[c, bi] = (R[c, bi] + ua * ya - d * ub * yb) % M
                    I[c, bi] = (I[c, bi] + ua * yb - ub * ya) % M
            _swap_her(R, I, r, bi)
            pw = p**best
            winv = _inv(R[r, r] // pw, M)
            for k in range(r + 1, n):
                ca = ((R[k, r] // pw) * winv) % M
                cb = ((I[k, r] // pw) * winv) % M
                if ca == 0 and cb == 0:
                    continue
                for l in range(r + 1, n):
                    ya, yb = R[r, l], I[r, l]
                    R[k, l] = (R[k, l] - ca * ya - d * ((cb * yb) % M)) % M
                    I[k, l] = (I[k, l] - ca * yb - cb * ya) % M
            found[r] = best
        for r in range(n):
            parts[b, r] = found[n - 1 - r]
    return parts, cens


@njit(cache=True, nogil=True)
def _swap_alt(A, i, j):
    n = A.shape[0]
    if i == j:
        return
    for c in range(n):
        A[i, c], A[j, c] = A[j, c], A[i, c]
    for c in range(n):
        A[c, i], A[c, j] = A[c, j], A[c, i]


@njit(cache=True, nogil=True)
def sn_alt(A0, p, K):
    B, N, _ = A0.shape
    h = N // 2
    M = p**K
    parts = np.full((B, h), K, np.int64)
    cens = np.zeros(B, np.bool_)
    for b in range(B):
        A = A0[b].copy()
        found = np.full(h, K, np.int64)
        for step in range(h):
            r = 2 * step
            best = K + 1
            bi = -1
            bj = -1
            for i in range(r, N):
                for j in range(i + 1, N):
                    v = _val(A[i, j], p, K)
                    if v < best:
                        best, bi, bj = v, i, j
            if best >= K:
                cens[b] = True
                break
            _swap_alt(A, r, bi)
            if bj == r:
                bj = bi
            _swap_alt(A, r + 1, bj)
            pw = p**best
            uinv = _inv(A[r, r + 1] // pw, M)
            for k in range(r + 2, N):
                x1 = A[k, r + 1] // pw
                x0 = A[k, r] // pw
                if x1 == 0 and x0 == 0:
                    continue
                for l in range(r + 2, N):
                    X = (x1 * A[r, l] - x0 * A[r + 1, l]) % M
                    A[k, l] = (A[k, l] - X * uinv) % M
            found[step] = best
        for s in range(h):
            parts[b, s] = found[h - 1 - s]
    return parts, cens
