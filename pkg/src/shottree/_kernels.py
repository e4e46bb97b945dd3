"""numba kernels: gate application, trajectory noise, sampling, tree traversal.

All state updates are in place on complex128 amplitude arrays.  The uint64
hash/stream functions mirror ``shottree.rng`` exactly.
"""
import numpy as np
from numba import njit, uint64

_GOLDEN = uint64(0x9E3779B97F4A7C15)
_M1 = uint64(0xBF58476D1CE4E5B9)
_M2 = uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True)
def mix64(z):
    z = uint64(z)
    z = (z ^ (z >> uint64(30))) * _M1
    z = (z ^ (z >> uint64(27))) * _M2
    return z ^ (z >> uint64(31))


@njit(cache=True, nogil=True)
def child_key(parent, depth, child):
    tag = (uint64(depth + 1) << uint64(40)) ^ uint64(child)
    return mix64(uint64(parent) ^ mix64(tag))


@njit(cache=True, nogil=True)
def next_uniform(stream):
    """Advance a one-element uint64 stream array and return a [0, 1) float."""
    stream[0] = stream[0] + _GOLDEN
    return float(mix64(stream[0]) >> uint64(11)) * _INV53


@njit(cache=True, nogil=True)
def apply_1q(s, q, m):
    stride = 1 << q
    dim = s.shape[0]
    m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    for base in range(0, dim, 2 * stride):
        for i in range(base, base + stride):
            a0 = s[i]
            a1 = s[i + stride]
            s[i] = m00 * a0 + m01 * a1
            s[i + stride] = m10 * a0 + m11 * a1


@njit(cache=True, nogil=True)
def apply_2q(s, qa, qb, m):
    """Apply a 4x4 unitary; local index is 2*bit(qa) + bit(qb)."""
    ba = 1 << qa
    bb = 1 << qb
    lo = min(qa, qb)
    hi = max(qa, qb)
    quarter = s.shape[0] >> 2
    for g in range(quarter):
        i = ((g >> lo) << (lo + 1)) | (g & ((1 << lo) - 1))
        i = ((i >> hi) << (hi + 1)) | (i & ((1 << hi) - 1))
        i1 = i | bb
        i2 = i | ba
        i3 = i | ba | bb
        v0 = s[i]
        v1 = s[i1]
        v2 = s[i2]
        v3 = s[i3]
        s[i] = m[0, 0] * v0 + m[0, 1] * v1 + m[0, 2] * v2 + m[0, 3] * v3
        s[i1] = m[1, 0] * v0 + m[1, 1] * v1 + m[1, 2] * v2 + m[1, 3] * v3
        s[i2] = m[2, 0] * v0 + m[2, 1] * v1 + m[2, 2] * v2 + m[2, 3] * v3
        s[i3] = m[3, 0] * v0 + m[3, 1] * v1 + m[3, 2] * v2 + m[3, 3] * v3


@njit(cache=True, nogil=True)
def kraus_probabilities(s, q, kraus, start, count, out):
    """Fill ``out[:count]`` with ||K_i psi||^2 for Kraus ops acting on qubit q."""
    stride = 1 << q
    dim = s.shape[0]
    r00 = 0.0
    r11 = 0.0
    r01 = 0j
    for base in range(0, dim, 2 * stride):
        for i in range(base, base + stride):
            a0 = s[i]
            a1 = s[i + stride]
            r00 += a0.real * a0.real + a0.imag * a0.imag
            r11 += a1.real * a1.real + a1.imag * a1.imag
            r01 += a0 * np.conj(a1)
    r10 = np.conj(r01)
    for j in range(count):
        k = kraus[start + j]
        acc = 0.0
        for r in range(2):
            k0 = k[r, 0]
            k1 = k[r, 1]
            val = (
                k0 * r00 * np.conj(k0)
                + k0 * r01 * np.conj(k1)
                + k1 * r10 * np.conj(k0)
                + k1 * r11 * np.conj(k1)
            )
            acc += val.real
        out[j] = max(acc, 0.0)


@njit(cache=True, nogil=True)
def noise_event(s, q, kraus, kweight, kident, start, count, fixed, u):
    """Sample and apply one Kraus operator; returns its index within the set.

    For ``fixed`` (mixed-unitary) sets the stored operators are the unitary
    parts and ``kweight`` holds their state-independent probabilities.
    """
    probs = np.empty(count)
    if fixed:
        for j in range(count):
            probs[j] = kweight[start + j]
    else:
        kraus_probabilities(s, q, kraus, start, count, probs)
    total = 0.0
    for j in range(count):
        total += probs[j]
    thresh = u * total
    chosen = -1
    acc = 0.0
    for j in range(count):
        if probs[j] <= 0.0:
            continue
        acc += probs[j]
        chosen = j
        if thresh < acc:
            break
    if chosen < 0:
        return 0
    op = start + chosen
    if kident[op]:
        return chosen
    apply_1q(s, q, kraus[op])
    if not fixed:
        scale = 1.0 / np.sqrt(probs[chosen])
        for i in range(s.shape[0]):
            s[i] *= scale
    return chosen


@njit(cache=True, nogil=True)
def sample_index(s, u):
    acc = 0.0
    last = 0
    for i in range(s.shape[0]):
        a = s[i]
        p = a.real * a.real + a.imag * a.imag
        if p > 0.0:
            last = i
        acc += p
        if u < acc:
            return i
    return last


@njit(cache=True, nogil=True)
def readout_flip(idx, n, p01, p10, stream):
    for q in range(n):
        u = next_uniform(stream)
        if (idx >> q) & 1:
            if u < p10:
                idx ^= 1 << q
        else:
            if u < p01:
                idx ^= 1 << q
    return idx


@njit(cache=True, nogil=True)
def run_gates(
    s, g_lo, g_hi, g_nq, g_qa, g_qb, g_mat, g_ev,
    ev_qubit, ev_kstart, ev_kcount, ev_fixed, kraus, kweight, kident, stream,
):
    for g in range(g_lo, g_hi):
        if g_nq[g] == 1:
            apply_1q(s, g_qa[g], g_mat[g])
        else:
            apply_2q(s, g_qa[g], g_qb[g], g_mat[g])
        for e in range(g_ev[g], g_ev[g + 1]):
            u = next_uniform(stream)
            noise_event(
                s, ev_qubit[e], kraus, kweight, kident,
                ev_kstart[e], ev_kcount[e], ev_fixed[e], u,
            )


@njit(cache=True, nogil=True)
def run_tree(
    n, g_nq, g_qa, g_qb, g_mat, g_ev,
    ev_qubit, ev_kstart, ev_kcount, ev_fixed, kraus, kweight, kident,
    sl_ptr, arities, root, child_lo, child_hi,
    has_readout, p01, p10, bufs, outcomes,
):
    """Depth-first execution of top-level subtrees ``child_lo..child_hi-1``.

    ``bufs`` holds depth+1 statevectors; logical slot d is the state after
    slice d-1 on the current path.  The last child of a node consumes its
    parent's slot in place (slot pointer swap), every other child copies.
    Outcomes are written at their lexicographic leaf index.
    Returns (nodes_executed, states_copied).
    """
    k = arities.shape[0]
    stride = np.ones(k, dtype=np.int64)
    for d in range(k - 2, -1, -1):
        stride[d] = stride[d + 1] * arities[d + 1]
    ptr = np.arange(k + 1)
    idx = np.zeros(k, dtype=np.int64)
    keys = np.zeros(k + 1, dtype=np.uint64)
    keys[0] = root
    stream = np.zeros(1, dtype=np.uint64)
    nodes = 0
    copies = 0
    for c0 in range(child_lo, child_hi):
        rootbuf = bufs[ptr[0]]
        rootbuf[:] = 0.0
        rootbuf[0] = 1.0
        idx[0] = c0
        d = 0
        while True:
            if idx[d] == arities[d] - 1:
                tmp = ptr[d]
                ptr[d] = ptr[d + 1]
                ptr[d + 1] = tmp
            else:
                bufs[ptr[d + 1]][:] = bufs[ptr[d]]
                copies += 1
            keys[d + 1] = child_key(keys[d], d, idx[d])
            stream[0] = keys[d + 1]
            s = bufs[ptr[d + 1]]
            run_gates(
                s, sl_ptr[d], sl_ptr[d + 1], g_nq, g_qa, g_qb, g_mat, g_ev,
                ev_qubit, ev_kstart, ev_kcount, ev_fixed, kraus, kweight, kident, stream,
            )
            nodes += 1
            if d < k - 1:
                d += 1
                idx[d] = 0
                continue
            out = sample_index(s, next_uniform(stream))
            if has_readout:
                out = readout_flip(out, n, p01, p10, stream)
            leaf = 0
            for j in range(k):
                leaf += idx[j] * stride[j]
            outcomes[leaf] = out
            while d > 0:
                idx[d] += 1
                if idx[d] < arities[d]:
                    break
                d -= 1
            if d == 0:
                break
    return nodes, copies
