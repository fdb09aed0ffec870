"""Numba kernels shared by the SC, Fast-SSC and restart code paths.

Workspace layout
----------------
``alpha`` is a float64 vector of length 2N-1. Stage ``s`` (node length 2^s)
lives at ``alpha[2^s - 1 : 2^(s+1) - 1]``, so stages 0..n-1 occupy the N-1
intermediate slots and stage n (the channel LLRs) occupies the last N.

``ps`` is a uint8 vector of length N-1 with the same per-stage offsets. Slot
``ps[stage s]`` holds the partial sums of the most recent *left* child at
stage s, i.e. exactly the vector a g-function at stage s consumes.

Node kinds in a schedule: 0 leaf, 1 R0, 2 R1, 3 REP, 4 SPC.
"""

from __future__ import annotations

import numpy as np
from numba import njit

LEAF, R0, R1, REP, SPC = 0, 1, 2, 3, 4


@njit(cache=True)
def f_min_sum(a, b):
    m = min(abs(a), abs(b))
    if (a < 0.0) != (b < 0.0):
        return -m
    return m


@njit(cache=True)
def g_func(a, b, beta):
    if beta:
        return b - a
    return b + a


@njit(cache=True)
def hard_decision(llr):
    return np.uint8(0) if llr >= 0.0 else np.uint8(1)


@njit(cache=True)
def polar_transform_inplace(x):
    n = x.shape[0]
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            for j in range(start, start + h):
                x[j] ^= x[j + h]
        h *= 2


@njit(cache=True)
def crc_remainder(msg, poly):
    """Remainder of msg(z) * z^r mod poly(z); MSB-first register, zero init."""
    r = poly.shape[0] - 1
    reg = np.zeros(r, dtype=np.uint8)
    for i in range(msg.shape[0]):
        fb = msg[i] ^ reg[0]
        for j in range(r - 1):
            reg[j] = reg[j + 1] ^ (fb & poly[j + 1])
        reg[r - 1] = fb & poly[r]
    return reg


@njit(cache=True)
def crc_ok(u, info_set, poly):
    r = poly.shape[0] - 1
    k = info_set.shape[0] - r
    reg = np.zeros(r, dtype=np.uint8)
    for i in range(k):
        fb = u[info_set[i]] ^ reg[0]
        for j in range(r - 1):
            reg[j] = reg[j + 1] ^ (fb & poly[j + 1])
        reg[r - 1] = fb & poly[r]
    for j in range(r):
        if reg[j] != u[info_set[k + j]]:
            return False
    return True


@njit(cache=True)
def trailing_zeros(x, cap):
    if x == 0:
        return cap
    t = 0
    while (x & 1) == 0:
        x >>= 1
        t += 1
    return t


@njit(cache=True)
def restore_stage_ps(u, psi, stage, out):
    """Re-encode the 2^stage estimates left of psi's stage-``stage`` node into ``out``."""
    size = 1 << stage
    seg = (psi >> (stage + 1)) << (stage + 1)
    for j in range(size):
        out[j] = u[seg + j]
    polar_transform_inplace(out[:size])


@njit(cache=True)
def descend(alpha, ps, pos, s_top, s_bot):
    """Compute alpha for stages s_top..s_bot of the path to leaf ``pos``."""
    for s in range(s_top, s_bot - 1, -1):
        size = 1 << s
        src = (2 << s) - 1
        dst = size - 1
        if (pos >> s) & 1:
            pso = size - 1
            for j in range(size):
                alpha[dst + j] = g_func(alpha[src + j], alpha[src + size + j], ps[pso + j])
        else:
            for j in range(size):
                alpha[dst + j] = f_min_sum(alpha[src + j], alpha[src + size + j])


@njit(cache=True)
def restart_path(alpha, ps, u, psi, s_bot, n):
    """Root-to-node traversal for a restart at psi; restores the g-stage partial sums.

    Returns the number of g-stages executed.
    """
    g_stages = 0
    for s in range(n - 1, s_bot - 1, -1):
        if (psi >> s) & 1:
            size = 1 << s
            restore_stage_ps(u, psi, s, ps[size - 1: 2 * size - 1])
            g_stages += 1
        descend(alpha, ps, psi, s, s)
    return g_stages


@njit(cache=True)
def combine_up(ps, scratch, start, sv, n):
    """Propagate a finished node's partial sums (in scratch[:2^sv]) towards the root."""
    s = sv
    while s < n and (start >> s) & 1:
        size = 1 << s
        off = size - 1
        for j in range(size):
            scratch[size + j] = scratch[j]
            scratch[j] ^= ps[off + j]
        s += 1
    if s < n:
        size = 1 << s
        off = size - 1
        for j in range(size):
            ps[off + j] = scratch[j]


@njit(cache=True)
def decode_node(kind, alpha, sv, start, info_mask, flips, u, alpha_dec, scratch):
    """Decode the node at ``start`` from alpha stage ``sv``.

    Writes the estimates into ``u`` and the node's partial sums into
    ``scratch[:2^sv]``.
    """
    size = 1 << sv
    off = size - 1
    if kind == LEAF:
        a = alpha[0]
        if info_mask[start]:
            b = hard_decision(a) ^ flips[start]
            alpha_dec[start] = a
        else:
            b = np.uint8(0)
        u[start] = b
        scratch[0] = b
    elif kind == R0:
        for j in range(size):
            u[start + j] = 0
            scratch[j] = 0
    elif kind == R1:
        for j in range(size):
            a = alpha[off + j]
            alpha_dec[start + j] = a
            scratch[j] = hard_decision(a) ^ flips[start + j]
        for j in range(size):
            u[start + j] = scratch[j]
        polar_transform_inplace(u[start: start + size])
    elif kind == REP:
        total = 0.0
        for j in range(size):
            total += alpha[off + j]
        last = start + size - 1
        alpha_dec[last] = total
        b = hard_decision(total) ^ flips[last]
        for j in range(size):
            u[start + j] = 0
            scratch[j] = b
        u[last] = b
    else:  # SPC
        # Even-parity decision first; flips then invert that decision and
        # parity is repaired again on the least reliable unflipped bit.
        # The decision LLR of bit j is the cost of inverting it under the
        # parity constraint: |alpha_j| -/+ |alpha_c|, with c the least
        # reliable other bit (minus when that bit already opposes its HD).
        parity = np.uint8(0)
        weakest = 0
        second = -1
        for j in range(size):
            a = alpha[off + j]
            bit = hard_decision(a)
            scratch[j] = bit
            parity ^= bit
            if j == 0:
                continue
            if abs(a) < abs(alpha[off + weakest]):
                second = weakest
                weakest = j
            elif second < 0 or abs(a) < abs(alpha[off + second]):
                second = j
        scratch[weakest] ^= parity
        sign = -1.0 if parity else 1.0
        for j in range(1, size):
            if j == weakest:
                cost = abs(alpha[off + second]) + sign * abs(alpha[off + j])
            else:
                cost = abs(alpha[off + j]) + sign * abs(alpha[off + weakest])
            alpha_dec[start + j] = cost if scratch[j] == 0 else -cost
        n_flips = 0
        for j in range(size):
            if flips[start + j]:
                scratch[j] ^= 1
                n_flips += 1
        if n_flips & 1:
            best = -1
            best_mag = np.inf
            for j in range(size):
                if flips[start + j]:
                    continue
                mag = abs(alpha[off + j])
                if mag < best_mag:
                    best_mag = mag
                    best = j
            if best >= 0:
                scratch[best] ^= 1
        for j in range(size):
            u[start + j] = scratch[j]
        polar_transform_inplace(u[start: start + size])


@njit(cache=True)
def run_trial(alpha, ps, u, alpha_dec, scratch, info_mask, kinds, starts, stages,
              flips, first_node, n):
    """Decode schedule nodes first_node.. to the end.

    With ``first_node > 0`` the caller must have written u[:starts[first_node]];
    the first node is reached through the restart path. Returns the number of
    g-stages that needed partial-sum restoration.
    """
    restored = 0
    n_nodes = kinds.shape[0]
    for idx in range(first_node, n_nodes):
        start = starts[idx]
        sv = stages[idx]
        if idx == first_node:
            if start > 0:
                restored = restart_path(alpha, ps, u, start, sv, n)
            else:
                descend(alpha, ps, start, n - 1, sv)
        else:
            s_top = trailing_zeros(start, n)
            if s_top > n - 1:
                s_top = n - 1
            if s_top >= sv:
                descend(alpha, ps, start, s_top, sv)
        decode_node(kinds[idx], alpha, sv, start, info_mask, flips, u, alpha_dec, scratch)
        combine_up(ps, scratch, start, sv, n)
    return restored
