"""Numba kernels behind the hot paths.

Everything here works on flat integer arrays: a tree on 1..n is a pair of
arrays (us, vs) with us[k] < vs[k] for each of the n-1 edges, and a Prüfer
code is an int64 array of length n-2 with symbols in 1..n.

Decoding follows the remove-the-smallest-leaf convention via the standard
linear pointer scan, so it matches the pure-Python decoder in trees.py
symbol for symbol.

The rejection kernel generates its own randomness with a splitmix-style
counter generator (constants below); bounded symbols come from 16-bit
chunks via Lemire multiply-shift with rejection, so they are exactly
uniform.  Work is split over a fixed number of logical workers independent
of the physical thread count; see rng.py for the seeding rule.
"""

from __future__ import annotations

import warnings

import numpy as np
from numba import njit, prange

# this box ships a TBB too old for numba; the automatic fallback to the
# next threading layer is fine and the warning is pure noise
warnings.filterwarnings("ignore", message=".*TBB.*", category=Warning)

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4B7C15)
_MIX_M1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_M2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX_M1
    z = (z ^ (z >> np.uint64(27))) * _MIX_M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _stream_state(seed, worker):
    """Initial counter state for a logical worker stream."""
    return _mix64(_mix64(np.uint64(seed)) ^ (np.uint64(worker) * GOLDEN_GAMMA))


@njit(cache=True, inline="always")
def _decode_into(code, n, us, vs, deg):
    """Decode a Prüfer code into edge arrays (smallest-leaf convention).

    us/vs must have length n-1 and deg length n+1; all are overwritten.
    Emitted edges are normalized to us[k] < vs[k] but are in removal
    order, not sorted.
    """
    m = n - 2
    for i in range(1, n + 1):
        deg[i] = 1
    for i in range(m):
        deg[code[i]] += 1
    ptr = 1
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    for i in range(m):
        v = code[i]
        if leaf < v:
            us[i] = leaf
            vs[i] = v
        else:
            us[i] = v
            vs[i] = leaf
        deg[v] -= 1
        if deg[v] == 1 and v < ptr:
            leaf = v
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    # the two remaining degree-1 vertices are `leaf` and n
    us[m] = leaf
    vs[m] = n


@njit(cache=True)
def decode_prufer(code, n):
    """Edge arrays (us, vs) for a single Prüfer code."""
    us = np.empty(n - 1, dtype=np.int64)
    vs = np.empty(n - 1, dtype=np.int64)
    deg = np.empty(n + 1, dtype=np.int64)
    _decode_into(code, n, us, vs, deg)
    return us, vs


@njit(cache=True)
def is_tree(us, vs, n):
    """True iff the n-1 edges are acyclic (hence a spanning tree).

    Union-find with path halving; assumes vertex labels are in 1..n.
    """
    if us.shape[0] != n - 1:
        return False
    parent = np.arange(n + 1, dtype=np.int64)
    for e in range(us.shape[0]):
        ru = us[e]
        while parent[ru] != ru:
            parent[ru] = parent[parent[ru]]
            ru = parent[ru]
        rv = vs[e]
        while parent[rv] != rv:
            parent[rv] = parent[parent[rv]]
            rv = parent[rv]
        if ru == rv:
            return False
        parent[ru] = rv
    return True


# ---------------------------------------------------------------------------
# crossing counters
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _count_pairwise(us, vs, m):
    """O(m^2) interleaving test over all edge pairs."""
    total = 0
    for i in range(m):
        ui = us[i]
        vi = vs[i]
        for j in range(i + 1, m):
            uj = us[j]
            vj = vs[j]
            if ui < uj:
                if uj < vi and vi < vj:
                    total += 1
            elif uj < ui:
                if ui < vj and vj < vi:
                    total += 1
    return total


@njit(cache=True)
def count_crossings_pairwise(us, vs):
    return _count_pairwise(us, vs, us.shape[0])


@njit(cache=True, inline="always")
def _count_fenwick(us, vs, m, n, bit):
    """O(m log n) counter: sweep left endpoints, Fenwick index on rights.

    For each group of edges sharing a left endpoint u, count previously
    inserted right endpoints strictly inside (u, v); chords sharing an
    endpoint never interleave, so groups are queried before insertion.
    bit is scratch of length >= n + 1; it is zeroed here (callers may pass
    uninitialized or dirty storage).
    """
    for i in range(n + 1):
        bit[i] = 0
    order = np.argsort(us[:m], kind="mergesort")
    total = 0
    i = 0
    while i < m:
        u = us[order[i]]
        j = i
        while j < m and us[order[j]] == u:
            j += 1
        for k in range(i, j):
            v = vs[order[k]]
            s = 0
            x = v - 1
            while x > 0:
                s += bit[x]
                x -= x & (-x)
            x = u
            while x > 0:
                s -= bit[x]
                x -= x & (-x)
            total += s
        for k in range(i, j):
            x = vs[order[k]]
            while x <= n:
                bit[x] += 1
                x += x & (-x)
        i = j
    return total


@njit(cache=True)
def count_crossings_fenwick(us, vs, n):
    bit = np.empty(n + 1, dtype=np.int64)
    return _count_fenwick(us, vs, us.shape[0], n, bit)


@njit(cache=True, parallel=True)
def batch_crossing_counts(codes, n, pairwise):
    """Decode every row and count its crossings (pairwise or Fenwick)."""
    rows = codes.shape[0]
    out = np.empty(rows, dtype=np.int64)
    for r in prange(rows):
        us = np.empty(n - 1, dtype=np.int64)
        vs = np.empty(n - 1, dtype=np.int64)
        deg = np.empty(n + 1, dtype=np.int64)
        _decode_into(codes[r], n, us, vs, deg)
        if pairwise:
            out[r] = _count_pairwise(us, vs, n - 1)
        else:
            bit = np.empty(n + 1, dtype=np.int64)
            out[r] = _count_fenwick(us, vs, n - 1, n, bit)
    return out


# ---------------------------------------------------------------------------
# exhaustive enumeration scans (codes in lexicographic order)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _code_from_index(t, n, m, code):
    x = t
    for i in range(m - 1, -1, -1):
        code[i] = 1 + x % n
        x //= n
    return code


@njit(cache=True, parallel=True)
def enumerate_crossing_counts(n):
    """Crossing count of every labelled tree, in lexicographic code order."""
    m = n - 2
    total = n**m
    out = np.empty(total, dtype=np.int64)
    for t in prange(total):
        code = np.empty(m, dtype=np.int64)
        _code_from_index(t, n, m, code)
        us = np.empty(n - 1, dtype=np.int64)
        vs = np.empty(n - 1, dtype=np.int64)
        deg = np.empty(n + 1, dtype=np.int64)
        _decode_into(code, n, us, vs, deg)
        out[t] = _count_pairwise(us, vs, n - 1)
    return out


@njit(cache=True, parallel=True)
def enumerate_counts_and_containment(n, pu, pv, require_all):
    """Per-tree crossing counts plus a containment flag for given edges.

    require_all=True flags trees containing every (pu[k], pv[k]);
    require_all=False flags trees containing at least one of them.
    Pairs must be normalized pu[k] < pv[k].
    """
    m = n - 2
    npairs = pu.shape[0]
    total = n**m
    counts = np.empty(total, dtype=np.int64)
    flags = np.empty(total, dtype=np.uint8)
    for t in prange(total):
        code = np.empty(m, dtype=np.int64)
        _code_from_index(t, n, m, code)
        us = np.empty(n - 1, dtype=np.int64)
        vs = np.empty(n - 1, dtype=np.int64)
        deg = np.empty(n + 1, dtype=np.int64)
        _decode_into(code, n, us, vs, deg)
        counts[t] = _count_pairwise(us, vs, n - 1)
        found = 0
        any_found = False
        for e in range(n - 1):
            for k in range(npairs):
                if us[e] == pu[k] and vs[e] == pv[k]:
                    found += 1
                    any_found = True
        if require_all:
            flags[t] = 1 if found == npairs else 0
        else:
            flags[t] = 1 if any_found else 0
    return counts, flags


# ---------------------------------------------------------------------------
# batch samplers
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def batch_contains_any_pair(codes, n, pu, pv):
    """Flag rows whose decoded tree contains at least one of the pairs."""
    rows = codes.shape[0]
    npairs = pu.shape[0]
    out = np.zeros(rows, dtype=np.uint8)
    for r in prange(rows):
        us = np.empty(n - 1, dtype=np.int64)
        vs = np.empty(n - 1, dtype=np.int64)
        deg = np.empty(n + 1, dtype=np.int64)
        _decode_into(codes[r], n, us, vs, deg)
        hit = False
        for e in range(n - 1):
            for k in range(npairs):
                if us[e] == pu[k] and vs[e] == pv[k]:
                    hit = True
                    break
            if hit:
                break
        out[r] = 1 if hit else 0
    return out


@njit(cache=True, inline="always")
def _edge_pos(us, vs, m, u, v):
    """Index of edge (u, v) (normalized) or -1."""
    for e in range(m):
        if us[e] == u and vs[e] == v:
            return e
    return -1


@njit(cache=True, inline="always")
def _rewire_inplace(us, vs, m, n, u, v, side, head, nxt, parent_edge, queue):
    """Add chord {u,v}, remove the cycle-path edge incident to u (side=0)
    or to v (side=1).  Caller guarantees {u,v} is not an edge.

    head/nxt implement an adjacency linked list over 2m directed slots;
    parent_edge and queue are BFS scratch of length n+1 / n.
    """
    # adjacency: directed slot 2e points us->vs, 2e+1 points vs->us
    for i in range(1, n + 1):
        head[i] = -1
    for e in range(m):
        a = us[e]
        b = vs[e]
        nxt[2 * e] = head[a]
        head[a] = 2 * e
        nxt[2 * e + 1] = head[b]
        head[b] = 2 * e + 1
    for i in range(1, n + 1):
        parent_edge[i] = -1
    parent_edge[u] = -2  # mark visited
    queue[0] = u
    qh = 0
    qt = 1
    while qh < qt:
        x = queue[qh]
        qh += 1
        if x == v:
            break
        slot = head[x]
        while slot != -1:
            e = slot >> 1
            y = vs[e] if (slot & 1) == 0 else us[e]
            if parent_edge[y] == -1:
                parent_edge[y] = e
                queue[qt] = y
                qt += 1
            slot = nxt[slot]
    if side == 1:
        # edge of the u..v path incident to v
        doomed = parent_edge[v]
    else:
        # walk back from v: the last parent edge before reaching u
        x = v
        e = parent_edge[x]
        while True:
            x = us[e] if vs[e] == x else vs[e]
            if x == u:
                break
            e = parent_edge[x]
        doomed = e
    if u < v:
        us[doomed] = u
        vs[doomed] = v
    else:
        us[doomed] = v
        vs[doomed] = u


@njit(cache=True, parallel=True)
def batch_construct_couplings(codes, n, quads, bits):
    """Explicit coupling construction per row.

    codes: (B, n-2) Prüfer codes; quads: (B, 4) sorted a<b<c<d;
    bits: (B, 2) branch choices (0: delete the path edge at the first
    vertex of the pair, 1: at the second).  Returns (x, x_s).
    """
    rows = codes.shape[0]
    m = n - 1
    x_out = np.empty(rows, dtype=np.int64)
    xs_out = np.empty(rows, dtype=np.int64)
    for r in prange(rows):
        us = np.empty(m, dtype=np.int64)
        vs = np.empty(m, dtype=np.int64)
        deg = np.empty(n + 1, dtype=np.int64)
        _decode_into(codes[r], n, us, vs, deg)
        bit = np.empty(n + 1, dtype=np.int64)
        x_out[r] = _count_fenwick(us, vs, m, n, bit)
        a = quads[r, 0]
        b = quads[r, 1]
        c = quads[r, 2]
        d = quads[r, 3]
        has_ac = _edge_pos(us, vs, m, a, c) >= 0
        has_bd = _edge_pos(us, vs, m, b, d) >= 0
        if has_ac and has_bd:
            xs_out[r] = x_out[r]
        else:
            head = np.empty(n + 1, dtype=np.int64)
            nxt = np.empty(2 * m, dtype=np.int64)
            parent_edge = np.empty(n + 1, dtype=np.int64)
            queue = np.empty(n, dtype=np.int64)
            if not has_ac:
                _rewire_inplace(us, vs, m, n, a, c, bits[r, 0], head, nxt, parent_edge, queue)
            if not has_bd:
                _rewire_inplace(us, vs, m, n, b, d, bits[r, 1], head, nxt, parent_edge, queue)
            xs_out[r] = _count_fenwick(us, vs, m, n, bit)
    return x_out, xs_out


@njit(cache=True, parallel=True)
def rejection_batch(n, quads, seed, workers, cap):
    """Size-bias sampling by rejection, one site per sample.

    quads[s] = (a, b, c, d) sorted; the tree for sample s is resampled
    until it contains both {a,c} and {b,d}; the accepted tree's crossing
    count and the number of rejected draws are recorded.  retries[s] = -1
    marks a cap hit.

    Randomness is generated in-kernel: splitmix counter streams sliced
    into 16-bit chunks, mapped to 1..n by Lemire multiply-shift with
    rejection (exactly uniform, reject probability n/65536).  A vertex
    absent from the code is a leaf, so an attempt whose degree tally
    rules out a required edge skips the check decode; rejected attempts
    never materialize edge arrays.  Sample s belongs to logical worker
    s // ceil(num_samples/workers), so output does not depend on the
    physical thread count.
    """
    m = n - 2
    num_samples = quads.shape[0]
    counts = np.empty(num_samples, dtype=np.int64)
    retries = np.empty(num_samples, dtype=np.int64)
    block = (num_samples + workers - 1) // workers
    nn = np.uint64(n)
    lemire_cut = np.uint64((1 << 16) % n)  # accept when low16(chunk*n) >= this
    stride = np.int64(n + 1)
    for w in prange(workers):
        state = _stream_state(seed, w)
        word = np.uint64(0)
        left = np.int64(0)
        code = np.empty(m, dtype=np.int64)
        us = np.empty(n - 1, dtype=np.int64)
        vs = np.empty(n - 1, dtype=np.int64)
        deg = np.empty(n + 1, dtype=np.int64)
        bit = np.empty(n + 1, dtype=np.int64)
        lo = w * block
        hi = lo + block
        if hi > num_samples:
            hi = num_samples
        for s in range(lo, hi):
            a = quads[s, 0]
            b = quads[s, 1]
            c = quads[s, 2]
            d = quads[s, 3]
            key1 = a * stride + c
            key2 = b * stride + d
            tries = np.int64(0)
            accepted = False
            while tries < cap:
                # generate the code and tally degrees in one pass
                for i in range(1, n + 1):
                    deg[i] = 1
                for i in range(m):
                    while True:
                        if left == 0:
                            state = state + GOLDEN_GAMMA
                            word = _mix64(state)
                            left = 4
                        chunk = word & np.uint64(0xFFFF)
                        word = word >> np.uint64(16)
                        left -= 1
                        prod = chunk * nn
                        if (prod & np.uint64(0xFFFF)) >= lemire_cut:
                            break
                    sym = np.int64(prod >> np.uint64(16)) + 1
                    code[i] = sym
                    deg[sym] += 1
                # a vertex not in the code is a leaf, and two leaves are
                # never adjacent (they would form an isolated component),
                # so such attempts skip the check decode
                if deg[a] == 1 and deg[c] == 1:
                    tries += 1
                    continue
                if deg[b] == 1 and deg[d] == 1:
                    tries += 1
                    continue
                # check-only decode: compare each emitted edge to the keys
                ptr = 1
                while deg[ptr] != 1:
                    ptr += 1
                leaf = ptr
                found1 = False
                found2 = False
                for i in range(m):
                    v2 = code[i]
                    lo2 = leaf if leaf < v2 else v2
                    hi2 = v2 if leaf < v2 else leaf
                    ek = lo2 * stride + hi2
                    found1 = found1 | (ek == key1)
                    found2 = found2 | (ek == key2)
                    deg[v2] -= 1
                    if deg[v2] == 1 and v2 < ptr:
                        leaf = v2
                    else:
                        ptr += 1
                        while deg[ptr] != 1:
                            ptr += 1
                        leaf = ptr
                ek = leaf * stride + n
                found1 = found1 | (ek == key1)
                found2 = found2 | (ek == key2)
                if found1 and found2:
                    accepted = True
                    break
                tries += 1
            if accepted:
                _decode_into(code, n, us, vs, deg)
                counts[s] = _count_fenwick(us, vs, n - 1, n, bit)
                retries[s] = tries
            else:
                counts[s] = -1
                retries[s] = -1
    return counts, retries
