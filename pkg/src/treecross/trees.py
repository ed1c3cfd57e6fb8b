"""Labelled trees on vertices 1..n and their Prüfer codes.

A tree is stored as a canonical (n-1, 2) int64 edge array with each row
normalized to u < v and rows sorted lexicographically, which keeps the hot
paths (crossing counters, batch simulation) allocation-friendly while the
Python-facing views (``edges``, ``adjacency``) are built lazily.

The Prüfer bijection uses the remove-the-smallest-labelled-leaf convention
throughout, fixing one specific bijection between length-(n-2) codes over
1..n and labelled trees (Cayley's n^(n-2) count).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .errors import GuardError, InvalidTreeError

ENUMERATION_MAX_N = 8  # 8^6 = 262144 trees; hard guard, not a soft default

EdgeLike = tuple[int, int]


class LabeledTree:
    """Immutable labelled tree on vertices 1..n given by its edge list."""

    __slots__ = ("n", "_earr", "_edge_set", "_adj", "_hash")

    def __init__(self, n: int, edges, *, _trusted: bool = False):
        self.n = int(n)
        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if not _trusted:
            arr = _canonicalize_edges(self.n, arr)
        self._earr = arr
        self._earr.setflags(write=False)
        self._edge_set: frozenset[EdgeLike] | None = None
        self._adj: dict[int, list[int]] | None = None
        self._hash: int | None = None

    @property
    def edge_array(self) -> np.ndarray:
        """Read-only (n-1, 2) int64 array, rows normalized and sorted."""
        return self._earr

    @property
    def edges(self) -> frozenset[EdgeLike]:
        """The set of unordered vertex pairs {u, v} as (u, v) with u < v."""
        if self._edge_set is None:
            self._edge_set = frozenset((int(u), int(v)) for u, v in self._earr)
        return self._edge_set

    @property
    def adjacency(self) -> dict[int, list[int]]:
        """Per-vertex sorted neighbour lists, built on first use."""
        if self._adj is None:
            adj: dict[int, list[int]] = {v: [] for v in range(1, self.n + 1)}
            for u, v in self._earr:
                adj[int(u)].append(int(v))
                adj[int(v)].append(int(u))
            for lst in adj.values():
                lst.sort()
            self._adj = adj
        return self._adj

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self.edges

    def path(self, u: int, v: int) -> list[int]:
        """Vertices of the unique u..v path, endpoints included (BFS)."""
        if not (1 <= u <= self.n and 1 <= v <= self.n):
            raise ValueError(f"path endpoints must be in 1..{self.n}")
        if u == v:
            return [u]
        adj = self.adjacency
        prev = {u: 0}
        frontier = [u]
        while frontier:
            nxt: list[int] = []
            for x in frontier:
                for y in adj[x]:
                    if y not in prev:
                        prev[y] = x
                        if y == v:
                            out = [v]
                            while out[-1] != u:
                                out.append(prev[out[-1]])
                            out.reverse()
                            return out
                        nxt.append(y)
            frontier = nxt
        raise InvalidTreeError("disconnected tree in path()")  # unreachable for valid trees

    def replace_edge(self, old: EdgeLike, new: EdgeLike) -> "LabeledTree":
        """New tree with `old` swapped for `new` (validates the result)."""
        ou, ov = min(old), max(old)
        arr = self._earr.copy()
        hit = np.flatnonzero((arr[:, 0] == ou) & (arr[:, 1] == ov))
        if hit.size != 1:
            raise InvalidTreeError(f"edge {old} not present")
        arr[hit[0], 0] = min(new)
        arr[hit[0], 1] = max(new)
        return LabeledTree(self.n, arr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledTree):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._earr, other._earr)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self._earr.tobytes()))
        return self._hash

    def __repr__(self) -> str:
        if self.n <= 8:
            return f"LabeledTree(n={self.n}, edges={sorted(self.edges)})"
        return f"LabeledTree(n={self.n}, <{self.n - 1} edges>)"


def _canonicalize_edges(n: int, arr: np.ndarray) -> np.ndarray:
    if n < 1:
        raise InvalidTreeError(f"vertex count must be >= 1, got {n}")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidTreeError("edges must be pairs")
    if arr.shape[0] != n - 1:
        raise InvalidTreeError(f"a tree on {n} vertices has {n - 1} edges, got {arr.shape[0]}")
    if arr.shape[0] and (arr.min() < 1 or arr.max() > n):
        raise InvalidTreeError(f"vertex labels must lie in 1..{n}")
    us = np.minimum(arr[:, 0], arr[:, 1])
    vs = np.maximum(arr[:, 0], arr[:, 1])
    if np.any(us == vs):
        raise InvalidTreeError("self-loops are not allowed")
    order = np.lexsort((vs, us))
    us = us[order]
    vs = vs[order]
    if us.shape[0] > 1:
        dup = (us[1:] == us[:-1]) & (vs[1:] == vs[:-1])
        if np.any(dup):
            raise InvalidTreeError("duplicate edges are not allowed")
    if not _kernels.is_tree(us, vs, n):
        raise InvalidTreeError("edges contain a cycle or leave the graph disconnected")
    return np.column_stack((us, vs))


def is_connected(n: int, edges: Iterable[EdgeLike]) -> bool:
    """Independent connectivity check (BFS over an adjacency dict)."""
    adj: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {1}
    stack = [1]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def is_acyclic(n: int, edges: Iterable[EdgeLike]) -> bool:
    """Independent acyclicity check (iterative leaf stripping)."""
    edges = list(edges)
    adj: dict[int, set[int]] = {v: set() for v in range(1, n + 1)}
    for u, v in edges:
        if v in adj[u]:
            return False  # parallel edge = 2-cycle
        adj[u].add(v)
        adj[v].add(u)
    leaves = [v for v in adj if len(adj[v]) == 1]
    removed = 0
    while leaves:
        x = leaves.pop()
        if not adj[x]:
            continue
        (y,) = adj[x]
        adj[x].clear()
        adj[y].discard(x)
        removed += 1
        if len(adj[y]) == 1:
            leaves.append(y)
    return removed == len(edges)


@dataclass(frozen=True)
class PruferSequence:
    """Length n-2 code over 1..n; empty when n = 2."""

    n: int
    code: tuple[int, ...]

    def __post_init__(self):
        if self.n < 2:
            raise GuardError(f"Prüfer codes exist for n >= 2, got n={self.n}")
        if len(self.code) != self.n - 2:
            raise ValueError(f"code length must be n-2={self.n - 2}, got {len(self.code)}")
        for s in self.code:
            if not 1 <= s <= self.n:
                raise ValueError(f"code symbol {s} outside 1..{self.n}")


def _decode_code(code: Sequence[int], n: int) -> list[EdgeLike]:
    """Linear Prüfer decode, smallest-leaf convention (pure Python twin
    of the kernel decoder; the two are cross-checked exhaustively)."""
    deg = [1] * (n + 1)
    for s in code:
        deg[s] += 1
    ptr = 1
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    edges: list[EdgeLike] = []
    for s in code:
        edges.append((leaf, s) if leaf < s else (s, leaf))
        deg[s] -= 1
        if deg[s] == 1 and s < ptr:
            leaf = s
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, n))
    return edges


def prufer_to_tree(code: PruferSequence) -> LabeledTree:
    """Decode a Prüfer sequence (inverse of :func:`tree_to_prufer`)."""
    edges = _decode_code(code.code, code.n)
    arr = np.array(edges, dtype=np.int64).reshape(len(edges), 2)
    us = arr[:, 0]
    vs = arr[:, 1]
    order = np.lexsort((vs, us))
    return LabeledTree(code.n, arr[order], _trusted=True)


def tree_to_prufer(t: LabeledTree) -> PruferSequence:
    """Encode by repeatedly recording the neighbour of the smallest leaf."""
    n = t.n
    if n < 2:
        raise GuardError("Prüfer encoding needs n >= 2")
    adj: list[set[int]] = [set() for _ in range(n + 1)]
    for u, v in t.edge_array:
        adj[int(u)].add(int(v))
        adj[int(v)].add(int(u))
    deg = [len(a) for a in adj]
    ptr = 1
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    code: list[int] = []
    for _ in range(n - 2):
        (s,) = adj[leaf]
        code.append(s)
        adj[s].discard(leaf)
        adj[leaf].clear()
        deg[leaf] = 0
        deg[s] -= 1
        if deg[s] == 1 and s < ptr:
            leaf = s
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    return PruferSequence(n, tuple(code))


def sample_uniform_tree(n: int, rng: np.random.Generator) -> LabeledTree:
    """Uniform tree on 1..n: n-2 uniform symbols, then decode."""
    if n < 2:
        raise GuardError(f"uniform tree sampling needs n >= 2, got {n}")
    code = rng.integers(1, n + 1, size=n - 2)
    edges = _decode_code(code.tolist(), n)
    arr = np.array(edges, dtype=np.int64).reshape(len(edges), 2)
    order = np.lexsort((arr[:, 1], arr[:, 0]))
    return LabeledTree(n, arr[order], _trusted=True)


def enumerate_trees(n: int) -> Iterator[LabeledTree]:
    """Every labelled tree exactly once, in lexicographic Prüfer order."""
    if not 2 <= n <= ENUMERATION_MAX_N:
        raise GuardError(f"tree enumeration is guarded to 2 <= n <= {ENUMERATION_MAX_N}, got {n}")
    for code in product(range(1, n + 1), repeat=n - 2):
        yield prufer_to_tree(PruferSequence(n, code))


def contains_forest(t: LabeledTree, forest: Iterable[EdgeLike]) -> bool:
    """True iff every forest edge is an edge of t."""
    es = t.edges
    for u, v in forest:
        if not (1 <= u <= t.n and 1 <= v <= t.n):
            raise ValueError(f"forest edge ({u},{v}) outside 1..{t.n}")
        if ((u, v) if u < v else (v, u)) not in es:
            return False
    return True


def path_tree(n: int) -> LabeledTree:
    """The path 1-2-...-n (zero crossings in convex position)."""
    if n < 1:
        raise GuardError("n >= 1 required")
    vs = np.arange(1, n + 1, dtype=np.int64)
    return LabeledTree(n, np.column_stack((vs[:-1], vs[1:])), _trusted=True)


def star_tree(n: int, center: int = 1) -> LabeledTree:
    """The star with the given centre (zero crossings in convex position)."""
    if n < 2:
        raise GuardError("n >= 2 required")
    if not 1 <= center <= n:
        raise ValueError("centre outside 1..n")
    others = np.array([v for v in range(1, n + 1) if v != center], dtype=np.int64)
    cs = np.full(n - 1, center, dtype=np.int64)
    return LabeledTree(n, np.column_stack((np.minimum(cs, others), np.maximum(cs, others))))


def format_tree_text(t: LabeledTree) -> str:
    """Tree text format: first line n, then n-1 lines "u v" with u < v."""
    lines = [str(t.n)]
    lines.extend(f"{u} {v}" for u, v in t.edge_array)
    return "\n".join(lines) + "\n"


def parse_tree_text(text: str) -> LabeledTree:
    """Parse the tree text format (strict: exactly n-1 edge lines)."""
    lines = [ln for ln in text.strip().splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty tree text")
    n = int(lines[0])
    rows = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line: {ln!r}")
        rows.append((int(parts[0]), int(parts[1])))
    return LabeledTree(n, np.array(rows, dtype=np.int64).reshape(len(rows), 2))
