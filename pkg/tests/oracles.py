"""Independent brute-force references used by the test suite."""

from __future__ import annotations

import itertools
import math
from collections import Counter


def all_subsequences(seq):
    out = set()
    for r in range(1, len(seq) + 1):
        for idx in itertools.combinations(range(len(seq)), r):
            out.add(tuple(seq[i] for i in idx))
    return out


def is_subsequence(p, s):
    i = 0
    for x in s:
        if i < len(p) and p[i] == x:
            i += 1
    return i == len(p)


def closed_patterns(db, min_support, min_length=1):
    """{pattern: support_count} by enumerating every subsequence."""
    n = len(db)
    floor = max(1, math.ceil(min_support * n - 1e-9))
    support = Counter()
    for seq in db:
        for p in all_subsequences(seq):
            support[p] += 1
    frequent = {p: c for p, c in support.items() if c >= floor}
    closed = {}
    for p, c in frequent.items():
        if len(p) < min_length:
            continue
        if any(len(q) > len(p) and c2 == c and is_subsequence(p, q) for q, c2 in frequent.items()):
            continue
        closed[p] = c
    return closed


def reachable(succ, start, removed=None):
    seen = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for w in succ.get(v, ()):
            if w != removed and w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def dominance_pairs(succ, entry, vertices):
    """{(a, b)}: a dominates b iff b is unreachable from entry once a is deleted."""
    pairs = set()
    for a in vertices:
        without = reachable(succ, entry, removed=a) if a != entry else set()
        for b in vertices:
            if b == a or b not in without:
                pairs.add((a, b))
    return pairs


def has_cycle(vertices, edges):
    succ = {v: [] for v in vertices}
    for a, b in edges:
        succ[a].append(b)
    for v in vertices:
        for w in succ[v]:
            if v in reachable(succ, w):
                return True
    return False


def longest_simple_path(edges, src, dst):
    succ = {}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
    best = -1

    def walk(v, seen, length):
        nonlocal best
        if v == dst:
            best = max(best, length)
            return
        for w in succ.get(v, ()):
            if w not in seen:
                walk(w, seen | {w}, length + 1)

    walk(src, {src}, 0)
    return best


def edit_distance(a, b):
    """Plain recursive-memo Levenshtein, written independently of the DP in the package."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))

    return d(len(a), len(b))


def random_digraph(rng, n, density):
    """Random digraph on v0..v{n-1} restricted to what v0 reaches: (vertices, edges, entry)."""
    names = [f"v{i}" for i in range(n)]
    edges = {(a, b) for a in names for b in names if rng.random() < density}
    succ = {}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
    reach = reachable(succ, names[0])
    keep = [v for v in names if v in reach]
    return keep, {(a, b) for a, b in edges if a in reach}, names[0]
