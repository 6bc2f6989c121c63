"""Control-flow graph of a normalized log and back-edge detection.

Vertices are normalized UI keys (strings), edges are directly-follows
pairs. An artificial entry vertex points at the first UI of the log.

Back-edge detection walks the non-trivial strongly connected components.
A component whose header (a vertex dominating all the others) exists gives
up every internal edge into the header. A component without header is
irreducible: the loop-edge whose endpoints are joined by the longest simple
path is removed instead. Nested components of what is left are analysed
the same way until none remain.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from uiroutines.errors import RoutineError

log = logging.getLogger(__name__)

ENTRY = "<entry>"  # never a normalized key: those always end with "]"

HEADER = "header"
IRREDUCIBLE = "irreducible"

Edge = tuple[str, str]

DEFAULT_PATH_BUDGET = 20


@dataclass(frozen=True)
class Cfg:
    vertices: tuple[str, ...]  # first-occurrence order
    edges: frozenset[Edge]
    entry_target: str
    entry_vertex: str = ENTRY
    order: Mapping[str, int] = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_edges(cls, vertices: Sequence[str], edges: Iterable[Edge], entry_target: str) -> Cfg:
        """CFG over an explicit graph; ``vertices`` order stands in for first occurrence."""
        vertices = tuple(vertices)
        edges = frozenset(edges)
        if entry_target not in vertices:
            raise RoutineError(f"entry target {entry_target!r} is not a vertex")
        stray = {v for e in edges for v in e} - set(vertices)
        if stray:
            raise RoutineError(f"edges mention unknown vertices {sorted(stray)}")
        return cls(vertices, edges, entry_target, order={v: i for i, v in enumerate(vertices)})

    @property
    def entry_edge(self) -> Edge:
        return (self.entry_vertex, self.entry_target)

    def successors(self) -> dict[str, list[str]]:
        succ = {v: [] for v in self.vertices}
        succ[self.entry_vertex] = [self.entry_target]
        for a, b in sorted(self.edges, key=self.edge_key):
            succ[a].append(b)
        return succ

    def predecessors(self) -> dict[str, set[str]]:
        pred = {v: set() for v in self.vertices}
        pred[self.entry_target].add(self.entry_vertex)
        for a, b in self.edges:
            pred[b].add(a)
        return pred

    def rank(self, v: str) -> int:
        return -1 if v == self.entry_vertex else self.order[v]

    def edge_key(self, e: Edge):
        return (self.rank(e[0]), self.rank(e[1]))


def build_cfg(nlog: Sequence) -> Cfg:
    """Build the CFG of a normalized log.

    Items may be :class:`~uiroutines.uilog.NormalizedUI` or plain strings;
    anything with a ``key`` attribute is reduced to that key.
    """
    keys = [getattr(u, "key", u) for u in nlog]
    if not keys:
        raise RoutineError("cannot build a control-flow graph from an empty log")
    order: dict[str, int] = {}
    for k in keys:
        order.setdefault(k, len(order))
    edges = frozenset(zip(keys, keys[1:]))
    return Cfg(tuple(order), edges, keys[0], order=order)


@dataclass(frozen=True)
class DominatorTree:
    idom: Mapping[str, str]
    root: str = ENTRY

    def dominators(self, v: str) -> list[str]:
        """``v`` followed by its ancestors up to the root."""
        chain = [v]
        while chain[-1] != self.root:
            chain.append(self.idom[chain[-1]])
        return chain

    def dominates(self, a: str, b: str) -> bool:
        while True:
            if a == b:
                return True
            if b == self.root:
                return False
            b = self.idom[b]

    def children(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for v, d in self.idom.items():
            out.setdefault(d, []).append(v)
        return out


def _postorder(succ: Mapping[str, Sequence[str]], start: str) -> list[str]:
    seen = {start}
    out = []
    stack = [(start, iter(succ[start]))]
    while stack:
        v, it = stack[-1]
        for w in it:
            if w not in seen:
                seen.add(w)
                stack.append((w, iter(succ[w])))
                break
        else:
            stack.pop()
            out.append(v)
    return out


def compute_dominator_tree(g: Cfg) -> DominatorTree:
    """Immediate dominators by iterative dataflow over reverse postorder."""
    succ = g.successors()
    pred = g.predecessors()
    post = _postorder(succ, g.entry_vertex)
    if len(post) != len(g.vertices) + 1:
        missing = set(g.vertices) - set(post)
        raise RoutineError(f"vertices unreachable from entry: {sorted(missing)}")
    po_num = {v: i for i, v in enumerate(post)}
    rpo = post[::-1]

    idom = {g.entry_vertex: g.entry_vertex}

    def intersect(a, b):
        while a != b:
            while po_num[a] < po_num[b]:
                a = idom[a]
            while po_num[b] < po_num[a]:
                b = idom[b]
        return a

    changed = True
    while changed:
        changed = False
        for v in rpo[1:]:
            new = None
            for p in pred[v]:
                if p in idom:
                    new = p if new is None else intersect(p, new)
            if idom.get(v) != new:
                idom[v] = new
                changed = True
    del idom[g.entry_vertex]
    return DominatorTree(idom, g.entry_vertex)


@dataclass(frozen=True)
class Scc:
    vertices: frozenset[str]
    edges: frozenset[Edge]
    entries: tuple[str, ...] = ()

    @property
    def nontrivial(self) -> bool:
        return len(self.vertices) > 1


def _kosaraju(vertices: Sequence[Hashable], edges: Iterable[Edge]) -> list[list]:
    succ = {v: [] for v in vertices}
    pred = {v: [] for v in vertices}
    for a, b in edges:
        succ[a].append(b)
        pred[b].append(a)
    finish = []
    seen = set()
    for v in vertices:
        if v not in seen:
            seen.add(v)
            stack = [(v, iter(succ[v]))]
            while stack:
                u, it = stack[-1]
                for w in it:
                    if w not in seen:
                        seen.add(w)
                        stack.append((w, iter(succ[w])))
                        break
                else:
                    stack.pop()
                    finish.append(u)
    comps = []
    assigned = set()
    for v in reversed(finish):
        if v in assigned:
            continue
        comp = [v]
        assigned.add(v)
        i = 0
        while i < len(comp):
            for w in pred[comp[i]]:
                if w not in assigned:
                    assigned.add(w)
                    comp.append(w)
            i += 1
        comps.append(comp)
    return comps


def strongly_connected_components(vertices: Sequence[str], edges: Iterable[Edge]) -> list[Scc]:
    """All SCCs (trivial ones included) with their induced edges."""
    edges = list(edges)
    rank = {v: i for i, v in enumerate(vertices)}
    comps = _kosaraju(vertices, edges)
    member = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            member[v] = ci
    induced: list[set] = [set() for _ in comps]
    for a, b in edges:
        if member[a] == member[b]:
            induced[member[a]].add((a, b))
    out = [Scc(frozenset(c), frozenset(e)) for c, e in zip(comps, induced)]
    out.sort(key=lambda s: min(rank[v] for v in s.vertices))
    return out


def find_sccs(vertices: Sequence[str], edges: Iterable[Edge]) -> list[Scc]:
    """Non-trivial SCCs of the graph, ordered by their earliest vertex."""
    return [s for s in strongly_connected_components(vertices, edges) if s.nontrivial]


def find_header(scc: Scc, dt: DominatorTree) -> str | None:
    for h in scc.vertices:
        if all(dt.dominates(h, v) for v in scc.vertices):
            return h
    return None


def _dfs_from_entries(scc: Scc, rank: Mapping[str, int]):
    """DFS over the retained edges of ``scc``; yields the retreating edges and depths."""
    succ = {v: [] for v in scc.vertices}
    for a, b in scc.edges:
        succ[a].append(b)
    for v in succ:
        succ[v].sort(key=rank.__getitem__)
    starts = sorted(scc.entries, key=rank.__getitem__)
    starts += sorted(scc.vertices - set(starts), key=rank.__getitem__)

    depth: dict[str, int] = {}
    retreating = []
    for s in starts:
        if s in depth:
            continue
        depth[s] = 0
        on_stack = {s}
        stack = [(s, iter(succ[s]))]
        while stack:
            v, it = stack[-1]
            for w in it:
                if w in on_stack:
                    retreating.append((v, w))
                elif w not in depth:
                    depth[w] = depth[v] + 1
                    on_stack.add(w)
                    stack.append((w, iter(succ[w])))
                    break
            else:
                stack.pop()
                on_stack.discard(v)
    return retreating, depth


def find_loop_edges(scc: Scc, rank: Mapping[str, int]) -> set[Edge]:
    """Retreating edges of a DFS started at the SCC entries.

    An edge (x, y) is retreating when y is an ancestor of x (or x itself)
    in the depth-first tree. Entries and successors are visited in
    first-occurrence order given by ``rank``.
    """
    retreating, _ = _dfs_from_entries(scc, rank)
    return set(retreating)


def longest_simple_path(succ: Mapping[str, Sequence[str]], src: str, dst: str,
                        beat: int = -1) -> int:
    """Edge count of the longest simple path from ``src`` to ``dst``, -1 if none.

    Exact branch and bound: a branch is cut when the vertices still
    reachable from it cannot beat the best path found so far. Only paths
    longer than ``beat`` are looked for; ``beat`` is returned when there
    are none.
    """
    if src == dst:
        return max(0, beat)
    upper = len(succ) - 1
    best = beat
    visited = {src}

    def reach_count(v):
        # unvisited vertices reachable from v through unvisited vertices
        seen = {v}
        todo = [v]
        hit = False
        while todo:
            u = todo.pop()
            for w in succ[u]:
                if w not in seen and w not in visited:
                    seen.add(w)
                    if w == dst:
                        hit = True
                    else:
                        todo.append(w)
        return len(seen) - 1 if hit else -1

    def walk(v, length):
        nonlocal best
        if v == dst:
            if length > best:
                best = length
            return best == upper
        extra = reach_count(v)
        if extra < 0 or length + extra <= best:
            return False
        for w in succ[v]:
            if w not in visited:
                visited.add(w)
                done = walk(w, length + 1)
                visited.discard(w)
                if done:
                    return True
        return False

    walk(src, 0)
    return best


def deepest_loop_edge(scc: Scc, candidates: Iterable[Edge], rank: Mapping[str, int],
                      budget: int = DEFAULT_PATH_BUDGET) -> Edge:
    """Candidate (x, y) whose target y reaches x by the longest simple path.

    Path search is exact for components of at most ``budget`` vertices;
    larger components use the DFS depth difference of x and y instead.
    Ties go to the earlier source, then the earlier target.
    """
    candidates = sorted(set(candidates), key=lambda e: (rank[e[0]], rank[e[1]]))
    if not candidates:
        raise RoutineError("no loop-edge candidates in irreducible component")
    if len(candidates) == 1:
        return candidates[0]
    if len(scc.vertices) <= budget:
        succ = {v: [] for v in scc.vertices}
        for a, b in scc.edges:
            succ[a].append(b)
        for v in succ:
            succ[v].sort(key=rank.__getitem__)
        # candidates are in tie-break order, so a later one must be strictly longer
        lengths = {}
        best = -1
        for x, y in candidates:
            found = longest_simple_path(succ, y, x, beat=best)
            lengths[(x, y)] = found if found > best else -1
            best = max(best, found)
    else:
        log.warning(
            "component of %d vertices exceeds path budget %d; using DFS depth",
            len(scc.vertices), budget,
        )
        _, depth = _dfs_from_entries(scc, rank)
        lengths = {(x, y): depth[x] - depth[y] for x, y in candidates}
    return max(candidates, key=lambda e: (lengths[e], -rank[e[0]], -rank[e[1]]))


@dataclass(frozen=True)
class BackEdgeSet:
    """Back-edges with the kind of component each came from."""

    origin: Mapping[Edge, str]

    @property
    def edges(self) -> frozenset[Edge]:
        return frozenset(self.origin)

    def __contains__(self, e) -> bool:
        return e in self.origin

    def __len__(self):
        return len(self.origin)

    def __iter__(self):
        return iter(self.origin)

    def headers_only(self) -> BackEdgeSet:
        return BackEdgeSet({e: o for e, o in self.origin.items() if o == HEADER})

    def targets(self) -> set[str]:
        return {b for _, b in self.origin}

    def sources(self) -> set[str]:
        return {a for a, _ in self.origin}


def _with_entries(scc: Scc, pred: Mapping[str, set[str]]) -> Scc:
    entries = tuple(v for v in scc.vertices if pred[v] - scc.vertices)
    return Scc(scc.vertices, scc.edges, entries)


def detect_back_edges(g: Cfg, budget: int = DEFAULT_PATH_BUDGET) -> BackEdgeSet:
    """Back-edges of ``g``, including loop-edges cut out of irreducible components.

    A self-loop (v, v) is a one-vertex loop headed by v and is reported
    with header origin, so that removing every recorded edge always leaves
    an acyclic graph.
    """
    dt = compute_dominator_tree(g)
    pred = g.predecessors()
    rank = g.order
    found: dict[Edge, str] = {}

    def components(vertices, edges):
        comps = strongly_connected_components(
            sorted(vertices, key=rank.__getitem__), edges
        )
        for c in comps:
            if not c.nontrivial:
                for e in c.edges:  # only ever a self-loop
                    found[e] = HEADER
        return [_with_entries(c, pred) for c in comps if c.nontrivial]

    work = components(g.vertices, g.edges)[::-1]
    while work:
        scc = work.pop()
        edges = set(scc.edges)
        header = find_header(scc, dt)
        if header is not None:
            into = {e for e in edges if e[1] == header}
            for e in into:
                found[e] = HEADER
            edges -= into
        else:
            e = deepest_loop_edge(scc, find_loop_edges(scc, rank), rank, budget)
            found[e] = IRREDUCIBLE
            edges.discard(e)
        work.extend(components(scc.vertices, edges)[::-1])
    return BackEdgeSet(dict(sorted(found.items(), key=lambda kv: g.edge_key(kv[0]))))


def to_dot(g: Cfg, dt: DominatorTree | None = None, back_edges: BackEdgeSet | None = None) -> str:
    """Graphviz text for the CFG, its dominator tree and annotated back-edges."""
    ids = {g.entry_vertex: "entry"}
    ids.update({v: f"v{i}" for i, v in enumerate(g.vertices)})

    def q(s):
        return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'

    lines = ["digraph cfg {", "  subgraph cluster_cfg {", '    label="control-flow graph";']
    lines.append(f'    {ids[g.entry_vertex]} [label="entry", shape=point];')
    for v in g.vertices:
        lines.append(f"    {ids[v]} [label={q(v)}];")
    lines.append(f"    {ids[g.entry_vertex]} -> {ids[g.entry_target]};")
    origin = back_edges.origin if back_edges is not None else {}
    for a, b in sorted(g.edges, key=g.edge_key):
        attrs = ""
        if (a, b) in origin:
            style = "bold" if origin[(a, b)] == HEADER else "dashed"
            attrs = f' [color=red, style={style}, label="{origin[(a, b)]}"]'
        lines.append(f"    {ids[a]} -> {ids[b]}{attrs};")
    lines.append("  }")
    if dt is not None:
        lines += ["  subgraph cluster_dom {", '    label="dominator tree";']
        lines.append('    d_entry [label="entry", shape=point];')
        for v in g.vertices:
            lines.append(f"    d_{ids[v]} [label={q(v)}];")
        for v in g.vertices:
            parent = dt.idom[v]
            lines.append(f"    d_{ids[parent]} -> d_{ids[v]};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
