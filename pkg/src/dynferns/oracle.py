"""Definition-based static reference implementations.

Everything in this module recomputes from scratch, straight from the
definitions, and is used as the ground truth by the test suite and by the
`oracle` CLI subcommand.  No attempt is made at efficiency beyond desk scale.
"""

import itertools
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .structures import (
    BoundariedStructure,
    Multigraph,
    PreconditionError,
    forget_set,
    join,
)


# ---------------------------------------------------------------------------
# connectivity helpers


def _components(g: Multigraph, skip_edge: Optional[int] = None) -> List[Set[int]]:
    seen: Set[int] = set()
    comps = []
    for start in sorted(g.vertices):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            for eid in g.incident(v):
                if eid == skip_edge:
                    continue
                a, b = g.edges[eid]
                w = b if a == v else a
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def _cyclomatic(g: Multigraph, vertices: Set[int]) -> int:
    """Cycle-space dimension of the subgraph induced by `vertices`
    (loops and parallel edges count)."""
    ne = sum(1 for (u, v) in g.edges.values() if u in vertices and v in vertices)
    sub = Multigraph()
    for v in vertices:
        sub.add_vertex(v)
    for eid, (u, v) in g.edges.items():
        if u in vertices and v in vertices:
            sub.add_edge(u, v, eid=eid)
    return ne - len(vertices) + len(_components(sub))


def is_forest(g: Multigraph) -> bool:
    """No cycles at all: no loops, no parallel edges, no simple-graph cycle."""
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (u, v) in g.edges.values():
        if u == v:
            return False
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


# ---------------------------------------------------------------------------
# essential edges / vertices


def essential_edges(g: Multigraph) -> Set[int]:
    """Edges on a cycle, plus bridges with a cycle on both sides."""
    out: Set[int] = set()
    for eid, (u, v) in sorted(g.edges.items()):
        if u == v:
            out.add(eid)  # a loop is a cycle
            continue
        comps = _components(g, skip_edge=eid)
        side_u = next(c for c in comps if u in c)
        if v in side_u:
            out.add(eid)  # still connected without e: e lies on a cycle
            continue
        side_v = next(c for c in comps if v in c)
        if _cyclomatic(g, side_u) >= 1 and _cyclomatic(g, side_v) >= 1:
            out.add(eid)
    return out


def essential_vertices(
    g: Multigraph, ess_edges: Optional[Set[int]] = None
) -> Set[int]:
    """Vertices with at least three incidences with essential edges
    (a loop contributes two incidences)."""
    if ess_edges is None:
        ess_edges = essential_edges(g)
    count: Dict[int, int] = {}
    for eid in ess_edges:
        u, v = g.edges[eid]
        count[u] = count.get(u, 0) + 1
        count[v] = count.get(v, 0) + 1
    return {v for v, c in count.items() if c >= 3}


# ---------------------------------------------------------------------------
# fern partition and quotient


class Fern:
    """One class of the fern partition: an edge set with its boundary."""

    def __init__(self, edge_ids: FrozenSet[int], g: Multigraph, boundary: Set[int]):
        self.edge_ids = frozenset(edge_ids)
        self.vertices = set()
        for eid in edge_ids:
            self.vertices.update(g.edges[eid])
        self.boundary = frozenset(boundary & self.vertices)
        ne = len(edge_ids)
        self.cycles = ne - len(self.vertices) + 1  # classes are connected
        self.shape = "tree" if self.cycles == 0 else "cyclic"

    def degree(self, v: int, g: Multigraph) -> int:
        d = 0
        for eid in self.edge_ids:
            a, b = g.edges[eid]
            d += (a == v) + (b == v)
        return d

    def __repr__(self):
        return "Fern(%s, edges=%s, boundary=%s)" % (
            self.shape,
            sorted(self.edge_ids),
            sorted(self.boundary),
        )


def fern_partition(
    g: Multigraph, ess_vertices: Optional[Set[int]] = None
) -> List[Fern]:
    """Partition E(H) by merging edges at every non-essential shared vertex."""
    if ess_vertices is None:
        ess_vertices = essential_vertices(g)
    parent = {eid: eid for eid in g.edges}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for v in g.vertices:
        if v in ess_vertices:
            continue
        inc = sorted(g.incident(v))
        for eid in inc[1:]:
            a, b = find(inc[0]), find(eid)
            if a != b:
                parent[a] = b
    classes: Dict[int, Set[int]] = {}
    for eid in g.edges:
        classes.setdefault(find(eid), set()).add(eid)
    out = [Fern(frozenset(c), g, ess_vertices) for c in classes.values()]
    out.sort(key=lambda f: min(f.edge_ids))
    return out


def quotient(
    g: Multigraph,
    ferns: Optional[List[Fern]] = None,
    ess_vertices: Optional[Set[int]] = None,
) -> Multigraph:
    """Quotient multigraph: essential vertices; an edge per two-boundary tree
    fern and a loop per one-boundary cyclic fern."""
    if ess_vertices is None:
        ess_vertices = essential_vertices(g)
    if ferns is None:
        ferns = fern_partition(g, ess_vertices)
    q = Multigraph()
    for v in sorted(ess_vertices):
        q.add_vertex(v)
    for f in ferns:
        b = sorted(f.boundary)
        if f.shape == "tree" and len(b) == 2:
            q.add_edge(b[0], b[1])
        elif f.shape == "cyclic" and len(b) == 1:
            q.add_edge(b[0], b[0])
    return q


class OracleReport:
    def __init__(self, g: Multigraph):
        self.graph = g.copy()
        self.essential_edges = essential_edges(g)
        self.essential_vertices = essential_vertices(g, self.essential_edges)
        self.ferns = fern_partition(g, self.essential_vertices)
        self.quotient = quotient(g, self.ferns, self.essential_vertices)
        self.answers = {"acyclic": is_forest(g)}

    def check(self) -> None:
        g = self.graph
        covered: Set[int] = set()
        for f in self.ferns:
            assert not (covered & f.edge_ids), "ferns must partition the edges"
            covered |= f.edge_ids
            assert f.cycles in (0, 1), "a fern has at most one cycle"
            if f.shape == "tree":
                assert len(f.boundary) <= 2
                for v in f.boundary:
                    assert f.degree(v, g) == 1, "tree-fern boundary is a leaf"
            else:
                assert len(f.boundary) <= 1
                cycle_edges = {
                    eid for eid in f.edge_ids if eid in self.essential_edges
                }
                for v in f.boundary:
                    assert f.degree(v, g) == 2, "cyclic-fern boundary has degree 2"
                    assert any(
                        v in g.edges[eid] for eid in cycle_edges
                    ), "cyclic-fern boundary lies on the cycle"
        assert covered == set(g.edges), "ferns must cover the edges"
        for v in self.quotient.vertices:
            assert self.quotient.degree(v) >= 3, "quotient min degree >= 3"

    def to_json_dict(self):
        return {
            "essential_edges": sorted(self.essential_edges),
            "essential_vertices": sorted(self.essential_vertices),
            "ferns": [
                {
                    "shape": f.shape,
                    "edges": sorted(f.edge_ids),
                    "boundary": sorted(f.boundary),
                }
                for f in self.ferns
            ],
            "quotient": {
                "vertices": sorted(self.quotient.vertices),
                "edges": sorted(self.quotient.edges.values()),
            },
            "answers": self.answers,
        }


# ---------------------------------------------------------------------------
# exact property oracles


def exact_fvs(g: Multigraph, budget: int = 14) -> int:
    """Minimum number of vertices whose removal leaves a forest."""
    if len(g.vertices) > budget:
        raise PreconditionError("exact_fvs budget exceeded")
    verts = sorted(g.vertices)
    for size in range(len(verts) + 1):
        for s in itertools.combinations(verts, size):
            if is_forest(_without(g, set(s))):
                return size
    return len(verts)


def _without(g: Multigraph, s: Set[int]) -> Multigraph:
    out = Multigraph()
    for v in g.vertices:
        if v not in s:
            out.add_vertex(v)
    for eid, (u, v) in g.edges.items():
        if u not in s and v not in s:
            out.add_edge(u, v, eid=eid)
    return out


def simple_cycle_vertex_sets(g: Multigraph) -> Set[FrozenSet[int]]:
    """Vertex sets of all simple cycles: loops, parallel pairs, and
    simple-graph cycles of length >= 3."""
    out: Set[FrozenSet[int]] = set()
    adj: Dict[int, Set[int]] = {v: set() for v in g.vertices}
    for (u, v) in g.edges.values():
        if u == v:
            out.add(frozenset((u,)))
        else:
            if len(list(g.edge_ids_between(u, v))) >= 2:
                out.add(frozenset((u, v)))
            adj[u].add(v)
            adj[v].add(u)

    def extend(start, path, on_path):
        v = path[-1]
        for w in sorted(adj[v]):
            if w == start and len(path) >= 3:
                out.add(frozenset(path))
            elif w > start and w not in on_path:
                path.append(w)
                on_path.add(w)
                extend(start, path, on_path)
                on_path.discard(w)
                path.pop()

    for start in sorted(g.vertices):
        extend(start, [start], {start})
    return out


def exact_cycle_packing(g: Multigraph, budget: int = 12) -> int:
    """Maximum number of vertex-disjoint cycles."""
    if len(g.vertices) > budget:
        raise PreconditionError("exact_cycle_packing budget exceeded")
    cycles = sorted(simple_cycle_vertex_sets(g), key=sorted)
    memo: Dict[FrozenSet[int], int] = {}

    def pack(avail: FrozenSet[int]) -> int:
        usable = [c for c in cycles if c <= avail]
        if not usable:
            return 0
        if avail in memo:
            return memo[avail]
        pivot = min(min(c) for c in usable)
        best = pack(avail - {pivot})
        for c in usable:
            if pivot in c:
                best = max(best, 1 + pack(avail - c))
        memo[avail] = best
        return best

    return pack(frozenset(g.vertices))


def exact_variant(
    g: Multigraph,
    variant: str,
    p: int,
    budget: int = 14,
    empty_is_tree: bool = True,
) -> bool:
    """Does some S with |S| <= p make G - S a forest and satisfy the variant?

    connected: G[S] is connected (the empty set counts as connected);
    independent: no edge of G joins two distinct vertices of S;
    tree-deletion: G - S is a single tree.
    """
    if variant not in ("connected", "independent", "tree-deletion"):
        raise ValueError("unknown variant: %r" % variant)
    if len(g.vertices) > budget:
        raise PreconditionError("exact_variant budget exceeded")
    verts = sorted(g.vertices)
    for size in range(min(p, len(verts)) + 1):
        for s in itertools.combinations(verts, size):
            sset = set(s)
            rest = _without(g, sset)
            if not is_forest(rest):
                continue
            if variant == "connected":
                if _induced_connected(g, sset):
                    return True
            elif variant == "independent":
                if _independent(g, sset):
                    return True
            else:
                if _single_tree(rest, empty_is_tree):
                    return True
    return False


def _induced_connected(g: Multigraph, s: Set[int]) -> bool:
    if len(s) <= 1:
        return True
    sub = Multigraph()
    for v in s:
        sub.add_vertex(v)
    for (u, v) in g.edges.values():
        if u in s and v in s and u != v:
            sub.add_edge(u, v)
    return len(_components(sub)) == 1


def _independent(g: Multigraph, s: Set[int]) -> bool:
    # self-loops do not spoil independence (underlying simple-graph reading)
    return not any(
        u in s and v in s and u != v for (u, v) in g.edges.values()
    )


def _single_tree(g: Multigraph, empty_is_tree: bool) -> bool:
    if not g.vertices:
        return empty_is_tree
    return is_forest(g) and len(_components(g)) == 1


# ---------------------------------------------------------------------------
# smash


def smash(ensemble: Iterable[BoundariedStructure]) -> BoundariedStructure:
    """Join every member and forget the union of their boundaries."""
    pieces = list(ensemble)
    if not pieces:
        raise PreconditionError("smash needs at least one member")
    total = pieces[0]
    for piece in pieces[1:]:
        total = join(total, piece)
    return forget_set(total, set(total.boundary))
