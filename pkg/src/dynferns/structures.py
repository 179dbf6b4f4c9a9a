"""Relational structures over binary signatures, boundaried variants, and
the compositional operations (join / forget / glue / strip / rename) that the
rest of the library is built on.

Everything in this module is value-semantic: operations return new objects
and never mutate their inputs.  Universes are sets of non-negative integer
ids.  A "binary signature" means every predicate has arity 0, 1 or 2; the
arity-0 predicates act as global flags.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, Mapping, Optional, Set, Tuple

Vertex = int
Tup = Tuple[int, ...]


class Signature:
    """A set of named predicates, each with a fixed arity in {0, 1, 2}."""

    def __init__(self, predicates: Mapping[str, int]):
        for name, ar in predicates.items():
            if ar not in (0, 1, 2):
                raise ValueError("predicate %r has unsupported arity %r" % (name, ar))
        self.arity: Dict[str, int] = dict(predicates)

    def names(self, arity: Optional[int] = None):
        if arity is None:
            return sorted(self.arity)
        return sorted(n for n, a in self.arity.items() if a == arity)

    def __contains__(self, name: str) -> bool:
        return name in self.arity

    def __eq__(self, other) -> bool:
        return isinstance(other, Signature) and self.arity == other.arity

    def __repr__(self) -> str:
        return "Signature(%r)" % (self.arity,)

    @classmethod
    def from_json(cls, text: str) -> "Signature":
        """Load from a JSON document: a list of {"name":..., "arity":...}."""
        doc = json.loads(text)
        preds = {}
        for entry in doc:
            name = entry["name"]
            if name in preds:
                raise ValueError("duplicate predicate name %r" % name)
            preds[name] = int(entry["arity"])
        return cls(preds)

    def to_json(self) -> str:
        return json.dumps(
            [{"name": n, "arity": a} for n, a in sorted(self.arity.items())]
        )


EMPTY_SIGNATURE = Signature({})


class Structure:
    """A finite relational structure: a universe plus one tuple-set per
    predicate.  Nullary interpretations hold at most the empty tuple."""

    def __init__(
        self,
        signature: Signature,
        universe: Iterable[Vertex] = (),
        rel: Optional[Mapping[str, Iterable[Tup]]] = None,
    ):
        self.signature = signature
        self.universe: Set[Vertex] = set(universe)
        self.rel: Dict[str, Set[Tup]] = {name: set() for name in signature.arity}
        if rel:
            for name, tuples in rel.items():
                for t in tuples:
                    self.add_tuple(name, tuple(t))

    def add_tuple(self, name: str, t: Tup) -> None:
        ar = self.signature.arity[name]
        if len(t) != ar:
            raise ValueError("tuple %r has wrong arity for %r" % (t, name))
        for v in t:
            if v not in self.universe:
                raise ValueError("tuple %r uses id %r outside the universe" % (t, v))
        self.rel[name].add(t)

    def discard_tuple(self, name: str, t: Tup) -> None:
        self.rel[name].discard(tuple(t))

    def has_flag(self, name: str) -> bool:
        return () in self.rel[name]

    def copy(self) -> "Structure":
        out = Structure(self.signature)
        out.universe = set(self.universe)
        out.rel = {name: set(tuples) for name, tuples in self.rel.items()}
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Structure)
            and self.signature == other.signature
            and self.universe == other.universe
            and self.rel == other.rel
        )

    def sorted_items(self):
        """Deterministic (predicate, sorted tuple list) view, used as a
        serialization key downstream."""
        return [(name, sorted(self.rel[name])) for name in sorted(self.rel)]

    def __repr__(self) -> str:
        return "Structure(universe=%r, rel=%r)" % (
            sorted(self.universe),
            {n: sorted(ts) for n, ts in self.rel.items() if ts},
        )


class BoundariedStructure:
    """A structure with a designated boundary subset of its universe."""

    def __init__(self, base: Structure, boundary: Iterable[Vertex] = ()):
        bset = frozenset(boundary)
        if not bset <= base.universe:
            raise ValueError("boundary %r not inside universe" % (sorted(bset),))
        self.base = base
        self.boundary = bset

    def copy(self) -> "BoundariedStructure":
        return BoundariedStructure(self.base.copy(), self.boundary)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BoundariedStructure)
            and self.base == other.base
            and self.boundary == other.boundary
        )

    def __repr__(self) -> str:
        return "BoundariedStructure(%r, boundary=%r)" % (
            self.base,
            sorted(self.boundary),
        )


class PreconditionError(ValueError):
    """Raised when a structural operation is called outside its contract."""


def join(a: BoundariedStructure, b: BoundariedStructure) -> BoundariedStructure:
    """Union of two boundaried structures that overlap only on their
    boundaries."""
    if a.base.signature != b.base.signature:
        raise PreconditionError("join of structures over different signatures")
    overlap = a.base.universe & b.base.universe
    if overlap != (a.boundary & b.boundary):
        raise PreconditionError(
            "universes overlap outside the shared boundary: %r" % sorted(overlap)
        )
    out = Structure(a.base.signature)
    out.universe = a.base.universe | b.base.universe
    for name in out.rel:
        out.rel[name] = a.base.rel[name] | b.base.rel[name]
    return BoundariedStructure(out, a.boundary | b.boundary)


def forget(a: BoundariedStructure, d: Vertex) -> BoundariedStructure:
    """Remove one vertex from the boundary (the vertex stays in the base)."""
    if d not in a.boundary:
        raise PreconditionError("forget of non-boundary vertex %r" % d)
    return BoundariedStructure(a.base.copy(), a.boundary - {d})


def forget_set(a: BoundariedStructure, ds: Iterable[Vertex]) -> BoundariedStructure:
    out = a
    for d in sorted(set(ds)):
        out = forget(out, d)
    return out


def glue(a: BoundariedStructure, xi: Mapping[Vertex, Vertex]) -> BoundariedStructure:
    """Rewrite the boundary through the map xi, merging identified vertices.

    xi must be defined exactly on the boundary; its range must avoid the
    interior of a.  The result's boundary is the range of xi.
    """
    if set(xi) != set(a.boundary):
        raise PreconditionError("glue map domain must equal the boundary")
    interior = a.base.universe - a.boundary
    rng = set(xi.values())
    if rng & interior:
        raise PreconditionError("glue range collides with interior ids")
    out = Structure(a.base.signature)
    out.universe = interior | rng

    def f(v: Vertex) -> Vertex:
        return xi.get(v, v)

    for name, tuples in a.base.rel.items():
        out.rel[name] = {tuple(f(v) for v in t) for t in tuples}
    return BoundariedStructure(out, rng)


def strip(a: BoundariedStructure) -> BoundariedStructure:
    """Drop flags, unary tuples on boundary vertices, and binary self-loops
    (v, v) for boundary v.  Everything else is kept."""
    out = a.base.copy()
    for name, ar in a.base.signature.arity.items():
        if ar == 0:
            out.rel[name] = set()
        elif ar == 1:
            out.rel[name] = {t for t in out.rel[name] if t[0] not in a.boundary}
        else:
            out.rel[name] = {
                t
                for t in out.rel[name]
                if not (t[0] == t[1] and t[0] in a.boundary)
            }
    return BoundariedStructure(out, a.boundary)


def extract_boundary_data(
    a: BoundariedStructure, s: Iterable[Vertex]
) -> Dict[str, Set[Vertex]]:
    """Read the unary / self-loop data of `a` on the vertex set `s`, in the
    shape accepted by forget_stripped's restore map."""
    sset = set(s)
    p: Dict[str, Set[Vertex]] = {}
    for name, ar in a.base.signature.arity.items():
        if ar == 1:
            p[name] = {t[0] for t in a.base.rel[name] if t[0] in sset}
        elif ar == 2:
            p[name] = {t[0] for t in a.base.rel[name] if t[0] == t[1] and t[0] in sset}
    return p


def forget_stripped(
    a: BoundariedStructure,
    s: Iterable[Vertex],
    p: Mapping[str, Iterable[Vertex]],
) -> BoundariedStructure:
    """Forget the set `s` from the boundary of a stripped structure while
    restoring unary / self-loop data on `s` from the map `p`.

    `p` maps predicate names (arity 1 or 2) to subsets of `s`; a binary entry
    v means the self-loop tuple (v, v).
    """
    sset = set(s)
    if not sset <= a.boundary:
        raise PreconditionError("forget_stripped set must lie in the boundary")
    out = a.base.copy()
    for name, verts in p.items():
        ar = a.base.signature.arity[name]
        for v in verts:
            if v not in sset:
                raise PreconditionError("restore map mentions %r outside S" % v)
            if ar == 1:
                out.rel[name].add((v,))
            elif ar == 2:
                out.rel[name].add((v, v))
            else:
                raise PreconditionError("restore map for nullary predicate %r" % name)
    return BoundariedStructure(out, a.boundary - sset)


def gaifman(a: Structure) -> Set[Tuple[Vertex, Vertex]]:
    """Simple-graph edge set: distinct vertices co-occurring in a binary
    tuple; returned as sorted pairs."""
    edges = set()
    for name, ar in a.signature.arity.items():
        if ar != 2:
            continue
        for (u, v) in a.rel[name]:
            if u != v:
                edges.add((min(u, v), max(u, v)))
    return edges


_RENAME_OFFSET = 1 << 40  # shift applied to colliding non-boundary ids


def canonical_rename(
    a: BoundariedStructure,
) -> Tuple[BoundariedStructure, Dict[Vertex, Vertex]]:
    """Relabel the boundary to 1..|boundary| preserving numeric order.

    Non-boundary vertices keep their ids unless they collide with the new
    boundary labels, in which case they are shifted by a fixed offset; the
    returned map records every id that moved.
    """
    ordered = sorted(a.boundary)
    mapping: Dict[Vertex, Vertex] = {v: i + 1 for i, v in enumerate(ordered)}
    targets = set(mapping.values())
    for v in a.base.universe - a.boundary:
        if v in targets:
            mapping[v] = v + _RENAME_OFFSET
    out = Structure(a.base.signature)
    out.universe = {mapping.get(v, v) for v in a.base.universe}
    for name, tuples in a.base.rel.items():
        out.rel[name] = {tuple(mapping.get(v, v) for v in t) for t in tuples}
    return BoundariedStructure(out, {mapping[v] for v in a.boundary}), mapping


class Multigraph:
    """Undirected multigraph with explicit edge ids; parallel edges and
    self-loops allowed.  A self-loop contributes two to its vertex degree."""

    def __init__(self):
        self.vertices: Set[Vertex] = set()
        self.edges: Dict[int, Tuple[Vertex, Vertex]] = {}
        self._inc: Dict[Vertex, Set[int]] = {}
        self._next_edge_id = 0

    def add_vertex(self, v: Vertex) -> None:
        if v in self.vertices:
            raise PreconditionError("vertex %r already present" % v)
        self.vertices.add(v)
        self._inc[v] = set()

    def del_vertex(self, v: Vertex) -> None:
        if v not in self.vertices:
            raise PreconditionError("vertex %r not present" % v)
        if self._inc[v]:
            raise PreconditionError("vertex %r is not isolated" % v)
        self.vertices.remove(v)
        del self._inc[v]

    def add_edge(self, u: Vertex, v: Vertex, eid: Optional[int] = None) -> int:
        if u not in self.vertices or v not in self.vertices:
            raise PreconditionError("edge endpoints must exist: (%r, %r)" % (u, v))
        if eid is None:
            eid = self._next_edge_id
        if eid in self.edges:
            raise PreconditionError("edge id %r already in use" % eid)
        self._next_edge_id = max(self._next_edge_id, eid) + 1
        self.edges[eid] = (u, v)
        self._inc[u].add(eid)
        self._inc[v].add(eid)
        return eid

    def del_edge_id(self, eid: int) -> Tuple[Vertex, Vertex]:
        if eid not in self.edges:
            raise PreconditionError("edge id %r not present" % eid)
        u, v = self.edges.pop(eid)
        self._inc[u].discard(eid)
        self._inc[v].discard(eid)
        return (u, v)

    def edge_ids_between(self, u: Vertex, v: Vertex):
        """Sorted ids of all u-v edges (u == v means self-loops)."""
        if u not in self.vertices or v not in self.vertices:
            return []
        key = (min(u, v), max(u, v))
        out = []
        for eid in self._inc[u]:
            a, b = self.edges[eid]
            if (min(a, b), max(a, b)) == key:
                out.append(eid)
        return sorted(out)

    def del_edge(self, u: Vertex, v: Vertex) -> int:
        """Remove the smallest-id u-v edge (deterministic tie-break)."""
        ids = self.edge_ids_between(u, v)
        if not ids:
            raise PreconditionError("no edge between %r and %r" % (u, v))
        self.del_edge_id(ids[0])
        return ids[0]

    def degree(self, v: Vertex) -> int:
        d = 0
        for eid in self._inc.get(v, ()):
            a, b = self.edges[eid]
            d += 2 if a == b else 1
        return d

    def incident(self, v: Vertex):
        return set(self._inc.get(v, ()))

    def neighbors(self, v: Vertex) -> Set[Vertex]:
        out = set()
        for eid in self._inc.get(v, ()):
            a, b = self.edges[eid]
            out.add(b if a == v else a)
        return out

    def num_edges(self) -> int:
        return len(self.edges)

    def copy(self) -> "Multigraph":
        out = Multigraph()
        out.vertices = set(self.vertices)
        out.edges = dict(self.edges)
        out._inc = {v: set(s) for v, s in self._inc.items()}
        out._next_edge_id = self._next_edge_id
        return out

    def __eq__(self, other) -> bool:
        """Equality up to edge-id relabeling: same vertices and the same
        multiset of endpoint pairs."""
        if not isinstance(other, Multigraph):
            return NotImplemented
        if self.vertices != other.vertices:
            return False
        mine = sorted((min(u, v), max(u, v)) for u, v in self.edges.values())
        theirs = sorted((min(u, v), max(u, v)) for u, v in other.edges.values())
        return mine == theirs

    def __repr__(self) -> str:
        return "Multigraph(V=%r, E=%r)" % (
            sorted(self.vertices),
            sorted((min(u, v), max(u, v)) for u, v in self.edges.values()),
        )


class AugmentedStructure:
    """A structure together with a multigraph guard over the same universe;
    the structure's Gaifman graph must be a subgraph of the guard."""

    def __init__(self, structure: Structure, guard: Multigraph):
        self.structure = structure
        self.guard = guard

    def check(self) -> None:
        if self.structure.universe != self.guard.vertices:
            raise PreconditionError("structure universe and guard vertices differ")
        for (u, v) in gaifman(self.structure):
            if not self.guard.edge_ids_between(u, v):
                raise PreconditionError(
                    "pair (%r, %r) bound by a relation but not guarded" % (u, v)
                )
