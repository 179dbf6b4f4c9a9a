"""Tests for relational structures and the structural operations."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynferns.structures import (
    AugmentedStructure,
    BoundariedStructure,
    Multigraph,
    PreconditionError,
    Signature,
    Structure,
    canonical_rename,
    extract_boundary_data,
    forget,
    forget_set,
    forget_stripped,
    gaifman,
    glue,
    join,
    strip,
)

SIG = Signature({"flag": 0, "c": 1, "r": 2})


def bs(universe, boundary=(), **rels):
    s = Structure(SIG, set(universe))
    for name, tuples in rels.items():
        for t in tuples:
            s.add_tuple(name, t)
    return BoundariedStructure(s, boundary)


# -- signature ---------------------------------------------------------------


def test_signature_json_roundtrip():
    text = SIG.to_json()
    assert Signature.from_json(text) == SIG


def test_signature_rejects_bad_arity():
    with pytest.raises(ValueError):
        Signature({"t": 3})


# -- join --------------------------------------------------------------------


def test_join_two_edges_makes_path():
    a = bs([1, 2], [1, 2], r=[(1, 2)])
    b = bs([2, 3], [2, 3], r=[(2, 3)])
    out = join(a, b)
    assert out.base.universe == {1, 2, 3}
    assert out.boundary == {1, 2, 3}
    assert out.base.rel["r"] == {(1, 2), (2, 3)}


def test_join_with_empty_is_identity():
    a = bs([1, 2], [1], r=[(1, 2)], c=[(1,)])
    e = bs([], [])
    assert join(a, e) == a
    assert join(e, a) == a


def test_join_theta_halves_closes_cycle():
    # two u..v paths sharing only the boundary {u, v}
    u, v = 1, 5
    a = bs([1, 2, 5], [1, 5], r=[(1, 2), (2, 5)])
    b = bs([1, 3, 4, 5], [1, 5], r=[(1, 3), (3, 4), (4, 5)])
    out = join(a, b)
    expected = bs(
        [1, 2, 3, 4, 5], [1, 5], r=[(1, 2), (2, 5), (1, 3), (3, 4), (4, 5)]
    )
    assert out == expected
    # the gaifman graph is a single cycle: every vertex has degree 2
    pairs = gaifman(out.base)
    deg = {}
    for (x, y) in pairs:
        deg[x] = deg.get(x, 0) + 1
        deg[y] = deg.get(y, 0) + 1
    assert set(deg.values()) == {2}
    assert u in deg and v in deg


def test_join_rejects_overlap_outside_boundary():
    a = bs([1, 2], [1], r=[(1, 2)])
    b = bs([2, 3], [3], r=[(2, 3)])
    with pytest.raises(PreconditionError):
        join(a, b)


def test_join_commutes_and_associates_small():
    # exhaustive over tiny structures sharing boundary {1}
    tuples = [(1, 2), (2, 1), (2, 2)]
    variants = []
    for take in itertools.product([0, 1], repeat=3):
        rel = [t for t, keep in zip(tuples, take) if keep]
        variants.append(bs([1, 2], [1], r=rel))
    shifted = []
    for take in itertools.product([0, 1], repeat=2):
        rel = [t for t, keep in zip([(1, 3), (3, 3)], take) if keep]
        shifted.append(bs([1, 3], [1], r=rel))
    for a in variants:
        for b in shifted:
            assert join(a, b) == join(b, a)
    for a in variants:
        for b in shifted:
            c = bs([1], [1], c=[(1,)])
            assert join(join(a, b), c) == join(a, join(b, c))


# -- forget ------------------------------------------------------------------


def test_forget_sole_boundary_vertex():
    a = bs([1, 2], [1], r=[(1, 2)])
    out = forget(a, 1)
    assert out.boundary == frozenset()
    assert out.base == a.base


def test_forget_requires_boundary_membership():
    a = bs([1, 2], [1])
    with pytest.raises(PreconditionError):
        forget(a, 2)


def test_forget_set_order_independent():
    a = bs([1, 2, 3], [1, 2, 3], r=[(1, 2), (2, 3)])
    for order in itertools.permutations([1, 2, 3]):
        out = a
        for d in order:
            out = forget(out, d)
        assert out == forget_set(a, [1, 2, 3])
        assert out.boundary == frozenset()


# -- glue --------------------------------------------------------------------


def test_glue_identity():
    a = bs([1, 2], [1, 2], r=[(1, 2)])
    assert glue(a, {1: 1, 2: 2}) == a


def test_glue_split_cycle_vertex():
    # 4-vertex split cycle x1 - a - b - x2, glue x1, x2 -> v
    a = bs([1, 2, 3, 4], [1, 4], r=[(1, 2), (2, 3), (3, 4)])
    out = glue(a, {1: 9, 4: 9})
    expected = bs([2, 3, 9], [9], r=[(9, 2), (2, 3), (3, 9)])
    assert out == expected
    # unicyclic: gaifman has as many edges as vertices in the cycle
    assert len(gaifman(out.base)) == 3


def test_glue_path_endpoints_to_self_loop():
    a = bs([1, 2], [1, 2], r=[(1, 2)], c=[(1,)])
    out = glue(a, {1: 7, 2: 7})
    assert out.base.universe == {7}
    assert out.base.rel["r"] == {(7, 7)}
    assert out.base.rel["c"] == {(7,)}
    assert out.boundary == {7}


def test_glue_rejects_range_collision():
    a = bs([1, 2, 3], [1], r=[(1, 2)])
    with pytest.raises(PreconditionError):
        glue(a, {1: 2})  # 2 is interior


def test_glue_rejects_wrong_domain():
    a = bs([1, 2], [1])
    with pytest.raises(PreconditionError):
        glue(a, {1: 5, 2: 6})


# -- strip / forget_stripped ---------------------------------------------------


def test_strip_boundaryless_clears_flags_only():
    a = bs([1, 2], [], r=[(1, 2), (2, 2)], c=[(1,)], flag=[()])
    out = strip(a)
    assert not out.base.has_flag("flag")
    assert out.base.rel["r"] == {(1, 2), (2, 2)}
    assert out.base.rel["c"] == {(1,)}


def test_strip_removes_boundary_unary_and_loops():
    a = bs([1, 2], [1], r=[(1, 2), (1, 1), (2, 2)], c=[(1,), (2,)], flag=[()])
    out = strip(a)
    assert out.base.rel["c"] == {(2,)}
    assert out.base.rel["r"] == {(1, 2), (2, 2)}
    assert not out.base.has_flag("flag")


def test_strip_idempotent_and_distributes_over_join():
    a = bs([1, 2], [1], r=[(1, 2), (1, 1)], c=[(1,)], flag=[()])
    b = bs([1, 3], [1], r=[(1, 3)], c=[(1,), (3,)])
    assert strip(strip(a)) == strip(a)
    assert strip(join(a, b)) == join(strip(a), strip(b))


def test_forget_stripped_restores_predicates():
    b = bs([1, 2], [1, 2], r=[(1, 2), (1, 1)], c=[(1,)])
    s = strip(b)
    p = extract_boundary_data(b, {1})
    restored = forget_stripped(s, {1}, p)
    assert restored == strip(forget(b, 1))
    # restoring one unary predicate on one vertex adds exactly one tuple
    bare = forget_stripped(s, {1}, {})
    assert len(restored.base.rel["c"]) - len(bare.base.rel["c"]) == 1
    assert len(restored.base.rel["r"]) - len(bare.base.rel["r"]) == 1


def test_forget_stripped_empty_p_is_plain_forget():
    b = strip(bs([1, 2, 3], [1, 2], r=[(1, 2), (2, 3)]))
    assert forget_stripped(b, {1}, {}) == forget(b, 1)


def test_forget_stripped_requires_subset():
    b = strip(bs([1, 2], [1]))
    with pytest.raises(PreconditionError):
        forget_stripped(b, {2}, {})


# -- gaifman -------------------------------------------------------------------


def test_gaifman_flags_only_is_edgeless():
    a = bs([1, 2], [], flag=[()])
    assert gaifman(a.base) == set()


def test_gaifman_collapses_directions_and_loops():
    a = bs([1, 2], [], r=[(1, 2), (2, 1), (2, 2)])
    assert gaifman(a.base) == {(1, 2)}


@settings(max_examples=60, deadline=None)
@given(
    st.sets(
        st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=12
    )
)
def test_gaifman_matches_pairwise_scan(tuples):
    universe = {x for t in tuples for x in t} | {0}
    s = Structure(SIG, universe)
    for t in tuples:
        s.add_tuple("r", t)
    got = gaifman(s)
    expected = set()
    for u in universe:
        for v in universe:
            if u < v and any(set(t) == {u, v} for t in tuples):
                expected.add((u, v))
    assert got == expected


# -- canonical rename ------------------------------------------------------------


def test_canonical_rename_order_preserving():
    a = bs([7, 42, 100], [7, 42], r=[(7, 42), (42, 100)])
    out, mapping = canonical_rename(a)
    assert mapping[7] == 1 and mapping[42] == 2
    assert out.boundary == {1, 2}


def test_canonical_rename_empty_boundary_identity():
    a = bs([5, 6], [], r=[(5, 6)])
    out, mapping = canonical_rename(a)
    assert out == a
    assert all(mapping[v] == v for v in mapping)


def test_canonical_rename_idempotent():
    a = bs([3, 9, 20], [9, 20], r=[(3, 9), (9, 20)])
    once, _ = canonical_rename(a)
    twice, m2 = canonical_rename(once)
    assert twice == once
    assert all(m2[v] == v for v in once.boundary)


def test_canonical_rename_shifts_colliding_interior():
    # interior vertex 1 collides with the target boundary label
    a = bs([1, 7, 42], [7, 42], r=[(7, 1), (1, 42)])
    out, mapping = canonical_rename(a)
    assert out.boundary == {1, 2}
    assert 1 in {mapping[7], mapping[42]}
    interior = out.base.universe - set(out.boundary)
    assert interior.isdisjoint({1, 2})
    assert gaifman(out.base) != set()


# -- multigraph --------------------------------------------------------------


def test_multigraph_degree_counts_loops_twice():
    g = Multigraph()
    g.add_vertex(1)
    g.add_vertex(2)
    g.add_edge(1, 2)
    g.add_edge(1, 1)
    assert g.degree(1) == 3
    assert g.degree(2) == 1


def test_multigraph_parallel_edges_and_del_smallest():
    g = Multigraph()
    g.add_vertex(1)
    g.add_vertex(2)
    e1 = g.add_edge(1, 2)
    e2 = g.add_edge(1, 2)
    assert e1 < e2
    assert list(g.edge_ids_between(1, 2)) == [e1, e2]
    removed = g.del_edge(1, 2)
    assert removed == e1
    assert list(g.edge_ids_between(1, 2)) == [e2]


def test_multigraph_del_vertex_requires_isolated():
    g = Multigraph()
    g.add_vertex(1)
    g.add_vertex(2)
    g.add_edge(1, 2)
    with pytest.raises(PreconditionError):
        g.del_vertex(1)
    g.del_edge(1, 2)
    g.del_vertex(1)
    assert g.vertices == {2}


def test_multigraph_eq_up_to_edge_ids():
    g1 = Multigraph()
    g2 = Multigraph()
    for g in (g1, g2):
        g.add_vertex(1)
        g.add_vertex(2)
    g1.add_edge(1, 2, eid=5)
    g2.add_edge(1, 2, eid=9)
    assert g1 == g2


# -- augmented structures ------------------------------------------------------


def test_augmented_structure_guard_covers_gaifman():
    s = Structure(SIG, {1, 2})
    s.add_tuple("r", (1, 2))
    g = Multigraph()
    g.add_vertex(1)
    g.add_vertex(2)
    g.add_edge(1, 2)
    AugmentedStructure(s, g).check()


def test_augmented_structure_detects_unguarded_pair():
    s = Structure(SIG, {1, 2})
    s.add_tuple("r", (1, 2))
    g = Multigraph()
    g.add_vertex(1)
    g.add_vertex(2)
    with pytest.raises(PreconditionError):
        AugmentedStructure(s, g).check()
