import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relhyp import audit
from relhyp.bicombing import (
    ConeTree,
    FiniteRootedTree,
    GeodesicAverageBicombing,
    TreeBicombing,
    audit_bicombing,
    geodesic_average_bicombing,
    tree_area_exhaustive,
    tree_bicombing,
)
from relhyp.chains import OneChain, boundary, chain_from_path
from relhyp.errors import CapExceeded, NotATree
from relhyp.graphs import SimpleGraph, barycentric_subdivision, coned_off_graph, cv, gv
from relhyp.groups import ball


def cycle(n):
    return SimpleGraph(range(n), [(k, (k + 1) % n) for k in range(n)])


def prufer_tree(seq):
    T = nx.from_prufer_sequence(seq)
    return SimpleGraph(T.nodes, T.edges), T


def nx_chain(T, a, b):
    """Chain of the networkx shortest path, built edge by edge."""
    p = nx.shortest_path(T, a, b)
    out = OneChain()
    for u, v in zip(p, p[1:]):
        out._add(u, v, 1)
    return out


def test_tree_examples():
    g, _ = prufer_tree([3, 3, 3, 4])
    q = tree_bicombing(g)
    assert q(2, 2) == OneChain()
    for a, b in itertools.combinations(g.vertices, 2):
        assert q(a, b).norm1() == g.distance(a, b)
        assert q(b, a) == -q(a, b)


def test_not_a_tree():
    with pytest.raises(NotATree):
        TreeBicombing(cycle(4))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 11), min_size=1, max_size=10))
def test_tripods_cancel_on_random_trees(seq):
    seq = [x % (len(seq) + 2) for x in seq]
    g, T = prufer_tree(seq)
    q = tree_bicombing(g)
    for a, b, c in itertools.combinations(g.vertices, 3):
        # the networkx chains give the same cancellation independently
        ref = nx_chain(T, a, b) + nx_chain(T, b, c) + nx_chain(T, c, a)
        assert ref == OneChain()
        assert q.area(a, b, c) == OneChain()
        assert q(a, b) == nx_chain(T, a, b)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 14), min_size=1, max_size=13))
def test_area_kernel_on_random_trees(seq):
    seq = [x % (len(seq) + 2) for x in seq]
    g, _ = prufer_tree(seq)
    t = FiniteRootedTree(g)
    best, total, count = tree_area_exhaustive(t, g.vertices)
    assert (best, total) == (0, 0)
    assert count == g.n * (g.n - 1) * (g.n - 2) // 6


def test_geodesic_average_on_square():
    q = geodesic_average_bicombing(cycle(4))
    c = q(0, 2)
    assert c == chain_from_path([0, 1, 2]) * Fraction(1, 2) + chain_from_path([0, 3, 2]) * Fraction(1, 2)
    assert c.norm1() == 2
    au = audit_bicombing(q, range(4))
    assert au.antisymmetric and au.boundary_ok


def test_geodesic_average_matches_tree():
    g, _ = prufer_tree([0, 0, 1, 5, 5, 2])
    q, t = geodesic_average_bicombing(g), tree_bicombing(g)
    for a, b in itertools.permutations(g.vertices, 2):
        assert q(a, b) == t(a, b)


def test_geodesic_average_through_cone(f2, w):
    hat = coned_off_graph(f2.mg, f2.fam, 5)
    c = geodesic_average_bicombing(hat)(gv(w("1")), gv(w("a^5")))
    assert c == chain_from_path([gv(w("1")), cv("A", w("1")), gv(w("a^5"))])
    assert c.norm1() == 2


def test_geodesic_cap():
    g = SimpleGraph()
    for k in range(10):
        g.add_edge((k, 0), (k + 1, 0))
        g.add_edge((k, 0), (k, 1))
        g.add_edge((k, 1), (k + 1, 1))
    # 10 geodesics, one per rung
    with pytest.raises(CapExceeded):
        GeodesicAverageBicombing(g, cap=9)((0, 0), (10, 1))


def test_geodesic_average_is_convex_flow():
    rng = random.Random(4)
    for _ in range(30):
        g = audit.random_connected_graph(rng, 25)
        q = geodesic_average_bicombing(g, cap=10 ** 9)
        a, b = rng.randrange(g.n), rng.randrange(g.n)
        c = q(a, b)
        assert boundary(c) == ({b: 1, a: -1} if a != b else {})
        assert c.norm1() == g.distance(a, b)
        da, db = g.bfs(a), g.bfs(b)
        # every edge is traversed forward with positive weight
        for (u, v), x in c.items():
            if x < 0:
                u, v = v, u
            assert da[g.index[v]] == da[g.index[u]] + 1


def test_audit_on_coned_off_truncation(f2):
    hat = coned_off_graph(f2.mg, f2.fam, 3)
    Y = barycentric_subdivision(hat)
    q = geodesic_average_bicombing(Y)
    sample = [gv(g) for g in ball(f2.mg, 1)]
    au = audit_bicombing(q, sample, distance=Y.distance, radius=3)
    assert au.antisymmetric and au.boundary_ok
    assert au.T_emp >= 0 and au.Mprime == 1
    doc = au.to_json()
    assert doc["radius"] == 3 and doc["kind"] == "geodesic-average"


def test_cone_tree_paths(f2, w):
    t = ConeTree(f2.fam, subdivided=False)
    p = t.path(gv(w("1")), gv(w("a^3b")))
    assert p == [gv(w("1")), cv("A", w("1")), gv(w("a^3")), cv("B", w("a^3")), gv(w("a^3b"))]
    assert ConeTree(f2.fam).distance(gv(w("1")), gv(w("a^3b"))) == 8


def test_cone_tree_needs_tree_factors():
    from relhyp.groups import FreeAbelian, FreeProduct, PeripheralFamily
    G = FreeProduct([FreeAbelian(2, ["x", "y"]), FreeAbelian(1, ["t"])])
    with pytest.raises(NotATree):
        ConeTree(PeripheralFamily(G, {"T": 1}))


def test_cone_tree_on_free_product_with_involution(z2):
    t = ConeTree(z2.fam)
    s = z2.parse("s")
    assert t.parent(gv(s)) is not None
    assert t.depth(gv(s)) == 2


def test_tree_bicombing_check_radius3(f2_ctx):
    status, detail = audit.check_tree_bicombing(f2_ctx, radius=3, equivariance_radius=1)
    assert status == "pass"
    assert detail["max_area"] == 0 and detail["equivariant"]
