import random

import networkx as nx
import pytest

from relhyp import audit
from relhyp.errors import CapExceeded, Disconnected, TruncationError
from relhyp.graphs import (
    SimpleGraph,
    audit_graph,
    barycentric_subdivision,
    bary,
    cayley_graph,
    circuit_count,
    coned_off_graph,
    cv,
    edge_stabilizers_trivial,
    geodesic_count,
    geodesics,
    gv,
    thin_triangle_defect,
    two_vertex_connected,
)
from relhyp.groups import Cyclic, FreeGroup, MarkedGroup, ball


def cycle(n):
    return SimpleGraph(range(n), [(k, (k + 1) % n) for k in range(n)])


def path_graph(n):
    return SimpleGraph(range(n), [(k, k + 1) for k in range(n - 1)])


def to_nx(g):
    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from(g.edges())
    return G


def test_cyclic_cayley_graph():
    G = Cyclic(5)
    g = cayley_graph(MarkedGroup.default(G), 5)
    assert g.n == 5 and g.m == 5
    assert two_vertex_connected(g)


def test_f2_ball_is_tree(f2):
    g = cayley_graph(f2.mg, 2)
    assert (g.n, g.m) == (17, 16)
    assert g.is_tree()


def test_degree_with_bigger_generators():
    Z = FreeGroup(1, ["t"])
    X = tuple(Z.parse(s) for s in ("t", "t^-1", "t^2", "t^-2"))
    g = cayley_graph(MarkedGroup(Z, X), 3)
    assert g.degree(gv(Z.identity)) == 4


def test_coned_off_distances(f2, w):
    hat = coned_off_graph(f2.mg, f2.fam, 5)
    e = gv(w("1"))
    assert hat.distance(e, gv(w("a^5"))) == 2
    with pytest.raises(TruncationError):
        hat.distance(e, gv(w("a^5b^5")))
    big = coned_off_graph(f2.mg, f2.fam, 10)
    assert big.distance(e, gv(w("a^5b^5"))) == 4
    assert hat.has_edge(gv(w("1")), cv("A", w("1")))


def test_empty_family_gives_cayley_graph(f2h):
    hat = coned_off_graph(f2h.mg, f2h.fam, 3)
    cay = cayley_graph(f2h.mg, 3)
    assert set(hat.vertices) == set(cay.vertices)
    assert set(hat.edges()) == set(cay.edges())


def test_subdivision_examples(f2, w):
    one = barycentric_subdivision(SimpleGraph([0, 1], [(0, 1)]))
    assert one.n == 3 and one.distance(0, 1) == 2
    ten = barycentric_subdivision(cycle(5))
    assert ten.n == 10 and ten.m == 10
    Y = barycentric_subdivision(coned_off_graph(f2.mg, f2.fam, 5))
    assert Y.distance(gv(w("1")), gv(w("a^5"))) == 4


@pytest.mark.parametrize("name", ["f2", "z2_z2"])
def test_subdivision_doubles_distances(name):
    from relhyp import config
    fx = config.load(name)
    hat = coned_off_graph(fx.mg, fx.fam, 3)
    Y = barycentric_subdivision(hat)
    for u in hat.vertices[:40]:
        for v in hat.vertices:
            assert Y.distance(u, v) == 2 * hat.distance(u, v)


def test_geodesic_examples(f2, w):
    assert len(geodesics(path_graph(5), 0, 4)) == 1
    g4 = geodesics(cycle(4), 0, 2)
    assert len(g4) == 2 and all(len(p) == 3 for p in g4)
    hat = coned_off_graph(f2.mg, f2.fam, 3)
    paths = geodesics(hat, gv(w("1")), gv(w("ab")))
    assert paths == [[gv(w("1")), gv(w("a")), gv(w("ab"))]]


def test_geodesic_cap():
    # on a ladder every geodesic between opposite corners crosses exactly one rung
    g = SimpleGraph()
    for k in range(12):
        g.add_edge((k, 0), (k + 1, 0))
        g.add_edge((k, 0), (k, 1))
        g.add_edge((k, 1), (k + 1, 1))
    assert geodesic_count(g, (0, 0), (12, 1)) == 12
    with pytest.raises(CapExceeded):
        geodesics(g, (0, 0), (12, 1), cap=5)


def test_disconnected_distance():
    g = SimpleGraph([0, 1, 2], [(0, 1)])
    with pytest.raises(Disconnected):
        g.distance(0, 2)


def test_random_graphs_against_networkx():
    rng = random.Random(11)
    for _ in range(100):
        g = audit.random_connected_graph(rng, 40)
        G = to_nx(g)
        dist = dict(nx.all_pairs_shortest_path_length(G))
        a = rng.randrange(g.n)
        for b in range(g.n):
            assert g.distance(a, b) == dist[a][b]
        b = rng.randrange(g.n)
        mine = sorted(tuple(p) for p in geodesics(g, a, b, cap=100_000))
        ref = sorted(tuple(p) for p in nx.all_shortest_paths(G, a, b))
        assert mine == ref
        assert two_vertex_connected(g) == (g.n >= 3 and nx.is_biconnected(G))


def test_two_vertex_connected_examples():
    assert two_vertex_connected(cycle(5))
    assert not two_vertex_connected(path_graph(3))
    Z8 = Cyclic(8)
    mg = MarkedGroup.squared(Z8, [Z8.identity, Z8.parse("c"), Z8.parse("c^-1")])
    g = cayley_graph(mg, 8)
    assert two_vertex_connected(g) and audit.delete_and_test(g)


def test_tree_audit():
    t = SimpleGraph(range(7), [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
    au = audit_graph(t)
    assert au.delta == 0
    assert all(c["count"] == 0 for c in au.circuits)


def test_circuits_in_cycle():
    assert circuit_count(cycle(5), (0, 1), 5) == 1
    assert circuit_count(cycle(5), (0, 1), 4) == 0


def test_thin_triangles_on_cycle():
    assert thin_triangle_defect(cycle(6), 0, 2, 4) >= 1


def test_coned_off_audit(f2):
    hat = coned_off_graph(f2.mg, f2.fam, 3)
    au = audit_graph(hat, vertices=[gv(g) for g in ball(f2.mg, 2)])
    assert au.delta is not None and au.radius == 3 and au.truncated
    assert edge_stabilizers_trivial(hat, ball(f2.mg, 2))
    assert all(u[0] == "g" or v[0] == "g" for u, v in hat.edges())


def test_positive_edges_are_group_invariant(f2, w):
    Y = barycentric_subdivision(coned_off_graph(f2.mg, f2.fam, 3))
    # original vertex first, barycenter second
    for u, v in Y.edges():
        assert v[0] == "m" and u[0] in "cg"
    m = bary(gv(w("1")), gv(w("a")))
    assert m in Y
