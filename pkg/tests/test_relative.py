import itertools
import math
from collections import deque

import pytest

from relhyp import audit, config
from relhyp.errors import CapExceeded, TruncationError
from relhyp.groups import ball
from relhyp.relative import (
    Letter,
    RelGraph,
    RelPath,
    build_relative_graph,
    hat_distance,
    local_finiteness_profile,
    relative_distance,
    relative_geodesics,
)


def free_bfs(rel, target, limit=4):
    """Distance from 1 with no ball truncation, letters as enumerated by rel."""
    e = rel.G.identity
    dist = {e: 0}
    q = deque([e])
    letters = rel.letters()
    while q:
        u = q.popleft()
        if u == target:
            return dist[u]
        if dist[u] == limit:
            continue
        for l in letters:
            v = u * l.elem
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist.get(target)


@pytest.fixture(scope="module")
def rel3(f2):
    return build_relative_graph(f2.mg, f2.fam, 3, rho=6)


def test_h_edges_and_parallel_letters(rel3, w):
    edges = rel3.out_edges(w("1"))
    assert (Letter("H", "A", w("a^5")), w("a^5")) in edges
    to_a = [l for l, v in edges if v == w("a")]
    assert {l.kind for l in to_a} == {"X", "H"} and len(to_a) == 2
    assert rel3.has_h_edge(w("b"), w("ba^6"))
    assert not rel3.has_h_edge(w("1"), w("a^7"))


def test_empty_family_is_cayley_graph(f2h):
    rel = build_relative_graph(f2h.mg, f2h.fam, 2)
    assert {l.kind for l in rel.letters()} == {"X"}
    assert len(rel.letters()) == 4


def test_distance_examples(rel3, w):
    assert relative_distance(rel3, w("1"), w("a")) == 1
    assert relative_distance(rel3, w("1"), w("1")) == 0
    g = w("a^5b^5a^5")
    assert relative_distance(rel3, w("1"), g) == 3
    assert free_bfs(rel3, g) == 3


def test_geodesic_examples(rel3, w):
    assert len(relative_geodesics(rel3, w("1"), w("ab"))) == 4
    (p,) = relative_geodesics(rel3, w("1"), w("a^5b^5"))
    assert p.letters == (Letter("H", "A", w("a^5")), Letter("H", "B", w("b^5")))
    (t,) = relative_geodesics(rel3, w("1"), w("1"))
    assert t.length == 0
    with pytest.raises(CapExceeded):
        relative_geodesics(rel3, w("1"), w("abab"), cap=15)


def test_exact_geodesics_match_bfs(f2, w):
    exact = build_relative_graph(f2.mg, f2.fam, 3)
    bfs = build_relative_graph(f2.mg, f2.fam, 3, exact=False)
    assert exact.exact and not bfs.exact
    for g in ball(f2.mg, 3):
        a = {p.letters for p in exact.geodesics(w("1"), g)}
        b = {p.letters for p in bfs.geodesics(w("1"), g)}
        assert a == b


def test_paths_reverse_and_translate(rel3, w):
    p = relative_geodesics(rel3, w("b"), w("ba^2b^-1"))[0]
    r = p.reverse()
    assert r.start == p.end and r.end == p.start and r.length == p.length
    assert p.translate(w("a")).end == w("a") * p.end
    with pytest.raises(ValueError):
        p + p


@pytest.mark.parametrize("name", ["f2", "z2_z2"])
def test_exact_distance_equals_bfs_on_radius5(name):
    fx = config.load(name)
    r = 5 if name == "f2" else 3
    exact = build_relative_graph(fx.mg, fx.fam, r)
    bfs = build_relative_graph(fx.mg, fx.fam, r, exact=False)
    e = fx.group.identity
    for g in ball(fx.mg, r):
        assert exact.distance(e, g) == bfs.bfs_distance(e, g)


def test_syllable_count_is_distance(f2):
    from relhyp.groups import peripheral_syllables
    rel = build_relative_graph(f2.mg, f2.fam, 5)
    for g in ball(f2.mg, 5):
        assert rel.distance(f2.group.identity, g) == len(peripheral_syllables(g, f2.fam))


def test_triangle_inequality(f2):
    rel = build_relative_graph(f2.mg, f2.fam, 2)
    B = list(ball(f2.mg, 2))
    for f, g, h in itertools.product(B, repeat=3):
        assert rel.distance(f, h) <= rel.distance(f, g) + rel.distance(g, h)


def test_truncation_raises(f2, w):
    rel = build_relative_graph(f2.mg, f2.fam, 2, exact=False)
    with pytest.raises(TruncationError):
        rel.bfs_distance(w("1"), w("a^3"))


def test_hat_distance_examples(rel3, z2, w):
    assert hat_distance(rel3, "A", w("a^3")) == 3
    assert hat_distance(rel3, "A", w("b")) == math.inf
    assert rel3.bfs_hat_distance("A", w("a^3")) == 3
    zr = build_relative_graph(z2.mg, z2.fam, 5, exact=False)
    assert zr.bfs_hat_distance("P", z2.parse("x^2y^3")) == 5
    assert build_relative_graph(z2.mg, z2.fam, 2).hat_distance("P", z2.parse("x^2y^3")) == 5


def test_hat_distance_is_left_invariant(rel3, w):
    for f in ball(rel3.mg, 1):
        for k in range(-3, 4):
            h = w(f"a^{k}") if k else w("1")
            assert hat_distance(rel3, "A", f, f * h) == hat_distance(rel3, "A", h)


def test_profile_examples(rel3, z2):
    assert local_finiteness_profile(rel3, "A", 2) == 5
    assert local_finiteness_profile(rel3, "B", 0) == 1
    zr = build_relative_graph(z2.mg, z2.fam, 3)
    assert local_finiteness_profile(zr, "P", 1) == 5
    sizes = [local_finiteness_profile(zr, "P", n) for n in range(5)]
    # |{v in Z^2 : |v|_1 <= n}| = 2n^2 + 2n + 1
    assert sizes == [2 * n * n + 2 * n + 1 for n in range(5)]


def test_profile_bfs_route(f2):
    rel = build_relative_graph(f2.mg, f2.fam, 4, exact=False)
    assert [rel.local_finiteness_profile("A", n) for n in range(4)] == [1, 3, 5, 7]


def test_coset_distance(rel3, w):
    assert rel3.coset_distance(w("1"), "A", w("ba^2")) == 1
    assert rel3.coset_distance(w("1"), "A", w("a")) == 0


def test_oracle_check_passes(f2_ctx):
    status, detail = audit.check_relative_oracle(f2_ctx)
    assert status == "pass", detail


def test_oracle_uncertified_when_rho_small(f2):
    ctx = audit.Context(f2, radius=3, rho=4, calibrate=False)
    status, _ = audit.check_relative_oracle(ctx)
    assert status == "uncertified"
