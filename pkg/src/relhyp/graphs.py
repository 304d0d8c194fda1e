"""Cayley graphs, coned-off Cayley graphs and their barycentric subdivisions.

Vertex tags are plain tuples so that they sort lexicographically:

* ``('c', label, rep)``  cone vertex of the coset ``rep H_label``
* ``('g', x)``           group element
* ``('m', u, v)``        barycenter of the edge ``{u, v}`` with ``u < v``

Since ``'c' < 'g' < 'm'`` the positive orientation of a subdivided edge always
points from the original vertex to the barycenter, which is G-invariant.
"""
from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import CapExceeded, Disconnected, TruncationError
from .groups import Ball, MarkedGroup, PeripheralFamily, ball as make_ball


def gv(x):
    return ("g", x)


def cv(lam, rep):
    return ("c", lam, rep)


def bary(u, v):
    return ("m", u, v) if u < v else ("m", v, u)


def orient(u, v):
    """Positive orientation of the edge {u, v}: lexicographic on tags."""
    return (u, v) if u < v else (v, u)


def act(g, v, fam: PeripheralFamily | None = None):
    """Left action of a group element on vertex tags."""
    kind = v[0]
    if kind == "g":
        return ("g", g * v[1])
    if kind == "c":
        return ("c", v[1], fam.coset_rep(v[1], g * v[2]))
    if kind == "m":
        return bary(act(g, v[1], fam), act(g, v[2], fam))
    raise ValueError(f"not a vertex tag: {v!r}")


def tag_str(v) -> str:
    if not isinstance(v, tuple) or not v:
        return str(v)
    kind = v[0]
    if kind == "g":
        return str(v[1])
    if kind == "c":
        return f"{v[2]}{v[1]}" if not v[2].is_identity() else f"{v[1]}"
    if kind == "m":
        return f"[{tag_str(v[1])}|{tag_str(v[2])}]"
    return str(v)


class SimpleGraph:
    """Finite undirected simple graph on hashable vertex tags."""

    def __init__(self, vertices=(), edges=()):
        self.vertices: list = []
        self.index: dict = {}
        self.adj: list[set] = []
        for v in vertices:
            self.add_vertex(v)
        for u, v in edges:
            self.add_edge(u, v)
        self._csr = None
        self._apsp = None

    def add_vertex(self, v):
        if v not in self.index:
            self.index[v] = len(self.vertices)
            self.vertices.append(v)
            self.adj.append(set())
        self._csr = self._apsp = None
        return self.index[v]

    def add_edge(self, u, v):
        if u == v:
            return
        i, j = self.add_vertex(u), self.add_vertex(v)
        self.adj[i].add(j)
        self.adj[j].add(i)

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self.index

    @property
    def n(self):
        return len(self.vertices)

    @property
    def m(self):
        return sum(len(a) for a in self.adj) // 2

    def neighbors(self, v):
        return [self.vertices[j] for j in self.adj[self.index[v]]]

    def degree(self, v):
        return len(self.adj[self.index[v]])

    def has_edge(self, u, v):
        i, j = self.index.get(u), self.index.get(v)
        return i is not None and j is not None and j in self.adj[i]

    def edges(self):
        """Positively oriented edges."""
        out = []
        for i, nb in enumerate(self.adj):
            u = self.vertices[i]
            for j in nb:
                if i < j:
                    out.append(orient(u, self.vertices[j]))
        return out

    def csr(self):
        if self._csr is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            indptr[1:] = np.cumsum([len(a) for a in self.adj])
            indices = np.fromiter(itertools.chain.from_iterable(sorted(a) for a in self.adj),
                                  dtype=np.int64, count=int(indptr[-1]))
            self._csr = (indptr, indices)
        return self._csr

    def bfs(self, source):
        """Distance array from a vertex (-1 = unreachable)."""
        ip, ix = self.csr()
        return kernels.bfs_csr(ip, ix, self.index[source])

    def distance_matrix(self):
        if self._apsp is None:
            ip, ix = self.csr()
            self._apsp = kernels.all_pairs_bfs(ip, ix)
        return self._apsp

    def distance(self, u, v):
        for x in (u, v):
            if x not in self.index:
                raise TruncationError(f"{tag_str(x)} is not a vertex of this graph")
        i, j = self.index[u], self.index[v]
        d = int(self.distance_matrix()[i, j]) if self._apsp is not None else int(self.bfs(u)[j])
        if d < 0:
            raise Disconnected(f"{u!r} and {v!r} lie in different components")
        return d

    def is_connected(self):
        return self.n == 0 or bool((self.bfs(self.vertices[0]) >= 0).all())

    def is_tree(self):
        return self.is_connected() and self.m == self.n - 1

    def dump(self) -> str:
        """JSON adjacency with vertex tags."""
        adj = {tag_str(v): sorted(tag_str(self.vertices[j]) for j in self.adj[i])
               for i, v in enumerate(self.vertices)}
        return json.dumps({"vertices": [tag_str(v) for v in self.vertices], "adjacency": adj},
                          sort_keys=True, indent=1)


class GroupGraph(SimpleGraph):
    """A graph built from a truncated group; carries the data needed for the action."""

    def __init__(self, mg: MarkedGroup, fam: PeripheralFamily | None, ball: Ball, kind: str):
        super().__init__()
        self.mg = mg
        self.fam = fam
        self.ball = ball
        self.radius = ball.radius
        self.kind = kind

    def act(self, g, v):
        return act(g, v, self.fam)


def _ball_of(mg, radius_or_ball):
    if isinstance(radius_or_ball, Ball):
        return radius_or_ball
    return make_ball(mg, radius_or_ball)


def cayley_graph(mg: MarkedGroup, radius) -> GroupGraph:
    """Cayley graph restricted to a ball; edges (g, gs) for s in X minus the identity."""
    B = _ball_of(mg, radius)
    out = GroupGraph(mg, None, B, "cayley")
    for x in B:
        out.add_vertex(gv(x))
    for x in B:
        for s in mg.nontrivial_generators:
            y = x * s
            if y in B:
                out.add_edge(gv(x), gv(y))
    return out


def coned_off_graph(mg: MarkedGroup, fam: PeripheralFamily, radius) -> GroupGraph:
    """Cayley graph plus one cone vertex per peripheral coset meeting the ball."""
    base = cayley_graph(mg, radius)
    out = GroupGraph(mg, fam, base.ball, "coned")
    for v in base.vertices:
        out.add_vertex(v)
    for u, v in base.edges():
        out.add_edge(u, v)
    for x in base.ball:
        for lam in fam.labels:
            out.add_edge(gv(x), cv(lam, fam.coset_rep(lam, x)))
    return out


def barycentric_subdivision(g: SimpleGraph) -> SimpleGraph:
    if isinstance(g, GroupGraph):
        out = GroupGraph(g.mg, g.fam, g.ball, g.kind + "-subdivided")
    else:
        out = SimpleGraph()
    for v in g.vertices:
        out.add_vertex(v)
    for u, v in g.edges():
        m = bary(u, v)
        out.add_edge(u, m)
        out.add_edge(m, v)
    return out


def geodesic_count(g: SimpleGraph, u, v) -> int:
    du = g.bfs(u)
    dv = g.bfs(v)
    d = int(du[g.index[v]])
    if d < 0:
        raise Disconnected(f"{u!r} and {v!r} lie in different components")
    # count paths layer by layer on the geodesic DAG
    ways = {g.index[u]: 1}
    layer = [g.index[u]]
    for k in range(d):
        nxt = {}
        for i in layer:
            for j in g.adj[i]:
                if du[j] == k + 1 and dv[j] == d - k - 1:
                    nxt[j] = nxt.get(j, 0) + ways[i]
        ways.update(nxt)
        layer = list(nxt)
    return ways[g.index[v]]


def geodesics(g: SimpleGraph, u, v, cap: int = 10_000) -> list[list]:
    """All geodesic vertex paths from u to v, in a deterministic order."""
    count = geodesic_count(g, u, v)
    if count > cap:
        raise CapExceeded(f"{count} geodesics exceed cap {cap}")
    du = g.bfs(u)
    dv = g.bfs(v)
    d = int(du[g.index[v]])
    target = g.index[v]
    out = []

    def extend(path):
        i = path[-1]
        if i == target:
            out.append([g.vertices[k] for k in path])
            return
        k = len(path)
        for j in sorted(g.adj[i]):
            if du[j] == k and dv[j] == d - k:
                path.append(j)
                extend(path)
                path.pop()

    extend([g.index[u]])
    return out


def geodesic_path(g: SimpleGraph, u, v) -> list:
    """A single geodesic: smallest-index predecessor at each step."""
    dv = g.bfs(v)
    i, t = g.index[u], g.index[v]
    if dv[i] < 0:
        raise Disconnected(f"{u!r} and {v!r} lie in different components")
    path = [i]
    while i != t:
        i = min(j for j in g.adj[i] if dv[j] == dv[i] - 1)
        path.append(i)
    return [g.vertices[k] for k in path]


def two_vertex_connected(g: SimpleGraph) -> bool:
    """Connected, at least three vertices, and no cut vertex."""
    if g.n < 3:
        return False
    ip, ix = g.csr()
    comps, cut = kernels.articulation_points(ip, ix)
    return comps == 1 and not cut.any()


def circuit_count(g: SimpleGraph, edge, n: int) -> int:
    """Number of simple cycles of length n through the given edge."""
    u, v = edge
    if n < 3:
        return 0
    s, t = g.index[u], g.index[v]
    dt = g.bfs(v)
    count = 0
    # simple paths s -> t of length n-1, pruned by distance to t
    stack = [(s, iter(sorted(g.adj[s])))]
    on = {s}
    while stack:
        i, it = stack[-1]
        j = next(it, None)
        if j is None:
            stack.pop()
            on.discard(i)
            continue
        depth = len(stack)  # length of path once j is appended
        if j == t:
            if depth == n - 1:
                count += 1
            continue
        if j in on or depth >= n - 1 or dt[j] < 0 or depth + dt[j] > n - 1:
            continue
        on.add(j)
        stack.append((j, iter(sorted(g.adj[j]))))
    return count


def thin_triangle_defect(g: SimpleGraph, x, y, z, D=None) -> int:
    """Max distance from a point on one side to the union of the other two sides."""
    if D is None:
        D = g.distance_matrix()
    sides = [geodesic_path(g, x, y), geodesic_path(g, y, z), geodesic_path(g, z, x)]
    idx = [[g.index[w] for w in s] for s in sides]
    worst = 0
    for k in range(3):
        others = np.array(idx[(k + 1) % 3] + idx[(k + 2) % 3])
        sub = D[np.ix_(idx[k], others)]
        worst = max(worst, int(sub.min(axis=1).max()))
    return worst


@dataclass
class GraphAudit:
    delta: int
    circuits: list = field(default_factory=list)
    biconnected: bool = False
    stabilizer_trivial: bool | None = None
    radius: int | None = None
    truncated: bool = False
    triangles: int = 0

    def to_json(self):
        return {
            "delta": self.delta,
            "circuits": self.circuits,
            "biconnected": self.biconnected,
            "radius": self.radius,
            "stabilizer_trivial": self.stabilizer_trivial,
            "truncated": self.truncated,
            "triangles": self.triangles,
        }


def edge_stabilizers_trivial(g: GroupGraph, elements=None) -> bool:
    """No non-identity element fixes both endpoints of an edge."""
    elements = list(g.ball) if elements is None else list(elements)
    edges = g.edges()
    for h in elements:
        if h.is_identity():
            continue
        for u, v in edges:
            if g.act(h, u) == u and g.act(h, v) == v:
                return False
    return True


def edge_inversions(g: SimpleGraph, elements, action) -> list:
    """Pairs (h, edge) where h swaps the two endpoints of the edge."""
    out = []
    for h in elements:
        for u, v in g.edges():
            if action(h, u) == v and action(h, v) == u:
                out.append((h, (u, v)))
    return out


def audit_graph(g: SimpleGraph, probes=None, max_len: int = 5, vertices=None,
                triangle_cap: int = 200_000, seed: int = 0) -> GraphAudit:
    D = g.distance_matrix()
    pool = list(g.vertices if vertices is None else vertices)
    triples = list(itertools.combinations(pool, 3))
    if len(triples) > triangle_cap:
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(triples), size=triangle_cap, replace=False)
        triples = [triples[k] for k in sorted(pick)]
    delta = 0
    for x, y, z in triples:
        if min(D[g.index[x], g.index[y]], D[g.index[y], g.index[z]]) < 0:
            continue
        delta = max(delta, thin_triangle_defect(g, x, y, z, D))
    if probes is None:
        probes = g.edges()[:4]
    circuits = []
    for e in probes:
        for n in range(3, max_len + 1):
            circuits.append({"edge": [tag_str(e[0]), tag_str(e[1])], "len": n, "count": circuit_count(g, e, n)})
    out = GraphAudit(delta, circuits, two_vertex_connected(g), triangles=len(triples))
    if isinstance(g, GroupGraph):
        out.radius = g.radius
        out.truncated = not g.mg.group.finite
    return out
