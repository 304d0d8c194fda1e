"""Homological bicombings and their audit.

``q[a, b]`` is a 1-chain with boundary ``b - a``.  Two constructions:

* ``TreeBicombing``: the unique tree path, on a finite tree or on the implicit
  cone tree of a free product (cone edges for peripheral factors, Cayley edges
  for non-peripheral factors whose Cayley graph is a tree), subdivided.
* ``GeodesicAverageBicombing``: uniform average over all geodesics.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .chains import OneChain, boundary, chain_from_path
from .errors import CapExceeded, Disconnected, NotATree, TruncationError
from .graphs import SimpleGraph, act, bary, cv, geodesic_count, gv
from .groups import Ball, Cyclic, FreeGroup, FreeProduct, PeripheralFamily


class RootedTree:
    """Minimal interface: ``parent(v)`` (None at the root) and ``depth(v)``."""

    def parent(self, v):
        raise NotImplementedError

    def depth(self, v):
        raise NotImplementedError

    def path(self, a, b):
        """Vertex path from a to b."""
        up, down = [a], [b]
        da, db = self.depth(a), self.depth(b)
        while da > db:
            a = self.parent(a)
            up.append(a)
            da -= 1
        while db > da:
            b = self.parent(b)
            down.append(b)
            db -= 1
        while a != b:
            a, b = self.parent(a), self.parent(b)
            up.append(a)
            down.append(b)
        return up + down[-2::-1]

    def distance(self, a, b):
        return len(self.path(a, b)) - 1

    def arrays(self, vertices):
        """Parent/depth index arrays for a parent-closed vertex list."""
        index = {v: i for i, v in enumerate(vertices)}
        parent = np.full(len(vertices), -1, dtype=np.int32)
        depth = np.zeros(len(vertices), dtype=np.int32)
        for v, i in index.items():
            p = self.parent(v)
            depth[i] = self.depth(v)
            if p is not None:
                if p not in index:
                    raise TruncationError(f"parent of {v!r} missing from vertex list")
                parent[i] = index[p]
        return parent, depth, index


class FiniteRootedTree(RootedTree):
    def __init__(self, g: SimpleGraph, root=None):
        if not g.is_tree():
            raise NotATree("graph is not a tree")
        self.graph = g
        root = g.vertices[0] if root is None else root
        self.root = root
        self._parent = {root: None}
        self._depth = {root: 0}
        order = [root]
        for v in order:
            for w in g.neighbors(v):
                if w not in self._depth:
                    self._parent[w] = v
                    self._depth[w] = self._depth[v] + 1
                    order.append(w)

    def parent(self, v):
        return self._parent[v]

    def depth(self, v):
        return self._depth[v]

    def __contains__(self, v):
        return v in self._depth


def _tree_factor_parent(factor, nf):
    """Parent of a factor element in the factor's Cayley tree (rooted at 1)."""
    if isinstance(factor, FreeGroup):
        g, e = nf[-1]
        e2 = e - 1 if e > 0 else e + 1
        return nf[:-1] + ((g, e2),) if e2 else nf[:-1]
    if isinstance(factor, Cyclic) and factor.n == 2:
        return 0
    raise NotATree(f"Cayley graph of {factor!r} is not a tree")


class ConeTree(RootedTree):
    """Implicit tree on a free product, rooted at the identity.

    Peripheral syllables hang off cone vertices; non-peripheral syllables
    follow the factor's Cayley tree.  With ``subdivided`` every edge carries a
    barycenter and depths double.
    """

    def __init__(self, fam: PeripheralFamily, subdivided: bool = True):
        G = fam.group
        if not isinstance(G, FreeProduct):
            raise NotATree("cone trees need a free product backend")
        self.fam = fam
        self.G = G
        self.subdivided = subdivided
        self.scale = 2 if subdivided else 1
        self._label = {i: fam.label_of_factor(i) for i in range(len(G.factors))}
        for i, f in enumerate(G.factors):
            if self._label[i] is None:
                if not (isinstance(f, FreeGroup) or (isinstance(f, Cyclic) and f.n == 2)):
                    raise NotATree(f"non-peripheral factor {f!r} has no tree Cayley graph")
        self.root = gv(G.identity)

    def _gdepth(self, nf):
        d = 0
        for i, p in nf:
            d += 2 if self._label[i] is not None else self.G.factors[i].word_length(p)
        return d

    def _up(self, v):
        """Parent in the unsubdivided tree."""
        kind = v[0]
        if kind == "g":
            nf = v[1].nf
            if not nf:
                return None
            i, p = nf[-1]
            lam = self._label[i]
            if lam is not None:
                return cv(lam, self.G(nf[:-1]))
            q = _tree_factor_parent(self.G.factors[i], p)
            return gv(self.G(nf[:-1] + ((i, q),) if q != self.G.factors[i].identity_nf else nf[:-1]))
        if kind == "c":
            return gv(v[2])
        raise ValueError(f"not a tree vertex: {v!r}")

    def parent(self, v):
        if v[0] == "m":
            u, w = v[1], v[2]
            return w if self._up(u) == w else u
        p = self._up(v)
        if p is None or not self.subdivided:
            return p
        return bary(v, p)

    def depth(self, v):
        if v[0] == "g":
            return self.scale * self._gdepth(v[1].nf)
        if v[0] == "c":
            return self.scale * self._gdepth(v[2].nf) + self.scale
        if v[0] == "m":
            return (self.depth(v[1]) + self.depth(v[2])) // 2
        raise ValueError(v)

    def is_tree_vertex(self, v):
        if v[0] != "m":
            return True
        return self._up(v[1]) == v[2] or self._up(v[2]) == v[1]

    def project(self, v):
        """Map off-tree barycenters (of peripheral Cayley edges) to a tree vertex, equivariantly."""
        if self.is_tree_vertex(v):
            return v
        u, w = v[1][1], v[2][1]
        x = ~u * w
        if self._positive_letter(x) and not self._positive_letter(~x):
            return v[1]
        if self._positive_letter(~x) and not self._positive_letter(x):
            return v[2]
        raise NotATree(f"cannot project barycenter {v!r} equivariantly")

    def _positive_letter(self, x):
        return any(x.nf == nf for nf in self.G.letters.values())

    def vertices_within(self, ball: Ball):
        """Parent-closed vertex set spanned by the ball and its cone vertices."""
        seen = {}
        for g in ball:
            starts = [gv(g)] + [cv(lam, self.fam.coset_rep(lam, g)) for lam in self.fam.labels]
            for v in starts:
                while v is not None and v not in seen:
                    seen[v] = None
                    v = self.parent(v)
        out = list(seen)
        out.sort(key=lambda v: (self.depth(v), v))
        return out

    def act(self, g, v):
        return act(g, v, self.fam)


class Bicombing:
    kind = "abstract"

    def __init__(self):
        self._memo: dict = {}
        self._lock = threading.Lock()

    def compute(self, a, b) -> OneChain:
        raise NotImplementedError

    def __call__(self, a, b) -> OneChain:
        key = (a, b)
        got = self._memo.get(key)
        if got is None:
            got = self.compute(a, b)
            with self._lock:
                self._memo[key] = got
        return got

    def area(self, a, b, c) -> OneChain:
        return self(a, b) + self(b, c) + self(c, a)


class TreeBicombing(Bicombing):
    kind = "tree"

    def __init__(self, tree):
        super().__init__()
        if isinstance(tree, SimpleGraph):
            tree = FiniteRootedTree(tree)
        self.tree = tree

    def _proj(self, v):
        return self.tree.project(v) if isinstance(self.tree, ConeTree) else v

    def compute(self, a, b):
        pa, pb = self._proj(a), self._proj(b)
        out = chain_from_path(self.tree.path(pa, pb))
        if pa != a:
            out._add(a, pa, 1)
        if pb != b:
            out._add(pb, b, 1)
        return out


def tree_bicombing(host) -> TreeBicombing:
    return TreeBicombing(host)


class GeodesicAverageBicombing(Bicombing):
    """Average of the chains of all geodesics, computed by path counting."""

    kind = "geodesic-average"

    def __init__(self, graph: SimpleGraph, cap: int = 10_000):
        super().__init__()
        self.graph = graph
        self.cap = cap

    def compute(self, a, b):
        g = self.graph
        if a == b:
            return OneChain()
        da, db = g.bfs(a), g.bfs(b)
        d = int(da[g.index[b]])
        if d < 0:
            raise Disconnected(f"{a!r}, {b!r} not connected")
        on = [i for i in range(g.n) if da[i] >= 0 and da[i] + db[i] == d]
        on.sort(key=lambda i: da[i])
        fwd = {g.index[a]: 1}
        for i in on:
            if i == g.index[a]:
                continue
            fwd[i] = sum(fwd.get(j, 0) for j in g.adj[i] if da[j] == da[i] - 1)
        bwd = {g.index[b]: 1}
        for i in reversed(on):
            if i == g.index[b]:
                continue
            bwd[i] = sum(bwd.get(j, 0) for j in g.adj[i] if db[j] == db[i] - 1)
        total = fwd[g.index[b]]
        if total > self.cap:
            raise CapExceeded(f"{total} geodesics exceed cap {self.cap}")
        out = OneChain()
        for i in on:
            for j in g.adj[i]:
                if da[j] == da[i] + 1 and db[j] == db[i] - 1:
                    out._add(g.vertices[i], g.vertices[j], Fraction(fwd[i] * bwd[j], total))
        return out


def geodesic_average_bicombing(graph, cap=10_000):
    return GeodesicAverageBicombing(graph, cap)


@dataclass
class BicombingAudit:
    kind: str
    T_emp: Fraction
    Mprime: Fraction
    Nprime: Fraction
    antisymmetric: bool
    equivariant: bool | None
    samples: int
    radius: int | None = None
    boundary_ok: bool = True
    failures: list = field(default_factory=list)

    def to_json(self):
        return {
            "kind": self.kind,
            "T_emp": str(self.T_emp),
            "Mprime": str(self.Mprime),
            "Nprime": str(self.Nprime),
            "antisymmetric": self.antisymmetric,
            "equivariant": self.equivariant,
            "samples": self.samples,
            "radius": self.radius,
            "boundary_ok": self.boundary_ok,
        }


def audit_bicombing(q: Bicombing, vertices, triples=None, distance=None, elements=(),
                    action=None, radius=None, pairs=None) -> BicombingAudit:
    """Empirical bicombing constants over the given vertex sample.

    ``distance(a, b)`` feeds the linear-growth fit; ``action(g, v)`` and
    ``elements`` drive the equivariance check on the sampled pairs.
    """
    vertices = list(vertices)
    pairs = list(itertools.permutations(vertices, 2)) if pairs is None else list(pairs)
    anti = True
    bnd = True
    M = Fraction(0)
    N = Fraction(0)
    failures = []
    for a, b in pairs:
        c = q(a, b)
        if q(b, a) != -c:
            anti = False
            failures.append(("antisymmetry", a, b))
        if boundary(c) != {b: 1, a: -1}:
            bnd = False
            failures.append(("boundary", a, b))
        if distance is not None:
            d = distance(a, b)
            n1 = c.norm1()
            if d:
                M = max(M, Fraction(n1) / d)
            else:
                N = max(N, n1)
    equiv = None
    if action is not None and elements:
        equiv = True
        for g in elements:
            for a, b in pairs:
                ga, gb = action(g, a), action(g, b)
                if q(ga, gb) != q(a, b).map_vertices(lambda v: action(g, v)):
                    equiv = False
                    failures.append(("equivariance", g, a, b))
                    break
            if not equiv:
                break
    T = Fraction(0)
    n_tri = 0
    if triples is None:
        triples = itertools.combinations(vertices, 3)
    for a, b, c in triples:
        T = max(T, q.area(a, b, c).norm1())
        n_tri += 1
    return BicombingAudit(q.kind, T, M, N, anti, equiv, len(pairs) + n_tri, radius, bnd, failures)


def tree_area_exhaustive(tree: RootedTree, vertices):
    """Kernel-backed scan of all unordered triples: (max area, total, count)."""
    parent, depth, index = tree.arrays(vertices)
    ids = np.arange(len(vertices), dtype=np.int32)
    return kernels.tree_area_scan(parent, depth, ids)
