"""Relative Cayley graph Gamma(G, X u H) and the subgroup metrics d-hat.

Letters are either X-letters (generators) or H-letters ``(label, h)`` with
``h`` a non-trivial element of the peripheral subgroup; the two alphabets are
disjoint, so an element in both gives parallel edges.

Two routes are provided and cross-checked by the tests and audits:

* exact: for a free product marked by the union of the factor generators,
  distances, geodesics and d-hat are read off the syllable normal form;
* truncated BFS: a breadth-first search on the ball of the given radius,
  with H-letters of subgroup word length at most ``rho``.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

from .errors import CapExceeded, Disconnected, TruncationError
from .groups import Ball, Element, FreeProduct, MarkedGroup, PeripheralFamily, ball as make_ball

INF = math.inf


class Letter(NamedTuple):
    kind: str      # "X" or "H"
    label: object  # generator string for X, peripheral label for H
    elem: Element

    def __repr__(self):
        if self.kind == "X":
            return f"X:{self.elem}"
        return f"{self.label}:{self.elem}"


@dataclass(frozen=True)
class RelPath:
    start: Element
    letters: tuple

    @property
    def length(self):
        return len(self.letters)

    def vertices(self):
        out = [self.start]
        for l in self.letters:
            out.append(out[-1] * l.elem)
        return out

    @property
    def end(self):
        return self.vertices()[-1]

    def label(self):
        out = self.start.group.identity
        for l in self.letters:
            out = out * l.elem
        return out

    def __add__(self, other):
        if self.end != other.start:
            raise ValueError("paths do not concatenate")
        return RelPath(self.start, self.letters + other.letters)

    def reverse(self):
        verts = self.vertices()
        return RelPath(verts[-1], tuple(Letter(l.kind, l.label, ~l.elem) if l.kind == "H"
                                        else Letter("X", str(~l.elem), ~l.elem)
                                        for l in reversed(self.letters)))

    def translate(self, g):
        return RelPath(g * self.start, self.letters)

    def __repr__(self):
        return f"{self.start}·" + "".join(f"({l!r})" for l in self.letters)


class GeodesicSpace:
    """All geodesics between two vertices.

    In exact mode the geodesics are products of independent per-syllable
    choices: ``segments`` is a list of lists of letter tuples.  In BFS mode
    there is a single segment whose options are complete letter sequences.
    """

    def __init__(self, start: Element, segments, exact: bool):
        self.start = start
        self.segments = segments
        self.exact = exact

    @property
    def count(self):
        return math.prod(len(s) for s in self.segments)

    @property
    def length(self):
        return sum(len(s[0]) for s in self.segments) if self.segments else 0

    def paths(self, cap=None):
        if cap is not None and self.count > cap:
            raise CapExceeded(f"{self.count} geodesics exceed cap {cap}")
        for choice in itertools.product(*self.segments):
            yield RelPath(self.start, tuple(itertools.chain.from_iterable(choice)))

    def segment_starts(self):
        """Vertex at the beginning of each segment."""
        out, v = [], self.start
        for seg in self.segments:
            out.append(v)
            for l in seg[0]:
                v = v * l.elem
        return out


def _factor_words(factor, nf, gens):
    """All shortest words (tuples of factor nfs) for nf in the factor's default generators."""
    n = factor.word_length(nf)
    out = []

    def rec(rem, k, acc):
        if k == 0:
            if rem == factor.identity_nf:
                out.append(tuple(acc))
            return
        for s in gens:
            nxt = factor.mul_nf(factor.inv_nf(s), rem)
            if factor.word_length(nxt) == k - 1:
                acc.append(s)
                rec(nxt, k - 1, acc)
                acc.pop()

    rec(nf, n, [])
    return out


class RelGraph:
    def __init__(self, mg: MarkedGroup, fam: PeripheralFamily, radius: int, rho: int | None = None,
                 exact: bool | None = None, ball: Ball | None = None):
        self.mg = mg
        self.fam = fam
        self.G = mg.group
        self.radius = radius
        self.rho = 2 * radius if rho is None else rho
        can_exact = isinstance(self.G, FreeProduct) and mg.is_default()
        self.exact = can_exact if exact is None else (exact and can_exact)
        self.ball = ball if ball is not None else make_ball(mg, radius)
        self.x_letters = [Letter("X", str(x), x) for x in mg.nontrivial_generators]
        self.h_letters = {lam: self._h_letters(lam) for lam in fam.labels}
        self._bfs_cache: dict = {}
        self._words_cache: dict = {}

    # -- alphabet -----------------------------------------------------------
    def _h_letters(self, lam):
        F = self.fam.factor_of(lam)
        gens = [g.nf for g in F.default_generators()]
        seen = {F.identity_nf: 0}
        frontier = [F.identity_nf]
        for r in range(1, self.rho + 1):
            nxt = []
            for p in frontier:
                for s in gens:
                    q = F.mul_nf(p, s)
                    if q not in seen:
                        seen[q] = r
                        nxt.append(q)
            frontier = nxt
        return [Letter("H", lam, self.fam.embed(lam, p)) for p in seen if p != F.identity_nf]

    def letters(self):
        out = list(self.x_letters)
        for lam in self.fam.labels:
            out.extend(self.h_letters[lam])
        return out

    def out_edges(self, v):
        return [(l, v * l.elem) for l in self.letters()]

    def has_h_edge(self, u, v):
        x = ~u * v
        return any(self.fam.contains(lam, x) and not x.is_identity() and
                   self.fam.subgroup_word_length(lam, x) <= self.rho for lam in self.fam.labels)

    # -- exact route --------------------------------------------------------
    def _syllable_cost(self, i, p):
        lam = self.fam.label_of_factor(i)
        if lam is not None:
            return 1
        return self.G.factors[i].word_length(p)

    def _syllable_options(self, i, p):
        key = (i, p)
        got = self._words_cache.get(key)
        if got is not None:
            return got
        F = self.G.factors[i]
        lam = self.fam.label_of_factor(i)
        if lam is not None:
            h = self.G.embed(i, p)
            opts = [(Letter("H", lam, h),)]
            if F.word_length(p) == 1:
                opts.append((Letter("X", str(h), h),))
        else:
            gens = [g.nf for g in F.default_generators()]
            opts = []
            for w in _factor_words(F, p, gens):
                opts.append(tuple(Letter("X", str(self.G.embed(i, s)), self.G.embed(i, s)) for s in w))
        self._words_cache[key] = opts
        return opts

    def exact_length(self, g: Element) -> int:
        return sum(self._syllable_cost(i, p) for i, p in g.nf)

    # -- BFS route ----------------------------------------------------------
    def _bfs(self, f):
        got = self._bfs_cache.get(f)
        if got is not None:
            return got
        if f not in self.ball:
            raise TruncationError(f"{f} is outside the ball of radius {self.radius}")
        dist = {f: 0}
        q = deque([f])
        letters = self.letters()
        while q:
            u = q.popleft()
            for l in letters:
                w = u * l.elem
                if w in self.ball and w not in dist:
                    dist[w] = dist[u] + 1
                    q.append(w)
        self._bfs_cache[f] = dist
        return dist

    def bfs_distance(self, f, g):
        if g not in self.ball:
            raise TruncationError(f"{g} is outside the ball of radius {self.radius}")
        d = self._bfs(f).get(g)
        if d is None:
            raise Disconnected(f"{f} and {g} not connected inside the ball")
        return d

    def bfs_geodesics(self, f, g, cap=10_000) -> list[RelPath]:
        d = self.bfs_distance(f, g)
        dg = self._bfs(g)
        letters = self.letters()
        out = []

        def rec(v, k, acc):
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} geodesics")
            if k == d:
                out.append(RelPath(f, tuple(acc)))
                return
            for l in letters:
                w = v * l.elem
                if dg.get(w) == d - k - 1:
                    acc.append(l)
                    rec(w, k + 1, acc)
                    acc.pop()

        rec(f, 0, [])
        return out

    # -- public -------------------------------------------------------------
    def distance(self, f, g) -> int:
        if self.exact:
            return self.exact_length(~f * g)
        return self.bfs_distance(f, g)

    def geodesic_space(self, f, g) -> GeodesicSpace:
        if self.exact:
            w = ~f * g
            return GeodesicSpace(f, [self._syllable_options(i, p) for i, p in w.nf], True)
        paths = self.bfs_geodesics(f, g)
        return GeodesicSpace(f, [[p.letters for p in paths]], False)

    def geodesics(self, f, g, cap=10_000) -> list[RelPath]:
        return list(self.geodesic_space(f, g).paths(cap))

    def is_geodesic(self, p: RelPath) -> bool:
        return p.length == self.distance(p.start, p.end)

    def hat_distance(self, lam, u, v=None):
        """d-hat in H_lam; with one argument measures from the identity."""
        if v is None:
            u, v = self.G.identity, u
        x = ~u * v
        if not self.fam.contains(lam, x):
            return INF
        if self.exact:
            return self.fam.subgroup_word_length(lam, x)
        return self.bfs_hat_distance(lam, x)

    def bfs_hat_distance(self, lam, h):
        """Shortest path avoiding H_lam-letter edges between vertices of H_lam."""
        if not self.fam.contains(lam, h):
            return INF
        e = self.G.identity
        dist = {e: 0}
        q = deque([e])
        letters = self.letters()
        while q:
            u = q.popleft()
            u_in = self.fam.contains(lam, u)
            for l in letters:
                if u_in and l.kind == "H" and l.label == lam:
                    continue
                w = u * l.elem
                if w in self.ball and w not in dist:
                    dist[w] = dist[u] + 1
                    if w == h:
                        return dist[w]
                    q.append(w)
        return dist.get(h, INF)

    def local_finiteness_profile(self, lam, n) -> int:
        """Number of h in H_lam with d-hat(1, h) <= n."""
        F = self.fam.factor_of(lam)
        gens = [g.nf for g in F.default_generators()]
        seen = {F.identity_nf}
        frontier = [F.identity_nf]
        for _ in range(n):
            nxt = []
            for p in frontier:
                for s in gens:
                    q = F.mul_nf(p, s)
                    if q not in seen:
                        seen.add(q)
                        nxt.append(q)
            frontier = nxt
        if self.exact:
            return len(seen)
        return sum(1 for p in seen if self.bfs_hat_distance(lam, self.fam.embed(lam, p)) <= n)

    def coset_distance(self, f, lam, x) -> int:
        """d(f, x H_lam) in the relative metric."""
        if self.exact:
            return self.exact_length(self.fam.coset_rep(lam, ~f * x))
        best = INF
        rep = self.fam.coset_rep(lam, x)
        for y in self.ball:
            if self.fam.coset_rep(lam, y) == rep:
                best = min(best, self.bfs_distance(f, y))
        return best


def build_relative_graph(mg, fam, radius, rho=None, exact=None) -> RelGraph:
    return RelGraph(mg, fam, radius, rho, exact)


def relative_distance(rel: RelGraph, f, g) -> int:
    return rel.distance(f, g)


def relative_geodesics(rel: RelGraph, f, g, cap=10_000):
    return rel.geodesics(f, g, cap)


def hat_distance(rel: RelGraph, lam, h1, h2=None):
    return rel.hat_distance(lam, h1, h2)


def local_finiteness_profile(rel: RelGraph, lam, n):
    return rel.local_finiteness_profile(lam, n)
