"""Components, penetration and separating cosets on the relative Cayley graph.

Conventions:

* a component is a maximal run of consecutive H-letters with the same label;
  X-letters are never part of a component, even when the generator lies in
  a peripheral subgroup;
* a coset ``x H_lam`` is (f, g; D)-separating if some geodesic from f to g
  has a component in it whose endpoints are more than D apart in d-hat;
* separating cosets are listed by distance from f, ties broken by the
  shortlex order of the canonical representative.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

from .errors import CapExceeded, InvariantViolation, NonGeodesic, NotSeparating
from .groups import Element
from .relative import INF, GeodesicSpace, RelGraph, RelPath

ENUM_CAP = 20_000


@dataclass(frozen=True)
class CosetHandle:
    lam: str
    rep: Element

    def __lt__(self, other):
        return (self.lam, self.rep) < (other.lam, other.rep)

    def __str__(self):
        return f"{self.rep}<{self.lam}>"

    __repr__ = __str__

    def translate(self, h, fam):
        return CosetHandle(self.lam, fam.coset_rep(self.lam, h * self.rep))


def coset_of(fam, lam, x) -> CosetHandle:
    return CosetHandle(lam, fam.coset_rep(lam, x))


@dataclass
class Component:
    path: RelPath
    start: int          # index of first letter
    stop: int           # one past the last letter
    lam: str
    a_minus: Element
    a_plus: Element
    coset: CosetHandle
    isolated: bool = True

    @property
    def letters(self):
        return self.path.letters[self.start:self.stop]


def components(p: RelPath, fam, closed: bool = False) -> list[Component]:
    """Maximal H-letter runs of p, with isolation flags.

    With ``closed`` the path is treated as a loop, so a run may wrap around.
    """
    letters = p.letters
    verts = p.vertices()
    n = len(letters)
    if closed and verts[-1] != verts[0]:
        raise ValueError("closed path must end where it starts")
    runs = []
    i = 0
    while i < n:
        l = letters[i]
        if l.kind != "H":
            i += 1
            continue
        j = i + 1
        while j < n and letters[j].kind == "H" and letters[j].label == l.label:
            j += 1
        runs.append([i, j, l.label])
        i = j
    if closed and len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == n and runs[0][2] == runs[-1][2]:
        last = runs.pop()
        runs[0] = [last[0], runs[0][1] + n, last[2]]  # wraps; stop index exceeds n
    out = []
    for i, j, lam in runs:
        a_minus = verts[i]
        a_plus = verts[j % n] if closed else verts[j]
        out.append(Component(p, i, j, lam, a_minus, a_plus, coset_of(fam, lam, a_minus)))
    for c in out:
        c.isolated = not any(d is not c and d.lam == c.lam and d.coset == c.coset for d in out)
    return out


@dataclass
class PenetrationRecord:
    coset: CosetHandle
    p_in: Element
    p_out: Element
    dhat: float
    essential: bool


def _records(rel: RelGraph, p: RelPath, D) -> list[PenetrationRecord]:
    out = []
    for c in components(p, rel.fam):
        dh = rel.hat_distance(c.lam, c.a_minus, c.a_plus)
        out.append(PenetrationRecord(c.coset, c.a_minus, c.a_plus, dh, dh > D))
    return out


def penetration_data(rel: RelGraph, p: RelPath, x: CosetHandle, D=0, check=True):
    """Entrance/exit of the geodesic p in the coset x, or None."""
    if check and not rel.is_geodesic(p):
        raise NonGeodesic(f"{p!r} is not a geodesic")
    recs = [r for r in _records(rel, p, D) if r.coset == x]
    if not recs:
        return None
    if len(recs) > 1:
        raise InvariantViolation(f"geodesic penetrates {x} twice")
    return recs[0]


@dataclass
class SegmentSummary:
    """Penetration data of one segment of a geodesic space, per option."""

    start: Element
    per_coset: dict  # coset -> list over options of PenetrationRecord or None


@dataclass
class SeparatingList:
    f: Element
    g: Element
    lam: str
    D: float
    cosets: list                      # CosetHandle, in the order by distance from f
    dist: dict                        # coset -> d(f, coset)
    E: dict                           # coset -> frozenset of (p_in, p_out)
    dhat: dict                        # coset -> max d-hat across its components

    def __len__(self):
        return len(self.cosets)

    def __iter__(self):
        return iter(self.cosets)

    def __contains__(self, x):
        return x in self.dist

    def to_json(self):
        return {
            "f": str(self.f),
            "g": str(self.g),
            "lambda": self.lam,
            "D": self.D,
            "cosets": [
                {
                    "rep": str(x.rep),
                    "dist": self.dist[x],
                    "E": sorted([str(u), str(v)] for u, v in self.E[x]),
                    "dhat": self.dhat[x],
                }
                for x in self.cosets
            ],
        }


class Separation:
    """Cached separating-coset queries for a relative graph and threshold D.

    ``method`` selects how penetration data is gathered: ``"segment"`` works
    segment by segment on the geodesic space, ``"enumerate"`` walks every
    geodesic from end to end.  Both follow the definitions; the audits
    compare them.
    """

    def __init__(self, rel: RelGraph, D, method: str = "segment", cap: int = ENUM_CAP):
        self.rel = rel
        self.fam = rel.fam
        self.D = D
        self.method = method
        self.cap = cap
        self._space: dict = {}
        self._summary: dict = {}
        self._sep: dict = {}

    def space(self, f, g) -> GeodesicSpace:
        key = (f, g)
        sp = self._space.get(key)
        if sp is None:
            sp = self._space[key] = self.rel.geodesic_space(f, g)
        return sp

    def _segment_summaries(self, f, g):
        key = (f, g)
        got = self._summary.get(key)
        if got is not None:
            return got
        sp = self.space(f, g)
        if self.method == "segment":
            segs = [(v, opts) for v, opts in zip(sp.segment_starts(), sp.segments)]
        else:
            if sp.count > self.cap:
                raise CapExceeded(f"{sp.count} geodesics exceed cap {self.cap}")
            segs = [(f, [p.letters for p in sp.paths()])]
        out = []
        for v, opts in segs:
            per: dict = {}
            for k, opt in enumerate(opts):
                for r in _records(self.rel, RelPath(v, opt), self.D):
                    per.setdefault(r.coset, [None] * len(opts))
                    if per[r.coset][k] is not None:
                        raise InvariantViolation(f"geodesic penetrates {r.coset} twice")
                    per[r.coset][k] = r
            out.append(SegmentSummary(v, per))
        seen: dict = {}
        for s in out:
            for x in s.per_coset:
                if x in seen:
                    raise InvariantViolation(f"coset {x} met by two segments of the geodesic space")
                seen[x] = s
        self._summary[key] = out
        return out

    def penetrated_by_all(self, f, g) -> set:
        """Cosets (any label) penetrated by every geodesic from f to g."""
        return {x for s in self._segment_summaries(f, g) for x, recs in s.per_coset.items()
                if all(r is not None for r in recs)}

    def penetrated_by_some(self, f, g) -> set:
        return {x for s in self._segment_summaries(f, g) for x in s.per_coset}

    def separating(self, f, g, lam) -> SeparatingList:
        key = (f, g, lam)
        got = self._sep.get(key)
        if got is not None:
            return got
        dist, E, dh = {}, {}, {}
        for s in self._segment_summaries(f, g):
            for x, recs in s.per_coset.items():
                if x.lam != lam:
                    continue
                if not any(r is not None and r.essential for r in recs):
                    continue
                dist[x] = self.rel.coset_distance(f, lam, x.rep)
                dh[x] = max(r.dhat for r in recs if r is not None)
                if all(r is not None for r in recs):
                    E[x] = frozenset((r.p_in, r.p_out) for r in recs)
                else:
                    E[x] = None  # some geodesic misses x: flagged by the audits
        order = sorted(dist, key=lambda x: (dist[x], x.rep))
        out = SeparatingList(f, g, lam, self.D, order, dist, E, dh)
        self._sep[key] = out
        return out

    def all_separating(self, f, g) -> list:
        return [x for lam in self.fam.labels for x in self.separating(f, g, lam)]

    def entrance_exit(self, f, g, x: CosetHandle) -> frozenset:
        S = self.separating(f, g, x.lam)
        if x not in S:
            raise NotSeparating(f"{x} is not ({f},{g};{self.D})-separating")
        E = S.E[x]
        if E is None:
            raise InvariantViolation(f"some geodesic from {f} to {g} misses the separating coset {x}")
        return E


def separating_cosets(rel: RelGraph, f, g, lam, D, method="segment") -> SeparatingList:
    return Separation(rel, D, method).separating(f, g, lam)


def entrance_exit_set(rel: RelGraph, f, g, x: CosetHandle, D) -> frozenset:
    return Separation(rel, D).entrance_exit(f, g, x)


@dataclass
class TriangleDecomposition:
    first: list    # S'  : inherited from (f, h)
    second: list   # S'' : inherited from (h, g)
    rest: list     # F

    @property
    def ok(self):
        return len(self.rest) <= 2


def triangle_decomposition(sep: Separation, f, g, h, lam, strict=False) -> TriangleDecomposition:
    S = sep.separating(f, g, lam)
    Sfh = sep.separating(f, h, lam)
    Shg = sep.separating(h, g, lam)
    first, second, rest = [], [], []
    for x in S:
        Efg = S.E[x]
        if x in Sfh and x not in Shg and Efg is not None and Efg == Sfh.E[x]:
            first.append(x)
        elif x in Shg and x not in Sfh and Efg is not None and Efg == Shg.E[x]:
            second.append(x)
        else:
            rest.append(x)
    out = TriangleDecomposition(first, second, rest)
    if strict and not out.ok:
        raise InvariantViolation(f"triangle ({f},{g},{h}) leaves {len(rest)} cosets unmatched")
    return out


@dataclass
class Constants:
    C: int
    D: float
    C_raw: float = 0.0
    polygons: int = 0
    isolated: int = 0
    note: str = ""

    def to_json(self):
        return {"C": self.C, "D": self.D, "C_raw": self.C_raw, "polygons": self.polygons,
                "isolated_components": self.isolated, "note": self.note}


def _polygon_ratio(rel, corners, cap):
    """Max d-hat/n over isolated components of all geodesic polygons on the corners."""
    n = len(corners)
    spaces = [rel.geodesic_space(corners[k], corners[(k + 1) % n]) for k in range(n)]
    if math.prod(sp.count for sp in spaces) > cap:
        return None, 0, 0
    best, iso, count = 0.0, 0, 0
    for sides in itertools.product(*[list(sp.paths()) for sp in spaces]):
        letters = tuple(itertools.chain.from_iterable(s.letters for s in sides))
        if not letters:
            continue
        loop = RelPath(corners[0], letters)
        count += 1
        for c in components(loop, rel.fam, closed=True):
            if c.isolated:
                iso += 1
                best = max(best, rel.hat_distance(c.lam, c.a_minus, c.a_plus) / n)
    return best, iso, count


def calibrate_constants(rel: RelGraph, max_n: int = 4, D_override=None, exhaustive_radius: int = 2,
                        samples: int = 2000, seed: int = 0, per_polygon_cap: int = 256,
                        allow_small_D: bool = False) -> Constants:
    """Empirical bound C for isolated components of geodesic n-gons, and D = 3C.

    Polygons have a corner at the identity (the bound is translation
    invariant).  Triangles and bigons with corners in the ball of
    ``exhaustive_radius`` are scanned exhaustively (one less for larger n), plus ``samples`` random polygons with corners in the full ball.
    """
    e = rel.G.identity
    pool = list(rel.ball)
    rng = random.Random(seed)
    best, iso, polys = 0.0, 0, 0
    for n in range(2, max_n + 1):
        # corners beyond the triangle grow fast: shrink the exhaustive part
        rad = exhaustive_radius if n <= 3 else max(1, exhaustive_radius - 1)
        inner = [g for g in rel.ball if rel.ball.length[g] <= rad]
        corner_sets = [(e,) + rest for rest in itertools.product(inner, repeat=n - 1)]
        corner_sets += [(e,) + tuple(rng.choice(pool) for _ in range(n - 1)) for _ in range(samples)]
        for corners in corner_sets:
            r, k, c = _polygon_ratio(rel, corners, per_polygon_cap)
            if r is None:
                continue
            best = max(best, r)
            iso += k
            polys += c
    C = max(1, math.ceil(best - 1e-12))
    D = 3 * C if D_override is None else D_override
    if D < 3 * C and not allow_small_D:
        raise ValueError(f"D = {D} violates D >= 3C = {3 * C}")
    note = "floor" if best <= 1 else "empirical"
    return Constants(C, D, best, polys, iso, note)
