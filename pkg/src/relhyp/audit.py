"""Invariant checks shared by the CLI and the acceptance suite.

Every check returns a ``Check`` with status ``pass``, ``fail`` or
``uncertified`` and a JSON-able detail dict.  ``run_audit`` strings the
checks together for one fixture.
"""
from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .arrays import (
    PArray,
    PropernessLevel,
    PeripheralArrayMap,
    QArray,
    RArray,
    RestrictedArray,
    Subgroup,
    ZArray,
    containment_witness,
    coset_average,
    default_peripheral_array,
    defect_constants,
    diff_norm,
    K_level,
    lift_r_tilde,
    A_set_bound,
)
from .bicombing import ConeTree, GeodesicAverageBicombing, TreeBicombing, audit_bicombing, tree_area_exhaustive
from .chains import L2_TOL, OneChain, boundary, chain_from_path, radial_decomposition, tilde
from .cosets import Separation, calibrate_constants, components, triangle_decomposition
from .errors import NotATree, RelhypError, TruncationError
from .graphs import (
    SimpleGraph,
    act,
    audit_graph,
    barycentric_subdivision,
    cayley_graph,
    coned_off_graph,
    edge_inversions,
    edge_stabilizers_trivial,
    gv,
    two_vertex_connected,
)
from .groups import Cyclic, MarkedGroup, ball as make_ball, dihedral, symmetric
from .relative import RelGraph, RelPath

PASS, FAIL, UNCERTIFIED = "pass", "fail", "uncertified"


@dataclass
class Check:
    name: str
    status: str
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self):
        return self.status == PASS

    def to_json(self):
        return {"name": self.name, "status": self.status, "detail": self.detail}

    def line(self):
        return f"[{self.status.upper():>11}] {self.name} ({self.seconds:.1f}s)"


def _timed(name, fn, *args, **kw) -> Check:
    t = time.perf_counter()
    try:
        status, detail = fn(*args, **kw)
    except TruncationError as e:
        status, detail = UNCERTIFIED, {"error": str(e)}
    except RelhypError as e:
        status, detail = FAIL, {"error": f"{type(e).__name__}: {e}"}
    return Check(name, status, detail, time.perf_counter() - t)


def _status(ok):
    return PASS if ok else FAIL


# -- random instances ---------------------------------------------------------

def random_connected_graph(rng: random.Random, max_vertices=40, min_vertices=2) -> SimpleGraph:
    n = rng.randint(min_vertices, max_vertices)
    g = SimpleGraph(range(n))
    for v in range(1, n):
        g.add_edge(v, rng.randrange(v))
    extra = rng.randint(0, 2 * n)
    for _ in range(extra):
        u, v = rng.randrange(n), rng.randrange(n)
        g.add_edge(u, v)
    return g


def random_chain(rng: random.Random, g: SimpleGraph, terms=None) -> OneChain:
    edges = g.edges()
    k = rng.randint(0, min(len(edges), terms or 12))
    out = OneChain()
    for u, v in rng.sample(edges, k):
        c = Fraction(rng.randint(-9, 9), rng.randint(1, 6))
        if rng.random() < 0.5:
            u, v = v, u
        out._add(u, v, c)
    return out


def random_path(rng: random.Random, g: SimpleGraph, a, b, max_len=None):
    """Random walk from a stopped at b; falls back to a geodesic if it wanders off."""
    max_len = max_len or 4 * g.n
    path = [a]
    while path[-1] != b and len(path) <= max_len:
        path.append(rng.choice(g.neighbors(path[-1])))
    if path[-1] != b:
        from .graphs import geodesic_path
        path = path + geodesic_path(g, path[-1], b)[1:]
    return path


# -- chains ---------------------------------------------------------------

def check_tilde_lemma(n=1000, seed=0, max_vertices=40, corrupt=False):
    rng = random.Random(seed)
    worst2, bad1, bad2, odd = 0.0, 0, 0, 0
    for _ in range(n):
        g = random_connected_graph(rng, max_vertices)
        x1 = random_chain(rng, g)
        x2 = x1 + random_chain(rng, g, terms=4) if rng.random() < 0.5 else random_chain(rng, g)
        t1, t2 = tilde(x1, corrupt), tilde(x2, corrupt)
        for x, t in ((x1, t1), (x2, t2)):
            if t.exact_norm_sq() != x.norm1():
                bad1 += 1
        lhs = (t1 - t2).norm_sq()
        rhs = 2 * float((x1 - x2).norm1())
        worst2 = max(worst2, lhs - rhs)
        if lhs > rhs + L2_TOL:
            bad2 += 1
        # the square-root map is odd
        if tilde(-x1, corrupt).signed_sq != (-t1).signed_sq:
            odd += 1
    ok = bad1 == 0 and bad2 == 0 and odd == 0
    return _status(ok), {"chains": n, "part1_failures": bad1, "part2_failures": bad2,
                         "part2_worst_excess": worst2, "oddness_failures": odd, "tolerance": L2_TOL}


def check_paths_lemma(n=500, seed=1, max_vertices=40):
    """|sum alpha| d(a,b) <= ||sum alpha_j p_j||_1 for paths p_j from a to b, plus the shell identity."""
    rng = random.Random(seed)
    bad, shell_bad = 0, 0
    for _ in range(n):
        g = random_connected_graph(rng, max_vertices)
        a, b = rng.randrange(g.n), rng.randrange(g.n)
        d = g.distance(a, b)
        total, alpha_sum = OneChain(), Fraction(0)
        for _ in range(rng.randint(1, 5)):
            p = chain_from_path(random_path(rng, g, a, b), g)
            alpha = Fraction(rng.randint(-7, 7), rng.randint(1, 5))
            total += p * alpha
            alpha_sum += alpha
            rd = radial_decomposition(p, g, a)
            if any(rd.psi.get(k, 0) != 1 for k in range(1, d + 1)) or rd.reassemble() != p:
                shell_bad += 1
        if abs(alpha_sum) * d > total.norm1():
            bad += 1
    return _status(bad == 0 and shell_bad == 0), {"combinations": n, "failures": bad, "shell_failures": shell_bad}


# -- 2-vertex-connectivity ------------------------------------------------------

def finite_group_suite():
    out = [Cyclic(n) for n in range(3, 13)]
    out += [dihedral(n) for n in range(3, 10)]
    out += [symmetric(n) for n in (3, 4, 5)]
    return out


def delete_and_test(g: SimpleGraph) -> bool:
    if g.n < 3 or not g.is_connected():
        return False
    for v in g.vertices:
        rest = [w for w in g.vertices if w != v]
        h = SimpleGraph(rest, [(x, y) for x, y in g.edges() if v not in (x, y)])
        if not h.is_connected():
            return False
    return True


def check_two_connectivity(seed=2, oracle=True):
    rng = random.Random(seed)
    rows = []
    ok = True
    for G in finite_group_suite():
        elems = G.elements()
        x0 = {G.identity} | set(G.default_generators())
        for x in rng.sample(elems, rng.randint(0, min(3, len(elems)))):
            x0 |= {x, ~x}
        mg = MarkedGroup.squared(G, x0)
        gr = cayley_graph(mg, len(elems))
        verdict = two_vertex_connected(gr)
        agree = delete_and_test(gr) == verdict if oracle else None
        ok &= verdict and agree is not False
        rows.append({"group": repr(G), "order": len(elems), "X0": len(x0), "biconnected": verdict, "oracle_agrees": agree})
    return _status(ok), {"groups": rows}


# -- fixture context ----------------------------------------------------------

class Context:
    """Lazily built objects for one fixture at one radius."""

    def __init__(self, fx, radius=4, rho=None, D=None, C=None, allow_small_D=False,
                 corrupt_tilde=False, calibrate=True, constants=None):
        self.fx = fx
        self.radius = radius
        self.rho = 2 * radius if rho is None else rho
        self._D = D
        self._C = C
        self.allow_small_D = allow_small_D
        self.corrupt_tilde = corrupt_tilde
        self.calibrate = calibrate
        self._cache: dict = {}
        if constants is not None:
            self._cache["constants"] = constants

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def e(self):
        return self.fx.group.identity

    def ball(self, r=None):
        r = self.radius if r is None else r
        return self._get(("ball", r), lambda: make_ball(self.fx.mg, r))

    @property
    def rel(self):
        return self._get("rel", lambda: RelGraph(self.fx.mg, self.fx.fam, self.radius, self.rho, ball=self.ball()))

    @property
    def constants(self):
        def build():
            if self.calibrate:
                return calibrate_constants(self.rel, D_override=self._D, allow_small_D=True)
            from .cosets import Constants
            C = self._C or 1
            return Constants(C, 3 * C if self._D is None else self._D, note="uncalibrated")
        return self._get("constants", build)

    @property
    def D(self):
        return self.constants.D

    @property
    def C(self):
        return self.constants.C

    @property
    def sep(self):
        return self._get("sep", lambda: Separation(self.rel, self.D))

    def parr(self, lam):
        return self._get(("parr", lam), lambda: default_peripheral_array(self.fx.fam, lam))

    def R(self, lam):
        return self._get(("R", lam), lambda: RArray(self.sep, self.parr(lam), defect_constants(self.parr(lam), self.D, self.C)))

    @property
    def tree(self):
        return self._get("tree", lambda: ConeTree(self.fx.fam))

    @property
    def q(self):
        def build():
            try:
                return TreeBicombing(self.tree)
            except NotATree:
                Y = barycentric_subdivision(coned_off_graph(self.fx.mg, self.fx.fam, self.radius))
                return GeodesicAverageBicombing(Y)
        return self._get("q", build)

    @property
    def Q(self):
        return self._get("Q", lambda: QArray(self.q, self.fx.fam, self.corrupt_tilde))

    @property
    def P(self):
        return self._get("P", lambda: PArray(self.Q, [self.R(lam) for lam in self.fx.fam.labels]))


# -- graph-level checks ---------------------------------------------------------

def check_graphs(ctx: Context, triangle_radius=2):
    fx = ctx.fx
    hat = coned_off_graph(fx.mg, fx.fam, ctx.radius)
    Y = barycentric_subdivision(hat)
    inner = [gv(g) for g in ctx.ball(min(triangle_radius, ctx.radius))]
    au = audit_graph(hat, vertices=inner)
    Dh = hat.distance_matrix()
    DY = Y.distance_matrix()
    doubling = all(int(DY[Y.index[u], Y.index[v]]) == 2 * int(Dh[hat.index[u], hat.index[v]])
                   for u in hat.vertices for v in hat.vertices)
    cone_ok = all(u[0] == "g" or v[0] == "g" for u, v in hat.edges())
    near = ctx.ball(min(2, ctx.radius))
    stab = edge_stabilizers_trivial(hat, near)
    # inversions are allowed on the coned-off graph but must vanish after subdivision
    inv_hat = len(edge_inversions(hat, near, lambda h, v: act(h, v, fx.fam)))
    inv_Y = edge_inversions(Y, near, lambda h, v: act(h, v, fx.fam))
    ok = doubling and cone_ok and stab and not inv_Y and au.delta is not None
    detail = au.to_json()
    detail.update({"vertices": hat.n, "edges": hat.m, "subdivision_doubles": doubling,
                   "every_edge_has_group_endpoint": cone_ok, "stabilizer_trivial": stab,
                   "inversions_coned_off": inv_hat, "inversions_subdivided": len(inv_Y)})
    return _status(ok), detail


def check_relative_oracle(ctx: Context, sources_radius=1, hat_radius=3):
    """Exact free-product metric against the truncated BFS oracle."""
    rel = ctx.rel
    if ctx.rho < 2 * ctx.radius:
        return UNCERTIFIED, {"reason": f"rho = {ctx.rho} < 2*radius = {2 * ctx.radius}: H-letters joining ball elements are missing"}
    bfs = RelGraph(ctx.fx.mg, ctx.fx.fam, ctx.radius, ctx.rho, exact=False, ball=ctx.ball())
    doubled = RelGraph(ctx.fx.mg, ctx.fx.fam, ctx.radius, 2 * ctx.rho, exact=False, ball=ctx.ball())
    mism, count_mism, unstable, checked = [], 0, 0, 0
    for f in ctx.ball(sources_radius):
        for g in ctx.ball():
            d_exact = rel.distance(f, g)
            d_bfs = bfs.bfs_distance(f, g)
            checked += 1
            if d_bfs != doubled.bfs_distance(f, g):
                unstable += 1
            if d_exact != d_bfs:
                mism.append([str(f), str(g), d_exact, d_bfs])
            elif f == ctx.e and ctx.ball().length[g] <= 3:
                if rel.geodesic_space(f, g).count != len(bfs.bfs_geodesics(f, g)):
                    count_mism += 1
    hat_bad = 0
    for lam in ctx.fx.fam.labels:
        for h in ctx.ball(hat_radius):
            if ctx.fx.fam.contains(lam, h) and rel.hat_distance(lam, h) != bfs.bfs_hat_distance(lam, h):
                hat_bad += 1
    status = PASS if not mism and not count_mism and not hat_bad else FAIL
    if status == PASS and unstable:
        status = UNCERTIFIED
    return status, {"pairs": checked, "distance_mismatches": mism[:10], "geodesic_count_mismatches": count_mism,
                    "hat_mismatches": hat_bad, "unstable_under_rho_doubling": unstable, "exact": rel.exact,
                    "rho": ctx.rho}


# -- separating cosets ----------------------------------------------------------

def check_separating(ctx: Context, radius=None, literal_samples=2000, seed=3, compare_radius=3):
    """Lemmas on separating cosets, on exhaustive pairs/triples of a ball."""
    sep, rel, fam = ctx.sep, ctx.rel, ctx.fx.fam
    B = list(ctx.ball(radius))
    C, D = ctx.C, ctx.D
    rng = random.Random(seed)
    fails: dict = {k: 0 for k in ("D_ge_3C", "symmetry", "shift", "separating_finite", "penetrate_all",
                                  "two_leg_penetration", "two_leg_paths", "entrance_spread", "entrance_distance",
                                  "E_reversal", "E_shift", "E_finite", "triangle", "methods_agree")}
    examples: dict = {}

    def fail(key, *info):
        fails[key] += 1
        examples.setdefault(key, [str(x) for x in info])

    if D < 3 * C:
        fail("D_ge_3C", D, C)
    gens = list(ctx.fx.mg.nontrivial_generators)
    labels = fam.labels
    nonempty = []
    maxE, maxS, spread = 0, 0, 0
    for f in B:
        for g in B:
            S_all = []
            d_fg = rel.distance(f, g)
            Aall = sep.penetrated_by_all(f, g)
            for lam in labels:
                S = sep.separating(f, g, lam)
                S_all.extend(S)
                Sr = sep.separating(g, f, lam)
                if set(S) != set(Sr):
                    fail("symmetry", f, g, lam)
                for x in S:
                    E = S.E[x]
                    if E is None:
                        fail("penetrate_all", f, g, x)
                        continue
                    maxE = max(maxE, len(E))
                    if len(E) > sep.space(f, g).count:
                        fail("E_finite", f, g, x)
                    Er = Sr.E.get(x)
                    if Er is None or Er != frozenset((v, u) for u, v in E):
                        fail("E_reversal", f, g, x)
                    ins = [u for u, _ in E]
                    outs = [v for _, v in E]
                    s = max([rel.hat_distance(lam, u, w) for u in ins for w in ins] +
                            [rel.hat_distance(lam, u, w) for u in outs for w in outs])
                    spread = max(spread, s)
                    if s > 3 * C:
                        fail("entrance_spread", f, g, x)
            maxS = max(maxS, len(S_all))
            if len(S_all) > d_fg or not set(S_all) <= Aall:
                fail("separating_finite", f, g)
            # entrance points realize the distance to the coset
            for seg in sep._segment_summaries(f, g):
                for x, recs in seg.per_coset.items():
                    dx = rel.coset_distance(f, x.lam, x.rep)
                    for r in recs:
                        if r is not None and rel.distance(f, r.p_in) != dx:
                            fail("entrance_distance", f, g, x)
            if S_all:
                nonempty.append((f, g, S_all))
            # shift rule on generators
            for h in gens:
                for lam in labels:
                    S = sep.separating(f, g, lam)
                    Sh = sep.separating(h * f, h * g, lam)
                    if {x.translate(h, fam) for x in S} != set(Sh):
                        fail("shift", h, f, g)
                    for x in S:
                        if S.E[x] is not None and Sh.E.get(x.translate(h, fam)) != frozenset((h * u, h * v) for u, v in S.E[x]):
                            fail("E_shift", h, f, g, x)
    # every path made of a geodesic f->h and a geodesic h->g penetrates x
    triples = 0
    for f, g, S_all in nonempty:
        for h in B:
            triples += 1
            A1 = sep.penetrated_by_all(f, h)
            A2 = sep.penetrated_by_all(h, g)
            for x in S_all:
                if x not in A1 and x not in A2:
                    fail("two_leg_penetration", f, h, g, x)
    # literal check of the same statement on concatenated paths
    for _ in range(min(literal_samples, len(nonempty) * len(B))):
        f, g, S_all = rng.choice(nonempty)
        h = rng.choice(B)
        p1 = _random_geodesic(rng, sep.space(f, h))
        p2 = _random_geodesic(rng, sep.space(h, g))
        cos = {c.coset for c in components(p1 + p2, fam)}
        for x in S_all:
            if x not in cos:
                fail("two_leg_paths", f, h, g, x)
    # triangle decomposition on exhaustive triples (empty S(f,g) decomposes trivially)
    worstF = 0
    for f, g, S_all in nonempty:
        for h in B:
            for lam in {x.lam for x in S_all}:
                td = triangle_decomposition(sep, f, g, h, lam)
                worstF = max(worstF, len(td.rest))
                if not td.ok:
                    fail("triangle", f, g, h, lam)
    # the two gathering methods agree on a smaller ball
    enum = Separation(rel, D, method="enumerate")
    for f in ctx.ball(min(1, ctx.radius)):
        for g in ctx.ball(min(compare_radius, ctx.radius)):
            for lam in labels:
                a, b = sep.separating(f, g, lam), enum.separating(f, g, lam)
                if a.cosets != b.cosets or a.E != b.E:
                    fail("methods_agree", f, g, lam)
    ok = not any(fails.values())
    return _status(ok), {"ball": len(B), "pairs": len(B) ** 2, "separating_pairs": len(nonempty),
                         "two_leg_triples": triples, "C": C, "D": D, "max_S": maxS, "max_E": maxE,
                         "max_spread": spread, "max_F": worstF, "failures": fails, "examples": examples}


def _random_geodesic(rng, space):
    letters = []
    for seg in space.segments:
        letters.extend(rng.choice(seg))
    return RelPath(space.start, tuple(letters))


# -- bicombing ----------------------------------------------------------------

def check_tree_bicombing(ctx: Context, radius=None, equivariance_radius=2, sample=20000, seed=4,
                         pair_limit=None):
    """Exhaustive area scan of the tree bicombing, plus antisymmetry and equivariance."""
    tree = ctx.tree
    q = TreeBicombing(tree)
    V = tree.vertices_within(ctx.ball(radius))
    amax, atotal, triples = tree_area_exhaustive(tree, V)
    rng = random.Random(seed)
    # the kernel's tree paths against the library bicombing
    mismatch = 0
    for _ in range(min(sample, len(V) ** 3)):
        a, b, c = rng.choice(V), rng.choice(V), rng.choice(V)
        if q.area(a, b, c).norm1() != 0:
            mismatch += 1
    anti = True
    pairs = 0
    diag = all(not q.compute(a, a) for a in V)
    for i, a in enumerate(V):
        for b in V[i + 1:]:
            pairs += 1
            if q.compute(a, b) != -q.compute(b, a):
                anti = False
    inner = tree.vertices_within(ctx.ball(equivariance_radius))
    elems = list(ctx.ball(equivariance_radius))
    equiv = True
    for g in elems:
        for a in inner:
            for b in inner:
                if q.compute(tree.act(g, a), tree.act(g, b)) != q.compute(a, b).map_vertices(lambda v: tree.act(g, v)):
                    equiv = False
    ok = amax == 0 and mismatch == 0 and anti and equiv and diag
    return _status(ok), {"vertices": len(V), "triples": triples, "max_area": amax, "total_area": atotal,
                         "kernel": kernels.BACKEND, "library_sample_nonzero": mismatch, "antisymmetric_pairs": pairs,
                         "antisymmetric": anti, "vanishes_on_diagonal": diag, "equivariant": equiv,
                         "equivariance_pairs": len(inner) ** 2 * len(elems)}


def check_bicombing_generic(ctx: Context, radius=2):
    """Geodesic-average bicombing on the subdivided coned-off graph (non-tree fixtures)."""
    Y = barycentric_subdivision(coned_off_graph(ctx.fx.mg, ctx.fx.fam, ctx.radius))
    q = GeodesicAverageBicombing(Y)
    verts = [gv(g) for g in ctx.ball(radius)]
    au = audit_bicombing(q, verts, distance=Y.distance)
    ok = au.antisymmetric and au.boundary_ok
    return _status(ok), au.to_json()


# -- arrays -------------------------------------------------------------------

def check_first_array(ctx: Context, g_radius=3, h_radius=5, axiom_radius=5):
    Q = ctx.Q
    T = 0
    if not isinstance(ctx.q, TreeBicombing):
        T = check_bicombing_generic(ctx)[1]["T_emp"]
        T = Fraction(T)
    hat = coned_off_graph(ctx.fx.mg, ctx.fx.fam, axiom_radius)
    d0 = hat.bfs(gv(ctx.e))
    ax1 = [str(g) for g in ctx.ball(axiom_radius) if not Q.axiom1(g)]
    ineq = [str(g) for g in ctx.ball(axiom_radius)
            if int(d0[hat.index[gv(g)]]) > Fraction(Q.norm_sq(g)) / 2]
    worst, bad = 0.0, 0
    for g in ctx.ball(g_radius):
        bound_sq = 2 * (T + ctx.q(gv(ctx.e), gv(g)).norm1())
        for h in ctx.ball(h_radius):
            dsq = Q.defect(g, h) ** 2
            worst = max(worst, dsq - float(bound_sq))
            if dsq > bound_sq + L2_TOL:
                bad += 1
    ok = not ax1 and not ineq and bad == 0
    return _status(ok), {"axiom1_failures": ax1[:10], "first_array_ineq_failures": ineq[:10],
                         "defect_failures": bad, "worst_excess": worst, "T": str(T),
                         "g_ball": len(ctx.ball(g_radius)), "h_ball": len(ctx.ball(h_radius))}


def check_second_array(ctx: Context, axiom_radius=4, g_radius=3, h_radius=5, ortho_radius=2):
    sep = ctx.sep
    e = ctx.e
    out = {}
    ok = True
    for lam in ctx.fx.fam.labels:
        R = ctx.R(lam)
        parr = ctx.parr(lam)
        K = R.constants.K
        ax1 = [str(g) for g in ctx.ball(axiom_radius) if not R.axiom1(g)]
        # orthogonal decomposition over separating cosets
        ortho = 0
        for f in ctx.ball(ortho_radius):
            for g in ctx.ball(axiom_radius):
                pieces = R.pieces(f, g)
                if abs(float(R.tilde(f, g).norm_sq() - sum((p.norm_sq() for p in pieces.values()), Fraction(0)))) > L2_TOL:
                    ortho += 1
                # averages stay within 2 K_D of every r~(u,v)
                for x, avg in pieces.items():
                    for u, v in sep.entrance_exit(f, g, x):
                        if (avg - lift_r_tilde(parr, u, v)).norm() > K + L2_TOL:
                            ortho += 1
        # inequality relating entrance/exit jumps to ||R(g)||
        jump_bad = 0
        for g in ctx.ball(axiom_radius):
            Rg = R.norm(g)
            for x in sep.separating(e, g, lam):
                for u, v in sep.entrance_exit(e, g, x):
                    jump = lift_r_tilde(parr, e, ~u * v).norm()
                    if jump > Rg + K + L2_TOL:
                        jump_bad += 1
        # bounded area and the axiom (2) defect
        area_bad, defect_bad, worst_ratio = 0, 0, 0.0
        for g in ctx.ball(g_radius):
            bound = R.area_bound(g)
            Rg = R.tilde(e, g).norm()
            for h in ctx.ball(h_radius):
                a = R.area(e, h, g).norm()
                worst_ratio = max(worst_ratio, a / bound if bound else (math.inf if a else 0.0))
                if a > bound + L2_TOL:
                    area_bad += 1
                if R.defect(g, h) > Rg + bound + L2_TOL:
                    defect_bad += 1
        part = {"axiom1_failures": ax1[:10], "orthogonality_failures": ortho, "jump_failures": jump_bad,
                "area_failures": area_bad, "defect_failures": defect_bad, "worst_area_ratio": worst_ratio,
                "K": K, "K_10D": R.constants.K_10D, "rep": parr.rep_descriptor()}
        out[lam] = part
        ok &= not ax1 and not ortho and not jump_bad and not area_bad and not defect_bad
    return _status(ok), out


def fit_alpha(ctx: Context, radius=None):
    """Smallest alpha with d_rel(1,x) <= alpha d_hat(1,x) on the ball."""
    r = ctx.radius if radius is None else radius
    hat = coned_off_graph(ctx.fx.mg, ctx.fx.fam, r)
    d0 = hat.bfs(gv(ctx.e))
    best = Fraction(0)
    for g in ctx.ball(r):
        dh = int(d0[hat.index[gv(g)]])
        if dh:
            best = max(best, Fraction(ctx.rel.distance(ctx.e, g), dh))
    return best


def properness_levels(ctx: Context, levels=(1, 2, 3, 4), window=10, witness=True):
    """Sub-level sets of ||P|| on the window ball and the containment check."""
    P = ctx.P
    alpha = fit_alpha(ctx)
    Ks = {lam: ctx.R(lam).constants.K for lam in ctx.fx.fam.labels}
    top = max(levels)
    W = make_ball(ctx.fx.mg, window)
    norms = {}
    for g in W:
        qn = P.Q.norm_sq(g)
        if qn > top * top:
            continue  # ||P||^2 >= ||Q||^2 already exceeds every level
        norms[g] = qn + sum(R.norm_sq(g) for R in P.Rs)
    out = []
    for N in levels:
        direct = sorted(g for g, n in norms.items() if n <= N * N)
        aN = float(alpha) * N * N / 2
        missing = []
        if witness:
            for g in direct:
                if containment_witness(P, ctx.rel, [ctx.parr(l) for l in ctx.fx.fam.labels], g, N,
                                       float(alpha), ctx.D, Ks) is None:
                    missing.append(str(g))
        A, nA = {}, 0
        for lam in ctx.fx.fam.labels:
            parr = ctx.parr(lam)
            rad = A_set_bound(parr, ctx.D, N, Ks[lam])
            if rad is None:
                size = len(parr.factor.elements())
            else:
                size = _l1_ball_size(parr.d, rad)
            A[lam] = {"l1_radius": rad, "size": size}
            nA += size
        # finite count of words w0 h1 w1 ... hn wn with n, |w_i| <= alpha_N
        m = int(math.floor(aN))
        nX = len(ctx.fx.mg.nontrivial_generators) + 1
        words = sum(nX ** k for k in range(m + 1))
        bound = sum(nA ** n * words ** (n + 1) for n in range(m + 1))
        complete = all(W.length[g] < window for g in direct)
        out.append(PropernessLevel(N, direct, aN, A, not missing, missing, bound, complete))
    return out, alpha


def _l1_ball_size(d, r):
    # number of integer points with |v|_1 <= r in Z^d
    return sum(math.comb(d, k) * math.comb(r, k) * 2 ** k for k in range(0, d + 1))


def check_properness(ctx: Context, levels=(1, 2, 3, 4), window=10, expect=None):
    rows, alpha = properness_levels(ctx, levels, window)
    nested = all(set(a.direct) <= set(b.direct) for a, b in zip(rows, rows[1:]))
    ok = nested and all(r.contained for r in rows)
    if expect:
        for r in rows:
            if r.N in expect and len(r.direct) != expect[r.N]:
                ok = False
    status = _status(ok)
    if ok and not all(r.window_complete for r in rows):
        status = UNCERTIFIED
    return status, {"alpha": str(alpha), "window": window, "nested": nested,
                         "levels": [r.to_json(list_elements=len(r.direct) <= 40) for r in rows]}


def check_two_sided(ctx: Context, outer=1, inner=3):
    """sup_k ||P(gkh) - rho_g P(k)|| <= C(h^-1) + C(g^-1) on windows."""
    P = ctx.P
    Bk = list(ctx.ball(inner))
    Cw = {}

    def C_of(s):
        if s not in Cw:
            Cw[s] = max(P.defect(s, t) for t in Bk)
        return Cw[s]

    bad = 0
    for g in ctx.ball(outer):
        for h in ctx.ball(outer):
            rhs = C_of(~h) + C_of(~g)
            for k in Bk:
                if diff_norm(P(g * k * h), P.act(g, P(k))) > rhs + L2_TOL:
                    bad += 1
    return _status(bad == 0), {"failures": bad, "outer": outer, "inner": inner}


def check_restriction(ctx: Context, levels=(1, 2, 3), window=8):
    """P restricted to the first peripheral subgroup keeps finite, nested sub-level sets."""
    labels = ctx.fx.fam.labels
    if not labels:
        return PASS, {"skipped": "no peripheral subgroups"}
    lam = labels[0]
    sub = Subgroup(f"H_{lam}", lambda g: ctx.fx.fam.contains(lam, g))
    Pr = RestrictedArray(ctx.P, sub)
    elems = [g for g in make_ball(ctx.fx.mg, window) if sub(g)]
    ax1 = all(Pr.axiom1(g) for g in elems)
    counts = {N: sum(1 for g in elems if Pr.norm_sq(g) <= N * N) for N in levels}
    boundary_hits = {N: [str(g) for g in elems if Pr.norm_sq(g) <= N * N and ctx.fx.mg.group.word_length(g.nf) == window]
                     for N in levels}
    ok = ax1 and all(not v for v in boundary_hits.values())
    return _status(ok), {"subgroup": sub.name, "axiom1": ax1, "counts": counts, "window": window,
                         "sublevel_sets_inside_window": all(not v for v in boundary_hits.values())}


def check_peripheral_arrays(ctx: Context, window=12):
    """Fixture arrays on each peripheral subgroup: axioms exactly, defect = closed form."""
    out, ok = {}, True
    for lam in ctx.fx.fam.labels:
        parr = ctx.parr(lam)
        arr = PeripheralArrayMap(parr)
        F = ctx.fx.fam.factor_of(lam)
        from .arrays import _factor_ball, window_K
        elems = [ctx.fx.fam.embed(lam, p) for p in _factor_ball(F, window // 2)]
        ax1 = all(arr.axiom1(h) for h in elems)
        worst = 0.0
        stable = True
        for p in _factor_ball(F, 3):
            K, st = window_K(parr, p, window)
            stable &= st
            worst = max(worst, abs(K - parr.closed_K(p)))
        out[lam] = {"array": parr.kind, "rep": parr.rep_descriptor(), "axiom1": ax1,
                    "K_window_vs_closed_form": worst, "window_stabilized": stable}
        ok &= ax1 and worst <= L2_TOL and stable
    return _status(ok), out


# -- full audit -----------------------------------------------------------------

def run_audit(ctx: Context, quick=False, general=True) -> list[Check]:
    checks = []
    if general:
        checks.append(_timed("tilde lemma", check_tilde_lemma, corrupt=ctx.corrupt_tilde))
        checks.append(_timed("paths lemma", check_paths_lemma))
        checks.append(_timed("2-vertex-connectivity", check_two_connectivity))
    checks.append(_timed("relative-metric oracle", check_relative_oracle, ctx))
    t = time.perf_counter()
    const = ctx.constants
    checks.append(Check("constants D >= 3C", _status(const.D >= 3 * const.C), const.to_json(), time.perf_counter() - t))
    checks.append(_timed("coned-off graph", check_graphs, ctx))
    checks.append(_timed("separating cosets", check_separating, ctx,
                         radius=min(ctx.radius, 3) if quick else None))
    try:
        ctx.tree
        checks.append(_timed("tree bicombing", check_tree_bicombing, ctx,
                             radius=min(ctx.radius, 3) if quick else None))
    except NotATree:
        checks.append(_timed("geodesic-average bicombing", check_bicombing_generic, ctx))
    checks.append(_timed("peripheral arrays", check_peripheral_arrays, ctx))
    checks.append(_timed("first array Q", check_first_array, ctx, g_radius=2 if quick else 3,
                         h_radius=min(ctx.radius + 1, 5)))
    checks.append(_timed("second array R", check_second_array, ctx, axiom_radius=min(ctx.radius, 4),
                         g_radius=2 if quick else 3, h_radius=min(ctx.radius + 1, 5)))
    checks.append(_timed("two-sided bound P", check_two_sided, ctx))
    checks.append(_timed("properness P", check_properness, ctx, levels=(1, 2, 3),
                         window=max(2 * ctx.radius, 8)))
    checks.append(_timed("restriction to a peripheral", check_restriction, ctx))
    return checks


def exit_code(checks) -> int:
    if any(c.status == FAIL for c in checks):
        return 2
    if any(c.status == UNCERTIFIED for c in checks):
        return 3
    return 0
