"""Arrays on groups and the arrays built from separating cosets.

An array on G into a unitary representation (K, pi) is a map r: G -> K with

1. ``pi_g r(g^-1) = -r(g)``,
2. ``sup_h ||r(gh) - pi_g r(h)|| < inf`` for each g,
3. (proper) ``{g : ||r(g)|| <= N}`` finite for each N.

Vectors of l2(G) are ``GVector``s keyed by ``(i, y)`` where ``y`` is the
canonical representative of ``y K_i``; for the regular representation the
subgroup K_i is trivial and ``y`` is just a group element.  The Z^d fixture
uses one coordinate copy per direction, in l2(G / K_i) with K_i the kernel of
coordinate i.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice

from .bicombing import Bicombing, ConeTree
from .chains import L2_TOL, L2Chain, SparseVector, tilde, translate
from .cosets import CosetHandle, Separation
from .errors import ConfigError, InvariantViolation
from .graphs import act, gv
from .groups import Element, FreeAbelian, FreeGroup, PeripheralFamily


class GVector(SparseVector):
    """Finitely supported vector of l2(G) (or a finite sum of quasi-regular pieces)."""

    __slots__ = ()

    def translate(self, g, canon):
        """Left translation by g; ``canon(i, y)`` reduces modulo K_i."""
        return self.map_keys(lambda k: ((k[0], canon(k[0], g * k[1])), 1))

    def dump(self):
        return [{"key": [i, str(y)], "coeff": str(x)} for (i, y), x in sorted(self.items(), key=lambda t: (t[0][0], t[0][1]))]


# -- peripheral fixtures ----------------------------------------------------

class PeripheralArray:
    """Array on one peripheral subgroup, described through its factor group."""

    kind = "abstract"

    def __init__(self, fam: PeripheralFamily, lam):
        self.fam = fam
        self.lam = lam
        self.factor = fam.factor_of(lam)

    def fiber(self, p) -> dict:
        """r(h) for the factor normal form p, keyed by (i, factor nf of the basis coset)."""
        raise NotImplementedError

    def canon(self, i, y: Element) -> Element:
        """Canonical representative of y K_i in G."""
        return y

    def closed_K(self, p):
        """Closed form of K_h = sup_k ||r~(h,k) - r~(1,k)||, or None."""
        return None

    def rep_descriptor(self):
        return "regular"


def _coords(factor, nf):
    if isinstance(factor, FreeGroup) and factor.rank == 1:
        return (nf[0][1],) if nf else (0,)
    if isinstance(factor, FreeAbelian):
        return nf
    raise ConfigError(f"Z^d array needs a rank-one free or free abelian factor, got {factor!r}")


def _from_coords(factor, v):
    if isinstance(factor, FreeGroup):
        return ((0, v[0]),) if v[0] else ()
    return tuple(v)


def _interval(n):
    """Signed interval chain: sum e_k over [0, n) for n>0, minus sum over [n, 0) for n<0."""
    if n >= 0:
        return {k: 1 for k in range(n)}
    return {k: -1 for k in range(n, 0)}


class ZArray(PeripheralArray):
    kind = "z"

    def __init__(self, fam, lam):
        super().__init__(fam, lam)
        self.d = len(_coords(self.factor, self.factor.identity_nf))
        self._i = fam.factors[lam]

    def fiber(self, p):
        out = {}
        for i, n in enumerate(_coords(self.factor, p)):
            for k, c in _interval(n).items():
                unit = [0] * self.d
                unit[i] = k
                out[(i, _from_coords(self.factor, unit))] = c
        return out

    def canon(self, i, y):
        if self.d == 1:
            return y
        nf = y.nf
        if nf and nf[-1][0] == self._i:
            v = [0] * self.d
            v[i] = nf[-1][1][i]
            if any(v):
                return Element(y.group, nf[:-1] + ((self._i, tuple(v)),))
            return Element(y.group, nf[:-1])
        return y

    def closed_K(self, p):
        # cocycle identity: r~(h,k) - r~(1,k) = -lambda_... r(h) has norm sqrt(|h|_1)
        return math.sqrt(sum(abs(c) for c in _coords(self.factor, p)))

    def rep_descriptor(self):
        return "regular" if self.d == 1 else f"sum of {self.d} quasi-regular copies l2(G/K_i)"


class ZeroArray(PeripheralArray):
    kind = "zero"

    def fiber(self, p):
        return {}

    def closed_K(self, p):
        return 0.0


def z_fixture_array(fam, lam) -> ZArray:
    return ZArray(fam, lam)


def finite_fixture_array(fam, lam) -> ZeroArray:
    if not fam.factor_of(lam).finite:
        raise ConfigError("the zero array is proper only on a finite group")
    return ZeroArray(fam, lam)


def default_peripheral_array(fam, lam) -> PeripheralArray:
    f = fam.factor_of(lam)
    if f.finite:
        return ZeroArray(fam, lam)
    return ZArray(fam, lam)


# -- lift and coset averages ------------------------------------------------

def lift_r_tilde(parr: PeripheralArray, f: Element, g: Element) -> GVector:
    """r~(f,g) = lambda_G(f) r(f^-1 g) when f^-1 g is in H_mu, else 0."""
    x = ~f * g
    if not parr.fam.contains(parr.lam, x):
        return GVector()
    p = parr.fam.restrict_nf(parr.lam, x)
    out = {}
    for (i, k), c in parr.fiber(p).items():
        y = parr.canon(i, f * parr.fam.embed(parr.lam, k))
        out[(i, y)] = out.get((i, y), 0) + c
    return GVector(out)


def coset_average(sep: Separation, parr: PeripheralArray, f, g, x: CosetHandle) -> GVector:
    """Average of r~(u,v) over the entrance/exit pairs of x."""
    E = sep.entrance_exit(f, g, x)
    total = GVector()
    for u, v in sorted(E, key=lambda t: (t[0], t[1])):
        total = total + lift_r_tilde(parr, u, v)
    return total * Fraction(1, len(E))


def R_tilde(sep: Separation, parr: PeripheralArray, f, g) -> GVector:
    total = GVector()
    for x in sep.separating(f, g, parr.lam):
        total = total + coset_average(sep, parr, f, g, x)
    return total


# -- defect constants -------------------------------------------------------

def window_K(parr: PeripheralArray, p, window: int):
    """sup over factor elements k with |k| <= window of ||r~(h,k) - r~(1,k)||, plus stabilization flag."""
    fam, lam = parr.fam, parr.lam
    h = fam.embed(lam, p)
    F = parr.factor

    def sup(w):
        best = 0.0
        for k in _factor_ball(F, w):
            kk = fam.embed(lam, k)
            best = max(best, (lift_r_tilde(parr, h, kk) - lift_r_tilde(parr, fam.group.identity, kk)).norm())
        return best

    full, half = sup(window), sup(window // 2)
    return full, abs(full - half) <= L2_TOL


def _factor_ball(F, radius):
    gens = [g.nf for g in F.default_generators()]
    seen = {F.identity_nf: 0}
    frontier = [F.identity_nf]
    for r in range(1, radius + 1):
        nxt = []
        for p in frontier:
            for s in gens:
                q = F.mul_nf(p, s)
                if q not in seen:
                    seen[q] = r
                    nxt.append(q)
        frontier = nxt
    return list(seen)


def K_element(parr, p):
    c = parr.closed_K(p)
    if c is not None:
        return c
    return window_K(parr, p, 16)[0]


def K_level(parr, n) -> float:
    """K_n = max K_h over h with d-hat(1,h) <= n (factor word length for the fixtures)."""
    return max((K_element(parr, p) for p in _factor_ball(parr.factor, int(math.floor(n)))), default=0.0)


def L_constant(sep: Separation, lam, g) -> float:
    """L_g = max d-hat(u,v) over the entrance/exit pairs of the (1,g)-separating cosets."""
    e = sep.rel.G.identity
    best = 0
    for x in sep.separating(e, g, lam):
        for u, v in sep.entrance_exit(e, g, x):
            best = max(best, sep.rel.hat_distance(lam, u, v))
    return best


@dataclass
class DefectConstants:
    lam: str
    D: float
    C: int
    K_D: float
    K_10D: float
    K: float

    def K_n(self, parr, n):
        return K_level(parr, n)


def defect_constants(parr: PeripheralArray, D, C=1) -> DefectConstants:
    K_D = K_level(parr, D)
    return DefectConstants(parr.lam, D, C, K_D, K_level(parr, 10 * D), 2 * K_D)


# -- arrays on G ----------------------------------------------------------

class ArrayMap:
    name = "array"

    def evaluate(self, g):
        raise NotImplementedError

    def act(self, g, v):
        raise NotImplementedError

    def __call__(self, g):
        return self.evaluate(g)

    def norm_sq(self, g):
        v = self.evaluate(g)
        return v.norm_sq()

    def norm(self, g):
        return math.sqrt(self.norm_sq(g))

    def defect(self, g, h):
        """||r(gh) - pi_g r(h)||."""
        return diff_norm(self.evaluate(g * h), self.act(g, self.evaluate(h)))

    def axiom1(self, g) -> bool:
        """pi_g r(g^-1) == -r(g), exactly."""
        return exact_equal(self.act(g, self.evaluate(~g)), neg(self.evaluate(g)))

    def descriptor(self):
        return self.name


def neg(v):
    if isinstance(v, tuple):
        return tuple(neg(w) for w in v)
    return -v


def exact_equal(v, w) -> bool:
    if isinstance(v, tuple):
        return all(exact_equal(a, b) for a, b in zip(v, w))
    if isinstance(v, L2Chain) and v.signed_sq is not None and w.signed_sq is not None:
        return {k: x for k, x in v.signed_sq.items() if x} == {k: x for k, x in w.signed_sq.items() if x}
    return v == w


def diff_norm(v, w) -> float:
    if isinstance(v, tuple):
        return math.sqrt(sum(diff_norm(a, b) ** 2 for a, b in zip(v, w)))
    return (v - w).norm()


class PeripheralArrayMap(ArrayMap):
    """A peripheral array viewed as an array on H_mu into l2(G)."""

    def __init__(self, parr: PeripheralArray):
        self.parr = parr
        self.name = f"r_{parr.lam}"

    def evaluate(self, h):
        return lift_r_tilde(self.parr, h.group.identity, h)

    def act(self, g, v):
        return v.translate(g, self.parr.canon)

    def contains(self, h):
        return self.parr.fam.contains(self.parr.lam, h)


class RArray(ArrayMap):
    """R(g) = sum over separating cosets of the coset averages."""

    def __init__(self, sep: Separation, parr: PeripheralArray, constants: DefectConstants | None = None):
        self.sep = sep
        self.parr = parr
        self.name = f"R_{parr.lam}"
        self.constants = constants or defect_constants(parr, sep.D)
        self._memo: dict = {}

    def tilde(self, f, g):
        key = (f, g)
        got = self._memo.get(key)
        if got is None:
            got = self._memo[key] = R_tilde(self.sep, self.parr, f, g)
        return got

    def evaluate(self, g):
        return self.tilde(g.group.identity, g)

    def act(self, g, v):
        return v.translate(g, self.parr.canon)

    def pieces(self, f, g):
        return {x: coset_average(self.sep, self.parr, f, g, x) for x in self.sep.separating(f, g, self.parr.lam)}

    def area(self, a, b, c):
        return self.tilde(a, b) + self.tilde(b, c) + self.tilde(c, a)

    def area_bound(self, g) -> float:
        """6(10 K_{10D} + K_{6C+L_g} + ||R~(g,1)||)."""
        k = self.constants
        L = L_constant(self.sep, self.parr.lam, g)
        return 6 * (10 * k.K_10D + K_level(self.parr, 6 * k.C + L) + self.tilde(g, g.group.identity).norm())


def second_array_R(sep, parr, constants=None) -> RArray:
    return RArray(sep, parr, constants)


class QArray(ArrayMap):
    """Q(g) = tilde(q[1, g]) for a bicombing on the subdivided coned-off graph."""

    def __init__(self, q: Bicombing, fam: PeripheralFamily, corrupt_sign: bool = False):
        self.q = q
        self.fam = fam
        self.corrupt = corrupt_sign
        self.name = "Q"
        self._memo: dict = {}

    def chain(self, g):
        return self.q(gv(g.group.identity), gv(g))

    def evaluate(self, g):
        got = self._memo.get(g)
        if got is None:
            got = self._memo[g] = tilde(self.chain(g), self.corrupt)
        return got

    def act(self, g, v):
        return translate(g, v, lambda h, w: act(h, w, self.fam))

    def norm_sq(self, g):
        return self.evaluate(g).exact_norm_sq()

    def defect_bound(self, g, T):
        """Square root of 2(T + ||q[1,g]||_1)."""
        return math.sqrt(2 * (T + self.chain(g).norm1()))


def first_array_Q(q, fam, corrupt_sign=False) -> QArray:
    return QArray(q, fam, corrupt_sign)


class PArray(ArrayMap):
    """g -> (Q(g), (R_mu(g))_mu) into l2(Y) plus one copy of l2(G) per peripheral."""

    def __init__(self, Q: QArray, Rs: list):
        self.Q = Q
        self.Rs = list(Rs)
        self.name = "P"

    def evaluate(self, g):
        return (self.Q(g),) + tuple(R(g) for R in self.Rs)

    def act(self, g, v):
        return (self.Q.act(g, v[0]),) + tuple(R.act(g, w) for R, w in zip(self.Rs, v[1:]))

    def norm_sq(self, g):
        return self.Q.norm_sq(g) + sum(R.norm_sq(g) for R in self.Rs)

    def norm_sq_parts(self, g):
        return [self.Q.norm_sq(g)] + [R.norm_sq(g) for R in self.Rs]


def combined_array_P(Q, Rs) -> PArray:
    return PArray(Q, Rs)


@dataclass
class Subgroup:
    """Subgroup handle: a membership test and a name."""

    name: str
    contains: object

    def __call__(self, g):
        return self.contains(g)


class RestrictedArray(ArrayMap):
    def __init__(self, arr: ArrayMap, sub: Subgroup):
        self.arr = arr
        self.sub = sub
        self.name = f"{arr.name}|{sub.name}"

    def _check(self, g):
        if not self.sub(g):
            raise ValueError(f"{g} is not in {self.sub.name}")

    def evaluate(self, g):
        self._check(g)
        return self.arr.evaluate(g)

    def act(self, g, v):
        self._check(g)
        return self.arr.act(g, v)

    def norm_sq(self, g):
        self._check(g)
        return self.arr.norm_sq(g)


def restrict_array(arr: ArrayMap, sub: Subgroup) -> RestrictedArray:
    return RestrictedArray(arr, sub)


# -- properness -------------------------------------------------------------

@dataclass
class PropernessLevel:
    N: float
    direct: list            # elements of the window with ||P|| <= N
    alpha_N: float
    A: dict                 # label -> description of A_mu
    contained: bool
    witnesses_missing: list = field(default_factory=list)
    containment_bound: int = 0
    window_complete: bool = True   # no element of the level set sits on the window's outer sphere

    def to_json(self, list_elements=False):
        out = {"N": self.N, "count": len(self.direct), "alpha_N": self.alpha_N,
               "contained": self.contained, "containment_bound": self.containment_bound,
               "window_complete": self.window_complete, "A": self.A}
        if self.witnesses_missing:
            out["witnesses_missing"] = [str(g) for g in self.witnesses_missing[:10]]
        if list_elements:
            out["elements"] = sorted(str(g) for g in self.direct)
        return out


def A_set_bound(parr: PeripheralArray, D, N, K_mu):
    """A_mu = {d-hat(1,h) <= D} u {||r(h)|| <= N + K_mu}; for the Z^d fixture ||r(h)||^2 = |h|_1.

    Returns the l1 radius of A_mu in the factor, or None for a finite factor.
    """
    if isinstance(parr, ZArray):
        return max(int(math.floor(D)), int(math.floor((N + K_mu) ** 2 + 1e-9)))
    return None


def in_A(parr: PeripheralArray, h_nf, D, N, K_mu, rel) -> bool:
    h = parr.fam.embed(parr.lam, h_nf)
    if rel.hat_distance(parr.lam, h) <= D:
        return True
    return lift_r_tilde(parr, h.group.identity, h).norm() <= N + K_mu + L2_TOL


def containment_witness(P: PArray, rel, parrs, g, N, alpha, D, Ks, cap=64):
    """A geodesic labelled w0 h1 w1 ... hn wn with n, |w_i| <= alpha_N and h_i in the A sets."""
    aN = alpha * N * N / 2
    sp = rel.geodesic_space(g.group.identity, g)
    by_lam = {p.lam: p for p in parrs}
    for path in islice(sp.paths(), cap):
        hs, runs, run = [], [], 0
        ok = True
        for l in path.letters:
            if l.kind == "H":
                parr = by_lam[l.label]
                if not in_A(parr, parr.fam.restrict_nf(l.label, l.elem), D, N, Ks[l.label], rel):
                    ok = False
                    break
                hs.append(l)
                runs.append(run)
                run = 0
            else:
                run += 1
        runs.append(run)
        if not ok or len(hs) > aN or max(runs) > aN:
            continue
        if path.label() != g:
            raise InvariantViolation(f"geodesic label does not multiply to {g}")
        return path
    return None


# -- generic audit ----------------------------------------------------------

@dataclass
class ArrayAudit:
    array: str
    axiom1: bool
    axiom2: list            # dicts {g, defect, bound}
    properness: list        # PropernessLevel
    constants: dict = field(default_factory=dict)

    @property
    def ok(self):
        return (self.axiom1 and all(r["bound"] is None or r["defect"] <= r["bound"] + L2_TOL for r in self.axiom2)
                and all(p.contained for p in self.properness))

    def to_json(self, list_elements=True):
        return {
            "array": self.array,
            "axiom1": "exact-pass" if self.axiom1 else "fail",
            "axiom2": [{"g": str(r["g"]), "defect": r["defect"], "bound": r["bound"]} for r in self.axiom2],
            "properness": [p.to_json(list_elements=list_elements and len(p.direct) <= 60) for p in self.properness],
            "constants": self.constants,
        }


def audit_array(arr: ArrayMap, ball, thresholds, g_elements=None, h_elements=None, bound=None,
                containment=None, constants=None) -> ArrayAudit:
    """Axiom (1) on the ball, defect sups per g, and sub-level sets per threshold.

    ``bound(g)`` gives the defect bound to compare against (optional);
    ``containment(g, N)`` returns True when g lies in the explicit superset
    of the level-N set (optional).  Sub-level sets are taken inside ``ball``
    and flagged when they touch its outer sphere.
    """
    elems = list(ball)
    ax1 = all(arr.axiom1(g) for g in elems)
    gs = elems if g_elements is None else list(g_elements)
    hs = elems if h_elements is None else list(h_elements)
    axiom2 = []
    for g in gs:
        d = max((arr.defect(g, h) for h in hs), default=0.0)
        axiom2.append({"g": g, "defect": d, "bound": None if bound is None else bound(g)})
    norms = {g: arr.norm_sq(g) for g in elems}
    radius = max(ball.length.values(), default=0) if hasattr(ball, "length") else None
    levels = []
    for N in thresholds:
        direct = sorted(g for g, n in norms.items() if n <= N * N + L2_TOL)
        missing = [g for g in direct if containment is not None and not containment(g, N)]
        complete = radius is None or all(ball.length[g] < radius for g in direct)
        levels.append(PropernessLevel(N, direct, 0.0, {}, not missing, missing, 0, complete))
    return ArrayAudit(arr.name, ax1, axiom2, levels, constants or {})
