"""1-chains with exact rational coefficients and the square-root map into l2.

A ``OneChain`` stores one coefficient per positively oriented edge (the
lexicographically smaller tag first); the reversed edge carries the negated
coefficient implicitly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import InvalidChain, TruncationError
from .graphs import orient

L2_TOL = 1e-9


def _frac_str(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class OneChain:
    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        self._c = {}
        if coeffs:
            for (u, v), c in coeffs.items():
                self._add(u, v, c)

    @classmethod
    def from_terms(cls, terms):
        """Build from ``(u, v, coeff)`` triples with any orientation."""
        out = cls()
        for u, v, c in terms:
            out._add(u, v, c)
        return out

    def _add(self, u, v, c):
        if u == v:
            raise InvalidChain(f"loop at {u!r}")
        if not isinstance(c, Rational):
            raise InvalidChain(f"coefficient {c!r} is not rational")
        e = orient(u, v)
        if e[0] != u:
            c = -c
        x = self._c.get(e, 0) + c
        if x:
            self._c[e] = x
        else:
            self._c.pop(e, None)

    def coeff(self, u, v):
        e = orient(u, v)
        c = self._c.get(e, 0)
        return c if e[0] == u else -c

    def items(self):
        return self._c.items()

    @property
    def support(self):
        return set(self._c)

    def __len__(self):
        return len(self._c)

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        return isinstance(other, OneChain) and self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __add__(self, other):
        out = OneChain()
        out._c = dict(self._c)
        for (u, v), c in other._c.items():
            out._add(u, v, c)
        return out

    def __iadd__(self, other):
        for (u, v), c in other._c.items():
            self._add(u, v, c)
        return self

    def __neg__(self):
        out = OneChain()
        out._c = {e: -c for e, c in self._c.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        if not isinstance(s, Rational):
            return NotImplemented
        out = OneChain()
        if s:
            out._c = {e: c * s for e, c in self._c.items()}
        return out

    __rmul__ = __mul__

    def norm1(self):
        return sum((abs(c) for c in self._c.values()), Fraction(0))

    def map_vertices(self, f):
        out = OneChain()
        for (u, v), c in self._c.items():
            out._add(f(u), f(v), c)
        return out

    def restrict(self, edges):
        """Projection onto a set of positively oriented edges."""
        out = OneChain()
        out._c = {e: c for e, c in self._c.items() if e in edges}
        return out

    def dump(self, fmt=str):
        return [{"edge": [fmt(u), fmt(v)], "coeff": _frac_str(c)} for (u, v), c in sorted(self._c.items())]

    def __repr__(self):
        terms = " + ".join(f"{_frac_str(c)}[{u},{v}]" for (u, v), c in self._c.items())
        return f"OneChain({terms or '0'})"


def chain_from_path(path, graph=None) -> OneChain:
    """Sum of the oriented edges along a vertex path."""
    out = OneChain()
    for u, v in zip(path, path[1:]):
        if graph is not None and not graph.has_edge(u, v):
            raise InvalidChain(f"{u!r} and {v!r} are not adjacent")
        out._add(u, v, 1)
    return out


def boundary(c: OneChain) -> dict:
    """The 0-chain d[u,v] = v - u, as a dict vertex -> coefficient."""
    out: dict = {}
    for (u, v), x in c.items():
        out[v] = out.get(v, 0) + x
        out[u] = out.get(u, 0) - x
    return {k: x for k, x in out.items() if x}


def translate(g, c, action, host=None):
    """Apply a group element to a chain; ``action(g, vertex)`` moves tags.

    With ``host`` given, edges that leave the host graph raise TruncationError.
    Works for both ``OneChain`` and ``L2Chain``.
    """
    def move(v):
        w = action(g, v)
        if host is not None and w not in host:
            raise TruncationError(f"{v!r} translates outside the truncated graph")
        return w

    if isinstance(c, OneChain):
        return c.map_vertices(move)
    return c.map_keys(lambda e: _moved_edge(e, move))


def _moved_edge(e, move):
    u, v = move(e[0]), move(e[1])
    f = orient(u, v)
    return f, (1 if f[0] == u else -1)


class SparseVector:
    """Finitely supported vector in l2 of a countable set of keys."""

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        self._c = {k: x for k, x in (coeffs or {}).items() if x}

    def items(self):
        return self._c.items()

    def get(self, k, default=0):
        return self._c.get(k, default)

    @property
    def support(self):
        return set(self._c)

    def __len__(self):
        return len(self._c)

    def _new(self, coeffs):
        out = type(self).__new__(type(self))
        SparseVector.__init__(out, coeffs)
        return out

    def __add__(self, other):
        out = dict(self._c)
        for k, x in other._c.items():
            out[k] = out.get(k, 0) + x
        return self._new(out)

    def __neg__(self):
        return self._new({k: -x for k, x in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        return self._new({k: x * s for k, x in self._c.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, SparseVector) and self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def norm_sq(self):
        return sum((x * x for x in self._c.values()), 0)

    def norm(self):
        return math.sqrt(self.norm_sq())

    def dot(self, other):
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        return sum((x * big._c.get(k, 0) for k, x in small._c.items()), 0)

    def map_keys(self, f):
        """``f(key) -> (new_key, sign)``."""
        out: dict = {}
        for k, x in self._c.items():
            k2, s = f(k)
            out[k2] = out.get(k2, 0) + s * x
        return self._new(out)

    def __repr__(self):
        return f"{type(self).__name__}({self._c!r})"


class L2Chain(SparseVector):
    """Real chain in l2 of positive edges.

    Chains produced by ``tilde`` also remember the exact signed squares of
    their coefficients, so that their squared norm is available exactly.
    """

    __slots__ = ("signed_sq",)

    def __init__(self, coeffs=None, signed_sq=None):
        super().__init__(coeffs)
        self.signed_sq = signed_sq

    def _new(self, coeffs):
        return L2Chain(coeffs)

    def __neg__(self):
        sq = None if self.signed_sq is None else {k: -x for k, x in self.signed_sq.items()}
        return L2Chain({k: -x for k, x in self._c.items()}, sq)

    def map_keys(self, f):
        out = super().map_keys(f)
        if self.signed_sq is not None:
            sq = {}
            for k, x in self.signed_sq.items():
                k2, s = f(k)
                sq[k2] = s * x
            if len(sq) == len(self.signed_sq):
                out.signed_sq = sq
        return out

    def exact_norm_sq(self):
        if self.signed_sq is None:
            raise ValueError("no exact squares recorded for this chain")
        return sum((abs(x) for x in self.signed_sq.values()), Fraction(0))

    def norm_sq(self):
        if self.signed_sq is not None:
            return float(self.exact_norm_sq())
        return super().norm_sq()


def norm(c, p=1):
    if p == 1:
        if isinstance(c, OneChain):
            return c.norm1()
        return sum(abs(x) for _, x in c.items())
    if p == 2:
        if isinstance(c, OneChain):
            return math.sqrt(sum(float(x) ** 2 for _, x in c.items()))
        return c.norm()
    raise ValueError("only p = 1 or 2")


def _signed_sqrt(c) -> float:
    r = math.sqrt(abs(c.numerator)) / math.sqrt(c.denominator) if isinstance(c, Fraction) else math.sqrt(abs(c))
    return r if c >= 0 else -r


def tilde(c: OneChain, corrupt_sign: bool = False) -> L2Chain:
    """Coefficientwise signed square root: the image has squared l2 norm = l1 norm of c.

    ``corrupt_sign`` drops the sign (negative control for audits).
    """
    coeffs, sq = {}, {}
    for e, x in c.items():
        x = Fraction(x)
        if corrupt_sign:
            coeffs[e] = abs(_signed_sqrt(x))
            sq[e] = abs(x)
        else:
            coeffs[e] = _signed_sqrt(x)
            sq[e] = x
    return L2Chain(coeffs, sq)


@dataclass
class RadialDecomposition:
    level: OneChain           # edges with both ends at the same distance from the basepoint
    shells: dict              # n -> chain supported on edges from distance n-1 to n
    psi: dict                 # n -> sum of outward-oriented coefficients in shell n
    basepoint: object

    def reassemble(self) -> OneChain:
        out = OneChain() + self.level
        for s in self.shells.values():
            out += s
        return out


def radial_decomposition(c: OneChain, graph, basepoint) -> RadialDecomposition:
    dist = graph.bfs(basepoint)
    level = OneChain()
    shells: dict = {}
    psi: dict = {}
    for (u, v), x in c.items():
        du, dv = int(dist[graph.index[u]]), int(dist[graph.index[v]])
        if du < 0 or dv < 0:
            raise InvalidChain("chain leaves the component of the basepoint")
        if du == dv:
            level._add(u, v, x)
            continue
        if abs(du - dv) != 1:
            raise InvalidChain(f"{u!r}, {v!r} is not an edge of the graph")
        n = max(du, dv)
        out_coef = x if dv > du else -x
        shells.setdefault(n, OneChain())._add(u, v, x)
        psi[n] = psi.get(n, 0) + out_coef
    return RadialDecomposition(level, dict(sorted(shells.items())), dict(sorted(psi.items())), basepoint)
