"""Group backends, marked generating sets, peripheral families and balls.

Every element carries a normal form (``nf``) owned by its backend, so that
equality and hashing are plain tuple/int comparisons.  Supported backends:

* ``Cyclic(n)``          nf is an int in ``range(n)``
* ``FreeAbelian(d)``     nf is a d-tuple of ints
* ``FreeGroup(k)``       nf is a tuple of ``(gen, exp)`` runs
* ``FiniteGroup``        nf is an index into a multiplication table
* ``FreeProduct``        nf is a tuple of ``(factor, factor_nf)`` syllables
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from .errors import BackendMismatch, CapExceeded, ConfigError, UnsupportedBackend

_LETTERS = "abcdefghijklmnopqrstuvwxyz"
_TOKEN = re.compile(r"\s*([A-Za-z])\s*(?:\^?\s*(-?\d+))?")

DEFAULT_BALL_CAP = 400_000


class Element:
    __slots__ = ("group", "nf", "_hash")

    def __init__(self, group: "Group", nf):
        self.group = group
        self.nf = nf
        self._hash = hash(nf)

    def _check(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        if other.group is not self.group and other.group != self.group:
            raise BackendMismatch(f"cannot combine elements of {self.group} and {other.group}")
        return other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return Element(self.group, self.group.mul_nf(self.nf, other.nf))

    def __invert__(self):
        return Element(self.group, self.group.inv_nf(self.nf))

    def inverse(self):
        return ~self

    def __pow__(self, k: int):
        return Element(self.group, self.group.pow_nf(self.nf, k))

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.nf == other.nf and (other.group is self.group or other.group == self.group)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.group.sort_key(self.nf) < other.group.sort_key(other.nf)

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        return other < self

    def __ge__(self, other):
        return other <= self

    def is_identity(self):
        return self.nf == self.group.identity_nf

    def __repr__(self):
        return self.group.fmt(self.nf)

    __str__ = __repr__


class Group:
    """Base class for backends.  Subclasses fill in the nf arithmetic."""

    tag = "group"
    identity_nf = None
    finite = False

    def __init__(self):
        self._letters: dict[str, object] = {}

    # arithmetic on normal forms
    def mul_nf(self, x, y):
        raise NotImplementedError

    def inv_nf(self, x):
        raise NotImplementedError

    def pow_nf(self, x, k):
        if k < 0:
            x, k = self.inv_nf(x), -k
        out = self.identity_nf
        while k:
            if k & 1:
                out = self.mul_nf(out, x)
            x = self.mul_nf(x, x)
            k >>= 1
        return out

    def sort_key(self, nf):
        return nf

    # identity/eq for backends: two groups are equal if built from the same description
    @property
    def key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Group) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"{type(self).__name__}{self.key[1:]}"

    def __call__(self, nf) -> Element:
        return Element(self, nf)

    @property
    def identity(self) -> Element:
        return Element(self, self.identity_nf)

    def default_generators(self) -> list[Element]:
        """Symmetric generating set, identity excluded."""
        raise NotImplementedError

    def word_length(self, nf) -> int:
        """Word length w.r.t. the default generators."""
        raise NotImplementedError

    def fmt(self, nf) -> str:
        raise NotImplementedError

    def parse(self, text: str) -> Element:
        text = text.strip()
        if text in ("", "1", "e", "id"):
            return self.identity
        pos, out = 0, self.identity_nf
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ConfigError(f"cannot parse word {text!r} at position {pos}")
            letter, exp = m.group(1), int(m.group(2) or 1)
            if letter not in self._letters:
                raise ConfigError(f"unknown generator {letter!r} in {text!r}")
            out = self.mul_nf(out, self.pow_nf(self._letters[letter], exp))
            pos = m.end()
        return Element(self, out)

    def elements(self) -> list[Element]:
        raise UnsupportedBackend(f"{self!r} is infinite")

    @property
    def letters(self):
        return dict(self._letters)


def _power_str(name, k):
    return name if k == 1 else f"{name}^{k}"


class Cyclic(Group):
    tag = "cyclic"
    finite = True

    def __init__(self, order: int, name: str = "c"):
        super().__init__()
        if order < 1:
            raise ConfigError("cyclic order must be positive")
        self.n = order
        self.name = name
        self.identity_nf = 0
        self._letters = {name: 1 % order}

    @property
    def key(self):
        return ("cyclic", self.n, self.name)

    def mul_nf(self, x, y):
        return (x + y) % self.n

    def inv_nf(self, x):
        return (-x) % self.n

    def pow_nf(self, x, k):
        return (x * k) % self.n

    def default_generators(self):
        gens = sorted({1 % self.n, (-1) % self.n} - {0})
        return [self(g) for g in gens]

    def word_length(self, nf):
        return min(nf, self.n - nf)

    def elements(self):
        return [self(k) for k in range(self.n)]

    def fmt(self, nf):
        return "1" if nf == 0 else _power_str(self.name, nf)


class FreeAbelian(Group):
    tag = "abelian"

    def __init__(self, rank: int, names: Sequence[str] | None = None):
        super().__init__()
        self.rank = rank
        if names is None:
            names = _LETTERS[23:23 + rank] if rank <= 3 else _LETTERS[:rank]
        self.names = tuple(names)
        if len(self.names) != rank:
            raise ConfigError("need one name per coordinate")
        self.identity_nf = (0,) * rank
        for i, nm in enumerate(self.names):
            self._letters[nm] = self._unit(i, 1)

    def _unit(self, i, s):
        v = [0] * self.rank
        v[i] = s
        return tuple(v)

    @property
    def key(self):
        return ("abelian", self.rank, self.names)

    def mul_nf(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def inv_nf(self, x):
        return tuple(-a for a in x)

    def pow_nf(self, x, k):
        return tuple(a * k for a in x)

    def default_generators(self):
        return [self(self._unit(i, s)) for i in range(self.rank) for s in (1, -1)]

    def word_length(self, nf):
        return sum(abs(a) for a in nf)

    def fmt(self, nf):
        if not any(nf):
            return "1"
        return "".join(_power_str(nm, a) for nm, a in zip(self.names, nf) if a)


class FreeGroup(Group):
    tag = "free"

    def __init__(self, rank: int, names: Sequence[str] | None = None):
        super().__init__()
        self.rank = rank
        self.names = tuple(names or _LETTERS[:rank])
        if len(self.names) != rank:
            raise ConfigError("need one name per generator")
        self.identity_nf = ()
        for i, nm in enumerate(self.names):
            self._letters[nm] = ((i, 1),)

    @property
    def key(self):
        return ("free", self.rank, self.names)

    def mul_nf(self, x, y):
        out = list(x)
        for g, e in y:
            if out and out[-1][0] == g:
                e2 = out.pop()[1] + e
                if e2:
                    out.append((g, e2))
            else:
                out.append((g, e))
        return tuple(out)

    def inv_nf(self, x):
        return tuple((g, -e) for g, e in reversed(x))

    def sort_key(self, nf):
        # shortlex on letters, with a^-1 sorted right after a
        letters = []
        for g, e in nf:
            letters.extend([(g, 0 if e > 0 else 1)] * abs(e))
        return (len(letters), letters)

    def default_generators(self):
        return [self(((i, s),)) for i in range(self.rank) for s in (1, -1)]

    def word_length(self, nf):
        return sum(abs(e) for _, e in nf)

    def fmt(self, nf):
        if not nf:
            return "1"
        return "".join(_power_str(self.names[g], e) for g, e in nf)


class FiniteGroup(Group):
    """Finite group given by permutation generators, stored as a table."""

    tag = "finite"
    finite = True

    def __init__(self, perms: Sequence[Sequence[int]], names: Sequence[str], label: str):
        super().__init__()
        self.label = label
        self.names = tuple(names)
        gens = [tuple(p) for p in perms]
        deg = len(gens[0])
        ident = tuple(range(deg))
        # BFS closure over gens and inverses records shortlex words
        moves = []
        for i, p in enumerate(gens):
            moves.append((i, 1, p))
            inv = [0] * deg
            for a, b in enumerate(p):
                inv[b] = a
            inv = tuple(inv)
            if inv != p:
                moves.append((i, -1, inv))
        index = {ident: 0}
        perms_list = [ident]
        words = [()]
        queue = deque([ident])
        while queue:
            p = queue.popleft()
            w = words[index[p]]
            for i, s, m in moves:
                q = tuple(p[m[k]] for k in range(deg))  # p then m
                if q not in index:
                    index[q] = len(perms_list)
                    perms_list.append(q)
                    words.append(w + ((i, s),))
                    queue.append(q)
        self.order = len(perms_list)
        self._perms = perms_list
        self._index = index
        self._words = words
        n = self.order
        self._mul = [[index[tuple(a[b[k]] for k in range(deg))] for b in perms_list] for a in perms_list]
        self._inv = [row.index(0) for row in self._mul]
        self.identity_nf = 0
        self._gen_nfs = sorted({index[m] for _, _, m in moves} - {0})
        for i, nm in enumerate(self.names):
            self._letters[nm] = index[gens[i]]
        self._n = n

    @property
    def key(self):
        return ("finite", self.label)

    def mul_nf(self, x, y):
        return self._mul[x][y]

    def inv_nf(self, x):
        return self._inv[x]

    def default_generators(self):
        return [self(k) for k in self._gen_nfs]

    def word_length(self, nf):
        return len(self._words[nf])

    def elements(self):
        return [self(k) for k in range(self.order)]

    def fmt(self, nf):
        w = self._words[nf]
        if not w:
            return "1"
        out, run = [], None
        for i, s in w:
            if run and run[0] == i:
                run[1] += s
            else:
                if run:
                    out.append(run)
                run = [i, s]
        out.append(run)
        return "".join(_power_str(self.names[i], e) for i, e in out)

    def perm(self, nf):
        return self._perms[nf]


def dihedral(n: int, names=("r", "t")) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    rot = [(k + 1) % n for k in range(n)]
    ref = [(-k) % n for k in range(n)]
    return FiniteGroup([rot, ref], names, f"D{n}")


def symmetric(n: int, names=("t", "u")) -> FiniteGroup:
    if n < 2:
        return FiniteGroup([[0]], names[:1], f"S{n}")
    swap = list(range(n))
    swap[0], swap[1] = 1, 0
    cyc = [(k + 1) % n for k in range(n)]
    return FiniteGroup([swap, cyc], names, f"S{n}")


class FreeProduct(Group):
    """Free product of backends; nf is a reduced tuple of syllables."""

    tag = "free_product"

    def __init__(self, factors: Sequence[Group]):
        super().__init__()
        self.factors = tuple(factors)
        self.identity_nf = ()
        self._fid = tuple(f.identity_nf for f in self.factors)
        for i, f in enumerate(self.factors):
            for letter, nf in f.letters.items():
                if letter in self._letters:
                    raise ConfigError(f"generator name {letter!r} used by two factors")
                self._letters[letter] = ((i, nf),)

    @property
    def key(self):
        return ("free_product",) + tuple(f.key for f in self.factors)

    def mul_nf(self, x, y):
        out = list(x)
        for i, p in y:
            if out and out[-1][0] == i:
                q = self.factors[i].mul_nf(out.pop()[1], p)
                if q != self._fid[i]:
                    out.append((i, q))
            else:
                out.append((i, p))
        return tuple(out)

    def inv_nf(self, x):
        return tuple((i, self.factors[i].inv_nf(p)) for i, p in reversed(x))

    def sort_key(self, nf):
        return (self.word_length(nf), tuple((i, self.factors[i].sort_key(p)) for i, p in nf))

    def embed(self, i: int, factor_nf) -> Element:
        if factor_nf == self._fid[i]:
            return self.identity
        return self(((i, factor_nf),))

    def default_generators(self):
        return [self.embed(i, g.nf) for i, f in enumerate(self.factors) for g in f.default_generators()]

    def word_length(self, nf):
        return sum(self.factors[i].word_length(p) for i, p in nf)

    def syllables(self, g: Element):
        return list(g.nf)

    def fmt(self, nf):
        if not nf:
            return "1"
        return "".join(self.factors[i].fmt(p) for i, p in nf)



@dataclass(frozen=True)
class MarkedGroup:
    """A group with a finite symmetric generating set ``X`` (identity allowed)."""

    group: Group
    X: tuple
    X0: tuple | None = None

    def __post_init__(self):
        xs = set(self.X)
        for x in self.X:
            if x.group != self.group:
                raise BackendMismatch("generator from a different backend")
            if ~x not in xs:
                raise ConfigError(f"generating set is not symmetric: missing inverse of {x}")
        if self.X0 is not None:
            x0 = set(self.X0)
            if self.group.identity not in x0:
                raise ConfigError("X0 must contain the identity")
            if {a * b for a in x0 for b in x0} != xs:
                raise ConfigError("X is not X0 squared")

    @classmethod
    def default(cls, group: Group) -> "MarkedGroup":
        return cls(group, tuple(group.default_generators()))

    @classmethod
    def squared(cls, group: Group, X0: Iterable[Element]) -> "MarkedGroup":
        x0 = tuple(sorted(set(X0)))
        sq = tuple(sorted({a * b for a in x0 for b in x0}))
        return cls(group, sq, x0)

    @property
    def nontrivial_generators(self):
        return tuple(x for x in self.X if not x.is_identity())

    def is_default(self):
        return set(self.X) - {self.group.identity} == set(self.group.default_generators())


def multiply_reduce(a: Element, b: Element) -> Element:
    return a * b


def inverse(a: Element) -> Element:
    return ~a


@dataclass
class PeripheralFamily:
    """Peripheral subgroups of a free product, each given by a factor index."""

    group: Group
    factors: dict = field(default_factory=dict)  # label -> factor index

    def __post_init__(self):
        if self.factors and not isinstance(self.group, FreeProduct):
            raise UnsupportedBackend("peripheral families need a free product backend")
        for lam, i in self.factors.items():
            if not 0 <= i < len(self.group.factors):
                raise ConfigError(f"peripheral {lam!r} refers to missing factor {i}")

    @classmethod
    def empty(cls, group):
        return cls(group, {})

    @property
    def labels(self):
        return sorted(self.factors)

    def __len__(self):
        return len(self.factors)

    def factor_of(self, lam):
        return self.group.factors[self.factors[lam]]

    def label_of_factor(self, i):
        for lam, j in self.factors.items():
            if j == i:
                return lam
        return None

    def contains(self, lam, g: Element) -> bool:
        nf = g.nf
        return not nf or (len(nf) == 1 and nf[0][0] == self.factors[lam])

    def coset_rep(self, lam, x: Element) -> Element:
        """Shortlex-minimal representative of ``x H_lam``: drop a trailing syllable in H_lam."""
        nf = x.nf
        if nf and nf[-1][0] == self.factors[lam]:
            return Element(x.group, nf[:-1])
        return x

    def embed(self, lam, factor_nf) -> Element:
        return self.group.embed(self.factors[lam], factor_nf)

    def restrict_nf(self, lam, h: Element):
        """Factor normal form of an element of H_lam."""
        if not self.contains(lam, h):
            raise ValueError(f"{h} is not in H_{lam}")
        i = self.factors[lam]
        return h.nf[0][1] if h.nf else self.group.factors[i].identity_nf

    def subgroup_word_length(self, lam, h: Element) -> int:
        return self.factor_of(lam).word_length(self.restrict_nf(lam, h))


def peripheral_syllables(g: Element, fam: PeripheralFamily):
    """Syllable decomposition labelled by peripheral label (or factor index if not peripheral)."""
    if not isinstance(g.group, FreeProduct):
        raise UnsupportedBackend("syllables only exist for free products")
    out = []
    for i, p in g.nf:
        lam = fam.label_of_factor(i)
        out.append((lam if lam is not None else i, g.group.embed(i, p)))
    return out


class Ball:
    """Elements of word length at most ``radius`` in BFS order."""

    def __init__(self, mg: MarkedGroup, radius: int, elements: list, length: dict):
        self.mg = mg
        self.radius = radius
        self.elements = elements
        self.length = length

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self.length

    def sphere(self, r):
        return [g for g in self.elements if self.length[g] == r]

    def within(self, r):
        return [g for g in self.elements if self.length[g] <= r]


def ball(mg: MarkedGroup, radius: int, cap: int = DEFAULT_BALL_CAP) -> Ball:
    if radius < 0:
        raise ValueError("radius must be non-negative")
    e = mg.group.identity
    length = {e: 0}
    order = [e]
    frontier = [e]
    gens = mg.nontrivial_generators
    for r in range(1, radius + 1):
        nxt = []
        for g in frontier:
            for s in gens:
                h = g * s
                if h not in length:
                    length[h] = r
                    order.append(h)
                    nxt.append(h)
                    if len(order) > cap:
                        raise CapExceeded(f"ball of radius {radius} exceeds {cap} elements")
        frontier = nxt
    return Ball(mg, radius, order, length)
