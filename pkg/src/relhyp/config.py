"""Group configuration files.

A config is a JSON object such as::

    {"type": "free_product",
     "factors": [{"type": "free", "rank": 1}, {"type": "cyclic", "order": 2}],
     "peripherals": [0]}

Factor types are ``free`` (rank), ``abelian`` (rank), ``cyclic`` (order),
``dihedral`` (n) and ``symmetric`` (n).  ``peripherals`` lists factor indices;
``labels`` optionally names them (default: upper-cased first generator name).
Bundled fixtures can be referred to by name: ``f2``, ``z2_z2``, ``f2_hyperbolic``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .groups import (
    Cyclic,
    FreeAbelian,
    FreeGroup,
    FreeProduct,
    Group,
    MarkedGroup,
    PeripheralFamily,
    dihedral,
    symmetric,
)

FIXTURES = ("f2", "z2_z2", "f2_hyperbolic")


@dataclass
class Fixture:
    name: str
    group: Group
    mg: MarkedGroup
    fam: PeripheralFamily
    raw: dict
    digest: str

    def parse(self, word: str):
        return self.group.parse(word)


def _factor(spec: dict, taken: set) -> Group:
    kind = spec.get("type")
    names = spec.get("names")

    def fresh(k):
        out = [c for c in "abcdefghijklmnopqrstuvwxyz" if c not in taken][:k]
        return out

    if kind == "free":
        rank = int(spec.get("rank", 1))
        g = FreeGroup(rank, names or fresh(rank))
    elif kind == "abelian":
        rank = int(spec.get("rank", 1))
        g = FreeAbelian(rank, names or fresh(rank))
    elif kind == "cyclic":
        g = Cyclic(int(spec["order"]), (names or fresh(1))[0])
    elif kind == "dihedral":
        g = dihedral(int(spec["n"]), tuple(names or fresh(2)))
    elif kind == "symmetric":
        g = symmetric(int(spec["n"]), tuple(names or fresh(2)))
    else:
        raise ConfigError(f"unknown group type {kind!r}")
    taken.update(g.letters)
    return g


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def build(raw: dict) -> Fixture:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    taken: set = set()
    if raw.get("type") == "free_product":
        factors = [_factor(f, taken) for f in raw.get("factors", [])]
        if not factors:
            raise ConfigError("free product needs at least one factor")
        group = FreeProduct(factors)
        periph = list(raw.get("peripherals", []))
        labels = raw.get("labels") or [factors[i].letters and sorted(factors[i].letters)[0].upper() for i in periph]
        if len(labels) != len(periph) or len(set(labels)) != len(labels):
            raise ConfigError("peripheral labels must be distinct, one per peripheral")
        fam = PeripheralFamily(group, dict(zip(labels, periph)))
    else:
        group = _factor(raw, taken)
        if raw.get("peripherals"):
            raise ConfigError("peripherals are only supported on free products")
        fam = PeripheralFamily.empty(group)
    mg = MarkedGroup.default(group)
    digest = hashlib.sha256(canonical_json(raw).encode()).hexdigest()[:16]
    return Fixture(raw.get("name", group.tag), group, mg, fam, raw, digest)


def load(source) -> Fixture:
    """Load from a dict, a fixture name, or a path to a JSON file."""
    if isinstance(source, dict):
        return build(source)
    source = str(source)
    if source in FIXTURES:
        text = resources.files("relhyp.fixtures").joinpath(f"{source}.json").read_text()
    else:
        p = Path(source)
        if not p.exists():
            raise ConfigError(f"no such config file or fixture: {source}")
        text = p.read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"bad JSON in {source}: {e}") from e
    return build(raw)
