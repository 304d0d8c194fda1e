"""On-disk JSON cache for calibrated constants and reports.

Entries live under ``$RELHYP_CACHE_DIR`` (default ``~/.cache/relhyp``), one
file per key.  Each file records the key parts and a sha256 of its payload;
an entry whose key parts or hash do not match is treated as a miss.  Keys
include the config digest, so editing a config invalidates its entries.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from . import __version__
from .config import canonical_json

ENV_VAR = "RELHYP_CACHE_DIR"


def default_root() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "relhyp"


def _digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


class Workspace:
    def __init__(self, root=None, enabled=True):
        self.root = Path(root) if root is not None else default_root()
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    def _path(self, kind, parts):
        key = dict(parts, kind=kind, version=__version__)
        return self.root / kind / f"{_digest(key)[:32]}.json", key

    def get(self, kind, parts):
        if not self.enabled:
            return None
        path, key = self._path(kind, parts)
        try:
            entry = json.loads(path.read_text())
        except (OSError, ValueError):
            self.misses += 1
            return None
        if entry.get("key") != key or entry.get("sha256") != _digest(entry.get("payload")):
            self.misses += 1
            return None
        self.hits += 1
        return entry["payload"]

    def put(self, kind, parts, payload):
        if not self.enabled:
            return None
        path, key = self._path(kind, parts)
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {"key": key, "sha256": _digest(payload), "payload": payload}
        # write-then-rename keeps concurrent readers from seeing half a file
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(canonical_json(entry))
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        return path

    def cached(self, kind, parts, compute):
        got = self.get(kind, parts)
        if got is None:
            got = compute()
            self.put(kind, parts, got)
        return got
