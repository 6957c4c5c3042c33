"""Content-addressed artifact cache keyed by canonicalized job configs.

Canonical form: JSON with sorted keys, no whitespace, floats printed with
17 significant digits (.17g), NaN/Inf rejected.  The sha256 of that string
is the cache key.  Writers are serialized per key and publish via atomic
rename; readers take no locks.  A hit whose stored config string does not
match is treated as corruption and recomputed.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path

ENV_CACHE = "TORUSDYN_CACHE"
META_NAME = "meta.json"


def _canon(value) -> str:
    if value is None or value is True or value is False:
        return json.dumps(value)
    if isinstance(value, bool):
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite floats have no canonical form")
        if value == 0.0:
            return "0"  # "-0" would parse back as the int 0 and change form
        # .17g merges 1.0 with 1; that keeps keys stable across a JSON round trip
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_canon(v) for v in value) + "]"
    if isinstance(value, dict):
        items = []
        for k in sorted(value):
            if not isinstance(k, str):
                raise ValueError("canonical JSON keys must be strings")
            items.append(json.dumps(k, ensure_ascii=False) + ":" + _canon(value[k]))
        return "{" + ",".join(items) + "}"
    raise ValueError(f"cannot canonicalize {type(value)!r}")


def canonical_json(obj) -> str:
    return _canon(obj)


def content_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CacheEntry:
    key: str
    path: Path
    artifacts: tuple[str, ...]
    created: float


class ArtifactCache:
    """Disk cache mapping canonical config hashes to artifact directories."""

    def __init__(self, root: str | os.PathLike | None = None):
        if root is None:
            root = os.environ.get(ENV_CACHE) or os.path.join(
                tempfile.gettempdir(), "torusdyn-cache"
            )
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _key_lock(self, key: str) -> threading.Lock:
        with self._locks_guard:
            lock = self._locks.get(key)
            if lock is None:
                lock = threading.Lock()
                self._locks[key] = lock
            return lock

    def _dir_for(self, key: str) -> Path:
        return self.root / key[:2] / key

    def lookup(self, config) -> CacheEntry | None:
        """Return the entry for this config if present and uncorrupted."""
        canon = canonical_json(config)
        key = hashlib.sha256(canon.encode("utf-8")).hexdigest()
        d = self._dir_for(key)
        meta_path = d / META_NAME
        if not meta_path.is_file():
            return None
        try:
            meta = json.loads(meta_path.read_text())
        except (OSError, json.JSONDecodeError):
            return None
        if meta.get("config_canonical") != canon:
            return None  # collision or corruption; force recompute
        artifacts = tuple(meta.get("artifacts", []))
        if not all((d / name).is_file() for name in artifacts):
            return None
        return CacheEntry(key=key, path=d, artifacts=artifacts, created=meta.get("created", 0.0))

    def read_artifact(self, entry: CacheEntry, name: str) -> bytes:
        return (entry.path / name).read_bytes()

    def get_or_compute(self, config, compute) -> tuple[CacheEntry, bool]:
        """Return (entry, fresh).  ``compute`` maps config -> {name: bytes}.

        Identical concurrent requests are keyed onto one lock, so the
        computation runs once; later callers read the published entry.
        """
        entry = self.lookup(config)
        if entry is not None:
            return entry, False
        canon = canonical_json(config)
        key = hashlib.sha256(canon.encode("utf-8")).hexdigest()
        with self._key_lock(key):
            entry = self.lookup(config)
            if entry is not None:
                return entry, False
            artifacts = compute(config)
            entry = self._publish(key, canon, artifacts)
            return entry, True

    def _publish(self, key: str, canon: str, artifacts: dict[str, bytes]) -> CacheEntry:
        final = self._dir_for(key)
        final.parent.mkdir(parents=True, exist_ok=True)
        created = time.time()
        tmp = Path(tempfile.mkdtemp(dir=self.root, prefix="wip-"))
        try:
            for name, blob in artifacts.items():
                (tmp / name).write_bytes(blob)
            meta = {
                "config_canonical": canon,
                "artifacts": sorted(artifacts),
                "created": created,
            }
            (tmp / META_NAME).write_text(json.dumps(meta, sort_keys=True))
            if final.exists():
                # stale or corrupt occupant: replace wholesale
                import shutil

                shutil.rmtree(final)
            os.replace(tmp, final)
        except Exception:
            import shutil

            shutil.rmtree(tmp, ignore_errors=True)
            raise
        return CacheEntry(key=key, path=final, artifacts=tuple(sorted(artifacts)), created=created)
