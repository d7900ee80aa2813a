"""Experiment manifests, seed derivation and atomic output writers.

A manifest is a JSON object::

    {
      "command": "constants",             # one of COMMANDS
      "params": {"p": [4.0], "N": [8, 16, 32], ...},   # lists of scalars
      "seed": 0,                          # root seed, 0 <= seed < 2**64
      "outputs": {"csv": "constants.csv", "json": "constants.json"},
      "tolerances": {"slope": 0.1},
      "version": "0.1.0"
    }

Every run is determined by the manifest; per-task seeds are derived by
hashing the root seed with a task id.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SchemaError

__all__ = [
    "COMMANDS",
    "ExperimentManifest",
    "derive_seed",
    "write_atomic",
    "write_csv",
    "write_json",
]

COMMANDS = ("constants", "extremizers", "kernel", "weyl", "counting", "levelset", "optimize",
            "snorm", "nls", "accept")
_KEYS = {"command", "params", "seed", "outputs", "tolerances", "version"}


def _version() -> str:
    from . import __version__
    return __version__


@dataclass(frozen=True)
class ExperimentManifest:
    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    outputs: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    version: str = field(default_factory=_version)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """Raise SchemaError unless the manifest is well formed."""
        if self.command not in COMMANDS:
            raise SchemaError(f"unknown command {self.command!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2**64:
            raise SchemaError("seed must be an integer in [0, 2**64)")
        for name, d in (("params", self.params), ("outputs", self.outputs), ("tolerances", self.tolerances)):
            if not isinstance(d, dict) or not all(isinstance(k, str) for k in d):
                raise SchemaError(f"{name} must be an object with string keys")
        for k, v in self.params.items():
            vals = v if isinstance(v, list) else [v]
            if not all(isinstance(x, (int, float, str, bool)) or x is None for x in vals):
                raise SchemaError(f"parameter {k!r} must be a scalar or a list of scalars")
        if not all(isinstance(v, str) for v in self.outputs.values()):
            raise SchemaError("output paths must be strings")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in self.tolerances.values()):
            raise SchemaError("tolerances must be numbers")
        if not isinstance(self.version, str):
            raise SchemaError("version must be a string")

    def to_dict(self) -> dict:
        return {"command": self.command, "params": self.params, "seed": self.seed,
                "outputs": self.outputs, "tolerances": self.tolerances, "version": self.version}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d) -> "ExperimentManifest":
        if not isinstance(d, dict):
            raise SchemaError("manifest must be a JSON object")
        extra = set(d) - _KEYS
        if extra:
            raise SchemaError(f"unknown manifest keys {sorted(extra)}")
        if "command" not in d:
            raise SchemaError("manifest needs a command")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentManifest":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(d)

    def task_seed(self, task: str) -> int:
        return derive_seed(self.seed, task)


def derive_seed(root: int, task: str) -> int:
    """64-bit seed from ``(root, task)`` via BLAKE2b."""
    h = hashlib.blake2b(f"{int(root)}:{task}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def write_atomic(path, text: str) -> Path:
    """Write ``text`` (UTF-8) to a temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else v


def write_csv(path, rows, columns) -> Path:
    """RFC-4180 CSV with a fixed column order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return write_atomic(path, buf.getvalue())


def write_json(path, obj) -> Path:
    return write_atomic(path, json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n")


def _json_default(o):
    import numpy as np
    from fractions import Fraction

    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Fraction):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")
