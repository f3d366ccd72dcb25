"""Run configuration: defaults, ``key = value`` files and output headers."""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, fields
from typing import Iterable, Mapping

from . import __version__

__all__ = ["Config", "ConfigError", "load_config_text", "file_digest", "output_header"]


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    provability: str = "|-"            # comma-separated provability typecodes
    end_label: str = ""                # cut the database after this label
    exclude: str = ""                  # labels left out of extraction
    protect: str = ""                  # protected nonterminals (default: roots)
    min_occurrences: int = 2
    arity_cap: int = 0                 # 0: unbounded
    guard: str = "auto"                # none | mgt-defined | mgt-subsumes | auto
    prune_order: str = "ascending"     # ascending save-value, recomputed per unfold
    edge_budget: int = 100000
    match_mode: str = "mod-permutation"
    pipeline: str = "treerepair,prune,nonlinear,samevalue,mgtreduce"
    kmin: str = "auto"
    fit_method: str = "approx"

    @staticmethod
    def keys() -> list:
        return [f.name for f in fields(Config)]

    def set(self, key: str, raw) -> None:
        key = key.replace("-", "_")
        types = {f.name: f.type for f in fields(self)}
        if key not in types:
            raise ConfigError(f"unknown config key {key!r}")
        if types[key] in (int, "int"):
            try:
                raw = int(raw)
            except (TypeError, ValueError):
                raise ConfigError(f"{key} expects an integer, got {raw!r}") from None
        setattr(self, key, raw)

    def update(self, values: Mapping) -> "Config":
        for k, v in values.items():
            if v is not None:
                self.set(k, v)
        return self

    def lines(self) -> list:
        return [f"{k}={getattr(self, k)}" for k in self.keys()]

    def digest(self) -> str:
        return hashlib.sha256("\n".join(self.lines()).encode()).hexdigest()

    @staticmethod
    def split(value: str) -> list:
        return [s for s in (x.strip() for x in value.split(",")) if s]


def load_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment line."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            raise ConfigError(f"config line {n}: expected key = value")
        k, v = s.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def output_header(cfg: Config, command: str, inputs: Iterable = ()) -> list:
    """Header lines: tool version, command, config digest, config, input digests."""
    out = [f"proofgram {__version__}", f"command {command}", f"config-sha256 {cfg.digest()}"]
    out += [f"config {line}" for line in cfg.lines()]
    for p in inputs:
        out.append(f"input {os.path.basename(str(p))} sha256 {file_digest(p)}")
    return out
