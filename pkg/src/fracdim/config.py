"""Run configuration files.

A configuration is a flat TOML document: one ``key = value`` pair per
line, lists in brackets. Recognised keys::

    ratios = [0.2, 0.7]        # contraction ratios, required
    probs = [0.6, 0.4]         # label probabilities, required
    branching = 2              # tree branching factor M, required
    solver_tol = 1e-12         # optional, in (0, 1e-6]
    grid_resolution = 1000     # optional, oracle grid subdivisions
    seed = 0                   # optional, unsigned 64-bit
    stopping_set_cap = 5000000 # optional
    frontier_cap = 10000000    # optional

Unknown keys and nested tables are rejected.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ValidationError
from .model import Problem, prune_zeros, validate
from .simulate import FRONTIER_CAP, STOPPING_SET_CAP, U64_MAX


@dataclass(frozen=True)
class Caps:
    stopping_set: int = STOPPING_SET_CAP
    frontier: int = FRONTIER_CAP


@dataclass(frozen=True)
class RunConfig:
    ratios: tuple = ()
    probs: tuple = ()
    branching: Optional[int] = None
    solver_tol: float = 1e-12
    grid_resolution: Optional[int] = None
    seed: int = 0
    caps: Caps = field(default_factory=Caps)

    def problem(self, prune: bool = False) -> Problem:
        if not self.ratios or not self.probs or self.branching is None:
            raise ValidationError("ratios, probs and branching are all required")
        ratios, probs = self.ratios, self.probs
        if prune:
            ratios, probs = prune_zeros(ratios, probs)
        return validate(ratios, probs, self.branching)

    def check(self) -> "RunConfig":
        if not 0 < self.solver_tol <= 1e-6:
            raise ValidationError(f"solver_tol must be in (0, 1e-6], got {self.solver_tol}")
        if not 0 <= self.seed <= U64_MAX:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.grid_resolution is not None and self.grid_resolution < 2:
            raise ValidationError("grid_resolution must be >= 2")
        if self.caps.stopping_set < 1 or self.caps.frontier < 1:
            raise ValidationError("caps must be positive")
        return self


_LIST_KEYS = ("ratios", "probs")
_INT_KEYS = ("branching", "grid_resolution", "seed", "stopping_set_cap", "frontier_cap")


def parse_config(text: str) -> RunConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"malformed configuration: {exc}") from None
    known = set(_LIST_KEYS) | set(_INT_KEYS) | {"solver_tol"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValidationError(f"unknown configuration keys: {', '.join(unknown)}")
    kw = {}
    for key in _LIST_KEYS:
        if key in raw:
            value = raw[key]
            if not isinstance(value, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
            ):
                raise ValidationError(f"{key} must be a list of numbers")
            kw[key] = tuple(float(v) for v in value)
    for key in _INT_KEYS:
        if key in raw and (not isinstance(raw[key], int) or isinstance(raw[key], bool)):
            raise ValidationError(f"{key} must be an integer")
    if "solver_tol" in raw:
        if not isinstance(raw["solver_tol"], (int, float)) or isinstance(raw["solver_tol"], bool):
            raise ValidationError("solver_tol must be a number")
        kw["solver_tol"] = float(raw["solver_tol"])
    for key in ("branching", "grid_resolution", "seed"):
        if key in raw:
            kw[key] = raw[key]
    caps = Caps(
        raw.get("stopping_set_cap", STOPPING_SET_CAP),
        raw.get("frontier_cap", FRONTIER_CAP),
    )
    return RunConfig(caps=caps, **kw).check()


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def override(config: RunConfig, **flags) -> RunConfig:
    """Replace fields with every flag that is not ``None``."""
    changes = {k: v for k, v in flags.items() if v is not None}
    caps = config.caps
    if "stopping_set_cap" in changes:
        caps = replace(caps, stopping_set=changes.pop("stopping_set_cap"))
    if "frontier_cap" in changes:
        caps = replace(caps, frontier=changes.pop("frontier_cap"))
    for key in _LIST_KEYS:
        if key in changes:
            changes[key] = tuple(float(v) for v in changes[key])
    return replace(config, caps=caps, **changes).check()
