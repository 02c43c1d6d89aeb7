"""Run configuration shared by the command-line tools."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields

from .errors import DomainError
from .multizeta import DEFAULT_BOUND_A, DEFAULT_BOUND_B
from .numcore import SmoothCutoff

CONFIG_ENV = "HURWITZLAB_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    xi: float = 0.3
    bound_A: float = DEFAULT_BOUND_A
    bound_B: float = DEFAULT_BOUND_B
    cost_cap: float = 1e8
    max_evaluations: float = 1e8
    re_bound: float = 10.0
    plateau_end: float = 2.0
    support_end: float = 3.0
    seed: int = 0
    output_dir: str = "."
    threads: int = 1
    grid: int = 9

    @property
    def cutoff(self) -> SmoothCutoff:
        return SmoothCutoff(self.plateau_end, self.support_end)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise DomainError(f"unknown config keys: {sorted(extra)}")
        return cls(**doc)

    def replace(self, **kw) -> "RunConfig":
        doc = self.to_dict()
        doc.update({k: v for k, v in kw.items() if v is not None})
        return RunConfig.from_dict(doc)


def load_config(path: str | None = None) -> RunConfig:
    """Defaults, overlaid by the JSON file at path (or at $HURWITZLAB_CONFIG)."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    with open(path) as fh:
        return RunConfig.from_dict(json.load(fh))
