"""JSON run configuration."""
from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .curve import RadialCurve, read_curve_csv
from .errors import ConfigError, WarpFlowError
from .flow import FlowConfig
from .warp import WarpPotential


def harmonic_function(spec: dict):
    """theta -> r0 + sum cos_k cos(k theta) + sin_k sin(k theta) from a JSON dict."""
    r0 = float(spec.get("r0", 0.0))
    cos = {int(k): float(v) for k, v in (spec.get("cos") or {}).items()}
    sin = {int(k): float(v) for k, v in (spec.get("sin") or {}).items()}

    def f(theta):
        out = np.full_like(np.asarray(theta, dtype=float), r0)
        for k, c in cos.items():
            out = out + c * np.cos(k * theta)
        for k, s in sin.items():
            out = out + s * np.sin(k * theta)
        return out

    return f


@dataclass
class RunConfig:
    warp: dict
    initial: dict
    n: int = 256
    flow: dict = field(default_factory=dict)
    isocheck: dict = field(default_factory=dict)
    perturb: dict = field(default_factory=dict)
    symmetrize: dict = field(default_factory=dict)
    base_dir: str = "."

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        # a summary.json embeds the resolved config it was produced from
        if "config" in doc and "warp" not in doc:
            doc = doc["config"]
        return cls.from_dict(doc, base_dir=str(path.parent))

    @classmethod
    def from_dict(cls, doc: dict, base_dir: str = ".") -> "RunConfig":
        if not isinstance(doc, dict) or "warp" not in doc:
            raise ConfigError("config must be a JSON object with a 'warp' entry")
        known = {"warp", "initial", "n", "flow", "isocheck", "perturb", "symmetrize"}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(
            warp=copy.deepcopy(doc["warp"]),
            initial=copy.deepcopy(doc.get("initial", {})),
            n=int(doc.get("n", 256)),
            flow=copy.deepcopy(doc.get("flow", {})),
            isocheck=copy.deepcopy(doc.get("isocheck", {})),
            perturb=copy.deepcopy(doc.get("perturb", {})),
            symmetrize=copy.deepcopy(doc.get("symmetrize", {})),
            base_dir=base_dir,
        )
        cfg.build_warp()
        cfg.flow_config()
        return cfg

    def build_warp(self) -> WarpPotential:
        try:
            return WarpPotential.from_dict(self.warp)
        except (TypeError, KeyError, ValueError) as exc:
            raise ConfigError(f"invalid warp spec: {exc}") from exc

    def flow_config(self) -> FlowConfig:
        try:
            return FlowConfig(**self.flow)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid flow settings: {exc}") from exc

    def build_curve(self, warp: WarpPotential | None = None) -> RadialCurve:
        warp = warp or self.build_warp()
        init = self.initial
        if not init:
            raise ConfigError("config has no 'initial' curve")
        try:
            if "csv" in init:
                return read_curve_csv(warp, Path(self.base_dir) / init["csv"])
            if "constant" in init:
                c = float(init["constant"])
                return RadialCurve.from_function(warp, self.n, lambda th: np.full_like(th, c))
            return RadialCurve.from_function(warp, self.n, harmonic_function(init))
        except (WarpFlowError, ValueError, OSError, KeyError) as exc:
            raise ConfigError(f"invalid initial curve: {exc}") from exc

    def resolved(self) -> dict:
        """Fully explicit config, suitable for re-running."""
        warp = self.build_warp().to_dict()
        for key in ("r", "phi"):
            if key in warp:
                warp[key] = list(warp[key])
        out = {
            "warp": warp,
            "initial": self.initial,
            "n": self.n,
            "flow": asdict(self.flow_config()),
        }
        if "csv" in self.initial:
            out["initial"] = {"csv": str((Path(self.base_dir) / self.initial["csv"]).resolve())}
        for key in ("isocheck", "perturb", "symmetrize"):
            if getattr(self, key):
                out[key] = getattr(self, key)
        return json.loads(json.dumps(out, default=_json_default))


def _json_default(x):
    if isinstance(x, float) and math.isinf(x):
        return None
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"not serialisable: {x!r}")
