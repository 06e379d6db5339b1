"""JSON experiment configuration and checked-in presets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from . import analysis
from .dynamics import AverageConsensus, DynamicsError, OjaConstantH, OjaVaryingCovariance
from .geometry import GeometryError, random_state, renormalize
from .sim import IntegratorConfig, perturb_consensus
from .spectral import design_constant_H

INIT_KINDS = ("random_uniform", "explicit", "perturbed_consensus", "three_agent_boundary")
DYNAMICS_KINDS = ("oja_varying", "oja_constant", "average_consensus")


class ConfigError(ValueError):
    pass


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _check_output(path):
    if path is None:
        return None
    _require(isinstance(path, str) and path, f"output path must be a non-empty string, got {path!r}")
    parent = Path(path).expanduser().resolve().parent
    _require(parent.is_dir(), f"output directory {str(parent)!r} does not exist")
    return path


@dataclass
class ExperimentConfig:
    seed: int
    num_agents: int
    dim: int
    dynamics: dict
    init: dict
    integrator: IntegratorConfig
    tol: float = analysis.DEFAULT_CLASSIFY_TOL
    outputs: dict = dc_field(default_factory=dict)
    name: Optional[str] = None

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        _require(isinstance(raw, dict), "config must be a JSON object")
        known = {"name", "seed", "num_agents", "dim", "dynamics", "init", "integrator", "tol", "outputs"}
        extra = set(raw) - known
        _require(not extra, f"unknown config keys: {sorted(extra)}")
        for key in ("seed", "num_agents", "dim", "dynamics", "init"):
            _require(key in raw, f"missing config key {key!r}")
        seed, n, d = raw["seed"], raw["num_agents"], raw["dim"]
        _require(isinstance(seed, int) and not isinstance(seed, bool) and seed >= 0,
                 "seed must be a non-negative integer")
        _require(isinstance(n, int) and n >= 2, "num_agents must be an integer >= 2")
        _require(isinstance(d, int) and d >= 2, "dim must be an integer >= 2")
        tol = raw.get("tol", analysis.DEFAULT_CLASSIFY_TOL)
        _require(isinstance(tol, (int, float)) and 0 < tol <= 0.1, "tol must lie in (0, 0.1]")
        try:
            integ = IntegratorConfig(**raw.get("integrator", {}))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad integrator section: {exc}") from exc
        outputs = raw.get("outputs", {})
        _require(isinstance(outputs, dict), "outputs must be an object")
        extra = set(outputs) - {"trajectory_csv", "summary_json"}
        _require(not extra, f"unknown output keys: {sorted(extra)}")
        for path in outputs.values():
            _check_output(path)
        cfg = cls(seed=seed, num_agents=n, dim=d, dynamics=dict(raw["dynamics"]),
                  init=dict(raw["init"]), integrator=integ, tol=float(tol),
                  outputs=dict(outputs), name=raw.get("name"))
        cfg._validate_sections()
        return cfg

    def _validate_sections(self):
        dyn, init = self.dynamics, self.init
        _require(dyn.get("kind") in DYNAMICS_KINDS, f"dynamics.kind must be one of {DYNAMICS_KINDS}")
        if dyn["kind"] == "oja_constant":
            _require(("H" in dyn) != ("design" in dyn), "oja_constant needs exactly one of 'H' or 'design'")
            if "H" in dyn:
                h = np.asarray(dyn["H"], dtype=float)
                _require(h.shape == (self.dim, self.dim), f"H must be {self.dim}x{self.dim}")
            else:
                _require(dyn["design"] in ("consensus", "dissensus"), "design must be consensus or dissensus")
        if dyn["kind"] == "average_consensus" and dyn.get("weights") is not None:
            w = np.asarray(dyn["weights"], dtype=float)
            _require(w.shape == (self.num_agents,) * 2, f"weights must be {self.num_agents}x{self.num_agents}")
        kind = init.get("kind")
        _require(kind in INIT_KINDS, f"init.kind must be one of {INIT_KINDS}")
        if kind == "explicit":
            vecs = np.asarray(init.get("vectors"), dtype=float)
            _require(vecs.shape == (self.num_agents, self.dim),
                     f"explicit vectors must have shape ({self.num_agents}, {self.dim})")
        elif kind == "perturbed_consensus":
            axis = np.asarray(init.get("axis"), dtype=float)
            _require(axis.shape == (self.dim,), f"axis must have length {self.dim}")
            eps = init.get("eps")
            _require(isinstance(eps, (int, float)) and 0 <= eps <= 1e-2, "eps must lie in [0, 1e-2]")
        elif kind == "three_agent_boundary":
            _require(self.num_agents == 3 and self.dim == 2, "three_agent_boundary needs 3 agents in 2-D")
            for key in ("a", "b"):
                val = init.get(key)
                _require(isinstance(val, (int, float)) and 0 < val < 1, f"{key} must lie in (0, 1)")

    def to_dict(self) -> dict:
        out = {}
        if self.name is not None:
            out["name"] = self.name
        out.update(seed=self.seed, num_agents=self.num_agents, dim=self.dim,
                   dynamics=self.dynamics, init=self.init,
                   integrator={"dt": self.integrator.dt, "t_end": self.integrator.t_end,
                               "record_stride": self.integrator.record_stride,
                               "scheme": self.integrator.scheme},
                   tol=self.tol, outputs=self.outputs)
        return out

    def initial_state(self) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        kind = self.init["kind"]
        try:
            if kind == "random_uniform":
                return random_state(rng, self.num_agents, self.dim)
            if kind == "explicit":
                return np.array([renormalize(x) for x in self.init["vectors"]])
            if kind == "perturbed_consensus":
                return perturb_consensus(self.init["axis"], self.num_agents, self.init["eps"], rng)
            return analysis.three_agent_boundary_state(self.init["a"], self.init["b"])
        except GeometryError as exc:
            raise ConfigError(f"bad initial condition: {exc}") from exc

    def vector_field(self, state0):
        """Build the vector field; a designed H is computed from ``state0``."""
        dyn = self.dynamics
        try:
            if dyn["kind"] == "oja_varying":
                return OjaVaryingCovariance()
            if dyn["kind"] == "average_consensus":
                return AverageConsensus(dyn.get("weights"))
            if "H" in dyn:
                return OjaConstantH(np.asarray(dyn["H"], dtype=float))
        except DynamicsError as exc:
            raise ConfigError(str(exc)) from exc
        design = design_constant_H(state0, dyn["design"])
        if not design:
            raise ConfigError(f"cannot design H for {dyn['design']}: {design.reason}")
        return OjaConstantH(design.H)


def preset_names() -> list[str]:
    root = resources.files("ojaflow") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def read_json(path_or_preset: str) -> dict:
    """Load a config file, or a checked-in preset when given a bare preset name."""
    path = Path(path_or_preset)
    try:
        if path.is_file():
            text = path.read_text()
        elif path_or_preset in preset_names():
            text = (resources.files("ojaflow") / "presets" / f"{path_or_preset}.json").read_text()
        else:
            raise ConfigError(f"no such config file or preset: {path_or_preset!r}")
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path_or_preset!r}: {exc}") from exc


def load_config(path_or_preset: str, outdir: Optional[str] = None) -> ExperimentConfig:
    raw = read_json(path_or_preset)
    if outdir is not None and isinstance(raw, dict):
        raw = dict(raw)
        raw["outputs"] = {k: str(Path(outdir) / Path(v).name) for k, v in raw.get("outputs", {}).items()
                          if v is not None}
    return ExperimentConfig.from_dict(raw)
