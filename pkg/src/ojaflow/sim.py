"""Fixed-step integration on the product of spheres, with monitors and events."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from . import analysis
from .dynamics import VectorFieldSpec, raw_field
from .geometry import GeometryError, angles, as_state, off_diagonal, renormalize, renormalize_rows, tangent_project
from .spectral import covariance, eig_sym


class IntegrationError(RuntimeError):
    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (t = {time:.17g})")
        self.time = time


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    t_end: float = 50.0
    record_stride: int = 10
    scheme: str = "rk4"

    def __post_init__(self):
        if not 0 < self.dt <= 0.1:
            raise ValueError(f"dt must lie in (0, 0.1], got {self.dt}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.t_end / self.dt > 1e8:
            raise ValueError("too many steps (t_end / dt > 1e8)")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError("record_stride must be an integer >= 1")
        if self.scheme not in ("rk4", "euler"):
            raise ValueError(f"unknown scheme {self.scheme!r}")

    @property
    def num_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class EventLog:
    classification_at_end: Optional[analysis.EquilibriumClass] = None
    t_dissensus: Optional[float] = None
    t_consensus: Optional[float] = None


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (T, N, d)
    monitors: dict = dc_field(default_factory=dict)
    events: EventLog = dc_field(default_factory=EventLog)
    classifications: list = dc_field(default_factory=list)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def step(spec: VectorFieldSpec, state, dt: float, scheme: str = "rk4") -> np.ndarray:
    """One explicit step of the ambient ODE, then row-wise renormalization."""
    v = np.asarray(state, dtype=float)
    if scheme == "rk4":
        k1 = raw_field(spec, v)
        k2 = raw_field(spec, v + 0.5 * dt * k1)
        k3 = raw_field(spec, v + 0.5 * dt * k2)
        k4 = raw_field(spec, v + dt * k3)
        x = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    elif scheme == "euler":
        x = v + dt * raw_field(spec, v)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return renormalize_rows(x)


def monitor_names(n: int, d: int) -> list[str]:
    names = ["consensus_V", "consensus_Vdot"]
    if n == 2:
        names += ["two_agent_V", "two_agent_Vdot"]
    elif n == 3:
        names += ["three_agent_V", "three_agent_Vdot", "three_agent_W", "three_agent_Q"]
    names += [f"cov_eig_{k + 1}" for k in range(d)]
    names += ["gram_min", "gram_max"]
    return names


def monitor_values(v: np.ndarray) -> list[float]:
    n, d = v.shape
    lc = analysis.lyap_consensus(v)
    out = [lc.V, lc.Vdot]
    if n == 2:
        l2 = analysis.lyap_two_agent(v)
        out += [l2.V, l2.Vdot]
    elif n == 3:
        l3 = analysis.lyap_three_agent(v)
        out += [l3.V, l3.Vdot, l3.components["W"], l3.components["Q"]]
    out += list(eig_sym(covariance(v)).eigenvalues)
    off = off_diagonal(v @ v.T)
    out += [float(off.min()), float(off.max())]
    return out


def run(spec: VectorFieldSpec, state0, config: IntegratorConfig,
        tol: float = analysis.DEFAULT_CLASSIFY_TOL) -> Trajectory:
    """Integrate from ``state0`` to ``config.t_end`` recording every ``record_stride`` steps.

    Each record is classified; the event log keeps the first recorded time
    of consensus and of dissensus.  Monitors are always evaluated for the
    covariance-driven Lyapunov functions regardless of ``spec``.
    """
    v = renormalize_rows(as_state(state0))
    n, d = v.shape
    names = monitor_names(n, d)
    times, states, rows, labels = [], [], [], []
    events = EventLog()

    def record(t, x):
        times.append(t)
        states.append(x.copy())
        rows.append(monitor_values(x))
        cls = analysis.classify(x, tol, spec)
        labels.append(cls)
        if cls.kind == "dissensus" and events.t_dissensus is None:
            events.t_dissensus = t
        if cls.kind == "consensus" and events.t_consensus is None:
            events.t_consensus = t

    record(0.0, v)
    steps = config.num_steps
    for k in range(1, steps + 1):
        t = k * config.dt
        try:
            v = step(spec, v, config.dt, config.scheme)
        except GeometryError as exc:
            raise IntegrationError(f"renormalization failed: {exc}", t) from exc
        if not np.all(np.isfinite(v)):
            raise IntegrationError("non-finite state", t)
        if k % config.record_stride == 0:
            record(t, v)
    if steps % config.record_stride != 0:
        record(steps * config.dt, v)

    events.classification_at_end = labels[-1]
    mon = np.asarray(rows)
    return Trajectory(
        times=np.asarray(times),
        states=np.asarray(states),
        monitors={name: mon[:, j] for j, name in enumerate(names)},
        events=events,
        classifications=labels,
    )


def perturb_consensus(s, n: int, eps: float, rng: np.random.Generator) -> np.ndarray:
    """``n`` agents scattered by tangent Gaussian noise of scale ``eps`` around ``s``."""
    if not 0 <= eps <= 1e-2:
        raise ValueError(f"eps must lie in [0, 1e-2], got {eps}")
    s = renormalize(s)
    out = np.empty((n, s.size))
    for i in range(n):
        noise = tangent_project(s, rng.standard_normal(s.size))
        out[i] = renormalize(s + eps * noise)
    return out


def angle_gap_error(state, partition) -> float:
    """Worst deviation of ``|theta_i - theta_j|`` (wrapped to [0, pi]) from pi across groups."""
    th = angles(state)
    g1 = sorted(partition.group1)
    g2 = sorted(partition.group2)
    diff = np.abs(th[g1][:, None] - th[g2][None, :])
    diff = np.where(diff > np.pi, 2 * np.pi - diff, diff)
    return float(np.max(np.abs(diff - np.pi)))
