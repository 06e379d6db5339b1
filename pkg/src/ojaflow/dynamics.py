"""Vector fields on the product of spheres.

Three right-hand sides are supported, all of the form
``vdot_i = (I - v_i v_i^T) u_i``:

* :class:`OjaConstantH` -- ``u_i = H v_i`` for a fixed matrix ``H``;
* :class:`OjaVaryingCovariance` -- ``u_i = C(v) v_i`` with the covariance
  recomputed from the current state at every evaluation;
* :class:`AverageConsensus` -- ``u_i = sum_k w_ik v_k``, the classical
  averaging protocol used as a baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Union

import numpy as np

from .geometry import as_state
from .spectral import agent_sum, covariance, eig_sym

PSD_TOL = 1e-10
GAP_TOL = 1e-10


class DynamicsError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OjaConstantH:
    H: np.ndarray

    def __post_init__(self):
        h = np.array(self.H, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 2:
            raise DynamicsError(f"H must be a square matrix of size >= 2, got {h.shape}")
        if np.max(np.abs(h - h.T)) > 1e-12:
            raise DynamicsError("H must be symmetric")
        info = eig_sym(h)
        lam = info.eigenvalues
        if lam[-1] < -PSD_TOL:
            raise DynamicsError(f"H is not positive semi-definite (min eigenvalue {lam[-1]:.3g})")
        if lam[0] <= 0:
            raise DynamicsError("largest eigenvalue of H must be strictly positive")
        if lam[0] - lam[1] <= GAP_TOL:
            raise DynamicsError("largest eigenvalue of H must be simple")
        object.__setattr__(self, "H", h)
        object.__setattr__(self, "lambda1", float(lam[0]))
        object.__setattr__(self, "q", info.principal)

    kind = "oja_constant"


@dataclass(frozen=True)
class OjaVaryingCovariance:
    kind = "oja_varying"


@dataclass(frozen=True, eq=False)
class AverageConsensus:
    """Averaging baseline; ``weights=None`` means the complete unit-weight graph."""

    weights: Optional[np.ndarray] = dc_field(default=None)

    def __post_init__(self):
        if self.weights is not None:
            w = np.array(self.weights, dtype=float)
            if w.ndim != 2 or w.shape[0] != w.shape[1]:
                raise DynamicsError("weights must be a square matrix")
            if np.max(np.abs(w - w.T)) > 1e-12:
                raise DynamicsError("weights must be symmetric")
            object.__setattr__(self, "weights", w)

    kind = "average_consensus"

    def weight_matrix(self, n: int) -> np.ndarray:
        if self.weights is None:
            return np.ones((n, n)) - np.eye(n)
        if self.weights.shape[0] != n:
            raise DynamicsError(f"weights are {self.weights.shape[0]}x{self.weights.shape[0]}, state has {n} agents")
        return self.weights


VectorFieldSpec = Union[OjaConstantH, OjaVaryingCovariance, AverageConsensus]


def pca_control(state, i: int) -> np.ndarray:
    """Covariance feedback ``C(v) v_i`` for agent ``i``."""
    v = as_state(state)
    return covariance(v) @ v[i]


def pca_control_sum(state, i: int) -> np.ndarray:
    """Same control written as ``sum_k <v_k - vbar, v_i> (v_k - vbar)``."""
    v = as_state(state)
    dev = v - v.mean(axis=0)
    return (dev @ v[i]) @ dev


def _project_rows(v: np.ndarray, u: np.ndarray) -> np.ndarray:
    return u - v * np.einsum("ij,ij->i", u, v)[:, None]


def controls(spec: VectorFieldSpec, v: np.ndarray) -> np.ndarray:
    """Row ``i`` is the raw input ``u_i`` before tangent projection."""
    if isinstance(spec, OjaVaryingCovariance):
        # C = sum_k v_k v_k^T - (1/N) S S^T with S = sum_k v_k
        total = np.add.reduce(v, axis=0)
        c = v.T @ v - np.multiply.outer(total, total) / v.shape[0]
        return v @ c
    if isinstance(spec, OjaConstantH):
        if spec.H.shape[0] != v.shape[1]:
            raise DynamicsError(f"H is {spec.H.shape[0]}-dimensional, state is {v.shape[1]}-dimensional")
        return v @ spec.H
    if isinstance(spec, AverageConsensus):
        return spec.weight_matrix(v.shape[0]) @ v
    raise DynamicsError(f"unsupported vector field spec {spec!r}")


def field(spec: VectorFieldSpec, state) -> np.ndarray:
    """Tangent velocities of all agents, shape ``(N, d)``.

    Sums over agents are done exactly here, so relabeling agents permutes
    the rows bit for bit.
    """
    v = as_state(state)
    if isinstance(spec, OjaVaryingCovariance):
        c = covariance(v)
        u = np.array([c @ x for x in v])
    elif isinstance(spec, AverageConsensus):
        w = spec.weight_matrix(v.shape[0])
        u = np.array([agent_sum(w[i][:, None] * v) for i in range(v.shape[0])])
    else:
        u = controls(spec, v)
    return _project_rows(v, u)


def raw_field(spec: VectorFieldSpec, v: np.ndarray) -> np.ndarray:
    """:func:`field` without state validation, for integrator inner loops
    and finite-difference probes that step off the sphere."""
    return _project_rows(v, controls(spec, v))


def beta_rhs(beta: float, v, H, lambda1: float) -> float:
    """Rate of ``beta = 1 - q.v`` under constant ``H``: ``(1-beta)(v^T H v - lambda1)``."""
    v = np.asarray(v, dtype=float)
    return float((1.0 - beta) * (v @ np.asarray(H, dtype=float) @ v - lambda1))
