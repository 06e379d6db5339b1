"""Linearization, Lyapunov monitors and equilibrium classification.

All formulas here refer to the covariance-driven field
``f_i(v) = (I - v_i v_i^T) C(v) v_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .dynamics import OjaVaryingCovariance, VectorFieldSpec, raw_field
from .geometry import PartitionSpec, as_state, gram, off_diagonal, renormalize
from .spectral import covariance

EQ_TOL = 1e-8
DEFAULT_CLASSIFY_TOL = 1e-6

_VARYING = OjaVaryingCovariance()


class AnalysisError(ValueError):
    pass


# ---------------------------------------------------------------- Jacobians


def jacobian_Ai(state, i: int) -> np.ndarray:
    """Diagonal linearization block ``d vdot_i / d v_i`` in closed form.

    ``A_i = C + (w.v) I - w v^T - (v^T C v) I - 2 v v^T C + 2 (v.w) v v^T``
    with ``v = v_i`` and ``w = v_i - vbar``.  The derivation treats
    ``|v_i| = 1`` as an identity, so on the normal direction this differs from
    the plain ambient derivative of ``f_i``; see :func:`fd_jacobian`.
    """
    v = as_state(state)
    c = covariance(v)
    vi = v[i]
    w = vi - v.mean(axis=0)
    eye = np.eye(v.shape[1])
    vvT = np.outer(vi, vi)
    return (
        c
        + (w @ vi) * eye
        - np.outer(w, vi)
        - (vi @ c @ vi) * eye
        - 2.0 * vvT @ c
        + 2.0 * (vi @ w) * vvT
    )


def reduced_field_row(state, i: int, x) -> np.ndarray:
    """Field row ``i`` with ``v_i`` replaced by ``x``, written in the
    norm-reduced form where every ``x^T x`` factor is set to 1.

    Coincides with the true field whenever ``|x| = 1``; off the sphere it is
    the particular extension whose ambient Jacobian is :func:`jacobian_Ai`.
    """
    v = np.asarray(state, dtype=float)
    x = np.asarray(x, dtype=float)
    n = v.shape[0]
    others = np.delete(v, i, axis=0)
    m = others.T @ others
    s = others.sum(axis=0)
    a = s @ x
    cx = m @ x + x - (s * a + s + x * a + x) / n
    xxcx = x * (x @ m @ x) + x - (x * a * a + 2.0 * x * a + x) / n
    return cx - xxcx


def _field_row(state, i, x):
    v = np.array(state, dtype=float)
    v[i] = x
    return raw_field(_VARYING, v)[i]


def fd_jacobian(state, i: int, h: float = 1e-5, extension: str = "reduced") -> np.ndarray:
    """Central-difference Jacobian of field row ``i`` w.r.t. ``v_i``.

    Perturbations are ambient and not renormalized; the other agents stay
    fixed.  ``extension`` selects the off-sphere continuation that is
    differentiated:

    ``"reduced"``
        :func:`reduced_field_row`; reproduces :func:`jacobian_Ai` in every
        direction.
    ``"ambient"``
        the literal ``(I - x x^T) C x`` with ``x`` entering ``C``; agrees with
        :func:`jacobian_Ai` only on the tangent space at ``v_i``.
    """
    if not 1e-8 <= h <= 1e-3:
        raise AnalysisError(f"step {h} outside [1e-8, 1e-3]")
    v = as_state(state)
    if extension == "reduced":
        row = lambda x: reduced_field_row(v, i, x)  # noqa: E731
    elif extension == "ambient":
        row = lambda x: _field_row(v, i, x)  # noqa: E731
    else:
        raise AnalysisError(f"unknown extension {extension!r}")
    d = v.shape[1]
    jac = np.empty((d, d))
    for k in range(d):
        e = np.zeros(d)
        e[k] = h
        jac[:, k] = (row(v[i] + e) - row(v[i] - e)) / (2.0 * h)
    return jac


@dataclass(frozen=True)
class DissensusForm:
    m: float
    axis: np.ndarray
    side: str  # "group1" or "group2"

    def matrix(self) -> np.ndarray:
        """``-m (s s^T + I)``."""
        s = self.axis
        return -self.m * (np.outer(s, s) + np.eye(s.size))


def dissensus_closed_form(n: int, p: int, s, side: str) -> DissensusForm:
    """Coefficient ``m`` of ``A = -m (s s^T + I)`` at an exact dissensus.

    ``p`` is the size of group1 (the agents sitting at ``+s``).
    """
    if not 1 <= p <= n - 1:
        raise AnalysisError(f"group size {p} out of range for {n} agents")
    delta = p - (n - p)
    spread = (n * n - delta * delta) / n
    if side == "group1":
        m = spread - (1.0 - delta / n)
    elif side == "group2":
        m = spread - (1.0 + delta / n)
    else:
        raise AnalysisError(f"side must be 'group1' or 'group2', got {side!r}")
    return DissensusForm(m=m, axis=renormalize(s), side=side)


def dissensus_mean(n: int, p: int, s) -> np.ndarray:
    return (2 * p - n) / n * renormalize(s)


def dissensus_covariance(n: int, p: int, s) -> np.ndarray:
    s = renormalize(s)
    delta = 2 * p - n
    return (n * n - delta * delta) / n * np.outer(s, s)


# ---------------------------------------------------------------- Lyapunov


@dataclass
class LyapunovSample:
    V: float
    Vdot: float
    components: dict = dc_field(default_factory=dict)


def chain_rule_vdot(grads: np.ndarray, velocities: np.ndarray) -> float:
    """``sum_i <dV/dv_i, vdot_i>``."""
    return float(np.sum(np.asarray(grads) * np.asarray(velocities)))


def lyap_consensus(state) -> LyapunovSample:
    """``V = sum_{i<N} (1 - <v_i, v_N>)`` and its rate along the PCA field."""
    v = as_state(state)
    f = raw_field(_VARYING, v)
    last = v[-1]
    V = float(np.sum(1.0 - v[:-1] @ last))
    grads = np.zeros_like(v)
    grads[:-1] = -last
    grads[-1] = -v[:-1].sum(axis=0)
    return LyapunovSample(V=V, Vdot=chain_rule_vdot(grads, f),
                          components={"half_sq_dist": 0.5 * float(np.sum((v[:-1] - last) ** 2))})


def consensus_vdot_formula(n: int, beta1: float) -> float:
    """Rate of the consensus function when only agent 1 is displaced by ``beta1``."""
    return (2 * n - 2) / n * beta1 ** 2 * (2.0 - beta1)


def beta_probe_state(n: int, beta1: float, s=(1.0, 0.0), t=(0.0, 1.0)) -> np.ndarray:
    """Agents 2..N at ``s`` and agent 1 at inner product ``1 - beta1`` with ``s``.

    ``t`` is any direction not parallel to ``s``; it is orthogonalized.
    """
    s = renormalize(s)
    t = renormalize(np.asarray(t, dtype=float) - s * np.dot(s, t))
    c = 1.0 - beta1
    v = np.tile(s, (n, 1))
    v[0] = c * s + np.sqrt(max(1.0 - c * c, 0.0)) * t
    return v


def lyap_two_agent(state) -> LyapunovSample:
    v = as_state(state)
    if v.shape[0] != 2:
        raise AnalysisError(f"two-agent function needs N = 2, got {v.shape[0]}")
    v1, v2 = v
    c = covariance(v)
    ssum = float(np.sum((v1 + v2) ** 2))
    c1 = float(v1 @ c @ v1)
    c2 = float(v2 @ c @ v2)
    f = raw_field(_VARYING, v)
    chain = float(v2 @ f[0] + v1 @ f[1])
    return LyapunovSample(
        V=1.0 + float(v1 @ v2),
        Vdot=-0.5 * ssum * (c1 + c2),
        components={"sum_norm_sq": ssum, "c_norm1": c1, "c_norm2": c2,
                    "sum_c_norm": float((v1 + v2) @ c @ (v1 + v2)), "vdot_chain": chain},
    )


def three_agent_terms(g12: float, g13: float, g23: float) -> dict:
    """Three-agent quantities from the Gram entries alone (``V1 = {1,2}``, ``V2 = {3}``)."""
    lam1 = ((1 - g12) ** 2 + (1 - g13) ** 2 + (g12 - g13) ** 2) / 3.0
    lam2 = ((1 - g12) ** 2 + (g12 - g23) ** 2 + (1 - g23) ** 2) / 3.0
    lam3 = ((g13 - g23) ** 2 + (1 - g13) ** 2 + (1 - g23) ** 2) / 3.0
    b13 = 1.0 + g13
    b23 = 1.0 + g23
    W = 2.0 / 3.0 * (
        (2 - b13) ** 2 + (2 - b23) ** 2
        + (2 - b23) * (1 - b13 + g12)
        + (2 - b13) * (1 - b23 + g12)
    )
    Q = (lam1 + lam3) * (1 - b13) + (lam2 + lam3) * (1 - b23)
    return {"lambda1": lam1, "lambda2": lam2, "lambda3": lam3, "W": W, "Q": Q,
            "beta13": b13, "beta23": b23}


def lyap_three_agent(state) -> LyapunovSample:
    v = as_state(state)
    if v.shape[0] != 3:
        raise AnalysisError(f"three-agent function needs N = 3, got {v.shape[0]}")
    g = gram(v)
    terms = three_agent_terms(g[0, 1], g[0, 2], g[1, 2])
    c = covariance(v)
    f = raw_field(_VARYING, v)
    grads = np.array([v[2], v[2], v[0] + v[1]])
    comps = dict(terms)
    comps["vdot_chain"] = chain_rule_vdot(grads, f)
    for k in range(3):
        comps[f"lambda{k + 1}_matrix"] = float(v[k] @ c @ v[k])
    return LyapunovSample(V=terms["beta13"] + terms["beta23"], Vdot=-terms["W"] + terms["Q"],
                          components=comps)


def three_agent_boundary_state(a: float, b: float) -> np.ndarray:
    """Planar three-agent start with ``<v1,v3> = -a`` and ``<v2,v3> = -b``.

    Agents 1 and 2 are placed on the same side of ``v3 = (1, 0)``, so
    ``<v1,v2> = cos(theta13 - theta23) >= 0``.
    """
    if not (0 < a < 1 and 0 < b < 1):
        raise AnalysisError("a and b must lie in (0, 1)")
    t13 = np.arccos(-a)
    t23 = np.arccos(-b)
    return np.array([[np.cos(t13), np.sin(t13)], [np.cos(t23), np.sin(t23)], [1.0, 0.0]])


# ---------------------------------------------------------------- classification


@dataclass(frozen=True)
class EquilibriumClass:
    kind: str  # consensus | dissensus | stationary_orthogonal | non_equilibrium
    residual: float
    partition: Optional[PartitionSpec] = None


def field_residual(state, spec: VectorFieldSpec = _VARYING) -> float:
    f = raw_field(spec, np.asarray(state, dtype=float))
    return float(np.max(np.linalg.norm(f, axis=1)))


def classify(state, tol: float = DEFAULT_CLASSIFY_TOL, spec: VectorFieldSpec = _VARYING,
             eq_tol: float = EQ_TOL) -> EquilibriumClass:
    """Label a state as consensus, dissensus, a stationary point, or neither.

    The Gram tests use ``tol``; the residual (max field row norm under
    ``spec``) is only consulted for the stationary case.  Agent 0 anchors
    the partition.
    """
    if not 0 < tol <= 0.1:
        raise AnalysisError(f"tol must lie in (0, 0.1], got {tol}")
    v = as_state(state)
    g = gram(v)
    res = field_residual(v, spec)
    off = off_diagonal(g)
    if np.all(off >= 1.0 - tol):
        return EquilibriumClass("consensus", res)
    if np.all(np.abs(off) >= 1.0 - tol):
        signs = np.where(g[0] > 0, 1.0, -1.0)
        if np.all(np.sign(g) == np.outer(signs, signs)) and np.any(signs < 0):
            part = PartitionSpec(np.flatnonzero(signs > 0), np.flatnonzero(signs < 0))
            return EquilibriumClass("dissensus", res, part)
    if res <= eq_tol:
        return EquilibriumClass("stationary_orthogonal", res)
    return EquilibriumClass("non_equilibrium", res)
