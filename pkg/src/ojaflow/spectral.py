"""Opinion covariance, a small symmetric eigensolver and constant-H design."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import PartitionSpec, as_state, renormalize

SIGN_TOL = 1e-9
SYM_TOL = 1e-9


class SpectralError(ValueError):
    pass


def agent_sum(x: np.ndarray) -> np.ndarray:
    """Correctly rounded sum over the first axis, so agent order cannot matter."""
    x = np.asarray(x, dtype=float)
    flat = x.reshape(x.shape[0], -1)
    return np.array([math.fsum(col) for col in flat.T]).reshape(x.shape[1:])


def mean_opinion(state) -> np.ndarray:
    v = as_state(state)
    return agent_sum(v) / v.shape[0]


def covariance(state) -> np.ndarray:
    """Sum over agents of ``(v_k - vbar)(v_k - vbar)^T``.

    Uses exact summation over agents, which makes the result bitwise
    invariant under relabeling.  The integrator has its own BLAS path.
    """
    v = as_state(state)
    dev = v - mean_opinion(v)
    d = v.shape[1]
    c = np.empty((d, d))
    for j in range(d):
        for k in range(j, d):
            c[j, k] = c[k, j] = math.fsum(dev[:, j] * dev[:, k])
    return c


@dataclass(frozen=True)
class SpectralInfo:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns, matching eigenvalues
    principal: np.ndarray
    gap: float


def _fix_sign(x: np.ndarray) -> np.ndarray:
    # largest-magnitude component positive; argmax picks the lowest index on ties
    k = int(np.argmax(np.abs(x)))
    return -x if x[k] < 0 else x


def eig_sym(m, max_sweeps: int = 100) -> SpectralInfo:
    """Cyclic Jacobi eigendecomposition of a small symmetric matrix.

    Sweeps over all off-diagonal pairs until the off-diagonal Frobenius
    norm drops to ``1e-12 * ||M||_F`` (or below 1e-300 for the zero matrix).
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SpectralError(f"expected a square matrix, got shape {a.shape}")
    asym = np.max(np.abs(a - a.T)) if a.size else 0.0
    if asym > SYM_TOL:
        raise SpectralError(f"matrix is not symmetric (max asymmetry {asym:.3g})")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    vecs = np.eye(n)
    target = max(1e-12 * np.linalg.norm(a), 1e-300)

    mask = ~np.eye(n, dtype=bool)

    def off_norm(x):
        return np.sqrt(np.sum(x[mask] ** 2))

    for _ in range(max_sweeps):
        if off_norm(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300 or abs(apq) <= 1e-18 * (abs(a[p, p]) + abs(a[q, q])):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                vecs[:, idx] = vecs[:, idx] @ rot
    else:
        raise SpectralError("Jacobi iteration did not converge")

    vals = np.diag(a).copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(n):
        vecs[:, k] = _fix_sign(vecs[:, k])
    gap = float(vals[0] - vals[1]) if n > 1 else float("inf")
    return SpectralInfo(eigenvalues=vals, eigenvectors=vecs, principal=vecs[:, 0].copy(), gap=gap)


@dataclass(frozen=True)
class HDesign:
    H: np.ndarray
    q: np.ndarray
    partition: Optional[PartitionSpec]


@dataclass(frozen=True)
class Infeasible:
    reason: str

    def __bool__(self):
        return False


def design_constant_H(state0, target: str):
    """Pick ``H = q q^T`` steering every agent to ``q`` (consensus) or ``+-q`` (dissensus).

    Only two candidates are tried: the normalized mean opinion for
    ``"consensus"`` and the principal axis of the initial covariance for
    ``"dissensus"``.  Returns :class:`HDesign` or :class:`Infeasible`.
    """
    v = as_state(state0)
    target = target.lower()
    if target == "consensus":
        mean = v.mean(axis=0)
        if np.linalg.norm(mean) <= SIGN_TOL:
            return Infeasible("mean opinion is zero; no candidate direction")
        q = renormalize(mean)
        proj = v @ q
        bad = np.flatnonzero(proj <= SIGN_TOL)
        if bad.size:
            return Infeasible(f"agents {bad.tolist()} not strictly inside the hemisphere of q")
        return HDesign(H=np.outer(q, q), q=q, partition=None)
    if target == "dissensus":
        q = eig_sym(covariance(v)).principal
        proj = v @ q
        bad = np.flatnonzero(np.abs(proj) <= SIGN_TOL)
        if bad.size:
            return Infeasible(f"agents {bad.tolist()} orthogonal to the principal axis")
        pos = np.flatnonzero(proj > 0)
        neg = np.flatnonzero(proj < 0)
        if pos.size == 0 or neg.size == 0:
            return Infeasible("all agents on one side of the principal axis")
        return HDesign(H=np.outer(q, q), q=q, partition=PartitionSpec(pos, neg))
    raise SpectralError(f"unknown design target {target!r}")
