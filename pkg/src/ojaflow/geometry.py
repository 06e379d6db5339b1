"""Unit-sphere primitives.

An opinion state is stored as a float array of shape ``(N, d)``; row ``i``
is the unit vector of agent ``i``.  Nothing here keeps hidden state, and
random draws always go through an explicitly passed ``numpy.random.Generator``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12
MIN_NORM = 1e-9


class GeometryError(ValueError):
    """Invalid vector or state passed to a sphere primitive."""


@dataclass(frozen=True)
class PartitionSpec:
    """Two-block split of agent ids ``0..N-1`` (zero-based)."""

    group1: frozenset
    group2: frozenset

    def __post_init__(self):
        object.__setattr__(self, "group1", frozenset(int(i) for i in self.group1))
        object.__setattr__(self, "group2", frozenset(int(i) for i in self.group2))
        if not self.group1 or not self.group2:
            raise GeometryError("partition blocks must be non-empty")
        if self.group1 & self.group2:
            raise GeometryError("partition blocks must be disjoint")
        n = len(self.group1) + len(self.group2)
        if self.group1 | self.group2 != frozenset(range(n)):
            raise GeometryError("partition must cover agents 0..N-1")

    @property
    def num_agents(self) -> int:
        return len(self.group1) + len(self.group2)

    @property
    def sizes(self) -> tuple[int, int]:
        return len(self.group1), len(self.group2)

    def signs(self) -> np.ndarray:
        """+1 for group1 members, -1 for group2, indexed by agent id."""
        out = np.empty(self.num_agents)
        out[sorted(self.group1)] = 1.0
        out[sorted(self.group2)] = -1.0
        return out


def as_state(state, check_norm: bool = True) -> np.ndarray:
    """Validate and return an ``(N, d)`` float array of unit rows."""
    arr = np.asarray(state, dtype=float)
    if arr.ndim != 2:
        raise GeometryError(f"state must be 2-D (N, d), got shape {arr.shape}")
    n, d = arr.shape
    if n < 2:
        raise GeometryError("need at least two agents")
    if d < 2:
        raise GeometryError("dimension must be >= 2")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("state has non-finite entries")
    if check_norm:
        err = np.max(np.abs(np.linalg.norm(arr, axis=1) - 1.0))
        if err > 1e-9:
            raise GeometryError(f"agent norms deviate from 1 by {err:.3g}")
    return arr


def tangent_project(v, u) -> np.ndarray:
    """Return ``u - v (v.u)``, the component of ``u`` tangent at ``v``."""
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    if v.shape != u.shape:
        raise GeometryError(f"dimension mismatch: {v.shape} vs {u.shape}")
    return u - v * np.dot(v, u)


def renormalize(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    nrm = np.linalg.norm(x)
    if not np.isfinite(nrm) or nrm <= MIN_NORM:
        raise GeometryError(f"cannot renormalize vector of norm {nrm:.3g}")
    return x / nrm


def renormalize_rows(x) -> np.ndarray:
    """Row-wise :func:`renormalize` for a whole state."""
    x = np.asarray(x, dtype=float)
    nrm = np.sqrt(np.einsum("ij,ij->i", x, x))
    # NaN fails both comparisons
    if not (nrm.min() > MIN_NORM and nrm.max() < np.inf):
        raise GeometryError("cannot renormalize state: degenerate or non-finite row")
    return x / nrm[:, None]


def random_unit(rng: np.random.Generator, d: int) -> np.ndarray:
    """Uniform direction on S^{d-1} (normalized standard normal draw)."""
    if int(d) != d or d < 2:
        raise GeometryError(f"dimension must be an integer >= 2, got {d}")
    while True:
        x = rng.standard_normal(int(d))
        nrm = np.linalg.norm(x)
        if nrm > MIN_NORM:
            return x / nrm


def random_state(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    if n < 2:
        raise GeometryError("need at least two agents")
    return np.array([random_unit(rng, d) for _ in range(n)])


def gram(state) -> np.ndarray:
    """Pairwise inner products; the diagonal is pinned to exactly 1."""
    v = as_state(state)
    g = v @ v.T
    g = 0.5 * (g + g.T)
    np.fill_diagonal(g, 1.0)
    return g


def off_diagonal(g: np.ndarray) -> np.ndarray:
    n = g.shape[0]
    return g[~np.eye(n, dtype=bool)]


def angles(state) -> np.ndarray:
    """Polar angle of each agent in (-pi, pi]; only meaningful for d = 2."""
    v = np.asarray(state, dtype=float)
    return np.arctan2(v[:, 1], v[:, 0])


def consensus_state(s, n: int) -> np.ndarray:
    s = renormalize(s)
    return np.tile(s, (n, 1))


def dissensus_state(s, partition: PartitionSpec) -> np.ndarray:
    """Agents in group1 at ``s``, agents in group2 at ``-s``."""
    s = renormalize(s)
    return partition.signs()[:, None] * s[None, :]
