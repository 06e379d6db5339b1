"""Property suites behind ``ojaflow verify``.

Each suite draws its own random states from a seeded generator and reports
the worst error seen per check together with the state that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import analysis
from .geometry import PartitionSpec, dissensus_state, random_state, random_unit
from .spectral import covariance, eig_sym

SUITES = ("jacobian", "lyapunov", "covariance")


@dataclass
class Check:
    suite: str
    name: str
    worst: float
    tol: float
    passed: bool
    witness: Optional[dict] = None


class _Tracker:
    """Keeps the worst value of an error measure and the input behind it."""

    def __init__(self, suite, name, tol, upper=True):
        self.suite, self.name, self.tol, self.upper = suite, name, tol, upper
        self.worst = -np.inf if upper else np.inf
        self.witness = None

    def add(self, value, **witness):
        value = float(value)
        worse = value > self.worst if self.upper else value < self.worst
        if worse or self.witness is None:
            self.worst = value
            self.witness = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in witness.items()}

    def result(self) -> Check:
        ok = self.worst <= self.tol if self.upper else self.worst >= self.tol
        return Check(self.suite, self.name, self.worst, self.tol, bool(ok), None if ok else self.witness)


def _random_orthogonal(rng, d):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def all_partitions(n):
    """Every two-block split with agent 0 allowed on either side."""
    for mask in range(1, 2 ** n - 1):
        g1 = [i for i in range(n) if mask >> i & 1]
        g2 = [i for i in range(n) if not mask >> i & 1]
        yield PartitionSpec(g1, g2)


def jacobian_suite(trials: int, seed: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    fd = _Tracker("jacobian", "A_i vs central differences (max abs)", 1e-6)
    tangent = _Tracker("jacobian", "A_i vs raw-field differences on tangent space", 1e-6)
    for _ in range(trials):
        n = int(rng.choice([2, 3, 4, 6]))
        d = int(rng.choice([2, 3, 5]))
        v = random_state(rng, n, d)
        i = int(rng.integers(n))
        a = analysis.jacobian_Ai(v, i)
        fd.add(np.max(np.abs(a - analysis.fd_jacobian(v, i, 1e-5))), state=v, agent=i)
        proj = np.eye(d) - np.outer(v[i], v[i])
        raw = analysis.fd_jacobian(v, i, 1e-5, extension="ambient")
        tangent.add(np.max(np.abs((a - raw) @ proj)), state=v, agent=i)
    closed = _Tracker("jacobian", "A_i vs -m(ss^T+I) at dissensus", 1e-10)
    neg = _Tracker("jacobian", "max eigenvalue + m at dissensus", 1e-10)
    for n in range(2, 9):
        for d in (2, 3):
            s = random_unit(rng, d)
            for part in all_partitions(n):
                v = dissensus_state(s, part)
                p = len(part.group1)
                for i in range(n):
                    side = "group1" if i in part.group1 else "group2"
                    axis = s if side == "group1" else -s
                    form = analysis.dissensus_closed_form(n, p, axis, side)
                    a = analysis.jacobian_Ai(v, i)
                    closed.add(np.max(np.abs(a - form.matrix())), state=v, agent=i)
                    neg.add(np.max(np.linalg.eigvals(a).real) + form.m, state=v, agent=i)
    return [fd.result(), tangent.result(), closed.result(), neg.result()]


def lyapunov_suite(trials: int, seed: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    cons = _Tracker("lyapunov", "consensus Vdot formula vs chain rule", 1e-10)
    cons_pos = _Tracker("lyapunov", "min consensus Vdot on open grid (> 0)", 0.0, upper=False)
    for n in range(2, 11):
        for beta1 in np.round(np.arange(0.1, 1.95, 0.1), 10):
            s = random_unit(rng, 2)
            v = analysis.beta_probe_state(n, beta1, s, random_unit(rng, 2))
            ls = analysis.lyap_consensus(v)
            formula = analysis.consensus_vdot_formula(n, beta1)
            cons.add(abs(ls.Vdot - formula), n=n, beta1=beta1)
            cons_pos.add(formula, n=n, beta1=beta1)
    two = _Tracker("lyapunov", "two-agent Vdot closed form vs chain rule", 1e-10)
    two_sign = _Tracker("lyapunov", "two-agent max Vdot (<= 0)", 0.0)
    three_lam = _Tracker("lyapunov", "three-agent lambda Gram form vs v^T C v", 1e-10)
    three_vdot = _Tracker("lyapunov", "three-agent -W+Q vs chain rule", 1e-10)
    for _ in range(trials):
        v = random_state(rng, 2, int(rng.choice([2, 3, 5])))
        ls = analysis.lyap_two_agent(v)
        two.add(abs(ls.Vdot - ls.components["vdot_chain"]), state=v)
        two_sign.add(ls.Vdot, state=v)
        v = random_state(rng, 3, 2)
        l3 = analysis.lyap_three_agent(v)
        c = l3.components
        three_lam.add(max(abs(c[f"lambda{k}"] - c[f"lambda{k}_matrix"]) for k in (1, 2, 3)), state=v)
        three_vdot.add(abs(l3.Vdot - c["vdot_chain"]), state=v)
    boundary = _Tracker("lyapunov", "three-agent Vdot at boundary configs (< 0)", 0.0)
    for a, b in ((1e-4, 1e-4), (0.8, 1e-4)):
        vdot = analysis.lyap_three_agent(analysis.three_agent_boundary_state(a, b)).Vdot
        boundary.add(vdot, a=a, b=b)
    out = [r.result() for r in (cons, cons_pos, two, two_sign, three_lam, three_vdot)]
    bcheck = boundary.result()
    # strict inequality
    bcheck.passed = bcheck.worst < 0
    return out + [bcheck]


def covariance_suite(trials: int, seed: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    trace = _Tracker("covariance", "trace(C) - N(1-|vbar|^2)", 1e-10)
    psd = _Tracker("covariance", "min eigenvalue of C (>= -1e-10)", -1e-10, upper=False)
    rot = _Tracker("covariance", "rotation equivariance", 1e-10)
    perm = _Tracker("covariance", "permutation invariance", 0.0)
    recon = _Tracker("covariance", "Jacobi eigendecomposition reconstruction", 1e-10)
    for _ in range(trials):
        n = int(rng.integers(2, 11))
        d = int(rng.choice([2, 3, 5]))
        v = random_state(rng, n, d)
        c = covariance(v)
        vbar = v.mean(axis=0)
        trace.add(abs(np.trace(c) - n * (1 - vbar @ vbar)), state=v)
        info = eig_sym(c)
        psd.add(info.eigenvalues[-1], state=v)
        e = info.eigenvectors
        recon.add(np.max(np.abs(e @ np.diag(info.eigenvalues) @ e.T - c)), state=v)
        r = _random_orthogonal(rng, d)
        rot.add(np.max(np.abs(covariance(v @ r.T) - r @ c @ r.T)), state=v)
        perm.add(np.max(np.abs(covariance(v[rng.permutation(n)]) - c)), state=v)
    closed = _Tracker("covariance", "C at dissensus vs (N^2-D^2)/N ss^T", 1e-10)
    for n in range(2, 9):
        for d in (2, 3):
            s = random_unit(rng, d)
            for p in range(1, n):
                part = PartitionSpec(range(p), range(p, n))
                v = dissensus_state(s, part)
                closed.add(np.max(np.abs(covariance(v) - analysis.dissensus_covariance(n, p, s))), n=n, p=p)
    return [r.result() for r in (trace, psd, rot, perm, recon, closed)]


_RUNNERS = {"jacobian": jacobian_suite, "lyapunov": lyapunov_suite, "covariance": covariance_suite}


def run_suites(suite: str, trials: int = 200, seed: int = 0) -> list[Check]:
    names = SUITES if suite == "all" else (suite,)
    checks = []
    for name in names:
        if name not in _RUNNERS:
            raise ValueError(f"unknown suite {name!r}")
        checks += _RUNNERS[name](trials, seed)
    return checks


def format_table(checks: list[Check]) -> str:
    lines = [f"{'suite':<11} {'status':<6} {'worst':>24} {'tol':>10}  check"]
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(f"{c.suite:<11} {status:<6} {c.worst:>24.17g} {c.tol:>10.3g}  {c.name}")
    return "\n".join(lines)
