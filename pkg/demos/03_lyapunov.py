"""Lyapunov-style monitors: consensus repels, two and three agents settle into dissensus."""

# %%
import numpy as np

from ojaflow import analysis
from ojaflow.dynamics import OjaVaryingCovariance
from ojaflow.geometry import random_state
from ojaflow.sim import IntegratorConfig, run

# %% Displacing one agent from consensus makes the consensus function grow.
for n in (2, 5, 10):
    v = analysis.beta_probe_state(n, 0.3)
    print(f"N={n}: chain rule {analysis.lyap_consensus(v).Vdot:.6f}, "
          f"formula {analysis.consensus_vdot_formula(n, 0.3):.6f}")

# %% Two agents: V = 1 + <v1, v2> decreases monotonically to zero.
traj = run(OjaVaryingCovariance(), random_state(np.random.default_rng(3), 2, 3),
           IntegratorConfig(dt=0.01, t_end=15.0, record_stride=100))
print("two-agent V:", np.round(traj.monitors["two_agent_V"], 8))

# %% Three agents near the boundary of the attraction region.
for a, b in ((1e-4, 1e-4), (0.8, 1e-4)):
    ls = analysis.lyap_three_agent(analysis.three_agent_boundary_state(a, b))
    print(f"a={a}, b={b}: Vdot = {ls.Vdot:.5f} = -W + Q with W={ls.components['W']:.5f}, Q={ls.components['Q']:.5f}")
