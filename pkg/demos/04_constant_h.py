"""A designed constant H = q q^T sends every agent to +q or -q by the sign of q.v(0)."""

# %%
import numpy as np

from ojaflow.dynamics import OjaConstantH
from ojaflow.geometry import random_state
from ojaflow.sim import IntegratorConfig, run
from ojaflow.spectral import design_constant_H

v0 = random_state(np.random.default_rng(11), 8, 3)
design = design_constant_H(v0, "dissensus")
print("q =", np.round(design.q, 4), "groups", design.partition.sizes)

# %%
traj = run(OjaConstantH(design.H), v0, IntegratorConfig(dt=0.01, t_end=30.0, record_stride=500))
print("q.v at start:", np.round(v0 @ design.q, 3))
print("q.v at end:  ", np.round(traj.final @ design.q, 9))

# %% Consensus design fails when no hemisphere holds all agents.
print(design_constant_H([[1, 0], [0, 1], [-1, 0.0]], "consensus"))
