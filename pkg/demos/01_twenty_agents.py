"""Twenty planar agents under covariance feedback split into two antipodal camps."""

# %% Set up the seeded preset and integrate it.
import numpy as np

from ojaflow.cli import simulate
from ojaflow.config import load_config
from ojaflow.sim import angle_gap_error

cfg = load_config("twenty-agent-planar", outdir="/tmp")
traj, summary = simulate(cfg)

# %% Where did everyone end up?
cls = traj.events.classification_at_end
print("final state:", cls.kind, "with group sizes", cls.partition.sizes)
print("first recorded dissensus at t =", traj.events.t_dissensus)
print("worst cross-group angle error (rad):", angle_gap_error(traj.final, cls.partition))

# %% Angles at a few snapshots; each row is one time.
theta = np.arctan2(traj.states[..., 1], traj.states[..., 0])
for k in (0, 10, 50, len(traj.times) - 1):
    print(f"t={traj.times[k]:6.2f}", np.round(np.sort(theta[k]), 3))

# %% The largest covariance eigenvalue approaches (N^2 - D^2)/N for the final split.
n = cfg.num_agents
p = len(cls.partition.group1)
print("cov_eig_1 at end:", traj.monitors["cov_eig_1"][-1], "predicted:", (n * n - (2 * p - n) ** 2) / n)
