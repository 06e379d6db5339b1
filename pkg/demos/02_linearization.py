"""The Jacobian block at a dissensus is -m (s s^T + I), so the split is locally stable."""

# %%
import numpy as np

from ojaflow.analysis import dissensus_closed_form, fd_jacobian, jacobian_Ai
from ojaflow.geometry import PartitionSpec, dissensus_state, random_state

# %% Away from equilibrium the closed-form block matches finite differences.
rng = np.random.default_rng(0)
v = random_state(rng, 4, 3)
print("max |A_0 - FD|:", np.abs(jacobian_Ai(v, 0) - fd_jacobian(v, 0)).max())

# %% Five agents, three at +s and two at -s.
s = np.array([0.0, 0.6, 0.8])
part = PartitionSpec({0, 1, 2}, {3, 4})
v = dissensus_state(s, part)
for i, side in ((0, "group1"), (3, "group2")):
    form = dissensus_closed_form(5, 3, s if side == "group1" else -s, side)
    a = jacobian_Ai(v, i)
    print(f"agent {i} ({side}): m = {form.m:.4f}, eigenvalues {np.round(np.linalg.eigvalsh(a), 4)}")
    print("   matches -m(ss^T+I):", np.allclose(a, form.matrix(), atol=1e-12))

# %% Two agents: m = 1 and A = -(ss^T+I).
print(jacobian_Ai([s, -s], 0))
