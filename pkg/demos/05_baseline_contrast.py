"""Averaging always agrees; covariance feedback always splits. Same graph, no negative weights."""

# %%
from ojaflow.cli import sweep

grid = {
    "num_agents": [2, 5, 10, 20],
    "dim": [2],
    "seed_start": 0,
    "seed_count": 8,
    "pairing": "cycle",
    "integrator": {"dt": 0.01, "t_end": 50.0, "record_stride": 50},
    "outputs": {"sweep_csv": "/tmp/unused.csv"},
}

# %%
for kind in ("average_consensus", "oja_varying"):
    rows, agg = sweep(dict(grid, dynamics={"kind": kind}))
    labels = [r["classification"] for r in rows]
    print(f"{kind:>18}: {labels.count('consensus')} consensus, {labels.count('dissensus')} dissensus of {len(rows)}")
