"""Deterministic CSV / JSON writers and run summaries.

Every float is printed with ``%.17g`` so identical runs give byte-identical
files and the values round-trip exactly.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import __version__, analysis
from .geometry import angles, off_diagonal
from .sim import Trajectory, angle_gap_error


def fmt(x) -> str:
    return format(float(x), ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with fixed float formatting; non-finite floats become null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in obj):
            return "[" + ", ".join(dumps(x, indent, _level + 1) for x in obj) + "]"
        items = [pad + dumps(x, indent, _level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def trajectory_header(traj: Trajectory) -> list[str]:
    _, n, d = traj.states.shape
    cols = ["t"] + [f"v{i}_{k}" for i in range(n) for k in range(d)]
    if d == 2:
        cols += [f"theta_{i}" for i in range(n)]
    return cols + list(traj.monitors)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    _, n, d = traj.states.shape
    mon = list(traj.monitors.values())
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(trajectory_header(traj)) + "\n")
        for r, t in enumerate(traj.times):
            x = traj.states[r]
            vals = [t, *x.ravel()]
            if d == 2:
                vals += list(angles(x))
            vals += [m[r] for m in mon]
            fh.write(",".join(fmt(val) for val in vals) + "\n")


def partition_dict(part):
    if part is None:
        return None
    return {"group1": sorted(part.group1), "group2": sorted(part.group2)}


def summarize(traj: Trajectory, config_echo: dict) -> dict:
    ev = traj.events
    cls = ev.classification_at_end
    final = traj.final
    n, d = final.shape
    off = off_diagonal(final @ final.T)
    out = {
        "tool_version": __version__,
        "classification": cls.kind,
        "partition": partition_dict(cls.partition),
        "partition_sizes": list(cls.partition.sizes) if cls.partition else None,
        "t_dissensus": ev.t_dissensus,
        "t_consensus": ev.t_consensus,
        "final_residual": cls.residual,
        "final_gram_min": float(off.min()),
        "final_gram_max": float(off.max()),
        "monitor_extrema": {k: {"min": float(np.min(v)), "max": float(np.max(v))}
                            for k, v in traj.monitors.items()},
    }
    if cls.kind == "dissensus":
        p = len(cls.partition.group1)
        s = final[min(cls.partition.group1)]
        jac_eigs = [np.sort(np.linalg.eigvals(a).real).tolist()
                    for a in (analysis.jacobian_Ai(final, i) for i in range(n))]
        out["linearization"] = {
            "m_group1": analysis.dissensus_closed_form(n, p, s, "group1").m,
            "m_group2": analysis.dissensus_closed_form(n, p, s, "group2").m,
            "jacobian_eigenvalues": jac_eigs,
        }
        if d == 2:
            out["angle_gap_error"] = angle_gap_error(final, cls.partition)
    out["config"] = config_echo
    return out
