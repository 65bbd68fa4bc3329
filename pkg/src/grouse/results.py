"""Trial results and the trajectory CSV interface shared by both drivers."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


@dataclass
class TrialResult:
    """Per-iteration trajectory of one run plus summary statistics.

    ``epsilons`` has length N+1 (entry 0 is the starting error) and is None
    when no target basis was supplied.  The per-step arrays have length N;
    ``theta`` entries are NaN where the revealed angle was unavailable.
    """

    epsilons: np.ndarray | None
    gate_skips: int
    wall_time: float
    x_factor: float | None = None
    tail_slope: float | None = None
    gate_passed: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    taken: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    norm_r: np.ndarray = field(default_factory=lambda: np.zeros(0))
    norm_p: np.ndarray = field(default_factory=lambda: np.zeros(0))
    theta: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def iterations(self) -> int:
        return len(self.gate_passed)


def _fmt(x: float) -> str:
    # repr round-trips binary64 exactly (shortest 17-significant-digit form)
    return repr(float(x))


def write_trajectory_csv(path, result: TrialResult) -> None:
    """Write rows ``t,epsilon,gate_passed,norm_r,norm_p,theta``.

    Row t=0 carries only the starting epsilon; step statistics for step t
    live on row t alongside the epsilon measured after that step.  Missing
    values (no target basis, no revealed angle) are empty cells.
    """
    n_steps = result.iterations
    eps = result.epsilons
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "epsilon", "gate_passed", "norm_r", "norm_p", "theta"])
        writer.writerow([0, _fmt(eps[0]) if eps is not None else "", "", "", "", ""])
        for t in range(n_steps):
            theta = result.theta[t]
            writer.writerow(
                [
                    t + 1,
                    _fmt(eps[t + 1]) if eps is not None else "",
                    int(result.gate_passed[t]),
                    _fmt(result.norm_r[t]),
                    _fmt(result.norm_p[t]),
                    "" if np.isnan(theta) else _fmt(theta),
                ]
            )


def read_trajectory_csv(path) -> TrialResult:
    """Parse a trajectory CSV back into a TrialResult (losslessly)."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or rows[0]["t"] != "0":
        raise ValueError("trajectory file must start with the t=0 row")
    have_eps = rows[0]["epsilon"] != ""
    eps = [float(rows[0]["epsilon"])] if have_eps else None
    gate_passed, taken, norm_r, norm_p, theta = [], [], [], [], []
    for row in rows[1:]:
        if have_eps:
            eps.append(float(row["epsilon"]))
        gate_passed.append(bool(int(row["gate_passed"])))
        norm_r.append(float(row["norm_r"]))
        norm_p.append(float(row["norm_p"]))
        theta.append(float(row["theta"]) if row["theta"] != "" else np.nan)
    return TrialResult(
        epsilons=None if eps is None else np.array(eps),
        gate_skips=int(sum(not g for g in gate_passed)),
        wall_time=0.0,
        gate_passed=np.array(gate_passed, dtype=bool),
        taken=np.zeros(len(gate_passed), dtype=bool),
        norm_r=np.array(norm_r),
        norm_p=np.array(norm_p),
        theta=np.array(theta),
    )
