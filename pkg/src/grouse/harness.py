"""Problem generation, trial orchestration, rate fitting, phase sweeps.

The synthetic protocol: the target span is the range of an n x d matrix T
with iid standard normal entries; the starting basis comes from
orthonormalizing T plus iid N(0, init_noise_std^2) noise.  Convergence is
summarized by the factor X solving eps_N = eps_0 (1 - X q / (n d))^N,
which sits near 1 once the per-step sample size q crosses a modest
multiple of d.

All randomness is owned by integer seeds; derived streams (problem vs
observations, sweep cells, trials) use SeedSequence child keys so that
cells and trials can run in any order or in parallel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import csv
import numpy as np

from .full_data import run_full
from .linalg import orthonormalize
from .metrics import Basis
from .partial_data import Observation, run_stream
from .results import TrialResult

_PROBLEM_STREAM = 1
_OBSERVATION_STREAM = 2

# epsilon values below this are double-precision measurement noise and are
# excluded from tail-slope fits.
EPSILON_FLOOR = 1e-24


@dataclass(frozen=True)
class ProblemSpec:
    """Dimensions, sampling size, step factor and seed of one experiment."""

    n: int
    d: int
    q: int | str
    iters: int
    seed: int
    alpha: float = 1.0
    init_noise_std: float = 0.5

    def __post_init__(self):
        if not 0 < self.d < self.n:
            raise ValueError("need 0 < d < n")
        if self.q != "full":
            if not isinstance(self.q, (int, np.integer)):
                raise ValueError('q must be an integer or "full"')
            if not self.d <= self.q <= self.n:
                raise ValueError("need d <= q <= n")
        if not 0.0 < self.alpha < 2.0:
            raise ValueError("alpha must lie in (0, 2)")
        if self.iters < 1:
            raise ValueError("iters must be at least 1")
        if self.init_noise_std < 0.0:
            raise ValueError("init_noise_std must be nonnegative")


@dataclass(frozen=True)
class SweepCell:
    """One (n, d, q) cell of a phase sweep."""

    n: int
    d: int
    q: int
    trials: int
    mean_x: float
    std_x: float
    x_values: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)


def _child_rng(seed, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), stream]))


def _child_seed(*keys) -> int:
    return int(np.random.SeedSequence(list(map(int, keys))).generate_state(1)[0])


def random_basis(n: int, d: int, seed: int) -> Basis:
    """Orthonormalized iid standard normal n x d matrix."""
    rng = np.random.default_rng(seed)
    return Basis(orthonormalize(rng.standard_normal((n, d))))


def incoherent_basis(n: int, d: int, seed: int) -> Basis:
    """A basis with nearly flat rows (coherence close to 1).

    Columns are d distinct discrete-cosine harmonics with random signs, so
    every row carries about d/n of the total energy.
    """
    if not 0 < d < n:
        raise ValueError("need 0 < d < n")
    rng = np.random.default_rng(seed)
    freqs = rng.choice(np.arange(1, n), size=d, replace=False)
    signs = rng.choice([-1.0, 1.0], size=d)
    grid = np.pi * (2 * np.arange(n)[:, None] + 1) / (2 * n)
    cols = math.sqrt(2.0 / n) * np.cos(grid * freqs[None, :]) * signs[None, :]
    return Basis(cols)


def _split_epsilon(rng, d: int, eps: float, angles: str) -> np.ndarray:
    if angles == "equal":
        return np.full(d, eps / d)
    if angles != "spread":
        raise ValueError('angles must be "spread" or "equal"')
    sin_sq = eps * rng.dirichlet(np.full(d, 2.0))
    # redistribute any mass that would need sin^2 > 1 (only when eps > 1)
    while np.any(sin_sq > 1.0):
        excess = np.sum(sin_sq[sin_sq > 1.0] - 1.0)
        sin_sq = np.minimum(sin_sq, 1.0)
        room = sin_sq < 1.0
        sin_sq[room] += excess / room.sum()
    return sin_sq


def pair_with_epsilon(
    n: int,
    d: int,
    eps: float,
    seed: int,
    frame: str = "gaussian",
    angles: str = "spread",
) -> tuple[Basis, Basis]:
    """A seeded (u, ubar) pair whose error metric equals ``eps`` exactly.

    Requires n >= 2d: each target direction is tilted out of the span into
    the orthogonal complement, the squared sines of the tilt angles summing
    to eps (a random split by default, an even one with angles="equal"),
    and the tilted frame is then mixed by a random rotation so the alignment
    matrix is not trivially diagonal.  ``frame="incoherent"`` tilts within a
    flat cosine-harmonic frame instead, keeping both bases at low coherence.
    """
    if n < 2 * d:
        raise ValueError("need n >= 2d to tilt into the complement")
    if not 0.0 <= eps <= d:
        raise ValueError("eps must lie in [0, d]")
    rng = np.random.default_rng(seed)
    if frame == "gaussian":
        cols = orthonormalize(rng.standard_normal((n, 2 * d)))
    elif frame == "incoherent":
        freqs = rng.choice(np.arange(1, n), size=2 * d, replace=False)
        grid = np.pi * (2 * np.arange(n)[:, None] + 1) / (2 * n)
        cols = math.sqrt(2.0 / n) * np.cos(grid * freqs[None, :])
    else:
        raise ValueError('frame must be "gaussian" or "incoherent"')
    ubar_cols, comp = cols[:, :d], cols[:, d:]
    sin_phi = np.sqrt(_split_epsilon(rng, d, eps, angles))
    cos_phi = np.sqrt(1.0 - sin_phi**2)
    tilted = ubar_cols * cos_phi + comp * sin_phi
    rot = orthonormalize(rng.standard_normal((d, d)))
    return Basis(tilted @ rot), Basis(ubar_cols)


def generate_problem(spec: ProblemSpec) -> tuple[Basis, Basis]:
    """(target, start) bases per the synthetic protocol; seeded, bitwise stable."""
    rng = _child_rng(spec.seed, _PROBLEM_STREAM)
    target = rng.standard_normal((spec.n, spec.d))
    noise = rng.standard_normal((spec.n, spec.d)) * spec.init_noise_std
    ubar = Basis(orthonormalize(target))
    u0 = Basis(orthonormalize(target + noise))
    return ubar, u0


def fit_x(
    epsilon0: float, epsilonN: float, n: int, d: int, q: int, iters: int
) -> float:
    """Solve eps_N = eps_0 (1 - X q/(n d))^N for X.

    Negative X is legal and signals divergence (eps_N > eps_0); nonpositive
    epsilon values are an error.
    """
    if epsilon0 <= 0.0 or epsilonN <= 0.0:
        raise ValueError("epsilon values must be positive")
    if iters < 1:
        raise ValueError("iters must be at least 1")
    return (1.0 - (epsilonN / epsilon0) ** (1.0 / iters)) * n * d / q


def tail_slope(epsilons, floor: float = EPSILON_FLOOR) -> float | None:
    """Least-squares slope of log(eps) over the last half of the iterations.

    Entries below ``floor`` are measurement noise and are discarded; the
    asymptotic rate only emerges on later iterations, hence the half-window.
    Returns None when fewer than two usable points remain.
    """
    eps = np.asarray(epsilons, dtype=float)
    t = np.arange(len(eps))
    half = len(eps) // 2
    keep = eps[half:] > floor
    if keep.sum() < 2:
        return None
    return float(np.polyfit(t[half:][keep], np.log(eps[half:][keep]), 1)[0])


def _observation_stream(spec: ProblemSpec, ubar: Basis):
    rng = _child_rng(spec.seed, _OBSERVATION_STREAM)
    n, d, q = spec.n, spec.d, spec.q
    for _ in range(spec.iters):
        s = rng.standard_normal(d)
        v = ubar.columns @ s
        omega = np.sort(rng.choice(n, size=q, replace=False))
        yield Observation(n=n, omega=omega, values=v[omega], latent_s=s)


def run_partial_trial(
    spec: ProblemSpec,
    *,
    bypass_gate: bool = False,
    reortho_every: int = 100,
) -> TrialResult:
    """Generate a problem, stream fresh observations, run the gated steps.

    ``bypass_gate`` reproduces the experimental mode in which every step is
    taken regardless of the eigenvalue check; the default checks the gate.
    The fitted convergence factor is attached as ``x_factor``.
    """
    if spec.q == "full":
        raise ValueError("partial trials need a finite q")
    ubar, u0 = generate_problem(spec)
    result = run_stream(
        u0,
        _observation_stream(spec, ubar),
        alpha=spec.alpha,
        ubar=ubar,
        reortho_every=reortho_every,
        bypass_gate=bypass_gate,
    )
    eps0, eps_n = float(result.epsilons[0]), float(result.epsilons[-1])
    if eps0 > 0.0 and eps_n > 0.0:
        result.x_factor = fit_x(eps0, eps_n, spec.n, spec.d, spec.q, spec.iters)
    result.tail_slope = tail_slope(result.epsilons)
    return result


def run_full_trial(spec: ProblemSpec, *, reortho_every: int = 100) -> TrialResult:
    """Full-data trial (every entry observed, exact step length)."""
    ubar, u0 = generate_problem(spec)
    result = run_full(
        u0,
        ubar,
        spec.iters,
        seed=np.random.SeedSequence([int(spec.seed), _OBSERVATION_STREAM]),
        reortho_every=reortho_every,
    )
    eps0, eps_n = float(result.epsilons[0]), float(result.epsilons[-1])
    if eps0 > 0.0 and eps_n > 0.0:
        result.x_factor = fit_x(eps0, eps_n, spec.n, spec.d, spec.n, spec.iters)
    result.tail_slope = tail_slope(result.epsilons)
    return result


def sweep_phase(
    ns,
    ds,
    qs,
    trials_per_cell: int = 10,
    iters: int = 500,
    seed: int = 0,
    *,
    bypass_gate: bool = False,
    alpha: float = 1.0,
    init_noise_std: float = 0.5,
) -> list[SweepCell]:
    """Mean fitted X over seeded trials for every (n, d, q) grid cell.

    Infeasible cells (q < d or q > n or d >= n) are emitted with zero
    trials and NaN statistics as the skip marker.  Trial seeds derive from
    (seed, n, d, q, trial), so any execution order gives identical output.
    """
    cells = []
    for n in ns:
        for d in ds:
            for q in qs:
                if not (0 < d < n and d <= q <= n):
                    cells.append(
                        SweepCell(n, d, q, 0, float("nan"), float("nan"))
                    )
                    continue
                xs = np.empty(trials_per_cell)
                for trial in range(trials_per_cell):
                    spec = ProblemSpec(
                        n=n,
                        d=d,
                        q=q,
                        iters=iters,
                        seed=_child_seed(seed, n, d, q, trial),
                        alpha=alpha,
                        init_noise_std=init_noise_std,
                    )
                    result = run_partial_trial(spec, bypass_gate=bypass_gate)
                    xs[trial] = result.x_factor if result.x_factor is not None else np.nan
                cells.append(
                    SweepCell(
                        n,
                        d,
                        q,
                        trials_per_cell,
                        float(np.nanmean(xs)),
                        float(np.nanstd(xs, ddof=1)) if trials_per_cell > 1 else 0.0,
                        x_values=xs,
                    )
                )
    return cells


def _fmt(x: float) -> str:
    return repr(float(x))


def write_sweep_csv(path, cells) -> None:
    """Rows ``n,d,q,trials,mean_X,std_X`` per grid cell."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "d", "q", "trials", "mean_X", "std_X"])
        for cell in cells:
            writer.writerow(
                [cell.n, cell.d, cell.q, cell.trials, _fmt(cell.mean_x), _fmt(cell.std_x)]
            )


def read_sweep_csv(path) -> list[SweepCell]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        SweepCell(
            int(r["n"]),
            int(r["d"]),
            int(r["q"]),
            int(r["trials"]),
            float(r["mean_X"]),
            float(r["std_X"]),
        )
        for r in rows
    ]


def write_problem_spec(path, spec: ProblemSpec) -> None:
    """Flat ``key=value`` text file carrying exactly the ProblemSpec fields."""
    with open(path, "w") as fh:
        fh.write(f"n={spec.n}\n")
        fh.write(f"d={spec.d}\n")
        fh.write(f"q={spec.q}\n")
        fh.write(f"iters={spec.iters}\n")
        fh.write(f"seed={spec.seed}\n")
        fh.write(f"alpha={_fmt(spec.alpha)}\n")
        fh.write(f"init_noise_std={_fmt(spec.init_noise_std)}\n")


def read_problem_spec(path) -> ProblemSpec:
    fields: dict[str, str] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
    return ProblemSpec(
        n=int(fields["n"]),
        d=int(fields["d"]),
        q="full" if fields["q"] == "full" else int(fields["q"]),
        iters=int(fields["iters"]),
        seed=int(fields["seed"]),
        alpha=float(fields["alpha"]),
        init_noise_std=float(fields["init_noise_std"]),
    )
