"""One gated GROUSE step from a partial observation, plus a stream driver.

Per observation the algorithm checks that the eigenvalues of the sampled
Gram matrix [U]_omega^T [U]_omega lie in [0.5|omega|/n, 1.5|omega|/n]; when
they do, it fits the observed entries by least squares, splits the
observation into the explained part p and the residual r (zero off the
sample), and rotates the basis by a rank-one update that moves p/||p||
toward r/||r|| while leaving the orthogonal complement of w untouched.

Indices are 0-based throughout the in-memory API; the observation CSV
format uses 1-based indices on the wire.
"""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import numpy as np

from .linalg import NumericalError, least_squares, orthonormalize, singular_values
from .metrics import (
    BASIS_DRIFT_TOL,
    Basis,
    epsilon_residual,
    orthonormality_drift,
    revealed_angle_sin_sq,
)
from .results import TrialResult

# Residuals this small (relative to the observed entries) are treated as an
# exact fit: the rotation is the identity.
RESIDUAL_FLOOR = 1e-14


@dataclass(frozen=True)
class Observation:
    """Observed entries of one subspace vector on an index sample.

    ``omega`` is strictly increasing, 0-based, inside [0, n).  ``latent_s``
    is the coefficient vector that generated the full vector; it is present
    only for synthetic data.
    """

    n: int
    omega: np.ndarray
    values: np.ndarray
    latent_s: np.ndarray | None = None

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=int)
        values = np.asarray(self.values, dtype=float)
        if omega.ndim != 1 or values.shape != omega.shape:
            raise ValueError("omega and values must be 1-d and equally long")
        if len(omega) > 0:
            if omega[0] < 0 or omega[-1] >= self.n:
                raise ValueError("omega indices out of range")
            if np.any(np.diff(omega) <= 0):
                raise ValueError("omega indices must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("observed values must be finite")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "values", values)
        if self.latent_s is not None:
            object.__setattr__(self, "latent_s", np.asarray(self.latent_s, dtype=float))


@dataclass(frozen=True)
class GateVerdict:
    """Outcome of the sampled-Gram eigenvalue check."""

    passed: bool
    eigen_min: float
    eigen_max: float
    lower_bound: float
    upper_bound: float


@dataclass(frozen=True)
class StepRecord:
    """Every intermediate quantity of one partial-data iteration.

    For a skipped step (``taken`` False) the vector fields are None and the
    scalars zero.  ``clamped`` flags steps where alpha*||r||/||p|| exceeded
    one and the step-size rule was clamped; the analysis does not cover that
    regime.
    """

    gate: GateVerdict
    taken: bool
    alpha: float
    w: np.ndarray | None = None
    p: np.ndarray | None = None
    r: np.ndarray | None = None
    sigma: float = 0.0
    eta: float = 0.0
    clamped: bool = False
    theta: float | None = None
    epsilon_before: float | None = None
    epsilon_after: float | None = None


def gate_check(u: Basis, omega) -> GateVerdict:
    """Check the sampled-Gram eigenvalue window [0.5|omega|/n, 1.5|omega|/n].

    Samples with fewer than d rows fail automatically (singular Gram); a
    passing verdict certifies ||([U]_omega^T [U]_omega)^-1|| <= 2n/|omega|.
    The eigenvalues come from the singular values of the row submatrix,
    which the least-squares fit needs anyway.
    """
    omega = np.asarray(omega, dtype=int)
    m = len(omega)
    lower = 0.5 * m / u.n
    upper = 1.5 * m / u.n
    if m == 0:
        return GateVerdict(False, 0.0, 0.0, lower, upper)
    sub = u.columns[omega]
    sigma = singular_values(sub)
    eigen_max = float(sigma[0] ** 2)
    eigen_min = 0.0 if m < u.d else float(sigma[-1] ** 2)
    passed = m >= u.d and eigen_min >= lower and eigen_max <= upper
    return GateVerdict(passed, eigen_min, eigen_max, lower, upper)


def partial_residual(u: Basis, obs: Observation):
    """Split an observation into fitted and residual parts.

    Returns (w, p, r): the least-squares coefficients on the sampled rows,
    the full predicted vector p = U w, and the residual r supported on the
    sample (zero elsewhere).  p^T r = 0 by construction.
    """
    if obs.n != u.n:
        raise ValueError("observation and basis ambient dimensions differ")
    sub = u.columns[obs.omega]
    try:
        w = least_squares(sub, obs.values)
    except NumericalError:
        raise NumericalError("gate bypassed on singular sample") from None
    p = u.columns @ w
    r = np.zeros(u.n)
    r[obs.omega] = obs.values - sub @ w
    return w, p, r


def step_size(sigma: float, norm_r: float, norm_p: float, alpha: float) -> float:
    """Step length eta solving sin(sigma*eta) = alpha*||r||/||p||.

    The arcsin argument is clamped to 1; far from convergence the ratio can
    exceed one transiently and the rotation then goes the full quarter turn.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")
    if norm_p <= 0.0:
        raise NumericalError("degenerate projection")
    if norm_r == 0.0 or sigma == 0.0:
        return 0.0
    return float(np.arcsin(min(1.0, alpha * norm_r / norm_p)) / sigma)


def apply_update(u: Basis, rec: StepRecord) -> Basis:
    """Rotate the basis by the rank-one update recorded in ``rec``.

    Only the direction p/||p|| moves (toward r/||r||); any z with w^T z = 0
    satisfies U_new z = U z exactly in exact arithmetic.
    """
    if not rec.taken:
        raise ValueError("record does not describe a taken step")
    norm_r = float(np.linalg.norm(rec.r))
    if norm_r == 0.0:
        return u
    norm_w = float(np.linalg.norm(rec.w))
    if norm_w == 0.0:
        raise NumericalError("no revealed direction")
    norm_p = float(np.linalg.norm(rec.p))
    angle = rec.sigma * rec.eta
    gain = (np.cos(angle) - 1.0) * rec.p / norm_p + np.sin(angle) * rec.r / norm_r
    cols = u.columns + np.outer(gain, rec.w / norm_w)
    return Basis(cols, validate=False)


def _revealed_theta(u: Basis, ubar: Basis | None, obs: Observation) -> float | None:
    if ubar is None or obs.latent_s is None:
        return None
    v = ubar.columns @ obs.latent_s
    if not np.any(v):
        return None
    return float(np.arcsin(np.sqrt(revealed_angle_sin_sq(u, v))))


def grouse_step(
    u: Basis,
    obs: Observation,
    alpha: float = 1.0,
    ubar: Basis | None = None,
    *,
    bypass_gate: bool = False,
):
    """One full Algorithm iteration: gate, fit, rotate.

    Returns (new basis, StepRecord).  A failed gate (unless bypassed) leaves
    the basis unchanged with ``taken`` False.  A residual below the floor,
    or an observation orthogonal to the sampled basis rows, is an identity
    update with ``taken`` True and eta = 0.  ``epsilon_before/after`` are
    filled when ``ubar`` is supplied.
    """
    verdict = gate_check(u, obs.omega)
    eps_before = None if ubar is None else epsilon_residual(u, ubar)
    theta = _revealed_theta(u, ubar, obs)
    if not verdict.passed and not bypass_gate:
        rec = StepRecord(
            gate=verdict,
            taken=False,
            alpha=alpha,
            theta=theta,
            epsilon_before=eps_before,
            epsilon_after=eps_before,
        )
        return u, rec

    w, p, r = partial_residual(u, obs)
    norm_r = float(np.linalg.norm(r))
    norm_p = float(np.linalg.norm(p))
    scale = float(np.linalg.norm(obs.values))
    sigma = norm_r * norm_p

    if norm_r <= RESIDUAL_FLOOR * scale or norm_p <= RESIDUAL_FLOOR * scale:
        # exact fit, or nothing revealed along the current span: identity
        u_next = u
        eta = 0.0
        clamped = False
    else:
        ratio = alpha * norm_r / norm_p
        clamped = ratio > 1.0
        eta = step_size(sigma, norm_r, norm_p, alpha)
        rec = StepRecord(
            gate=verdict, taken=True, alpha=alpha, w=w, p=p, r=r, sigma=sigma, eta=eta
        )
        u_next = apply_update(u, rec)

    eps_after = None if ubar is None else epsilon_residual(u_next, ubar)
    rec = StepRecord(
        gate=verdict,
        taken=True,
        alpha=alpha,
        w=w,
        p=p,
        r=r,
        sigma=sigma,
        eta=eta,
        clamped=clamped,
        theta=theta,
        epsilon_before=eps_before,
        epsilon_after=eps_after,
    )
    return u_next, rec


def run_stream(
    u0: Basis,
    stream,
    alpha: float = 1.0,
    ubar: Basis | None = None,
    reortho_every: int = 100,
    *,
    bypass_gate: bool = False,
) -> TrialResult:
    """Apply :func:`grouse_step` over a sequence of observations.

    The basis is re-orthonormalized every ``reortho_every`` steps and
    whenever drift exceeds the budget (the rank-one rotation preserves
    orthonormality only in exact arithmetic).  The epsilon trajectory is
    recorded when ``ubar`` is given; re-orthonormalization does not change
    the column span, so the trajectory is unaffected by it.
    """
    start = time.perf_counter()
    u = u0
    eps = None if ubar is None else [epsilon_residual(u0, ubar)]
    gate_passed, taken, norm_r, norm_p, theta = [], [], [], [], []
    gate_skips = 0
    for t, obs in enumerate(stream, start=1):
        # revealed angle against the basis the step starts from
        theta_t = _revealed_theta(u, ubar, obs)
        u, rec = grouse_step(u, obs, alpha, bypass_gate=bypass_gate)
        gate_passed.append(rec.gate.passed)
        taken.append(rec.taken)
        norm_r.append(0.0 if rec.r is None else float(np.linalg.norm(rec.r)))
        norm_p.append(0.0 if rec.p is None else float(np.linalg.norm(rec.p)))
        theta.append(np.nan if theta_t is None else theta_t)
        if not rec.taken:
            gate_skips += 1
        if t % reortho_every == 0 or orthonormality_drift(u.columns) > BASIS_DRIFT_TOL:
            u = Basis(orthonormalize(u.columns), validate=False)
        if eps is not None:
            eps.append(epsilon_residual(u, ubar))
    return TrialResult(
        epsilons=None if eps is None else np.array(eps),
        gate_skips=gate_skips,
        wall_time=time.perf_counter() - start,
        gate_passed=np.array(gate_passed, dtype=bool),
        taken=np.array(taken, dtype=bool),
        norm_r=np.array(norm_r),
        norm_p=np.array(norm_p),
        theta=np.array(theta),
    )


def write_observations(path, observations) -> None:
    """Write observations as CSV rows ``t, n, indices, values``.

    Indices are 1-based and semicolon-separated on the wire; values are
    semicolon-separated decimals (binary64 round-trip precision).
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for t, obs in enumerate(observations):
            writer.writerow(
                [
                    t,
                    obs.n,
                    ";".join(str(i + 1) for i in obs.omega),
                    ";".join(repr(float(v)) for v in obs.values),
                ]
            )


def read_observations(path) -> list[Observation]:
    """Read an observation CSV written by :func:`write_observations`."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            t, n = int(row[0]), int(row[1])
            omega = np.array([int(i) - 1 for i in row[2].split(";")]) if row[2] else np.zeros(0, dtype=int)
            values = np.array([float(v) for v in row[3].split(";")]) if row[3] else np.zeros(0)
            rows.append((t, Observation(n=n, omega=omega, values=values)))
    rows.sort(key=lambda pair: pair[0])
    return [obs for _, obs in rows]
