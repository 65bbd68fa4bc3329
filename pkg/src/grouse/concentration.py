"""Monte-Carlo validation of the probabilistic guarantees.

Two sampling models coexist on purpose: the eigenvalue-concentration and
residual-bound guarantees are stated for index multisets drawn uniformly
WITH replacement, while the algorithm itself draws subsets WITHOUT
replacement.  Validators here use the model their guarantee is stated in;
:func:`estimate_skip_rate` uses algorithm-mode sampling so the difference
between the two models stays measurable.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .linalg import least_squares, singular_values
from .metrics import Basis, coherence_basis, coherence_vector, epsilon_residual
from .partial_data import gate_check

_QUANTILES = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class ConcentrationReport:
    """Empirical eigenvalue-window failure rate for sampled Gram matrices."""

    trials: int
    delta: float
    gamma: float
    omega_size: int
    failure_rate: float
    eigen_min_quantiles: np.ndarray
    eigen_max_quantiles: np.ndarray
    hypothesis_met: bool
    eig_min: np.ndarray
    eig_max: np.ndarray
    in_window: np.ndarray


@dataclass(frozen=True)
class ResidualBoundReport:
    """Empirical violation rate of the sampled-residual lower bound.

    ``xi``, ``beta`` and ``bound_rhs`` are means over trials; the per-trial
    values are kept in the array fields.
    """

    trials: int
    xi: float
    beta: float
    bound_rhs: float
    violation_rate: float
    lhs: np.ndarray
    rhs: np.ndarray
    violated: np.ndarray


@dataclass(frozen=True)
class MuXtSummary:
    """Empirical distribution of the residual-direction coherence.

    Purely diagnostic: the probability with which the two thresholds hold
    is not observable from a single subspace pair, so nothing is asserted.
    """

    trials: int
    c1: float
    quantiles: np.ndarray
    mean: float
    threshold_narrow: float
    threshold_wide: float
    satisfied_rate: float


def sample_with_replacement(n: int, m: int, seed: int) -> np.ndarray:
    """m iid uniform draws from {0..n-1}; deterministic under seed."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    return np.random.default_rng(seed).integers(0, n, size=m)


def gamma_bound(d: int, mu: float, omega_size: int, delta: float) -> float:
    """Half-width sqrt((8 d mu / (3 |omega|)) log(2d/delta)) of the window."""
    if d < 1 or mu <= 0 or omega_size < 1 or not 0.0 < delta < 1.0:
        raise ValueError("need positive d, mu, omega_size and delta in (0,1)")
    return math.sqrt(8.0 * d * mu / (3.0 * omega_size) * math.log(2.0 * d / delta))


def _gram_eigs(u: Basis, idx: np.ndarray) -> tuple[float, float]:
    sigma = singular_values(u.columns[idx])
    eig_max = float(sigma[0] ** 2)
    eig_min = 0.0 if len(idx) < u.d else float(sigma[-1] ** 2)
    return eig_min, eig_max


def validate_gram_concentration(
    u: Basis, omega_size: int, delta: float, trials: int, seed: int
) -> ConcentrationReport:
    """Check how often sampled-Gram eigenvalues leave the guaranteed window.

    Draws with replacement.  Under the sample-size hypothesis the failure
    rate is guaranteed at most delta; the report flags hypothesis_met=False
    (and is still produced) when omega_size is below the hypothesis.
    """
    mu = coherence_basis(u)
    hypothesis_met = omega_size > 8.0 / 3.0 * u.d * mu * math.log(2.0 * u.d / delta)
    gamma = gamma_bound(u.d, mu, omega_size, delta)
    low = (1.0 - gamma) * omega_size / u.n
    high = (1.0 + gamma) * omega_size / u.n
    rng = np.random.default_rng(seed)
    eig_min = np.empty(trials)
    eig_max = np.empty(trials)
    for t in range(trials):
        idx = rng.integers(0, u.n, size=omega_size)
        eig_min[t], eig_max[t] = _gram_eigs(u, idx)
    in_window = (eig_min >= low) & (eig_max <= high)
    return ConcentrationReport(
        trials=trials,
        delta=delta,
        gamma=gamma,
        omega_size=omega_size,
        failure_rate=float(1.0 - in_window.mean()),
        eigen_min_quantiles=np.quantile(eig_min, _QUANTILES),
        eigen_max_quantiles=np.quantile(eig_max, _QUANTILES),
        hypothesis_met=hypothesis_met,
        eig_min=eig_min,
        eig_max=eig_max,
        in_window=in_window,
    )


def validate_residual_bound(
    u: Basis, ubar: Basis, omega_size: int, delta: float, trials: int, seed: int
) -> ResidualBoundReport:
    """Check the high-probability lower bound on the sampled residual.

    Each trial draws a fresh coefficient vector and a fresh with-replacement
    sample, fits the sampled entries, and compares the sampled residual
    energy against the bound.  The bound is only asserted when its
    right-hand-side factor is positive (it is vacuous otherwise).
    """
    rng = np.random.default_rng(seed)
    d, n = u.d, u.n
    mu_u = coherence_basis(u)
    gamma = gamma_bound(d, mu_u, omega_size, delta)
    log_inv_delta = math.log(1.0 / delta)
    lhs = np.empty(trials)
    rhs = np.empty(trials)
    violated = np.zeros(trials, dtype=bool)
    xi_all = np.empty(trials)
    beta_all = np.empty(trials)
    for t in range(trials):
        s = rng.standard_normal(d)
        v = ubar.columns @ s
        idx = rng.integers(0, n, size=omega_size)
        sub = u.columns[idx]
        w = least_squares(sub, v[idx])
        res = v[idx] - sub @ w
        lhs[t] = res @ res
        x = v - u.columns @ (u.columns.T @ v)
        x_sq = float(x @ x)
        if x_sq == 0.0:
            rhs[t] = 0.0
            xi_all[t] = 0.0
            beta_all[t] = 0.0
            continue
        mu_x = coherence_vector(x)
        xi = math.sqrt(2.0 * mu_x**2 / omega_size * log_inv_delta)
        beta = math.sqrt(2.0 * mu_x * log_inv_delta)
        xi_all[t] = xi
        beta_all[t] = beta
        if gamma >= 1.0:
            rhs[t] = np.nan
            continue
        factor = (omega_size * (1.0 - xi) - d * mu_u * (1.0 + beta) ** 2 / (1.0 - gamma)) / n
        rhs[t] = factor * x_sq
        if factor > 0.0:
            violated[t] = lhs[t] < rhs[t]
    finite = rhs[np.isfinite(rhs)]
    return ResidualBoundReport(
        trials=trials,
        xi=float(xi_all.mean()),
        beta=float(beta_all.mean()),
        bound_rhs=float(finite.mean()) if len(finite) else float("nan"),
        violation_rate=float(violated.mean()),
        lhs=lhs,
        rhs=rhs,
        violated=violated,
    )


def estimate_skip_rate(u: Basis, q: int, trials: int, seed: int) -> float:
    """Fraction of algorithm-mode samples (without replacement) failing the gate."""
    if q < u.d:
        raise ValueError("q must be at least d")
    if q > u.n:
        raise ValueError("q cannot exceed n")
    rng = np.random.default_rng(seed)
    fails = 0
    for _ in range(trials):
        idx = np.sort(rng.choice(u.n, size=q, replace=False))
        if not gate_check(u, idx).passed:
            fails += 1
    return fails / trials


def validate_sin_sq_expectation(
    u: Basis, ubar: Basis, trials: int, seed: int, chunk: int = 8192
):
    """Sample mean and standard error of sin^2(theta) over v = ubar @ s.

    The mean should sit within a few standard errors of epsilon/d.
    """
    if trials < 2:
        raise ValueError("need at least two trials")
    rng = np.random.default_rng(seed)
    vals = np.empty(trials)
    done = 0
    while done < trials:
        take = min(chunk, trials - done)
        s = rng.standard_normal((take, ubar.d))
        v = s @ ubar.columns.T
        resid = v - (v @ u.columns) @ u.columns.T
        vals[done : done + take] = np.sum(resid * resid, axis=1) / np.sum(v * v, axis=1)
        done += take
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(trials))
    return mean, stderr


def mu_xt_diagnostics(
    u: Basis, ubar: Basis, trials: int, seed: int, c1: float = 64.0 / 3.0
) -> MuXtSummary:
    """Empirical quantiles of the unexplained-direction coherence mu(x_t).

    x_t is the part of v_t the current basis cannot explain; its coherence
    is observed to grow like log(n).  Reported against the two analysis
    thresholds for the supplied sampling constant c1; no assertion is made.
    """
    if epsilon_residual(u, ubar) <= 1e-24:
        raise ValueError("bases coincide: residual direction undefined")
    rng = np.random.default_rng(seed)
    n, d = u.n, u.d
    mu_ubar = coherence_basis(ubar)
    mus = np.empty(trials)
    for t in range(trials):
        s = rng.standard_normal(d)
        v = ubar.columns @ s
        x = v - u.columns @ (u.columns.T @ v)
        mus[t] = coherence_vector(x)
    log_n = math.log(n)
    log20d = math.log(20.0 * d)
    narrow = log_n * math.sqrt(0.045 / math.log(10.0) * c1 * d * mu_ubar * log20d)
    wide = log_n**2 * (0.05 / (8.0 * math.log(10.0)) * c1 * log20d)
    satisfied = float(np.mean((mus <= narrow) & (mus <= wide)))
    return MuXtSummary(
        trials=trials,
        c1=c1,
        quantiles=np.quantile(mus, _QUANTILES),
        mean=float(mus.mean()),
        threshold_narrow=narrow,
        threshold_wide=wide,
        satisfied_rate=satisfied,
    )


def _fmt(x: float) -> str:
    return repr(float(x))


def write_concentration_csv(path, report: ConcentrationReport) -> None:
    """Per-trial rows ``trial, eig_min, eig_max, in_window``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "eig_min", "eig_max", "in_window"])
        for t in range(report.trials):
            writer.writerow(
                [t, _fmt(report.eig_min[t]), _fmt(report.eig_max[t]), int(report.in_window[t])]
            )


def read_concentration_csv(path):
    """Arrays (eig_min, eig_max, in_window) from a concentration CSV."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    eig_min = np.array([float(r["eig_min"]) for r in rows])
    eig_max = np.array([float(r["eig_max"]) for r in rows])
    in_window = np.array([bool(int(r["in_window"])) for r in rows])
    return eig_min, eig_max, in_window


def write_residual_csv(path, report: ResidualBoundReport) -> None:
    """Per-trial rows ``trial, lhs, rhs, violated``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "lhs", "rhs", "violated"])
        for t in range(report.trials):
            writer.writerow(
                [t, _fmt(report.lhs[t]), _fmt(report.rhs[t]), int(report.violated[t])]
            )


def read_residual_csv(path):
    """Arrays (lhs, rhs, violated) from a residual-bound CSV."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    lhs = np.array([float(r["lhs"]) for r in rows])
    rhs = np.array([float(r["rhs"]) for r in rows])
    violated = np.array([bool(int(r["violated"])) for r in rows])
    return lhs, rhs, violated
