"""Fully observed GROUSE with the exact per-step decrease identity.

With the whole vector v available the eigenvalue gate is unnecessary and
the step length eta = theta/sigma is exact: the error metric then drops by
exactly ``1 - ||ubar^T p||^2 / ||w||^2`` per step, which this module both
applies and exposes as a numerical oracle (:func:`predicted_decrease`).
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .linalg import orthonormalize
from .metrics import Basis, epsilon_residual, orthonormality_drift, BASIS_DRIFT_TOL
from .results import TrialResult

# theta below THETA_FLOOR (or within THETA_CEIL of pi/2) is an identity
# step: eta = theta/sigma is 0/0 at theta = 0 and the decrease is exactly
# zero at both endpoints.  The lower floor must sit well below the
# trajectory measurement floor (1e-24 in epsilon, ~3e-13 in angle), else
# convergence freezes at d*THETA_FLOOR^2 inside the usable range.
THETA_FLOOR = 1e-13
THETA_CEIL = 1e-9

# n*d^2 budget under which the driver measures epsilon from scratch every
# step; above it a rank-one-maintained U^T ubar product is used instead
# (refreshed at every re-orthonormalization).
_EXACT_EPS_LIMIT = 2_000_000

# d - ||A||_F^2 loses accuracy to cancellation near convergence; below this
# value the driver switches to the residual-projection formula.
_EPS_SWITCH = 1e-8


@dataclass(frozen=True)
class FullStepRecord:
    """All quantities of one full-data iteration.

    cos(theta) = ||w||/||v|| and sigma = 0.5 ||v||^2 sin(2 theta); theta in
    [0, pi/2] is the angle the new vector reveals between the current span
    and the target.
    """

    w: np.ndarray
    p: np.ndarray
    r: np.ndarray
    sigma: float
    theta: float
    eta: float
    epsilon_before: float
    epsilon_after: float
    predicted_decrease: float
    taken: bool = True


def predicted_decrease(u: Basis, ubar: Basis, v, eta: float) -> float:
    """Closed-form value of epsilon_t - epsilon_{t+1} for step length eta.

    Evaluates sin(sigma*eta) * sin(2*theta - sigma*eta) / sin^2(theta)
    times (1 - ||ubar^T p||^2 / ||w||^2); nonnegative whenever sigma*eta
    lies in (0, 2*theta).  Returns 0 at theta = 0 or pi/2 (limit cases, no
    decrease possible).
    """
    v = np.asarray(v, dtype=float)
    w = u.columns.T @ v
    p = u.columns @ w
    r = v - p
    norm_w = float(np.linalg.norm(w))
    norm_r = float(np.linalg.norm(r))
    theta = float(np.arctan2(norm_r, norm_w))
    if theta <= THETA_FLOOR or theta >= np.pi / 2 - THETA_CEIL:
        return 0.0
    sigma = norm_r * float(np.linalg.norm(p))
    s_eta = sigma * eta
    # 1 - ||ubar^T p||^2/||w||^2 == ||(I - ubar ubar^T) p||^2/||w||^2 exactly
    # (||w|| = ||p||); the right-hand form is cancellation-free at small
    # errors, keeping the identity sharp down to the measurement floor.
    missed = p - ubar.columns @ (ubar.columns.T @ p)
    gap = float(missed @ missed) / norm_w**2
    return float(np.sin(s_eta) * np.sin(2 * theta - s_eta) / np.sin(theta) ** 2 * gap)


def full_step(u: Basis, v, ubar: Basis):
    """One full-data iteration with the exact step length eta = theta/sigma.

    Returns (new basis, FullStepRecord).  When v lies in the current span
    (theta = 0) or is orthogonal to it (theta = pi/2) the basis is returned
    unchanged; the decrease is exactly zero at those endpoints.
    """
    v = np.asarray(v, dtype=float)
    norm_v = float(np.linalg.norm(v))
    if norm_v == 0.0:
        raise ValueError("observation vector is zero")
    w = u.columns.T @ v
    p = u.columns @ w
    r = v - p
    norm_w = float(np.linalg.norm(w))
    norm_p = float(np.linalg.norm(p))
    norm_r = float(np.linalg.norm(r))
    theta = float(np.arctan2(norm_r, norm_w))
    sigma = norm_r * norm_p
    eps_before = epsilon_residual(u, ubar)

    if theta <= THETA_FLOOR or theta >= np.pi / 2 - THETA_CEIL:
        rec = FullStepRecord(
            w=w, p=p, r=r, sigma=sigma, theta=theta, eta=0.0,
            epsilon_before=eps_before, epsilon_after=eps_before,
            predicted_decrease=0.0, taken=False,
        )
        return u, rec

    eta = theta / sigma
    predicted = predicted_decrease(u, ubar, v, eta)
    # sigma*eta == theta for this step length
    gain = (np.cos(theta) - 1.0) * p / norm_p + np.sin(theta) * r / norm_r
    u_next = Basis(u.columns + np.outer(gain, w / norm_w), validate=False)
    eps_after = epsilon_residual(u_next, ubar)
    rec = FullStepRecord(
        w=w, p=p, r=r, sigma=sigma, theta=theta, eta=eta,
        epsilon_before=eps_before, epsilon_after=eps_after,
        predicted_decrease=predicted, taken=True,
    )
    return u_next, rec


def psi_diagnostic(u: Basis, ubar: Basis, s) -> float:
    """The coefficient-weighted squared-sine average; always in [0, epsilon].

    Computed from the SVD frame of ubar^T u: with coefficients rotated into
    that frame, psi = sum(s~_i^2 sin^2 phi_i) / sum(s~_i^2).  Test-side
    diagnostic; not part of the step records.
    """
    s = np.asarray(s, dtype=float)
    left, sigma, _ = np.linalg.svd(ubar.columns.T @ u.columns)
    s_rot = left.T @ s
    sin_sq = 1.0 - np.clip(sigma, 0.0, 1.0) ** 2
    total = float(s_rot @ s_rot)
    if total == 0.0:
        raise ValueError("zero coefficient vector")
    return float((s_rot * s_rot) @ sin_sq / total)


def run_full(
    u0: Basis,
    ubar: Basis,
    iters: int,
    seed: int,
    reortho_every: int = 100,
) -> TrialResult:
    """Drive full-data steps on v_t = ubar @ s_t, s_t iid standard normal.

    Records the epsilon trajectory (length iters+1).  For small problems
    epsilon is measured from scratch each step; for large ones the product
    U^T ubar is maintained by rank-one updates between re-orthonormalizations
    (exact algebra, refreshed at every re-orthonormalization) and the driver
    falls back to the scratch formula once epsilon nears the cancellation
    floor of d - ||U^T ubar||_F^2.
    """
    if iters < 0:
        raise ValueError("iters must be nonnegative")
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    u = u0
    n, d = u0.n, u0.d
    exact = n * d * d <= _EXACT_EPS_LIMIT
    a = None if exact else u.columns.T @ ubar.columns

    def measure() -> float:
        if exact:
            return epsilon_residual(u, ubar)
        rough = float(d - np.sum(a * a))
        return rough if rough >= _EPS_SWITCH else epsilon_residual(u, ubar)

    eps = [measure()]
    taken_flags, norm_r_arr, norm_p_arr, theta_arr = [], [], [], []
    for t in range(1, iters + 1):
        s = rng.standard_normal(d)
        v = ubar.columns @ s
        w = u.columns.T @ v
        p = u.columns @ w
        r = v - p
        norm_w = float(np.linalg.norm(w))
        norm_p = float(np.linalg.norm(p))
        norm_r = float(np.linalg.norm(r))
        theta = float(np.arctan2(norm_r, norm_w))
        if THETA_FLOOR < theta < np.pi / 2 - THETA_CEIL:
            gain = (np.cos(theta) - 1.0) * p / norm_p + np.sin(theta) * r / norm_r
            u = Basis(u.columns + np.outer(gain, w / norm_w), validate=False)
            if a is not None:
                a = a + np.outer(w / norm_w, ubar.columns.T @ gain)
            taken_flags.append(True)
        else:
            taken_flags.append(False)
        norm_r_arr.append(norm_r)
        norm_p_arr.append(norm_p)
        theta_arr.append(theta)
        if t % reortho_every == 0 or (
            exact and orthonormality_drift(u.columns) > BASIS_DRIFT_TOL
        ):
            u = Basis(orthonormalize(u.columns), validate=False)
            if a is not None:
                a = u.columns.T @ ubar.columns
        eps.append(measure())
    n_steps = len(taken_flags)
    return TrialResult(
        epsilons=np.array(eps),
        gate_skips=0,
        wall_time=time.perf_counter() - start,
        gate_passed=np.ones(n_steps, dtype=bool),
        taken=np.array(taken_flags, dtype=bool),
        norm_r=np.array(norm_r_arr),
        norm_p=np.array(norm_p_arr),
        theta=np.array(theta_arr),
    )
