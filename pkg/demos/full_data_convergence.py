"""Full-data convergence walkthrough.

With every entry of each vector observed, the rank-one update with the
exact step length drops the subspace error by a closed-form amount each
iteration, and the error decays at an expected asymptotic factor of
(1 - 1/d) per step.  This script shows the one-step d=1 case, verifies
the per-step decrease identity numerically, and fits the asymptotic rate
for d=10.
"""
import math

import numpy as np

from grouse import ProblemSpec, full_step, pair_with_epsilon, run_full_trial

print("=== one-dimensional subspace: a single vector reveals the answer ===")
res = run_full_trial(ProblemSpec(n=1000, d=1, q="full", iters=1, seed=0))
print(f"starting error {res.epsilons[0]:.4f} -> after one step {res.epsilons[1]:.3e}")

print()
print("=== the per-step decrease identity, measured vs predicted ===")
u, ubar = pair_with_epsilon(n=300, d=6, eps=0.05, seed=1)
rng = np.random.default_rng(2)
for t in range(5):
    v = ubar.columns @ rng.standard_normal(6)
    u, rec = full_step(u, v, ubar)
    measured = rec.epsilon_before - rec.epsilon_after
    print(
        f"step {t}: theta={rec.theta:.4f}  measured decrease={measured:.6e}  "
        f"predicted={rec.predicted_decrease:.6e}"
    )

print()
print("=== asymptotic rate for d=10 (expected factor 1 - 1/d) ===")
spec = ProblemSpec(n=2000, d=10, q="full", iters=400, seed=3)
res = run_full_trial(spec)
target = math.log(1 - 1 / 10)
print(f"error trajectory: {res.epsilons[0]:.3f} -> {res.epsilons[-1]:.3e} in {spec.iters} steps")
print(f"fitted tail slope of log(error): {res.tail_slope:.4f};  log(1 - 1/d) = {target:.4f}")
print("the semilog trajectory runs roughly parallel to the predicted rate")
print("line; the deep tail is a bit steeper than the expected-value rate")
print("because the remaining error concentrates in fewer directions.")
