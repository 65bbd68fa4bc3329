"""Command-line front end: reproducible runs, sweeps and validation reports.

Every stochastic verb requires an explicit --seed (no wall-clock seeding),
so repeating an invocation reproduces its output file exactly.  Exit codes:
0 success, 1 I/O failure, 2 usage error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import csv
import sys

from .concentration import (
    estimate_skip_rate,
    validate_gram_concentration,
    validate_residual_bound,
    validate_sin_sq_expectation,
    write_concentration_csv,
    write_residual_csv,
)
from .harness import (
    ProblemSpec,
    incoherent_basis,
    pair_with_epsilon,
    random_basis,
    run_full_trial,
    run_partial_trial,
    sweep_phase,
    write_problem_spec,
    write_sweep_csv,
)
from .linalg import NumericalError
from .results import write_trajectory_csv


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_problem_flags(sub, with_q: bool):
    sub.add_argument("--n", type=int, required=True, help="ambient dimension")
    sub.add_argument("--d", type=int, required=True, help="subspace dimension")
    if with_q:
        sub.add_argument("--q", type=int, required=True, help="observed entries per step")
    sub.add_argument("--alpha", type=float, default=1.0, help="step fudge factor in (0,2)")
    sub.add_argument("--iters", type=int, required=True, help="number of iterations")
    sub.add_argument("--seed", type=int, required=True, help="base seed (mandatory)")
    sub.add_argument(
        "--init_noise_std", type=float, default=0.5, help="starting-basis noise std"
    )
    sub.add_argument("--spec_out", default=None, help="also write the run-spec file here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grouse",
        description="Incremental subspace identification runs and validators",
        allow_abbrev=False,
    )
    subs = parser.add_subparsers(dest="verb", required=True)

    full = subs.add_parser("full", help="full-data run (every entry observed)")
    _add_problem_flags(full, with_q=False)
    full.add_argument("--out", required=True, help="trajectory CSV path")

    partial = subs.add_parser("partial", help="partial-data gated run")
    _add_problem_flags(partial, with_q=True)
    partial.add_argument("--bypass_gate", action="store_true", help="take every step")
    partial.add_argument("--out", required=True, help="trajectory CSV path")

    sweep = subs.add_parser("sweep", help="phase-transition sweep over (n, d, q)")
    sweep.add_argument("--n", type=_int_list, required=True, help="comma-separated n values")
    sweep.add_argument("--d", type=_int_list, required=True, help="comma-separated d values")
    sweep.add_argument("--q", type=_int_list, required=True, help="comma-separated q values")
    sweep.add_argument("--trials", type=int, default=10, help="trials per cell")
    sweep.add_argument("--iters", type=int, default=500)
    sweep.add_argument("--seed", type=int, required=True)
    sweep.add_argument("--alpha", type=float, default=1.0)
    sweep.add_argument("--init_noise_std", type=float, default=0.5)
    sweep.add_argument("--bypass_gate", action="store_true", help="take every step")
    sweep.add_argument("--out", required=True, help="sweep CSV path")

    conc = subs.add_parser(
        "validate-concentration", help="sampled-Gram eigenvalue window check"
    )
    conc.add_argument("--n", type=int, required=True)
    conc.add_argument("--d", type=int, required=True)
    conc.add_argument("--omega_size", type=int, required=True)
    conc.add_argument("--delta", type=float, required=True)
    conc.add_argument("--trials", type=int, required=True)
    conc.add_argument("--seed", type=int, required=True)
    conc.add_argument(
        "--basis", choices=("incoherent", "gaussian"), default="incoherent",
        help="test-basis construction",
    )
    conc.add_argument("--out", required=True, help="per-trial report CSV path")

    resid = subs.add_parser("validate-residual", help="sampled-residual lower bound check")
    resid.add_argument("--n", type=int, required=True)
    resid.add_argument("--d", type=int, required=True)
    resid.add_argument("--epsilon", type=float, required=True, help="pair error metric")
    resid.add_argument("--omega_size", type=int, required=True)
    resid.add_argument("--delta", type=float, required=True)
    resid.add_argument("--trials", type=int, required=True)
    resid.add_argument("--seed", type=int, required=True)
    resid.add_argument("--out", required=True, help="per-trial report CSV path")

    expect = subs.add_parser(
        "validate-expectation", help="E[sin^2 theta] = epsilon/d check"
    )
    expect.add_argument("--n", type=int, required=True)
    expect.add_argument("--d", type=int, required=True)
    expect.add_argument("--epsilon", type=float, required=True, help="pair error metric")
    expect.add_argument("--trials", type=int, required=True)
    expect.add_argument("--seed", type=int, required=True)
    expect.add_argument("--out", required=True, help="summary CSV path")

    skip = subs.add_parser("skip-rate", help="gate failure rate on algorithm-mode samples")
    skip.add_argument("--n", type=int, required=True)
    skip.add_argument("--d", type=int, required=True)
    skip.add_argument("--q", type=int, required=True)
    skip.add_argument("--trials", type=int, required=True)
    skip.add_argument("--seed", type=int, required=True)
    skip.add_argument(
        "--epsilon", type=float, default=1e-4,
        help="error metric of the near-solution basis",
    )
    skip.add_argument("--out", required=True, help="summary CSV path")

    return parser


def _validate_ranges(parser: argparse.ArgumentParser, cmd: argparse.Namespace) -> None:
    def ns_pairs():
        if cmd.verb == "sweep":
            return [(n, d) for n in cmd.n for d in cmd.d]
        return [(cmd.n, cmd.d)]

    for n, d in ns_pairs():
        if d < 1:
            parser.error("d must be >= 1")
        if d >= n:
            parser.error("d must be < n")
    if cmd.verb == "partial":
        if cmd.q < cmd.d:
            parser.error("q must be >= d")
        if cmd.q > cmd.n:
            parser.error("q must be <= n")
    if cmd.verb == "skip-rate":
        if cmd.q < cmd.d:
            parser.error("q must be >= d")
        if cmd.q > cmd.n:
            parser.error("q must be <= n")
    if cmd.verb in ("full", "partial", "sweep") and cmd.iters < 1:
        parser.error("iters must be >= 1")
    if cmd.verb in ("validate-expectation", "validate-residual", "skip-rate"):
        if cmd.n < 2 * cmd.d:
            parser.error("n must be >= 2d for pair construction")
        if not 0.0 <= cmd.epsilon <= cmd.d:
            parser.error("epsilon must lie in [0, d]")
    if cmd.verb in ("validate-concentration", "validate-residual"):
        if not 0.0 < cmd.delta < 1.0:
            parser.error("delta must lie in (0, 1)")


def parse_args(argv) -> argparse.Namespace:
    """Parse and range-check argv into a command; usage errors exit with 2."""
    parser = build_parser()
    cmd = parser.parse_args(argv)
    _validate_ranges(parser, cmd)
    return cmd


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_summary_csv(path, header: list[str], row: list) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerow(row)


def execute(cmd: argparse.Namespace) -> int:
    """Run one parsed command, write its CSV, print a one-line summary."""
    try:
        if cmd.verb == "full":
            spec = ProblemSpec(
                n=cmd.n, d=cmd.d, q="full", iters=cmd.iters, seed=cmd.seed,
                alpha=cmd.alpha, init_noise_std=cmd.init_noise_std,
            )
            result = run_full_trial(spec)
            write_trajectory_csv(cmd.out, result)
            if cmd.spec_out:
                write_problem_spec(cmd.spec_out, spec)
            print(
                f"final epsilon={_fmt(result.epsilons[-1])}"
                f" X={_fmt(result.x_factor) if result.x_factor is not None else 'na'}"
                f" tail_slope={_fmt(result.tail_slope) if result.tail_slope is not None else 'na'}"
            )
        elif cmd.verb == "partial":
            spec = ProblemSpec(
                n=cmd.n, d=cmd.d, q=cmd.q, iters=cmd.iters, seed=cmd.seed,
                alpha=cmd.alpha, init_noise_std=cmd.init_noise_std,
            )
            result = run_partial_trial(spec, bypass_gate=cmd.bypass_gate)
            write_trajectory_csv(cmd.out, result)
            if cmd.spec_out:
                write_problem_spec(cmd.spec_out, spec)
            print(
                f"final epsilon={_fmt(result.epsilons[-1])}"
                f" X={_fmt(result.x_factor) if result.x_factor is not None else 'na'}"
                f" gate_skips={result.gate_skips}"
            )
        elif cmd.verb == "sweep":
            cells = sweep_phase(
                cmd.n, cmd.d, cmd.q,
                trials_per_cell=cmd.trials, iters=cmd.iters, seed=cmd.seed,
                bypass_gate=cmd.bypass_gate, alpha=cmd.alpha,
                init_noise_std=cmd.init_noise_std,
            )
            write_sweep_csv(cmd.out, cells)
            feasible = [c.mean_x for c in cells if c.trials > 0]
            lo = _fmt(min(feasible)) if feasible else "na"
            hi = _fmt(max(feasible)) if feasible else "na"
            print(f"cells={len(cells)} mean_X_range=[{lo},{hi}]")
        elif cmd.verb == "validate-concentration":
            maker = incoherent_basis if cmd.basis == "incoherent" else random_basis
            u = maker(cmd.n, cmd.d, cmd.seed)
            report = validate_gram_concentration(
                u, cmd.omega_size, cmd.delta, cmd.trials, cmd.seed
            )
            write_concentration_csv(cmd.out, report)
            print(
                f"failure_rate={_fmt(report.failure_rate)}"
                f" gamma={_fmt(report.gamma)} hypothesis_met={report.hypothesis_met}"
            )
        elif cmd.verb == "validate-residual":
            u, ubar = pair_with_epsilon(cmd.n, cmd.d, cmd.epsilon, cmd.seed)
            report = validate_residual_bound(
                u, ubar, cmd.omega_size, cmd.delta, cmd.trials, cmd.seed
            )
            write_residual_csv(cmd.out, report)
            print(f"violation_rate={_fmt(report.violation_rate)}")
        elif cmd.verb == "validate-expectation":
            u, ubar = pair_with_epsilon(cmd.n, cmd.d, cmd.epsilon, cmd.seed)
            mean, stderr = validate_sin_sq_expectation(u, ubar, cmd.trials, cmd.seed)
            target = cmd.epsilon / cmd.d
            _write_summary_csv(
                cmd.out,
                ["trials", "mean", "stderr", "target"],
                [cmd.trials, _fmt(mean), _fmt(stderr), _fmt(target)],
            )
            print(f"mean={_fmt(mean)} stderr={_fmt(stderr)} target={_fmt(target)}")
        elif cmd.verb == "skip-rate":
            u, ubar = pair_with_epsilon(cmd.n, cmd.d, cmd.epsilon, cmd.seed)
            rate = estimate_skip_rate(u, cmd.q, cmd.trials, cmd.seed)
            _write_summary_csv(
                cmd.out,
                ["n", "d", "q", "trials", "skip_rate"],
                [cmd.n, cmd.d, cmd.q, cmd.trials, _fmt(rate)],
            )
            print(f"skip_rate={_fmt(rate)}")
        else:  # pragma: no cover - argparse enforces the verb set
            return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    cmd = parse_args(sys.argv[1:] if argv is None else argv)
    return execute(cmd)


if __name__ == "__main__":
    sys.exit(main())
