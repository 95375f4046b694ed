"""Command-line front end.

Subcommands::

    fracadapt run    --problem a --alpha 0.7 --barrier r0 --tol 1e-3
    fracadapt run    --problem a --alpha 0.5 --graded --r 3 --M 4
    fracadapt sweep  --problem a --alpha 0.4 --tols 1e-2 1e-3 1e-4
    fracadapt mlf    --alpha 0.5 --beta 1 --x -1 -2
    fracadapt bound  --problem a --alpha 0.4 --tol 1e-3

Every command writes CSV (to ``--output`` or stdout). Usage and domain errors
exit with status 2, solver non-convergence with status 3.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .adapt import AdaptConfig, adaptive_solve, make_barrier
from .barriers import Barrier, BarrierKind, barrier_value
from .bounds import inv_op_apply, residual_trace
from .errors import DomainError, FracAdaptError, NonConvergenceError
from .experiments import (
    DEFAULT_NX_B,
    DEFAULT_NX_C,
    TestProblem,
    error_metrics,
    problem_a,
    problem_b,
    problem_c,
    rate_table,
    reference_solution_c,
)
from .fracops import TimeGridFunction
from .residual import Distribution, ProblemC, SamplePlan, Standard, interval_check
from .spatial import Norm
from .specfun import mlf

__all__ = ["main", "build_parser"]

VERSION_TAG = "fracadapt v1"
REF_FACTOR = 8

logger = logging.getLogger("fracadapt")


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return repr(x)


def _add_problem_args(p: argparse.ArgumentParser, sweep: bool = False) -> None:
    p.add_argument("--config", type=Path, help="JSON file with default option values")
    p.add_argument("--problem", choices=["a", "b", "c"], default="a")
    p.add_argument("--alpha", type=float, required=False)
    p.add_argument("--barrier", choices=["r0", "r1"], default="r0")
    p.add_argument("--nx", type=int, help="spatial intervals (problems b, c)")
    p.add_argument("--norm", choices=["l2", "linf"], default="l2")
    p.add_argument("--samples", type=int, default=16, help="residual samples per interval")
    p.add_argument("--distribution", choices=["chebyshev", "uniform"], default="chebyshev")
    p.add_argument("--Q", type=float, default=1.1)
    p.add_argument("--safety", type=float, default=1.0, help="multiplier applied to TOL (<= 1)")
    p.add_argument("--max-retries", type=int, default=10000)
    p.add_argument("--r", type=float, help="grading exponent (default (2-alpha)/alpha)")
    p.add_argument("--output", "-o", default="-")
    if sweep:
        p.add_argument("--tols", type=float, nargs="+")
        p.add_argument("--Ms", type=int, nargs="+")
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--graded", action="store_true", help="implied by --Ms")
    else:
        p.add_argument("--tol", type=float)
        p.add_argument("--graded", action="store_true")
        p.add_argument("--M", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracadapt", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_problem_args(sub.add_parser("run", help="one adaptive or graded solve"))
    _add_problem_args(sub.add_parser("sweep", help="rate table over TOL or M lists"), sweep=True)
    b = sub.add_parser("bound", help="a posteriori bound v error at the nodes")
    _add_problem_args(b)
    b.add_argument("--hold", choices=["max", "midpoint"], default="max",
                   help="how samples are held between sample times")
    m = sub.add_parser("mlf", help="evaluate E_{alpha,beta}(x)")
    m.add_argument("--alpha", type=float, required=True)
    m.add_argument("--beta", type=float, default=1.0)
    m.add_argument("--x", type=float, nargs="+", required=True)
    m.add_argument("--output", "-o", default="-")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    path = getattr(args, "config", None)
    if path is None:
        return args
    try:
        defaults = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {path}: {exc}")
    sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
    sub.set_defaults(**{k.replace("-", "_"): v for k, v in defaults.items()})
    return parser.parse_args(argv)


@dataclass
class RunSpec:
    problem: str
    alpha: float
    barrier: str
    tol: float | None
    graded: bool
    M: int | None
    r: float | None
    nx: int | None
    norm: str
    samples: int
    distribution: str
    Q: float
    safety: float
    max_retries: int

    @classmethod
    def from_args(cls, args: argparse.Namespace, **override) -> "RunSpec":
        fields = {k: getattr(args, k, None) for k in cls.__dataclass_fields__}
        fields.update(override)
        fields.setdefault("graded", False)
        fields["graded"] = bool(fields["graded"])
        return cls(**fields)

    def validate(self) -> None:
        if self.alpha is None:
            raise UsageError("--alpha is required")
        if not 0 < self.alpha < 1:
            raise UsageError("--alpha must lie in (0, 1)")
        if self.graded:
            if self.M is None or self.M < 1:
                raise UsageError("graded runs require --M >= 1")
        elif self.tol is None or not self.tol > 0:
            raise UsageError("adaptive runs require --tol > 0")
        if not 0 < self.safety <= 1:
            raise UsageError("--safety must lie in (0, 1]")

    def make_problem(self) -> TestProblem:
        if self.problem == "a":
            return problem_a(self.alpha)
        if self.problem == "b":
            return problem_b(self.alpha, self.nx or DEFAULT_NX_B)
        return problem_c(self.alpha, self.nx or DEFAULT_NX_C)

    @property
    def plan(self) -> SamplePlan:
        return SamplePlan(self.samples, Distribution(self.distribution))

    @property
    def norm_kind(self) -> Norm:
        return Norm(self.norm)

    @property
    def barrier_kind(self) -> BarrierKind:
        return BarrierKind(self.barrier)


@dataclass
class RunResult:
    spec: RunSpec
    problem: TestProblem
    solution: TimeGridFunction
    barrier: Barrier
    ratios: np.ndarray  # worst ratio per interval (nan if unchecked)


def execute(spec: RunSpec) -> RunResult:
    spec.validate()
    problem = spec.make_problem()
    if spec.graded:
        solution = problem.solve_graded(spec.M, spec.r)
        t1 = float(solution.mesh.nodes[1])
        barrier = make_barrier(spec.barrier_kind, spec.alpha, problem.lam, t1)
        ratios = np.full(solution.mesh.M, np.nan)
        if spec.tol is not None:
            mode = _mode_for(problem, solution)
            for m in range(1, solution.mesh.M + 1):
                res = interval_check(solution, mode, problem.op, problem.f, spec.alpha, m, barrier,
                                     spec.tol * spec.safety, spec.plan, spec.norm_kind)
                ratios[m - 1] = res.worst_ratio
        return RunResult(spec, problem, solution, barrier, ratios)
    config = AdaptConfig(
        tol=spec.tol * spec.safety,
        barrier_kind=spec.barrier_kind,
        Q=spec.Q,
        max_retries_per_step=spec.max_retries,
        plan=spec.plan,
        norm=spec.norm_kind,
    )
    report = adaptive_solve(problem.as_problem(), config)
    ratios = np.array([r.worst_ratio for r in report.per_step])
    return RunResult(spec, problem, report.solution, report.barrier, ratios)


def _mode_for(problem: TestProblem, solution: TimeGridFunction):
    if problem.id == "C":
        return ProblemC(float(solution.mesh.nodes[1]), solution.values[1] - solution.values[0])
    return Standard()


def _attach_reference(result: RunResult, M_ref: int) -> None:
    if result.problem.id == "C" and result.problem.reference is None:
        result.problem.reference = reference_solution_c(result.problem, M_ref)


def _summary_error(result: RunResult) -> float:
    em = error_metrics(result.solution, result.problem, result.spec.norm_kind)
    if result.problem.id == "C" or (not result.spec.graded and result.spec.barrier == "r1"):
        return em.terminal_error
    return em.max_node_error


def _header(spec: RunSpec, extra: str = "") -> str:
    tol = "-" if spec.tol is None else repr(spec.tol)
    kind = "graded" if spec.graded else "adaptive"
    line = f"# {VERSION_TAG}, problem={spec.problem}, alpha={spec.alpha!r}, tol={tol}, barrier={spec.barrier}, mesh={kind}"
    return line + extra + "\n"


def cmd_run(args: argparse.Namespace) -> str:
    spec = RunSpec.from_args(args)
    result = execute(spec)
    _attach_reference(result, REF_FACTOR * result.solution.mesh.M)
    em = error_metrics(result.solution, result.problem, spec.norm_kind)
    nodes = result.solution.mesh.nodes
    buf = io.StringIO()
    buf.write(_header(spec, f", M={result.solution.mesh.M}"))
    buf.write("t_j,step,error,residual_worst_ratio,barrier_value\n")
    for j, t in enumerate(nodes):
        step = 0.0 if j == 0 else t - nodes[j - 1]
        ratio = None if j == 0 else result.ratios[j - 1]
        bval = None if j == 0 else barrier_value(result.barrier, float(t))
        buf.write(",".join([_fmt(t), _fmt(step), _fmt(em.node_errors[j]), _fmt(ratio), _fmt(bval)]) + "\n")
    return buf.getvalue()


@dataclass(frozen=True)
class _SweepOutcome:
    M: int
    error: float | None  # None when a reference is still needed
    terminal: np.ndarray


def _sweep_job(spec: RunSpec) -> _SweepOutcome:
    result = execute(spec)
    terminal = result.solution.values[-1].copy()
    if result.problem.id == "C":
        return _SweepOutcome(result.solution.mesh.M, None, terminal)
    return _SweepOutcome(result.solution.mesh.M, _summary_error(result), terminal)


def _jobs(args: argparse.Namespace) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("FRACADAPT_JOBS")
    return max(1, int(env)) if env else 1


def cmd_sweep(args: argparse.Namespace) -> str:
    if bool(args.tols) == bool(args.Ms):
        raise UsageError("give exactly one of --tols or --Ms")
    values = args.tols or args.Ms
    if len(values) < 2:
        raise UsageError("a sweep needs at least two entries")
    if args.tols:
        specs = [RunSpec.from_args(args, tol=tol, graded=False, M=None) for tol in args.tols]
    else:
        specs = [RunSpec.from_args(args, tol=None, graded=True, M=M) for M in args.Ms]
    for s in specs:
        s.validate()
    jobs = min(_jobs(args), len(specs))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_sweep_job, specs))
    else:
        outcomes = [_sweep_job(s) for s in specs]
    if any(o.error is None for o in outcomes):
        problem = specs[0].make_problem()
        ref = reference_solution_c(problem, REF_FACTOR * max(o.M for o in outcomes))
        outcomes = [
            _SweepOutcome(o.M, problem.op.norm(o.terminal - ref, specs[0].norm_kind), o.terminal)
            for o in outcomes
        ]
    runs = [(o.M, float(o.error)) for o in outcomes]
    if len({m for m, _ in runs}) != len(runs):
        raise UsageError(f"sweep produced repeated step counts {[m for m, _ in runs]}")
    table = rate_table(runs)
    buf = io.StringIO()
    buf.write(_header(specs[0], ", sweep=" + ("tol" if args.tols else "M")))
    buf.write("M,TOL,error,rate\n")
    for i, (spec, o) in enumerate(zip(specs, outcomes)):
        tol = "-" if spec.graded else repr(spec.tol)
        buf.write(f"{o.M},{tol},{_fmt(table.errors[i])},{_fmt(table.rates[i])}\n")
    return buf.getvalue()


def cmd_mlf(args: argparse.Namespace) -> str:
    vals = mlf(args.alpha, args.beta, np.array(args.x, dtype=float))
    buf = io.StringIO()
    buf.write(f"# {VERSION_TAG}, mlf alpha={args.alpha!r}, beta={args.beta!r}\n")
    buf.write("x,E_alpha_beta(x)\n")
    for x, v in zip(args.x, np.atleast_1d(vals)):
        buf.write(f"{_fmt(x)},{_fmt(v)}\n")
    return buf.getvalue()


def cmd_bound(args: argparse.Namespace) -> str:
    spec = RunSpec.from_args(args)
    result = execute(spec)
    _attach_reference(result, REF_FACTOR * result.solution.mesh.M)
    em = error_metrics(result.solution, result.problem, spec.norm_kind)
    mode = _mode_for(result.problem, result.solution)
    trace = residual_trace(result.solution, mode, result.problem.op, result.problem.f, spec.alpha,
                           spec.plan, spec.norm_kind)
    nodes = result.solution.mesh.nodes
    buf = io.StringIO()
    buf.write(_header(spec, f", M={result.solution.mesh.M}"))
    buf.write("t,bound,error\n")
    for j in range(1, len(nodes)):
        t = float(nodes[j])
        buf.write(f"{_fmt(t)},{_fmt(inv_op_apply(trace, t, args.hold))},{_fmt(em.node_errors[j])}\n")
    return buf.getvalue()


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "mlf": cmd_mlf, "bound": cmd_bound}


def _write_atomic(text: str, output: str) -> None:
    if output == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(output)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = _apply_config(parser, argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fracadapt: error: {exc}", file=sys.stderr)
        return 2
    except NonConvergenceError as exc:
        print(f"fracadapt: non-convergence: {exc}", file=sys.stderr)
        return 3
    except (DomainError, FracAdaptError) as exc:
        print(f"fracadapt: error: {exc}", file=sys.stderr)
        return 2
    _write_atomic(text, args.output)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
