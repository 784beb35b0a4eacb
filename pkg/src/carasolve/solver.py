"""Maximal and minimal integral solutions by clamped monotone iteration.

Starting from the upper envelope ``w0 = y0 + int phi`` (a super-solution,
since ``f <= phi``) the update ``z <- min(z, T z)`` descends.  When every
vertical section is non-decreasing, ``T`` is order preserving, so any
sub-solution ``u <= z`` satisfies ``u <= T u <= T z`` and stays below every
iterate.  Upper semicontinuity carries the inequality through the limit, so
the limit is the largest sub-solution and solves ``z = T z``.  The mirror
iteration from the witness ``w = y0 - int phi`` gives the smallest solution.

Without monotone sections none of this holds; the solver refuses unless
forced, and a forced result is marked non-certified.
"""

from dataclasses import dataclass, field, replace
import csv
import io
import logging
import math

import numpy as np

from .errors import NotCertifiedError, PreconditionError
from .quadrature import (
    DEFAULT_TOL,
    GridFunction,
    Partition,
    composed,
    cumulative,
    picard_map,
)
from .subsolution import verify_subsolution

log = logging.getLogger(__name__)

__all__ = [
    "SolveOptions",
    "SolveResult",
    "ResidualReport",
    "solve_maximal",
    "solve_minimal",
    "residual",
    "euler",
]


@dataclass(frozen=True)
class SolveOptions:
    tol_iter: float = 1e-9
    tol_res: float = 1e-6
    max_iter: int = 100_000
    quad_tol: float = DEFAULT_TOL
    force_heuristic: bool = False


@dataclass
class _Run:
    z: GridFunction
    iterations: int
    converged: bool
    last_step: float
    clamp_excess: float
    history: list = field(default_factory=list)


@dataclass
class SolveResult:
    z0: GridFunction
    iterations: int
    fixed_point_residual: float
    subsolution_report: object
    converged: bool
    certified: bool
    quad_err: float
    last_step: float
    clamp_excess: float
    envelope_lo: GridFunction
    envelope_hi: GridFunction
    options: SolveOptions
    minimal: GridFunction = None
    gap: float = None
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {
            "certified": self.certified,
            "converged": self.converged,
            "iterations": self.iterations,
            "fixed_point_residual": self.fixed_point_residual,
            "quad_err": self.quad_err,
            "last_step": self.last_step,
            "clamp_excess": self.clamp_excess,
            "gap": self.gap,
            "grid_cells": self.z0.partition.cells,
            "interval": [self.z0.partition.a, self.z0.partition.b],
            "z0_at_b": float(self.z0.values[-1]),
            "tolerances": {
                "tol_iter": self.options.tol_iter,
                "tol_res": self.options.tol_res,
                "quad_tol": self.options.quad_tol,
                "max_iter": self.options.max_iter,
            },
            "subsolution": self.subsolution_report.to_dict(),
            "warnings": list(self.warnings),
        }

    def trajectory_csv(self):
        cols = ["x", "z0", "minimal", "envelope_lo", "envelope_hi"]
        minimal = self.minimal.values if self.minimal is not None else None
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for j, x in enumerate(self.z0.nodes):
            row = [x, self.z0.values[j],
                   minimal[j] if minimal is not None else math.nan,
                   self.envelope_lo.values[j], self.envelope_hi.values[j]]
            writer.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()


@dataclass
class ResidualReport:
    sup_residual: float
    argmax_x: float
    quad_err: float

    def to_dict(self):
        return {"sup_residual": self.sup_residual, "argmax_x": self.argmax_x,
                "quad_err": self.quad_err}


def _band(problem, partition, quad_tol):
    big_phi = cumulative(problem.rhs.bound, partition, quad_tol)
    lo = GridFunction(partition, problem.y0 - big_phi.values, big_phi.err)
    hi = GridFunction(partition, problem.y0 + big_phi.values, big_phi.err)
    return lo, hi


def _clipped(problem, lo, hi):
    """Same problem with ordinates clipped to the envelope band ``[lo, hi]``."""
    rhs = problem.rhs
    nodes = lo.nodes
    lo_v, hi_v = lo.values, hi.values

    def func(x, y):
        y = np.clip(y, np.interp(x, nodes, lo_v), np.interp(x, nodes, hi_v))
        return rhs.func(x, y)

    return replace(problem, rhs=replace(rhs, func=func))


def _check_partition(problem, partition):
    if partition.a != problem.a or partition.b != problem.b:
        raise PreconditionError(
            f"partition spans [{partition.a}, {partition.b}], problem is "
            f"[{problem.a}, {problem.b}]"
        )


def _gate(problem, opts):
    props = problem.rhs.props
    if props.y_increasing and props.y_usc:
        return True
    if not opts.force_heuristic:
        raise NotCertifiedError(
            f"{problem.rhs.label}: sections not declared increasing and usc; "
            "no certified maximal solution (use force_heuristic)"
        )
    log.warning("%s: running heuristic iteration, result is NON-CERTIFIED", problem.rhs.label)
    return False


def _iterate(problem, start, lo, hi, opts, downward, keep_history=False):
    work = _clipped(problem, lo, hi)
    z = start
    pick = np.minimum if downward else np.maximum
    step = math.inf
    excess = 0.0
    history = []
    for it in range(1, int(opts.max_iter) + 1):
        tz = picard_map(work, z, opts.quad_tol)
        # wrong-way movement of T z; absorbed by the clamp
        wrong = (tz.values - z.values) if downward else (z.values - tz.values)
        excess = max(excess, float(np.max(wrong, initial=0.0)))
        new = GridFunction(z.partition, pick(z.values, tz.values))
        step = new.sup_distance(z)
        if keep_history:
            history.append(new)
        z = new
        if step <= opts.tol_iter:
            return _Run(z, it, True, step, excess, history)
    return _Run(z, int(opts.max_iter), False, step, excess, history)


def _finish(problem, run, lo, hi, opts, certifiable):
    tz = picard_map(problem, run.z, opts.quad_tol)
    fp_res = float(np.max(np.abs(run.z.values - tz.values)))
    report = verify_subsolution(problem, run.z, tol=opts.tol_res, quad_tol=opts.quad_tol)
    warnings = []
    if not certifiable:
        warnings.append("NON-CERTIFIED: sections not declared increasing and usc")
    if not run.converged:
        warnings.append(f"not converged after {run.iterations} iterations "
                        f"(last step {run.last_step:.3g})")
    certified = bool(
        certifiable and run.converged and report.is_member
        and fp_res <= opts.tol_res + tz.err
    )
    if certifiable and run.converged and not certified:
        warnings.append("fixed-point or sub-solution check failed")
    return SolveResult(
        z0=run.z,
        iterations=run.iterations,
        fixed_point_residual=fp_res,
        subsolution_report=report,
        converged=run.converged,
        certified=certified,
        quad_err=float(tz.err),
        last_step=float(run.last_step),
        clamp_excess=run.clamp_excess,
        envelope_lo=lo,
        envelope_hi=hi,
        options=opts,
        warnings=warnings,
    )


def solve_maximal(problem, partition, opts=None, with_minimal=False):
    """Largest sub-solution on ``partition`` by descent from the upper envelope.

    Raises :class:`NotCertifiedError` for right-hand sides without increasing
    usc sections unless ``opts.force_heuristic`` is set.  With
    ``with_minimal`` the upward iteration also runs and ``gap`` is filled in.
    """
    opts = opts or SolveOptions()
    _check_partition(problem, partition)
    certifiable = _gate(problem, opts)
    lo, hi = _band(problem, partition, opts.quad_tol)
    run = _iterate(problem, hi, lo, hi, opts, downward=True)
    result = _finish(problem, run, lo, hi, opts, certifiable)
    if with_minimal:
        low = _iterate(problem, lo, lo, hi, opts, downward=False)
        result.minimal = low.z
        result.gap = result.z0.sup_distance(low.z)
    return result


def solve_minimal(problem, partition, opts=None):
    """Smallest solution on ``partition`` by ascent from the witness ``w``."""
    opts = opts or SolveOptions()
    _check_partition(problem, partition)
    _gate(problem, opts)
    lo, hi = _band(problem, partition, opts.quad_tol)
    return _iterate(problem, lo, lo, hi, opts, downward=False).z


def iterate_history(problem, partition, opts=None, downward=True):
    """All iterates of the clamped scheme; for descent/ascent diagnostics."""
    opts = opts or SolveOptions()
    _check_partition(problem, partition)
    _gate(problem, opts)
    lo, hi = _band(problem, partition, opts.quad_tol)
    start = hi if downward else lo
    run = _iterate(problem, start, lo, hi, opts, downward, keep_history=True)
    return [start] + run.history


def residual(problem, y, quad_tol=DEFAULT_TOL):
    """``sup_x |y(x) - y0 - int_a^x f(t, y(t)) dt|`` over the nodes of ``y``."""
    v = cumulative(composed(problem.rhs, y), y.partition, quad_tol)
    res = np.abs(y.values - problem.y0 - v.values)
    j = int(np.argmax(res))
    return ResidualReport(float(res[j]), float(y.nodes[j]), float(v.err))


def euler_nodes(a, b, h):
    """``a, a+h, a+2h, ...`` ending exactly at ``b``.

    Returns ``(nodes, last_dt)``: ``last_dt`` is ``h`` when ``b - a`` is a
    whole number of steps, otherwise the shorter remainder.
    """
    span = (b - a) / h
    if abs(span - round(span)) < 1e-9:
        steps, last_dt = max(int(round(span)), 1), h
    else:
        steps = int(math.ceil(span))
        last_dt = (b - a) - (steps - 1) * h
    nodes = a + h * np.arange(steps + 1, dtype=float)
    nodes[-1] = b
    return nodes, last_dt


def euler(problem, h, partition=None):
    """Explicit Euler with nominal step ``h``.

    Every full step advances by exactly ``h * f`` (not by the rounded node
    difference), so a two-cycle such as ``0 -> h -> 0`` is reproduced bit for
    bit.  With ``partition`` the trajectory is resampled onto it.
    """
    if not h > 0:
        raise PreconditionError("step must be positive")
    h = float(h)
    nodes, last_dt = euler_nodes(problem.a, problem.b, h)
    ys = np.empty_like(nodes)
    ys[0] = problem.y0
    f = problem.rhs.func
    last = nodes.size - 2
    for k in range(nodes.size - 1):
        dt = h if k < last else last_dt
        ys[k + 1] = ys[k] + dt * float(f(np.float64(nodes[k]), np.float64(ys[k])))
    traj = GridFunction(Partition(nodes), ys)
    if partition is None:
        return traj
    return GridFunction(partition, traj(partition.nodes))
