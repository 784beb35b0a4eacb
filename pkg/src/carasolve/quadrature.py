"""Midpoint quadrature with dyadic refinement, and the integral (Picard) map.

Integrands here are bounded but may jump wherever a trajectory crosses a
discontinuity of ``f``.  Each cell is split by dyadic bisection.  On every
segment the composite midpoint sum (the value) is accompanied by an error
indicator built from the midpoint samples interleaved with the panel
endpoints, so a jump anywhere inside the segment is seen and forces a split.
Uniform refinement alone can be fooled: for a step at ``t = 0.01`` the 8-,
16- and 32-point midpoint sums on ``[0, 1]`` coincide.  The summed
indicators of the accepted segments are the error estimate, which is what
verifiers add to their slack.

Values use midpoints only, so a jump sitting exactly on a node is never
sampled from both sides.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, ShapeError

__all__ = [
    "DEFAULT_TOL",
    "DEFAULT_CAP",
    "Partition",
    "GridFunction",
    "integrate",
    "cell_integrals",
    "cumulative",
    "picard_map",
    "composed",
]

DEFAULT_TOL = 1e-8
DEFAULT_CAP = 2 ** 20
_PANELS = 8
_MAX_DEPTH = 40
_RESOLUTION = 128 * _PANELS * np.finfo(float).eps
_BATCH = 2 ** 22


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Partition:
    nodes: np.ndarray

    def __post_init__(self):
        nodes = _frozen(self.nodes)
        if nodes.ndim != 1 or nodes.size < 2:
            raise PreconditionError("a partition needs at least two nodes")
        if not np.all(np.isfinite(nodes)):
            raise PreconditionError("partition nodes must be finite")
        if np.any(np.diff(nodes) <= 0):
            raise PreconditionError("partition nodes must be strictly ascending")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, a, b, m):
        if int(m) < 1:
            raise PreconditionError("need at least one cell")
        nodes = np.linspace(float(a), float(b), int(m) + 1)
        nodes[-1] = float(b)
        return cls(nodes)

    @property
    def a(self):
        return float(self.nodes[0])

    @property
    def b(self):
        return float(self.nodes[-1])

    @property
    def cells(self):
        return self.nodes.size - 1

    def refine(self):
        """Split every cell in half."""
        mids = 0.5 * (self.nodes[:-1] + self.nodes[1:])
        out = np.empty(2 * self.nodes.size - 1)
        out[0::2] = self.nodes
        out[1::2] = mids
        return Partition(out)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.nodes.shape == other.nodes.shape and bool(np.all(self.nodes == other.nodes))

    def __hash__(self):
        return hash(self.nodes.tobytes())

    def __len__(self):
        return self.nodes.size


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Piecewise-linear function through ``values`` at the partition nodes.

    ``err`` carries the accumulated quadrature error estimate when the
    function was produced by integration, and is zero otherwise.
    """

    partition: Partition
    values: np.ndarray
    err: float = 0.0

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != self.partition.nodes.shape:
            raise ShapeError(
                f"{values.size} values for {self.partition.nodes.size} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise PreconditionError("grid function values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, partition, fn):
        return cls(partition, np.asarray(fn(partition.nodes), dtype=float))

    @property
    def nodes(self):
        return self.partition.nodes

    def __call__(self, t):
        out = np.interp(np.asarray(t, dtype=float), self.partition.nodes, self.values)
        if np.ndim(out) == 0:
            return float(out)
        return out

    def with_values(self, values, err=0.0):
        return GridFunction(self.partition, values, err)

    def sup_distance(self, other):
        _check_same(self, other)
        return float(np.max(np.abs(self.values - other.values)))


def _check_same(f, g):
    if f.partition != g.partition:
        raise ShapeError("grid functions live on different partitions")


def _rules(g, lo, w):
    """Midpoint value and error indicator on ``_PANELS`` panels of each segment.

    The indicator is the larger of the midpoint/trapezoid gap and a sum of
    absolute second differences over the interleaved samples.  For smooth
    ``g`` both behave like the midpoint error; a jump between two samples adds
    about ``|jump| * spacing`` to the second, and absolute values cannot
    cancel the way two jumps can cancel in the gap.
    """
    s = np.arange(2 * _PANELS + 1) / (2 * _PANELS)
    t = lo[:, None] + w[:, None] * s[None, :]
    vals = np.broadcast_to(np.asarray(g(t), dtype=float), t.shape)
    mid = vals[:, 1::2].mean(axis=1) * w
    edge = vals[:, ::2]
    trap = (edge[:, 1:-1].sum(axis=1) + 0.5 * (edge[:, 0] + edge[:, -1])) / _PANELS * w
    spacing = w / (2 * _PANELS)
    curv = np.abs(vals[:, 2:] - 2 * vals[:, 1:-1] + vals[:, :-2]).sum(axis=1) * spacing / 2
    return mid, np.maximum(np.abs(mid - trap), curv)


def _batched(g, lo, w):
    step = max(1, _BATCH // (2 * _PANELS + 1))
    mid = np.empty(lo.size)
    err = np.empty(lo.size)
    for start in range(0, lo.size, step):
        sl = slice(start, start + step)
        mid[sl], err[sl] = _rules(g, lo[sl], w[sl])
    return mid, err


def cell_integrals(g, nodes, tol=DEFAULT_TOL, cap=DEFAULT_CAP):
    """Integrate ``g`` over every cell of ``nodes``; returns ``(values, errs)``.

    ``g`` must accept an array of abscissae of any shape.  Each cell is
    bisected dyadically; a segment is accepted once its error indicator is
    within its share of ``tol``, at depth ``_MAX_DEPTH``, when it is too
    narrow to bisect in floating point, or when the cell has used ``cap``
    evaluations.  ``errs`` sums the accepted gaps.
    """
    nodes = np.asarray(nodes, dtype=float)
    width = np.diff(nodes)
    evals = np.zeros(width.size)
    cell = np.nonzero(width > 0)[0]
    lo = nodes[:-1][cell]
    w = width[cell]
    depth = 0
    cost = 2 * _PANELS + 1
    accepted = []
    while cell.size:
        mid, gap = _batched(g, lo, w)
        np.add.at(evals, cell, cost)
        # samples closer than ~64 ulps would round onto the segment ends
        scale = np.maximum(np.abs(lo), np.abs(lo + w))
        unresolved = w <= _RESOLUTION * scale
        done = ((gap <= tol * (w / width[cell])) | unresolved
                | (depth >= _MAX_DEPTH) | (evals[cell] >= cap))
        accepted.append((cell[done], mid[done], gap[done]))
        keep = ~done
        half = 0.5 * w[keep]
        cell = np.repeat(cell[keep], 2)
        lo = np.column_stack([lo[keep], lo[keep] + half]).ravel()
        w = np.repeat(half, 2)
        depth += 1
    values = np.zeros(width.size)
    errs = np.zeros(width.size)
    # deepest segments first: dyadic pieces of a constant then add up exactly
    for idx, mid, gap in reversed(accepted):
        np.add.at(values, idx, mid)
        np.add.at(errs, idx, gap)
    return values, errs


def integrate(g, lo, hi, tol=DEFAULT_TOL, cap=DEFAULT_CAP):
    """Integral of ``g`` over ``[lo, hi]`` as ``(value, err_estimate)``.

    An ``err_estimate`` above ``tol`` means the refinement cap was reached
    before two successive refinements agreed.
    """
    lo = float(lo)
    hi = float(hi)
    if hi < lo:
        raise PreconditionError(f"need lo <= hi, got [{lo}, {hi}]")
    if hi == lo:
        return 0.0, 0.0
    vals, errs = cell_integrals(g, np.array([lo, hi]), tol, cap)
    return float(vals[0]), float(errs[0])


def cumulative(g, partition, tol=DEFAULT_TOL, cap=DEFAULT_CAP):
    """``x -> int_a^x g`` sampled at the partition nodes.

    Per-cell integrals are summed in index order; the returned function's
    ``err`` is the sum of the per-cell error estimates.
    """
    vals, errs = cell_integrals(g, partition.nodes, tol, cap)
    out = np.concatenate([[0.0], np.cumsum(vals)])
    return GridFunction(partition, out, float(np.sum(errs)))


def composed(rhs, z):
    """Callable ``t -> f(t, z(t))`` for piecewise-linear ``z``."""
    nodes = z.partition.nodes
    vals = z.values

    def integrand(t):
        return rhs.func(t, np.interp(t, nodes, vals))

    return integrand


def picard_map(problem, z, tol=DEFAULT_TOL, cap=DEFAULT_CAP):
    """``T(z)(x) = y0 + int_a^x f(t, z(t)) dt`` on z's partition."""
    if z.partition.a != problem.a or z.partition.b != problem.b:
        raise PreconditionError("z must be defined on the problem interval")
    v = cumulative(composed(problem.rhs, z), z.partition, tol, cap)
    return GridFunction(z.partition, problem.y0 + v.values, v.err)
