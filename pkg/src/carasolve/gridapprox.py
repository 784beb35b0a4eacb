"""Step-grid approximations ``f_n`` of a right-hand side.

For each ``n`` the ordinate window is cut by breakpoints ``a_k`` taken from
the dense set ``B`` with gaps below ``1/n``.  On a breakpoint ``f_n`` keeps the
exact value ``f(x, a_k)``; on the open gap ``I_k = (a_k, a_{k+1})`` it is the
constant ``min(n, sup f(x, I_k))``.  When every vertical section is upper
semicontinuous, ``f_n -> f`` pointwise.

The supremum over ``I_k`` is taken over sampler points of ``B`` inside the gap,
followed by a few rounds of local refinement around the running maximum.
"""

from dataclasses import dataclass, field
import csv
import io
import math

import numpy as np

from ._workers import ordered_map
from .errors import ConfigurationError, DomainError

__all__ = [
    "StepGrid",
    "ApproxRhs",
    "DEFAULT_SUP_RESOLUTION",
    "build_step_grid",
    "eval_fn",
    "convergence_probe",
    "probe_table_csv",
    "superpose",
    "decompose_sets",
    "Decomposition",
]

DEFAULT_SUP_RESOLUTION = 256
_REFINE_ROUNDS = 8
_REFINE_POINTS = 32


@dataclass(frozen=True, eq=False)
class StepGrid:
    n: int
    breakpoints: np.ndarray

    def __post_init__(self):
        pts = np.array(self.breakpoints, dtype=float)
        pts.setflags(write=False)
        object.__setattr__(self, "breakpoints", pts)

    @property
    def window(self):
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def locate(self, y):
        """``(k, on_breakpoint)``: ``y`` equals ``a_k`` or lies in ``(a_k, a_{k+1})``."""
        lo, hi = self.window
        if not lo <= y <= hi:
            raise DomainError(f"y={y} outside grid window [{lo}, {hi}]")
        k = int(np.searchsorted(self.breakpoints, y, side="right")) - 1
        if self.breakpoints[k] == y:
            return k, True
        return k, False

    def interval(self, k):
        return float(self.breakpoints[k]), float(self.breakpoints[k + 1])


def build_step_grid(rhs, n, window):
    """Breakpoints from ``rhs.dense_sampler`` covering ``window`` with gaps < 1/n."""
    n = int(n)
    lo, hi = float(window[0]), float(window[1])
    if n < 1:
        raise ConfigurationError("n must be a positive integer")
    if not lo < hi:
        raise ConfigurationError(f"empty window [{lo}, {hi}]")
    gap = 1.0 / n
    ext_lo, ext_hi = lo - gap, hi + gap
    count = int(math.ceil(n * (ext_hi - ext_lo))) + 1
    for _ in range(8):
        pts = np.asarray(rhs.dense_sampler(ext_lo, ext_hi, count), dtype=float)
        below = pts[pts <= lo]
        above = pts[pts >= hi]
        if below.size and above.size:
            keep = pts[(pts >= below[-1]) & (pts <= above[0])]
            if np.all(np.diff(keep) > 0) and np.all(np.diff(keep) < gap):
                return StepGrid(n, keep)
        count *= 2
    raise ConfigurationError(
        f"dense sampler of {rhs.name} cannot produce gaps below 1/{n} on [{lo}, {hi}]"
    )


@dataclass(frozen=True, eq=False)
class ApproxRhs:
    """``f_n`` for ``base`` on ``grid``.

    Interval suprema are cached per ``(x, k)``, so repeated evaluations in one
    open interval return the identical float.
    """

    base: object
    grid: StepGrid
    sup_resolution: int = DEFAULT_SUP_RESOLUTION
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def build(cls, rhs, n, window, sup_resolution=DEFAULT_SUP_RESOLUTION):
        return cls(rhs, build_step_grid(rhs, n, window), sup_resolution)

    @property
    def n(self):
        return self.grid.n

    def interval_sup(self, x, k):
        key = (float(x), int(k))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        val = _sampled_sup(self.base, float(x), *self.grid.interval(k), self.sup_resolution)
        self._cache[key] = val
        return val

    def gamma(self, x, k):
        """Value of ``f_n`` on the open interval ``k`` at abscissa ``x``."""
        return min(float(self.n), self.interval_sup(x, k))

    def __call__(self, x, y):
        return eval_fn(self, x, y)


def _sampled_sup(rhs, x, lo, hi, resolution):
    pts = np.asarray(rhs.dense_sampler(lo, hi, resolution), dtype=float)
    if pts.size == 0:
        raise ConfigurationError(f"dense sampler returned no points in ({lo}, {hi})")
    vals = np.asarray(rhs(np.full_like(pts, x), pts), dtype=float)
    best = float(np.max(vals))
    for _ in range(_REFINE_ROUNDS):
        i = int(np.argmax(vals))
        left = pts[i - 1] if i > 0 else lo
        right = pts[i + 1] if i + 1 < pts.size else hi
        pts = np.asarray(rhs.dense_sampler(left, right, _REFINE_POINTS), dtype=float)
        if pts.size == 0:
            break
        vals = np.asarray(rhs(np.full_like(pts, x), pts), dtype=float)
        best = max(best, float(np.max(vals)))
    return best


def eval_fn(approx, x, y):
    """``f_n(x, y)``: exact on breakpoints, clamped sampled sup inside gaps."""
    k, on_break = approx.grid.locate(float(y))
    if on_break:
        return float(approx.base(x, approx.grid.breakpoints[k]))
    return approx.gamma(x, k)


def convergence_probe(rhs, points, n_list, window, sup_resolution=DEFAULT_SUP_RESOLUTION):
    """Rows ``(x, y, n, |f_n(x, y) - f(x, y)|)``, grouped by ``n`` in the given order."""
    points = [(float(x), float(y)) for x, y in points]
    lo, hi = float(window[0]), float(window[1])
    for x, y in points:
        if not lo <= y <= hi:
            raise DomainError(f"probe ordinate {y} outside window [{lo}, {hi}]")

    def one_n(n):
        approx = ApproxRhs.build(rhs, n, (lo, hi), sup_resolution)
        rows = []
        for x, y in points:
            dev = abs(eval_fn(approx, x, y) - float(rhs(x, y)))
            rows.append((x, y, int(n), dev))
        return rows

    return [row for block in ordered_map(one_n, list(n_list)) for row in block]


def probe_table_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y", "n", "deviation"])
    for x, y, n, dev in rows:
        writer.writerow([f"{x:.17g}", f"{y:.17g}", n, f"{dev:.17g}"])
    return buf.getvalue()


def superpose(rhs, g):
    """Values of ``h(x) = f(x, g(x))`` at the nodes of ``g``."""
    return np.asarray(rhs(g.nodes, g.values), dtype=float)


@dataclass
class Decomposition:
    """Sample indices split by where ``g`` lands on the step grid.

    ``on_breakpoint[k]`` collects samples with ``g(x) = a_k``,
    ``in_interval[k]`` those with ``g(x)`` in ``(a_k, a_{k+1})``.
    """

    samples: np.ndarray
    on_breakpoint: dict
    in_interval: dict

    def classes(self):
        for k, idx in sorted(self.on_breakpoint.items()):
            yield ("A", k, idx)
        for k, idx in sorted(self.in_interval.items()):
            yield ("B", k, idx)


def decompose_sets(approx, g, samples):
    """Partition ``samples`` into the classes ``g = a_k`` and ``g in I_k``."""
    samples = np.asarray(samples, dtype=float)
    if samples.size and (samples[0] < g.partition.a or samples[-1] > g.partition.b):
        raise DomainError("samples must lie inside the domain of g")
    on_break, in_int = {}, {}
    for i, y in enumerate(np.atleast_1d(g(samples))):
        k, exact = approx.grid.locate(float(y))
        (on_break if exact else in_int).setdefault(k, []).append(i)
    wrap = lambda d: {k: np.array(v, dtype=int) for k, v in d.items()}
    return Decomposition(samples, wrap(on_break), wrap(in_int))
