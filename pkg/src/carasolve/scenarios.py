"""Scripted reproductions of the two non-existence examples and the positive cases.

A numerical run cannot prove that no solution exists.  What it can do is
take concrete candidate trajectories (Euler paths, their pointwise limits,
hand-built ramps), measure their integral residual, and for the
``sin(pi/y)`` example exhibit the band crossings where the increment of the
candidate provably exceeds the integral of ``f`` along it.  Every lower bound
reported here is computed by quadrature on the reported interval.
"""

from dataclasses import asdict, dataclass, field
import numpy as np

from ._workers import ordered_map
from .oracles import exact_solution
from .quadrature import DEFAULT_TOL, GridFunction, Partition, composed, integrate
from .rhs import CauchyProblem, builtin_rhs, make_problem
from .solver import SolveOptions, euler, residual, solve_maximal

__all__ = [
    "BandEvent",
    "CandidateReport",
    "NonexistenceReport",
    "PositiveReport",
    "POSITIVE_DEFAULTS",
    "demo_sign",
    "demo_sin",
    "demo_positive",
    "find_band_events",
    "zero_set_components",
]

DEFAULT_STEPS = (1e-1, 1e-2, 1e-3, 1e-4)
_LIMIT_CELLS = 2000


@dataclass
class BandEvent:
    n0: int
    a: float
    b: float
    y_a: float
    y_b: float
    integral: float
    integral_err: float
    defect: float
    bound: float

    @property
    def holds(self):
        # increment of y beats the (non-positive) integral by at least the band width
        slack = 1e-9 + self.integral_err
        return self.integral <= slack and self.defect >= self.bound - slack


@dataclass
class CandidateReport:
    label: str
    h: float
    sup_residual: float
    argmax_x: float
    quad_err: float
    exceeds_zero: bool = True
    confined: bool = None
    band_events: list = field(default_factory=list)
    residual_lower_bound: float = 0.0
    zero_set: dict = None
    trajectory: GridFunction = field(default=None, repr=False)

    def to_dict(self):
        out = asdict(self)
        out.pop("trajectory")
        out["band_events"] = [asdict(e) for e in self.band_events]
        return out


@dataclass
class NonexistenceReport:
    rhs_name: str
    interval: tuple
    x0: float
    y0: float
    step_sizes: list
    candidates: list
    euler_limit_deviation: float
    verdict: str
    checks: dict

    @property
    def residual_by_candidate(self):
        return [(c.label, c.sup_residual) for c in self.candidates]

    @property
    def band_events(self):
        return [(e.a, e.b, e.n0) for c in self.candidates for e in c.band_events]

    @property
    def ok(self):
        return all(self.checks.values())

    def to_dict(self):
        return {
            "rhs_name": self.rhs_name,
            "interval": list(self.interval),
            "x0": self.x0,
            "y0": self.y0,
            "step_sizes": list(self.step_sizes),
            "euler_limit_deviation": self.euler_limit_deviation,
            "residual_by_candidate": [list(p) for p in self.residual_by_candidate],
            "candidates": [c.to_dict() for c in self.candidates],
            "checks": dict(self.checks),
            "verdict": self.verdict,
        }


def zero_set_components(y, keep=5):
    """Summary of ``G = {y != 0}`` as maximal runs of non-zero nodes.

    Returns the component count and the first ``keep`` components as
    ``(a_s, b_s)`` node pairs bracketing each run.
    """
    nz = y.values != 0
    comps = []
    j = 0
    n = nz.size
    while j < n:
        if nz[j]:
            k = j
            while k + 1 < n and nz[k + 1]:
                k += 1
            comps.append((float(y.nodes[max(j - 1, 0)]), float(y.nodes[min(k + 1, n - 1)])))
            j = k + 1
        else:
            j += 1
    return {"count": len(comps), "first": [list(c) for c in comps[:keep]]}


def _candidate(problem, label, y, h=0.0, quad_tol=DEFAULT_TOL):
    rep = residual(problem, y, quad_tol)
    return CandidateReport(label=label, h=float(h), sup_residual=rep.sup_residual,
                           argmax_x=rep.argmax_x, quad_err=rep.quad_err,
                           exceeds_zero=bool(np.max(y.values) > 0), trajectory=y)


# --- sign example ---------------------------------------------------------

def _sign_limit(problem, cells=_LIMIT_CELLS):
    """Pointwise limit of Euler paths: slide to 0 at unit speed, then stay."""
    x0, y0 = problem.a, problem.y0
    hit = x0 + abs(y0)
    nodes = np.linspace(problem.a, problem.b, cells + 1)
    if problem.a < hit < problem.b:
        nodes = np.union1d(nodes, [hit])
    vals = np.sign(y0) * np.maximum(abs(y0) - (nodes - x0), 0.0)
    return GridFunction(Partition(nodes), vals)


def demo_sign(length=1.0, steps=DEFAULT_STEPS, x0=0.0, y0=0.0, quad_tol=DEFAULT_TOL):
    """Candidates for ``y' = f(y)``, ``f = -1 on y > 0, +1 on y <= 0``."""
    steps = [float(h) for h in steps]
    if length < 0:
        raise ValueError("length must be non-negative")
    if length == 0:
        cands = [CandidateReport(f"euler h={h:g}", h, 0.0, x0, 0.0, False, True) for h in steps]
        cands.append(CandidateReport("limit", 0.0, 0.0, x0, 0.0, False, None))
        return NonexistenceReport("grande_sign", (x0, x0), x0, y0, steps, cands, 0.0,
                                  "vacuous: empty interval", {"residuals_nonnegative": True})
    rhs = builtin_rhs("grande_sign")
    problem = CauchyProblem(rhs, x0, x0 + length, y0)

    def run(h):
        y = euler(problem, h)
        cand = _candidate(problem, f"euler h={h:g}", y, h, quad_tol)
        if y0 == 0:
            tail = y.values[1:]
            cand.confined = bool(np.all((tail >= 0.0) & (tail <= h)))
        cand.zero_set = zero_set_components(y)
        return cand

    cands = ordered_map(run, steps)
    limit = _sign_limit(problem)
    lim = _candidate(problem, "limit", limit, 0.0, quad_tol)
    lim.zero_set = zero_set_components(limit)
    cands.append(lim)

    dev = 0.0
    if steps:
        finest = cands[int(np.argmin(steps))].trajectory
        dev = float(np.max(np.abs(finest.values - _sign_limit_values(problem, finest.nodes))))

    expected_limit = max(length - abs(y0), 0.0)
    euler_res = [c.sup_residual for c in cands[:-1]]
    checks = {
        "residuals_nonnegative": all(c.sup_residual >= 0 for c in cands),
        "limit_residual_matches": abs(lim.sup_residual - expected_limit) <= 1e-6 + lim.quad_err,
    }
    if y0 == 0:
        checks["euler_confined"] = all(c.confined for c in cands[:-1])
        checks["euler_residual_floor"] = bool(euler_res) and min(euler_res) >= 0.49
    floor = min(euler_res + [lim.sup_residual])
    verdict = (
        f"no candidate in the tested family is a solution; residual >= {floor:.6g}"
        if floor > 0 else "some candidate has zero residual on this window"
    )
    return NonexistenceReport("grande_sign", (problem.a, problem.b), x0, y0, steps, cands,
                              dev, verdict, checks)


def _sign_limit_values(problem, nodes):
    y0 = problem.y0
    return np.sign(y0) * np.maximum(abs(y0) - (nodes - problem.a), 0.0)


# --- sin(pi/y) example ----------------------------------------------------

def _crossing(x0, x1, y0, y1, level):
    if y1 == y0:
        return float(x0)
    return float(x0 + (level - y0) / (y1 - y0) * (x1 - x0))


def find_band_events(rhs, y, n0_max, quad_tol=DEFAULT_TOL):
    """Band crossings of a candidate ``y`` for ``n0 = 1 .. n0_max``.

    For the band ``(1/(2 n0), 1/(2 n0 - 1))`` pick the first node ``x0`` with
    ``y(x0)`` above the band, the last crossing ``a`` of the lower level before
    it and the first crossing ``b`` of the upper level after ``a`` (linear
    interpolation between nodes).  On ``(a, b)`` the candidate stays in the
    band, where ``sin(pi/y) < 0``.
    """
    xs, ys = y.nodes, y.values
    events = []
    integrand = composed(rhs, y)
    for n0 in range(1, int(n0_max) + 1):
        lo, hi = 1.0 / (2 * n0), 1.0 / (2 * n0 - 1)
        above = np.nonzero(ys > hi)[0]
        if above.size == 0:
            continue
        top = int(above[0])
        below = np.nonzero(ys[:top] <= lo)[0]
        if below.size == 0:
            continue
        i = int(below[-1])
        a = _crossing(xs[i], xs[i + 1], ys[i], ys[i + 1], lo)
        j = i + 1 + int(np.nonzero(ys[i + 1: top + 1] >= hi)[0][0])
        b = _crossing(xs[j - 1], xs[j], ys[j - 1], ys[j], hi)
        val, err = integrate(integrand, a, b, quad_tol)
        y_a, y_b = float(y(a)), float(y(b))
        events.append(BandEvent(n0, a, b, y_a, y_b, val, err, (y_b - y_a) - val,
                                1.0 / (2 * n0 * (2 * n0 - 1))))
    return events


def demo_sin(length=2.0, n0_max=1000, steps=(1e-1, 1e-2, 1e-3), quad_tol=DEFAULT_TOL):
    """Candidates for ``y' = f(y)``, ``f = 1 on y <= 0, sin(pi/y) on y > 0``.

    Besides Euler paths the family holds the ramp ``y = x`` (what the ``y <= 0``
    branch forces), the ramp stopped at the rest point ``1/2``, and the zero
    function.
    """
    if not length > 0:
        raise ValueError("length must be positive")
    steps = [float(h) for h in steps]
    rhs = builtin_rhs("grande_sin")
    problem = CauchyProblem(rhs, 0.0, float(length), 0.0)
    fixed = Partition(np.linspace(0.0, length, _LIMIT_CELLS + 1))
    shapes = [
        ("ramp", lambda x: np.asarray(x, dtype=float)),
        ("ramp_plateau", lambda x: np.minimum(x, 0.5)),
        ("limit", lambda x: np.zeros(np.shape(x))),
    ]

    def run(item):
        label, h, y = item
        cand = _candidate(problem, label, y, h, quad_tol)
        cand.band_events = find_band_events(rhs, y, n0_max, quad_tol)
        if cand.band_events:
            cand.residual_lower_bound = max(e.defect for e in cand.band_events) / 2.0
        return cand

    items = [(f"euler h={h:g}", h, euler(problem, h)) for h in steps]
    items += [(label, 0.0, GridFunction.from_callable(fixed, fn)) for label, fn in shapes]
    cands = ordered_map(run, items)

    dev = 0.0
    if steps:
        dev = float(np.max(np.abs(cands[int(np.argmin(steps))].trajectory.values)))

    moving = [c for c in cands if c.label != "limit"]
    events = [e for c in cands for e in c.band_events]
    checks = {
        "residuals_nonnegative": all(c.sup_residual >= 0 for c in cands),
        "candidates_exceed_zero": all(c.exceeds_zero for c in moving),
        "band_events_hold": all(e.holds for e in events),
        "band_events_inside": all(_stays_in_band(c.trajectory, e) for c in cands
                                  for e in c.band_events),
        "residual_bounds_met": all(c.sup_residual >= c.residual_lower_bound - 1e-9
                                   for c in cands),
    }
    trapped = [c.label for c in moving if not c.band_events]
    if trapped:
        verdict = ("trajectory trapped below bands for " + ", ".join(trapped)
                   + "; other candidates carry band-crossing residual bounds")
    else:
        floor = min(c.residual_lower_bound if c.band_events else c.sup_residual for c in cands)
        verdict = f"no candidate in the tested family is a solution; residual >= {floor:.6g}"
    return NonexistenceReport("grande_sin", (0.0, float(length)), 0.0, 0.0, steps, cands,
                              dev, verdict, checks)


def _stays_in_band(y, event, tol=1e-9):
    inner = y.nodes[(y.nodes > event.a) & (y.nodes < event.b)]
    pts = np.concatenate([[event.a, event.b], inner])
    vals = np.atleast_1d(y(pts))
    lo, hi = 1.0 / (2 * event.n0), 1.0 / (2 * event.n0 - 1)
    return bool(np.all((vals >= lo - tol) & (vals <= hi + tol)))


# --- positive examples ----------------------------------------------------

POSITIVE_DEFAULTS = {
    "floor": {"params": (), "a": 0.0, "b": 11.0 / 6.0, "y0": 1.0, "grid": 16384},
    "sqrt_plus": {"params": (), "a": 0.0, "b": 1.0, "y0": 0.0, "grid": 4096},
    "const": {"params": (1.0,), "a": 0.0, "b": 1.0, "y0": 0.0, "grid": 1024},
    "linear": {"params": (), "a": 0.0, "b": 1.0, "y0": 1.0, "grid": 8192},
}


@dataclass
class PositiveReport:
    name: str
    params: tuple
    interval: tuple
    y0: float
    result: object
    max_dev_maximal: float
    max_dev_minimal: float

    @property
    def ok(self):
        return self.result.certified

    def to_dict(self):
        return {
            "name": self.name,
            "params": list(self.params),
            "interval": list(self.interval),
            "y0": self.y0,
            "max_dev_maximal": self.max_dev_maximal,
            "max_dev_minimal": self.max_dev_minimal,
            "solve": self.result.to_dict(),
        }


def demo_positive(name, params=None, a=None, b=None, y0=None, grid=None, opts=None):
    """Maximal and minimal solves for an increasing builtin, against its oracle."""
    if name not in POSITIVE_DEFAULTS:
        raise ValueError(f"demo_positive supports {sorted(POSITIVE_DEFAULTS)}, not {name!r}")
    d = POSITIVE_DEFAULTS[name]
    params = tuple(d["params"] if params is None else params)
    a = d["a"] if a is None else float(a)
    b = d["b"] if b is None else float(b)
    y0 = d["y0"] if y0 is None else float(y0)
    grid = d["grid"] if grid is None else int(grid)
    problem = make_problem(name, params, a, b, y0)
    part = Partition.uniform(a, b, grid)
    result = solve_maximal(problem, part, opts or SolveOptions(), with_minimal=True)
    top = exact_solution(name, params, a, y0, b, "maximal")(part.nodes)
    bottom = exact_solution(name, params, a, y0, b, "minimal")(part.nodes)
    return PositiveReport(
        name, params, (a, b), y0, result,
        float(np.max(np.abs(result.z0.values - top))),
        float(np.max(np.abs(result.minimal.values - bottom))),
    )
