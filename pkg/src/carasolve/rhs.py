"""Right-hand sides f(x, y) with declared section properties.

An :class:`Rhs` bundles a vectorised evaluator with the analytic facts the
solver relies on: upper semicontinuity, quasicontinuity and monotonicity of
the vertical sections ``y -> f(x, y)``, measurability of the horizontal
sections, a dominating function ``phi`` with ``|f(x, y)| <= phi(x)``, and a
sampler for a countable dense set ``B`` of ordinates.

Flags are declared by whoever builds the object.  They cannot be inferred from
point evaluations; :func:`probe_section_properties` only looks for evidence
against them.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "SectionProps",
    "Rhs",
    "CauchyProblem",
    "ProbeReport",
    "BUILTIN_NAMES",
    "builtin_rhs",
    "make_problem",
    "dyadic_sampler",
    "probe_section_properties",
]


@dataclass(frozen=True)
class SectionProps:
    y_usc: bool
    y_quasicontinuous: bool
    y_increasing: bool
    x_measurable: bool = True
    y_darboux: bool = False


def dyadic_sampler(lo, hi, count):
    """Ascending dyadic rationals strictly inside ``(lo, hi)``.

    The coarsest dyadic level holding at least ``count`` points is used and
    every point of that level in the open interval is returned, so the result
    may be longer than ``count``.
    """
    lo = float(lo)
    hi = float(hi)
    if not hi > lo:
        return np.empty(0)
    count = max(int(count), 1)
    # first guess for the level, then walk up until enough points fit
    level = max(0, int(math.ceil(math.log2((count + 1) / (hi - lo)))))
    while True:
        if level > 1000:
            raise ConfigurationError(f"interval ({lo}, {hi}) too narrow for dyadic sampling")
        scale = 2.0 ** level
        k_lo = math.floor(lo * scale) + 1
        k_hi = math.ceil(hi * scale) - 1
        if k_hi - k_lo + 1 >= count:
            k = np.arange(k_lo, k_hi + 1, dtype=float)
            pts = np.ldexp(k, -level)
            return pts[(pts > lo) & (pts < hi)]
        level += 1


def _unbounded_range(x):
    x = np.asarray(x, dtype=float)
    return np.full_like(x, -np.inf), np.full_like(x, np.inf)


@dataclass(frozen=True)
class Rhs:
    """Descriptor of a right-hand side ``f(x, y)``.

    ``func`` and ``phi`` must accept numpy arrays and broadcast.  ``y_range``
    returns the ordinate band on which ``|f| <= phi`` is promised; for bounded
    functions that is the whole line.  ``anchor`` is the ``(a, y0)`` pair a
    growth-dependent ``phi`` was sized for, or ``None``.
    """

    name: str
    func: Callable
    props: SectionProps
    phi: Callable
    dense_sampler: Callable = dyadic_sampler
    full_measure_note: str = "sections are regular for every x"
    params: tuple = ()
    anchor: Optional[tuple] = None
    y_range: Callable = field(default=_unbounded_range, repr=False)

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        out = np.asarray(self.func(x, y), dtype=float)
        out = np.broadcast_to(out, x.shape)
        if out.ndim == 0:
            return float(out)
        return out

    def bound(self, x):
        out = np.broadcast_to(np.asarray(self.phi(np.asarray(x, dtype=float)), dtype=float),
                              np.shape(x))
        if out.ndim == 0:
            return float(out)
        return out

    @property
    def label(self):
        if not self.params:
            return self.name
        return f"{self.name}({', '.join(repr(p) for p in self.params)})"


@dataclass(frozen=True)
class CauchyProblem:
    """``y' = f(x, y)`` on ``[a, b]`` with ``y(a) = y0``, read in integral form."""

    rhs: Rhs
    a: float
    b: float
    y0: float

    def __post_init__(self):
        for name in ("a", "b", "y0"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigurationError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, float(value))
        if not self.a < self.b:
            raise ConfigurationError(f"need a < b, got [{self.a}, {self.b}]")
        if self.rhs.anchor is not None and tuple(self.rhs.anchor) != (self.a, self.y0):
            raise ConfigurationError(
                f"{self.rhs.name}: dominating function was sized for (a, y0) = "
                f"{self.rhs.anchor}, problem has ({self.a}, {self.y0})"
            )


# --- builtins -------------------------------------------------------------

def _grande_sign(x, y):
    return np.where(y > 0, -1.0, 1.0)


def _grande_sin(x, y):
    pos = y > 0
    safe = np.where(pos, y, 1.0)
    return np.where(pos, np.sin(np.pi / safe), 1.0)


def _floor(x, y):
    return np.floor(y)


def _sqrt_plus(x, y):
    return 2.0 * np.sqrt(np.maximum(y, 0.0))


def _linear(x, y):
    return np.asarray(y, dtype=float)


def _growth_bound(anchor):
    """phi(x) = C exp|x - a| with C = 1 + |y0|.

    Inside the band ``|y - y0| <= C (exp|x - a| - 1)`` this dominates
    ``|floor(y)|``, ``|y|`` and ``2 sqrt(y+)``; the last one because
    ``4 (u - 1) <= u**2`` for every ``u``.
    """
    a, y0 = float(anchor[0]), float(anchor[1])
    c = 1.0 + abs(y0)

    def phi(x):
        return c * np.exp(np.abs(np.asarray(x, dtype=float) - a))

    def y_range(x):
        spread = c * np.expm1(np.abs(np.asarray(x, dtype=float) - a))
        return y0 - spread, y0 + spread

    return phi, y_range


BUILTIN_NAMES = ("grande_sign", "grande_sin", "const", "floor", "sqrt_plus", "linear")


def builtin_rhs(name, params=(), anchor=(0.0, 0.0)):
    """Return one of the shipped right-hand sides.

    ``floor``, ``sqrt_plus`` and ``linear`` are unbounded in ``y``; their
    dominating function depends on the initial point, given as
    ``anchor=(a, y0)``, and only holds on the band reachable from it.
    """
    params = tuple(float(p) for p in (params or ()))
    if name not in BUILTIN_NAMES:
        raise ConfigurationError(
            f"unknown right-hand side {name!r}; choose from {', '.join(BUILTIN_NAMES)}"
        )
    if name == "const":
        if len(params) > 1:
            raise ConfigurationError("const takes at most one parameter (the value c)")
        c = params[0] if params else 0.0
        if not math.isfinite(c):
            raise ConfigurationError("const value must be finite")
        bound = max(abs(c), 1.0)
        return Rhs(
            name="const",
            func=lambda x, y: np.full(np.shape(y), c),
            props=SectionProps(True, True, True, True, True),
            phi=lambda x: np.full(np.shape(x), bound),
            params=(c,),
        )
    if params:
        raise ConfigurationError(f"{name} takes no parameters, got {params}")
    if name == "grande_sign":
        return Rhs(
            name=name,
            func=_grande_sign,
            props=SectionProps(True, True, False, True, False),
            phi=lambda x: np.ones(np.shape(x)),
        )
    if name == "grande_sin":
        return Rhs(
            name=name,
            func=_grande_sin,
            props=SectionProps(True, True, False, True, True),
            phi=lambda x: np.ones(np.shape(x)),
        )
    anchor = (float(anchor[0]), float(anchor[1]))
    phi, y_range = _growth_bound(anchor)
    table = {
        "floor": (_floor, SectionProps(True, True, True, True, False)),
        "sqrt_plus": (_sqrt_plus, SectionProps(True, True, True, True, True)),
        "linear": (_linear, SectionProps(True, True, True, True, True)),
    }
    func, props = table[name]
    return Rhs(name=name, func=func, props=props, phi=phi, anchor=anchor, y_range=y_range)


def make_problem(name, params=(), a=0.0, b=1.0, y0=0.0):
    """Builtin right-hand side plus interval and initial value."""
    return CauchyProblem(builtin_rhs(name, params, anchor=(a, y0)), a, b, y0)


# --- heuristic probe ------------------------------------------------------

@dataclass
class ProbeReport:
    x: float
    eps: float
    usc_violations: list = field(default_factory=list)
    monotone_violations: list = field(default_factory=list)
    domination_violations: list = field(default_factory=list)

    @property
    def clean(self):
        return not (self.usc_violations or self.monotone_violations
                    or self.domination_violations)


def probe_section_properties(rhs, x, grid, eps=1e-9, depth=40):
    """Look for numerical evidence against the declared flags of ``rhs``.

    At each grid point the one-sided cluster values are estimated from points
    approaching it geometrically (``depth`` halvings of the smallest adjacent
    gap); the deepest half of those samples stands in for the limsup.  A
    clean report proves nothing.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3:
        raise ConfigurationError("probe grid needs at least 3 points")
    if np.any(np.diff(grid) <= 0):
        raise ConfigurationError("probe grid must be strictly ascending")
    if eps <= 0:
        raise ConfigurationError("eps must be positive")
    report = ProbeReport(x=float(x), eps=float(eps))
    vals = rhs(np.full_like(grid, x), grid)

    gaps = np.diff(grid)
    near = np.minimum(np.r_[gaps[0], gaps], np.r_[gaps, gaps[-1]])
    offsets = np.ldexp(1.0, -np.arange(1, depth + 1))
    tail = offsets[depth // 2:]
    for y, g, v in zip(grid, near, vals):
        steps = g * tail
        side = np.concatenate([y - steps, y + steps])
        cluster = float(np.max(rhs(np.full_like(side, x), side)))
        if cluster > v + eps:
            report.usc_violations.append((float(y), cluster, float(v)))

    drops = np.nonzero(vals[:-1] > vals[1:] + eps)[0]
    report.monotone_violations = [(float(grid[i]), float(grid[i + 1])) for i in drops]

    lo, hi = rhs.y_range(np.full_like(grid, x))
    bound = rhs.bound(np.full_like(grid, x))
    inside = (grid >= lo) & (grid <= hi)
    over = inside & (np.abs(vals) > bound + eps)
    report.domination_violations = [
        (float(y), float(v), float(b)) for y, v, b in zip(grid[over], vals[over], bound[over])
    ]
    return report
