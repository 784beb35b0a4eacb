"""Closed-form and event-driven reference solutions for the increasing builtins.

These never touch the quadrature or the Picard iteration, which is the point:
they are the independent side of every solver comparison.
"""

import math

import numpy as np

from .errors import ConfigurationError


def floor_breakpoints(a, y0, b):
    """Exact solution of ``y' = floor(y)``, ``y(a) = y0`` as PL breakpoints.

    ``floor`` is right-continuous, so on ``[k, k+1)`` the slope is ``k``.  For
    ``k > 0`` the trajectory climbs to ``k + 1``; for ``k = 0`` it rests; for
    ``k < 0`` it falls, and once it reaches an integer ``k`` it continues with
    slope ``k - 1``.
    """
    xs, ys = [float(a)], [float(y0)]
    x, y = float(a), float(y0)
    while x < b:
        k = math.floor(y)
        if k == 0:
            break
        if k > 0:
            slope, target = k, k + 1.0
        elif y == k:
            slope, target = k - 1, k - 1.0
        else:
            slope, target = k, float(k)
        dx = (target - y) / slope
        if x + dx >= b:
            y = y + slope * (b - x)
            x = float(b)
        else:
            x, y = x + dx, target
        xs.append(x)
        ys.append(y)
    if xs[-1] < b:
        xs.append(float(b))
        ys.append(ys[-1])
    return np.array(xs), np.array(ys)


def exact_solution(name, params=(), a=0.0, y0=0.0, b=None, kind="maximal"):
    """Vectorised reference solution ``x -> y(x)`` for an increasing builtin.

    ``kind`` selects the maximal or minimal solution; they differ only for
    ``sqrt_plus`` started at zero.
    """
    if kind not in ("maximal", "minimal"):
        raise ConfigurationError(f"kind must be 'maximal' or 'minimal', not {kind!r}")
    a = float(a)
    y0 = float(y0)
    if name == "const":
        c = float(params[0]) if params else 0.0
        return lambda x: y0 + c * (np.asarray(x, dtype=float) - a)
    if name == "linear":
        return lambda x: y0 * np.exp(np.asarray(x, dtype=float) - a)
    if name == "sqrt_plus":
        if y0 < 0:
            return lambda x: np.full(np.shape(x), y0)
        if y0 == 0 and kind == "minimal":
            return lambda x: np.zeros(np.shape(x))
        root = math.sqrt(y0)
        return lambda x: (root + (np.asarray(x, dtype=float) - a)) ** 2
    if name == "floor":
        if b is None:
            raise ConfigurationError("floor oracle needs the right endpoint b")
        xs, ys = floor_breakpoints(a, y0, b)
        return lambda x: np.interp(np.asarray(x, dtype=float), xs, ys)
    raise ConfigurationError(f"no reference solution for {name!r}")
