"""Membership tests for integral sub-solutions.

A grid function ``z`` with ``z(a) = y0`` is a sub-solution when

    z(x2) - z(x1) <= int_{x1}^{x2} f(t, z(t)) dt    for all a <= x1 <= x2 <= b.

With ``V(x) = int_a^x f(t, z(t)) dt`` this says ``d = z - V`` is
non-increasing, so checking every pair of nodes costs one pass with a running
minimum instead of ``O(m**2)`` comparisons.  The same trick gives the two-sided
increment bound against ``Phi = int phi`` that defines the dominated class.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .errors import PreconditionError, ShapeError
from .quadrature import DEFAULT_TOL, GridFunction, cell_integrals, composed, cumulative

__all__ = [
    "SubsolutionReport",
    "verify_subsolution",
    "verify_cphi",
    "pairwise_margin",
    "fatou_check",
    "join",
    "witness",
    "upper_envelope",
]


@dataclass
class SubsolutionReport:
    is_member: bool
    worst_pair: tuple
    worst_margin: float
    cphi_ok: bool
    cphi_margin: float
    tol: float
    quad_err: float

    def to_dict(self):
        out = asdict(self)
        out["worst_pair"] = list(self.worst_pair)
        return out


def _worst_drop(d):
    """``min over i <= k of d[i] - d[k]`` and the index pair attaining it."""
    running = np.minimum.accumulate(d)
    margins = running - d
    k = int(np.argmin(margins))
    i = int(np.argmin(d[: k + 1]))
    return float(margins[k]), (i, k)


def _worst_rise(s):
    """``min over i <= k of s[k] - s[i]`` and the index pair attaining it."""
    running = np.maximum.accumulate(s)
    margins = s - running
    k = int(np.argmin(margins))
    i = int(np.argmax(s[: k + 1]))
    return float(margins[k]), (i, k)


def pairwise_margin(z_values, v_values):
    """Brute force ``min_{i<=k} (V_k - V_i) - (z_k - z_i)``; O(m**2), for testing."""
    z = np.asarray(z_values, dtype=float)
    v = np.asarray(v_values, dtype=float)
    dz = z[None, :] - z[:, None]
    dv = v[None, :] - v[:, None]
    upper = np.triu(np.ones_like(dz, dtype=bool))
    return float(np.min((dv - dz)[upper]))


def verify_cphi(z, phi, tol=1e-8, quad_tol=DEFAULT_TOL):
    """``|z(x2) - z(x1)| <= int_{x1}^{x2} phi`` on all node pairs.

    Returns ``(ok, margin)``; the margin is the smaller of the two one-sided
    worst slacks and is never positive.
    """
    big_phi = cumulative(phi, z.partition, quad_tol)
    upper, _ = _worst_drop(z.values - big_phi.values)
    lower, _ = _worst_rise(z.values + big_phi.values)
    margin = min(upper, lower)
    return margin >= -(tol + big_phi.err), margin


def verify_subsolution(problem, z, tol=1e-8, quad_tol=DEFAULT_TOL):
    """Check ``z`` against the sub-solution inequality and the phi bound.

    Violations are measured against ``-(tol + accumulated quadrature error)``.
    ``worst_pair`` holds the abscissae ``(x1, x2)`` of the most violated pair.
    """
    if abs(z.values[0] - problem.y0) > tol:
        raise PreconditionError(
            f"z(a) = {z.values[0]!r} differs from y0 = {problem.y0!r} by more than {tol}"
        )
    v = cumulative(composed(problem.rhs, z), z.partition, quad_tol)
    worst, (i, k) = _worst_drop(z.values - v.values)
    cphi_ok, cphi_margin = verify_cphi(z, problem.rhs.bound, tol, quad_tol)
    nodes = z.nodes
    return SubsolutionReport(
        is_member=bool(worst >= -(tol + v.err) and cphi_ok),
        worst_pair=(float(nodes[i]), float(nodes[k])),
        worst_margin=worst,
        cphi_ok=bool(cphi_ok),
        cphi_margin=float(cphi_margin),
        tol=float(tol),
        quad_err=float(v.err),
    )


def witness(problem, partition, quad_tol=DEFAULT_TOL):
    """``w(x) = y0 - int_a^x phi``: always a sub-solution."""
    big_phi = cumulative(problem.rhs.bound, partition, quad_tol)
    return GridFunction(partition, problem.y0 - big_phi.values, big_phi.err)


def upper_envelope(problem, partition, quad_tol=DEFAULT_TOL):
    """``w0(x) = y0 + int_a^x phi``: bounds every sub-solution from above."""
    big_phi = cumulative(problem.rhs.bound, partition, quad_tol)
    return GridFunction(partition, problem.y0 + big_phi.values, big_phi.err)


def fatou_check(rhs, y_seq, y_limit, tol=DEFAULT_TOL, tail=8, bound=1e-2):
    """``int f(x, y_lim(x)) - int limsup_n f(x, y_n(x))`` over the common interval.

    The limsup is replaced by the maximum over the last ``tail`` members of
    ``y_seq``.  ``bound`` is the largest sup-distance between the last member
    and ``y_limit`` still accepted as convergence; ``tol`` is the per-cell
    quadrature tolerance.  Upper semicontinuity of the sections makes the
    returned margin non-negative up to quadrature error.
    """
    y_seq = list(y_seq)
    if not y_seq:
        raise PreconditionError("empty sequence")
    for y in y_seq:
        if y.partition != y_limit.partition:
            raise ShapeError("sequence and limit must share a partition")
    last_dev = y_seq[-1].sup_distance(y_limit)
    if last_dev > bound:
        raise PreconditionError(
            f"sequence has not converged: last deviation {last_dev} > {bound}"
        )
    members = y_seq[-int(tail):]
    nodes = y_limit.nodes

    def envelope(t):
        vals = [rhs.func(t, np.interp(t, nodes, y.values)) for y in members]
        return np.max(np.stack(np.broadcast_arrays(*vals)), axis=0)

    upper, _ = cell_integrals(envelope, nodes, tol)
    limit, _ = cell_integrals(composed(rhs, y_limit), nodes, tol)
    return float(np.sum(limit) - np.sum(upper))


def join(z1, z2):
    """Nodewise maximum of two grid functions that start at the same value.

    This is the gluing step of the uniqueness argument: where ``z1`` lies above
    ``z2`` take ``z1``, elsewhere ``z2``.  The max of two sub-solutions is again
    one.
    """
    if z1.partition != z2.partition:
        raise ShapeError("join needs a common partition")
    if abs(z1.values[0] - z2.values[0]) > 1e-12 * max(1.0, abs(z1.values[0])):
        raise PreconditionError("joined functions must agree at the left endpoint")
    return GridFunction(z1.partition, np.maximum(z1.values, z2.values))
