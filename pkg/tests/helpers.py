"""Shared generators for the test suite."""

import numpy as np

from carasolve import GridFunction, Partition, cumulative, make_problem, picard_map, witness

INCREASING = ("const", "floor", "sqrt_plus", "linear")

# (params, a, b, y0) per increasing builtin
PROBLEMS = {
    "const": ((1.0,), 0.0, 1.0, 0.0),
    "floor": ((), 0.0, 11.0 / 6.0, 1.0),
    "sqrt_plus": ((), 0.0, 1.0, 0.0),
    "linear": ((), 0.0, 1.0, 1.0),
}


def problem_for(name):
    params, a, b, y0 = PROBLEMS[name]
    return make_problem(name, params, a, b, y0)


def random_member(problem, partition, rng, picard_steps=None):
    """A random sub-solution for an increasing right-hand side.

    ``s = y0 + int psi`` with ``-phi <= psi <= f(t, w(t))`` lies above the
    witness ``w``; monotonicity of ``f`` then gives ``s' = psi <= f(t, s)``.
    A few Picard steps keep it a sub-solution.
    """
    w = witness(problem, partition)
    nodes = partition.nodes
    k = int(rng.integers(1, 9))
    cuts = np.sort(rng.uniform(problem.a, problem.b, k - 1))
    weights = rng.uniform(0.0, 1.0, k)
    rhs = problem.rhs

    def psi(t):
        u = weights[np.searchsorted(cuts, t)]
        low = -rhs.bound(t)
        top = rhs.func(t, np.interp(t, nodes, w.values))
        return low + u * (top - low)

    z = GridFunction(partition, problem.y0 + cumulative(psi, partition).values)
    steps = int(rng.integers(0, 4)) if picard_steps is None else picard_steps
    for _ in range(steps):
        z = GridFunction(partition, picard_map(problem, z).values)
    return z


def random_grid_function(rng, m, y0=0.0, a=0.0, b=1.0, scale=1.0):
    nodes = np.sort(np.concatenate([[a, b], rng.uniform(a, b, m - 1)]))
    nodes = np.unique(nodes)
    vals = y0 + np.concatenate([[0.0], np.cumsum(rng.normal(0, scale, nodes.size - 1))])
    return GridFunction(Partition(nodes), vals)
