import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from carasolve import (
    BUILTIN_NAMES,
    GridFunction,
    Partition,
    PreconditionError,
    ShapeError,
    builtin_rhs,
    fatou_check,
    join,
    make_problem,
    solve_maximal,
    upper_envelope,
    verify_subsolution,
    witness,
)
from carasolve.quadrature import cumulative
from carasolve.subsolution import pairwise_margin, verify_cphi
from carasolve.solver import SolveOptions, iterate_history

from helpers import INCREASING, PROBLEMS, problem_for, random_grid_function, random_member

PART = Partition.uniform(0.0, 1.0, 64)


def _problem(name):
    if name in PROBLEMS:
        return problem_for(name)
    return make_problem(name, (), 0.0, 1.0, 0.0)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_witness_is_member(name):
    p = _problem(name)
    part = Partition.uniform(p.a, p.b, 200)
    rep = verify_subsolution(p, witness(p, part))
    assert rep.is_member and rep.worst_margin >= -1e-8


def test_exact_const_solution():
    p = make_problem("const", (1.0,), 0.0, 1.0, 0.5)
    rep = verify_subsolution(p, GridFunction(PART, 0.5 + PART.nodes))
    assert rep.is_member and abs(rep.worst_margin) < 1e-12


def test_rising_line_against_zero_rhs():
    p = make_problem("const", (0.0,), 0.0, 1.0, 0.5)
    rep = verify_subsolution(p, GridFunction(PART, 0.5 + PART.nodes))
    assert not rep.is_member
    assert rep.worst_margin == pytest.approx(-1.0)
    assert rep.worst_pair == (0.0, 1.0)


def test_start_value_enforced():
    p = make_problem("const", (0.0,), 0.0, 1.0, 0.0)
    with pytest.raises(PreconditionError):
        verify_subsolution(p, GridFunction(PART, np.ones(65)))


def test_report_serializes():
    p = make_problem("const", (0.0,), 0.0, 1.0, 0.0)
    d = verify_subsolution(p, GridFunction(PART, np.zeros(65))).to_dict()
    assert set(d) >= {"is_member", "worst_pair", "worst_margin", "cphi_ok", "cphi_margin", "tol"}


def test_cphi_examples():
    one = lambda t: np.ones_like(t)
    ok, margin = verify_cphi(GridFunction(PART, np.full(65, 3.0)), one)
    assert ok and margin == 0.0
    ok, margin = verify_cphi(GridFunction(PART, 3.0 + 2 * PART.nodes), one)
    assert not ok and margin == pytest.approx(-1.0)
    p = make_problem("grande_sin", (), 0.0, 1.0, 0.0)
    ok, margin = verify_cphi(upper_envelope(p, PART), p.rhs.bound)
    assert ok and margin == 0.0


@settings(max_examples=200)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(2, 20))
def test_pairwise_reduction_matches_brute_force(seed, m):
    rng = np.random.default_rng(seed)
    z = random_grid_function(rng, m, scale=0.3)
    p = make_problem("grande_sign", (), 0.0, 1.0, 0.0)
    rep = verify_subsolution(p, z, tol=1e-8)
    v = cumulative(lambda t: p.rhs.func(t, z(t)), z.partition)
    assert rep.worst_margin == pytest.approx(pairwise_margin(z.values, v.values), abs=1e-12)


def test_join_examples():
    p = make_problem("const", (0.0,), 0.0, 1.0, 0.0)
    z = GridFunction(PART, -PART.nodes)
    assert np.array_equal(join(z, z).values, z.values)
    w, w0 = witness(p, PART), upper_envelope(p, PART)
    assert np.array_equal(join(w, w0).values, w0.values)
    # 0 and a down-and-back-up path cross; the up leg is not a member on its own
    bent = GridFunction(PART, -np.minimum(PART.nodes, 0.5))
    both = join(GridFunction(PART, np.zeros(65)), bent)
    assert verify_subsolution(p, both).is_member


def test_join_shape_checks():
    z = GridFunction(PART, np.zeros(65))
    with pytest.raises(ShapeError):
        join(z, GridFunction(Partition.uniform(0, 1, 32), np.zeros(33)))
    with pytest.raises(PreconditionError):
        join(z, GridFunction(PART, np.ones(65)))


@pytest.mark.parametrize("name", INCREASING)
def test_join_closure(name):
    rng = np.random.default_rng(INCREASING.index(name))
    p = problem_for(name)
    part = Partition.uniform(p.a, p.b, 128)
    for _ in range(25):
        z1, z2 = random_member(p, part, rng), random_member(p, part, rng)
        assert verify_subsolution(p, z1).is_member and verify_subsolution(p, z2).is_member
        assert verify_subsolution(p, join(z1, z2)).is_member


@pytest.mark.parametrize("name", INCREASING)
def test_members_below_upper_envelope(name):
    rng = np.random.default_rng(3)
    p = problem_for(name)
    part = Partition.uniform(p.a, p.b, 128)
    w0 = upper_envelope(p, part)
    for _ in range(10):
        z = random_member(p, part, rng)
        assert np.all(z.values <= w0.values + 1e-12)


def test_fatou_constant_sequence():
    f = builtin_rhs("floor")
    y = GridFunction(PART, 0.3 + PART.nodes)
    assert fatou_check(f, [y] * 5, y) >= -1e-8


def test_fatou_sign_jump():
    f = builtin_rhs("grande_sign")
    seq = [GridFunction(PART, np.full(65, 1.0 / n)) for n in range(100, 120)]
    margin = fatou_check(f, seq, GridFunction(PART, np.zeros(65)))
    assert margin == pytest.approx(2.0, abs=1e-3)


def test_fatou_linear_continuity():
    f = builtin_rhs("linear")
    seq = [GridFunction(PART, PART.nodes + 2.0 ** -n) for n in range(10, 40)]
    assert fatou_check(f, seq, GridFunction(PART, PART.nodes)) == pytest.approx(0.0, abs=1e-8)


def test_fatou_rejects_divergent_and_mismatched():
    f = builtin_rhs("linear")
    lim = GridFunction(PART, np.zeros(65))
    with pytest.raises(PreconditionError):
        fatou_check(f, [GridFunction(PART, np.ones(65))], lim)
    with pytest.raises(ShapeError):
        fatou_check(f, [GridFunction(Partition.uniform(0, 1, 8), np.zeros(9))], lim)
    with pytest.raises(PreconditionError):
        fatou_check(f, [], lim)


@pytest.mark.parametrize("name", INCREASING)
def test_fatou_on_ascending_iterates(name):
    p = problem_for(name)
    hist = iterate_history(p, Partition.uniform(p.a, p.b, 256), downward=False)
    assert fatou_check(p.rhs, hist, hist[-1]) >= -1e-6
