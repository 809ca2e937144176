import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posswitch import (
    MonotoneObjective,
    NegativeInput,
    NoDominantMatrix,
    NonPositiveVector,
    exhaustive_extremum,
    exhaustive_products,
    greedy_trajectory,
    make_explicit,
    make_iru,
    nu_eval,
    stabilizing_sequence,
)
from posswitch.oracle import propagate

from conftest import NONH_A2, RUNNING_ROWS, random_iru

NUS = ("l1", "l2", "linf")


@pytest.mark.parametrize("kind, x, value", [
    ("l1", [1, 2, 3], 6.0),
    ("linf", [1, 2, 3], 3.0),
    ("l2", [3, 4], 5.0),
])
def test_nu_values(kind, x, value):
    assert nu_eval(kind, x) == value
    assert MonotoneObjective(kind)(x) == value


def test_nu_weighted_and_errors():
    w = MonotoneObjective("weighted", (1.0, 2.0))
    assert w([1, 1]) == 3.0 and w.strict
    assert not MonotoneObjective("linf").strict
    with pytest.raises(NegativeInput):
        nu_eval("l1", [1, -1])
    with pytest.raises(ValueError):
        MonotoneObjective("weighted", (1.0, 0.0))
    with pytest.raises(ValueError):
        MonotoneObjective("median")


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(1, 6))
def test_nu_monotone(seed, n):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 5, size=n)
    y = x + rng.uniform(0, 1, size=n) * (rng.uniform(size=n) < 0.5)
    for kind in NUS:
        assert nu_eval(kind, y) >= nu_eval(kind, x)
    if np.any(y > x):
        assert nu_eval("l1", y) > nu_eval("l1", x)
        assert nu_eval("l2", y) > nu_eval("l2", x)


def test_singleton_powers(rng):
    A = rng.uniform(0.1, 1, size=(3, 3))
    x0 = np.array([1.0, 0.5, 2.0])
    res = greedy_trajectory(make_explicit([A]), x0, 5)
    for k in range(6):
        np.testing.assert_allclose(res.states[k], np.linalg.matrix_power(A, k) @ x0,
                                   rtol=1e-12)
    assert res.chosen == [0] * 5


@pytest.mark.parametrize("direction", ["max", "min"])
def test_running_example_matches_oracle(direction):
    S = make_iru(RUNNING_ROWS)
    res = greedy_trajectory(S, [1, 1], 6, direction)
    for nu in NUS:
        ex = exhaustive_extremum(S, [1, 1], 6, nu, direction)
        assert ex.examined == 4**6
        assert res.nu[nu][-1] == pytest.approx(ex.value, rel=1e-9)


def test_states_chain_and_passes(rng):
    S = random_iru(rng, sizes=(2, 2, 2))
    x0 = rng.uniform(0.5, 2, size=3)
    res = greedy_trajectory(S, x0, 7)
    assert res.selection_passes == 7
    np.testing.assert_allclose(res.states, propagate(S, res.chosen, x0), rtol=1e-12)
    assert res.evaluations == 3 * 8
    assert res.evaluations <= (S.cardinality() + 1) * 7


def test_objectives_are_not_consulted_during_construction(rng):
    S = random_iru(rng, sizes=(2, 3, 2))
    x0 = rng.uniform(0.5, 2, size=3)
    bare = greedy_trajectory(S, x0, 5, objectives=())
    assert bare.evaluations == 0 and bare.nu == {}
    for nu in NUS:
        assert greedy_trajectory(S, x0, 5, objectives=(nu,)).chosen == bare.chosen


def test_normalization_keeps_choices(rng):
    S = random_iru(rng, sizes=(2, 2, 2), low=1.0, high=3.0)
    x0 = rng.uniform(0.5, 2, size=3)
    raw = greedy_trajectory(S, x0, 40)
    norm = greedy_trajectory(S, x0, 40, normalize=True)
    assert raw.chosen == norm.chosen
    np.testing.assert_allclose(norm.states.sum(axis=1)[1:], 1.0, rtol=1e-12)
    np.testing.assert_allclose(norm.raw_states(), raw.states, rtol=1e-10)
    for nu in NUS:
        np.testing.assert_allclose(norm.nu[nu], raw.nu[nu], rtol=1e-10)


def test_greedy_final_state_dominates_every_sequence(rng):
    S = random_iru(rng, sizes=(2, 2, 2))
    x0 = rng.uniform(0.5, 2, size=3)
    hi = greedy_trajectory(S, x0, 4, "max").states[-1]
    lo = greedy_trajectory(S, x0, 4, "min").states[-1]
    for P, _ in exhaustive_products(S, 4):
        y = P @ x0
        assert np.all(y <= hi + 1e-9 * hi)
        assert np.all(y >= lo - 1e-9 * lo)


def test_input_errors():
    S = make_iru(RUNNING_ROWS)
    with pytest.raises(NonPositiveVector):
        greedy_trajectory(S, [0, 1], 3)
    with pytest.raises(ValueError):
        greedy_trajectory(S, [1, 1], 0)
    with pytest.raises(ValueError):
        greedy_trajectory(S, [1, 1], 2, direction="up")


def test_nonh_reports_state():
    with pytest.raises(NoDominantMatrix) as info:
        greedy_trajectory(make_explicit(NONH_A2), [1, 1], 3)
    assert info.value.step == 0
    assert info.value.state.tolist() == [1.0, 1.0]


def test_stabilizing_singleton():
    A = 0.45 * np.ones((2, 2))
    res = stabilizing_sequence(make_explicit([A]), [1.0, 3.0], 30)
    assert abs(res.decay_rate - 0.9) < 0.05
    assert res.stabilizable and res.rho_min == pytest.approx(0.9, rel=1e-12)


def test_stabilizing_unstable_singleton():
    res = stabilizing_sequence(make_explicit([np.ones((2, 2))]), [1.0, 1.0], 10)
    assert res.nu["l1"][-1] > res.nu["l1"][0]
    assert not res.stabilizable


def test_stabilizing_scaled_iru():
    from posswitch import rho_extrema, scale
    rng = np.random.default_rng(8)
    S = random_iru(rng, sizes=(2, 3, 2))
    S = scale(0.5 / rho_extrema(S).rho_min, S)
    res = stabilizing_sequence(S, rng.uniform(0.5, 2, size=3), 20)
    assert abs(res.decay_rate - 0.5) <= 0.1
    norm = stabilizing_sequence(S, res.states[0], 20, normalize=True)
    assert norm.decay_rate == pytest.approx(res.decay_rate, rel=1e-10)


def test_to_dict_round_numbers(rng):
    S = random_iru(rng, sizes=(2, 2, 2))
    d = greedy_trajectory(S, [1, 1, 1], 3).to_dict()
    assert d["steps"] == 3 and len(d["states"]) == 4 and len(d["choices"]) == 3
    assert set(d["nu"]) == set(NUS)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(1, 5))
def test_greedy_matches_oracle_property(seed, n):
    rng = np.random.default_rng(seed)
    S = random_iru(rng, sizes=(2, 2, 2))
    x0 = rng.uniform(0.1, 3, size=3)
    for direction in ("max", "min"):
        res = greedy_trajectory(S, x0, n, direction)
        for nu in NUS:
            ex = exhaustive_extremum(S, x0, n, nu, direction)
            assert res.nu[nu][-1] == pytest.approx(ex.value, rel=1e-9)
