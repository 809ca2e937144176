import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posswitch import (
    Add,
    BlockGraph,
    CardinalityOverflow,
    DimMismatch,
    Edge,
    MalformedGraph,
    Mul,
    NonPositiveScalar,
    Parallel,
    Ref,
    Scale,
    Series,
    UnboundRef,
    check_hourglass,
    compile_graph,
    enumerate_members,
    eval_poly,
    make_explicit,
    make_iru,
    make_ordered,
    mink_add,
    mink_mul,
    scale,
)
from posswitch.algebra import format_expr
from posswitch.oracle import simulate_graph

from conftest import NONH_A2, random_chain, random_iru

NETWORK = Add(Mul(Ref("A3"), Add(Ref("A1"), Ref("A2"))), Ref("A4"))


def test_add_singletons():
    A, B = NONH_A2
    S = mink_add(make_explicit([A]), make_explicit([B]))
    assert len(S) == 1
    np.testing.assert_array_equal(S.member(0), A + B)


def test_set_plus_itself_is_not_twice_the_set():
    S = make_explicit(NONH_A2)
    doubled = mink_add(S, S)
    assert len(doubled) == 3
    assert len(scale(2, S)) == 2
    got = {m.tobytes() for m in enumerate_members(doubled)}
    A, B = NONH_A2
    assert got == {(2 * A).tobytes(), (A + B).tobytes(), (2 * B).tobytes()}


def test_add_generic_cardinality(rng):
    S = make_explicit(list(rng.uniform(0.1, 1, size=(2, 3, 3))))
    T = make_explicit(list(rng.uniform(0.1, 1, size=(3, 3, 3))))
    assert len(mink_add(S, T)) == 6


def test_mul_nonh_pair():
    A1, A2 = NONH_A2
    P = mink_mul(make_explicit([A1]), make_explicit([A2]))
    M = P.member(0)
    np.testing.assert_array_equal(M, [[20, 10], [10, 5]])
    assert np.trace(M) == 25 and abs(np.linalg.det(M)) < 1e-12


def test_mul_scalars():
    P = mink_mul(make_explicit([[[2]]]), make_explicit([[[3]]]))
    assert P.member(0).tolist() == [[6.0]]


def test_mul_iru_sets(rng):
    S = random_iru(rng, n=2, sizes=(2, 2))
    T = random_iru(rng, n=2, sizes=(2, 2))
    P = mink_mul(S, T)
    assert P.kind == "explicit"
    assert len(P) <= 16
    expected = np.stack([a @ b for a in enumerate_members(S) for b in enumerate_members(T)])
    np.testing.assert_allclose(P.stack(), expected, rtol=1e-12)


def test_dim_errors():
    with pytest.raises(DimMismatch):
        mink_add(make_explicit([np.ones((2, 2))]), make_explicit([np.ones((3, 3))]))
    with pytest.raises(DimMismatch):
        mink_mul(make_explicit([np.ones((2, 3))]), make_explicit([np.ones((2, 3))]))
    P = mink_mul(make_explicit([np.ones((2, 3))]), make_explicit([np.ones((3, 4))]))
    assert P.shape == (2, 4)


def test_pairwise_limit(rng):
    S = random_iru(rng, sizes=(3, 3, 3))
    with pytest.raises(CardinalityOverflow):
        mink_add(S, S, limit=500)


def test_scale():
    S = make_explicit([[[2, 4], [1, 2]]])
    np.testing.assert_array_equal(scale(0.5, S).member(0), [[1, 2], [0.5, 1]])
    np.testing.assert_array_equal(scale(1, S).member(0), S.member(0))
    with pytest.raises(NonPositiveScalar):
        scale(0, S)
    with pytest.raises(NonPositiveScalar):
        scale(-1, S)
    with pytest.raises(NonPositiveScalar):
        Scale(0.0, Ref("A"))


def test_scale_keeps_variant(rng):
    S = random_iru(rng)
    T = scale(3.0, S)
    assert T.kind == "iru" and T.row_set_sizes == S.row_set_sizes
    np.testing.assert_array_equal(T.member(5), 3.0 * S.member(5))
    C = random_chain(rng)
    assert scale(0.5, C).kind == "ordered"


def test_modes_combine():
    P = make_explicit([np.ones((2, 2))])
    N = make_explicit([np.eye(2)], "nonnegative")
    assert mink_add(P, P).mode == "positive"
    assert mink_add(P, N).mode == "nonnegative"
    assert mink_mul(N, P).mode == "nonnegative"


def _network_env(rng, k=2):
    return {
        "A1": random_iru(rng, n=2, sizes=(k, 1)),
        "A2": random_chain(rng, n=2, length=k),
        "A3": random_iru(rng, n=2, sizes=(1, k)),
        "A4": random_chain(rng, n=2, length=k),
    }


def test_network_expression_evaluation(rng):
    env = _network_env(rng)
    R = eval_poly(NETWORK, env)
    expected = set()
    for a1 in enumerate_members(env["A1"]):
        for a2 in enumerate_members(env["A2"]):
            for a3 in enumerate_members(env["A3"]):
                for a4 in enumerate_members(env["A4"]):
                    expected.add((a3 @ (a1 + a2) + a4).tobytes())
    members = enumerate_members(R)
    assert len(members) <= 16
    assert len(members) == len({m.tobytes() for m in members})
    # same matrices up to rounding order: compare sorted stacks
    got = np.sort(np.stack(members).reshape(len(members), -1), axis=0)
    want = np.sort(np.stack([np.frombuffer(b).reshape(2, 2) for b in expected])
                   .reshape(len(expected), -1), axis=0)
    assert got.shape == want.shape
    np.testing.assert_allclose(got, want, rtol=1e-12)
    assert R.structural


def test_singleton_environment_matches_matrix_polynomial(rng):
    mats = {k: rng.uniform(0.1, 1, size=(3, 3)) for k in ("A1", "A2", "A3", "A4")}
    env = {k: make_explicit([m]) for k, m in mats.items()}
    R = eval_poly(NETWORK, env)
    assert len(R) == 1
    np.testing.assert_allclose(
        R.member(0), mats["A3"] @ (mats["A1"] + mats["A2"]) + mats["A4"], rtol=1e-12
    )


def test_eval_errors(rng):
    env = {"A": random_iru(rng, n=2, sizes=(2, 2))}
    with pytest.raises(UnboundRef):
        eval_poly(Add(Ref("A"), Ref("B")), env)
    env["B"] = random_iru(rng, n=3, sizes=(2, 2, 2))
    with pytest.raises(DimMismatch, match="A.*B"):
        eval_poly(Add(Ref("A"), Ref("B")), env)


def test_no_distribution_applied(rng):
    env = {"A": random_iru(rng, n=2, sizes=(2, 2)),
           "B1": random_iru(rng, n=2, sizes=(2, 1)),
           "B2": random_iru(rng, n=2, sizes=(1, 2))}
    lhs = eval_poly(Mul(Ref("A"), Add(Ref("B1"), Ref("B2"))), env)
    rhs = eval_poly(Add(Mul(Ref("A"), Ref("B1")), Mul(Ref("A"), Ref("B2"))), env)
    assert len(lhs) < len(rhs)


def test_format_expr():
    assert format_expr(NETWORK) == "(A3(A1 + A2) + A4)"


# -- graphs -------------------------------------------------------------------


def test_compile_network_graph(rng):
    env = _network_env(rng)
    root = Parallel((Series((Parallel((Edge("A1"), Edge("A2"))), Edge("A3"))), Edge("A4")))
    assert compile_graph(BlockGraph(env, root)) == NETWORK


def test_compile_single_edge(rng):
    assert compile_graph(BlockGraph({"A": random_iru(rng)}, Edge("A"))) == Ref("A")


def test_compile_series_order(rng):
    mats = {f"B{i}": rng.uniform(0.1, 1, size=(2, 2)) for i in (1, 2, 3)}
    env = {k: make_explicit([m]) for k, m in mats.items()}
    root = Series((Edge("B1"), Edge("B2"), Edge("B3")))
    expr = compile_graph(BlockGraph(env, root))
    assert expr == Mul(Ref("B3"), Mul(Ref("B2"), Ref("B1")))
    x = np.array([1.0, 2.0])
    np.testing.assert_allclose(eval_poly(expr, env).member(0) @ x,
                               simulate_graph(root, mats, x), rtol=1e-12)


def test_compile_errors(rng):
    env = {"A": random_iru(rng, n=2, sizes=(2, 2)), "B": random_iru(rng, n=3, sizes=(2, 2, 2))}
    with pytest.raises(DimMismatch, match="A.*B"):
        compile_graph(BlockGraph(env, Series((Edge("A"), Edge("B")))))
    with pytest.raises(DimMismatch, match="A.*B"):
        compile_graph(BlockGraph(env, Parallel((Edge("A"), Edge("B")))))
    with pytest.raises(MalformedGraph):
        compile_graph(BlockGraph(env, Series(())))
    with pytest.raises(MalformedGraph):
        compile_graph(BlockGraph(env, Edge("C")))


def _random_graph(rng, n_in, n_out, depth, blocks):
    """Random series-parallel graph mapping R^n_in to R^n_out."""
    kind = rng.choice(["edge", "series", "parallel"]) if depth > 0 else "edge"
    if kind == "edge":
        name = f"B{len(blocks)}"
        blocks[name] = rng.uniform(0.1, 1.0, size=(n_out, n_in))
        return Edge(name)
    k = int(rng.integers(2, 4))
    if kind == "parallel":
        return Parallel(tuple(_random_graph(rng, n_in, n_out, depth - 1, blocks)
                              for _ in range(k)))
    dims = [n_in] + [int(rng.integers(1, 4)) for _ in range(k - 1)] + [n_out]
    return Series(tuple(_random_graph(rng, dims[i], dims[i + 1], depth - 1, blocks)
                        for i in range(k)))


def test_compiled_graphs_match_signal_propagation():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        blocks = {}
        n_in, n_out = (int(v) for v in rng.integers(1, 4, size=2))
        root = _random_graph(rng, n_in, n_out, 3, blocks)
        env = {k: make_explicit([m]) for k, m in blocks.items()}
        R = eval_poly(compile_graph(BlockGraph(env, root)), env)
        assert R.shape == (n_out, n_in)
        x = rng.uniform(0.1, 2.0, size=n_in)
        np.testing.assert_allclose(R.member(0) @ x, simulate_graph(root, blocks, x),
                                   rtol=1e-12)


# -- properties ---------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), ks=st.tuples(st.integers(1, 4), st.integers(1, 4)),
       n=st.integers(1, 3))
def test_pairwise_entries(seed, ks, n):
    rng = np.random.default_rng(seed)
    S = make_explicit(list(rng.uniform(0.1, 2, size=(ks[0], n, n))))
    T = make_explicit(list(rng.uniform(0.1, 2, size=(ks[1], n, n))))
    sums, prods = mink_add(S, T), mink_mul(S, T)
    # generic entries: no coincidences, so member (i, j) sits at i * |T| + j
    assert len(sums) == len(prods) == ks[0] * ks[1]
    for i in range(ks[0]):
        for j in range(ks[1]):
            k = i * ks[1] + j
            np.testing.assert_array_equal(sums.member(k), S.member(i) + T.member(j))
            np.testing.assert_allclose(prods.member(k), S.member(i) @ T.member(j),
                                       rtol=1e-12)
    assert np.all(sums.stack() > 0) and np.all(prods.stack() > 0)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_hourglass_closed_under_sum_and_product(seed):
    rng = np.random.default_rng(seed)
    S = random_iru(rng, n=2, sizes=(2, 2))
    T = random_chain(rng, n=2, length=2)
    assert check_hourglass(S, 300, seed=seed).passed
    assert check_hourglass(T, 300, seed=seed).passed
    assert check_hourglass(mink_add(S, T), 300, seed=seed).passed
    assert check_hourglass(mink_mul(S, T), 300, seed=seed).passed
    assert check_hourglass(mink_mul(T, S), 300, seed=seed).passed


def test_explicit_pair_is_not_structural():
    S = make_explicit(NONH_A2)
    assert not S.structural
    assert not check_hourglass(S, 10, include=[[1, 1]]).passed
