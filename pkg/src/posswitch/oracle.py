"""Brute-force reference computations.

Everything here enumerates all member sequences, with no pruning, so that
results can be trusted as ground truth for the constructive algorithms.
Sequences are index tuples ``(i_1, ..., i_n)`` with ``i_1`` applied first:
the sequence acts on ``x`` as ``A[i_n] @ ... @ A[i_1] @ x``. Enumeration is
lexicographic in the tuple.

Enumeration is a depth-first walk over the leading indices (holding at most
``n`` partial states) whose innermost levels are expanded as one vectorized
block of precomputed suffix products.

``ratio_bounds`` brackets the spectral radius of every product through
its action on fixed positive vectors, which scales to sets where computing
each product's eigenvalues would be too slow.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_vector
from .exceptions import BudgetExceeded, NotSquare
from .matset import DEFAULT_LIMIT
from .objectives import as_objective, nu_eval

DEFAULT_BUDGET = 10**7
_BLOCK = 1 << 15


def _members(S, limit):
    if not S.is_square:
        raise NotSquare(f"set members have shape {S.shape}, expected square matrices")
    return S.stack(limit)


def _check_budget(K, n, budget):
    total = K**n
    if budget is not None and total > budget:
        raise BudgetExceeded(
            f"{K}**{n} = {total} sequences exceed the enumeration budget {budget}"
        )
    return total


def _suffix_block(A, d):
    """All products of ``d`` members with their index rows, lexicographic."""
    K, N, _ = A.shape
    prods = A.copy()
    idx = np.arange(K).reshape(K, 1)
    for _ in range(d - 1):
        prods = np.einsum("jab,sbc->sjac", A, prods).reshape(-1, N, N)
        idx = np.hstack([np.repeat(idx, K, axis=0), np.tile(np.arange(K), len(idx))[:, None]])
    return prods, idx


def _split(K, n, N):
    d = 1
    while d < n and K ** (d + 1) * N <= _BLOCK:
        d += 1
    return n - d, d


def _walk(A, depth, value, seq=()):
    """Depth-first prefixes of length ``depth``: yields (index tuple, A_prefix @ value).

    One live state per level, so at most ``depth + 1`` states are held.
    """
    if len(seq) == depth:
        yield seq, value
        return
    for i in range(len(A)):
        yield from _walk(A, depth, A[i] @ value, seq + (i,))


def iter_product_batches(S, n, budget=DEFAULT_BUDGET, limit=DEFAULT_LIMIT):
    """Yield ``(products, sequences)`` blocks covering all length-``n`` products.

    ``products`` has shape ``(B, N, N)`` and ``sequences`` ``(B, n)``; block
    order concatenates to the lexicographic order of sequences.
    """
    A = _members(S, limit)
    K, N, _ = A.shape
    _check_budget(K, n, budget)
    p, d = _split(K, n, N * N)
    suffix, sidx = _suffix_block(A, d)
    for prefix, P in _walk(A, p, np.eye(N)):
        seqs = np.hstack([np.tile(np.array(prefix, dtype=int), (len(sidx), 1)), sidx])
        yield suffix @ P, seqs


def exhaustive_products(S, n, budget=DEFAULT_BUDGET, limit=DEFAULT_LIMIT):
    """Stream every ordered product of ``n`` members as ``(matrix, sequence)``."""
    for prods, seqs in iter_product_batches(S, n, budget, limit):
        for P, seq in zip(prods, seqs):
            yield P, tuple(int(s) for s in seq)


@dataclass
class ExhaustiveResult:
    value: float
    sequence: tuple
    examined: int
    final_state: np.ndarray
    optima: list = None


def exhaustive_extremum(S, x0, n, obj="l1", direction="max", budget=DEFAULT_BUDGET,
                        limit=DEFAULT_LIMIT, all_optima=False, rtol=1e-9):
    """Extremum of ``obj(A[i_n] ... A[i_1] x0)`` over all ``K**n`` sequences.

    The returned sequence is the lexicographically smallest among exact ties.
    With ``all_optima`` the result also lists every sequence whose value is
    within ``rtol`` (relative) of the extremum.
    """
    if direction not in ("max", "min"):
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    obj = as_objective(obj)
    A = _members(S, limit)
    K, N, _ = A.shape
    x0 = check_positive_vector(x0, N, "x0")
    total = _check_budget(K, n, budget)
    sign = 1.0 if direction == "max" else -1.0
    p, d = _split(K, n, N)
    suffix, sidx = _suffix_block(A, d)

    best = -math.inf
    best_seq = best_state = None
    near = []
    for prefix, x in _walk(A, p, x0):
        Y = suffix @ x
        vals = sign * nu_eval(obj, Y)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, best_state = float(vals[k]), Y[k]
            best_seq = prefix + tuple(int(s) for s in sidx[k])
        if all_optima:
            cut = best - rtol * abs(best)
            for j in np.flatnonzero(vals >= cut):
                near.append((float(vals[j]), prefix + tuple(int(s) for s in sidx[j])))
    optima = None
    if all_optima:
        cut = best - rtol * abs(best)
        optima = [seq for v, seq in near if v >= cut]
    return ExhaustiveResult(sign * best, best_seq, total, best_state, optima)


@dataclass
class RatioBounds:
    """Collatz-Wielandt bounds over all products of each length ``1..depth``.

    ``upper[n-1]`` is the largest ``max_i (P v)_i / v_i`` and ``lower[n-1]``
    the smallest ``min_i (P w)_i / w_i`` over all products ``P`` of ``n``
    members. For non-negative ``P`` and positive ``v, w`` these bracket the
    spectral radius, ``min_i (P w)_i / w_i <= rho(P) <= max_i (P v)_i / v_i``,
    so ``upper`` bounds the largest and ``lower`` the smallest product
    spectral radius at each length.
    """

    upper: np.ndarray
    lower: np.ndarray
    products: int


_CHUNK = 1 << 14


def _iru_children(rows, Y):
    """Images of each row of ``Y`` under every IRU member, enumeration order."""
    sizes = [R.shape[0] for R in rows]
    out = np.empty((len(Y), *sizes, len(rows)))
    for i, R in enumerate(rows):
        shape = [len(Y)] + [1] * len(rows)
        shape[i + 1] = sizes[i]
        out[..., i] = (Y @ R.T).reshape(shape)
    return out.reshape(-1, len(rows))


def _extreme(Z, sign):
    return float(Z.max()) if sign > 0 else -float(Z.min())


def _ratio_walk(S, A, Y, level, depth, u, sign, out):
    """Depth-first over products, keeping the largest ``sign * (P u)_i / u_i``."""
    if level > 0:
        out[level - 1] = max(out[level - 1], _extreme(Y * (1.0 / u), sign))
    if level == depth:
        return
    if level == depth - 1 and A is None:
        # Last level of an IRU set: coordinate i of a child depends only on the
        # row taken from row-set i, so the extreme over all K children is the
        # extreme over candidate rows, found without forming the children.
        scaled = np.vstack([R / u[i] for i, R in enumerate(S.data)])
        out[level] = max(out[level], _extreme(Y @ scaled.T, sign))
        return
    step = max(1, _CHUNK // S.cardinality())
    for start in range(0, len(Y), step):
        block = Y[start:start + step]
        if A is None:
            kids = _iru_children(S.data, block)
        else:
            kids = np.einsum("kij,bj->bki", A, block).reshape(-1, A.shape[1])
        _ratio_walk(S, A, kids, level + 1, depth, u, sign, out)


def ratio_bounds(S, depth, v, w, budget=DEFAULT_BUDGET, limit=DEFAULT_LIMIT):
    """Collatz-Wielandt bounds on every product spectral radius up to ``depth``.

    Every product of every length is applied to ``v`` and ``w``; nothing is
    pruned. IRU sets are expanded row-set by row-set, which visits the same
    images at a fraction of the cost of forming member matrices.
    """
    if not S.is_square:
        raise NotSquare(f"set members have shape {S.shape}, expected square matrices")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    K = S.cardinality()
    total = sum(K**n for n in range(1, depth + 1))
    if budget is not None and total > budget:
        raise BudgetExceeded(
            f"{total} products up to length {depth} exceed the enumeration budget {budget}"
        )
    n = S.shape[0]
    v = check_positive_vector(v, n, "v")
    w = check_positive_vector(w, n, "w")
    A = None if S.kind == "iru" else S.stack(limit)
    hi = np.full(depth, -math.inf)
    lo = np.full(depth, -math.inf)
    _ratio_walk(S, A, v[None, :], 0, depth, v, 1.0, hi)
    _ratio_walk(S, A, w[None, :], 0, depth, w, -1.0, lo)
    return RatioBounds(hi, -lo, total)


def propagate(S, sequence, x0):
    """States ``x_0 .. x_n`` along ``sequence``, one matrix-vector step at a time."""
    x = np.asarray(x0, dtype=float)
    states = [x]
    for i in sequence:
        x = S.member(int(i)) @ x
        states.append(x)
    return np.array(states)


def simulate_graph(node, matrices, x):
    """Push ``x`` through a series-parallel graph of fixed block matrices."""
    from .algebra import Edge, Series

    if isinstance(node, Edge):
        return matrices[node.block] @ x
    if isinstance(node, Series):
        for part in node.parts:
            x = simulate_graph(part, matrices, x)
        return x
    return sum(simulate_graph(part, matrices, x) for part in node.parts)
