"""Minkowski set arithmetic and series-parallel block composition.

Sums and products of sets are materialized as explicit sets. Expressions are
evaluated exactly as written: Minkowski products do not distribute over
Minkowski sums (``A(B1 + B2)`` is generally not ``AB1 + AB2``, and
``A + A`` is generally not ``2A``), so nothing is ever rewritten.

Series connections use the signal-flow convention: when a signal passes
through block ``B1`` and then ``B2``, the composite transition matrix is
``B2 @ B1`` (the downstream block multiplies on the left).
"""

from dataclasses import dataclass

import numpy as np

from ._validation import combine_modes
from .exceptions import (
    CardinalityOverflow,
    DimMismatch,
    MalformedGraph,
    NonPositiveScalar,
    UnboundRef,
)
from .matset import DEFAULT_LIMIT, EXPLICIT, MatrixSet, _frozen


# -- expression AST ---------------------------------------------------------


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Scale:
    coef: float
    child: object

    def __post_init__(self):
        if not self.coef > 0:
            raise NonPositiveScalar(f"scale coefficient must be > 0, got {self.coef!r}")


# -- series-parallel graphs --------------------------------------------------


@dataclass(frozen=True)
class Edge:
    block: str


@dataclass(frozen=True)
class Series:
    """Parts listed in signal order: the first part sees the input."""

    parts: tuple


@dataclass(frozen=True)
class Parallel:
    parts: tuple


@dataclass(frozen=True)
class BlockGraph:
    blocks: dict
    root: object


# -- set operations -----------------------------------------------------------


def _dedup(stack):
    """Drop bit-identical repeats, keeping first occurrences in order."""
    seen = set()
    keep = []
    for i, m in enumerate(stack):
        key = np.ascontiguousarray(m).tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return stack[keep]


def _pair_budget(S, T, limit):
    k = S.cardinality() * T.cardinality()
    if limit is not None and k > limit:
        raise CardinalityOverflow(
            f"pairwise operation would produce {k} matrices, limit is {limit}"
        )


def _explicit(stack, mode, structural):
    return MatrixSet(EXPLICIT, mode, tuple(_frozen(m) for m in stack), structural)


def mink_add(S, T, limit=DEFAULT_LIMIT):
    """Minkowski sum ``{A + B : A in S, B in T}`` with exact duplicates removed."""
    if S.shape != T.shape:
        raise DimMismatch(f"cannot add sets of shapes {S.shape} and {T.shape}")
    _pair_budget(S, T, limit)
    a, b = S.stack(None), T.stack(None)
    sums = (a[:, None, :, :] + b[None, :, :, :]).reshape(-1, *S.shape)
    return _explicit(_dedup(sums), combine_modes(S.mode, T.mode),
                     S.structural and T.structural)


def mink_mul(S, T, limit=DEFAULT_LIMIT):
    """Minkowski product ``{A @ B : A in S, B in T}``; S is N x M, T is M x Q."""
    if S.shape[1] != T.shape[0]:
        raise DimMismatch(f"cannot multiply sets of shapes {S.shape} and {T.shape}")
    _pair_budget(S, T, limit)
    a, b = S.stack(None), T.stack(None)
    prods = np.einsum("aij,bjk->abik", a, b).reshape(-1, S.shape[0], T.shape[1])
    return _explicit(_dedup(prods), combine_modes(S.mode, T.mode),
                     S.structural and T.structural)


def scale(t, S):
    """Multiply every member of ``S`` by ``t > 0``, keeping the set's variant."""
    t = float(t)
    if not t > 0 or not np.isfinite(t):
        raise NonPositiveScalar(f"scale factor must be a finite number > 0, got {t!r}")
    data = tuple(_frozen(t * block) for block in S.data)
    return MatrixSet(S.kind, S.mode, data, S.structural)


# -- expressions --------------------------------------------------------------


def expr_shape(expr, shapes):
    """Shape of ``expr`` given a ``name -> (rows, cols)`` mapping."""
    if isinstance(expr, Ref):
        if expr.name not in shapes:
            raise UnboundRef(f"no set bound to {expr.name!r}")
        return tuple(shapes[expr.name])
    if isinstance(expr, Scale):
        return expr_shape(expr.child, shapes)
    if isinstance(expr, Add):
        left, right = expr_shape(expr.left, shapes), expr_shape(expr.right, shapes)
        if left != right:
            raise DimMismatch(
                f"sum of {format_expr(expr.left)} {left} and "
                f"{format_expr(expr.right)} {right}"
            )
        return left
    if isinstance(expr, Mul):
        left, right = expr_shape(expr.left, shapes), expr_shape(expr.right, shapes)
        if left[1] != right[0]:
            raise DimMismatch(
                f"product of {format_expr(expr.left)} {left} and "
                f"{format_expr(expr.right)} {right}"
            )
        return (left[0], right[1])
    raise TypeError(f"not an expression node: {expr!r}")


def eval_poly(expr, env, limit=DEFAULT_LIMIT):
    """Evaluate a composition expression bottom-up over ``env`` (name -> set)."""
    expr_shape(expr, {name: s.shape for name, s in env.items()})
    return _eval(expr, env, limit)


def _eval(expr, env, limit):
    if isinstance(expr, Ref):
        return env[expr.name]
    if isinstance(expr, Scale):
        return scale(expr.coef, _eval(expr.child, env, limit))
    left = _eval(expr.left, env, limit)
    right = _eval(expr.right, env, limit)
    if isinstance(expr, Add):
        return mink_add(left, right, limit)
    return mink_mul(left, right, limit)


def format_expr(expr):
    if isinstance(expr, Ref):
        return expr.name
    if isinstance(expr, Scale):
        return f"{expr.coef!r}*({format_expr(expr.child)})"
    if isinstance(expr, Add):
        return f"({format_expr(expr.left)} + {format_expr(expr.right)})"
    return f"{_factor(expr.left)}{_factor(expr.right)}"


def _factor(expr):
    text = format_expr(expr)
    return text if isinstance(expr, (Ref, Add)) else f"({text})"


def expr_refs(expr):
    """Block names referenced by ``expr``, in first-use order."""
    if isinstance(expr, Ref):
        return [expr.name]
    if isinstance(expr, Scale):
        return expr_refs(expr.child)
    out = expr_refs(expr.left)
    out += [n for n in expr_refs(expr.right) if n not in out]
    return out


# -- graphs -------------------------------------------------------------------


def _graph_blocks(node):
    if isinstance(node, Edge):
        return [node.block]
    return [b for part in node.parts for b in _graph_blocks(part)]


def compile_graph(graph):
    """Translate a series-parallel block graph into a composition expression.

    ``Parallel(p1, p2, p3)`` becomes ``Add(Add(p1, p2), p3)`` and
    ``Series(b1, b2, b3)`` becomes ``Mul(b3, Mul(b2, b1))``.
    """
    shapes = {name: s.shape for name, s in graph.blocks.items()}
    expr, _ = _compile(graph.root, shapes)
    return expr


def _describe(node):
    names = _graph_blocks(node)
    return names[0] if len(names) == 1 else "[" + ", ".join(names) + "]"


def _compile(node, shapes):
    if isinstance(node, Edge):
        if node.block not in shapes:
            raise MalformedGraph(f"edge refers to unknown block {node.block!r}")
        return Ref(node.block), tuple(shapes[node.block])
    if not isinstance(node, (Series, Parallel)):
        raise MalformedGraph(f"unknown graph node {node!r}")
    if len(node.parts) == 0:
        raise MalformedGraph(f"empty {type(node).__name__.lower()} connection")
    expr, shape = _compile(node.parts[0], shapes)
    prev = node.parts[0]
    for part in node.parts[1:]:
        sub, sub_shape = _compile(part, shapes)
        if isinstance(node, Parallel):
            if sub_shape != shape:
                raise DimMismatch(
                    f"parallel connection of {_describe(prev)} {shape} and "
                    f"{_describe(part)} {sub_shape}: shapes differ"
                )
            expr = Add(expr, sub)
        else:
            # downstream (rows x cols) consumes upstream output of length shape[0]
            if sub_shape[1] != shape[0]:
                raise DimMismatch(
                    f"series connection {_describe(prev)} -> {_describe(part)}: "
                    f"output size {shape[0]} does not match input size {sub_shape[1]}"
                )
            expr = Mul(sub, expr)
            shape = (sub_shape[0], shape[1])
        prev = part
    return expr, shape
