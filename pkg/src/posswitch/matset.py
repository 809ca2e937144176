"""Finite matrix sets: explicit lists, IRU sets and linearly ordered chains.

An IRU set (independent row uncertainty) is stored by its row-sets; every
member picks row ``i`` from row-set ``i`` independently of the other rows.
Members are numbered in lexicographic order of their row-choice tuples with
row 0 varying slowest, so ``index_of_choice`` and ``choice_of_index`` are
inverse mixed-radix conversions.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._validation import (
    NONNEGATIVE,
    POSITIVE,
    as_float_array,
    check_entries,
    check_mode,
)
from .exceptions import (
    CardinalityOverflow,
    ChainViolation,
    DimMismatch,
    EmptyRowSet,
    EmptySet,
    RaggedRows,
)

EXPLICIT = "explicit"
IRU = "iru"
ORDERED = "ordered"

DEFAULT_LIMIT = 10**6


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MatrixSet:
    """Immutable finite set of equally sized non-negative matrices.

    Parameters
    ----------
    kind : {'explicit', 'iru', 'ordered'}
    mode : {'positive', 'nonnegative'}
    data : tuple of ndarray
        Member matrices for explicit and ordered sets; one ``(k_i, M)``
        array of candidate rows per matrix row for IRU sets.
    structural : bool
        True when the set belongs by construction to the family built from
        IRU sets and ordered chains with positive Minkowski polynomials, for
        which the joint and lower spectral radii reduce to the extreme
        single-matrix spectral radii.
    """

    kind: str
    mode: str
    data: tuple
    structural: bool = False

    @property
    def shape(self):
        if self.kind == IRU:
            return (len(self.data), self.data[0].shape[1])
        return self.data[0].shape

    @property
    def is_square(self):
        n, m = self.shape
        return n == m

    @property
    def row_set_sizes(self):
        if self.kind != IRU:
            raise TypeError("row_set_sizes is only defined for IRU sets")
        return tuple(r.shape[0] for r in self.data)

    def cardinality(self):
        if self.kind == IRU:
            return math.prod(self.row_set_sizes)
        return len(self.data)

    def choice_of_index(self, index):
        """Row-choice tuple of the IRU member with enumeration index ``index``."""
        sizes = self.row_set_sizes
        choice = []
        for size in reversed(sizes):
            index, r = divmod(index, size)
            choice.append(r)
        return tuple(reversed(choice))

    def index_of_choice(self, choice):
        index = 0
        for c, size in zip(choice, self.row_set_sizes):
            index = index * size + int(c)
        return index

    def member(self, index):
        """Single member by enumeration index, without enumerating the set."""
        if self.kind == IRU:
            choice = self.choice_of_index(index)
            return np.stack([rows[c] for rows, c in zip(self.data, choice)])
        return self.data[index]

    def stack(self, limit=DEFAULT_LIMIT):
        """All members as one ``(K, N, M)`` array in enumeration order."""
        k = self.cardinality()
        if limit is not None and k > limit:
            raise CardinalityOverflow(
                f"set has {k} members, more than the enumeration limit {limit}"
            )
        if self.kind != IRU:
            return np.stack(self.data)
        grids = np.meshgrid(*[np.arange(s) for s in self.row_set_sizes], indexing="ij")
        choices = [g.reshape(-1) for g in grids]
        return np.stack([rows[c] for rows, c in zip(self.data, choices)], axis=1)

    def __len__(self):
        return self.cardinality()

    def __repr__(self):
        n, m = self.shape
        return (
            f"MatrixSet(kind={self.kind!r}, mode={self.mode!r}, shape=({n}, {m}), "
            f"cardinality={self.cardinality()})"
        )


def _check_matrix_list(matrices, mode, what):
    if matrices is None or len(matrices) == 0:
        raise EmptySet(f"{what} needs at least one matrix")
    arrs = []
    for i, m in enumerate(matrices):
        arr = as_float_array(m, 2, what=f"{what} member {i}")
        if arrs and arr.shape != arrs[0].shape:
            raise DimMismatch(
                f"{what} member {i} has shape {arr.shape}, expected {arrs[0].shape}"
            )
        check_entries(arr, mode, what=f"{what} member {i}", index_prefix=(i,))
        arrs.append(arr)
    return arrs


def _as_matrix_list(matrices):
    # np.array on a ragged list raises ValueError, which we want as DimMismatch.
    out = []
    for m in matrices:
        try:
            out.append(np.array(m, dtype=float))
        except ValueError as exc:
            raise DimMismatch("matrix rows have unequal lengths") from exc
    return out


def make_explicit(matrices, mode=POSITIVE):
    """Explicit set holding exactly the given matrices."""
    mode = check_mode(mode)
    if matrices is None or len(matrices) == 0:
        raise EmptySet("explicit set needs at least one matrix")
    arrs = _check_matrix_list(_as_matrix_list(matrices), mode, "explicit set")
    # A single positive matrix is a one-element ordered chain.
    structural = len(arrs) == 1 and mode == POSITIVE
    return MatrixSet(EXPLICIT, mode, tuple(_frozen(a) for a in arrs), structural)


def make_iru(row_sets, mode=POSITIVE):
    """IRU set from one list of candidate rows per matrix row."""
    mode = check_mode(mode)
    if row_sets is None or len(row_sets) == 0:
        raise EmptySet("IRU set needs at least one row-set")
    width = None
    blocks = []
    for i, rows in enumerate(row_sets):
        if rows is None or len(rows) == 0:
            raise EmptyRowSet(f"row-set {i} is empty")
        for j, row in enumerate(rows):
            length = np.size(row) if np.ndim(row) == 1 else None
            if length is None or length == 0:
                raise RaggedRows(f"row {j} of row-set {i} is not a non-empty flat vector")
            if width is None:
                width = length
            elif length != width:
                raise RaggedRows(
                    f"row {j} of row-set {i} has length {length}, expected {width}"
                )
        arr = as_float_array([np.asarray(r, dtype=float) for r in rows], 2, f"row-set {i}")
        check_entries(arr, mode, what=f"row-set {i}", index_prefix=(i,))
        blocks.append(_frozen(arr))
    return MatrixSet(IRU, mode, tuple(blocks), structural=True)


def make_ordered(matrices, mode=POSITIVE):
    """Chain ``A_1 < A_2 < ...`` (element-wise; ``<=`` in non-negative mode)."""
    mode = check_mode(mode)
    if matrices is None or len(matrices) == 0:
        raise EmptySet("ordered set needs at least one matrix")
    arrs = _check_matrix_list(_as_matrix_list(matrices), mode, "ordered set")
    for k in range(len(arrs) - 1):
        lo, hi = arrs[k], arrs[k + 1]
        bad = hi <= lo if mode == POSITIVE else hi < lo
        if bad.any():
            entry = tuple(int(i) for i in np.unravel_index(int(np.argmax(bad)), lo.shape))
            rel = "<" if mode == POSITIVE else "<="
            raise ChainViolation(
                f"chain broken between members {k + 1} and {k + 2} at entry {entry}: "
                f"{lo[entry]!r} {rel} {hi[entry]!r} does not hold",
                pair=(k + 1, k + 2),
                entry=entry,
            )
    return MatrixSet(ORDERED, mode, tuple(_frozen(a) for a in arrs), structural=True)


def enumerate_members(S, limit=DEFAULT_LIMIT):
    """List every member of ``S`` in enumeration order.

    Raises CardinalityOverflow when the set has more than ``limit`` members.
    """
    k = S.cardinality()
    if limit is not None and k > limit:
        raise CardinalityOverflow(
            f"set has {k} members, more than the enumeration limit {limit}"
        )
    if S.kind != IRU:
        return list(S.data)
    return [
        np.stack([rows[c] for rows, c in zip(S.data, choice)])
        for choice in itertools.product(*[range(s) for s in S.row_set_sizes])
    ]


__all__ = [
    "DEFAULT_LIMIT",
    "EXPLICIT",
    "IRU",
    "MatrixSet",
    "NONNEGATIVE",
    "ORDERED",
    "POSITIVE",
    "enumerate_members",
    "make_explicit",
    "make_iru",
    "make_ordered",
]
