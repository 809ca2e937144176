"""Constructive stability analysis of positive switching systems.

Sets of non-negative matrices (explicit lists, IRU sets, ordered chains)
are composed with Minkowski sums and products; for the resulting family the
joint and lower spectral radii are the extreme member spectral radii, and
extremal trajectories are built greedily. Brute-force oracles check both.
"""

from .algebra import (
    Add,
    BlockGraph,
    Edge,
    Mul,
    Parallel,
    Ref,
    Scale,
    Series,
    compile_graph,
    eval_poly,
    mink_add,
    mink_mul,
    scale,
)
from .estimators import ExtremalTrajectory, SwitchingSystemAnalyzer
from .exceptions import *  # noqa: F401,F403
from .hourglass import check_hourglass, dominant_max, dominant_min
from .matset import (
    MatrixSet,
    enumerate_members,
    make_explicit,
    make_iru,
    make_ordered,
)
from .objectives import MonotoneObjective, nu_eval
from .oracle import exhaustive_extremum, exhaustive_products, propagate, ratio_bounds
from .spectral import (
    analyze,
    iru_greedy_extremum,
    product_bounds,
    rho_extrema,
    spectral_radius,
)
from .trajectory import greedy_trajectory, stabilizing_sequence

__version__ = "0.1.0"
