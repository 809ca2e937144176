"""Spectral radii of non-negative matrices and spectral verdicts for sets.

The stability question for a switching system ``x(k+1) = A(k) x(k)`` with
``A(k)`` drawn from a set is governed by the joint spectral radius; the
stabilizability question by the lower spectral radius. For the structural
family (IRU sets, ordered chains and positive Minkowski polynomials of them)
both collapse to the largest and smallest spectral radius of a single
member, which ``rho_extrema`` computes by enumeration.
"""

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_square
from .exceptions import NoConvergence, NonFinite, NotSquare
from .matset import DEFAULT_LIMIT, IRU
from .oracle import DEFAULT_BUDGET, iter_product_batches

POWER_TOL = 1e-12
POWER_MAX_ITER = 10**5
DENSE_MAX_DIM = 64
GREEDY_MAX_SELECTIONS = 1000

_EPS = np.finfo(float).eps
_WINDOW = 8


@dataclass
class SpectralResult:
    value: float
    vector: np.ndarray
    iterations: int
    converged: bool
    method: str = "power"


def dense_spectral_radius(A):
    """Largest eigenvalue modulus from LAPACK's Hessenberg-QR eigensolver."""
    A = check_square(np.asarray(A, dtype=float))
    w, v = np.linalg.eig(A)
    mags = np.abs(w)
    rho = float(mags.max())
    # Prefer the real non-negative root among the top-modulus ones (Perron root).
    top = np.flatnonzero(mags >= rho * (1 - 1e-12))
    k = top[np.argmax(w[top].real)]
    vec = np.abs(v[:, k].real)
    s = vec.sum()
    vec = vec / s if s > 0 else np.full(A.shape[0], 1.0 / A.shape[0])
    return SpectralResult(rho, vec, 0, True, "dense")


def spectral_radius(A, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Spectral radius of a square non-negative matrix.

    ``A`` is first divided by its largest row sum ``c >= rho(A)`` so that
    the result is exactly homogeneous in ``A`` up to rounding. Power
    iteration then runs on ``A / c + I`` from the all-ones vector; the shift
    makes the Perron root ``rho(A) + 1`` strictly dominant in modulus, so
    periodic (e.g. permutation-like) matrices cannot stall the iteration.
    Iterates stay strictly positive, which gives the Collatz-Wielandt
    bracket ``min(Bx/x) <= rho(B) <= max(Bx/x)`` as a certified stop.
    Otherwise the run stops when the Rayleigh-quotient drift, extrapolated
    with the observed contraction rate, falls below ``tol`` relative.
    Matrices that do not converge within ``max_iter`` steps (e.g.
    defective dominant eigenvalues) fall back to the dense eigensolver.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFinite("matrix contains NaN or Inf")
    n = A.shape[0]
    c = float(np.abs(A).sum(axis=1).max())
    if c == 0.0:
        return SpectralResult(0.0, np.full(n, 1.0 / n), 0, True)
    B = A / c + np.eye(n)
    x = np.ones(n)
    q_old = None
    drifts = deque(maxlen=2 * _WINDOW)
    for k in range(1, max_iter + 1):
        y = B @ x
        ratio = y / x
        lo, hi = ratio.min(), ratio.max()
        if hi - lo <= tol * hi:
            return _finish(0.5 * (lo + hi), y, k, c)
        q = float(x @ y) / float(x @ x)
        x = y / y.max()
        if q_old is not None:
            drifts.append(abs(q - q_old))
            if len(drifts) == 2 * _WINDOW and _drift_converged(drifts, q, tol):
                return _finish(q, x, k, c)
        q_old = q
    if n <= DENSE_MAX_DIM:
        res = dense_spectral_radius(A)
        res.iterations = max_iter
        return res
    return _finish(q_old, x, max_iter, c, converged=False)


def _drift_converged(drifts, q, tol):
    d = list(drifts)
    older, recent = max(d[:_WINDOW]), max(d[_WINDOW:])
    if recent == 0.0:
        return True
    if older == 0.0:
        return False
    # envelope rate: oscillating drifts (complex subdominant pairs) dip
    # toward zero, so compare window maxima rather than consecutive steps
    rate = (recent / older) ** (1.0 / _WINDOW)
    if rate >= 1.0:
        return False
    bound = recent * rate / (1.0 - rate)
    if bound <= tol * q:
        return True
    return recent <= 4 * _EPS * q and bound <= 1e3 * tol * q


def _finish(shifted, vec, iterations, c, converged=True):
    vec = np.abs(vec)
    return SpectralResult(c * max(float(shifted) - 1.0, 0.0), vec / vec.sum(), iterations,
                          converged, "power")


def spectral_radii(stack):
    """Vectorised dense spectral radii of a ``(K, N, N)`` stack."""
    stack = np.asarray(stack, dtype=float)
    if stack.shape[-1] == 1:
        return np.abs(stack[:, 0, 0])
    return np.abs(np.linalg.eigvals(stack)).max(axis=-1)


# -- set extrema ---------------------------------------------------------------


@dataclass
class RhoExtrema:
    rho_min: float
    rho_max: float
    argmin: int
    argmax: int
    radii: np.ndarray = field(repr=False)


def _require_square(S):
    if not S.is_square:
        raise NotSquare(f"set members have shape {S.shape}, expected square matrices")


def rho_extrema(S, limit=DEFAULT_LIMIT):
    """Exact min/max spectral radius over the members of ``S``.

    Witnesses are enumeration indices; ties go to the smallest index.
    """
    _require_square(S)
    stack = S.stack(limit)
    radii = np.array([spectral_radius(m).value for m in stack])
    return RhoExtrema(float(radii.min()), float(radii.max()), int(np.argmin(radii)),
                      int(np.argmax(radii)), radii)


@dataclass
class GreedyExtremum:
    value: float
    choice: tuple
    index: int
    selections: int
    vector: np.ndarray = field(repr=False)


def iru_greedy_extremum(S, direction="max", max_selections=GREEDY_MAX_SELECTIONS):
    """Row-wise policy iteration for the extreme spectral radius of an IRU set.

    Starting from the first row of every row-set, compute the Perron vector
    ``v`` of the selected matrix and move each row to the candidate with the
    largest (smallest) ``<row, v>``; a row only moves on strict improvement.
    At a fixed point every member ``A`` satisfies ``A v <= rho v``
    (``>=`` for min), so the fixed point is the global extremum. Raises
    NoConvergence after ``max_selections`` selections.
    """
    if S.kind != IRU:
        raise TypeError("iru_greedy_extremum needs an IRU set")
    _require_square(S)
    sign = _direction_sign(direction)
    choice = [0] * len(S.data)
    for selections in range(1, max_selections + 1):
        A = np.stack([rows[c] for rows, c in zip(S.data, choice)])
        res = spectral_radius(A)
        v = res.vector
        changed = False
        for i, rows in enumerate(S.data):
            scores = sign * (rows @ v)
            best = int(np.argmax(scores))
            current = scores[choice[i]]
            if scores[best] > current + 1e-13 * abs(current):
                choice[i] = best
                changed = True
        if not changed:
            choice = tuple(choice)
            return GreedyExtremum(res.value, choice, S.index_of_choice(choice),
                                  selections, v)
    raise NoConvergence(
        f"row selection did not reach a fixed point in {max_selections} selections"
    )


def _direction_sign(direction):
    if direction == "max":
        return 1.0
    if direction == "min":
        return -1.0
    raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")


# -- brute-force bounds ---------------------------------------------------------

NORMS = {
    "inf": lambda P: np.abs(P).sum(axis=-1).max(axis=-1),
    "1": lambda P: np.abs(P).sum(axis=-2).max(axis=-1),
    "fro": lambda P: np.sqrt((P * P).sum(axis=(-2, -1))),
}


@dataclass
class BoundReport:
    """Bounds from all ``K**depth`` products of exactly ``depth`` members.

    ``jsr_lower <= rho(set) <= jsr_upper`` and ``lower_rho(set) <= lsr_upper``
    hold for every depth.
    """

    depth: int
    jsr_lower: float
    jsr_upper: float
    lsr_upper: float
    norm: str
    products: int
    jsr_lower_witness: tuple
    lsr_upper_witness: tuple

    def to_dict(self):
        return {
            "depth": self.depth,
            "jsr_lower": self.jsr_lower,
            "jsr_upper": self.jsr_upper,
            "lsr_upper": self.lsr_upper,
            "norm": self.norm,
            "products": self.products,
            "jsr_lower_witness": list(self.jsr_lower_witness),
            "lsr_upper_witness": list(self.lsr_upper_witness),
        }


def product_bounds(S, depth, norm="inf", budget=DEFAULT_BUDGET, limit=DEFAULT_LIMIT):
    """Brute-force joint/lower spectral radius bounds at one product length.

    Spectral radii of the products come from the dense eigensolver, so this
    oracle shares no code with the power iteration behind ``rho_extrema``.
    """
    _require_square(S)
    if norm not in NORMS:
        raise ValueError(f"norm must be one of {sorted(NORMS)}, got {norm!r}")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    norm_fn = NORMS[norm]
    hi_rho, lo_rho, hi_norm = -1.0, math.inf, -1.0
    hi_seq = lo_seq = None
    count = 0
    for prods, seqs in iter_product_batches(S, depth, budget=budget, limit=limit):
        radii = spectral_radii(prods)
        norms = np.maximum(norm_fn(prods), radii)
        i, j = int(np.argmax(radii)), int(np.argmin(radii))
        if radii[i] > hi_rho:
            hi_rho, hi_seq = float(radii[i]), tuple(int(s) for s in seqs[i])
        if radii[j] < lo_rho:
            lo_rho, lo_seq = float(radii[j]), tuple(int(s) for s in seqs[j])
        hi_norm = max(hi_norm, float(norms.max()))
        count += len(prods)
    root = 1.0 / depth
    return BoundReport(depth, hi_rho**root, hi_norm**root, lo_rho**root, norm, count,
                       hi_seq, lo_seq)


# -- analysis -------------------------------------------------------------------


@dataclass
class AnalysisReport:
    rho_max: float
    rho_max_witness: int
    rho_min: float
    rho_min_witness: int
    stable: bool
    stabilizable: bool
    hset_status: str
    verdict_basis: str
    method: str
    cardinality: int
    shape: tuple
    mode: str
    rho_max_choice: tuple = None
    rho_min_choice: tuple = None
    hset_witness: dict = None
    samples_tested: int = 0
    greedy_agrees: bool = None
    oracle_bounds: list = None

    def to_dict(self):
        out = {
            "rho_max": self.rho_max,
            "rho_max_witness": self.rho_max_witness,
            "rho_min": self.rho_min,
            "rho_min_witness": self.rho_min_witness,
            "stable": self.stable,
            "stabilizable": self.stabilizable,
            "hset_status": self.hset_status,
            "verdict_basis": self.verdict_basis,
            "method": self.method,
            "cardinality": self.cardinality,
            "shape": list(self.shape),
            "mode": self.mode,
            "samples_tested": self.samples_tested,
        }
        if self.rho_max_choice is not None:
            out["rho_max_choice"] = list(self.rho_max_choice)
            out["rho_min_choice"] = list(self.rho_min_choice)
        if self.greedy_agrees is not None:
            out["greedy_agrees"] = self.greedy_agrees
        if self.hset_witness is not None:
            out["hset_witness"] = self.hset_witness
        if self.oracle_bounds is not None:
            out["oracle_bounds"] = [b.to_dict() for b in self.oracle_bounds]
        return out


def analyze(S, method="enumerate", oracle_depth=None, norm="inf", n_samples=1000,
            seed=0, include=None, limit=DEFAULT_LIMIT, budget=DEFAULT_BUDGET):
    """Stability and stabilizability verdicts for a finite square set.

    Parameters
    ----------
    method : {'enumerate', 'greedy'}
        'greedy' runs row-wise policy iteration on IRU sets and checks it
        against enumeration whenever the set fits in ``limit``.
    oracle_depth : int, optional
        Attach brute-force product bounds for depths ``1..oracle_depth``.
    n_samples, seed, include
        Sampled hourglass check, run only for sets outside the structural
        family. ``include`` lists vectors tested before the random ones and
        defaults to the all-ones vector.

    ``hset_status`` is 'verified-family' for structural sets and
    'sampled-pass' or 'falsified' otherwise. Verdicts rest on the reduction
    to single-matrix extrema ('finrel') only for the structural family;
    otherwise ``verdict_basis`` is 'sampled' or 'extrema-only'.
    """
    from .hourglass import check_hourglass

    _require_square(S)
    if method not in ("enumerate", "greedy"):
        raise ValueError(f"method must be 'enumerate' or 'greedy', got {method!r}")
    greedy_agrees = None
    used = "enumerate"
    ext = None
    if method == "greedy" and S.kind == IRU:
        try:
            gmax = iru_greedy_extremum(S, "max")
            gmin = iru_greedy_extremum(S, "min")
        except NoConvergence:
            gmax = gmin = None
        if gmax is not None:
            used = "greedy"
            rho_max, arg_max = gmax.value, gmax.index
            rho_min, arg_min = gmin.value, gmin.index
            if S.cardinality() <= limit:
                ext = rho_extrema(S, limit)
                greedy_agrees = bool(
                    abs(ext.rho_max - rho_max) <= 1e-9 * max(1.0, ext.rho_max)
                    and abs(ext.rho_min - rho_min) <= 1e-9 * max(1.0, ext.rho_min)
                )
                if not greedy_agrees:
                    used = "enumerate"
    if used == "enumerate":
        ext = ext or rho_extrema(S, limit)
        rho_max, arg_max = ext.rho_max, ext.argmax
        rho_min, arg_min = ext.rho_min, ext.argmin

    hset_witness = None
    samples = 0
    if S.structural:
        status, basis = "verified-family", "finrel"
    else:
        if include is None:
            include = [np.ones(S.shape[1])]
        verdict = check_hourglass(S, n_samples, seed=seed, include=include, limit=limit)
        samples = verdict.samples_tested
        if verdict.passed:
            status, basis = "sampled-pass", "sampled"
        else:
            status, basis = "falsified", "extrema-only"
            hset_witness = verdict.witness_dict()

    bounds = None
    if oracle_depth:
        bounds = [product_bounds(S, d, norm=norm, budget=budget, limit=limit)
                  for d in range(1, oracle_depth + 1)]

    choices = (None, None)
    if S.kind == IRU:
        choices = (S.choice_of_index(arg_max), S.choice_of_index(arg_min))
    return AnalysisReport(
        rho_max=rho_max,
        rho_max_witness=arg_max,
        rho_min=rho_min,
        rho_min_witness=arg_min,
        stable=bool(rho_max < 1),
        stabilizable=bool(rho_min < 1),
        hset_status=status,
        verdict_basis=basis,
        method=used,
        cardinality=S.cardinality(),
        shape=S.shape,
        mode=S.mode,
        rho_max_choice=choices[0],
        rho_min_choice=choices[1],
        hset_witness=hset_witness,
        samples_tested=samples,
        greedy_agrees=greedy_agrees,
        oracle_bounds=bounds,
    )
