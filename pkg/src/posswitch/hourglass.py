"""Dominant members and sampled checks of the hourglass alternative.

For a set ``S`` and a vector ``x > 0`` a member ``A_max`` is dominant when
``A x <= A_max x`` element-wise for every member ``A`` (and symmetrically
for ``A_min``). Sets obeying the hourglass alternative always have such
members, which is what makes greedy trajectory construction optimal.

Hourglass alternative, for every member ``At`` and every ``x > 0``:

* H1: either ``A x >= At x`` for all members, or some member ``Ab`` has
  ``Ab x <= At x`` with ``Ab x != At x``;
* H2: either ``A x <= At x`` for all members, or some member ``Ab`` has
  ``Ab x >= At x`` with ``Ab x != At x``.

Sampling can only refute these axioms; a pass is evidence, not proof.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_vector
from .exceptions import NoDominantMatrix
from .matset import DEFAULT_LIMIT, IRU, ORDERED

DOMINANCE_RTOL = 1e-9
SAMPLE_LOW, SAMPLE_HIGH = 1e-2, 1e2


@dataclass
class DominanceCertificate:
    """Selected dominant member for one vector.

    ``margins`` holds the slack of the dominance inequality. For explicit
    and ordered sets it is a ``(K, N)`` array, row ``k`` being
    ``A_max x - A_k x`` (``A_k x - A_min x`` for min). For IRU sets the
    slack of a member at coordinate ``i`` depends only on its row ``i``, so
    ``margins`` is a tuple with one slack per candidate row of each row-set.
    """

    index: int
    x: np.ndarray
    direction: str
    image: np.ndarray
    margins: object
    choice: tuple = None

    def min_margin(self):
        if isinstance(self.margins, tuple):
            return min(float(m.min()) for m in self.margins)
        return float(self.margins.min())


def _sign(direction):
    if direction not in ("max", "min"):
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")
    return 1.0 if direction == "max" else -1.0


def _dominant(S, x, direction, limit):
    sign = _sign(direction)
    x = check_positive_vector(x, S.shape[1], "x")
    if S.kind == IRU:
        choice, margins, image = [], [], []
        for rows in S.data:
            dots = rows @ x
            c = int(np.argmax(sign * dots))
            choice.append(c)
            image.append(dots[c])
            margins.append(sign * (dots[c] - dots))
        choice = tuple(choice)
        return DominanceCertificate(S.index_of_choice(choice), x, direction,
                                    np.array(image), tuple(margins), choice)

    images = S.stack(limit) @ x
    if S.kind == ORDERED:
        c = len(images) - 1 if sign > 0 else 0
    else:
        c = int(np.argmax(sign * images.sum(axis=1)))
    margins = sign * (images[c] - images)
    if S.kind != ORDERED:
        scale = np.maximum(np.abs(images), np.abs(images[c]))
        bad = margins < -DOMINANCE_RTOL * scale
        if bad.any():
            k = int(np.flatnonzero(bad.any(axis=1))[0])
            raise NoDominantMatrix(
                f"no {direction}-dominant member at x={x.tolist()}: member {c} "
                f"(image {images[c].tolist()}) and member {k} "
                f"(image {images[k].tolist()}) are incomparable",
                x=x, pair=(c, k),
            )
    return DominanceCertificate(c, x, direction, images[c], margins)


def dominant_max(S, x, limit=DEFAULT_LIMIT):
    """Member whose image of ``x`` dominates every other image from above.

    IRU sets take the row-wise argmax of ``<row, x>`` (lowest index on
    ties); ordered chains take their last element; explicit sets take the
    member with the largest coordinate sum of ``A x`` and verify it against
    every member, raising NoDominantMatrix with the escaping pair.
    """
    return _dominant(S, x, "max", limit)


def dominant_min(S, x, limit=DEFAULT_LIMIT):
    """Mirror of ``dominant_max`` selecting the member dominated by all others."""
    return _dominant(S, x, "min", limit)


@dataclass
class HourglassVerdict:
    status: str
    samples_tested: int
    x: np.ndarray = None
    member: int = None
    axiom: str = None

    @property
    def passed(self):
        return self.status == "pass"

    def witness_dict(self):
        if self.passed:
            return None
        return {"x": self.x.tolist(), "member": self.member, "axiom": self.axiom}

    def to_dict(self):
        out = {
            "status": "sampled-pass" if self.passed else "fail",
            "samples_tested": self.samples_tested,
        }
        if not self.passed:
            out["witness"] = self.witness_dict()
        return out


def sample_vectors(n, size, seed=0):
    """``size`` positive vectors with log-uniform coordinates in [1e-2, 1e2]."""
    rng = np.random.default_rng(seed)
    return np.exp(rng.uniform(np.log(SAMPLE_LOW), np.log(SAMPLE_HIGH), size=(size, n)))


def _axiom_failures(Y, rtol):
    """Boolean ``(B, K)`` arrays marking members that break H1 / H2.

    ``Y`` holds member images, shape ``(B, K, N)``; axis 1 of the pairwise
    arrays is the compared member ``A`` and axis 2 the reference ``At``.
    """
    a = Y[:, :, None, :]
    t = Y[:, None, :, :]
    tol = rtol * np.maximum(np.abs(a), np.abs(t))
    geq = np.all(a >= t - tol, axis=-1)
    leq = np.all(a <= t + tol, axis=-1)
    neq = np.any(np.abs(a - t) > tol, axis=-1)
    h1 = geq.all(axis=1) | (leq & neq).any(axis=1)
    h2 = leq.all(axis=1) | (geq & neq).any(axis=1)
    return ~h1, ~h2


def check_hourglass(S, n_samples, seed=0, include=None, limit=DEFAULT_LIMIT,
                    rtol=DOMINANCE_RTOL):
    """Search for a violation of H1/H2 at sampled vectors.

    Vectors in ``include`` are tested first, then ``n_samples`` seeded
    log-uniform samples. The first violation (by sample, then member, H1
    before H2) is reported as the witness.
    """
    n = S.shape[1]
    forced = [check_positive_vector(v, n, "include vector") for v in (include or [])]
    if n_samples < 0:
        raise ValueError("n_samples must be >= 0")
    if n_samples + len(forced) == 0:
        raise ValueError("at least one sample is required")
    X = np.vstack(forced + [sample_vectors(n, n_samples, seed)]) if forced else \
        sample_vectors(n, n_samples, seed)
    stack = S.stack(limit)
    K = len(stack)
    chunk = max(1, (1 << 20) // max(1, K * K * S.shape[0]))
    for start in range(0, len(X), chunk):
        xs = X[start:start + chunk]
        Y = np.einsum("kij,bj->bki", stack, xs)
        f1, f2 = _axiom_failures(Y, rtol)
        bad = f1 | f2
        if bad.any():
            b, k = map(int, np.argwhere(bad)[0])
            axiom = "H1" if f1[b, k] else "H2"
            return HourglassVerdict("fail", start + b + 1, xs[b].copy(), k, axiom)
    return HourglassVerdict("pass", len(X))
