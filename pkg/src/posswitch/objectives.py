"""Coordinate-wise monotone objectives on the non-negative orthant."""

from dataclasses import dataclass

import numpy as np

from .exceptions import NegativeInput

KINDS = ("l1", "l2", "linf", "weighted")


@dataclass(frozen=True)
class MonotoneObjective:
    """A norm or positively weighted sum, evaluated row-wise on 2-D input.

    All kinds are non-decreasing in each coordinate of ``x >= 0``; every
    kind except ``linf`` is strictly increasing.
    """

    kind: str = "l1"
    weights: tuple = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"objective kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "weighted":
            w = np.asarray(self.weights, dtype=float)
            if self.weights is None or w.ndim != 1 or np.any(~(w > 0)):
                raise ValueError("weighted objective needs a vector of positive weights")
            object.__setattr__(self, "weights", tuple(float(v) for v in w))

    @property
    def strict(self):
        return self.kind != "linf"

    @property
    def name(self):
        return self.kind

    def __call__(self, x):
        return nu_eval(self, x)


def as_objective(obj):
    if isinstance(obj, MonotoneObjective):
        return obj
    return MonotoneObjective(str(obj).lower())


def nu_eval(obj, x):
    """Objective value of ``x`` (a vector, or one value per row of a 2-D array)."""
    obj = as_objective(obj)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise NegativeInput("objectives are defined on non-negative vectors only")
    if obj.kind == "l1":
        out = x.sum(axis=-1)
    elif obj.kind == "l2":
        out = np.sqrt((x * x).sum(axis=-1))
    elif obj.kind == "linf":
        out = x.max(axis=-1)
    else:
        out = x @ np.asarray(obj.weights)
    return float(out) if np.ndim(out) == 0 else out
