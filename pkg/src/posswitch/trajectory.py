"""Greedy construction of extremal switching trajectories.

Starting from ``x_0 > 0`` the greedy trajectory applies, at every step, the
member that is dominant at the current state. For sets with dominant
members at every state the final state dominates the final state of every
other switching sequence of the same length, so the trajectory is extremal
for every coordinate-wise monotone objective at once. Choosing the members
never evaluates an objective; values are computed afterwards.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_positive_vector
from .exceptions import NoDominantMatrix
from .hourglass import dominant_max, dominant_min
from .matset import DEFAULT_LIMIT
from .objectives import MonotoneObjective, as_objective, nu_eval

DEFAULT_OBJECTIVES = ("l1", "l2", "linf")

__all__ = [
    "MonotoneObjective",
    "TrajectoryResult",
    "greedy_trajectory",
    "nu_eval",
    "stabilizing_sequence",
]


@dataclass
class TrajectoryResult:
    """Greedy trajectory of ``steps`` selections.

    ``states[k]`` is ``x_k`` divided by ``exp(log_scale[k])``; without
    normalization ``log_scale`` is all zeros and ``states`` are the raw
    states. ``nu`` maps objective names to per-step values of the raw
    states.
    """

    direction: str
    steps: int
    chosen: list
    states: np.ndarray
    log_scale: np.ndarray
    nu: dict = field(default_factory=dict)
    choices: list = None
    selection_passes: int = 0
    evaluations: int = 0
    decay_rate: float = None
    rho_min: float = None
    stabilizable: bool = None

    def raw_states(self):
        return self.states * np.exp(self.log_scale)[:, None]

    def evaluate(self, objectives):
        """Attach per-step objective values; returns ``self``."""
        for obj in objectives:
            obj = as_objective(obj)
            # objectives are positively homogeneous, so rescale the values
            vals = nu_eval(obj, self.states) * np.exp(self.log_scale)
            self.nu[obj.name] = vals
            self.evaluations += len(vals)
        return self

    def to_dict(self):
        out = {
            "direction": self.direction,
            "steps": self.steps,
            "chosen": list(self.chosen),
            "states": self.states.tolist(),
            "log_scale": self.log_scale.tolist(),
            "nu": {k: list(map(float, v)) for k, v in self.nu.items()},
            "selection_passes": self.selection_passes,
            "evaluations": self.evaluations,
        }
        if self.choices is not None:
            out["choices"] = [list(c) for c in self.choices]
        if self.decay_rate is not None:
            out["decay_rate"] = self.decay_rate
        if self.rho_min is not None:
            out["rho_min"] = self.rho_min
            out["stabilizable"] = self.stabilizable
        return out


def greedy_trajectory(S, x0, n, direction="max", objectives=DEFAULT_OBJECTIVES,
                      normalize=False, limit=DEFAULT_LIMIT):
    """Build the ``n``-step maximizing (or minimizing) trajectory from ``x0``.

    Each step is one dominant-member selection at the current state. With
    ``normalize`` the stored state is rescaled to unit L1 norm after every
    step and the log of the scale is kept in ``log_scale``; selection is
    unaffected because dominance is invariant under positive scaling of x.

    Raises NoDominantMatrix, annotated with the step and the state, when no
    dominant member exists at a visited state.
    """
    if not S.is_square:
        raise ValueError(f"set members have shape {S.shape}, expected square matrices")
    if n < 1:
        raise ValueError("n must be >= 1")
    select = {"max": dominant_max, "min": dominant_min}.get(direction)
    if select is None:
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")
    x = check_positive_vector(x0, S.shape[1], "x0")

    states = [x]
    logs = [0.0]
    chosen, choices = [], []
    passes = 0
    for k in range(n):
        try:
            cert = select(S, x, limit)
        except NoDominantMatrix as exc:
            exc.state = x
            exc.step = k
            raise
        passes += 1
        chosen.append(cert.index)
        choices.append(cert.choice)
        x = cert.image
        log = logs[-1]
        if normalize:
            s = x.sum()
            x = x / s
            log += float(np.log(s))
        states.append(x)
        logs.append(log)
    result = TrajectoryResult(
        direction=direction,
        steps=n,
        chosen=chosen,
        states=np.array(states),
        log_scale=np.array(logs),
        choices=choices if choices[0] is not None else None,
        selection_passes=passes,
    )
    return result.evaluate(objectives or ())


def stabilizing_sequence(S, x0, n, objective="l1", normalize=False, limit=DEFAULT_LIMIT):
    """Minimizing greedy trajectory plus its empirical decay rate.

    ``decay_rate`` is ``(nu(x_n) / nu(x_0)) ** (1 / n)``, reported next to
    the smallest member spectral radius it should approach.
    """
    from .spectral import rho_extrema

    res = greedy_trajectory(S, x0, n, "min", objectives=(objective,),
                            normalize=normalize, limit=limit)
    name = as_objective(objective).name
    vals = res.nu[name]
    if normalize:
        log_ratio = np.log(nu_eval(objective, res.states[-1])) + res.log_scale[-1] \
            - np.log(vals[0])
    else:
        log_ratio = np.log(vals[-1] / vals[0])
    res.decay_rate = float(np.exp(log_ratio / n))
    ext = rho_extrema(S, limit)
    res.rho_min = ext.rho_min
    res.stabilizable = bool(ext.rho_min < 1)
    return res
