"""Discrete-event simulator for the junction dynamics.

The update is implicit but triangular: the non-priority junction exit is
computed first from the previous state, after which the priority exit and
the two entries resolve without any fixed-point iteration. The map is
additively homogeneous, so eigenvectors generate exactly linear
trajectories under the EV junction convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import EV, TrafficConfig, derive
from .spectral import FullEigenpair


class WindowTooLarge(ValueError):
    """Growth window must be shorter than the trajectory."""


@dataclass
class StateVector:
    """Cumulative vehicle counts at step k (length n+m, all finite)."""

    x: np.ndarray
    k: int = 0


@dataclass
class Trajectory:
    config: TrafficConfig
    states: list[StateVector] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.states)


def _junction_coeffs(config: TrafficConfig, a: tuple[float, ...]) -> tuple[float, float]:
    # EV feeds a_n to the priority entry and a_{n+m} to the other entry;
    # DS swaps them. Only EV makes eigenvectors generate linear trajectories.
    n, size = config.n, config.n + config.m
    if config.convention == EV:
        return a[n - 1], a[size - 1]
    return a[size - 1], a[n - 1]


def _advance(x: np.ndarray, n: int, m: int, a, abar, entry_1: float, entry_n1: float) -> np.ndarray:
    size = n + m
    y = np.empty(size)
    for q in (*range(2, n), *range(n + 2, n + m)):
        y[q - 1] = min(a[q - 2] + x[q - 2], abar[q - 1] + x[q])
    y[size - 1] = min(abar[size - 1] + x[0] + x[n] - x[n - 1], a[size - 2] + x[size - 2])
    y[n - 1] = min(abar[n - 1] + x[0] + x[n] - y[size - 1], a[n - 2] + x[n - 2])
    half_sum = (x[n - 1] + x[size - 1]) / 2.0
    y[0] = min(entry_1 + half_sum, abar[0] + x[1])
    y[n] = min(entry_n1 + half_sum, abar[n] + x[n + 1])
    return y


def _as_array(config: TrafficConfig, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    size = config.n + config.m
    if arr.shape != (size,):
        raise ValueError(f"state must have {size} entries, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("state entries must be finite")
    return arr.copy()


def step(config: TrafficConfig, state: StateVector) -> StateVector:
    """One deterministic update of the junction dynamics."""
    params = derive(config)
    entry_1, entry_n1 = _junction_coeffs(config, params.a)
    x = _as_array(config, state.x)
    y = _advance(x, config.n, config.m, params.a, params.abar, entry_1, entry_n1)
    return StateVector(y, state.k + 1)


def simulate(
    config: TrafficConfig, x0, steps: int, keep_last: int | None = None
) -> Trajectory:
    """Run the dynamics for the given number of steps from x0.

    Stores the full trajectory by default; keep_last retains only the final
    keep_last+1 states for long runs.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    params = derive(config)
    entry_1, entry_n1 = _junction_coeffs(config, params.a)
    x = _as_array(config, x0.x if isinstance(x0, StateVector) else x0)
    k0 = x0.k if isinstance(x0, StateVector) else 0
    states = [StateVector(x, k0)]
    for k in range(1, steps + 1):
        x = _advance(x, config.n, config.m, params.a, params.abar, entry_1, entry_n1)
        states.append(StateVector(x, k0 + k))
        if keep_last is not None and len(states) > keep_last + 1:
            del states[0]
    return Trajectory(config, states)


@dataclass(frozen=True)
class GrowthSummary:
    """Windowed per-step growth estimates, with min/mean/max across coordinates."""

    per_coordinate: tuple[float, ...]
    lo: float
    mean: float
    hi: float


def growth_rate(traj: Trajectory, window: int) -> GrowthSummary:
    """Average per-step growth over the trailing window of the trajectory."""
    if window < 1 or window >= len(traj.states):
        raise WindowTooLarge(
            f"window must be in [1, {len(traj.states) - 1}], got {window}"
        )
    diff = (traj.states[-1].x - traj.states[-1 - window].x) / window
    return GrowthSummary(
        tuple(float(v) for v in diff), float(diff.min()), float(diff.mean()), float(diff.max())
    )


def linearity_check(config: TrafficConfig, pair: FullEigenpair, steps: int) -> float:
    """Max deviation of the trajectory from x + k*lam over the given steps.

    Zero (to rounding) exactly when pair is an eigenvector of the dynamics;
    requires the EV junction convention, under which the eigen-system and
    the simulator agree.
    """
    if config.convention != EV:
        raise ValueError("linearity holds under the EV junction convention only")
    params = derive(config)
    entry_1, entry_n1 = _junction_coeffs(config, params.a)
    x0 = _as_array(config, pair.x)
    x = x0
    worst = 0.0
    for k in range(1, steps + 1):
        x = _advance(x, config.n, config.m, params.a, params.abar, entry_1, entry_n1)
        worst = max(worst, float(np.abs(x - (x0 + k * pair.lam)).max()))
    return worst


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Write the trajectory as CSV: header k,x_1,...,x_{n+m}, 15 significant digits."""
    size = traj.config.n + traj.config.m
    header = "k," + ",".join(f"x_{i}" for i in range(1, size + 1))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(header + "\n")
        for state in traj.states:
            row = ",".join(f"{v:.15g}" for v in state.x)
            handle.write(f"{state.k},{row}\n")
