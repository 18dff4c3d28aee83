"""Independent verification machinery.

Nothing here shares a code path with the construction it checks: the root
scanner enumerates breakpoints of the piecewise-linear characteristic
function instead of using the phase formulas, and the star oracle iterates
the defining fixed point instead of truncating powers.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .minplus import EPSILON, MinPlusMatrix
from .model import DerivedParams, TrafficConfig
from .spectral import FullEigenpair, characteristic_pieces, residual_full, residual_simplified

_ROOT_TOL = 1e-12
_DEDUP_SPACING = 1e-9


class NoConvergence(RuntimeError):
    """Fixed-point iteration did not stabilize (nonpositive circuit at work)."""


class WrongSize(ValueError):
    """Base-case coincidence check is defined for n = m = 2 only."""


@dataclass(frozen=True)
class RootSet:
    """Zeros of the characteristic function: isolated points plus flat segments."""

    points: tuple[float, ...]
    intervals: tuple[tuple[float, float], ...]

    def covers(self, lam: float, tol: float = 1e-9) -> bool:
        if any(abs(lam - p) <= tol for p in self.points):
            return True
        return any(lo - tol <= lam <= hi + tol for lo, hi in self.intervals)


def scalar_roots(params: DerivedParams) -> RootSet:
    """Complete zero set of the piecewise-linear characteristic function.

    Breakpoints come from pairwise intersections of the four affine pieces;
    between consecutive breakpoints the function is affine, so a sign
    change pins a unique root and an identically zero segment is a flat
    interval. All roots lie in [0, 1/4], well inside the scanned range.
    """
    pieces = characteristic_pieces(params)
    lines = (pieces.g1, pieces.g2, pieces.g3, pieces.g4)
    cuts = {-1.0, 0.0, 1.0}
    for (c1, s1), (c2, s2) in combinations(lines, 2):
        if s1 != s2:
            t = (c2 - c1) / (s1 - s2)
            if -1.0 < t < 1.0:
                cuts.add(t)
    grid = sorted(cuts)

    points: list[float] = []
    intervals: list[tuple[float, float]] = []
    for lo, hi in zip(grid, grid[1:]):
        f_lo, f_hi = pieces.value(lo), pieces.value(hi)
        flat = (
            abs(f_lo) <= _ROOT_TOL
            and abs(f_hi) <= _ROOT_TOL
            and abs(pieces.value((lo + hi) / 2.0)) <= _ROOT_TOL
        )
        if flat:
            if intervals and abs(intervals[-1][1] - lo) <= _ROOT_TOL:
                intervals[-1] = (intervals[-1][0], hi)
            else:
                intervals.append((lo, hi))
            continue
        if abs(f_lo) <= _ROOT_TOL:
            points.append(lo)
        if abs(f_hi) <= _ROOT_TOL:
            points.append(hi)
        if f_lo * f_hi < 0.0 and abs(f_lo) > _ROOT_TOL and abs(f_hi) > _ROOT_TOL:
            points.append(lo - f_lo * (hi - lo) / (f_hi - f_lo))

    points.sort()
    deduped: list[float] = []
    for p in points:
        inside = any(lo - _DEDUP_SPACING <= p <= hi + _DEDUP_SPACING for lo, hi in intervals)
        if not inside and (not deduped or p - deduped[-1] > _DEDUP_SPACING):
            deduped.append(p)
    return RootSet(tuple(deduped), tuple(intervals))


def star_fixed_point(a: MinPlusMatrix, max_iters: int | None = None) -> MinPlusMatrix:
    """Kleene star by iterating S <- I ⊕ (a ⊗ S) from I until stationary.

    Stabilizes within the matrix size under positive circuits; raises
    NoConvergence otherwise (entries then drift towards -inf forever).
    """
    size = a.rows
    if a.rows != a.cols:
        raise ValueError("star requires a square matrix")
    limit = max_iters if max_iters is not None else 2 * size + 8
    identity = MinPlusMatrix.identity(size).entries
    current = identity.copy()
    for _ in range(limit):
        if size == 0:
            return MinPlusMatrix(current)
        step = np.minimum(identity, (a.entries[:, :, None] + current[None, :, :]).min(axis=1))
        if np.array_equal(step, current):
            return MinPlusMatrix(step)
        current = step
    raise NoConvergence(f"no stationary point after {limit} iterations")


def ev_ss_coincide_base(
    config: TrafficConfig,
    samples: int = 1000,
    rng: np.random.Generator | int | None = None,
    ss_residual=None,
) -> bool:
    """For n = m = 2 the full and telescoped systems are the same equations.

    Samples random (lam, x) and compares both residual evaluators; any
    discrepancy beyond rounding means one of them is broken (ss_residual
    can be swapped out to prove the check has teeth).
    """
    if config.n != 2 or config.m != 2:
        raise WrongSize(f"base-case check requires n = m = 2, got n={config.n}, m={config.m}")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    evaluate_ss = ss_residual if ss_residual is not None else residual_simplified
    worst = 0.0
    for _ in range(samples):
        lam = float(gen.uniform(-0.5, 0.75))
        x = gen.uniform(-2.0, 2.0, size=4)
        worst = max(worst, abs(residual_full(config, lam, x) - evaluate_ss(config, lam, x)))
    return bool(worst <= 1e-12)


def lambda_bound_check(pairs: list[FullEigenpair], tol: float = 1e-12) -> bool:
    """Every verified eigenvalue obeys the 1/4 ceiling (vacuously true when empty)."""
    return all(pair.lam <= 0.25 + tol for pair in pairs)
