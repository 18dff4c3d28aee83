"""Closed-form growth rates (additive eigenvalues) of the junction system.

The scalar characteristic equation 0 = max(min(g1, g2, g3), g4) in the
eigenvalue, with

    g1 = d - (1 + rho) * lam            (free-flow balance)
    g2 = 1/4 - lam                      (junction service ceiling)
    g3 = r - d - (2r - 1 + rho) * lam   (congestion balance)
    g4 = -lam                           (jam floor)

has its roots realized by four explicit eigenvector constructions, one per
traffic phase. Eigenvectors are produced in reduced form (the four junction
coordinates) and extended to all n+m coordinates through the Kleene star of
the interior precedence matrix. Every system in play has a residual
evaluator so constructions are verified, never trusted.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .minplus import EPSILON, MinPlusMatrix, affine_solve
from .model import DerivedParams, TrafficConfig, derive

LAMBDA_MAX = 0.25
_CHAR_TOL = 1e-12
_DEDUP_TOL = 1e-12


class Regime(str, enum.Enum):
    """The four traffic phases, each with a closed-form eigenvalue."""

    FREE_FLOW = "free-flow"
    SATURATION = "saturation"
    CONGESTION = "congestion"
    JAM = "jam"


class RegimeNotApplicable(ValueError):
    """Requested construction has an empty density interval for these params."""


class RNotApplicable(ValueError):
    """Closed-form single-eigenvalue formula requires r >= 1/2."""


class HypothesisViolated(ValueError):
    """Uniqueness statement requires r > 1/2 and 0 < d < r."""


class UniquenessViolated(RuntimeError):
    """Positive eigenvalue set is not the expected singleton (a bug signal)."""


class LambdaNotPositive(ValueError):
    """The z change of variables is an equivalence only for lam > 0."""


@dataclass(frozen=True)
class CharacteristicPieces:
    """Affine pieces of the characteristic function, as (intercept, slope)."""

    g1: tuple[float, float]
    g2: tuple[float, float]
    g3: tuple[float, float]
    g4: tuple[float, float]

    def value(self, lam: float) -> float:
        inner = min(
            self.g1[0] + self.g1[1] * lam,
            self.g2[0] + self.g2[1] * lam,
            self.g3[0] + self.g3[1] * lam,
        )
        return max(inner, self.g4[0] + self.g4[1] * lam)


def characteristic_pieces(params: DerivedParams) -> CharacteristicPieces:
    n, m = params.n, params.m
    big = n + m - 1
    return CharacteristicPieces(
        g1=(params.d, -(big + 1) / big),
        g2=(0.25, -1.0),
        g3=(params.r - params.d, -(n - m + 2) / big),
        g4=(0.0, -1.0),
    )


def characteristic(lam: float, params: DerivedParams) -> float:
    """Evaluate the scalar characteristic function at lam."""
    return characteristic_pieces(params).value(lam)


def regime_lambda(params: DerivedParams, regime: Regime) -> float:
    """Closed-form eigenvalue of a phase (no applicability check)."""
    n, m, d = params.n, params.m, params.d
    big = n + m - 1
    if regime is Regime.FREE_FLOW:
        return big * d / (big + 1)
    if regime is Regime.SATURATION:
        return 0.25
    if regime is Regime.CONGESTION:
        if m == n + 2:
            raise RegimeNotApplicable(
                "congestion construction is vacuous when m = n + 2 (its density interval is empty)"
            )
        return (n - big * d) / (n - m + 2)
    if regime is Regime.JAM:
        return 0.0
    raise ValueError(f"unknown regime {regime!r}")


def applicable_regimes(params: DerivedParams) -> tuple[Regime, ...]:
    """Phases whose closed-interval density conditions hold for params.

    Boundary densities satisfy two adjacent phases; both are reported and
    their eigenvalues coincide there.
    """
    d, d1, d2, r = params.d, params.d1, params.d2, params.r
    out = []
    if d <= d1:
        out.append(Regime.FREE_FLOW)
    if d1 <= d <= d2:
        out.append(Regime.SATURATION)
    if params.m != params.n + 2 and min(r, d2) <= d <= max(r, d2):
        out.append(Regime.CONGESTION)
    if d >= r:
        out.append(Regime.JAM)
    return tuple(out)


def eigen_set(params: DerivedParams) -> tuple[tuple[float, Regime], ...]:
    """All eigenvalues constructed by the phase formulas, deduplicated.

    Every returned value is checked against the characteristic equation.
    Sorted by eigenvalue, largest first. The set depends on the arc values
    only through their total (equivalently through d, r, rho).
    """
    pieces = characteristic_pieces(params)
    found: list[tuple[float, Regime]] = []
    for regime in applicable_regimes(params):
        lam = regime_lambda(params, regime)
        residual = abs(pieces.value(lam))
        if residual > _CHAR_TOL:
            raise AssertionError(
                f"constructed eigenvalue {lam} misses the characteristic equation by {residual}"
            )
        if all(abs(lam - seen) > _DEDUP_TOL for seen, _ in found):
            found.append((lam, regime))
    found.sort(key=lambda pair: -pair[0])
    return tuple(found)


@dataclass(frozen=True)
class Region:
    """One half-open density interval [lo, hi) of the phase diagram.

    Labels A..F follow the fundamental-diagram decomposition; F is closed
    at density 1.
    """

    label: str
    lo: float
    hi: float


def region_intervals(params: DerivedParams) -> tuple[Region, ...]:
    """The non-empty regions, in increasing density order; they tile [0, 1]."""
    d1, d2, r = params.d1, params.d2, params.r
    bounds = (
        ("A", 0.0, min(d1, r)),
        ("B", min(d1, r), d1),
        ("C", d1, min(d2, r)),
        ("D", max(d1, r), d2),
        ("E", d2, max(d2, r)),
        ("F", max(d2, r), 1.0),
    )
    return tuple(Region(label, lo, hi) for label, lo, hi in bounds if hi > lo)


def classify_region(params: DerivedParams) -> Region:
    """The unique region containing the configuration's density."""
    d = params.d
    if not -1e-12 <= d <= 1.0 + 1e-12:
        raise ValueError(f"density {d} outside [0, 1]")
    d = min(max(d, 0.0), 1.0)
    regions = region_intervals(params)
    for region in regions:
        if region.lo <= d < region.hi:
            return region
    return regions[-1]  # d == 1 belongs to the closed right end of F


@dataclass(frozen=True)
class ReducedEigenpair:
    """Eigenvalue with the four junction coordinates (positions 1, n, n+1, n+m)."""

    lam: float
    x1: float
    xn: float
    xn1: float
    xnm: float
    regime: Regime

    @property
    def vector(self) -> tuple[float, float, float, float]:
        return (self.x1, self.xn, self.xn1, self.xnm)


@dataclass(frozen=True)
class FullEigenpair:
    """Eigenvalue with all n+m coordinates."""

    lam: float
    x: tuple[float, ...]


def reduced_eigenvector(params: DerivedParams, regime: Regime) -> ReducedEigenpair:
    """Explicit junction-coordinate eigenvector for an applicable phase."""
    if regime not in applicable_regimes(params):
        raise RegimeNotApplicable(
            f"{regime.value} does not apply at density {params.d} for n={params.n}, m={params.m}"
        )
    n, m = params.n, params.m
    a_n = params.a[n - 1]
    a_nm = params.a[n + m - 1]
    abar_n = params.abar[n - 1]
    lam = regime_lambda(params, regime)
    if regime is Regime.FREE_FLOW:
        xn = params.b_n - (n - 1) * lam
        xn1 = a_nm - a_n
        xnm = (n + 1) * lam - 2 * a_n - params.b_n
    elif regime is Regime.SATURATION:
        xn = (m - 3) * lam + abar_n - params.b_m
        xn1 = a_nm - a_n
        xnm = params.b_m + a_nm - a_n - (m - 1) * lam
    elif regime is Regime.CONGESTION:
        xn = (n - 1) * lam - params.bbar_n
        xn1 = params.b_m + 2 * a_nm - params.bbar_n - (m - n + 2) * lam
        xnm = 2 * params.b_m + 2 * a_nm - params.bbar_n - (2 * m - n + 1) * lam
    else:  # JAM, lam == 0
        xn = -params.bbar_n
        xn1 = 1.0 + a_nm - a_n
        xnm = (n + 1) - 2 * a_n - params.b_n
    return ReducedEigenpair(lam, 0.0, xn, xn1, xnm, regime)


def extend_full(config: TrafficConfig, pair: ReducedEigenpair) -> FullEigenpair:
    """Extend a reduced eigenpair to all n+m coordinates.

    The interior coordinates (2..n-1 and n+2..n+m-1) satisfy an affine
    fixed-point equation x = A ⊗ x ⊕ b over the two ring chains, where A
    carries the in-ring arcs shifted by -lam and b carries the junction
    boundary values. Circuits of A have weight 1 - 2*lam > 0, so the
    Kleene star solves it uniquely.
    """
    params = derive(config)
    n, m = params.n, params.m
    lam = pair.lam
    if not lam < 0.5:
        raise ValueError(f"extension requires lam < 1/2, got {lam}")
    a, abar = params.a, params.abar
    size1, size2 = n - 2, m - 2
    size = size1 + size2
    mat = np.full((size, size), EPSILON)
    rhs = np.full(size, EPSILON)

    def feed(row: int, value: float) -> None:
        rhs[row] = min(rhs[row], value)

    # Priority-ring chain: rows for positions 2..n-1.
    for i in range(size1):
        pos = i + 2
        if pos - 1 >= 2:
            mat[i, i - 1] = a[pos - 2] - lam
        else:
            feed(i, (a[0] - lam) + pair.x1)
        if pos + 1 <= n - 1:
            mat[i, i + 1] = abar[pos - 1] - lam
        else:
            feed(i, (abar[n - 2] - lam) + pair.xn)
    # Other-ring chain: rows for positions n+2..n+m-1.
    for j in range(size2):
        pos = n + 2 + j
        row = size1 + j
        if pos - 1 >= n + 2:
            mat[row, row - 1] = a[pos - 2] - lam
        else:
            feed(row, (a[n] - lam) + pair.xn1)
        if pos + 1 <= n + m - 1:
            mat[row, row + 1] = abar[pos - 1] - lam
        else:
            feed(row, (abar[n + m - 2] - lam) + pair.xnm)

    interior = affine_solve(MinPlusMatrix(mat), rhs)
    full = np.empty(n + m)
    full[0] = pair.x1
    full[1 : n - 1] = interior[:size1]
    full[n - 1] = pair.xn
    full[n] = pair.xn1
    full[n + 1 : n + m - 1] = interior[size1:]
    full[n + m - 1] = pair.xnm
    return FullEigenpair(lam, tuple(float(v) for v in full))


def _as_state(config: TrafficConfig, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape != (config.n + config.m,):
        raise ValueError(f"state must have {config.n + config.m} entries, got shape {arr.shape}")
    return arr


def residual_full(config: TrafficConfig, lam: float, x) -> float:
    """Max-abs residual of the full (n+m)-equation eigenproblem at (lam, x)."""
    params = derive(config)
    n, m = params.n, params.m
    a, abar = params.a, params.abar
    x = _as_state(config, x)
    size = n + m
    worst = 0.0
    for q in (*range(2, n), *range(n + 2, n + m)):
        rhs = min(a[q - 2] + x[q - 2], abar[q - 1] + x[q])
        worst = max(worst, abs(lam + x[q - 1] - rhs))
    rhs = min(abar[size - 1] + x[0] + x[n] - x[n - 1], a[size - 2] + x[size - 2])
    worst = max(worst, abs(lam + x[size - 1] - rhs))
    rhs = min(abar[n - 1] + x[0] + x[n] - (lam + x[size - 1]), a[n - 2] + x[n - 2])
    worst = max(worst, abs(lam + x[n - 1] - rhs))
    half_sum = (x[n - 1] + x[size - 1]) / 2.0
    rhs = min(a[n - 1] + half_sum, abar[0] + x[1])
    worst = max(worst, abs(lam + x[0] - rhs))
    rhs = min(a[size - 1] + half_sum, abar[n] + x[n + 1])
    worst = max(worst, abs(lam + x[n] - rhs))
    return float(worst)


def residual_simplified(config: TrafficConfig, lam: float, x) -> float:
    """Max-abs residual of the boundary-telescoped system at (lam, x).

    Interior equations match the full system; the four junction equations
    bundle each ring chain into a single b_n / b_m term.
    """
    params = derive(config)
    n, m = params.n, params.m
    a, abar = params.a, params.abar
    x = _as_state(config, x)
    size = n + m
    worst = 0.0
    for q in (*range(2, n), *range(n + 2, n + m)):
        rhs = min(a[q - 2] - lam + x[q - 2], abar[q - 1] - lam + x[q])
        worst = max(worst, abs(x[q - 1] - rhs))
    rhs = min(
        abar[n - 1] - 2 * lam + x[0] + x[n] - x[size - 1],
        params.b_n - (n - 1) * lam + x[0],
    )
    worst = max(worst, abs(x[n - 1] - rhs))
    rhs = min(
        abar[size - 1] - lam + x[0] + x[n] - x[n - 1],
        params.b_m - (m - 1) * lam + x[n],
    )
    worst = max(worst, abs(x[size - 1] - rhs))
    half_sum = (x[n - 1] + x[size - 1]) / 2.0
    rhs = min(a[n - 1] - lam + half_sum, params.bbar_n - (n - 1) * lam + x[n - 1])
    worst = max(worst, abs(x[0] - rhs))
    rhs = min(a[size - 1] - lam + half_sum, params.bbar_m - (m - 1) * lam + x[size - 1])
    worst = max(worst, abs(x[n] - rhs))
    return float(worst)


def residual_reduced(config: TrafficConfig, pair: ReducedEigenpair) -> float:
    """Max-abs residual of the four-variable junction system at the pair."""
    params = derive(config)
    n, m = params.n, params.m
    a_n, a_nm = params.a[n - 1], params.a[n + m - 1]
    abar_n = params.abar[n - 1]
    lam = pair.lam
    x1, xn, xn1, xnm = pair.x1, pair.xn, pair.xn1, pair.xnm
    half_sum = (xn + xnm) / 2.0
    eq_n = abs(xn - min(abar_n - 2 * lam + x1 + xn1 - xnm, params.b_n - (n - 1) * lam + x1))
    eq_nm = abs(xnm - min(abar_n - lam + x1 + xn1 - xn, params.b_m - (m - 1) * lam + xn1))
    eq_1 = abs(x1 - min(a_n - lam + half_sum, params.bbar_n - (n - 1) * lam + xn))
    eq_n1 = abs(xn1 - min(a_nm - lam + half_sum, params.bbar_m - (m - 1) * lam + xnm))
    return float(max(eq_n, eq_nm, eq_1, eq_n1))


@dataclass(frozen=True)
class ZVector:
    """Junction coordinates after the positive-eigenvalue change of variables."""

    z1: float
    zn: float
    zn1: float
    znm: float


def z_transform(pair: ReducedEigenpair, m: int, require_positive: bool = False) -> ZVector:
    """Shift a reduced eigenpair into z coordinates.

    The shifted system is equivalent to the junction system only when
    lam > 0; with require_positive the transform refuses other pairs,
    otherwise it is still computed but carries no equivalence claim.
    """
    if require_positive and not pair.lam > 0.0:
        raise LambdaNotPositive(f"z equivalence requires lam > 0, got {pair.lam}")
    lam = pair.lam
    return ZVector(
        z1=pair.x1 + (m - 1) * lam,
        zn=pair.xn,
        zn1=pair.xn1 + (m - 1) * lam,
        znm=pair.xnm + (2 * m - 2) * lam,
    )


def residual_zshift(params: DerivedParams, lam: float, z: ZVector) -> float:
    """Max-abs residual of the shifted junction system at (lam, z)."""
    n, m = params.n, params.m
    a_n, a_nm = params.a[n - 1], params.a[n + m - 1]
    abar_n = params.abar[n - 1]
    half_sum = (z.zn + z.znm) / 2.0
    eq_zn = abs(
        z.zn
        - min(abar_n - params.b_m - 2 * lam + z.z1, params.b_n - (n + m - 2) * lam + z.z1)
    )
    eq_znm = abs(z.znm - (params.b_m + z.zn1))
    eq_z1 = abs(z.z1 - min(a_n - lam + half_sum, params.bbar_n - (n - m) * lam + z.zn))
    eq_zn1 = abs(
        z.zn1 - min(a_nm - lam + half_sum, params.bbar_m - (2 * m - 2) * lam + z.znm)
    )
    return float(max(eq_zn, eq_znm, eq_z1, eq_zn1))


def lambda_nonneg(params: DerivedParams) -> float:
    """The nonnegative eigenvalue in closed min-max form; requires r >= 1/2."""
    if params.r < 0.5:
        raise RNotApplicable(f"closed form requires r >= 1/2, got r = {params.r}")
    n, m, d = params.n, params.m, params.d
    big = n + m - 1
    return max(min(big * d / (big + 1), 0.25, (n - big * d) / (n - m + 2)), 0.0)


def lambda_asymptotic(d: float, r: float) -> float:
    """Large-system limit of lambda_nonneg at fixed density and ratio."""
    den = 2.0 * r - 1.0
    if den != 0.0:
        third = (r - d) / den
    elif d < r:
        third = math.inf
    elif d > r:
        third = -math.inf
    else:
        third = 0.0
    return max(min(d, 0.25, third), 0.0)


def assert_unique_positive(params: DerivedParams) -> float:
    """The unique positive eigenvalue for r > 1/2 and 0 < d < r.

    Checks that the constructed set restricted to (0, inf) is a singleton
    matching the closed min form; a mismatch signals an implementation bug.
    """
    if not (params.r > 0.5 and 0.0 < params.d < params.r):
        raise HypothesisViolated(
            f"uniqueness requires r > 1/2 and 0 < d < r, got r = {params.r}, d = {params.d}"
        )
    positive = [lam for lam, _ in eigen_set(params) if lam > 0.0]
    expected = lambda_nonneg(params)
    if len(positive) != 1 or abs(positive[0] - expected) > 1e-12:
        raise UniquenessViolated(
            f"positive eigenvalue set {positive} is not the expected singleton {expected}"
        )
    return positive[0]
