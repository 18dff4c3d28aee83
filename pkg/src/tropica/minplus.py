"""Scalars and dense matrices over the min-plus semiring.

The semiring is (R ∪ {+inf}, min, +): semiring addition is ``min`` with
neutral element ``EPSILON`` (+inf, also absorbing for the product), and
the semiring product is ordinary ``+`` with neutral element ``UNIT`` (0.0).
Minus infinity and NaN are outside the domain and rejected everywhere.
All values are immutable and all operations are pure functions.
"""

from __future__ import annotations

import math

import numpy as np

EPSILON = math.inf
UNIT = 0.0


class NonPositiveCircuit(ValueError):
    """A directed cycle of weight <= 0; the Kleene star does not stabilize."""


def _checked(value: float) -> float:
    v = float(value)
    if math.isnan(v):
        raise ValueError("NaN is outside the min-plus domain")
    if v == -math.inf:
        raise ValueError("-inf is outside the min-plus domain (only finite values and EPSILON)")
    return v


def oplus(a: float, b: float) -> float:
    """Semiring sum: min(a, b). EPSILON is neutral."""
    return min(_checked(a), _checked(b))


def otimes(a: float, b: float) -> float:
    """Semiring product: a + b. EPSILON is absorbing."""
    return _checked(a) + _checked(b)


def residuate(a: float, b: float) -> float:
    """Residuation: a - b for finite b. EPSILON is preserved on the left."""
    a, b = _checked(a), _checked(b)
    if b == EPSILON:
        raise ValueError("residuation by EPSILON is undefined")
    return a - b


def half(a: float) -> float:
    """Semiring square root: a / 2. half(EPSILON) is EPSILON."""
    return _checked(a) / 2.0


def scale(a: float, k: float) -> float:
    """Semiring power with real exponent: k * a. scale(a, 0) is UNIT."""
    a = _checked(a)
    k = float(k)
    if k == 0.0:
        return UNIT
    if a == EPSILON and k < 0.0:
        raise ValueError("negative power of EPSILON is outside the domain")
    return k * a


class MinPlusMatrix:
    """Dense matrix over the min-plus semiring; EPSILON marks absent arcs.

    Entries are stored as a read-only float array. Equality is exact
    entrywise equality (verification with tolerances lives with callers).
    """

    __slots__ = ("entries",)

    def __init__(self, entries) -> None:
        arr = np.array(entries, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"matrix entries must be 2-dimensional, got shape {arr.shape}")
        if np.isnan(arr).any():
            raise ValueError("NaN entry is outside the min-plus domain")
        if (arr == -math.inf).any():
            raise ValueError("-inf entry is outside the min-plus domain")
        arr.setflags(write=False)
        self.entries = arr

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @classmethod
    def identity(cls, size: int) -> "MinPlusMatrix":
        ent = np.full((size, size), EPSILON)
        np.fill_diagonal(ent, UNIT)
        return cls(ent)

    @classmethod
    def epsilon(cls, rows: int, cols: int | None = None) -> "MinPlusMatrix":
        return cls(np.full((rows, rows if cols is None else cols), EPSILON))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MinPlusMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )

    def __hash__(self):
        return hash((self.entries.shape, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"MinPlusMatrix({self.entries.tolist()!r})"


def _product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] == 0:
        return np.full((a.shape[0], b.shape[1]), EPSILON)
    return (a[:, :, None] + b[None, :, :]).min(axis=1)


def mat_mul(a: MinPlusMatrix, b: MinPlusMatrix) -> MinPlusMatrix:
    """Matrix product: entry (i, j) = min_k a(i, k) + b(k, j)."""
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: ({a.rows}x{a.cols}) times ({b.rows}x{b.cols})")
    return MinPlusMatrix(_product(a.entries, b.entries))


def mat_oplus(a: MinPlusMatrix, b: MinPlusMatrix) -> MinPlusMatrix:
    """Entrywise min of two equally shaped matrices."""
    if a.entries.shape != b.entries.shape:
        raise ValueError("shape mismatch")
    return MinPlusMatrix(np.minimum(a.entries, b.entries))


def check_circuits_positive(a: MinPlusMatrix) -> tuple[bool, float]:
    """Whether all directed cycles of the precedence graph have weight > 0.

    Runs ``size`` relaxation passes accumulating best closed-walk weights up
    to length ``size``; the diagonal minimum of the accumulated matrix is
    the worst closed-walk weight, which is positive iff all circuits are.
    Returns (ok, worst closed-walk weight), EPSILON when the graph is acyclic.
    """
    if a.rows != a.cols:
        raise ValueError("circuit check requires a square matrix")
    size = a.rows
    if size == 0:
        return True, EPSILON
    w = a.entries
    d = w.copy()
    for _ in range(size - 1):
        d = np.minimum(w, _product(w, d))
    worst = float(d.diagonal().min())
    return worst > 0.0, worst


def kleene_star(a: MinPlusMatrix) -> MinPlusMatrix:
    """Kleene star: min over k >= 0 of the k-th power (all-pairs closure).

    Requires every circuit to have strictly positive weight, in which case
    the star truncates at the (size-1)-th power. Computed by squaring
    (identity ⊕ a) until the walk length bound covers size-1.
    """
    ok, worst = check_circuits_positive(a)
    if not ok:
        raise NonPositiveCircuit(f"closed walk of weight {worst} <= 0 in the precedence graph")
    size = a.rows
    closure = np.minimum(MinPlusMatrix.identity(size).entries, a.entries)
    span = 1
    while span < size - 1:
        closure = _product(closure, closure)
        span *= 2
    return MinPlusMatrix(closure)


def affine_solve(a: MinPlusMatrix, b) -> np.ndarray:
    """Unique fixed point x of x = (a ⊗ x) ⊕ b under positive circuits."""
    vec = np.array(b, dtype=float)
    if vec.ndim != 1 or vec.shape[0] != a.rows:
        raise ValueError(f"right-hand side must have length {a.rows}")
    if np.isnan(vec).any() or (vec == -math.inf).any():
        raise ValueError("right-hand side entries must be finite or EPSILON")
    star = kleene_star(a)
    if a.rows == 0:
        return vec
    return (star.entries + vec[None, :]).min(axis=1)
