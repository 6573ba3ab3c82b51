"""Domain types and dominance primitives for bi-objective minimization.

Everything here is immutable after construction and safe to share across
threads.  Both objectives are always minimized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

__all__ = [
    "ObjectivePoint",
    "ProblemSpec",
    "Realization",
    "ParetoSolution",
    "dominates",
    "weakly_dominates",
    "nondominated_filter",
]


@dataclass(frozen=True)
class ObjectivePoint:
    """A point (j1, j2) in objective space.  Components must be finite."""

    j1: float
    j2: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.j1) and math.isfinite(self.j2)):
            raise ValueError(f"objective point must be finite, got ({self.j1}, {self.j2})")

    def as_tuple(self) -> tuple[float, float]:
        return (self.j1, self.j2)


@dataclass(frozen=True)
class Realization:
    """The k-th element of the discrete product set Z_1 x ... x Z_nz.

    Indices are 1-based and follow lexicographic order with the last
    discrete variable varying fastest.
    """

    k: int
    z: tuple[float, ...]


@dataclass(frozen=True)
class ProblemSpec:
    """A mixed-discrete bi-objective minimization problem.

    ``objectives`` maps (y, z) to the pair (j1, j2).  When ``vectorized``
    is true, it must also accept a stacked array of continuous points with
    shape (m, n_y) and return shape (m, 2); the same batching contract
    applies to ``inequality_constraints`` (returning (m, n_g)) and
    ``gradient`` (returning (m, 2, n_y)).  Evaluators must be pure.

    ``gradient``, when given, is the derivative of both objectives with
    respect to the continuous variables only.  Without it the solver falls
    back to finite differences.

    When the objectives split as objectives(y, z) == base_objectives(y) +
    objective_offsets(z) (componentwise, and the full evaluator composes
    them exactly), supplying the pair lets the solver descend on the
    z-independent part.  Solve trajectories are then bitwise identical
    across realizations, which preserves exact objective-space ties
    between realizations that are mathematically equivalent.

    ``equality_constraints`` exists for schema fidelity only; supplying
    one is rejected (no solver path consumes it).
    """

    name: str
    n_y: int
    bounds: tuple[tuple[float, float], ...]
    discrete_sets: tuple[tuple[float, ...], ...]
    objectives: Callable
    inequality_constraints: Callable | None = None
    gradient: Callable | None = None
    equality_constraints: None = None
    vectorized: bool = False
    base_objectives: Callable | None = None
    objective_offsets: Callable | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "bounds", tuple((float(lo), float(hi)) for lo, hi in self.bounds))
        object.__setattr__(
            self, "discrete_sets", tuple(tuple(float(v) for v in zs) for zs in self.discrete_sets)
        )
        if self.n_y < 1 or len(self.bounds) != self.n_y:
            raise ValueError(f"need n_y >= 1 bounds pairs, got n_y={self.n_y}, {len(self.bounds)} bounds")
        for lo, hi in self.bounds:
            if not (lo < hi):
                raise ValueError(f"invalid bound pair ({lo}, {hi}): lower must be < upper")
        for j, zs in enumerate(self.discrete_sets):
            if not zs:
                raise ValueError(f"discrete set {j} is empty")
            if len(set(zs)) != len(zs):
                raise ValueError(f"discrete set {j} has repeated values: {zs}")
        if self.equality_constraints is not None:
            raise ValueError("equality constraints are not supported; the field is a schema slot only")
        if (self.base_objectives is None) != (self.objective_offsets is None):
            raise ValueError("base_objectives and objective_offsets must be supplied together")

    @property
    def n_z(self) -> int:
        return len(self.discrete_sets)

    def lower_bounds(self) -> np.ndarray:
        return np.array([lo for lo, _ in self.bounds])

    def upper_bounds(self) -> np.ndarray:
        return np.array([hi for _, hi in self.bounds])


@dataclass(frozen=True)
class ParetoSolution:
    """A candidate Pareto-optimal design: continuous part, realization,
    the evaluated objective point, and a tag recording which solve
    produced it ("anchor1", "anchor2", "center", or "w<i>" for the i-th
    weighted-sum weight)."""

    y: tuple[float, ...]
    realization: Realization
    point: ObjectivePoint
    provenance: str


def _check_eps(eps: float) -> None:
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")


def dominates(a: ObjectivePoint, b: ObjectivePoint, eps: float = 0.0) -> bool:
    """Strict Pareto dominance: a is no worse than b in both objectives
    (within eps) and strictly better (beyond eps) in at least one."""
    _check_eps(eps)
    return (
        a.j1 <= b.j1 + eps
        and a.j2 <= b.j2 + eps
        and (a.j1 < b.j1 - eps or a.j2 < b.j2 - eps)
    )


def weakly_dominates(a: ObjectivePoint, b: ObjectivePoint, eps: float = 0.0) -> bool:
    """Weak dominance: a is no worse than b in both objectives (within
    eps).  Equal points weakly dominate each other."""
    _check_eps(eps)
    return a.j1 <= b.j1 + eps and a.j2 <= b.j2 + eps


PointLike = Union[ObjectivePoint, ParetoSolution]


def _points_array(items: Sequence[PointLike]) -> np.ndarray:
    out = np.empty((len(items), 2))
    for i, it in enumerate(items):
        p = it if isinstance(it, ObjectivePoint) else it.point
        out[i, 0] = p.j1
        out[i, 1] = p.j2
    return out


def nondominated_mask(points: np.ndarray, eps: float = 0.0) -> np.ndarray:
    """Boolean mask of rows of ``points`` (shape (n, 2)) not strictly
    dominated by any other row.  Duplicates all survive.

    For eps == 0 a sort-and-scan is used; the merged fronts of the
    exhaustive oracle reach ~10^5 points, where the pairwise scan is
    noticeably slow.  Both paths are checked against a pairwise
    brute-force oracle in the test suite.
    """
    _check_eps(eps)
    n = points.shape[0]
    if n <= 1:
        return np.ones(n, dtype=bool)
    if eps == 0.0:
        return _nondominated_mask_scan(points)
    mask = np.ones(n, dtype=bool)
    j1, j2 = points[:, 0], points[:, 1]
    for i in range(n):
        le = (j1 <= j1[i] + eps) & (j2 <= j2[i] + eps)
        lt = (j1 < j1[i] - eps) | (j2 < j2[i] - eps)
        le[i] = False
        mask[i] = not bool(np.any(le & lt))
    return mask


def _nondominated_mask_scan(points: np.ndarray) -> np.ndarray:
    order = np.lexsort((points[:, 1], points[:, 0]))
    j1 = points[order, 0]
    j2 = points[order, 1]
    n = j1.shape[0]
    surv = np.ones(n, dtype=bool)
    best = np.inf  # min j2 among points with strictly smaller j1
    i = 0
    while i < n:
        j = i
        while j < n and j1[j] == j1[i]:
            j += 1
        gmin = j2[i:j].min()
        for t in range(i, j):
            # dominated by a strictly-smaller-j1 point with j2 <=, or by an
            # equal-j1 point with strictly smaller j2
            if best <= j2[t] or j2[t] > gmin:
                surv[t] = False
        best = min(best, gmin)
        i = j
    out = np.empty(n, dtype=bool)
    out[order] = surv
    return out


def nondominated_filter(items: Sequence[PointLike], eps: float = 0.0) -> list[PointLike]:
    """Keep exactly the inputs whose point is not strictly dominated by
    any other input's point, preserving input order.  Solutions with
    objective-identical points are all retained."""
    items = list(items)
    if not items:
        return []
    mask = nondominated_mask(_points_array(items), eps)
    return [it for it, keep in zip(items, mask) if keep]
