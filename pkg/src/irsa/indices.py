"""Region-based Sobol' indices of cluster-membership outputs.

A region C of the output space is scalarized through its indicator
1_C(Y) (or through a difference 1_C(Y) - 1_C'(Y) for two disjoint regions),
and the first-order / total Sobol' indices of an input are estimated on that
scalar with the Jansen pick-and-freeze formulas:

    first order:  SI_i  = (V - (1/2n) sum_r (f_B[r] - f_ABi[r])^2) / V
    total:        TSI_i = ((1/2n) sum_r (f_A[r] - f_ABi[r])^2) / V

where f_A, f_B, f_ABi are the scalarized outputs on the design blocks and V
is the empirical variance of the scalar over the pooled A and B blocks
(population variance, ddof=0).  Estimates are reported raw (they can fall
slightly outside [0, 1] from Monte Carlo noise); any clamping happens only
at rendering time.

The module also provides the discretized first-order index of a region
computed from the histogram of the conditioning input,

    dsi(h) = n_x / (S (N - S)) * sum_i (h_i - S/n_x)^2,   S = sum_j h_j,

used by the histogram-merging optimization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import DegenerateVarianceError

# Below this, the membership variance is treated as exactly zero.
VARIANCE_FLOOR = 1e-12

SINGLE = "single"
DIFFERENCE = "difference"


@dataclass(frozen=True)
class MembershipVector:
    """Scalarized region membership of every design row.

    ``kind`` is "single" (values in {0, 1}) or "difference" (values in
    {-1, 0, 1}, from two disjoint regions).
    """

    values: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in (SINGLE, DIFFERENCE):
            raise ValueError(f"unknown membership kind {self.kind!r}")
        lo = 0 if self.kind == SINGLE else -1
        v = self.values
        if v.ndim != 1 or not np.all((v >= lo) & (v <= 1)):
            raise ValueError(f"membership values must be a flat vector in [{lo}, 1]")


@dataclass(frozen=True)
class RegionIndices:
    """First-order and total index of one input for one region."""

    first_order: float
    total: float
    input_index: int


@dataclass(frozen=True)
class Histogram:
    """Histogram of one input conditioned on outputs falling in one cluster.

    Bins partition the input's range uniformly; counts come from the
    conditioning sample only (A-block rows).  An all-zero histogram marks a
    cluster with no conditioning points.
    """

    bins: np.ndarray
    input_index: int
    cluster_id: int

    @property
    def n_x(self) -> int:
        return len(self.bins)

    @property
    def is_empty(self) -> bool:
        return int(self.bins.sum()) == 0


def _check_part(part: Iterable[int], k: int, label: str) -> frozenset[int]:
    ids = frozenset(int(c) for c in part)
    if not ids:
        raise ValueError(f"{label} must be a non-empty set of cluster ids")
    bad = [c for c in ids if not (1 <= c <= k)]
    if bad:
        raise ValueError(f"{label} contains ids {sorted(bad)} outside [1, {k}]")
    return ids


def membership(assignment, part: Iterable[int]) -> MembershipVector:
    """Indicator of ``part`` (a set of 1-based cluster ids) per design row."""
    ids = _check_part(part, assignment.n_clusters, "part")
    lookup = np.zeros(assignment.n_clusters + 1, dtype=np.int8)
    lookup[list(ids)] = 1
    return MembershipVector(values=lookup[assignment.labels], kind=SINGLE)


def membership_difference(assignment, part_c: Iterable[int], part_cprime: Iterable[int]) -> MembershipVector:
    """Signed indicator 1_C - 1_C' for two disjoint sets of cluster ids."""
    ids_c = _check_part(part_c, assignment.n_clusters, "part_c")
    ids_cp = _check_part(part_cprime, assignment.n_clusters, "part_cprime")
    overlap = ids_c & ids_cp
    if overlap:
        raise ValueError(f"parts overlap on cluster ids {sorted(overlap)}")
    lookup = np.zeros(assignment.n_clusters + 1, dtype=np.int8)
    lookup[list(ids_c)] = 1
    lookup[list(ids_cp)] = -1
    return MembershipVector(values=lookup[assignment.labels], kind=DIFFERENCE)


MemberLike = Union[MembershipVector, np.ndarray]


def _member_values(member: MemberLike) -> np.ndarray:
    values = getattr(member, "values", member)
    return np.asarray(values, dtype=float)


def _blocks(values: np.ndarray, layout: tuple[int, int], i: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n, d = layout
    if values.shape[0] != n * (d + 2):
        raise ValueError(
            f"membership length {values.shape[0]} does not match layout n={n}, d={d} (N={n * (d + 2)})"
        )
    if not (0 <= i < d):
        raise ValueError(f"input index {i} outside [0, {d})")
    f_a = values[:n]
    f_b = values[n : 2 * n]
    f_ab = values[(2 + i) * n : (3 + i) * n]
    return f_a, f_b, f_ab


def _pooled_variance(values: np.ndarray, n: int) -> float:
    v = float(np.var(values[: 2 * n]))
    if v < VARIANCE_FLOOR:
        raise DegenerateVarianceError(
            f"membership variance {v:.3e} below {VARIANCE_FLOOR:.0e}; region is (almost) everything or nothing"
        )
    return v


def first_order_index(member: MemberLike, design_layout: tuple[int, int], i: int) -> float:
    """Jansen first-order index estimate of input ``i`` (0-based design column).

    Raises:
        DegenerateVarianceError: If the membership has no variance (all rows
            inside or all outside the region).
    """
    values = _member_values(member)
    f_a, f_b, f_ab = _blocks(values, design_layout, i)
    v = _pooled_variance(values, design_layout[0])
    return 1.0 - float(np.mean((f_b - f_ab) ** 2)) / (2.0 * v)


def total_order_index(member: MemberLike, design_layout: tuple[int, int], i: int) -> float:
    """Jansen total index estimate of input ``i`` (0-based design column)."""
    values = _member_values(member)
    f_a, f_b, f_ab = _blocks(values, design_layout, i)
    v = _pooled_variance(values, design_layout[0])
    return float(np.mean((f_a - f_ab) ** 2)) / (2.0 * v)


def region_indices(member: MemberLike, design_layout: tuple[int, int], i: int) -> RegionIndices:
    """Both indices of one input for one membership vector."""
    return RegionIndices(
        first_order=first_order_index(member, design_layout, i),
        total=total_order_index(member, design_layout, i),
        input_index=i,
    )


def first_order_all_inputs(member: MemberLike, design_layout: tuple[int, int]) -> np.ndarray:
    """Vectorized first-order estimates for every input at once, shape (d,)."""
    values = _member_values(member)
    n, d = design_layout
    if values.shape[0] != n * (d + 2):
        raise ValueError("membership length does not match layout")
    v = _pooled_variance(values, n)
    f_b = values[n : 2 * n]
    f_ab = values[2 * n :].reshape(d, n)
    return 1.0 - np.mean((f_b[None, :] - f_ab) ** 2, axis=1) / (2.0 * v)


def total_order_all_inputs(member: MemberLike, design_layout: tuple[int, int]) -> np.ndarray:
    """Vectorized total estimates for every input at once, shape (d,)."""
    values = _member_values(member)
    n, d = design_layout
    if values.shape[0] != n * (d + 2):
        raise ValueError("membership length does not match layout")
    v = _pooled_variance(values, n)
    f_a = values[:n]
    f_ab = values[2 * n :].reshape(d, n)
    return np.mean((f_a[None, :] - f_ab) ** 2, axis=1) / (2.0 * v)


def discretized_si(h: Histogram | np.ndarray, n_total: int, n_x: int | None = None) -> float:
    """Discretized first-order index of a region from its input histogram.

    Args:
        h: Histogram (or a bare bin-count vector) of the conditioning input
            restricted to the region.
        n_total: Size of the full conditioning sample.
        n_x: Expected bin count; validated against ``h`` when given.

    Raises:
        DegenerateVarianceError: If the region holds none or all of the
            conditioning sample.
    """
    bins = np.asarray(getattr(h, "bins", h), dtype=float)
    if bins.ndim != 1 or len(bins) < 2:
        raise ValueError("histogram must be a flat vector with at least 2 bins")
    if np.any(bins < 0):
        raise ValueError("histogram bins must be non-negative")
    if n_x is not None and n_x != len(bins):
        raise ValueError(f"histogram has {len(bins)} bins, expected n_x={n_x}")
    nx = len(bins)
    s = float(bins.sum())
    if s <= 0 or s >= n_total:
        raise DegenerateVarianceError(
            f"region holds {s:g} of {n_total} conditioning points; index undefined"
        )
    dev = bins - s / nx
    return nx / (s * (n_total - s)) * float(np.sum(dev**2))
