"""Pick-and-freeze experiment designs over independent uniform inputs.

The design consists of two independent uniform sample matrices A and B of
shape (n, d) plus d hybrid matrices AB_i, where AB_i equals A with column i
replaced by column i of B.  Evaluating a model on all blocks gives
N = n * (d + 2) output rows and supports estimating both first-order and
total Sobol' indices for every input from a single evaluation set.

Row-stacking order is a frozen contract relied on by the index estimators
and by the CSV file format:

    rows [0, n)            -> A
    rows [n, 2n)           -> B
    rows [(2+i)n, (3+i)n)  -> AB_i  for input column i = 0..d-1

Sampling is plain pseudo-random (PCG64 via ``numpy.random.default_rng``),
drawn column-wise: matrix A first, then B, each as one ``uniform`` call over
the per-column bounds.  Identical (inputs, n, seed) therefore reproduce a
bit-identical design.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, EvaluationError


def _fmt(x: float) -> str:
    """Format a float at 17 significant digits (lossless float64 round-trip)."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class InputSpec:
    """One uncertain model input with a uniform distribution on [lower, upper]."""

    name: str
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not self.name:
            raise ConfigurationError("input name must be non-empty")
        if not (self.lower < self.upper):
            raise ConfigurationError(
                f"input {self.name!r}: lower ({self.lower}) must be < upper ({self.upper})"
            )


@dataclass(frozen=True)
class SobolDesign:
    """Pick-and-freeze sample matrices for one experiment.

    Attributes:
        inputs: Per-column input specifications.
        n: Base sample size (rows of A and of B).
        seed: PRNG seed the matrices were drawn with.
        matrix_a: (n, d) base sample.
        matrix_b: (n, d) independent base sample.
        matrices_ab: (d, n, d); ``matrices_ab[i]`` is A with column i from B.
    """

    inputs: tuple[InputSpec, ...]
    n: int
    seed: int
    matrix_a: np.ndarray
    matrix_b: np.ndarray
    matrices_ab: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.inputs)

    @property
    def n_total(self) -> int:
        """Total number of design rows, n * (d + 2)."""
        return self.n * (self.dim + 2)

    @property
    def names(self) -> list[str]:
        return [spec.name for spec in self.inputs]

    @property
    def layout(self) -> tuple[int, int]:
        """(n, d) pair consumed by the index estimators."""
        return self.n, self.dim

    def stacked(self) -> np.ndarray:
        """All design rows in the frozen stacking order, shape (N, d)."""
        return np.vstack([self.matrix_a, self.matrix_b, *self.matrices_ab])


@dataclass(frozen=True)
class OutputEnsemble:
    """Model outputs aligned row-for-row with a stacked design.

    Attributes:
        values: (N, m) output matrix; m is 1 for scalar outputs, 2 for planar
            outputs, or T for time series.
        output_dim: m.
    """

    values: np.ndarray
    output_dim: int

    def __post_init__(self) -> None:
        if self.values.ndim != 2 or self.values.shape[1] != self.output_dim:
            raise EvaluationError(
                f"output matrix has shape {self.values.shape}, expected (N, {self.output_dim})"
            )
        if not np.all(np.isfinite(self.values)):
            bad = int(np.flatnonzero(~np.isfinite(self.values).all(axis=1))[0])
            raise EvaluationError(f"non-finite model output at row {bad}")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]


def build_design(inputs: Sequence[InputSpec], n: int, seed: int) -> SobolDesign:
    """Draw a pick-and-freeze design.

    Args:
        inputs: One spec per input; names must be unique.
        n: Base sample size, at least 2.  Total rows will be n * (d + 2).
        seed: Seed for the PCG64 generator.

    Returns:
        A SobolDesign with the documented A / B / AB_i stacking.

    Raises:
        ConfigurationError: On duplicate names, empty input list or n < 2.
    """
    if not inputs:
        raise ConfigurationError("at least one input is required")
    if int(n) != n or n < 2:
        raise ConfigurationError(f"base sample size must be an integer >= 2, got {n!r}")
    names = [spec.name for spec in inputs]
    if len(set(names)) != len(names):
        raise ConfigurationError(f"input names must be unique, got {names}")

    d = len(inputs)
    lo = np.array([spec.lower for spec in inputs])
    hi = np.array([spec.upper for spec in inputs])
    rng = np.random.default_rng(seed)
    matrix_a = rng.uniform(lo, hi, size=(n, d))
    matrix_b = rng.uniform(lo, hi, size=(n, d))
    matrices_ab = np.repeat(matrix_a[None, :, :], d, axis=0)
    for i in range(d):
        matrices_ab[i, :, i] = matrix_b[:, i]
    return SobolDesign(
        inputs=tuple(inputs),
        n=int(n),
        seed=int(seed),
        matrix_a=matrix_a,
        matrix_b=matrix_b,
        matrices_ab=matrices_ab,
    )


def _normalize_row_output(out: object, row: int) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(out, dtype=float))
    if arr.ndim != 1:
        raise EvaluationError(f"model output at row {row} is not a flat vector: shape {arr.shape}")
    return arr


def evaluate_model(
    model: Callable[[np.ndarray], object],
    design: SobolDesign,
    threads: int = 1,
    batch: bool = False,
) -> OutputEnsemble:
    """Evaluate a model on every stacked design row, preserving row order.

    Args:
        model: With ``batch=False`` (default) a function of one d-vector
            returning an m-vector (or scalar).  With ``batch=True`` a function
            of a (k, d) matrix returning a (k, m) matrix.
        design: The design to evaluate.
        threads: Evaluate row chunks on this many threads.  Results are
            written back by row index, so the output is order-deterministic
            regardless of completion order.
        batch: Select the matrix calling convention.

    Raises:
        EvaluationError: On non-finite output (the failing row is named) or
            inconsistent output dimension.
    """
    x = design.stacked()
    n_rows = x.shape[0]
    threads = max(1, int(threads))

    if batch:
        chunks = np.array_split(np.arange(n_rows), min(threads, n_rows))
        first = np.asarray(model(x[chunks[0]]), dtype=float)
        if first.ndim == 1:
            first = first[:, None]
        m = first.shape[1]
        values = np.empty((n_rows, m))
        values[chunks[0]] = first

        def eval_chunk(idx: np.ndarray) -> None:
            out = np.asarray(model(x[idx]), dtype=float)
            if out.ndim == 1:
                out = out[:, None]
            if out.shape != (len(idx), m):
                raise EvaluationError(
                    f"batch output shape {out.shape} does not match ({len(idx)}, {m})"
                )
            values[idx] = out

        rest = [c for c in chunks[1:] if len(c)]
        if threads == 1:
            for c in rest:
                eval_chunk(c)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(eval_chunk, rest))
    else:
        first = _normalize_row_output(model(x[0]), 0)
        m = first.shape[0]
        values = np.empty((n_rows, m))
        values[0] = first

        def eval_rows(rows: np.ndarray) -> None:
            for r in rows:
                out = _normalize_row_output(model(x[r]), int(r))
                if out.shape[0] != m:
                    raise EvaluationError(
                        f"model output at row {int(r)} has dimension {out.shape[0]}, expected {m}"
                    )
                values[r] = out

        remaining = np.arange(1, n_rows)
        if threads == 1:
            eval_rows(remaining)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(eval_rows, np.array_split(remaining, threads)))

    return OutputEnsemble(values=values, output_dim=values.shape[1])


def write_design_csv(design: SobolDesign, path: str) -> None:
    """Write the stacked design as CSV (header = input names, one row per design row)."""
    _write_matrix_csv(design.names, design.stacked(), path)


def write_outputs_csv(outputs: OutputEnsemble, path: str, names: Sequence[str] | None = None) -> None:
    """Write an output ensemble as CSV; default column names are Y1..Ym."""
    if names is None:
        names = [f"Y{j + 1}" for j in range(outputs.output_dim)]
    if len(names) != outputs.output_dim:
        raise ConfigurationError(
            f"{len(names)} output names given for {outputs.output_dim} columns"
        )
    _write_matrix_csv(list(names), outputs.values, path)


def _write_matrix_csv(header: list[str], matrix: np.ndarray, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in matrix:
            writer.writerow([_fmt(v) for v in row])


def read_matrix_csv(path: str) -> tuple[list[str], np.ndarray]:
    """Read a matrix CSV written by this module; returns (header, float matrix)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigurationError(f"{path}: empty CSV") from None
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise ConfigurationError(f"{path}: CSV has a header but no data rows")
    matrix = np.asarray(rows, dtype=float)
    if matrix.shape[1] != len(header):
        raise ConfigurationError(
            f"{path}: row width {matrix.shape[1]} does not match header width {len(header)}"
        )
    return header, matrix
