"""Uniform-grid densities on the real line.

A ``GridFunction`` stores nonnegative cell values sampled at equally spaced
cell centers ``x0 + i*dx``.  Quadrature is the midpoint-cell rectangle rule
``dx * sum(values)``, which is exactly invariant under permutation of the
values; the rearrangement code relies on that exactness.  Values outside the
declared grid range are defined to be zero, so callers should pick windows
wide enough that the boundary cells carry negligible mass.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

# A cell counts as "in the support" iff its value exceeds this.
SUPPORT_THRESHOLD = 1e-300


class DomainError(ValueError):
    """An argument is outside the operation's domain."""


class PreconditionError(ValueError):
    """A structural precondition on the input data does not hold."""


@dataclass(frozen=True)
class GridFunction:
    """Nonnegative function sampled on a uniform grid.

    ``x0`` is the coordinate of the first cell center, ``dx`` the spacing,
    ``values`` the cell values (length >= 2, all finite and >= 0).
    Instances are immutable; the value array is marked read-only.
    """

    x0: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise DomainError("values must be a 1-D sequence with at least 2 cells")
        if not np.isfinite(self.x0) or not np.isfinite(self.dx) or self.dx <= 0:
            raise DomainError("need finite x0 and dx > 0")
        if not np.all(np.isfinite(vals)):
            raise DomainError("values must be finite")
        if np.any(vals < 0):
            raise DomainError("values must be nonnegative")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def centers(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.values.size)

    @property
    def x_last(self) -> float:
        return self.x0 + self.dx * (self.values.size - 1)

    def evaluate(self, x) -> np.ndarray:
        """Linear interpolation of cell values at cell centers, zero outside."""
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.centers, self.values, left=0.0, right=0.0)
        return out

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.x0, self.dx, values)


@dataclass(frozen=True)
class SupportWindow:
    """Index window [lo_index, hi_index]; cells outside hold values <= threshold."""

    lo_index: int
    hi_index: int
    threshold: float = 0.0

    def __post_init__(self):
        if self.lo_index > self.hi_index:
            raise DomainError("lo_index must be <= hi_index")
        if self.threshold < 0:
            raise DomainError("threshold must be >= 0")


def mass(f: GridFunction) -> float:
    """Rectangle-rule integral dx * sum(values).

    Uses exact (correctly rounded) summation so the result is invariant under
    any permutation of the values, which the rearrangement code relies on.
    """
    import math

    return f.dx * math.fsum(f.values)


def sup_norm(f: GridFunction) -> float:
    return float(np.max(f.values))


def normalize(f: GridFunction) -> GridFunction:
    m = mass(f)
    if m <= 0:
        raise DomainError("zero mass")
    return GridFunction(f.x0, f.dx, f.values / m)


def scale_amplitude(f: GridFunction, a: float) -> GridFunction:
    if not (a > 0) or not np.isfinite(a):
        raise DomainError("amplitude factor must be positive and finite")
    return GridFunction(f.x0, f.dx, f.values * a)


def translate(f: GridFunction, s: float) -> GridFunction:
    """Shift the grid origin by s.  Coordinates are real-valued; no snapping."""
    if not np.isfinite(s):
        raise DomainError("shift must be finite")
    return GridFunction(f.x0 + s, f.dx, f.values)


def support_indices(f: GridFunction):
    """(first, last) indices of cells above the support threshold, or None."""
    idx = np.nonzero(f.values > SUPPORT_THRESHOLD)[0]
    if idx.size == 0:
        return None
    return int(idx[0]), int(idx[-1])


def resample(f: GridFunction, x0: float, dx: float, n: int) -> GridFunction:
    """Resample onto another uniform grid by linear interpolation at centers."""
    if dx <= 0 or n < 2:
        raise DomainError("need dx > 0 and n >= 2")
    xs = x0 + dx * np.arange(n)
    return GridFunction(x0, dx, f.evaluate(xs))


def l1_distance(f: GridFunction, g: GridFunction) -> float:
    """L1 distance between the piecewise-linear interpolants of f and g.

    On a shared grid this is the plain rectangle sum.  For distinct grids the
    integral of |f - g| is evaluated exactly segment by segment over the
    merged breakpoint set (both interpolants are linear between consecutive
    breakpoints, and zero outside their declared ranges).  Exactness makes the
    distance a true metric, so the triangle inequality holds regardless of how
    the two grids interleave; per-pair resampling would break it at quadrature
    order.
    """
    if f.x0 == g.x0 and f.dx == g.dx and f.n == g.n:
        return float(f.dx * np.sum(np.abs(f.values - g.values)))
    xs = np.unique(np.concatenate([f.centers, g.centers]))
    h = np.diff(xs)
    t1 = xs[:-1] + h / 3.0
    t2 = xs[:-1] + 2.0 * h / 3.0
    d1 = f.evaluate(t1) - g.evaluate(t1)
    d2 = f.evaluate(t2) - g.evaluate(t2)
    # reconstruct the segment-endpoint values of the linear difference
    e0 = 2.0 * d1 - d2
    e1 = 2.0 * d2 - d1
    tot = np.abs(e0) + np.abs(e1)
    crossing = (e0 * e1 < 0) & (tot > 0)
    seg = np.where(
        crossing,
        (e0 ** 2 + e1 ** 2) / np.where(tot > 0, 2.0 * tot, 1.0),
        0.5 * tot,
    )
    return float(np.sum(h * seg))


def tail_mass(f: GridFunction, window: SupportWindow) -> float:
    """Mass of f outside the window's index range."""
    lo = max(window.lo_index, 0)
    hi = min(window.hi_index, f.n - 1)
    if lo > f.n - 1 or hi < 0:
        return mass(f)
    inside = float(f.dx * np.sum(f.values[lo : hi + 1]))
    return mass(f) - inside


def boundary_mass(f: GridFunction, edge_cells: int = 2) -> float:
    """Mass carried by the outermost cells; should be tiny for a good window."""
    k = min(edge_cells, f.n)
    return float(f.dx * (np.sum(f.values[:k]) + np.sum(f.values[-k:])))


def from_csv(path) -> GridFunction:
    """Read a two-column ``x,value`` file with equally spaced increasing x."""
    xs, vs = [], []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        for row in reader:
            if not row or row[0].strip().startswith("#"):
                continue
            if row[0].strip().lower() == "x":
                continue
            if len(row) != 2:
                raise DomainError(f"expected two columns, got {len(row)}: {row!r}")
            xs.append(float(row[0]))
            vs.append(float(row[1]))
    if len(xs) < 2:
        raise DomainError("need at least two samples")
    x = np.asarray(xs)
    steps = np.diff(x)
    if np.any(steps <= 0):
        raise DomainError("x must be strictly increasing")
    dx = float(np.mean(steps))
    if np.max(np.abs(steps - dx)) > 1e-9 * max(abs(dx), 1e-30):
        raise DomainError("x must be equally spaced (1e-9 relative tolerance)")
    return GridFunction(float(x[0]), dx, np.asarray(vs))


def to_csv(f: GridFunction, path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", "value"])
        for x, v in zip(f.centers, f.values):
            writer.writerow([repr(float(x)), repr(float(v))])
