"""Numerical verification scans for the convergence-region analysis.

Three families of claims are checked on dense grids: positivity of the
discriminants that make the region-endpoint roots real, monotonicity of
those endpoints in nu, and strict positivity of the slope of the
decreasing-branch derivative of g on (0,1) x (0,1) (which makes the optimal
parameter the unique root of that derivative).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import DomainError
from .params import convergent_region

__all__ = [
    "ScanReport",
    "delta_values",
    "scan_g1_derivative",
    "scan_delta_signs",
    "check_root_monotonicity",
]

_SQRT_HALF = math.sqrt(2.0) / 2.0
_BRANCH_TOL = 1e-10


@dataclass(frozen=True)
class ScanReport:
    """Result of a grid scan of a predicate.

    ``violations`` holds the grid points where the predicate failed (empty
    iff it held everywhere); ``skipped`` the points that could not be
    evaluated.  ``min_value`` and ``argmin`` locate the tightest margin seen.
    """

    grid_spec: tuple
    min_value: float
    argmin: tuple
    violations: tuple = ()
    skipped: tuple = field(default=())

    @property
    def passed(self):
        return len(self.violations) == 0


def _grid_spec(grid):
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size < 2:
        return (float(grid[0]), float(grid[-1]), None)
    steps = np.diff(grid)
    step = float(steps[0]) if np.allclose(steps, steps[0], rtol=1e-9, atol=0) else None
    return (float(grid[0]), float(grid[-1]), step)


def delta_values(nu):
    """The three discriminants guarding realness of the region endpoints.

    With gamma = sqrt(-(nu-1)(nu+5)) and zeta = sqrt(-(nu+1)(nu-5)):

        delta1 = -(8nu^3 - 16nu^2 + 4nu - 1) + (nu/gamma)(8nu^3 + 30nu^2 - 48nu + 10)
        delta2 =  (8nu^3 + 16nu^2 + 4nu + 1) - (nu/zeta)(8nu^3 - 30nu^2 - 48nu - 10)
        delta3 = -(8nu^3 - 16nu^2 + 4nu - 1) - (nu/gamma)(8nu^3 + 30nu^2 - 48nu + 10)

    delta1 and delta2 positive make the endpoints real below the branch
    value sqrt(2)/2; delta1 and delta3 positive handle the range above it.
    """
    if not 0.0 < nu < 1.0:
        raise DomainError(f"nu must lie in (0, 1), got {nu!r}")
    if abs(2.0 * nu * nu - 1.0) < _BRANCH_TOL:
        raise DomainError("delta values are not defined at the branch value sqrt(2)/2")
    gamma = math.sqrt(-(nu - 1.0) * (nu + 5.0))
    zeta = math.sqrt(-(nu + 1.0) * (nu - 5.0))
    base = -(8.0 * nu ** 3 - 16.0 * nu ** 2 + 4.0 * nu - 1.0)
    p = 8.0 * nu ** 3 + 30.0 * nu ** 2 - 48.0 * nu + 10.0
    q = 8.0 * nu ** 3 - 30.0 * nu ** 2 - 48.0 * nu - 10.0
    d1 = base + nu / gamma * p
    d2 = (8.0 * nu ** 3 + 16.0 * nu ** 2 + 4.0 * nu + 1.0) - nu / zeta * q
    d3 = base - nu / gamma * p
    return d1, d2, d3


def _check_grid(grid, name):
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError(f"{name} grid must be a nonempty 1-D array")
    if grid.min() <= 0.0 or grid.max() >= 1.0:
        raise DomainError(f"{name} grid must lie strictly inside (0, 1)")
    return grid


def scan_g1_derivative(nu_grid, omega_grid):
    """Scan the slope of the decreasing-branch derivative of g on a grid.

    Reports the minimum value with its (nu, omega) location, every
    nonpositive grid value as a violation, and every point where the
    formula's square-root radicand was nonpositive as skipped.
    """
    nu_grid = _check_grid(nu_grid, "nu")
    omega_grid = _check_grid(omega_grid, "omega")
    vals = kernels.g1prime_grid(nu_grid, omega_grid)
    finite = np.isfinite(vals)
    skipped = tuple(
        (float(nu_grid[i]), float(omega_grid[j])) for i, j in zip(*np.nonzero(~finite))
    )
    if not finite.any():
        raise DomainError("no grid point could be evaluated")
    masked = np.where(finite, vals, np.inf)
    flat = int(np.argmin(masked))
    i, j = np.unravel_index(flat, vals.shape)
    min_value = float(vals[i, j])
    argmin = (float(nu_grid[i]), float(omega_grid[j]))
    bad = finite & (vals <= 0.0)
    violations = tuple(
        (float(nu_grid[i2]), float(omega_grid[j2]), float(vals[i2, j2]))
        for i2, j2 in zip(*np.nonzero(bad))
    )
    return ScanReport(
        grid_spec=(_grid_spec(nu_grid), _grid_spec(omega_grid)),
        min_value=min_value,
        argmin=argmin,
        violations=violations,
        skipped=skipped,
    )


def scan_delta_signs(step=0.001):
    """Positivity scan of the endpoint discriminants on both nu ranges.

    Below the branch value the first two discriminants must be positive, and
    above it the first and third; the grid skips one step on either side of
    sqrt(2)/2 and of the interval ends.
    """
    if step <= 0 or step >= 0.5:
        raise DomainError("step must lie in (0, 0.5)")
    low = np.arange(step, 0.7071 - step / 2, step)
    high = np.arange(0.708, 1.0 - step / 2, step)
    violations = []
    min_value = np.inf
    argmin = (np.nan, None)
    for nu in low:
        d1, d2, _ = delta_values(float(nu))
        for label, d in (("delta1", d1), ("delta2", d2)):
            if d < min_value:
                min_value, argmin = d, (float(nu), label)
            if d <= 0:
                violations.append((float(nu), label, float(d)))
    for nu in high:
        d1, _, d3 = delta_values(float(nu))
        for label, d in (("delta1", d1), ("delta3", d3)):
            if d < min_value:
                min_value, argmin = d, (float(nu), label)
            if d <= 0:
                violations.append((float(nu), label, float(d)))
    return ScanReport(
        grid_spec=(_grid_spec(low), _grid_spec(high)),
        min_value=float(min_value),
        argmin=argmin,
        violations=tuple(violations),
    )


def check_root_monotonicity(nu_grid):
    """Finite-difference monotonicity and realness check of region endpoints.

    On each side of the branch value the lower endpoint must increase with
    nu and the upper endpoint decrease; realness requires nonnegative
    square-root arguments in the closed forms, checked through the
    discriminants and the gamma/zeta radicands.
    """
    nu_grid = _check_grid(nu_grid, "nu")
    below = nu_grid[nu_grid < _SQRT_HALF - _BRANCH_TOL]
    above = nu_grid[nu_grid > _SQRT_HALF + _BRANCH_TOL]
    violations = []
    min_value = np.inf
    argmin = (np.nan, None)

    def scan_branch(values, tag):
        nonlocal min_value, argmin
        if values.size == 0:
            return
        regions = [convergent_region(float(nu)) for nu in values]
        lows = np.array([r.lo for r in regions])
        highs = np.array([r.hi for r in regions])
        for nu, lo_slope, hi_slope in zip(values[1:], np.diff(lows), np.diff(highs)):
            if lo_slope <= 0:
                violations.append((float(nu), f"{tag}-lower-slope", float(lo_slope)))
            if hi_slope >= 0:
                violations.append((float(nu), f"{tag}-upper-slope", float(hi_slope)))
            margin = min(lo_slope, -hi_slope)
            if margin < min_value:
                min_value, argmin = float(margin), (float(nu), f"{tag}-slope")
        for nu in values:
            nu = float(nu)
            for label, radicand in (
                ("gamma-radicand", -(nu - 1.0) * (nu + 5.0)),
                ("zeta-radicand", -(nu + 1.0) * (nu - 5.0)),
            ):
                if radicand < 0:
                    violations.append((nu, label, radicand))
            d1, d2, d3 = delta_values(nu)
            needed = (d1, d2) if nu < _SQRT_HALF else (d1, d3)
            for label, d in zip(("delta1", "delta2" if nu < _SQRT_HALF else "delta3"), needed):
                if d < 0:
                    violations.append((nu, f"{label}-realness", float(d)))

    scan_branch(below, "below")
    scan_branch(above, "above")
    return ScanReport(
        grid_spec=(_grid_spec(nu_grid), None),
        min_value=float(min_value),
        argmin=argmin,
        violations=tuple(violations),
    )
