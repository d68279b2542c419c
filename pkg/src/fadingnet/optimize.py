"""One-dimensional maximization: coarse grid, then golden-section refinement."""

import math

import numpy as np

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI2 = (3 - math.sqrt(5)) / 2


class OptimizationError(RuntimeError):
    """The search grid does not bracket an interior maximum."""


def golden_section_max(f, a: float, b: float, tol: float = 1e-6):
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``.

    Stops once the bracket is narrower than ``tol``.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    fc, fd = f(c), f(d)
    while h > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + INV_PHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + INV_PHI * h
            fd = f(d)
        if c >= d:
            # bracket has collapsed to floating-point resolution
            break
    x = c if fc >= fd else d
    return x, max(fc, fd)


def grid_then_golden(f, grid, tol: float, vectorized: bool = True):
    """Locate the best grid point, then refine inside its two neighbours.

    Raises :class:`OptimizationError` when the best grid point is an
    endpoint, since the grid then brackets no interior maximum.
    """
    grid = np.asarray(grid, dtype=float)
    values = f(grid) if vectorized else np.array([f(x) for x in grid])
    values = np.where(np.isfinite(values), values, -np.inf)
    i = int(np.argmax(values))
    if i == 0 or i == len(grid) - 1:
        raise OptimizationError(
            f"maximum on the grid sits at the endpoint x={grid[i]:g}; no interior maximum bracketed"
        )

    def scalar(x):
        return float(f(np.asarray(x, dtype=float))) if vectorized else float(f(x))

    x, fx = golden_section_max(scalar, grid[i - 1], grid[i + 1], tol)
    if fx < values[i]:
        x, fx = grid[i], values[i]
    return float(x), float(fx)
