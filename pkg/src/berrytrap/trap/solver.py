"""Finite-difference Laplace solver on a uniform grid.

7-point stencil with red-black successive over-relaxation; each drive-time
snapshot is an independent electrostatic solve (quasi-static approximation:
the drive is many orders of magnitude below electromagnetic time scales).
Grid nodes are spaced h apart on every axis with the center node at the
origin; node counts are odd so the trap center is exactly on-grid.  The
bounding box faces are a grounded enclosure.  Any node whose position lies
inside a rod cylinder is a Dirichlet node at that electrode's instantaneous
voltage.

The hot sweep runs through berrytrap.kernels, which selects the compiled
extension when available and the numpy fallback otherwise; both produce
identical iterates, and for a fixed tolerance the iteration is
deterministic.  The SOR iteration is exactly linear in the boundary values,
so solutions superpose and scale (doubling all voltages doubles the
converged potential to roundoff).
"""
from dataclasses import dataclass

import numpy as np

from .. import kernels

__all__ = ["PotentialGrid", "SolverConvergenceError", "laplace_solve", "sor_solve",
           "solve_dirichlet_box"]


class SolverConvergenceError(RuntimeError):
    """SOR failed to reach the target residual; carries the achieved value."""

    def __init__(self, message, residual, iterations):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class PotentialGrid:
    """Converged potential on a uniform grid.

    values[i, j, k] is the potential at origin + (i, j, k) * h; mask is
    nonzero on Dirichlet nodes (box faces and electrode interiors), which
    hold their assigned voltages exactly.  residual is the final relative
    residual max |u - mean(nbrs)| / scale over free nodes.
    """
    origin: np.ndarray
    h: float
    values: np.ndarray
    mask: np.ndarray
    residual: float
    iterations: int
    scale: float

    @property
    def shape(self):
        return self.values.shape

    @property
    def center_index(self):
        return tuple((n - 1) // 2 for n in self.shape)

    def axes(self):
        return tuple(self.origin[d] + self.h * np.arange(self.shape[d]) for d in range(3))

    def interpolate(self, points):
        """Trilinear interpolation of the potential at (n, 3) points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        rel = (pts - self.origin) / self.h
        lo = np.floor(rel).astype(int)
        for d in range(3):
            if lo[:, d].min() < 0 or lo[:, d].max() > self.shape[d] - 2:
                raise ValueError("interpolation point outside the grid")
        frac = rel - lo
        out = np.zeros(len(pts))
        for dx in (0, 1):
            for dy in (0, 1):
                for dz in (0, 1):
                    wgt = (np.where(dx, frac[:, 0], 1 - frac[:, 0])
                           * np.where(dy, frac[:, 1], 1 - frac[:, 1])
                           * np.where(dz, frac[:, 2], 1 - frac[:, 2]))
                    out += wgt * self.values[lo[:, 0] + dx, lo[:, 1] + dy, lo[:, 2] + dz]
        return out if len(out) > 1 else float(out[0])

    def field_at_node(self, index):
        """Central-difference field E = -grad V at a grid node."""
        i, j, k = index
        for d, n in zip(index, self.shape):
            if not 1 <= d <= n - 2:
                raise ValueError("field stencil needs an interior node")
        v = self.values
        return np.array([
            -(v[i + 1, j, k] - v[i - 1, j, k]) / (2 * self.h),
            -(v[i, j + 1, k] - v[i, j - 1, k]) / (2 * self.h),
            -(v[i, j, k + 1] - v[i, j, k - 1]) / (2 * self.h),
        ])

    def nearest_node(self, point):
        idx = np.rint((np.asarray(point, dtype=float) - self.origin) / self.h).astype(int)
        if np.any(idx < 0) or np.any(idx >= self.shape):
            raise ValueError("point outside the grid")
        return tuple(int(i) for i in idx)


def _optimal_omega(shape):
    rho = np.mean([np.cos(np.pi / (n - 1)) for n in shape])
    return 2.0 / (1.0 + np.sqrt(1.0 - rho * rho))


def sor_solve(values, mask, tol=1e-8, max_iters=100_000, omega=None,
              check_every=20, backend=None):
    """Relax ``values`` in place until the relative residual drops below tol.

    Dirichlet nodes (mask != 0) are untouched.  The residual is normalized
    by max(1, max |Dirichlet value|).  Raises SolverConvergenceError with
    the achieved residual when max_iters is exhausted.
    """
    kern = kernels.get_backend(backend) if backend else kernels
    u = np.ascontiguousarray(values, dtype=np.float64)
    fixed = np.ascontiguousarray(mask, dtype=np.uint8)
    if omega is None:
        omega = _optimal_omega(u.shape)
    scale = float(np.abs(u[fixed != 0]).max()) if (fixed != 0).any() else 1.0
    scale = max(scale, 1e-300)

    iterations = 0
    residual = kern.max_residual(u, fixed) / scale
    while residual > tol:
        for _ in range(check_every):
            kern.sor_pass(u, fixed, omega)
        iterations += check_every
        residual = kern.max_residual(u, fixed) / scale
        if residual <= tol:
            break
        if iterations >= max_iters:
            raise SolverConvergenceError(
                f"SOR did not reach tol={tol:g} within {iterations} iterations "
                f"(achieved relative residual {residual:.3e})",
                residual=residual, iterations=iterations)
    return u, float(residual), iterations


def _grid_geometry(box, h):
    half = np.asarray(box, dtype=float)
    counts = np.floor(half / h + 1e-9).astype(int)
    if np.any(counts < 2):
        raise ValueError("grid spacing too coarse for the bounding box")
    shape = tuple(2 * counts + 1)
    origin = -counts * h
    return origin, shape


def rasterize(model, t, h, pair_voltages=None):
    """Dirichlet mask and boundary values for a trap snapshot at time t."""
    if h > model.min_rod_radius() / 3.0 + 1e-12:
        raise ValueError(
            f"grid spacing h={h:g} does not resolve the smallest rod radius "
            f"{model.min_rod_radius():g} by at least 3 cells")
    origin, shape = _grid_geometry(model.box, h)
    x, y, z = (origin[d] + h * np.arange(shape[d]) for d in range(3))
    xg, yg, zg = np.meshgrid(x, y, z, indexing="ij")

    values = np.zeros(shape)
    mask = np.zeros(shape, dtype=np.uint8)
    # grounded enclosure
    mask[0, :, :] = mask[-1, :, :] = 1
    mask[:, 0, :] = mask[:, -1, :] = 1
    mask[:, :, 0] = mask[:, :, -1] = 1
    for rod in model.rods:
        inside = rod.contains(xg, yg, zg)
        mask[inside] = 1
        values[inside] = model.electrode_voltage(rod, t, pair_voltages)
    return origin, values, mask


def laplace_solve(model, t, h, tol=1e-8, max_iters=100_000, omega=None,
                  pair_voltages=None, backend=None):
    """Electrostatic snapshot of the trap at drive time t.

    ``pair_voltages`` overrides the quadrature drive with explicit per-pair
    voltages (used for characterization solves, e.g. energizing a single
    diagonal pair).
    """
    origin, values, mask = rasterize(model, t, h, pair_voltages)
    u, residual, iterations = sor_solve(values, mask, tol=tol, max_iters=max_iters,
                                        omega=omega, backend=backend)
    scale = float(np.abs(u[mask != 0]).max()) if (mask != 0).any() else 1.0
    u.flags.writeable = False
    mask.flags.writeable = False
    return PotentialGrid(origin=origin, h=h, values=u, mask=mask,
                         residual=residual, iterations=iterations,
                         scale=max(scale, 1e-300))


def solve_dirichlet_box(boundary_fn, half_extent, n, tol=1e-10, max_iters=200_000,
                        backend=None):
    """Solve the Laplace equation on a cube with V given on all faces.

    ``boundary_fn(x, y, z)`` evaluates the boundary potential on face node
    coordinate arrays.  Used by the analytic harmonic benchmarks.
    """
    if n % 2 == 0:
        raise ValueError("use an odd node count so the center is on-grid")
    h = 2.0 * half_extent / (n - 1)
    origin = np.array([-half_extent] * 3)
    ax = origin[0] + h * np.arange(n)
    xg, yg, zg = np.meshgrid(ax, ax, ax, indexing="ij")
    values = np.zeros((n, n, n))
    mask = np.zeros((n, n, n), dtype=np.uint8)
    for dim in range(3):
        for side in (0, -1):
            sl = [slice(None)] * 3
            sl[dim] = side
            sl = tuple(sl)
            mask[sl] = 1
            values[sl] = boundary_fn(xg[sl], yg[sl], zg[sl])
    u, residual, iterations = sor_solve(values, mask, tol=tol, max_iters=max_iters,
                                        backend=backend)
    scale = float(np.abs(u[mask != 0]).max()) if (mask != 0).any() else 1.0
    u.flags.writeable = False
    mask.flags.writeable = False
    return PotentialGrid(origin=origin, h=h, values=u, mask=mask,
                         residual=residual, iterations=iterations,
                         scale=max(scale, 1e-300))
