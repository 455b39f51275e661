"""Rotating tilted-gradient fields: analytic model, numeric traces, fits.

The analytic model is a gradient tensor with a single principal component
along an axis at polar angle theta, rotated about the trap axis the same
way the spin-side Hamiltonian family is: g(theta, phi) = W G' W^T with
W = Rz(-phi) Ry(-theta).  This is the spatial counterpart of
berrytrap.hamiltonian.axis_rotation, so contracting the quadrupole tensor
with g(theta, phi) reproduces the lab-frame Hamiltonian exactly.

Numeric quantities come from Laplace snapshots of a TrapModel: field traces
at an off-axis point, the potential along the trap's characteristic
diagonal with a polynomial fit, and the effective tilt angle of a gradient
tensor.  Note that with the full quadrature drive the snapshot potential is
exactly odd under z -> -z (the body-diagonal pairing maps the electrode
pattern onto its negative), which forces the central quadratic form to be a
pure transverse*z bilinear: its principal axes sit at exactly 45 degrees to
the trap axis and are degenerate in eigenvalue magnitude.  The trap's
diagonal angle is therefore measured from a characterization solve that
energizes a single rod pair, which breaks that symmetry and recovers the
rod-midline axis.
"""
import csv
from dataclasses import dataclass

import numpy as np

from .._ioutil import atomic_writer
from ..hamiltonian import SINGLE_COMPONENT, PHYSICAL, GradientTensor
from .solver import laplace_solve

__all__ = [
    "FieldTrace",
    "PolyFitReport",
    "DegenerateAxisError",
    "frame_rotation",
    "tilted_gradient_tensor",
    "analytic_field_at",
    "field_trace",
    "default_sample_point",
    "fit_diagonal_potential",
    "extract_effective_theta",
    "central_gradient_tensor",
    "measure_diagonal_angle",
    "trace_to_csv",
    "grid_to_csv",
]

CSV_SCHEMA_VERSION = "0.1.0"
MIN_TRACE_SAMPLES = 8


class DegenerateAxisError(ValueError):
    """Principal axis undefined: leading eigenvalue magnitudes coincide."""


@dataclass(frozen=True)
class FieldTrace:
    """Electric field components over one drive period at a fixed point."""
    point: np.ndarray
    times: np.ndarray
    e_samples: np.ndarray
    source: str

    def closure_error(self):
        scale = max(1.0, float(np.abs(self.e_samples).max()))
        return float(np.abs(self.e_samples[-1] - self.e_samples[0]).max()) / scale


@dataclass(frozen=True)
class PolyFitReport:
    """Least-squares polynomial fit of the potential along a line."""
    direction: np.ndarray
    s: np.ndarray
    values: np.ndarray
    coefficients: np.ndarray
    covariance: np.ndarray
    r_squared: float
    residuals: np.ndarray


def _rot_z(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rot_y(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def frame_rotation(theta, phi):
    """Spatial rotation W = Rz(-phi) Ry(-theta) matching the spin-side
    axis_rotation: conjugating spin operators by axis_rotation(j, theta, phi)
    transforms Cartesian tensors with this W."""
    return _rot_z(-phi) @ _rot_y(-theta)


def tilted_gradient_tensor(v0, theta, phi, mode=SINGLE_COMPONENT):
    """Gradient tensor with principal component -v0 along the tilted axis.

    mode "single-component" keeps only the single z'z' component,
    G' = diag(0, 0, -v0); "physical" completes it to the traceless
    G' = diag(v0/2, v0/2, -v0).
    """
    if mode == SINGLE_COMPONENT:
        gp = np.diag([0.0, 0.0, -v0])
    elif mode == PHYSICAL:
        gp = np.diag([v0 / 2.0, v0 / 2.0, -v0])
    else:
        raise ValueError(f"unknown gradient mode {mode!r}")
    w = frame_rotation(theta, phi)
    return GradientTensor(g=w @ gp @ w.T, mode=mode)


def analytic_field_at(point, t, v0, theta, omega, mode=SINGLE_COMPONENT):
    """Field of the rotating tilted gradient: E(r, t) = g(theta, omega t) r.

    Linear in the point (the field vanishes at the trap center) and
    periodic in t with period 2 pi / omega.
    """
    g = tilted_gradient_tensor(v0, theta, omega * t, mode=mode)
    return g.g @ np.asarray(point, dtype=float)


def default_sample_point(model):
    """Off-axis sample point: 10% of the endcap rod-center radius, on x."""
    rod = model.endcap_rods(0)[0]
    radial = float(np.hypot(rod.center[0], rod.center[1]))
    return np.array([0.1 * radial, 0.0, 0.0])


def field_trace(model, point, samples_per_period=16, source="analytic", *,
                theta=None, gradient_scale=None, mode=SINGLE_COMPONENT,
                h=None, tol=1e-8, max_iters=100_000, backend=None):
    """Field components over one drive period at an off-axis point.

    source "analytic": the rotating tilted-gradient model with tilt
    ``theta`` (default: the trap's diagonal angle) and overall scale
    ``gradient_scale`` (default v0 / |rod middle|^2; the physical drive
    amplitude only sets the curve's scale, not its shape).
    source "numeric": central-difference field of Laplace snapshots at the
    grid node nearest to the point; requires the grid spacing ``h``.
    """
    if samples_per_period < MIN_TRACE_SAMPLES:
        raise ValueError(f"need at least {MIN_TRACE_SAMPLES} samples per period")
    point = np.asarray(point, dtype=float)
    period = model.period
    times = np.linspace(0.0, period, samples_per_period + 1)

    if source == "analytic":
        if theta is None:
            theta = model.diagonal_angle()
        if gradient_scale is None:
            rod = model.endcap_rods(0)[0]
            gradient_scale = model.v0 / float(np.linalg.norm(rod.center)) ** 2
        e = np.stack([
            analytic_field_at(point, t, gradient_scale, theta, model.omega, mode=mode)
            for t in times])
        return FieldTrace(point=point, times=times, e_samples=e, source=source)

    if source != "numeric":
        raise ValueError(f"source must be 'analytic' or 'numeric', got {source!r}")
    if h is None:
        raise ValueError("numeric traces need the grid spacing h")
    samples = []
    node = None
    for t in times:
        grid = laplace_solve(model, t, h, tol=tol, max_iters=max_iters, backend=backend)
        if node is None:
            node = grid.nearest_node(point)
            if grid.mask[node]:
                raise ValueError("sample point lies on or inside an electrode")
        samples.append(grid.field_at_node(node))
    return FieldTrace(point=point, times=times, e_samples=np.stack(samples),
                      source=source)


def fit_diagonal_potential(grid, direction, s_max, degree=4, n_samples=61):
    """Least-squares polynomial fit of V along a line through the center.

    Samples the potential by trilinear interpolation at n_samples points
    s in [-s_max, s_max] along ``direction`` and fits sum_k c_k s^k.
    Returns coefficients (ascending order), their covariance
    sigma^2 (X^T X)^-1, per-sample residuals and R^2.
    """
    if n_samples < degree + 2:
        raise ValueError("need at least degree + 2 samples")
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    s = np.linspace(-s_max, s_max, n_samples)
    pts = s[:, None] * u[None, :]
    v = np.atleast_1d(grid.interpolate(pts))

    x = np.vander(s, degree + 1, increasing=True)
    coeffs, _, rank, _ = np.linalg.lstsq(x, v, rcond=None)
    if rank < degree + 1:
        raise ValueError(f"rank-deficient design matrix (rank {rank} < {degree + 1})")
    fit = x @ coeffs
    resid = v - fit
    ssr = float(resid @ resid)
    sst = float(np.sum((v - v.mean()) ** 2))
    dof = n_samples - (degree + 1)
    sigma2 = ssr / dof if dof > 0 else np.nan
    cov = sigma2 * np.linalg.inv(x.T @ x)
    r2 = 1.0 - ssr / sst if sst > 0 else 1.0
    return PolyFitReport(direction=u, s=s, values=v, coefficients=coeffs,
                         covariance=cov, r_squared=float(min(max(r2, 0.0), 1.0)),
                         residuals=resid)


def extract_effective_theta(g, degeneracy_rtol=1e-6):
    """Tilt angle of a gradient tensor: angle between its principal axis
    (largest-magnitude eigenvalue) and the trap z axis, in [0, pi/2].

    Raises DegenerateAxisError when the two largest eigenvalue magnitudes
    coincide within degeneracy_rtol (isotropic or bilinear-only tensors have
    no preferred axis).
    """
    if isinstance(g, GradientTensor):
        g = g.g
    g = np.asarray(g, dtype=float)
    w, v = np.linalg.eigh(0.5 * (g + g.T))
    order = np.argsort(np.abs(w))[::-1]
    mags = np.abs(w[order])
    if mags[0] == 0.0:
        raise DegenerateAxisError("zero tensor has no principal axis")
    if (mags[0] - mags[1]) <= degeneracy_rtol * mags[0]:
        raise DegenerateAxisError(
            f"principal axis undefined: leading |eigenvalues| {mags[0]:.6g} and "
            f"{mags[1]:.6g} coincide")
    axis = v[:, order[0]]
    return float(np.arccos(min(1.0, abs(axis[2]))))


def central_gradient_tensor(grid, stride=2):
    """Gradient tensor -d^2 V/dx_i dx_j at the trap center by finite
    differences with the given node stride."""
    c = np.array(grid.center_index)
    v = grid.values
    d = stride * grid.h
    hess = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            if i == j:
                ei = np.zeros(3, dtype=int)
                ei[i] = stride
                hess[i, i] = (v[tuple(c + ei)] - 2 * v[tuple(c)] + v[tuple(c - ei)]) / d**2
            else:
                ei = np.zeros(3, dtype=int)
                ej = np.zeros(3, dtype=int)
                ei[i] = stride
                ej[j] = stride
                hess[i, j] = (v[tuple(c + ei + ej)] - v[tuple(c + ei - ej)]
                              - v[tuple(c - ei + ej)] + v[tuple(c - ei - ej)]) / (4 * d**2)
    hess = 0.5 * (hess + hess.T)
    return -hess


def measure_diagonal_angle(model, h, tol=1e-8, max_iters=100_000, stride=2,
                           backend=None):
    """Effective tilt of the trap's characteristic diagonal, from a
    characterization solve with only the diagonal pair energized.

    Energizing a single body-diagonal pair breaks the quadrature drive's
    z-antisymmetry (which pins the full-drive central tensor to 45 degrees
    with degenerate principal magnitudes) and makes the central gradient
    tensor's principal axis track the rod-midline diagonal.
    """
    volts = [0.0] * 4
    volts[model.diagonal_pair] = model.v0
    grid = laplace_solve(model, 0.0, h, tol=tol, max_iters=max_iters,
                         pair_voltages=tuple(volts), backend=backend)
    return extract_effective_theta(central_gradient_tensor(grid, stride=stride))


def _schema_header(kind):
    return f"# schema=berrytrap/{kind} version={CSV_SCHEMA_VERSION}"


def trace_to_csv(trace, path):
    """Write a field trace as CSV (t, Ex, Ey, Ez) with a schema header."""
    with atomic_writer(path) as fh:
        fh.write(_schema_header("trace-v1") + "\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "Ex", "Ey", "Ez"])
        for t, e in zip(trace.times, trace.e_samples):
            writer.writerow([f"{t:.12g}", f"{e[0]:.12g}", f"{e[1]:.12g}", f"{e[2]:.12g}"])


def grid_to_csv(grid, path, stride=1):
    """Write a potential grid as CSV (x, y, z, V), optionally strided."""
    ax = grid.axes()
    with atomic_writer(path) as fh:
        fh.write(_schema_header("grid-v1") + "\n")
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "z", "V"])
        for i in range(0, grid.shape[0], stride):
            for j in range(0, grid.shape[1], stride):
                for k in range(0, grid.shape[2], stride):
                    writer.writerow([f"{ax[0][i]:.12g}", f"{ax[1][j]:.12g}",
                                     f"{ax[2][k]:.12g}", f"{grid.values[i, j, k]:.12g}"])
