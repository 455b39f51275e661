"""Quadrupole-interaction Hamiltonians, spectra, and rotating-loop families.

The interaction of a state's quadrupole moment with an electric field
gradient is H = (1/6) sum_ij Q_ij dE_i/dx_j.  In the principal frame of the
gradient this reduces to H = alpha (sz^2 - S^2/3); the lab-frame family is
obtained by rotating the principal axis to polar angle theta and azimuth
phi.  The rotation orientation used here (active rotation by -phi about z,
then -theta about the rotated y axis, i.e. U = exp(+i phi sz) exp(+i theta
sy)) is the one fixed by requiring that the closed-form geometric phases of
berrytrap.berry emerge from the numerical loop methods with their stated
signs.
"""
from dataclasses import dataclass, field

import numpy as np

from .spin import spin_operators, wigner_small_d, z_phase

__all__ = [
    "GradientTensor",
    "SpectrumRecord",
    "NonHermitianError",
    "EigensolverError",
    "gradient_from_quadratic_potential",
    "principal_hamiltonian",
    "quadrupole_hamiltonian",
    "lab_hamiltonian",
    "zeeman_term",
    "eigensystem",
    "alpha_from_gradient",
    "axis_rotation",
    "QuadrupoleLoop",
    "ConeLoop",
    "rotating_frame_hamiltonian",
]

SINGLE_COMPONENT = "single-component"
PHYSICAL = "physical"


class NonHermitianError(ValueError):
    """Input matrix fails the Hermiticity check."""


class EigensolverError(RuntimeError):
    """The dense Hermitian eigensolver did not converge."""


@dataclass(frozen=True)
class GradientTensor:
    """Electric field gradient dE_i/dx_j as a symmetric 3x3 matrix (V/m^2).

    mode "physical" additionally enforces zero trace (Laplace equation in
    vacuum); "single-component" waives tracelessness for the single-component
    idealization where only dE_z'/dz' is retained.
    """
    g: np.ndarray
    mode: str = PHYSICAL

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        if g.shape != (3, 3):
            raise ValueError(f"gradient tensor must be 3x3, got shape {g.shape}")
        scale = max(1.0, float(np.abs(g).max()))
        if np.abs(g - g.T).max() > 1e-9 * scale:
            raise ValueError("gradient tensor must be symmetric (curl-free electrostatic field)")
        if self.mode not in (PHYSICAL, SINGLE_COMPONENT):
            raise ValueError(f"unknown gradient mode {self.mode!r}")
        if self.mode == PHYSICAL and abs(np.trace(g)) > 1e-9 * scale:
            raise ValueError("physical-mode gradient must be traceless (Laplace equation)")
        g = 0.5 * (g + g.T)
        g.flags.writeable = False
        object.__setattr__(self, "g", g)


@dataclass(frozen=True)
class SpectrumRecord:
    """Eigenvalues sorted descending with degeneracy grouping.

    degenerate_groups partitions the index range; within a group the
    eigenvectors are re-mixed to diagonalize sz and ordered by descending
    <sz>, which makes state labeling deterministic.
    """
    energies: np.ndarray
    degenerate_groups: tuple
    sz_expectations: np.ndarray


def gradient_from_quadratic_potential(coeffs):
    """Gradient tensor of the field E = -grad V for V(x) = x^T A x.

    ``coeffs`` is the symmetric quadratic-form matrix A; the resulting
    tensor is g_ij = -d^2 V/dx_i dx_j = -2 A_ij.  The mode is physical
    exactly when the quadratic form is harmonic (trace A = 0).
    """
    a = np.asarray(coeffs, dtype=float)
    if a.shape != (3, 3):
        raise ValueError(f"quadratic-form coefficients must be 3x3, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a - a.T).max() > 1e-9 * scale:
        raise ValueError("quadratic-form coefficient matrix must be symmetric")
    g = -2.0 * a
    mode = PHYSICAL if abs(np.trace(a)) <= 1e-12 * scale else SINGLE_COMPONENT
    return GradientTensor(g=g, mode=mode)


def principal_hamiltonian(alpha, j):
    """H = alpha (sz^2 - S^2/3) in the principal frame of the gradient."""
    ops = spin_operators(j)
    return alpha * (ops.sz @ ops.sz - (ops.j * (ops.j + 1) / 3.0) * np.eye(ops.dim))


def quadrupole_hamiltonian(q, g):
    """Interaction H = (1/6) sum_ij Q_ij g_ij for a quadrupole tensor and gradient."""
    if not isinstance(g, GradientTensor):
        g = GradientTensor(g=np.asarray(g, dtype=float), mode=SINGLE_COMPONENT)
    return np.einsum("ij,ijkl->kl", g.g, q.components) / 6.0


def axis_rotation(j, theta, phi):
    """Spin rotation carrying the principal z' axis to orientation (theta, phi).

    U = exp(+i phi sz) exp(+i theta sy); conjugating an operator by U rotates
    it by -phi about z after -theta about y, matching the spatial rotation
    used by the trap-field module (see berrytrap.trap.fields.frame_rotation).
    """
    return z_phase(j, -phi) @ wigner_small_d(j, -theta)


def lab_hamiltonian(alpha, j, theta, phi):
    """Lab-frame quadrupole Hamiltonian with principal axis at (theta, phi).

    Isospectral with principal_hamiltonian for all angles.
    """
    u = axis_rotation(j, theta, phi)
    return u @ principal_hamiltonian(alpha, j) @ u.conj().T


def zeeman_term(epsilon, j):
    """Symmetry-breaking term epsilon * sz (epsilon in rad/s)."""
    if not np.isfinite(epsilon):
        raise ValueError(f"Zeeman scale must be finite, got {epsilon!r}")
    return epsilon * spin_operators(j).sz


def check_hermitian(h, tol=1e-10):
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.abs(h).max()))
    dev = float(np.abs(h - h.conj().T).max())
    if dev > tol * scale:
        raise NonHermitianError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return h


def eigensystem(h, degeneracy_tol=1e-9):
    """Eigendecomposition sorted descending, with degeneracy grouping.

    Returns (SpectrumRecord, vectors); vectors[:, k] is the eigenvector of
    energies[k].  Eigenvalues within degeneracy_tol * max(1, spectral radius)
    of their neighbor are grouped; within a group the vectors are rotated to
    diagonalize sz and ordered by descending <sz>.
    """
    h = check_hermitian(h)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"Hermitian eigensolver failed to converge: {exc}") from exc
    w = w[::-1].copy()
    v = v[:, ::-1].copy()

    scale = max(1.0, float(np.abs(w).max()))
    groups = []
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or abs(w[k] - w[k - 1]) > degeneracy_tol * scale:
            groups.append(tuple(range(start, k)))
            start = k

    sz = spin_operators((h.shape[0] - 1) / 2.0).sz
    for grp in groups:
        if len(grp) > 1:
            idx = list(grp)
            block = v[:, idx]
            bz = block.conj().T @ sz @ block
            bw, bv = np.linalg.eigh(0.5 * (bz + bz.conj().T))
            v[:, idx] = block @ bv[:, ::-1]

    sz_exp = np.real(np.einsum("ik,ij,jk->k", v.conj(), sz, v))
    energies = w.copy()
    energies.flags.writeable = False
    sz_exp.flags.writeable = False
    return SpectrumRecord(energies=energies, degenerate_groups=tuple(groups),
                          sz_expectations=sz_exp), v


def alpha_from_gradient(c, v0, mode=SINGLE_COMPONENT):
    """Coupling alpha such that the quadrupole interaction is alpha (sz^2 - S^2/3).

    For the single-component gradient diag(0, 0, -v0) the contraction gives
    alpha = -c v0 / 6; for the traceless diag(v0/2, v0/2, -v0) it gives
    alpha = -c v0 / 4.  ``c`` is the configurable quadrupole-moment constant.
    """
    if mode == SINGLE_COMPONENT:
        return -c * v0 / 6.0
    if mode == PHYSICAL:
        return -c * v0 / 4.0
    raise ValueError(f"unknown gradient mode {mode!r}")


LAB_FRAME = "lab"
COROTATING = "corotating"


def _zeeman_frame_valid(frame):
    if frame not in (LAB_FRAME, COROTATING):
        raise ValueError(f"zeeman_frame must be 'lab' or 'corotating', got {frame!r}")
    return frame


@dataclass(frozen=True)
class _TimeHamiltonian:
    """Adapter turning a loop family into H(t) with phi = omega t."""
    loop: object
    theta: float
    omega: float

    @property
    def period(self):
        return 2.0 * np.pi / self.omega

    def __call__(self, t):
        return self.loop(self.theta, self.omega * t)

    def batch(self, ts):
        return self.loop.batch(self.theta, self.omega * np.asarray(ts, dtype=float))


class QuadrupoleLoop:
    """Hamiltonian family (theta, phi) -> H for the rotating-gradient loop.

    H(theta, phi) = U (H0 + eps sz) U^dag         for zeeman_frame="corotating"
    H(theta, phi) = U H0 U^dag + eps sz           for zeeman_frame="lab"

    with H0 = alpha (sz^2 - S^2/3) and U = axis_rotation(j, theta, phi).
    A corotating field follows the principal axis; a lab field is static.
    """

    def __init__(self, alpha, j=1.5, epsilon=0.0, zeeman_frame=COROTATING):
        self.alpha = float(alpha)
        self.ops = spin_operators(j)
        self.j = self.ops.j
        self.epsilon = float(epsilon)
        self.zeeman_frame = _zeeman_frame_valid(zeeman_frame)
        self._h0 = principal_hamiltonian(self.alpha, self.j)
        self._core = self._h0 + (zeeman_term(self.epsilon, self.j)
                                 if self.zeeman_frame == COROTATING else 0.0)

    def __call__(self, theta, phi):
        u = axis_rotation(self.j, theta, phi)
        h = u @ self._core @ u.conj().T
        if self.zeeman_frame == LAB_FRAME and self.epsilon != 0.0:
            h = h + self.epsilon * self.ops.sz
        return 0.5 * (h + h.conj().T)

    def batch(self, theta, phis):
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
        d_small = wigner_small_d(self.j, -theta)
        phases = np.exp(1j * np.outer(phis, self.ops.m_values))  # (n, dim)
        u = phases[:, :, None] * d_small[None, :, :]
        h = np.einsum("nab,bc,ndc->nad", u, self._core, u.conj())
        if self.zeeman_frame == LAB_FRAME and self.epsilon != 0.0:
            h = h + self.epsilon * self.ops.sz
        return 0.5 * (h + np.conj(np.swapaxes(h, -1, -2)))

    def at(self, theta, omega):
        """Time-dependent view H(t) with phi = omega t."""
        if omega <= 0:
            raise ValueError(f"omega must be positive, got {omega}")
        return _TimeHamiltonian(loop=self, theta=theta, omega=omega)


class ConeLoop:
    """Exactly solvable reference family H(theta, phi) = scale * n(theta, phi) . S.

    The axis n = (sin t cos p, sin t sin p, cos t) traverses the standard
    counterclockwise cone, for which the band with magnetic number m along
    the axis acquires the solid-angle geometric phase -2 pi m (1 - cos t).
    """

    def __init__(self, scale, j=0.5):
        self.scale = float(scale)
        self.ops = spin_operators(j)
        self.j = self.ops.j

    def __call__(self, theta, phi):
        n = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
        h = self.scale * (n[0] * self.ops.sx + n[1] * self.ops.sy + n[2] * self.ops.sz)
        return 0.5 * (h + h.conj().T)

    def batch(self, theta, phis):
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
        return np.stack([self(theta, p) for p in phis])

    def at(self, theta, omega):
        if omega <= 0:
            raise ValueError(f"omega must be positive, got {omega}")
        return _TimeHamiltonian(loop=self, theta=theta, omega=omega)


def rotating_frame_hamiltonian(alpha, j, theta, omega, epsilon=0.0, zeeman_frame=COROTATING):
    """Time-independent generator of the loop dynamics in the co-rotating frame.

    For H(t) = QuadrupoleLoop(...)(theta, omega t), the transformation
    psi = U(omega t) chi yields i d chi/dt = H_rot chi with

        H_rot = H0 [+ eps sz if corotating] + (omega [+ eps if lab]) (cos t sz + sin t sx)

    because a lab-frame field along z enters the rotating frame through the
    same tilted operator as the rotation itself.
    """
    _zeeman_frame_valid(zeeman_frame)
    ops = spin_operators(j)
    h = principal_hamiltonian(alpha, ops.j)
    coeff = omega
    if zeeman_frame == COROTATING:
        h = h + zeeman_term(epsilon, ops.j)
    else:
        coeff = coeff + epsilon
    return h + coeff * (np.cos(theta) * ops.sz + np.sin(theta) * ops.sx)
