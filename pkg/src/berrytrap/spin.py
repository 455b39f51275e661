"""Spin operators, Wigner rotations, and quadrupole tensor operators.

Conventions used throughout the package:

* basis states are ordered by descending magnetic quantum number
  m = j, j-1, ..., -j, so ``sz`` is diagonal with decreasing entries;
* hbar = 1: spin matrices are dimensionless, energies are angular
  frequencies in rad/s;
* the Wigner rotation is z-y-z, D(phi, theta, chi) =
  exp(-i phi sz) exp(-i theta sy) exp(-i chi sz).
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "SpinOps",
    "EulerAngles",
    "QuadrupoleTensor",
    "spin_operators",
    "wigner_small_d",
    "wigner_D",
    "rotation_matrix",
    "quadrupole_tensor",
]


def _validate_spin(j):
    """Check that 2j is a non-negative integer; return j as an exact float."""
    two_j = 2.0 * float(j)
    if not np.isfinite(two_j) or two_j < 0 or abs(two_j - round(two_j)) > 1e-9:
        raise ValueError(f"spin quantum number must be a non-negative half-integer, got {j!r}")
    return round(two_j) / 2.0


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SpinOps:
    """The three spin component matrices for one spin quantum number.

    All matrices are Hermitian, satisfy [sx, sy] = i sz (and cyclic), and
    sx^2 + sy^2 + sz^2 = j(j+1) * identity.
    """
    j: float
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray

    @property
    def dim(self):
        return int(round(2 * self.j + 1))

    @property
    def s2(self):
        """Total-spin Casimir j(j+1) * identity."""
        return self.j * (self.j + 1) * np.eye(self.dim, dtype=complex)

    @property
    def m_values(self):
        """Magnetic quantum numbers in basis order (descending)."""
        return self.j - np.arange(self.dim)


@dataclass(frozen=True)
class EulerAngles:
    """z-y-z Euler angles in radians; theta is restricted to [0, pi]."""
    phi: float
    theta: float
    chi: float = 0.0

    def __post_init__(self):
        if not -1e-12 <= self.theta <= np.pi + 1e-12:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")


@dataclass(frozen=True)
class QuadrupoleTensor:
    """Rank-2 Cartesian tensor of quadrupole operators Q_ij.

    components has shape (3, 3, dim, dim); Q_ij = Q_ji, sum_i Q_ii = 0 and
    every Q_ij is Hermitian.
    """
    j: float
    c: float
    components: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return int(round(2 * self.j + 1))


@lru_cache(maxsize=64)
def _spin_matrices(two_j):
    j = two_j / 2.0
    dim = two_j + 1
    m = j - np.arange(dim)
    sz = np.diag(m).astype(complex)
    sp = np.zeros((dim, dim), dtype=complex)
    for i in range(1, dim):
        # <m+1| S+ |m> = sqrt(j(j+1) - m(m+1)), m = j - i
        mm = m[i]
        sp[i - 1, i] = np.sqrt(j * (j + 1) - mm * (mm + 1))
    sx = (sp + sp.conj().T) / 2.0
    sy = (sp - sp.conj().T) / 2.0j
    return _frozen(sx), _frozen(sy), _frozen(sz)


def spin_operators(j):
    """Build the spin matrices (sx, sy, sz) for spin j in the descending-m basis."""
    j = _validate_spin(j)
    sx, sy, sz = _spin_matrices(int(round(2 * j)))
    return SpinOps(j=j, sx=sx, sy=sy, sz=sz)


def z_phase(j, angle):
    """Diagonal rotation exp(-i angle sz) = diag(exp(-i angle m))."""
    ops = spin_operators(j)
    return np.diag(np.exp(-1j * angle * ops.m_values))


def wigner_small_d(j, theta):
    """Reduced rotation matrix d(theta) = exp(-i theta sy).

    Real-valued in this basis/phase convention; returned as a complex array
    for composability.  theta may be any real number.
    """
    ops = spin_operators(j)
    w, v = np.linalg.eigh(ops.sy)
    d = (v * np.exp(-1j * theta * w)) @ v.conj().T
    # exp(-i theta sy) is real in the standard convention; discard the
    # eigensolver's roundoff-level imaginary part so powers stay clean
    return d.real.astype(complex)


def wigner_D(j, angles):
    """Full Wigner rotation D = exp(-i phi sz) d(theta) exp(-i chi sz)."""
    if not isinstance(angles, EulerAngles):
        angles = EulerAngles(*angles)
    return (
        z_phase(j, angles.phi)
        @ wigner_small_d(j, angles.theta)
        @ z_phase(j, angles.chi)
    )


def _rot_z(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rot_y(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_matrix(angles):
    """3x3 rotation R = Rz(phi) Ry(theta) Rz(chi) matching wigner_D.

    The correspondence is D S_i D^dag = sum_k R_ki S_k, which makes the
    quadrupole tensor transform as D Q_ij D^dag = sum_kl R_ki R_lj Q_kl.
    """
    if not isinstance(angles, EulerAngles):
        angles = EulerAngles(*angles)
    return _rot_z(angles.phi) @ _rot_y(angles.theta) @ _rot_z(angles.chi)


def quadrupole_tensor(j, c=1.0):
    """Quadrupole operators Q_ij = c (1/2 {S_i, S_j} - delta_ij S^2 / 3).

    The anticommutator symmetrization makes every Q_ij Hermitian and the
    Cartesian tensor symmetric and traceless.
    """
    ops = spin_operators(j)
    s = (ops.sx, ops.sy, ops.sz)
    s2 = ops.s2
    comps = np.empty((3, 3, ops.dim, ops.dim), dtype=complex)
    for a in range(3):
        for b in range(3):
            q = 0.5 * (s[a] @ s[b] + s[b] @ s[a])
            if a == b:
                q = q - s2 / 3.0
            comps[a, b] = c * q
    return QuadrupoleTensor(j=ops.j, c=float(c), components=_frozen(comps))
