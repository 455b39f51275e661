"""Geometric phases of the rotating-gradient loop, by closed form and by
discretized loop methods.

Closed forms (state labels m = 3/2, 1/2, -1/2, -3/2):

    gamma(3/2)  = -3 pi (cos t - 1)          gamma(-3/2) = -gamma(3/2)
    gamma(1/2)  = -pi (sqrt(4 - 3 cos^2 t) - 1)   gamma(-1/2) = -gamma(1/2)

normalized to zero at t = 0.  Numerical loop methods work mod 2 pi, so all
cross-method comparisons are made on complex phase factors exp(i gamma);
only the closed form reports unwrapped values.
"""
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LoopPath",
    "PhaseSet",
    "HolonomyResult",
    "DegenerateBandError",
    "DegeneracyLiftedError",
    "principal_angle",
    "circle_distance",
    "closed_form_phases",
    "energy_shift_spectrum",
    "wilson_loop_phase",
    "overlap_loop_phase",
    "wz_holonomy",
]

STATE_LABELS = (1.5, 0.5, -0.5, -1.5)


class DegenerateBandError(ValueError):
    """A single-band method hit a degenerate band; use wz_holonomy instead."""


class DegeneracyLiftedError(ValueError):
    """A subspace method found the degeneracy lifted along the path."""


def principal_angle(x):
    """Reduce angle(s) to the principal branch (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float), 2.0 * np.pi)
    return np.where(y > np.pi, y - 2.0 * np.pi, y)[()]


def circle_distance(a, b):
    """Distance between two angles on the circle, in [0, pi]."""
    return np.abs(principal_angle(np.asarray(a) - np.asarray(b)))[()]


@dataclass(frozen=True)
class LoopPath:
    """Discretized closed loop: theta fixed, phi from 0 to 2 pi.

    ``phis`` holds N+1 strictly increasing samples with phis[0] = 0 and
    phis[-1] = 2 pi; the endpoint duplicates the start in parameter space
    (periodic families give identical Hamiltonians there).
    """
    theta: float
    phis: np.ndarray
    closed: bool = True

    def __post_init__(self):
        phis = np.asarray(self.phis, dtype=float)
        if phis.ndim != 1 or len(phis) < 2:
            raise ValueError("loop needs at least two phi samples")
        if np.any(np.diff(phis) <= 0):
            raise ValueError("phi samples must be strictly increasing")
        closed = bool(abs(phis[0]) < 1e-12 and abs(phis[-1] - 2.0 * np.pi) < 1e-12)
        phis = phis.copy()
        phis.flags.writeable = False
        object.__setattr__(self, "phis", phis)
        object.__setattr__(self, "closed", closed and self.closed)

    @classmethod
    def uniform(cls, theta, n_steps):
        """Uniform closed loop with n_steps intervals over [0, 2 pi]."""
        if n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        return cls(theta=float(theta), phis=np.linspace(0.0, 2.0 * np.pi, int(n_steps) + 1))

    @property
    def n_steps(self):
        return len(self.phis) - 1


@dataclass(frozen=True)
class PhaseSet:
    """Unwrapped geometric phases keyed by state label m, odd under m -> -m."""
    theta: float
    gamma: dict

    def __call__(self, m):
        return self.gamma[m]

    @property
    def values(self):
        """Phases ordered as (3/2, 1/2, -1/2, -3/2)."""
        return np.array([self.gamma[m] for m in STATE_LABELS])


@dataclass(frozen=True)
class HolonomyResult:
    """Unitary holonomy of a degenerate subspace over one loop.

    ``matrix`` is expressed in the eigenframe at phi = 0 (columns of
    ``frame``); eigenphases are the arguments of its eigenvalues in
    (-pi, pi], sorted descending.
    """
    subspace_indices: tuple
    matrix: np.ndarray
    eigenphases: np.ndarray
    n_steps: int
    frame: np.ndarray


def closed_form_phases(theta):
    """The four closed-form loop phases at tilt theta (radians, in [0, pi])."""
    if not -1e-12 <= theta <= np.pi + 1e-12:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    g32 = -3.0 * np.pi * (np.cos(theta) - 1.0)
    g12 = -np.pi * (np.sqrt(4.0 - 3.0 * np.cos(theta) ** 2) - 1.0)
    return PhaseSet(theta=float(theta),
                    gamma={1.5: g32, 0.5: g12, -0.5: -g12, -1.5: -g32})


def energy_shift_spectrum(alpha, theta, period, convention="conjugate"):
    """Loop-phase-shifted energies E_m = E0_m +/- gamma(m)/T for j = 3/2.

    The "conjugate" convention reports E0 + gamma/T (the form obtained with
    exp(+i/hbar int E dt) phase bookkeeping); "standard" reports
    E0 - gamma/T, which is what exp(-i E t) propagation and the Floquet
    quasi-energies realize.  E0 = +alpha for |m| = 3/2 and -alpha otherwise.
    The two shifted spectra coincide as sets (gamma is odd in m); the
    convention decides which state carries which shift.
    """
    if period <= 0:
        raise ValueError(f"period must be positive, got {period}")
    if convention not in ("conjugate", "standard"):
        raise ValueError(f"convention must be 'conjugate' or 'standard', got {convention!r}")
    sign = 1.0 if convention == "conjugate" else -1.0
    phases = closed_form_phases(theta)
    return {m: (alpha if abs(m) == 1.5 else -alpha) + sign * phases(m) / period
            for m in STATE_LABELS}


def _sorted_eigh(h_batch):
    w, v = np.linalg.eigh(h_batch)
    return w[..., ::-1], v[..., ::-1]


def _family_batch(family, theta, phis):
    batch = getattr(family, "batch", None)
    if batch is not None:
        return batch(theta, phis)
    return np.stack([family(theta, p) for p in phis])


def _require_closed(loop):
    if not loop.closed:
        raise ValueError("loop must be closed (phi from 0 to 2 pi)")


def overlap_loop_phase(vectors):
    """Gauge-invariant discrete loop phase -arg prod_k <v_k|v_k+1>.

    ``vectors`` has shape (N, dim); the product closes with <v_{N-1}|v_0>.
    Per-sample phase choices cancel, so the result is independent of the
    eigenvector gauge.
    """
    vectors = np.asarray(vectors)
    rolled = np.roll(vectors, -1, axis=0)
    overlaps = np.einsum("ki,ki->k", vectors.conj(), rolled)
    mags = np.abs(overlaps)
    if mags.min() < 0.5:
        raise ValueError(
            f"consecutive eigenvector overlap dropped to {mags.min():.3f}; "
            "the loop is sampled too coarsely to track the band")
    # normalize magnitudes away: they cannot affect the phase and the
    # normalized product is safe from underflow at large N
    return float(-np.angle(np.prod(overlaps / mags)))


def wilson_loop_phase(family, loop, band, degeneracy_tol=1e-9):
    """Discrete loop phase of one non-degenerate band, mod 2 pi.

    ``band`` indexes the spectrum sorted descending at every sample.  The
    band must stay separated from its neighbors by more than
    degeneracy_tol * max(1, spectral radius) everywhere; degenerate bands
    belong to wz_holonomy.
    """
    _require_closed(loop)
    h = _family_batch(family, loop.theta, loop.phis[:-1])
    w, v = _sorted_eigh(h)
    dim = w.shape[1]
    if not 0 <= band < dim:
        raise ValueError(f"band index {band} out of range for dimension {dim}")
    scale = max(1.0, float(np.abs(w).max()))
    gaps = []
    if band > 0:
        gaps.append((w[:, band - 1] - w[:, band]).min())
    if band < dim - 1:
        gaps.append((w[:, band] - w[:, band + 1]).min())
    if gaps and min(gaps) <= degeneracy_tol * scale:
        raise DegenerateBandError(
            f"band {band} is degenerate along the loop (min gap {min(gaps):.3e}); "
            "use wz_holonomy on the degenerate group instead")
    return principal_angle(overlap_loop_phase(v[:, :, band]))


def wz_holonomy(family, loop, group, degeneracy_tol=1e-9, unitarize_each_step=False):
    """Holonomy of a degenerate subspace over one loop.

    The subspace (indices into the descending-sorted spectrum, contiguous)
    must remain internally degenerate and externally gapped along the whole
    loop.  The holonomy is the adjoint of the path-ordered product of
    inter-sample frame overlap matrices, re-unitarized by polar
    decomposition at the end (or per step when unitarize_each_step is set);
    in the one-dimensional case it reduces to exp(i * wilson_loop_phase).
    """
    _require_closed(loop)
    group = tuple(int(g) for g in group)
    if len(group) < 1 or list(group) != list(range(group[0], group[-1] + 1)):
        raise ValueError(f"subspace indices must be contiguous, got {group}")
    h = _family_batch(family, loop.theta, loop.phis[:-1])
    w, v = _sorted_eigh(h)
    dim = w.shape[1]
    if group[-1] >= dim:
        raise ValueError(f"subspace indices {group} out of range for dimension {dim}")
    scale = max(1.0, float(np.abs(w).max()))
    spread = (w[:, group[0]] - w[:, group[-1]]).max()
    if spread > degeneracy_tol * scale:
        raise DegeneracyLiftedError(
            f"subspace degeneracy is lifted along the path (max spread {spread:.3e})")
    gaps = []
    if group[0] > 0:
        gaps.append((w[:, group[0] - 1] - w[:, group[0]]).min())
    if group[-1] < dim - 1:
        gaps.append((w[:, group[-1]] - w[:, group[-1] + 1]).min())
    if gaps and min(gaps) <= degeneracy_tol * scale:
        raise DegeneracyLiftedError(
            f"subspace is not gapped from the rest of the spectrum "
            f"(min external gap {min(gaps):.3e})")

    frames = v[:, :, group[0]:group[-1] + 1]           # (N, dim, d)
    nxt = np.roll(frames, -1, axis=0)
    overlaps = np.einsum("kia,kib->kab", frames.conj(), nxt)
    prod = np.eye(len(group), dtype=complex)
    for o in overlaps:
        if unitarize_each_step:
            o = _polar_unitary(o)
        prod = prod @ o
    holonomy = _polar_unitary(prod).conj().T
    eigvals = np.linalg.eigvals(holonomy)
    phases = np.sort(principal_angle(np.angle(eigvals)))[::-1]
    return HolonomyResult(subspace_indices=group, matrix=holonomy,
                          eigenphases=phases, n_steps=loop.n_steps,
                          frame=frames[0])


def _polar_unitary(a):
    u, s, vh = np.linalg.svd(a)
    if s.min() < 0.5:
        raise ValueError(
            f"overlap product is strongly non-unitary (singular value {s.min():.3f}); "
            "the loop is sampled too coarsely")
    return u @ vh
