"""Pure-numpy red-black SOR sweeps for the 7-point Laplace stencil.

Each half-sweep updates one checkerboard color of the interior; cells of one
color only read cells of the other color, so strided in-place updates are
safe and the result is independent of the order in which the four strided
sublattices of a color are visited.
"""
import numpy as np

BACKEND = "python"


def sor_pass(u, fixed, omega):
    """One full SOR pass (red half-sweep then black) over interior cells.

    ``u`` is updated in place.  ``fixed`` marks Dirichlet cells (kept as-is).
    Cell color is (i + j + k) % 2.
    """
    for parity in (0, 1):
        _half_sweep(u, fixed, omega, parity)


def _half_sweep(u, fixed, omega, parity):
    n = u.shape
    for di in (0, 1):
        for dj in (0, 1):
            dk = (parity + 1 + di + dj) % 2
            c = u[1 + di:n[0] - 1:2, 1 + dj:n[1] - 1:2, 1 + dk:n[2] - 1:2]
            if c.size == 0:
                continue
            nb = (
                u[di:n[0] - 2:2, 1 + dj:n[1] - 1:2, 1 + dk:n[2] - 1:2]
                + u[2 + di:n[0]:2, 1 + dj:n[1] - 1:2, 1 + dk:n[2] - 1:2]
                + u[1 + di:n[0] - 1:2, dj:n[1] - 2:2, 1 + dk:n[2] - 1:2]
                + u[1 + di:n[0] - 1:2, 2 + dj:n[1]:2, 1 + dk:n[2] - 1:2]
                + u[1 + di:n[0] - 1:2, 1 + dj:n[1] - 1:2, dk:n[2] - 2:2]
                + u[1 + di:n[0] - 1:2, 1 + dj:n[1] - 1:2, 2 + dk:n[2]:2]
            )
            upd = (1.0 - omega) * c + omega * nb / 6.0
            free = fixed[1 + di:n[0] - 1:2, 1 + dj:n[1] - 1:2, 1 + dk:n[2] - 1:2] == 0
            c[free] = upd[free]


def max_residual(u, fixed):
    """Max over free interior cells of |u - mean(neighbors)|."""
    nb = (
        u[:-2, 1:-1, 1:-1] + u[2:, 1:-1, 1:-1]
        + u[1:-1, :-2, 1:-1] + u[1:-1, 2:, 1:-1]
        + u[1:-1, 1:-1, :-2] + u[1:-1, 1:-1, 2:]
    )
    res = np.abs(u[1:-1, 1:-1, 1:-1] - nb / 6.0)
    free = fixed[1:-1, 1:-1, 1:-1] == 0
    if not free.any():
        return 0.0
    return float(res[free].max())
