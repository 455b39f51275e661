"""Kernel backend selection for the electrostatics solver.

The compiled extension (`berrytrap.kernels._sor`, built from _sor.pyx) is
used when present; otherwise the pure-numpy implementation takes over.  Both
expose the same two functions with identical semantics:

    sor_pass(u, fixed, omega)   -- one in-place red-black SOR pass
    max_residual(u, fixed)      -- max |u - mean(neighbors)| over free cells

Set BERRYTRAP_KERNEL=python (or =cython) to force a backend; forcing cython
when the extension is missing raises ImportError.
"""
import os

from . import sor_py

_forced = os.environ.get("BERRYTRAP_KERNEL")

if _forced == "python":
    _impl = sor_py
else:
    try:
        from . import _sor as _impl
    except ImportError:
        if _forced == "cython":
            raise
        _impl = sor_py

BACKEND = _impl.BACKEND
sor_pass = _impl.sor_pass
max_residual = _impl.max_residual


def available_backends():
    """Names of the backends importable in this environment."""
    names = ["python"]
    try:
        from . import _sor  # noqa: F811
        names.append("cython")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Return the kernel module for an explicit backend name."""
    if name == "python":
        return sor_py
    if name == "cython":
        from . import _sor
        return _sor
    raise ValueError(f"unknown kernel backend: {name!r}")
