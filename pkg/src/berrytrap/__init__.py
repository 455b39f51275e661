"""berrytrap: geometric phases of a quadrupolar spin in a rotating field
gradient, with the trap electrostatics that would realize the drive.

Internal conventions: hbar = 1 (energies are angular frequencies, rad/s),
angles in radians, basis ordered by descending magnetic quantum number.
The command-line layer converts from degrees and Hz exactly once
(berrytrap.units).
"""
from . import berry, dynamics, hamiltonian, kernels, spin, trap, units

__version__ = "0.1.0"

__all__ = ["spin", "hamiltonian", "berry", "dynamics", "trap", "units",
           "kernels", "__version__"]
