"""Noncommutative Coulomb problem on a truncated Fock space.

Submodules
----------
fock_algebra
    Ladder operators, NC coordinates, superoperators and identity checks.
radial_engine
    Normal-ordered radial polynomials and the banded radial pencil.
analytic
    Closed-form spectrum, eigenfunctions and Kummer's function.
coulomb_field
    NC Poisson solution, electric field, self-energy and ball volumes.
cli
    Command-line front end (``nchydrogen``).
"""

from . import analytic, coulomb_field, fock_algebra, radial_engine

__version__ = "0.1.0"

__all__ = ["analytic", "coulomb_field", "fock_algebra", "radial_engine", "__version__"]
