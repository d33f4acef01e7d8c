"""Nodal intersection statistics of arithmetic random waves on the 2-torus.

Thin python layer over the compiled core: lattice enumeration, curve
functionals, wave sampling, crossing campaigns, chaos projections and
Kac-Rice integrals.
"""

from ._arwave import *  # noqa: F401,F403
from ._arwave import __version__  # noqa: F401
