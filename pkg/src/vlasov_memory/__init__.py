"""Effective memory-kernel model for the Vlasov equation with a strong
magnetic field and an oscillating electric field.

Three routes to the limit density are provided and cross-checked: the closed
form in Fourier space, the memory integro-differential equation driven by a
Volterra-characterised kernel, and the two-scale limit along characteristics.
A particle solver for the epsilon-dependent equation supplies the convergence
evidence.
"""

from ._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
