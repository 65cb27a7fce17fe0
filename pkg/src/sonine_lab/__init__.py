"""Numerical laboratory for Sonine spaces on the positive half-line.

Modules:

* :mod:`.specfun` -- the cosine multiplier gamma_+, zeta, pole bookkeeping
* :mod:`.transforms` -- log-uniform grids, the cosine transform, inversion, Mellin
* :mod:`.kernels` -- the C_a / S_a kernels by series and by quadrature
* :mod:`.spaces` -- the subspaces K_{a,b} and H_Lambda, representers, zero scans
* :mod:`.zeta_lab` -- the E map, the subspace W_Lambda and the zero obstruction
* :mod:`.cli` -- command line entry point ``sonine-lab``
"""

from .errors import SonineError
from .profiles import PROFILES, Profile, RunConfig, resolve_profile
from .transforms import GridFunction, LogGrid, make_log_grid

__all__ = [
    "GridFunction",
    "LogGrid",
    "PROFILES",
    "Profile",
    "RunConfig",
    "SonineError",
    "make_log_grid",
    "resolve_profile",
]
__version__ = "0.1.0"
