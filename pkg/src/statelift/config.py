"""Central numerical tolerances.

Every comparison threshold used by the package lives in one mutable object so
it can be adjusted globally.  Defaults target dense complex matrices of
composite dimension <= 64.
"""

from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass
class Tolerances:
    hermitian: float = 1e-9   # max entry of |A - A^dagger| for Hermiticity tests
    spectral: float = 1e-9    # eigendecomposition residual / orthonormality
    psd: float = 1e-9         # eigenvalue floor: PSD means lambda_min >= -psd
    trace: float = 1e-10      # trace-constraint and partial-trace deviations
    residual: float = 1e-8    # analyzer threshold separating product from inconclusive
    rank: float = 1e-12       # relative eigenvalue cutoff for numerical rank


tolerances = Tolerances()


def default_residual_tol() -> float:
    """Analyzer residual threshold, honouring the STATELIFT_TOL override."""
    env = os.environ.get("STATELIFT_TOL")
    if env is not None:
        return float(env)
    return tolerances.residual
