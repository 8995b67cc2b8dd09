"""Reduction of observables: the adjoint side of the lifting duality.

The adjoint of a lifting F is the map F* on observables defined by
tr(A . F(rho)) = tr(F*(A) . rho) for all A and rho.  Under column-stacking
vectorization this is the plain matrix transpose conjugated by the
transpose-permutations of the two operator spaces, so it is computed once as
an explicit matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation, DimensionMismatch
from .linalg import frobenius, kron, partial_trace_env, unvec, vec
from .liftings import Lifting
from .states import hermitian_basis, validate_density


@dataclass(frozen=True, eq=False)
class ReductionMap:
    """A linear map L(H_S (x) H_E) -> L(H_S) on vectorized operators."""

    ds: int
    de: int
    matrix: np.ndarray  # shape (ds**2, (ds*de)**2)

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.ascontiguousarray(self.matrix, dtype=np.complex128))
        expected = (self.ds**2, (self.ds * self.de) ** 2)
        if self.matrix.shape != expected:
            raise DimensionMismatch(
                f"reduction matrix shape {self.matrix.shape}, expected {expected}"
            )


def transpose_permutation(d: int) -> np.ndarray:
    """Permutation T with T @ vec(X) = vec(X^T)."""
    t = np.zeros((d * d, d * d), dtype=np.complex128)
    for r in range(d):
        for c in range(d):
            t[c * d + r, r * d + c] = 1.0
    return t


def adjoint_lifting(f: Lifting) -> ReductionMap:
    """Adjoint of a lifting under the bilinear pairing tr(AW)."""
    t_small = transpose_permutation(f.ds)
    t_big = transpose_permutation(f.ds * f.de)
    return ReductionMap(f.ds, f.de, t_small @ f.matrix.T @ t_big)


def adjoint_reduction(r: ReductionMap) -> Lifting:
    """Adjoint of a reduction map; inverts :func:`adjoint_lifting` exactly."""
    t_small = transpose_permutation(r.ds)
    t_big = transpose_permutation(r.ds * r.de)
    return Lifting(r.ds, r.de, t_big @ r.matrix.T @ t_small)


def apply_reduction(r: ReductionMap, a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    dim = r.ds * r.de
    if a.shape != (dim, dim):
        raise DimensionMismatch(f"observable shape {a.shape}, expected ({dim}, {dim})")
    return unvec(r.matrix @ vec(a), r.ds)


def check_unit_reduction(r: ReductionMap) -> float:
    """Max deviation of R(B (x) Id) from B over the Hermitian basis.

    Vanishes exactly when the pre-adjoint lifting satisfies the partial-trace
    constraint.
    """
    eye_env = np.eye(r.de)
    worst = 0.0
    for b in hermitian_basis(r.ds):
        worst = max(worst, frobenius(apply_reduction(r, kron(b, eye_env)) - b))
    return worst


def reduce_observable(a: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Reduce a composite observable: A -> tr_env(A (Id (x) reference)).

    This is the adjoint of the product lifting with the given reference state:
    it is linear, maps Hermitian to Hermitian, and acts unitally on B (x) Id.
    """
    d = validate_density(reference)
    de = d.shape[0]
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % de != 0:
        raise DimensionMismatch(
            f"observable shape {a.shape} does not factor over an environment of dim {de}"
        )
    ds = a.shape[0] // de
    if ds < 1:
        raise ConstraintViolation("observable smaller than the environment")
    return partial_trace_env(a @ kron(np.eye(ds), d), ds, de)
