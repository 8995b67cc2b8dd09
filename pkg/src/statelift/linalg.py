"""Dense complex linear algebra on composite systems.

Conventions used throughout the package:

* Operators are square complex numpy arrays; entry ``A[r, c]`` is the matrix
  element between the r-th and c-th canonical basis vectors.
* Composite indices are system-major: the pair (s, e) with s on the system
  factor (dimension ``ds``) and e on the environment factor (dimension ``de``)
  maps to the flat index ``s * de + e``.  ``numpy.kron(A, B)`` with A on the
  system side matches this ordering.
* Vectorization is column-stacking: ``vec(X)[c * d + r] = X[r, c]``.

All functions are pure; none mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import tolerances
from .errors import ConstraintViolation, DimensionMismatch

kron = np.kron


def as_matrix(a) -> np.ndarray:
    """Coerce to a square complex128 matrix, rejecting non-finite entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ConstraintViolation("matrix has non-finite entries")
    return m


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(x).flatten(order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`vec` for a dim x dim matrix."""
    v = np.asarray(v)
    if v.size != dim * dim:
        raise DimensionMismatch(f"vector of length {v.size} is not {dim}x{dim}")
    return v.reshape((dim, dim), order="F")


def matrix_unit(r: int, c: int, dim: int) -> np.ndarray:
    """The matrix unit E_rc."""
    m = np.zeros((dim, dim), dtype=np.complex128)
    m[r, c] = 1.0
    return m


def _split_composite(w: np.ndarray, ds: int, de: int) -> np.ndarray:
    w = np.asarray(w)
    if w.shape != (ds * de, ds * de):
        raise DimensionMismatch(
            f"matrix of shape {w.shape} does not factor as ({ds}*{de}) x ({ds}*{de})"
        )
    return w.reshape(ds, de, ds, de)


def partial_trace_env(w: np.ndarray, ds: int, de: int) -> np.ndarray:
    """Trace out the environment factor: out[k, l] = sum_i W[k*de+i, l*de+i]."""
    return np.einsum("aibi->ab", _split_composite(w, ds, de))


def partial_trace_sys(w: np.ndarray, ds: int, de: int) -> np.ndarray:
    """Trace out the system factor: out[i, j] = sum_k W[k*de+i, k*de+j]."""
    return np.einsum("aiaj->ij", _split_composite(w, ds, de))


def hermiticity_defect(a: np.ndarray) -> float:
    """Largest entrywise deviation from self-adjointness."""
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T), initial=0.0))


def is_hermitian(a: np.ndarray, tol: float | None = None) -> bool:
    if tol is None:
        tol = tolerances.hermitian
    return hermiticity_defect(a) <= tol


def hermitian_part(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    return (a + a.conj().T) / 2


@dataclass(frozen=True, eq=False)
class PsdCheck:
    """Outcome of a positivity test, with the minimal-eigenvalue witness."""

    ok: bool
    min_eigenvalue: float
    witness: np.ndarray  # unit eigenvector attaining the minimal eigenvalue

    def __bool__(self) -> bool:
        return self.ok


def is_psd(a: np.ndarray, tol: float | None = None) -> PsdCheck:
    """Test membership in the positive cone: lambda_min(A) >= -tol.

    Raises ConstraintViolation for inputs that are not Hermitian within the
    configured Hermiticity tolerance.
    """
    if tol is None:
        tol = tolerances.psd
    a = as_matrix(a)
    if not is_hermitian(a):
        raise ConstraintViolation(
            f"positivity is only defined for Hermitian operators "
            f"(defect {hermiticity_defect(a):.3e})"
        )
    vals, vecs = np.linalg.eigh(hermitian_part(a))
    lam = float(vals[0])
    return PsdCheck(lam >= -tol, lam, vecs[:, 0])


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues (descending) and phase-fixed orthonormal eigenvectors.

    ``vectors[:, i]`` belongs to ``eigenvalues[i]``.  The phase of each
    eigenvector is fixed so its largest-modulus component is real positive
    (first such component on ties); equal eigenvalues keep the eigensolver's
    relative order.  This makes the decomposition deterministic, which golden
    tests rely on.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.eigenvalues) @ self.vectors.conj().T


def spectral(a: np.ndarray, tol: float | None = None) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix with fixed conventions."""
    if tol is None:
        tol = tolerances.hermitian
    a = as_matrix(a)
    if hermiticity_defect(a) > tol:
        raise ConstraintViolation(
            f"spectral() requires a Hermitian input (defect {hermiticity_defect(a):.3e})"
        )
    vals, vecs = np.linalg.eigh(hermitian_part(a))
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for i in range(vecs.shape[1]):
        j = int(np.argmax(np.abs(vecs[:, i])))
        pivot = vecs[j, i]
        mag = abs(pivot)
        if mag > 0.0:
            vecs[:, i] *= pivot.conjugate() / mag
    return SpectralDecomposition(vals, vecs)


def trace_norm(a: np.ndarray) -> float:
    """Sum of singular values; for Hermitian input this is sum |lambda_i|."""
    return float(np.sum(np.linalg.svd(as_matrix(a), compute_uv=False)))


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def pairing(a: np.ndarray, w: np.ndarray) -> complex:
    """The duality pairing (A, W) -> tr(AW); bilinear, no conjugation."""
    a = np.asarray(a)
    w = np.asarray(w)
    if a.shape != w.shape:
        raise DimensionMismatch(f"pairing of shapes {a.shape} and {w.shape}")
    return complex(np.trace(a @ w))
