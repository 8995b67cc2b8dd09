"""Composite-system unitary evolution and the induced reduced dynamics.

The reduced channel rho -> tr_env(U(t) (rho (x) D) U(t)^dagger) depends
linearly on the initial system state because the initial composite state is
produced by the product lifting; the channel is assembled column by column on
the matrix-unit basis.  No semigroup property is claimed or checked: reduced
dynamics is non-Markovian in general.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import tolerances
from .errors import ConstraintViolation, DimensionMismatch
from .liftings import apply_lifting, check_trace_constraint
from .linalg import kron, matrix_unit, partial_trace_env, partial_trace_sys, spectral, unvec, vec


@dataclass(frozen=True, eq=False)
class UnitaryEvolution:
    """exp(-i t H) together with its generator (hbar = 1)."""

    matrix: np.ndarray
    hamiltonian: np.ndarray
    time: float


@dataclass(frozen=True, eq=False)
class ReducedChannel:
    """A linear map on system operators, stored on vectorized operators."""

    ds: int
    matrix: np.ndarray  # shape (ds**2, ds**2)

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.ascontiguousarray(self.matrix, dtype=np.complex128))
        if self.matrix.shape != (self.ds**2, self.ds**2):
            raise DimensionMismatch(
                f"channel matrix shape {self.matrix.shape}, expected {(self.ds**2,) * 2}"
            )


def unitary_from_hamiltonian(h: np.ndarray, t: float) -> UnitaryEvolution:
    """U(t) = exp(-i t H) via the spectral decomposition of the Hamiltonian."""
    dec = spectral(h)
    phases = np.exp(-1j * t * dec.eigenvalues)
    u = (dec.vectors * phases) @ dec.vectors.conj().T
    return UnitaryEvolution(u, np.asarray(h, dtype=np.complex128), float(t))


def evolve(w: np.ndarray, u: UnitaryEvolution) -> np.ndarray:
    """Conjugate a state by the unitary: U W U^dagger."""
    w = np.asarray(w, dtype=np.complex128)
    if w.shape != u.matrix.shape:
        raise DimensionMismatch(f"state shape {w.shape} vs unitary {u.matrix.shape}")
    return u.matrix @ w @ u.matrix.conj().T


def reduced_dynamics_map(h: np.ndarray, reference: np.ndarray, t: float) -> ReducedChannel:
    """The channel rho -> tr_env(U(t) (rho (x) reference) U(t)^dagger)."""
    h = np.asarray(h, dtype=np.complex128)
    de = np.asarray(reference).shape[0]
    if h.shape[0] % de != 0:
        raise DimensionMismatch(
            f"Hamiltonian dim {h.shape[0]} does not factor over environment dim {de}"
        )
    ds = h.shape[0] // de
    u = unitary_from_hamiltonian(h, t)
    m = np.empty((ds * ds, ds * ds), dtype=np.complex128)
    for c in range(ds):
        for r in range(ds):
            lifted = kron(matrix_unit(r, c, ds), reference)
            out = partial_trace_env(evolve(lifted, u), ds, de)
            m[:, c * ds + r] = vec(out)
    return ReducedChannel(ds, m)


def reduced_dynamics_from_lifting(
    h: np.ndarray,
    lifting,
    t: float,
    allow_non_right_inverse: bool = False,
) -> ReducedChannel:
    """Reduced dynamics through an explicit lifting instead of a reference state.

    Only right inverses of the partial trace give the correct initial
    condition; anything else (e.g. a generic Kraus lifting) is rejected unless
    ``allow_non_right_inverse`` is set.
    """
    h = np.asarray(h, dtype=np.complex128)
    ds, de = lifting.ds, lifting.de
    if h.shape != (ds * de, ds * de):
        raise DimensionMismatch(
            f"Hamiltonian shape {h.shape} does not match the lifting ({ds}*{de})"
        )
    if not allow_non_right_inverse:
        deviation = check_trace_constraint(lifting)
        if deviation > tolerances.trace:
            raise ConstraintViolation(
                f"lifting is not a right inverse of the partial trace "
                f"(deviation {deviation:.3e}); pass allow_non_right_inverse=True "
                f"to use it anyway"
            )
    u = unitary_from_hamiltonian(h, t)
    m = np.empty((ds * ds, ds * ds), dtype=np.complex128)
    for c in range(ds):
        for r in range(ds):
            lifted = apply_lifting(lifting, matrix_unit(r, c, ds))
            out = partial_trace_env(evolve(lifted, u), ds, de)
            m[:, c * ds + r] = vec(out)
    return ReducedChannel(ds, m)


def apply_channel(lam: ReducedChannel, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (lam.ds, lam.ds):
        raise DimensionMismatch(f"state shape {rho.shape}, channel expects ({lam.ds},) * 2")
    return unvec(lam.matrix @ vec(rho), lam.ds)


def choi_matrix(lam: ReducedChannel) -> np.ndarray:
    """(Lambda (x) id) applied to the unnormalized maximally entangled projector.

    Output factor first: Choi = sum_ij Lambda(E_ij) (x) E_ij.
    """
    d = lam.ds
    choi = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            choi += kron(apply_channel(lam, matrix_unit(i, j, d)), matrix_unit(i, j, d))
    return choi


def is_cptp(lam: ReducedChannel, tol: float | None = None) -> bool:
    """Complete positivity (Choi PSD) plus trace preservation (tr_out Choi = Id)."""
    if tol is None:
        tol = tolerances.psd
    choi = choi_matrix(lam)
    lam_min = float(np.linalg.eigvalsh((choi + choi.conj().T) / 2)[0])
    if lam_min < -tol:
        return False
    reduced = partial_trace_sys(choi, lam.ds, lam.ds)
    return float(np.max(np.abs(reduced - np.eye(lam.ds)))) <= tol
