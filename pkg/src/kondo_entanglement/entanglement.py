"""Entropy and two-qubit entanglement measures.

Functions accept plain arrays or :class:`TwoSpinDensityMatrix`.  Eigenvalues
with magnitude below ``EIGEN_FLOOR`` are treated as zero; anything more
negative than the floor is rejected rather than clipped.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .densmat import PSD_FLOOR, DensityMatrixError, TwoSpinDensityMatrix, werner_fit

EIGEN_FLOOR = 1e-12
TRACE_TOL = 1e-9

_SIGMA_YY = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0])).astype(complex)


def _as_matrix(rho) -> np.ndarray:
    if isinstance(rho, TwoSpinDensityMatrix):
        return rho.entries
    return np.asarray(rho, dtype=complex)


def _state_spectrum(m: np.ndarray) -> np.ndarray:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DensityMatrixError(f"expected a square matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > 1e-12 * max(1.0, float(np.max(np.abs(m)))):
        raise DensityMatrixError("density matrix is not Hermitian")
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise DensityMatrixError(f"density matrix must have unit trace, got {tr!r}")
    w = np.linalg.eigvalsh(m)
    if w[0] < -PSD_FLOOR:
        raise DensityMatrixError(f"density matrix is not positive semidefinite (eigenvalue {w[0]:.3e})")
    return np.where(np.abs(w) < EIGEN_FLOOR, 0.0, w)


def _two_qubit(rho) -> np.ndarray:
    m = _as_matrix(rho)
    if m.shape != (4, 4):
        raise DensityMatrixError(f"expected a two-qubit (4x4) state, got shape {m.shape}")
    _state_spectrum(m)
    return m


def von_neumann_entropy(rho) -> float:
    """-Tr[rho log2 rho] in bits."""
    w = _state_spectrum(_as_matrix(rho))
    w = w[w > 0.0]
    return float(max(0.0, -np.sum(w * np.log2(w))))


def partial_transpose(rho, subsystem: int = 1) -> np.ndarray:
    """Partial transpose of a two-qubit matrix over slot 0 or slot 1."""
    m = _as_matrix(rho).reshape(2, 2, 2, 2)
    if subsystem == 1:
        m = m.transpose(0, 3, 2, 1)
    elif subsystem == 0:
        m = m.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"subsystem must be 0 or 1, got {subsystem!r}")
    return m.reshape(4, 4)


def min_pt_eigenvalue(rho) -> float:
    """Smallest eigenvalue of the partial transpose; negative iff entangled."""
    return float(np.linalg.eigvalsh(partial_transpose(_two_qubit(rho)))[0])


def negativity(rho) -> float:
    w = np.linalg.eigvalsh(partial_transpose(_two_qubit(rho)))
    neg = w[w < -EIGEN_FLOOR]
    return float(np.sum(np.abs(neg)))


def concurrence(rho) -> float:
    """Wootters concurrence max(0, l1 - l2 - l3 - l4).

    The l_i are the square roots of the eigenvalues of
    sqrt(rho) (sy x sy) rho* (sy x sy) sqrt(rho), in decreasing order.
    """
    m = _two_qubit(rho)
    w, v = np.linalg.eigh(m)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    flipped = _SIGMA_YY @ m.conj() @ _SIGMA_YY
    r = sqrt_rho @ flipped @ sqrt_rho
    lam = np.sqrt(np.clip(np.linalg.eigvalsh(0.5 * (r + r.conj().T)), 0.0, None))[::-1]
    c = float(lam[0] - lam[1] - lam[2] - lam[3])
    return c if c > EIGEN_FLOOR else 0.0


@dataclass(frozen=True)
class EntanglementReport:
    entropy_bits: float
    werner_p: float
    concurrence: float
    negativity: float
    entangled: bool
    condition_lhs: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def assess(rho, condition_lhs: Optional[float] = None) -> EntanglementReport:
    """All measures for one trace-one two-qubit state.

    ``entropy_bits`` is the entropy of the two-spin state itself; ``entangled``
    follows the PPT test, exact for two qubits.
    """
    m = _two_qubit(rho)
    neg = negativity(m)
    if condition_lhs is not None and not (math.isfinite(condition_lhs) and condition_lhs >= 0.0):
        raise ValueError(f"condition_lhs must be finite and >= 0, got {condition_lhs!r}")
    return EntanglementReport(
        entropy_bits=von_neumann_entropy(m),
        werner_p=werner_fit(m).p,
        concurrence=concurrence(m),
        negativity=neg,
        entangled=neg > EIGEN_FLOOR,
        condition_lhs=condition_lhs,
    )
