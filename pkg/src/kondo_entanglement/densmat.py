"""Reduced spin density matrices of the Yosida singlet.

Two-spin matrices use the basis order (uu, ud, du, dd).  The first slot is
the impurity (or conduction electron 1), the second the conduction electron
at r (or electron 2).  All three builders produce the same block pattern:
diagonal entries plus the central ud/du block.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import ModelParams

BASIS = ("uu", "ud", "du", "dd")
HERMITIAN_TOL = 1e-12
PSD_FLOOR = 1e-12
GEOMETRY_TOL = 1e-9

_SINGLET = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)


class Normalization(str, enum.Enum):
    UNITS_OF_N = "units-of-n"
    UNITS_OF_N2_OVER_8 = "units-of-n2-over-8"
    TRACE_ONE = "trace-one"


class DensityMatrixError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TwoSpinDensityMatrix:
    """A 4x4 Hermitian PSD matrix in the (uu, ud, du, dd) basis.

    ``prefactor`` is the overall scalar that multiplies the element matrix
    in the defining expression (1/2 for the impurity-electron matrix); the
    individual spin matrix elements are ``entries / prefactor``.
    """

    entries: np.ndarray
    normalization: Normalization
    prefactor: float = 1.0

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (4, 4):
            raise DensityMatrixError(f"expected a 4x4 matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DensityMatrixError("matrix has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL * scale:
            raise DensityMatrixError("matrix is not Hermitian")
        lowest = float(np.linalg.eigvalsh(m)[0])
        if lowest < -PSD_FLOOR * scale:
            raise DensityMatrixError(f"matrix is not positive semidefinite (eigenvalue {lowest:.3e})")
        norm = Normalization(self.normalization)
        if norm is Normalization.TRACE_ONE and abs(np.trace(m).real - 1.0) > 1e-12:
            raise DensityMatrixError(f"trace-one matrix has trace {np.trace(m).real!r}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "normalization", norm)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    @property
    def elements(self) -> np.ndarray:
        return self.entries / self.prefactor

    def element(self, bra: str, ket: str) -> complex:
        """Entry rho_{bra;ket}, e.g. ``element("ud", "du")``."""
        return complex(self.entries[BASIS.index(bra), BASIS.index(ket)])

    def to_dict(self) -> dict:
        return {
            "basis": list(BASIS),
            "normalization": self.normalization.value,
            "prefactor": self.prefactor,
            "trace": self.trace,
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in self.entries],
        }


@dataclass(frozen=True)
class WernerDecomposition:
    """Singlet weight ``p`` and the max-abs misfit of the Werner form.

    For input that is not exactly Werner, ``p`` is a fit and may lie in
    [-1/3, 1].
    """

    p: float
    residual: float


def singlet_projector() -> np.ndarray:
    return np.outer(_SINGLET, _SINGLET).astype(complex)


def werner_matrix(p: float) -> np.ndarray:
    return (1.0 - p) * np.eye(4, dtype=complex) / 4.0 + p * singlet_projector()


def werner_state(p: float) -> TwoSpinDensityMatrix:
    if not -1.0 / 3.0 <= p <= 1.0:
        raise DensityMatrixError(f"Werner parameter must lie in [-1/3, 1], got {p!r}")
    return TwoSpinDensityMatrix(werner_matrix(p), Normalization.TRACE_ONE)


def impurity_rho() -> np.ndarray:
    """Reduced state of the impurity spin: the fully mixed qubit."""
    return np.eye(2) / 2.0


def rho2_from_f_over_n(fon: float) -> TwoSpinDensityMatrix:
    """Impurity-electron matrix for a given singlet weight f/n (units of n).

    Entries are 1/4 on the corners, 1/4 + f/2 on the central diagonal and
    -f/2 off-diagonal, i.e. I/4 + f |singlet><singlet|, with trace 1 + f.
    """
    if not math.isfinite(fon) or fon < 0.0:
        raise DensityMatrixError(f"f_over_n must be finite and >= 0, got {fon!r}")
    half = 0.5
    elements = np.diag([0.5, 0.5 + fon, 0.5 + fon, 0.5]).astype(complex)
    elements[1, 2] = elements[2, 1] = -fon
    return TwoSpinDensityMatrix(half * elements, Normalization.UNITS_OF_N, prefactor=half)


def rho2_impurity_conduction(x: float, params: ModelParams) -> TwoSpinDensityMatrix:
    return rho2_from_f_over_n(kernels.f_over_n(x, params))


def spin_correlation(rho: TwoSpinDensityMatrix) -> float:
    """rho_uu + rho_dd - rho_ud - rho_du over the spin matrix elements.

    For the impurity-electron matrix this is <sigma^z_im sigma^z(r)> = -2 f/n.
    """
    d = np.real(np.diag(rho.elements))
    return float(d[0] + d[3] - d[1] - d[2])


def zz_expectation(rho: TwoSpinDensityMatrix) -> float:
    """Tr[(sigma^z x sigma^z) rho] / Tr[rho]."""
    d = np.real(np.diag(rho.entries))
    return float((d[0] + d[3] - d[1] - d[2]) / d.sum())


def normalize_to_werner(rho: TwoSpinDensityMatrix) -> tuple[TwoSpinDensityMatrix, WernerDecomposition]:
    """Rescale to unit trace and fit the Werner form (1-p) I/4 + p |singlet><singlet|.

    The fit uses the singlet fidelity F, p = (4F - 1)/3, which is exact for a
    Werner input.
    """
    tr = rho.trace
    if not tr > 0.0:
        raise DensityMatrixError(f"cannot normalise a matrix with trace {tr!r}")
    m = rho.entries / tr
    m = 0.5 * (m + m.conj().T)
    m = m / np.trace(m).real
    return TwoSpinDensityMatrix(m, Normalization.TRACE_ONE), werner_fit(m)


def werner_fit(m: np.ndarray) -> WernerDecomposition:
    """Werner fit of a unit-trace 4x4 array."""
    m = np.asarray(m, dtype=complex)
    fidelity = float(np.real(_SINGLET @ m @ _SINGLET))
    p = (4.0 * fidelity - 1.0) / 3.0
    return WernerDecomposition(p, float(np.max(np.abs(m - werner_matrix(p)))))


def rho2_free_from_g(g: float) -> TwoSpinDensityMatrix:
    """Free-gas two-electron matrix in units of n^2/8 for exchange kernel g."""
    g2 = float(g) ** 2
    if g2 > 1.0 + 1e-12:
        raise DensityMatrixError(f"|g| must not exceed 1, got g={g!r}")
    m = np.diag([1.0 - g2, 1.0, 1.0, 1.0 - g2]).astype(complex)
    m[1, 2] = m[2, 1] = -g2
    return TwoSpinDensityMatrix(m, Normalization.UNITS_OF_N2_OVER_8)


def rho2_free(x_rel: float) -> TwoSpinDensityMatrix:
    return rho2_free_from_g(kernels.g_fn(_check_distance("x_rel", x_rel)))


def _check_distance(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise DensityMatrixError(f"{name} must be finite and >= 0, got {x!r}")
    return x


def check_geometry(x1: float, x2: float, x_rel: float) -> None:
    """Require |x1 - x2| <= x_rel <= x1 + x2 for three distances in a triangle."""
    x1, x2, x_rel = (_check_distance(n, v) for n, v in (("x1", x1), ("x2", x2), ("x_rel", x_rel)))
    slack = GEOMETRY_TOL * max(1.0, x1 + x2)
    if x_rel < abs(x1 - x2) - slack or x_rel > x1 + x2 + slack:
        raise DensityMatrixError(
            f"no two points at distances x1={x1!r}, x2={x2!r} from the impurity "
            f"are x_rel={x_rel!r} apart")


def delta_rho_from_kernels(fn1: float, fn2: float, g_rel: float, eb_ratio: float) -> TwoSpinDensityMatrix:
    """Impurity correction to the two-electron matrix, units of n^2/8.

    Corners a + b, central diagonal a, central off-diagonal b, all times
    (3/2) eb, with a = (fn1^2 + fn2^2)/2 (g(0) = 1) and b = g_rel fn1 fn2.
    """
    if not math.isfinite(eb_ratio) or eb_ratio < 0.0:
        raise DensityMatrixError(f"eb_ratio must be finite and >= 0, got {eb_ratio!r}")
    a = 0.5 * (fn1 * fn1 + fn2 * fn2)
    b = g_rel * fn1 * fn2
    m = np.diag([a + b, a, a, a + b]).astype(complex)
    m[1, 2] = m[2, 1] = b
    return TwoSpinDensityMatrix(1.5 * eb_ratio * m, Normalization.UNITS_OF_N2_OVER_8)


def delta_rho(x1: float, x2: float, x_rel: float, params: ModelParams) -> TwoSpinDensityMatrix:
    check_geometry(x1, x2, x_rel)
    return delta_rho_from_kernels(kernels.f_n(x1, params), kernels.f_n(x2, params),
                                  kernels.g_fn(x_rel), params.eb_ratio)


def rho2_conduction_from_kernels(fn1: float, fn2: float, g_rel: float, eb_ratio: float) -> TwoSpinDensityMatrix:
    free = rho2_free_from_g(g_rel)
    delta = delta_rho_from_kernels(fn1, fn2, g_rel, eb_ratio)
    return TwoSpinDensityMatrix(free.entries + delta.entries, Normalization.UNITS_OF_N2_OVER_8)


def rho2_conduction(x1: float, x2: float, x_rel: float, params: ModelParams) -> TwoSpinDensityMatrix:
    """Two conduction-electron spins at distances x1, x2 from the impurity, x_rel apart."""
    check_geometry(x1, x2, x_rel)
    return rho2_conduction_from_kernels(kernels.f_n(x1, params), kernels.f_n(x2, params),
                                        kernels.g_fn(x_rel), params.eb_ratio)
