"""Physical parameters of one Kondo system and the length scales they imply.

Everything downstream is dimensionless: energies in units of E_F, lengths in
units of 1/k_F.  A system is fixed by two ratios, E_B/E_F and D/E_F, plus the
convention used for the upper limit of the energy integrals.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field


class CutoffMode(str, enum.Enum):
    """Upper limit of the reduced-energy integrals over t = eps/E_B."""

    DERIVED = "derived"  # Lambda = D/E_B
    PAPER_LITERAL = "paper-literal"  # Lambda = D/E_F

    @classmethod
    def parse(cls, value: "CutoffMode | str") -> "CutoffMode":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for mode in cls:
            if mode.value == key or mode.name.lower().replace("_", "-") == key:
                return mode
        raise ValueError(f"cutoff_mode: unknown value {value!r}; expected 'derived' or 'paper-literal'")


class RegimeWarning(UserWarning):
    """Parameters outside E_B <= D <= E_F; results are computed anyway."""


@dataclass(frozen=True)
class ModelParams:
    eb_ratio: float
    d_ratio: float
    cutoff_mode: CutoffMode = CutoffMode.DERIVED
    physical_regime: bool = field(init=False, compare=False)

    def __post_init__(self):
        for name in ("eb_ratio", "d_ratio"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ValueError(f"{name}: expected a real number, got {value!r}") from None
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name}: must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "cutoff_mode", CutoffMode.parse(self.cutoff_mode))
        object.__setattr__(self, "physical_regime", self.eb_ratio <= self.d_ratio <= 1.0)

    @property
    def cutoff(self) -> float:
        """Upper limit Lambda of the t-integrals."""
        if self.cutoff_mode is CutoffMode.DERIVED:
            return self.d_ratio / self.eb_ratio
        return self.d_ratio

    def with_mode(self, mode: CutoffMode | str) -> "ModelParams":
        return ModelParams(self.eb_ratio, self.d_ratio, CutoffMode.parse(mode))

    def as_dict(self) -> dict:
        return {
            "eb_ratio": self.eb_ratio,
            "d_ratio": self.d_ratio,
            "cutoff_mode": self.cutoff_mode.value,
            "cutoff": self.cutoff,
            "physical_regime": self.physical_regime,
        }


@dataclass(frozen=True)
class DerivedScales:
    xi_k: float  # screening length times k_F
    lambda_f: float  # Fermi wavelength times k_F
    cutoff: float


def make_params(eb_ratio: float, d_ratio: float,
                cutoff_mode: CutoffMode | str = CutoffMode.DERIVED,
                warn: bool = False) -> ModelParams:
    """Validate the ratios and build a :class:`ModelParams`.

    With ``warn=True`` a :class:`RegimeWarning` is emitted when the
    parameters fall outside ``eb_ratio <= d_ratio <= 1``.
    """
    params = ModelParams(eb_ratio, d_ratio, cutoff_mode)
    if warn and not params.physical_regime:
        warnings.warn(
            f"eb_ratio={params.eb_ratio:g}, d_ratio={params.d_ratio:g} is outside "
            "E_B <= D <= E_F", RegimeWarning, stacklevel=2)
    return params


def derive_scales(params: ModelParams) -> DerivedScales:
    return DerivedScales(xi_k=2.0 / params.eb_ratio, lambda_f=2.0 * math.pi, cutoff=params.cutoff)


def kondo_binding_energy(j_n0: float, d_ratio: float) -> float:
    """E_B/E_F = (D/E_F) exp(2 / (3 J N(0))) for antiferromagnetic J < 0.

    Weak coupling (``j_n0 -> 0-``) drives the result to zero, and it
    underflows to exactly 0.0 once ``j_n0`` is above roughly -1e-3.
    """
    j_n0 = float(j_n0)
    if not math.isfinite(j_n0) or j_n0 >= 0.0:
        raise ValueError(f"j_n0: exchange must be negative (antiferromagnetic), got {j_n0!r}")
    if not math.isfinite(d_ratio) or d_ratio <= 0.0:
        raise ValueError(f"d_ratio: must be finite and > 0, got {d_ratio!r}")
    return d_ratio * math.exp(2.0 / (3.0 * j_n0))
