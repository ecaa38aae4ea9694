"""Scalar kernels of the Yosida singlet as functions of x = k_F r.

The screening-cloud kernel is

    f_N(x) = (1/x) * int_0^Lambda sin(x sqrt(1 + t eb)) / (1 + t) dt,

with eb = E_B/E_F and Lambda the cutoff of :class:`ModelParams`.  The
normalisation integral y and f_N together fix the singlet weight f/n of the
impurity-electron two-spin matrix; every other kernel here is algebra on
top of those two integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .model import ModelParams, derive_scales
from .quadrature import (DEFAULT_ABS_TOL, DEFAULT_REL_TOL, QuadratureResult,
                         integrate, integrate_oscillatory)

SMALL_X = 1e-4
_EPS = float(np.finfo(float).eps)
OSCILLATORY_PHASE = 10.0
_G_SERIES_X = 0.1


def _phase_span(x: float, params: ModelParams) -> float:
    """Phase accumulated by sin(x sqrt(1 + t eb)) over [0, Lambda]."""
    return x * (math.sqrt(1.0 + params.eb_ratio * params.cutoff) - 1.0)


def fn_integral(x: float, params: ModelParams, rel_tol: float = DEFAULT_REL_TOL,
                abs_tol: float = DEFAULT_ABS_TOL) -> QuadratureResult:
    """Quadrature result for x * f_N(x) (or f_N(x) itself in the small-x branch)."""
    x = _check_x(x)
    eb, lam = params.eb_ratio, params.cutoff
    if x < SMALL_X:
        # sin(x s)/x = s (1 - (x s)^2 / 6) + O(x^4), exact to rounding for x < 1e-4
        def integrand(t):
            s = np.sqrt(1.0 + eb * t)
            return s * (1.0 - (x * s) ** 2 / 6.0) / (1.0 + t)
        return integrate(integrand, 0.0, lam, rel_tol, abs_tol)

    def integrand(t):
        return np.sin(x * np.sqrt(1.0 + eb * t)) / (1.0 + t)

    # the phase x sqrt(1 + t eb) is only known to ~x eps, so the integral
    # cannot be resolved below ~x eps int|f|, whatever the quadrature does
    abs_tol = max(abs_tol, 8.0 * _EPS * x * math.log1p(lam))
    if _phase_span(x, params) >= OSCILLATORY_PHASE:
        # d(phase)/dt = x eb / (2 sqrt(1 + t eb)) is largest at t = 0
        return integrate_oscillatory(integrand, 0.0, lam, 0.5 * x * eb, rel_tol, abs_tol)
    return integrate(integrand, 0.0, lam, rel_tol, abs_tol)


def _check_x(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise ValueError(f"x = k_F r must be finite and >= 0, got {x!r}")
    return x


@lru_cache(maxsize=4096)
def _f_n_cached(x: float, params: ModelParams) -> float:
    result = fn_integral(x, params)
    return result.value if x < SMALL_X else result.value / x


def f_n(x: float, params: ModelParams) -> float:
    """Screening-cloud kernel f_N = f~(r) / N(0) at x = k_F r."""
    return _f_n_cached(_check_x(x), params)


@lru_cache(maxsize=256)
def y_integral(params: ModelParams) -> float:
    """Normalisation integral y = int_0^Lambda sqrt(1 + t eb) / (1 + t)^2 dt."""
    eb = params.eb_ratio
    return integrate(lambda t: np.sqrt(1.0 + eb * t) / (1.0 + t) ** 2,
                     0.0, params.cutoff).value


def f_over_n(x: float, params: ModelParams) -> float:
    """Singlet weight f/n = (3/4) eb f_N^2 / y."""
    fn = f_n(x, params)
    return 0.75 * params.eb_ratio * fn * fn / y_integral(params)


def condition_lhs(x: float, params: ModelParams) -> float:
    """Left side of the entanglement condition; the pair is entangled iff > 1."""
    return 2.0 * f_over_n(x, params)


def werner_from_f_over_n(fon: float) -> float:
    return fon / (1.0 + fon)


def werner_p(x: float, params: ModelParams) -> float:
    return werner_from_f_over_n(f_over_n(x, params))


def corr_zz(x: float, params: ModelParams) -> float:
    """<sigma^z_im sigma^z(r)> in units of n; never positive."""
    return -2.0 * f_over_n(x, params)


def g_fn(x):
    """Free-gas exchange kernel 3 (sin x - x cos x) / x^3, with g(0) = 1.

    Accepts a scalar or an array; a series is used below x = 0.1 where the
    closed form cancels.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0.0):
        raise ValueError("g_fn: x must be finite and >= 0")
    out = np.empty_like(xa)
    small = xa < _G_SERIES_X
    xs = xa[small]
    x2 = xs * xs
    out[small] = 1.0 - x2 / 10.0 + x2 ** 2 / 280.0 - x2 ** 3 / 15120.0 + x2 ** 4 / 1330560.0
    xl = xa[~small]
    out[~small] = 3.0 * (np.sin(xl) - xl * np.cos(xl)) / xl ** 3
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class KernelProfile:
    xs: np.ndarray
    f_n: np.ndarray
    f_n_normalized: np.ndarray
    f_over_n: np.ndarray
    p: np.ndarray
    corr_zz: np.ndarray
    cond_lhs: np.ndarray
    g: np.ndarray

    COLUMNS = ("x", "f_n", "f_n_normalized", "f_over_n", "p", "corr_zz", "cond_lhs", "g")

    def __len__(self):
        return self.xs.size

    def columns(self) -> dict:
        return {
            "x": self.xs, "f_n": self.f_n, "f_n_normalized": self.f_n_normalized,
            "f_over_n": self.f_over_n, "p": self.p, "corr_zz": self.corr_zz,
            "cond_lhs": self.cond_lhs, "g": self.g,
        }


class KernelEvaluationError(RuntimeError):
    def __init__(self, x: float, cause: Exception):
        super().__init__(f"kernel evaluation failed at x={x!r}: {cause}")
        self.x = x


def profile(xs: Iterable[float], params: ModelParams) -> KernelProfile:
    """Evaluate every kernel on a strictly increasing grid of x values."""
    xs = np.asarray(list(xs), dtype=float)
    if xs.ndim != 1 or xs.size == 0:
        raise ValueError("profile needs a non-empty 1-d grid")
    if np.any(np.diff(xs) <= 0.0):
        raise ValueError("profile grid must be strictly increasing")
    fn = np.empty_like(xs)
    for i, x in enumerate(xs):
        try:
            fn[i] = f_n(x, params)
        except (ArithmeticError, ValueError) as exc:
            raise KernelEvaluationError(float(x), exc) from exc
    fn0 = f_n(0.0, params)
    fon = 0.75 * params.eb_ratio * fn * fn / y_integral(params)
    return KernelProfile(
        xs=xs, f_n=fn, f_n_normalized=fn / fn0, f_over_n=fon,
        p=fon / (1.0 + fon), corr_zz=-2.0 * fon, cond_lhs=2.0 * fon,
        g=np.atleast_1d(g_fn(xs)),
    )


def max_condition_lhs(params: ModelParams, x_max: float | None = None, points: int = 1000) -> float:
    """Largest condition value on a uniform grid over [0, x_max]; x_max defaults to 10 xi_K."""
    if x_max is None:
        x_max = 10.0 * derive_scales(params).xi_k
    return float(np.max(profile(np.linspace(0.0, x_max, points), params).cond_lhs))
