"""Brute-force momentum-lattice sums that check the continuum kernels.

Momenta are q = k/k_F = dk * (i, j, l) on the cube |i|, |j|, |l| <= M with
the free dispersion eps/E_F = q^2 - 1.  With (1/V) sum_k -> dk^3/(2 pi)^3
sum over lattice points, the kernels become

    f_N(x)  = dk^3 / (2 pi)          sum_{1 < q^2 <= 1+d} cos(q . x) / (q^2 - 1 + eb)
    N_red   = eb dk^3 / (2 pi)       sum_{1 < q^2 <= 1+d} 1 / (q^2 - 1 + eb)^2
    g(x)    = (1 / #{q^2 <= 1})      sum_{q^2 <= 1} cos(q . x)

where N_red = (normalisation) E_B / (V N(0)) is the lattice counterpart of y.

Two evaluation routes give the same sums.  ``direct`` enumerates every
lattice point and works for any direction of x.  ``grouped`` (x along the
z axis only) collects terms with equal (i^2 + j^2, l) through the count
r2(m) of lattice points on a circle of radius^2 m; it is an exact
regrouping of the same terms, and it makes the fine lattices needed for
convergence affordable.  The z-axis sums reduce in a fixed order, so
repeated runs agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .model import ModelParams

DEFAULT_MAX_WORK = 4_000_000_000
DEFAULT_DIRECT_MAX_POINTS = 300_000_000
G_DEFAULT_RESOLUTION = 400
MIN_SPHERE_POINTS = 10
MAX_TABLE_ENTRIES = 300_000_000


class LatticeError(ValueError):
    pass


class LatticeBudgetError(LatticeError):
    pass


@dataclass(frozen=True)
class LatticeSpec:
    """Cubic momentum grid dk * [-M, M]^3 (dk in units of k_F)."""

    half_extent: int
    dk: float

    def __post_init__(self):
        if int(self.half_extent) != self.half_extent or self.half_extent < 1:
            raise LatticeError(f"half_extent must be an integer >= 1, got {self.half_extent!r}")
        if not (math.isfinite(self.dk) and self.dk > 0.0):
            raise LatticeError(f"dk must be finite and > 0, got {self.dk!r}")
        object.__setattr__(self, "half_extent", int(self.half_extent))
        object.__setattr__(self, "dk", float(self.dk))
        # with dk <= 1/2 the origin and the axis points at dk, 2 dk already give 13
        if self.dk > 0.5 and self.sphere_count() < MIN_SPHERE_POINTS:
            raise LatticeError(f"Fermi sphere holds fewer than {MIN_SPHERE_POINTS} lattice points at dk={self.dk!r}")

    @classmethod
    def from_resolution(cls, resolution: int, d_ratio: float = 0.0) -> "LatticeSpec":
        """Grid with 1/dk^2 = resolution^2 + 1/2, just covering q^2 <= 1 + d_ratio.

        The half-integer keeps every q^2 = dk^2 * (integer) off the Fermi
        surface q = 1.
        """
        dk = 1.0 / math.sqrt(resolution * resolution + 0.5)
        return cls(half_extent=math.floor(math.sqrt(1.0 + d_ratio) / dk) + 1, dk=dk)

    @property
    def inv_dk2(self) -> float:
        return 1.0 / (self.dk * self.dk)

    @property
    def q_max(self) -> float:
        return self.half_extent * self.dk

    def sphere_count(self) -> int:
        """Lattice points of the cube with q <= 1."""
        return int(np.sum(_sphere_columns(self)[1]))


def default_spec(params: ModelParams) -> LatticeSpec:
    """Converged grid for the impurity kernels.

    1/dk grows like 1/eb so the periodic box 2 pi / dk spans at least about
    pi screening lengths; the floor of 600 keeps the shell sums smooth when
    eb is large.  The shell eps <= D always lies inside the cube.
    """
    resolution = max(600, math.ceil(1.0 / params.eb_ratio))
    return LatticeSpec.from_resolution(resolution, params.d_ratio)


def default_g_spec() -> LatticeSpec:
    return LatticeSpec.from_resolution(G_DEFAULT_RESOLUTION)


@lru_cache(maxsize=4)
def _r2_table(m_max: int, half_extent: int) -> np.ndarray:
    """r2[m] = #{(i, j) in [-M, M]^2 : i^2 + j^2 = m} for m <= m_max."""
    if m_max + 1 > MAX_TABLE_ENTRIES:
        raise LatticeBudgetError(
            f"radial count table needs {m_max + 1:.3g} entries, limit is {MAX_TABLE_ENTRIES:.3g}")
    r2 = np.zeros(m_max + 1, dtype=np.int32)
    j = np.arange(0, half_extent + 1, dtype=np.int64)
    j2 = j * j
    wj = np.where(j == 0, 1, 2).astype(np.int32)
    for i in range(half_extent + 1):
        m = i * i + j2
        n = int(np.searchsorted(m, m_max, side="right"))
        if n == 0:
            break
        # indices within one row are distinct, so fancy-index += is exact
        r2[m[:n]] += wj[:n] * (1 if i == 0 else 2)
    r2.setflags(write=False)
    return r2


def _check_shell(spec: LatticeSpec, q2_max: float) -> None:
    if spec.q_max * spec.q_max < q2_max:
        raise LatticeError(
            f"lattice reaches q = {spec.q_max:.6g} but the sum needs q up to {math.sqrt(q2_max):.6g}")


def _unit(direction: Optional[Sequence[float]]) -> np.ndarray:
    if direction is None:
        return np.array([0.0, 0.0, 1.0])
    u = np.asarray(direction, dtype=float)
    if u.shape != (3,) or not np.all(np.isfinite(u)) or not np.linalg.norm(u) > 0.0:
        raise LatticeError(f"direction must be a non-zero 3-vector, got {direction!r}")
    return u / np.linalg.norm(u)


# grouped route

@lru_cache(maxsize=16)
def _shell_columns(eb_ratio: float, d_ratio: float, spec: LatticeSpec, max_work: int):
    """Per-l sums C1[l] = sum 1/(q^2 - 1 + eb) and C2[l] = sum of squares over the shell."""
    inv = spec.inv_dk2
    m_hi_total = math.floor((1.0 + d_ratio) * inv)
    M = spec.half_extent
    ls = np.arange(-M, M + 1, dtype=np.int64)
    work = (2 * M + 1) ** 2 + ls.size * (m_hi_total - math.floor(inv))
    if work > max_work:
        raise LatticeBudgetError(f"grouped lattice sum needs ~{work:.3g} operations, budget is {max_work:.3g}")
    r2 = _r2_table(min(m_hi_total, 2 * M * M), M)
    c1 = np.zeros(ls.size)
    c2 = np.zeros(ls.size)
    for idx, l in enumerate(ls):
        l2 = int(l * l)
        lo = max(math.floor(inv - l2) + 1, 0)
        hi = min(m_hi_total - l2, r2.size - 1)
        if hi < lo:
            continue
        m = np.arange(lo, hi + 1, dtype=np.float64)
        w = 1.0 / ((m + l2) / inv - 1.0 + eb_ratio)
        counts = r2[lo:hi + 1].astype(np.float64)
        c1[idx] = np.dot(counts, w)
        c2[idx] = np.dot(counts, w * w)
    for arr in (c1, c2):
        arr.setflags(write=False)
    return ls, c1, c2


@lru_cache(maxsize=16)
def _sphere_columns(spec: LatticeSpec):
    """S[l] = #{(i, j) : i^2 + j^2 + l^2 <= 1/dk^2}, the Fermi sphere sliced along z."""
    inv = spec.inv_dk2
    M = spec.half_extent
    r2 = _r2_table(min(math.floor(inv), 2 * M * M), M)
    cum = np.cumsum(r2)
    ls = np.arange(-M, M + 1, dtype=np.int64)
    s = np.zeros(ls.size)
    for idx, l in enumerate(ls):
        top = math.floor(inv - l * l)
        if top >= 0:
            s[idx] = cum[min(top, cum.size - 1)]
    s.setflags(write=False)
    return ls, s


def _axis_fourier(ls: np.ndarray, weights: np.ndarray, dk: float, x: float):
    phase = ls * dk * x
    return float(np.dot(weights, np.cos(phase))), float(np.dot(weights, np.sin(phase)))


# direct route

def _direct_shell_sums(spec: LatticeSpec, lo2: float, hi2: float, weight_fn, xs, u, max_points):
    """Sum weight_fn(q^2) * exp(i q . x u) over lo2 < q^2 <= hi2 (inclusive lo if lo2 < 0)."""
    M = spec.half_extent
    if (2 * M + 1) ** 3 > max_points:
        raise LatticeBudgetError(f"direct lattice sum over {(2 * M + 1) ** 3:.3g} points exceeds {max_points:.3g}")
    axis = np.arange(-M, M + 1) * spec.dk
    qj, ql = np.meshgrid(axis, axis, indexing="ij")
    s2 = qj * qj + ql * ql
    re = np.zeros(len(xs))
    im = np.zeros(len(xs))
    total_w = 0.0
    for qi in axis:
        q2 = s2 + qi * qi
        mask = (q2 > lo2) & (q2 <= hi2)
        if not mask.any():
            continue
        w = weight_fn(q2[mask])
        total_w += float(np.sum(w))
        proj = qi * u[0] + qj[mask] * u[1] + ql[mask] * u[2]
        for n, x in enumerate(xs):
            re[n] += float(np.dot(w, np.cos(proj * x)))
            im[n] += float(np.dot(w, np.sin(proj * x)))
    return re, im, total_w


def _check_real(re: float, im: float, scale: float, what: str) -> None:
    if abs(im) > 1e-10 * max(abs(re), scale):
        raise LatticeError(f"{what}: imaginary part {im!r} does not cancel (real part {re!r})")


def lattice_f_n(x: float, params: ModelParams, spec: Optional[LatticeSpec] = None,
                direction: Optional[Sequence[float]] = None, method: str = "auto",
                max_work: int = DEFAULT_MAX_WORK) -> float:
    """Lattice value of f_N(x) over the shell 0 < eps <= D.

    ``method`` is ``"grouped"`` (z axis only), ``"direct"`` or ``"auto"``,
    which picks grouped unless a direction is given.
    """
    spec = spec or default_spec(params)
    x = _check_x(x)
    q2_hi = 1.0 + params.d_ratio
    _check_shell(spec, q2_hi)
    pre = spec.dk ** 3 / (2.0 * math.pi)
    if _route(method, direction) == "grouped":
        ls, c1, _ = _shell_columns(params.eb_ratio, params.d_ratio, spec, max_work)
        re, im = _axis_fourier(ls, c1, spec.dk, x)
        scale = float(np.sum(c1))
    else:
        eb = params.eb_ratio
        r, i, scale = _direct_shell_sums(spec, 1.0, q2_hi, lambda q2: 1.0 / (q2 - 1.0 + eb),
                                         [x], _unit(direction), DEFAULT_DIRECT_MAX_POINTS)
        re, im = r[0], i[0]
    _check_real(re, im, scale, "lattice_f_n")
    return pre * re


def lattice_g(x: float, spec: Optional[LatticeSpec] = None,
              direction: Optional[Sequence[float]] = None, method: str = "auto",
              max_work: int = DEFAULT_MAX_WORK) -> float:
    """Lattice value of g(x) = (2/N) sum_{q <= 1} exp(i q . x), N/2 = points in the sphere."""
    spec = spec or default_g_spec()
    x = _check_x(x)
    _check_shell(spec, 1.0)
    if _route(method, direction) == "grouped":
        M = spec.half_extent
        if (2 * M + 1) ** 2 > max_work:
            raise LatticeBudgetError(f"lattice of half-extent {M} exceeds the work budget")
        ls, s = _sphere_columns(spec)
        re, im = _axis_fourier(ls, s, spec.dk, x)
        count = float(np.sum(s))
    else:
        r, i, count = _direct_shell_sums(spec, -1.0, 1.0, np.ones_like, [x], _unit(direction),
                                         DEFAULT_DIRECT_MAX_POINTS)
        re, im = r[0], i[0]
    _check_real(re, im, count, "lattice_g")
    return re / count


def lattice_norm(params: ModelParams, spec: Optional[LatticeSpec] = None, method: str = "auto",
                 max_work: int = DEFAULT_MAX_WORK) -> float:
    """Lattice value of (normalisation) E_B / (V N(0)); compare with y."""
    spec = spec or default_spec(params)
    q2_hi = 1.0 + params.d_ratio
    _check_shell(spec, q2_hi)
    pre = params.eb_ratio * spec.dk ** 3 / (2.0 * math.pi)
    if _route(method, None) == "grouped":
        _, _, c2 = _shell_columns(params.eb_ratio, params.d_ratio, spec, max_work)
        total = float(np.sum(c2))
    else:
        eb = params.eb_ratio
        _, _, total = _direct_shell_sums(spec, 1.0, q2_hi, lambda q2: 1.0 / (q2 - 1.0 + eb) ** 2,
                                         [], _unit(None), DEFAULT_DIRECT_MAX_POINTS)
    return pre * total


def _route(method: str, direction) -> str:
    if method not in ("auto", "grouped", "direct"):
        raise ValueError(f"method must be 'auto', 'grouped' or 'direct', got {method!r}")
    if method == "grouped" and direction is not None:
        u = _unit(direction)
        if not np.allclose(u, [0.0, 0.0, 1.0]):
            raise ValueError("the grouped route only sums along the z axis")
    if method == "auto":
        return "direct" if direction is not None else "grouped"
    return method


def _check_x(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise LatticeError(f"x must be finite and >= 0, got {x!r}")
    return x
