import math

import mpmath
import pytest
from hypothesis import HealthCheck, settings

from kondo_entanglement import make_params

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def ref_params():
    """eb = 1e-3, d = 0.1 in the derived convention (cutoff 100)."""
    return make_params(1e-3, 0.1)


def mp_f_n(x, eb, lam, dps=30):
    """High-precision reference for f_N by mpmath, split at half periods."""
    with mpmath.workdps(dps):
        eb, lam, x = mpmath.mpf(eb), mpmath.mpf(lam), mpmath.mpf(x)
        if x == 0:
            return float(mpmath.quad(lambda t: mpmath.sqrt(1 + eb * t) / (1 + t), [0, lam]))
        s1 = mpmath.sqrt(1 + eb * lam)
        # breakpoints where the phase x*s crosses multiples of pi
        n_lo, n_hi = int(mpmath.ceil(x / mpmath.pi)), int(mpmath.floor(x * s1 / mpmath.pi))
        pts = [mpmath.mpf(0)]
        for k in range(n_lo, n_hi + 1):
            t = ((k * mpmath.pi / x) ** 2 - 1) / eb
            if 0 < t < lam:
                pts.append(t)
        pts.append(lam)
        val = mpmath.quad(lambda t: mpmath.sin(x * mpmath.sqrt(1 + eb * t)) / (1 + t), pts)
        return float(val / x)


def mp_y(eb, lam, dps=30):
    with mpmath.workdps(dps):
        eb, lam = mpmath.mpf(eb), mpmath.mpf(lam)
        return float(mpmath.quad(lambda t: mpmath.sqrt(1 + eb * t) / (1 + t) ** 2, [0, 1, lam]))


def closed_fn0(eb, lam):
    """f_N(0) = [2 s + c ln((s - c)/(s + c))] from s = 1 to sqrt(1 + eb lam), c = sqrt(1 - eb)."""
    c = math.sqrt(1.0 - eb)
    F = lambda s: 2.0 * s + c * math.log((s - c) / (s + c))
    return F(math.sqrt(1.0 + eb * lam)) - F(1.0)


def closed_y(eb, lam):
    """y = 2 eb [-s / (2 (s^2 - c^2)) + ln((s - c)/(s + c)) / (4 c)] between the same limits."""
    c = math.sqrt(1.0 - eb)
    F = lambda s: -s / (2.0 * (s * s - c * c)) + math.log((s - c) / (s + c)) / (4.0 * c)
    return 2.0 * eb * (F(math.sqrt(1.0 + eb * lam)) - F(1.0))
