"""Pure numpy implementation of the hot quadrature kernels.

This module is the fallback backend; `hankellab._ckern` implements the
same integrate_family contract in compiled code.  Both receive identical
initial panel edges (see _panels) and run the same worst-first bisection,
so their results agree to accumulation error.
"""

import math

import numpy as np

from . import _panels as P
from .quadrature import integrate

BACKEND_NAME = "python"

_LOG45 = math.log(4.5)
_LOG15 = math.log(1.5)


def smoothstep(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, exp(-1/x) blend between."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros_like(x)
    out[x >= 1.0] = 1.0
    mid = (x > 0.0) & (x < 1.0)
    xm = x[mid]
    a = np.exp(-1.0 / xm)
    b = np.exp(-1.0 / (1.0 - xm))
    out[mid] = a / (a + b)
    return float(out[0]) if scalar else out


def chi0(t):
    """Cutoff equal to 1 on (0, 1/4] and 0 on [1/2, inf)."""
    return smoothstep(2.0 - 4.0 * np.asarray(t, dtype=float))


def chiinf(t):
    """Cutoff equal to 0 on (0, 2] and 1 on [4, inf)."""
    return smoothstep(0.5 * np.asarray(t, dtype=float) - 1.0)


def _chiinf_of_exp_shifted(v):
    # chiinf(e^v - 1/2) without overflow; plateau for v >= log(4.5)
    out = np.ones_like(v)
    low = v < _LOG45
    if np.any(low):
        out[low] = chiinf(np.exp(v[low]) - 0.5)
    return out


def _chi0_of_mobius(v):
    # chi0(e^-v / (4 - 2 e^-v)); plateau value 1 for v >= log(3/2)
    out = np.ones_like(v)
    low = v < _LOG15
    if np.any(low):
        ev = np.exp(-v[low])
        out[low] = chi0(ev / (4.0 - 2.0 * ev))
    return out


def _make_integrand(fid, alpha, s, m):
    if fid == P.FID_LAPLACE_DOWN:
        t = s

        def f(u):
            lam = np.exp(-u)
            return u ** (-alpha) * chi0(lam) * lam * np.exp(-t * lam)

    elif fid == P.FID_LAPLACE_UP:
        t = s

        def f(w):
            r = w / t
            return np.log(r) ** (-alpha) * chiinf(r) * np.exp(-w)

    elif fid == P.FID_MOMENT_POS:
        j = s

        def f(v):
            emv = np.exp(-v)
            logx = v + np.log1p(-0.5 * emv)
            power = np.exp(j * np.log1p(-emv) - v)
            return logx ** (-alpha) * _chiinf_of_exp_shifted(v) * power

    elif fid == P.FID_MOMENT_NEG:
        j = s

        def f(v):
            emv = np.exp(-v)
            logy = v + np.log(4.0 - 2.0 * emv)
            power = np.exp(j * np.log1p(-emv) - v)
            return logy ** (-alpha) * _chi0_of_mobius(v) * power

    elif fid == P.FID_LEMMA_DOWN:
        t = s

        def f(u):
            return u ** (-alpha) * np.exp(-(m + 1.0) * u - t * np.exp(-u))

    elif fid == P.FID_LEMMA_UP:
        t = s

        def f(w):
            return np.log(w / t) ** (-alpha) * w**m * np.exp(-w)

    else:
        raise ValueError(f"unknown integrand family {fid}")
    return f


def integrate_family(fid, alpha, s, m, edges, rtol=1e-10, max_panels=2048):
    """Integrate one member of the built-in integrand family.

    Parameters mirror the compiled backend: ``s`` is the Laplace argument t
    or the moment order j depending on the family, ``m`` the power weight.
    """
    f = _make_integrand(fid, float(alpha), float(s), int(m))
    res = integrate(f, edges, rtol=rtol, max_panels=max_panels)
    return res.value
