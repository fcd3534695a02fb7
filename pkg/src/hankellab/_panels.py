"""Initial panel layouts and integrand family ids shared by both backends.

Every specialized integral in the package is first rewritten on a finite
interval whose integrand is smooth apart from the cutoff transition bands:

* Laplace transforms split at the cutoff plateau boundaries; the small-
  argument piece is mapped by u = -log(lambda), the large-argument piece
  by w = lambda * t.
* Moment integrals map the interval endpoints by 1 -|mu| = exp(-v), which
  turns the logarithmic vanishing of the density into a polynomial-in-1/v
  factor under an exp(-v) weight.

The compiled and the pure numpy backend both receive their initial edges
from here so that their panel decisions coincide.
"""

import math

import numpy as np

LOG2 = math.log(2.0)
LOG4 = math.log(4.0)

# exp(-TAIL) ~ 1e-24, far below rtol * value for every target integral
TAIL = 55.0

# integrand family ids understood by backend.integrate_family
FID_LAPLACE_DOWN = 1  # u-variable, lambda < 1/2 piece of the two-sided profile
FID_LAPLACE_UP = 2  # w-variable, lambda > 2 piece (caller scales by 1/t)
FID_MOMENT_POS = 3  # v-variable, mu > 0 piece of the moment density
FID_MOMENT_NEG = 4  # v-variable, mu < 0 piece
FID_LEMMA_DOWN = 5  # u-variable, I_m(t) over (0, c), c < 1
FID_LEMMA_UP = 6  # w-variable, I_m(t) over (c, inf), c > 1 (caller scales)


def _geom(lo, hi, step):
    """Edges from lo to hi with spacing doubling away from lo."""
    out = [lo]
    x = lo
    while x + step < hi:
        x += step
        out.append(x)
        step *= 2.0
    out.append(hi)
    return out


def edges_laplace_down(t):
    hi = max(60.0, math.log(max(t, 1.0)) + TAIL)
    return np.array([LOG2] + _geom(LOG4, hi, 0.5))


def edges_laplace_up(t):
    # w = lambda * t on [2t, W]; the whole piece is below 1e-55 once 2t > 130
    if 2.0 * t > 130.0:
        return None
    w0 = 2.0 * t
    hi = w0 + TAIL + 15.0
    w1 = 4.0 * t
    if w1 >= hi:
        return np.array([w0, hi])
    return np.array([w0] + _geom(w1, hi, max(0.25 * t, 1e-3)))


def edges_moment_pos(j):
    v0 = math.log(2.5)
    v1 = math.log(4.5)
    hi = max(60.0, math.log(j + 1.0) + TAIL)
    return np.array([v0] + _geom(v1, hi, 0.5))


def edges_moment_neg(j):
    v1 = math.log(1.5)
    hi = max(60.0, math.log(j + 1.0) + TAIL)
    return np.array([0.0] + _geom(v1, hi, 0.5))


def edges_lemma_down(c, t):
    if not 0.0 < c < 1.0:
        raise ValueError("split point c must lie in (0, 1)")
    u0 = -math.log(c)
    hi = max(60.0, math.log(max(t, 1.0)) + TAIL)
    return np.array(_geom(u0, hi, max(0.5, 0.25 * u0)))


def edges_lemma_up(c, t, m):
    if c <= 1.0:
        raise ValueError("split point c must exceed 1")
    w0 = c * t
    hi = w0 + TAIL + 15.0 * (m + 1)
    return np.array(_geom(w0, hi, max(w0, 1e-4)))
