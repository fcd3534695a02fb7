"""Laplace transforms of the density profiles and asymptotic ratio checks.

The transform of the two-sided profile is the model kernel whose Hankel
operator anchors the continuous-case spectral asymptotics.  The ratio
tables quantify how fast t * |log t|^alpha * transform approaches its
limit; deviations shrink like 1/|log t|.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import _panels as P
from . import backend
from .kernels import (
    AsymContinuous,
    AsymDiscrete,
    ContinuousKernel,
    SigmaStar,
    eta_star,
    model_kernels_h0_hinf,
    moments,
    smooth_cutoffs,
)
from .quadrature import integrate


@dataclass(frozen=True)
class LaplaceResult:
    t: np.ndarray
    values: np.ndarray
    rel_tol: float


def _sigma_star_transform(p: AsymContinuous, t, rtol):
    down = 0.0
    up = 0.0
    if p.binf != 0.0:
        down = backend.integrate_family(
            P.FID_LAPLACE_DOWN, p.alpha, t, 0, P.edges_laplace_down(t), rtol
        )
    if p.b0 != 0.0:
        edges = P.edges_laplace_up(t)
        if edges is not None:
            up = (
                backend.integrate_family(P.FID_LAPLACE_UP, p.alpha, t, 0, edges, rtol)
                / t
            )
    return p.binf * down + p.b0 * up


def _generic_transform(sigma, t, rtol):
    hi_u = max(60.0, math.log(max(t, 1.0)) + P.TAIL)
    edges_u = np.array([P.LOG2] + P._geom(P.LOG4, hi_u, 0.5))

    def f_u(u):
        lam = np.exp(-u)
        return np.asarray(sigma(lam), dtype=float) * lam * np.exp(-t * lam)

    value = integrate(f_u, edges_u, rtol=rtol, atol=1e-300).value

    lam_max = (P.TAIL + 10.0) / t
    if lam_max > 0.5:
        pts = [x for x in (2.0, 4.0) if 0.5 < x < lam_max]
        edges_d = np.unique(np.concatenate([[0.5], pts, P._geom(max([0.5] + pts), lam_max, 0.5)]))

        def f_d(lam):
            return np.asarray(sigma(lam), dtype=float) * np.exp(-t * lam)

        value += integrate(f_d, edges_d, rtol=rtol, atol=1e-300).value
    return value


def laplace_transform(sigma, t, rtol=1e-10):
    """Transform of a bounded density at a single point t > 0.

    The small-argument region is handled in the variable u = -log(lambda);
    the direct region is truncated where exp(-lambda t) is negligible.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if isinstance(sigma, SigmaStar) and sigma.cutoffs.canonical:
        return _sigma_star_transform(sigma.params, t, rtol)
    return _generic_transform(sigma, t, rtol)


def laplace_many(sigma, ts, rtol=1e-10) -> LaplaceResult:
    ts = np.asarray(ts, dtype=float)
    vals = np.array([laplace_transform(sigma, float(t), rtol) for t in ts.ravel()])
    return LaplaceResult(t=ts, values=vals.reshape(ts.shape), rel_tol=rtol)


def laplace_model_kernel(p: AsymContinuous, c=None, rtol=1e-10, table_du=1.0 / 64) -> ContinuousKernel:
    """Continuous kernel h(t) = transform of the two-sided profile.

    Scalar evaluation integrates directly; bulk evaluation goes through a
    cubic spline of t * h(t) sampled on a uniform log grid, built lazily
    to cover the requested range (direct quadrature per matrix entry
    would be quadratically wasteful for grid discretizations).
    """
    c = c or smooth_cutoffs()
    sigma = SigmaStar(params=p, cutoffs=c)
    cache = {"lo": None, "hi": None, "spline": None}

    def eval1(t):
        return laplace_transform(sigma, t, rtol)

    def _ensure_table(lo_u, hi_u):
        if cache["spline"] is not None and cache["lo"] <= lo_u and cache["hi"] >= hi_u:
            return
        lo = min(lo_u, cache["lo"]) if cache["lo"] is not None else lo_u
        hi = max(hi_u, cache["hi"]) if cache["hi"] is not None else hi_u
        lo -= 2 * table_du
        hi += 2 * table_du
        n = int(math.ceil((hi - lo) / table_du)) + 1
        us = np.linspace(lo, hi, n)
        fs = np.array([laplace_transform(sigma, float(math.exp(u)), rtol) * math.exp(u) for u in us])
        cache["lo"], cache["hi"] = lo, hi
        cache["spline"] = CubicSpline(us, fs)

    def eval_many(ts):
        ts = np.asarray(ts, dtype=float)
        us = np.log(ts)
        _ensure_table(float(us.min()), float(us.max()))
        return cache["spline"](us) / ts

    return ContinuousKernel(
        eval=eval1,
        eval_many=eval_many,
        params=p,
        spec={"type": "laplace_model", "alpha": p.alpha, "b0": p.b0, "binf": p.binf},
    )


def _ratio_table(ts, values, alpha, m):
    ts = np.asarray(ts, dtype=float)
    predicted = math.factorial(m) * ts ** (-1.0 - m) * np.abs(np.log(ts)) ** (-alpha)
    ratio = values / predicted
    return {
        "t": ts,
        "value": np.asarray(values),
        "predicted": predicted,
        "ratio": ratio,
        "deviation": np.abs(ratio - 1.0),
        "log_band": 3.0 / np.abs(np.log(ts)),
    }


def lemma_L_check(alpha, m, c, t_list, rtol=1e-9):
    """Large-t ratio table for I_m(t) = int_0^c (-log l)^-alpha l^m e^-lt dl.

    The ratio to m! t^(-1-m) |log t|^-alpha approaches 1 with a 1/log t
    deviation; c must lie in (0, 1) and t_list should be increasing.
    """
    if not 0.0 < c < 1.0:
        raise ValueError("c must lie in (0, 1)")
    vals = [
        backend.integrate_family(
            P.FID_LEMMA_DOWN, alpha, float(t), int(m), P.edges_lemma_down(c, t), rtol
        )
        for t in t_list
    ]
    return _ratio_table(t_list, vals, alpha, m)


def lemma_M_check(alpha, m, c, t_list, rtol=1e-9):
    """Small-t mirror of lemma_L_check: the integral runs over (c, inf), c > 1."""
    if c <= 1.0:
        raise ValueError("c must exceed 1")
    vals = [
        float(t) ** (-1.0 - m)
        * backend.integrate_family(
            P.FID_LEMMA_UP, alpha, float(t), int(m), P.edges_lemma_up(c, t, m), rtol
        )
        for t in t_list
    ]
    return _ratio_table(t_list, vals, alpha, m)


def model_kernel_residual(p: AsymContinuous, c, t_list, rtol=1e-10):
    """Difference between the transform and its localized model pieces.

    The normalized residual |g(t)| * t * <log t>^(alpha+1) stays bounded
    over the whole half line.
    """
    c = c or smooth_cutoffs()
    sigma = SigmaStar(params=p, cutoffs=c)
    h0, hinf = model_kernels_h0_hinf(p.alpha, c)
    ts = np.asarray(t_list, dtype=float)
    transform = np.array([laplace_transform(sigma, float(t), rtol) for t in ts])
    model = p.b0 * h0.values(ts) + p.binf * hinf.values(ts)
    resid = transform - model
    jap = np.sqrt(1.0 + np.log(ts) ** 2)
    return {
        "t": ts,
        "transform": transform,
        "model": model,
        "residual": resid,
        "normalized": np.abs(resid) * ts * jap ** (p.alpha + 1.0),
    }


def moment_residual(p: AsymDiscrete, c, jmax, rtol=1e-10):
    """Even/odd residuals of the moment sequence against the decay model.

    Evaluated on the dyadic grid 16, 32, ..., jmax; neighbor averaging at
    (j, j+1) separates the smooth part from the alternating part.  Both
    normalized residuals |g(j)| * j * (log j)^(alpha+1) stay bounded.
    """
    if jmax < 16:
        raise ValueError("jmax must be at least 16")
    c = c or smooth_cutoffs()
    eta = eta_star(p, c)
    js = []
    j = 16
    while j <= jmax:
        js.append(j)
        j *= 2
    js = np.array(js)
    kern = moments(eta, 0, rtol=rtol)  # lazy beyond jmax=0

    def model(j):
        sign = 1.0 if j % 2 == 0 else -1.0
        return (p.b1 + sign * p.bm1) / (j * math.log(j) ** p.alpha)

    h_j = np.array([kern.eval(int(j)) for j in js])
    h_j1 = np.array([kern.eval(int(j) + 1) for j in js])
    r_j = h_j - np.array([model(int(j)) for j in js])
    r_j1 = h_j1 - np.array([model(int(j) + 1) for j in js])
    g_even = 0.5 * (r_j + r_j1)
    g_odd = 0.5 * (r_j - r_j1) * np.where(js % 2 == 0, 1.0, -1.0)
    logj = np.log(js.astype(float))
    norm = js * logj ** (p.alpha + 1.0)
    return {
        "j": js,
        "moment": h_j,
        "moment_next": h_j1,
        "residual_even": g_even,
        "residual_odd": g_odd,
        "normalized_even": np.abs(g_even) * norm,
        "normalized_odd": np.abs(g_odd) * norm,
    }
