"""Kernels, cutoffs and spectral-density profiles.

Discrete kernels are real sequences h(j) on the non-negative integers
(optionally Hermitian-block valued); continuous kernels are functions
h(t) on (0, inf).  The model families implemented here all decay like
1/(argument * log(argument)^alpha) with separate coefficients for the
even/alternating (discrete) or small/large-argument (continuous) parts.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _panels as P
from . import backend
from ._pykern import chi0 as _chi0_np
from ._pykern import chiinf as _chiinf_np
from ._pykern import smoothstep
from .quadrature import integrate


def _check_finite(**vals):
    for name, v in vals.items():
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v}")


@dataclass(frozen=True)
class AsymDiscrete:
    """Decay parameters of a discrete kernel: h(j) ~ (b1 + (-1)^j bm1) / (j log^alpha j)."""

    alpha: float
    b1: float
    bm1: float

    def __post_init__(self):
        _check_finite(alpha=self.alpha, b1=self.b1, bm1=self.bm1)
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class AsymContinuous:
    """Decay parameters of a continuous kernel at t -> 0 (b0) and t -> inf (binf)."""

    alpha: float
    b0: float
    binf: float

    def __post_init__(self):
        _check_finite(alpha=self.alpha, b0=self.b0, binf=self.binf)
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class CutoffPair:
    """Smooth cutoffs: chi0 = 1 on (0,1/4], 0 on [1/2,inf); chiinf = 0 on (0,2], 1 on [4,inf)."""

    chi0: object
    chiinf: object
    canonical: bool = False


def smooth_cutoffs():
    """The canonical cutoff pair built from the exp(-1/x) smooth step."""
    return _CANONICAL_CUTOFFS


_CANONICAL_CUTOFFS = CutoffPair(chi0=_chi0_np, chiinf=_chiinf_np, canonical=True)


def _as_canonical(c):
    if c is None:
        return _CANONICAL_CUTOFFS
    return c


@dataclass(frozen=True)
class DiscreteKernel:
    """A sequence kernel j -> h(j), scalar or Hermitian block valued."""

    eval: object
    head_overrides: tuple = ()
    params: AsymDiscrete | None = None
    block_dim: int = 1
    eval_many: object = None
    spec: dict | None = field(default=None, compare=False)

    def __call__(self, j):
        for jj, v in self.head_overrides:
            if jj == j:
                return v
        return self.eval(j)

    def values(self, n):
        """h(0), ..., h(n-1) as an array (shape (n,) or (n, k, k))."""
        js = np.arange(n)
        if self.eval_many is not None:
            out = np.asarray(self.eval_many(js))
        elif self.block_dim == 1:
            out = np.array([self.eval(int(j)) for j in js], dtype=float)
        else:
            out = np.stack([np.asarray(self.eval(int(j))) for j in js])
        for jj, v in self.head_overrides:
            if jj < n:
                out[jj] = v
        return out

    def scaled(self, s):
        ev = self.eval
        em = self.eval_many
        return DiscreteKernel(
            eval=lambda j: s * ev(j),
            head_overrides=tuple((j, s * v) for j, v in self.head_overrides),
            params=self.params,
            block_dim=self.block_dim,
            eval_many=None if em is None else (lambda js: s * em(js)),
        )


@dataclass(frozen=True)
class ContinuousKernel:
    """A function kernel t -> h(t) on (0, inf)."""

    eval: object
    deriv: object = None
    params: AsymContinuous | None = None
    eval_many: object = None
    spec: dict | None = field(default=None, compare=False)

    def __call__(self, t):
        if t <= 0:
            raise ValueError("kernel argument must be positive")
        return self.eval(t)

    def values(self, ts):
        ts = np.asarray(ts, dtype=float)
        if np.any(ts <= 0):
            raise ValueError("kernel argument must be positive")
        if self.eval_many is not None:
            return np.asarray(self.eval_many(ts))
        return np.array([self.eval(float(t)) for t in ts.ravel()]).reshape(ts.shape)


def model_sequence(p: AsymDiscrete) -> DiscreteKernel:
    """h(j) = (b1 + (-1)^j bm1) / (j log^alpha j) for j >= 2, zero heads."""
    alpha, b1, bm1 = p.alpha, p.b1, p.bm1

    def eval_many(js):
        js = np.asarray(js)
        out = np.zeros(js.shape, dtype=float)
        mask = js >= 2
        j = js[mask].astype(float)
        signs = np.where(js[mask] % 2 == 0, 1.0, -1.0)
        out[mask] = (b1 + signs * bm1) / (j * np.log(j) ** alpha)
        return out

    def eval1(j):
        return float(eval_many(np.array([j]))[0])

    return DiscreteKernel(
        eval=eval1,
        params=p,
        eval_many=eval_many,
        spec={"type": "discrete_model", "alpha": alpha, "b1": b1, "bm1": bm1},
    )


def hilbert_kernel() -> DiscreteKernel:
    """h(j) = 1/(j+1); bounded but not compact Hankel operator."""
    return DiscreteKernel(
        eval=lambda j: 1.0 / (j + 1.0),
        eval_many=lambda js: 1.0 / (np.asarray(js, dtype=float) + 1.0),
        spec={"type": "hilbert"},
    )


def power_kernel(gamma: float) -> DiscreteKernel:
    """h(j) = (j+1)^-gamma; eigenvalues decay exponentially for gamma > 1."""
    return DiscreteKernel(
        eval=lambda j: (j + 1.0) ** (-gamma),
        eval_many=lambda js: (np.asarray(js, dtype=float) + 1.0) ** (-gamma),
        spec={"type": "power", "gamma": gamma},
    )


def model_kernels_h0_hinf(alpha, c: CutoffPair | None = None):
    """The localized continuous model kernels (h0 near t=0, hinf near t=inf)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    c = _as_canonical(c)

    def h0_many(ts):
        ts = np.asarray(ts, dtype=float)
        out = np.zeros_like(ts)
        mask = ts < 0.5
        t = ts[mask]
        out[mask] = np.abs(np.log(t)) ** (-alpha) / t * c.chi0(t)
        return out

    def hinf_many(ts):
        ts = np.asarray(ts, dtype=float)
        out = np.zeros_like(ts)
        mask = ts > 2.0
        t = ts[mask]
        out[mask] = np.abs(np.log(t)) ** (-alpha) / t * c.chiinf(t)
        return out

    h0 = ContinuousKernel(
        eval=lambda t: float(h0_many(np.array([t]))[0]),
        eval_many=h0_many,
        params=AsymContinuous(alpha, 1.0, 0.0),
    )
    hinf = ContinuousKernel(
        eval=lambda t: float(hinf_many(np.array([t]))[0]),
        eval_many=hinf_many,
        params=AsymContinuous(alpha, 0.0, 1.0),
    )
    return h0, hinf


def continuous_model_kernel(p: AsymContinuous, c: CutoffPair | None = None) -> ContinuousKernel:
    """b0 * h0 + binf * hinf: the piecewise-explicit two-sided model kernel."""
    h0, hinf = model_kernels_h0_hinf(p.alpha, c)

    def eval_many(ts):
        return p.b0 * h0.values(ts) + p.binf * hinf.values(ts)

    return ContinuousKernel(
        eval=lambda t: float(eval_many(np.array([t]))[0]),
        eval_many=eval_many,
        params=p,
        spec={"type": "continuous_model", "alpha": p.alpha, "b0": p.b0, "binf": p.binf},
    )


@dataclass(frozen=True)
class SigmaStar:
    """Spectral density profile on (0, inf) with the coefficient swap:
    the large-t coefficient binf multiplies the lambda -> 0 cutoff."""

    params: AsymContinuous
    cutoffs: CutoffPair

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        scalar = lam.ndim == 0
        lam = np.atleast_1d(lam)
        if np.any(lam <= 0):
            raise ValueError("sigma_star argument must be positive")
        p = self.params
        out = np.zeros_like(lam)
        lo = lam < 0.5
        if np.any(lo):
            x = lam[lo]
            out[lo] = p.binf * np.abs(np.log(x)) ** (-p.alpha) * self.cutoffs.chi0(x)
        hi = (lam > 2.0) & np.isfinite(lam)
        if np.any(hi):
            x = lam[hi]
            out[hi] = p.b0 * np.log(x) ** (-p.alpha) * self.cutoffs.chiinf(x)
        return float(out[0]) if scalar else out


@dataclass(frozen=True)
class EtaStar:
    """Moment density on (-1, 1); vanishes logarithmically at both ends."""

    params: AsymDiscrete
    cutoffs: CutoffPair

    def __call__(self, mu):
        mu = np.asarray(mu, dtype=float)
        scalar = mu.ndim == 0
        mu = np.atleast_1d(mu)
        if np.any(np.abs(mu) >= 1.0):
            raise ValueError("eta_star argument must lie in (-1, 1)")
        p = self.params
        x = (1.0 + mu) / (2.0 * (1.0 - mu))
        out = np.zeros_like(mu)
        pos = x > 2.0
        if np.any(pos):
            out[pos] = p.b1 * np.log(x[pos]) ** (-p.alpha) * self.cutoffs.chiinf(x[pos])
        neg = x < 0.5
        if np.any(neg):
            out[neg] = p.bm1 * np.abs(np.log(x[neg])) ** (-p.alpha) * self.cutoffs.chi0(x[neg])
        return float(out[0]) if scalar else out


def sigma_star(p: AsymContinuous, c: CutoffPair | None = None) -> SigmaStar:
    return SigmaStar(params=p, cutoffs=_as_canonical(c))


def eta_star(p: AsymDiscrete, c: CutoffPair | None = None) -> EtaStar:
    return EtaStar(params=p, cutoffs=_as_canonical(c))


def moment_of_eta_star(p: AsymDiscrete, j, rtol=1e-10):
    """One moment of the two-sided density, via the fast backend."""
    pos = 0.0
    neg = 0.0
    if p.b1 != 0.0:
        pos = backend.integrate_family(
            P.FID_MOMENT_POS, p.alpha, float(j), 0, P.edges_moment_pos(j), rtol
        )
    if p.bm1 != 0.0:
        neg = backend.integrate_family(
            P.FID_MOMENT_NEG, p.alpha, float(j), 0, P.edges_moment_neg(j), rtol
        )
    sign = 1.0 if j % 2 == 0 else -1.0
    return p.b1 * pos + sign * p.bm1 * neg


def _generic_moment(eta, j, rtol):
    hi = max(60.0, math.log(j + 1.0) + P.TAIL)
    edges = np.array(P._geom(0.0, hi, 0.5))

    def side(sgn):
        def f(v):
            emv = np.exp(-v)
            mu = sgn * (1.0 - emv)
            power = np.exp(j * np.log1p(-emv) - v)
            return np.asarray(eta(mu), dtype=float) * power

        return integrate(f, edges, rtol=rtol, atol=1e-300).value

    sign = 1.0 if j % 2 == 0 else -1.0
    return side(1.0) + sign * side(-1.0)


def moments(eta, jmax, rtol=1e-10) -> DiscreteKernel:
    """Moment sequence h(j) = int_-1^1 eta(mu) mu^j dmu for 0 <= j <= jmax.

    Values beyond jmax are computed on demand with the same quadrature.
    """
    if jmax < 0:
        raise ValueError("jmax must be non-negative")
    if isinstance(eta, EtaStar) and eta.cutoffs.canonical:
        p = eta.params

        def compute(j):
            return moment_of_eta_star(p, j, rtol)

        params = p
    else:

        def compute(j):
            return _generic_moment(eta, j, rtol)

        params = eta.params if isinstance(eta, EtaStar) else None

    table = np.array([compute(j) for j in range(int(jmax) + 1)])
    cache = {}

    def eval1(j):
        j = int(j)
        if j < 0:
            raise ValueError("moment order must be non-negative")
        if j <= jmax:
            return float(table[j])
        if j not in cache:
            cache[j] = compute(j)
        return cache[j]

    def eval_many(js):
        return np.array([eval1(int(j)) for j in np.asarray(js).ravel()])

    return DiscreteKernel(eval=eval1, params=params, eval_many=eval_many)


# ---------------------------------------------------------------------------
# JSON kernel specifications


def kernel_to_json(kernel) -> str:
    if kernel.spec is None:
        raise ValueError("kernel has no serializable specification")
    return json.dumps(kernel.spec, sort_keys=True)


def kernel_from_json(text_or_dict):
    """Build a kernel from its JSON specification.

    Supported discrete forms: discrete_model, moment_model, hilbert, power.
    Continuous forms: continuous_model, laplace_model.
    """
    spec = text_or_dict
    if isinstance(spec, (str, bytes)):
        spec = json.loads(spec)
    kind = spec.get("type")
    if kind == "discrete_model":
        k = model_sequence(AsymDiscrete(spec["alpha"], spec["b1"], spec["bm1"]))
        overrides = tuple((int(j), float(v)) for j, v in spec.get("overrides", []))
        if overrides:
            k = DiscreteKernel(
                eval=k.eval,
                head_overrides=overrides,
                params=k.params,
                eval_many=None,
                spec=dict(spec),
            )
        return k
    if kind == "moment_model":
        p = AsymDiscrete(spec["alpha"], spec["b1"], spec["bm1"])
        k = moments(eta_star(p), int(spec.get("jmax", 0)))
        return DiscreteKernel(
            eval=k.eval, params=p, eval_many=k.eval_many, spec=dict(spec)
        )
    if kind == "hilbert":
        return hilbert_kernel()
    if kind == "power":
        return power_kernel(float(spec["gamma"]))
    if kind == "continuous_model":
        return continuous_model_kernel(
            AsymContinuous(spec["alpha"], spec["b0"], spec["binf"])
        )
    if kind == "laplace_model":
        from .laplace import laplace_model_kernel

        return laplace_model_kernel(
            AsymContinuous(spec["alpha"], spec["b0"], spec["binf"])
        )
    raise ValueError(f"unknown kernel type {kind!r}")
