"""Fourier-grid discretization of weight(X) symbol(D) weight(X) operators
and the semiclassical phase-space counting formula.

The weight is the standard function (pi/cosh(pi x))^(1/2); it decays like
exp(-pi x / 2), so a window of half-width 40 makes the periodic wrap-around
error of order exp(-60).  The symbol is sampled at the exact FFT
frequencies xi_m = 2 pi m / (2 Xhalf), no interpolation.
"""

import math
import warnings

import numpy as np
import scipy.fft
from scipy.optimize import brentq

from .asymptotics import v_alpha
from .kernels import EtaStar, SigmaStar
from .quadrature import integrate


class AliasingWarning(UserWarning):
    pass


def weight_sq(x):
    """Squared standard weight: pi / cosh(pi x)."""
    return math.pi / np.cosh(math.pi * np.asarray(x, dtype=float))


def standard_weight(x):
    return np.sqrt(weight_sq(x))


def symbol_from_sigma(sigma):
    """Symbol of the operator equivalent to the integral Hankel form:
    s(xi) = sigma(exp(-xi))."""

    def s(xi):
        xi = np.asarray(xi, dtype=float)
        with np.errstate(over="ignore"):
            lam = np.exp(-xi)
        # grid frequencies past ~709 underflow; clamp to the smallest
        # positive double, where any bounded profile with log decay is ~0
        lam = np.maximum(lam, 5e-324)
        return np.asarray(sigma(lam), dtype=float)

    return s


def symbol_from_eta(eta):
    """Symbol of the operator equivalent to the sequence Hankel form:
    s(xi) = eta((2 exp(-xi) - 1) / (2 exp(-xi) + 1)).

    The Moebius argument is clipped to the open interval at the floating
    point resolution boundary (|xi| beyond ~36), where the forward map
    rounds to exactly +-1.
    """

    def s(xi):
        xi = np.asarray(xi, dtype=float)
        mu = np.empty_like(xi)
        pos = xi >= 0
        epos = np.exp(-xi[pos])
        mu[pos] = (2.0 * epos - 1.0) / (2.0 * epos + 1.0)
        eneg = np.exp(xi[~pos])
        mu[~pos] = (2.0 - eneg) / (2.0 + eneg)
        np.clip(mu, np.nextafter(-1.0, 0.0), np.nextafter(1.0, 0.0), out=mu)
        return np.asarray(eta(mu), dtype=float)

    return s


def sigma_star_symbol(p, c=None):
    """Stable composed form of the symbol of the two-sided density profile:
    |xi|^-alpha with the large-t coefficient on the xi > 0 side."""
    from .kernels import smooth_cutoffs

    cut = c or smooth_cutoffs()

    def s(xi):
        xi = np.asarray(xi, dtype=float)
        out = np.zeros_like(xi)
        hi = xi > math.log(2.0)
        lo = xi < -math.log(2.0)
        out[hi] = p.binf * xi[hi] ** (-p.alpha) * cut.chi0(np.exp(-xi[hi]))
        out[lo] = p.b0 * np.abs(xi[lo]) ** (-p.alpha) * cut.chiinf(np.exp(-xi[lo]))
        return out

    return s


def eta_star_symbol(p, c=None):
    """Stable composed form for the moment density: the b1 part lives on
    xi < 0, the alternating part on xi > 0."""
    from .kernels import smooth_cutoffs

    cut = c or smooth_cutoffs()

    def s(xi):
        xi = np.asarray(xi, dtype=float)
        out = np.zeros_like(xi)
        lo = xi < -math.log(2.0)
        hi = xi > math.log(2.0)
        out[lo] = p.b1 * np.abs(xi[lo]) ** (-p.alpha) * cut.chiinf(np.exp(-xi[lo]))
        out[hi] = p.bm1 * xi[hi] ** (-p.alpha) * cut.chi0(np.exp(-xi[hi]))
        return out

    return s


class PsdoModel:
    """Matrix-free u -> b * F^-1[ s * F[b * u] ] on a periodic grid."""

    def __init__(self, xhalf, M, x, xi, weight_vals, symbol_vals):
        self.xhalf = xhalf
        self.M = M
        self.dim = M
        self.x = x
        self.xi = xi
        self.weight_vals = weight_vals
        self.symbol_vals = symbol_vals

    @property
    def shape(self):
        return (self.M, self.M)

    def matvec(self, u):
        u = np.asarray(u, dtype=complex)
        if u.shape != (self.M,):
            raise ValueError(f"expected vector of length {self.M}")
        t = self.weight_vals * u
        t = scipy.fft.fft(t)
        t *= self.symbol_vals
        t = scipy.fft.ifft(t)
        return self.weight_vals * t


def build_psdo(symbol, xhalf=40.0, M=2**14) -> PsdoModel:
    """Discretize weight(X) symbol(D) weight(X) on a uniform periodic grid."""
    if xhalf <= 0:
        raise ValueError("xhalf must be positive")
    if M < 2 or (M & (M - 1)) != 0:
        raise ValueError("M must be a power of two")
    dx = 2.0 * xhalf / M
    x = -xhalf + dx * np.arange(M)
    xi = 2.0 * math.pi * scipy.fft.fftfreq(M, d=dx)
    svals = np.asarray(symbol(xi), dtype=float)
    if svals.shape != (M,):
        raise ValueError("symbol must return one value per frequency")
    smax = float(np.abs(svals).max())
    s_nyq = float(abs(svals[M // 2]))
    if smax > 0 and s_nyq > 1e-6 * smax:
        warnings.warn(
            f"symbol magnitude {s_nyq:.3e} at the Nyquist frequency exceeds "
            f"1e-6 of its peak {smax:.3e}; aliasing may bias small eigenvalues",
            AliasingWarning,
            stacklevel=2,
        )
    return PsdoModel(xhalf, M, x, xi, standard_weight(x), svals)


def weight_integral(alpha):
    """integral of |weight(x)|^(2/alpha) dx, evaluated numerically.

    Substituting y = cosh(pi x)^2 and then z^2 = y - 1 removes the
    endpoint singularity; the z > 1 piece is mapped back to (0, 1) with
    a power substitution that cancels the weight exactly.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    q = 0.5 / alpha + 0.5

    j1 = integrate(lambda z: (1.0 + z * z) ** (-q), [0.0, 0.5, 1.0], rtol=1e-13).value
    j2 = alpha * integrate(
        lambda r: (1.0 + r ** (2.0 * alpha)) ** (-q), [0.0, 0.5, 1.0], rtol=1e-13
    ).value
    return 2.0 * math.pi ** (1.0 / alpha - 1.0) * (j1 + j2)


def _part(x, sign):
    return max(0.0, sign * x)


def weyl_coefficient(A_plus, A_minus, alpha):
    """Asymptotic coefficients C_pm of the phase-space counting formula.

    The weight integral is evaluated numerically; by the cosh-substitution
    identity the prefactor (2 pi)^-alpha * integral^alpha equals v(alpha).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    ib = weight_integral(alpha)
    pref = (2.0 * math.pi) ** (-alpha) * ib**alpha
    inv = 1.0 / alpha

    def comb(sign):
        a = _part(A_minus, sign)
        b = _part(A_plus, sign)
        s = (a**inv if a > 0 else 0.0) + (b**inv if b > 0 else 0.0)
        return pref * s**alpha

    return comb(1.0), comb(-1.0)


def _section_standard(c):
    # measure of {x : pi/cosh(pi x) > c}; exact for the standard weight
    if c >= math.pi:
        return 0.0
    return 2.0 / math.pi * math.acosh(math.pi / c)


def _make_section(weight2):
    if weight2 is None:
        return _section_standard, math.pi

    w0 = float(weight2(0.0))

    def section(c):
        if c >= w0:
            return 0.0
        hi = 1.0
        while float(weight2(hi)) > c:
            hi *= 2.0
            if hi > 1e9:
                raise RuntimeError("weight does not decay below the level")
        r = brentq(lambda x: float(weight2(x)) - c, 0.0, hi, xtol=1e-13, rtol=1e-14)
        return 2.0 * r

    return section, w0


def weyl_counting(symbol, weight2, eps, xi_cap=None, rtol=1e-7):
    """(2 pi)^-1 times the measure of {(x, xi): +-symbol(xi) weight2(x) > eps}.

    weight2=None selects the standard squared weight, for which the
    x-section has a closed form; general weights must be even and
    decreasing in |x| (the section is found by bracketed root-finding).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    section, w0 = _make_section(weight2)

    def halfline(sign, direction):
        # integrate over xi = direction * e^tau, tau in [-60, log(cap)]
        def grow_cap():
            xi = 8.0
            quiet = 0
            while quiet < 3:
                s = sign * float(np.asarray(symbol(np.array([direction * xi])))[0])
                if s * w0 <= 0.5 * eps:
                    quiet += 1
                else:
                    quiet = 0
                xi *= 2.0
                if xi > 1e9:
                    break
            return xi

        cap = xi_cap if xi_cap is not None else grow_cap()

        def f(taus):
            xis = direction * np.exp(taus)
            svals = sign * np.asarray(symbol(xis), dtype=float)
            out = np.zeros_like(taus)
            for i, s in enumerate(svals):
                if s > 0:
                    out[i] = section(eps / s)
            return out * np.exp(taus)

        edges = np.linspace(-60.0, math.log(cap), 16)
        return integrate(f, edges, rtol=rtol, atol=1e-12, max_panels=4096).value

    def count(sign):
        total = halfline(sign, 1.0) + halfline(sign, -1.0)
        return total / (2.0 * math.pi)

    return count(1.0), count(-1.0)
