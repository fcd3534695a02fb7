"""Closed forms for the asymptotic eigenvalue coefficients.

The positive and negative branches of the spectrum decay like
lambda_n ~ c_pm * n^(-alpha) with

    c_pm = v(alpha) * ((first coeff)_pm^(1/alpha) + (second coeff)_pm^(1/alpha))^alpha
    v(alpha) = 2^(-alpha) * pi^(1-2 alpha) * B(1/(2 alpha), 1/2)^alpha

where x_pm = max(0, +-x) and B is the Beta function.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import AsymContinuous, AsymDiscrete


@dataclass(frozen=True)
class CoefficientReport:
    alpha: float
    v_alpha: float
    c_plus: float
    c_minus: float
    inputs: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "alpha": self.alpha,
            "v_alpha": self.v_alpha,
            "c_plus": self.c_plus,
            "c_minus": self.c_minus,
            "inputs": self.inputs,
        }


def beta_fn(a, b):
    """Beta function via log-Gamma; overflow safe for positive arguments."""
    if a <= 0 or b <= 0:
        raise ValueError("beta_fn requires positive arguments")
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def v_alpha(alpha):
    """Universal coefficient entering every asymptotic constant."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return (
        2.0 ** (-alpha)
        * math.pi ** (1.0 - 2.0 * alpha)
        * beta_fn(1.0 / (2.0 * alpha), 0.5) ** alpha
    )


def _part_pow(x, alpha, sign):
    """(x)_+^{1/alpha} or (x)_-^{1/alpha}, with 0^{1/alpha} := 0."""
    v = max(0.0, sign * x)
    return 0.0 if v == 0.0 else v ** (1.0 / alpha)


def _c_pair(first, second, alpha):
    va = v_alpha(alpha)
    cp = va * (_part_pow(first, alpha, 1.0) + _part_pow(second, alpha, 1.0)) ** alpha
    cm = va * (_part_pow(first, alpha, -1.0) + _part_pow(second, alpha, -1.0)) ** alpha
    return va, cp, cm


def c_pm_discrete(p: AsymDiscrete) -> CoefficientReport:
    va, cp, cm = _c_pair(p.b1, p.bm1, p.alpha)
    return CoefficientReport(
        alpha=p.alpha,
        v_alpha=va,
        c_plus=cp,
        c_minus=cm,
        inputs={"b1": p.b1, "bm1": p.bm1},
    )


def c_pm_continuous(p: AsymContinuous) -> CoefficientReport:
    va, cp, cm = _c_pair(p.b0, p.binf, p.alpha)
    return CoefficientReport(
        alpha=p.alpha,
        v_alpha=va,
        c_plus=cp,
        c_minus=cm,
        inputs={"b0": p.b0, "binf": p.binf},
    )


def _trace_part_pow(mat, alpha, sign):
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("coefficient must be a square matrix")
    if not np.allclose(mat, mat.conj().T, rtol=0, atol=1e-12 * max(1.0, np.abs(mat).max())):
        raise ValueError("coefficient matrix must be Hermitian")
    eigs = np.linalg.eigvalsh(mat)
    return sum(_part_pow(float(e), alpha, sign) for e in eigs)


def c_pm_matrix(b0, binf, alpha) -> CoefficientReport:
    """Matrix-valued coefficients combine through traces of the +- parts."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    b0 = np.asarray(b0)
    binf = np.asarray(binf)
    if b0.shape != binf.shape:
        raise ValueError("coefficient matrices must share a dimension")
    va = v_alpha(alpha)
    cp = va * (_trace_part_pow(b0, alpha, 1.0) + _trace_part_pow(binf, alpha, 1.0)) ** alpha
    cm = va * (_trace_part_pow(b0, alpha, -1.0) + _trace_part_pow(binf, alpha, -1.0)) ** alpha
    return CoefficientReport(
        alpha=alpha,
        v_alpha=va,
        c_plus=cp,
        c_minus=cm,
        inputs={"b0": b0.tolist(), "binf": binf.tolist()},
    )


def m_alpha(alpha):
    """Number of iterated differences required by the remainder estimates."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if alpha < 0.5:
        return 0
    return int(math.floor(alpha)) + 1


def widom_exponent(gamma, n):
    """Leading term of -log(lambda_n) for kernels (j+1)^-gamma, gamma > 1."""
    if gamma <= 1:
        raise ValueError("exponential regime requires gamma > 1")
    if n < 1:
        raise ValueError("eigenvalue index must be >= 1")
    return math.pi * math.sqrt(2.0 * gamma * n)
