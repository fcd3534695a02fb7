"""End-to-end verification: asymptotic fits, cross-method comparisons,
counting-function additivity, and exact finite identities.

The fitted model is lambda_n * n^alpha = c_hat + slope / log(n): the
1/log n correction matches the remainder scale of the kernel asymptotics,
and the intercept estimates the asymptotic coefficient.  A windowed
median of lambda_n * n^alpha is reported alongside as a robustness check.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import c_pm_continuous, c_pm_discrete
from .hankel import (
    LogGrid,
    build_truncated,
    discretize_integral,
    frobenius_sq_from_kernel,
    matrix_free,
)
from .kernels import AsymContinuous, AsymDiscrete, DiscreteKernel, model_sequence
from .laplace import laplace_model_kernel
from .psido import build_psdo, symbol_from_sigma
from .kernels import sigma_star
from .spectra import SpectrumResult, counting_function, dense_eigs, lanczos_extreme

DENSE_DEFAULT_MAX = 8192


@dataclass
class FitResult:
    c_hat_plus: float
    c_hat_minus: float
    slope_plus: float
    slope_minus: float
    intercept_raw_plus: float
    intercept_raw_minus: float
    median_plus: float
    median_minus: float
    window: tuple
    window_minus: tuple | None
    predicted_plus: float | None
    predicted_minus: float | None
    rel_dev_plus: float | None
    rel_dev_minus: float | None
    N: int
    alpha: float
    meta: dict = field(default_factory=dict)

    def as_dict(self):
        d = {
            "alpha": self.alpha,
            "N": self.N,
            "window": list(self.window),
            "window_minus": list(self.window_minus) if self.window_minus else None,
            "c_hat_plus": self.c_hat_plus,
            "c_hat_minus": self.c_hat_minus,
            "slope_plus": self.slope_plus,
            "slope_minus": self.slope_minus,
            "median_plus": self.median_plus,
            "median_minus": self.median_minus,
            "c_predicted_plus": self.predicted_plus,
            "c_predicted_minus": self.predicted_minus,
            "rel_dev": self.rel_dev_plus,
            "rel_dev_plus": self.rel_dev_plus,
            "rel_dev_minus": self.rel_dev_minus,
        }
        d.update(self.meta)
        return d


def default_window(N):
    """Dyadic fit window away from the preasymptotic top and truncated tail."""
    return (32, max(48, N // 64))


def _fit_branch(lams, alpha, window):
    n1, n2 = window
    n2 = min(n2, len(lams))
    if n2 - n1 + 1 < 16:
        raise ValueError(
            f"fit window [{n1}, {n2}] has fewer than 16 resolved points"
        )
    n = np.arange(n1, n2 + 1, dtype=float)
    y = lams[n1 - 1 : n2] * n**alpha
    X = np.column_stack([np.ones_like(n), 1.0 / np.log(n)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    intercept, slope = float(coef[0]), float(coef[1])
    return intercept, slope, float(np.median(y)), (n1, int(n2))


def fit_coefficient(
    S: SpectrumResult,
    alpha,
    window,
    predicted=None,
    window_minus="auto",
) -> FitResult:
    """Least-squares fit of lambda_n n^alpha against 1/log n on the window.

    The negative branch window is clipped to its resolved depth by default
    (its spectrum is resolved much less deeply when the branch decays
    faster); pass window_minus explicitly to override.
    """
    ip, sp, medp, wp = _fit_branch(S.lambda_plus, alpha, window)
    if window_minus == "auto":
        n2 = min(window[1], len(S.lambda_minus))
        n1 = window[0]
        if n2 - n1 + 1 < 16:
            n1 = max(4, n2 - 15)
        window_minus = (n1, n2) if n2 - n1 + 1 >= 16 else None
    if window_minus is not None:
        im, sm, medm, wm = _fit_branch(S.lambda_minus, alpha, window_minus)
    else:
        im = sm = medm = math.nan
        wm = None
    pred_p, pred_m = (predicted if predicted is not None else (None, None))
    rel_p = abs(ip - pred_p) / pred_p if pred_p else None
    rel_m = abs(im - pred_m) / pred_m if pred_m else None
    return FitResult(
        c_hat_plus=max(0.0, ip),
        c_hat_minus=(max(0.0, im) if not math.isnan(im) else im),
        slope_plus=sp,
        slope_minus=sm,
        intercept_raw_plus=ip,
        intercept_raw_minus=im,
        median_plus=medp,
        median_minus=medm,
        window=wp,
        window_minus=wm,
        predicted_plus=pred_p,
        predicted_minus=pred_m,
        rel_dev_plus=rel_p,
        rel_dev_minus=rel_m,
        N=S.dim,
        alpha=alpha,
        meta={"solver": S.meta.get("solver", "unknown")},
    )


def spectrum_of_kernel(
    kernel: DiscreteKernel,
    N,
    method="auto",
    k=None,
    k_minus=None,
    tol=1e-8,
    seed=0,
    max_iter=None,
) -> SpectrumResult:
    """Spectrum of the N-truncation: dense when affordable, else Lanczos."""
    if method == "auto":
        method = "dense" if N <= DENSE_DEFAULT_MAX else "lanczos"
    if method == "dense":
        return dense_eigs(build_truncated(kernel, N))
    if k is None:
        raise ValueError("matrix-free solve needs the number of eigenvalues k")
    op = matrix_free(kernel, N)
    return lanczos_extreme(
        op.matvec,
        N,
        k,
        k_minus=k_minus,
        tol=tol,
        seed=seed,
        max_iter=max_iter,
        on_fail="partial",
    )


def hs_identity(h: DiscreteKernel, N):
    """Finite Frobenius identity: kernel-side sum equals eigenvalue-side sum.

    Each kernel value h(s) occupies min(s+1, 2N-1-s) matrix positions, so
    sum |h|^2 * multiplicity equals the sum of squared eigenvalues of the
    truncation exactly.
    """
    lhs = frobenius_sq_from_kernel(h, N)
    import scipy.linalg

    eigs = scipy.linalg.eigvalsh(build_truncated(h, N).dense())
    rhs = float(np.sum(eigs**2))
    rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return lhs, rhs, rel


def psido_equivalence(S_h: SpectrumResult, S_psi: SpectrumResult, k, noise_floor=0.0):
    """Per-index relative differences of the two spectra down to depth k.

    Values below noise_floor (discretization noise, e.g. interpolation
    residue on an exactly semidefinite operator) are dropped from both
    sides before comparing; a depth mismatch above that floor is an error.
    """
    rows = {"n": [], "branch": [], "hankel": [], "psdo": [], "rel_diff": []}
    max_rel = 0.0
    for branch, a, b in (
        ("plus", S_h.lambda_plus, S_psi.lambda_plus),
        ("minus", S_h.lambda_minus, S_psi.lambda_minus),
    ):
        a = a[a > noise_floor]
        b = b[b > noise_floor]
        na, nb = min(k, len(a)), min(k, len(b))
        if na != nb:
            raise ValueError(
                f"depth mismatch on {branch} branch: {na} vs {nb} resolved"
            )
        for i in range(na):
            rel = abs(a[i] - b[i]) / max(abs(a[i]), abs(b[i]))
            rows["n"].append(i + 1)
            rows["branch"].append(branch)
            rows["hankel"].append(float(a[i]))
            rows["psdo"].append(float(b[i]))
            rows["rel_diff"].append(float(rel))
            max_rel = max(max_rel, rel)
    return {"rows": rows, "max_rel_diff": max_rel}


def psido_equivalence_run(
    p: AsymContinuous,
    L=14.0,
    grid_n=2048,
    xhalf=40.0,
    M=2**14,
    k=10,
    tol=1e-9,
    seed=0,
    rtol=1e-9,
    kernel=None,
    noise_floor="auto",
):
    """Build both discretizations of the same model operator and compare.

    The integral side discretizes the transform kernel on a log grid; the
    Fourier side applies the equivalent weight-symbol-weight operator.
    The two spectra coincide in the continuum limit, so the per-index
    discrepancy is pure discretization error.  Pass the kernel in to
    reuse its interpolation table across resolutions.
    """
    kern = kernel if kernel is not None else laplace_model_kernel(p, rtol=rtol)
    op = discretize_integral(kern, LogGrid(L, grid_n))
    S_h = dense_eigs(op)
    psi = build_psdo(symbol_from_sigma(sigma_star(p)), xhalf=xhalf, M=M)
    S_psi = lanczos_extreme(
        psi.matvec,
        M,
        k + 4,
        tol=tol,
        seed=seed,
        dtype=np.complex128,
        max_iter=min(M, 40 * (k + 4) + 200),
        on_fail="partial",
    )
    if noise_floor == "auto":
        # interpolation noise on the integral side sits far below this
        top = max(
            S_h.lambda_plus[0] if len(S_h.lambda_plus) else 0.0,
            S_h.lambda_minus[0] if len(S_h.lambda_minus) else 0.0,
        )
        noise_floor = 1e-6 * top
    comparison = psido_equivalence(S_h, S_psi, k, noise_floor=noise_floor)
    comparison["hankel"] = S_h
    comparison["psdo"] = S_psi
    comparison["noise_floor"] = noise_floor
    return comparison


def scaled_signed(S: SpectrumResult, coef):
    """Spectrum of coef * A given the spectrum of A (branches swap if coef < 0)."""
    if coef == 0:
        empty = np.array([])
        return SpectrumResult(
            lambda_plus=empty,
            lambda_minus=empty.copy(),
            residual_plus=empty.copy(),
            residual_minus=empty.copy(),
            dim=S.dim,
            floor_plus=0.0,
            floor_minus=0.0,
            meta=dict(S.meta),
        )
    T = S.scaled(abs(coef))
    if coef > 0:
        return T
    return SpectrumResult(
        lambda_plus=T.lambda_minus,
        lambda_minus=T.lambda_plus,
        residual_plus=T.residual_minus,
        residual_minus=T.residual_plus,
        dim=T.dim,
        floor_plus=T.floor_minus,
        floor_minus=T.floor_plus,
        meta=T.meta,
    )


def orthogonality_check(
    p: AsymDiscrete,
    eps_list,
    N=8192,
    method="auto",
    k=None,
    tol=1e-8,
    seed=0,
    max_iter=None,
):
    """Counting-function additivity of the even and alternating parts.

    Compares n_pm(eps) of the combined operator against the sum over the
    two pure parts at the same truncation; the defect normalized by
    eps^(-1/alpha) shrinks as eps decreases.  The alternating part has
    the same spectrum as the even part at every truncation (diagonal
    sign-flip conjugation), so its spectrum is reused rather than
    recomputed.
    """
    combined = model_sequence(p)
    pure = model_sequence(AsymDiscrete(p.alpha, 1.0, 0.0))
    S = spectrum_of_kernel(combined, N, method, k=k, tol=tol, seed=seed, max_iter=max_iter)
    S1 = spectrum_of_kernel(pure, N, method, k=k, tol=tol, seed=seed, max_iter=max_iter)
    Sb1 = scaled_signed(S1, p.b1)
    Sbm1 = scaled_signed(S1, p.bm1)
    rows = {
        "eps": [],
        "n_plus": [],
        "n_plus_sum": [],
        "n_minus": [],
        "n_minus_sum": [],
        "defect_plus": [],
        "defect_minus": [],
        "normalized_plus": [],
        "normalized_minus": [],
    }
    for eps in eps_list:
        np_c, nm_c = counting_function(S, eps)
        parts = [counting_function(Sx, eps) if Sx.lambda_plus.size or Sx.lambda_minus.size else (0, 0) for Sx in (Sb1, Sbm1)]
        np_s = sum(q[0] for q in parts)
        nm_s = sum(q[1] for q in parts)
        scale = eps ** (1.0 / p.alpha)
        rows["eps"].append(float(eps))
        rows["n_plus"].append(np_c)
        rows["n_plus_sum"].append(np_s)
        rows["n_minus"].append(nm_c)
        rows["n_minus_sum"].append(nm_s)
        rows["defect_plus"].append(abs(np_c - np_s))
        rows["defect_minus"].append(abs(nm_c - nm_s))
        rows["normalized_plus"].append(abs(np_c - np_s) * scale)
        rows["normalized_minus"].append(abs(nm_c - nm_s) * scale)
    return rows


def widom_slope(gamma, N=512, window=(4, 12)):
    """Fitted slope of -log(lambda_n) against sqrt(n) for (j+1)^-gamma kernels.

    In the exponential regime the slope approaches pi * sqrt(2 gamma); the
    o(sqrt(n)) correction is slow, so small windows carry a visible bias.
    """
    from .asymptotics import widom_exponent
    from .kernels import power_kernel

    S = dense_eigs(build_truncated(power_kernel(gamma), N))
    n1, n2 = window
    if len(S.lambda_plus) < n2:
        raise ValueError(f"only {len(S.lambda_plus)} resolved eigenvalues")
    n = np.arange(n1, n2 + 1, dtype=float)
    y = -np.log(S.lambda_plus[n1 - 1 : n2])
    X = np.column_stack([np.ones_like(n), np.sqrt(n)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    slope = float(coef[1])
    predicted = widom_exponent(gamma, 1)  # pi * sqrt(2 gamma), unit index
    return {
        "gamma": gamma,
        "N": N,
        "window": list(window),
        "slope": slope,
        "predicted": predicted,
        "rel_dev": abs(slope - predicted) / predicted,
        "intercept": float(coef[0]),
    }


def _study_cell(cell):
    """One (size, window) study cell; module level so process pools can map it."""
    p, N, window, k, tol, seed = cell
    report = c_pm_discrete(p)
    S = spectrum_of_kernel(model_sequence(p), N, k=k, tol=tol, seed=seed)
    try:
        fit = fit_coefficient(
            S, p.alpha, window, predicted=(report.c_plus, report.c_minus)
        )
    except ValueError:
        # truncations of log-decay kernels resolve only a short head of
        # the spectrum; record the size as unfittable
        fit = None
    return fit, S.lambda_plus[:256]


def convergence_study(
    p: AsymDiscrete,
    N_list,
    window_rule=default_window,
    k_rule=None,
    tol=1e-6,
    seed=0,
    jobs=1,
):
    """Fit the asymptotic coefficient across a dyadic sweep of truncations.

    Reports the fitted coefficients per size, the drift from the
    predicted limit, and an eigenvalue interlacing check between
    consecutive truncations (top eigenvalues only grow with N).  Cells
    are independent; jobs > 1 runs them in a process pool.
    """
    report = c_pm_discrete(p)
    cells = []
    for N in N_list:
        window = window_rule(N)
        k = k_rule(N) if k_rule else window[1] + 64
        cells.append((p, N, window, k, tol, seed))
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_study_cell, cells))
    else:
        results = [_study_cell(c) for c in cells]
    fits = [r[0] for r in results]
    heads = [r[1] for r in results]
    interlacing_ok = True
    worst = 0.0
    for ha, hb in zip(heads[:-1], heads[1:]):
        depth = min(len(ha), len(hb))
        if depth:
            gap = float(np.min(hb[:depth] - ha[:depth]))
            worst = min(worst, gap)
            if gap < -1e-10 * ha[0]:
                interlacing_ok = False
    drift = [f.rel_dev_plus if f is not None else None for f in fits]
    return {
        "N": list(N_list),
        "fits": fits,
        "c_plus_predicted": report.c_plus,
        "c_minus_predicted": report.c_minus,
        "rel_dev_plus": drift,
        "interlacing_ok": interlacing_ok,
        "interlacing_worst_gap": worst,
    }
