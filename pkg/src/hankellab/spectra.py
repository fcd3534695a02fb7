"""Extreme eigenvalues of symmetric operators and counting functions.

Both branches of the spectrum come out of a single Lanczos
tridiagonalization with full reorthogonalization; dense operators go
through LAPACK.  Eigenvalues smaller than 1e-12 times the spectral
radius are treated as unresolved and never reported.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

RESOLUTION_REL_FLOOR = 1e-12
DENSE_GUARD = 2**14
_EPS = np.finfo(float).eps


class SolverError(RuntimeError):
    """Eigensolver did not reach the requested accuracy.

    Carries the partial result (if any) in the ``result`` attribute.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass
class SpectrumResult:
    """Two-branch spectrum: lambda_plus are the positive eigenvalues in
    non-increasing order, lambda_minus the magnitudes of the negative ones."""

    lambda_plus: np.ndarray
    lambda_minus: np.ndarray
    residual_plus: np.ndarray
    residual_minus: np.ndarray
    dim: int
    floor_plus: float
    floor_minus: float
    meta: dict = field(default_factory=dict)

    def scaled(self, s):
        """Spectrum of s times the operator, s > 0."""
        if s <= 0:
            raise ValueError("scale must be positive")
        return SpectrumResult(
            lambda_plus=s * self.lambda_plus,
            lambda_minus=s * self.lambda_minus,
            residual_plus=s * self.residual_plus,
            residual_minus=s * self.residual_minus,
            dim=self.dim,
            floor_plus=s * self.floor_plus,
            floor_minus=s * self.floor_minus,
            meta=dict(self.meta),
        )


def _split_branches(eigs, floor):
    lp = np.sort(eigs[eigs > floor])[::-1]
    lm = np.sort(-eigs[eigs < -floor])[::-1]
    return lp, lm


def dense_eigs(H) -> SpectrumResult:
    """Full spectrum of a dense symmetric/Hermitian matrix, split by sign."""
    mat = H.dense() if hasattr(H, "dense") else np.asarray(H)
    n = mat.shape[0]
    if mat.ndim != 2 or mat.shape[1] != n:
        raise ValueError("expected a square matrix")
    if n > DENSE_GUARD:
        raise ValueError(f"dimension {n} exceeds the dense guard {DENSE_GUARD}")
    scale = float(np.abs(mat).max()) or 1.0
    asym = float(np.abs(mat - mat.conj().T).max())
    if asym > 1e-10 * scale:
        raise ValueError(f"matrix is not symmetric (deviation {asym:.3e})")
    eigs = scipy.linalg.eigvalsh(mat)
    lam_max = float(np.abs(eigs).max()) if n else 0.0
    floor = RESOLUTION_REL_FLOOR * lam_max
    lp, lm = _split_branches(eigs, floor)
    res_scale = n * _EPS * lam_max
    return SpectrumResult(
        lambda_plus=lp,
        lambda_minus=lm,
        residual_plus=np.full(lp.shape, res_scale),
        residual_minus=np.full(lm.shape, res_scale),
        dim=n,
        floor_plus=floor,
        floor_minus=floor,
        meta={"solver": "dense", "complete": True},
    )


def _check_symmetry(apply, dim, dtype, rng):
    for _ in range(3):
        u = rng.standard_normal(dim).astype(dtype)
        v = rng.standard_normal(dim).astype(dtype)
        if np.iscomplexobj(u):
            u = u + 1j * rng.standard_normal(dim)
            v = v + 1j * rng.standard_normal(dim)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        au = apply(u)
        av = apply(v)
        scale = max(np.linalg.norm(au), np.linalg.norm(av), 1.0)
        dev = abs(np.vdot(au, v) - np.vdot(u, av))
        if dev > 1e-8 * scale:
            raise ValueError(f"operator is not symmetric (deviation {dev:.3e})")


def _ritz_ends(alphas, betas, m, beta_last, kp, km):
    """Ritz values and residual bounds at both ends of the tridiagonal."""
    d = alphas[:m]
    e = betas[: m - 1]
    if m == 1:
        theta = d.copy()
        last = np.ones(1)
        return theta, beta_last * np.abs(last), theta, beta_last * np.abs(last)
    lo = min(km + 4, m - 1)
    hi = max(0, m - 1 - (kp + 4))
    tlo, vlo = scipy.linalg.eigh_tridiagonal(d, e, select="i", select_range=(0, lo))
    thi, vhi = scipy.linalg.eigh_tridiagonal(d, e, select="i", select_range=(hi, m - 1))
    rlo = beta_last * np.abs(vlo[-1, :])
    rhi = beta_last * np.abs(vhi[-1, :])
    return tlo, rlo, thi, rhi


def _converged_prefix(values, residuals, floor, tol_abs):
    """Leading run of resolved, converged eigenvalues (values descending).

    Returns (values, residuals, exhausted): exhausted is True when the
    scan ended at or below the meaningful resolution of this run, either
    on a converged Ritz value under the floor (the branch genuinely ran
    out) or on a value smaller than the residual tolerance itself (no
    further value could be certified at this tolerance anyway).
    """
    out_v, out_r = [], []
    exhausted = False
    for v, r in zip(values, residuals):
        if v <= floor:
            exhausted = r <= tol_abs or v <= tol_abs
            break
        if v <= tol_abs:
            exhausted = True
            break
        if r > tol_abs:
            break
        out_v.append(v)
        out_r.append(r)
    return np.array(out_v), np.array(out_r), exhausted


def lanczos_extreme(
    apply,
    dim,
    k,
    k_minus=None,
    tol=1e-9,
    seed=0,
    max_iter=None,
    dtype=np.float64,
    check_symmetry=True,
    on_fail="raise",
) -> SpectrumResult:
    """k largest-positive and k most-negative eigenvalues, matrix-free.

    One Lanczos run with full reorthogonalization (classical Gram-Schmidt
    against the whole basis, with a conditional second pass) serves both
    spectral ends.  The start vector is seeded for reproducibility.
    Non-convergence raises SolverError carrying the partial result unless
    on_fail="partial".
    """
    if hasattr(apply, "matvec"):
        apply = apply.matvec
    kp = int(k)
    km = kp if k_minus is None else int(k_minus)
    if kp < 0 or km < 0 or kp + km == 0:
        raise ValueError("need a positive number of requested eigenvalues")
    if max_iter is None:
        max_iter = min(dim, max(360, 12 * max(kp, km) + 120))
    max_iter = min(max_iter, dim)
    rng = np.random.default_rng(seed)
    if check_symmetry:
        _check_symmetry(apply, dim, dtype, rng)

    complex_mode = np.issubdtype(np.dtype(dtype), np.complexfloating)
    q = rng.standard_normal(dim)
    if complex_mode:
        q = q + 1j * rng.standard_normal(dim)
    q = q.astype(dtype)
    q /= np.linalg.norm(q)

    cap = min(max_iter, max(2 * (kp + km) + 32, 96))
    Q = np.empty((cap, dim), dtype=dtype)
    alphas = np.zeros(max_iter)
    betas = np.zeros(max_iter)
    q_prev = np.zeros(dim, dtype=dtype)
    beta_prev = 0.0
    normest = 0.0
    restarts = 0
    complete = False
    m = 0
    milestone = cap
    matvecs = 0

    def reorth(w, j):
        coef = Q[: j + 1].conj() @ w
        w = w - Q[: j + 1].T @ coef
        return w

    def finalize(m, complete):
        beta_last = betas[m - 1]
        tlo, rlo, thi, rhi = _ritz_ends(alphas, betas, m, beta_last, kp, km)
        all_theta = np.concatenate([tlo, thi])
        lam_max = float(np.abs(all_theta).max()) if all_theta.size else 0.0
        floor = RESOLUTION_REL_FLOOR * lam_max
        tol_abs = tol * max(lam_max, 1e-300)
        lp, rp, done_p = _converged_prefix(thi[::-1], rhi[::-1], floor, tol_abs)
        lm, rm, done_m = _converged_prefix(-tlo, rlo, floor, tol_abs)
        done_p = done_p or complete or m == dim
        done_m = done_m or complete or m == dim
        enough = (len(lp) >= kp or done_p) and (len(lm) >= km or done_m)
        lp, rp = lp[:kp], rp[:kp]
        lm, rm = lm[:km], rm[:km]
        result = SpectrumResult(
            lambda_plus=lp,
            lambda_minus=lm,
            residual_plus=rp,
            residual_minus=rm,
            dim=dim,
            floor_plus=(
                max(floor, tol_abs)
                if done_p
                else (float(lp[-1]) if len(lp) else math.inf)
            ),
            floor_minus=(
                max(floor, tol_abs)
                if done_m
                else (float(lm[-1]) if len(lm) else math.inf)
            ),
            meta={
                "solver": "lanczos",
                "iterations": m,
                "matvecs": matvecs,
                "tol": tol,
                "seed": seed,
                "norm_estimate": lam_max,
                "complete": bool(done_p and done_m),
                "converged": bool(enough),
            },
        )
        return result, enough

    while m < max_iter:
        if m == cap:
            cap = min(max_iter, max(int(cap * 1.5), cap + 32))
            newQ = np.empty((cap, dim), dtype=dtype)
            newQ[:m] = Q[:m]
            Q = newQ
        Q[m] = q
        w = apply(q)
        matvecs += 1
        a = float(np.real(np.vdot(q, w)))
        alphas[m] = a
        w = w - a * q - beta_prev * q_prev
        nrm0 = np.linalg.norm(w)
        w = reorth(w, m)
        nrm1 = np.linalg.norm(w)
        if nrm1 < 0.7071 * nrm0:
            w = reorth(w, m)
            nrm1 = np.linalg.norm(w)
        b = float(nrm1)
        normest = max(normest, abs(a) + b + beta_prev)
        if b <= 1e-14 * max(normest, 1e-300):
            # invariant subspace found; restart with a fresh direction
            betas[m] = 0.0
            m += 1
            restarts += 1
            if m >= max_iter or restarts > 4:
                complete = True
                break
            fresh = rng.standard_normal(dim)
            if complex_mode:
                fresh = fresh + 1j * rng.standard_normal(dim)
            fresh = fresh.astype(dtype)
            fresh = reorth(fresh, m - 1)
            fresh = reorth(fresh, m - 1)
            fn = np.linalg.norm(fresh)
            if fn <= 1e-12:
                complete = True
                break
            q_prev = np.zeros(dim, dtype=dtype)
            beta_prev = 0.0
            q = fresh / fn
            continue
        betas[m] = b
        q_prev = q
        beta_prev = b
        q = w / b
        m += 1

        if m >= milestone or m == max_iter:
            result, enough = finalize(m, complete)
            if enough:
                return result
            if m >= max_iter:
                break
            milestone = min(max_iter, max(int(m * 1.4), m + 32))

    result, enough = finalize(m, complete)
    if enough:
        return result
    msg = (
        f"lanczos did not converge {kp}+/{km}- eigenvalues in "
        f"{m} iterations (dim {dim})"
    )
    if on_fail == "partial":
        return result
    raise SolverError(msg, result=result)


def counting_function(S: SpectrumResult, eps):
    """Number of eigenvalues above eps in each branch.

    Refuses eps at or below the resolved floor rather than undercount.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps <= S.floor_plus or eps <= S.floor_minus:
        raise ValueError(
            f"eps={eps:.3e} is at or below the resolved floor "
            f"({S.floor_plus:.3e} / {S.floor_minus:.3e})"
        )
    nplus = int(np.sum(S.lambda_plus > eps))
    nminus = int(np.sum(S.lambda_minus > eps))
    return nplus, nminus
