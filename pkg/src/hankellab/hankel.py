"""Truncated Hankel matrices and matrix-free Hankel applicators.

An N x N Hankel matrix has entries h(i+j) and is fully described by the
2N-1 kernel values h(0..2N-2).  The matrix-free form applies it in
O(N log N) through a circulant embedding: reversing the input turns the
Hankel product into a Toeplitz one, which is a slice of a circular
convolution of length >= 2N-1.
"""

import numpy as np
import scipy.fft
import scipy.linalg

from .kernels import DiscreteKernel

DENSE_GUARD = 2**14


class HankelOperator:
    """Symmetric Hankel operator in dense, FFT matrix-free, or integral form."""

    def __init__(self, kind, N, block_dim=1, dense=None, fft_data=None, grid=None):
        self.kind = kind
        self.N = N
        self.block_dim = block_dim
        self.dim = N * block_dim
        self._dense = dense
        self._fft = fft_data
        self.grid = grid

    @property
    def shape(self):
        return (self.dim, self.dim)

    def dense(self):
        if self._dense is None:
            raise ValueError("operator is matrix-free; no dense form stored")
        return self._dense

    def matvec(self, u):
        u = np.asarray(u)
        if u.shape != (self.dim,):
            raise ValueError(f"expected vector of length {self.dim}, got {u.shape}")
        if self._dense is not None:
            return self._dense @ u
        sym_rfft, L = self._fft
        v = np.zeros(L)
        v[: self.N] = u[::-1]
        conv = scipy.fft.irfft(sym_rfft * scipy.fft.rfft(v), n=L)
        return conv[self.N - 1 : 2 * self.N - 1].copy()

    def __matmul__(self, u):
        return self.matvec(u)


def matvec(H: HankelOperator, u):
    """Apply the operator; matrix-free form agrees with the dense product."""
    return H.matvec(u)


def build_truncated(h: DiscreteKernel, N: int) -> HankelOperator:
    """Dense N x N symmetric matrix with entries h(i+j)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > DENSE_GUARD:
        raise ValueError(
            f"N={N} exceeds the dense guard {DENSE_GUARD}; use matrix_free instead"
        )
    if h.block_dim != 1:
        return block_build(h, N)
    vals = np.asarray(h.values(2 * N - 1), dtype=float)
    mat = scipy.linalg.hankel(vals[:N], vals[N - 1 :])
    return HankelOperator("dense", N, dense=mat)


def matrix_free(h: DiscreteKernel, N: int) -> HankelOperator:
    """FFT-embedded applicator; O(N log N) per product."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if h.block_dim != 1:
        raise ValueError("matrix-free form supports scalar kernels only")
    vals = np.asarray(h.values(2 * N - 1), dtype=float)
    L = 1
    while L < 2 * N - 1:
        L *= 2
    sym = np.zeros(L)
    sym[: 2 * N - 1] = vals
    return HankelOperator("fft", N, fft_data=(scipy.fft.rfft(sym), L))


def flip_conjugate(h: DiscreteKernel) -> DiscreteKernel:
    """Kernel of the flip-conjugated operator: j -> (-1)^j h(j).

    The induced operators are unitarily equivalent through the diagonal
    sign flip, so every truncation has identical spectrum.
    """
    ev = h.eval
    em = h.eval_many

    def eval1(j):
        return ev(j) if j % 2 == 0 else -ev(j)

    def eval_many(js):
        js = np.asarray(js)
        vals = np.asarray(em(js))
        signs = np.where(js % 2 == 0, 1.0, -1.0)
        if vals.ndim > 1:
            signs = signs.reshape((-1,) + (1,) * (vals.ndim - 1))
        return signs * vals

    return DiscreteKernel(
        eval=eval1,
        head_overrides=tuple(
            (j, v if j % 2 == 0 else -v) for j, v in h.head_overrides
        ),
        params=h.params,
        block_dim=h.block_dim,
        eval_many=None if em is None else eval_many,
    )


class LogGrid:
    """Exponential grid t_i = exp(u_i), u_i uniform on [-L, L], trapezoid weights."""

    def __init__(self, L, N):
        if L <= 0 or N < 2:
            raise ValueError("need L > 0 and N >= 2")
        self.L = float(L)
        self.N = int(N)
        u = np.linspace(-self.L, self.L, self.N)
        self.du = u[1] - u[0]
        self.nodes = np.exp(u)
        w = self.nodes * self.du
        w[0] *= 0.5
        w[-1] *= 0.5
        self.weights = w


def discretize_integral(h, grid: LogGrid) -> HankelOperator:
    """Symmetrized quadrature discretization K_ij = sqrt(w_i w_j) h(t_i + t_j)."""
    t = grid.nodes
    sw = np.sqrt(grid.weights)
    N = grid.N
    iu, ju = np.triu_indices(N)
    try:
        vals = h.values(t[iu] + t[ju])
    except Exception as exc:
        raise RuntimeError(
            f"kernel evaluation failed on grid sums in [{2*t[0]:.3e}, {2*t[-1]:.3e}]"
        ) from exc
    if not np.all(np.isfinite(vals)):
        bad = np.flatnonzero(~np.isfinite(np.asarray(vals)))[0]
        raise RuntimeError(
            f"kernel not finite at node sum t={t[iu[bad]] + t[ju[bad]]!r} "
            f"(i={iu[bad]}, j={ju[bad]})"
        )
    K = np.zeros((N, N))
    K[iu, ju] = sw[iu] * sw[ju] * vals
    K[ju, iu] = K[iu, ju]
    return HankelOperator("integral", N, dense=K, grid=grid)


def block_build(h: DiscreteKernel, N: int) -> HankelOperator:
    """(N k) x (N k) Hermitian matrix of k x k blocks h(i+j)."""
    k = h.block_dim
    if N < 1:
        raise ValueError("N must be >= 1")
    if N * k > DENSE_GUARD:
        raise ValueError(f"total dimension {N * k} exceeds the dense guard")
    vals = h.values(2 * N - 1)
    vals = np.asarray(vals)
    if k == 1 and vals.ndim == 1:
        return build_truncated(h, N)
    if vals.shape[1:] != (k, k):
        raise ValueError(f"expected {k}x{k} blocks, got shape {vals.shape[1:]}")
    herm_dev = np.abs(vals - np.conj(np.swapaxes(vals, 1, 2))).max()
    if herm_dev > 1e-12 * max(1.0, np.abs(vals).max()):
        raise ValueError("block values must be Hermitian")
    dtype = complex if np.iscomplexobj(vals) else float
    M = np.zeros((N * k, N * k), dtype=dtype)
    for i in range(N):
        for j in range(N):
            M[i * k : (i + 1) * k, j * k : (j + 1) * k] = vals[i + j]
    return HankelOperator("dense", N, block_dim=k, dense=M)


def frobenius_sq_from_kernel(h: DiscreteKernel, N: int) -> float:
    """Squared Frobenius norm of the truncation, summed over anti-diagonals.

    Each kernel value h(s) appears min(s+1, 2N-1-s) times in the matrix.
    """
    vals = np.asarray(h.values(2 * N - 1))
    s = np.arange(2 * N - 1)
    mult = np.minimum(s + 1, 2 * N - 1 - s)
    if vals.ndim == 1:
        return float(np.sum(np.abs(vals) ** 2 * mult))
    sq = np.sum(np.abs(vals) ** 2, axis=(1, 2))
    return float(np.sum(sq * mult))
