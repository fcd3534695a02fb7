import math

import numpy as np
import pytest

from hankellab.hankel import (
    LogGrid,
    block_build,
    build_truncated,
    discretize_integral,
    flip_conjugate,
    frobenius_sq_from_kernel,
    matrix_free,
)
from hankellab.kernels import (
    AsymDiscrete,
    ContinuousKernel,
    DiscreteKernel,
    hilbert_kernel,
    model_sequence,
)
from hankellab.spectra import dense_eigs


def delta_kernel():
    return DiscreteKernel(
        eval=lambda j: 1.0 if j == 0 else 0.0,
        eval_many=lambda js: (np.asarray(js) == 0).astype(float),
    )


def random_kernel(seed, n, decay=0.75):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(n) * (np.arange(n) + 1.0) ** -decay
    return DiscreteKernel(eval=lambda j: vals[j], eval_many=lambda js: vals[np.asarray(js)])


def test_build_truncated_delta():
    H = build_truncated(delta_kernel(), 2).dense()
    assert np.array_equal(H, [[1.0, 0.0], [0.0, 0.0]])
    S = dense_eigs(H)
    assert list(S.lambda_plus) == [1.0] and len(S.lambda_minus) == 0


def test_build_truncated_hilbert_entries():
    H = build_truncated(hilbert_kernel(), 3).dense()
    expected = [[1, 1 / 2, 1 / 3], [1 / 2, 1 / 3, 1 / 4], [1 / 3, 1 / 4, 1 / 5]]
    assert np.allclose(H, expected, rtol=0, atol=1e-16)


def test_build_truncated_model_entry():
    h = model_sequence(AsymDiscrete(1.0, 1.0, 0.0))
    H = build_truncated(h, 4).dense()
    assert H[1, 2] == pytest.approx(1.0 / (3.0 * math.log(3.0)), rel=1e-15)
    assert np.allclose(H, H.T)


def test_dense_guard():
    with pytest.raises(ValueError):
        build_truncated(hilbert_kernel(), 2**14 + 1)


def test_matvec_delta_identity():
    Hf = matrix_free(delta_kernel(), 8)
    e0 = np.zeros(8)
    e0[0] = 1.0
    assert np.allclose(Hf.matvec(e0), e0, atol=1e-15)
    assert np.allclose(Hf.matvec(np.zeros(8)), 0.0)


def test_matvec_matches_dense():
    h = random_kernel(11, 127)
    Hd = build_truncated(h, 64).dense()
    Hf = matrix_free(h, 64)
    rng = np.random.default_rng(0)
    for _ in range(10):
        u = rng.standard_normal(64)
        a = Hd @ u
        b = Hf.matvec(u)
        assert np.linalg.norm(a - b) <= 1e-12 * np.linalg.norm(a)


def test_matvec_dimension_mismatch():
    Hf = matrix_free(delta_kernel(), 8)
    with pytest.raises(ValueError):
        Hf.matvec(np.zeros(7))


def test_flip_conjugate_values_and_involution():
    ones = DiscreteKernel(eval=lambda j: 1.0, eval_many=lambda js: np.ones(len(js)))
    f = flip_conjugate(ones)
    assert [f(j) for j in range(4)] == [1.0, -1.0, 1.0, -1.0]
    ff = flip_conjugate(f)
    assert np.allclose(ff.values(10), ones.values(10))


def test_flip_conjugate_matches_swapped_model():
    # exact pointwise identity of the model family under the flip
    a = model_sequence(AsymDiscrete(1.3, 0.8, -0.3))
    b = flip_conjugate(model_sequence(AsymDiscrete(1.3, -0.3, 0.8)))
    assert np.allclose(a.values(64), b.values(64), rtol=0, atol=1e-18)


def test_flip_spectrum_invariance():
    h = random_kernel(5, 63)
    S1 = dense_eigs(build_truncated(h, 32))
    S2 = dense_eigs(build_truncated(flip_conjugate(h), 32))
    assert np.allclose(S1.lambda_plus, S2.lambda_plus, rtol=1e-13, atol=1e-15)
    assert np.allclose(S1.lambda_minus, S2.lambda_minus, rtol=1e-13, atol=1e-15)


def test_log_grid():
    g = LogGrid(3.0, 33)
    assert np.all(np.diff(g.nodes) > 0)
    assert np.all(g.weights > 0)
    assert g.nodes[0] == pytest.approx(math.exp(-3.0))
    # trapezoid halves the endpoint weights
    assert g.weights[0] == pytest.approx(0.5 * g.nodes[0] * g.du)


def test_discretize_integral_exponential_selfconvergence():
    k = ContinuousKernel(eval=lambda t: math.exp(-t), eval_many=lambda ts: np.exp(-ts))
    coarse = dense_eigs(discretize_integral(k, LogGrid(7.0, 160)))
    fine = dense_eigs(discretize_integral(k, LogGrid(9.0, 640)))
    assert coarse.lambda_plus[0] == pytest.approx(fine.lambda_plus[0], rel=0.02)


def test_discretize_integral_zero_kernel():
    k = ContinuousKernel(eval=lambda t: 0.0, eval_many=lambda ts: np.zeros_like(ts))
    K = discretize_integral(k, LogGrid(4.0, 32)).dense()
    assert np.all(K == 0.0)


def test_discretize_integral_symmetric_to_last_bit():
    k = ContinuousKernel(eval=lambda t: 1.0 / (1.0 + t), eval_many=lambda ts: 1.0 / (1.0 + ts))
    K = discretize_integral(k, LogGrid(5.0, 64)).dense()
    assert np.array_equal(K, K.T)


def test_discretize_integral_carleman_bounded_trend():
    # kernel 1/t: bounded, not compact; top eigenvalue grows toward a
    # plateau under refinement and stays below the norm bound pi
    k = ContinuousKernel(eval=lambda t: 1.0 / t, eval_many=lambda ts: 1.0 / ts)
    tops = []
    for L, N in [(4.0, 64), (6.0, 128), (8.0, 256)]:
        tops.append(dense_eigs(discretize_integral(k, LogGrid(L, N))).lambda_plus[0])
    assert tops[0] < tops[1] < tops[2] <= math.pi + 1e-9


def test_discretize_integral_failure_coordinates():
    def bad(ts):
        out = np.asarray(1.0 / ts)
        out[ts > 1.0] = np.nan
        return out

    k = ContinuousKernel(eval=lambda t: 1.0 / t, eval_many=bad)
    with pytest.raises(RuntimeError, match="node sum"):
        discretize_integral(k, LogGrid(3.0, 16))


# --- block kernels ----------------------------------------------------------


def block_kernel(fn, k):
    return DiscreteKernel(eval=fn, block_dim=k)


def test_block_scalar_reduction():
    h = random_kernel(3, 31)
    b = block_kernel(lambda j: np.array([[h(j)]]), 1)
    A = build_truncated(h, 16).dense()
    B = block_build(b, 16).dense()
    assert np.allclose(A, B, rtol=0, atol=0)


def test_block_diagonal_union():
    ha = random_kernel(1, 31)
    hb = random_kernel(2, 31)
    b = block_kernel(lambda j: np.diag([ha(j), hb(j)]), 2)
    S = dense_eigs(block_build(b, 16))
    Sa = dense_eigs(build_truncated(ha, 16))
    Sb = dense_eigs(build_truncated(hb, 16))
    merged = np.sort(np.concatenate([Sa.lambda_plus, Sb.lambda_plus]))[::-1]
    assert np.allclose(S.lambda_plus, merged, rtol=1e-12, atol=1e-14)


def test_block_tensor_structure():
    m = random_kernel(4, 31)
    M = np.array([[2.0, 1.0 - 1.0j], [1.0 + 1.0j, -1.0]])
    b = block_kernel(lambda j: M * m(j), 2)
    S = dense_eigs(block_build(b, 16))
    Sm = dense_eigs(build_truncated(m, 16))
    mu = np.linalg.eigvalsh(M)
    prods = np.concatenate(
        [
            np.outer(mu, np.concatenate([Sm.lambda_plus, -Sm.lambda_minus])).ravel(),
        ]
    )
    expected_plus = np.sort(prods[prods > 1e-12 * np.abs(prods).max()])[::-1]
    assert np.allclose(S.lambda_plus[: len(expected_plus)], expected_plus, rtol=1e-11)


def test_block_rejects_inconsistent():
    b = block_kernel(lambda j: np.eye(2) if j % 2 == 0 else np.eye(3), 2)
    with pytest.raises(ValueError):
        block_build(b, 4)
    nh = block_kernel(lambda j: np.array([[0.0, 1.0], [0.0, 0.0]]), 2)
    with pytest.raises(ValueError, match="Hermitian"):
        block_build(nh, 4)


# --- Frobenius identity helper ----------------------------------------------


def test_frobenius_multiplicities():
    h = random_kernel(9, 15)
    N = 8
    H = build_truncated(h, N).dense()
    assert frobenius_sq_from_kernel(h, N) == pytest.approx(
        float(np.sum(H**2)), rel=1e-14
    )
