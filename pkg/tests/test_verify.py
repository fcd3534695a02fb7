import math
import warnings

import numpy as np
import pytest

from hankellab.hankel import LogGrid, build_truncated, discretize_integral
from hankellab.kernels import (
    AsymContinuous,
    AsymDiscrete,
    DiscreteKernel,
    continuous_model_kernel,
    model_sequence,
)
from hankellab.laplace import laplace_model_kernel
from hankellab.spectra import SpectrumResult, dense_eigs
from hankellab.verify import (
    convergence_study,
    fit_coefficient,
    hs_identity,
    orthogonality_check,
    psido_equivalence,
    psido_equivalence_run,
    scaled_signed,
    widom_slope,
)


def synthetic_spectrum(lams, lams_minus=()):
    lams = np.asarray(lams, dtype=float)
    lams_minus = np.asarray(lams_minus, dtype=float)
    return SpectrumResult(
        lambda_plus=lams,
        lambda_minus=lams_minus,
        residual_plus=np.zeros_like(lams),
        residual_minus=np.zeros_like(lams_minus),
        dim=2 * len(lams),
        floor_plus=0.0,
        floor_minus=0.0,
    )


def random_kernel(seed, n, decay=0.75):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(n) * (np.arange(n) + 1.0) ** -decay
    return DiscreteKernel(eval=lambda j: vals[j], eval_many=lambda js: vals[np.asarray(js)])


# --- fits --------------------------------------------------------------------


def test_fit_exact_power_law():
    n = np.arange(1, 2001, dtype=float)
    S = synthetic_spectrum(0.5 / n)
    fit = fit_coefficient(S, 1.0, (64, 512), window_minus=None)
    assert fit.c_hat_plus == pytest.approx(0.5, abs=1e-12)
    assert abs(fit.slope_plus) < 1e-10


def test_fit_with_log_correction():
    n = np.arange(1, 4001, dtype=float)
    S = synthetic_spectrum((0.5 + 0.8 / np.log(np.maximum(n, 2.0))) / n)
    fit = fit_coefficient(S, 1.0, (64, 512), window_minus=None)
    assert fit.c_hat_plus == pytest.approx(0.5, abs=1e-10)
    assert fit.slope_plus == pytest.approx(0.8, abs=1e-8)


def test_fit_scaling_exact():
    n = np.arange(1, 1001, dtype=float)
    lam = (0.5 + 0.3 / np.log(n + 1)) / n
    a = fit_coefficient(synthetic_spectrum(lam), 1.0, (32, 256), window_minus=None)
    b = fit_coefficient(synthetic_spectrum(3.0 * lam), 1.0, (32, 256), window_minus=None)
    assert b.c_hat_plus == pytest.approx(3.0 * a.c_hat_plus, rel=1e-12)


def test_fit_window_too_small():
    S = synthetic_spectrum(1.0 / np.arange(1, 40, dtype=float))
    with pytest.raises(ValueError, match="16"):
        fit_coefficient(S, 1.0, (32, 256), window_minus=None)


def test_fit_minus_window_autoclip():
    n = np.arange(1, 2001, dtype=float)
    S = synthetic_spectrum(0.5 / n, 0.1 / np.arange(1, 41, dtype=float))
    fit = fit_coefficient(S, 1.0, (64, 512))
    assert fit.window_minus is not None
    assert fit.window_minus[1] <= 40
    assert fit.c_hat_minus == pytest.approx(0.1, abs=1e-10)


def test_fit_predicted_deviation():
    n = np.arange(1, 2001, dtype=float)
    S = synthetic_spectrum(0.55 / n)
    fit = fit_coefficient(S, 1.0, (64, 512), predicted=(0.5, None), window_minus=None)
    assert fit.rel_dev_plus == pytest.approx(0.1, abs=1e-10)


# --- exact identities ---------------------------------------------------------


def test_hs_identity_delta():
    k = DiscreteKernel(
        eval=lambda j: 1.0 if j == 0 else 0.0,
        eval_many=lambda js: (np.asarray(js) == 0).astype(float),
    )
    lhs, rhs, rel = hs_identity(k, 16)
    assert lhs == pytest.approx(1.0) and rhs == pytest.approx(1.0)
    assert rel < 1e-14


def test_hs_identity_random():
    lhs, rhs, rel = hs_identity(random_kernel(13, 255), 128)
    assert rel <= 1e-12


def test_hs_identity_model():
    h = model_sequence(AsymDiscrete(1.0, 1.0, 0.5))
    _, _, rel = hs_identity(h, 1024)
    assert rel <= 1e-10


# --- cross-method comparison ---------------------------------------------------


def test_psido_equivalence_trivial():
    S = synthetic_spectrum([3.0, 2.0, 1.0], [0.5])
    cmp = psido_equivalence(S, S, 3)
    assert cmp["max_rel_diff"] == 0.0


def test_psido_equivalence_depth_mismatch():
    a = synthetic_spectrum([3.0, 2.0, 1.0])
    b = synthetic_spectrum([3.0])
    with pytest.raises(ValueError, match="depth mismatch"):
        psido_equivalence(a, b, 3)


def test_psido_equivalence_noise_floor_drops_junk():
    a = synthetic_spectrum([3.0, 2.0], [1e-9])
    b = synthetic_spectrum([3.0, 2.0])
    cmp = psido_equivalence(a, b, 2, noise_floor=1e-6)
    assert cmp["max_rel_diff"] == 0.0


def test_psido_equivalence_resolved_window():
    # with a log-grid window wide enough to resolve ten levels, the two
    # discretizations of the same operator agree far inside 1 percent
    p = AsymContinuous(1.0, 1.0, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cmp = psido_equivalence_run(p, L=45.0, grid_n=2048, xhalf=40.0, M=2**13, k=10)
    assert cmp["max_rel_diff"] < 0.01


# --- counting additivity -------------------------------------------------------


def test_orthogonality_trivial_when_one_sided():
    rows = orthogonality_check(AsymDiscrete(1.0, 1.0, 0.0), [0.1, 0.05], N=256)
    assert rows["defect_plus"] == [0, 0]
    assert rows["defect_minus"] == [0, 0]


def test_orthogonality_symmetric_parts_double():
    # equal coefficients: the sum spectrum is two copies of one part
    rows = orthogonality_check(AsymDiscrete(1.0, 1.0, 1.0), [0.1, 0.03], N=512)
    for i in range(2):
        assert rows["n_plus_sum"][i] % 2 == 0


def test_orthogonality_defect_shrinks():
    rows = orthogonality_check(
        AsymDiscrete(1.0, 1.0, 1.0), [0.08, 0.02, 0.005], N=2048
    )
    norm = rows["normalized_plus"]
    assert norm[-1] <= norm[0]
    assert max(norm) <= 0.2


def test_scaled_signed_swaps_branches():
    S = synthetic_spectrum([3.0, 1.0], [2.0])
    T = scaled_signed(S, -2.0)
    assert list(T.lambda_plus) == [4.0]
    assert list(T.lambda_minus) == [6.0, 2.0]
    Z = scaled_signed(S, 0.0)
    assert len(Z.lambda_plus) == 0 and len(Z.lambda_minus) == 0


# --- studies -------------------------------------------------------------------


def test_convergence_study_interlacing():
    study = convergence_study(
        AsymDiscrete(1.0, 1.0, 0.0),
        [256, 512, 1024],
        window_rule=lambda N: (2, 18),
    )
    assert study["interlacing_ok"]
    assert len(study["fits"]) == 3


def test_widom_slope_in_band():
    res = widom_slope(2.0, N=512, window=(4, 12))
    assert res["rel_dev"] <= 0.15


# --- continuous pipeline --------------------------------------------------------


def test_piecewise_kernel_close_to_transform_kernel():
    # the piecewise model kernel and the transform kernel differ by a
    # smooth remainder whose operator only shifts eigenvalues slightly
    p = AsymContinuous(1.0, 1.0, 1.0)
    grid = LogGrid(30.0, 1024)
    S1 = dense_eigs(discretize_integral(continuous_model_kernel(p), grid))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        S2 = dense_eigs(discretize_integral(laplace_model_kernel(p), grid))
    # calibration-frozen: measured max 0.202 over the top 6 (the smooth
    # remainder shifts the head most), 0.118 over indices 3..6
    rel = np.abs(S1.lambda_plus[:6] - S2.lambda_plus[:6]) / S2.lambda_plus[:6]
    assert rel.max() < 0.24
    deeper = np.abs(S1.lambda_plus[2:6] - S2.lambda_plus[2:6]) / S2.lambda_plus[2:6]
    assert deeper.max() < 0.15
