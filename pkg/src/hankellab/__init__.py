"""hankellab: numerical laboratory for eigenvalue asymptotics of Hankel
operators with logarithmically decaying kernels."""

__version__ = "0.1.0"

from .asymptotics import (
    CoefficientReport,
    beta_fn,
    c_pm_continuous,
    c_pm_discrete,
    c_pm_matrix,
    m_alpha,
    v_alpha,
    widom_exponent,
)
from .backend import BACKEND_NAME, available_backends
from .hankel import (
    HankelOperator,
    LogGrid,
    block_build,
    build_truncated,
    discretize_integral,
    flip_conjugate,
    matrix_free,
    matvec,
)
from .kernels import (
    AsymContinuous,
    AsymDiscrete,
    ContinuousKernel,
    CutoffPair,
    DiscreteKernel,
    continuous_model_kernel,
    eta_star,
    hilbert_kernel,
    kernel_from_json,
    kernel_to_json,
    model_kernels_h0_hinf,
    model_sequence,
    moments,
    power_kernel,
    sigma_star,
    smooth_cutoffs,
)
from .laplace import (
    laplace_model_kernel,
    laplace_transform,
    lemma_L_check,
    lemma_M_check,
    model_kernel_residual,
    moment_residual,
)
from .psido import (
    PsdoModel,
    build_psdo,
    symbol_from_eta,
    symbol_from_sigma,
    weyl_coefficient,
    weyl_counting,
)
from .quadrature import QuadratureError, integrate
from .spectra import (
    SolverError,
    SpectrumResult,
    counting_function,
    dense_eigs,
    lanczos_extreme,
)
from .verify import (
    FitResult,
    convergence_study,
    fit_coefficient,
    hs_identity,
    orthogonality_check,
    psido_equivalence,
    psido_equivalence_run,
    spectrum_of_kernel,
)
