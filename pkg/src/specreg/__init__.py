"""Spectral-regularization kernel learning: exact filtered solvers, Nystrom
and random-feature approximations with incremental regularization paths,
stochastic gradient methods, and a recursive classifier with class recoding."""

from .data import (
    Dataset,
    indicator,
    load_csv,
    load_libsvm,
    save_libsvm,
    standardize,
    synth_gaussian_mixture_2d,
    synth_linear_regression,
)
from .exact import (
    DualModel,
    PrimalModel,
    kols_fit,
    krls_fit,
    predict_dual,
    predict_primal,
    rls_fit_primal,
)
from .filters import (
    FilterSpec,
    apply_filter,
    condition_number,
    landweber,
    landweber_iterate,
    scalar_filter,
    tikhonov,
    tsvd,
)
from .kernels import (
    KernelSpec,
    cross_gram,
    gaussian_kernel,
    gram,
    kernel_eval,
    linear_kernel,
    polynomial_kernel,
)
from .linalg import (
    CholFactor,
    SymEig,
    chol_append,
    cholesky,
    cholup,
    economic_qr,
    eigh_sym,
    tri_solve,
)
from .nystrom import (
    LeverageScores,
    NystromModel,
    NystromPath,
    fit_nkrls,
    incremental_path,
    leverage_scores,
    nkrls_fit,
    perturb_scores,
    predict_nystrom,
    sample_als,
    sample_uniform,
)
from .nytro import NytroResult, early_stop_rule, nytro_fit
from .random_features import (
    FeatureMap,
    rf_fit,
    rf_incremental_path,
    sample_features,
    transform,
)
from .rlsc import (
    RlscState,
    batch_rebalanced_fit,
    rlsc_init,
    rlsc_predict,
    rlsc_predict_batch,
    rlsc_set_alpha,
    rlsc_update,
    select_alpha,
)
from .selection import (
    CVResult,
    GridSurface,
    effective_dimension,
    grid_path_lambda_m,
    holdout_cv,
    max_leverage_dimension,
    vfold_cv,
)
from .serialize import load_model, save_model
from .sgm import (
    LossSpec,
    SgmResult,
    StepSchedule,
    loss_left_derivative,
    loss_value,
    schedule_for_regime,
    sgm_run,
)

__version__ = "0.1.0"
