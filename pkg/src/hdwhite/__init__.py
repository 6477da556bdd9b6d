"""High-dimensional white-noise testing with gap-constrained U-statistics."""

__version__ = "0.1.0"

from hdwhite.baselines import (
    calibrate_null,
    max_stat,
    sample_autocorr,
    sample_autocov,
    sum_stat,
)
from hdwhite.covariance import (
    CovarianceModel,
    SpectralDiagnostics,
    assumption_diagnostics,
    factor_cov,
    identity_cov,
    psd_sqrt,
)
from hdwhite.exceptions import (
    ConfigError,
    DegenerateVarianceError,
    HDWhiteError,
    InsufficientSampleError,
    NotPSDError,
)
from hdwhite.montecarlo import (
    ExperimentSpec,
    ResultTable,
    derive_rep_rng,
    run_power_study,
    run_size_study,
    grid_preset,
)
from hdwhite.simulate import (
    DiagCoeff,
    Innovation,
    coeff_matrix,
    draw_innovations,
    gen_null,
    gen_var1,
    gen_vma1,
)
from hdwhite.tuples import (
    brute_tuple_product_sum,
    dp_tuple_product_sum,
    enumerate_tuples,
    tuple_count,
)
from hdwhite.ustat import (
    TestConfig,
    UStatReport,
    normal_quantile,
    normal_upper_tail,
    run_test,
    sigma_exact,
    sigma_hat,
    u_statistic,
)
