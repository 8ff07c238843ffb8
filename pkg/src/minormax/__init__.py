"""Maxima of top eigenvalues over 2x2 principal minors of random matrices.

Samplers for the deformed GOE and Wishart ensembles, the statistic and its
normalization, the Gumbel and ``G_xi`` limit laws, deterministic checks of
the kernel asymptotics behind the limit theorem, and a Monte Carlo
goodness-of-fit runner.
"""

from .ensembles import (
    DeformedGoe,
    MemoryBudgetExceeded,
    Rademacher,
    ScaledStudentT,
    SeedSpec,
    StdGaussian,
    UniformVar1,
    Wishart,
    distribution_from_name,
    draw_goe_diag,
    draw_wishart_X,
    stream_goe_offdiag,
)
from .experiments import ExperimentConfig, GofReport, ks_distance, run_mc, write_report
from .limit_laws import (
    C2,
    GXi,
    Gumbel,
    NormConstants,
    eta,
    feng_consistency_delta,
    feng_m2_cdf,
    gumbel_cdf,
    gumbel_pdf,
    gxi_cdf,
    inner_integral,
    law_cdf,
    law_for,
    law_quantile,
    norm_constants,
)
from .minor_stats import diag_max, goe_pair_max, top_eig_2x2, wishart_pair_max
from .q_kernels import (
    KernelContext,
    chores_limits,
    kernel_context,
    lemma_diagnostics,
    predict_q_tp,
    predict_q_x,
    q_moment,
    q_tp,
    q_x,
    q_xy,
    series_identity_check,
)
from .special_functions import (
    QuadratureError,
    QuadratureSpec,
    adaptive_integrate,
    lower_incomplete_gamma,
    std_normal_cdf,
    std_normal_pdf,
    std_normal_sf,
)

__version__ = "0.1.0"
