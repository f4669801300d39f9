"""Exact and Monte Carlo tools for the alpha-skew random walk."""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    LatticePmf,
    ResourceLimitError,
    SkewParam,
    conditional_increment_moments,
    exact_pmf,
    factorized_pmf,
    reflected_pmf,
    step,
)
from .asymptotics import (  # noqa: E402
    ConvSeq,
    a_sum,
    b_sum,
    convolve,
    g_seq,
    gen_fn_eval,
    mu_seq,
    nu_seq,
    partial_sums,
    tauberian_ratio,
)
from .moments import (  # noqa: E402
    GridPair,
    MomentReport,
    decomposition_terms,
    fourth_moment_exact,
    fourth_moment_interp,
    interp_value,
    tightness_scan,
)
from .rng import RngContract  # noqa: E402
from .simulate import (  # noqa: E402
    PathSample,
    ks_statistic,
    mc_fourth_moment,
    sample_path_direct,
    sample_path_excursion,
    skew_bm_cdf,
)
