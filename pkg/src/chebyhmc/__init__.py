"""Hamiltonian Monte Carlo with Chebyshev-root integration times."""

from .chebyshev import (
    ChebyshevRootSet,
    SpectralBounds,
    cheb_first_kind,
    cheb_roots,
    cosine_product,
    gd_chebyshev_contraction,
    h_map,
    phi_bar,
    psi,
    rate_bound,
)
from .diagnostics import (
    EssReport,
    autocorrelation,
    cov_frobenius_error,
    discrete_tv,
    ess,
    ess_report,
    gaussian_w2,
)
from .errors import (
    ConstantSeriesError,
    ConvergenceError,
    DegenerateSpectrumError,
    NonFiniteStateError,
    ScheduleError,
)
from .ideal import (
    IdealTrace,
    PhaseState,
    contraction_curve,
    contraction_factor,
    coupled_deviation,
    exact_flow,
    ideal_chain,
    ideal_ensemble,
    ideal_hmc_run,
)
from .potentials import (
    LabeledDataset,
    PotentialSpec,
    gaussian_general,
    gaussian_mixture,
    hard_potential,
    hessian_extreme_eigs,
    load_labeled_csv,
    logistic_regression,
    make_potential,
    newton_map,
    correlated_gaussian,
    symmetric_mixture,
    quadratic_diag,
)
from .sampler import ChainTrace, hmc_step, leapfrog, run_chain, run_ensemble
from .schedules import (
    IntegrationSchedule,
    chebyshev_schedule,
    constant_schedule,
    pair_time_sum,
    total_and_average_time,
)

__version__ = "0.1.0"
