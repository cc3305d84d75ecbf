"""Numerical laboratory for sharp forward-regularity bounds of Ito diffusions.

The package computes and cross-verifies: Gaussian Renyi/KL divergences and
reverse transport bounds via optimal shift schedules, shift (log-)Harnack
constants and their duality with Renyi bounds, a 1D Fokker-Planck solver
that checks the inequalities against quadrature truth, exact small-instance
optimal transport for composition-rule verification, shifted divergences on
Gaussian families, and score concentration experiments.  The OU process is
the tightness oracle throughout: its Gaussian marginals turn every bound
into an equality.
"""

__version__ = "0.1.0"

from .gaussian_info import (
    GaussianMeasure,
    RenyiOrder,
    convolve_gaussian,
    dq_from_renyi,
    order_of,
    renyi_from_Dq,
    renyi_gaussian_shared_cov,
    translate,
)
from .kernels import (
    ItoModel,
    StepSize,
    euler_step_distribution,
    ou_continuous_marginal,
    ou_discrete_marginal,
    ou_model,
)
from .schedules import (
    ContinuousSchedule,
    ShiftSchedule,
    brute_force_schedule,
    continuous_cost,
    continuous_schedule_sinh,
    discrete_cost,
    optimal_discrete_cost,
    optimal_discrete_schedule,
)
from .bounds import (
    RegularityBound,
    continuous_srt_bound,
    discrete_srt_bound,
    harnack_from_renyi,
    multi_step_bound,
    renyi_from_harnack,
    theorem1_constants,
)
from .coupling import (
    Coupling,
    DiscreteMeasure,
    convexity_upgrade,
    ot_min_linear,
    renyi_discrete,
    verify_shifted_composition_finite,
)
from .fokker_planck import (
    DensityField,
    Grid1D,
    Potential1D,
    renyi_shift_quadrature,
    solve_transition_density,
    verify_lge_and_harnack,
    verify_srt,
)
from .sampler import (
    SampleSet,
    ScorePotential,
    gaussian_potential,
    potential_from_1d,
    sample_pi,
    score_mgf_check,
    score_norm_tail,
)
from .shifted_div import (
    dual_shifted_renyi_gaussian,
    gaussian_sensitivity,
    shifted_renyi_gaussian,
    standard_shifted_renyi_gaussian_translate,
    verify_convolution_lemma,
)
from .expr import parse_potential
