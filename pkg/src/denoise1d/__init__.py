"""1D signal denoising with one dictionary of nonlinearities.

Four classical ways to denoise a sampled signal -- explicit nonlinear
diffusion, shift-invariant Haar wavelet shrinkage, first-order
variational regularisation, and chained residual blocks -- are provided
behind a shared vocabulary of scalar nonlinearities.  Any nonlinearity
can be translated between its four roles (diffusivity, regulariser,
shrinkage function, activation), and with matched constants the four
methods agree to rounding.
"""

from .blocks import (
    ResidualBlock,
    apply_block,
    chain,
    make_diffusion_block,
    relu,
    truncated_tv_via_relu,
)
from .diffusion import (
    DiffusionPlan,
    StepSizeMode,
    diffuse,
    explicit_step,
    max_stable_tau,
)
from .nonlinearities import (
    CouplingParams,
    Family,
    FamilySpec,
    Role,
    RoleFunction,
    estimate_lipschitz,
    eval_family,
    make_role_function,
    translate,
    user_role_function,
)
from .shrinkage import HaarPair, iterate_shrinkage, shift_invariant_step, shrink_pair
from .signals import Signal1D, backward_diff, forward_diff
from .stability import (
    StabilityReport,
    analyze,
    check_range_preservation,
    count_sign_changes,
)
from .variational import (
    EnergySpec,
    discrete_energy,
    energy_gradient,
    euler_lagrange_residual,
    minimize_by_diffusion,
    tikhonov_solve_oracle,
)

__all__ = [
    "CouplingParams",
    "DiffusionPlan",
    "EnergySpec",
    "Family",
    "FamilySpec",
    "HaarPair",
    "ResidualBlock",
    "Role",
    "RoleFunction",
    "Signal1D",
    "StabilityReport",
    "StepSizeMode",
    "analyze",
    "apply_block",
    "backward_diff",
    "chain",
    "check_range_preservation",
    "count_sign_changes",
    "diffuse",
    "discrete_energy",
    "energy_gradient",
    "estimate_lipschitz",
    "euler_lagrange_residual",
    "eval_family",
    "explicit_step",
    "forward_diff",
    "iterate_shrinkage",
    "make_diffusion_block",
    "make_role_function",
    "max_stable_tau",
    "minimize_by_diffusion",
    "relu",
    "shift_invariant_step",
    "shrink_pair",
    "tikhonov_solve_oracle",
    "translate",
    "truncated_tv_via_relu",
    "user_role_function",
]
