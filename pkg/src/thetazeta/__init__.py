"""K-Bessel series expansions for completed zeta and L-functions.

The public surface is re-exported here; see the individual modules for
details.
"""

from .errors import (
    ThetaZetaError,
    DomainError,
    PoleError,
    EnvelopeError,
    GateError,
    ConvergenceError,
)
from .config import Precision, get_precision, set_precision
from .special_fn import complex_gamma, log_gamma, bessel_k, integrate_decaying, QuadratureSpec, EvalResult
from .theta import (
    RealCharacter,
    CuspFormSpec,
    PositivityReport,
    theta0,
    theta_chi,
    eval_cusp,
    delta_coeffs,
    delta_form,
    check_positivity,
    require_positive,
    bundled_character,
    kronecker_character,
)
from .powcoeffs import (
    CoeffStream,
    pow_series,
    theta_stream,
    chi_stream,
    cusp_stream,
    c_alpha,
    c_chi_alpha,
    c_f_alpha,
    perturbed,
    brute_force_pow_oracle,
)
from .zalpha import z_alpha, z_pair, z_alpha_chi, z_alpha_f, zeta_star
from .csformula import (
    TruncationBudget,
    riemann_series,
    riemann_series_divisor,
    critical_line_form,
    zeta_fig_approx,
    dirichlet_series,
    dirichlet_special_values,
    cuspform_series,
    cuspform_special_values,
    make_budget,
)
from .eisenstein import (
    EisensteinPoint,
    e_integral,
    e_expansion,
    gamma_alpha_const,
    kronecker_limit,
    kronecker_limit_extrapolated,
)
from .oracle import (
    EMConfig,
    zeta_em,
    hurwitz_zeta,
    zeta_star_oracle,
    dirichlet_l_oracle,
    cuspform_l_oracle,
    zeta_zeros,
)

__version__ = "0.1.0"
