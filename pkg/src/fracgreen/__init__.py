"""fracgreen: fractional-Laplacian Dirichlet machinery on intervals and balls.

Closed-form Green functions, boundary traces, pointwise and quadratic-form
operator evaluation, Green-representation solvers, and numerical checkers
for the derivative/boundary identities that tie them together.
"""

from .domain import Ball, BoundaryRule, GeometryError, Interval, make_domain
from .fracop import (
    CapabilityError,
    ConstantEstimate,
    CutoffProfile,
    DEFAULT_PROFILE,
    GridFunction,
    SQUARED_PROFILE,
    a_constant,
    apply_frac_lap,
    energy_form,
    interaction_form,
)
from .greenfn import (
    GreenEval,
    NumericalError,
    TraceField,
    grad_green_x,
    green_l1_gradient,
    green_trace,
    green_value,
    regular_part,
    robin,
)
from .identities import (
    IdentityReport,
    PohozaevFunction,
    check_dedu,
    check_grad_green_l1,
    check_green_bounds,
    check_pohozaev,
    check_robin_grad,
    check_robin_symmetry,
    check_thm11_high,
    check_thm11_low,
    check_thm15,
)
from .solver import (
    ConvergenceError,
    Solution,
    SourceTerm,
    solution_trace,
    solve_linear,
    solve_semilinear,
)
from .specfun import (
    ConstantSet,
    FracParams,
    Regime,
    b_const,
    c_const,
    constants,
    fundamental,
    green_kernel_const,
    kernel_coeff,
    torsion_scale,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BoundaryRule",
    "CapabilityError",
    "ConstantEstimate",
    "ConstantSet",
    "ConvergenceError",
    "CutoffProfile",
    "DEFAULT_PROFILE",
    "FracParams",
    "GeometryError",
    "GreenEval",
    "GridFunction",
    "IdentityReport",
    "Interval",
    "NumericalError",
    "PohozaevFunction",
    "Regime",
    "SQUARED_PROFILE",
    "Solution",
    "SourceTerm",
    "TraceField",
    "a_constant",
    "apply_frac_lap",
    "b_const",
    "c_const",
    "check_dedu",
    "check_grad_green_l1",
    "check_green_bounds",
    "check_pohozaev",
    "check_robin_grad",
    "check_robin_symmetry",
    "check_thm11_high",
    "check_thm11_low",
    "check_thm15",
    "constants",
    "energy_form",
    "fundamental",
    "grad_green_x",
    "green_kernel_const",
    "green_l1_gradient",
    "green_trace",
    "green_value",
    "interaction_form",
    "kernel_coeff",
    "make_domain",
    "regular_part",
    "robin",
    "solution_trace",
    "solve_linear",
    "solve_semilinear",
    "torsion_scale",
]
