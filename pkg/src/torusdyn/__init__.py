"""Numerics for quasiperiodically forced polynomial dynamics.

The core objects are trigonometric-polynomial loops on the circle
(:class:`~torusdyn.loops.Loop`), fibered polynomial maps over an
irrational rotation (:class:`~torusdyn.dynamics.QpfPolynomial`), and
the derived quantities: fibered multipliers, straightening coordinates
near attracting curves, multiplier retargeting, and escape-time /
classification rasters.  The :mod:`torusdyn.service` package wraps the
same job layer in an HTTP API; :mod:`torusdyn.cli` is a thin client.
"""

from .cohomology import CohomologySolution, divisors, small_divisor_profile, solve_cohomological
from .dynamics import (
    FiberedConformalMap,
    MultiplierData,
    QpfPolynomial,
    conjugate_by,
    fibered_multiplier,
    find_invariant_curve,
    invariance_residual,
    make_fc,
    make_quadratic,
    multiplier_from_derivative_loop,
    to_standard_form,
)
from .errors import TorusDynError
from .linearize import Linearizer, build_linearizer, evaluate_linearizer, linearizer_index
from .loops import (
    ALPHA_PRESETS,
    GOLDEN_MEAN,
    SILVER_MEAN,
    Loop,
    RotationNumber,
    circle_dist,
    circle_mean,
    continuous_log,
    rotate,
    winding_number,
)
from .multiplier import (
    MembershipReport,
    chi_hat,
    directional_derivative,
    kappa_hat,
    membership_H0star,
    scaling_section,
)
from .render import SliceSpec, fiber_filled_julia, hausdorff_distance, param_slice
from .surgery import (
    RetargetedMap,
    SurgeryModel,
    surgery_coefficients,
    tube_local_surgery,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_PRESETS",
    "GOLDEN_MEAN",
    "SILVER_MEAN",
    "CohomologySolution",
    "FiberedConformalMap",
    "Linearizer",
    "Loop",
    "MembershipReport",
    "MultiplierData",
    "QpfPolynomial",
    "RetargetedMap",
    "RotationNumber",
    "SliceSpec",
    "SurgeryModel",
    "TorusDynError",
    "build_linearizer",
    "chi_hat",
    "circle_dist",
    "circle_mean",
    "conjugate_by",
    "continuous_log",
    "directional_derivative",
    "divisors",
    "evaluate_linearizer",
    "fiber_filled_julia",
    "fibered_multiplier",
    "find_invariant_curve",
    "hausdorff_distance",
    "invariance_residual",
    "kappa_hat",
    "linearizer_index",
    "make_fc",
    "make_quadratic",
    "membership_H0star",
    "multiplier_from_derivative_loop",
    "param_slice",
    "rotate",
    "scaling_section",
    "small_divisor_profile",
    "solve_cohomological",
    "surgery_coefficients",
    "to_standard_form",
    "tube_local_surgery",
    "winding_number",
    "__version__",
]
