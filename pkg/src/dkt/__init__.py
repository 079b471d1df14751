"""Double kicked top toolkit.

A spin precessing about y receives two torsion kicks per period, of
strength k about z and k' about x.  The package provides the classical map
with its chaos indicators, the quantum spin-j Floquet engine with
correlation measures, exact 2-4 qubit solutions used as mutual oracles,
and a sweep-oriented command line (``dkt``).
"""

from .params import KickParams, transform_params, params_from_radial
from .sphere import point_from_angles, angles_from_point, area_uniform_grid, angle_grid
from .spin import (
    SpinOperators,
    build_spin_operators,
    coherent_state,
    build_collective_floquet,
    build_qubit_floquet,
    dicke_isometry,
    FloquetMatrix,
    DimensionLimitError,
)
from .classical import (
    map_step,
    tangent_matrix,
    largest_lyapunov,
    ks_entropy,
    phase_portrait,
    phase_averaged_chaos,
    find_fixed_points,
    classify_fixed_point,
    period2_orbit,
    period4_stable,
    symmetry_residuals,
    FixedPointRecord,
)
from .quantum import (
    evolve,
    collective_expectations,
    rdm_one,
    rdm_two,
    rdm_bruteforce,
    long_time_average,
    fidelity_average,
    time_reversal_residual,
)
from .correlations import (
    linear_entropy,
    von_neumann_entropy,
    concurrence,
    quantum_discord,
    fidelity_qubit,
    DiscordResult,
)
from .exact import (
    ClosedFormRequest,
    RationalAngle,
    closed_form_linear_entropy,
    closed_form_time_average,
    periodicity_predicate,
    detect_period,
)

__version__ = "0.1.0"
