"""eelab: a numerical laboratory for entropy solutions of the 2D eikonal equation.

Builds divergence-free unit test fields on grids, mollifies them, evaluates
entropy productions and their closed-form decompositions, constructs the
factorized kinetic measure, estimates Besov seminorms, and verifies the
coercive interaction functional - all with two independent computation paths
wherever an identity is claimed.
"""

__version__ = "0.1.0"

from .circle import CircleFunction, circle_from_samples
from .entropy import (
    DiskHarmonic,
    EntropyMap,
    ExtendedEntropy,
    RadialCutoff,
    a_coefficients,
    b_coefficients,
    ent_residual,
    generated_entropy,
    generated_entropy_closed_form,
    generator_harmonic_potential,
    harmonic_entropy,
    harmonic_extension,
    jin_kohn,
    jin_kohn_circle,
    linear_entropy,
    multiplier,
    multiplier_differential,
    potential_linear_term,
    q_coefficients,
    radial_extension,
    radial_psi_gamma,
)
from .grids import (
    AngleField,
    ConstantSpec,
    Grid2,
    JumpSpec,
    Mollifier,
    ScalarField,
    StreamSpec,
    VecField,
    VortexSpec,
    build_field,
    centered_grid,
    divergence,
    lp_norm,
    mollify,
    read_field,
    shift_diff,
    write_field,
)
from .kinetic import (
    JumpLineMeasure,
    KineticLattice,
    KineticMeasure,
    SpaceTimeTestFunction,
    factorized_measure,
    indicator_lattice,
    kinetic_residual,
    pair_measure,
    theta_of,
    theta_of_vec,
)
from .production import (
    cubic_average_besov_bound,
    cubic_difference_average,
    div_entropy,
    div_sigma_closed,
    harmonic_production_identity,
    jump_production_mass,
    pointwise_bound_check,
    production_ladder,
    refinement_order,
)
from .regularity import (
    BesovReport,
    InteractionSample,
    InteractionWeight,
    besov_seminorm,
    coercivity_profile,
    coercivity_scan,
    interaction_functional,
    interaction_identity_check,
    make_interaction_weight,
    substitution_form,
    symmetric_interaction_closed_form,
    symmetric_pair_interaction,
)
from .factorization import (
    FactorizationReport,
    factor_coefficient,
    pairing_consistency_gap,
    rotated_productions,
    vanishing_production_check,
    verify_factorization,
    verify_harmonic_decomposition,
)
