"""Numerical laboratory for boosted two-qutrit states.

Pipeline: build a Bell-diagonal spin state on a two-particle momentum
background, apply a Lorentz boost through its unitary spin-momentum
representation, trace out the momenta, and study what the boost did to
the entanglement of the marginal (PPT spectra, realignment, witnesses,
explicit separable decompositions).
"""

from .analysis import (
    ClassificationResult,
    SolverBudget,
    WitnessReport,
    boost_witness,
    calibrate_witness,
    classify,
    mub_witness_spin,
    ppt_min_eigenvalue,
    realignment_curve,
    rlgmt,
    separable_bounds,
    spin_traced_witness,
    witness_expectation,
    witness_total,
)
from .errors import LabError
from .linalg import DensityMatrix, hs_distance, partial_trace, partial_transpose, purity, realign
from .relativity import (
    BoostParams,
    TwoParticleState,
    boost_matrix,
    boost_operator,
    boost_two_particle,
    boosted_spin_marginal,
    build_rho0,
    build_rho1,
    four_momentum,
    spin1_rep,
    spin_marginal,
    standard_boost,
    wigner_rotation,
)
from .separability import (
    CertificationResult,
    SeparableEnsemble,
    certify_separable,
    ensemble_state,
    load_appendix_ensemble,
    verify_appendix_fixture,
)
from .states import (
    ACTIVATION_AMPLITUDES,
    PHI_INTERPRETATIONS,
    activation_spin_state,
    bell_projector,
    bell_state,
    mub_bases,
    phi_spin,
    rho_b,
    rho_b_coefficients,
    simplex_state,
    weyl,
)

__version__ = "0.1.0"
