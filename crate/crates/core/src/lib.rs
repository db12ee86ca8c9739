//! Exact symbolic engine for color superalgebras graded by Z2^n.
//!
//! The crate builds matrix differential operators over exact coefficient
//! rings, assembles graded extensions of a conformal supersymmetric
//! oscillator from Clifford algebra factors, verifies every algebraic
//! identity symbolically, and derives the model spectra with exact
//! rational energies and degeneracies.

pub mod clifford;
pub mod graded;
pub mod linalg;
pub mod scalars;
pub mod scqm;
pub mod spectrum;
pub mod weylops;

pub use clifford::{
    build_gamma, gamma_product, pauli, verify_clifford, CliffordCheck, CliffordError,
    CliffordReport, ConstMatrix,
};
pub use graded::{
    build_cl2n, build_cl2nm2, build_cl6b, extract_cl6b_constants, f_exponent, greek_degrees,
    normalize_indices, BracketTable, Cl6bConstants, DegreeVector, GammaConditionReport,
    Generator, GradedError, GradedModel, HermiticityReport, JacobiReport, ModelKind, NamedCheck,
    NamedOp, SuperRealization,
};
pub use linalg::{nullspace, rank, Echelon};
pub use scalars::{BetaPoly, GaussianRational, Rational, Scalar};
pub use scqm::{
    build_graded_oscillator, build_ladder, build_osp12, build_realization, eval_model,
    verify_oscillator, verify_realization, IdentityCheck, LadderPair, LadderSet,
    OscillatorReport, RealizationReport, RelationCheck, ScqmError,
};
pub use spectrum::{
    apply, eigen_check, excited_levels, ground_state_branches, ground_states,
    proportionality_check, wave_degree, EigenOutcome, GroundBranch, LevelReport, OpSide,
    Proportionality, SpectrumError, SpectrumReport, WaveVector,
};
pub use weylops::{BracketKind, DiffOp, MatrixOp};

/// Cap the global worker pool used by the parallel verification sweeps.
/// Returns false (leaving the pool untouched) if it was already started.
pub fn configure_threads(threads: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .is_ok()
}

/// Constant matrix over Q(i), e.g. a Clifford generator.
pub type GammaMatrix = ConstMatrix<GaussianRational>;

/// Matrix operator with the coupling constant kept formal.
pub type FormalOp = MatrixOp<BetaPoly>;

/// Matrix operator with all coefficients in Q(i).
pub type NumericOp = MatrixOp<GaussianRational>;
