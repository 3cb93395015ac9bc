//! Cells `b(k)`, the operators `F^i`, thorn targets and signed preimage
//! counts of the real Wronski map.

mod bk;
mod newton;
mod preimage;
mod walk;

pub use bk::{
    apply_f, chi, jacobi_delta, jacobian_entries, lowest_coefficient_rate, new_root_constant, predicted_parameter, validate_bk,
    wronskian_roots_coords, BKVector, JacobiDelta, MultiIndexK,
};
pub use newton::{coefficient_jacobian, polish, NewtonOptions, Polished};
pub use preimage::{
    big_cell_jacobian, degree_signed_sum, exact_preimages_22, preimage_ranking, preimage_solve, random_real_rooted_targets,
    random_targets, sharpness_check, DegreeSumReport, PreimageOptions, PreimageReport, PreimageSolution, SharpnessReport,
};
pub use walk::{
    all_positive, base_bound, big_cell_to_bk, bk_to_big_cell, recover_sigma, seed_chain, seed_chain_adaptive, sign_law_factors,
    squaring_schedule, thorn_walk, AdaptiveChain, ThornSpacing, ThornTarget,
};

use crate::combinatorics::CombinatoricsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegreeLabError {
    #[error("invalid multi-index: {0}")]
    InvalidIndex(String),
    #[error("q_{i} must have degree {expected}, got {got:?}")]
    WrongDegree { i: usize, expected: usize, got: Option<usize> },
    #[error("q_{i} is not monic")]
    NotMonic { i: usize },
    #[error("coefficient a_({i},{l}) is not positive")]
    NonPositiveCoefficient { i: usize, l: usize },
    #[error("{0}")]
    RootOutside(String),
    #[error("{0}")]
    MultipleRoot(String),
    #[error("F^{i} is not defined for k = {k:?}")]
    KCond { i: usize, k: Vec<usize> },
    #[error("F^{i} with a = {a} leaves the cell: {reason}")]
    TooLarge { i: usize, a: String, reason: String },
    #[error("singular Jacobian: {0}")]
    SingularJacobian(String),
    #[error("schedule: {0}")]
    Schedule(String),
    #[error("walk failed at step {step}: {reason}")]
    Walk { step: usize, reason: String },
    #[error("target must have degree {expected}, got {got:?}")]
    TargetDegree { expected: usize, got: Option<usize> },
    #[error("non-generic target: {0}")]
    NonGeneric(String),
    #[error("missed preimage: {0}")]
    MissedPreimage(String),
    #[error("found {found} real preimages, more than d = {budget}")]
    CountExceeded { found: usize, budget: u64 },
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
}
