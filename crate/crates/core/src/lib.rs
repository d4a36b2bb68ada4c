//! Numerical laboratory for mixed-norm inequalities of multilinear forms.
//!
//! The crate decides which exponent tuples `(q_1, ..., q_k)` admit an
//! inequality of the form
//!
//! ```text
//! || T(e_{i_1}^{n_1}, ..., e_{i_k}^{n_k}) ||_{l_{q_1, ..., q_k}}  <=  C ||T||
//! ```
//!
//! for all multilinear forms `T` on `c_0`, and checks the answer numerically on
//! finite sections: mixed norms ([`tensor`]), operator norms ([`opnorm`]),
//! random-sign counterexamples ([`randforms`]) and growth-rate sweeps
//! ([`scaling`]).

pub mod cli;
pub mod error;
pub mod exponents;
pub mod opnorm;
pub mod randforms;
pub mod scalar;
pub mod scaling;
pub mod tensor;

pub use error::{Error, Result};
pub use exponents::{
    classical_bh_tuple, deficit, is_admissible_bruteforce, is_admissible_exact, is_admissible_fast,
    reduce_min2, AdmissibilityReport, ExponentTuple, IndexSet,
};
pub use opnorm::{ascent_lower, bilinear_upper, exact_real, Certificate, NormEstimate};
pub use randforms::{lift, sample_sign_tensor, KszSpec};
pub use scaling::{fit_slope, run_experiment, ExperimentSpec, Family, NormMode, ScalingResult};
pub use tensor::{block_restrict, flat_qnorm, mixed_norm, CoefTensor, Partition, ScalarField};
