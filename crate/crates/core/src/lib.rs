//! Precise and imprecise (credal) finite-state Markov chains in the
//! joint-distribution representation.
//!
//! A two-step law is stored as a joint matrix `Q(x, y) = q(x) P(x, y)`. Time
//! reversal is transposition, reversibility of a credal set of joint matrices
//! is closure under transposition, and lower/upper expectations of path
//! functionals are linear programs over those sets.
//!
//! All kernels are generic over [`Scalar`]: use [`Rational`] for exact
//! arithmetic or `f64` for speed.

pub mod chain;
pub mod credal;
pub mod error;
pub mod joint;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod scalar;
pub mod walk;

pub use chain::{
    detailed_balance_holds, marginal_at, path_probability, q_reverse, reverse_law, stationary_distribution, Path,
    ProbVector, StochasticMatrix, TransitionLaw,
};
pub use credal::{Gamble2, IntervalJointSet, MatrixSet, PathGamble, VertexCredalSet};
pub use error::{Error, Result};
pub use joint::{joint_from, JointMatrix, JointSequence};
pub use linalg::Matrix;
pub use lp::{LinearProgram, LpOutcome, LpStatus, Sense};
pub use oracle::GridSpec;
pub use scalar::{Rational, Scalar, Tolerance};
pub use walk::{IntervalWeightSet, WeightMatrix};
