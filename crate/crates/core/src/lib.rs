//! Distances between finite subsets of the complex unit ball, their
//! Drury–Arveson quotient spaces `H²_d|_X`, and the multiplier algebras of
//! those spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: Hermitian eigenvalues, definite pencils, SVD, PSD tests and
//!   exact bottleneck assignment for small dense matrices.
//! - [`ball`]: ball points, the pseudohyperbolic metric and automorphisms.
//! - [`set_metrics`]: Hausdorff and symmetric distances, and their
//!   automorphism-invariant versions.
//! - [`kernels`]: Gram matrices of the kernel `1/(1 - <z, w>)`, Schur power
//!   sums and truncation orders.
//! - [`rkhs`]: the reproducing-kernel Banach–Mazur distance and the a-priori
//!   bounds relating it to point-set geometry.
//! - [`multiplier`]: Pick-matrix interpolation norms, the multiplier
//!   discrepancy and brackets for the multiplier Banach–Mazur distance.
//! - [`alignment`]: the unitary Procrustes problem.
//!
//! Every value that is not computed exactly carries a [`Certificate`].

pub mod alignment;
pub mod ball;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod multiplier;
pub mod optimize;
pub mod rkhs;
pub mod set_metrics;

use serde::{Deserialize, Serialize};

pub use ball::{BallAutomorphism, BallPoint, PointSet};
pub use error::{Error, Result};
pub use linalg::{CostMatrix, HermitianMatrix, C64};
pub use optimize::OptimizerConfig;

/// How a reported value relates to the quantity it estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Certificate {
    Exact,
    UpperBound,
    LowerBound,
    Bracket,
}

impl Certificate {
    pub fn as_str(self) -> &'static str {
        match self {
            Certificate::Exact => "EXACT",
            Certificate::UpperBound => "UPPER_BOUND",
            Certificate::LowerBound => "LOWER_BOUND",
            Certificate::Bracket => "BRACKET",
        }
    }
}

impl std::fmt::Display for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
