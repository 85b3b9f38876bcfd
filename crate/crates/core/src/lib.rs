//! Closed-form concentration and moment bounds for sums of independent random
//! matrices, the covariance and eigenvector estimators they apply to, random
//! column subsampling, and a seeded Monte Carlo harness that audits each
//! inequality empirically.
//!
//! Module map:
//! - [`matcore`]: symmetric matrix algebra, spectra, effective/stable/relative rank.
//! - [`bounds`]: right-hand-side evaluators of every inequality.
//! - [`samplers`]: seeded heavy-tailed vector models and matrix ensembles.
//! - [`estimators`]: sample/truncated covariance, truncation functions, sparse
//!   Gram oracle, aligned eigenvectors.
//! - [`subsample`]: Bernoulli column subsampling.
//! - [`mc`]: Monte Carlo tail/moment estimation, constant fitting, audits.

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod matcore;
pub mod mc;
pub mod samplers;
pub mod subsample;

pub use error::{Error, Result};
pub use matcore::{RectMatrix, Spectrum, SymMatrix};
pub use samplers::SeedSpec;
