//! Covariance estimators and the diagnostics used to analyze them.
//!
//! Data are `n × d` matrices with one sample per row.

mod directions;
mod eigvec;
mod io;
mod sparse;

pub use directions::{estimate_kappa, model_kappa, spread_peaky_eval, DirectionRecord, DirectionSet, Kappa, SpreadPeakySummary};
pub use eigvec::{aligned_eigvec, AlignedEigvec};
pub use io::read_samples;
pub use sparse::{sparse_sup_f, SparseSup, SPARSE_ENUMERATION_LIMIT};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::SymMatrix;

/// `x` clipped to `[−1, 1]`.
pub fn psi_trunc(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Piecewise-linear ramp: 0 up to 1/2, `2x − 1` on `(1/2, 1]`, then 1.
pub fn rho_trunc(x: f64) -> f64 {
    if x <= 0.5 {
        0.0
    } else if x <= 1.0 {
        2.0 * x - 1.0
    } else {
        1.0
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

/// `λ = √(r/n) / (κ² ‖Σ‖)`.
pub fn truncation_lambda(kappa: f64, sigma_norm: f64, erank: f64, n: usize) -> Result<f64> {
    positive("kappa", kappa)?;
    positive("sigma_norm", sigma_norm)?;
    positive("erank", erank)?;
    if n == 0 {
        return Err(Error::invalid("n", "must be positive"));
    }
    Ok((erank / n as f64).sqrt() / (kappa * kappa * sigma_norm))
}

/// Truncation levels: `lambda` for the directional ψ-truncation and `tau`
/// for vector-norm truncation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationParams {
    pub lambda: f64,
    pub kappa: f64,
    pub tau: f64,
}

impl TruncationParams {
    pub fn new(lambda: f64, kappa: f64, tau: f64) -> Result<Self> {
        positive("lambda", lambda)?;
        if !(kappa >= 1.0) {
            return Err(Error::invalid("kappa", format!("must be >= 1, got {kappa}")));
        }
        if !(tau >= 0.0) {
            return Err(Error::invalid("tau", format!("must be >= 0, got {tau}")));
        }
        Ok(TruncationParams { lambda, kappa, tau })
    }

    /// `λ` from the population quantities, `τ` from [`default_tau`].
    pub fn from_population(x: &DMatrix<f64>, kappa: f64, sigma: &SymMatrix) -> Result<Self> {
        let lambda = truncation_lambda(kappa, sigma.op_norm(), sigma.effective_rank()?, x.nrows())?;
        TruncationParams::new(lambda, kappa, default_tau(x)?)
    }
}

fn check_nonempty(x: &DMatrix<f64>) -> Result<()> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::invalid("samples", "need at least one sample of positive dimension"));
    }
    Ok(())
}

/// `(1/n) Σ X_j X_jᵀ`.
pub fn sample_covariance(x: &DMatrix<f64>) -> Result<SymMatrix> {
    check_nonempty(x)?;
    Ok(SymMatrix::symmetrize_upper(x.transpose() * x / x.nrows() as f64))
}

/// `(1/n) Σ X_j X_jᵀ 1{‖X_j‖₂ ≤ τ}`; the normalization keeps the full `n`.
pub fn truncated_covariance(x: &DMatrix<f64>, tau: f64) -> Result<SymMatrix> {
    check_nonempty(x)?;
    if !(tau >= 0.0) {
        return Err(Error::invalid("tau", format!("must be >= 0, got {tau}")));
    }
    let mut kept = x.clone();
    for mut row in kept.row_iter_mut() {
        if row.norm() > tau {
            row.fill(0.0);
        }
    }
    Ok(SymMatrix::symmetrize_upper(kept.transpose() * &kept / x.nrows() as f64))
}

/// `τ = √(‖Σ̂‖ n / r(Σ̂))`, with `Σ̂` the sample covariance. Zero for all-zero data.
pub fn default_tau(x: &DMatrix<f64>) -> Result<f64> {
    let s = sample_covariance(x)?;
    let norm = s.op_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok((norm * x.nrows() as f64 / s.effective_rank()?).sqrt())
}

/// `(1/(λn)) Σ ψ(λ⟨X_j, v⟩²)`, the directional ψ-truncated estimate of `vᵀΣv`.
pub fn directional_quadratic(x: &DMatrix<f64>, lambda: f64, v: &nalgebra::DVector<f64>) -> f64 {
    let proj = x * v;
    proj.iter().map(|q| psi_trunc(lambda * q * q)).sum::<f64>() / (lambda * x.nrows() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn psi_and_rho_values() {
        assert_eq!(psi_trunc(0.5), 0.5);
        assert_eq!(psi_trunc(-3.0), -1.0);
        assert_eq!(psi_trunc(1.0), 1.0);
        assert_eq!(rho_trunc(0.25), 0.0);
        assert_eq!(rho_trunc(0.75), 0.5);
        assert_eq!(rho_trunc(2.0), 1.0);
    }

    #[test]
    fn rho_sandwich_and_lipschitz() {
        let grid: Vec<f64> = (-4000..=4000).map(|i| i as f64 / 1000.0).collect();
        for &x in &grid {
            let lo = if x >= 1.0 { 1.0 } else { 0.0 };
            let hi = if x >= 0.5 { 1.0 } else { 0.0 };
            assert!(lo <= rho_trunc(x) && rho_trunc(x) <= hi, "x = {x}");
        }
        for w in grid.windows(2) {
            let h = w[1] - w[0];
            assert!((psi_trunc(w[1]) - psi_trunc(w[0])).abs() <= h + 1e-12);
            assert!((rho_trunc(w[1]) - rho_trunc(w[0])).abs() <= 2.0 * h + 1e-12);
        }
    }

    #[test]
    fn lambda_examples() {
        assert_relative_eq!(truncation_lambda(1.0, 2.0, 4.0, 100).unwrap(), 0.1, epsilon = 1e-15);
        assert_relative_eq!(truncation_lambda(2.0, 1.0, 1.0, 1).unwrap(), 0.25, epsilon = 1e-15);
        assert_relative_eq!(truncation_lambda(3.0, 2.0, 50.0, 50).unwrap(), 1.0 / 18.0, epsilon = 1e-15);
        assert!(truncation_lambda(0.0, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn sample_covariance_examples() {
        let x = DMatrix::from_row_slice(1, 2, &[1.0, 2.0]);
        assert_eq!(sample_covariance(&x).unwrap(), SymMatrix::from_row_slice(2, &[1.0, 2.0, 2.0, 4.0]).unwrap());
        let e = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(sample_covariance(&e).unwrap(), SymMatrix::from_diagonal(&[0.5, 0.5]));
        assert_eq!(sample_covariance(&DMatrix::zeros(3, 2)).unwrap(), SymMatrix::zeros(2));
        assert!(sample_covariance(&DMatrix::zeros(0, 2)).is_err());
    }

    #[test]
    fn truncated_covariance_examples() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]);
        assert_eq!(truncated_covariance(&x, 3.0).unwrap(), sample_covariance(&x).unwrap());
        assert_eq!(truncated_covariance(&x, f64::INFINITY).unwrap(), sample_covariance(&x).unwrap());
        assert_eq!(truncated_covariance(&x, 0.0).unwrap(), SymMatrix::zeros(2));
        assert_eq!(truncated_covariance(&x, 2.0).unwrap(), SymMatrix::from_diagonal(&[0.5, 0.0]));
    }

    #[test]
    fn default_tau_value() {
        // Σ̂ = diag(2, 0) for rows (±√2, 0): ‖Σ̂‖ = 2, r = 1, n = 2 → τ = 2
        let x = DMatrix::from_row_slice(2, 2, &[2f64.sqrt(), 0.0, -(2f64.sqrt()), 0.0]);
        assert_relative_eq!(default_tau(&x).unwrap(), 2.0, epsilon = 1e-12);
        assert_eq!(default_tau(&DMatrix::zeros(2, 2)).unwrap(), 0.0);
    }
}
