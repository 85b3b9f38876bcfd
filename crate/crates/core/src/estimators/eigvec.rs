use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{projector_distance, spectral_gap, tj_operator, SymMatrix};

/// Sign-aligned `j`-th eigenvectors of an estimate and its target with the
/// distances between them.
#[derive(Clone, Debug, Serialize)]
pub struct AlignedEigvec {
    pub u_hat: Vec<f64>,
    pub u: Vec<f64>,
    /// `‖û − u‖₂`.
    pub vector_distance: f64,
    /// `‖ûûᵀ − uuᵀ‖_F`.
    pub projector_distance: f64,
    /// `4√2 ‖T_j(Σ̂ − Σ)T_j‖`.
    pub certificate: f64,
}

impl AlignedEigvec {
    /// Whether `‖û − u‖ ≤ ‖ûûᵀ − uuᵀ‖ ≤ certificate` up to `tol`.
    pub fn chain_holds(&self, tol: f64) -> bool {
        self.vector_distance <= self.projector_distance + tol && self.projector_distance <= self.certificate + tol
    }
}

/// `j` is 0-based; the gap `g_j(Σ)` must be nondegenerate.
pub fn aligned_eigvec(sigma_hat: &SymMatrix, sigma: &SymMatrix, j: usize) -> Result<AlignedEigvec> {
    if sigma_hat.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            got: sigma_hat.dim(),
        });
    }
    let s = sigma.eig()?;
    spectral_gap(&s, j)?;
    let t = tj_operator(&s, j)?;
    let u = s.vector(j);
    let mut u_hat: DVector<f64> = sigma_hat.eig()?.vector(j);
    if u_hat.dot(&u) < 0.0 {
        u_hat.neg_mut();
    }
    let dist = projector_distance(&u_hat, &u)?;
    let cert = 4.0 * 2f64.sqrt() * (sigma_hat - sigma).congruence(&t).op_norm();
    Ok(AlignedEigvec {
        vector_distance: dist.vector,
        projector_distance: dist.projector,
        certificate: cert,
        u_hat: u_hat.iter().copied().collect(),
        u: u.iter().copied().collect(),
    })
}
