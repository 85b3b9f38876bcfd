use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::SeedSpec;
use crate::error::{Error, Result};
use crate::matcore::{Spectrum, SymMatrix};

/// Eigenvalue profile of a covariance matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpectrumSpec {
    Explicit { eigenvalues: Vec<f64> },
    /// `λ_i = ratio^i`, `i = 0..dim`.
    Geometric { dim: usize, ratio: f64 },
    /// `λ_i = (i+1)^{-exponent}`.
    Polynomial { dim: usize, exponent: f64 },
    /// `λ_1 = 1` and the remaining `dim−1` eigenvalues equal, chosen so that
    /// `r(Σ) = erank`.
    TargetRank { dim: usize, erank: f64 },
}

impl SpectrumSpec {
    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut ev = match self {
            SpectrumSpec::Explicit { eigenvalues } => eigenvalues.clone(),
            &SpectrumSpec::Geometric { dim, ratio } => {
                if !(ratio > 0.0 && ratio <= 1.0) {
                    return Err(Error::invalid("ratio", format!("must lie in (0, 1], got {ratio}")));
                }
                (0..dim).map(|i| ratio.powi(i as i32)).collect()
            }
            &SpectrumSpec::Polynomial { dim, exponent } => {
                if !(exponent >= 0.0 && exponent.is_finite()) {
                    return Err(Error::invalid("exponent", format!("must be finite and >= 0, got {exponent}")));
                }
                (0..dim).map(|i| ((i + 1) as f64).powf(-exponent)).collect()
            }
            &SpectrumSpec::TargetRank { dim, erank } => {
                if dim == 0 || !(erank >= 1.0 && erank <= dim as f64) {
                    return Err(Error::invalid("erank", format!("must lie in [1, {dim}], got {erank}")));
                }
                let rest = if dim > 1 { (erank - 1.0) / (dim - 1) as f64 } else { 0.0 };
                std::iter::once(1.0).chain(std::iter::repeat_n(rest, dim - 1)).collect()
            }
        };
        if ev.is_empty() {
            return Err(Error::invalid("spectrum", "must have at least one eigenvalue"));
        }
        if let Some(&bad) = ev.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::invalid("spectrum", format!("eigenvalues must be finite and >= 0, got {bad}")));
        }
        if ev.iter().all(|&x| x == 0.0) {
            return Err(Error::Zero("covariance spectrum"));
        }
        ev.sort_by(|a, b| b.total_cmp(a));
        Ok(ev)
    }
}

fn default_true() -> bool {
    true
}

/// Declarative covariance: a spectrum and an optional random eigenbasis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceSpec {
    pub spectrum: SpectrumSpec,
    #[serde(default = "default_true")]
    pub random_basis: bool,
    #[serde(default)]
    pub basis_seed: u64,
}

/// A covariance `Σ` together with its eigendecomposition and `Σ^{1/2}`.
#[derive(Clone, Debug)]
pub struct Covariance {
    spectrum: Spectrum,
    matrix: SymMatrix,
    root: SymMatrix,
}

impl Covariance {
    pub fn from_spectrum(spectrum: Spectrum) -> Result<Self> {
        if spectrum.eigenvalues().iter().any(|&l| l < 0.0) {
            return Err(Error::NotPsd {
                min_eigenvalue: *spectrum.eigenvalues().last().unwrap(),
            });
        }
        if spectrum.eigenvalues()[0] == 0.0 {
            return Err(Error::Zero("covariance spectrum"));
        }
        let matrix = spectrum.reconstruct();
        let root = spectrum.map(f64::sqrt);
        Ok(Covariance { spectrum, matrix, root })
    }

    pub fn from_matrix(sigma: &SymMatrix) -> Result<Self> {
        let s = sigma.eig()?;
        let min = *s.eigenvalues().last().unwrap();
        if min < -crate::matcore::PSD_TOL * s.eigenvalues()[0].abs().max(1.0) {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        let clamped: Vec<f64> = s.eigenvalues().iter().map(|&l| l.max(0.0)).collect();
        let mut cov = Covariance::from_spectrum(Spectrum::from_parts(clamped, s.eigenvectors().clone())?)?;
        cov.matrix = sigma.clone();
        Ok(cov)
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    /// `Σ^{1/2}`.
    pub fn root(&self) -> &SymMatrix {
        &self.root
    }

    /// `r(Σ)` computed from the eigenvalues.
    pub fn effective_rank(&self) -> f64 {
        let ev = self.spectrum.eigenvalues();
        (ev.iter().sum::<f64>() / ev[0]).clamp(1.0, ev.len() as f64)
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal pushed into `Q`.
pub fn random_orthonormal(dim: usize, seed: SeedSpec) -> DMatrix<f64> {
    let mut rng = seed.rng();
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for c in 0..dim {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    q
}

pub fn build_covariance(spec: &CovarianceSpec) -> Result<Covariance> {
    let ev = spec.spectrum.eigenvalues()?;
    let d = ev.len();
    let basis = if spec.random_basis {
        random_orthonormal(d, SeedSpec::new(spec.basis_seed, 0).derive(0xC0_FA))
    } else {
        DMatrix::identity(d, d)
    };
    Covariance::from_spectrum(Spectrum::from_parts(ev, basis)?)
}
