use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{ChiSquared, Distribution, Pareto, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use super::{build_covariance, Covariance, CovarianceSpec, Rng, SeedSpec};
use crate::error::{Error, Result};
use crate::matcore::SymMatrix;

/// Symmetric scalar law rescaled to unit variance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScalarLaw {
    Gaussian,
    StudentT { dof: f64 },
    /// Random sign times a Pareto(1, α) variable.
    ParetoSymmetric { alpha: f64 },
    Rademacher,
}

fn gaussian_abs_moment(p: f64) -> f64 {
    // E|g|^p = 2^{p/2} Γ((p+1)/2) / √π
    (0.5 * p * std::f64::consts::LN_2 + libm::lgamma((p + 1.0) / 2.0) - 0.5 * std::f64::consts::PI.ln()).exp()
}

impl ScalarLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalarLaw::StudentT { dof } if !(dof > 2.0 && dof.is_finite()) => Err(Error::invalid(
                "dof",
                format!("Student-t needs dof > 2 for a finite covariance, got {dof}"),
            )),
            ScalarLaw::ParetoSymmetric { alpha } if !(alpha > 2.0 && alpha.is_finite()) => Err(Error::invalid(
                "alpha",
                format!("Pareto needs tail index > 2 for a finite covariance, got {alpha}"),
            )),
            _ => Ok(()),
        }
    }

    /// One standardized draw. The law must have been validated.
    pub fn sample(&self, rng: &mut Rng) -> f64 {
        match *self {
            ScalarLaw::Gaussian => rng.sample(StandardNormal),
            ScalarLaw::StudentT { dof } => {
                let t: f64 = StudentT::new(dof).expect("validated dof").sample(rng);
                t * ((dof - 2.0) / dof).sqrt()
            }
            ScalarLaw::ParetoSymmetric { alpha } => {
                let x: f64 = Pareto::new(1.0, alpha).expect("validated alpha").sample(rng);
                let sd = (alpha / (alpha - 2.0)).sqrt();
                if rng.random_bool(0.5) {
                    x / sd
                } else {
                    -x / sd
                }
            }
            ScalarLaw::Rademacher => {
                if rng.random_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// `E|ξ|^p` of the standardized law; `+∞` when the moment does not exist.
    pub fn abs_moment(&self, p: f64) -> f64 {
        match *self {
            ScalarLaw::Gaussian => gaussian_abs_moment(p),
            ScalarLaw::StudentT { dof } => {
                if p >= dof {
                    return f64::INFINITY;
                }
                let ln = 0.5 * p * dof.ln() + libm::lgamma((p + 1.0) / 2.0) + libm::lgamma((dof - p) / 2.0)
                    - 0.5 * std::f64::consts::PI.ln()
                    - libm::lgamma(dof / 2.0);
                ln.exp() * ((dof - 2.0) / dof).powf(p / 2.0)
            }
            ScalarLaw::ParetoSymmetric { alpha } => {
                if p >= alpha {
                    return f64::INFINITY;
                }
                alpha / (alpha - p) * ((alpha - 2.0) / alpha).powf(p / 2.0)
            }
            ScalarLaw::Rademacher => 1.0,
        }
    }
}

/// How the standardized randomness of a vector model is generated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VectorLaw {
    /// `X = Σ^{1/2} g`.
    Gaussian,
    /// Elliptical multivariate t, rescaled so that `E XXᵀ = Σ`.
    StudentT { dof: f64 },
    /// `X = Σ^{1/2} z` with i.i.d. standardized symmetric Pareto coordinates.
    ParetoSymmetric { alpha: f64 },
    /// `X = Σ √λ_i η_i u_i` with i.i.d. coefficients `η_i`.
    KarhunenLoeve { coefficients: ScalarLaw },
}

impl VectorLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            VectorLaw::Gaussian => Ok(()),
            VectorLaw::StudentT { dof } => ScalarLaw::StudentT { dof }.validate(),
            VectorLaw::ParetoSymmetric { alpha } => ScalarLaw::ParetoSymmetric { alpha }.validate(),
            VectorLaw::KarhunenLoeve { coefficients } => coefficients.validate(),
        }
    }
}

/// Declarative form of a [`VectorModel`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorModelSpec {
    pub law: VectorLaw,
    pub covariance: CovarianceSpec,
}

impl VectorModelSpec {
    pub fn build(&self) -> Result<VectorModel> {
        VectorModel::new(self.law, build_covariance(&self.covariance)?)
    }
}

/// A centered random vector with covariance `Σ`.
#[derive(Clone, Debug)]
pub struct VectorModel {
    law: VectorLaw,
    cov: Covariance,
}

impl VectorModel {
    pub fn new(law: VectorLaw, cov: Covariance) -> Result<Self> {
        law.validate()?;
        Ok(VectorModel { law, cov })
    }

    pub fn law(&self) -> VectorLaw {
        self.law
    }

    pub fn covariance(&self) -> &Covariance {
        &self.cov
    }

    pub fn dim(&self) -> usize {
        self.cov.dim()
    }

    /// `n` draws as the rows of an `n × d` matrix.
    pub fn sample(&self, n: usize, seed: SeedSpec) -> DMatrix<f64> {
        let mut rng = seed.rng();
        self.sample_with(n, &mut rng)
    }

    pub(crate) fn sample_with(&self, n: usize, rng: &mut Rng) -> DMatrix<f64> {
        let d = self.dim();
        match self.law {
            VectorLaw::Gaussian => {
                let z = DMatrix::from_fn(n, d, |_, _| rng.sample::<f64, _>(StandardNormal));
                z * self.cov.root().as_dmatrix()
            }
            VectorLaw::StudentT { dof } => {
                let chi = ChiSquared::new(dof).expect("validated dof");
                let mut z = DMatrix::from_fn(n, d, |_, _| rng.sample::<f64, _>(StandardNormal));
                for mut row in z.row_iter_mut() {
                    let w: f64 = chi.sample(rng);
                    row *= ((dof - 2.0) / w).sqrt();
                }
                z * self.cov.root().as_dmatrix()
            }
            VectorLaw::ParetoSymmetric { alpha } => {
                let law = ScalarLaw::ParetoSymmetric { alpha };
                let z = DMatrix::from_fn(n, d, |_, _| law.sample(rng));
                z * self.cov.root().as_dmatrix()
            }
            VectorLaw::KarhunenLoeve { coefficients } => {
                let spec = self.cov.spectrum();
                let mut z = DMatrix::from_fn(n, d, |_, _| coefficients.sample(rng));
                for (c, &l) in spec.eigenvalues().iter().enumerate() {
                    z.column_mut(c).scale_mut(l.max(0.0).sqrt());
                }
                z * spec.eigenvectors().transpose()
            }
        }
    }

    /// Hypercontractivity ratio `sup_v E^{1/p}|⟨X,v⟩|^p / E^{1/2}⟨X,v⟩²` where it
    /// has a closed form (Gaussian and elliptical t, and Karhunen-Loève with
    /// Gaussian coefficients); `None` otherwise.
    pub fn kappa_analytic(&self, p: f64) -> Option<f64> {
        let law = match self.law {
            VectorLaw::Gaussian => ScalarLaw::Gaussian,
            VectorLaw::StudentT { dof } => ScalarLaw::StudentT { dof },
            VectorLaw::KarhunenLoeve {
                coefficients: ScalarLaw::Gaussian,
            } => ScalarLaw::Gaussian,
            _ => return None,
        };
        Some(law.abs_moment(p).powf(1.0 / p))
    }

    /// `E (XXᵀ − Σ)²` when the needed fourth moments are finite.
    pub fn centered_square_mean(&self) -> Result<SymMatrix> {
        let sigma = self.cov.matrix();
        let sigma2 = sigma.square();
        let tr = sigma.trace();
        let base = &sigma.scale(tr) + &sigma2;
        let out = match self.law {
            VectorLaw::Gaussian => base,
            VectorLaw::StudentT { dof } => {
                if dof <= 4.0 {
                    return Err(Error::invalid("dof", "fourth moment is infinite for dof <= 4"));
                }
                // (ν−2)/(ν−4) (tr Σ·Σ + 2Σ²) − Σ²
                let c = (dof - 2.0) / (dof - 4.0);
                &(&sigma.scale(tr * c) + &sigma2.scale(2.0 * c)) - &sigma2
            }
            VectorLaw::ParetoSymmetric { alpha } => {
                let m4 = ScalarLaw::ParetoSymmetric { alpha }.abs_moment(4.0);
                if !m4.is_finite() {
                    return Err(Error::invalid("alpha", "fourth moment is infinite for alpha <= 4"));
                }
                let diag: Vec<f64> = (0..self.dim()).map(|i| sigma.get(i, i)).collect();
                let mid = SymMatrix::from_diagonal(&diag).congruence(self.cov.root());
                &base + &mid.scale(m4 - 3.0)
            }
            VectorLaw::KarhunenLoeve { coefficients } => {
                let m4 = coefficients.abs_moment(4.0);
                if !m4.is_finite() {
                    return Err(Error::invalid("coefficients", "fourth moment is infinite"));
                }
                &sigma.scale(tr) + &sigma2.scale(m4 - 2.0)
            }
        };
        Ok(out)
    }
}

/// `n` i.i.d. draws of `model` as the rows of an `n × d` matrix.
pub fn sample_vectors(model: &VectorModel, n: usize, seed: SeedSpec) -> DMatrix<f64> {
    model.sample(n, seed)
}
