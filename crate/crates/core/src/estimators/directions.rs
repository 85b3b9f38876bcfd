use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{psi_trunc, TruncationParams};
use crate::error::{Error, Result};
use crate::matcore::SymMatrix;
use crate::samplers::{SeedSpec, VectorModel};

const UNIT_TOL: f64 = 1e-10;

/// Finite set of unit vectors standing in for the unit sphere. Suprema over
/// it are lower bounds of the true suprema.
#[derive(Clone, Debug)]
pub struct DirectionSet {
    dirs: DMatrix<f64>,
}

impl DirectionSet {
    pub const DEFAULT_COUNT: usize = 1024;

    /// Directions given as the columns of `dirs`, each of unit length.
    pub fn new(dirs: DMatrix<f64>) -> Result<Self> {
        if dirs.ncols() == 0 || dirs.nrows() == 0 {
            return Err(Error::invalid("directions", "need at least one direction"));
        }
        for (i, c) in dirs.column_iter().enumerate() {
            if (c.norm() - 1.0).abs() > UNIT_TOL {
                return Err(Error::invalid("directions", format!("column {i} has norm {}", c.norm())));
            }
        }
        Ok(DirectionSet { dirs })
    }

    /// `m` directions uniform on the sphere.
    pub fn uniform(dim: usize, m: usize, seed: SeedSpec) -> Result<Self> {
        let mut rng = seed.rng();
        let mut g = DMatrix::from_fn(dim, m, |_, _| rng.sample::<f64, _>(StandardNormal));
        for mut c in g.column_iter_mut() {
            let nrm = c.norm();
            c /= nrm;
        }
        DirectionSet::new(g)
    }

    /// Eigenvectors of `sigma` and `sigma_hat` followed by `m` uniform directions.
    pub fn standard(sigma: &SymMatrix, sigma_hat: &SymMatrix, m: usize, seed: SeedSpec) -> Result<Self> {
        let d = sigma.dim();
        if sigma_hat.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: sigma_hat.dim(),
            });
        }
        let a = sigma.eig()?;
        let b = sigma_hat.eig()?;
        let mut cols: Vec<DVector<f64>> = Vec::with_capacity(2 * d + m);
        cols.extend((0..d).map(|j| a.vector(j)));
        cols.extend((0..d).map(|j| b.vector(j)));
        if m > 0 {
            let u = DirectionSet::uniform(d, m, seed)?;
            cols.extend(u.dirs.column_iter().map(|c| c.into_owned()));
        }
        DirectionSet::new(DMatrix::from_columns(&cols))
    }

    pub fn len(&self) -> usize {
        self.dirs.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.ncols() == 0
    }

    pub fn dim(&self) -> usize {
        self.dirs.nrows()
    }

    /// Directions as columns.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.dirs
    }

    fn projections(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.ncols(),
            });
        }
        Ok(x * &self.dirs)
    }
}

/// Per-direction split of the quadratic-form error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DirectionRecord {
    /// `|(1/(λn)) Σ ψ(λ⟨X_j,v⟩²) − vᵀΣv|`.
    pub spread: f64,
    /// `(1/n) Σ ⟨X_j,v⟩² 1{λ⟨X_j,v⟩² > 1}`.
    pub peaky: f64,
    /// `|I_v|`.
    pub count: usize,
    /// `(1/(λn)) Σ ψ(λ⟨X_j,v⟩²)`.
    pub psi_mean: f64,
    /// `|(1/n) Σ ⟨X_j,v⟩² − vᵀΣv|`.
    pub quad_error: f64,
}

/// Suprema of the [`DirectionRecord`] fields over a direction set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpreadPeakySummary {
    pub spread: f64,
    pub peaky: f64,
    pub m: usize,
    pub quad_error: f64,
}

impl SpreadPeakySummary {
    pub fn of(records: &[DirectionRecord]) -> Self {
        records.iter().fold(
            SpreadPeakySummary {
                spread: 0.0,
                peaky: 0.0,
                m: 0,
                quad_error: 0.0,
            },
            |acc, r| SpreadPeakySummary {
                spread: acc.spread.max(r.spread),
                peaky: acc.peaky.max(r.peaky),
                m: acc.m.max(r.count),
                quad_error: acc.quad_error.max(r.quad_error),
            },
        )
    }
}

/// Spread/peaky decomposition along every direction, against the population
/// quadratic form `vᵀΣv`.
pub fn spread_peaky_eval(
    x: &DMatrix<f64>,
    params: &TruncationParams,
    dirs: &DirectionSet,
    sigma: &SymMatrix,
) -> Result<Vec<DirectionRecord>> {
    if sigma.dim() != dirs.dim() {
        return Err(Error::DimensionMismatch {
            expected: dirs.dim(),
            got: sigma.dim(),
        });
    }
    let n = x.nrows();
    if n == 0 {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    let proj = dirs.projections(x)?;
    let lambda = params.lambda;
    let sv = sigma.as_dmatrix() * dirs.matrix();
    Ok(proj
        .column_iter()
        .zip(dirs.matrix().column_iter())
        .zip(sv.column_iter())
        .map(|((p, v), s)| {
            let target = v.dot(&s);
            let (mut psi, mut peaky, mut count, mut quad) = (0.0, 0.0, 0, 0.0);
            for &t in p.iter() {
                let q = t * t;
                psi += psi_trunc(lambda * q);
                quad += q;
                if lambda * q > 1.0 {
                    peaky += q;
                    count += 1;
                }
            }
            let nf = n as f64;
            let psi_mean = psi / (lambda * nf);
            DirectionRecord {
                spread: (psi_mean - target).abs(),
                peaky: peaky / nf,
                count,
                psi_mean,
                quad_error: (quad / nf - target).abs(),
            }
        })
        .collect())
}

/// Source of a hypercontractivity constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "source", content = "value", rename_all = "kebab-case")]
pub enum Kappa {
    Analytic(f64),
    /// Empirical maximum over a direction set; a lower bound of the true value.
    Estimated(f64),
}

impl Kappa {
    pub fn value(&self) -> f64 {
        match *self {
            Kappa::Analytic(v) | Kappa::Estimated(v) => v,
        }
    }

    pub fn is_estimate(&self) -> bool {
        matches!(self, Kappa::Estimated(_))
    }
}

/// `max_v (mean |⟨X_j,v⟩|^p)^{1/p} / (mean ⟨X_j,v⟩²)^{1/2}` over `dirs`.
pub fn estimate_kappa(x: &DMatrix<f64>, dirs: &DirectionSet, p: f64) -> Result<f64> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::invalid("p", format!("must be finite and >= 2, got {p}")));
    }
    let proj = dirs.projections(x)?;
    let n = x.nrows() as f64;
    let best = proj
        .column_iter()
        .filter_map(|c| {
            let m2 = c.iter().map(|t| t * t).sum::<f64>() / n;
            if m2 == 0.0 {
                return None;
            }
            let mp = c.iter().map(|t| t.abs().powf(p)).sum::<f64>() / n;
            Some(mp.powf(1.0 / p) / m2.sqrt())
        })
        .fold(f64::NEG_INFINITY, f64::max);
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Zero("projected samples"))
    }
}

/// Closed form when the law admits one, otherwise a Monte Carlo estimate
/// from `n` draws over the eigenvectors of `Σ` plus `m` uniform directions.
pub fn model_kappa(model: &VectorModel, p: f64, n: usize, m: usize, seed: SeedSpec) -> Result<Kappa> {
    if let Some(k) = model.kappa_analytic(p) {
        return Ok(Kappa::Analytic(k));
    }
    let x = model.sample(n, seed.derive(0x4B41));
    let sigma = model.covariance().matrix();
    let dirs = DirectionSet::standard(sigma, sigma, m, seed.derive(0xD1))?;
    Ok(Kappa::Estimated(estimate_kappa(&x, &dirs, p)?))
}
