use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Rng, ScalarLaw, SeedSpec, VectorModel, VectorModelSpec};
use crate::error::{Error, Result};
use crate::matcore::SymMatrix;

/// Fixed symmetric matrices `A_1..A_n` of a common dimension with their
/// operator norms.
#[derive(Clone, Debug)]
pub struct FixedFamily {
    mats: Vec<SymMatrix>,
    norms: Vec<f64>,
}

impl FixedFamily {
    pub fn new(mats: Vec<SymMatrix>) -> Result<Self> {
        let first = mats.first().ok_or_else(|| Error::invalid("matrices", "need at least one matrix"))?;
        let d = first.dim();
        if let Some(bad) = mats.iter().find(|m| m.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.dim(),
            });
        }
        let norms = mats.iter().map(SymMatrix::op_norm).collect();
        Ok(FixedFamily { mats, norms })
    }

    pub fn matrices(&self) -> &[SymMatrix] {
        &self.mats
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// `Σ A_k²`.
    pub fn sum_of_squares(&self) -> SymMatrix {
        let mut acc = SymMatrix::zeros(self.mats[0].dim());
        for a in &self.mats {
            acc.add_scaled(1.0, &a.square());
        }
        acc
    }

    fn combine(&self, coeffs: &[f64]) -> SymMatrix {
        let mut acc = SymMatrix::zeros(self.mats[0].dim());
        for (a, &c) in self.mats.iter().zip(coeffs) {
            if c != 0.0 {
                acc.add_scaled(c, a);
            }
        }
        acc
    }
}

/// A law for the independent summands `W_1..W_n`.
#[derive(Clone, Debug)]
pub enum Ensemble {
    /// `W_k = ε_k A_k` with Rademacher `ε_k`.
    SignFixed(FixedFamily),
    /// `W_k = ξ_k A_k` with i.i.d. standardized `ξ_k`.
    ScalarHeavy(FixedFamily, ScalarLaw),
    /// `W_k = X_k X_kᵀ − Σ`.
    CenteredRankOne(VectorModel, usize),
    /// `W_k = X_k X_kᵀ`.
    PsdRankOne(VectorModel, usize),
}

/// `Σ 𝔼 W_k²` and its operator norm `σ²`.
#[derive(Clone, Debug)]
pub struct VarianceProxy {
    pub matrix: SymMatrix,
    pub sigma2: f64,
}

impl Ensemble {
    pub fn sign_fixed(mats: Vec<SymMatrix>) -> Result<Self> {
        Ok(Ensemble::SignFixed(FixedFamily::new(mats)?))
    }

    pub fn scalar_heavy(mats: Vec<SymMatrix>, law: ScalarLaw) -> Result<Self> {
        law.validate()?;
        Ok(Ensemble::ScalarHeavy(FixedFamily::new(mats)?, law))
    }

    pub fn centered_rank_one(model: VectorModel, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "must be positive"));
        }
        Ok(Ensemble::CenteredRankOne(model, n))
    }

    pub fn psd_rank_one(model: VectorModel, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "must be positive"));
        }
        Ok(Ensemble::PsdRankOne(model, n))
    }

    pub fn n(&self) -> usize {
        match self {
            Ensemble::SignFixed(f) | Ensemble::ScalarHeavy(f, _) => f.mats.len(),
            Ensemble::CenteredRankOne(_, n) | Ensemble::PsdRankOne(_, n) => *n,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Ensemble::SignFixed(f) | Ensemble::ScalarHeavy(f, _) => f.mats[0].dim(),
            Ensemble::CenteredRankOne(m, _) | Ensemble::PsdRankOne(m, _) => m.dim(),
        }
    }

    /// Whether every summand is symmetric in law (`W_k` and `−W_k` equal in
    /// distribution).
    pub fn is_symmetric(&self) -> bool {
        matches!(self, Ensemble::SignFixed(_) | Ensemble::ScalarHeavy(..))
    }

    pub fn is_centered(&self) -> bool {
        !matches!(self, Ensemble::PsdRankOne(..))
    }

    /// `Σ 𝔼 W_k`: zero except for the PSD ensemble, where it is `nΣ`.
    pub fn mean(&self) -> SymMatrix {
        match self {
            Ensemble::PsdRankOne(m, n) => m.covariance().matrix().scale(*n as f64),
            _ => SymMatrix::zeros(self.dim()),
        }
    }

    /// `max_k ‖A_k‖`, which is `M` exactly for sign-fixed families.
    pub fn fixed_max_norm(&self) -> Option<f64> {
        match self {
            Ensemble::SignFixed(f) | Ensemble::ScalarHeavy(f, _) => Some(f.norms.iter().cloned().fold(0.0, f64::max)),
            _ => None,
        }
    }

    /// Population `Σ 𝔼 W_k²`; errors when a needed fourth moment is infinite.
    pub fn variance_proxy(&self) -> Result<VarianceProxy> {
        let matrix = match self {
            Ensemble::SignFixed(f) | Ensemble::ScalarHeavy(f, _) => f.sum_of_squares(),
            Ensemble::CenteredRankOne(m, n) => m.centered_square_mean()?.scale(*n as f64),
            Ensemble::PsdRankOne(m, n) => {
                let sigma = m.covariance().matrix();
                (&m.centered_square_mean()? + &sigma.square()).scale(*n as f64)
            }
        };
        let sigma2 = matrix.op_norm();
        Ok(VarianceProxy { matrix, sigma2 })
    }

    /// One draw of all `n` summands.
    pub fn realize(&self, seed: SeedSpec) -> Realization<'_> {
        let mut rng = seed.rng();
        self.realize_with(&mut rng)
    }

    pub(crate) fn realize_with(&self, rng: &mut Rng) -> Realization<'_> {
        let draw = match self {
            Ensemble::SignFixed(f) => Draw::Coefficients(
                (0..f.mats.len())
                    .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
                    .collect(),
            ),
            Ensemble::ScalarHeavy(f, law) => Draw::Coefficients((0..f.mats.len()).map(|_| law.sample(rng)).collect()),
            Ensemble::CenteredRankOne(m, n) | Ensemble::PsdRankOne(m, n) => Draw::Vectors(m.sample_with(*n, rng)),
        };
        Realization { ensemble: self, draw }
    }
}

#[derive(Clone, Debug)]
enum Draw {
    Coefficients(Vec<f64>),
    Vectors(DMatrix<f64>),
}

/// One sampled sequence `W_1..W_n`, stored compactly (coefficients or the
/// sampled vectors) and expanded on demand.
#[derive(Clone, Debug)]
pub struct Realization<'a> {
    ensemble: &'a Ensemble,
    draw: Draw,
}

impl Realization<'_> {
    pub fn n(&self) -> usize {
        self.ensemble.n()
    }

    /// `c_k` with `W_k = c_k A_k`, for fixed-family ensembles.
    pub fn coefficients(&self) -> Option<&[f64]> {
        match &self.draw {
            Draw::Coefficients(c) => Some(c),
            Draw::Vectors(_) => None,
        }
    }

    /// The sampled vectors as rows, for rank-one ensembles.
    pub fn vectors(&self) -> Option<&DMatrix<f64>> {
        match &self.draw {
            Draw::Vectors(x) => Some(x),
            Draw::Coefficients(_) => None,
        }
    }

    /// `‖W_k‖` for every `k`.
    pub fn norms(&self) -> Vec<f64> {
        match (&self.draw, self.ensemble) {
            (Draw::Coefficients(c), Ensemble::SignFixed(f) | Ensemble::ScalarHeavy(f, _)) => {
                c.iter().zip(&f.norms).map(|(c, a)| c.abs() * a).collect()
            }
            (Draw::Vectors(x), Ensemble::PsdRankOne(..)) => x.row_iter().map(|r| r.norm_squared()).collect(),
            (Draw::Vectors(x), Ensemble::CenteredRankOne(m, _)) => {
                let spec = m.covariance().spectrum();
                let z = x * spec.eigenvectors();
                let sigma = m.covariance().matrix();
                z.row_iter()
                    .zip(x.row_iter())
                    .map(|(zr, xr)| {
                        centered_rank_one_norm(spec.eigenvalues(), zr.iter().copied(), || {
                            let v = xr.transpose();
                            (&SymMatrix::outer(&v) - sigma).op_norm()
                        })
                    })
                    .collect()
            }
            _ => unreachable!("draw kind always matches the ensemble"),
        }
    }

    /// `M = max_k ‖W_k‖`.
    pub fn max_norm(&self) -> f64 {
        self.norms().into_iter().fold(0.0, f64::max)
    }

    /// `Σ_k W_k`.
    pub fn sum(&self) -> SymMatrix {
        self.weighted_sum(&vec![1.0; self.n()])
    }

    /// `Σ_k w_k W_k`.
    pub fn weighted_sum(&self, w: &[f64]) -> SymMatrix {
        assert_eq!(w.len(), self.n(), "one weight per summand");
        match (&self.draw, self.ensemble) {
            (Draw::Coefficients(c), Ensemble::SignFixed(f) | Ensemble::ScalarHeavy(f, _)) => {
                let cw: Vec<f64> = c.iter().zip(w).map(|(a, b)| a * b).collect();
                f.combine(&cw)
            }
            (Draw::Vectors(x), Ensemble::PsdRankOne(..) | Ensemble::CenteredRankOne(..)) => {
                let mut xw = x.clone();
                for (mut row, &wk) in xw.row_iter_mut().zip(w) {
                    row *= wk;
                }
                let mut s = SymMatrix::symmetrize_upper(xw.transpose() * x);
                if let Ensemble::CenteredRankOne(m, _) = self.ensemble {
                    s.add_scaled(-w.iter().sum::<f64>(), m.covariance().matrix());
                }
                s
            }
            _ => unreachable!("draw kind always matches the ensemble"),
        }
    }

    /// `Σ_k w_k (W_k − 𝔼W_k)`.
    pub fn centered_weighted_sum(&self, w: &[f64]) -> SymMatrix {
        let mut s = self.weighted_sum(w);
        if let (Draw::Vectors(_), Ensemble::PsdRankOne(m, _)) = (&self.draw, self.ensemble) {
            s.add_scaled(-w.iter().sum::<f64>(), m.covariance().matrix());
        }
        s
    }

    pub fn summand(&self, k: usize) -> SymMatrix {
        match (&self.draw, self.ensemble) {
            (Draw::Coefficients(c), Ensemble::SignFixed(f) | Ensemble::ScalarHeavy(f, _)) => f.mats[k].scale(c[k]),
            (Draw::Vectors(x), _) => {
                let v: DVector<f64> = x.row(k).transpose();
                let outer = SymMatrix::outer(&v);
                match self.ensemble {
                    Ensemble::CenteredRankOne(m, _) => &outer - m.covariance().matrix(),
                    _ => outer,
                }
            }
            _ => unreachable!("draw kind always matches the ensemble"),
        }
    }

    pub fn summands(&self) -> Vec<SymMatrix> {
        (0..self.n()).map(|k| self.summand(k)).collect()
    }
}

/// `‖xxᵀ − Σ‖` from the eigenvalues `λ` of `Σ` (descending) and `z = Uᵀx`.
///
/// The top eigenvalue of `zzᵀ − diag(λ)` solves the secular equation
/// `Σ z_i²/(μ + λ_i) = 1` above `−λ_d`, found by bisection. The bottom one lies
/// in `[−λ_1, −λ_2]`, so once the top eigenvalue reaches `λ_1` it is the norm;
/// otherwise `dense` is called.
fn centered_rank_one_norm(lambda: &[f64], z: impl Iterator<Item = f64>, dense: impl FnOnce() -> f64) -> f64 {
    let z2: Vec<f64> = z.map(|v| v * v).collect();
    let total: f64 = z2.iter().sum();
    let lo0 = -lambda[lambda.len() - 1];
    let secular = |mu: f64| -> f64 {
        let mut s = 0.0;
        for (&zi, &li) in z2.iter().zip(lambda) {
            let den = mu + li;
            if den <= 0.0 {
                if zi > 0.0 {
                    return f64::INFINITY;
                }
                continue;
            }
            s += zi / den;
        }
        s - 1.0
    };
    let (mut lo, mut hi) = (lo0, lo0 + total + 1e-300);
    if secular(lo) <= 0.0 {
        hi = lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if secular(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let top = 0.5 * (lo + hi);
    if top >= lambda[0] {
        top
    } else {
        dense()
    }
}

/// `W̃_k = ε_k W_k 1{‖W_k‖ ≤ U}` and `Δ_k = ε_k W_k 1{‖W_k‖ > U}`.
pub fn truncate_split(ws: &[SymMatrix], u: f64, signs: &[f64]) -> Result<(Vec<SymMatrix>, Vec<SymMatrix>)> {
    if !(u >= 0.0) {
        return Err(Error::invalid("u", format!("truncation level must be >= 0, got {u}")));
    }
    if signs.len() != ws.len() {
        return Err(Error::DimensionMismatch {
            expected: ws.len(),
            got: signs.len(),
        });
    }
    let mut tilde = Vec::with_capacity(ws.len());
    let mut delta = Vec::with_capacity(ws.len());
    for (w, &e) in ws.iter().zip(signs) {
        let sw = w.scale(e);
        let zero = SymMatrix::zeros(w.dim());
        if w.op_norm() <= u {
            tilde.push(sw);
            delta.push(zero);
        } else {
            tilde.push(zero);
            delta.push(sw);
        }
    }
    Ok((tilde, delta))
}

/// `(W_1, …, W_n)` for one trial.
pub fn build_ensemble(e: &Ensemble, trial: SeedSpec) -> Vec<SymMatrix> {
    e.realize(trial).summands()
}

fn default_norm() -> f64 {
    1.0
}

/// Fixed matrices for sign-fixed and scalar-heavy ensembles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MatrixFamilySpec {
    /// `n` GOE draws, each rescaled to operator norm `norm`.
    RandomSymmetric {
        n: usize,
        dim: usize,
        #[serde(default = "default_norm")]
        norm: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Matrices given row by row.
    Explicit { matrices: Vec<Vec<Vec<f64>>> },
}

impl MatrixFamilySpec {
    pub fn build(&self) -> Result<Vec<SymMatrix>> {
        match self {
            &MatrixFamilySpec::RandomSymmetric { n, dim, norm, seed } => {
                if n == 0 || dim == 0 {
                    return Err(Error::invalid("n", "family size and dimension must be positive"));
                }
                if !(norm > 0.0 && norm.is_finite()) {
                    return Err(Error::invalid("norm", format!("must be finite and > 0, got {norm}")));
                }
                let mut rng = SeedSpec::new(seed, 0).derive(0xFA_11).rng();
                Ok((0..n)
                    .map(|_| {
                        let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                        let a = SymMatrix::symmetrize_upper(&g + g.transpose());
                        let s = a.op_norm();
                        a.scale(norm / s)
                    })
                    .collect())
            }
            MatrixFamilySpec::Explicit { matrices } => matrices
                .iter()
                .map(|rows| {
                    let d = rows.len();
                    if let Some(bad) = rows.iter().find(|r| r.len() != d) {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: bad.len(),
                        });
                    }
                    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                    SymMatrix::from_row_slice(d, &flat)
                })
                .collect(),
        }
    }
}

/// Declarative form of an [`Ensemble`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnsembleSpec {
    SignFixed { matrices: MatrixFamilySpec },
    ScalarHeavy { matrices: MatrixFamilySpec, law: ScalarLaw },
    CenteredRankOne { model: VectorModelSpec, n: usize },
    PsdRankOne { model: VectorModelSpec, n: usize },
}

impl EnsembleSpec {
    pub fn build(&self) -> Result<Ensemble> {
        match self {
            EnsembleSpec::SignFixed { matrices } => Ensemble::sign_fixed(matrices.build()?),
            EnsembleSpec::ScalarHeavy { matrices, law } => Ensemble::scalar_heavy(matrices.build()?, *law),
            EnsembleSpec::CenteredRankOne { model, n } => Ensemble::centered_rank_one(model.build()?, *n),
            EnsembleSpec::PsdRankOne { model, n } => Ensemble::psd_rank_one(model.build()?, *n),
        }
    }
}
