//! Bernoulli column subsampling `B ↦ BR`, `R = diag(δ_1, …, δ_d)`.

use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{RectMatrix, SymMatrix};
use crate::samplers::SeedSpec;

/// Largest column count accepted by [`exact_subsample_moments`].
pub const EXACT_ENUMERATION_LIMIT: usize = 15;

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("delta", format!("must lie in (0, 1), got {delta}")))
    }
}

/// A matrix with a keep probability and a seed for randomized evaluations.
#[derive(Clone, Debug)]
pub struct SubsampleInput {
    b: RectMatrix,
    delta: f64,
    seed: SeedSpec,
}

impl SubsampleInput {
    pub fn new(b: RectMatrix, delta: f64, seed: SeedSpec) -> Result<Self> {
        check_delta(delta)?;
        Ok(SubsampleInput { b, delta, seed })
    }

    pub fn matrix(&self) -> &RectMatrix {
        &self.b
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> SeedSpec {
        self.seed
    }

    /// `⌊1/δ⌋`.
    pub fn block(&self) -> usize {
        (1.0 / self.delta).floor() as usize
    }
}

/// i.i.d. Bernoulli(δ) mask of length `d`.
pub fn sample_mask(d: usize, delta: f64, seed: SeedSpec) -> Result<Vec<bool>> {
    if d == 0 {
        return Err(Error::invalid("d", "mask length must be positive"));
    }
    check_delta(delta)?;
    let mut rng = seed.rng();
    Ok((0..d).map(|_| rng.random_bool(delta)).collect())
}

/// `‖BR‖²` and `‖BR − δB‖²` for one mask.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SubsampledNorms {
    pub plain: f64,
    pub centered: f64,
}

/// `‖Σ w_k B_k B_kᵀ‖`.
fn weighted_gram_norm(b: &DMatrix<f64>, w: impl Fn(usize) -> f64) -> f64 {
    let mut bw = b.clone();
    for (k, mut c) in bw.column_iter_mut().enumerate() {
        c *= w(k);
    }
    SymMatrix::symmetrize_upper(bw * b.transpose()).op_norm()
}

/// Both norms through `‖BR‖² = ‖Σ δ_k B_k B_kᵀ‖` and
/// `‖BR − δB‖² = ‖Σ (δ_k − δ)² B_k B_kᵀ‖`.
pub fn subsampled_norms(input: &SubsampleInput, mask: &[bool]) -> Result<SubsampledNorms> {
    let b = input.b.as_dmatrix();
    if mask.len() != b.ncols() {
        return Err(Error::DimensionMismatch {
            expected: b.ncols(),
            got: mask.len(),
        });
    }
    let delta = input.delta;
    let ind = |k: usize| if mask[k] { 1.0 } else { 0.0 };
    Ok(SubsampledNorms {
        plain: weighted_gram_norm(b, ind),
        centered: weighted_gram_norm(b, |k| (ind(k) - delta).powi(2)),
    })
}

/// `𝔼‖BR‖²` and `𝔼‖BR − δB‖²` by summing over all `2^d` masks.
pub fn exact_subsample_moments(input: &SubsampleInput) -> Result<SubsampledNorms> {
    let d = input.b.cols();
    if d > EXACT_ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            size: d,
            limit: EXACT_ENUMERATION_LIMIT,
        });
    }
    let delta = input.delta;
    let terms: Vec<(f64, f64)> = (0u32..1 << d)
        .into_par_iter()
        .map(|bits| {
            let mask: Vec<bool> = (0..d).map(|k| bits >> k & 1 == 1).collect();
            let kept = bits.count_ones() as i32;
            let prob = delta.powi(kept) * (1.0 - delta).powi(d as i32 - kept);
            let n = subsampled_norms(input, &mask).expect("mask length matches");
            (prob * n.plain, prob * n.centered)
        })
        .collect();
    let (plain, centered) = terms.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    Ok(SubsampledNorms { plain, centered })
}

/// Sorted squared column norms and the average of the top `⌊1/δ⌋` of them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnOrderStats {
    /// `‖B_(k)‖₂²`, descending.
    pub sq_norms: Vec<f64>,
    /// `⌊1/δ⌋`.
    pub block: usize,
    /// `(1/⌊1/δ⌋) Σ_{k ≤ ⌊1/δ⌋} ‖B_(k)‖₂²`, missing columns counted as zero.
    pub top_average: f64,
}

pub fn column_order_stats(b: &RectMatrix, delta: f64) -> Result<ColumnOrderStats> {
    check_delta(delta)?;
    let mut sq_norms: Vec<f64> = b.as_dmatrix().column_iter().map(|c| c.norm_squared()).collect();
    sq_norms.sort_by(|x, y| y.total_cmp(x));
    let block = (1.0 / delta).floor() as usize;
    let top_average = sq_norms.iter().take(block).sum::<f64>() / block as f64;
    Ok(ColumnOrderStats {
        sq_norms,
        block,
        top_average,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsampleVariant {
    /// Bounds `𝔼‖BR‖²`.
    Plain,
    /// Bounds `𝔼‖BR − δB‖²`.
    Centered,
}

fn nonzero_norm(b: &RectMatrix) -> Result<f64> {
    let n = b.op_norm();
    if n == 0.0 {
        Err(Error::Zero("matrix B"))
    } else {
        Ok(n)
    }
}

/// `K(δ‖B‖² + log(srank B) · avg)`, times `(1 − δ)` for the centered variant.
/// The logarithm is floored at 0.
pub fn subsample_bound(input: &SubsampleInput, k: f64, variant: SubsampleVariant) -> Result<f64> {
    let norm = nonzero_norm(&input.b)?;
    let stats = column_order_stats(&input.b, input.delta)?;
    let log = input.b.stable_rank()?.ln().max(0.0);
    let base = k * (input.delta * norm * norm + log * stats.top_average);
    Ok(match variant {
        SubsampleVariant::Plain => base,
        SubsampleVariant::Centered => (1.0 - input.delta) * base,
    })
}

/// Earlier bound `K(δ‖B‖² + log(dδ) · avg)` with `d` the column count and
/// the logarithm floored at 0.
pub fn rudelson_vershynin_bound(input: &SubsampleInput, k: f64) -> Result<f64> {
    let norm = nonzero_norm(&input.b)?;
    let stats = column_order_stats(&input.b, input.delta)?;
    let log = (input.b.cols() as f64 * input.delta).ln().max(0.0);
    Ok(k * (input.delta * norm * norm + log * stats.top_average))
}

/// Earlier bound `1.72(δ‖B‖² + log(2 srank B) ‖B_(1)‖²)`.
pub fn tropp_bound(input: &SubsampleInput) -> Result<f64> {
    let norm = nonzero_norm(&input.b)?;
    let stats = column_order_stats(&input.b, input.delta)?;
    let log = (2.0 * input.b.stable_rank()?).ln();
    Ok(1.72 * (input.delta * norm * norm + log * stats.sq_norms[0]))
}

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McMean {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
}

impl McMean {
    pub(crate) fn of(xs: &[f64]) -> McMean {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        McMean {
            mean,
            std_err: (var / n).sqrt(),
            trials: xs.len(),
        }
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < 2 {
        return Err(Error::InsufficientTrials { needed: 2, got: trials });
    }
    Ok(())
}

/// Monte Carlo estimates of `𝔼‖BR‖²` and `𝔼‖BR − δB‖²`; trial `i` uses
/// stream `i` of the input seed.
pub fn mc_subsample_moments(input: &SubsampleInput, trials: usize) -> Result<(McMean, McMean)> {
    check_trials(trials)?;
    let d = input.b.cols();
    let draws: Vec<SubsampledNorms> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mask = sample_mask(d, input.delta, input.seed.stream(i)).expect("validated input");
            subsampled_norms(input, &mask).expect("mask length matches")
        })
        .collect();
    let plain: Vec<f64> = draws.iter().map(|n| n.plain).collect();
    let centered: Vec<f64> = draws.iter().map(|n| n.centered).collect();
    Ok((McMean::of(&plain), McMean::of(&centered)))
}

/// Monte Carlo `𝔼 max_k δ_k ‖B_k‖₂²` against `(2/⌊1/δ⌋) Σ_{k ≤ ⌊1/δ⌋} ‖B_(k)‖₂²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaxWeightCheck {
    pub estimate: McMean,
    pub bound: f64,
}

impl MaxWeightCheck {
    /// `estimate ≤ bound + slack · SE`.
    pub fn holds(&self, slack: f64) -> bool {
        self.estimate.mean <= self.bound + slack * self.estimate.std_err
    }
}

pub fn max_weight_check(input: &SubsampleInput, trials: usize) -> Result<MaxWeightCheck> {
    check_trials(trials)?;
    let stats = column_order_stats(&input.b, input.delta)?;
    let by_column: Vec<f64> = input.b.as_dmatrix().column_iter().map(|c| c.norm_squared()).collect();
    let d = by_column.len();
    let seed = input.seed.derive(0x5AB);
    let draws: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mask = sample_mask(d, input.delta, seed.stream(i)).expect("validated input");
            mask.iter()
                .zip(&by_column)
                .filter(|(m, _)| **m)
                .map(|(_, v)| *v)
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(MaxWeightCheck {
        estimate: McMean::of(&draws),
        bound: 2.0 * stats.top_average,
    })
}
