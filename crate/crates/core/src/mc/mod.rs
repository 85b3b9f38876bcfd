//! Monte Carlo harness: per-trial simulation of matrix sums, tail and moment
//! estimates, constant fitting, scaling fits and inequality audits.
//!
//! Trial `i` draws from stream `i` of the master seed, trials run in parallel
//! and results are collected in trial order, so every estimate is identical
//! for any thread count.

mod audit;
mod estimate;
mod fit;

pub use audit::{hoffmann_jorgensen_audit, inequality_audit, AuditOptions, AuditReport, Check, CheckPoint};
pub use estimate::{
    estimate_moment, estimate_psi1, estimate_qp, estimate_tail, moment_from_samples, qp_from_samples, qp_required_trials,
    tail_from_samples, MomentEstimate, TailCurve,
};
pub use fit::{fit_constant, log_log_slope, scaling_sweep, FitResult, SlopeFit};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::DirectionSet;
use crate::samplers::{Ensemble, SeedSpec};

/// Smallest trial count accepted by the estimators.
pub const MIN_TRIALS: usize = 100;

const SIGN_TAG: u64 = 0x5167_4E53;

/// Runs `f` on streams `0..trials` of `seed` in parallel and returns the
/// results in trial order.
pub fn run_trials<T, F>(trials: usize, seed: SeedSpec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(SeedSpec) -> T + Sync + Send,
{
    (0..trials as u64).into_par_iter().map(|i| f(seed.stream(i))).collect()
}

/// Pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    let var = pairwise_sum(&dev) / (xs.len() - 1) as f64;
    (m, (var / xs.len() as f64).sqrt())
}

/// Order-statistic quantile: the `⌈αN⌉`-th smallest value (the smallest for
/// `α = 0`). `sorted` must be ascending and nonempty.
pub fn quantile_sorted(sorted: &[f64], alpha: f64) -> f64 {
    let n = sorted.len();
    let k = ((alpha * n as f64).ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Fraction of `sorted` strictly above `t`.
pub fn frac_above(sorted: &[f64], t: f64) -> f64 {
    let at_most = sorted.partition_point(|&x| x <= t);
    (sorted.len() - at_most) as f64 / sorted.len() as f64
}

/// `√(p(1−p)/n)`.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

pub(crate) fn check_trials(trials: usize) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::InsufficientTrials {
            needed: MIN_TRIALS,
            got: trials,
        });
    }
    Ok(())
}

/// Statistics of one simulated sum `S = Σ W_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSample {
    /// `‖S‖`.
    pub norm: f64,
    /// `‖S − 𝔼S‖`.
    pub centered_norm: f64,
    /// `M = max_k ‖W_k‖`.
    pub max_norm: f64,
    /// `‖Σ ε_k (W_k − 𝔼W_k)‖` with fresh Rademacher signs.
    pub sym_norm: Option<f64>,
    /// `‖Σ ε_k W_k‖`, equal to `sym_norm` for centered ensembles.
    pub rademacher_norm: Option<f64>,
    /// `‖Σ W_k 1{‖W_k‖ > U}‖`.
    pub delta_norm: Option<f64>,
    /// `‖Σ ε_k W_k 1{‖W_k‖ > U}‖`, same signs as `sym_norm`.
    pub sym_delta_norm: Option<f64>,
    /// `⟨(S − 𝔼S)v, v⟩` for each direction `v`.
    pub quad: Vec<f64>,
}

/// What [`simulate`] records besides `‖S‖` and `M`.
#[derive(Clone, Debug, Default)]
pub struct SimOptions {
    pub symmetrize: bool,
    pub truncation: Option<f64>,
    pub directions: Option<DirectionSet>,
}

/// Simulates `trials` independent sums.
pub fn simulate(e: &Ensemble, trials: usize, seed: SeedSpec, opts: &SimOptions) -> Result<Vec<TrialSample>> {
    check_trials(trials)?;
    if let Some(u) = opts.truncation {
        if !(u >= 0.0) {
            return Err(Error::invalid("u", format!("truncation level must be >= 0, got {u}")));
        }
    }
    if let Some(d) = &opts.directions {
        if d.dim() != e.dim() {
            return Err(Error::DimensionMismatch {
                expected: e.dim(),
                got: d.dim(),
            });
        }
    }
    let mean = e.mean();
    let centered = e.is_centered();
    let sign_seed = seed.derive(SIGN_TAG);
    Ok((0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let r = e.realize(seed.stream(i));
            let norms = r.norms();
            let s = r.sum();
            let sc = if centered { s.clone() } else { &s - &mean };
            let n = norms.len();
            let signs: Option<Vec<f64>> = (opts.symmetrize).then(|| {
                use rand::Rng as _;
                let mut rng = sign_seed.stream(i).rng();
                (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect()
            });
            let sym_norm = signs.as_ref().map(|eps| r.centered_weighted_sum(eps).op_norm());
            let rademacher_norm = match (&signs, centered) {
                (Some(eps), false) => Some(r.weighted_sum(eps).op_norm()),
                _ => sym_norm,
            };
            let (delta_norm, sym_delta_norm) = match opts.truncation {
                Some(u) => {
                    let ind: Vec<f64> = norms.iter().map(|&x| if x > u { 1.0 } else { 0.0 }).collect();
                    let plain = if ind.iter().any(|&x| x > 0.0) { r.weighted_sum(&ind).op_norm() } else { 0.0 };
                    let signed = signs.as_ref().map(|eps| {
                        let w: Vec<f64> = ind.iter().zip(eps).map(|(a, b)| a * b).collect();
                        if ind.iter().any(|&x| x > 0.0) {
                            r.weighted_sum(&w).op_norm()
                        } else {
                            0.0
                        }
                    });
                    (Some(plain), signed)
                }
                None => (None, None),
            };
            let quad = match &opts.directions {
                Some(d) => {
                    let sv = sc.as_dmatrix() * d.matrix();
                    d.matrix().column_iter().zip(sv.column_iter()).map(|(v, w)| v.dot(&w)).collect()
                }
                None => Vec::new(),
            };
            let norm = s.op_norm();
            TrialSample {
                norm,
                centered_norm: if centered { norm } else { sc.op_norm() },
                max_norm: norms.into_iter().fold(0.0, f64::max),
                sym_norm,
                rademacher_norm,
                delta_norm,
                sym_delta_norm,
                quad,
            }
        })
        .collect())
}
