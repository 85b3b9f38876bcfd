use serde::Serialize;

use super::{binomial_se, frac_above, mean_se, quantile_sorted, simulate, sorted, SimOptions, TrialSample};
use crate::error::{Error, Result};
use crate::estimators::DirectionSet;
use crate::samplers::{Ensemble, SeedSpec};

/// Settings shared by the audits.
#[derive(Clone, Debug, Serialize)]
pub struct AuditOptions {
    /// Quantile levels of `‖S‖` and `M` that form the `(t, s)` grids.
    pub levels: Vec<f64>,
    /// Multiplier on the combined standard error.
    pub slack: f64,
    /// Uniform directions added to the eigenvectors of `V²` for the median check.
    pub directions: usize,
    /// Moment orders for the symmetrization check.
    pub moments: Vec<f64>,
    /// Estimate the left and right sides of each inequality from disjoint
    /// halves of the trials.
    pub split_trials: bool,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            levels: vec![0.5, 0.75, 0.9, 0.95, 0.99],
            slack: 3.0,
            directions: 64,
            moments: vec![1.0, 2.0],
            split_trials: false,
        }
    }
}

/// One grid point of an inequality `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckPoint {
    pub t: f64,
    pub s: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// Allowed excess of `lhs` over `rhs`.
    pub tolerance: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub points: Vec<CheckPoint>,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, points: Vec<CheckPoint>) -> Check {
        Check {
            name: name.to_string(),
            passed: points.iter().all(|p| p.ok),
            points,
        }
    }
}

fn point(t: f64, s: Option<f64>, lhs: f64, rhs: f64, tolerance: f64) -> CheckPoint {
    CheckPoint {
        t,
        s,
        lhs,
        rhs,
        tolerance,
        ok: lhs <= rhs + tolerance,
    }
}

/// Binomial standard error with the estimate floored at `1/n`, so that an
/// empty tail still carries resolution-level uncertainty.
fn tail_se(p: f64, n: usize) -> f64 {
    binomial_se(p.max(1.0 / n as f64), n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    /// `"sum"` when the summands are symmetric and the audits use `S`
    /// directly, `"rademacher-sum"` when they use `Σ ε_k W_k`.
    pub target: String,
    pub hoffmann_jorgensen: Check,
    pub levy: Check,
    pub symmetrization: Check,
    /// `None` when `Σ 𝔼W_k²` is not finite.
    pub median: Option<Check>,
    pub trials: usize,
    /// Both sides of each inequality come from the same trials unless split.
    pub split_trials: bool,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.hoffmann_jorgensen.passed
            && self.levy.passed
            && self.symmetrization.passed
            && self.median.as_ref().is_none_or(|c| c.passed)
    }

    pub fn checks(&self) -> Vec<&Check> {
        let mut v = vec![&self.hoffmann_jorgensen, &self.levy, &self.symmetrization];
        v.extend(self.median.as_ref());
        v
    }
}

fn halves<T: Clone>(xs: &[T], split: bool) -> (Vec<T>, Vec<T>) {
    if split {
        let mid = xs.len() / 2;
        (xs[..mid].to_vec(), xs[mid..].to_vec())
    } else {
        (xs.to_vec(), xs.to_vec())
    }
}

/// `P(Z > 2t + s) ≤ 4 P(Z > t)² + P(M > s)` on quantile grids of `Z` and `M`.
fn hj_check(z: &[f64], m: &[f64], opts: &AuditOptions) -> Check {
    let (zl, zr) = halves(z, opts.split_trials);
    let (_, mr) = halves(m, opts.split_trials);
    let (zl, zr, mr) = (sorted(&zl), sorted(&zr), sorted(&mr));
    let (za, ma) = (sorted(z), sorted(m));
    let mut pts = Vec::new();
    for &a in &opts.levels {
        let t = quantile_sorted(&za, a);
        for &b in &opts.levels {
            let s = quantile_sorted(&ma, b);
            let pl = frac_above(&zl, 2.0 * t + s);
            let pt = frac_above(&zr, t);
            let pm = frac_above(&mr, s);
            let se_l = tail_se(pl, zl.len());
            let se_r = ((8.0 * pt * tail_se(pt, zr.len())).powi(2) + tail_se(pm, mr.len()).powi(2)).sqrt();
            let tol = opts.slack * (se_l * se_l + se_r * se_r).sqrt();
            pts.push(point(t, Some(s), pl, 4.0 * pt * pt + pm, tol));
        }
    }
    Check::new("hoffmann-jorgensen", pts)
}

/// `½ P(M > t) ≤ P(Z > t)` on a quantile grid of `M`.
fn levy_check(z: &[f64], m: &[f64], opts: &AuditOptions) -> Check {
    let (_, zr) = halves(z, opts.split_trials);
    let (ml, _) = halves(m, opts.split_trials);
    let (zr, ml, ma) = (sorted(&zr), sorted(&ml), sorted(m));
    let pts = opts
        .levels
        .iter()
        .map(|&a| {
            let t = quantile_sorted(&ma, a);
            let pm = frac_above(&ml, t);
            let pz = frac_above(&zr, t);
            let tol = opts.slack * ((0.5 * tail_se(pm, ml.len())).powi(2) + tail_se(pz, zr.len()).powi(2)).sqrt();
            point(t, None, 0.5 * pm, pz, tol)
        })
        .collect();
    Check::new("levy", pts)
}

/// `𝔼‖S − 𝔼S‖^p ≤ 2^p 𝔼‖Σ ε_k (W_k − 𝔼W_k)‖^p`; `t` holds `p`.
fn symmetrization_check(samples: &[TrialSample], opts: &AuditOptions) -> Check {
    let lhs: Vec<f64> = samples.iter().map(|s| s.centered_norm).collect();
    let rhs: Vec<f64> = samples.iter().map(|s| s.sym_norm.expect("symmetrized simulation")).collect();
    let (lhs, _) = halves(&lhs, opts.split_trials);
    let (_, rhs) = halves(&rhs, opts.split_trials);
    let pts = opts
        .moments
        .iter()
        .map(|&p| {
            let (ml, sl) = mean_se(&lhs.iter().map(|x| x.powf(p)).collect::<Vec<_>>());
            let (mr, sr) = mean_se(&rhs.iter().map(|x| x.powf(p)).collect::<Vec<_>>());
            let c = 2f64.powf(p);
            let tol = opts.slack * (sl * sl + c * c * sr * sr).sqrt();
            point(p, None, ml, c * mr, tol)
        })
        .collect();
    Check::new("symmetrization", pts)
}

/// Median of `⟨(S − 𝔼S)v, v⟩` at most `σ√2` along every direction. A
/// direction passes when the fraction of trials at or below `σ√2` is at least
/// `1/2 − slack · ½/√N`; `t` holds the direction index, `lhs` the median.
fn median_check(samples: &[TrialSample], sigma: f64, opts: &AuditOptions) -> Check {
    let n = samples.len();
    let level = sigma * std::f64::consts::SQRT_2;
    let dirs = samples.first().map_or(0, |s| s.quad.len());
    let pts = (0..dirs)
        .map(|j| {
            let q = sorted(&samples.iter().map(|s| s.quad[j]).collect::<Vec<_>>());
            let below = 1.0 - frac_above(&q, level);
            let median = quantile_sorted(&q, 0.5);
            let ok = below >= 0.5 - opts.slack * 0.5 / (n as f64).sqrt();
            CheckPoint {
                t: j as f64,
                s: None,
                lhs: median,
                rhs: level,
                tolerance: (median - level).max(0.0) * f64::from(ok),
                ok,
            }
        })
        .collect();
    Check::new("median", pts)
}

/// Runs all audits. Symmetric ensembles are audited through `S` itself,
/// others through the Rademacher sum `Σ ε_k W_k`, which has symmetric
/// summands.
pub fn inequality_audit(e: &Ensemble, trials: usize, seed: SeedSpec, opts: &AuditOptions) -> Result<AuditReport> {
    let proxy = e.variance_proxy().ok();
    let directions = match &proxy {
        Some(v) => Some(DirectionSet::standard(&v.matrix, &v.matrix, opts.directions, seed.derive(0xA0D1))?),
        None => None,
    };
    let sim = SimOptions {
        symmetrize: true,
        truncation: None,
        directions,
    };
    let samples = simulate(e, trials, seed, &sim)?;
    let symmetric = e.is_symmetric();
    let z: Vec<f64> = samples
        .iter()
        .map(|s| if symmetric { s.norm } else { s.rademacher_norm.expect("symmetrized simulation") })
        .collect();
    let m: Vec<f64> = samples.iter().map(|s| s.max_norm).collect();
    Ok(AuditReport {
        target: if symmetric { "sum" } else { "rademacher-sum" }.to_string(),
        hoffmann_jorgensen: hj_check(&z, &m, opts),
        levy: levy_check(&z, &m, opts),
        symmetrization: symmetrization_check(&samples, opts),
        median: proxy.map(|v| median_check(&samples, v.sigma2.sqrt(), opts)),
        trials,
        split_trials: opts.split_trials,
    })
}

/// Hoffmann-Jørgensen check on `S` itself; the summands must be symmetric.
pub fn hoffmann_jorgensen_audit(e: &Ensemble, trials: usize, seed: SeedSpec, opts: &AuditOptions) -> Result<Check> {
    if !e.is_symmetric() {
        return Err(Error::NotSymmetricEnsemble);
    }
    let samples = simulate(e, trials, seed, &SimOptions::default())?;
    let z: Vec<f64> = samples.iter().map(|s| s.norm).collect();
    let m: Vec<f64> = samples.iter().map(|s| s.max_norm).collect();
    Ok(hj_check(&z, &m, opts))
}
