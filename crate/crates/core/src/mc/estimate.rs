use serde::Serialize;

use super::{binomial_se, check_trials, frac_above, mean, mean_se, quantile_sorted, simulate, sorted, SimOptions};
use crate::bounds::TailBound;
use crate::error::{Error, Result};
use crate::samplers::{Ensemble, SeedSpec};

/// Empirical tail `P(Z > t)` on a grid with binomial standard errors and an
/// optional theoretical bound per point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailCurve {
    pub t_grid: Vec<f64>,
    pub empirical: Vec<f64>,
    pub std_err: Vec<f64>,
    /// `None` where the bound is not defined (outside its valid range).
    pub bound: Vec<Option<TailBound>>,
    pub trials: usize,
}

impl TailCurve {
    /// Attaches `f(t)`; points where `f` fails get no bound.
    pub fn with_bound(mut self, f: impl Fn(f64) -> Result<TailBound>) -> Self {
        self.bound = self.t_grid.iter().map(|&t| f(t).ok()).collect();
        self
    }

    /// Whether `empirical ≤ k · raw + slack · SE` wherever a bound exists.
    pub fn dominated(&self, k: f64, slack: f64) -> bool {
        self.violations(k, slack).is_empty()
    }

    /// Grid indices where `empirical > k · raw + slack · SE`.
    pub fn violations(&self, k: f64, slack: f64) -> Vec<usize> {
        (0..self.t_grid.len())
            .filter(|&i| match self.bound[i] {
                Some(b) => self.empirical[i] > k * b.raw + slack * self.std_err[i],
                None => false,
            })
            .collect()
    }

    /// Number of grid points with a bound.
    pub fn bounded_points(&self) -> usize {
        self.bound.iter().filter(|b| b.is_some()).count()
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::invalid("t_grid", "must be nonempty"));
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("t_grid", "must be finite and strictly ascending"));
    }
    Ok(())
}

/// Tail curve of the values in `samples`.
pub fn tail_from_samples(samples: &[f64], t_grid: &[f64]) -> Result<TailCurve> {
    check_grid(t_grid)?;
    check_trials(samples.len())?;
    let s = sorted(samples);
    let empirical: Vec<f64> = t_grid.iter().map(|&t| frac_above(&s, t)).collect();
    let std_err = empirical.iter().map(|&p| binomial_se(p, s.len())).collect();
    Ok(TailCurve {
        t_grid: t_grid.to_vec(),
        empirical,
        std_err,
        bound: vec![None; t_grid.len()],
        trials: s.len(),
    })
}

/// `P(‖Σ W_k‖ > t)` on `t_grid`.
pub fn estimate_tail(e: &Ensemble, t_grid: &[f64], trials: usize, seed: SeedSpec) -> Result<TailCurve> {
    check_grid(t_grid)?;
    let samples = simulate(e, trials, seed, &SimOptions::default())?;
    let norms: Vec<f64> = samples.iter().map(|s| s.norm).collect();
    tail_from_samples(&norms, t_grid)
}

/// `(𝔼‖S‖^p)^{1/p}` with diagnostics from the same trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub p: f64,
    pub value: f64,
    /// Delta-method standard error of `value`.
    pub std_err: f64,
    pub trials: usize,
    /// `𝔼M`.
    pub em: f64,
    /// `𝔼M^p`.
    pub emp: f64,
    /// Sample median of `‖S‖`.
    pub median: f64,
}

/// Moment estimate from per-trial `‖S‖` and `M` values.
pub fn moment_from_samples(norms: &[f64], maxes: &[f64], p: f64) -> Result<MomentEstimate> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid("p", format!("must be finite and >= 1, got {p}")));
    }
    if norms.len() != maxes.len() {
        return Err(Error::DimensionMismatch {
            expected: norms.len(),
            got: maxes.len(),
        });
    }
    check_trials(norms.len())?;
    let pow: Vec<f64> = norms.iter().map(|x| x.powf(p)).collect();
    let (m, se) = mean_se(&pow);
    let value = m.powf(1.0 / p);
    // d/dm m^{1/p} = m^{1/p − 1}/p
    let std_err = if m > 0.0 { se * value / (p * m) } else { 0.0 };
    let mp: Vec<f64> = maxes.iter().map(|x| x.powf(p)).collect();
    Ok(MomentEstimate {
        p,
        value,
        std_err,
        trials: norms.len(),
        em: mean(maxes),
        emp: mean(&mp),
        median: quantile_sorted(&sorted(norms), 0.5),
    })
}

pub fn estimate_moment(e: &Ensemble, p: f64, trials: usize, seed: SeedSpec) -> Result<MomentEstimate> {
    let samples = simulate(e, trials, seed, &SimOptions::default())?;
    let norms: Vec<f64> = samples.iter().map(|s| s.norm).collect();
    let maxes: Vec<f64> = samples.iter().map(|s| s.max_norm).collect();
    moment_from_samples(&norms, &maxes, p)
}

/// Empirical `ψ₁` norm: the `r` solving `mean exp(|Z|/r) = 2`, by bisection
/// in log-sum-exp form. Zero for all-zero data, `+∞` if any sample is infinite.
pub fn estimate_psi1(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("samples", "must be nonempty"));
    }
    let abs: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    if abs.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("samples", "contain NaN"));
    }
    let top = abs.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    if top.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let ln_n = (abs.len() as f64).ln();
    // log mean exp(|Z|/r) − log 2, decreasing in r
    let excess = |r: f64| {
        let s: f64 = abs.iter().map(|&z| ((z - top) / r).exp()).sum();
        top / r + s.ln() - ln_n - std::f64::consts::LN_2
    };
    let (mut lo, mut hi) = (0.0, top / std::f64::consts::LN_2);
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Trials needed to resolve the `1 − 3^{−p}/8` quantile: `100 · 8 · 3^p`.
pub fn qp_required_trials(p: f64) -> usize {
    (800.0 * 3f64.powf(p)).ceil() as usize
}

/// `Q_p = inf{s > 0: P(Z > s/2) ≤ 3^{−p}/8}` for samples of `Z = ‖Σ Δ_k‖`.
pub fn qp_from_samples(delta_norms: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid("p", format!("must be finite and >= 1, got {p}")));
    }
    let needed = qp_required_trials(p);
    if delta_norms.len() < needed {
        return Err(Error::InsufficientTrials {
            needed,
            got: delta_norms.len(),
        });
    }
    let alpha = 3f64.powf(-p) / 8.0;
    let s = sorted(delta_norms);
    // smallest order statistic x with #{Z > x} ≤ αN
    let n = s.len();
    let allowed = (alpha * n as f64).floor() as usize;
    Ok(2.0 * s[n - 1 - allowed.min(n - 1)])
}

/// Empirical `Q_p` for the remainders `Δ_k = ε_k W_k 1{‖W_k‖ > U}`.
pub fn estimate_qp(e: &Ensemble, u: f64, p: f64, trials: usize, seed: SeedSpec) -> Result<f64> {
    let needed = qp_required_trials(p.max(1.0));
    if trials < needed {
        return Err(Error::InsufficientTrials { needed, got: trials });
    }
    let opts = SimOptions {
        symmetrize: true,
        truncation: Some(u),
        directions: None,
    };
    let samples = simulate(e, trials, seed, &opts)?;
    let z: Vec<f64> = samples.iter().map(|s| s.sym_delta_norm.unwrap_or(0.0)).collect();
    qp_from_samples(&z, p)
}
