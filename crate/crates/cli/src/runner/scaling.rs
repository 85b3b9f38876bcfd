use matconc_core::estimators::{aligned_eigvec, default_tau, sample_covariance, truncated_covariance};
use matconc_core::matcore::relative_rank;
use matconc_core::mc::{log_log_slope, mean_se, run_trials};
use matconc_core::samplers::{VectorModel, VectorModelSpec};
use matconc_core::{SeedSpec, SymMatrix};

use crate::config::CovEstimator;
use crate::error::Result;
use crate::report::{Report, Table};

/// Mean and SE of `stat` over `trials` samples of size `n`; each `n` gets
/// its own family of streams.
fn replicate(
    model: &VectorModel,
    n: usize,
    trials: usize,
    seed: SeedSpec,
    stat: impl Fn(&nalgebra::DMatrix<f64>) -> matconc_core::Result<f64> + Sync + Send,
) -> Result<(f64, f64)> {
    let values = run_trials(trials, seed.derive(n as u64), |s| stat(&model.sample(n, s)));
    let values = values.into_iter().collect::<matconc_core::Result<Vec<f64>>>()?;
    Ok(mean_se(&values))
}

pub(super) fn covariance(
    report: &mut Report,
    spec: &VectorModelSpec,
    n_grid: &[usize],
    estimator: CovEstimator,
    slope_range: [f64; 2],
    trials: usize,
    seed: SeedSpec,
) -> Result<()> {
    let model = spec.build()?;
    let sigma = model.covariance().matrix().clone();
    let norm = sigma.op_norm();
    let erank = model.covariance().effective_rank();
    let error = |x: &nalgebra::DMatrix<f64>| -> matconc_core::Result<f64> {
        let est = match estimator {
            CovEstimator::Sample => sample_covariance(x)?,
            CovEstimator::Truncated => truncated_covariance(x, default_tau(x)?)?,
        };
        Ok((&est - &sigma).op_norm())
    };
    let mut table = Table::new("scaling", &["n", "mean_error", "stderr", "rate", "ratio"]);
    let mut means = Vec::new();
    let mut k = 0.0f64;
    for &n in n_grid {
        let (m, se) = replicate(&model, n, trials, seed, error)?;
        let rate = norm * (erank / n as f64).sqrt();
        k = k.max(m / rate);
        table.push_values(&[n as f64, m, se, rate, m / rate]);
        means.push(m);
    }
    let xs: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let fit = log_log_slope(&xs, &means)?;
    report.values.insert("slope".into(), fit.slope);
    report.values.insert("slope_stderr".into(), fit.std_err);
    report.values.insert("erank".into(), erank);
    report.values.insert("sigma_norm".into(), norm);
    report.fitted_k.insert("covariance-rate".into(), k);
    report.add_table(table);
    report.add_verdict(
        "slope-in-range",
        (slope_range[0]..=slope_range[1]).contains(&fit.slope),
        "scaling",
        format!(
            "slope {:.4} ± {:.4}, accepted [{}, {}]",
            fit.slope, fit.std_err, slope_range[0], slope_range[1]
        ),
    );
    Ok(())
}

pub(super) struct EigParams {
    pub j: usize,
    pub slope_target: f64,
    pub slope_tolerance: f64,
    pub min_rate_ratio: f64,
    pub slack: f64,
}

/// Relative-rank rate `√(λ_j/g_j)·√(r_j/n)` against the classic
/// `(‖Σ‖/g_j)·√(r/n)`, each with its constant fitted at the smallest `n`.
pub(super) fn eigenvector(
    report: &mut Report,
    params: EigParams,
    spec: &VectorModelSpec,
    n_grid: &[usize],
    trials: usize,
    seed: SeedSpec,
) -> Result<()> {
    let model = spec.build()?;
    let cov = model.covariance();
    let sigma: SymMatrix = cov.matrix().clone();
    let rr = relative_rank(cov.spectrum(), params.j)?;
    let lj = cov.spectrum().eigenvalues()[params.j];
    let norm = cov.spectrum().eigenvalues()[0];
    let erank = cov.effective_rank();
    let rel = |n: usize| (lj / rr.gap).sqrt() * (rr.rank / n as f64).sqrt();
    let classic = |n: usize| norm / rr.gap * (erank / n as f64).sqrt();
    let rate_ratio = classic(1) / rel(1);

    let j = params.j;
    let mut stats = Vec::new();
    for &n in n_grid {
        let (m, se) = replicate(&model, n, trials, seed, |x| {
            Ok(aligned_eigvec(&sample_covariance(x)?, &sigma, j)?.vector_distance)
        })?;
        stats.push((m, se));
    }
    let n0 = n_grid[0];
    let k_rel = stats[0].0 / rel(n0);
    let k_cls = stats[0].0 / classic(n0);
    let mut table = Table::new(
        "scaling",
        &["n", "mean_error", "stderr", "relative_fit", "classic_fit", "classic_shared_constant"],
    );
    let mut below = true;
    for (&n, &(m, se)) in n_grid.iter().zip(&stats) {
        below &= m <= k_cls * classic(n) + params.slack * se;
        table.push_values(&[n as f64, m, se, k_rel * rel(n), k_cls * classic(n), k_rel * classic(n)]);
    }
    let xs: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let means: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let fit = log_log_slope(&xs, &means)?;

    report.values.insert("slope".into(), fit.slope);
    report.values.insert("slope_stderr".into(), fit.std_err);
    report.values.insert("rate_ratio".into(), rate_ratio);
    report.values.insert("relative_rank".into(), rr.rank);
    report.values.insert("gap".into(), rr.gap);
    report.values.insert("erank".into(), erank);
    report.fitted_k.insert("relative-rank".into(), k_rel);
    report.fitted_k.insert("classic".into(), k_cls);
    report.add_table(table);
    report.add_verdict(
        "rate-ratio",
        rate_ratio >= params.min_rate_ratio,
        "scaling",
        format!("classic/relative rate ratio {rate_ratio:.3}, required >= {}", params.min_rate_ratio),
    );
    report.add_verdict(
        "slope-tracks-relative-rank",
        (fit.slope - params.slope_target).abs() <= params.slope_tolerance,
        "scaling",
        format!(
            "slope {:.4} ± {:.4}, target {} ± {}",
            fit.slope, fit.std_err, params.slope_target, params.slope_tolerance
        ),
    );
    report.add_verdict(
        "below-classic-curve",
        below,
        "scaling",
        format!("mean error <= classic fit + {} SE at every n", params.slack),
    );
    Ok(())
}
