//! One entry point per experiment kind. All randomness derives from the
//! config's master seed; trials run on the rayon pool and are collected in
//! trial order, so reports do not depend on the thread count.

mod audit;
mod moments;
mod scaling;
mod subsample;
mod tails;

use std::time::Instant;

use matconc_core::mc::TailCurve;
use matconc_core::SeedSpec;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::Result;
use crate::report::{Report, Table, TAIL_COLUMNS};

/// Validates `config`, runs it and returns the assembled report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let mut report = Report::new(config);
    let seed = SeedSpec::new(config.master_seed, 0);
    let trials = config.trials;
    match &config.experiment {
        Experiment::VerifyBernstein {
            ensemble,
            t_grid,
            grid_points,
            slack,
        } => tails::bernstein(&mut report, ensemble, t_grid.as_deref(), *grid_points, *slack, trials, seed)?,
        Experiment::VerifyFukNagaev {
            ensemble,
            form,
            u,
            t_grid,
            grid_points,
            slack,
        } => tails::fuk_nagaev(
            &mut report,
            tails::PropParams {
                form: *form,
                u: *u,
                t_grid: t_grid.as_deref(),
                grid_points: *grid_points,
                slack: *slack,
            },
            ensemble,
            trials,
            seed,
        )?,
        Experiment::VerifyRosenthal { ensemble, p_list } => moments::rosenthal(&mut report, ensemble, p_list, trials, seed)?,
        Experiment::VerifyPsdRosenthal { ensemble, p_list } => {
            moments::psd_rosenthal(&mut report, ensemble, p_list, trials, seed)?
        }
        Experiment::CovScaling {
            model,
            n_grid,
            estimator,
            slope_range,
        } => scaling::covariance(&mut report, model, n_grid, *estimator, *slope_range, trials, seed)?,
        Experiment::EigScaling {
            model,
            n_grid,
            j,
            slope_target,
            slope_tolerance,
            min_rate_ratio,
            slack,
        } => scaling::eigenvector(
            &mut report,
            scaling::EigParams {
                j: *j,
                slope_target: *slope_target,
                slope_tolerance: *slope_tolerance,
                min_rate_ratio: *min_rate_ratio,
                slack: *slack,
            },
            model,
            n_grid,
            trials,
            seed,
        )?,
        Experiment::Subsample { matrix, deltas, slack } => {
            subsample::run(&mut report, matrix, deltas, *slack, trials, seed)?
        }
        Experiment::Audit {
            ensemble,
            levels,
            slack,
            directions,
            moments,
            split_trials,
        } => {
            let opts = matconc_core::mc::AuditOptions {
                levels: levels.clone(),
                slack: *slack,
                directions: *directions,
                moments: moments.clone(),
                split_trials: *split_trials,
            };
            audit::run(&mut report, ensemble, &opts, trials, seed)?
        }
        Experiment::FitConstants {
            law,
            n_grid,
            d_grid,
            p_list,
            holdout_seed,
            family_seed,
            grid_points,
            slack,
        } => tails::fit_constants(
            &mut report,
            &tails::SweepParams {
                law: *law,
                n_grid,
                d_grid,
                p_list,
                holdout: SeedSpec::new(*holdout_seed, 0),
                family_seed: *family_seed,
                grid_points: *grid_points,
                slack: *slack,
            },
            trials,
            seed,
        )?,
    }
    report.metadata.runtime_seconds = start.elapsed().as_secs_f64();
    report.check_complete()?;
    Ok(report)
}

/// `points` evenly spaced values from `lo` to `hi`; `[lo, 2lo]` when the
/// range is empty.
pub(crate) fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let hi = if hi > lo { hi } else { 2.0 * lo.max(f64::MIN_POSITIVE) };
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

pub(crate) fn tail_table(name: &str, curve: &TailCurve) -> Table {
    let mut t = Table::new(name, &TAIL_COLUMNS);
    for i in 0..curve.t_grid.len() {
        let b = curve.bound[i];
        t.push(vec![
            Some(curve.t_grid[i]),
            Some(curve.empirical[i]),
            Some(curve.std_err[i]),
            b.map(|b| b.raw),
            b.map(|b| b.clamped),
        ]);
    }
    t
}

pub(crate) fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}
