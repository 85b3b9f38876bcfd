use matconc_core::bounds::{
    bernstein_tail, bernstein_threshold, fuk_nagaev_tail, fuk_nagaev_threshold, prop_fuk_nagaev_rhs,
    prop_fuk_nagaev_threshold, rosenthal_moment, BoundInput, ComponentTails, FukNagaevForm,
};
use matconc_core::matcore::effective_rank;
use matconc_core::mc::{
    frac_above, moment_from_samples, simulate, sorted, tail_from_samples, FitResult, SimOptions,
    TailCurve,
};
use matconc_core::samplers::{EnsembleSpec, MatrixFamilySpec, ScalarLaw};
use matconc_core::SeedSpec;

use super::{linspace, max_of, tail_table};
use crate::error::{CliError, Result};
use crate::report::{Report, Table};

fn grid_or(t_grid: Option<&[f64]>, lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match t_grid {
        Some(g) => g.to_vec(),
        None => linspace(lo, hi, points),
    }
}

fn describe_violations(curve: &TailCurve, k: f64, slack: f64) -> String {
    let v = curve.violations(k, slack);
    let worst = (0..curve.t_grid.len())
        .filter_map(|i| curve.bound[i].map(|b| curve.empirical[i] - k * b.raw - slack * curve.std_err[i]))
        .fold(f64::NEG_INFINITY, f64::max);
    format!(
        "{} of {} bounded points violate; max(empirical - bound - {slack} SE) = {worst:.3e}",
        v.len(),
        curve.bounded_points()
    )
}

pub(super) fn bernstein(
    report: &mut Report,
    spec: &EnsembleSpec,
    t_grid: Option<&[f64]>,
    grid_points: usize,
    slack: f64,
    trials: usize,
    seed: SeedSpec,
) -> Result<()> {
    let e = spec.build()?;
    let proxy = e.variance_proxy()?;
    let u = e.fixed_max_norm().expect("sign-fixed ensembles have a fixed max norm");
    let input = BoundInput {
        sigma2: proxy.sigma2,
        sigma_u2: proxy.sigma2,
        u,
        erank: effective_rank(&proxy.matrix)?,
        ..Default::default()
    };
    let samples = simulate(&e, trials, seed, &SimOptions::default())?;
    let norms: Vec<f64> = samples.iter().map(|s| s.norm).collect();
    let threshold = bernstein_threshold(&input);
    let grid = grid_or(t_grid, threshold, max_of(&norms), grid_points);
    let curve = tail_from_samples(&norms, &grid)?.with_bound(|t| bernstein_tail(&input, t));
    report.values.insert("sigma2".into(), input.sigma2);
    report.values.insert("u".into(), u);
    report.values.insert("erank".into(), input.erank);
    report.values.insert("threshold".into(), threshold);
    if curve.bounded_points() > 0 {
        report.fitted_k.insert("bernstein".into(), FitResult::from_curve(&curve)?.k_star);
    }
    report.add_table(tail_table("tail", &curve));
    report.add_verdict(
        "bernstein-dominates",
        curve.bounded_points() > 0 && curve.dominated(1.0, slack),
        "tail",
        describe_violations(&curve, 1.0, slack),
    );
    Ok(())
}

pub(super) struct PropParams<'a> {
    pub form: FukNagaevForm,
    pub u: Option<f64>,
    pub t_grid: Option<&'a [f64]>,
    pub grid_points: usize,
    pub slack: f64,
}

/// The variance proxy `Σ E W_k²` dominates the truncated one, so it is used
/// for both `σ²` and `σ_U²`.
pub(super) fn fuk_nagaev(
    report: &mut Report,
    params: PropParams<'_>,
    spec: &EnsembleSpec,
    trials: usize,
    seed: SeedSpec,
) -> Result<()> {
    let e = spec.build()?;
    if !e.is_centered() {
        return Err(CliError::Config {
            path: "ensemble.kind".into(),
            message: "the proposition needs centered summands".into(),
        });
    }
    if params.form == FukNagaevForm::Symmetric && !e.is_symmetric() {
        return Err(CliError::Config {
            path: "form".into(),
            message: "symmetric form needs a symmetric ensemble; use \"general\"".into(),
        });
    }
    let proxy = e.variance_proxy()?;
    let u = match (params.u, e.fixed_max_norm()) {
        (Some(u), _) => u,
        (None, Some(m)) => 2.0 * m,
        (None, None) => {
            // median of M from an independent pilot run
            let pilot = simulate(&e, trials.min(1000), seed.derive(0x9170), &SimOptions::default())?;
            let m = sorted(&pilot.iter().map(|s| s.max_norm).collect::<Vec<_>>());
            matconc_core::mc::quantile_sorted(&m, 0.5)
        }
    };
    let input = BoundInput {
        sigma2: proxy.sigma2,
        sigma_u2: proxy.sigma2,
        u,
        erank: effective_rank(&proxy.matrix)?,
        ..Default::default()
    };
    let general = params.form == FukNagaevForm::General;
    let opts = SimOptions {
        symmetrize: general,
        truncation: Some(u),
        directions: None,
    };
    let samples = simulate(&e, trials, seed, &opts)?;
    let lhs: Vec<f64> = samples.iter().map(|s| s.centered_norm).collect();
    let (delta, sum): (Vec<f64>, Vec<f64>) = samples
        .iter()
        .map(|s| {
            if general {
                (s.sym_delta_norm.unwrap(), s.rademacher_norm.unwrap())
            } else {
                (s.delta_norm.unwrap(), s.centered_norm)
            }
        })
        .unzip();
    let (delta, sum) = (sorted(&delta), sorted(&sum));
    let maxes = sorted(&samples.iter().map(|s| s.max_norm).collect::<Vec<_>>());
    let scale = params.form.event_scale();
    let t0 = prop_fuk_nagaev_threshold(&input, params.form);
    let grid = grid_or(params.t_grid, scale * t0, max_of(&lhs), params.grid_points);
    let components = |s: f64| {
        let t = s / scale;
        ComponentTails {
            delta: frac_above(&delta, t / 2.0),
            sum: frac_above(&sum, t),
            max: frac_above(&maxes, t),
        }
    };
    let curve = tail_from_samples(&lhs, &grid)?
        .with_bound(|s| prop_fuk_nagaev_rhs(&input, s / scale, &components(s), params.form));
    let mut comp = Table::new("components", &["t", "delta", "sum", "max"]);
    for &s in &grid {
        let c = components(s);
        comp.push_values(&[s / scale, c.delta, c.sum, c.max]);
    }
    report.values.insert("sigma2".into(), input.sigma2);
    report.values.insert("u".into(), u);
    report.values.insert("erank".into(), input.erank);
    report.values.insert("event_scale".into(), scale);
    report.values.insert("threshold".into(), t0);
    if curve.bounded_points() > 0 {
        report.fitted_k.insert("prop-fuk-nagaev".into(), FitResult::from_curve(&curve)?.k_star);
    }
    report.add_table(tail_table("tail", &curve));
    report.add_table(comp);
    report.add_verdict(
        "proposition-dominates",
        curve.bounded_points() > 0 && curve.dominated(1.0, params.slack),
        "tail",
        describe_violations(&curve, 1.0, params.slack),
    );
    Ok(())
}

pub(super) struct SweepParams<'a> {
    pub law: ScalarLaw,
    pub n_grid: &'a [usize],
    pub d_grid: &'a [usize],
    pub p_list: &'a [f64],
    pub holdout: SeedSpec,
    pub family_seed: u64,
    pub grid_points: usize,
    pub slack: f64,
}

/// Eq. (4)-style tail curve and Rosenthal moment for one sweep point.
struct PointFit {
    curve: TailCurve,
    moment: f64,
    moment_se: f64,
    moment_bound: f64,
}

fn fit_point(input: &BoundInput, p: f64, norms: &[f64], maxes: &[f64], points: usize) -> Result<PointFit> {
    let m = moment_from_samples(norms, maxes, p)?;
    let input = BoundInput {
        em: m.em,
        emp: m.emp,
        psi1_m: m.em,
        p,
        ..*input
    };
    let sorted_max = sorted(maxes);
    let t0 = fuk_nagaev_threshold(&input);
    let grid = linspace(12.0 * t0, max_of(norms).max(24.0 * t0), points);
    // P(M ≥ t) and P(M > t) agree for continuous laws
    let curve = tail_from_samples(norms, &grid)?
        .with_bound(|s| fuk_nagaev_tail(&input, s / 12.0, frac_above(&sorted_max, s / 12.0)));
    Ok(PointFit {
        curve,
        moment: m.value,
        moment_se: m.std_err,
        moment_bound: rosenthal_moment(&input)?,
    })
}

struct SweepPoint {
    n: usize,
    d: usize,
    fits: Vec<(PointFit, PointFit)>,
}

pub(super) fn fit_constants(report: &mut Report, params: &SweepParams<'_>, trials: usize, seed: SeedSpec) -> Result<()> {
    let mut points = Vec::new();
    let mut index = 0u64;
    for &n in params.n_grid {
        for &d in params.d_grid {
            let spec = EnsembleSpec::ScalarHeavy {
                matrices: MatrixFamilySpec::RandomSymmetric {
                    n,
                    dim: d,
                    norm: 1.0,
                    seed: params.family_seed,
                },
                law: params.law,
            };
            let e = spec.build()?;
            let proxy = e.variance_proxy()?;
            let input = BoundInput {
                sigma2: proxy.sigma2,
                sigma_u2: proxy.sigma2,
                erank: effective_rank(&proxy.matrix)?,
                ..Default::default()
            };
            let run = |s: SeedSpec| -> Result<(Vec<f64>, Vec<f64>)> {
                let samples = simulate(&e, trials, s.derive(index), &SimOptions::default())?;
                Ok(samples.iter().map(|s| (s.norm, s.max_norm)).unzip())
            };
            let (norms, maxes) = run(seed)?;
            let (h_norms, h_maxes) = run(params.holdout)?;
            let fits = params
                .p_list
                .iter()
                .map(|&p| {
                    Ok((
                        fit_point(&input, p, &norms, &maxes, params.grid_points)?,
                        fit_point(&input, p, &h_norms, &h_maxes, params.grid_points)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            points.push(SweepPoint { n, d, fits });
            index += 1;
        }
    }

    let mut table = Table::new(
        "sweep",
        &[
            "n",
            "d",
            "p",
            "kstar_fuk_nagaev",
            "kstar_rosenthal",
            "holdout_kstar_fuk_nagaev",
            "holdout_kstar_rosenthal",
            "fuk_nagaev_positive_points",
            "moment",
            "moment_stderr",
            "rosenthal_bound",
        ],
    );
    let mut k4 = 0.0f64;
    let mut k6 = 0.0f64;
    let mut rows = Vec::new();
    for pt in &points {
        for (&p, (fit, hold)) in params.p_list.iter().zip(&pt.fits) {
            let kf = FitResult::from_curve(&fit.curve)?.k_star;
            let kr = fit.moment / fit.moment_bound;
            let hf = FitResult::from_curve(&hold.curve)?.k_star;
            let hr = hold.moment / hold.moment_bound;
            let positive = fit.curve.empirical.iter().filter(|&&x| x > 0.0).count();
            k4 = k4.max(kf);
            k6 = k6.max(kr);
            table.push_values(&[
                pt.n as f64,
                pt.d as f64,
                p,
                kf,
                kr,
                hf,
                hr,
                positive as f64,
                fit.moment,
                fit.moment_se,
                fit.moment_bound,
            ]);
            rows.push((kf, kr, hf, hr));
        }
    }
    report.add_table(table);
    report.fitted_k.insert("fuk-nagaev".into(), k4);
    report.fitted_k.insert("rosenthal".into(), k6);

    let finite = rows.iter().all(|r| r.0.is_finite() && r.1.is_finite());
    report.add_verdict("kstar-finite", finite, "sweep", format!("worst-case K: Fuk-Nagaev {k4:.4e}, Rosenthal {k6:.4e}"));

    let mut fn_fail = 0;
    let mut ros_fail = 0;
    for pt in &points {
        for (_, hold) in &pt.fits {
            if !hold.curve.dominated(k4, params.slack) {
                fn_fail += 1;
            }
            if hold.moment > k6 * hold.moment_bound + params.slack * hold.moment_se {
                ros_fail += 1;
            }
        }
    }
    report.add_verdict(
        "fuk-nagaev-revalidates",
        fn_fail == 0,
        "sweep",
        format!("{fn_fail} held-out sweep points violate K = {k4:.4e} with {} SE slack", params.slack),
    );
    report.add_verdict(
        "rosenthal-revalidates",
        ros_fail == 0,
        "sweep",
        format!("{ros_fail} held-out sweep points violate K = {k6:.4e} with {} SE slack", params.slack),
    );
    let spread = |a: f64, b: f64| if a == b { 1.0 } else { a.max(b) / a.min(b) };
    let ros_spread = rows.iter().map(|r| spread(r.1, r.3)).fold(1.0, f64::max);
    let fn_spread = rows.iter().map(|r| spread(r.0, r.2)).fold(1.0, f64::max);
    report.values.insert("rosenthal_seed_spread".into(), ros_spread);
    report.values.insert("fuk_nagaev_seed_spread".into(), fn_spread);
    report.add_verdict(
        "kstar-stable",
        ros_spread < 2.0 && fn_spread < 2.0,
        "sweep",
        format!("max ratio across seeds: Fuk-Nagaev {fn_spread:.3}, Rosenthal {ros_spread:.3}"),
    );
    Ok(())
}
