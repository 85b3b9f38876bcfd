use matconc_core::bounds::{rosenthal_moment, rosenthal_psd, rosenthal_psi1, BoundInput, PsdVariant};
use matconc_core::matcore::effective_rank;
use matconc_core::mc::{estimate_psi1, moment_from_samples, simulate, SimOptions};
use matconc_core::samplers::{Ensemble, EnsembleSpec};
use matconc_core::SeedSpec;

use crate::error::Result;
use crate::report::{Report, Table};

/// `√(max(log r, p))`, the σ-term factor of the Rosenthal bounds.
fn sigma_factor(erank: f64, p: f64) -> f64 {
    erank.ln().max(p).sqrt()
}

pub(super) fn rosenthal(report: &mut Report, spec: &EnsembleSpec, p_list: &[f64], trials: usize, seed: SeedSpec) -> Result<()> {
    let e = spec.build()?;
    let proxy = e.variance_proxy()?;
    let erank = effective_rank(&proxy.matrix)?;
    let dim = e.dim() as f64;
    let samples = simulate(&e, trials, seed, &SimOptions::default())?;
    let norms: Vec<f64> = samples.iter().map(|s| s.centered_norm).collect();
    let maxes: Vec<f64> = samples.iter().map(|s| s.max_norm).collect();
    let psi1 = estimate_psi1(&maxes)?;

    let mut moments = Table::new(
        "moments",
        &[
            "p",
            "empirical",
            "stderr",
            "em",
            "emp",
            "psi1_m",
            "bound_moment",
            "bound_psi1",
            "ratio_moment",
            "ratio_psi1",
        ],
    );
    let mut dims = Table::new(
        "dimension",
        &["p", "erank", "dim", "sigma_term_ratio", "analytic_factor", "bound_erank", "bound_dim"],
    );
    let (mut k_moment, mut k_psi1) = (0.0f64, 0.0f64);
    let mut rank_helps = true;
    for &p in p_list {
        let m = moment_from_samples(&norms, &maxes, p)?;
        let input = BoundInput {
            sigma2: proxy.sigma2,
            sigma_u2: proxy.sigma2,
            erank,
            p,
            em: m.em,
            emp: m.emp,
            psi1_m: psi1,
            ..Default::default()
        };
        let b6 = rosenthal_moment(&input)?;
        let b7 = rosenthal_psi1(&input)?;
        k_moment = k_moment.max(m.value / b6);
        k_psi1 = k_psi1.max(m.value / b7);
        moments.push_values(&[p, m.value, m.std_err, m.em, m.emp, psi1, b6, b7, m.value / b6, m.value / b7]);

        let with_dim = BoundInput { erank: dim, ..input };
        let bd = rosenthal_moment(&with_dim)?;
        rank_helps &= b6 <= bd;
        dims.push_values(&[
            p,
            erank,
            dim,
            sigma_factor(erank, p) / sigma_factor(dim, p),
            ((1.0 + erank.ln()) / (1.0 + dim.ln())).sqrt(),
            b6,
            bd,
        ]);
    }
    report.values.insert("sigma2".into(), proxy.sigma2);
    report.values.insert("erank".into(), erank);
    report.fitted_k.insert("rosenthal-moment".into(), k_moment);
    report.fitted_k.insert("rosenthal-psi1".into(), k_psi1);
    report.add_table(moments);
    report.add_table(dims);
    report.add_verdict(
        "kstar-finite",
        k_moment.is_finite() && k_psi1.is_finite() && k_moment > 0.0,
        "moments",
        format!("K moment form {k_moment:.4}, psi1 form {k_psi1:.4}"),
    );
    report.add_verdict(
        "effective-rank-not-worse",
        rank_helps,
        "dimension",
        "bound with r(V²) never exceeds the bound with d",
    );
    Ok(())
}

/// `‖Σ X_kX_kᵀ‖` against the PSD bounds with `A_n = nΣ` and `M = max ‖X_k‖²`.
pub(super) fn psd_rosenthal(
    report: &mut Report,
    spec: &EnsembleSpec,
    p_list: &[f64],
    trials: usize,
    seed: SeedSpec,
) -> Result<()> {
    let e = spec.build()?;
    let Ensemble::PsdRankOne(model, _) = &e else {
        unreachable!("validated as psd-rank-one");
    };
    let mean = e.mean();
    let anorm = mean.op_norm();
    let erank = model.covariance().effective_rank();
    let samples = simulate(&e, trials, seed, &SimOptions::default())?;
    let norms: Vec<f64> = samples.iter().map(|s| s.norm).collect();
    let maxes: Vec<f64> = samples.iter().map(|s| s.max_norm).collect();
    let psi1 = estimate_psi1(&maxes)?;
    let mut table = Table::new(
        "moments",
        &[
            "p",
            "empirical",
            "stderr",
            "anorm",
            "em",
            "emp",
            "psi1_m",
            "bound_moment",
            "bound_psi1",
            "ratio_moment",
            "ratio_psi1",
        ],
    );
    let (mut k_moment, mut k_psi1) = (0.0f64, 0.0f64);
    for &p in p_list {
        let m = moment_from_samples(&norms, &maxes, p)?;
        let input = BoundInput {
            erank,
            p,
            em: m.em,
            emp: m.emp,
            psi1_m: psi1,
            anorm,
            ..Default::default()
        };
        let bm = rosenthal_psd(&input, PsdVariant::Moment)?;
        let bp = rosenthal_psd(&input, PsdVariant::Psi1)?;
        k_moment = k_moment.max(m.value / bm);
        k_psi1 = k_psi1.max(m.value / bp);
        table.push_values(&[p, m.value, m.std_err, anorm, m.em, m.emp, psi1, bm, bp, m.value / bm, m.value / bp]);
    }
    report.values.insert("anorm".into(), anorm);
    report.values.insert("erank".into(), erank);
    report.fitted_k.insert("psd-moment".into(), k_moment);
    report.fitted_k.insert("psd-psi1".into(), k_psi1);
    report.add_table(table);
    report.add_verdict(
        "kstar-finite",
        k_moment.is_finite() && k_psi1.is_finite() && k_moment > 0.0,
        "moments",
        format!("K moment form {k_moment:.4}, psi1 form {k_psi1:.4}"),
    );
    Ok(())
}
