use matconc_core::matcore::read_rect_matrix;
use matconc_core::subsample::{
    exact_subsample_moments, max_weight_check, mc_subsample_moments, rudelson_vershynin_bound, subsample_bound,
    tropp_bound, SubsampleInput, SubsampleVariant, EXACT_ENUMERATION_LIMIT,
};
use matconc_core::{RectMatrix, SeedSpec};
use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::config::MatrixSource;
use crate::error::{CliError, Result};
use crate::report::{Report, Table};

fn load(source: &MatrixSource) -> Result<RectMatrix> {
    Ok(match source {
        MatrixSource::Identity { dim } => RectMatrix::new(DMatrix::identity(*dim, *dim))?,
        MatrixSource::Explicit { rows } => {
            let r = rows.len();
            let c = rows.first().map_or(0, |row| row.len());
            if rows.iter().any(|row| row.len() != c) {
                return Err(CliError::Config {
                    path: "matrix.rows".into(),
                    message: "rows must have equal length".into(),
                });
            }
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            RectMatrix::from_row_slice(r, c, &flat)?
        }
        MatrixSource::Gaussian { rows, cols, seed } => {
            let mut rng = SeedSpec::new(*seed, 0).derive(0xB0).rng();
            RectMatrix::new(DMatrix::from_fn(*rows, *cols, |_, _| rng.sample::<f64, _>(StandardNormal)))?
        }
        MatrixSource::File { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.clone(),
                source: e,
            })?;
            read_rect_matrix(&text)?
        }
    })
}

pub(super) fn run(
    report: &mut Report,
    source: &MatrixSource,
    deltas: &[f64],
    slack: f64,
    trials: usize,
    seed: SeedSpec,
) -> Result<()> {
    let b = load(source)?;
    let exact_ok = b.cols() <= EXACT_ENUMERATION_LIMIT;
    let mut table = Table::new(
        "subsample",
        &[
            "delta",
            "exact_plain",
            "exact_centered",
            "mc_plain",
            "mc_plain_stderr",
            "mc_centered",
            "mc_centered_stderr",
            "bound_plain",
            "bound_centered",
            "rudelson_vershynin",
            "tropp",
            "max_weight",
            "max_weight_stderr",
            "max_weight_bound",
        ],
    );
    let (mut k_plain, mut k_centered, mut k_rv) = (0.0f64, 0.0f64, 0.0f64);
    let mut exact_agree = true;
    let mut max_weight_ok = true;
    for (i, &delta) in deltas.iter().enumerate() {
        let input = SubsampleInput::new(b.clone(), delta, seed.derive(i as u64))?;
        let exact = if exact_ok { Some(exact_subsample_moments(&input)?) } else { None };
        let (plain, centered) = mc_subsample_moments(&input, trials)?;
        let bp = subsample_bound(&input, 1.0, SubsampleVariant::Plain)?;
        let bc = subsample_bound(&input, 1.0, SubsampleVariant::Centered)?;
        let rv = rudelson_vershynin_bound(&input, 1.0)?;
        let tropp = tropp_bound(&input)?;
        let mw = max_weight_check(&input, trials)?;
        if let Some(x) = exact {
            exact_agree &= (x.plain - plain.mean).abs() <= slack * plain.std_err
                && (x.centered - centered.mean).abs() <= slack * centered.std_err;
        }
        max_weight_ok &= mw.holds(slack);
        let ratio = |m: f64, b: f64| if m == 0.0 { 0.0 } else { m / b };
        k_plain = k_plain.max(ratio(plain.mean, bp));
        k_centered = k_centered.max(ratio(centered.mean, bc));
        k_rv = k_rv.max(ratio(plain.mean, rv));
        table.push(vec![
            Some(delta),
            exact.map(|x| x.plain),
            exact.map(|x| x.centered),
            Some(plain.mean),
            Some(plain.std_err),
            Some(centered.mean),
            Some(centered.std_err),
            Some(bp),
            Some(bc),
            Some(rv),
            Some(tropp),
            Some(mw.estimate.mean),
            Some(mw.estimate.std_err),
            Some(mw.bound),
        ]);
    }
    report.values.insert("stable_rank".into(), b.stable_rank()?);
    report.fitted_k.insert("subsample-plain".into(), k_plain);
    report.fitted_k.insert("subsample-centered".into(), k_centered);
    report.fitted_k.insert("rudelson-vershynin".into(), k_rv);
    report.add_table(table);
    if exact_ok {
        report.add_verdict(
            "monte-carlo-matches-exact",
            exact_agree,
            "subsample",
            format!("|exact - MC| <= {slack} SE for both moments at every delta"),
        );
    }
    report.add_verdict(
        "max-weight-bound",
        max_weight_ok,
        "subsample",
        format!("E max_k δ_k‖B_k‖² <= bound + {slack} SE at every delta"),
    );
    Ok(())
}
