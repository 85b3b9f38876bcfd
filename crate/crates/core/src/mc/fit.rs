use serde::Serialize;

use super::TailCurve;
use crate::error::{Error, Result};

/// Smallest `K` with `empirical ≤ K · bound` at every point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    /// `max_i empirical_i / bound_i`; `+∞` when a zero bound meets a
    /// positive empirical value.
    pub k_star: f64,
    /// Index attaining `k_star` (`None` when every empirical value is zero).
    pub argmax: Option<usize>,
    /// Per-point ratios, 0 where the empirical value is 0.
    pub ratios: Vec<f64>,
}

impl FitResult {
    pub fn is_finite(&self) -> bool {
        self.k_star.is_finite()
    }

    /// Fit over the points of `curve` that carry a bound, using raw values.
    pub fn from_curve(curve: &TailCurve) -> Result<FitResult> {
        let (emp, bound): (Vec<f64>, Vec<f64>) = curve
            .empirical
            .iter()
            .zip(&curve.bound)
            .filter_map(|(&e, b)| b.map(|b| (e, b.raw)))
            .unzip();
        fit_constant(&emp, &bound)
    }
}

pub fn fit_constant(empirical: &[f64], bound: &[f64]) -> Result<FitResult> {
    if empirical.len() != bound.len() {
        return Err(Error::DimensionMismatch {
            expected: empirical.len(),
            got: bound.len(),
        });
    }
    if empirical.is_empty() {
        return Err(Error::invalid("points", "need at least one point"));
    }
    if let Some(bad) = empirical.iter().chain(bound).find(|x| !(**x >= 0.0)) {
        return Err(Error::invalid("points", format!("values must be >= 0, got {bad}")));
    }
    let ratios: Vec<f64> = empirical
        .iter()
        .zip(bound)
        .map(|(&e, &b)| {
            if e == 0.0 {
                0.0
            } else if b == 0.0 {
                f64::INFINITY
            } else {
                e / b
            }
        })
        .collect();
    let argmax = ratios
        .iter()
        .enumerate()
        .filter(|(_, r)| **r > 0.0)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i);
    Ok(FitResult {
        k_star: argmax.map_or(0.0, |i| ratios[i]),
        argmax,
        ratios,
    })
}

/// Least-squares line through `(log x, log y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub std_err: f64,
    pub intercept: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 4 {
        return Err(Error::invalid("points", format!("need at least 4 sweep points, got {}", xs.len())));
    }
    if let Some(bad) = xs.iter().chain(ys).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::invalid("points", format!("values must be finite and > 0, got {bad}")));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("points", "x values must not all coincide"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let std_err = (rss / (n - 2.0) / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        std_err,
        intercept,
        points: xs.iter().copied().zip(ys.iter().copied()).collect(),
    })
}

/// Evaluates `statistic` at each sweep value and fits the log-log slope.
pub fn scaling_sweep(values: &[f64], statistic: impl Fn(f64) -> Result<f64>) -> Result<SlopeFit> {
    let ys = values.iter().map(|&x| statistic(x)).collect::<Result<Vec<f64>>>()?;
    log_log_slope(values, &ys)
}
