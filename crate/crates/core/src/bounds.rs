//! Right-hand sides of the tail and moment inequalities.
//!
//! Absolute constants that are only known to exist are exposed as `k`
//! (default 1) so that Monte Carlo fits can calibrate them; published explicit
//! constants (4 in matrix Bernstein, 64/16/4 and 16/4/1 in the truncation
//! proposition) are fixed. Logarithms are natural, so `log(e p) = 1 + ln p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar summaries of a matrix ensemble consumed by the bound evaluators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundInput {
    /// `σ² = ‖V_n²‖`.
    pub sigma2: f64,
    /// `σ_U² = ‖V_n²‖` for the truncated variance proxy.
    pub sigma_u2: f64,
    /// Truncation level (or a.s. bound) `U`.
    pub u: f64,
    /// Effective rank of the variance proxy (or of `A_n` in the PSD case).
    pub erank: f64,
    pub p: f64,
    /// `E M` with `M = max_k ‖W_k‖`.
    pub em: f64,
    /// `E M^p`.
    pub emp: f64,
    /// `‖M‖_{ψ₁}`.
    pub psi1_m: f64,
    /// `‖A_n‖` for sums of PSD matrices.
    pub anorm: f64,
    pub k: f64,
}

impl Default for BoundInput {
    fn default() -> Self {
        BoundInput {
            sigma2: 0.0,
            sigma_u2: 0.0,
            u: 0.0,
            erank: 1.0,
            p: 1.0,
            em: 0.0,
            emp: 0.0,
            psi1_m: 0.0,
            anorm: 0.0,
            k: 1.0,
        }
    }
}

fn check_nonneg(name: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(name, format!("must be finite and nonnegative, got {x}")));
    }
    Ok(())
}

impl BoundInput {
    pub fn validate(&self) -> Result<()> {
        check_nonneg("sigma2", self.sigma2)?;
        check_nonneg("sigma_u2", self.sigma_u2)?;
        check_nonneg("u", self.u)?;
        check_nonneg("em", self.em)?;
        check_nonneg("emp", self.emp)?;
        check_nonneg("psi1_m", self.psi1_m)?;
        check_nonneg("anorm", self.anorm)?;
        if !self.erank.is_finite() || self.erank < 1.0 {
            return Err(Error::invalid("erank", format!("must be >= 1, got {}", self.erank)));
        }
        if !self.p.is_finite() || self.p < 1.0 {
            return Err(Error::invalid("p", format!("must be >= 1, got {}", self.p)));
        }
        if !self.k.is_finite() || self.k <= 0.0 {
            return Err(Error::invalid("k", format!("must be positive, got {}", self.k)));
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn sigma_u(&self) -> f64 {
        self.sigma_u2.sqrt()
    }

    pub fn with_k(self, k: f64) -> Self {
        BoundInput { k, ..self }
    }
}

/// A tail bound value before and after clamping to `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub raw: f64,
    pub clamped: f64,
}

impl TailBound {
    fn new(raw: f64) -> Self {
        TailBound {
            raw,
            clamped: raw.clamp(0.0, 1.0),
        }
    }
}

/// `p / log(e p)`.
pub fn rosenthal_coefficient(p: f64) -> f64 {
    p / (1.0 + p.ln())
}

fn check_t(bound: &'static str, t: f64, threshold: f64) -> Result<()> {
    if !t.is_finite() || t < threshold {
        return Err(Error::Domain { bound, t, threshold });
    }
    Ok(())
}

fn check_prob(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(name, format!("must be a probability, got {x}")));
    }
    Ok(())
}

/// Smallest admissible `t` for [`bernstein_tail`]: `σ + U/3`.
pub fn bernstein_threshold(input: &BoundInput) -> f64 {
    input.sigma() + input.u / 3.0
}

/// Matrix Bernstein with effective rank, for summands bounded by `U`:
/// `P(‖ΣW_k‖ > t) ≤ 4 r exp[−(t²/2)/(σ² + tU/3)]` for `t ≥ σ + U/3`.
/// The constant 4 is explicit; `k` is ignored.
pub fn bernstein_tail(input: &BoundInput, t: f64) -> Result<TailBound> {
    input.validate()?;
    check_t("bernstein_tail", t, bernstein_threshold(input))?;
    let denom = input.sigma2 + t * input.u / 3.0;
    let raw = 4.0 * input.erank * (-(t * t / 2.0) / denom).exp();
    Ok(TailBound::new(raw))
}

/// `K(σ√q + Uq)` with `q = log(e r) ∨ p`.
pub fn bernstein_moment(input: &BoundInput) -> Result<f64> {
    input.validate()?;
    let q = (1.0 + input.erank.ln()).max(input.p);
    Ok(input.k * (input.sigma() * q.sqrt() + input.u * q))
}

/// Which form of the truncation proposition is being evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FukNagaevForm {
    /// Centered summands; the event is `‖ΣW_k‖ > 12t`, constants 64/16/4.
    General,
    /// Symmetrically distributed summands; the event is `‖ΣW_k‖ > 3t`,
    /// constants 16/4/1.
    Symmetric,
}

impl FukNagaevForm {
    /// Multiplier `c` in the left-hand event `‖ΣW_k‖ > c·t`.
    pub fn event_scale(self) -> f64 {
        match self {
            FukNagaevForm::General => 12.0,
            FukNagaevForm::Symmetric => 3.0,
        }
    }

    fn constants(self) -> (f64, f64, f64) {
        match self {
            FukNagaevForm::General => (64.0, 16.0, 4.0),
            FukNagaevForm::Symmetric => (16.0, 4.0, 1.0),
        }
    }
}

/// Probabilities that enter the right-hand side of the truncation proposition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComponentTails {
    /// `P(‖Σ ε_k W_k 1{‖W_k‖>U}‖ > t/2)`.
    pub delta: f64,
    /// `P(‖Σ ε_k W_k‖ > t)`.
    pub sum: f64,
    /// `P(M > t)`.
    pub max: f64,
}

/// Smallest admissible `t` for [`prop_fuk_nagaev_rhs`]. For the general form
/// the median term is certified by the `σ√2` bound, so `t/2 ≥ σ√2` is also
/// required.
pub fn prop_fuk_nagaev_threshold(input: &BoundInput, form: FukNagaevForm) -> f64 {
    let mut half = input.sigma_u().max(input.u / 3.0);
    if form == FukNagaevForm::General {
        half = half.max(std::f64::consts::SQRT_2 * input.sigma());
    }
    2.0 * half
}

/// `c₁ r exp[−(t/2)²/(σ_U² + tU/6)] + c₂ P_Δ P_S + c₃ P_M` with
/// `(c₁, c₂, c₃)` chosen by `form`.
pub fn prop_fuk_nagaev_rhs(
    input: &BoundInput,
    t: f64,
    tails: &ComponentTails,
    form: FukNagaevForm,
) -> Result<TailBound> {
    input.validate()?;
    check_prob("delta", tails.delta)?;
    check_prob("sum", tails.sum)?;
    check_prob("max", tails.max)?;
    check_t("prop_fuk_nagaev_rhs", t, prop_fuk_nagaev_threshold(input, form))?;
    let (c1, c2, c3) = form.constants();
    let half = t / 2.0;
    let expo = (-(half * half) / (input.sigma_u2 + t * input.u / 6.0)).exp();
    let raw = c1 * input.erank * expo + c2 * tails.delta * tails.sum + c3 * tails.max;
    Ok(TailBound::new(raw))
}

/// Smallest admissible `t` for [`fuk_nagaev_tail`]: `2(σ ∨ E M/3)`.
pub fn fuk_nagaev_threshold(input: &BoundInput) -> f64 {
    2.0 * input.sigma().max(input.em / 3.0)
}

/// Bound on `P(‖ΣW_k‖ > 12t)`:
/// `K(r exp[−(t/2)²/(σ² + 4t E M)] + P(M ≥ t) + ((p/log(ep))^p E M^p / t^p)²)`.
pub fn fuk_nagaev_tail(input: &BoundInput, t: f64, p_max: f64) -> Result<TailBound> {
    input.validate()?;
    check_prob("p_max", p_max)?;
    check_t("fuk_nagaev_tail", t, fuk_nagaev_threshold(input))?;
    let half = t / 2.0;
    let expo = (-(half * half) / (input.sigma2 + 4.0 * t * input.em)).exp();
    let poly = rosenthal_coefficient(input.p).powf(input.p) * input.emp / t.powf(input.p);
    Ok(TailBound::new(input.k * (input.erank * expo + p_max + poly * poly)))
}

/// `K(σ√q + q E M + (p/log(ep)) (E M^p)^{1/p})` with `q = log r ∨ p`.
pub fn rosenthal_moment(input: &BoundInput) -> Result<f64> {
    input.validate()?;
    let p = input.p;
    let q = input.erank.ln().max(p);
    Ok(input.k * (input.sigma() * q.sqrt() + q * input.em + rosenthal_coefficient(p) * input.emp.powf(1.0 / p)))
}

/// `K(σ√q + log(r) E M + p ‖M‖_{ψ₁})` with `q = log r ∨ p`.
pub fn rosenthal_psi1(input: &BoundInput) -> Result<f64> {
    input.validate()?;
    let p = input.p;
    let q = input.erank.ln().max(p);
    Ok(input.k * (input.sigma() * q.sqrt() + input.erank.ln() * input.em + p * input.psi1_m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsdVariant {
    Moment,
    Psi1,
}

/// Moment bounds for sums of independent PSD matrices with `A_n = Σ E W_k`;
/// `erank` is `r(A_n)` and `anorm` is `‖A_n‖`.
pub fn rosenthal_psd(input: &BoundInput, variant: PsdVariant) -> Result<f64> {
    input.validate()?;
    let p = input.p;
    let log_r = input.erank.ln();
    let q = log_r.max(p);
    let rest = match variant {
        PsdVariant::Moment => q * input.em + rosenthal_coefficient(p) * input.emp.powf(1.0 / p),
        PsdVariant::Psi1 => log_r * input.em + p * input.psi1_m,
    };
    Ok(input.k * (input.anorm + rest))
}

/// Inputs for the empirical-process bounds on `Z = sup_f Σ f(X_k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmpProcInput {
    /// `E Z`.
    pub ez: f64,
    /// `σ_*` with `σ_*² ≥ n sup_f E f²(X)`.
    pub sigma_star: f64,
    pub n: usize,
    pub u: f64,
    pub em: f64,
    pub emp: f64,
    pub p: f64,
    pub k: f64,
}

impl Default for EmpProcInput {
    fn default() -> Self {
        EmpProcInput {
            ez: 0.0,
            sigma_star: 0.0,
            n: 1,
            u: 0.0,
            em: 0.0,
            emp: 0.0,
            p: 1.0,
            k: 1.0,
        }
    }
}

impl EmpProcInput {
    pub fn validate(&self) -> Result<()> {
        if !self.ez.is_finite() {
            return Err(Error::invalid("ez", "must be finite"));
        }
        check_nonneg("sigma_star", self.sigma_star)?;
        check_nonneg("u", self.u)?;
        check_nonneg("em", self.em)?;
        check_nonneg("emp", self.emp)?;
        if self.n == 0 {
            return Err(Error::invalid("n", "must be positive"));
        }
        if !self.p.is_finite() || self.p < 1.0 {
            return Err(Error::invalid("p", format!("must be >= 1, got {}", self.p)));
        }
        if !self.k.is_finite() || self.k <= 0.0 {
            return Err(Error::invalid("k", format!("must be positive, got {}", self.k)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpProcTail {
    pub bound: TailBound,
    /// The bound controls `P(Z > 24(E Z + t))`; this is `24(E Z + t)`.
    pub event_threshold: f64,
}

/// Heavy-tailed Adamczak-type bound, valid for `t ≥ √2 σ_*`:
/// `K(exp(−t²/(2σ_*² + 64 t E M)) + P(M ≥ t) + (p/log(ep))^{2p} (E M^p/t^p)²)`.
pub fn empproc_tail(input: &EmpProcInput, t: f64, p_max: f64) -> Result<EmpProcTail> {
    input.validate()?;
    check_prob("p_max", p_max)?;
    check_t("empproc_tail", t, std::f64::consts::SQRT_2 * input.sigma_star)?;
    let s2 = input.sigma_star * input.sigma_star;
    let expo = (-(t * t) / (2.0 * s2 + 64.0 * t * input.em)).exp();
    let ratio = input.emp / t.powf(input.p);
    let poly = rosenthal_coefficient(input.p).powf(2.0 * input.p) * ratio * ratio;
    Ok(EmpProcTail {
        bound: TailBound::new(input.k * (expo + p_max + poly)),
        event_threshold: 24.0 * (input.ez + t),
    })
}

/// `K(E Z + σ_*√p + p E M + (p/log(ep)) (E M^p)^{1/p})`.
pub fn empproc_moment(input: &EmpProcInput) -> Result<f64> {
    input.validate()?;
    let p = input.p;
    Ok(input.k
        * (input.ez + input.sigma_star * p.sqrt() + p * input.em + rosenthal_coefficient(p) * input.emp.powf(1.0 / p)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BousquetLevel {
    /// `E Z + √(2tv) + tU/3` with `v = σ_*² + 2 E Z`.
    pub threshold: f64,
    /// `e^{−t}`.
    pub prob: f64,
    /// Looser form `2 E Z + σ_*√(2t) + 4tU/3`.
    pub simplified_threshold: f64,
}

/// Bousquet's concentration inequality for bounded classes:
/// `P(Z ≥ threshold) ≤ prob`.
pub fn bousquet_threshold(input: &EmpProcInput, t: f64) -> Result<BousquetLevel> {
    input.validate()?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain {
            bound: "bousquet_threshold",
            t,
            threshold: 0.0,
        });
    }
    let v = input.sigma_star * input.sigma_star + 2.0 * input.ez;
    Ok(BousquetLevel {
        threshold: input.ez + (2.0 * t * v).max(0.0).sqrt() + t * input.u / 3.0,
        prob: (-t).exp(),
        simplified_threshold: 2.0 * input.ez + input.sigma_star * (2.0 * t).sqrt() + 4.0 * t * input.u / 3.0,
    })
}

/// One row of the Markov-versus-Bernstein comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovComparison {
    pub t: f64,
    /// `min(1, (bernstein_moment / t)^p)`.
    pub markov: f64,
    pub bernstein: f64,
}

/// Markov's inequality applied to [`bernstein_moment`] next to
/// [`bernstein_tail`] on a grid. Informational only; nothing is asserted.
pub fn markov_vs_bernstein(input: &BoundInput, t_grid: &[f64]) -> Result<Vec<MarkovComparison>> {
    let moment = bernstein_moment(input)?;
    t_grid
        .iter()
        .map(|&t| {
            let bernstein = bernstein_tail(input, t)?.clamped;
            Ok(MarkovComparison {
                t,
                markov: (moment / t).powf(input.p).min(1.0),
                bernstein,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn e() -> f64 {
        std::f64::consts::E
    }

    #[test]
    fn bernstein_tail_examples() {
        let input = BoundInput {
            erank: 10.0,
            sigma2: 1.0,
            u: 1.0,
            ..Default::default()
        };
        assert_abs_diff_eq!(bernstein_tail(&input, 5.0).unwrap().raw, 0.368, epsilon = 1e-3);
        // 40 exp(-50 / (1 + 10/3))
        let v = bernstein_tail(&input, 10.0).unwrap().raw;
        assert_abs_diff_eq!(v, 40.0 * (-50.0f64 / (13.0 / 3.0)).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(v, 3.90e-4, epsilon = 5e-7);
        let thr = bernstein_threshold(&input);
        assert!(matches!(bernstein_tail(&input, thr - 1e-9), Err(Error::Domain { .. })));
        assert!(bernstein_tail(&input, thr).is_ok());
    }

    #[test]
    fn bernstein_moment_examples() {
        let input = BoundInput {
            sigma2: 1.0,
            u: 1.0,
            erank: 1.0,
            p: 2.0,
            ..Default::default()
        };
        assert_abs_diff_eq!(bernstein_moment(&input).unwrap(), 2f64.sqrt() + 2.0, epsilon = 1e-12);
        let one = BoundInput {
            u: 1.0,
            ..Default::default()
        };
        assert_abs_diff_eq!(bernstein_moment(&one).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            bernstein_moment(&input.with_k(2.0)).unwrap(),
            2.0 * bernstein_moment(&input).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn prop_fuk_nagaev_examples() {
        let input = BoundInput {
            erank: 1.0,
            sigma_u2: 1.0,
            ..Default::default()
        };
        let zero = ComponentTails::default();
        let general = prop_fuk_nagaev_rhs(&input, 4.0, &zero, FukNagaevForm::General).unwrap();
        assert_abs_diff_eq!(general.raw, 64.0 * (-4.0f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(general.raw, 1.172, epsilon = 1e-3);
        assert_eq!(general.clamped, 1.0);
        let sym = prop_fuk_nagaev_rhs(&input, 4.0, &zero, FukNagaevForm::Symmetric).unwrap();
        assert_abs_diff_eq!(sym.raw, 0.293, epsilon = 1e-3);

        let mut prev = f64::INFINITY;
        for t in [6.0, 10.0, 20.0, 40.0] {
            let v = prop_fuk_nagaev_rhs(&input, t, &zero, FukNagaevForm::General).unwrap().raw;
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-100);
        assert_eq!(prop_fuk_nagaev_rhs(&input, 1000.0, &zero, FukNagaevForm::General).unwrap().raw, 0.0);
        assert!(prop_fuk_nagaev_rhs(&input, 1.9, &zero, FukNagaevForm::Symmetric).is_err());
        let bad = ComponentTails { max: 1.5, ..zero };
        assert!(prop_fuk_nagaev_rhs(&input, 4.0, &bad, FukNagaevForm::Symmetric).is_err());
    }

    #[test]
    fn fuk_nagaev_tail_examples() {
        let input = BoundInput {
            erank: 4.0,
            sigma2: 1.0,
            em: 0.5,
            p: 2.0,
            emp: 1.0,
            ..Default::default()
        };
        let v = fuk_nagaev_tail(&input, 20.0, 1e-3).unwrap();
        assert_abs_diff_eq!(v.raw, 0.350, epsilon = 1e-3);
        let expo = 4.0 * (-100.0f64 / 41.0).exp();
        let poly = (rosenthal_coefficient(2.0).powi(2) / 400.0).powi(2);
        assert_abs_diff_eq!(v.raw, expo + 1e-3 + poly, epsilon = 1e-15);
        assert!(fuk_nagaev_tail(&input, 20.0, 1.0).unwrap().raw >= 1.0);
        let a = fuk_nagaev_tail(&input, 10.0, 0.0).unwrap().raw;
        let b = fuk_nagaev_tail(&input, 20.0, 0.0).unwrap().raw;
        assert!(b < a);
        assert!(fuk_nagaev_tail(&input, 1.99, 0.0).is_err());
    }

    #[test]
    fn rosenthal_examples() {
        let input = BoundInput {
            sigma2: 1.0,
            erank: e(),
            p: 2.0,
            em: 1.0,
            emp: 2.0,
            ..Default::default()
        };
        let v = rosenthal_moment(&input).unwrap();
        assert_abs_diff_eq!(v, 5.085, epsilon = 2e-3);
        // erank = 1 gives q = p
        let r1 = BoundInput {
            erank: 1.0,
            p: 3.0,
            sigma2: 1.0,
            ..Default::default()
        };
        assert_abs_diff_eq!(rosenthal_moment(&r1).unwrap(), 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(rosenthal_coefficient(1.0), 1.0);

        let psi = BoundInput {
            erank: 1.0,
            p: 2.0,
            psi1_m: 3.0,
            ..Default::default()
        };
        assert_abs_diff_eq!(rosenthal_psi1(&psi).unwrap(), 6.0, epsilon = 1e-14);
        let psi2 = BoundInput {
            sigma2: 1.0,
            erank: e(),
            p: 1.0,
            em: 1.0,
            ..Default::default()
        };
        assert_abs_diff_eq!(rosenthal_psi1(&psi2).unwrap(), 2.0, epsilon = 1e-14);
        let doubled = BoundInput { psi1_m: 6.0, ..psi };
        assert_abs_diff_eq!(rosenthal_psi1(&doubled).unwrap(), 6.0 + 2.0 * 3.0, epsilon = 1e-14);
    }

    #[test]
    fn rosenthal_psd_examples() {
        let input = BoundInput {
            anorm: 2.0,
            erank: e() * e(),
            p: 1.0,
            em: 1.0,
            emp: 1.0,
            ..Default::default()
        };
        assert_abs_diff_eq!(rosenthal_psd(&input, PsdVariant::Moment).unwrap(), 5.0, epsilon = 1e-12);
        assert_eq!(rosenthal_psd(&BoundInput::default(), PsdVariant::Moment).unwrap(), 0.0);
        let psi = BoundInput {
            anorm: 1.0,
            erank: e(),
            em: 1.0,
            p: 2.0,
            psi1_m: 1.0,
            ..Default::default()
        };
        assert_abs_diff_eq!(rosenthal_psd(&psi, PsdVariant::Psi1).unwrap(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn empproc_examples() {
        let input = EmpProcInput {
            sigma_star: 1.0,
            p: 2.0,
            ..Default::default()
        };
        let v = empproc_tail(&input, 2.0, 0.0).unwrap();
        assert_abs_diff_eq!(v.bound.raw, (-2.0f64).exp(), epsilon = 1e-15);
        assert_eq!(v.event_threshold, 48.0);
        assert!(empproc_tail(&input, 2.0, 1.0).unwrap().bound.raw >= 1.0);
        assert!(empproc_tail(&input, 1.4, 0.0).is_err());

        let m = EmpProcInput {
            ez: 10.0,
            sigma_star: 2.0,
            p: 4.0,
            em: 1.0,
            emp: 16.0,
            ..Default::default()
        };
        assert_abs_diff_eq!(empproc_moment(&m).unwrap(), 21.352, epsilon = 2e-3);
        let only = EmpProcInput {
            ez: 5.0,
            ..Default::default()
        };
        assert_eq!(empproc_moment(&only).unwrap(), 5.0);
        let p1 = EmpProcInput {
            ez: 1.0,
            sigma_star: 2.0,
            em: 3.0,
            emp: 3.0,
            p: 1.0,
            ..Default::default()
        };
        assert_abs_diff_eq!(empproc_moment(&p1).unwrap(), 1.0 + 2.0 + 3.0 + 3.0, epsilon = 1e-14);
    }

    #[test]
    fn bousquet_examples() {
        let input = EmpProcInput {
            sigma_star: 2.0,
            ez: 3.0,
            u: 1.0,
            ..Default::default()
        };
        let b = bousquet_threshold(&input, 2.0).unwrap();
        assert_abs_diff_eq!(b.threshold, 3.0 + 40f64.sqrt() + 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.threshold, 9.991, epsilon = 1e-3);
        assert_abs_diff_eq!(b.prob, (-2.0f64).exp());
        let zero = bousquet_threshold(&input, 0.0).unwrap();
        assert_eq!((zero.threshold, zero.prob), (3.0, 1.0));
        let plain = EmpProcInput {
            sigma_star: 2.0,
            ..Default::default()
        };
        let b = bousquet_threshold(&plain, 3.0).unwrap();
        assert_abs_diff_eq!(b.threshold, 2.0 * 6f64.sqrt(), epsilon = 1e-12);
        assert!(b.simplified_threshold >= b.threshold);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let bad = BoundInput {
            erank: 0.5,
            ..Default::default()
        };
        assert!(rosenthal_moment(&bad).is_err());
        let bad = BoundInput {
            sigma2: f64::NAN,
            ..Default::default()
        };
        assert!(bernstein_moment(&bad).is_err());
        let bad = BoundInput {
            k: 0.0,
            ..Default::default()
        };
        assert!(rosenthal_psi1(&bad).is_err());
    }
}
