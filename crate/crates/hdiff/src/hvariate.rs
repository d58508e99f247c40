//! Distributions whose density is a Fox H-function, and the special-function
//! laws built from them (stable, M-Wright, Mittag-Leffler).
//!
//! A one-sided variate has density `k·H(c·x)` on `x > 0`. A symmetric
//! variate has density `½·k·H(c·|y|)` on the real line.

use crate::gamma::{rgamma, EULER_GAMMA};
use crate::hfunc::{self, EvalConfig, EvalError};
use crate::params::{HSeq, ParamError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;

/// Result of a moment query. Moments that do not exist are a value, not an
/// error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Moment {
    Finite(f64),
    Undefined,
}

impl Moment {
    pub fn value(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Undefined => None,
        }
    }
    pub fn is_defined(self) -> bool {
        matches!(self, Moment::Finite(_))
    }
}

#[derive(Debug, Default)]
struct Derived {
    cdf: OnceLock<HSeq>,
    survival: OnceLock<HSeq>,
    laplace: OnceLock<HSeq>,
    strip: OnceLock<Result<(f64, f64), EvalError>>,
}

impl Clone for Derived {
    fn clone(&self) -> Self {
        Derived::default()
    }
}

/// An H-distributed random variable.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "VariateText", try_from = "VariateText")]
pub struct HVariate {
    seq: HSeq,
    symmetric: bool,
    derived: Derived,
}

#[derive(Serialize, Deserialize)]
struct VariateText {
    #[serde(flatten)]
    seq: HSeq,
    symmetric: bool,
}

impl From<HVariate> for VariateText {
    fn from(v: HVariate) -> Self {
        VariateText { seq: v.seq, symmetric: v.symmetric }
    }
}

impl TryFrom<VariateText> for HVariate {
    type Error = ParamError;
    fn try_from(t: VariateText) -> Result<Self, ParamError> {
        HVariate::new(t.seq, t.symmetric)
    }
}

impl PartialEq for HVariate {
    fn eq(&self, o: &Self) -> bool {
        self.seq == o.seq && self.symmetric == o.symmetric
    }
}

impl HVariate {
    /// Wraps a sequence pair. Structural problems (slopes, scale) are
    /// rejected here; normalisation is checked by [`HVariate::validate`].
    pub fn new(seq: HSeq, symmetric: bool) -> Result<Self, ParamError> {
        let d = seq.validate();
        if !d.lengths_ok {
            return Err(ParamError::LengthMismatch(d.messages.join("; ")));
        }
        for (field, v) in [("A", &seq.params.big_a), ("B", &seq.params.big_b)] {
            if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
                return Err(ParamError::NonPositiveSlope { field, index, value });
            }
        }
        if !(seq.params.c > 0.0 && seq.params.c.is_finite()) {
            return Err(ParamError::NonPositive { name: "c", value: seq.params.c });
        }
        Ok(HVariate { seq, symmetric, derived: Derived::default() })
    }

    pub fn one_sided(seq: HSeq) -> Result<Self, ParamError> {
        Self::new(seq, false)
    }

    pub fn symmetric(seq: HSeq) -> Result<Self, ParamError> {
        Self::new(seq, true)
    }

    pub fn seq(&self) -> &HSeq {
        &self.seq
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// The law of `α·x`.
    pub fn scaled(&self, alpha: f64) -> Result<Self, ParamError> {
        Self::new(self.seq.scale(alpha)?, self.symmetric)
    }

    /// Structural diagnostics plus the numeric density check.
    pub fn validate(&self, cfg: &EvalConfig) -> crate::params::Diagnostics {
        self.seq.validate_density(cfg)
    }

    /// Total mass `∫ pdf`.
    pub fn total_mass(&self, cfg: &EvalConfig) -> Result<f64, EvalError> {
        hfunc::integrate_positive_axis(&self.seq, &|_| 1.0, cfg)
    }

    fn cdf_seq(&self) -> &HSeq {
        self.derived.cdf.get_or_init(|| HSeq::cdf_kernel().convolve(&self.seq.conjugate(1.0).expect("finite exponent")))
    }

    fn survival_seq(&self) -> &HSeq {
        self.derived
            .survival
            .get_or_init(|| HSeq::cdf_kernel().inverse().convolve(&self.seq.conjugate(1.0).expect("finite exponent")))
    }

    fn laplace_seq(&self) -> &HSeq {
        self.derived.laplace.get_or_init(|| HSeq::exp_kernel().mellin(&self.seq))
    }

    fn strip(&self) -> Result<(f64, f64), EvalError> {
        self.derived.strip.get_or_init(|| hfunc::pole_strip(&self.seq)).clone()
    }

    /// The kernel `k·H(c·x)` for `x ≥ 0` (right limit at 0).
    pub fn kernel(&self, x: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
        if x == 0.0 {
            hfunc::eval_h_at_zero(&self.seq)
        } else {
            hfunc::eval_h(x, &self.seq, cfg)
        }
    }

    pub fn pdf(&self, x: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
        if x.is_nan() {
            return Err(EvalError::Domain("pdf at NaN".into()));
        }
        if self.symmetric {
            if x.is_infinite() {
                return Ok(0.0);
            }
            return Ok(0.5 * self.kernel(x.abs(), cfg)?);
        }
        if x < 0.0 || x.is_infinite() {
            return Ok(0.0);
        }
        self.kernel(x, cfg)
    }

    /// `P(|y| ≤ x)` for symmetric variates, `P(y ≤ x)` otherwise, for x > 0.
    fn half_cdf(&self, x: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
        Ok(hfunc::eval_h(x, self.cdf_seq(), cfg)?.clamp(0.0, 1.0))
    }

    pub fn cdf(&self, x: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
        if x.is_nan() {
            return Err(EvalError::Domain("cdf at NaN".into()));
        }
        if self.symmetric {
            if x == 0.0 {
                return Ok(0.5);
            }
            if x.is_infinite() {
                return Ok(if x > 0.0 { 1.0 } else { 0.0 });
            }
            let g = self.half_cdf(x.abs(), cfg)?;
            return Ok(0.5 + x.signum() * 0.5 * g);
        }
        if x <= 0.0 {
            return Ok(0.0);
        }
        if x.is_infinite() {
            return Ok(1.0);
        }
        self.half_cdf(x, cfg)
    }

    /// `P(y > x)`. One-sided variates use the dedicated survival kernel so
    /// that far-tail values keep their relative precision.
    pub fn survival(&self, x: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
        if x.is_nan() {
            return Err(EvalError::Domain("survival at NaN".into()));
        }
        if self.symmetric {
            if x < 0.0 {
                return self.cdf(-x, cfg);
            }
            if x.is_infinite() {
                return Ok(0.0);
            }
            if x == 0.0 {
                return Ok(0.5);
            }
            return Ok(0.5 * hfunc::eval_h(x, self.survival_seq(), cfg)?.clamp(0.0, 1.0));
        }
        if x <= 0.0 {
            return Ok(1.0);
        }
        if x.is_infinite() {
            return Ok(0.0);
        }
        Ok(hfunc::eval_h(x, self.survival_seq(), cfg)?.clamp(0.0, 1.0))
    }

    /// `E[|y|^r]` for real `r`, when it exists.
    pub fn abs_moment(&self, r: f64) -> Result<Option<f64>, EvalError> {
        let (l, rr) = self.strip()?;
        let s = -(r + 1.0);
        if !(s > l && s < rr) {
            return Ok(None);
        }
        hfunc::mellin_transform(r + 1.0, &self.seq)
    }

    /// Integer moment `E[y^ℓ]`. Existence is decided first, so an odd moment
    /// of a heavy-tailed symmetric law is undefined rather than zero.
    pub fn moment(&self, l: u32) -> Result<Moment, EvalError> {
        match self.abs_moment(l as f64)? {
            None => Ok(Moment::Undefined),
            Some(_) if self.symmetric && l % 2 == 1 => Ok(Moment::Finite(0.0)),
            Some(v) => Ok(Moment::Finite(v)),
        }
    }

    /// Moment generating function `E[e^{s y}]`.
    pub fn mgf(&self, s: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
        if s == 0.0 {
            return Ok(1.0);
        }
        let kern = self.laplace_seq();
        // L(v) = ∫ e^{-v t} k H(c t) dt; L(-v) is the growing side
        let lap = |v: f64| -> Result<f64, EvalError> {
            if v > 0.0 {
                hfunc::eval_h(v, kern, cfg)
            } else {
                hfunc::eval_h_negative(-v, kern, cfg)
            }
        };
        if self.symmetric {
            Ok(0.5 * (lap(s)? + lap(-s)?))
        } else {
            lap(-s)
        }
    }

    /// `E[ln |y|]` through the H-transform of `(t − 1)·pdf(t)` against the
    /// `ln t/(t − 1)` kernel.
    pub fn log_moment(&self, cfg: &EvalConfig) -> Result<f64, EvalError> {
        let inner = EvalConfig { rel_tolerance: (cfg.rel_tolerance * 0.1).max(1e-13), ..cfg.clone() };
        let f = |t: f64| -> Result<f64, EvalError> { Ok((t - 1.0) * hfunc::eval_h(t, &self.seq, &inner)?) };
        hfunc::h_transform_numeric(&f, 1.0, &HSeq::ln_kernel(), cfg)
    }

    /// `E[ln |y|]` as the difference of two H-functions at unit argument,
    /// `H(1; P_ln ⊠ ⟨1|P) − H(1; P_ln ⊠ P)`.
    pub fn log_moment_difference(&self, cfg: &EvalConfig) -> Result<f64, EvalError> {
        let ln = HSeq::ln_kernel();
        let with_t = ln.mellin(&self.seq.conjugate(1.0)?);
        let plain = ln.mellin(&self.seq);
        Ok(hfunc::eval_h(1.0, &with_t, cfg)? - hfunc::eval_h(1.0, &plain, cfg)?)
    }

    /// `E[ln |y|] = d/dr E[|y|^r]` at `r = 0`, from digamma values.
    pub fn log_moment_exact(&self) -> Result<f64, EvalError> {
        let (l, r) = self.strip()?;
        if !(-1.0 > l && -1.0 < r) {
            return Err(EvalError::Domain("density kernel does not integrate".into()));
        }
        Ok(-self.seq.params.c.ln() - hfunc::dln_theta(&self.seq, -1.0)?)
    }

    /// `exp(E[ln |y|])`.
    pub fn geometric_power(&self, cfg: &EvalConfig) -> Result<f64, EvalError> {
        Ok(self.log_moment(cfg)?.exp())
    }

    /// Writes `x,pdf,cdf` rows.
    pub fn write_csv<W: Write>(&self, xs: &[f64], out: W, cfg: &EvalConfig) -> Result<(), Box<dyn std::error::Error>> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "pdf", "cdf"])?;
        for &x in xs {
            w.serialize((x, self.pdf(x, cfg)?, self.cdf(x, cfg)?))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `S(α, β, γ, μ)` in the canonical characteristic-function form
/// `exp{−γ|ω|^α [1 − iβ sgn(ω) tan(πα/2)] + iμω}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, mu: f64) -> Self {
        StableParams { alpha, beta, gamma, mu }
    }

    pub fn symmetric(alpha: f64, gamma: f64) -> Self {
        StableParams { alpha, beta: 0.0, gamma, mu: 0.0 }
    }

    fn check(&self) -> Result<(), EvalError> {
        let StableParams { alpha, beta, gamma, mu } = *self;
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(EvalError::Domain(format!("stable index must lie in (0, 2], got {alpha}")));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(EvalError::Domain(format!("skewness must lie in [-1, 1], got {beta}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) || !mu.is_finite() {
            return Err(EvalError::Domain(format!("dispersion must be positive and location finite, got γ={gamma} μ={mu}")));
        }
        if alpha == 1.0 && beta != 0.0 {
            return Err(EvalError::Domain("unsupported: alpha=1 with beta!=0".into()));
        }
        Ok(())
    }

    fn tan_term(&self) -> f64 {
        if self.beta == 0.0 {
            0.0
        } else {
            self.beta * (PI * self.alpha / 2.0).tan()
        }
    }

    /// `ω_{α,β,γ}`.
    pub fn omega(&self) -> f64 {
        let t = self.tan_term();
        (self.gamma * (1.0 + t * t).sqrt()).powf(-1.0 / self.alpha)
    }

    /// `θ_{α,β}`.
    pub fn theta(&self) -> f64 {
        self.tan_term().atan() / (PI * self.alpha)
    }

    /// Nonnegative support: `0 < α < 1`, `β = 1`, `μ = 0`.
    pub fn is_nonnegative(&self) -> bool {
        self.alpha < 1.0 && self.beta == 1.0 && self.mu == 0.0
    }
}

/// The H-kernel giving the stable density as a function of `|x − μ|` on the
/// side `sign(x − μ) = sign`.
pub fn stable_kernel(sp: &StableParams, sign: f64) -> Result<HSeq, EvalError> {
    sp.check()?;
    let (alpha, w) = (sp.alpha, sp.omega());
    if sp.is_nonnegative() {
        if sign < 0.0 {
            return Err(EvalError::Domain("nonnegative stable law has no mass below zero".into()));
        }
        return Ok(HSeq::from_parts((0, 1, 1, 1), w / alpha, w, &[1.0 - 1.0 / alpha], &[0.0], &[1.0 / alpha], &[1.0])?);
    }
    let st = sign.signum() * sp.theta();
    Ok(HSeq::from_parts(
        (1, 1, 2, 2),
        w / alpha,
        w,
        &[1.0 - 1.0 / alpha, 0.5 - st],
        &[0.0, 0.5 - st],
        &[1.0 / alpha, 0.5 + st],
        &[1.0, 0.5 + st],
    )?)
}

/// The H-variate of a stable law. Symmetric laws (`β = 0`, `μ = 0`) give a
/// symmetric variate; nonnegative laws give the one-sided `(0,1,1,1)` form.
/// Any other law gives the one-sided variate of `|x − μ|` restricted to the
/// side `sign`, whose mass is the probability of that side.
pub fn stable_to_h(sp: &StableParams, sign: f64) -> Result<HVariate, EvalError> {
    let kern = stable_kernel(sp, sign)?;
    if sp.beta == 0.0 && sp.mu == 0.0 {
        let mut seq = kern;
        seq.params.k *= 2.0;
        return Ok(HVariate::symmetric(seq)?);
    }
    Ok(HVariate::one_sided(kern)?)
}

/// Stable density at `x`.
pub fn stable_pdf(sp: &StableParams, x: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
    let d = x - sp.mu;
    if sp.is_nonnegative() && d <= 0.0 {
        return Ok(0.0);
    }
    let kern = stable_kernel(sp, if d < 0.0 { -1.0 } else { 1.0 })?;
    if d == 0.0 {
        return hfunc::eval_h_at_zero(&kern);
    }
    hfunc::eval_h(d.abs(), &kern, cfg)
}

fn check_nu(nu: f64) -> Result<(), EvalError> {
    if nu > 0.0 && nu < 1.0 {
        Ok(())
    } else {
        Err(EvalError::Domain(format!("order must lie in (0, 1), got {nu}")))
    }
}

/// `P_MW = (1, 1, 1−ν, 0, ν, 1)` with order `(1, 0, 1, 1)`.
pub fn mwright_kernel(nu: f64) -> Result<HSeq, EvalError> {
    check_nu(nu)?;
    Ok(HSeq::from_parts((1, 0, 1, 1), 1.0, 1.0, &[1.0 - nu], &[0.0], &[nu], &[1.0])?)
}

/// `M_ν(t)` through the H-kernel.
pub fn mwright_pdf(nu: f64, t: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
    let k = mwright_kernel(nu)?;
    if t < 0.0 {
        return Err(EvalError::Domain(format!("M-Wright argument must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return hfunc::eval_h_at_zero(&k);
    }
    hfunc::eval_h(t, &k, cfg)
}

/// `M_ν(t) = Σ (−t)^n / (n! Γ(1 − ν − νn))`.
pub fn mwright_series(nu: f64, t: f64, terms: usize) -> f64 {
    let mut acc = 0.0;
    let mut p = 1.0; // (-t)^n / n!
    for n in 0..terms {
        acc += p * rgamma(1.0 - nu - nu * n as f64);
        p *= -t / (n as f64 + 1.0);
        if p == 0.0 {
            break;
        }
    }
    acc
}

/// Generalised Mittag-Leffler function `E_{α,β}(t)`.
///
/// The power series is summed unless, for negative `t`, its largest term is
/// so much bigger than the sum that rounding would exceed the tolerance; then
/// the H-kernel `Γ(−s)Γ(1+s)/Γ(β+αs)` is evaluated at `−t` instead.
pub fn mittag_leffler(alpha: f64, beta: f64, t: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(EvalError::Domain(format!("E_(α,β) needs α, β > 0, got ({alpha}, {beta})")));
    }
    if t >= 0.0 {
        return ml_series(alpha, beta, t).map(|r| r.0);
    }
    if let Ok((v, peak)) = ml_series(alpha, beta, t) {
        if peak * 4.0 * f64::EPSILON <= cfg.rel_tolerance * v.abs() {
            return Ok(v);
        }
    }
    let k = HSeq::from_parts((1, 1, 1, 2), 1.0, 1.0, &[0.0], &[0.0, 1.0 - beta], &[1.0], &[1.0, alpha])?;
    hfunc::eval_h(-t, &k, cfg)
}

/// Sum and largest term magnitude.
fn ml_series(alpha: f64, beta: f64, t: f64) -> Result<(f64, f64), EvalError> {
    if t == 0.0 {
        return Ok((rgamma(beta), rgamma(beta).abs()));
    }
    // terms t^n/Γ(αn+β) in log space to avoid intermediate overflow
    let lt = t.abs().ln();
    let mut acc = 0.0;
    let mut comp = 0.0;
    let mut peak = 0.0f64;
    let mut small = 0;
    for n in 0..100_000usize {
        let z = alpha * n as f64 + beta;
        let (lg, sg) = crate::gamma::ln_gamma_sign(z);
        if lg.is_infinite() {
            continue;
        }
        let lterm = n as f64 * lt - lg;
        if lterm > 709.0 {
            return Err(EvalError::Divergent(format!("E_(α,β)({t}) overflows")));
        }
        let mut term = sg * lterm.exp();
        peak = peak.max(term.abs());
        if t < 0.0 && n % 2 == 1 {
            term = -term;
        }
        // Kahan summation
        let y = term - comp;
        let s = acc + y;
        comp = (s - acc) - y;
        acc = s;
        if n as f64 * alpha > lt.max(1.0) * 2.0 && term.abs() <= 1e-17 * acc.abs().max(1e-300) {
            small += 1;
            if small > 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    if !acc.is_finite() {
        return Err(EvalError::Divergent(format!("E_(α,β)({t}) overflows")));
    }
    Ok((acc, peak))
}

/// Kernel of the Mittag-Leffler distribution of order `ν`, whose Laplace
/// transform is `1/(1 + s^ν)`.
pub fn mld_kernel(nu: f64) -> Result<HSeq, EvalError> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(EvalError::Domain(format!("order must lie in (0, 1], got {nu}")));
    }
    let r = 1.0 / nu;
    Ok(HSeq::from_parts((1, 1, 1, 2), r, 1.0, &[1.0 - r], &[1.0 - r, 0.0], &[r], &[r, 1.0])?)
}

/// Density of the Mittag-Leffler distribution.
pub fn mld_density(nu: f64, t: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    hfunc::eval_h(t, &mld_kernel(nu)?, cfg)
}

/// The M-Wright law as a one-sided variate.
pub fn mwright_variate(nu: f64) -> Result<HVariate, EvalError> {
    Ok(HVariate::one_sided(mwright_kernel(nu)?)?)
}

/// `E[ln x]` for the one-sided stable law `S(α, 1, γ, 0)`:
/// `(1/α − 1)γ_e + (1/α)·ln(γ/cos(πα/2))`.
pub fn onesided_stable_log_moment(alpha: f64, gamma: f64) -> f64 {
    (1.0 / alpha - 1.0) * EULER_GAMMA + (gamma / (PI * alpha / 2.0).cos()).ln() / alpha
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn bm_parent() -> HVariate {
        HVariate::symmetric(HSeq::from_parts((1, 0, 0, 1), 1.0 / (2.0 * PI.sqrt()), 0.5, &[], &[0.0], &[], &[0.5]).unwrap()).unwrap()
    }

    fn levy(a: f64) -> HVariate {
        HVariate::one_sided(HSeq::from_parts((0, 1, 1, 0), 4.0 / PI.sqrt(), 4.0, &[-0.5], &[], &[1.0], &[]).unwrap().scale(a * a).unwrap())
            .unwrap()
    }

    #[test]
    fn symmetric_gaussian_pdf_cdf() {
        let v = bm_parent();
        assert!((v.pdf(0.0, &cfg()).unwrap() - 0.5 / PI.sqrt()).abs() < 1e-14);
        assert_eq!(v.cdf(0.0, &cfg()).unwrap(), 0.5);
        for &x in &[0.3, 1.0, 2.5] {
            assert_eq!(v.pdf(x, &cfg()).unwrap(), v.pdf(-x, &cfg()).unwrap());
            let s = v.cdf(x, &cfg()).unwrap() + v.cdf(-x, &cfg()).unwrap();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn levy_values() {
        let v = levy(1.0);
        assert!((v.pdf(1.0, &cfg()).unwrap() - (-0.25f64).exp() / (4.0 * PI).sqrt()).abs() < 1e-12);
        // erfc(1/2)
        let erfc_half = 0.479_500_122_186_953_5;
        assert!((v.cdf(1.0, &cfg()).unwrap() - erfc_half).abs() < 1e-10);
        assert!((v.survival(1.0, &cfg()).unwrap() - (1.0 - erfc_half)).abs() < 1e-10);
        assert_eq!(v.moment(1).unwrap(), Moment::Undefined);
        assert!((v.moment(0).unwrap().value().unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_moments_and_mgf() {
        let v = bm_parent();
        assert_eq!(v.moment(1).unwrap(), Moment::Finite(0.0));
        assert!((v.moment(2).unwrap().value().unwrap() - 2.0).abs() < 1e-13);
        assert!((v.moment(4).unwrap().value().unwrap() - 12.0).abs() < 1e-12);
        assert!((v.mgf(1.0, &cfg()).unwrap() - std::f64::consts::E).abs() < 1e-9);
        assert_eq!(v.mgf(0.0, &cfg()).unwrap(), 1.0);
    }

    #[test]
    fn log_moments_of_levy() {
        let v = levy(1.0);
        let want = EULER_GAMMA;
        assert!((v.log_moment_exact().unwrap() - want).abs() < 1e-13);
        let d = v.log_moment_difference(&cfg()).unwrap();
        assert!((d - want).abs() < 1e-8, "{d}");
    }

    #[test]
    fn stable_reductions() {
        let g = StableParams::symmetric(2.0, 1.0);
        let c = StableParams::symmetric(1.0, 1.0);
        for &x in &[-3.0, -0.5, 0.0, 0.7, 4.0] {
            let want = (-x * x / 4.0f64).exp() / (4.0 * PI).sqrt();
            assert!((stable_pdf(&g, x, &cfg()).unwrap() - want).abs() < 1e-12);
            let want = 1.0 / (PI * (1.0 + x * x));
            assert!((stable_pdf(&c, x, &cfg()).unwrap() - want).abs() < 1e-12);
        }
        assert!(stable_to_h(&StableParams::new(1.0, 0.5, 1.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn mwright_half_is_half_gaussian() {
        for &t in &[0.0, 0.4, 1.0, 3.0] {
            let want = (-t * t / 4.0f64).exp() / PI.sqrt();
            assert!((mwright_pdf(0.5, t, &cfg()).unwrap() - want).abs() < 1e-12);
            assert!((mwright_series(0.5, t, 200) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn mittag_leffler_exponential() {
        for i in 0..=40 {
            let t = i as f64 * 0.25;
            let e = mittag_leffler(1.0, 1.0, -t, &cfg()).unwrap();
            assert!((e - (-t).exp()).abs() < 1e-12, "t={t} {e}");
        }
        assert_eq!(mittag_leffler(0.3, 1.0, 0.0, &cfg()).unwrap(), 1.0);
    }
}
