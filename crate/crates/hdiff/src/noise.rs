//! First-passage time ("H-noise") of an H-diffusion to the level `x = a`:
//! its law, tail constant, logarithmic moment and geometric power.

use crate::diffusion::{DiffusionSpec, Preset, ShdParams};
use crate::gamma::{EULER_GAMMA, EXP_EULER_GAMMA};
use crate::hfunc::{self, AsymptoticExpansion, EvalConfig, EvalError, Side};
use crate::hvariate::HVariate;
use crate::params::{HSeq, OrderSeq, ParamSeq};
use serde::Serialize;
use std::f64::consts::PI;

/// Euler-Mascheroni constant `γ_e`.
pub const GAMMA_E: f64 = EULER_GAMMA;
/// `𝒢 = e^{γ_e}`.
pub const EXP_GAMMA_E: f64 = EXP_EULER_GAMMA;

/// Maps the symmetric position kernel `P` (law at `t = 1`, exponent `ω`) to
/// the unit-distance first-passage kernel `P_t`, before scaling:
/// order `(n, m, q, p)`, `k/c`, `c = 1`, `1 − b − B − B/ω`, `1 − a − A − A/ω`,
/// `B/ω`, `A/ω`.
pub fn fpt_kernel(position: &HSeq, omega: f64) -> HSeq {
    let OrderSeq { m, n, p, q } = position.order;
    let s = &position.params;
    let new_a = s.b.iter().zip(&s.big_b).map(|(b, bb)| 1.0 - b - bb - bb / omega).collect();
    let new_b = s.a.iter().zip(&s.big_a).map(|(a, aa)| 1.0 - a - aa - aa / omega).collect();
    HSeq {
        order: OrderSeq::new(n, m, q, p),
        params: ParamSeq {
            k: s.k / s.c,
            c: 1.0,
            a: new_a,
            b: new_b,
            big_a: s.big_b.iter().map(|x| x / omega).collect(),
            big_b: s.big_a.iter().map(|x| x / omega).collect(),
        },
    }
}

/// The standard H-noise sequence `P_sHn` as printed for SHD.
pub fn standard_noise_seq(p: &ShdParams) -> HSeq {
    let (a1, a2, w1, w2) = (p.alpha1, p.alpha2, p.omega1, p.omega2);
    let w = w1 * w2;
    HSeq::from_parts(
        (1, 2, 3, 3),
        2.0 / a1,
        1.0,
        &[-1.0 / w2, -1.0 / w, -0.5 / w],
        &[-1.0 / (a1 * w), -0.5 / w, -a2 / w2],
        &[1.0 / w2, 1.0 / w, 0.5 / w],
        &[1.0 / (a1 * w), 0.5 / w, a2 / w2],
    )
    .expect("static layout")
}

/// The first-passage time to distance `a`.
pub fn fpt_variate(spec: &DiffusionSpec, a: f64) -> Result<HVariate, EvalError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(EvalError::Domain(format!("distance must be positive, got {a}")));
    }
    let pos = spec.combined_seq()?;
    let w = spec.exponent();
    let scale = (a * pos.params.c).powf(1.0 / w);
    Ok(HVariate::one_sided(fpt_kernel(&pos, w).scale(scale)?)?)
}

/// The H-noise of one link: the first-passage law with its derived powers.
#[derive(Debug, Clone, Serialize)]
pub struct NoiseModel {
    pub spec: DiffusionSpec,
    pub a: f64,
    pub fpt: HVariate,
    /// Position kernel `P_(ω1)` at `t = 1`.
    #[serde(skip)]
    position: HSeq,
}

impl NoiseModel {
    pub fn new(spec: &DiffusionSpec, a: f64) -> Result<Self, EvalError> {
        let fpt = fpt_variate(spec, a)?;
        Ok(NoiseModel { spec: spec.clone(), a, fpt, position: spec.combined_seq()? })
    }

    pub fn omega(&self) -> f64 {
        self.spec.exponent()
    }

    pub fn pdf(&self, t: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
        self.fpt.pdf(t, cfg)
    }

    pub fn cdf(&self, t: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
        self.fpt.cdf(t, cfg)
    }

    /// `P(t̂ > t)`.
    pub fn survival(&self, t: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
        self.fpt.survival(t, cfg)
    }

    /// `κ = ω1ω2·min_{j ≤ m}{1 + b_j/B_j}` over the position sequence.
    pub fn tail_constant(&self) -> f64 {
        let s = &self.position.params;
        let m = self.position.order.m;
        let inner = (0..m).map(|j| 1.0 + s.b[j] / s.big_b[j]).fold(f64::INFINITY, f64::min);
        self.omega() * inner
    }

    /// Tail constant read off the leading large-`t` pole of the survival
    /// kernel, after cancellation of coincident gamma factors.
    pub fn tail_constant_from_kernel(&self) -> Result<f64, EvalError> {
        Ok(-self.survival_tail()?.exponent)
    }

    /// Kernel of `P(t̂ > t)`.
    pub fn survival_kernel(&self) -> Result<HSeq, EvalError> {
        Ok(HSeq::cdf_kernel().inverse().convolve(&self.fpt.seq().conjugate(1.0)?))
    }

    /// Leading large-`t` term of the survival function, `σ·t^{−κ}`.
    pub fn survival_tail(&self) -> Result<AsymptoticExpansion, EvalError> {
        hfunc::asymptotic_expansion(&self.survival_kernel()?, Side::NearInfinity)
    }

    /// `E[ln t̂]` by the H-transform.
    pub fn log_moment(&self, cfg: &EvalConfig) -> Result<f64, EvalError> {
        self.fpt.log_moment(cfg)
    }

    /// Closed form for SHD, `None` otherwise.
    pub fn log_moment_closed(&self) -> Option<f64> {
        self.spec.shd.map(|p| shd_log_moment(&p, self.a))
    }

    /// Geometric power `exp(E[ln t̂])` from the digamma form, which is exact
    /// for every H-noise.
    pub fn geometric_power(&self) -> Result<f64, EvalError> {
        Ok(self.fpt.log_moment_exact()?.exp())
    }

    /// `N = S²`.
    pub fn noise_power(&self) -> Result<f64, EvalError> {
        let s = self.geometric_power()?;
        Ok(s * s)
    }
}

/// Tail constant of the standard H-noise.
pub fn shd_tail_constant(p: &ShdParams) -> f64 {
    if p.omega1 < 1.0 {
        p.omega1 * p.omega2
    } else {
        p.omega2
    }
}

/// `E[ln t̂]` for SHD:
/// `((1 − 1/α1 + (1 − α2)ω1)/(ω1ω2))·γ_e + ln(a/(β1β2^{ω1}))/(ω1ω2)`.
pub fn shd_log_moment(p: &ShdParams, a: f64) -> f64 {
    let w = p.omega1 * p.omega2;
    (1.0 - 1.0 / p.alpha1 + (1.0 - p.alpha2) * p.omega1) / w * GAMMA_E + (a / p.position_scale()).ln() / w
}

/// `(a·𝒢^{1 − 1/α1 + (1 − α2)ω1} / (β1β2^{ω1}))^{1/(ω1ω2)}`.
pub fn shd_geometric_power(p: &ShdParams, a: f64) -> f64 {
    let e = 1.0 - 1.0 / p.alpha1 + (1.0 - p.alpha2) * p.omega1;
    (a * EXP_GAMMA_E.powf(e) / p.position_scale()).powf(1.0 / (p.omega1 * p.omega2))
}

/// One row of the H-noise catalogue: `t̂ ~ H(O, P⟨a^{1/ω}⟩)` and
/// `S = a^{1/ω}·𝒢^{1/ω − c}`.
#[derive(Debug, Clone, Serialize)]
pub struct NoiseRow {
    pub preset: String,
    pub seq: HSeq,
    pub omega: f64,
    pub c: f64,
    pub a: f64,
    pub geometric_power: f64,
}

impl NoiseRow {
    /// The noise variate at the row's distance.
    pub fn variate(&self) -> Result<HVariate, EvalError> {
        Ok(HVariate::one_sided(self.seq.scale(self.a.powf(1.0 / self.omega))?)?)
    }
}

/// The catalogue row for `preset` at distance `a`.
pub fn noise_preset_table(preset: &Preset, a: f64) -> Result<NoiseRow, EvalError> {
    preset.spec()?;
    let sp = PI.sqrt();
    let (seq, omega, c) = match *preset {
        Preset::StFd { alpha, beta } => (
            HSeq::from_parts(
                (1, 2, 3, 3),
                2.0 / alpha,
                1.0,
                &[-1.0 / beta, -alpha / beta, -alpha / (2.0 * beta)],
                &[-1.0 / beta, -alpha / (2.0 * beta), -1.0],
                &[1.0 / beta, alpha / beta, alpha / (2.0 * beta)],
                &[1.0 / beta, alpha / (2.0 * beta), 1.0],
            )?,
            beta / alpha,
            1.0,
        ),
        Preset::SFd { alpha, .. } => (
            HSeq::from_parts((1, 1, 2, 2), 2.0 / alpha, 1.0, &[-alpha, -alpha / 2.0], &[-1.0, -alpha / 2.0], &[alpha, alpha / 2.0], &[1.0, alpha / 2.0])?,
            1.0 / alpha,
            1.0,
        ),
        Preset::TFd { beta } => (HSeq::from_parts((0, 1, 1, 1), 1.0, 1.0, &[-2.0 / beta], &[-1.0], &[2.0 / beta], &[1.0])?, beta / 2.0, 1.0),
        Preset::EkFd { alpha, beta } => {
            let f = 4f64.powf(1.0 / alpha);
            (
                HSeq::from_parts((0, 2, 2, 1), f / sp, f, &[-1.0 / alpha, 0.5 - 1.0 / alpha], &[-beta / alpha], &[1.0 / alpha; 2], &[beta / alpha])?,
                alpha / 2.0,
                beta / alpha,
            )
        }
        Preset::Gbm { beta } => {
            let f = 4f64.powf(1.0 / beta);
            (HSeq::from_parts((0, 2, 2, 1), f / sp, f, &[-1.0 / beta, 0.5 - 1.0 / beta], &[-1.0], &[1.0 / beta; 2], &[1.0])?, beta / 2.0, 1.0)
        }
        Preset::Fbm { alpha } => {
            let f = 4f64.powf(1.0 / alpha);
            (HSeq::from_parts((0, 1, 1, 0), f / sp, f, &[0.5 - 1.0 / alpha], &[], &[1.0 / alpha], &[])?, alpha / 2.0, 1.0 / alpha)
        }
        Preset::Bm => (HSeq::from_parts((0, 1, 1, 0), 4.0 / sp, 4.0, &[-0.5], &[], &[1.0], &[])?, 0.5, 1.0),
    };
    let gp = a.powf(1.0 / omega) * EXP_GAMMA_E.powf(1.0 / omega - c);
    Ok(NoiseRow { preset: preset.name().to_string(), seq, omega, c, a, geometric_power: gp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::shd_standard;

    #[test]
    fn bm_is_levy() {
        let nm = NoiseModel::new(&Preset::Bm.spec().unwrap(), 1.0).unwrap();
        let cfg = EvalConfig::default();
        for &t in &[0.05, 0.3, 1.0, 4.0, 50.0] {
            let want = 1.0 / (4.0 * PI * t * t * t).sqrt() * (-1.0 / (4.0 * t)).exp();
            assert!((nm.pdf(t, &cfg).unwrap() - want).abs() < 1e-12);
        }
        assert!((nm.geometric_power().unwrap() - EXP_GAMMA_E).abs() < 1e-12);
        assert!((nm.tail_constant() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn standard_noise_matches_pipeline_layout() {
        let s = shd_standard(2.0, 0.5, 1.0).unwrap();
        let p = s.shd.unwrap();
        let derived = fpt_kernel(&s.combined_seq().unwrap(), s.exponent());
        assert!(derived.same_layout(&standard_noise_seq(&p), 1e-12));
    }

    #[test]
    fn tail_constants() {
        for (a1, a2, k) in [(2.0, 1.0, 0.5), (2.0, 0.5, 0.25), (1.8, 1.0, 1.0 / 1.8)] {
            let s = shd_standard(a1, a2, 1e-10).unwrap();
            let nm = NoiseModel::new(&s, 1e-5).unwrap();
            assert!((nm.tail_constant() - k).abs() < 1e-12);
            assert!((shd_tail_constant(&s.shd.unwrap()) - k).abs() < 1e-12);
            assert!((nm.tail_constant_from_kernel().unwrap() - k).abs() < 1e-12);
        }
    }
}
