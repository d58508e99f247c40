//! Self-similar H-processes, subordination, H-diffusion and the standard
//! H-diffusion (SHD) family with its named presets.

use crate::hfunc::EvalError;
use crate::hvariate::HVariate;
use crate::params::{HSeq, ParamError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// A self-similar process whose law at time `t` is `law_at_1` scaled by
/// `t^ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HProcess {
    pub law_at_1: HVariate,
    pub omega: f64,
}

impl HProcess {
    pub fn new(law_at_1: HVariate, omega: f64) -> Result<Self, ParamError> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(ParamError::NonPositive { name: "omega", value: omega });
        }
        Ok(HProcess { law_at_1, omega })
    }

    pub fn is_symmetric(&self) -> bool {
        self.law_at_1.is_symmetric()
    }

    /// Law at time `t > 0`.
    pub fn at(&self, t: f64) -> Result<HVariate, EvalError> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(EvalError::Domain(format!("time must be positive, got {t}")));
        }
        Ok(self.law_at_1.scaled(t.powf(self.omega))?)
    }
}

/// Directing (operational-time) process. `Degenerate` is the delta law at 1,
/// which turns subordination into the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Directing {
    Degenerate,
    Process(HProcess),
}

/// Subordinates `parent` to `directing`: the law of `p(1)·d(1)^{ω1}` with
/// exponent `ω1·ω2`, through `P1 ⊛ E(1, ω1, 1/ω1 − 1)P2`.
pub fn subordinate(parent: &HProcess, directing: &Directing) -> Result<HProcess, EvalError> {
    let d = match directing {
        Directing::Degenerate => return Ok(parent.clone()),
        Directing::Process(d) => d,
    };
    if d.is_symmetric() {
        return Err(EvalError::Domain("directing process must be nonnegative".into()));
    }
    let w1 = parent.omega;
    let dir = d.law_at_1.seq().elementary(1.0, w1, 1.0 / w1 - 1.0)?;
    let seq = parent.law_at_1.seq().convolve(&dir);
    Ok(HProcess::new(HVariate::new(seq, parent.is_symmetric())?, w1 * d.omega)?)
}

/// Sampling recipe for the parent law at `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ParentLaw {
    /// `S(α, 0, γ, 0)`.
    SymmetricStable { alpha: f64, gamma: f64 },
}

/// Sampling recipe for the directing law at `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DirectingLaw {
    Degenerate,
    /// M-Wright of order `alpha`, scaled by `scale`.
    MWright { alpha: f64, scale: f64 },
    /// `S(α, 1, γ, 0)`.
    OneSidedStable { alpha: f64, gamma: f64 },
}

/// Parameters of a standard H-diffusion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShdParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl ShdParams {
    /// Diffusion coefficient `K = β1^{α1}·β2`.
    pub fn k(&self) -> f64 {
        self.beta1.powf(self.alpha1) * self.beta2
    }

    /// `β1·β2^{ω1}`, the scale of the position law at `t = 1`.
    pub fn position_scale(&self) -> f64 {
        self.beta1 * self.beta2.powf(self.omega1)
    }
}

/// An H-diffusion (or the FBM/BM degenerate case).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSpec {
    pub name: String,
    pub parent: HProcess,
    pub directing: Directing,
    pub omega1: f64,
    /// Exponent of the directing process; `None` for a degenerate one.
    pub omega2: Option<f64>,
    pub shd: Option<ShdParams>,
    pub parent_law: ParentLaw,
    pub directing_law: DirectingLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MsdClass {
    Subdiffusion,
    Normal,
    Superdiffusion,
}

impl fmt::Display for MsdClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MsdClass::Subdiffusion => "subdiffusion",
            MsdClass::Normal => "normal",
            MsdClass::Superdiffusion => "superdiffusion",
        })
    }
}

impl DiffusionSpec {
    /// Self-similarity exponent of the position, `ω1·ω2` (or `ω1`).
    pub fn exponent(&self) -> f64 {
        self.omega1 * self.omega2.unwrap_or(1.0)
    }

    /// The subordinated process.
    pub fn position_process(&self) -> Result<HProcess, EvalError> {
        subordinate(&self.parent, &self.directing)
    }

    /// Law of the position at time `t`.
    pub fn position_variate(&self, t: f64) -> Result<HVariate, EvalError> {
        self.position_process()?.at(t)
    }

    /// Diffusion coefficient, when the spec came from SHD parameters.
    pub fn k(&self) -> Option<f64> {
        self.shd.map(|s| s.k())
    }

    /// MSD exponent `2ω1ω2` and its class.
    pub fn msd_classify(&self) -> (MsdClass, f64) {
        let e = 2.0 * self.exponent();
        let class = if (e - 1.0).abs() <= 1e-12 {
            MsdClass::Normal
        } else if e < 1.0 {
            MsdClass::Subdiffusion
        } else {
            MsdClass::Superdiffusion
        };
        (class, e)
    }

    /// The whole-process sequence `P_(ω1)` before time scaling.
    pub fn combined_seq(&self) -> Result<HSeq, EvalError> {
        Ok(self.position_process()?.law_at_1.seq().clone())
    }
}

fn check_range(name: &'static str, v: f64, lo: f64, hi: f64, hi_closed: bool) -> Result<(), EvalError> {
    let ok = v > lo && (v < hi || (hi_closed && v == hi));
    if ok {
        Ok(())
    } else {
        let close = if hi_closed { ']' } else { ')' };
        Err(EvalError::Domain(format!("{name} must lie in ({lo}, {hi}{close}, got {v}")))
    }
}

fn positive(name: &'static str, v: f64) -> Result<(), EvalError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(EvalError::Domain(format!("{name} must be positive, got {v}")))
    }
}

/// `P(α1) = (2/α1, 1, (1−1/α1, ½), (0, ½), (1/α1, ½), (1, ½))`, order
/// `(1, 1, 2, 2)`: the symmetric stable law `S(α1, 0, 1, 0)`.
pub fn stable_parent_seq(alpha1: f64) -> HSeq {
    HSeq::from_parts((1, 1, 2, 2), 2.0 / alpha1, 1.0, &[1.0 - 1.0 / alpha1, 0.5], &[0.0, 0.5], &[1.0 / alpha1, 0.5], &[1.0, 0.5])
        .expect("static layout")
}

/// `P(α2) = (1, 1, 1−α2, 0, α2, 1)`, order `(1, 0, 1, 1)`: M-Wright.
pub fn mwright_seq(alpha2: f64) -> HSeq {
    HSeq::from_parts((1, 0, 1, 1), 1.0, 1.0, &[1.0 - alpha2], &[0.0], &[alpha2], &[1.0]).expect("static layout")
}

/// Gaussian parent `(1/(2√π), 1/2, –, 0, –, 1/2)`, order `(1, 0, 0, 1)`.
pub fn gaussian_parent_seq() -> HSeq {
    HSeq::from_parts((1, 0, 0, 1), 0.5 / PI.sqrt(), 0.5, &[], &[0.0], &[], &[0.5]).expect("static layout")
}

/// Half-Gaussian M-Wright form of the Gaussian parent, `(1, 1, ½, 0, ½, 1)`.
pub fn mwright_parent_seq() -> HSeq {
    HSeq::from_parts((1, 0, 1, 1), 1.0, 1.0, &[0.5], &[0.0], &[0.5], &[1.0]).expect("static layout")
}

/// Standard H-diffusion from its six parameters.
pub fn make_shd(alpha1: f64, alpha2: f64, omega1: f64, omega2: f64, beta1: f64, beta2: f64) -> Result<DiffusionSpec, EvalError> {
    check_range("alpha1", alpha1, 0.0, 2.0, true)?;
    check_range("alpha2", alpha2, 0.0, 1.0, true)?;
    for (n, v) in [("omega1", omega1), ("omega2", omega2), ("beta1", beta1), ("beta2", beta2)] {
        positive(n, v)?;
    }
    let parent = HProcess::new(HVariate::symmetric(stable_parent_seq(alpha1).scale(beta1)?)?, omega1)?;
    let directing = HProcess::new(HVariate::one_sided(mwright_seq(alpha2).scale(beta2)?)?, omega2)?;
    Ok(DiffusionSpec {
        name: format!("SHD(α1={alpha1}, α2={alpha2}, ω1={omega1}, ω2={omega2}, β1={beta1}, β2={beta2})"),
        parent,
        directing: Directing::Process(directing),
        omega1,
        omega2: Some(omega2),
        shd: Some(ShdParams { alpha1, alpha2, omega1, omega2, beta1, beta2 }),
        parent_law: ParentLaw::SymmetricStable { alpha: alpha1, gamma: beta1.powf(alpha1) },
        directing_law: DirectingLaw::MWright { alpha: alpha2, scale: beta2 },
    })
}

/// The `(α1, α2)`-SHD: `ω1 = 1/α1`, `ω2 = α2`, `β1·β2^{1/α1} = K^{1/α1}`,
/// realised with `β2 = 1`.
pub fn shd_standard(alpha1: f64, alpha2: f64, k: f64) -> Result<DiffusionSpec, EvalError> {
    positive("K", k)?;
    let mut s = make_shd(alpha1, alpha2, 1.0 / alpha1, alpha2, k.powf(1.0 / alpha1), 1.0)?;
    s.name = format!("({alpha1},{alpha2})-SHD");
    Ok(s)
}

/// Diffusion models of the preset catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Preset {
    /// Space-time fractional diffusion.
    StFd { alpha: f64, beta: f64 },
    /// Space fractional diffusion with a stable directing law.
    SFd { alpha: f64, beta: f64 },
    /// Time fractional diffusion.
    TFd { beta: f64 },
    /// Erdélyi-Kober fractional diffusion.
    EkFd { alpha: f64, beta: f64 },
    /// Grey Brownian motion.
    Gbm { beta: f64 },
    /// Fractional Brownian motion.
    Fbm { alpha: f64 },
    /// Brownian motion.
    Bm,
}

pub const PRESET_NAMES: [&str; 7] = ["ST-FD", "S-FD", "T-FD", "EK-FD", "GBM", "FBM", "BM"];

impl Preset {
    /// Builds from a catalogue name and the row parameters; unused
    /// parameters are ignored.
    pub fn from_name(name: &str, alpha: Option<f64>, beta: Option<f64>) -> Result<Self, EvalError> {
        let need = |v: Option<f64>, what: &str| v.ok_or_else(|| EvalError::Domain(format!("{name} needs {what}")));
        let p = match name.to_ascii_uppercase().as_str() {
            "ST-FD" | "STFD" => Preset::StFd { alpha: need(alpha, "alpha")?, beta: need(beta, "beta")? },
            "S-FD" | "SFD" => Preset::SFd { alpha: need(alpha, "alpha")?, beta: need(beta, "beta")? },
            "T-FD" | "TFD" => Preset::TFd { beta: need(beta, "beta")? },
            "EK-FD" | "EKFD" => Preset::EkFd { alpha: need(alpha, "alpha")?, beta: need(beta, "beta")? },
            "GBM" => Preset::Gbm { beta: need(beta, "beta")? },
            "FBM" => Preset::Fbm { alpha: need(alpha, "alpha")? },
            "BM" => Preset::Bm,
            _ => return Err(EvalError::Domain(format!("unknown preset {name}; expected one of {}", PRESET_NAMES.join(", ")))),
        };
        Ok(p)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::StFd { .. } => "ST-FD",
            Preset::SFd { .. } => "S-FD",
            Preset::TFd { .. } => "T-FD",
            Preset::EkFd { .. } => "EK-FD",
            Preset::Gbm { .. } => "GBM",
            Preset::Fbm { .. } => "FBM",
            Preset::Bm => "BM",
        }
    }

    fn check(&self) -> Result<(), EvalError> {
        let a = |v| check_range("alpha", v, 0.0, 2.0, true);
        let b = |v| check_range("beta", v, 0.0, 1.0, false);
        match *self {
            Preset::StFd { alpha, beta } | Preset::SFd { alpha, beta } | Preset::EkFd { alpha, beta } => {
                a(alpha)?;
                b(beta)
            }
            Preset::TFd { beta } | Preset::Gbm { beta } => b(beta),
            Preset::Fbm { alpha } => a(alpha),
            Preset::Bm => Ok(()),
        }
    }

    /// The spec whose first-passage time the noise catalogue lists. It is
    /// `spec()` except for S-FD, whose noise row has `ω = 1/α`: the stable
    /// parent under a degenerate directing process.
    pub fn noise_spec(&self) -> Result<DiffusionSpec, EvalError> {
        match *self {
            Preset::SFd { alpha, .. } => {
                let mut s = self.spec()?;
                s.directing = Directing::Degenerate;
                s.directing_law = DirectingLaw::Degenerate;
                s.omega2 = None;
                s.parent = HProcess::new(HVariate::symmetric(stable_parent_seq(alpha))?, 1.0 / alpha)?;
                Ok(s)
            }
            _ => self.spec(),
        }
    }

    /// The diffusion spec of this catalogue row.
    pub fn spec(&self) -> Result<DiffusionSpec, EvalError> {
        self.check()?;
        let gauss = ParentLaw::SymmetricStable { alpha: 2.0, gamma: 1.0 };
        let mw = |beta: f64, omega2: f64| -> Result<(Directing, DirectingLaw), EvalError> {
            let d = HProcess::new(HVariate::one_sided(mwright_seq(beta))?, omega2)?;
            Ok((Directing::Process(d), DirectingLaw::MWright { alpha: beta, scale: 1.0 }))
        };
        let (parent_seq, parent_law, omega1, directing, directing_law, omega2) = match *self {
            Preset::StFd { alpha, beta } => {
                let (d, dl) = mw(beta, beta)?;
                (stable_parent_seq(alpha), ParentLaw::SymmetricStable { alpha, gamma: 1.0 }, 1.0 / alpha, d, dl, Some(beta))
            }
            Preset::SFd { alpha, beta } => {
                let cb = (PI * beta / 2.0).cos();
                // the catalogue row: k = cos(πβ/2)^β / β, c = cos(πβ/2)^β
                let c = cb.powf(beta);
                let seq = HSeq::from_parts((0, 1, 1, 1), c / beta, c, &[1.0 - 1.0 / beta], &[0.0], &[1.0 / beta], &[1.0])?;
                let d = HProcess::new(HVariate::one_sided(seq)?, 1.0 / beta)?;
                // c = (γ / cos(πβ/2))^{-1/β}  ⇒  γ = cos(πβ/2)^{1 − β²}
                let dl = DirectingLaw::OneSidedStable { alpha: beta, gamma: cb.powf(1.0 - beta * beta) };
                (stable_parent_seq(alpha), ParentLaw::SymmetricStable { alpha, gamma: 1.0 }, 1.0 / alpha, Directing::Process(d), dl, Some(1.0 / beta))
            }
            Preset::TFd { beta } => {
                let (d, dl) = mw(beta, beta)?;
                (mwright_parent_seq(), gauss, 0.5, d, dl, Some(beta))
            }
            Preset::EkFd { alpha, beta } => {
                let (d, dl) = mw(beta, alpha)?;
                (gaussian_parent_seq(), gauss, 0.5, d, dl, Some(alpha))
            }
            Preset::Gbm { beta } => {
                let (d, dl) = mw(beta, beta)?;
                (gaussian_parent_seq(), gauss, 0.5, d, dl, Some(beta))
            }
            Preset::Fbm { alpha } => (gaussian_parent_seq(), gauss, alpha / 2.0, Directing::Degenerate, DirectingLaw::Degenerate, None),
            Preset::Bm => (gaussian_parent_seq(), gauss, 0.5, Directing::Degenerate, DirectingLaw::Degenerate, None),
        };
        let shd = match *self {
            Preset::StFd { alpha, beta } => Some(ShdParams { alpha1: alpha, alpha2: beta, omega1: 1.0 / alpha, omega2: beta, beta1: 1.0, beta2: 1.0 }),
            Preset::EkFd { alpha, beta } => Some(ShdParams { alpha1: 2.0, alpha2: beta, omega1: 0.5, omega2: alpha, beta1: 1.0, beta2: 1.0 }),
            Preset::Gbm { beta } => Some(ShdParams { alpha1: 2.0, alpha2: beta, omega1: 0.5, omega2: beta, beta1: 1.0, beta2: 1.0 }),
            Preset::Bm => Some(ShdParams { alpha1: 2.0, alpha2: 1.0, omega1: 0.5, omega2: 1.0, beta1: 1.0, beta2: 1.0 }),
            _ => None,
        };
        Ok(DiffusionSpec {
            name: self.name().to_string(),
            parent: HProcess::new(HVariate::symmetric(parent_seq)?, omega1)?,
            directing,
            omega1,
            omega2,
            shd,
            parent_law,
            directing_law,
        })
    }
}

impl FromStr for Preset {
    type Err = EvalError;
    /// `NAME` or `NAME:alpha,beta` style strings, e.g. `ST-FD:1.5,0.7`.
    fn from_str(s: &str) -> Result<Self, EvalError> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = rest
            .split(',')
            .filter(|x| !x.trim().is_empty())
            .map(|x| x.trim().parse::<f64>().map_err(|e| EvalError::Domain(format!("bad preset parameter {x}: {e}"))))
            .collect::<Result<_, _>>()?;
        let upper = name.to_ascii_uppercase();
        let (alpha, beta) = match upper.as_str() {
            "T-FD" | "TFD" | "GBM" => (None, nums.first().copied()),
            _ => (nums.first().copied(), nums.get(1).copied()),
        };
        Preset::from_name(name, alpha, beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_directing_is_identity() {
        let bm = Preset::Bm.spec().unwrap();
        let p = bm.position_process().unwrap();
        assert_eq!(p, bm.parent);
    }

    #[test]
    fn k_and_classes() {
        let s = make_shd(2.0, 1.0, 0.5, 1.0, 2.0, 3.0).unwrap();
        assert!((s.k().unwrap() - 12.0).abs() < 1e-12);
        assert_eq!(shd_standard(2.0, 1.0, 1.0).unwrap().msd_classify().0, MsdClass::Normal);
        assert_eq!(shd_standard(2.0, 0.5, 1.0).unwrap().msd_classify(), (MsdClass::Subdiffusion, 0.5));
        let (c, e) = shd_standard(1.8, 1.0, 1.0).unwrap().msd_classify();
        assert_eq!(c, MsdClass::Superdiffusion);
        assert!((e - 2.0 / 1.8).abs() < 1e-12);
    }

    #[test]
    fn preset_parsing() {
        assert_eq!("ST-FD:1.5,0.7".parse::<Preset>().unwrap(), Preset::StFd { alpha: 1.5, beta: 0.7 });
        assert_eq!("gbm:0.4".parse::<Preset>().unwrap(), Preset::Gbm { beta: 0.4 });
        assert!("XYZ".parse::<Preset>().is_err());
        assert!(Preset::TFd { beta: 1.0 }.spec().is_err());
    }
}
