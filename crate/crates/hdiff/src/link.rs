//! Timing-modulation link: first-arrival detection of `N` molecules released
//! at `iTs/M`, the symbol-error bound, SNR and the high-SNR expansion.

use crate::diffusion::{DiffusionSpec, ShdParams};
use crate::gamma::{gamma, rgamma};
use crate::hfunc::{self, EvalConfig, EvalError};
use crate::noise::{NoiseModel, EXP_GAMMA_E};
use crate::params::HSeq;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// One `M`-ary link with `N` molecules per symbol.
#[derive(Debug, Clone)]
pub struct LinkConfig {
    pub m: usize,
    pub n: usize,
    pub ts: f64,
    pub a: f64,
    pub spec: DiffusionSpec,
}

impl LinkConfig {
    pub fn new(m: usize, n: usize, ts: f64, a: f64, spec: DiffusionSpec) -> Result<Self, EvalError> {
        if m < 2 {
            return Err(EvalError::Domain(format!("modulation order must be at least 2, got {m}")));
        }
        if n < 1 {
            return Err(EvalError::Domain("at least one molecule per symbol is needed".into()));
        }
        if !(ts > 0.0 && ts.is_finite()) || !(a > 0.0 && a.is_finite()) {
            return Err(EvalError::Domain(format!("symbol time and distance must be positive, got Ts={ts}, a={a}")));
        }
        Ok(LinkConfig { m, n, ts, a, spec })
    }

    /// Release time of symbol `i`.
    pub fn release_time(&self, i: usize) -> f64 {
        i as f64 * self.ts / self.m as f64
    }

    pub fn noise(&self) -> Result<NoiseModel, EvalError> {
        NoiseModel::new(&self.spec, self.a)
    }

    /// The same link with `Ts` chosen to give `snr`.
    pub fn with_snr(&self, snr: f64) -> Result<Self, EvalError> {
        let s = self.noise()?.geometric_power()?;
        Ok(LinkConfig { ts: ts_for_snr(snr, s), ..self.clone() })
    }
}

/// Law of `min(t_1, …, t_N)` over independent H-noise draws.
#[derive(Debug, Clone)]
pub struct FirstArrival {
    pub noise: NoiseModel,
    pub n: usize,
}

impl FirstArrival {
    pub fn new(noise: NoiseModel, n: usize) -> Result<Self, EvalError> {
        if n < 1 {
            return Err(EvalError::Domain("at least one molecule per symbol is needed".into()));
        }
        Ok(FirstArrival { noise, n })
    }

    /// `1 − (1 − F)^N`.
    pub fn cdf(&self, t: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
        Ok(min_cdf(self.noise.cdf(t, cfg)?, self.n))
    }

    /// `N f (1 − F)^{N−1}`.
    pub fn pdf(&self, t: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
        let f = self.noise.pdf(t, cfg)?;
        Ok(self.n as f64 * f * self.noise.survival(t, cfg)?.powi(self.n as i32 - 1))
    }
}

/// `1 − (1 − F)^N`, formed from the survival side to keep small values.
pub fn min_cdf(f: f64, n: usize) -> f64 {
    -((n as f64) * (-f).ln_1p()).exp_m1()
}

pub fn first_arrival_distribution(noise: NoiseModel, n: usize) -> Result<FirstArrival, EvalError> {
    FirstArrival::new(noise, n)
}

/// `((M−1)/M)·P(t̂ > Ts/M)^N` through the noise survival function.
pub fn sep_upper_bound(link: &LinkConfig, cfg: &EvalConfig) -> Result<f64, EvalError> {
    let nm = link.noise()?;
    let s = nm.survival(link.ts / link.m as f64, cfg)?.clamp(0.0, 1.0);
    Ok(bound_from_survival(s, link.m, link.n))
}

fn bound_from_survival(s: f64, m: usize, n: usize) -> f64 {
    (m as f64 - 1.0) / m as f64 * s.powi(n as i32)
}

/// `𝒢* = 𝒢^{2(1 − 1/α1 + (1 − α2)ω1)/(ω1ω2) + 1}`.
pub fn g_star(p: &ShdParams) -> f64 {
    let e = 1.0 - 1.0 / p.alpha1 + (1.0 - p.alpha2) * p.omega1;
    EXP_GAMMA_E.powf(2.0 * e / (p.omega1 * p.omega2) + 1.0)
}

/// `P̂_e`: the survival kernel of the standard H-noise as a function of
/// `M²/(2𝒢*·SNR)`.
pub fn sep_kernel(p: &ShdParams) -> HSeq {
    let (a1, a2, w1, w2) = (p.alpha1, p.alpha2, p.omega1, p.omega2);
    let w = w1 * w2;
    HSeq::from_parts(
        (2, 2, 4, 4),
        4.0 / a1,
        1.0,
        &[1.0; 4],
        &[1.0, 1.0, 1.0, 0.0],
        &[2.0, 2.0 / (a1 * w), 1.0 / w, 2.0 * a2 / w2],
        &[2.0 / w2, 2.0 / w, 1.0 / w, 2.0],
    )
    .expect("static layout")
}

/// The SEP bound of an SHD link written in terms of SNR only.
pub fn sep_bound_shd(p: &ShdParams, m: usize, n: usize, snr: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
    if !(snr > 0.0) {
        return Err(EvalError::Domain(format!("SNR must be positive, got {snr}")));
    }
    let x = (m * m) as f64 / (2.0 * g_star(p) * snr);
    let s = hfunc::eval_h(x, &sep_kernel(p), cfg)?.clamp(0.0, 1.0);
    Ok(bound_from_survival(s, m, n))
}

/// SHD bound at each SNR, evaluated concurrently.
pub fn sep_curve_shd(p: &ShdParams, m: usize, n: usize, snrs: &[f64], cfg: &EvalConfig) -> Result<Vec<f64>, EvalError> {
    snrs.par_iter().map(|&snr| sep_bound_shd(p, m, n, snr, cfg)).collect()
}

/// General bound at each SNR (through `Ts = ts_for_snr`), evaluated
/// concurrently.
pub fn sep_curve(link: &LinkConfig, snrs: &[f64], cfg: &EvalConfig) -> Result<Vec<f64>, EvalError> {
    let nm = link.noise()?;
    let s = nm.geometric_power()?;
    snrs.par_iter()
        .map(|&snr| {
            let ts = ts_for_snr(snr, s);
            Ok(bound_from_survival(nm.survival(ts / link.m as f64, cfg)?.clamp(0.0, 1.0), link.m, link.n))
        })
        .collect()
}

/// `SNR = (Ts/S)²/(2𝒢)` for geometric power `S`.
pub fn snr_of(ts: f64, geometric_power: f64) -> f64 {
    let r = ts / geometric_power;
    r * r / (2.0 * EXP_GAMMA_E)
}

/// Inverse of [`snr_of`].
pub fn ts_for_snr(snr: f64, geometric_power: f64) -> f64 {
    geometric_power * (2.0 * EXP_GAMMA_E * snr).sqrt()
}

pub fn link_snr(link: &LinkConfig) -> Result<f64, EvalError> {
    Ok(snr_of(link.ts, link.noise()?.geometric_power()?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `ω1 < 1`: the tail comes from the parent (`κ = ω1ω2`).
    ParentTail,
    /// `ω1 > 1`: the tail comes from the directing law (`κ = ω2`).
    DirectingTail,
}

/// `P_e ≈ (p∞·SNR)^{−s∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HighSnrExpansion {
    pub s_inf: f64,
    pub p_inf: f64,
    pub g: f64,
    pub branch: Branch,
}

impl HighSnrExpansion {
    pub fn asymptote(&self, snr: f64) -> f64 {
        (self.p_inf * snr).powf(-self.s_inf)
    }
}

/// `s∞ = N·min{ω2/2, ω1ω2/2}`, `g(M, N)` and `p∞ = g^{−1/s∞}` for SHD.
pub fn high_snr_expansion(p: &ShdParams, m: usize, n: usize) -> Result<HighSnrExpansion, EvalError> {
    let (a1, a2, w1, w2) = (p.alpha1, p.alpha2, p.omega1, p.omega2);
    if (w1 - 1.0).abs() < 1e-12 {
        return Err(EvalError::Domain("ω1 = 1 makes both tail terms coincide (double pole); unsupported".into()));
    }
    let is_pole = |x: f64| x <= 0.0 && (x - x.round()).abs() < 1e-12;
    let w = w1 * w2;
    let gs = g_star(p);
    let (mf, nf) = (m as f64, n as f64);
    let (branch, omega_t, inner) = if w1 < 1.0 {
        if is_pole(1.0 - a2 * w1) {
            return Err(EvalError::Domain(format!("Γ(1 − α2ω1) has a pole at α2ω1 = {}", a2 * w1)));
        }
        let c = gamma(1.0 - w1) * gamma(1.0 / a1) * rgamma(1.0 - a2 * w1) / (a1 * PI);
        (Branch::ParentTail, w, c)
    } else {
        if is_pole(1.0 - a2) {
            return Err(EvalError::Domain(format!(
                "Γ(1 − α2) has a pole at α2 = {a2}: with ω1 > 1 the directing term vanishes and the expansion is undefined"
            )));
        }
        let c = (PI / (2.0 * w1)).sin() * gamma(1.0 - 1.0 / w1) * gamma(1.0 / (a1 * w1)) * rgamma(1.0 - a2) / (a1 * PI);
        (Branch::DirectingTail, w2, c)
    };
    let per = inner * gs.powf(-omega_t / 2.0) / 2f64.powf(omega_t / 2.0 - 1.0);
    let g = (mf - 1.0) * mf.powf(nf * omega_t - 1.0) * per.powf(nf);
    let s_inf = nf * omega_t / 2.0;
    if !(g > 0.0 && g.is_finite()) {
        return Err(EvalError::NonConvergence(format!("g(M, N) = {g} is not a positive number")));
    }
    Ok(HighSnrExpansion { s_inf, p_inf: g.powf(-1.0 / s_inf), g, branch })
}

/// Least-squares slope of `−log10 P_e` against `log10 SNR` on log-spaced points.
pub fn fitted_slope(p: &ShdParams, m: usize, n: usize, snr_lo: f64, snr_hi: f64, points: usize, cfg: &EvalConfig) -> Result<f64, EvalError> {
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    for i in 0..points {
        let l = snr_lo.log10() + (snr_hi / snr_lo).log10() * i as f64 / (points - 1) as f64;
        xs.push(l);
        ys.push(-sep_bound_shd(p, m, n, 10f64.powf(l), cfg)?.log10());
    }
    Ok(least_squares_slope(&xs, &ys))
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
