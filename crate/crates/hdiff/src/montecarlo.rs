//! Samplers for the building-block laws, exact and random-walk first-passage
//! draws, empirical SEP, and goodness-of-fit helpers.
//!
//! Parallel drivers split the work into fixed chunks; chunk `c` always draws
//! from stream `base + c`, so results do not depend on the thread count.

use crate::diffusion::{DiffusionSpec, DirectingLaw, ParentLaw, ShdParams};
use crate::hfunc::EvalError;
use crate::link::LinkConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

/// Draws per parallel chunk.
pub const CHUNK: usize = 4096;

/// A reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream);
        r
    }
}

/// `n` draws of `f`, chunked over streams `base, base + 1, …`.
pub fn par_draw<T, F>(n: usize, seed: u64, base: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::new(seed, base + c as u64).rng();
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

// uniform on the open interval (0, 1)
fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Standard symmetric stable draw with `E[e^{iωx}] = e^{−|ω|^α}`.
fn standard_symmetric_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha == 2.0 {
        let z: f64 = StandardNormal.sample(rng);
        return std::f64::consts::SQRT_2 * z;
    }
    let v = PI * (open01(rng) - 0.5);
    if alpha == 1.0 {
        return v.tan();
    }
    let w = exp1(rng);
    (alpha * v).sin() / v.cos().powf(1.0 / alpha) * ((v - alpha * v).cos() / w).powf((1.0 - alpha) / alpha)
}

/// `S(α, 0, γ, 0)`: characteristic function `e^{−γ|ω|^α}`.
pub fn sample_symmetric_stable<R: Rng + ?Sized>(alpha: f64, gamma: f64, rng: &mut R) -> f64 {
    gamma.powf(1.0 / alpha) * standard_symmetric_stable(alpha, rng)
}

/// Positive stable draw with Laplace transform `e^{−s^α}`, `0 < α ≤ 1`.
fn standard_positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha == 1.0 {
        return 1.0;
    }
    let u = PI * open01(rng);
    let w = exp1(rng);
    (alpha * u).sin() / u.sin().powf(1.0 / alpha) * (((1.0 - alpha) * u).sin() / w).powf((1.0 - alpha) / alpha)
}

/// `S(α, 1, γ, 0)` with `0 < α < 1`: Laplace transform
/// `exp(−γ s^α / cos(πα/2))`.
pub fn sample_onesided_stable<R: Rng + ?Sized>(alpha: f64, gamma: f64, rng: &mut R) -> f64 {
    (gamma / (FRAC_PI_2 * alpha).cos()).powf(1.0 / alpha) * standard_positive_stable(alpha, rng)
}

/// M-Wright law of order `α2` scaled by `β2`: `s^{−α2}` with
/// `s ~ S(α2, 1, cos(πα2/2)/β2, 0)`; the constant `β2` when `α2 = 1`.
pub fn sample_mwright<R: Rng + ?Sized>(alpha2: f64, beta2: f64, rng: &mut R) -> f64 {
    if alpha2 == 1.0 {
        return beta2;
    }
    let s = sample_onesided_stable(alpha2, (FRAC_PI_2 * alpha2).cos() / beta2, rng);
    s.powf(-alpha2)
}

/// Mittag-Leffler waiting time with Laplace transform `1/(1 + (τ0 s)^ν)`.
pub fn sample_mittag_leffler<R: Rng + ?Sized>(nu: f64, tau0: f64, rng: &mut R) -> f64 {
    tau0 * exp1(rng).powf(1.0 / nu) * standard_positive_stable(nu, rng)
}

/// Sum of `n` independent Mittag-Leffler waits: `τ0·G_n^{1/ν}·S_ν` with
/// `G_n ~ Gamma(n, 1)`.
pub fn sample_mittag_leffler_sum<R: Rng + ?Sized>(nu: f64, tau0: f64, n: u64, rng: &mut R) -> f64 {
    let g = if n == 1 { exp1(rng) } else { Gamma::new(n as f64, 1.0).expect("shape is positive").sample(rng) };
    tau0 * g.powf(1.0 / nu) * standard_positive_stable(nu, rng)
}

pub fn sample_parent<R: Rng + ?Sized>(law: &ParentLaw, rng: &mut R) -> f64 {
    match *law {
        ParentLaw::SymmetricStable { alpha, gamma } => sample_symmetric_stable(alpha, gamma, rng),
    }
}

pub fn sample_directing<R: Rng + ?Sized>(law: &DirectingLaw, rng: &mut R) -> f64 {
    match *law {
        DirectingLaw::Degenerate => 1.0,
        DirectingLaw::MWright { alpha, scale } => sample_mwright(alpha, scale, rng),
        DirectingLaw::OneSidedStable { alpha, gamma } => sample_onesided_stable(alpha, gamma, rng),
    }
}

/// `x(t) = t^{ω1ω2}·p(1)·d(1)^{ω1}`.
pub fn sample_position<R: Rng + ?Sized>(spec: &DiffusionSpec, t: f64, rng: &mut R) -> f64 {
    let p = sample_parent(&spec.parent_law, rng);
    let d = sample_directing(&spec.directing_law, rng);
    t.powf(spec.exponent()) * p * d.powf(spec.omega1)
}

/// First-passage time to `a` under the image-method law, `(a/|x(1)|)^{1/ω}`.
pub fn sample_fpt<R: Rng + ?Sized>(spec: &DiffusionSpec, a: f64, rng: &mut R) -> f64 {
    let x = sample_position(spec, 1.0, rng).abs();
    (a / x).powf(1.0 / spec.exponent())
}

/// Continuous-time random walk: stable jumps of scale `h`, Mittag-Leffler
/// waits of scale `τ0`, absorbed at the first landing `x ≥ a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CtrwConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub h: f64,
    pub tau0: f64,
    pub a: f64,
    pub max_steps: u64,
}

impl CtrwConfig {
    /// Scales with `a/h = resolution` and `h^{α1}/τ0^{α2} = K`.
    pub fn for_shd(p: &ShdParams, a: f64, resolution: f64, max_steps: u64) -> Result<Self, EvalError> {
        if (p.omega1 * p.alpha1 - 1.0).abs() > 1e-12 || (p.omega2 - p.alpha2).abs() > 1e-12 {
            return Err(EvalError::Domain("the random walk needs ω1 = 1/α1 and ω2 = α2".into()));
        }
        let h = a / resolution;
        let tau0 = (h.powf(p.alpha1) / p.k()).powf(1.0 / p.alpha2);
        Ok(CtrwConfig { alpha1: p.alpha1, alpha2: p.alpha2, h, tau0, a, max_steps })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FptOutcome {
    Hit(f64),
    Censored,
}

/// One walk. Far from the boundary several steps are merged into one
/// stable draw of the summed displacement; the merge size keeps the chance
/// of crossing inside a merged block negligible.
pub fn simulate_fpt_ctrw<R: Rng + ?Sized>(cfg: &CtrwConfig, rng: &mut R) -> FptOutcome {
    let level = cfg.a / cfg.h;
    let alpha = cfg.alpha1;
    let mut x = 0.0f64;
    let mut n: u64 = 0;
    while x < level {
        if n >= cfg.max_steps {
            return FptOutcome::Censored;
        }
        let gap = level - x;
        let merge = if alpha == 2.0 {
            // six standard deviations of the summed Gaussian displacement
            (gap * gap / 72.0).floor()
        } else {
            (1e-3 * gap.powf(alpha)).floor()
        };
        if merge >= 2.0 {
            let j = (merge as u64).min(cfg.max_steps - n).max(1);
            x += (j as f64).powf(1.0 / alpha) * standard_symmetric_stable(alpha, rng);
            n += j;
        } else {
            x += standard_symmetric_stable(alpha, rng);
            n += 1;
        }
    }
    FptOutcome::Hit(sample_mittag_leffler_sum(cfg.alpha2, cfg.tau0, n, rng))
}

/// First-passage samples of a batch of walks, with the censored count.
#[derive(Debug, Clone, Serialize)]
pub struct FptBatch {
    pub samples: Vec<f64>,
    pub censored: usize,
    pub walks: usize,
}

impl FptBatch {
    pub fn censored_fraction(&self) -> f64 {
        self.censored as f64 / self.walks as f64
    }
}

pub fn simulate_fpt_batch(cfg: &CtrwConfig, walks: usize, seed: u64, base: u64) -> FptBatch {
    let out = par_draw(walks, seed, base, |rng| simulate_fpt_ctrw(cfg, rng));
    let mut samples = Vec::with_capacity(walks);
    let mut censored = 0;
    for o in out {
        match o {
            FptOutcome::Hit(t) => samples.push(t),
            FptOutcome::Censored => censored += 1,
        }
    }
    FptBatch { samples, censored, walks }
}

/// Empirical symbol-error rate with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SepEstimate {
    pub trials: usize,
    pub errors: usize,
    pub p_hat: f64,
    pub std_error: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl SepEstimate {
    pub fn from_counts(errors: usize, trials: usize) -> Self {
        let n = trials as f64;
        let p = errors as f64 / n;
        let z = 1.959_963_984_540_054;
        let d = 1.0 + z * z / n;
        let centre = (p + z * z / (2.0 * n)) / d;
        let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / d;
        SepEstimate { trials, errors, p_hat: p, std_error: (p * (1.0 - p) / n).sqrt(), ci_lo: (centre - half).max(0.0), ci_hi: (centre + half).min(1.0) }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_hi - self.ci_lo)
    }
}

/// Releases symbol `i` at `iTs/M`, observes `iTs/M + min(t_1..t_N)` and
/// decodes with the fixed thresholds `jTs/M`.
pub fn simulate_sep(link: &LinkConfig, trials: usize, seed: u64, base: u64) -> SepEstimate {
    let m = link.m;
    let slot = link.ts / m as f64;
    let outcome = par_draw(trials, seed, base, |rng| {
        let i = rng.random_range(0..m);
        let first = (0..link.n).map(|_| sample_fpt(&link.spec, link.a, rng)).fold(f64::INFINITY, f64::min);
        let y = link.release_time(i) + first;
        let decided = ((y / slot).floor() as usize).min(m - 1);
        decided != i
    });
    SepEstimate::from_counts(outcome.iter().filter(|&&e| e).count(), trials)
}

/// `exp(mean(ln x))`.
pub fn geometric_mean(samples: &[f64]) -> Result<f64, EvalError> {
    if samples.is_empty() {
        return Err(EvalError::Domain("no samples".into()));
    }
    let mut acc = 0.0;
    for &x in samples {
        if !(x > 0.0) {
            return Err(EvalError::Domain(format!("geometric mean needs positive samples, got {x}")));
        }
        acc += x.ln();
    }
    Ok((acc / samples.len() as f64).exp())
}

pub fn sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs
}

/// Kolmogorov-Smirnov distance between sorted samples and `cdf`.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    })
}

/// Upper bound on the KS distance using `cdf` only at about `checkpoints`
/// sample ranks; monotonicity of both step and model CDF bounds the gaps.
pub fn ks_statistic_bounded(sorted: &[f64], cdf: impl Fn(f64) -> Result<f64, EvalError> + Sync, checkpoints: usize) -> Result<f64, EvalError> {
    let n = sorted.len();
    if n == 0 {
        return Err(EvalError::Domain("no samples".into()));
    }
    let k = checkpoints.clamp(2, n);
    let mut ranks: Vec<usize> = (0..k).map(|j| j * (n - 1) / (k - 1)).collect();
    ranks.dedup();
    let vals: Vec<f64> = ranks.par_iter().map(|&r| cdf(sorted[r])).collect::<Result<_, _>>()?;
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for w in 0..ranks.len() {
        let (r, f) = (ranks[w], vals[w]);
        d = d.max((r as f64 + 1.0) / nf - f).max(f - r as f64 / nf);
        if w + 1 < ranks.len() {
            let (r2, f2) = (ranks[w + 1], vals[w + 1]);
            d = d.max(r2 as f64 / nf - f).max(f2 - (r as f64 + 1.0) / nf);
        }
    }
    Ok(d)
}

/// Two-sample KS distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let a = sorted(a.to_vec());
    let b = sorted(b.to_vec());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Least-squares slope of `ln S_emp(t)` against `ln t` on `points`
/// log-spaced times in `[lo, hi]`.
pub fn empirical_survival_slope(sorted: &[f64], total: usize, lo: f64, hi: f64, points: usize) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..points {
        let t = lo * (hi / lo).powf(i as f64 / (points - 1) as f64);
        let above = sorted.len() - sorted.partition_point(|&x| x <= t);
        if above > 0 {
            xs.push(t.ln());
            ys.push((above as f64 / total as f64).ln());
        }
    }
    crate::link::least_squares_slope(&xs, &ys)
}

/// One value per row under `header`.
pub fn write_samples_csv<W: Write>(out: W, header: &str, samples: &[f64]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([header])?;
    for x in samples {
        w.write_record([format!("{x:e}")])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_mean_small() {
        assert_eq!(geometric_mean(&[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert!((geometric_mean(&[1.0, 4.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(geometric_mean(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn streams_reproduce() {
        let a = par_draw(10_000, 7, 0, |r| r.random::<u64>());
        let b = par_draw(10_000, 7, 0, |r| r.random::<u64>());
        let c = par_draw(10_000, 7, 1, |r| r.random::<u64>());
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn ks_exact_uniform() {
        let xs = [0.1, 0.4, 0.7];
        let d = ks_statistic(&xs, |x| x);
        assert!((d - 0.3).abs() < 1e-15);
    }

    #[test]
    fn wilson_interval_contains_estimate() {
        let e = SepEstimate::from_counts(30, 1000);
        assert!(e.ci_lo < 0.03 && 0.03 < e.ci_hi);
    }
}
