//! Numerical evaluation of `k·H(c·x)` and related transforms.
//!
//! The Mellin-Barnes integrand is represented as a list of gamma factors
//! `Γ(u + v·s)` in the numerator and denominator. Identical factors are
//! cancelled before anything else, which matters: many kernels built by the
//! parameter algebra carry redundant pairs (the Gaussian kernel of a stable
//! law with `α = 2` is one).
//!
//! Evaluation tries the residue series on the side the argument favours,
//! then the other side, and falls back to quadrature along a vertical line
//! inside the pole-free strip. The line sits at the saddle of
//! `ln|θ(σ)| + σ·ln(cx)`, which keeps the integrand free of cancellation.

use crate::gamma::{ln_gamma_complex, ln_gamma_sign, near_gamma_pole};
use crate::params::{HSeq, ParamError};
use crate::quad;
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("pole hit at s={s} by {group} factor {index}")]
    PoleHit { s: f64, group: &'static str, index: usize },
    #[error("empty pole-free strip: left {left} >= right {right}")]
    EmptyStrip { left: f64, right: f64 },
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("divergent: {0}")]
    Divergent(String),
    #[error("invalid sequence: {0}")]
    Invalid(#[from] ParamError),
    #[error("repeated dominant pole (logarithmic case) at s={0}")]
    Logarithmic(f64),
    #[error("no algebraic expansion on this side")]
    NoAlgebraicExpansion,
    #[error("domain error: {0}")]
    Domain(String),
}

/// Knobs for the evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub rel_tolerance: f64,
    pub max_quadrature_nodes: usize,
    /// Forces the contour abscissa. `None` uses the saddle inside the strip.
    pub contour_offset: Option<f64>,
    pub series_term_cap: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { rel_tolerance: 1e-10, max_quadrature_nodes: 400_000, contour_offset: None, series_term_cap: 600 }
    }
}

impl EvalConfig {
    pub fn with_tolerance(tol: f64) -> Self {
        EvalConfig { rel_tolerance: tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Side {
    NearZero,
    NearInfinity,
}

/// Leading algebraic term `k·σ*·(c x)^ω*` on one side.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AsymptoticExpansion {
    /// Power of `x` in the leading term; negative near infinity.
    pub exponent: f64,
    /// Residue coefficient, excluding `k` and `c`.
    pub coefficient: f64,
    pub side: Side,
    pub k: f64,
    pub c: f64,
}

impl AsymptoticExpansion {
    pub fn leading(&self, x: f64) -> f64 {
        self.k * self.coefficient * (self.c * x).powf(self.exponent)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Factor {
    u: f64,
    v: f64,
    index: usize,
}

impl Factor {
    fn at(&self, s: f64) -> f64 {
        self.u + self.v * s
    }
    fn singular(&self, s: f64) -> bool {
        let z = self.at(s);
        near_gamma_pole(z, 1e-9 * z.abs().max(1.0))
    }
    // pole number l of this factor
    fn pole(&self, l: usize) -> f64 {
        -(self.u + l as f64) / self.v
    }
}

/// The gamma-factor form of a sequence pair.
#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    pub k: f64,
    pub c: f64,
    num: Vec<Factor>,
    den: Vec<Factor>,
}

fn same(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-13 * (1.0 + x.abs().max(y.abs()))
}

impl Kernel {
    pub(crate) fn raw(seq: &HSeq) -> Result<Self, EvalError> {
        let d = seq.validate();
        if !d.lengths_ok {
            return Err(ParamError::LengthMismatch("order does not match sequence lengths".into()).into());
        }
        if !d.slopes_positive {
            return Err(EvalError::Domain(d.messages.join("; ")));
        }
        if !d.scale_positive {
            return Err(ParamError::NonPositive { name: "c", value: seq.params.c }.into());
        }
        let o = seq.order;
        let p = &seq.params;
        let mut num = Vec::new();
        let mut den = Vec::new();
        for j in 0..o.q {
            if j < o.m {
                num.push(Factor { u: p.b[j], v: -p.big_b[j], index: j });
            } else {
                den.push(Factor { u: 1.0 - p.b[j], v: p.big_b[j], index: j });
            }
        }
        for j in 0..o.p {
            if j < o.n {
                num.push(Factor { u: 1.0 - p.a[j], v: p.big_a[j], index: o.q + j });
            } else {
                den.push(Factor { u: p.a[j], v: -p.big_a[j], index: o.q + j });
            }
        }
        Ok(Kernel { k: p.k, c: p.c, num, den })
    }

    pub(crate) fn new(seq: &HSeq) -> Result<Self, EvalError> {
        let mut kern = Self::raw(seq)?;
        let mut i = 0;
        while i < kern.den.len() {
            let d = kern.den[i];
            if let Some(j) = kern.num.iter().position(|f| same(f.u, d.u) && same(f.v, d.v)) {
                kern.num.remove(j);
                kern.den.remove(i);
            } else {
                i += 1;
            }
        }
        Ok(kern)
    }

    pub(crate) fn is_trivial(&self) -> bool {
        self.num.is_empty() && self.den.is_empty()
    }

    /// `Σ|v_num| − Σ|v_den|`; the integrand decays like `e^{-π a* |τ|/2}`.
    pub(crate) fn decay_rate(&self) -> f64 {
        self.num.iter().map(|f| f.v.abs()).sum::<f64>() - self.den.iter().map(|f| f.v.abs()).sum::<f64>()
    }

    pub(crate) fn ln_theta(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for f in &self.num {
            acc += ln_gamma_complex(Complex64::new(f.u, 0.0) + s * f.v);
        }
        for f in &self.den {
            let g = ln_gamma_complex(Complex64::new(f.u, 0.0) + s * f.v);
            if g.re == f64::INFINITY {
                return Complex64::new(f64::NEG_INFINITY, 0.0);
            }
            acc -= g;
        }
        acc
    }

    // (ln|θ(σ)|, sign θ(σ)) on the real axis
    fn ln_theta_real(&self, s: f64) -> (f64, f64) {
        let mut acc = 0.0;
        let mut sign = 1.0;
        for f in &self.num {
            let (l, sg) = ln_gamma_sign(f.at(s));
            acc += l;
            sign *= sg;
        }
        for f in &self.den {
            let (l, sg) = ln_gamma_sign(f.at(s));
            if l == f64::INFINITY {
                return (f64::NEG_INFINITY, 1.0);
            }
            acc -= l;
            sign *= sg;
        }
        (acc, sign)
    }

    /// Net pole orders at `s` of the left (`NearInfinity`) and right
    /// (`NearZero`) families. A denominator zero first cancels a numerator
    /// pole of its own orientation; leftover zeros cancel the other family.
    fn side_orders(&self, s: f64) -> (i32, i32) {
        let count = |fs: &[Factor], neg: bool| fs.iter().filter(|f| (f.v < 0.0) == neg && f.singular(s)).count() as i32;
        let mut right = count(&self.num, true) - count(&self.den, true);
        let mut left = count(&self.num, false) - count(&self.den, false);
        if right < 0 {
            left += right;
            right = 0;
        }
        if left < 0 {
            right += left;
            left = 0;
        }
        (left.max(0), right.max(0))
    }

    fn side_order(&self, s: f64, side: Side) -> i32 {
        let (l, r) = self.side_orders(s);
        match side {
            Side::NearInfinity => l,
            Side::NearZero => r,
        }
    }

    /// Residue weight at `s` for the series on `side`, everything but
    /// `(cx)^s`.
    fn residue(&self, s: f64, side: Side) -> Residue {
        let (l, r) = self.side_orders(s);
        let own = match side {
            Side::NearInfinity => l,
            Side::NearZero => r,
        };
        if own <= 0 {
            return Residue::Regular;
        }
        if l + r > 1 {
            return Residue::Higher;
        }
        let mut ln_mag = 0.0;
        let mut sign = if side == Side::NearZero { -1.0 } else { 1.0 };
        let mut lg_abs = 0.0;
        let parity = |l: f64| if (l as i64) % 2 == 0 { 1.0 } else { -1.0 };
        for f in &self.num {
            let z = f.at(s);
            if f.singular(s) {
                let l = (-z).round();
                ln_mag -= crate::gamma::ln_gamma(l + 1.0) + f.v.abs().ln();
                sign *= parity(l) * f.v.signum();
            } else {
                let (lg, sg) = ln_gamma_sign(z);
                ln_mag += lg;
                lg_abs += lg.abs();
                sign *= sg;
            }
        }
        for f in &self.den {
            let z = f.at(s);
            if f.singular(s) {
                let l = (-z).round();
                ln_mag += crate::gamma::ln_gamma(l + 1.0) + f.v.abs().ln();
                sign *= parity(l) * f.v.signum();
            } else {
                let (lg, sg) = ln_gamma_sign(z);
                ln_mag -= lg;
                lg_abs += lg.abs();
                sign *= sg;
            }
        }
        Residue::Simple { ln_mag, sign, lg_abs }
    }

    fn poles(&self, side: Side) -> PoleIter<'_> {
        let idx: Vec<usize> = (0..self.num.len())
            .filter(|&i| match side {
                Side::NearZero => self.num[i].v < 0.0,
                Side::NearInfinity => self.num[i].v > 0.0,
            })
            .collect();
        let next = vec![0usize; idx.len()];
        PoleIter { kern: self, side, idx, next }
    }

    /// First pole on `side` with positive net order.
    pub(crate) fn leading_pole(&self, side: Side) -> Option<(f64, i32)> {
        for (count, s) in self.poles(side).enumerate() {
            if count > 400 {
                break;
            }
            let order = self.side_order(s, side);
            if order > 0 {
                return Some((s, order));
            }
        }
        None
    }

    /// `(left, right)` bounds of the pole-free strip.
    pub(crate) fn strip(&self) -> Result<(f64, f64), EvalError> {
        let left = self.leading_pole(Side::NearInfinity).map_or(f64::NEG_INFINITY, |p| p.0);
        let right = self.leading_pole(Side::NearZero).map_or(f64::INFINITY, |p| p.0);
        if left >= right {
            return Err(EvalError::EmptyStrip { left, right });
        }
        Ok((left, right))
    }

    fn singular_points_between(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = Vec::new();
        for f in self.num.iter().chain(self.den.iter()) {
            for l in 0..64 {
                let s = f.pole(l);
                if s > lo && s < hi {
                    pts.push(s);
                }
            }
        }
        pts
    }
}

enum Residue {
    Regular,
    Simple { ln_mag: f64, sign: f64, lg_abs: f64 },
    Higher,
}

struct PoleIter<'a> {
    kern: &'a Kernel,
    side: Side,
    idx: Vec<usize>,
    next: Vec<usize>,
}

impl Iterator for PoleIter<'_> {
    type Item = f64;
    fn next(&mut self) -> Option<f64> {
        if self.idx.is_empty() {
            return None;
        }
        let pos = |i: usize, it: &Self| it.kern.num[it.idx[i]].pole(it.next[i]);
        let mut best = pos(0, self);
        for i in 1..self.idx.len() {
            let p = pos(i, self);
            let better = match self.side {
                Side::NearZero => p < best,
                Side::NearInfinity => p > best,
            };
            if better {
                best = p;
            }
        }
        for i in 0..self.idx.len() {
            let p = pos(i, self);
            if (p - best).abs() <= 1e-10 * best.abs().max(1.0) {
                self.next[i] += 1;
            }
        }
        Some(best)
    }
}

/// `θ(s)` as defined by the sequence pair, without cancelling factors.
pub fn mellin_barnes_integrand(s: Complex64, seq: &HSeq) -> Result<Complex64, EvalError> {
    let kern = Kernel::raw(seq)?;
    for f in &kern.num {
        let z = Complex64::new(f.u, 0.0) + s * f.v;
        if z.im.abs() < 1e-14 && near_gamma_pole(z.re, 1e-12) {
            return Err(EvalError::PoleHit { s: s.re, group: if f.v < 0.0 { "b" } else { "a" }, index: f.index });
        }
    }
    Ok(kern.ln_theta(s).exp())
}

struct SeriesSum {
    value: Complex64,
    error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SeriesMode {
    Convergent,
    Asymptotic,
    Invalid,
}

impl Kernel {
    /// `μ = Σ_den v − Σ_num v`: the `s ln s` growth rate of residue terms.
    fn mu(&self) -> f64 {
        self.den.iter().map(|f| f.v).sum::<f64>() - self.num.iter().map(|f| f.v).sum::<f64>()
    }

    /// Radius separating the two series when `μ = 0`.
    fn ln_radius(&self) -> f64 {
        let t = |f: &Factor| f.v * f.v.abs().ln();
        self.den.iter().map(t).sum::<f64>() - self.num.iter().map(t).sum::<f64>()
    }

    fn series_mode(&self, ln_x: f64, side: Side) -> SeriesMode {
        let mu = self.mu();
        let signed = match side {
            Side::NearZero => mu,
            Side::NearInfinity => -mu,
        };
        if signed.abs() < 1e-12 {
            let d = ln_x - self.ln_radius();
            let inside = match side {
                Side::NearZero => d < -0.05,
                Side::NearInfinity => d > 0.05,
            };
            if inside {
                SeriesMode::Convergent
            } else {
                SeriesMode::Invalid
            }
        } else if signed > 0.0 {
            SeriesMode::Convergent
        } else {
            SeriesMode::Asymptotic
        }
    }
}

// Residue series on one side at argument (cx) = exp(ln_x + i·phase).
fn residue_series(kern: &Kernel, ln_x: f64, phase: f64, side: Side, cfg: &EvalConfig) -> Option<SeriesSum> {
    let mode = kern.series_mode(ln_x, side);
    if mode == SeriesMode::Invalid {
        return None;
    }
    if mode == SeriesMode::Convergent && kern.leading_pole(side).is_none() {
        // no poles at all on a convergent side: the function vanishes there
        return Some(SeriesSum { value: Complex64::new(0.0, 0.0), error: 0.0 });
    }
    let tol = cfg.rel_tolerance;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut max_term = 0.0f64;
    let mut round = 0.0f64;
    let mut small_run = 0;
    let mut silent_run = 0;
    let mut nonzero = 0usize;
    let mut last_mag = f64::INFINITY;
    let mut converged = false;
    let mut tail = 0.0;
    for (count, s) in kern.poles(side).enumerate() {
        if count >= cfg.series_term_cap {
            break;
        }
        let (mut ln_mag, sign, lg_abs) = match kern.residue(s, side) {
            Residue::Higher => return None,
            Residue::Regular => {
                silent_run += 1;
                if mode == SeriesMode::Convergent && nonzero > 0 && silent_run >= 60 {
                    converged = true;
                    break;
                }
                continue;
            }
            Residue::Simple { ln_mag, sign, lg_abs } => (ln_mag, sign, lg_abs),
        };
        silent_run = 0;
        ln_mag += s * ln_x;
        let mag = ln_mag.exp();
        if !mag.is_finite() {
            return None;
        }
        if mode == SeriesMode::Asymptotic && nonzero > 0 && mag > last_mag {
            // the asymptotic series started to grow; truncate before it,
            // the first omitted term bounding the error
            tail = mag;
            break;
        }
        let term = Complex64::from_polar(mag, s * phase) * sign;
        sum += term;
        nonzero += 1;
        max_term = max_term.max(mag);
        round += mag * 4e-16 * (4.0 + lg_abs + (s * ln_x).abs() + kern.num.len() as f64);
        let scale = sum.norm().max(1e-300);
        if mag <= 1e-3 * tol * scale {
            small_run += 1;
            if small_run >= 4 {
                converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
        last_mag = mag;
    }
    if nonzero == 0 {
        return None;
    }
    let scale = sum.norm();
    let error = round + if converged { 0.0 } else if tail > 0.0 { tail } else { f64::INFINITY };
    if !(error <= tol * scale) || max_term > 1e6 * scale {
        return None;
    }
    Some(SeriesSum { value: sum, error })
}

// (σ*, ln-scale) for the contour, avoiding singular points of cancelled pairs.
fn contour_abscissa(kern: &Kernel, ln_x: f64, strip: (f64, f64), cfg: &EvalConfig) -> f64 {
    let (left, right) = strip;
    let phi = |s: f64| -> f64 {
        let (l, _) = kern.ln_theta_real(s);
        if l.is_nan() {
            f64::INFINITY
        } else {
            l + s * ln_x
        }
    };
    let sigma = if let Some(off) = cfg.contour_offset {
        off
    } else {
        let width = right - left;
        let margin = if width.is_finite() { 1e-3 * width.min(1.0) } else { 1e-3 };
        let (mut lo, mut hi) = (left + margin, right - margin);
        if !left.is_finite() || !right.is_finite() {
            let anchor = if left.is_finite() { left + 0.5 } else if right.is_finite() { right - 0.5 } else { 0.0 };
            let mut step = 1.0;
            if !left.is_finite() {
                lo = anchor - step;
                while phi(lo) < phi(lo + step * 0.5) && step < 1e4 {
                    step *= 2.0;
                    lo = anchor - step;
                }
            }
            step = 1.0;
            if !right.is_finite() {
                hi = anchor + step;
                while phi(hi) < phi(hi - step * 0.5) && step < 1e4 {
                    step *= 2.0;
                    hi = anchor + step;
                }
            }
            if left.is_finite() {
                lo = left + margin;
            }
            if right.is_finite() {
                hi = right - margin;
            }
        }
        let n = 48;
        let mut best = lo;
        let mut best_v = f64::INFINITY;
        for i in 0..=n {
            let s = lo + (hi - lo) * i as f64 / n as f64;
            let v = phi(s);
            if v < best_v {
                best_v = v;
                best = s;
            }
        }
        let h = (hi - lo) / n as f64;
        let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
        let g = 0.618_033_988_749_894_9;
        for _ in 0..40 {
            let x1 = b - g * (b - a);
            let x2 = a + g * (b - a);
            if phi(x1) < phi(x2) {
                b = x2;
            } else {
                a = x1;
            }
        }
        0.5 * (a + b)
    };
    // keep away from removable singularities of cancelled factor pairs
    let pts = kern.singular_points_between(left, right);
    let mut s = sigma;
    for _ in 0..8 {
        match pts.iter().find(|&&p| (p - s).abs() < 1e-6) {
            Some(&p) => s = p + if p + 1e-3 < right { 1e-3 } else { -1e-3 },
            None => break,
        }
    }
    s
}

fn contour_quadrature(kern: &Kernel, ln_x: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
    let strip = kern.strip()?;
    if kern.decay_rate() <= 0.0 {
        return Err(EvalError::NonConvergence(format!("contour integrand does not decay (a* = {})", kern.decay_rate())));
    }
    let sigma = contour_abscissa(kern, ln_x, strip, cfg);
    if !(sigma > strip.0 && sigma < strip.1) {
        return Err(EvalError::Domain(format!("contour offset {sigma} outside strip {strip:?}")));
    }
    let env = |t: f64| kern.ln_theta(Complex64::new(sigma, t)).re + sigma * ln_x;
    // envelope scan: peak and truncation point
    let mut peak = env(0.0);
    let mut t = 1e-3;
    while t < 2.0 {
        peak = peak.max(env(t));
        t *= 1.5;
    }
    let cut = (1e-4 * cfg.rel_tolerance).ln();
    let mut tmax = 1.0;
    loop {
        let e = env(tmax);
        peak = peak.max(e);
        if e < peak + cut && env(1.5 * tmax) < e {
            break;
        }
        tmax *= 1.5;
        if tmax > 1e7 {
            return Err(EvalError::NonConvergence("contour integrand envelope does not fall off".into()));
        }
    }
    let integrand = |t: f64| -> f64 {
        let s = Complex64::new(sigma, t);
        let z = kern.ln_theta(s) + s * ln_x;
        if z.re == f64::NEG_INFINITY {
            0.0
        } else {
            z.exp().re
        }
    };
    // resolve the neighbourhood of τ = 0 (the nearest pole distance sets the scale)
    let d = (sigma - strip.0).min(strip.1 - sigma).min(1.0);
    let mut breaks = vec![0.0];
    let mut b = 0.25 * d;
    while b < tmax {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(tmax);
    let per_piece = cfg.max_quadrature_nodes / breaks.len().max(1);
    let mut total = 0.0;
    let mut err = 0.0;
    let mut absval = 0.0;
    for w in breaks.windows(2) {
        let r = quad::integrate(integrand, w[0], w[1], 0.1 * cfg.rel_tolerance, 0.0, per_piece.max(600));
        total += r.value;
        err += r.error;
        absval += r.abs_value;
    }
    if !(err <= cfg.rel_tolerance * total.abs() || err <= 1e-13 * absval) {
        return Err(EvalError::NonConvergence(format!("contour quadrature error {err:e} for value {total:e}")));
    }
    Ok(kern.k * total / PI)
}

/// `k·H(c·x)` for `x > 0`.
pub fn eval_h(x: f64, seq: &HSeq, cfg: &EvalConfig) -> Result<f64, EvalError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(EvalError::Domain(format!("eval_h requires finite x > 0, got {x}")));
    }
    let kern = Kernel::new(seq)?;
    eval_kernel(&kern, x, cfg)
}

pub(crate) fn eval_kernel(kern: &Kernel, x: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
    if kern.is_trivial() {
        return Err(EvalError::Domain("kernel reduces to a Dirac delta".into()));
    }
    let ln_x = (kern.c * x).ln();
    let order = if ln_x < 0.0 { [Side::NearZero, Side::NearInfinity] } else { [Side::NearInfinity, Side::NearZero] };
    if cfg.contour_offset.is_none() {
        for side in order {
            if let Some(r) = residue_series(kern, ln_x, 0.0, side, cfg) {
                return Ok(kern.k * r.value.re);
            }
        }
    }
    contour_quadrature(kern, ln_x, cfg)
}

/// Forces the series path; `None` when no series is acceptable.
pub fn eval_h_series(x: f64, seq: &HSeq, cfg: &EvalConfig) -> Result<Option<f64>, EvalError> {
    let kern = Kernel::new(seq)?;
    let ln_x = (kern.c * x).ln();
    for side in [Side::NearZero, Side::NearInfinity] {
        if let Some(r) = residue_series(&kern, ln_x, 0.0, side, cfg) {
            return Ok(Some(kern.k * r.value.re));
        }
    }
    Ok(None)
}

/// Forces the contour path.
pub fn eval_h_contour(x: f64, seq: &HSeq, cfg: &EvalConfig) -> Result<f64, EvalError> {
    let kern = Kernel::new(seq)?;
    contour_quadrature(&kern, (kern.c * x).ln(), cfg)
}

/// `k·H(−c·x)` through the near-zero residue series with `(−1)^s = e^{iπs}`.
/// Succeeds only when that series converges to a real value.
pub fn eval_h_negative(x: f64, seq: &HSeq, cfg: &EvalConfig) -> Result<f64, EvalError> {
    let kern = Kernel::new(seq)?;
    let ln_x = (kern.c * x).ln();
    match residue_series(&kern, ln_x, PI, Side::NearZero, cfg) {
        Some(r) if r.value.im.abs() <= 1e3 * cfg.rel_tolerance * r.value.norm() + r.error => Ok(kern.k * r.value.re),
        Some(r) => Err(EvalError::Divergent(format!("series at negative argument is not real: {}", r.value))),
        None => Err(EvalError::Divergent("no convergent series at negative argument".into())),
    }
}

/// Leading algebraic behaviour on `side`.
pub fn asymptotic_expansion(seq: &HSeq, side: Side) -> Result<AsymptoticExpansion, EvalError> {
    let kern = Kernel::new(seq)?;
    kernel_expansion(&kern, side)
}

pub(crate) fn kernel_expansion(kern: &Kernel, side: Side) -> Result<AsymptoticExpansion, EvalError> {
    let (s, order) = kern.leading_pole(side).ok_or(EvalError::NoAlgebraicExpansion)?;
    if order > 1 {
        return Err(EvalError::Logarithmic(s));
    }
    let coef = match kern.residue(s, side) {
        Residue::Simple { ln_mag, sign, .. } => sign * ln_mag.exp(),
        _ => return Err(EvalError::Logarithmic(s)),
    };
    Ok(AsymptoticExpansion { exponent: s, coefficient: coef, side, k: kern.k, c: kern.c })
}

/// Right limit of `k·H(c·x)` at `x = 0`.
pub fn eval_h_at_zero(seq: &HSeq) -> Result<f64, EvalError> {
    let kern = Kernel::new(seq)?;
    match kern.leading_pole(Side::NearZero) {
        None => Ok(0.0),
        Some((s, _)) if s > 0.0 => Ok(0.0),
        Some((s, _)) if s == 0.0 || s.abs() < 1e-14 => Ok(kernel_expansion(&kern, Side::NearZero)?.leading(1.0 / kern.c)),
        Some((s, _)) => Err(EvalError::Domain(format!("unbounded at x = 0 (exponent {s})"))),
    }
}

/// Moment-type Mellin value `∫ x^{u-1} k H(cx) dx = k c^{-u} θ(−u)`, when
/// `−u` lies strictly inside the strip.
pub fn mellin_transform(u: f64, seq: &HSeq) -> Result<Option<f64>, EvalError> {
    let kern = Kernel::new(seq)?;
    let (l, r) = kern.strip()?;
    if !(-u > l && -u < r) {
        return Ok(None);
    }
    let (lt, sg) = kern.ln_theta_real(-u);
    Ok(Some(kern.k * sg * (lt - u * kern.c.ln()).exp()))
}

/// `d/du ln θ(u)`, used for logarithmic moments.
pub(crate) fn dln_theta(seq: &HSeq, u: f64) -> Result<f64, EvalError> {
    let kern = Kernel::new(seq)?;
    // ψ(−n + ε) = −1/ε + ψ(n + 1) + O(ε): a numerator pole cancelled by a
    // denominator pole at the same point leaves the two finite parts.
    let part = |z: f64| -> (f64, i32) {
        if z <= 0.0 && (z - z.round()).abs() < 1e-9 {
            (crate::gamma::digamma(1.0 - z.round()), 1)
        } else {
            (crate::gamma::digamma(z), 0)
        }
    };
    let mut acc = 0.0;
    let mut net = 0;
    for f in &kern.num {
        let (d, p) = part(f.at(u));
        acc += f.v * d;
        net += p;
    }
    for f in &kern.den {
        let (d, p) = part(f.at(u));
        acc -= f.v * d;
        net -= p;
    }
    if net != 0 {
        return Err(EvalError::Domain(format!("θ has a pole or zero at {u}")));
    }
    Ok(acc)
}

/// `(left, right)` strip after cancellation.
pub fn pole_strip(seq: &HSeq) -> Result<(f64, f64), EvalError> {
    Kernel::new(seq)?.strip()
}

/// Integrates `g(u)` over the real line in panels marching out from `u0`,
/// stopping each direction once the panels become negligible. `g` is
/// expected to be a log-space integrand (`e^u f(e^u)` and the like).
pub fn integrate_real_line<G: Fn(f64) -> Result<f64, EvalError>>(g: G, u0: f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
    let tol = cfg.rel_tolerance.max(1e-14);
    let failure: std::cell::RefCell<Option<EvalError>> = std::cell::RefCell::new(None);
    let wrapped = |u: f64| -> f64 {
        match g(u) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let mut total = 0.0;
    let mut total_abs = 0.0;
    let mut total_err = 0.0;
    for dir in [1.0f64, -1.0] {
        let mut a = u0;
        let mut width = 0.5;
        let mut quiet = 0;
        let mut history: Vec<f64> = Vec::new();
        for _ in 0..4000 {
            let b = a + dir * width;
            let r = quad::integrate(wrapped, a.min(b), a.max(b), 0.05 * tol, 1e-3 * tol * total_abs, 20_000);
            if let Some(e) = failure.borrow_mut().take() {
                return Err(e);
            }
            if !r.value.is_finite() {
                return Err(EvalError::NonConvergence("non-finite integrand".into()));
            }
            total += r.value;
            total_abs += r.abs_value;
            total_err += r.error;
            history.push(r.abs_value / width);
            if r.abs_value <= 1e-3 * tol * total_abs || r.abs_value == 0.0 {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
            let h = history.len();
            if h > 60 && history[h - 1] >= 0.98 * history[h - 41] {
                return Err(EvalError::Divergent("integrand tail does not decay (exponent >= -1)".into()));
            }
            a = b;
            width = (width * 1.25).min(6.0);
        }
        if quiet < 3 {
            return Err(EvalError::NonConvergence("tail truncation not reached".into()));
        }
    }
    if total_err > 10.0 * tol * total.abs().max(1e-300) && total_err > 1e-12 * total_abs {
        return Err(EvalError::NonConvergence(format!("panel error {total_err:e} for value {total:e}")));
    }
    Ok(total)
}

/// `∫₀^∞ w(x)·k·H(c·x) dx` in log space.
pub fn integrate_positive_axis(seq: &HSeq, w: &dyn Fn(f64) -> f64, cfg: &EvalConfig) -> Result<f64, EvalError> {
    let kern = Kernel::new(seq)?;
    let inner = EvalConfig { rel_tolerance: (cfg.rel_tolerance * 0.1).max(1e-13), ..cfg.clone() };
    let u0 = -kern.c.ln();
    integrate_real_line(
        |u| {
            let x = u.exp();
            let wx = w(x);
            if wx == 0.0 {
                return Ok(0.0);
            }
            Ok(wx * x * eval_kernel(&kern, x, &inner)?)
        },
        u0,
        cfg,
    )
}

/// H-transform `k·∫₀^∞ H(c·s·t) f(t) dt`.
pub fn h_transform_numeric(f: &dyn Fn(f64) -> Result<f64, EvalError>, s: f64, seq: &HSeq, cfg: &EvalConfig) -> Result<f64, EvalError> {
    if !(s > 0.0) {
        return Err(EvalError::Domain(format!("transform variable must be positive, got {s}")));
    }
    let kern = Kernel::new(seq)?;
    let inner = EvalConfig { rel_tolerance: (cfg.rel_tolerance * 0.1).max(1e-13), ..cfg.clone() };
    let cs = kern.c * s;
    let kernel_at = |t: f64| -> Result<f64, EvalError> {
        if kern.is_trivial() {
            return Err(EvalError::Domain("delta kernel".into()));
        }
        eval_kernel(&Kernel { c: cs, ..kern.clone() }, t, &inner)
    };
    integrate_real_line(
        |u| {
            let t = u.exp();
            let ft = f(t)?;
            if ft == 0.0 {
                return Ok(0.0);
            }
            Ok(ft * t * kernel_at(t)?)
        },
        0.0,
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn gauss_parent() -> HSeq {
        HSeq::from_parts((1, 0, 0, 1), 1.0 / (2.0 * PI.sqrt()), 0.5, &[], &[0.0], &[], &[0.5]).unwrap()
    }

    #[test]
    fn single_gamma_integrand() {
        let s = HSeq::from_parts((1, 0, 0, 1), 1.0, 1.0, &[], &[0.0], &[], &[1.0]).unwrap();
        let v = mellin_barnes_integrand(Complex64::new(-1.0, 0.0), &s).unwrap();
        assert!((v.re - 1.0).abs() < 1e-14);
        let v = mellin_barnes_integrand(Complex64::new(-3.0, 0.0), &s).unwrap();
        assert!((v.re - 2.0).abs() < 1e-14);
        assert!(matches!(mellin_barnes_integrand(Complex64::new(2.0, 0.0), &s), Err(EvalError::PoleHit { index: 0, .. })));
    }

    #[test]
    fn exponential_kernel_both_paths() {
        let s = HSeq::exp_kernel();
        for &x in &[0.01, 0.5, 1.0, 3.0, 20.0] {
            let q = eval_h_contour(x, &s, &cfg()).unwrap();
            assert!((q - (-x as f64).exp()).abs() <= 1e-10 * (-x as f64).exp(), "x={x} q={q}");
            let v = eval_h(x, &s, &cfg()).unwrap();
            assert!((v - (-x as f64).exp()).abs() <= 1e-10 * (-x as f64).exp());
        }
    }

    #[test]
    fn gaussian_reduction() {
        let s = gauss_parent();
        for i in 0..=100 {
            let x = 0.05 + i as f64 * 0.1;
            let want = (-x * x / 4.0).exp() / (2.0 * PI.sqrt()) * 2.0;
            let got = eval_h(x, &s, &cfg()).unwrap();
            assert!((got - want).abs() < 1e-12, "x={x} got {got} want {want}");
        }
        assert!((eval_h_at_zero(&s).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn indicator_kernels() {
        let c = HSeq::cdf_kernel();
        assert!((eval_h(2.0, &c, &cfg()).unwrap() - 1.0).abs() < 1e-12);
        assert!(eval_h(0.5, &c, &cfg()).unwrap().abs() < 1e-12);
        let ci = c.inverse();
        assert!((eval_h(0.5, &ci, &cfg()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ln_kernel_values() {
        let s = HSeq::ln_kernel();
        for &x in &[0.1, 0.7, 1.5, 9.0] {
            let want = f64::ln(x) / (x - 1.0);
            let got = eval_h(x, &s, &cfg()).unwrap();
            assert!((got - want).abs() < 1e-10 * want.abs(), "x={x} {got} {want}");
        }
    }

    #[test]
    fn empty_strip_is_refused() {
        // left poles at 1, 0, -1, ... and right poles at -0.5, 0.5, ... interlace
        let s = HSeq::from_parts((1, 1, 1, 1), 1.0, 1.0, &[2.0], &[-0.5], &[1.0], &[1.0]).unwrap();
        assert!(matches!(eval_h_contour(1.0, &s, &cfg()), Err(EvalError::EmptyStrip { .. })));
    }

    #[test]
    fn expansion_of_exp_kernel_near_zero() {
        let e = asymptotic_expansion(&HSeq::exp_kernel(), Side::NearZero).unwrap();
        assert_eq!(e.exponent, 0.0);
        assert!((e.coefficient - 1.0).abs() < 1e-14);
        assert!(matches!(asymptotic_expansion(&HSeq::exp_kernel(), Side::NearInfinity), Err(EvalError::NoAlgebraicExpansion)));
        assert!(matches!(asymptotic_expansion(&HSeq::ln_kernel(), Side::NearZero), Err(EvalError::Logarithmic(_))));
    }

    #[test]
    fn mellin_transform_moments_of_exp() {
        // ∫ x^{u-1} e^{-x} dx = Γ(u)
        let v = mellin_transform(3.5, &HSeq::exp_kernel()).unwrap().unwrap();
        assert!((v - crate::gamma::gamma(3.5)).abs() < 1e-13);
        assert!(mellin_transform(-0.5, &HSeq::exp_kernel()).unwrap().is_none());
    }

    #[test]
    fn positive_axis_integral() {
        let v = integrate_positive_axis(&HSeq::exp_kernel(), &|x| x, &cfg()).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        let n = integrate_positive_axis(&gauss_parent(), &|_| 1.0, &cfg()).unwrap();
        assert!((n - 1.0).abs() < 1e-10, "{n}");
    }

    #[test]
    fn divergence_is_detected() {
        // e^{x}/(1+x) cancels the kernel, leaving ∫ dx/(1+x)
        let r = integrate_positive_axis(&HSeq::exp_kernel(), &|x| (x).exp() / (1.0 + x), &cfg());
        assert!(matches!(r, Err(EvalError::Divergent(_)) | Err(EvalError::NonConvergence(_))), "{r:?}");
    }
}
