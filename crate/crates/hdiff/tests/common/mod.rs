//! Oracles shared by the integration tests. Nothing here calls into the
//! crate's own quadrature or special functions.
#![allow(dead_code)]

use libm::erfc;
use std::f64::consts::PI;

pub const EULER: f64 = 0.577_215_664_901_532_9;
pub const EXP_EULER: f64 = 1.781_072_417_990_197_9;

/// Adaptive Simpson on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let d = left + right - whole;
        if depth == 0 || d.abs() <= 15.0 * tol {
            left + right + d / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `∫₀^∞ f` through `x = e^u`, split into unit pieces of `u`.
pub fn integrate_positive<F: Fn(f64) -> f64>(f: &F, lo_exp: f64, hi_exp: f64, tol: f64) -> f64 {
    let g = |u: f64| {
        let x = u.exp();
        f(x) * x
    };
    let n = (hi_exp - lo_exp).ceil() as usize;
    (0..n).map(|i| simpson(&g, lo_exp + i as f64, (lo_exp + i as f64 + 1.0).min(hi_exp), tol / n as f64)).sum()
}

/// Lévy first-passage density of Brownian motion with `E[x(1)²] = 2`.
pub fn levy_pdf(a: f64, t: f64) -> f64 {
    a / (4.0 * PI * t * t * t).sqrt() * (-a * a / (4.0 * t)).exp()
}

pub fn levy_cdf(a: f64, t: f64) -> f64 {
    erfc(a / (2.0 * t.sqrt()))
}

pub fn gauss2_pdf(x: f64, t: f64) -> f64 {
    (-x * x / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
