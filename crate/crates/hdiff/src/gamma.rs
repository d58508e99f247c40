//! Log-gamma, reciprocal gamma and digamma on real and complex arguments.
//!
//! Everything downstream multiplies many gamma factors whose magnitudes span
//! hundreds of decades, so the primitives here work in log space and return
//! a sign (real case) or an unreduced phase (complex case). Real arguments
//! go through `libm`; the complex case is a shifted Stirling series.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// `exp(EULER_GAMMA)`, the exponential Euler-Mascheroni constant.
pub const EXP_EULER_GAMMA: f64 = 1.781_072_417_990_198;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

// B_{2k} / (2k (2k-1)), k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

const SHIFT: f64 = 10.0;

/// True when `x` sits on a pole of the gamma function (0, -1, -2, ...).
pub fn is_gamma_pole(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Like [`is_gamma_pole`] but with an absolute tolerance, for arguments that
/// arrive through floating-point arithmetic.
pub fn near_gamma_pole(x: f64, tol: f64) -> bool {
    x < 0.5 && (x - x.round()).abs() <= tol
}

/// `ln|Γ(x)|` together with the sign of `Γ(x)`. Poles give `(+inf, 1.0)`.
pub fn ln_gamma_sign(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, 1.0);
    }
    if is_gamma_pole(x) {
        return (f64::INFINITY, 1.0);
    }
    if x.abs() < 170.0 {
        let g = libm::tgamma(x);
        if g != 0.0 && g.is_finite() {
            return (g.abs().ln(), g.signum());
        }
    }
    let (l, s) = libm::lgamma_r(x);
    (l, if s < 0 { -1.0 } else { 1.0 })
}

/// `ln|Γ(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    ln_gamma_sign(x).0
}

/// `Γ(x)`; infinite at the poles.
pub fn gamma(x: f64) -> f64 {
    if is_gamma_pole(x) {
        return f64::INFINITY;
    }
    if x.abs() < 170.0 {
        return libm::tgamma(x);
    }
    let (l, s) = ln_gamma_sign(x);
    s * l.exp()
}

/// `1/Γ(x)`, exactly zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_gamma_pole(x) {
        return 0.0;
    }
    if x.abs() < 170.0 {
        let g = libm::tgamma(x);
        if g != 0.0 && g.is_finite() {
            return 1.0 / g;
        }
    }
    let (l, s) = ln_gamma_sign(x);
    s * (-l).exp()
}

/// `sin(πx)` with exact argument reduction so integers give exact zeros.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

// ln sin(πz) without overflow for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let re = z.re - 2.0 * (z.re / 2.0).round();
    let z = Complex64::new(re, z.im);
    if z.im.abs() < 8.0 {
        return (z * PI).sin().ln();
    }
    let i = Complex64::i();
    if z.im > 0.0 {
        // sin πz = e^{-iπz} (e^{2iπz} - 1) / (2i)
        let e = (i * 2.0 * PI * z).exp();
        -i * PI * z + (Complex64::new(1.0, 0.0) - e).ln() + Complex64::new(-std::f64::consts::LN_2, PI / 2.0)
    } else {
        let e = (-i * 2.0 * PI * z).exp();
        i * PI * z + (Complex64::new(1.0, 0.0) - e).ln() + Complex64::new(-std::f64::consts::LN_2, -PI / 2.0)
    }
}

/// Complex log-gamma. The imaginary part is a valid logarithm branch but is
/// not reduced to the principal one; callers exponentiate sums of these.
/// Poles return a real part of `+inf`.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        let (l, s) = ln_gamma_sign(z.re);
        return Complex64::new(l, if s < 0.0 { PI } else { 0.0 });
    }
    if z.re < 0.5 {
        let one = Complex64::new(1.0, 0.0);
        return Complex64::new(LN_PI, 0.0) - ln_sin_pi(z) - ln_gamma_complex(one - z);
    }
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut shifted = false;
    while w.norm() < SHIFT {
        prod *= w;
        w += 1.0;
        shifted = true;
    }
    let r = w.inv();
    let r2 = r * r;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut p = r;
    for c in STIRLING {
        acc += p * c;
        p *= r2;
    }
    let mut out = (w - 0.5) * w.ln() - w + LN_SQRT_2PI + acc;
    if shifted {
        out -= prod.ln();
    }
    out
}

/// Digamma `ψ(x)` for real `x`; NaN at the poles.
pub fn digamma(x: f64) -> f64 {
    if is_gamma_pole(x) {
        return f64::NAN;
    }
    if x < 0.5 {
        // ψ(1-x) - ψ(x) = π cot(πx)
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut z = x;
    let mut acc = 0.0;
    while z < SHIFT {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let r2 = 1.0 / (z * z);
    let series = r2
        * (1.0 / 12.0
            - r2 * (1.0 / 120.0
                - r2 * (1.0 / 252.0 - r2 * (1.0 / 240.0 - r2 * (1.0 / 132.0 - r2 * (691.0 / 32760.0 - r2 / 12.0))))));
    acc + z.ln() - 0.5 / z - series
}
