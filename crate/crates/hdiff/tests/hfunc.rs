use hdiff::diffusion::{shd_standard, Preset};
use hdiff::hfunc::{
    asymptotic_expansion, eval_h, eval_h_at_zero, eval_h_contour, eval_h_series, h_transform_numeric, integrate_positive_axis,
    mellin_barnes_integrand, Side,
};
use hdiff::hvariate::mwright_pdf;
use hdiff::link::sep_kernel;
use hdiff::noise::NoiseModel;
use hdiff::{EvalConfig, EvalError, HSeq};
use num_complex::Complex64;
use proptest::prelude::*;
use libm::erfc;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

const EULER: f64 = 0.577_215_664_901_532_9;

fn cfg() -> EvalConfig {
    EvalConfig::default()
}

fn single_gamma() -> HSeq {
    HSeq::from_parts((1, 0, 0, 1), 1.0, 1.0, &[], &[0.0], &[], &[1.0]).unwrap()
}

fn gauss_parent() -> HSeq {
    HSeq::from_parts((1, 0, 0, 1), 0.5 / PI.sqrt(), 0.5, &[], &[0.0], &[], &[0.5]).unwrap()
}

fn levy(a: f64) -> HSeq {
    HSeq::from_parts((0, 1, 1, 0), 4.0 / PI.sqrt(), 4.0, &[-0.5], &[], &[1.0], &[]).unwrap().scale(a * a).unwrap()
}

fn mwright(nu: f64) -> HSeq {
    HSeq::from_parts((1, 0, 1, 1), 1.0, 1.0, &[1.0 - nu], &[0.0], &[nu], &[1.0]).unwrap()
}

// θ(s) from the definition, with an independent real gamma
fn theta_direct(s: &HSeq, x: f64) -> f64 {
    let (o, p) = (s.order, &s.params);
    let mut v = 1.0;
    for j in 0..o.q {
        v *= if j < o.m { gamma(p.b[j] - p.big_b[j] * x) } else { 1.0 / gamma(1.0 - p.b[j] + p.big_b[j] * x) };
    }
    for j in 0..o.p {
        v *= if j < o.n { gamma(1.0 - p.a[j] + p.big_a[j] * x) } else { 1.0 / gamma(p.a[j] - p.big_a[j] * x) };
    }
    v
}

#[test]
fn single_gamma_integrand_values() {
    let s = single_gamma();
    let at = |x: f64| mellin_barnes_integrand(Complex64::new(x, 0.0), &s).unwrap();
    assert!((at(-1.0).re - 1.0).abs() < 1e-14);
    assert!((at(-3.0).re - 2.0).abs() < 1e-13);
    assert!(matches!(mellin_barnes_integrand(Complex64::new(0.0, 0.0), &s), Err(EvalError::PoleHit { .. })));
}

#[test]
fn position_kernel_integrand_against_independent_gamma() {
    // at s = −1 the numerator and denominator poles cancel; check off it
    for (a1, a2) in [(1.5, 0.7), (1.8, 0.4), (2.0, 0.5)] {
        let seq = shd_standard(a1, a2, 1.0).unwrap().combined_seq().unwrap();
        for x in [-0.5, -0.8, -0.3] {
            let got = mellin_barnes_integrand(Complex64::new(x, 0.0), &seq).unwrap();
            let want = theta_direct(&seq, x);
            assert!((got.re / want - 1.0).abs() < 1e-12, "({a1},{a2}) s={x}: {} vs {want}", got.re);
            assert!(got.im.abs() < 1e-12 * want.abs());
        }
    }
}

#[test]
fn closed_form_values() {
    let m = eval_h(1.0, &mwright(0.5), &cfg()).unwrap();
    assert!((m - (-0.25f64).exp() / PI.sqrt()).abs() < 1e-12);
    // the kernel is twice the density of N(0, 2); the symmetric variate halves it
    assert!((eval_h_at_zero(&gauss_parent()).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-14);
    let l = eval_h(1.0, &levy(1.0), &cfg()).unwrap();
    assert!((l - (-0.25f64).exp() / (4.0 * PI).sqrt()).abs() < 1e-12);
}

#[test]
fn gaussian_reduction_on_grid() {
    for i in 0..=100 {
        let x = i as f64 * 0.1;
        let want = 2.0 * (-x * x / 4.0).exp() / (2.0 * PI.sqrt());
        let got = eval_h(x.max(1e-300), &gauss_parent(), &cfg()).unwrap();
        assert!((got - want).abs() < 1e-8, "x={x}: {got} vs {want}");
    }
}

#[test]
fn series_and_contour_agree() {
    let kernels = [mwright(0.5), mwright(0.3), levy(1.0), gauss_parent(), shd_standard(1.5, 0.7, 1.0).unwrap().combined_seq().unwrap()];
    for k in &kernels {
        for x in [0.2, 0.7, 1.5, 3.0] {
            let Some(series) = eval_h_series(x, k, &cfg()).unwrap() else { continue };
            let contour = eval_h_contour(x, k, &cfg()).unwrap();
            assert!((series - contour).abs() < 1e-8 * series.abs().max(1.0), "x={x}: {series} vs {contour}");
        }
    }
}

#[test]
fn every_preset_kernel_integrates_to_one() {
    let presets = [
        Preset::StFd { alpha: 1.5, beta: 0.7 },
        Preset::SFd { alpha: 1.5, beta: 0.7 },
        Preset::TFd { beta: 0.5 },
        Preset::EkFd { alpha: 1.5, beta: 0.7 },
        Preset::Gbm { beta: 0.7 },
        Preset::Fbm { alpha: 1.5 },
        Preset::Bm,
    ];
    for p in presets {
        let seq = p.spec().unwrap().combined_seq().unwrap();
        let mass = integrate_positive_axis(&seq, &|_| 1.0, &cfg()).unwrap();
        assert!((mass - 1.0).abs() < 1e-6, "{}: {mass}", p.name());
    }
}

#[test]
fn sep_kernel_expansion_matches_closed_forms() {
    for (a1, a2) in [(2.0, 1.0), (2.0, 0.5), (1.8, 1.0), (1.5, 0.7)] {
        let p = shd_standard(a1, a2, 1.0).unwrap().shd.unwrap();
        let (w1, w2) = (p.omega1, p.omega2);
        let e = asymptotic_expansion(&sep_kernel(&p), Side::NearZero).unwrap();
        assert!((e.exponent - (w1 * w2 / 2.0).min(w2 / 2.0)).abs() < 1e-14);
        let sigma = gamma(1.0 - w1) * gamma(1.0 / a1) / (2.0 * PI * gamma(1.0 - a2 * w1));
        assert!((e.coefficient / sigma - 1.0).abs() < 1e-12, "({a1},{a2}): {} vs {sigma}", e.coefficient);
    }
    // ω1 > 1
    let p = shd_standard(0.8, 0.6, 1.0).unwrap().shd.unwrap();
    let w1 = p.omega1;
    let e = asymptotic_expansion(&sep_kernel(&p), Side::NearZero).unwrap();
    assert!((e.exponent - p.omega2 / 2.0).abs() < 1e-14);
    let sigma = (PI / (2.0 * w1)).sin() * gamma(1.0 - 1.0 / w1) * gamma(1.0 / (0.8 * w1)) / (2.0 * PI * gamma(1.0 - 0.6));
    assert!((e.coefficient / sigma - 1.0).abs() < 1e-12);
}

#[test]
fn expansion_predicts_small_argument_slope() {
    let p = shd_standard(2.0, 0.5, 1.0).unwrap().shd.unwrap();
    let k = sep_kernel(&p);
    let e = asymptotic_expansion(&k, Side::NearZero).unwrap();
    // the next pole is double (x^{1/4} ln x), so the leading term takes over slowly
    let xs: Vec<f64> = (0..20).map(|i| 10f64.powf(-40.0 + 10.0 * i as f64 / 19.0)).collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs.iter().map(|&x| (x.ln(), eval_h(x, &k, &cfg()).unwrap().ln())).unzip();
    let slope = hdiff::link::least_squares_slope(&lx, &ly);
    assert!((slope / e.exponent - 1.0).abs() < 0.01, "{slope} vs {}", e.exponent);
    let x = 1e-40;
    assert!((eval_h(x, &k, &cfg()).unwrap() / e.leading(x) - 1.0).abs() < 0.01);
}

#[test]
fn survival_tail_of_subdiffusion() {
    let nm = NoiseModel::new(&shd_standard(2.0, 0.5, 1.0).unwrap(), 1.0).unwrap();
    let e = nm.survival_tail().unwrap();
    assert!((e.exponent + 0.25).abs() < 1e-14);
    assert_eq!(e.side, Side::NearInfinity);
}

#[test]
fn repeated_dominant_pole_is_reported() {
    // Γ(−s)² has a double pole at 0
    let k = HSeq::from_parts((2, 0, 0, 2), 1.0, 1.0, &[], &[0.0, 0.0], &[], &[1.0, 1.0]).unwrap();
    assert!(matches!(asymptotic_expansion(&k, Side::NearZero), Err(EvalError::Logarithmic(_))));
}

#[test]
fn h_transforms() {
    // normalization: ∫ e^{−st} f(t) dt → 1 as s → 0 for the Gamma(3/2) law
    let g = {
        let mut s = HSeq::exp_kernel().conjugate(0.5).unwrap();
        s.params.k /= gamma(1.5);
        s
    };
    let f = |t: f64| eval_h(t, &g, &cfg());
    let mass = h_transform_numeric(&f, 1e-12, &HSeq::exp_kernel(), &cfg()).unwrap();
    assert!((mass - 1.0).abs() < 1e-8);

    // E[ln t] of the Lévy law at a = 1 is γ_e
    let l = levy(1.0);
    let f = |t: f64| Ok((t - 1.0) * eval_h(t, &l, &cfg())?);
    let lm = h_transform_numeric(&f, 1.0, &HSeq::ln_kernel(), &cfg()).unwrap();
    assert!((lm - EULER).abs() < 1e-8, "{lm}");

    // Laplace transform of M_{1/2} at 1 is E_{1/2}(−1) = e·erfc(1)
    let f = |t: f64| mwright_pdf(0.5, t, &cfg());
    let lap = h_transform_numeric(&f, 1.0, &HSeq::exp_kernel(), &cfg()).unwrap();
    assert!((lap - std::f64::consts::E * erfc(1.0)).abs() < 1e-8, "{lap}");
}

#[test]
fn divergent_transform_is_refused() {
    // ∫ t·lévy(t) dt diverges
    let l = levy(1.0);
    let f = |t: f64| Ok(t * eval_h(t, &l, &cfg())?);
    let r = h_transform_numeric(&f, 1e-300, &HSeq::exp_kernel(), &cfg());
    assert!(r.is_err() || !r.unwrap().is_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_rescales_the_density(alpha in 0.05f64..20.0, x in 0.01f64..50.0) {
        let l = levy(1.0);
        let lhs = eval_h(x, &l.scale(alpha).unwrap(), &cfg()).unwrap();
        let rhs = eval_h(x / alpha, &l, &cfg()).unwrap() / alpha;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-300));
    }

    #[test]
    fn levy_kernel_matches_closed_form(t in 0.01f64..1e4) {
        let want = 1.0 / (4.0 * PI * t * t * t).sqrt() * (-1.0 / (4.0 * t)).exp();
        let got = eval_h(t, &levy(1.0), &cfg()).unwrap();
        prop_assert!((got - want).abs() <= 1e-9 * want.max(1e-300), "{} vs {}", got, want);
    }

    #[test]
    fn mwright_series_and_contour(nu in 0.1f64..0.9, t in 0.05f64..3.0) {
        let k = mwright(nu);
        let c = eval_h_contour(t, &k, &cfg()).unwrap();
        if let Some(s) = eval_h_series(t, &k, &cfg()).unwrap() {
            prop_assert!((s - c).abs() < 1e-8 * s.abs().max(1.0));
        }
    }
}
