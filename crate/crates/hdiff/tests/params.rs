use hdiff::hfunc::eval_h;
use hdiff::hvariate::{stable_to_h, HVariate, StableParams};
use hdiff::montecarlo::{ks_statistic_bounded, par_draw, sample_fpt, sample_onesided_stable, sorted};
use hdiff::diffusion::Preset;
use hdiff::{EvalConfig, HSeq, OrderSeq, ParamError};
use proptest::prelude::*;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

fn cfg() -> EvalConfig {
    EvalConfig::default()
}

fn stable_parent(a1: f64) -> HSeq {
    HSeq::from_parts((1, 1, 2, 2), 2.0 / a1, 1.0, &[1.0 - 1.0 / a1, 0.5], &[0.0, 0.5], &[1.0 / a1, 0.5], &[1.0, 0.5]).unwrap()
}

fn mwright(a2: f64) -> HSeq {
    HSeq::from_parts((1, 0, 1, 1), 1.0, 1.0, &[1.0 - a2], &[0.0], &[a2], &[1.0]).unwrap()
}

// Gamma(g + 1, 1) law: x^g e^{-x} / Γ(g + 1)
fn gamma_law(g: f64) -> HSeq {
    let mut s = HSeq::exp_kernel().conjugate(g).unwrap();
    s.params.k /= gamma(g + 1.0);
    s
}

#[test]
fn elementary_row_on_directing_sequence() {
    // E(1, ω1, 1/ω1 − 1) with ω1 = 1/2 on P(α2 = 1/2); βγ = 1/2
    let e = mwright(0.5).elementary(1.0, 0.5, 1.0).unwrap();
    assert_eq!(e.order, OrderSeq::new(1, 0, 1, 1));
    let p = &e.params;
    assert_eq!(p.k, 1.0);
    assert_eq!(p.c, 1.0);
    assert_eq!(p.a, vec![0.5 + 0.5 * 0.5]);
    assert_eq!(p.b, vec![0.5]);
    assert_eq!(p.big_a, vec![0.25]);
    assert_eq!(p.big_b, vec![0.5]);
}

#[test]
fn elementary_with_nonunit_alpha_and_c() {
    let s = HSeq::from_parts((1, 0, 1, 1), 3.0, 2.0, &[0.2], &[0.1], &[0.5], &[1.5]).unwrap();
    let e = s.elementary(4.0, 0.5, 2.0).unwrap();
    // k/(αc)^{βγ} = 3/8, (αc)^β = √8
    assert!((e.params.k - 3.0 / 8.0).abs() < 1e-15);
    assert!((e.params.c - 8f64.sqrt()).abs() < 1e-15);
    assert_eq!(e.params.a, vec![0.2 + 0.5]);
    assert_eq!(e.params.b, vec![0.1 + 1.5]);
    assert_eq!(e.params.big_a, vec![0.25]);
    assert_eq!(e.params.big_b, vec![0.75]);
}

#[test]
fn convolution_reproduces_position_sequence() {
    for (a1, a2, w1) in [(2.0, 1.0, 0.5), (1.5, 0.7, 1.0 / 1.5), (1.8, 0.4, 0.9)] {
        let d = mwright(a2).elementary(1.0, w1, 1.0 / w1 - 1.0).unwrap();
        let got = stable_parent(a1).convolve(&d);
        let want = HSeq::from_parts(
            (2, 1, 3, 3),
            2.0 / a1,
            1.0,
            &[1.0 - 1.0 / a1, 1.0 - w1 * a2, 0.5],
            &[0.0, 1.0 - w1, 0.5],
            &[1.0 / a1, w1 * a2, 0.5],
            &[1.0, w1, 0.5],
        )
        .unwrap();
        assert!(got.same_layout(&want, 1e-14), "{got:?}");
        // same interleaving, not just the same groups
        for (x, y) in got.params.a.iter().zip(&want.params.a) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}

#[test]
fn mellin_with_null_and_order_rule() {
    let s = stable_parent(1.5);
    assert_eq!(s.mellin(&HSeq::null()), s);
    let t = mwright(0.3);
    let r = s.mellin(&t);
    assert_eq!(r.order, OrderSeq::new(1 + 0, 1 + 1, 2 + 1, 2 + 1));
}

#[test]
fn mellin_evaluates_the_integral() {
    // exp ⊠ exp: ∫ e^{-st} e^{-t} dt = 1/(1+s)
    let r = HSeq::exp_kernel().mellin(&HSeq::exp_kernel());
    for s in [0.3, 1.0, 4.0] {
        let v = eval_h(s, &r, &cfg()).unwrap();
        assert!((v - 1.0 / (1.0 + s)).abs() < 1e-10, "{s}: {v}");
    }
}

#[test]
fn convolution_associative_by_evaluation() {
    let x = gamma_law(0.5);
    let y = gamma_law(1.5).scale(2.0).unwrap();
    let z = HSeq::exp_kernel().scale(0.7).unwrap();
    let l = x.convolve(&y).convolve(&z);
    let r = x.convolve(&y.convolve(&z));
    for t in [0.5, 1.0, 2.0] {
        let (a, b) = (eval_h(t, &l, &cfg()).unwrap(), eval_h(t, &r, &cfg()).unwrap());
        assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300), "{t}: {a} vs {b}");
    }
}

#[test]
fn product_law_moments_multiply() {
    let (g1, g2) = (0.5, 2.0);
    let xy = HVariate::one_sided(gamma_law(g1).convolve(&gamma_law(g2))).unwrap();
    for l in 1..=3u32 {
        let lf = l as f64;
        let want = gamma(g1 + 1.0 + lf) / gamma(g1 + 1.0) * gamma(g2 + 1.0 + lf) / gamma(g2 + 1.0);
        let got = xy.moment(l).unwrap().value().unwrap();
        assert!((got / want - 1.0).abs() < 1e-10, "ℓ={l}: {got} vs {want}");
    }
}

#[test]
fn product_of_half_stables_against_simulation() {
    // integer moments of a one-sided ½-stable do not exist; use E|xy|^r, r = 0.2
    let sp = StableParams::new(0.5, 1.0, 1.0, 0.0);
    let v = stable_to_h(&sp, 1.0).unwrap();
    let prod = HVariate::one_sided(v.seq().convolve(v.seq())).unwrap();
    let r = 0.2;
    let analytic = prod.abs_moment(r).unwrap().unwrap();
    let single = v.abs_moment(r).unwrap().unwrap();
    assert!((analytic - single * single).abs() < 1e-10 * analytic);
    let draws = par_draw(1_000_000, 11, 0, |rng| {
        let x = sample_onesided_stable(0.5, 1.0, rng);
        let y = sample_onesided_stable(0.5, 1.0, rng);
        (x * y).powf(r)
    });
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((mean - analytic).abs() < 3.0 * (var / n).sqrt(), "{mean} vs {analytic}");
}

#[test]
fn scaling_law_in_distribution() {
    let bm = Preset::Bm.spec().unwrap();
    let alpha = 3.0;
    let xs = sorted(par_draw(100_000, 5, 0, |rng| alpha * sample_fpt(&bm, 1.0, rng)));
    let levy = HSeq::from_parts((0, 1, 1, 0), 4.0 / PI.sqrt(), 4.0, &[-0.5], &[], &[1.0], &[]).unwrap();
    let v = HVariate::one_sided(levy.scale(alpha).unwrap()).unwrap();
    let d = ks_statistic_bounded(&xs, |t| v.cdf(t, &cfg()), 2000).unwrap();
    assert!(d < 0.01, "KS {d}");
}

#[test]
fn validation_diagnostics() {
    let bm = HSeq::from_parts((1, 0, 0, 1), 0.5 / PI.sqrt(), 0.5, &[], &[0.0], &[], &[0.5]).unwrap();
    let d = bm.validate_density(&cfg());
    assert!(d.is_valid(), "{:?}", d.messages);
    assert!((d.density.unwrap().integral - 1.0).abs() < 1e-6);

    let mut flat = bm.clone();
    flat.params.big_b[0] = 0.0;
    let d = flat.validate();
    assert!(!d.slopes_positive && !d.is_valid());

    let mut half = bm.clone();
    half.params.k *= 0.5;
    let d = half.validate_density(&cfg());
    let dc = d.density.clone().unwrap();
    assert!(!dc.is_density && (dc.integral - 0.5).abs() < 1e-6);
    assert!(d.messages.iter().any(|m| m.contains("not a density")));
}

#[test]
fn constructor_errors() {
    assert!(matches!(
        HSeq::from_parts((2, 0, 0, 1), 1.0, 1.0, &[], &[0.0], &[], &[1.0]),
        Err(ParamError::OrderOutOfRange { .. })
    ));
    assert!(matches!(HSeq::from_parts((1, 0, 1, 1), 1.0, 1.0, &[], &[0.0], &[], &[1.0]), Err(ParamError::LengthMismatch(_))));
    let s = stable_parent(1.5);
    assert!(s.scale(0.0).is_err());
    assert!(s.elementary(1.0, -1.0, 0.0).is_err());
    assert!(s.conjugate(f64::NAN).is_err());
}

#[test]
fn text_form_has_the_documented_keys() {
    let s = stable_parent(1.5);
    let v: serde_json::Value = serde_json::to_value(&s).unwrap();
    for key in ["k", "c", "a", "b", "A", "B", "m", "n", "p", "q"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

fn arb_seq() -> impl Strategy<Value = HSeq> {
    (0usize..3, 0usize..3, 0usize..3, 0usize..3).prop_flat_map(|(m, dq, n, dp)| {
        let (p, q) = (n + dp, m + dq);
        (
            0.1f64..5.0,
            0.1f64..5.0,
            prop::collection::vec(-2.0f64..2.0, p),
            prop::collection::vec(-2.0f64..2.0, q),
            prop::collection::vec(0.1f64..3.0, p),
            prop::collection::vec(0.1f64..3.0, q),
        )
            .prop_map(move |(k, c, a, b, aa, bb)| HSeq::from_parts((m, n, p, q), k, c, &a, &b, &aa, &bb).unwrap())
    })
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs()))
}

fn same(x: &HSeq, y: &HSeq) -> bool {
    let (p, q) = (&x.params, &y.params);
    let v = |u: &[f64], w: &[f64]| u.len() == w.len() && u.iter().zip(w).all(|(a, b)| close(*a, *b));
    x.order == y.order && close(p.k, q.k) && close(p.c, q.c) && v(&p.a, &q.a) && v(&p.b, &q.b) && v(&p.big_a, &q.big_a) && v(&p.big_b, &q.big_b)
}

proptest! {
    #[test]
    fn inverse_is_an_involution(s in arb_seq()) {
        prop_assert!(same(&s.inverse().inverse(), &s));
    }

    #[test]
    fn scaling_composes(s in arb_seq(), a in 0.1f64..10.0, b in 0.1f64..10.0) {
        prop_assert!(same(&s.scale(a).unwrap().scale(b).unwrap(), &s.scale(a * b).unwrap()));
        prop_assert_eq!(s.scale(1.0).unwrap(), s);
    }

    #[test]
    fn conjugation_adds(s in arb_seq(), g1 in -2.0f64..2.0, g2 in -2.0f64..2.0) {
        let l = s.conjugate(g1).unwrap().conjugate(g2).unwrap();
        prop_assert!(same(&l, &s.conjugate(g1 + g2).unwrap()));
    }

    #[test]
    fn binary_order_arithmetic(x in arb_seq(), y in arb_seq()) {
        let (o1, o2) = (x.order, y.order);
        prop_assert_eq!(x.convolve(&y).order, OrderSeq::new(o1.m + o2.m, o1.n + o2.n, o1.p + o2.p, o1.q + o2.q));
        prop_assert_eq!(x.mellin(&y).order, OrderSeq::new(o1.m + o2.n, o1.n + o2.m, o1.p + o2.q, o1.q + o2.p));
        let c = x.convolve(&y);
        prop_assert!(close(c.params.k, x.params.k * y.params.k) && close(c.params.c, x.params.c * y.params.c));
    }

    #[test]
    fn null_is_neutral_for_convolution(s in arb_seq()) {
        prop_assert_eq!(s.convolve(&HSeq::null()), s.clone());
        prop_assert_eq!(HSeq::null().convolve(&s), s);
    }

    #[test]
    fn text_round_trip_is_exact(s in arb_seq()) {
        let txt = serde_json::to_string(&s).unwrap();
        let back: HSeq = serde_json::from_str(&txt).unwrap();
        prop_assert_eq!(back, s);
    }
}
