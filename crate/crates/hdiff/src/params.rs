//! Order and parameter sequences of Fox H-functions and the closed-form
//! operations on them (scaling, conjugation, elementary transform, inverse,
//! Mellin operation and convolution).
//!
//! Sequences are stored flat. The split index `n` separates `a`/`A` into the
//! leading block (`ȧ`, inside the numerator) and the trailing block (`ä`);
//! `m` does the same for `b`/`B`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("order out of range: m={m} n={n} p={p} q={q}")]
    OrderOutOfRange { m: usize, n: usize, p: usize, q: usize },
    #[error("nonpositive slope {field}[{index}] = {value}")]
    NonPositiveSlope { field: &'static str, index: usize, value: f64 },
}

/// `(m, n, p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderSeq {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
}

impl OrderSeq {
    pub const fn new(m: usize, n: usize, p: usize, q: usize) -> Self {
        OrderSeq { m, n, p, q }
    }
}

/// `(k, c, a, b, A, B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSeq {
    pub k: f64,
    pub c: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub big_a: Vec<f64>,
    pub big_b: Vec<f64>,
}

/// An order sequence together with its parameter sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeqText", into = "SeqText")]
pub struct HSeq {
    pub order: OrderSeq,
    pub params: ParamSeq,
}

#[derive(Serialize, Deserialize)]
struct SeqText {
    k: f64,
    c: f64,
    a: Vec<f64>,
    b: Vec<f64>,
    #[serde(rename = "A")]
    big_a: Vec<f64>,
    #[serde(rename = "B")]
    big_b: Vec<f64>,
    m: usize,
    n: usize,
    p: usize,
    q: usize,
}

impl From<HSeq> for SeqText {
    fn from(s: HSeq) -> Self {
        let HSeq { order, params } = s;
        SeqText {
            k: params.k,
            c: params.c,
            a: params.a,
            b: params.b,
            big_a: params.big_a,
            big_b: params.big_b,
            m: order.m,
            n: order.n,
            p: order.p,
            q: order.q,
        }
    }
}

impl TryFrom<SeqText> for HSeq {
    type Error = ParamError;
    fn try_from(t: SeqText) -> Result<Self, ParamError> {
        HSeq::new(
            OrderSeq::new(t.m, t.n, t.p, t.q),
            ParamSeq { k: t.k, c: t.c, a: t.a, b: t.b, big_a: t.big_a, big_b: t.big_b },
        )
    }
}

/// Output of [`HSeq::validate`].
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Diagnostics {
    pub lengths_ok: bool,
    pub slopes_positive: bool,
    pub scale_positive: bool,
    /// Poles of the numerator `b`-factors and `a`-factors never coincide.
    pub poles_separated: bool,
    /// A vertical line separates the two pole families.
    pub strip_nonempty: bool,
    /// `None` when the density check was not requested.
    pub density: Option<DensityCheck>,
    pub messages: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCheck {
    pub integral: f64,
    pub nonnegative: bool,
    pub is_density: bool,
}

impl Diagnostics {
    pub fn is_valid(&self) -> bool {
        self.lengths_ok
            && self.slopes_positive
            && self.scale_positive
            && self.poles_separated
            && self.density.as_ref().is_none_or(|d| d.is_density)
    }
}

fn interleave(x1: &[f64], split1: usize, x2: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(x1.len() + x2.len());
    v.extend_from_slice(&x1[..split1]);
    v.extend_from_slice(x2);
    v.extend_from_slice(&x1[split1..]);
    v
}

fn check_positive(name: &'static str, v: f64) -> Result<(), ParamError> {
    if !v.is_finite() {
        return Err(ParamError::NonFinite { name, value: v });
    }
    if v <= 0.0 {
        return Err(ParamError::NonPositive { name, value: v });
    }
    Ok(())
}

impl HSeq {
    /// Builds a sequence pair, checking lengths and the order ranges.
    /// Positivity of the slopes and of `c` is checked separately by
    /// [`HSeq::validate`] so that malformed inputs can still be diagnosed.
    pub fn new(order: OrderSeq, params: ParamSeq) -> Result<Self, ParamError> {
        let OrderSeq { m, n, p, q } = order;
        if m > q || n > p {
            return Err(ParamError::OrderOutOfRange { m, n, p, q });
        }
        if params.a.len() != p || params.big_a.len() != p {
            return Err(ParamError::LengthMismatch(format!(
                "p={p} but len(a)={} len(A)={}",
                params.a.len(),
                params.big_a.len()
            )));
        }
        if params.b.len() != q || params.big_b.len() != q {
            return Err(ParamError::LengthMismatch(format!(
                "q={q} but len(b)={} len(B)={}",
                params.b.len(),
                params.big_b.len()
            )));
        }
        Ok(HSeq { order, params })
    }

    /// Convenience constructor from raw slices.
    pub fn from_parts(order: (usize, usize, usize, usize), k: f64, c: f64, a: &[f64], b: &[f64], big_a: &[f64], big_b: &[f64]) -> Result<Self, ParamError> {
        HSeq::new(
            OrderSeq::new(order.0, order.1, order.2, order.3),
            ParamSeq { k, c, a: a.to_vec(), b: b.to_vec(), big_a: big_a.to_vec(), big_b: big_b.to_vec() },
        )
    }

    /// The null pair `(O_∅, P_∅)`: the Dirac delta at 1, neutral for
    /// convolution.
    pub fn null() -> Self {
        HSeq {
            order: OrderSeq::new(0, 0, 0, 0),
            params: ParamSeq { k: 1.0, c: 1.0, a: vec![], b: vec![], big_a: vec![], big_b: vec![] },
        }
    }

    pub fn is_null(&self) -> bool {
        self.order == OrderSeq::new(0, 0, 0, 0) && self.params.k == 1.0 && self.params.c == 1.0
    }

    /// Indicator of `x > 1`; convolving it with `⟨1|P` gives the CDF kernel.
    pub fn cdf_kernel() -> Self {
        HSeq::from_parts((0, 1, 1, 1), 1.0, 1.0, &[1.0], &[0.0], &[1.0], &[1.0]).expect("static sequence")
    }

    /// `exp(-x)`.
    pub fn exp_kernel() -> Self {
        HSeq::from_parts((1, 0, 0, 1), 1.0, 1.0, &[], &[0.0], &[], &[1.0]).expect("static sequence")
    }

    /// `ln(x) / (x - 1)`.
    pub fn ln_kernel() -> Self {
        HSeq::from_parts((2, 2, 2, 2), 1.0, 1.0, &[0.0, 0.0], &[0.0, 0.0], &[1.0, 1.0], &[1.0, 1.0]).expect("static sequence")
    }

    /// `P⟨α⟩`: the law of `αx` when `x` has law `P`.
    pub fn scale(&self, alpha: f64) -> Result<Self, ParamError> {
        check_positive("alpha", alpha)?;
        let mut out = self.clone();
        out.params.k /= alpha;
        out.params.c /= alpha;
        Ok(out)
    }

    /// `⟨γ|P`: multiplies the function by `x^γ`.
    pub fn conjugate(&self, gamma: f64) -> Result<Self, ParamError> {
        if !gamma.is_finite() {
            return Err(ParamError::NonFinite { name: "gamma", value: gamma });
        }
        let p = &self.params;
        let mut out = self.clone();
        out.params.k = p.k / p.c.powf(gamma);
        out.params.a = p.a.iter().zip(&p.big_a).map(|(a, aa)| a + gamma * aa).collect();
        out.params.b = p.b.iter().zip(&p.big_b).map(|(b, bb)| b + gamma * bb).collect();
        Ok(out)
    }

    /// `E(α, β, γ)P`.
    pub fn elementary(&self, alpha: f64, beta: f64, gamma: f64) -> Result<Self, ParamError> {
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        if !gamma.is_finite() {
            return Err(ParamError::NonFinite { name: "gamma", value: gamma });
        }
        let p = &self.params;
        let ac = alpha * p.c;
        let bg = beta * gamma;
        let mut out = self.clone();
        out.params.k = p.k / ac.powf(bg);
        out.params.c = ac.powf(beta);
        out.params.a = p.a.iter().zip(&p.big_a).map(|(a, aa)| a + bg * aa).collect();
        out.params.b = p.b.iter().zip(&p.big_b).map(|(b, bb)| b + bg * bb).collect();
        out.params.big_a = p.big_a.iter().map(|x| beta * x).collect();
        out.params.big_b = p.big_b.iter().map(|x| beta * x).collect();
        Ok(out)
    }

    /// `(O⁻¹, P⁻¹)`; an involution.
    pub fn inverse(&self) -> Self {
        let OrderSeq { m, n, p, q } = self.order;
        let s = &self.params;
        HSeq {
            order: OrderSeq::new(n, m, q, p),
            params: ParamSeq {
                k: s.k,
                c: 1.0 / s.c,
                a: s.b.iter().map(|b| 1.0 - b).collect(),
                b: s.a.iter().map(|a| 1.0 - a).collect(),
                big_a: s.big_b.clone(),
                big_b: s.big_a.clone(),
            },
        }
    }

    /// `P1 ⊠ P2`: the function `s ↦ ∫ k1 H1(c1 s t) k2 H2(c2 t) dt`.
    pub fn mellin(&self, other: &HSeq) -> Self {
        let (o1, p1) = (self.order, &self.params);
        let (o2, p2) = (other.order, &other.params);
        let one_minus_b_minus_bb: Vec<f64> = p2.b.iter().zip(&p2.big_b).map(|(b, bb)| 1.0 - b - bb).collect();
        let one_minus_a_minus_aa: Vec<f64> = p2.a.iter().zip(&p2.big_a).map(|(a, aa)| 1.0 - a - aa).collect();
        HSeq {
            order: OrderSeq::new(o1.m + o2.n, o1.n + o2.m, o1.p + o2.q, o1.q + o2.p),
            params: ParamSeq {
                k: p1.k * p2.k / p2.c,
                c: p1.c / p2.c,
                a: interleave(&p1.a, o1.n, &one_minus_b_minus_bb),
                b: interleave(&p1.b, o1.m, &one_minus_a_minus_aa),
                big_a: interleave(&p1.big_a, o1.n, &p2.big_b),
                big_b: interleave(&p1.big_b, o1.m, &p2.big_a),
            },
        }
    }

    /// `P1 ⊛ P2`: the Mellin convolution `∫ H1(x/y) H2(y) dy/y`, i.e. the
    /// law of the product of independent variates.
    pub fn convolve(&self, other: &HSeq) -> Self {
        let (o1, p1) = (self.order, &self.params);
        let (o2, p2) = (other.order, &other.params);
        HSeq {
            order: OrderSeq::new(o1.m + o2.m, o1.n + o2.n, o1.p + o2.p, o1.q + o2.q),
            params: ParamSeq {
                k: p1.k * p2.k,
                c: p1.c * p2.c,
                a: interleave(&p1.a, o1.n, &p2.a),
                b: interleave(&p1.b, o1.m, &p2.b),
                big_a: interleave(&p1.big_a, o1.n, &p2.big_a),
                big_b: interleave(&p1.big_b, o1.m, &p2.big_b),
            },
        }
    }

    /// Structural checks. The numeric density check is
    /// [`HSeq::validate_density`].
    pub fn validate(&self) -> Diagnostics {
        let mut d = Diagnostics::default();
        let OrderSeq { m, n, p, q } = self.order;
        let s = &self.params;
        d.lengths_ok = m <= q && n <= p && s.a.len() == p && s.big_a.len() == p && s.b.len() == q && s.big_b.len() == q;
        if !d.lengths_ok {
            d.messages.push("length or order mismatch".into());
            return d;
        }
        d.slopes_positive = true;
        for (field, v) in [("A", &s.big_a), ("B", &s.big_b)] {
            for (i, x) in v.iter().enumerate() {
                if !(*x > 0.0 && x.is_finite()) {
                    d.slopes_positive = false;
                    d.messages.push(format!("nonpositive slope {field}[{i}] = {x}"));
                }
            }
        }
        d.scale_positive = s.c > 0.0 && s.c.is_finite() && s.k.is_finite();
        if !d.scale_positive {
            d.messages.push(format!("invalid k={} or c={}", s.k, s.c));
        }
        if !d.slopes_positive {
            return d;
        }
        // right poles (b_j + l)/B_j, j < m; left poles (a_i - 1 - l)/A_i, i < n
        let right_min = (0..m).map(|j| s.b[j] / s.big_b[j]).fold(f64::INFINITY, f64::min);
        let left_max = (0..n).map(|i| (s.a[i] - 1.0) / s.big_a[i]).fold(f64::NEG_INFINITY, f64::max);
        d.strip_nonempty = left_max < right_min;
        d.poles_separated = d.strip_nonempty || poles_disjoint(self);
        if !d.poles_separated {
            d.messages.push("pole families of the numerator overlap".into());
        } else if !d.strip_nonempty {
            d.messages.push("pole families interlace: no vertical contour separates them".into());
        }
        d
    }

    /// [`HSeq::validate`] plus a numeric check that the sequence is a
    /// probability density on `(0, ∞)`.
    pub fn validate_density(&self, cfg: &crate::hfunc::EvalConfig) -> Diagnostics {
        let mut d = self.validate();
        if !(d.lengths_ok && d.slopes_positive && d.scale_positive && d.strip_nonempty) {
            return d;
        }
        let tol = 1e-6;
        match crate::hfunc::integrate_positive_axis(self, &|_| 1.0, cfg) {
            Ok(integral) => {
                let mut nonnegative = true;
                for i in -40..=40 {
                    let x = 10f64.powf(i as f64 / 8.0);
                    if let Ok(v) = crate::hfunc::eval_h(x, self, cfg) {
                        if v < -1e-10 * v.abs().max(1e-300) && v < -1e-12 {
                            nonnegative = false;
                        }
                    }
                }
                let is_density = nonnegative && (integral - 1.0).abs() <= tol;
                if !is_density {
                    d.messages.push(format!("not a density: integral {integral}, nonnegative {nonnegative}"));
                }
                d.density = Some(DensityCheck { integral, nonnegative, is_density });
            }
            Err(e) => {
                d.messages.push(format!("density check failed: {e}"));
                d.density = Some(DensityCheck { integral: f64::NAN, nonnegative: false, is_density: false });
            }
        }
        d
    }

    /// Same function up to reordering within each of the four gamma groups.
    pub fn same_layout(&self, other: &HSeq, tol: f64) -> bool {
        fn groups(s: &HSeq) -> [Vec<(f64, f64)>; 4] {
            let OrderSeq { m, n, .. } = s.order;
            let p = &s.params;
            let pair = |v: &[f64], w: &[f64], r: std::ops::Range<usize>| -> Vec<(f64, f64)> {
                let mut out: Vec<_> = r.map(|i| (v[i], w[i])).collect();
                out.sort_by(|x, y| x.partial_cmp(y).unwrap());
                out
            };
            [
                pair(&p.a, &p.big_a, 0..n),
                pair(&p.a, &p.big_a, n..p.a.len()),
                pair(&p.b, &p.big_b, 0..m),
                pair(&p.b, &p.big_b, m..p.b.len()),
            ]
        }
        let close = |x: f64, y: f64| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()));
        if self.order != other.order || !close(self.params.k, other.params.k) || !close(self.params.c, other.params.c) {
            return false;
        }
        groups(self).iter().zip(groups(other).iter()).all(|(g1, g2)| g1.iter().zip(g2).all(|(x, y)| close(x.0, y.0) && close(x.1, y.1)))
    }
}

// Exhaustive check of (b_j + l)/B_j == (a_i - 1 - r)/A_i for small l, r.
fn poles_disjoint(s: &HSeq) -> bool {
    let OrderSeq { m, n, .. } = s.order;
    let p = &s.params;
    for j in 0..m {
        for i in 0..n {
            for l in 0..64 {
                let rp = (p.b[j] + l as f64) / p.big_b[j];
                let r = p.a[i] - 1.0 - rp * p.big_a[i];
                if r >= -1e-12 && (r - r.round()).abs() < 1e-10 {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> HSeq {
        HSeq::from_parts((1, 1, 2, 2), 0.7, 1.3, &[0.2, 0.5], &[0.1, 0.4], &[0.6, 1.5], &[1.1, 0.3]).unwrap()
    }

    #[test]
    fn scaling_identity_and_composition() {
        let s = sample();
        assert_eq!(s.scale(1.0).unwrap(), s);
        let ab = s.scale(2.0).unwrap().scale(3.0).unwrap();
        let direct = s.scale(6.0).unwrap();
        assert!((ab.params.k - direct.params.k).abs() < 1e-15);
        assert!((ab.params.c - direct.params.c).abs() < 1e-15);
    }

    #[test]
    fn inverse_involution() {
        let s = sample();
        let back = s.inverse().inverse();
        assert_eq!(back.order, s.order);
        for (x, y) in back.params.a.iter().zip(&s.params.a) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!((back.params.c - s.params.c).abs() < 1e-15);
    }

    #[test]
    fn null_is_neutral() {
        let s = sample();
        assert_eq!(s.convolve(&HSeq::null()), s);
        assert_eq!(HSeq::null().convolve(&s), s);
        assert_eq!(s.mellin(&HSeq::null()), s);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(sample().scale(0.0), Err(ParamError::NonPositive { .. })));
        assert!(matches!(sample().elementary(1.0, -1.0, 0.0), Err(ParamError::NonPositive { .. })));
        assert!(matches!(
            HSeq::from_parts((1, 0, 0, 1), 1.0, 1.0, &[], &[0.0, 1.0], &[], &[1.0]),
            Err(ParamError::LengthMismatch(_))
        ));
        let bad = HSeq::from_parts((1, 1, 1, 1), 1.0, 1.0, &[0.5], &[0.0], &[0.0], &[1.0]).unwrap();
        let d = bad.validate();
        assert!(!d.slopes_positive);
        assert!(d.messages.iter().any(|m| m.contains("nonpositive slope")));
    }

    #[test]
    fn text_round_trip() {
        let s = sample();
        let txt = serde_json::to_string(&s).unwrap();
        assert!(txt.contains("\"A\"") && txt.contains("\"m\":1"));
        let back: HSeq = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, s);
        let broken = txt.replace("\"p\":2", "\"p\":3");
        assert!(serde_json::from_str::<HSeq>(&broken).is_err());
    }

    #[test]
    fn mellin_order_arithmetic() {
        let s1 = sample();
        let s2 = HSeq::from_parts((1, 0, 1, 1), 1.0, 1.0, &[0.5], &[0.0], &[0.5], &[1.0]).unwrap();
        let r = s1.mellin(&s2);
        assert_eq!(r.order, OrderSeq::new(1 + 0, 1 + 1, 2 + 1, 2 + 1));
        let c = s1.convolve(&s2);
        assert_eq!(c.order, OrderSeq::new(2, 1, 3, 3));
        // interleaving: ȧ1, a2, ä1
        assert_eq!(c.params.a, vec![0.2, 0.5, 0.5]);
        assert_eq!(c.params.b, vec![0.1, 0.0, 0.4]);
    }
}
