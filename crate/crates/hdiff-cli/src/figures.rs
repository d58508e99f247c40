//! Data behind the reference figures. Each figure writes its CSV (with the
//! analytic asymptotes beside the curves) and a plot description.

use crate::output::{num, Output, PlotSpec, Series};
use anyhow::Result;
use clap::ValueEnum;
use hdiff::diffusion::shd_standard;
use hdiff::link::{self, high_snr_expansion, least_squares_slope};
use hdiff::noise::{shd_geometric_power, NoiseModel};
use hdiff::EvalConfig;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FigureId {
    /// Noise CDF of the three scenarios.
    #[value(name = "fig2-cdf")]
    Cdf,
    /// Noise survival with the tail asymptotes.
    #[value(name = "fig3-survival")]
    Survival,
    /// Noise power over (alpha1, alpha2) at three distances.
    #[value(name = "fig4-noisepower")]
    NoisePower,
    /// Error bound of the three scenarios, M = 2, N = 1.
    #[value(name = "fig5-sep")]
    Sep,
    /// Error bound of the (1.8,1)-SHD for M = 2, 4, 8, 16 at N = 2.
    #[value(name = "fig6-sep-M")]
    SepM,
    /// Error bound of the (2,0.5)-SHD for N = 1..4 at M = 4.
    #[value(name = "fig7-sep-N")]
    SepN,
    /// Level lines of the high-SNR slope over (alpha1, alpha2).
    #[value(name = "fig8-slope")]
    Slope,
}

pub const A: f64 = 1e-5;
pub const K: f64 = 1e-10;
pub const SCENARIOS: [(f64, f64); 3] = [(2.0, 1.0), (2.0, 0.5), (1.8, 1.0)];

fn tag(a1: f64, a2: f64) -> String {
    format!("{a1}_{a2}")
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

pub fn lin_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn columns(xs: &[f64], cols: &[Vec<f64>]) -> Vec<Vec<String>> {
    (0..xs.len()).map(|i| std::iter::once(num(xs[i])).chain(cols.iter().map(|c| num(c[i]))).collect()).collect()
}

fn line(title: &str, data: &str, x: &str, x_label: &str, y_label: &str, logs: (bool, bool), series: Vec<Series>) -> PlotSpec {
    PlotSpec {
        kind: "line",
        title: title.into(),
        data: data.into(),
        x: x.into(),
        x_label: x_label.into(),
        y_label: y_label.into(),
        x_log: logs.0,
        y_log: logs.1,
        series,
        z: None,
    }
}

fn series(y: String, label: String, dashed: bool) -> Series {
    Series { y, label, style: if dashed { "dashed" } else { "solid" } }
}

fn noise(a1: f64, a2: f64) -> Result<NoiseModel> {
    Ok(NoiseModel::new(&shd_standard(a1, a2, K)?, A)?)
}

pub fn run(id: FigureId, out: &mut Output, cfg: &EvalConfig) -> Result<()> {
    out.note("a", A);
    out.note("K", K);
    match id {
        FigureId::Cdf | FigureId::Survival => noise_curves(id, out, cfg),
        FigureId::NoisePower => noise_power(out),
        FigureId::Sep => {
            let cases: Vec<_> = SCENARIOS.iter().map(|&(a1, a2)| (a1, a2, 2, 1, tag(a1, a2))).collect();
            sep_figure("fig5-sep", "Error bound, M = 2, N = 1", &cases, out, cfg)
        }
        FigureId::SepM => {
            let cases: Vec<_> = [2, 4, 8, 16].iter().map(|&m| (1.8, 1.0, m, 2, format!("M{m}"))).collect();
            sep_figure("fig6-sep-M", "(1.8,1)-SHD, N = 2", &cases, out, cfg)
        }
        FigureId::SepN => {
            let cases: Vec<_> = (1..=4).map(|n| (2.0, 0.5, 4, n, format!("N{n}"))).collect();
            sep_figure("fig7-sep-N", "(2,0.5)-SHD, M = 4", &cases, out, cfg)
        }
        FigureId::Slope => slope_levels(out),
    }
}

fn noise_curves(id: FigureId, out: &mut Output, cfg: &EvalConfig) -> Result<()> {
    let survival = matches!(id, FigureId::Survival);
    let name = if survival { "fig3-survival" } else { "fig2-cdf" };
    let ts = log_grid(1e-2, 1e6, 121);
    let mut cols = Vec::new();
    let mut plot = Vec::new();
    let mut header = vec!["t".to_string()];
    let mut slopes = Vec::new();
    for &(a1, a2) in &SCENARIOS {
        let nm = noise(a1, a2)?;
        let tail = nm.survival_tail()?;
        let values = ts
            .iter()
            .map(|&t| if survival { nm.survival(t, cfg) } else { nm.cdf(t, cfg) })
            .collect::<Result<Vec<_>, _>>()?;
        // blank where the leading term is no longer a probability
        let asym: Vec<f64> = ts
            .iter()
            .map(|&t| match tail.leading(t) {
                v if !(0.0..=1.0).contains(&v) => f64::NAN,
                v if survival => v,
                v => 1.0 - v,
            })
            .collect();
        let tg = tag(a1, a2);
        let what = if survival { "survival" } else { "cdf" };
        header.push(format!("{what}_{tg}"));
        header.push(format!("tail_{tg}"));
        plot.push(series(format!("{what}_{tg}"), format!("({a1},{a2})-SHD"), false));
        plot.push(series(format!("tail_{tg}"), format!("({a1},{a2})-SHD tail"), true));
        if survival {
            let fit_t = log_grid(1e2, 1e6, 50);
            let xs: Vec<f64> = fit_t.iter().map(|t| t.log10()).collect();
            let ys = fit_t.iter().map(|&t| nm.survival(t, cfg).map(f64::log10)).collect::<Result<Vec<_>, _>>()?;
            slopes.push(vec![num(a1), num(a2), num(nm.tail_constant()), num(-least_squares_slope(&xs, &ys))]);
        }
        cols.push(values);
        cols.push(asym);
    }
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv(&format!("{name}.csv"), &h, &columns(&ts, &cols))?;
    if survival {
        out.csv("fig3-slopes.csv", &["alpha1", "alpha2", "kappa", "fitted_slope"], &slopes)?;
    }
    let y = if survival { "P(t > t)" } else { "P(t <= t)" };
    out.plot(&format!("{name}.json"), &line(name, &format!("{name}.csv"), "t", "t [s]", y, (true, survival), plot))
}

fn noise_power(out: &mut Output) -> Result<()> {
    let a1s = lin_grid(0.5, 2.0, 31);
    let a2s = lin_grid(0.05, 1.0, 20);
    for (panel, a) in [("a", 1e-5), ("b", 1e-8), ("c", 1e-10)] {
        let mut rows = Vec::new();
        for &a1 in &a1s {
            for &a2 in &a2s {
                let p = shd_standard(a1, a2, K)?.shd.expect("standard");
                let s = shd_geometric_power(&p, a);
                rows.push(vec![num(a1), num(a2), num(20.0 * s.log10()), num(s)]);
            }
        }
        let data = format!("fig4{panel}-noisepower.csv");
        out.csv(&data, &["alpha1", "alpha2", "noise_power_db", "geometric_power"], &rows)?;
        let spec = PlotSpec {
            kind: "heatmap",
            title: format!("Noise power [dB], a = {a}"),
            data: data.clone(),
            x: "alpha1".into(),
            x_label: "alpha1".into(),
            y_label: "alpha2".into(),
            x_log: false,
            y_log: false,
            series: vec![series("alpha2".into(), "alpha2".into(), false)],
            z: Some("noise_power_db".into()),
        };
        out.plot(&format!("fig4{panel}-noisepower.json"), &spec)?;
    }
    Ok(())
}

/// `(α1, α2, M, N, label)` cases on one SNR axis.
type Case = (f64, f64, usize, usize, String);

fn sep_figure(name: &str, title: &str, cases: &[Case], out: &mut Output, cfg: &EvalConfig) -> Result<()> {
    let db = lin_grid(0.0, 120.0, 121);
    let snrs: Vec<f64> = db.iter().map(|d| 10f64.powf(d / 10.0)).collect();
    let mut header = vec!["snr_db".to_string()];
    let mut cols = Vec::new();
    let mut plot = Vec::new();
    let mut summary = Vec::new();
    for (a1, a2, m, n, label) in cases {
        let p = shd_standard(*a1, *a2, K)?.shd.expect("standard");
        let e = high_snr_expansion(&p, *m, *n)?;
        cols.push(link::sep_curve_shd(&p, *m, *n, &snrs, cfg)?);
        cols.push(snrs.iter().map(|&s| e.asymptote(s)).collect());
        header.push(format!("sep_{label}"));
        header.push(format!("asymptote_{label}"));
        plot.push(series(format!("sep_{label}"), label.clone(), false));
        plot.push(series(format!("asymptote_{label}"), format!("{label} asymptote"), true));
        let fitted = link::fitted_slope(&p, *m, *n, 1e8, 1e12, 9, cfg)?;
        summary.push(vec![label.clone(), num(*a1), num(*a2), m.to_string(), n.to_string(), num(e.s_inf), num(e.p_inf), num(fitted)]);
    }
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv(&format!("{name}.csv"), &h, &columns(&db, &cols))?;
    out.csv(&format!("{name}-slopes.csv"), &["case", "alpha1", "alpha2", "M", "N", "s_inf", "p_inf", "fitted_slope"], &summary)?;
    out.plot(&format!("{name}.json"), &line(title, &format!("{name}.csv"), "snr_db", "SNR [dB]", "P_e", (false, true), plot))
}

fn slope_levels(out: &mut Output) -> Result<()> {
    let levels = [0.45, 0.40, 0.35, 0.30, 0.25];
    let a1s = lin_grid(0.1, 2.0, 191);
    // s∞/N = min{α2/2, α2/(2α1)}, solved for α2 on each level
    let cols: Vec<Vec<f64>> = levels
        .iter()
        .map(|&l| {
            a1s.iter()
                .map(|&a1| {
                    let a2 = 2.0 * l * a1.max(1.0);
                    if a2 <= 1.0 {
                        a2
                    } else {
                        f64::NAN
                    }
                })
                .collect()
        })
        .collect();
    let mut header = vec!["alpha1".to_string()];
    header.extend(levels.iter().map(|l| format!("alpha2_at_{l}N")));
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv("fig8-slope.csv", &h, &columns(&a1s, &cols))?;
    let plot = levels.iter().map(|l| series(format!("alpha2_at_{l}N"), format!("s = {l}N"), false)).collect();
    out.plot("fig8-slope.json", &line("High-SNR slope level lines", "fig8-slope.csv", "alpha1", "alpha1", "alpha2", (false, false), plot))
}
