//! Catalogue tables as CSV. Vectors are `;`-joined so every row parses
//! back into the exact sequences.

use crate::output::{list, num, Output};
use anyhow::Result;
use clap::ValueEnum;
use hdiff::diffusion::{Directing, Preset};
use hdiff::noise::noise_preset_table;
use hdiff::HSeq;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TableId {
    /// Parent and directing sequences of every preset.
    #[value(name = "table3-presets")]
    Presets,
    /// First-passage noise of every preset.
    #[value(name = "table4-noise")]
    Noise,
}

/// Parameters at which the catalogue is tabulated.
pub fn catalogue() -> Vec<(Preset, Option<f64>, Option<f64>)> {
    vec![
        (Preset::StFd { alpha: 1.5, beta: 0.7 }, Some(1.5), Some(0.7)),
        (Preset::SFd { alpha: 1.5, beta: 0.7 }, Some(1.5), Some(0.7)),
        (Preset::TFd { beta: 0.5 }, None, Some(0.5)),
        (Preset::EkFd { alpha: 1.5, beta: 0.7 }, Some(1.5), Some(0.7)),
        (Preset::Gbm { beta: 0.7 }, None, Some(0.7)),
        (Preset::Fbm { alpha: 1.5 }, Some(1.5), None),
        (Preset::Bm, None, None),
    ]
}

pub const SEQ_FIELDS: [&str; 10] = ["m", "n", "p", "q", "k", "c", "a", "b", "A", "B"];

pub fn seq_header(prefix: &str) -> Vec<String> {
    SEQ_FIELDS.iter().map(|f| format!("{prefix}{f}")).collect()
}

/// Cells of `s` in `SEQ_FIELDS` order; a null sequence gives empty cells.
pub fn seq_cells(s: Option<&HSeq>) -> Vec<String> {
    let Some(s) = s else { return vec![String::new(); SEQ_FIELDS.len()] };
    let (o, p) = (&s.order, &s.params);
    vec![
        o.m.to_string(),
        o.n.to_string(),
        o.p.to_string(),
        o.q.to_string(),
        num(p.k),
        num(p.c),
        list(&p.a),
        list(&p.b),
        list(&p.big_a),
        list(&p.big_b),
    ]
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn run(id: TableId, out: &mut Output) -> Result<()> {
    match id {
        TableId::Presets => {
            let mut header: Vec<String> = ["preset", "alpha", "beta", "omega1", "omega2"].map(String::from).to_vec();
            header.extend(seq_header("parent_"));
            header.extend(seq_header("directing_"));
            let mut rows = Vec::new();
            for (p, alpha, beta) in catalogue() {
                let s = p.spec()?;
                let mut r = vec![p.name().to_string(), opt(alpha), opt(beta), num(s.omega1), opt(s.omega2)];
                r.extend(seq_cells(Some(s.parent.law_at_1.seq())));
                let d = match &s.directing {
                    Directing::Degenerate => None,
                    Directing::Process(d) => Some(d.law_at_1.seq()),
                };
                r.extend(seq_cells(d));
                rows.push(r);
            }
            let h: Vec<&str> = header.iter().map(String::as_str).collect();
            out.csv("table3-presets.csv", &h, &rows)?;
        }
        TableId::Noise => {
            let a = 1.0;
            let mut header: Vec<String> = ["preset", "alpha", "beta", "distance", "omega", "g_exp", "geometric_power"].map(String::from).to_vec();
            header.extend(seq_header(""));
            let mut rows = Vec::new();
            for (p, alpha, beta) in catalogue() {
                let row = noise_preset_table(&p, a)?;
                let mut r = vec![p.name().to_string(), opt(alpha), opt(beta), num(a), num(row.omega), num(row.c), num(row.geometric_power)];
                r.extend(seq_cells(Some(&row.seq)));
                rows.push(r);
            }
            let h: Vec<&str> = header.iter().map(String::as_str).collect();
            out.csv("table4-noise.csv", &h, &rows)?;
            out.note("a", a);
        }
    }
    Ok(())
}
