//! `hdiff`: densities, noise powers, error bounds and simulations for
//! H-diffusion channels, plus the data behind the reference figures.

mod figures;
mod output;
mod tables;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hdiff::diffusion::{shd_standard, DiffusionSpec, Preset};
use hdiff::link::{self, LinkConfig};
use hdiff::montecarlo::{self, CtrwConfig};
use hdiff::noise::NoiseModel;
use hdiff::{EvalConfig, EvalError, ParamError};
use output::{num, Output};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hdiff", version, about = "H-diffusion channel calculator")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed for Monte Carlo commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative tolerance of H-function evaluation.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Debug)]
struct Model {
    /// Catalogue model, e.g. `BM`, `GBM:0.7`, `ST-FD:1.5,0.7`. Without it
    /// the (alpha1, alpha2)-SHD with coefficient K is used.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value_t = 2.0)]
    alpha1: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha2: f64,
    /// Diffusion coefficient.
    #[arg(long = "K", default_value_t = 1e-10)]
    k: f64,
    /// Transmitter-receiver distance.
    #[arg(long, default_value_t = 1e-5)]
    a: f64,
}

impl Model {
    fn spec(&self) -> Result<DiffusionSpec> {
        Ok(match &self.preset {
            Some(p) => p.parse::<Preset>()?.spec()?,
            None => shd_standard(self.alpha1, self.alpha2, self.k)?,
        })
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    /// Position at time `--t`.
    Position,
    /// First-passage time to `--a`.
    Noise,
}

#[derive(Args, Clone, Debug)]
struct Grid {
    #[arg(long = "of", value_enum, default_value_t = Target::Noise)]
    target: Target,
    /// Time of the position law.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, allow_negative_numbers = true)]
    from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    to: Option<f64>,
    #[arg(long, default_value_t = 101)]
    points: usize,
    /// Log-spaced grid (default for the noise).
    #[arg(long)]
    log: Option<bool>,
}

#[derive(Args, Clone, Debug)]
struct Sweep {
    #[arg(long = "M", default_value_t = 2)]
    m: usize,
    #[arg(long = "N", default_value_t = 1)]
    n: usize,
    /// Lowest SNR in dB.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    snr_min: f64,
    /// Highest SNR in dB.
    #[arg(long, default_value_t = 120.0, allow_negative_numbers = true)]
    snr_max: f64,
    #[arg(long, default_value_t = 61)]
    points: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FptMethod {
    Ctrw,
    Exact,
}

#[derive(Subcommand)]
enum Cmd {
    /// Density on a grid.
    Pdf {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        grid: Grid,
    },
    /// Distribution function on a grid.
    Cdf {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        grid: Grid,
    },
    /// Survival function on a grid.
    Survival {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        grid: Grid,
    },
    /// Noise power in dB: one row for `--preset`, otherwise a grid over
    /// (alpha1, alpha2) of the standard H-diffusion with coefficient K.
    NoisePower {
        #[command(flatten)]
        model: Model,
        /// Grid points per axis.
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Symbol-error bound against SNR.
    Sep {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        sweep: Sweep,
    },
    /// High-SNR slope and power offset.
    Highsnr {
        #[command(flatten)]
        model: Model,
        #[arg(long = "M", default_value_t = 2)]
        m: usize,
        #[arg(long = "N", default_value_t = 1)]
        n: usize,
    },
    /// First-passage samples.
    SimulateFpt {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 10_000)]
        walks: usize,
        #[arg(long, value_enum, default_value_t = FptMethod::Ctrw)]
        method: FptMethod,
        /// Boundary distance in jump lengths, `a/h`.
        #[arg(long, default_value_t = 100.0)]
        resolution: f64,
        #[arg(long, default_value_t = 1_000_000_000_000_000)]
        max_steps: u64,
    },
    /// Empirical symbol-error rate against SNR.
    SimulateSep {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        sweep: Sweep,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Data and plot description of a reference figure.
    Figure {
        #[arg(value_enum)]
        id: figures::FigureId,
    },
    /// A catalogue table as CSV.
    Table {
        #[arg(value_enum)]
        id: tables::TableId,
    },
}

/// A user error found by the front end itself.
#[derive(Debug)]
struct Validation(String);

impl std::fmt::Display for Validation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Validation {}

fn validation(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Validation(msg.into()))
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(ev) = cause.downcast_ref::<EvalError>() {
            return match ev {
                EvalError::Domain(_) | EvalError::Invalid(_) => 2,
                _ => 3,
            };
        }
        if cause.downcast_ref::<ParamError>().is_some() || cause.downcast_ref::<Validation>().is_some() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Pdf { .. } => "pdf",
        Cmd::Cdf { .. } => "cdf",
        Cmd::Survival { .. } => "survival",
        Cmd::NoisePower { .. } => "noise-power",
        Cmd::Sep { .. } => "sep",
        Cmd::Highsnr { .. } => "highsnr",
        Cmd::SimulateFpt { .. } => "simulate-fpt",
        Cmd::SimulateSep { .. } => "simulate-sep",
        Cmd::Figure { .. } => "figure",
        Cmd::Table { .. } => "table",
    }
}

fn seed_for(cli: &Cli) -> Result<u64> {
    match cli.seed {
        Some(s) => Ok(s),
        None if std::env::var_os("CI").is_some() => Err(validation("--seed is required for Monte Carlo commands when CI is set")),
        None => Ok(0x5eed),
    }
}

fn run(cli: &Cli) -> Result<()> {
    if !(cli.tolerance > 0.0 && cli.tolerance < 1.0) {
        return Err(validation(format!("--tolerance must lie in (0, 1), got {}", cli.tolerance)));
    }
    let cfg = EvalConfig::with_tolerance(cli.tolerance);
    let is_mc = matches!(cli.cmd, Cmd::SimulateFpt { .. } | Cmd::SimulateSep { .. });
    let seed = if is_mc { Some(seed_for(cli)?) } else { None };
    let mut out = Output::new(&cli.out, command_name(&cli.cmd), seed)?;
    match &cli.cmd {
        Cmd::Pdf { model, grid } => curve(&mut out, "pdf", model, grid, &cfg)?,
        Cmd::Cdf { model, grid } => curve(&mut out, "cdf", model, grid, &cfg)?,
        Cmd::Survival { model, grid } => curve(&mut out, "survival", model, grid, &cfg)?,
        Cmd::NoisePower { model, points } => noise_power(&mut out, model, *points)?,
        Cmd::Sep { model, sweep } => sep(&mut out, model, sweep, &cfg)?,
        Cmd::Highsnr { model, m, n } => {
            let spec = model.spec()?;
            let p = spec.shd.ok_or_else(|| validation("the high-SNR expansion needs a standard H-diffusion"))?;
            let e = link::high_snr_expansion(&p, *m, *n)?;
            out.csv(
                "highsnr.csv",
                &["model", "M", "N", "s_inf", "p_inf", "g", "branch"],
                &[vec![spec.name.clone(), m.to_string(), n.to_string(), num(e.s_inf), num(e.p_inf), num(e.g), format!("{:?}", e.branch)]],
            )?;
        }
        Cmd::SimulateFpt { model, walks, method, resolution, max_steps } => {
            let spec = model.spec()?;
            let seed = seed.expect("set for simulations");
            let samples = match method {
                FptMethod::Exact => montecarlo::par_draw(*walks, seed, 0, |r| montecarlo::sample_fpt(&spec, model.a, r)),
                FptMethod::Ctrw => {
                    let p = spec.shd.ok_or_else(|| validation("the random walk needs a standard H-diffusion"))?;
                    let c = CtrwConfig::for_shd(&p, model.a, *resolution, *max_steps)?;
                    let b = montecarlo::simulate_fpt_batch(&c, *walks, seed, 0);
                    out.note("censored", b.censored);
                    out.note("censored_fraction", b.censored_fraction());
                    out.note("ctrw", c);
                    b.samples
                }
            };
            let rows: Vec<Vec<String>> = samples.iter().map(|t| vec![num(*t)]).collect();
            out.csv("fpt-samples.csv", &["t"], &rows)?;
            out.note("walks", walks);
        }
        Cmd::SimulateSep { model, sweep, trials } => {
            let spec = model.spec()?;
            let seed = seed.expect("set for simulations");
            let base = LinkConfig::new(sweep.m, sweep.n, 1.0, model.a, spec)?;
            let snr_db = snr_grid(sweep)?;
            let mut rows = Vec::new();
            for (i, db) in snr_db.iter().enumerate() {
                let link = base.with_snr(10f64.powf(db / 10.0))?;
                let e = montecarlo::simulate_sep(&link, *trials, seed, (i as u64) << 32);
                let bound = link::sep_upper_bound(&link, &cfg)?;
                rows.push(vec![num(*db), num(e.p_hat), num(e.ci_lo), num(e.ci_hi), num(bound)]);
            }
            out.csv("simulate-sep.csv", &["snr_db", "sep_hat", "ci_lo", "ci_hi", "sep_bound"], &rows)?;
        }
        Cmd::Figure { id } => figures::run(*id, &mut out, &cfg)?,
        Cmd::Table { id } => tables::run(*id, &mut out)?,
    }
    out.finish()
}

fn snr_grid(s: &Sweep) -> Result<Vec<f64>> {
    if s.points < 2 || !(s.snr_max > s.snr_min) {
        bail!(validation("the SNR sweep needs at least two points and snr-max > snr-min"));
    }
    Ok((0..s.points).map(|i| s.snr_min + (s.snr_max - s.snr_min) * i as f64 / (s.points - 1) as f64).collect())
}

fn grid(g: &Grid, lo: f64, hi: f64, log: bool) -> Result<Vec<f64>> {
    let (lo, hi) = (g.from.unwrap_or(lo), g.to.unwrap_or(hi));
    let log = g.log.unwrap_or(log);
    if g.points < 2 || !(hi > lo) || (log && lo <= 0.0) {
        return Err(validation("the grid needs at least two points, to > from, and from > 0 on a log grid"));
    }
    let n = (g.points - 1) as f64;
    Ok((0..g.points)
        .map(|i| {
            let f = i as f64 / n;
            if log {
                lo * (hi / lo).powf(f)
            } else {
                lo + (hi - lo) * f
            }
        })
        .collect())
}

fn curve(out: &mut Output, what: &str, model: &Model, g: &Grid, cfg: &EvalConfig) -> Result<()> {
    let spec = model.spec()?;
    let (xs, values): (Vec<f64>, Vec<f64>) = match g.target {
        Target::Position => {
            let v = spec.position_variate(g.t)?;
            let s = spec.shd.map_or(1.0, |p| p.position_scale()) * g.t.powf(spec.exponent());
            let xs = grid(g, -5.0 * s, 5.0 * s, false)?;
            let ys = xs
                .iter()
                .map(|&x| match what {
                    "pdf" => v.pdf(x, cfg),
                    "cdf" => v.cdf(x, cfg),
                    _ => v.survival(x, cfg),
                })
                .collect::<Result<_, _>>()?;
            (xs, ys)
        }
        Target::Noise => {
            let nm = NoiseModel::new(&spec, model.a)?;
            let s = nm.geometric_power()?;
            let xs = grid(g, 1e-2 * s, 1e4 * s, true)?;
            let ys = xs
                .iter()
                .map(|&t| match what {
                    "pdf" => nm.pdf(t, cfg),
                    "cdf" => nm.cdf(t, cfg),
                    _ => nm.survival(t, cfg),
                })
                .collect::<Result<_, _>>()?;
            (xs, ys)
        }
    };
    let x = match g.target {
        Target::Position => "x",
        Target::Noise => "t",
    };
    let rows: Vec<Vec<String>> = xs.iter().zip(&values).map(|(x, y)| vec![num(*x), num(*y)]).collect();
    out.csv(&format!("{what}.csv"), &[x, what], &rows)?;
    out.note("model", &spec.name);
    Ok(())
}

fn noise_power(out: &mut Output, model: &Model, points: usize) -> Result<()> {
    let header = ["model", "alpha1", "alpha2", "a", "kappa", "geometric_power", "noise_power", "noise_power_db"];
    let row = |spec: &DiffusionSpec, a1: f64, a2: f64| -> Result<Vec<String>> {
        let nm = NoiseModel::new(spec, model.a)?;
        let s = nm.geometric_power()?;
        Ok(vec![spec.name.clone(), num(a1), num(a2), num(model.a), num(nm.tail_constant()), num(s), num(s * s), num(20.0 * s.log10())])
    };
    let rows = if model.preset.is_some() {
        vec![row(&model.spec()?, f64::NAN, f64::NAN)?]
    } else {
        if points < 2 {
            return Err(validation("--points must be at least 2"));
        }
        let mut rows = Vec::new();
        for a1 in figures::lin_grid(0.5, 2.0, points) {
            for a2 in figures::lin_grid(0.05, 1.0, points) {
                rows.push(row(&shd_standard(a1, a2, model.k)?, a1, a2)?);
            }
        }
        rows
    };
    out.csv("noise-power.csv", &header, &rows)?;
    out.note("K", model.k);
    Ok(())
}

fn sep(out: &mut Output, model: &Model, sweep: &Sweep, cfg: &EvalConfig) -> Result<()> {
    let spec = model.spec()?;
    let snr_db = snr_grid(sweep)?;
    let snrs: Vec<f64> = snr_db.iter().map(|d| 10f64.powf(d / 10.0)).collect();
    let (bound, asym) = match spec.shd {
        Some(p) => {
            let b = link::sep_curve_shd(&p, sweep.m, sweep.n, &snrs, cfg)?;
            let a: Vec<f64> = match link::high_snr_expansion(&p, sweep.m, sweep.n) {
                Ok(e) => snrs.iter().map(|&s| e.asymptote(s)).collect(),
                Err(_) => vec![f64::NAN; snrs.len()],
            };
            (b, a)
        }
        None => {
            let base = LinkConfig::new(sweep.m, sweep.n, 1.0, model.a, spec.clone())?;
            (link::sep_curve(&base, &snrs, cfg)?, vec![f64::NAN; snrs.len()])
        }
    };
    let rows: Vec<Vec<String>> = (0..snrs.len()).map(|i| vec![num(snr_db[i]), num(bound[i]), num(asym[i])]).collect();
    out.csv("sep.csv", &["snr_db", "sep_bound", "asymptote"], &rows)?;
    out.note("model", &spec.name);
    Ok(())
}
