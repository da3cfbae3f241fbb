use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sharpbergman::experiments::*;
use sharpbergman::weights::{ap_constant, Weight};
use sharpbergman::GridCircle;

#[derive(Parser, Debug)]
#[command(name = "sharpbergman", version, about = "Sharpness experiments for weighted Bergman and Cauchy operators")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// circle nodes (power of two)
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// radial levels; the disk is resolved down to 1 − r = 2^{−depth}
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true)]
    modes: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// write rows here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// key=value lines (grid_n, depth, modes, seed, format, out) replacing the defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// √p′ branch, Riesz growth and ‖𝒞u‖/‖u‖ over p′
    HardySharpness {
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        p_duals: Vec<f64>,
    },
    /// 𝒬 lower bound and φ_δ laws against [ω_δ]_Ap
    WeightedSharpness {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.4,0.2,0.1,0.05,0.025")]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 0.25)]
        rho: f64,
    },
    /// dyadic axioms, sparsity, Whitney covers and the pointwise sparse bound
    DyadicSuite {
        #[arg(long, default_value_t = 256)]
        nodes: usize,
        /// finest generation (defaults to single-node leaves)
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// maximal-function witnesses and the lifted A₂ constant
    BuckleyA2 {
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        ps: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.4,0.2,0.1,0.05,0.025")]
        deltas: Vec<f64>,
    },
    /// ‖𝒞ψ‖/‖ψ‖ for the Riesz witness against 1/sin(π/p)
    RieszConstant {
        #[arg(long, value_delimiter = ',', default_value = "1.1,1.5,2,3,4,8")]
        ps: Vec<f64>,
    },
    /// [ω]_Ap of a weight given as CSV or as a power |1 − ζ|^s
    ApConst {
        #[arg(long, value_delimiter = ',', default_value = "2")]
        ps: Vec<f64>,
        #[arg(long, conflicts_with = "power")]
        weight: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        power: Option<f64>,
    },
    /// Fourier-path 𝒞 and ℬ against direct kernel sums
    OracleDiff {
        #[arg(long, default_value_t = 10)]
        inputs: usize,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// algebraic identities (idempotence, reproduction, duality)
    Identities,
    /// boundary identity, norm laws and growth of f_{δ,p}
    ExtremalLaws,
    /// weak (1,1) of the G-function on spikes
    WeakType,
    /// growth of the sparse operators in L³(ω_δ)
    SparseGrowth {
        #[arg(long, value_delimiter = ',', default_value = "0.4,0.2,0.1,0.05,0.025")]
        deltas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,6,8")]
        ls: Vec<u32>,
    },
    /// |ℬ| of the log spike along a radius
    LogSpike,
}

struct Settings {
    cfg: RunConfig,
    out: Option<PathBuf>,
    format: Format,
}

fn read_config(path: &Path) -> anyhow::Result<Vec<(String, String)>> {
    let f = File::open(path).with_context(|| format!("opening config {}", path.display()))?;
    let mut kv = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value", path.display(), i + 1);
        };
        kv.push((k.trim().replace('-', "_"), v.trim().to_string()));
    }
    Ok(kv)
}

/// defaults < config file < explicit flags
fn settings(c: &Common) -> anyhow::Result<Settings> {
    let mut s = Settings { cfg: RunConfig::default(), out: None, format: Format::Csv };
    if let Some(p) = &c.config {
        for (k, v) in read_config(p)? {
            let bad = || format!("config: bad value for {k}: {v}");
            match k.as_str() {
                "grid_n" => s.cfg.grid_n = v.parse().with_context(bad)?,
                "depth" => s.cfg.depth = v.parse().with_context(bad)?,
                "modes" => s.cfg.modes = v.parse().with_context(bad)?,
                "seed" => s.cfg.seed = v.parse().with_context(bad)?,
                "out" => s.out = Some(v.into()),
                "format" => s.format = Format::from_str(&v, true).map_err(anyhow::Error::msg).with_context(bad)?,
                _ => bail!("config: unknown key {k}"),
            }
        }
    }
    s.cfg.grid_n = c.grid_n.unwrap_or(s.cfg.grid_n);
    s.cfg.depth = c.depth.unwrap_or(s.cfg.depth);
    s.cfg.modes = c.modes.unwrap_or(s.cfg.modes);
    s.cfg.seed = c.seed.unwrap_or(s.cfg.seed);
    s.out = c.out.clone().or(s.out);
    s.format = c.format.unwrap_or(s.format);
    Ok(s)
}

fn ap_report(ps: &[f64], weight: Option<&Path>, power: Option<f64>, cfg: &RunConfig) -> anyhow::Result<ExperimentReport> {
    let w = match (weight, power) {
        (Some(path), _) => {
            let f = File::open(path).with_context(|| format!("opening weight {}", path.display()))?;
            Weight::read_csv(BufReader::new(f))?
        }
        (None, Some(s)) => Weight::power(GridCircle::new(cfg.grid_n)?, s)?,
        (None, None) => bail!("ap-const needs --weight <csv> or --power <exponent>"),
    };
    let mut cfg = *cfg;
    cfg.grid_n = w.grid().n();
    let mut rep = ExperimentReport::new("ap-const", &cfg, &["p", "ap", "arc_start", "arc_len"]);
    for &p in ps {
        let a = ap_constant(&w, p)?;
        rep.rows.push(vec![p, a.value, a.argmax.start as f64, a.argmax.len as f64]);
    }
    Ok(rep.finish())
}

fn run(cmd: &Cmd, cfg: &RunConfig) -> anyhow::Result<ExperimentReport> {
    Ok(match cmd {
        Cmd::HardySharpness { p_duals } => run_hardy_sharpness(p_duals, cfg)?,
        Cmd::WeightedSharpness { p, deltas, rho } => run_weighted_sharpness(*p, deltas, *rho, cfg)?,
        Cmd::DyadicSuite { nodes, k_max, trials } => {
            run_dyadic_suite(*nodes, k_max.unwrap_or(nodes.trailing_zeros() as usize), *trials, cfg)?
        }
        Cmd::BuckleyA2 { ps, deltas } => run_buckley_and_a2(ps, deltas, cfg)?,
        Cmd::RieszConstant { ps } => run_riesz_constant(ps, cfg)?,
        Cmd::ApConst { ps, weight, power } => ap_report(ps, weight.as_deref(), *power, cfg)?,
        Cmd::OracleDiff { inputs, points } => run_oracle_diff(*inputs, *points, cfg)?,
        Cmd::Identities => run_identities(cfg)?,
        Cmd::ExtremalLaws => run_extremal_laws(cfg)?,
        Cmd::WeakType => run_weak_type(cfg)?,
        Cmd::SparseGrowth { deltas, ls } => run_sparse_growth(deltas, ls, cfg)?,
        Cmd::LogSpike => run_log_spike(cfg)?,
    })
}

fn emit(rep: &ExperimentReport, s: &Settings) -> anyhow::Result<()> {
    let sink: Box<dyn Write> = match &s.out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    match s.format {
        Format::Csv => rep.write_csv(sink)?,
        Format::Json => rep.write_json(sink)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = settings(&cli.common).and_then(|s| {
        let rep = run(&cli.cmd, &s.cfg)?;
        emit(&rep, &s)?;
        Ok(rep)
    });
    match outcome {
        Ok(rep) => {
            eprint!("{}", rep.summary());
            ExitCode::from(rep.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
