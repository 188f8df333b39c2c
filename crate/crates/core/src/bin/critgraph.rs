//! Command-line front end.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use critgraph::harness::{
    run_sweep, universality_pipeline, ExperimentConfig, ModelSpec, PipelineOptions, PreparedModel, WORKERS_ENV,
};
use critgraph::limits::{
    bf_ode_solve, cm_limit_eval, irg_constants, mult_coalescent, BfOdeOptions, CmLimitParams,
};
use critgraph::metric::{ghp_bounds, ghp_exact, MeasuredMetricSpace, GHP_EXACT_CAP};
use critgraph::models::Kernel;
use critgraph::observables::{observe_graph, sig12, write_csv};
use critgraph::rng::{stream, stream2};
use critgraph::trees::{sample_crit, CritOptions};
use critgraph::{Error, Result};

#[derive(Parser)]
#[command(name = "critgraph", version, about = "Critical random graphs and their metric scaling limits")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample one graph and write its edge list.
    Generate(GenerateArgs),
    /// Susceptibilities of an edge-list graph as CSV.
    Observe(ObserveArgs),
    /// Run a sweep from a JSON config; writes CSV and summary JSON.
    Sweep(SweepArgs),
    /// Limit constants and closed-form or ODE tables.
    Limits(LimitsArgs),
    /// GHP distance between two measured metric spaces (JSON files).
    Ghp(GhpArgs),
    /// Multiplicative coalescent runs.
    Coalescent(CoalescentArgs),
    /// Sample the largest limit components at parameter λ.
    Crit(CritArgs),
    /// Blob-level pipeline for Erdős–Rényi or the dynamic configuration model.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Model: `er`, `bf`, inline JSON, or a path to a JSON model spec.
    #[arg(long)]
    model: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda: f64,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ObserveArgs {
    /// Edge-list file (stdin when absent).
    input: Option<PathBuf>,
    /// Time label written in the `t` column.
    #[arg(long, default_value_t = 0.0)]
    t: f64,
}

#[derive(Args)]
struct SweepArgs {
    config: PathBuf,
    /// Worker threads.
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Output prefix, overriding the config.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Use the global `--seed` instead of the config's seed.
    #[arg(long)]
    override_seed: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum LimitKind {
    Bf,
    Cm,
    Irg,
}

#[derive(Args)]
struct LimitsArgs {
    kind: LimitKind,
    /// Comma-separated time grid.
    #[arg(long, value_delimiter = ',')]
    grid: Vec<f64>,
    /// Degree pmf `p0,p1,...` for `cm`.
    #[arg(long, value_delimiter = ',')]
    pmf: Vec<f64>,
    /// Kernel JSON file for `irg`.
    #[arg(long)]
    kernel: Option<PathBuf>,
}

#[derive(Args)]
struct GhpArgs {
    a: PathBuf,
    b: PathBuf,
    /// Exact distance (at most 36 point pairs).
    #[arg(long, conflicts_with = "bounds")]
    exact: bool,
    /// Lower and upper bounds.
    #[arg(long)]
    bounds: bool,
}

#[derive(Args)]
struct CoalescentArgs {
    /// Initial masses, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    masses: Vec<f64>,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 1)]
    replicas: usize,
}

#[derive(Args)]
struct CritArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda: f64,
    /// Components sampled.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Sample points per component.
    #[arg(long, default_value_t = 256)]
    points: usize,
    /// Write the largest component's space as JSON here.
    #[arg(long)]
    space_out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// `er` or a JSON `cm_dynamic` spec (inline or path).
    #[arg(long)]
    model: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long, default_value_t = critgraph::harness::DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = 5)]
    top_k: usize,
    /// Expand the reported components and measure diameters.
    #[arg(long)]
    expand: bool,
    /// Centre q at 1/σ2 measured on the blobs.
    #[arg(long)]
    centered_q: bool,
    /// Run with δ outside (1/6, 1/5); the violation is reported.
    #[arg(long)]
    allow_out_of_regime: bool,
}

fn parse_model(s: &str) -> Result<ModelSpec> {
    match s {
        "er" => Ok(ModelSpec::Er),
        "bf" => Ok(ModelSpec::Bf),
        _ if s.trim_start().starts_with('{') => Ok(serde_json::from_str(s)?),
        _ => Ok(serde_json::from_str(&std::fs::read_to_string(s)?)?),
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_space(p: &Path) -> Result<MeasuredMetricSpace> {
    MeasuredMetricSpace::from_json(&std::fs::read_to_string(p)?)
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    let mut out = io::stdout().lock();
    match cli.cmd {
        Cmd::Generate(a) => {
            let model = PreparedModel::new(&parse_model(&a.model)?)?;
            let g = model.sample(a.n, a.lambda, &mut stream(seed, 0))?;
            let mut w = output(&a.out)?;
            g.write_edge_list(&mut w)?;
            w.flush()?;
        }
        Cmd::Observe(a) => {
            let reader: Box<dyn BufRead> = match &a.input {
                Some(p) => Box::new(BufReader::new(File::open(p)?)),
                None => Box::new(BufReader::new(io::stdin().lock())),
            };
            let g = critgraph::graphcore::Graph::read_edge_list(reader)?;
            write_csv(&mut out, &[observe_graph(&g, a.t)])?;
        }
        Cmd::Sweep(a) => {
            let mut cfg = ExperimentConfig::from_json(&std::fs::read_to_string(&a.config)?)?;
            if a.output.is_some() {
                cfg.output = a.output;
            }
            if a.override_seed {
                cfg.seed = seed;
            }
            let r = run_sweep(&cfg, a.workers)?;
            writeln!(out, "{}", r.summary_json()?)?;
        }
        Cmd::Limits(a) => match a.kind {
            LimitKind::Bf => {
                let s = bf_ode_solve(&a.grid, &BfOdeOptions::default())?;
                eprintln!("t_c={} alpha={} beta={} rho={}", s.t_c, s.alpha, s.beta, s.rho);
                writeln!(out, "t,x,s2,s3,y,v")?;
                for p in &s.trajectory {
                    writeln!(out, "{},{},{},{},{},{}", sig12(p.t), sig12(p.x), sig12(p.s2), sig12(p.s3), sig12(p.y), sig12(p.v))?;
                }
            }
            LimitKind::Cm => {
                if a.pmf.is_empty() {
                    return Err(Error::InvalidInput("cm limits need --pmf".into()));
                }
                let p = CmLimitParams::from_pmf(&a.pmf)?;
                eprintln!("mu={} nu={} beta={} t_c={} p_c={}", p.mu, p.nu, p.beta, p.t_c(), p.p_c());
                writeln!(out, "t,s1,s2,s3,g,D,s2star")?;
                for &t in &a.grid {
                    let v = cm_limit_eval(t, &p)?;
                    writeln!(out, "{},{},{},{},{},{},{}", sig12(t), sig12(v.s1), sig12(v.s2), sig12(v.s3), sig12(v.g), sig12(v.d), sig12(v.s2_star))?;
                }
            }
            LimitKind::Irg => {
                let path = a.kernel.ok_or_else(|| Error::InvalidInput("irg limits need --kernel".into()))?;
                let k = Kernel::from_json(&std::fs::read_to_string(path)?)?;
                let c = irg_constants(&k)?;
                let v = json!({
                    "rho": c.rho, "u": c.u, "v": c.v, "alpha": c.alpha, "beta": c.beta,
                    "zeta": c.zeta, "critical": c.critical,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
            }
        },
        Cmd::Ghp(a) => {
            let (x, y) = (read_space(&a.a)?, read_space(&a.b)?);
            let exact = a.exact || (!a.bounds && x.len() * y.len() <= GHP_EXACT_CAP);
            let v = if exact {
                json!({ "exact": ghp_exact(&x, &y)? })
            } else {
                let b = ghp_bounds(&x, &y)?;
                json!({ "lower": b.lower, "upper": b.upper, "clamped": b.clamped })
            };
            writeln!(out, "{v}")?;
        }
        Cmd::Coalescent(a) => {
            writeln!(out, "replica,merges,masses")?;
            for r in 0..a.replicas {
                let s = mult_coalescent(&a.masses, a.q, &mut stream(seed, r as u64))?;
                let mut m = s.masses.clone();
                m.sort_by(|x, y| y.total_cmp(x));
                let ms: Vec<String> = m.iter().map(|v| sig12(*v)).collect();
                writeln!(out, "{r},{},{}", s.merges, ms.join(";"))?;
            }
        }
        Cmd::Crit(a) => {
            let opts = CritOptions { points: a.points, ..Default::default() };
            let comps = sample_crit(a.lambda, a.k, &opts, &mut stream(seed, 0))?;
            let v: Vec<_> = comps
                .iter()
                .map(|c| {
                    json!({
                        "gamma": c.gamma, "area": c.area, "shortcuts": c.shortcuts.pairs.len(),
                        "points": c.space.len(), "diameter": c.space.diameter(),
                        "mean_distance": c.space.mean_distance(),
                    })
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
            if let Some(p) = a.space_out {
                std::fs::write(p, comps[0].space.to_json())?;
            }
        }
        Cmd::Pipeline(a) => {
            let mut o = PipelineOptions::new(a.n, a.lambda);
            o.delta = a.delta;
            o.top_k = a.top_k;
            o.expand = a.expand;
            o.centered_q = a.centered_q;
            o.allow_out_of_regime = a.allow_out_of_regime;
            let r = universality_pipeline(&parse_model(&a.model)?, &o, &mut stream2(seed, 0, 0))?;
            writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
