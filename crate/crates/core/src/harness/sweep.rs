//! Seeded parameter sweeps over critical-window models.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{fit_exponent, mean, median, quantile, ExponentFit};
use crate::error::{invalid, Error, Result};
use crate::graphcore::{component_diameter, component_edge_counts, components, Graph};
use crate::limits::{bf_ode_solve, irg_constants, BfOdeOptions, CmLimitParams};
use crate::models::{
    assign_types_rounded, bf_run, cm_dynamic, cm_percolate_edges, cm_uniform_match, gen_er,
    gen_irg, IrgWindow, Kernel,
};
use crate::observables::{sig12, EXACT_DIAMETER_CAP};
use crate::rng::{stream2, SimRng};

/// Version of the CSV columns and JSON summary layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable read for the worker count when none is given.
pub const WORKERS_ENV: &str = "CRITGRAPH_WORKERS";

/// Tail mass below which a Poisson law is truncated when its moments are
/// tabulated.
const POISSON_TAIL: f64 = 1e-17;
/// Redraws of the last degree allowed when fixing the stub parity.
const PARITY_TRIES: usize = 10_000;

/// Degree law of a configuration model; degrees are iid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum DegreeLaw {
    /// Every vertex has degree `d`.
    Regular { d: u32 },
    /// Poisson(`mean`) conditioned on being at least `min`.
    Poisson { mean: f64, min: u32 },
    /// `p[k] = P(D = k)`.
    Pmf { p: Vec<f64> },
}

impl DegreeLaw {
    /// The law as a finite pmf (Poisson tails below 1e-17 dropped).
    pub fn pmf(&self) -> Result<Vec<f64>> {
        match self {
            DegreeLaw::Regular { d } => {
                let mut p = vec![0.0; *d as usize + 1];
                p[*d as usize] = 1.0;
                Ok(p)
            }
            DegreeLaw::Poisson { mean, min } => {
                if !(*mean > 0.0 && mean.is_finite()) {
                    return invalid("Poisson mean must be positive");
                }
                let mut p = Vec::new();
                let mut term = (-mean).exp();
                let mut k = 0u32;
                loop {
                    p.push(if k >= *min { term } else { 0.0 });
                    k += 1;
                    term *= mean / k as f64;
                    if k as f64 > *mean && term < POISSON_TAIL {
                        break;
                    }
                }
                let z: f64 = p.iter().sum();
                if !(z > 0.0) {
                    return invalid("Poisson law has no mass above the minimum");
                }
                Ok(p.into_iter().map(|v| v / z).collect())
            }
            DegreeLaw::Pmf { p } => {
                let z: f64 = p.iter().sum();
                if p.iter().any(|v| !(*v >= 0.0)) || (z - 1.0).abs() > 1e-9 {
                    return invalid("degree pmf must be nonnegative and sum to one");
                }
                Ok(p.clone())
            }
        }
    }

    /// Population parameters `(μ, ν, β)`.
    pub fn params(&self) -> Result<CmLimitParams> {
        CmLimitParams::from_pmf(&self.pmf()?)
    }

    /// `n` iid degrees with an even total: if the total is odd the last
    /// degree is redrawn until it is even.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<u32>> {
        if n == 0 {
            return invalid("need at least one vertex");
        }
        let draw: Box<dyn Fn(&mut R) -> u32> = match self {
            DegreeLaw::Regular { d } => {
                let d = *d;
                if d % 2 == 1 && n % 2 == 1 {
                    return Err(Error::OddStubTotal(d as u64 * n as u64));
                }
                Box::new(move |_| d)
            }
            DegreeLaw::Poisson { mean, min } => {
                self.pmf()?;
                let pois = Poisson::new(*mean).map_err(|e| Error::InvalidInput(e.to_string()))?;
                let min = *min;
                Box::new(move |r| loop {
                    let k = pois.sample(r) as u32;
                    if k >= min {
                        break k;
                    }
                })
            }
            DegreeLaw::Pmf { p } => {
                self.pmf()?;
                let w = WeightedIndex::new(p).map_err(|e| Error::InvalidInput(e.to_string()))?;
                Box::new(move |r| w.sample(r) as u32)
            }
        };
        let mut d: Vec<u32> = (0..n).map(|_| draw(rng)).collect();
        let mut total: u64 = d.iter().map(|&v| v as u64).sum();
        let mut tries = 0;
        while total % 2 == 1 {
            if tries == PARITY_TRIES {
                return Err(Error::OddStubTotal(total));
            }
            total -= d[n - 1] as u64;
            d[n - 1] = draw(rng);
            total += d[n - 1] as u64;
            tries += 1;
        }
        Ok(d)
    }
}

/// A model together with its critical-window parametrisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Erdős–Rényi at `t = 1 + λ n^{-1/3}`.
    Er,
    /// Edge percolation on the configuration model, `p = 1/ν + λ n^{-1/3}`.
    CmPercolation { degrees: DegreeLaw },
    /// Dynamic configuration model at `t = t_c + λ n^{-1/3}`.
    CmDynamic { degrees: DegreeLaw },
    /// Finite-type kernel `κ (1 + λ n^{-1/3})`, plus `A n^{-1/3}` and
    /// `μ + b n^{-1/3}` when `use_perturbation` is set.
    Irg {
        kernel: Kernel,
        #[serde(default)]
        use_perturbation: bool,
    },
    /// Bohman–Frieze at `t = t_c + β^{2/3} α λ n^{-1/3}`.
    Bf,
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Er => "er",
            ModelSpec::CmPercolation { .. } => "cm_percolation",
            ModelSpec::CmDynamic { .. } => "cm_dynamic",
            ModelSpec::Irg { .. } => "irg",
            ModelSpec::Bf => "bf",
        }
    }
}

/// Model constants resolved once per sweep.
#[derive(Clone, Debug)]
pub struct PreparedModel {
    pub spec: ModelSpec,
    pub cm: Option<CmLimitParams>,
    /// `(t_c, α, β, ϱ)` for Bohman–Frieze.
    pub bf: Option<[f64; 4]>,
    /// `(α, β, ζ)` for the kernel model (`ζ = 0` without perturbation).
    pub irg: Option<[f64; 3]>,
}

impl PreparedModel {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        let mut m = PreparedModel { spec: spec.clone(), cm: None, bf: None, irg: None };
        match spec {
            ModelSpec::Er => {}
            ModelSpec::CmPercolation { degrees } | ModelSpec::CmDynamic { degrees } => {
                m.cm = Some(degrees.params()?);
            }
            ModelSpec::Irg { kernel, use_perturbation } => {
                let c = irg_constants(kernel)?;
                if !c.critical {
                    return invalid(format!("kernel is not critical (spectral radius {})", c.rho));
                }
                if *use_perturbation && c.zeta.is_none() {
                    return invalid("use_perturbation needs A and b in the kernel");
                }
                let zeta = if *use_perturbation { c.zeta.unwrap_or(0.0) } else { 0.0 };
                m.irg = Some([c.alpha, c.beta, zeta]);
            }
            ModelSpec::Bf => {
                let s = bf_ode_solve(&[], &BfOdeOptions::default())?;
                m.bf = Some([s.t_c, s.alpha, s.beta, s.rho]);
            }
        }
        Ok(m)
    }

    /// Time or percolation probability used at size `n` and window `λ`.
    pub fn control(&self, n: usize, lambda: f64) -> f64 {
        let w = lambda * (n as f64).powf(-1.0 / 3.0);
        match &self.spec {
            ModelSpec::Er => 1.0 + w,
            ModelSpec::CmPercolation { .. } => 1.0 / self.cm.unwrap().nu + w,
            ModelSpec::CmDynamic { .. } => self.cm.unwrap().t_c() + w,
            ModelSpec::Irg { .. } => 1.0 + w,
            ModelSpec::Bf => {
                let [t_c, alpha, beta, _] = self.bf.unwrap();
                t_c + beta.powf(2.0 / 3.0) * alpha * w
            }
        }
    }

    /// Distance and mass factors `(a, b)` such that `scl(a, b)` maps the
    /// counting-measure graph metric to the limit scale.
    pub fn scaling(&self, n: usize) -> (f64, f64) {
        let n13 = (n as f64).powf(1.0 / 3.0);
        let n23 = n13 * n13;
        match &self.spec {
            ModelSpec::Er => (1.0 / n13, 1.0 / n23),
            ModelSpec::CmPercolation { .. } | ModelSpec::CmDynamic { .. } => {
                let CmLimitParams { mu, nu, beta } = self.cm.unwrap();
                (beta.powf(2.0 / 3.0) / (mu * nu * n13), beta.cbrt() / (mu * n23))
            }
            ModelSpec::Irg { .. } => {
                let [alpha, beta, _] = self.irg.unwrap();
                (beta.powf(2.0 / 3.0) / (alpha * n13), beta.cbrt() / n23)
            }
            ModelSpec::Bf => {
                let [_, _, beta, rho] = self.bf.unwrap();
                (beta.powf(2.0 / 3.0) / (rho * n13), beta.cbrt() / n23)
            }
        }
    }

    /// Parameter of the limiting excursion law for window `λ`.
    pub fn limit_lambda(&self, lambda: f64) -> f64 {
        match &self.spec {
            ModelSpec::Er | ModelSpec::Bf => lambda,
            ModelSpec::CmPercolation { .. } => {
                let p = self.cm.unwrap();
                p.nu * p.nu * lambda / p.beta.powf(2.0 / 3.0)
            }
            ModelSpec::CmDynamic { .. } => {
                let p = self.cm.unwrap();
                2.0 * p.nu * (p.nu - 1.0) * p.mu * lambda / p.beta.powf(2.0 / 3.0)
            }
            ModelSpec::Irg { .. } => {
                let [alpha, beta, zeta] = self.irg.unwrap();
                (zeta + alpha * lambda) / beta.powf(2.0 / 3.0)
            }
        }
    }

    /// One graph at size `n` and window `λ`.
    pub fn sample(&self, n: usize, lambda: f64, rng: &mut SimRng) -> Result<Graph> {
        let c = self.control(n, lambda);
        match &self.spec {
            ModelSpec::Er => gen_er(n, c, rng),
            ModelSpec::CmPercolation { degrees } => {
                if !(0.0..=1.0).contains(&c) {
                    return invalid(format!("percolation probability {c} outside [0,1]"));
                }
                let d = degrees.sample(n, rng)?;
                let full = cm_uniform_match(&d, rng)?;
                cm_percolate_edges(&full, c, rng)
            }
            ModelSpec::CmDynamic { degrees } => {
                let d = degrees.sample(n, rng)?;
                Ok(cm_dynamic(&d, c.max(0.0), rng)?.0.graph().clone())
            }
            ModelSpec::Irg { kernel, use_perturbation } => {
                let types = assign_types_rounded(&kernel.mu, n);
                let window = IrgWindow { lambda, use_perturbation: *use_perturbation, ..Default::default() };
                gen_irg(kernel, &types, &window, rng)
            }
            ModelSpec::Bf => Ok(bf_run(n, c.max(0.0), rng)?.process.graph().clone()),
        }
    }
}

fn default_replicas() -> usize {
    1
}

fn default_true() -> bool {
    true
}

/// A sweep over sizes, windows and replicas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub n_grid: Vec<usize>,
    #[serde(default)]
    pub lambda_grid: Vec<f64>,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    pub seed: u64,
    /// Path prefix: `{output}.csv` and `{output}.summary.json` are written
    /// when set.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Compute the diameter of the largest component (all-sources BFS).
    #[serde(default = "default_true")]
    pub diameter: bool,
}

impl ExperimentConfig {
    pub fn new(model: ModelSpec, n_grid: Vec<usize>, lambda_grid: Vec<f64>, replicas: usize, seed: u64) -> Self {
        ExperimentConfig { model, n_grid, lambda_grid, replicas, seed, output: None, diameter: true }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    /// λ values used; an empty grid means `[0]`.
    pub fn lambdas(&self) -> Vec<f64> {
        if self.lambda_grid.is_empty() {
            vec![0.0]
        } else {
            self.lambda_grid.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return invalid("replica count must be at least one");
        }
        if self.n_grid.is_empty() || self.n_grid[0] == 0 {
            return invalid("n-grid must be nonempty and positive");
        }
        if self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("n-grid must be strictly increasing");
        }
        if self.lambda_grid.iter().any(|l| !l.is_finite()) {
            return invalid("lambda values must be finite");
        }
        Ok(())
    }
}

/// Observables of one replica.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub lambda: f64,
    pub replica: usize,
    /// Time or percolation probability.
    pub control: f64,
    pub c1: usize,
    pub c2: usize,
    pub surplus1: i64,
    pub edges: usize,
    /// `Σ |C|² / n`.
    pub s2: f64,
    pub diam1: Option<u32>,
    pub diam1_exact: bool,
    /// `b |C_1|` with the model's mass factor.
    pub c1_scaled: f64,
    /// `a diam(C_1)` with the model's distance factor.
    pub diam1_scaled: Option<f64>,
}

pub const CSV_HEADER: &str =
    "n,lambda,replica,control,c1,c2,surplus1,edges,s2,diam1,diam1_exact,c1_scaled,diam1_scaled";

impl SweepRow {
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            sig12(self.lambda),
            self.replica,
            sig12(self.control),
            self.c1,
            self.c2,
            self.surplus1,
            self.edges,
            sig12(self.s2),
            opt(self.diam1.map(|d| d.to_string())),
            self.diam1_exact as u8,
            sig12(self.c1_scaled),
            opt(self.diam1_scaled.map(sig12)),
        )
    }
}

/// Observables of `g` for the sweep row (the largest component is the
/// lowest-labelled one among the largest).
pub fn observe_row(g: &Graph, diameter: bool) -> (usize, usize, i64, f64, Option<(u32, bool)>) {
    let decomp = components(g);
    let edges = component_edge_counts(g, &decomp);
    let mut order: Vec<usize> = (0..decomp.components.len()).collect();
    order.sort_by(|&a, &b| decomp.components[b].len().cmp(&decomp.components[a].len()).then(a.cmp(&b)));
    let size = |i: usize| order.get(i).map_or(0, |&c| decomp.components[c].len());
    let s2 = decomp.components.iter().map(|c| (c.len() as f64).powi(2)).sum::<f64>() / g.n().max(1) as f64;
    let (c1, c2) = (size(0), size(1));
    let (surplus, diam) = match order.first() {
        Some(&c) => {
            let surplus = edges[c] as i64 - c1 as i64 + 1;
            let d = diameter.then(|| component_diameter(&g.adjacency(), &decomp.components[c], EXACT_DIAMETER_CAP));
            (surplus, d)
        }
        None => (0, None),
    };
    (c1, c2, surplus, s2, diam)
}

/// Summary statistics of one column within one `(n, λ)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnSummary {
    pub mean: f64,
    pub median: f64,
    pub q10: f64,
    pub q90: f64,
}

impl ColumnSummary {
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        Some(ColumnSummary { mean: mean(xs), median: median(xs), q10: quantile(xs, 0.1), q90: quantile(xs, 0.9) })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub n: usize,
    pub lambda: f64,
    pub control: f64,
    pub limit_lambda: f64,
    pub columns: BTreeMap<String, ColumnSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitSummary {
    pub lambda: f64,
    pub statistic: String,
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
}

/// Rows in `(n, λ, replica)` order plus aggregates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub schema_version: u32,
    pub model: String,
    pub config: ExperimentConfig,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
    pub cells: Vec<CellSummary>,
    /// Exponent fits of medians against `n` (only with three or more sizes).
    pub fits: Vec<FitSummary>,
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(w, "{}", r.csv_row())?;
        }
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Values of a numeric column for the cell `(n, λ)`.
    pub fn column(&self, n: usize, lambda: f64, name: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.n == n && r.lambda == lambda)
            .filter_map(|r| row_value(r, name))
            .collect()
    }
}

fn row_value(r: &SweepRow, name: &str) -> Option<f64> {
    match name {
        "c1" => Some(r.c1 as f64),
        "c2" => Some(r.c2 as f64),
        "surplus1" => Some(r.surplus1 as f64),
        "s2" => Some(r.s2),
        "c1_scaled" => Some(r.c1_scaled),
        "diam1" => r.diam1.map(|d| d as f64),
        "diam1_scaled" => r.diam1_scaled,
        _ => None,
    }
}

const SUMMARY_COLUMNS: [&str; 7] = ["c1", "c2", "surplus1", "s2", "c1_scaled", "diam1", "diam1_scaled"];
const FIT_COLUMNS: [&str; 2] = ["c1", "diam1"];

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&w| w > 0)
}

/// Runs the sweep; replica `r` of cell `c` (sizes outer, λ inner) draws
/// from `stream2(seed, c, r)`, so the rows do not depend on the worker
/// count. Writes the CSV and JSON summary when `cfg.output` is set.
pub fn run_sweep(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<SweepResult> {
    cfg.validate()?;
    let model = PreparedModel::new(&cfg.model)?;
    let lambdas = cfg.lambdas();
    let tasks: Vec<(usize, usize, usize)> = (0..cfg.n_grid.len())
        .flat_map(|i| (0..lambdas.len()).flat_map(move |j| (0..cfg.replicas).map(move |r| (i, j, r))))
        .collect();
    let run = |&(i, j, r): &(usize, usize, usize)| -> Result<SweepRow> {
        let (n, lambda) = (cfg.n_grid[i], lambdas[j]);
        let cell = (i * lambdas.len() + j) as u64;
        let mut rng = stream2(cfg.seed, cell, r as u64);
        let g = model.sample(n, lambda, &mut rng)?;
        let (c1, c2, surplus1, s2, diam) = observe_row(&g, cfg.diameter);
        let (a, b) = model.scaling(n);
        Ok(SweepRow {
            n,
            lambda,
            replica: r,
            control: model.control(n, lambda),
            c1,
            c2,
            surplus1,
            edges: g.edge_count(),
            s2,
            diam1: diam.map(|d| d.0),
            diam1_exact: diam.is_none_or(|d| d.1),
            c1_scaled: b * c1 as f64,
            diam1_scaled: diam.map(|d| a * d.0 as f64),
        })
    };
    let workers = workers.or_else(workers_from_env);
    let rows: Vec<SweepRow> = match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            pool.install(|| tasks.par_iter().map(run).collect::<Result<_>>())?
        }
        None => tasks.par_iter().map(run).collect::<Result<_>>()?,
    };
    let mut result = SweepResult {
        schema_version: SCHEMA_VERSION,
        model: cfg.model.name().to_string(),
        config: cfg.clone(),
        rows,
        cells: Vec::new(),
        fits: Vec::new(),
    };
    for &n in &cfg.n_grid {
        for &lambda in &lambdas {
            let columns = SUMMARY_COLUMNS
                .iter()
                .filter_map(|c| ColumnSummary::of(&result.column(n, lambda, c)).map(|s| (c.to_string(), s)))
                .collect();
            result.cells.push(CellSummary {
                n,
                lambda,
                control: model.control(n, lambda),
                limit_lambda: model.limit_lambda(lambda),
                columns,
            });
        }
    }
    if cfg.n_grid.len() >= 3 {
        for &lambda in &lambdas {
            for stat in FIT_COLUMNS {
                let pairs: Vec<(f64, f64)> = cfg
                    .n_grid
                    .iter()
                    .filter_map(|&n| {
                        let v = result.column(n, lambda, stat);
                        (!v.is_empty()).then(|| (n as f64, median(&v)))
                    })
                    .collect();
                if let Ok(ExponentFit { slope, stderr, intercept }) = fit_exponent(&pairs) {
                    result.fits.push(FitSummary { lambda, statistic: stat.to_string(), slope, stderr, intercept });
                }
            }
        }
    }
    if let Some(prefix) = &cfg.output {
        let csv = prefix.with_extension("csv");
        result.write_csv(std::io::BufWriter::new(std::fs::File::create(csv)?))?;
        let json = prefix.with_extension("summary.json");
        std::fs::write(json, result.summary_json()?)?;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn er_cfg(n_grid: Vec<usize>, replicas: usize) -> ExperimentConfig {
        ExperimentConfig::new(ModelSpec::Er, n_grid, vec![0.0], replicas, 11)
    }

    #[test]
    fn single_row() {
        for model in [
            ModelSpec::Er,
            ModelSpec::CmPercolation { degrees: DegreeLaw::Regular { d: 3 } },
            ModelSpec::CmDynamic { degrees: DegreeLaw::Poisson { mean: 2.0, min: 1 } },
            ModelSpec::Irg {
                kernel: Kernel::new(vec![vec![1.5, 0.5], vec![0.5, 1.5]], vec![0.5, 0.5]).unwrap(),
                use_perturbation: false,
            },
            ModelSpec::Bf,
        ] {
            let cfg = ExperimentConfig::new(model, vec![200], vec![], 1, 3);
            let r = run_sweep(&cfg, Some(1)).unwrap();
            assert_eq!(r.rows.len(), 1);
            assert!(r.rows[0].c1 >= r.rows[0].c2);
        }
    }

    #[test]
    fn row_count_and_order() {
        let mut cfg = er_cfg(vec![50, 100], 3);
        cfg.lambda_grid = vec![-1.0, 0.0, 1.0];
        let r = run_sweep(&cfg, Some(2)).unwrap();
        assert_eq!(r.rows.len(), 2 * 3 * 3);
        let keys: Vec<_> = r.rows.iter().map(|x| (x.n, x.lambda.to_bits(), x.replica)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| (a.0, f64::from_bits(a.1), a.2).partial_cmp(&(b.0, f64::from_bits(b.1), b.2)).unwrap());
        assert_eq!(keys, sorted);
        assert_eq!(r.cells.len(), 6);
    }

    #[test]
    fn identical_seeds_identical_csv() {
        let cfg = er_cfg(vec![64, 128, 256], 8);
        let a = run_sweep(&cfg, Some(1)).unwrap().csv_string();
        let b = run_sweep(&cfg, Some(4)).unwrap().csv_string();
        assert_eq!(a, b);
        let mut other = cfg.clone();
        other.seed = 12;
        assert_ne!(a, run_sweep(&other, Some(2)).unwrap().csv_string());
    }

    #[test]
    fn invalid_configs() {
        assert!(run_sweep(&er_cfg(vec![100], 0), None).is_err());
        assert!(run_sweep(&er_cfg(vec![100, 100], 1), None).is_err());
        assert!(run_sweep(&er_cfg(vec![200, 100], 1), None).is_err());
        let odd = ExperimentConfig::new(
            ModelSpec::CmPercolation { degrees: DegreeLaw::Regular { d: 3 } },
            vec![101],
            vec![],
            1,
            0,
        );
        assert!(run_sweep(&odd, None).is_err());
        let sub = ModelSpec::Irg {
            kernel: Kernel::new(vec![vec![1.0, 0.5], vec![0.5, 1.0]], vec![0.5, 0.5]).unwrap(),
            use_perturbation: false,
        };
        assert!(PreparedModel::new(&sub).is_err());
    }

    #[test]
    fn config_json_roundtrip() {
        let s = r#"{"model":{"model":"cm_percolation","degrees":{"law":"regular","d":3}},
                    "n_grid":[100,200],"replicas":2,"seed":5}"#;
        let c = ExperimentConfig::from_json(s).unwrap();
        assert_eq!(c.lambdas(), vec![0.0]);
        assert!(c.diameter);
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn files_written() {
        let dir = std::env::temp_dir().join(format!("critgraph-sweep-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let mut cfg = er_cfg(vec![32, 64, 128], 4);
        cfg.output = Some(dir.join("er"));
        let r = run_sweep(&cfg, None).unwrap();
        let csv = std::fs::read_to_string(dir.join("er.csv")).unwrap();
        assert_eq!(csv, r.csv_string());
        assert_eq!(csv.lines().count(), 1 + 12);
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.join("er.summary.json")).unwrap()).unwrap();
        assert_eq!(json["schema_version"], SCHEMA_VERSION);
        assert_eq!(json["fits"].as_array().unwrap().len(), 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn degree_laws() {
        let mut rng = stream(5, 0);
        let d = DegreeLaw::Poisson { mean: 2.0, min: 1 }.sample(1001, &mut rng).unwrap();
        assert!(d.iter().all(|&v| v >= 1));
        assert_eq!(d.iter().map(|&v| v as u64).sum::<u64>() % 2, 0);
        let p = DegreeLaw::Regular { d: 3 }.params().unwrap();
        assert_eq!((p.mu, p.nu, p.beta), (3.0, 2.0, 6.0));
        let pois = DegreeLaw::Poisson { mean: 2.0, min: 0 }.params().unwrap();
        assert!((pois.mu - 2.0).abs() < 1e-12 && (pois.nu - 2.0).abs() < 1e-12 && (pois.beta - 8.0).abs() < 1e-10);
        let pm = DegreeLaw::Pmf { p: vec![0.0, 0.5, 0.0, 0.5] }.sample(8, &mut rng).unwrap();
        assert!(pm.iter().all(|&v| v == 1 || v == 3));
        assert!(DegreeLaw::Pmf { p: vec![0.5] }.pmf().is_err());
    }

    #[test]
    fn model_windows_and_scalings() {
        let cm = PreparedModel::new(&ModelSpec::CmPercolation { degrees: DegreeLaw::Regular { d: 3 } }).unwrap();
        assert_eq!(cm.control(1000, 0.0), 0.5);
        assert!((cm.control(1000, 1.0) - 0.6).abs() < 1e-12);
        let (a, b) = cm.scaling(1000);
        assert!((a - 6f64.powf(2.0 / 3.0) / 60.0).abs() < 1e-12);
        assert!((b - 6f64.cbrt() / 300.0).abs() < 1e-12);
        let er = PreparedModel::new(&ModelSpec::Er).unwrap();
        assert_eq!(er.scaling(8), (0.5, 0.25));
        assert_eq!(er.limit_lambda(1.5), 1.5);
        let bf = PreparedModel::new(&ModelSpec::Bf).unwrap();
        assert!((bf.control(1, 0.0) - 1.17631).abs() < 1e-4);
    }
}
