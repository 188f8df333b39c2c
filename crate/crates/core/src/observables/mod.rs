//! Susceptibility functionals, size-biased orders, exploration walks and
//! assumption diagnostics.

mod walks;

pub use walks::{aldous_walk, riordan_walk, AldousWalk, RiordanComponent, RiordanWalk, WalkTrace};

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{invalid, Result};
use crate::graphcore::{
    component_diameter, component_stats, ComponentDecomposition, ComponentStats, Graph,
};
use crate::models::{HalfEdgeState, WeightedVertexSet};

/// Components up to this size get an exact diameter; larger ones report
/// the double-sweep lower bound.
pub const EXACT_DIAMETER_CAP: usize = 10_000;

/// Observables at one time point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SusceptibilityRecord {
    pub t: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub g: f64,
    pub d: f64,
    /// `Σ |C|^2 / n`.
    pub s2_star: f64,
    /// Largest component size.
    pub largest: usize,
    pub diam_max: u32,
    /// False when some diameter is only a double-sweep lower bound.
    pub diam_exact: bool,
}

pub const CSV_HEADER: &str = "t,s1,s2,s3,g,D,s2star,I,diam";

/// Formats `x` with twelve significant digits.
pub fn sig12(x: f64) -> String {
    format!("{:.11e}", x)
}

impl SusceptibilityRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            sig12(self.t),
            sig12(self.s1),
            sig12(self.s2),
            sig12(self.s3),
            sig12(self.g),
            sig12(self.d),
            sig12(self.s2_star),
            self.largest,
            self.diam_max
        )
    }
}

pub fn write_csv<W: Write>(mut w: W, rows: &[SusceptibilityRecord]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Vertex susceptibilities `s̄_k = Σ |C_i|^k / n` and `D̄ = Σ D(C_i) / n`.
/// Here `g = s2_star = s2` and `s1 = Σ|C|/n`.
pub fn vertex_susceptibilities(
    decomp: &ComponentDecomposition,
    stats: &[ComponentStats],
    n: usize,
) -> Result<SusceptibilityRecord> {
    if stats.len() != decomp.components.len() {
        return invalid("stats must align with the decomposition");
    }
    let nf = n as f64;
    let mut r = SusceptibilityRecord { diam_exact: true, ..Default::default() };
    for s in stats {
        let c = s.size as f64;
        r.s1 += c;
        r.s2 += c * c;
        r.s3 += c * c * c;
        r.d += s.distance_sum as f64;
        r.largest = r.largest.max(s.size);
        r.diam_max = r.diam_max.max(s.diameter);
    }
    r.s1 /= nf;
    r.s2 /= nf;
    r.s3 /= nf;
    r.d /= nf;
    r.g = r.s2;
    r.s2_star = r.s2;
    Ok(r)
}

/// Vertex susceptibilities of `g` computed from exact all-pairs distances.
pub fn observe_graph(g: &Graph, t: f64) -> SusceptibilityRecord {
    let (decomp, stats) = component_stats(g);
    let mut r = vertex_susceptibilities(&decomp, &stats, g.n()).unwrap();
    r.t = t;
    r
}

/// Free-half-edge susceptibilities of a configuration-model state.
///
/// `s̄_l = Σ f_i^l / n`, `ḡ = Σ f_i |C_i| / n` and `D̄ = Σ D₁(C_i) / n` where
/// `D₁` sums `d(π(u), π(v))` over ordered pairs of free half-edges in the
/// component (a vertex with `k` free half-edges counts `k` times and
/// `d(u,u) = 0`).
pub fn free_edge_susceptibilities(state: &HalfEdgeState) -> SusceptibilityRecord {
    let g = state.graph();
    let n = state.n();
    let nf = n as f64;
    let decomp = state.decomposition();
    let adj = g.adjacency();
    let free = state.free_per_vertex();
    let mut dist = vec![u32::MAX; n];
    let mut order = Vec::new();
    let mut r = SusceptibilityRecord { t: state.time(), diam_exact: true, ..Default::default() };
    for comp in &decomp.components {
        let f: u64 = comp.iter().map(|&v| free[v] as u64).sum();
        let size = comp.len() as f64;
        let ff = f as f64;
        r.s1 += ff;
        r.s2 += ff * ff;
        r.s3 += ff * ff * ff;
        r.g += ff * size;
        r.s2_star += size * size;
        r.largest = r.largest.max(comp.len());
        if comp.len() > 1 {
            if f > 0 {
                let mut d1 = 0u64;
                for &a in comp {
                    if free[a] == 0 {
                        continue;
                    }
                    adj.bfs_into(a, &mut dist, &mut order);
                    let row: u64 =
                        order.iter().map(|&b| free[b as usize] as u64 * dist[b as usize] as u64).sum();
                    d1 += free[a] as u64 * row;
                }
                r.d += d1 as f64;
            }
            let (diam, exact) = component_diameter(&adj, comp, EXACT_DIAMETER_CAP);
            r.diam_max = r.diam_max.max(diam);
            r.diam_exact &= exact;
        }
    }
    r.s1 /= nf;
    r.s2 /= nf;
    r.s3 /= nf;
    r.g /= nf;
    r.d /= nf;
    r.s2_star /= nf;
    r
}

/// Size-biased random order: item `k` comes next with probability
/// proportional to its weight among those remaining. Implemented by sorting
/// independent `Exp(x_i)` variables.
pub fn size_biased_order<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<Vec<usize>> {
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return invalid(format!("weights must be positive, got {w}"));
    }
    let keys: Vec<f64> = weights
        .iter()
        .map(|&w| {
            let e: f64 = Exp1.sample(rng);
            e / w
        })
        .collect();
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    idx.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    Ok(idx)
}

/// Per-blob summaries entering the inter-blob distance conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct BlobSummaries {
    /// `u_i`: mean distance between two independent `μ_i` points of blob `i`.
    pub u: Vec<f64>,
    /// Largest blob diameter.
    pub d_max: f64,
}

/// Ratios that must converge for the scaling limits to hold, at one `(x, q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub sigma2: f64,
    pub sigma3: f64,
    /// `σ3 / σ2^3`, should tend to one.
    pub sigma3_over_sigma2_cubed: f64,
    /// `q - 1/σ2`, should tend to `λ`.
    pub q_minus_inv_sigma2: f64,
    /// `x_max / σ2`, should tend to zero.
    pub xmax_over_sigma2: f64,
    /// `x_max / σ2^{3/2+η0}`, should tend to zero.
    pub xmax_over_sigma2_pow: f64,
    /// `σ2^{r0} / x_min`, should tend to zero.
    pub sigma2_pow_over_xmin: f64,
    /// `Σ x_i^2 u_i` (zero without blob summaries).
    pub weighted_blob_distance: f64,
    /// `d_max σ2^{3/2-η0} / (Σ x_i^2 u_i + σ2)`.
    pub blob_diameter_ratio: Option<f64>,
    /// `σ2 x_max d_max / Σ x_i^2 u_i`.
    pub blob_xmax_ratio: Option<f64>,
    /// Distance scaling factor `σ2^2 / (σ2 + Σ x_i^2 u_i)`.
    pub scaling_factor: f64,
}

pub fn assumption_diagnostics(
    w: &WeightedVertexSet,
    q: f64,
    blobs: Option<&BlobSummaries>,
    eta0: f64,
    r0: f64,
) -> Result<Diagnostics> {
    let s2 = w.sigma(2);
    let s3 = w.sigma(3);
    let xmax = w.x_max();
    let xmin = w.x_min();
    let mut weighted = 0.0;
    let mut bd = None;
    let mut bx = None;
    if let Some(b) = blobs {
        if b.u.len() != w.len() {
            return invalid("one u_i per vertex required");
        }
        weighted = w.x().iter().zip(&b.u).map(|(x, u)| x * x * u).sum();
        bd = Some(b.d_max * s2.powf(1.5 - eta0) / (weighted + s2));
        bx = Some(if weighted > 0.0 { s2 * xmax * b.d_max / weighted } else { f64::INFINITY });
    }
    Ok(Diagnostics {
        sigma2: s2,
        sigma3: s3,
        sigma3_over_sigma2_cubed: s3 / s2.powi(3),
        q_minus_inv_sigma2: q - 1.0 / s2,
        xmax_over_sigma2: xmax / s2,
        xmax_over_sigma2_pow: xmax / s2.powf(1.5 + eta0),
        sigma2_pow_over_xmin: s2.powf(r0) / xmin,
        weighted_blob_distance: weighted,
        blob_diameter_ratio: bd,
        blob_xmax_ratio: bx,
        scaling_factor: s2 * s2 / (s2 + weighted),
    })
}
