//! Blob-level pipeline: run a model to the barely subcritical time, treat
//! its components as blobs, connect them by G(x,q) with the model's weights
//! and expand the maximal components back into metric spaces.

use std::collections::BTreeMap;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::Serialize;

use super::sweep::{ModelSpec, PreparedModel};
use crate::error::{invalid, Result};
use crate::graphcore::{component_edge_counts, components, Adjacency, Graph};
use crate::metric::{blob_expand, blob_scaling_factor, BlobConfig, MeasuredMetricSpace};
use crate::models::{cm_dynamic, gen_er, gen_gxq, WeightedVertexSet};
use crate::rng::SimRng;

/// Midpoint of the admissible interval `(1/6, 1/5)`.
pub const DEFAULT_DELTA: f64 = 0.18;
/// Points kept per blob when expanding (junctions are always kept).
pub const BLOB_POINT_CAP: usize = 64;
/// Expansion is skipped for components with more points than this.
pub const EXPAND_POINT_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOptions {
    pub n: usize,
    pub lambda: f64,
    pub delta: f64,
    /// Components reported, largest mass first.
    pub top_k: usize,
    /// Expand the reported components into metric spaces.
    pub expand: bool,
    pub blob_points: usize,
    /// Run even when `δ` lies outside `(1/6, 1/5)`; the violation is still
    /// reported.
    pub allow_out_of_regime: bool,
    /// Erdős–Rényi only: single-vertex blobs (`t_n = 0`).
    pub point_blobs: bool,
    /// Replace the leading term of `q` by `1/σ2` with `σ2 = Σ x_i²`
    /// measured on the blobs, keeping the `λ` term.
    pub centered_q: bool,
}

impl PipelineOptions {
    pub fn new(n: usize, lambda: f64) -> Self {
        PipelineOptions {
            n,
            lambda,
            delta: DEFAULT_DELTA,
            top_k: 5,
            expand: false,
            blob_points: BLOB_POINT_CAP,
            allow_out_of_regime: false,
            point_blobs: false,
            centered_q: false,
        }
    }
}

/// One component of the blob-level graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineComponent {
    /// `Σ x_i` over its blobs: the rescaled mass.
    pub mass: f64,
    pub vertices: usize,
    /// Vertex count times the model's mass factor.
    pub vertices_scaled: f64,
    pub blobs: usize,
    /// Blob-level surplus plus the surpluses inside the blobs.
    pub surplus: i64,
    /// Free half-edges `W(C)` (configuration model).
    pub free_weight: Option<u64>,
    /// `W(C) / |C|`.
    pub free_per_vertex: Option<f64>,
    /// Diameter of the expanded space times the model's distance factor.
    pub diameter_scaled: Option<f64>,
    pub expanded_points: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub model: String,
    pub n: usize,
    pub lambda: f64,
    pub delta: f64,
    pub regime_ok: bool,
    pub warnings: Vec<String>,
    /// Time at which blobs are taken.
    pub t_n: f64,
    /// `q` used for the blob-level graph.
    pub q: f64,
    /// The model's prescribed `q`.
    pub q_model: f64,
    /// `1/σ2` plus the model's `λ` term: the finite-`n` critical centring.
    pub q_centered: f64,
    /// Blobs with positive weight.
    pub blob_count: usize,
    pub largest_blob: usize,
    /// `Σ x_i` over all blobs.
    pub total_mass: f64,
    /// Sum of component masses over every blob-level component.
    pub component_mass_sum: f64,
    /// `(a, b)`: the model's distance and mass factors at size `n`.
    pub distance_factor: f64,
    pub mass_factor: f64,
    /// `σ2² / (σ2 + Σ x_i² u_i)` with exact blob mean distances `u_i`.
    pub blob_scaling: f64,
    pub limit_lambda: f64,
    pub components: Vec<PipelineComponent>,
}

/// Blobs of the barely subcritical graph with their measures.
struct Blobs {
    graph: Graph,
    members: Vec<Vec<usize>>,
    /// Unnormalised vertex weights defining `μ_i`.
    weight: Vec<u32>,
    x: Vec<f64>,
    edges: Vec<usize>,
}

fn extract(graph: Graph, weight: Vec<u32>, x_of: impl Fn(&[usize], u64) -> f64) -> Blobs {
    let decomp = components(&graph);
    let edges = component_edge_counts(&graph, &decomp);
    let mut members = Vec::new();
    let mut x = Vec::new();
    let mut kept_edges = Vec::new();
    for (c, e) in decomp.components.into_iter().zip(edges) {
        let w: u64 = c.iter().map(|&v| weight[v] as u64).sum();
        if w > 0 {
            x.push(x_of(&c, w));
            members.push(c);
            kept_edges.push(e);
        }
    }
    Blobs { graph, members, weight, x, edges: kept_edges }
}

/// Distances from `s` inside its component, written into `dist`.
fn bfs(adj: &Adjacency, s: usize, dist: &mut [u32], order: &mut Vec<u32>) {
    adj.bfs_into(s, dist, order);
}

/// `E d(X, X')` for `X, X'` iid from the weights on `members`.
fn mean_distance(adj: &Adjacency, members: &[usize], weight: &[u32], dist: &mut [u32], order: &mut Vec<u32>) -> f64 {
    let total: f64 = members.iter().map(|&v| weight[v] as f64).sum();
    if members.len() < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    for &s in members {
        if weight[s] == 0 {
            continue;
        }
        bfs(adj, s, dist, order);
        let row: f64 = order.iter().map(|&v| weight[v as usize] as f64 * dist[v as usize] as f64).sum();
        acc += weight[s] as f64 * row;
    }
    acc / (total * total)
}

/// Draws a vertex of `members` proportional to `weight`.
fn draw_weighted<R: Rng + ?Sized>(members: &[usize], weight: &[u32], rng: &mut R) -> usize {
    let total: u64 = members.iter().map(|&v| weight[v] as u64).sum();
    let mut r = rng.random_range(0..total);
    for (i, &v) in members.iter().enumerate() {
        let w = weight[v] as u64;
        if r < w {
            return i;
        }
        r -= w;
    }
    unreachable!("weights sum to the total")
}

/// Blob space on the kept positions `keep` (indices into `members`);
/// every vertex's weight moves to its nearest kept point.
fn blob_space(
    adj: &Adjacency,
    members: &[usize],
    weight: &[u32],
    keep: &[usize],
    dist: &mut [u32],
    order: &mut Vec<u32>,
) -> Result<MeasuredMetricSpace> {
    let k = keep.len();
    let mut d = vec![vec![0.0; k]; k];
    let mut best: BTreeMap<usize, (u32, usize)> = BTreeMap::new();
    for (a, &pa) in keep.iter().enumerate() {
        bfs(adj, members[pa], dist, order);
        for (b, &pb) in keep.iter().enumerate() {
            d[a][b] = dist[members[pb]] as f64;
        }
        for &v in order.iter() {
            let dv = dist[v as usize];
            let e = best.entry(v as usize).or_insert((dv, a));
            if dv < e.0 {
                *e = (dv, a);
            }
        }
    }
    let mut mass = vec![0.0; k];
    let total: f64 = members.iter().map(|&v| weight[v] as f64).sum();
    for &v in members {
        mass[best[&v].1] += weight[v] as f64 / total;
    }
    MeasuredMetricSpace::new(d, mass)
}

/// Runs the blob pipeline for Erdős–Rényi or the dynamic configuration
/// model.
///
/// Erdős–Rényi: blobs at `t_n = 1 - n^{-δ}`, `x_i = |C_i| n^{-2/3}`,
/// `q = n^{1/3}(1 - t_n) + λ`, uniform blob measures. Configuration model:
/// blobs at `t_n = t_c - ½ ν/(ν-1) n^{-δ}`, `x_i = β^{1/3} f_i / (μ(ν-1)
/// n^{2/3})` with `f_i` the free half-edges of blob `i`, `q = n^{1/3-δ}
/// μν²/β^{2/3} + 2μ(ν-1)νλ/β^{2/3}`, blob measures proportional to free
/// half-edges. Junction points are drawn from the blob measures.
pub fn universality_pipeline(model: &ModelSpec, opts: &PipelineOptions, rng: &mut SimRng) -> Result<PipelineReport> {
    let n = opts.n;
    if n < 2 {
        return invalid("need at least two vertices");
    }
    let prepared = PreparedModel::new(model)?;
    let mut warnings = Vec::new();
    let regime_ok = opts.delta > 1.0 / 6.0 && opts.delta < 0.2;
    if !regime_ok {
        let msg = format!("delta = {} lies outside (1/6, 1/5)", opts.delta);
        if !(opts.allow_out_of_regime || opts.point_blobs) {
            return invalid(msg);
        }
        warnings.push(msg);
    }
    let nf = n as f64;
    let n13 = nf.cbrt();
    let n23 = n13 * n13;
    let (t_n, q_model, lambda_term, blobs, is_cm) = match model {
        ModelSpec::Er => {
            let t_n = if opts.point_blobs { 0.0 } else { 1.0 - nf.powf(-opts.delta) };
            let g = gen_er(n, t_n, rng)?;
            let q = n13 * (1.0 - t_n) + opts.lambda;
            (t_n, q, opts.lambda, extract(g, vec![1; n], |c, _| c.len() as f64 / n23), false)
        }
        ModelSpec::CmDynamic { degrees } => {
            if opts.point_blobs {
                return invalid("point blobs are only defined for Erdős–Rényi");
            }
            let p = prepared.cm.unwrap();
            let t_n = p.t_n(n, opts.delta);
            if !(t_n > 0.0) {
                return invalid(format!("t_n = {t_n} is not positive; n is too small for delta"));
            }
            let d = degrees.sample(n, rng)?;
            let (state, _) = cm_dynamic(&d, t_n, rng)?;
            let b23 = p.beta.powf(2.0 / 3.0);
            let lambda_term = 2.0 * p.mu * (p.nu - 1.0) * p.nu * opts.lambda / b23;
            let q = nf.powf(1.0 / 3.0 - opts.delta) * p.mu * p.nu * p.nu / b23 + lambda_term;
            let c = p.beta.cbrt() / (p.mu * (p.nu - 1.0) * n23);
            let weight = state.free_per_vertex().to_vec();
            (t_n, q, lambda_term, extract(state.graph().clone(), weight, |_, f| c * f as f64), true)
        }
        other => return invalid(format!("the blob pipeline supports er and cm_dynamic, not {}", other.name())),
    };
    let k = blobs.x.len();
    if k == 0 {
        return invalid("no blob carries positive weight");
    }
    let sigma2: f64 = blobs.x.iter().map(|v| v * v).sum();
    let q_centered = 1.0 / sigma2 + lambda_term;
    let q = if opts.centered_q { q_centered } else { q_model };
    if !(q > 0.0) {
        return invalid(format!("q = {q} is not positive"));
    }
    let lead = (q_model - lambda_term) * sigma2;
    if (lead - 1.0).abs() > 0.1 {
        warnings.push(format!("prescribed q has (q - lambda term) sigma2 = {lead:.3}, not close to 1 at this n"));
    }
    let adj = blobs.graph.adjacency();
    let mut dist = vec![u32::MAX; n];
    let mut order = Vec::new();
    let u: Vec<f64> =
        blobs.members.iter().map(|m| mean_distance(&adj, m, &blobs.weight, &mut dist, &mut order)).collect();
    let blob_scaling = blob_scaling_factor(&blobs.x, &u)?;
    let total_mass: f64 = blobs.x.iter().sum();

    let sup = gen_gxq(&WeightedVertexSet::new(blobs.x.clone())?, q, rng)?;
    let mut junctions = BTreeMap::new();
    for (i, j) in sup.edges() {
        for (a, b) in [(i, j), (j, i)] {
            if !junctions.contains_key(&(a, b)) {
                let p = draw_weighted(&blobs.members[a], &blobs.weight, rng);
                junctions.insert((a, b), p);
            }
        }
    }
    let decomp = components(&sup);
    let sup_edges = component_edge_counts(&sup, &decomp);
    let mass_of = |c: &[usize]| c.iter().map(|&i| blobs.x[i]).sum::<f64>();
    let component_mass_sum: f64 = decomp.components.iter().map(|c| mass_of(c)).sum();
    let mut ranked: Vec<usize> = (0..decomp.components.len()).collect();
    ranked.sort_by(|&a, &b| {
        mass_of(&decomp.components[b]).total_cmp(&mass_of(&decomp.components[a])).then(a.cmp(&b))
    });
    let (a_fac, b_fac) = prepared.scaling(n);
    let mut reported = Vec::new();
    for &ci in ranked.iter().take(opts.top_k) {
        let c = &decomp.components[ci];
        let vertices: usize = c.iter().map(|&i| blobs.members[i].len()).sum();
        let inner: i64 = c.iter().map(|&i| blobs.edges[i] as i64 - blobs.members[i].len() as i64 + 1).sum();
        let surplus = sup_edges[ci] as i64 - c.len() as i64 + 1 + inner;
        let free: Option<u64> = is_cm
            .then(|| c.iter().flat_map(|&i| blobs.members[i].iter()).map(|&v| blobs.weight[v] as u64).sum());
        let mut comp = PipelineComponent {
            mass: mass_of(c),
            vertices,
            vertices_scaled: b_fac * vertices as f64,
            blobs: c.len(),
            surplus,
            free_weight: free,
            free_per_vertex: free.map(|f| f as f64 / vertices as f64),
            diameter_scaled: None,
            expanded_points: None,
        };
        if opts.expand {
            match expand_component(&blobs, &adj, &sup, &junctions, c, opts.blob_points, rng, &mut dist, &mut order)? {
                Some(space) => {
                    comp.diameter_scaled = Some(a_fac * space.diameter());
                    comp.expanded_points = Some(space.len());
                }
                None => warnings.push(format!(
                    "component with {} blobs exceeds {EXPAND_POINT_CAP} points; not expanded",
                    c.len()
                )),
            }
        }
        reported.push(comp);
    }
    Ok(PipelineReport {
        model: model.name().to_string(),
        n,
        lambda: opts.lambda,
        delta: opts.delta,
        regime_ok,
        warnings,
        t_n,
        q,
        q_model,
        q_centered,
        blob_count: k,
        largest_blob: blobs.members.iter().map(Vec::len).max().unwrap_or(0),
        total_mass,
        component_mass_sum,
        distance_factor: a_fac,
        mass_factor: b_fac,
        blob_scaling,
        limit_lambda: prepared.limit_lambda(opts.lambda),
        components: reported,
    })
}

/// Blob expansion of one component with at most `cap` points per blob
/// besides its junctions. `None` when the point total exceeds
/// [`EXPAND_POINT_CAP`].
#[allow(clippy::too_many_arguments)]
fn expand_component(
    blobs: &Blobs,
    adj: &Adjacency,
    sup: &Graph,
    junctions: &BTreeMap<(usize, usize), usize>,
    comp: &[usize],
    cap: usize,
    rng: &mut SimRng,
    dist: &mut [u32],
    order: &mut Vec<u32>,
) -> Result<Option<MeasuredMetricSpace>> {
    let mut local = vec![usize::MAX; sup.n()];
    for (li, &b) in comp.iter().enumerate() {
        local[b] = li;
    }
    let mut keep: Vec<Vec<usize>> = vec![Vec::new(); comp.len()];
    for (&(a, _), &p) in junctions.range((comp[0], 0)..) {
        if local[a] != usize::MAX && !keep[local[a]].contains(&p) {
            keep[local[a]].push(p);
        }
    }
    for (li, &b) in comp.iter().enumerate() {
        let size = blobs.members[b].len();
        let kp = &mut keep[li];
        if size <= cap.max(kp.len()) {
            *kp = (0..size).collect();
        } else {
            let extra = cap.saturating_sub(kp.len());
            let mut pool: Vec<usize> = (0..size).filter(|p| !kp.contains(p)).collect();
            let chosen = sample_indices(rng, pool.len(), extra.min(pool.len())).into_vec();
            let mut add: Vec<usize> = chosen.into_iter().map(|i| pool[i]).collect();
            add.sort_unstable();
            kp.append(&mut add);
            pool.clear();
        }
        kp.sort_unstable();
    }
    if keep.iter().map(Vec::len).sum::<usize>() > EXPAND_POINT_CAP {
        return Ok(None);
    }
    let mut spaces = Vec::with_capacity(comp.len());
    for (li, &b) in comp.iter().enumerate() {
        spaces.push(blob_space(adj, &blobs.members[b], &blobs.weight, &keep[li], dist, order)?);
    }
    let mut edges = Vec::new();
    let mut jmap = BTreeMap::new();
    for (i, j) in sup.edges() {
        if local[i] == usize::MAX {
            continue;
        }
        let (li, lj) = (local[i], local[j]);
        edges.push((li, lj));
        for (a, b, la, lb) in [(i, j, li, lj), (j, i, lj, li)] {
            let p = junctions[&(a, b)];
            let pos = keep[la].binary_search(&p).expect("junctions are kept");
            jmap.insert((la, lb), pos);
        }
    }
    let cfg = BlobConfig {
        graph: Graph::from_edges(comp.len(), &edges)?,
        x: comp.iter().map(|&b| blobs.x[b]).collect(),
        blobs: spaces,
        junctions: jmap,
    };
    Ok(Some(blob_expand(&cfg)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::stats::{ks_statistic, median};
    use crate::harness::sweep::DegreeLaw;
    use crate::limits::cm_limit_eval;
    use crate::rng::stream;

    fn c1_of_er(n: usize, rng: &mut SimRng) -> f64 {
        let g = gen_er(n, 1.0, rng).unwrap();
        components(&g).largest() as f64
    }

    #[test]
    fn regime_violations_are_reported() {
        let mut rng = stream(1, 0);
        let mut o = PipelineOptions::new(1000, 0.0);
        o.delta = 0.25;
        assert!(universality_pipeline(&ModelSpec::Er, &o, &mut rng).is_err());
        o.allow_out_of_regime = true;
        let r = universality_pipeline(&ModelSpec::Er, &o, &mut rng).unwrap();
        assert!(!r.regime_ok && !r.warnings.is_empty());
        assert!(universality_pipeline(&ModelSpec::Bf, &PipelineOptions::new(1000, 0.0), &mut rng).is_err());
    }

    #[test]
    fn mass_is_conserved() {
        let cm = ModelSpec::CmDynamic { degrees: DegreeLaw::Poisson { mean: 2.0, min: 1 } };
        for (i, model) in [ModelSpec::Er, cm].iter().enumerate() {
            let mut rng = stream(2, i as u64);
            let r = universality_pipeline(model, &PipelineOptions::new(20_000, 0.5), &mut rng).unwrap();
            assert!((r.total_mass - r.component_mass_sum).abs() <= 1e-9 * r.total_mass);
            assert!(r.components.windows(2).all(|w| w[0].mass >= w[1].mass));
        }
    }

    #[test]
    fn er_pipeline_matches_plain_er() {
        // Blobs joined by G(x,q) give exactly the components of ER at time t.
        let n = 4000;
        let reps = 500;
        let mut plain = Vec::new();
        let mut blob = Vec::new();
        let mut point = Vec::new();
        let mut opts = PipelineOptions::new(n, 0.0);
        opts.top_k = 1;
        for r in 0..reps {
            plain.push(c1_of_er(n, &mut stream(3, r)));
            let rep = universality_pipeline(&ModelSpec::Er, &opts, &mut stream(4, r)).unwrap();
            blob.push(rep.components[0].vertices as f64);
            let mut po = opts.clone();
            po.point_blobs = true;
            let rep = universality_pipeline(&ModelSpec::Er, &po, &mut stream(5, r)).unwrap();
            assert_eq!(rep.blob_count, n);
            point.push(rep.components[0].vertices as f64);
        }
        assert!(ks_statistic(&plain, &blob).unwrap() < 0.12);
        assert!(ks_statistic(&plain, &point).unwrap() < 0.12);
    }

    #[test]
    fn blob_scaling_matches_closed_forms() {
        // ER: σ2²/(σ2 + Σx²u) = n^{-1/3} s2²/(s2 + D) with s2 = 1/(1-t),
        // D = t/(1-t)², which is exactly n^{-1/3}.
        let r = universality_pipeline(&ModelSpec::Er, &PipelineOptions::new(100_000, 0.0), &mut stream(6, 0)).unwrap();
        assert!((r.blob_scaling / r.distance_factor - 1.0).abs() < 0.05);
        // CM: c² n s2²/(s2 + D) from the free-edge closed forms at t_n.
        let law = DegreeLaw::Poisson { mean: 2.0, min: 1 };
        let p = law.params().unwrap();
        let n = 100_000;
        let v = cm_limit_eval(p.t_n(n, DEFAULT_DELTA), &p).unwrap();
        let c = p.beta.cbrt() / (p.mu * (p.nu - 1.0) * (n as f64).powf(2.0 / 3.0));
        let expect = c * c * n as f64 * v.s2 * v.s2 / (v.s2 + v.d);
        let r = universality_pipeline(&ModelSpec::CmDynamic { degrees: law }, &PipelineOptions::new(n, 0.0), &mut stream(6, 1))
            .unwrap();
        assert!((r.blob_scaling / expect - 1.0).abs() < 0.05, "{} vs {expect}", r.blob_scaling);
        // The prescribed q is far from the finite-n centring at this size.
        assert!(!r.warnings.is_empty() && r.q_model > 1.5 * r.q_centered);
    }

    #[test]
    fn cm_free_weight_per_vertex() {
        // Size-biased blob choice gives W(C)/|C| ≈ s2(t_n)/g(t_n), which
        // decreases to ν - 1 = 1 (3-regular) as n grows.
        let law = DegreeLaw::Regular { d: 3 };
        let p = law.params().unwrap();
        let pred = |n: usize| {
            let v = cm_limit_eval(p.t_n(n, DEFAULT_DELTA), &p).unwrap();
            v.s2 / v.g
        };
        assert!(pred(100_000) > pred(10_000_000) && pred(10_000_000) > pred(1_000_000_000_000));
        assert!((pred(1_000_000_000_000) - 1.0).abs() < 0.05);
        let model = ModelSpec::CmDynamic { degrees: law };
        let mut ratios = Vec::new();
        for r in 0..6 {
            let mut o = PipelineOptions::new(100_000, 0.0);
            o.top_k = 1;
            o.centered_q = true;
            let rep = universality_pipeline(&model, &o, &mut stream(7, r)).unwrap();
            ratios.push(rep.components[0].free_per_vertex.unwrap());
        }
        let m = median(&ratios);
        assert!((m / pred(100_000) - 1.0).abs() < 0.05, "median W/|C| = {m}");
    }

    #[test]
    fn expansion_bounds_graph_diameter() {
        let mut rng = stream(8, 0);
        let mut o = PipelineOptions::new(20_000, 1.0);
        o.expand = true;
        o.top_k = 2;
        let r = universality_pipeline(&ModelSpec::Er, &o, &mut rng).unwrap();
        for c in &r.components {
            if c.blobs > 1 {
                let d = c.diameter_scaled.unwrap();
                assert!(d > 0.0 && d / r.distance_factor <= c.vertices as f64);
                assert!(c.expanded_points.unwrap() <= c.vertices);
            }
        }
        // Small blobs are kept whole, so the expansion of one point-blob
        // component is the component's graph metric.
        let mut po = PipelineOptions::new(2000, 0.0);
        po.point_blobs = true;
        po.expand = true;
        po.top_k = 1;
        let r = universality_pipeline(&ModelSpec::Er, &po, &mut stream(9, 0)).unwrap();
        let c = &r.components[0];
        assert_eq!(c.expanded_points, Some(c.vertices));
    }

    #[test]
    fn blob_counts_grow_sublinearly() {
        // Blob counts of the largest component grow like n^{2/3 - δ}.
        let sizes = [1usize << 12, 1 << 14, 1 << 16, 1 << 18];
        let mut pairs = Vec::new();
        for (i, &n) in sizes.iter().enumerate() {
            let mut o = PipelineOptions::new(n, 0.0);
            o.top_k = 1;
            let counts: Vec<f64> = (0..40)
                .map(|r| {
                    let rep = universality_pipeline(&ModelSpec::Er, &o, &mut stream(10 + i as u64, r)).unwrap();
                    rep.components[0].blobs as f64
                })
                .collect();
            pairs.push((n as f64, median(&counts)));
        }
        let fit = crate::harness::stats::fit_exponent(&pairs).unwrap();
        assert!((fit.slope - (2.0 / 3.0 - DEFAULT_DELTA)).abs() < 0.12, "slope {}", fit.slope);
    }
}
