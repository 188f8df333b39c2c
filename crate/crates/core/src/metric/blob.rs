use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::error::{invalid, Result};
use crate::graphcore::{components, Graph};

use super::space::MeasuredMetricSpace;

const PROB_TOL: f64 = 1e-9;

/// Blob-level graph with a measured metric space inside every vertex.
#[derive(Clone, Debug)]
pub struct BlobConfig {
    /// Superstructure on blob indices `0..k`.
    pub graph: Graph,
    /// Blob weights.
    pub x: Vec<f64>,
    /// Blob spaces, each carrying a probability measure.
    pub blobs: Vec<MeasuredMetricSpace>,
    /// `junctions[(i, j)]` is the point of blob `i` where edges to blob `j`
    /// attach.
    pub junctions: BTreeMap<(usize, usize), usize>,
}

impl BlobConfig {
    pub fn validate(&self) -> Result<()> {
        let k = self.graph.n();
        if self.x.len() != k || self.blobs.len() != k {
            return invalid("weights and blobs must match the superstructure size");
        }
        if self.x.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return invalid("blob weights must be finite and nonnegative");
        }
        for (i, b) in self.blobs.iter().enumerate() {
            if b.is_empty() || (b.total_mass() - 1.0).abs() > PROB_TOL {
                return invalid(format!("blob {i} must carry a probability measure"));
            }
        }
        for (&(i, j), &p) in &self.junctions {
            if i >= k || j >= k || p >= self.blobs[i].len() {
                return invalid(format!("junction ({i},{j}) -> {p} is out of range"));
            }
        }
        for (i, j) in self.graph.edges() {
            if i == j {
                continue;
            }
            for key in [(i, j), (j, i)] {
                if !self.junctions.contains_key(&key) {
                    return invalid(format!("missing junction point for blob pair {key:?}"));
                }
            }
        }
        Ok(())
    }

    /// Configuration induced on the blobs in `keep` (renumbered in order).
    pub fn restrict(&self, keep: &[usize]) -> Result<BlobConfig> {
        let k = self.graph.n();
        let mut idx = vec![usize::MAX; k];
        for (new, &old) in keep.iter().enumerate() {
            if old >= k || idx[old] != usize::MAX {
                return invalid("restriction indices must be distinct and in range");
            }
            idx[old] = new;
        }
        let mut graph = Graph::new(keep.len());
        for (i, j) in self.graph.edges() {
            if idx[i] != usize::MAX && idx[j] != usize::MAX {
                graph.add_edge(idx[i], idx[j])?;
            }
        }
        let junctions = self
            .junctions
            .iter()
            .filter(|((i, j), _)| idx[*i] != usize::MAX && idx[*j] != usize::MAX)
            .map(|(&(i, j), &p)| ((idx[i], idx[j]), p))
            .collect();
        Ok(BlobConfig {
            graph,
            x: keep.iter().map(|&i| self.x[i]).collect(),
            blobs: keep.iter().map(|&i| self.blobs[i].clone()).collect(),
            junctions,
        })
    }

    /// Configuration with every blob a single point.
    pub fn point_blobs(graph: Graph, x: Vec<f64>) -> Result<BlobConfig> {
        let k = graph.n();
        let mut junctions = BTreeMap::new();
        for (i, j) in graph.edges() {
            junctions.insert((i, j), 0);
            junctions.insert((j, i), 0);
        }
        let cfg = BlobConfig { graph, x, blobs: vec![MeasuredMetricSpace::point(1.0); k], junctions };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Expanded space: disjoint union of the blobs, with blob distances as
/// edges inside each blob and a unit edge between `X_{i,j}` and `X_{j,i}`
/// for every superstructure edge, measured by `x_i μ_i`.
///
/// Points are numbered blob by blob. The superstructure must be connected.
pub fn blob_expand(cfg: &BlobConfig) -> Result<MeasuredMetricSpace> {
    cfg.validate()?;
    let k = cfg.graph.n();
    if k == 0 {
        return invalid("empty superstructure");
    }
    if components(&cfg.graph).components.len() != 1 {
        return invalid("superstructure is not connected; expand each component separately");
    }
    let offset: Vec<usize> = cfg
        .blobs
        .iter()
        .scan(0, |acc, b| {
            let o = *acc;
            *acc += b.len();
            Some(o)
        })
        .collect();
    let n = offset[k - 1] + cfg.blobs[k - 1].len();
    let mut owner = vec![0; n];
    for (i, b) in cfg.blobs.iter().enumerate() {
        owner[offset[i]..offset[i] + b.len()].fill(i);
    }
    let mut bridges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j) in cfg.graph.edges() {
        if i == j {
            continue;
        }
        let a = offset[i] + cfg.junctions[&(i, j)];
        let b = offset[j] + cfg.junctions[&(j, i)];
        bridges[a].push(b);
        bridges[b].push(a);
    }
    // Dijkstra from every point; within-blob edges are implicit
    let mut dist = vec![f64::INFINITY; n * n];
    let mut heap = BinaryHeap::new();
    for s in 0..n {
        let row = &mut dist[s * n..(s + 1) * n];
        row[s] = 0.0;
        heap.push(Reverse((Ord(0.0), s)));
        let mut done = vec![false; n];
        while let Some(Reverse((Ord(d), v))) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            let bi = owner[v];
            let blob = &cfg.blobs[bi];
            let lv = v - offset[bi];
            for lw in 0..blob.len() {
                let w = offset[bi] + lw;
                let c = d + blob.d(lv, lw);
                if c < row[w] {
                    row[w] = c;
                    heap.push(Reverse((Ord(c), w)));
                }
            }
            for &w in &bridges[v] {
                let c = d + 1.0;
                if c < row[w] {
                    row[w] = c;
                    heap.push(Reverse((Ord(c), w)));
                }
            }
        }
    }
    // symmetrise against rounding in the path sums
    for i in 0..n {
        for j in i + 1..n {
            let m = dist[i * n + j].min(dist[j * n + i]);
            dist[i * n + j] = m;
            dist[j * n + i] = m;
        }
    }
    let mass = (0..n).map(|p| cfg.x[owner[p]] * cfg.blobs[owner[p]].mass()[p - offset[owner[p]]]).collect();
    Ok(MeasuredMetricSpace::from_flat_unchecked(n, dist, mass))
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
struct Ord(f64);

impl Eq for Ord {}

impl std::cmp::Ord for Ord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// `u_i = E d_i(X, X')` for independent `X, X' ~ μ_i`.
pub fn blob_mean_distances(cfg: &BlobConfig) -> Vec<f64> {
    cfg.blobs.iter().map(|b| b.mean_distance()).collect()
}

/// Distance scale `σ2² / (σ2 + Σ x_i² u_i)` with `σ2 = Σ x_i²`.
pub fn blob_scaling_factor(x: &[f64], u: &[f64]) -> Result<f64> {
    if x.len() != u.len() || x.is_empty() {
        return invalid("weights and mean distances must be nonempty and aligned");
    }
    if u.iter().any(|v| !(*v >= 0.0)) {
        return invalid("mean distances must be nonnegative");
    }
    let s2: f64 = x.iter().map(|v| v * v).sum();
    let w: f64 = x.iter().zip(u).map(|(a, b)| a * a * b).sum();
    if !(s2 > 0.0) {
        return invalid("weights are all zero");
    }
    Ok(s2 * s2 / (s2 + w))
}

/// [`blob_scaling_factor`] with `u_i` computed from the blob spaces.
pub fn blob_config_scaling(cfg: &BlobConfig) -> Result<f64> {
    blob_scaling_factor(&cfg.x, &blob_mean_distances(cfg))
}
