//! Samplers for the random-graph families: G(x,q) and Erdős–Rényi,
//! finite-type inhomogeneous graphs, the configuration model (static,
//! dynamic and percolated) and bounded-size rules.

mod bsr;
mod cm;
mod irg;

pub use bsr::{bf_run, bsr_run, BsrEvent, BsrProcess, BsrRule, BsrRun, SizeClass};
pub use cm::{
    cm_dynamic, cm_percolate_edges, cm_percolate_stubs, cm_uniform_match, read_degrees, CmEvent,
    HalfEdgeState,
};
pub use irg::{
    assign_types_iid, assign_types_rounded, gen_irg, gen_irg_dense, IrgWindow, Kernel,
};

use rand::Rng;

use crate::error::{invalid, Result};
use crate::graphcore::Graph;

/// Positive vertex weights `x_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedVertexSet {
    x: Vec<f64>,
}

impl WeightedVertexSet {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if let Some(w) = x.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return invalid(format!("weights must be positive and finite, got {w}"));
        }
        Ok(WeightedVertexSet { x })
    }

    /// `n` equal weights `n^{-2/3}`: with `q = n^{1/3} + λ` this is the
    /// critical Erdős–Rényi graph.
    pub fn erdos_renyi(n: usize) -> Self {
        WeightedVertexSet { x: vec![(n as f64).powf(-2.0 / 3.0); n] }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `σ_k = Σ x_i^k`.
    pub fn sigma(&self, k: i32) -> f64 {
        self.x.iter().map(|w| w.powi(k)).sum()
    }

    pub fn x_max(&self) -> f64 {
        self.x.iter().cloned().fold(0.0, f64::max)
    }

    pub fn x_min(&self) -> f64 {
        self.x.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Number of failures before the first success of a Bernoulli(`p`) sequence.
pub(crate) fn geometric_skip<R: Rng + ?Sized>(p: f64, rng: &mut R) -> u64 {
    if p >= 1.0 {
        return 0;
    }
    if p <= 0.0 {
        return u64::MAX;
    }
    let u: f64 = 1.0 - rng.random::<f64>();
    let k = (u.ln() / (-p).ln_1p()).floor();
    if k >= u64::MAX as f64 {
        u64::MAX
    } else {
        k as u64
    }
}

/// Calls `f(j)` for each index in `0..len` retained independently with
/// probability `p`, by geometric jumps.
pub(crate) fn bernoulli_run<R: Rng + ?Sized>(
    len: usize,
    p: f64,
    rng: &mut R,
    mut f: impl FnMut(usize),
) {
    let mut j: u64 = 0;
    loop {
        let skip = geometric_skip(p, rng);
        j = j.saturating_add(skip);
        if j >= len as u64 {
            return;
        }
        f(j as usize);
        j += 1;
    }
}

/// G(x,q): independent edges with probability `1 - exp(-q x_i x_j)`.
///
/// Vertices are visited in decreasing weight order; for each row the
/// candidate partners are scanned by geometric jumps at the current
/// (non-increasing) bound and thinned by the exact ratio, so the expected
/// work is linear in vertices plus edges.
pub fn gen_gxq<R: Rng + ?Sized>(w: &WeightedVertexSet, q: f64, rng: &mut R) -> Result<Graph> {
    if !(q > 0.0) {
        return invalid("q must be positive");
    }
    let n = w.len();
    let x = w.x();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    let mut g = Graph::new(n);
    let prob = |a: usize, b: usize| -(-q * x[a] * x[b]).exp_m1();
    for iu in 0..n {
        let u = order[iu];
        let mut j = iu + 1;
        if j >= n {
            break;
        }
        let mut bound = prob(u, order[j]);
        while j < n && bound > 0.0 {
            let skip = geometric_skip(bound, rng);
            if skip >= (n - j) as u64 {
                break;
            }
            j += skip as usize;
            let v = order[j];
            let pv = prob(u, v);
            if rng.random::<f64>() * bound < pv {
                g.push_edge(u.min(v), u.max(v));
            }
            bound = pv;
            j += 1;
        }
    }
    Ok(g)
}

/// Erdős–Rényi graph at time `t`: edge probability `1 - exp(-t/n)`.
pub fn gen_er<R: Rng + ?Sized>(n: usize, t: f64, rng: &mut R) -> Result<Graph> {
    if !(t >= 0.0) {
        return invalid("t must be nonnegative");
    }
    let mut g = Graph::new(n);
    if t == 0.0 || n < 2 {
        return Ok(g);
    }
    let p = -(-t / n as f64).exp_m1();
    for u in 0..n - 1 {
        bernoulli_run(n - u - 1, p, rng, |j| g.push_edge(u, u + 1 + j));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn weights_validate() {
        assert!(WeightedVertexSet::new(vec![1.0, 0.0]).is_err());
        let w = WeightedVertexSet::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(w.sigma(2), 5.0);
        assert_eq!(w.sigma(3), 9.0);
        assert!(w.sigma(2) >= w.x_max().powi(2));
    }

    #[test]
    fn gxq_pair_probability_ln2() {
        let w = WeightedVertexSet::new(vec![1.0, 1.0]).unwrap();
        let mut rng = stream(1, 0);
        let reps = 100_000;
        let hits = (0..reps)
            .filter(|_| gen_gxq(&w, std::f64::consts::LN_2, &mut rng).unwrap().edge_count() == 1)
            .count();
        let f = hits as f64 / reps as f64;
        assert!((f - 0.5).abs() < 4.0 * (0.25f64 / reps as f64).sqrt());
    }

    #[test]
    fn gxq_vanishing_rate_has_no_edges() {
        let w = WeightedVertexSet::new(vec![1.0, 1.0]).unwrap();
        let mut rng = stream(2, 0);
        for _ in 0..1000 {
            assert_eq!(gen_gxq(&w, 1e-12, &mut rng).unwrap().edge_count(), 0);
        }
    }

    #[test]
    fn gxq_pair_frequencies_match_inhomogeneous_weights() {
        let x = vec![0.3, 1.7, 0.9, 2.5, 0.1];
        let w = WeightedVertexSet::new(x.clone()).unwrap();
        let q = 0.6;
        let reps = 40_000;
        let mut counts = [[0usize; 5]; 5];
        let mut rng = stream(3, 0);
        for _ in 0..reps {
            let g = gen_gxq(&w, q, &mut rng).unwrap();
            for (u, v) in g.edges() {
                counts[u][v] += 1;
            }
        }
        for i in 0..5 {
            for j in i + 1..5 {
                let p = 1.0 - (-q * x[i] * x[j]).exp();
                let f = counts[i][j] as f64 / reps as f64;
                let tol = 4.0 * (p * (1.0 - p) / reps as f64).sqrt() + 1e-9;
                assert!((f - p).abs() < tol, "pair {i},{j}: {f} vs {p}");
            }
        }
    }

    #[test]
    fn er_examples() {
        let mut rng = stream(4, 0);
        assert_eq!(gen_er(10, 0.0, &mut rng).unwrap().edge_count(), 0);
        let reps = 100_000;
        let t = 2.0 * std::f64::consts::LN_2;
        let hits = (0..reps).filter(|_| gen_er(2, t, &mut rng).unwrap().edge_count() == 1).count();
        let f = hits as f64 / reps as f64;
        assert!((f - 0.5).abs() < 4.0 * (0.25f64 / reps as f64).sqrt());
    }

    #[test]
    fn er_weights_give_exact_window_identities() {
        let n = 1000;
        let w = WeightedVertexSet::erdos_renyi(n);
        let lambda = 0.7;
        let q = (n as f64).powf(1.0 / 3.0) + lambda;
        assert!((w.sigma(3) / w.sigma(2).powi(3) - 1.0).abs() < 1e-9);
        assert!((q - 1.0 / w.sigma(2) - lambda).abs() < 1e-9);
    }

    #[test]
    fn er_mean_edge_count() {
        let n = 2000;
        let t = 1.3;
        let mut rng = stream(5, 0);
        let reps = 200;
        let mean: f64 = (0..reps)
            .map(|_| gen_er(n, t, &mut rng).unwrap().edge_count() as f64)
            .sum::<f64>()
            / reps as f64;
        let p = 1.0 - (-t / n as f64).exp();
        let expect = p * (n * (n - 1) / 2) as f64;
        let sd = (expect / reps as f64).sqrt();
        assert!((mean - expect).abs() < 5.0 * sd, "{mean} vs {expect}");
    }
}
