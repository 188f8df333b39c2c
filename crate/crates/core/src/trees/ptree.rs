use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::error::{invalid, Error, Result};
use crate::graphcore::{components, Graph};
use crate::models::{gen_gxq, WeightedVertexSet};
use crate::rng::SimRng;

/// Ordered (planar) rooted tree on `0..m` with a probability on the
/// vertices. Children lists run from oldest to youngest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PTree {
    root: usize,
    children: Vec<Vec<usize>>,
}

impl PTree {
    /// Checked constructor: every vertex except the root has exactly one
    /// parent and all vertices are reachable from the root.
    pub fn new(root: usize, children: Vec<Vec<usize>>) -> Result<Self> {
        let m = children.len();
        if root >= m {
            return invalid("root out of range");
        }
        let mut seen = vec![false; m];
        seen[root] = true;
        let mut stack = vec![root];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                if c >= m || seen[c] {
                    return invalid(format!("vertex {c} is out of range or has two parents"));
                }
                seen[c] = true;
                count += 1;
                stack.push(c);
            }
        }
        if count != m {
            return invalid("tree does not span all vertices");
        }
        Ok(PTree { root, children })
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// `(parent, child)` pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::with_capacity(self.len().saturating_sub(1));
        for (v, cs) in self.children.iter().enumerate() {
            e.extend(cs.iter().map(|&c| (v, c)));
        }
        e
    }

    /// Ordered p-tree probability `Π_v p_v^{d_v} / d_v!`.
    pub fn ordered_probability(&self, p: &[f64]) -> f64 {
        self.children
            .iter()
            .zip(p)
            .map(|(cs, pv)| {
                let d = cs.len();
                pv.powi(d as i32) / (1..=d).map(|k| k as f64).product::<f64>()
            })
            .product()
    }
}

fn check_p(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return invalid("probability vector is empty");
    }
    if p.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return invalid("probabilities must be strictly positive");
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return invalid(format!("probabilities sum to {s}, not 1"));
    }
    Ok(())
}

fn check_a(a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return invalid(format!("tilt parameter must be positive, got {a}"));
    }
    Ok(())
}

/// Cumulative table for drawing from `p` by binary search.
fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

fn draw<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> usize {
    let u = rng.random::<f64>() * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Random ordered p-tree.
///
/// Draws `J_0, J_1, …` iid from `p`; `J_0` is the root and every first
/// appearance `J_i` becomes a child of `J_{i-1}`. This gives the unordered
/// law `Π p_v^{d_v}`; each children list is then put in uniformly random
/// order, which gives the ordered law `Π p_v^{d_v} / d_v!`.
pub fn sample_ptree<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> Result<PTree> {
    check_p(p)?;
    Ok(sample_ptree_unchecked(p, &cumulative(p), rng))
}

fn sample_ptree_unchecked<R: Rng + ?Sized>(p: &[f64], cdf: &[f64], rng: &mut R) -> PTree {
    let m = p.len();
    let mut children = vec![Vec::new(); m];
    let mut seen = vec![false; m];
    let root = draw(cdf, rng);
    seen[root] = true;
    let mut left = m - 1;
    let mut prev = root;
    while left > 0 {
        let j = draw(cdf, rng);
        if !seen[j] {
            seen[j] = true;
            children[prev].push(j);
            left -= 1;
        }
        prev = j;
    }
    for cs in &mut children {
        cs.shuffle(rng);
    }
    PTree { root, children }
}

/// Permitted edges of a planar tree.
///
/// Depth-first exploration with a stack holding the root: the top vertex
/// `v` is popped, paired with every vertex still on the stack, and its
/// children are pushed so that the oldest child is explored next.
pub fn permitted_edges(t: &PTree) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut stack = vec![t.root];
    while let Some(v) = stack.pop() {
        out.extend(stack.iter().map(|&j| (v, j)));
        stack.extend(t.children[v].iter().rev());
    }
    out
}

/// The two nonnegative terms of `log L(t)`: the tree-edge term
/// `Σ_E log((e^{a p_i p_j} - 1)/(a p_i p_j))` and the permitted-edge term
/// `a Σ_P p_i p_j`.
pub fn log_tilt_terms(t: &PTree, p: &[f64], a: f64) -> (f64, f64) {
    let edge: f64 = t
        .edges()
        .iter()
        .map(|&(i, j)| {
            let z = a * p[i] * p[j];
            (z.exp_m1() / z).ln()
        })
        .sum();
    let perm: f64 = permitted_edges(t).iter().map(|&(i, j)| a * p[i] * p[j]).sum();
    (edge, perm)
}

/// Tilt weight `L(t) = Π_E (e^{a p_i p_j} - 1)/(a p_i p_j) · exp(a Σ_P p_i p_j)`.
pub fn tilt_weight(t: &PTree, p: &[f64], a: f64) -> Result<f64> {
    check_a(a)?;
    if p.len() != t.len() {
        return invalid("probability vector does not match the tree");
    }
    let (e, q) = log_tilt_terms(t, p, a);
    Ok((e + q).exp())
}

/// Largest `m` accepted by [`enumerate_planar_trees`].
pub const ENUMERATION_CAP: usize = 6;

/// All planar rooted trees on `0..m` (`m! · Catalan(m-1)` of them).
pub fn enumerate_planar_trees(m: usize) -> Result<Vec<PTree>> {
    if m == 0 || m > ENUMERATION_CAP {
        return Err(Error::SizeCap(format!("enumeration needs 1 <= m <= {ENUMERATION_CAP}")));
    }
    // shapes as preorder child counts (Łukasiewicz words)
    let mut shapes = Vec::new();
    let mut word = Vec::with_capacity(m);
    fn words(m: usize, slots: usize, word: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if word.len() == m {
            if slots == 0 {
                out.push(word.clone());
            }
            return;
        }
        if slots == 0 {
            return;
        }
        let rest = m - word.len() - 1;
        for c in 0..=rest {
            word.push(c);
            words(m, slots - 1 + c, word, out);
            word.pop();
        }
    }
    words(m, 1, &mut word, &mut shapes);
    let mut perms = Vec::new();
    permutations(&mut (0..m).collect(), 0, &mut perms);
    let mut out = Vec::with_capacity(shapes.len() * perms.len());
    for shape in &shapes {
        for perm in &perms {
            // rebuild by preorder: a stack of (vertex, remaining children)
            let mut children = vec![Vec::new(); m];
            let mut stack: Vec<(usize, usize)> = Vec::new();
            for (pos, &c) in shape.iter().enumerate() {
                let v = perm[pos];
                if let Some(top) = stack.last_mut() {
                    children[top.0].push(v);
                    top.1 -= 1;
                }
                while stack.last().is_some_and(|t| t.1 == 0) {
                    stack.pop();
                }
                if c > 0 {
                    stack.push((v, c));
                }
            }
            out.push(PTree { root: perm[0], children });
        }
    }
    Ok(out)
}

fn permutations(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

/// Exact tilted p-tree law by enumeration, for small `m`.
#[derive(Clone, Debug)]
pub struct TiltedTreeTable {
    pub trees: Vec<PTree>,
    /// Normalised tilted probabilities, aligned with `trees`.
    pub probs: Vec<f64>,
    /// `E_ord L(T)`.
    pub mean_weight: f64,
    cdf: Vec<f64>,
}

impl TiltedTreeTable {
    pub fn new(p: &[f64], a: f64) -> Result<Self> {
        check_p(p)?;
        check_a(a)?;
        let trees = enumerate_planar_trees(p.len())?;
        let raw: Vec<f64> = trees
            .iter()
            .map(|t| {
                let (e, q) = log_tilt_terms(t, p, a);
                t.ordered_probability(p) * (e + q).exp()
            })
            .collect();
        let z: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|v| v / z).collect();
        let cdf = cumulative(&probs);
        Ok(TiltedTreeTable { trees, probs, mean_weight: z, cdf })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &PTree {
        &self.trees[draw(&self.cdf, rng)]
    }
}

/// Importance-resampling controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SirOptions {
    pub initial: usize,
    pub target_ess: f64,
    pub max_proposals: usize,
}

impl Default for SirOptions {
    fn default() -> Self {
        SirOptions { initial: 256, target_ess: 100.0, max_proposals: 1 << 18 }
    }
}

/// Outcome of an importance-resampling run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SirReport {
    pub proposals: usize,
    pub ess: f64,
    /// Mean raw weight, an estimate of the normalising constant.
    pub mean_weight: f64,
}

/// Draws proposals (each from its own seed) until the effective sample size
/// reaches the target, then returns the seed of one proposal chosen with
/// probability proportional to its weight.
pub(crate) fn sir_select<R, F>(opts: &SirOptions, rng: &mut R, mut log_weight: F) -> Result<(u64, SirReport)>
where
    R: Rng + ?Sized,
    F: FnMut(u64) -> Result<f64>,
{
    if opts.initial == 0 || opts.max_proposals < opts.initial || !(opts.target_ess > 0.0) {
        return invalid("invalid resampling options");
    }
    let mut seeds: Vec<u64> = Vec::new();
    let mut logw: Vec<f64> = Vec::new();
    let mut want = opts.initial;
    loop {
        while seeds.len() < want {
            let s = rng.random::<u64>();
            logw.push(log_weight(s)?);
            seeds.push(s);
        }
        let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
        let s1: f64 = w.iter().sum();
        let s2: f64 = w.iter().map(|v| v * v).sum();
        let ess = s1 * s1 / s2;
        if ess >= opts.target_ess || want >= opts.max_proposals {
            if ess < opts.target_ess {
                return Err(Error::NonConvergence(format!(
                    "effective sample size {ess:.1} below {} after {want} proposals",
                    opts.target_ess
                )));
            }
            let mean_weight = s1 / w.len() as f64 * top.exp();
            let u = rng.random::<f64>() * s1;
            let mut acc = 0.0;
            let mut pick = w.len() - 1;
            for (i, v) in w.iter().enumerate() {
                acc += v;
                if u < acc {
                    pick = i;
                    break;
                }
            }
            return Ok((seeds[pick], SirReport { proposals: want, ess, mean_weight }));
        }
        want = (want * 2).min(opts.max_proposals);
    }
}

/// How tilted trees are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TiltMethod {
    /// Exact enumeration for `m ≤ 4`, importance resampling above.
    Auto,
    Exact,
    Resample(SirOptions),
}

/// Tilted tree together with the resampling diagnostics (absent in exact
/// mode).
#[derive(Clone, Debug)]
pub struct TiltedTree {
    pub tree: PTree,
    pub report: Option<SirReport>,
}

/// Tree from the tilted p-tree law `dP̃/dP_ord ∝ L(t)`.
pub fn sample_tilted_ptree<R: Rng + ?Sized>(
    p: &[f64],
    a: f64,
    method: TiltMethod,
    rng: &mut R,
) -> Result<TiltedTree> {
    check_p(p)?;
    check_a(a)?;
    let exact = match method {
        TiltMethod::Auto => p.len() <= 4,
        TiltMethod::Exact => true,
        TiltMethod::Resample(_) => false,
    };
    if exact {
        let table = TiltedTreeTable::new(p, a)?;
        return Ok(TiltedTree { tree: table.sample(rng).clone(), report: None });
    }
    let opts = match method {
        TiltMethod::Resample(o) => o,
        _ => SirOptions::default(),
    };
    let cdf = cumulative(p);
    let propose = |seed: u64| sample_ptree_unchecked(p, &cdf, &mut SimRng::seed_from_u64(seed));
    let (seed, report) = sir_select(&opts, rng, |s| {
        let (e, q) = log_tilt_terms(&propose(s), p, a);
        Ok(e + q)
    })?;
    Ok(TiltedTree { tree: propose(seed), report: Some(report) })
}

/// Connected graph drawn from `G(x,q)` conditioned to be connected, with
/// `a p_u p_v = q x_u x_v`.
#[derive(Clone, Debug)]
pub struct ConnectedSample {
    pub graph: Graph,
    pub tree: PTree,
    /// Permitted edges added on top of the tree.
    pub surplus: usize,
    pub report: Option<SirReport>,
}

/// Tilted p-tree plus each permitted edge `{u,v}` independently with
/// probability `1 - exp(-a p_u p_v)`.
pub fn connected_gxq_with<R: Rng + ?Sized>(
    p: &[f64],
    a: f64,
    method: TiltMethod,
    rng: &mut R,
) -> Result<ConnectedSample> {
    let TiltedTree { tree, report } = sample_tilted_ptree(p, a, method, rng)?;
    let mut graph = Graph::new(p.len());
    for (u, v) in tree.edges() {
        graph.add_edge(u.min(v), u.max(v))?;
    }
    let mut surplus = 0;
    for (u, v) in permitted_edges(&tree) {
        if rng.random::<f64>() < -(-a * p[u] * p[v]).exp_m1() {
            graph.add_edge(u.min(v), u.max(v))?;
            surplus += 1;
        }
    }
    Ok(ConnectedSample { graph, tree, surplus, report })
}

/// [`connected_gxq_with`] with [`TiltMethod::Auto`], returning the graph.
pub fn connected_gxq<R: Rng + ?Sized>(p: &[f64], a: f64, rng: &mut R) -> Result<Graph> {
    Ok(connected_gxq_with(p, a, TiltMethod::Auto, rng)?.graph)
}

/// `G(x,q)` in two stages: the component partition from [`gen_gxq`], then
/// each component redrawn by [`connected_gxq`] with `p = x/Σx` and
/// `a = q (Σx)²` on that component.
pub fn partition_then_connect<R: Rng + ?Sized>(
    w: &WeightedVertexSet,
    q: f64,
    rng: &mut R,
) -> Result<Graph> {
    let g0 = gen_gxq(w, q, rng)?;
    let decomp = components(&g0);
    let x = w.x();
    let mut g = Graph::new(w.len());
    for comp in &decomp.components {
        if comp.len() == 1 {
            continue;
        }
        let total: f64 = comp.iter().map(|&v| x[v]).sum();
        let p: Vec<f64> = comp.iter().map(|&v| x[v] / total).collect();
        let inner = connected_gxq(&p, q * total * total, rng)?;
        for (u, v) in inner.edges() {
            let (a, b) = (comp[u], comp[v]);
            g.add_edge(a.min(b), a.max(b))?;
        }
    }
    Ok(g)
}
