use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{invalid, Result};
use crate::graphcore::Graph;
use crate::models::WeightedVertexSet;

use super::size_biased_order;

/// Full record of an exploration walk.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WalkTrace {
    /// `Z(i)` for `i = 1, …, len`; `Z(0) = 0` is implicit.
    pub steps: Vec<i64>,
    /// Step indices at which components finish, increasing; the `k`-th
    /// component occupies steps `boundaries[k-1]+1 ..= boundaries[k]`.
    pub boundaries: Vec<usize>,
    /// Back edges found at each step.
    pub surplus: Vec<u32>,
    /// Item explored at each step.
    pub order: Vec<usize>,
}

impl WalkTrace {
    /// Component lengths recovered from the boundaries.
    pub fn component_lengths(&self) -> Vec<usize> {
        let mut prev = 0;
        self.boundaries
            .iter()
            .map(|&b| {
                let l = b - prev;
                prev = b;
                l
            })
            .collect()
    }

    fn push(&mut self, z: i64, theta: u32, item: usize) {
        self.steps.push(z);
        self.surplus.push(theta);
        self.order.push(item);
    }
}

/// Output of the breadth-first exploration of `G(x, q)`.
#[derive(Clone, Debug)]
pub struct AldousWalk {
    pub graph: Graph,
    /// Component masses `Σ_{v∈C} x_v` in discovery order.
    pub masses: Vec<f64>,
    /// Surplus edges per component, in discovery order.
    pub surplus: Vec<usize>,
    pub trace: Option<WalkTrace>,
}

/// Explores `G(x, q)` breadth first, starting each component at the next
/// unseen vertex of a size-biased order. Exploring `v` reveals as children
/// the unseen `i` with `ξ_{v,i} ≤ x_v` for `ξ_{v,i} ~ Exp(q x_i)`, taken in
/// increasing `ξ` order; pairs of `v` with queued vertices give surplus
/// edges. Each pair is examined once, so the output has the law of
/// `gen_gxq`. The walk is `Z(i) = Z(i-1) + (children - 1)`. Runs in
/// `O(n^2)` time.
pub fn aldous_walk<R: Rng + ?Sized>(
    w: &WeightedVertexSet,
    q: f64,
    record_trace: bool,
    rng: &mut R,
) -> Result<AldousWalk> {
    if !(q > 0.0 && q.is_finite()) {
        return invalid(format!("q must be positive, got {q}"));
    }
    let x = w.x();
    let n = x.len();
    let starts = size_biased_order(x, rng)?;
    let mut graph = Graph::new(n);
    // unseen set with positions for swap removal
    let mut unseen: Vec<usize> = (0..n).collect();
    let mut pos: Vec<usize> = (0..n).collect();
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut masses = Vec::new();
    let mut surplus = Vec::new();
    let mut trace = record_trace.then(WalkTrace::default);
    let mut z: i64 = 0;
    let mut next_start = 0;
    let mut step = 0usize;
    let remove = |unseen: &mut Vec<usize>, pos: &mut Vec<usize>, v: usize| {
        let p = pos[v];
        let last = *unseen.last().unwrap();
        unseen.swap_remove(p);
        if last != v {
            pos[last] = p;
        }
    };
    let mut children: Vec<(f64, usize)> = Vec::new();
    while step < n {
        if queue.is_empty() {
            while seen[starts[next_start]] {
                next_start += 1;
            }
            let v = starts[next_start];
            remove(&mut unseen, &mut pos, v);
            seen[v] = true;
            queue.push_back(v);
            masses.push(0.0);
            surplus.push(0);
        }
        let v = queue.pop_front().unwrap();
        step += 1;
        *masses.last_mut().unwrap() += x[v];
        children.clear();
        for &i in &unseen {
            let e: f64 = Exp1.sample(rng);
            let xi = e / (q * x[i]);
            if xi <= x[v] {
                children.push((xi, i));
            }
        }
        children.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut theta = 0u32;
        for &u in &queue {
            if rng.random::<f64>() < -(-q * x[v] * x[u]).exp_m1() {
                graph.push_edge(v, u);
                theta += 1;
            }
        }
        for &(_, c) in &children {
            remove(&mut unseen, &mut pos, c);
            graph.push_edge(v, c);
            seen[c] = true;
            queue.push_back(c);
        }
        *surplus.last_mut().unwrap() += theta as usize;
        z += children.len() as i64 - 1;
        if let Some(t) = trace.as_mut() {
            t.push(z, theta, v);
            if queue.is_empty() {
                t.boundaries.push(step);
            }
        }
    }
    Ok(AldousWalk { graph, masses, surplus, trace })
}

/// One component found by the blob walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiordanComponent {
    /// Number of blobs.
    pub blobs: usize,
    /// Back edges.
    pub surplus: usize,
    /// Total percolated stubs `Σ a_i`.
    pub stubs: u64,
    /// Total blob size, when sizes were supplied.
    pub vertices: u64,
}

/// Output of the blob-level half-edge exploration.
#[derive(Clone, Debug)]
pub struct RiordanWalk {
    /// Multigraph on blobs formed by the matching.
    pub graph: Graph,
    pub components: Vec<RiordanComponent>,
    pub trace: Option<WalkTrace>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stub {
    Unreached,
    Active,
    Paired,
}

/// Explores the uniform matching of `a_i` half-edges per blob.
///
/// A component starts at a blob chosen proportional to `a` among unreached
/// blobs; all its half-edges become active. Afterwards the oldest active
/// half-edge is paired with its partner, whose blob is reached and whose
/// other half-edges become active. Pairings among active half-edges found
/// while a blob is reached are back edges `θ`. With `A(i)` active
/// half-edges and `comp(i)` components started, `Z(i) = A(i) - 2 comp(i)`
/// and `Z(i) - Z(i-1) = η - 2 - 2θ` where `η` is the reached blob's degree.
/// Blobs with `a_i = 0` are never reached. An odd total drops one uniformly
/// chosen half-edge first.
pub fn riordan_walk<R: Rng + ?Sized>(
    a: &[u32],
    blob_sizes: Option<&[u64]>,
    record_trace: bool,
    rng: &mut R,
) -> Result<RiordanWalk> {
    let m = a.len();
    if let Some(s) = blob_sizes {
        if s.len() != m {
            return invalid("one size per blob required");
        }
    }
    let mut owner: Vec<usize> = Vec::new();
    for (i, &ai) in a.iter().enumerate() {
        owner.extend(std::iter::repeat_n(i, ai as usize));
    }
    if owner.len() % 2 == 1 {
        let k = rng.random_range(0..owner.len());
        owner.remove(k);
    }
    let total = owner.len();
    let mut first = vec![0usize; m + 1];
    for &o in &owner {
        first[o + 1] += 1;
    }
    for i in 0..m {
        first[i + 1] += first[i];
    }
    // owner is sorted by blob, so stubs of blob i are first[i]..first[i+1]
    let mut perm: Vec<usize> = (0..total).collect();
    perm.shuffle(rng);
    let mut partner = vec![0usize; total];
    for p in perm.chunks_exact(2) {
        partner[p[0]] = p[1];
        partner[p[1]] = p[0];
    }
    let mut state = vec![Stub::Unreached; total];
    // unreached stubs with positions, for size-biased component starts
    let mut unreached: Vec<usize> = (0..total).collect();
    let mut upos: Vec<usize> = (0..total).collect();
    let mut active: VecDeque<usize> = VecDeque::new();
    let mut a_count: i64 = 0;
    let mut comp: i64 = 0;
    let mut graph = Graph::new(m);
    let mut components: Vec<RiordanComponent> = Vec::new();
    let mut trace = record_trace.then(WalkTrace::default);
    let mut step = 0usize;

    while !unreached.is_empty() || a_count > 0 {
        let (blob, used) = if a_count == 0 {
            let s = unreached[rng.random_range(0..unreached.len())];
            comp += 1;
            components.push(RiordanComponent { blobs: 0, surplus: 0, stubs: 0, vertices: 0 });
            (owner[s], None)
        } else {
            let s = loop {
                let s = active.pop_front().unwrap();
                if state[s] == Stub::Active {
                    break s;
                }
            };
            let p = partner[s];
            debug_assert_eq!(state[p], Stub::Unreached);
            state[s] = Stub::Paired;
            state[p] = Stub::Paired;
            a_count -= 1;
            graph.push_edge(owner[s], owner[p]);
            (owner[p], Some(p))
        };
        step += 1;
        let range = first[blob]..first[blob + 1];
        let eta = range.len() as u64;
        for r in range.clone() {
            let at = upos[r];
            let last = *unreached.last().unwrap();
            unreached.swap_remove(at);
            if last != r {
                upos[last] = at;
            }
            if Some(r) != used {
                state[r] = Stub::Active;
                active.push_back(r);
                a_count += 1;
            }
        }
        let mut theta = 0u32;
        for r in range {
            if state[r] == Stub::Active && state[partner[r]] == Stub::Active {
                state[r] = Stub::Paired;
                state[partner[r]] = Stub::Paired;
                graph.push_edge(blob, owner[partner[r]]);
                theta += 1;
                a_count -= 2;
            }
        }
        let c = components.last_mut().unwrap();
        c.blobs += 1;
        c.surplus += theta as usize;
        c.stubs += eta;
        c.vertices += blob_sizes.map_or(0, |s| s[blob]);
        if let Some(t) = trace.as_mut() {
            t.push(a_count - 2 * comp, theta, blob);
            if a_count == 0 {
                t.boundaries.push(step);
            }
        }
    }
    Ok(RiordanWalk { graph, components, trace })
}
