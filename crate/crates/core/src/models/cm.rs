use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Exp};

use crate::error::{invalid, Error, Result};
use crate::graphcore::{ComponentDecomposition, Graph, UnionFind};

fn stub_owners(degrees: &[u32]) -> Result<Vec<u32>> {
    let total: u64 = degrees.iter().map(|&d| d as u64).sum();
    if total % 2 == 1 {
        return Err(Error::OddStubTotal(total));
    }
    let mut owner = Vec::with_capacity(total as usize);
    for (v, &d) in degrees.iter().enumerate() {
        owner.extend(std::iter::repeat_n(v as u32, d as usize));
    }
    Ok(owner)
}

/// Configuration model: a uniform perfect matching of the half-edges.
pub fn cm_uniform_match<R: Rng + ?Sized>(degrees: &[u32], rng: &mut R) -> Result<Graph> {
    let mut stubs = stub_owners(degrees)?;
    stubs.shuffle(rng);
    let mut g = Graph::new(degrees.len());
    for pair in stubs.chunks_exact(2) {
        g.push_edge(pair[0] as usize, pair[1] as usize);
    }
    Ok(g)
}

/// Keeps each half-edge with probability `p`, then matches the survivors
/// uniformly. If an odd number survives, one uniformly chosen survivor is
/// discarded first.
pub fn cm_percolate_stubs<R: Rng + ?Sized>(degrees: &[u32], p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return invalid("p must lie in [0,1]");
    }
    let mut kept: Vec<u32> = degrees
        .iter()
        .map(|&d| if d == 0 { 0 } else { Binomial::new(d as u64, p).unwrap().sample(rng) as u32 })
        .collect();
    let total: u64 = kept.iter().map(|&d| d as u64).sum();
    if total % 2 == 1 {
        let mut r = rng.random_range(0..total);
        for d in kept.iter_mut() {
            if r < *d as u64 {
                *d -= 1;
                break;
            }
            r -= *d as u64;
        }
    }
    cm_uniform_match(&kept, rng)
}

/// Keeps each edge of `g` independently with probability `p`.
pub fn cm_percolate_edges<R: Rng + ?Sized>(g: &Graph, p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return invalid("p must lie in [0,1]");
    }
    let mut out = Graph::new(g.n());
    for (u, v) in g.edges() {
        if rng.random::<f64>() < p {
            out.push_edge(u, v);
        }
    }
    Ok(out)
}

/// One edge formation in the dynamic construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CmEvent {
    pub t: f64,
    /// Stub whose clock rang and the stub it chose.
    pub ringing: u32,
    pub partner: u32,
    pub u: u32,
    pub v: u32,
}

/// State of the dynamic configuration model: every alive half-edge rings at
/// rate one and pairs with a uniformly chosen other alive half-edge.
#[derive(Clone, Debug)]
pub struct HalfEdgeState {
    degrees: Vec<u32>,
    stub_vertex: Vec<u32>,
    alive: Vec<u32>,
    slot: Vec<u32>,
    uf: UnionFind,
    free_root: Vec<u64>,
    free_vertex: Vec<u32>,
    graph: Graph,
    time: f64,
}

impl HalfEdgeState {
    pub fn new(degrees: &[u32]) -> Result<Self> {
        let stub_vertex = stub_owners(degrees)?;
        let m = stub_vertex.len();
        Ok(HalfEdgeState {
            degrees: degrees.to_vec(),
            stub_vertex,
            alive: (0..m as u32).collect(),
            slot: (0..m as u32).collect(),
            uf: UnionFind::new(degrees.len()),
            free_root: degrees.iter().map(|&d| d as u64).collect(),
            free_vertex: degrees.to_vec(),
            graph: Graph::new(degrees.len()),
            time: 0.0,
        })
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn alive_count(&self) -> usize {
        self.alive.len()
    }

    pub fn total_stubs(&self) -> usize {
        self.stub_vertex.len()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Free half-edges at vertex `v`.
    pub fn free_at(&self, v: usize) -> u32 {
        self.free_vertex[v]
    }

    pub fn free_per_vertex(&self) -> &[u32] {
        &self.free_vertex
    }

    /// Free half-edges in the component of `v`.
    pub fn component_free(&self, v: usize) -> u64 {
        self.free_root[self.uf.find_const(v)]
    }

    pub fn component_size(&self, v: usize) -> usize {
        let mut uf = self.uf.clone();
        uf.size_of(v)
    }

    pub fn decomposition(&self) -> ComponentDecomposition {
        let mut uf = self.uf.clone();
        ComponentDecomposition::from_union_find(&mut uf)
    }

    fn kill(&mut self, stub: u32) {
        let i = self.slot[stub as usize] as usize;
        let last = *self.alive.last().unwrap();
        self.alive.swap_remove(i);
        if last != stub {
            self.slot[last as usize] = i as u32;
        }
        self.slot[stub as usize] = u32::MAX;
        let v = self.stub_vertex[stub as usize] as usize;
        self.free_vertex[v] -= 1;
    }

    /// Pairs the alive stubs `a` and `b` into an edge.
    fn pair(&mut self, a: u32, b: u32) -> CmEvent {
        let u = self.stub_vertex[a as usize];
        let v = self.stub_vertex[b as usize];
        let ru = self.uf.find(u as usize);
        let rv = self.uf.find(v as usize);
        self.kill(a);
        self.kill(b);
        if ru == rv {
            self.free_root[ru] -= 2;
        } else {
            let f = self.free_root[ru] + self.free_root[rv] - 2;
            let r = self.uf.union(ru, rv).unwrap();
            self.free_root[r] = f;
        }
        self.graph.push_edge(u as usize, v as usize);
        CmEvent { t: self.time, ringing: a, partner: b, u, v }
    }

    /// Advances to the next event if it occurs no later than `t_end`;
    /// otherwise moves the clock to `t_end` and returns `None`.
    pub fn step<R: Rng + ?Sized>(&mut self, t_end: f64, rng: &mut R) -> Option<CmEvent> {
        let m = self.alive.len();
        if m < 2 {
            if t_end.is_finite() {
                self.time = self.time.max(t_end);
            }
            return None;
        }
        let dt = Exp::new(m as f64).unwrap().sample(rng);
        if self.time + dt > t_end {
            self.time = t_end;
            return None;
        }
        self.time += dt;
        let i = rng.random_range(0..m);
        let mut j = rng.random_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = (self.alive[i], self.alive[j]);
        Some(self.pair(a, b))
    }

    /// Runs until `t_end` (or absorption when `t_end` is infinite),
    /// appending events to `log` when given.
    pub fn run_until<R: Rng + ?Sized>(
        &mut self,
        t_end: f64,
        rng: &mut R,
        mut log: Option<&mut Vec<CmEvent>>,
    ) {
        while let Some(ev) = self.step(t_end, rng) {
            if let Some(l) = log.as_deref_mut() {
                l.push(ev);
            }
        }
    }
}

/// Runs the dynamic configuration model from time zero to `t_end`.
pub fn cm_dynamic<R: Rng + ?Sized>(
    degrees: &[u32],
    t_end: f64,
    rng: &mut R,
) -> Result<(HalfEdgeState, Vec<CmEvent>)> {
    if !(t_end >= 0.0) {
        return invalid("t_end must be nonnegative");
    }
    let mut state = HalfEdgeState::new(degrees)?;
    let mut log = Vec::new();
    state.run_until(t_end, rng, Some(&mut log));
    Ok((state, log))
}

/// Reads newline-separated nonnegative integer degrees.
pub fn read_degrees<R: BufRead>(r: R) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let s = line.trim();
        if s.is_empty() {
            continue;
        }
        out.push(s.parse().map_err(|_| Error::Parse(format!("line {}: '{s}'", i + 1)))?);
    }
    Ok(out)
}
