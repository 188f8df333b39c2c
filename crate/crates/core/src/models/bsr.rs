use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{invalid, Result};
use crate::graphcore::{ComponentDecomposition, Graph, UnionFind};

/// Element of `Ω_K = {1, …, K, ω}`: a component size up to `K`, or `ω` for
/// anything larger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SizeClass {
    Size(u8),
    Omega,
}

impl SizeClass {
    fn code(self) -> u8 {
        match self {
            SizeClass::Size(s) => s,
            SizeClass::Omega => 0,
        }
    }

    pub fn of(size: usize, k: usize) -> Self {
        if size <= k {
            SizeClass::Size(size as u8)
        } else {
            SizeClass::Omega
        }
    }
}

/// Bounded-size rule: cutoff `K` and the set `F ⊆ Ω_K^4` of class vectors
/// for which the first candidate edge is taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsrRule {
    k: usize,
    members: HashSet<[u8; 4]>,
}

impl BsrRule {
    pub fn new(k: usize, members: impl IntoIterator<Item = [SizeClass; 4]>) -> Result<Self> {
        if k > 200 {
            return invalid("K must be at most 200");
        }
        let mut set = HashSet::new();
        for m in members {
            for c in m {
                if let SizeClass::Size(s) = c {
                    if s == 0 || s as usize > k {
                        return invalid(format!("size class {s} outside 1..={k}"));
                    }
                }
            }
            set.insert(m.map(SizeClass::code));
        }
        Ok(BsrRule { k, members: set })
    }

    fn omega(k: usize) -> Vec<SizeClass> {
        (1..=k as u8).map(SizeClass::Size).chain([SizeClass::Omega]).collect()
    }

    /// Parses patterns such as `"1,1,*,*"`; `*` ranges over `Ω_K` and `w`
    /// denotes `ω`.
    pub fn from_patterns(k: usize, patterns: &[&str]) -> Result<Self> {
        let all = Self::omega(k);
        let mut members = Vec::new();
        for pat in patterns {
            let parts: Vec<&str> = pat.split(',').map(str::trim).collect();
            if parts.len() != 4 {
                return invalid(format!("pattern '{pat}' needs four entries"));
            }
            let mut choices: Vec<Vec<SizeClass>> = Vec::new();
            for p in parts {
                choices.push(match p {
                    "*" => all.clone(),
                    "w" | "ω" => vec![SizeClass::Omega],
                    s => match s.parse::<u8>() {
                        Ok(v) => vec![SizeClass::Size(v)],
                        Err(_) => return invalid(format!("bad class '{s}'")),
                    },
                });
            }
            for a in &choices[0] {
                for b in &choices[1] {
                    for c in &choices[2] {
                        for d in &choices[3] {
                            members.push([*a, *b, *c, *d]);
                        }
                    }
                }
            }
        }
        Self::new(k, members)
    }

    /// Bohman–Frieze: `K = 1`, `F = {(1,1,⋆,⋆)}`.
    pub fn bohman_frieze() -> Self {
        Self::from_patterns(1, &["1,1,*,*"]).unwrap()
    }

    /// `F = Ω_K^4`: the first edge is always taken.
    pub fn always_first(k: usize) -> Self {
        Self::from_patterns(k, &["*,*,*,*"]).unwrap()
    }

    /// `F = ∅`: the second edge is always taken.
    pub fn never_first(k: usize) -> Self {
        BsrRule { k, members: HashSet::new() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn takes_first(&self, classes: [SizeClass; 4]) -> bool {
        self.members.contains(&classes.map(SizeClass::code))
    }
}

/// One event of a bounded-size rule process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BsrEvent {
    pub t: f64,
    pub quad: [u32; 4],
    /// Whether `(v1, v2)` was added (otherwise `(v3, v4)`).
    pub first: bool,
}

/// Bounded-size rule process on `n` vertices: events at total rate `n/2`,
/// each inspecting a uniform ordered quadruple drawn with replacement.
#[derive(Clone, Debug)]
pub struct BsrProcess {
    rule: BsrRule,
    uf: UnionFind,
    graph: Graph,
    time: f64,
    largest: usize,
    sum_sq: u128,
    sum_cube: u128,
    singletons: usize,
}

impl BsrProcess {
    pub fn new(rule: BsrRule, n: usize) -> Self {
        BsrProcess {
            rule,
            uf: UnionFind::new(n),
            graph: Graph::new(n),
            time: 0.0,
            largest: usize::from(n > 0),
            sum_sq: n as u128,
            sum_cube: n as u128,
            singletons: n,
        }
    }

    pub fn n(&self) -> usize {
        self.uf.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn largest(&self) -> usize {
        self.largest
    }

    pub fn singletons(&self) -> usize {
        self.singletons
    }

    /// `Σ |C|^2 / n`.
    pub fn s2(&self) -> f64 {
        self.sum_sq as f64 / self.n() as f64
    }

    /// `Σ |C|^3 / n`.
    pub fn s3(&self) -> f64 {
        self.sum_cube as f64 / self.n() as f64
    }

    pub fn decomposition(&self) -> ComponentDecomposition {
        let mut uf = self.uf.clone();
        ComponentDecomposition::from_union_find(&mut uf)
    }

    fn class(&mut self, v: usize) -> SizeClass {
        let s = self.uf.size_of(v);
        SizeClass::of(s, self.rule.k)
    }

    fn join(&mut self, u: usize, v: usize) {
        self.graph.push_edge(u, v);
        let a = self.uf.size_of(u) as u128;
        let b = self.uf.size_of(v) as u128;
        if self.uf.union(u, v).is_some() {
            self.sum_sq += (a + b).pow(2) - a * a - b * b;
            self.sum_cube += (a + b).pow(3) - a.pow(3) - b.pow(3);
            self.singletons -= usize::from(a == 1) + usize::from(b == 1);
            self.largest = self.largest.max((a + b) as usize);
        }
    }

    /// Advances to the next event if it occurs no later than `t_end`.
    pub fn step<R: Rng + ?Sized>(&mut self, t_end: f64, rng: &mut R) -> Option<BsrEvent> {
        let n = self.n();
        if n == 0 {
            self.time = t_end;
            return None;
        }
        let dt = Exp::new(n as f64 / 2.0).unwrap().sample(rng);
        if self.time + dt > t_end {
            self.time = t_end;
            return None;
        }
        self.time += dt;
        let quad: [u32; 4] = std::array::from_fn(|_| rng.random_range(0..n as u32));
        let classes = quad.map(|v| self.class(v as usize));
        let first = self.rule.takes_first(classes);
        let (u, v) = if first { (quad[0], quad[1]) } else { (quad[2], quad[3]) };
        self.join(u as usize, v as usize);
        Some(BsrEvent { t: self.time, quad, first })
    }

    pub fn run_until<R: Rng + ?Sized>(
        &mut self,
        t_end: f64,
        rng: &mut R,
        mut log: Option<&mut Vec<BsrEvent>>,
    ) {
        while let Some(ev) = self.step(t_end, rng) {
            if let Some(l) = log.as_deref_mut() {
                l.push(ev);
            }
        }
    }
}

/// Final state and event log of a bounded-size rule run.
#[derive(Clone, Debug)]
pub struct BsrRun {
    pub process: BsrProcess,
    pub events: Vec<BsrEvent>,
}

pub fn bsr_run<R: Rng + ?Sized>(rule: &BsrRule, n: usize, t_end: f64, rng: &mut R) -> Result<BsrRun> {
    if !(t_end >= 0.0) || t_end.is_infinite() {
        return invalid("t_end must be finite and nonnegative");
    }
    let mut process = BsrProcess::new(rule.clone(), n);
    let mut events = Vec::new();
    process.run_until(t_end, rng, Some(&mut events));
    Ok(BsrRun { process, events })
}

/// Bohman–Frieze process up to `t_end`.
pub fn bf_run<R: Rng + ?Sized>(n: usize, t_end: f64, rng: &mut R) -> Result<BsrRun> {
    bsr_run(&BsrRule::bohman_frieze(), n, t_end, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::components;
    use crate::rng::stream;

    #[test]
    fn rule_membership() {
        let bf = BsrRule::bohman_frieze();
        use SizeClass::*;
        assert!(bf.takes_first([Size(1), Size(1), Omega, Size(1)]));
        assert!(!bf.takes_first([Size(1), Omega, Size(1), Size(1)]));
        assert!(BsrRule::always_first(2).takes_first([Omega, Size(2), Omega, Omega]));
        assert!(!BsrRule::never_first(1).takes_first([Size(1); 4]));
        assert!(BsrRule::from_patterns(1, &["2,1,*,*"]).is_err());
        assert!(BsrRule::from_patterns(1, &["1,1,*"]).is_err());
    }

    #[test]
    fn bf_joins_singletons_first() {
        let mut rng = stream(31, 0);
        let mut p = BsrProcess::new(BsrRule::bohman_frieze(), 50);
        let ev = p.step(f64::INFINITY, &mut rng).unwrap();
        // every vertex is a singleton at the first event
        assert!(ev.first);
        let (u, v) = p.graph().edge(0);
        assert_eq!((u as u32, v as u32), (ev.quad[0], ev.quad[1]));
    }

    #[test]
    fn class_vector_reflects_current_state() {
        let mut rng = stream(32, 0);
        let mut p = BsrProcess::new(BsrRule::bohman_frieze(), 40);
        let mut shadow = UnionFind::new(40);
        while let Some(ev) = p.step(2.0, &mut rng) {
            let both_single = shadow.size_of(ev.quad[0] as usize) == 1
                && shadow.size_of(ev.quad[1] as usize) == 1;
            assert_eq!(ev.first, both_single);
            let (a, b) = if ev.first { (0, 1) } else { (2, 3) };
            shadow.union(ev.quad[a] as usize, ev.quad[b] as usize);
        }
        let d = components(p.graph());
        assert_eq!(d.largest(), p.largest());
        let s2: usize = d.sizes().iter().map(|s| s * s).sum();
        assert!((p.s2() - s2 as f64 / 40.0).abs() < 1e-12);
    }

    #[test]
    fn always_first_edge_count_is_poisson() {
        let n = 100;
        let t = 3.0;
        let mut rng = stream(33, 0);
        let reps = 4000;
        let counts: Vec<f64> = (0..reps)
            .map(|_| bsr_run(&BsrRule::always_first(1), n, t, &mut rng).unwrap().events.len() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / reps as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let lam = n as f64 * t / 2.0;
        assert!((mean - lam).abs() < 5.0 * (lam / reps as f64).sqrt());
        assert!((var / lam - 1.0).abs() < 0.1);
    }

    #[test]
    fn never_first_matches_er_largest_mean() {
        // With F empty each ordered pair receives Poisson(t/n) edges, so the
        // connectivity law is that of gen_er(n, t).
        let n = 400;
        let t = 1.6;
        let mut rng = stream(34, 0);
        let reps = 1000;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for _ in 0..reps {
            a.push(bsr_run(&BsrRule::never_first(1), n, t, &mut rng).unwrap().process.largest() as f64);
            b.push(components(&crate::models::gen_er(n, t, &mut rng).unwrap()).largest() as f64);
        }
        let ks = crate::harness::ks_statistic(&a, &b).unwrap();
        assert!(ks < 0.08, "ks {ks}");
    }
}
