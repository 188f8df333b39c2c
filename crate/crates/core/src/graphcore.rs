//! Graph representation, connectivity and per-component statistics.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Disjoint-set forest with union by size and path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    count: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            count: n,
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Number of disjoint sets.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = self.parent[x] as usize;
        }
        x
    }

    /// Root lookup without path compression.
    pub fn find_const(&self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            x = self.parent[x] as usize;
        }
        x
    }

    /// Size of the set containing `x`.
    pub fn size_of(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }

    /// Merges the sets of `a` and `b`; returns the new root, or `None` if
    /// they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return None;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        self.count -= 1;
        Some(ra)
    }
}

/// Finite multigraph on vertices `0..n`. Self-loops and repeated edges are
/// kept in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::VertexOutOfRange { vertex: w, n: self.n });
            }
        }
        self.edges.push((u as u32, v as u32));
        Ok(())
    }

    /// Unchecked insertion for samplers that generate valid endpoints.
    pub(crate) fn push_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u < self.n && v < self.n);
        self.edges.push((u as u32, v as u32));
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(u, v)| (u as usize, v as usize))
    }

    pub fn edge(&self, i: usize) -> (usize, usize) {
        let (u, v) = self.edges[i];
        (u as usize, v as usize)
    }

    pub fn is_loop(&self, i: usize) -> bool {
        let (u, v) = self.edges[i];
        u == v
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(u, v)| u == v).count()
    }

    /// Degree sequence; a self-loop contributes two to its vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.edges {
            d[u as usize] += 1;
            d[v as usize] += 1;
        }
        d
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::new(self)
    }

    /// Writes the edge-list format: a header `n=<count>` then one `u v` per line.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n={}", self.n)?;
        for &(u, v) in &self.edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = loop {
            match lines.next() {
                None => return Err(Error::Parse("missing header n=<count>".into())),
                Some(line) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break line;
                    }
                }
            }
        };
        let n: usize = header
            .trim()
            .strip_prefix("n=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header '{header}'")))?;
        let mut g = Graph::new(n);
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<usize> {
                s.and_then(|x| x.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("line {}: '{line}'", lineno + 2)))
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            g.add_edge(u, v)?;
        }
        Ok(g)
    }
}

/// Compressed adjacency lists. Self-loops are dropped; repeated edges stay,
/// which does not affect hop distances.
#[derive(Clone, Debug)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    pub fn new(g: &Graph) -> Self {
        let n = g.n();
        let mut deg = vec![0usize; n + 1];
        for &(u, v) in &g.edges {
            if u != v {
                deg[u as usize] += 1;
                deg[v as usize] += 1;
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + deg[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        for &(u, v) in &g.edges {
            if u != v {
                targets[fill[u as usize]] = v;
                fill[u as usize] += 1;
                targets[fill[v as usize]] = u;
                fill[v as usize] += 1;
            }
        }
        Adjacency { offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// BFS from `source` writing hop distances into `dist` (`u32::MAX` marks
    /// unreached). `order` must hold the vertices visited by the previous
    /// call on the same `dist` buffer (or be empty); on return it lists the
    /// vertices reached from `source` in BFS order.
    pub fn bfs_into(&self, source: usize, dist: &mut [u32], order: &mut Vec<u32>) {
        for &v in order.iter() {
            dist[v as usize] = u32::MAX;
        }
        order.clear();
        dist[source] = 0;
        order.push(source as u32);
        let mut head = 0;
        while head < order.len() {
            let u = order[head] as usize;
            head += 1;
            let du = dist[u];
            for &w in self.neighbors(u) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = du + 1;
                    order.push(w);
                }
            }
        }
    }
}

/// Component labels plus the component vertex lists, largest first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentDecomposition {
    /// `labels[v]` indexes into `components`.
    pub labels: Vec<usize>,
    /// Vertex lists (ascending ids), sorted by decreasing size with ties
    /// broken by the smallest contained vertex.
    pub components: Vec<Vec<usize>>,
}

impl ComponentDecomposition {
    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    pub fn largest(&self) -> usize {
        self.components.first().map_or(0, Vec::len)
    }

    /// Builds the decomposition from a union-find over `0..n`.
    pub fn from_union_find(uf: &mut UnionFind) -> Self {
        let n = uf.len();
        let mut root_slot = vec![usize::MAX; n];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for v in 0..n {
            let r = uf.find(v);
            if root_slot[r] == usize::MAX {
                root_slot[r] = comps.len();
                comps.push(Vec::new());
            }
            comps[root_slot[r]].push(v);
        }
        // Vertices are visited in increasing order, so comps[i][0] is the
        // smallest member and the discovery order already breaks ties.
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        let mut labels = vec![0; n];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                labels[v] = i;
            }
        }
        ComponentDecomposition { labels, components: comps }
    }
}

pub fn components(g: &Graph) -> ComponentDecomposition {
    let mut uf = UnionFind::new(g.n());
    for (u, v) in g.edges() {
        uf.union(u, v);
    }
    ComponentDecomposition::from_union_find(&mut uf)
}

/// Hop distances from `source`; `None` for unreachable vertices.
pub fn bfs_distances(g: &Graph, source: usize) -> Result<Vec<Option<u32>>> {
    if source >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: source, n: g.n() });
    }
    let adj = g.adjacency();
    let mut dist = vec![u32::MAX; g.n()];
    let mut order = Vec::new();
    adj.bfs_into(source, &mut dist, &mut order);
    Ok(dist.into_iter().map(|d| (d != u32::MAX).then_some(d)).collect())
}

/// Structural statistics of one connected component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentStats {
    pub size: usize,
    pub edge_count: usize,
    /// `edge_count - size + 1`, counting loops and repeated edges.
    pub surplus: i64,
    pub diameter: u32,
    /// Sum of hop distances over ordered vertex pairs.
    pub distance_sum: u64,
}

/// Edge counts per component of `decomp`, loops and multi-edges included.
pub fn component_edge_counts(g: &Graph, decomp: &ComponentDecomposition) -> Vec<usize> {
    let mut counts = vec![0; decomp.components.len()];
    for (u, _) in g.edges() {
        counts[decomp.labels[u]] += 1;
    }
    counts
}

/// Per-component statistics aligned with `components(g)`; distances by a
/// BFS from every vertex.
pub fn component_stats(g: &Graph) -> (ComponentDecomposition, Vec<ComponentStats>) {
    let decomp = components(g);
    let stats = component_stats_for(g, &decomp);
    (decomp, stats)
}

pub fn component_stats_for(g: &Graph, decomp: &ComponentDecomposition) -> Vec<ComponentStats> {
    let adj = g.adjacency();
    let edge_counts = component_edge_counts(g, decomp);
    let mut dist = vec![u32::MAX; g.n()];
    let mut order = Vec::new();
    decomp
        .components
        .iter()
        .zip(edge_counts)
        .map(|(comp, edge_count)| {
            let mut diameter = 0;
            let mut distance_sum = 0u64;
            if comp.len() > 1 {
                for &s in comp {
                    adj.bfs_into(s, &mut dist, &mut order);
                    for &v in &order {
                        let d = dist[v as usize];
                        diameter = diameter.max(d);
                        distance_sum += d as u64;
                    }
                }
            }
            ComponentStats {
                size: comp.len(),
                edge_count,
                surplus: edge_count as i64 - comp.len() as i64 + 1,
                diameter,
                distance_sum,
            }
        })
        .collect()
}

/// Exact diameter of the component containing `start` by BFS from each of
/// its vertices.
pub fn component_diameter_exact(adj: &Adjacency, comp: &[usize]) -> u32 {
    let mut dist = vec![u32::MAX; adj.n()];
    let mut order = Vec::new();
    let mut diam = 0;
    for &s in comp {
        adj.bfs_into(s, &mut dist, &mut order);
        let far = dist[*order.last().unwrap() as usize];
        diam = diam.max(far);
    }
    diam
}

/// Double-sweep lower bound on the diameter of the component of `start`.
pub fn double_sweep(adj: &Adjacency, start: usize) -> u32 {
    let mut dist = vec![u32::MAX; adj.n()];
    let mut order = Vec::new();
    adj.bfs_into(start, &mut dist, &mut order);
    let far = *order.last().unwrap() as usize;
    adj.bfs_into(far, &mut dist, &mut order);
    dist[*order.last().unwrap() as usize]
}

/// Diameter of a component: exact when it has at most `exact_cap`
/// vertices, otherwise the double-sweep lower bound. The flag is `true`
/// when the value is exact.
pub fn component_diameter(adj: &Adjacency, comp: &[usize], exact_cap: usize) -> (u32, bool) {
    if comp.len() <= exact_cap {
        (component_diameter_exact(adj, comp), true)
    } else {
        (double_sweep(adj, comp[0]), false)
    }
}
