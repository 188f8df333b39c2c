use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bernoulli_run;
use crate::error::{invalid, Result};
use crate::graphcore::Graph;

/// Finite-type kernel: a symmetric positive `K×K` matrix and a type law.
/// `A` and `b` are the optional critical-window perturbations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    #[serde(rename = "K")]
    pub k: usize,
    pub kappa: Vec<Vec<f64>>,
    pub mu: Vec<f64>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
}

fn check_square(m: &[Vec<f64>], k: usize, name: &str) -> Result<()> {
    if m.len() != k || m.iter().any(|r| r.len() != k) {
        return invalid(format!("{name} must be {k}x{k}"));
    }
    for i in 0..k {
        for j in 0..k {
            if (m[i][j] - m[j][i]).abs() > 1e-12 * (1.0 + m[i][j].abs()) {
                return invalid(format!("{name} must be symmetric"));
            }
        }
    }
    Ok(())
}

impl Kernel {
    pub fn new(kappa: Vec<Vec<f64>>, mu: Vec<f64>) -> Result<Self> {
        let k = mu.len();
        let kern = Kernel { k, kappa, mu, a: None, b: None };
        kern.validate()?;
        Ok(kern)
    }

    pub fn with_perturbation(mut self, a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        self.a = Some(a);
        self.b = Some(b);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k;
        if k == 0 || self.mu.len() != k {
            return invalid("mu must have K entries");
        }
        check_square(&self.kappa, k, "kappa")?;
        if self.kappa.iter().flatten().any(|&v| !(v > 0.0)) {
            return invalid("kappa entries must be positive");
        }
        if self.mu.iter().any(|&m| !(m > 0.0)) || (self.mu.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return invalid("mu must be a positive probability vector");
        }
        if let Some(a) = &self.a {
            check_square(a, k, "A")?;
        }
        if let Some(b) = &self.b {
            if b.len() != k || b.iter().sum::<f64>().abs() > 1e-9 {
                return invalid("b must have K entries summing to zero");
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let k: Kernel = serde_json::from_str(s)?;
        k.validate()?;
        Ok(k)
    }

    /// Mean matrix `m_ij = μ(j) κ(i,j)`.
    pub fn mean_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.k)
            .map(|i| (0..self.k).map(|j| self.mu[j] * self.kappa[i][j]).collect())
            .collect()
    }

    /// Returns the kernel with `κ` multiplied by `c` (e.g. to make the Perron
    /// root of the mean matrix one).
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for row in &mut out.kappa {
            for v in row {
                *v *= c;
            }
        }
        out
    }

    /// The kernel `κ_n` used at size `n` under `window`.
    pub fn at_size(&self, n: usize, window: &IrgWindow) -> Result<Vec<Vec<f64>>> {
        let nf = n as f64;
        let scale = 1.0 + window.lambda * nf.powf(-1.0 / 3.0);
        let mut out = vec![vec![0.0; self.k]; self.k];
        for i in 0..self.k {
            for j in 0..self.k {
                let mut v = self.kappa[i][j] * scale;
                if window.use_perturbation {
                    if let Some(a) = &self.a {
                        v += a[i][j] * nf.powf(-1.0 / 3.0);
                    }
                }
                if let Some(delta) = window.subcritical_delta {
                    v -= nf.powf(-delta);
                }
                if !(v >= 0.0) {
                    return invalid(format!(
                        "kernel entry ({i},{j}) is negative at n={n}; probability outside [0,1]"
                    ));
                }
                out[i][j] = v;
            }
        }
        Ok(out)
    }
}

/// Critical-window settings for `gen_irg`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IrgWindow {
    /// Multiplies `κ` by `1 + λ n^{-1/3}`.
    pub lambda: f64,
    /// Adds `A n^{-1/3}` when the kernel carries `A`.
    pub use_perturbation: bool,
    /// Subtracts `n^{-δ}` (the barely subcritical kernel `κ_n^-`).
    pub subcritical_delta: Option<f64>,
}

impl IrgWindow {
    pub fn lambda(lambda: f64) -> Self {
        IrgWindow { lambda, ..Default::default() }
    }

    pub fn subcritical(delta: f64) -> Self {
        IrgWindow { subcritical_delta: Some(delta), ..Default::default() }
    }
}

/// iid types drawn from `mu`.
pub fn assign_types_iid<R: Rng + ?Sized>(mu: &[f64], n: usize, rng: &mut R) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (t, &m) in mu.iter().enumerate() {
                acc += m;
                if u < acc {
                    return t;
                }
            }
            mu.len() - 1
        })
        .collect()
}

/// Deterministic assignment with `round(n μ(x))` vertices of each type
/// (largest remainders absorb the rounding), in blocks of increasing type.
pub fn assign_types_rounded(mu: &[f64], n: usize) -> Vec<usize> {
    let raw: Vec<f64> = mu.iter().map(|m| m * n as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let mut rest = n - counts.iter().sum::<usize>();
    let mut by_frac: Vec<usize> = (0..mu.len()).collect();
    by_frac.sort_by(|&a, &b| {
        (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(a.cmp(&b))
    });
    for &t in by_frac.iter().cycle() {
        if rest == 0 {
            break;
        }
        counts[t] += 1;
        rest -= 1;
    }
    counts.iter().enumerate().flat_map(|(t, &c)| std::iter::repeat_n(t, c)).collect()
}

fn check_types(kernel: &Kernel, types: &[usize]) -> Result<()> {
    if let Some(t) = types.iter().find(|&&t| t >= kernel.k) {
        return invalid(format!("type {t} outside [0, {})", kernel.k));
    }
    Ok(())
}

/// Inhomogeneous random graph with `p_ij = 1 - exp(-κ_n(x_i,x_j)/n)`.
/// Pairs are grouped by type pair and sampled by geometric jumps.
pub fn gen_irg<R: Rng + ?Sized>(
    kernel: &Kernel,
    types: &[usize],
    window: &IrgWindow,
    rng: &mut R,
) -> Result<Graph> {
    check_types(kernel, types)?;
    let n = types.len();
    let kn = kernel.at_size(n, window)?;
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); kernel.k];
    for (v, &t) in types.iter().enumerate() {
        groups[t].push(v);
    }
    let mut g = Graph::new(n);
    for a in 0..kernel.k {
        for b in a..kernel.k {
            let p = -(-kn[a][b] / n as f64).exp_m1();
            let (ga, gb) = (&groups[a], &groups[b]);
            if a == b {
                for (i, &u) in ga.iter().enumerate() {
                    bernoulli_run(ga.len() - i - 1, p, rng, |j| g.push_edge(u, ga[i + 1 + j]));
                }
            } else {
                for &u in ga {
                    bernoulli_run(gb.len(), p, rng, |j| g.push_edge(u, gb[j]));
                }
            }
        }
    }
    Ok(g)
}

/// Quadratic-time variant that draws one uniform per vertex pair in the fixed
/// order `(0,1), (0,2), …`. Two calls with equal seeds are coupled pairwise,
/// so a smaller kernel yields a subgraph.
pub fn gen_irg_dense<R: Rng + ?Sized>(
    kernel: &Kernel,
    types: &[usize],
    window: &IrgWindow,
    rng: &mut R,
) -> Result<Graph> {
    check_types(kernel, types)?;
    let n = types.len();
    let kn = kernel.at_size(n, window)?;
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            let p = -(-kn[types[u]][types[v]] / n as f64).exp_m1();
            if rng.random::<f64>() < p {
                g.push_edge(u, v);
            }
        }
    }
    Ok(g)
}
