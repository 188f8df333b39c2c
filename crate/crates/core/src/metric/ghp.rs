use std::collections::HashMap;

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{invalid, Error, Result};

use super::space::MeasuredMetricSpace;

/// Largest `N1 · N2` accepted by [`ghp_exact`].
pub const GHP_EXACT_CAP: usize = 36;

const LEVEL_TOL: f64 = 1e-12;

/// `dis(C)`: the largest `|d1(x1,y1) - d2(x2,y2)|` over pairs of pairs in
/// the correspondence.
pub fn distortion(
    c: &[(usize, usize)],
    x1: &MeasuredMetricSpace,
    x2: &MeasuredMetricSpace,
) -> Result<f64> {
    let mut left = vec![false; x1.len()];
    let mut right = vec![false; x2.len()];
    for &(a, b) in c {
        if a >= x1.len() || b >= x2.len() {
            return invalid(format!("pair ({a},{b}) is out of range"));
        }
        left[a] = true;
        right[b] = true;
    }
    if c.is_empty() || left.iter().any(|v| !v) || right.iter().any(|v| !v) {
        return invalid("not a correspondence: both sides must be covered");
    }
    Ok(dis_unchecked(c, x1, x2))
}

fn dis_unchecked(c: &[(usize, usize)], x1: &MeasuredMetricSpace, x2: &MeasuredMetricSpace) -> f64 {
    let mut d: f64 = 0.0;
    for (i, &(a, b)) in c.iter().enumerate() {
        for &(a2, b2) in &c[i + 1..] {
            d = d.max((x1.d(a, a2) - x2.d(b, b2)).abs());
        }
    }
    d
}

/// `min_π max(D(π; μ1, μ2), π(C^c))` over nonnegative measures `π` on
/// `X1 × X2`, where `D` is the total variation `Σ|μ1 - π1| + Σ|μ2 - π2|`.
/// `in_c[a * n2 + b]` marks the pairs of `C`.
pub fn coupling_cost(
    in_c: &[bool],
    x1: &MeasuredMetricSpace,
    x2: &MeasuredMetricSpace,
) -> Result<f64> {
    let (n1, n2) = (x1.len(), x2.len());
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let inf = f64::INFINITY;
    let t = lp.add_var(1.0, (0.0, inf));
    let pi: Vec<_> = (0..n1 * n2).map(|_| lp.add_var(0.0, (0.0, inf))).collect();
    let r: Vec<_> = (0..n1).map(|_| lp.add_var(0.0, (0.0, inf))).collect();
    let s: Vec<_> = (0..n2).map(|_| lp.add_var(0.0, (0.0, inf))).collect();
    for a in 0..n1 {
        let row: Vec<_> = (0..n2).map(|b| (pi[a * n2 + b], 1.0)).collect();
        let m = x1.mass()[a];
        let mut up = row.clone();
        up.push((r[a], 1.0));
        lp.add_constraint(up, ComparisonOp::Ge, m);
        let mut down: Vec<_> = row.iter().map(|&(v, _)| (v, -1.0)).collect();
        down.push((r[a], 1.0));
        lp.add_constraint(down, ComparisonOp::Ge, -m);
    }
    for b in 0..n2 {
        let col: Vec<_> = (0..n1).map(|a| (pi[a * n2 + b], 1.0)).collect();
        let m = x2.mass()[b];
        let mut up = col.clone();
        up.push((s[b], 1.0));
        lp.add_constraint(up, ComparisonOp::Ge, m);
        let mut down: Vec<_> = col.iter().map(|&(v, _)| (v, -1.0)).collect();
        down.push((s[b], 1.0));
        lp.add_constraint(down, ComparisonOp::Ge, -m);
    }
    let mut disc: Vec<_> = r.iter().chain(&s).map(|&v| (v, -1.0)).collect();
    disc.push((t, 1.0));
    lp.add_constraint(disc, ComparisonOp::Ge, 0.0);
    let mut outside: Vec<_> =
        (0..n1 * n2).filter(|&k| !in_c[k]).map(|k| (pi[k], -1.0)).collect();
    if !outside.is_empty() {
        outside.push((t, 1.0));
        lp.add_constraint(outside, ComparisonOp::Ge, 0.0);
    }
    let sol = lp.solve().map_err(|e| Error::NonConvergence(format!("coupling LP: {e}")))?;
    Ok(sol.objective().max(0.0))
}

/// Exact Gromov–Hausdorff–Prokhorov distance
/// `inf_{C, π} max(½ dis(C), D(π), π(C^c))` for small spaces.
///
/// Only the finitely many values `|d1 - d2|` can be distortions, and for a
/// fixed distortion level enlarging `C` never hurts, so it suffices to scan
/// levels in increasing order and, at each level, the maximal cliques of the
/// pair-compatibility graph that cover both sides.
pub fn ghp_exact(x1: &MeasuredMetricSpace, x2: &MeasuredMetricSpace) -> Result<f64> {
    let (n1, n2) = (x1.len(), x2.len());
    let np = n1 * n2;
    if np == 0 {
        return invalid("spaces must be nonempty");
    }
    if np > GHP_EXACT_CAP {
        return Err(Error::SizeCap(format!(
            "ghp_exact needs N1*N2 <= {GHP_EXACT_CAP}, got {np}; use ghp_bounds"
        )));
    }
    // pairwise |d1 - d2| between pairs (a,b) and (a',b')
    let gap = |p: usize, q: usize| (x1.d(p / n2, q / n2) - x2.d(p % n2, q % n2)).abs();
    let mut levels: Vec<f64> = (0..np).flat_map(|p| (0..np).map(move |q| (p, q))).map(|(p, q)| gap(p, q)).collect();
    levels.push(0.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() <= LEVEL_TOL);

    let mut left_mask = vec![0u64; n1];
    let mut right_mask = vec![0u64; n2];
    for p in 0..np {
        left_mask[p / n2] |= 1 << p;
        right_mask[p % n2] |= 1 << p;
    }
    let covers = |c: u64| left_mask.iter().all(|m| m & c != 0) && right_mask.iter().all(|m| m & c != 0);

    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut best = f64::INFINITY;
    let mut adj = vec![0u64; np];
    for &level in &levels {
        if level / 2.0 >= best {
            break;
        }
        for p in 0..np {
            adj[p] = 0;
            for q in 0..np {
                if p != q && gap(p, q) <= level + LEVEL_TOL {
                    adj[p] |= 1 << q;
                }
            }
        }
        let mut cliques = Vec::new();
        let all = if np == 64 { u64::MAX } else { (1u64 << np) - 1 };
        bron_kerbosch(0, all, 0, &adj, &mut cliques);
        let mut best_here = f64::INFINITY;
        for c in cliques {
            if !covers(c) {
                continue;
            }
            let g = match cache.get(&c) {
                Some(&g) => g,
                None => {
                    let in_c: Vec<bool> = (0..np).map(|p| c >> p & 1 == 1).collect();
                    let g = coupling_cost(&in_c, x1, x2)?;
                    cache.insert(c, g);
                    g
                }
            };
            best_here = best_here.min(g);
        }
        best = best.min(best_here.max(level / 2.0));
    }
    Ok(best)
}

fn bron_kerbosch(r: u64, mut p: u64, mut x: u64, adj: &[u64], out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let pivot = (p | x).trailing_zeros() as usize;
    let mut cand = p & !adj[pivot];
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        bron_kerbosch(r | 1 << v, p & adj[v], x & adj[v], adj, out);
        p &= !(1 << v);
        x |= 1 << v;
    }
}

/// Bracket for the GHP distance of arbitrary finite spaces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhpBounds {
    pub lower: f64,
    pub upper: f64,
    /// Set when the raw lower bound exceeded the upper bound by more than
    /// rounding noise (`1e-9`); the lower bound is clamped either way.
    pub clamped: bool,
}

/// Half the Hausdorff distance between the sets of distance values.
fn distance_set_bound(x1: &MeasuredMetricSpace, x2: &MeasuredMetricSpace) -> f64 {
    let vals = |x: &MeasuredMetricSpace| {
        let mut v: Vec<f64> = (0..x.len()).flat_map(|i| (i..x.len()).map(move |j| (i, j))).map(|(i, j)| x.d(i, j)).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let (a, b) = (vals(x1), vals(x2));
    let one_side = |a: &[f64], b: &[f64]| {
        a.iter()
            .map(|&v| {
                let k = b.partition_point(|&w| w < v);
                let mut d = f64::INFINITY;
                if k < b.len() {
                    d = d.min(b[k] - v);
                }
                if k > 0 {
                    d = d.min(v - b[k - 1]);
                }
                d
            })
            .fold(0.0, f64::max)
    };
    0.5 * one_side(&a, &b).max(one_side(&b, &a))
}

/// Farthest-point traversal order starting at `start`.
fn farthest_order(x: &MeasuredMetricSpace, start: usize) -> Vec<usize> {
    let n = x.len();
    let mut order = vec![start];
    let mut used = vec![false; n];
    used[start] = true;
    let mut near: Vec<f64> = (0..n).map(|i| x.d(start, i)).collect();
    while order.len() < n {
        let v = (0..n).filter(|&i| !used[i]).max_by(|&a, &b| near[a].total_cmp(&near[b])).unwrap();
        used[v] = true;
        order.push(v);
        for i in 0..n {
            near[i] = near[i].min(x.d(v, i));
        }
    }
    order
}

/// Greedy map `X → Y`: points in farthest-first order from `sx` are sent to
/// the target minimising the distortion against points already placed.
fn greedy_map(x: &MeasuredMetricSpace, y: &MeasuredMetricSpace, sx: usize, sy: usize) -> Vec<usize> {
    let mut f = vec![usize::MAX; x.len()];
    let order = farthest_order(x, sx);
    f[sx] = sy;
    for &v in &order[1..] {
        let mut best = (f64::INFINITY, 0);
        for t in 0..y.len() {
            let mut d: f64 = 0.0;
            for &u in &order {
                if f[u] == usize::MAX {
                    continue;
                }
                d = d.max((x.d(v, u) - y.d(t, f[u])).abs());
            }
            if d < best.0 {
                best = (d, t);
            }
        }
        f[v] = best.1;
    }
    f
}

/// Upper bound on the coupling cost of `C` from an explicit feasible
/// measure: a greedy transport restricted to `C`, with the leftover mass
/// counted as discrepancy.
fn greedy_coupling_cost(in_c: &[bool], x1: &MeasuredMetricSpace, x2: &MeasuredMetricSpace) -> f64 {
    let n2 = x2.len();
    let mut r1 = x1.mass().to_vec();
    let mut r2 = x2.mass().to_vec();
    for a in 0..x1.len() {
        for b in 0..n2 {
            if in_c[a * n2 + b] {
                let m = r1[a].min(r2[b]);
                r1[a] -= m;
                r2[b] -= m;
            }
        }
    }
    r1.iter().sum::<f64>() + r2.iter().sum::<f64>()
}

/// Lower and upper bounds on the GHP distance.
///
/// Lower: the larger of `|m1 - m2|` (the discrepancy of any `π` is at least
/// the mass difference) and half the Hausdorff distance between the sets of
/// distance values (any correspondence of distortion `δ` matches every
/// distance value within `δ`). Upper: the best of the full product
/// correspondence and greedy farthest-point correspondences from several
/// starting pairs, each with its optimal (LP) or greedy coupling.
pub fn ghp_bounds(x1: &MeasuredMetricSpace, x2: &MeasuredMetricSpace) -> Result<GhpBounds> {
    let (n1, n2) = (x1.len(), x2.len());
    if n1 == 0 || n2 == 0 {
        return invalid("spaces must be nonempty");
    }
    let (m1, m2) = (x1.total_mass(), x2.total_mass());
    let lower = (m1 - m2).abs().max(distance_set_bound(x1, x2));
    // full product: dis = max diameter, coupling cost = |m1 - m2|
    let mut upper = (0.5 * x1.diameter().max(x2.diameter())).max((m1 - m2).abs());
    let starts1: Vec<usize> = farthest_order(x1, 0).into_iter().take(4).collect();
    let starts2: Vec<usize> = farthest_order(x2, 0).into_iter().take(4).collect();
    let use_lp = n1 * n2 <= 2500;
    for &a in &starts1 {
        for &b in &starts2 {
            let f = greedy_map(x1, x2, a, b);
            let g = greedy_map(x2, x1, b, a);
            let mut in_c = vec![false; n1 * n2];
            for (i, &j) in f.iter().enumerate() {
                in_c[i * n2 + j] = true;
            }
            for (j, &i) in g.iter().enumerate() {
                in_c[i * n2 + j] = true;
            }
            let c: Vec<(usize, usize)> =
                (0..n1 * n2).filter(|&k| in_c[k]).map(|k| (k / n2, k % n2)).collect();
            let half_dis = 0.5 * dis_unchecked(&c, x1, x2);
            if half_dis >= upper {
                continue;
            }
            let cost = if use_lp {
                coupling_cost(&in_c, x1, x2)?
            } else {
                greedy_coupling_cost(&in_c, x1, x2)
            };
            upper = upper.min(half_dis.max(cost));
        }
    }
    let clamped = lower > upper + 1e-9;
    Ok(GhpBounds { lower: lower.min(upper), upper, clamped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::scl;
    use crate::rng::stream;
    use rand::Rng;

    fn random_space<R: Rng>(n: usize, rng: &mut R) -> MeasuredMetricSpace {
        // shortest-path metric of a random complete weighted graph
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.2 + rng.random::<f64>();
                w[i * n + j] = v;
                w[j * n + i] = v;
            }
        }
        super::super::space::floyd_warshall(n, &mut w);
        let mass: Vec<f64> = (0..n).map(|_| rng.random::<f64>() / n as f64 * 2.0).collect();
        MeasuredMetricSpace::from_flat_unchecked(n, w, mass)
    }

    #[test]
    fn distortion_examples() {
        let a = MeasuredMetricSpace::from_upper(2, &[1.0], vec![1.0, 1.0]).unwrap();
        let b = MeasuredMetricSpace::from_upper(2, &[2.0], vec![1.0, 1.0]).unwrap();
        let full = [(0, 0), (0, 1), (1, 0), (1, 1)];
        assert_eq!(distortion(&full, &a, &b).unwrap(), 2.0);
        assert_eq!(distortion(&[(0, 0), (1, 1)], &a, &b).unwrap(), 1.0);
        assert_eq!(distortion(&[(0, 0), (1, 1)], &a, &a).unwrap(), 0.0);
        assert!(distortion(&[(0, 0)], &a, &b).is_err());
    }

    #[test]
    fn exact_examples() {
        let x = MeasuredMetricSpace::from_upper(3, &[1.0, 2.0, 1.5], vec![0.2, 0.3, 0.5]).unwrap();
        assert!(ghp_exact(&x, &x).unwrap() < 1e-9);
        let p = MeasuredMetricSpace::point(1.0);
        assert!(ghp_exact(&p, &p).unwrap() < 1e-12);
        let two = MeasuredMetricSpace::from_upper(2, &[1.0], vec![0.5, 0.5]).unwrap();
        assert!((ghp_exact(&p, &two).unwrap() - 0.5).abs() < 1e-9);
        // mass mismatch only
        let q = MeasuredMetricSpace::point(0.7);
        assert!((ghp_exact(&p, &q).unwrap() - 0.3).abs() < 1e-9);
        let big = MeasuredMetricSpace::from_upper(7, &vec![1.0; 21], vec![1.0; 7]).unwrap();
        assert!(matches!(ghp_exact(&big, &big), Err(Error::SizeCap(_))));
    }

    #[test]
    fn lower_bound_counterexample_to_wasserstein() {
        // masses (1, 0) vs (1, eps) at distance L: d_GHP <= eps
        let eps = 0.01;
        let a = MeasuredMetricSpace::from_upper(2, &[5.0], vec![1.0, 0.0]).unwrap();
        let b = MeasuredMetricSpace::from_upper(2, &[5.0], vec![1.0, eps]).unwrap();
        let v = ghp_exact(&a, &b).unwrap();
        assert!(v <= eps + 1e-9);
        let bnd = ghp_bounds(&a, &b).unwrap();
        assert!(bnd.lower <= v + 1e-9 && v <= bnd.upper + 1e-9);
    }

    #[test]
    fn bounds_bracket_exact() {
        let mut rng = stream(81, 0);
        for _ in 0..200 {
            let n1 = rng.random_range(1..=6);
            let n2 = rng.random_range(1..=(36 / n1).min(6));
            let a = random_space(n1, &mut rng);
            let b = random_space(n2, &mut rng);
            let v = ghp_exact(&a, &b).unwrap();
            let bnd = ghp_bounds(&a, &b).unwrap();
            assert!(!bnd.clamped, "{bnd:?} exact {v} {a:?} {b:?}");
            assert!(bnd.lower <= v + 1e-7, "{} > {v}", bnd.lower);
            assert!(v <= bnd.upper + 1e-7, "{v} > {}", bnd.upper);
        }
        let x = random_space(5, &mut rng);
        let b = ghp_bounds(&x, &x).unwrap();
        assert!(b.lower == 0.0 && b.upper < 1e-9);
    }

    #[test]
    fn pseudometric_properties() {
        let mut rng = stream(82, 0);
        for _ in 0..100 {
            let n: Vec<usize> = (0..3).map(|_| rng.random_range(1..=5)).collect();
            let s: Vec<_> = n.iter().map(|&k| random_space(k, &mut rng)).collect();
            let (ab, ba) = (ghp_exact(&s[0], &s[1]).unwrap(), ghp_exact(&s[1], &s[0]).unwrap());
            assert!((ab - ba).abs() < 1e-9);
            let bc = ghp_exact(&s[1], &s[2]).unwrap();
            let ac = ghp_exact(&s[0], &s[2]).unwrap();
            assert!(ac <= ab + bc + 1e-6);
        }
    }

    #[test]
    fn scaling_equal_masses() {
        // two-point spaces with equal masses: the optimum uses the identity
        // correspondence, so the value scales linearly in the distances
        let a = MeasuredMetricSpace::from_upper(2, &[1.0], vec![0.5, 0.5]).unwrap();
        let b = MeasuredMetricSpace::from_upper(2, &[1.4], vec![0.5, 0.5]).unwrap();
        let v = ghp_exact(&a, &b).unwrap();
        assert!((v - 0.2).abs() < 1e-9);
        let v2 = ghp_exact(&scl(2.0, 1.0, &a).unwrap(), &scl(2.0, 1.0, &b).unwrap()).unwrap();
        assert!((v2 - 0.4).abs() < 1e-9);
    }

    #[test]
    fn scaled_copy_lower_bound() {
        let mut rng = stream(83, 0);
        for _ in 0..20 {
            let x = random_space(5, &mut rng);
            let y = scl(2.0, 1.0, &x).unwrap();
            let b = ghp_bounds(&y, &x).unwrap();
            // diameters differ by diam(X): half the Hausdorff gap is at least diam/2
            assert!(b.lower >= 0.5 * x.diameter() - 1e-12);
            assert!(b.lower >= 0.25 * x.mean_distance());
        }
    }
}
