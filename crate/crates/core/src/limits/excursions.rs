use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::error::{invalid, Result};
use crate::graphcore::UnionFind;

/// Excursions of the reflected parabolic Brownian motion above zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcursionSet {
    /// Lengths in decreasing order.
    pub lengths: Vec<f64>,
    /// Area under each excursion, aligned with `lengths`.
    pub areas: Vec<f64>,
    /// Whether the path was still away from its running minimum at the
    /// horizon (the last excursion is then truncated).
    pub truncated: bool,
}

/// Default horizon `max(10, 4 + 2|λ|)`.
pub fn default_horizon(lambda: f64) -> f64 {
    (4.0 + 2.0 * lambda.abs()).max(10.0)
}

pub const DEFAULT_DT: f64 = 1e-4;

/// Samples `W(t) = B(t) + λt - t²/2` on a grid of step `dt` up to `horizon`
/// (Euler scheme), reflects it at its running minimum and returns the
/// excursions of the reflected path away from zero. Excursions shorter than
/// `10 dt` are dropped as grid noise. Areas use the trapezoid rule.
pub fn sample_parabolic_excursions<R: Rng + ?Sized>(
    lambda: f64,
    horizon: f64,
    dt: f64,
    rng: &mut R,
) -> Result<ExcursionSet> {
    if !(horizon > 0.0 && dt > 0.0 && dt < horizon) || !lambda.is_finite() {
        return invalid("need 0 < dt < horizon and finite lambda");
    }
    let steps = (horizon / dt).ceil() as usize;
    let sd = dt.sqrt();
    let mut w = 0.0f64;
    let mut min = 0.0f64;
    let mut prev_r = 0.0f64;
    let mut start = 0usize;
    let mut area = 0.0;
    let mut out: Vec<(f64, f64)> = Vec::new();
    let min_len = 10.0 * dt;
    for i in 1..=steps {
        let t = (i - 1) as f64 * dt;
        let z: f64 = StandardNormal.sample(rng);
        w += sd * z + (lambda - t) * dt;
        min = min.min(w);
        let r = w - min;
        if r > 0.0 {
            if prev_r == 0.0 {
                start = i - 1;
                area = 0.0;
            }
            area += 0.5 * (prev_r + r) * dt;
        } else if prev_r > 0.0 {
            area += 0.5 * prev_r * dt;
            let len = (i - start) as f64 * dt;
            if len >= min_len {
                out.push((len, area));
            }
        }
        prev_r = r;
    }
    let truncated = prev_r > 0.0;
    if truncated {
        let len = (steps - start) as f64 * dt;
        if len >= min_len {
            out.push((len, area));
        }
    }
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(ExcursionSet {
        lengths: out.iter().map(|e| e.0).collect(),
        areas: out.iter().map(|e| e.1).collect(),
        truncated,
    })
}

/// Multiplicative coalescent state: block masses and the initial blocks
/// each contains.
#[derive(Clone, Debug, PartialEq)]
pub struct CoalescentState {
    pub masses: Vec<f64>,
    /// `labels[i]` is the index in `masses` of the block holding initial
    /// block `i`.
    pub labels: Vec<usize>,
    pub time: f64,
    pub merges: usize,
}

/// Runs the coalescent in which blocks `i, j` merge at rate `x_i x_j` for
/// time `q`, by Gillespie steps: total rate `(S² - Σx²)/2`, pair chosen
/// with probability proportional to `x_i x_j`.
pub fn mult_coalescent<R: Rng + ?Sized>(initial: &[f64], q: f64, rng: &mut R) -> Result<CoalescentState> {
    if initial.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return invalid("block masses must be positive");
    }
    if !(q >= 0.0) {
        return invalid("duration must be nonnegative");
    }
    let k = initial.len();
    let mut uf = UnionFind::new(k);
    // live blocks: (root, mass)
    let mut live: Vec<(usize, f64)> = initial.iter().copied().enumerate().collect();
    let total: f64 = initial.iter().sum();
    let mut sq: f64 = initial.iter().map(|x| x * x).sum();
    let mut t = 0.0;
    let mut merges = 0;
    while live.len() > 1 {
        let rate = 0.5 * (total * total - sq);
        if !(rate > 0.0) {
            break;
        }
        t += Exp::new(rate).unwrap().sample(rng);
        if t > q {
            break;
        }
        let pick = |rng: &mut R, live: &[(usize, f64)]| -> usize {
            let mut u = rng.random::<f64>() * total;
            for (i, &(_, m)) in live.iter().enumerate() {
                u -= m;
                if u < 0.0 {
                    return i;
                }
            }
            live.len() - 1
        };
        let (i, j) = loop {
            let i = pick(rng, &live);
            let j = pick(rng, &live);
            if i != j {
                break (i.min(j), i.max(j));
            }
        };
        let (ri, mi) = live[i];
        let (rj, mj) = live[j];
        let root = uf.union(ri, rj).unwrap();
        sq += 2.0 * mi * mj;
        live[i] = (root, mi + mj);
        live.swap_remove(j);
        merges += 1;
    }
    let masses: Vec<f64> = live.iter().map(|b| b.1).collect();
    let mut index = vec![usize::MAX; k];
    for (i, &(r, _)) in live.iter().enumerate() {
        index[r] = i;
    }
    let labels = (0..k).map(|v| index[uf.find(v)]).collect();
    Ok(CoalescentState { masses, labels, time: q, merges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn excursion_basics() {
        let mut rng = stream(71, 0);
        let e = sample_parabolic_excursions(0.0, 10.0, 1e-3, &mut rng).unwrap();
        assert!(e.lengths.windows(2).all(|w| w[0] >= w[1]));
        assert!(e.lengths.iter().all(|&l| l >= 1e-2 - 1e-12));
        assert!(e.lengths.iter().sum::<f64>() <= 10.0 + 1e-9);
        assert!(e.areas.iter().all(|&a| a > 0.0));
        assert!(sample_parabolic_excursions(0.0, 1.0, 0.0, &mut rng).is_err());
    }

    #[test]
    fn strong_negative_drift_shrinks_excursions() {
        let mut rng = stream(72, 0);
        let mean_max = |lam: f64, rng: &mut _| {
            (0..40)
                .map(|_| {
                    let e = sample_parabolic_excursions(lam, default_horizon(lam), 1e-3, rng).unwrap();
                    e.lengths.first().copied().unwrap_or(0.0)
                })
                .sum::<f64>()
                / 40.0
        };
        let a = mean_max(0.0, &mut rng);
        let b = mean_max(-6.0, &mut rng);
        assert!(b < 0.5 * a, "{a} {b}");
    }

    #[test]
    fn coalescent_pair_merge_probability() {
        let mut rng = stream(73, 0);
        let q = 0.7;
        let reps = 40_000;
        let merged = (0..reps)
            .filter(|_| mult_coalescent(&[1.0, 1.0], q, &mut rng).unwrap().masses.len() == 1)
            .count();
        let p = 1.0 - (-q as f64).exp();
        let f = merged as f64 / reps as f64;
        assert!((f - p).abs() < 4.0 * (p * (1.0 - p) / reps as f64).sqrt());
    }

    #[test]
    fn coalescent_conserves_mass() {
        let mut rng = stream(74, 0);
        let x: Vec<f64> = (1..50).map(|i| 0.01 * i as f64).collect();
        let s = mult_coalescent(&x, 2.0, &mut rng).unwrap();
        let total: f64 = x.iter().sum();
        assert!((s.masses.iter().sum::<f64>() - total).abs() < 1e-12);
        let mut by_label = vec![0.0; s.masses.len()];
        for (i, &l) in s.labels.iter().enumerate() {
            by_label[l] += x[i];
        }
        for (a, b) in by_label.iter().zip(&s.masses) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(s.merges, x.len() - s.masses.len());
    }
}
