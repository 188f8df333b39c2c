//! Estimators and distributional distances.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Linear-interpolation quantile of the sample (type 7).
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F1 - F2|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return invalid("KS needs two nonempty samples");
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Total variation `½ Σ |p - q|` of aligned probability vectors.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.is_empty() || p.len() != q.len() {
        return invalid("pmfs must be nonempty and aligned");
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Total variation between an exact law and the empirical law of
/// `counts`, over the union of their supports.
pub fn tv_counts<K: Ord + Clone>(exact: &BTreeMap<K, f64>, counts: &BTreeMap<K, usize>) -> f64 {
    let total: usize = counts.values().sum();
    let mut keys: Vec<&K> = exact.keys().collect();
    keys.extend(counts.keys());
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| {
            let p = exact.get(k).copied().unwrap_or(0.0);
            let q = counts.get(k).copied().unwrap_or(0) as f64 / total as f64;
            (p - q).abs()
        })
        .sum::<f64>()
}

/// Total variation between two empirical laws given as counts.
pub fn tv_two_counts<K: Ord + Clone>(a: &BTreeMap<K, usize>, b: &BTreeMap<K, usize>) -> f64 {
    let ta: usize = a.values().sum();
    let pa: BTreeMap<K, f64> = a.iter().map(|(k, &c)| (k.clone(), c as f64 / ta as f64)).collect();
    tv_counts(&pa, b)
}

/// Least-squares slope of `log y` on `log n` with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
}

/// Fits `statistic ≈ c n^slope` by least squares on the log–log pairs.
/// Repeated `n` values are first reduced to their median.
pub fn fit_exponent(pairs: &[(f64, f64)]) -> Result<ExponentFit> {
    let mut groups: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for &(n, y) in pairs {
        if !(n > 0.0 && y > 0.0) {
            return invalid("fit_exponent needs positive n and statistic");
        }
        groups.entry(n.to_bits()).or_default().push(y);
    }
    if groups.len() < 3 {
        return invalid("fit_exponent needs at least three distinct n");
    }
    let pts: Vec<(f64, f64)> =
        groups.iter().map(|(k, ys)| (f64::from_bits(*k).ln(), median(ys).ln())).collect();
    let m = pts.len() as f64;
    let xb = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let yb = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xb).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xb) * (p.1 - yb)).sum();
    let slope = sxy / sxx;
    let intercept = yb - slope * xb;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (rss / (m - 2.0) / sxx).sqrt();
    Ok(ExponentFit { slope, stderr, intercept })
}
