use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const METRIC_TOL: f64 = 1e-9;

/// Finite metric space with a mass on each point.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasuredMetricSpace {
    n: usize,
    /// Row-major `n × n` distances.
    dist: Vec<f64>,
    mass: Vec<f64>,
}

/// Serialized form: the strict upper triangle in row-major order.
#[derive(Serialize, Deserialize)]
struct SpaceJson {
    points: usize,
    dist: Vec<f64>,
    mass: Vec<f64>,
}

impl MeasuredMetricSpace {
    /// Checked constructor from a full distance matrix.
    pub fn new(dist: Vec<Vec<f64>>, mass: Vec<f64>) -> Result<Self> {
        let n = mass.len();
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return invalid("distance matrix must be square and match the mass vector");
        }
        let s = MeasuredMetricSpace { n, dist: dist.into_iter().flatten().collect(), mass };
        s.validate()?;
        Ok(s)
    }

    /// Checked constructor from the strict upper triangle.
    pub fn from_upper(n: usize, upper: &[f64], mass: Vec<f64>) -> Result<Self> {
        if upper.len() != n * n.saturating_sub(1) / 2 || mass.len() != n {
            return invalid("upper triangle or mass vector has the wrong length");
        }
        let mut dist = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                dist[i * n + j] = upper[k];
                dist[j * n + i] = upper[k];
                k += 1;
            }
        }
        let s = MeasuredMetricSpace { n, dist, mass };
        s.validate()?;
        Ok(s)
    }

    /// Builds a space whose metric is known to be valid (e.g. shortest-path
    /// closures).
    pub(crate) fn from_flat_unchecked(n: usize, dist: Vec<f64>, mass: Vec<f64>) -> Self {
        debug_assert_eq!(dist.len(), n * n);
        MeasuredMetricSpace { n, dist, mass }
    }

    /// Single point carrying `mass`.
    pub fn point(mass: f64) -> Self {
        MeasuredMetricSpace { n: 1, dist: vec![0.0], mass: vec![mass] }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.mass.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
            return invalid("masses must be finite and nonnegative");
        }
        for i in 0..n {
            if self.d(i, i) != 0.0 {
                return invalid(format!("d({i},{i}) is not zero"));
            }
            for j in 0..n {
                let d = self.d(i, j);
                if !(d >= 0.0 && d.is_finite()) {
                    return invalid(format!("d({i},{j}) = {d} is not a finite nonnegative number"));
                }
                if (d - self.d(j, i)).abs() > METRIC_TOL {
                    return invalid(format!("d is not symmetric at ({i},{j})"));
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if self.d(i, j) > self.d(i, k) + self.d(k, j) + METRIC_TOL {
                        return invalid(format!("triangle inequality fails at ({i},{k},{j})"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Mean distance between two independent points drawn from the
    /// normalised mass.
    pub fn mean_distance(&self) -> f64 {
        let m = self.total_mass();
        if m == 0.0 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.mass[i] * self.mass[j] * self.d(i, j);
            }
        }
        s / (m * m)
    }

    pub fn to_json(&self) -> String {
        let mut upper = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        for i in 0..self.n {
            for j in i + 1..self.n {
                upper.push(self.d(i, j));
            }
        }
        serde_json::to_string(&SpaceJson { points: self.n, dist: upper, mass: self.mass.clone() })
            .expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: SpaceJson = serde_json::from_str(s)?;
        Self::from_upper(j.points, &j.dist, j.mass)
    }
}

/// `scl(α, β)`: distances multiplied by `α`, masses by `β`.
pub fn scl(alpha: f64, beta: f64, x: &MeasuredMetricSpace) -> Result<MeasuredMetricSpace> {
    if !(alpha > 0.0 && beta > 0.0) || !(alpha * beta).is_finite() {
        return invalid(format!("scale factors must be positive, got ({alpha}, {beta})"));
    }
    Ok(MeasuredMetricSpace {
        n: x.n,
        dist: x.dist.iter().map(|d| d * alpha).collect(),
        mass: x.mass.iter().map(|m| m * beta).collect(),
    })
}

/// Shortest-path closure of a symmetric nonnegative weight matrix
/// (`f64::INFINITY` for absent edges).
#[cfg(test)]
pub(crate) fn floyd_warshall(n: usize, w: &mut [f64]) {
    for k in 0..n {
        for i in 0..n {
            let dik = w[i * n + k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let c = dik + w[k * n + j];
                if c < w[i * n + j] {
                    w[i * n + j] = c;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point(gap: f64) -> MeasuredMetricSpace {
        MeasuredMetricSpace::from_upper(2, &[gap], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(MeasuredMetricSpace::from_upper(3, &[1.0, 5.0, 1.0], vec![1.0; 3]).is_err());
        assert!(MeasuredMetricSpace::from_upper(2, &[1.0], vec![-1.0, 1.0]).is_err());
        assert!(MeasuredMetricSpace::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]], vec![1.0, 1.0]).is_err());
        assert!(MeasuredMetricSpace::from_upper(3, &[1.0, 2.0, 1.0], vec![1.0; 3]).is_ok());
    }

    #[test]
    fn scaling() {
        let x = two_point(1.5);
        assert_eq!(scl(1.0, 1.0, &x).unwrap(), x);
        let y = scl(2.0, 1.0, &x).unwrap();
        assert_eq!(y.d(0, 1), 3.0);
        let a = scl(2.0, 3.0, &scl(0.5, 5.0, &x).unwrap()).unwrap();
        let b = scl(1.0, 15.0, &x).unwrap();
        assert!((a.d(0, 1) - b.d(0, 1)).abs() < 1e-15);
        assert!((a.total_mass() - b.total_mass()).abs() < 1e-12);
        assert!(scl(0.0, 1.0, &x).is_err());
    }

    #[test]
    fn json_round_trip() {
        let x = MeasuredMetricSpace::from_upper(3, &[1.0, 2.0, 1.0], vec![0.2, 0.3, 0.5]).unwrap();
        let s = x.to_json();
        assert!(s.contains("\"points\":3"));
        assert_eq!(MeasuredMetricSpace::from_json(&s).unwrap(), x);
        assert!((x.mean_distance() - 2.0 * (0.2 * 0.3 + 2.0 * 0.2 * 0.5 + 0.3 * 0.5)).abs() < 1e-12);
    }
}
