//! Small dense linear algebra for K×K type matrices.

use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<f64>>;

pub fn mat_vec(m: &Matrix, x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

pub fn vec_mat(x: &[f64], m: &Matrix) -> Vec<f64> {
    let k = m.len();
    (0..k).map(|j| (0..k).map(|i| x[i] * m[i][j]).sum()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let k = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for c in 0..k {
        let p = (c..k)
            .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
            .unwrap();
        if m[p][c].abs() < 1e-300 {
            return Err(Error::NonConvergence("singular linear system".into()));
        }
        m.swap(c, p);
        for r in c + 1..k {
            let f = m[r][c] / m[c][c];
            if f != 0.0 {
                for j in c..=k {
                    m[r][j] -= f * m[c][j];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for c in (0..k).rev() {
        let s: f64 = (c + 1..k).map(|j| m[c][j] * x[j]).sum();
        x[c] = (m[c][k] - s) / m[c][c];
    }
    Ok(x)
}

/// `I - m`.
pub fn identity_minus(m: &Matrix) -> Matrix {
    let k = m.len();
    (0..k)
        .map(|i| (0..k).map(|j| f64::from(u8::from(i == j)) - m[i][j]).collect())
        .collect()
}

pub fn transpose(m: &Matrix) -> Matrix {
    let k = m.len();
    (0..k).map(|i| (0..k).map(|j| m[j][i]).collect()).collect()
}

/// Perron root and right eigenvector (normalised to sum one) of a
/// nonnegative irreducible matrix by power iteration. The iteration is run on
/// `m + I`, which has the same Perron vector and is primitive.
pub fn perron(m: &Matrix, tol: f64, max_iter: usize) -> Result<(f64, Vec<f64>)> {
    let k = m.len();
    let mut x = vec![1.0 / k as f64; k];
    for _ in 0..max_iter {
        let mut y = mat_vec(m, &x);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += xi;
        }
        let s: f64 = y.iter().sum();
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::NonConvergence("power iteration degenerated".into()));
        }
        for yi in &mut y {
            *yi /= s;
        }
        let d = max_abs_diff(&x, &y);
        x = y;
        if d < tol {
            let mx = mat_vec(m, &x);
            let rho = dot(&mx, &vec![1.0; k]) / x.iter().sum::<f64>();
            return Ok((rho, x));
        }
    }
    Err(Error::NonConvergence(format!("power iteration did not reach {tol} in {max_iter} steps")))
}
