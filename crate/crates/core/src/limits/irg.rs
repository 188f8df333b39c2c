use crate::error::{invalid, Error, Result};
use crate::models::{IrgWindow, Kernel};

use super::linalg::{dot, identity_minus, mat_vec, max_abs_diff, perron, solve, transpose, vec_mat, Matrix};

pub const POWER_TOL: f64 = 1e-12;
pub const POWER_MAX_ITER: usize = 100_000;
/// `|ρ - 1|` above this flags the kernel as not critical.
pub const CRITICALITY_TOL: f64 = 1e-6;

/// Perron data of the mean matrix and the scaling constants derived from it.
#[derive(Clone, Debug, PartialEq)]
pub struct IrgLimitConstants {
    /// `m_ij = μ(j) κ(i,j)`.
    pub m: Matrix,
    pub rho: f64,
    /// Right eigenvector with `u^t 1 = 1`.
    pub u: Vec<f64>,
    /// Left eigenvector with `v^t u = 1`.
    pub v: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    /// Present when the kernel carries `A` and `b`.
    pub zeta: Option<f64>,
    /// `|ρ - 1| ≤ CRITICALITY_TOL`.
    pub critical: bool,
    /// `‖Mu - ρu‖_∞`.
    pub right_residual: f64,
    /// `‖v^t M - ρ v^t‖_∞`.
    pub left_residual: f64,
}

pub fn irg_constants(kernel: &Kernel) -> Result<IrgLimitConstants> {
    kernel.validate()?;
    let k = kernel.k;
    let m = kernel.mean_matrix();
    let (rho, u) = perron(&m, POWER_TOL, POWER_MAX_ITER)?;
    let (_, mut v) = perron(&transpose(&m), POWER_TOL, POWER_MAX_ITER)?;
    let vu = dot(&v, &u);
    for x in &mut v {
        *x /= vu;
    }
    let scale = |x: &[f64]| x.iter().map(|a| a * rho).collect::<Vec<_>>();
    let right_residual = max_abs_diff(&mat_vec(&m, &u), &scale(&u));
    let left_residual = max_abs_diff(&vec_mat(&v, &m), &scale(&v));
    let v1: f64 = v.iter().sum();
    let mu_u = dot(&kernel.mu, &u);
    let alpha = 1.0 / (v1 * mu_u);
    let beta = (0..k).map(|x| v[x] * u[x] * u[x]).sum::<f64>() / (v1 * mu_u * mu_u);
    let zeta = match (&kernel.a, &kernel.b) {
        (Some(a), Some(b)) => {
            // (A D + κ B) u with D = diag(μ), B = diag(b)
            let w: Vec<f64> = (0..k)
                .map(|i| (0..k).map(|j| (a[i][j] * kernel.mu[j] + kernel.kappa[i][j] * b[j]) * u[j]).sum())
                .collect();
            Some(alpha * dot(&v, &w))
        }
        _ => None,
    };
    Ok(IrgLimitConstants {
        m,
        rho,
        u,
        v,
        alpha,
        beta,
        zeta,
        critical: (rho - 1.0).abs() <= CRITICALITY_TOL,
        right_residual,
        left_residual,
    })
}

/// Total-progeny moments of the multitype Poisson branching process.
#[derive(Clone, Debug, PartialEq)]
pub struct BpExpectations {
    /// `E T0(μ_n) = μ_n^t (I - M_n)^{-1} 1`.
    pub t0: f64,
    /// `E T0(μ_n)^2`.
    pub t0_sq: f64,
    /// `E T1(μ_n) = μ_n^t M_n (I - M_n)^{-2} 1`.
    pub t1: f64,
    /// `E T0(x)` per root type.
    pub t0_by_type: Vec<f64>,
    /// Perron root of `M_n`.
    pub rho: f64,
}

/// Branching-process moments for kernel matrix `kappa_n` and type law
/// `mu_n`, with mean matrix `m_ij = μ_n(j) κ_n(i,j)`.
///
/// The second moment uses `E T0(x)^2 = 1 + 2a_x + a_x^2 + Σ_y m_xy E T0(y)^2`
/// with `a_x = E T0(x) - 1`, i.e. `(I - M) w = (E T0)^2` componentwise.
pub fn bp_expectations(kappa_n: &Matrix, mu_n: &[f64]) -> Result<BpExpectations> {
    let k = mu_n.len();
    if kappa_n.len() != k || kappa_n.iter().any(|r| r.len() != k) {
        return invalid("kernel and type law dimensions differ");
    }
    let m: Matrix = (0..k).map(|i| (0..k).map(|j| mu_n[j] * kappa_n[i][j]).collect()).collect();
    let (rho, _) = perron(&m, POWER_TOL, POWER_MAX_ITER)?;
    if rho >= 1.0 {
        return Err(Error::InvalidInput(format!("branching process is not subcritical: rho = {rho}")));
    }
    let a = identity_minus(&m);
    let ones = vec![1.0; k];
    let e0 = solve(&a, &ones)?;
    let e1 = solve(&a, &e0)?;
    let sq: Vec<f64> = e0.iter().map(|x| x * x).collect();
    let w = solve(&a, &sq)?;
    Ok(BpExpectations {
        t0: dot(mu_n, &e0),
        t0_sq: dot(mu_n, &w),
        t1: dot(mu_n, &mat_vec(&m, &e1)),
        t0_by_type: e0,
        rho,
    })
}

/// Moments at size `n` for the barely subcritical kernel
/// `κ_n^- = κ + A n^{-1/3} - n^{-δ}` and type law `μ_n = μ + b n^{-1/3}`
/// (perturbations only when present in the kernel).
pub fn irg_bp_expectations(kernel: &Kernel, n: usize, delta: f64) -> Result<BpExpectations> {
    let window = IrgWindow { lambda: 0.0, use_perturbation: true, subcritical_delta: Some(delta) };
    let kn = kernel.at_size(n, &window)?;
    let c = (n as f64).powf(-1.0 / 3.0);
    let mu_n: Vec<f64> = match &kernel.b {
        Some(b) => kernel.mu.iter().zip(b).map(|(m, b)| m + b * c).collect(),
        None => kernel.mu.clone(),
    };
    bp_expectations(&kn, &mu_n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_and_two_type_er() {
        let c = irg_constants(&Kernel::new(vec![vec![1.0]], vec![1.0]).unwrap()).unwrap();
        assert_eq!((c.u[0], c.v[0]), (1.0, 1.0));
        assert!((c.alpha - 1.0).abs() < 1e-12 && (c.beta - 1.0).abs() < 1e-12);
        assert!(c.critical && c.zeta.is_none());
        let k2 = Kernel::new(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![0.5, 0.5]).unwrap();
        let c = irg_constants(&k2).unwrap();
        assert!((c.rho - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(&c.u, &[0.5, 0.5]) < 1e-12);
        assert!(max_abs_diff(&c.v, &[1.0, 1.0]) < 1e-12);
        assert!((c.alpha - 1.0).abs() < 1e-12 && (c.beta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_kernel_residuals() {
        // rows scaled so the Perron root is one
        let kappa = vec![vec![0.5, 1.5], vec![1.5, 1.0]];
        let mu = vec![0.3, 0.7];
        let raw = Kernel::new(kappa, mu).unwrap();
        let rho = irg_constants(&raw).unwrap().rho;
        let c = irg_constants(&raw.scaled(1.0 / rho)).unwrap();
        assert!(c.critical);
        assert!(c.right_residual < 1e-10 && c.left_residual < 1e-10);
        assert!((c.u.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((dot(&c.v, &c.u) - 1.0).abs() < 1e-12);
        assert!(!irg_constants(&raw.scaled(2.0 / rho)).unwrap().critical);
    }

    #[test]
    fn geometric_series_oracle() {
        let delta = 0.19;
        let n = 1_000_000;
        let k = Kernel::new(vec![vec![1.0]], vec![1.0]).unwrap();
        let e = irg_bp_expectations(&k, n, delta).unwrap();
        let nd = (n as f64).powf(delta);
        assert!((e.t0 / nd - 1.0).abs() < 1e-9);
        let m = 1.0 - 1.0 / nd;
        assert!((e.t1 - m / (1.0 - m).powi(2)).abs() / e.t1 < 1e-9);
        // Borel-type total progeny: E T^2 = 1/(1-m)^3
        assert!((e.t0_sq - (1.0 - m).powi(-3)).abs() / e.t0_sq < 1e-9);
        assert!(bp_expectations(&vec![vec![1.0]], &[1.0]).is_err());
    }

    #[test]
    fn second_moment_by_series() {
        // compare with a direct fixed-point iteration of the moment recursion
        let kappa = vec![vec![0.4, 0.3], vec![0.2, 0.6]];
        let mu = vec![0.5, 0.5];
        let e = bp_expectations(&kappa, &mu).unwrap();
        let m: Matrix = (0..2).map(|i| (0..2).map(|j| mu[j] * kappa[i][j]).collect()).collect();
        let mut t0 = vec![1.0, 1.0];
        let mut t2 = vec![1.0, 1.0];
        for _ in 0..2000 {
            let a = mat_vec(&m, &t0);
            let b = mat_vec(&m, &t2);
            t0 = a.iter().map(|x| 1.0 + x).collect();
            t2 = (0..2).map(|x| 1.0 + 2.0 * a[x] + a[x] * a[x] + b[x]).collect();
        }
        assert!(max_abs_diff(&t0, &e.t0_by_type) < 1e-10);
        assert!((dot(&mu, &t2) - e.t0_sq).abs() < 1e-9);
    }

    #[test]
    fn limits_of_moments() {
        let delta = 0.18;
        let k = Kernel::new(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![0.5, 0.5])
            .unwrap()
            .with_perturbation(vec![vec![0.3, 0.1], vec![0.1, 0.2]], vec![0.1, -0.1])
            .unwrap();
        let c = irg_constants(&k).unwrap();
        // u = (1/2, 1/2), v = (1, 1), alpha = 1:
        // zeta = v^t (A D + κ B) u = (0.3+0.1+0.1+0.2)/4 + 0
        assert!((c.zeta.unwrap() - 0.175).abs() < 1e-12);
        let n = 1e15 as usize;
        let e = irg_bp_expectations(&k, n, delta).unwrap();
        let nf = n as f64;
        let z = (e.t0 - nf.powf(delta)) / nf.powf(2.0 * delta - 1.0 / 3.0);
        assert!((z - 0.175).abs() < 0.01, "{z}");
        assert!((e.t1 / nf.powf(2.0 * delta) - c.alpha).abs() < 0.05);
    }
}
