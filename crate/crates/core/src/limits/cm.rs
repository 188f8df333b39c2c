use crate::error::{invalid, Error, Result};

/// Degree-law parameters of the configuration model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CmLimitParams {
    /// `μ = E D`.
    pub mu: f64,
    /// `ν = E[D(D-1)] / μ`.
    pub nu: f64,
    /// `β = E[D(D-1)(D-2)]`.
    pub beta: f64,
}

impl CmLimitParams {
    pub fn new(mu: f64, nu: f64, beta: f64) -> Result<Self> {
        if !(mu > 0.0 && nu > 1.0 && beta > 0.0) || !(mu + nu + beta).is_finite() {
            return invalid(format!("need mu > 0, nu > 1, beta > 0; got ({mu}, {nu}, {beta})"));
        }
        Ok(CmLimitParams { mu, nu, beta })
    }

    /// From a degree pmf `p[k] = P(D = k)`.
    pub fn from_pmf(p: &[f64]) -> Result<Self> {
        let total: f64 = p.iter().sum();
        if p.iter().any(|x| !(*x >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return invalid("pmf must be nonnegative and sum to one");
        }
        let mom = |f: &dyn Fn(f64) -> f64| -> f64 {
            p.iter().enumerate().map(|(k, pk)| pk * f(k as f64)).sum()
        };
        let mu = mom(&|k| k);
        let f2 = mom(&|k| k * (k - 1.0));
        let beta = mom(&|k| k * (k - 1.0) * (k - 2.0));
        Self::new(mu, f2 / mu, beta)
    }

    /// Empirical parameters of a degree sequence.
    pub fn from_degrees(d: &[u32]) -> Result<Self> {
        if d.is_empty() {
            return invalid("empty degree sequence");
        }
        let n = d.len() as f64;
        let (mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0);
        for &k in d {
            let k = k as f64;
            s1 += k;
            s2 += k * (k - 1.0);
            s3 += k * (k - 1.0) * (k - 2.0);
        }
        Self::new(s1 / n, s2 / s1, s3 / n)
    }

    /// `t_c = ½ log(ν/(ν-1))`.
    pub fn t_c(&self) -> f64 {
        0.5 * (self.nu / (self.nu - 1.0)).ln()
    }

    /// `t_n = t_c - ½ ν/(ν-1) n^{-δ}`.
    pub fn t_n(&self, n: usize, delta: f64) -> f64 {
        self.t_c() - 0.5 * self.nu / (self.nu - 1.0) * (n as f64).powf(-delta)
    }

    /// Critical percolation probability `1/ν`.
    pub fn p_c(&self) -> f64 {
        1.0 / self.nu
    }

    /// Leading-order limits of `y/(t_c - t)`, `z`, `u` and `v` as `t ↑ t_c`.
    pub fn critical_asymptotics(&self) -> CmCriticalAsymptotics {
        let CmLimitParams { mu, nu, beta } = *self;
        CmCriticalAsymptotics {
            y_slope: 2.0 * nu / (mu * (nu - 1.0)),
            z: beta / (mu.powi(3) * (nu - 1.0).powi(3)),
            u: 1.0 / (nu - 1.0),
            v: nu / (mu * (nu - 1.0).powi(2)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CmCriticalAsymptotics {
    pub y_slope: f64,
    pub z: f64,
    pub u: f64,
    pub v: f64,
}

/// Deterministic susceptibility trajectories at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CmLimitValues {
    pub t: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub g: f64,
    pub d: f64,
    pub s2_star: f64,
    /// `1/s2`.
    pub y: f64,
    /// `s3/s2^3`.
    pub z: f64,
    /// `g/s2`.
    pub u: f64,
    /// `D/s2^2`.
    pub v: f64,
}

/// Closed-form limits of the free-edge susceptibilities for `0 ≤ t < t_c`.
pub fn cm_limit_eval(t: f64, p: &CmLimitParams) -> Result<CmLimitValues> {
    let tc = p.t_c();
    if !(t >= 0.0) || t >= tc {
        return Err(Error::BeyondCritical { t, t_c: tc });
    }
    let CmLimitParams { mu, nu, beta } = *p;
    let e = (2.0 * t).exp();
    let em = (-2.0 * t).exp();
    // den = -ν + (ν-1)e^{2t} < 0 on [0, t_c)
    let den = -nu + (nu - 1.0) * e;
    let s1 = mu * em;
    let s2 = mu * em * (-2.0 * nu + (nu - 1.0) * e) / den;
    let e3 = -4.0 * nu.powi(3) * mu / e
        + 9.0 * mu * nu * nu * (nu - 1.0)
        - 6.0 * mu * nu * (nu - 1.0).powi(2) * e
        + mu * (nu - 1.0).powi(3) * e * e;
    let s3 = (-beta + e3) / den.powi(3);
    let g = -mu / den;
    let d = nu * nu * mu * (1.0 - em) / (den * den);
    let s2_star = 1.0 - mu / (nu - 1.0) - mu / ((nu - 1.0) * den);
    Ok(CmLimitValues {
        t,
        s1,
        s2,
        s3,
        g,
        d,
        s2_star,
        y: 1.0 / s2,
        z: s3 / s2.powi(3),
        u: g / s2,
        v: d / (s2 * s2),
    })
}

/// Drift fields of the susceptibility dynamics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CmDriftFields {
    pub f2_s: f64,
    pub f3_s: f64,
    pub f_g: f64,
    pub f_d: f64,
    pub f2_star: f64,
    pub f_y: f64,
    pub f_v: f64,
}

/// Evaluates every drift field at the given point. `f_v` is the field of
/// `v = D/s2^2` obtained from `f_d` and `f2_s` by the chain rule.
pub fn cm_drift_fields(
    s1: f64,
    s2: f64,
    s3: f64,
    g: f64,
    d: f64,
    y: f64,
    v: f64,
) -> Result<CmDriftFields> {
    if !(s1 > 0.0) {
        return invalid(format!("s1 must be positive, got {s1}"));
    }
    Ok(CmDriftFields {
        f2_s: (2.0 * s2 * s2 + 4.0 * s1 * s1 - 8.0 * s2 * s1) / s1,
        f3_s: s2 / s1 * (6.0 * s3 - 12.0 * s2) + 24.0 * s2 - 12.0 * s3 - 8.0 * s1,
        f_g: (2.0 * g * s2 - 4.0 * g * s1) / s1,
        f_d: (4.0 * d * s2 + 2.0 * s2 * s2 - 8.0 * d * s1 - 4.0 * s2 * s1 + 2.0 * s1 * s1) / s1,
        f2_star: 2.0 * g * g / s1,
        f_y: -(2.0 + 4.0 * s1 * s1 * y * y - 8.0 * s1 * y) / s1,
        f_v: (2.0 + 8.0 * v * s1 - 4.0 * s1 * y + 2.0 * s1 * s1 * y * y - 8.0 * s1 * s1 * v * y)
            / s1,
    })
}
