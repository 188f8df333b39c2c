use crate::error::{invalid, Error, Result};

/// Choice of the drift for the distance functional `v`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum VForm {
    /// `v' = -2 x^2 y v + x^2 y^2 / 2 + 1 - x^2`.
    #[default]
    Standard,
    /// `v' = -2 x^4 y v + x^2 y^2 / 2 + 1 - x^2`.
    SquaredX,
}

/// State `(x, y, z, v)` with `y = 1/s2` and `z = s3/s2^3`.
type State = [f64; 4];

fn field(s: &State, form: VForm) -> State {
    let [x, y, z, v] = *s;
    let x2 = x * x;
    let c = match form {
        VForm::Standard => x2,
        VForm::SquaredX => x2 * x2,
    };
    [
        -x2 - (1.0 - x2) * x,
        -x2 * y * y - (1.0 - x2),
        3.0 * x2 * y.powi(3) - 3.0 * x2 * y * z,
        -2.0 * c * y * v + x2 * y * y / 2.0 + 1.0 - x2,
    ]
}

fn rk4(s: &State, h: f64, form: VForm) -> State {
    let add = |a: &State, k: &State, c: f64| -> State { std::array::from_fn(|i| a[i] + c * k[i]) };
    let k1 = field(s, form);
    let k2 = field(&add(s, &k1, h / 2.0), form);
    let k3 = field(&add(s, &k2, h / 2.0), form);
    let k4 = field(&add(s, &k3, h), form);
    std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// One point of the solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BfPoint {
    pub t: f64,
    /// Singleton density.
    pub x: f64,
    pub s2: f64,
    pub s3: f64,
    pub y: f64,
    pub v: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BfSolution {
    pub t_c: f64,
    /// Width of the final bisection bracket for `t_c`.
    pub t_c_bracket: f64,
    /// `(1 - x(t_c)^2)^{-1}`.
    pub alpha: f64,
    /// `lim s3/s2^3 = z(t_c)`.
    pub beta: f64,
    /// `lim v = v(t_c)`.
    pub rho: f64,
    pub trajectory: Vec<BfPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BfOdeOptions {
    /// Per-step local error tolerance for step doubling.
    pub tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub form: VForm,
}

impl Default for BfOdeOptions {
    fn default() -> Self {
        BfOdeOptions { tol: 1e-13, h_init: 1e-3, h_min: 1e-12, form: VForm::Standard }
    }
}

/// Integrates the singleton density, inverse susceptibility, normalised
/// third susceptibility and distance functional of the Bohman–Frieze
/// process from `x = y = z = 1, v = 0`. Uses RK4 with step doubling; `t_c`
/// is the zero of `y`, located by bisection over the final step. Grid points
/// at or beyond `t_c` are rejected.
pub fn bf_ode_solve(grid: &[f64], opts: &BfOdeOptions) -> Result<BfSolution> {
    if grid.iter().any(|t| !(*t >= 0.0)) || grid.windows(2).any(|w| w[1] < w[0]) {
        return invalid("grid must be nonnegative and nondecreasing");
    }
    let form = opts.form;
    let mut s: State = [1.0, 1.0, 1.0, 0.0];
    let mut t = 0.0;
    let mut h = opts.h_init;
    let mut traj = Vec::with_capacity(grid.len());
    let mut gi = 0;
    let point = |t: f64, s: &State| BfPoint {
        t,
        x: s[0],
        s2: 1.0 / s[1],
        s3: s[2] / s[1].powi(3),
        y: s[1],
        v: s[3],
    };
    loop {
        while gi < grid.len() && grid[gi] == t {
            traj.push(point(t, &s));
            gi += 1;
        }
        // do not step over a grid point
        let mut step = h;
        let mut target = None;
        if gi < grid.len() && t + step >= grid[gi] {
            step = grid[gi] - t;
            target = Some(grid[gi]);
        }
        let full = rk4(&s, step, form);
        let half = rk4(&rk4(&s, step / 2.0, form), step / 2.0, form);
        let err = (0..4).map(|i| (full[i] - half[i]).abs()).fold(0.0, f64::max) / 15.0;
        if err > opts.tol {
            h = step / 2.0;
            if step < opts.h_min {
                return Err(Error::NonConvergence(format!("step size collapsed at t = {t}")));
            }
            continue;
        }
        if half[1] <= 0.0 {
            // bisect the step length so that y crosses zero
            let (mut lo, mut hi) = (0.0, step);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let m = rk4(&rk4(&s, mid / 2.0, form), mid / 2.0, form);
                if m[1] > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            let tc = t + 0.5 * (lo + hi);
            if gi < grid.len() {
                return Err(Error::BeyondCritical { t: grid[gi], t_c: tc });
            }
            let e = rk4(&rk4(&s, (lo + hi) / 4.0, form), (lo + hi) / 4.0, form);
            return Ok(BfSolution {
                t_c: tc,
                t_c_bracket: hi - lo,
                alpha: 1.0 / (1.0 - e[0] * e[0]),
                beta: e[2],
                rho: e[3],
                trajectory: traj,
            });
        }
        s = half;
        t = target.unwrap_or(t + step);
        if err < opts.tol / 64.0 {
            h = (2.0 * h).min(0.05);
        }
        if t > 50.0 {
            return Err(Error::NonConvergence("y did not reach zero".into()));
        }
    }
}
