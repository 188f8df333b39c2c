use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::metric::MeasuredMetricSpace;
use crate::rng::SimRng;

use super::ptree::{sir_select, SirOptions, SirReport};

/// Default number of grid steps per excursion.
pub const DEFAULT_STEPS: usize = 2048;
/// Largest point set handled by [`shortcut_identify`].
pub const GLUE_POINT_CAP: usize = 512;

/// Nonnegative path on a uniform grid of `[0, l]` vanishing at both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcursionPath {
    length: f64,
    values: Vec<f64>,
}

impl ExcursionPath {
    pub fn new(length: f64, values: Vec<f64>) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) || values.len() < 2 {
            return invalid("need a positive length and at least one grid step");
        }
        if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
            return invalid("excursion must vanish at both ends");
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return invalid("excursion values must be finite and nonnegative");
        }
        Ok(ExcursionPath { length, values })
    }

    /// Tent `h(s) = min(s, l - s)` on `steps` grid steps.
    pub fn tent(length: f64, steps: usize) -> Result<Self> {
        let dt = length / steps as f64;
        let mut v: Vec<f64> = (0..=steps).map(|k| (k as f64 * dt).min(length - k as f64 * dt).max(0.0)).collect();
        v[steps] = 0.0;
        Self::new(length, v)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.length / self.steps() as f64
    }

    /// Linear interpolation at `s ∈ [0, l]`.
    pub fn at(&self, s: f64) -> f64 {
        let x = (s / self.dt()).clamp(0.0, self.steps() as f64);
        let k = (x.floor() as usize).min(self.steps() - 1);
        let f = x - k as f64;
        self.values[k] * (1.0 - f) + self.values[k + 1] * f
    }

    /// Trapezoid area, exact for the interpolated path.
    pub fn area(&self) -> f64 {
        let inner: f64 = self.values[1..self.steps()].iter().sum();
        inner * self.dt()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Pointwise multiple `c · h`.
    pub fn scaled(&self, c: f64) -> Self {
        ExcursionPath { length: self.length, values: self.values.iter().map(|v| v * c).collect() }
    }
}

/// Brownian excursion of length `l` on `steps` grid steps.
///
/// The excursion is the norm of a three-dimensional Brownian bridge, so the
/// grid values have exactly the excursion's finite-dimensional laws.
pub fn sample_brownian_excursion<R: Rng + ?Sized>(l: f64, steps: usize, rng: &mut R) -> Result<ExcursionPath> {
    if !(l > 0.0 && l.is_finite()) || steps < 2 {
        return invalid("need l > 0 and at least two steps");
    }
    Ok(ExcursionPath { length: l, values: bessel_bridge(l, steps, rng) })
}

fn bessel_bridge<R: Rng + ?Sized>(l: f64, steps: usize, rng: &mut R) -> Vec<f64> {
    let sd = (l / steps as f64).sqrt();
    let mut sq = vec![0.0; steps + 1];
    let mut walk = vec![0.0; steps + 1];
    for _ in 0..3 {
        for k in 1..=steps {
            let z: f64 = StandardNormal.sample(rng);
            walk[k] = walk[k - 1] + sd * z;
        }
        let end = walk[steps];
        for k in 1..steps {
            let b = walk[k] - end * k as f64 / steps as f64;
            sq[k] += b * b;
        }
    }
    sq.iter().map(|v| v.sqrt()).collect()
}

/// Tilted excursion with its resampling diagnostics.
#[derive(Clone, Debug)]
pub struct TiltedExcursion {
    pub path: ExcursionPath,
    /// Absent when `θ = 0` (no resampling needed).
    pub report: Option<SirReport>,
}

/// Excursion of length `l` from the law tilted by `exp(θ ∫ e)`, by
/// importance resampling of untilted proposals.
pub fn sample_tilted_excursion<R: Rng + ?Sized>(
    l: f64,
    theta: f64,
    steps: usize,
    opts: &SirOptions,
    rng: &mut R,
) -> Result<TiltedExcursion> {
    if !theta.is_finite() {
        return invalid("tilt must be finite");
    }
    if theta == 0.0 {
        return Ok(TiltedExcursion { path: sample_brownian_excursion(l, steps, rng)?, report: None });
    }
    if !(l > 0.0 && l.is_finite()) || steps < 2 {
        return invalid("need l > 0 and at least two steps");
    }
    let propose = |seed: u64| sample_brownian_excursion(l, steps, &mut SimRng::seed_from_u64(seed));
    let (seed, report) = sir_select(opts, rng, |s| Ok(theta * propose(s)?.area()))?;
    Ok(TiltedExcursion { path: propose(seed)?, report: Some(report) })
}

/// Resamples one path from `paths` with weights `exp(θ · area)`.
pub fn tilt_excursion<'a, R: Rng + ?Sized>(
    paths: &'a [ExcursionPath],
    theta: f64,
    rng: &mut R,
) -> Result<&'a ExcursionPath> {
    if paths.is_empty() {
        return invalid("no paths to resample");
    }
    let logw: Vec<f64> = paths.iter().map(|p| theta * p.area()).collect();
    let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|v| (v - top).exp()).collect();
    let mut u = rng.random::<f64>() * w.iter().sum::<f64>();
    for (p, wi) in paths.iter().zip(&w) {
        if u < *wi {
            return Ok(p);
        }
        u -= wi;
    }
    Ok(&paths[paths.len() - 1])
}

fn check_positions(h: &ExcursionPath, points: &[f64]) -> Result<()> {
    if points.iter().any(|s| !(*s >= 0.0 && *s <= h.length)) {
        return invalid("points must lie in [0, l]");
    }
    Ok(())
}

/// Tree distance `h(s) + h(t) - 2 min_{[s,t]} h` of the interpolated path
/// between the given positions, with the given masses.
pub(crate) fn contour_metric(h: &ExcursionPath, points: &[f64], mass: Vec<f64>) -> MeasuredMetricSpace {
    let k = points.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| points[a].total_cmp(&points[b]));
    let hv: Vec<f64> = points.iter().map(|&s| h.at(s)).collect();
    let dt = h.dt();
    // minimum of grid values strictly between consecutive sorted positions
    let gap_min: Vec<f64> = (0..k)
        .map(|r| {
            if r == 0 {
                return f64::INFINITY;
            }
            let (a, b) = (points[order[r - 1]] / dt, points[order[r]] / dt);
            let lo = a.floor() as usize + 1;
            let hi = (b.ceil() as usize).min(h.steps() + 1);
            (lo..hi).filter(|&g| (g as f64) > a && (g as f64) < b).map(|g| h.values[g]).fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut dist = vec![0.0; k * k];
    for r in 0..k {
        let i = order[r];
        let mut m = hv[i];
        for c in r + 1..k {
            let j = order[c];
            m = m.min(gap_min[c]).min(hv[j]);
            let d = (hv[i] + hv[j] - 2.0 * m).max(0.0);
            dist[i * k + j] = d;
            dist[j * k + i] = d;
        }
    }
    MeasuredMetricSpace::from_flat_unchecked(k, dist, mass)
}

/// Real tree coded by `h`, restricted to `points`, each carrying mass
/// `l / k` (the pushforward of Lebesgue measure, discretised).
pub fn real_tree_metric(h: &ExcursionPath, points: &[f64]) -> Result<MeasuredMetricSpace> {
    if points.is_empty() {
        return invalid("need at least one point");
    }
    check_positions(h, points)?;
    let m = h.length / points.len() as f64;
    Ok(contour_metric(h, points, vec![m; points.len()]))
}

/// `k` evenly spaced cell midpoints of `[0, l]`.
pub fn midpoints(l: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| (i as f64 + 0.5) * l / k as f64).collect()
}

/// Poisson points under a ceiling function and the identifications they
/// induce.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortcutSpec {
    /// Points `(x, y)` with `0 ≤ y < g(x)`.
    pub points: Vec<(f64, f64)>,
    /// `(x, r(x,y))` with `r(x,y) = inf{x' ≥ x : g(x') ≤ y}`.
    pub pairs: Vec<(f64, f64)>,
    /// Area under `g`, the Poisson mean.
    pub area: f64,
}

/// `r(x,y) = inf{x' ≥ x : g(x') ≤ y}` for the interpolated `g`.
pub fn first_passage(g: &ExcursionPath, x: f64, y: f64) -> f64 {
    let dt = g.dt();
    let mut k = ((x / dt).floor() as usize).min(g.steps() - 1);
    let mut start = x;
    let mut v0 = g.at(x);
    if v0 <= y {
        return x;
    }
    loop {
        let v1 = g.values[k + 1];
        if v1 <= y {
            let end = (k + 1) as f64 * dt;
            return start + (end - start) * (v0 - y) / (v0 - v1);
        }
        k += 1;
        if k >= g.steps() {
            return g.length;
        }
        start = k as f64 * dt;
        v0 = v1;
    }
}

/// Rate-one Poisson points under `g` and their identification pairs.
pub fn sample_shortcuts<R: Rng + ?Sized>(g: &ExcursionPath, rng: &mut R) -> Result<ShortcutSpec> {
    let area = g.area();
    let count = if area > 0.0 {
        Poisson::new(area).map_err(|e| Error::InvalidInput(e.to_string()))?.sample(rng) as usize
    } else {
        0
    };
    let top = g.max();
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let x = rng.random::<f64>() * g.length;
        let y = rng.random::<f64>() * top;
        if y < g.at(x) {
            points.push((x, y));
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let pairs = points.iter().map(|&(x, y)| (x, first_passage(g, x, y))).collect();
    Ok(ShortcutSpec { points, pairs, area })
}

/// Glues each pair of points with a zero-length edge and closes the metric
/// under shortest paths. Gluing never increases a distance.
pub fn glue_points(space: &MeasuredMetricSpace, pairs: &[(usize, usize)]) -> Result<MeasuredMetricSpace> {
    let n = space.len();
    if n > GLUE_POINT_CAP {
        return Err(Error::SizeCap(format!("gluing needs at most {GLUE_POINT_CAP} points, got {n}")));
    }
    if pairs.iter().any(|&(a, b)| a >= n || b >= n) {
        return invalid("glued point out of range");
    }
    let mut d: Vec<f64> = (0..n * n).map(|k| space.d(k / n, k % n)).collect();
    // each new zero edge (a,b): d(u,v) <- min(d, d(u,a) + d(b,v), d(u,b) + d(a,v))
    for &(a, b) in pairs {
        let ra: Vec<f64> = d[a * n..(a + 1) * n].to_vec();
        let rb: Vec<f64> = d[b * n..(b + 1) * n].to_vec();
        for u in 0..n {
            for v in 0..n {
                let c = (ra[u] + rb[v]).min(rb[u] + ra[v]);
                if c < d[u * n + v] {
                    d[u * n + v] = c;
                }
            }
        }
    }
    Ok(MeasuredMetricSpace::from_flat_unchecked(n, d, space.mass().to_vec()))
}

/// `G(h, g, P)` on a point cloud.
#[derive(Clone, Debug)]
pub struct ShortcutSpace {
    /// The first `points.len()` entries are the requested points; two
    /// massless points per shortcut follow.
    pub space: MeasuredMetricSpace,
    pub shortcuts: ShortcutSpec,
}

/// Samples Poisson points under `g`, adds their endpoints `x` and `r(x,y)`
/// to the point cloud as massless points, builds the tree metric of `h` on
/// the cloud (mass `l / k` per requested point) and glues the endpoints.
pub fn shortcut_identify<R: Rng + ?Sized>(
    h: &ExcursionPath,
    g: &ExcursionPath,
    points: &[f64],
    rng: &mut R,
) -> Result<ShortcutSpace> {
    if (h.length - g.length).abs() > 1e-12 * h.length {
        return invalid("contour and ceiling must share the interval");
    }
    if points.is_empty() {
        return invalid("need at least one point");
    }
    check_positions(h, points)?;
    let shortcuts = sample_shortcuts(g, rng)?;
    let k = points.len();
    let total = k + 2 * shortcuts.pairs.len();
    if total > GLUE_POINT_CAP {
        return Err(Error::SizeCap(format!("{total} points exceed the gluing cap {GLUE_POINT_CAP}")));
    }
    let mut cloud = points.to_vec();
    let mut mass = vec![h.length / k as f64; k];
    let mut glue = Vec::with_capacity(shortcuts.pairs.len());
    for &(x, r) in &shortcuts.pairs {
        glue.push((cloud.len(), cloud.len() + 1));
        cloud.push(x);
        cloud.push(r.min(h.length));
        mass.extend([0.0, 0.0]);
    }
    let tree = contour_metric(h, &cloud, mass);
    Ok(ShortcutSpace { space: glue_points(&tree, &glue)?, shortcuts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::scl;
    use crate::rng::stream;

    #[test]
    fn excursion_shape() {
        let mut rng = stream(111, 0);
        let e = sample_brownian_excursion(2.5, 512, &mut rng).unwrap();
        assert_eq!(e.values()[0], 0.0);
        assert_eq!(e.values()[512], 0.0);
        assert!(e.values()[1..512].iter().all(|v| *v > 0.0));
        assert!((e.dt() - 2.5 / 512.0).abs() < 1e-15);
        assert!(sample_brownian_excursion(0.0, 10, &mut rng).is_err());
    }

    #[test]
    fn mean_area_of_standard_excursion() {
        let mut rng = stream(112, 0);
        let n = 100_000;
        let mean = (0..n).map(|_| sample_brownian_excursion(1.0, DEFAULT_STEPS, &mut rng).unwrap().area()).sum::<f64>()
            / n as f64;
        let exact = (std::f64::consts::PI / 8.0).sqrt();
        assert!((mean / exact - 1.0).abs() < 0.02, "{mean}");
        // second moment 5/12
        let m2 = (0..20_000).map(|_| sample_brownian_excursion(1.0, 512, &mut rng).unwrap().area().powi(2)).sum::<f64>()
            / 20_000.0;
        assert!((m2 / (5.0 / 12.0) - 1.0).abs() < 0.03, "{m2}");
    }

    #[test]
    fn brownian_scaling_of_area() {
        // area of e_l has the law of l^{3/2} times the standard area
        let mut rng = stream(113, 0);
        let n = 20_000;
        let mean = (0..n).map(|_| sample_brownian_excursion(4.0, 512, &mut rng).unwrap().area()).sum::<f64>() / n as f64;
        let exact = 8.0 * (std::f64::consts::PI / 8.0).sqrt();
        assert!((mean / exact - 1.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn tilted_mean_area() {
        // E_θ A = κ1 + θ κ2 + θ² κ3 / 2 + …, with Airy cumulants
        // κ1 = √(π/8), κ2 = 5/12 - π/8
        let mut rng = stream(114, 0);
        let n = 2000;
        let opts = SirOptions::default();
        let mut s = 0.0;
        for _ in 0..n {
            let t = sample_tilted_excursion(1.0, 1.0, 256, &opts, &mut rng).unwrap();
            assert!(t.report.unwrap().ess >= 100.0);
            s += t.path.area();
        }
        let k1 = (std::f64::consts::PI / 8.0).sqrt();
        let k2 = 5.0 / 12.0 - std::f64::consts::PI / 8.0;
        let mean = s / n as f64;
        assert!((mean - (k1 + k2)).abs() < 0.012, "{mean}");
        assert!(mean > k1 + 0.005);
        let plain = sample_tilted_excursion(1.0, 0.0, 64, &opts, &mut rng).unwrap();
        assert!(plain.report.is_none());
    }

    #[test]
    fn resampler_prefers_large_area() {
        let mut rng = stream(115, 0);
        let small = ExcursionPath::tent(1.0, 8).unwrap();
        let big = small.scaled(10.0);
        let paths = vec![small.clone(), big.clone()];
        let hits = (0..1000).filter(|_| tilt_excursion(&paths, 5.0, &mut rng).unwrap() == &big).count();
        assert!(hits > 990);
        let hits0 = (0..10_000).filter(|_| tilt_excursion(&paths, 0.0, &mut rng).unwrap() == &big).count();
        assert!((hits0 as f64 / 10_000.0 - 0.5).abs() < 0.03);
    }

    #[test]
    fn tent_tree_metric() {
        let h = ExcursionPath::tent(2.0, 64).unwrap();
        // l/4 and 3l/4 sit at the same height on the single branch
        let s = real_tree_metric(&h, &[0.5, 1.5, 1.0, 0.5]).unwrap();
        assert!(s.d(0, 1).abs() < 1e-12);
        assert!((s.d(0, 2) - 0.5).abs() < 1e-12);
        assert_eq!(s.d(0, 3), 0.0);
        assert!((s.total_mass() - 2.0).abs() < 1e-12);
        assert!(real_tree_metric(&h, &[2.5]).is_err());
        // two humps of height 1/2 meeting at zero: points on different
        // humps are h(s) + h(t) apart
        let w: Vec<f64> = (0..=8).map(|k| [0.0, 0.25, 0.5, 0.25, 0.0, 0.25, 0.5, 0.25, 0.0][k]).collect();
        let two = ExcursionPath::new(2.0, w).unwrap();
        let s = real_tree_metric(&two, &[0.5, 1.5, 0.25]).unwrap();
        assert!((s.d(0, 1) - 1.0).abs() < 1e-12);
        assert!((s.d(0, 2) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn four_point_condition() {
        let mut rng = stream(116, 0);
        let h = sample_brownian_excursion(1.0, 256, &mut rng).unwrap().scaled(2.0);
        let pts: Vec<f64> = (0..24).map(|_| rng.random::<f64>()).collect();
        let s = real_tree_metric(&h, &pts).unwrap();
        s.validate().unwrap();
        let k = pts.len();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    for d in 0..k {
                        let mut v = [s.d(a, b) + s.d(c, d), s.d(a, c) + s.d(b, d), s.d(a, d) + s.d(b, c)];
                        v.sort_by(f64::total_cmp);
                        assert!(v[2] - v[1] < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn first_passage_on_tent() {
        let g = ExcursionPath::tent(2.0, 8).unwrap();
        assert!((first_passage(&g, 0.5, 0.25) - 1.75).abs() < 1e-12);
        assert!((first_passage(&g, 1.2, 0.1) - 1.9).abs() < 1e-12);
        assert_eq!(first_passage(&g, 0.3, 0.5), 0.3);
    }

    #[test]
    fn gluing() {
        let h = ExcursionPath::tent(2.0, 64).unwrap();
        let s = real_tree_metric(&h, &midpoints(2.0, 16)).unwrap();
        assert_eq!(glue_points(&s, &[]).unwrap(), s);
        let g = glue_points(&s, &[(2, 13)]).unwrap();
        g.validate().unwrap();
        assert_eq!(g.d(2, 13), 0.0);
        for i in 0..16 {
            for j in 0..16 {
                assert!(g.d(i, j) <= s.d(i, j) + 1e-15);
            }
        }
    }

    #[test]
    fn shortcut_counts_are_poisson() {
        let mut rng = stream(117, 0);
        let h = ExcursionPath::tent(1.0, 64).unwrap();
        let g = h.scaled(3.0);
        // area 0.75
        let n = 20_000;
        let mut counts = [0usize; 8];
        for _ in 0..n {
            let s = shortcut_identify(&h.scaled(2.0), &g, &midpoints(1.0, 8), &mut rng).unwrap();
            assert!(s.shortcuts.points.iter().all(|&(x, y)| y < g.at(x)));
            assert!(s.shortcuts.pairs.iter().all(|&(x, r)| r >= x && r <= 1.0));
            assert!((s.space.total_mass() - 1.0).abs() < 1e-12);
            counts[s.shortcuts.points.len().min(7)] += 1;
        }
        let lam: f64 = 0.75;
        let mut chi = 0.0;
        let mut pk = (-lam).exp();
        for (k, &c) in counts.iter().enumerate().take(5) {
            let e = pk * n as f64;
            chi += (c as f64 - e).powi(2) / e;
            pk *= lam / (k + 1) as f64;
        }
        assert!(chi < 20.0, "{chi}");
    }

    #[test]
    fn scaling_the_contour_scales_distances() {
        let h = ExcursionPath::tent(1.0, 32).unwrap();
        let p = midpoints(1.0, 5);
        let a = real_tree_metric(&h.scaled(2.0), &p).unwrap();
        let b = scl(2.0, 1.0, &real_tree_metric(&h, &p).unwrap()).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert!((a.d(i, j) - b.d(i, j)).abs() < 1e-12);
            }
        }
    }
}
