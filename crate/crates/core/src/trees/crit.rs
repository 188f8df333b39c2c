use rand::Rng;

use crate::error::{invalid, Result};
use crate::limits::{default_horizon, sample_parabolic_excursions, DEFAULT_DT};
use crate::metric::MeasuredMetricSpace;

use super::excursion::{midpoints, sample_tilted_excursion, shortcut_identify, ShortcutSpec, DEFAULT_STEPS};
use super::ptree::{SirOptions, SirReport};

/// Discretisation controls for [`sample_crit`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CritOptions {
    /// Horizon of the parabolic Brownian motion.
    pub horizon: Option<f64>,
    /// Euler step of the parabolic Brownian motion.
    pub dt: f64,
    /// Grid steps per tilted excursion.
    pub steps: usize,
    /// Sample points per space.
    pub points: usize,
    pub sir: SirOptions,
}

impl Default for CritOptions {
    fn default() -> Self {
        CritOptions { horizon: None, dt: DEFAULT_DT, steps: DEFAULT_STEPS, points: 256, sir: SirOptions::default() }
    }
}

/// Point-cloud approximation of one limit component.
#[derive(Clone, Debug)]
pub struct CritSample {
    /// Excursion length `γ_i`, also the total mass.
    pub gamma: f64,
    /// Area under the tilted excursion `ẽ_γ` (the shortcut Poisson mean).
    pub area: f64,
    pub shortcuts: ShortcutSpec,
    pub space: MeasuredMetricSpace,
    pub report: Option<SirReport>,
}

/// The `k` largest limit components at parameter `λ`: lengths from the
/// excursions of the parabolic Brownian motion, then for each a tilted
/// excursion `ẽ_γ` (`θ = 1`), the real tree of `2ẽ_γ` and shortcuts from
/// rate-one Poisson points under `ẽ_γ`.
pub fn sample_crit<R: Rng + ?Sized>(lambda: f64, k: usize, opts: &CritOptions, rng: &mut R) -> Result<Vec<CritSample>> {
    if k == 0 {
        return invalid("need k >= 1");
    }
    let horizon = opts.horizon.unwrap_or_else(|| default_horizon(lambda));
    let ex = sample_parabolic_excursions(lambda, horizon, opts.dt, rng)?;
    if ex.lengths.len() < k {
        return invalid(format!("only {} excursions found before the horizon {horizon}", ex.lengths.len()));
    }
    ex.lengths[..k].iter().map(|&gamma| sample_crit_component(gamma, opts, rng)).collect()
}

/// One limit component of mass `gamma`.
pub fn sample_crit_component<R: Rng + ?Sized>(gamma: f64, opts: &CritOptions, rng: &mut R) -> Result<CritSample> {
    if opts.points == 0 {
        return invalid("need at least one sample point");
    }
    let tilted = sample_tilted_excursion(gamma, 1.0, opts.steps, &opts.sir, rng)?;
    let g = tilted.path;
    let glued = shortcut_identify(&g.scaled(2.0), &g, &midpoints(gamma, opts.points), rng)?;
    Ok(CritSample { gamma, area: g.area(), shortcuts: glued.shortcuts, space: glued.space, report: tilted.report })
}
