//! Finite measured metric spaces: scaling, distortion, the
//! Gromov–Hausdorff–Prokhorov distance and blob expansion.

mod blob;
mod ghp;
mod space;

pub use blob::{
    blob_config_scaling, blob_expand, blob_mean_distances, blob_scaling_factor, BlobConfig,
};
pub use ghp::{coupling_cost, distortion, ghp_bounds, ghp_exact, GhpBounds, GHP_EXACT_CAP};
pub use space::{scl, MeasuredMetricSpace, METRIC_TOL};
