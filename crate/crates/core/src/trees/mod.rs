//! Random trees and the limit components built from them: p-trees and
//! their tilts, connected `G(x,q)` components, Brownian excursions, real
//! trees and shortcut identification.

mod crit;
mod excursion;
mod ptree;

pub use crit::{sample_crit, sample_crit_component, CritOptions, CritSample};
pub use excursion::{
    first_passage, glue_points, midpoints, real_tree_metric, sample_brownian_excursion,
    sample_shortcuts, sample_tilted_excursion, shortcut_identify, tilt_excursion, ExcursionPath,
    ShortcutSpace, ShortcutSpec, TiltedExcursion, DEFAULT_STEPS, GLUE_POINT_CAP,
};
pub use ptree::{
    connected_gxq, connected_gxq_with, enumerate_planar_trees, log_tilt_terms,
    partition_then_connect, permitted_edges, sample_ptree, sample_tilted_ptree, tilt_weight,
    ConnectedSample, PTree, SirOptions, SirReport, TiltMethod, TiltedTree, TiltedTreeTable,
    ENUMERATION_CAP,
};
