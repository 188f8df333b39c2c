//! Deterministic limit objects: configuration-model susceptibility
//! trajectories, the Bohman–Frieze ODE, inhomogeneous random graph constants,
//! parabolic Brownian excursions and the multiplicative coalescent.

mod bf;
mod cm;
mod excursions;
mod irg;
pub(crate) mod linalg;

pub use bf::{bf_ode_solve, BfOdeOptions, BfPoint, BfSolution, VForm};
pub use cm::{
    cm_drift_fields, cm_limit_eval, CmCriticalAsymptotics, CmDriftFields, CmLimitParams,
    CmLimitValues,
};
pub use excursions::{
    default_horizon, mult_coalescent, sample_parabolic_excursions, CoalescentState, ExcursionSet,
    DEFAULT_DT,
};
pub use irg::{
    bp_expectations, irg_bp_expectations, irg_constants, BpExpectations, IrgLimitConstants,
    CRITICALITY_TOL,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::components;
    use crate::harness::tv_counts;
    use crate::models::{gen_gxq, WeightedVertexSet};
    use crate::rng::stream;
    use std::collections::BTreeMap;

    /// Canonical set partition of `0..k` from block labels.
    fn canonical(labels: &[usize]) -> Vec<usize> {
        let mut map = BTreeMap::new();
        labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect()
    }

    #[test]
    fn coalescent_matches_gxq_partition_law() {
        let q = 0.3;
        let k = 4;
        let p = 1.0 - (-q as f64).exp();
        // exact law by enumerating all 2^6 edge sets
        let pairs: Vec<(usize, usize)> =
            (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        let mut exact: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for mask in 0u32..1 << pairs.len() {
            let mut uf = crate::graphcore::UnionFind::new(k);
            let mut prob = 1.0;
            for (b, &(i, j)) in pairs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    uf.union(i, j);
                    prob *= p;
                } else {
                    prob *= 1.0 - p;
                }
            }
            let labels: Vec<usize> = (0..k).map(|v| uf.find(v)).collect();
            *exact.entry(canonical(&labels)).or_default() += prob;
        }
        let mut rng = stream(75, 0);
        let reps = 100_000;
        let mut coal: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut graph: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let w = WeightedVertexSet::new(vec![1.0; k]).unwrap();
        for _ in 0..reps {
            let s = mult_coalescent(&vec![1.0; k], q, &mut rng).unwrap();
            *coal.entry(canonical(&s.labels)).or_default() += 1;
            let g = gen_gxq(&w, q, &mut rng).unwrap();
            *graph.entry(canonical(&components(&g).labels)).or_default() += 1;
        }
        assert!(tv_counts(&exact, &coal) < 0.02, "{}", tv_counts(&exact, &coal));
        assert!(tv_counts(&exact, &graph) < 0.02);
    }
}
