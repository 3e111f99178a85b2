//! Free and wired trees along an exhaustion of `Z^d` by nested boxes.
//!
//! Level `r` uses the box `B_r = [-r, r]^d`. The free tree is the minimal
//! spanning tree of `B_r`. The wired tree is the minimal spanning tree of
//! `B_{r+1}` with its surface merged into one vertex, which is exactly `B_r`
//! plus every edge leaving it, with the outside identified to a point.
//! Labels are keyed by lattice coordinates so all levels see the same
//! labeling of `Z^d`.

use std::collections::HashMap;

use serde::Serialize;

use super::{kruskal_mst, wired_mst, ForestMask};
use crate::error::{Error, Result};
use crate::graph::{lattice_ball, EdgeId, BOUNDARY_TAG};
use crate::labeling::Labeling;

#[derive(Clone, Debug)]
pub struct ExhaustionConfig {
    pub dimension: usize,
    /// Increasing radii of the nested boxes.
    pub radii: Vec<usize>,
    pub seed: u64,
    /// Consecutive agreeing levels needed to call an edge stabilized.
    pub window: usize,
}

impl Default for ExhaustionConfig {
    fn default() -> Self {
        Self {
            dimension: 2,
            radii: (2..=8).collect(),
            seed: 0,
            window: 3,
        }
    }
}

/// Membership of the reference edges (those of the smallest box) at one level.
#[derive(Clone, Debug, Serialize)]
pub struct ExhaustionLevel {
    pub radius: usize,
    pub side: usize,
    /// Free tree on this level's own box.
    pub free_tree: ForestMask,
    /// Wired tree restricted to this level's box.
    pub wired_tree: ForestMask,
    pub free: ForestMask,
    pub wired: ForestMask,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Stabilization {
    pub stabilized_in: Vec<EdgeId>,
    pub stabilized_out: Vec<EdgeId>,
    pub unsettled: Vec<EdgeId>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExhaustionReport {
    pub dimension: usize,
    pub window: usize,
    /// Edge keys of the reference box, in its edge order.
    pub reference_keys: Vec<u64>,
    pub levels: Vec<ExhaustionLevel>,
    /// `None` when there are fewer levels than the window.
    pub free: Option<Stabilization>,
    pub wired: Option<Stabilization>,
    /// Reference edges in the free but not the wired tree at the last level.
    pub gap: Vec<EdgeId>,
}

impl ExhaustionReport {
    pub fn inconclusive(&self) -> bool {
        self.free.is_none()
    }
}

fn stabilization(masks: &[&ForestMask], window: usize) -> Option<Stabilization> {
    if window == 0 || masks.len() < window {
        return None;
    }
    let tail = &masks[masks.len() - window..];
    let mut out = Stabilization::default();
    for i in 0..tail[0].host_edge_count() {
        let e = EdgeId(i);
        let first = tail[0].contains(e);
        if tail.iter().all(|m| m.contains(e) == first) {
            if first {
                out.stabilized_in.push(e);
            } else {
                out.stabilized_out.push(e);
            }
        } else {
            out.unsettled.push(e);
        }
    }
    Some(out)
}

pub fn exhaustion_run(config: &ExhaustionConfig) -> Result<ExhaustionReport> {
    if config.radii.is_empty() || config.radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "exhaustion radii must be non-empty and increasing".into(),
        ));
    }
    let reference = lattice_ball(config.dimension, config.radii[0])?;
    let mut levels = Vec::with_capacity(config.radii.len());
    for &r in &config.radii {
        let inner = lattice_ball(config.dimension, r)?;
        let outer = lattice_ball(config.dimension, r + 1)?;
        let inner_labels = Labeling::sample_keyed(&inner.edge_keys, config.seed);
        let outer_labels = Labeling::sample_keyed(&outer.edge_keys, config.seed);
        let free_tree = kruskal_mst(&inner.graph, &inner_labels);
        let surface = outer.graph.tagged(BOUNDARY_TAG).unwrap_or_default().to_vec();
        let wired_outer = wired_mst(&outer.graph, &surface, &outer_labels)?;

        let outer_index: HashMap<u64, EdgeId> = outer
            .edge_keys
            .iter()
            .enumerate()
            .map(|(i, &k)| (k, EdgeId(i)))
            .collect();
        let inner_index: HashMap<u64, EdgeId> = inner
            .edge_keys
            .iter()
            .enumerate()
            .map(|(i, &k)| (k, EdgeId(i)))
            .collect();
        let wired_tree = ForestMask::from_predicate(inner.graph.edge_count(), |e| {
            wired_outer.contains(outer_index[&inner.edge_keys[e.0]])
        });
        let free = ForestMask::from_predicate(reference.graph.edge_count(), |e| {
            free_tree.contains(inner_index[&reference.edge_keys[e.0]])
        });
        let wired = ForestMask::from_predicate(reference.graph.edge_count(), |e| {
            wired_tree.contains(inner_index[&reference.edge_keys[e.0]])
        });
        levels.push(ExhaustionLevel {
            radius: r,
            side: 2 * r + 1,
            free_tree,
            wired_tree,
            free,
            wired,
        });
    }
    let free_masks: Vec<&ForestMask> = levels.iter().map(|l| &l.free).collect();
    let wired_masks: Vec<&ForestMask> = levels.iter().map(|l| &l.wired).collect();
    let last = levels.last().expect("non-empty");
    let gap = last.free.difference(&last.wired).to_vec();
    Ok(ExhaustionReport {
        dimension: config.dimension,
        window: config.window,
        reference_keys: reference.edge_keys.clone(),
        free: stabilization(&free_masks, config.window),
        wired: stabilization(&wired_masks, config.window),
        gap,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::z_free_all;
    use crate::graph::lattice_ball;

    #[test]
    fn path_exhaustion_free_trees_are_whole_paths() {
        let report = exhaustion_run(&ExhaustionConfig {
            dimension: 1,
            radii: vec![2, 3, 4, 5, 6],
            seed: 3,
            window: 3,
        })
        .unwrap();
        for level in &report.levels {
            assert_eq!(level.free_tree.len(), level.free_tree.host_edge_count());
        }
        let free = report.free.unwrap();
        assert_eq!(free.stabilized_in.len(), 4);
        // the wired cycle drops only its largest edge
        for level in &report.levels {
            assert!(level.wired_tree.len() + 1 >= level.wired_tree.host_edge_count());
        }
    }

    #[test]
    fn too_few_levels_is_inconclusive() {
        let report = exhaustion_run(&ExhaustionConfig {
            dimension: 2,
            radii: vec![2, 3],
            seed: 1,
            window: 3,
        })
        .unwrap();
        assert!(report.inconclusive());
        assert!(exhaustion_run(&ExhaustionConfig {
            radii: vec![3, 2],
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn wired_level_contains_its_free_level() {
        let report = exhaustion_run(&ExhaustionConfig {
            dimension: 2,
            radii: vec![2, 3, 4, 5],
            seed: 12,
            window: 2,
        })
        .unwrap();
        for level in &report.levels {
            assert!(level.wired_tree.is_subset(&level.free_tree));
        }
    }

    #[test]
    fn gap_near_the_center_fades_with_the_box() {
        let (mut near, mut far) = (0, 0);
        for seed in 0..40 {
            let report = exhaustion_run(&ExhaustionConfig {
                dimension: 2,
                radii: vec![2, 3, 16],
                seed,
                window: 3,
            })
            .unwrap();
            let gap = |l: &ExhaustionLevel| l.free.difference(&l.wired).len();
            near += gap(&report.levels[1]);
            far += gap(&report.levels[2]);
        }
        let edges = 40 * 40;
        assert!(far < near, "near {near} far {far}");
        assert!(far * 100 < edges, "far {far}");
    }

    #[test]
    fn central_edge_membership_settles() {
        let ball = lattice_ball(2, 0).unwrap();
        assert_eq!(ball.graph.edge_count(), 0);
        let mut settled = 0;
        let seeds = 200;
        for seed in 0..seeds {
            let report = exhaustion_run(&ExhaustionConfig {
                dimension: 2,
                radii: (5..=10).collect(),
                seed,
                window: 3,
            })
            .unwrap();
            let central = EdgeId(0);
            let free = report.free.as_ref().unwrap();
            let wired = report.wired.as_ref().unwrap();
            let stable = |s: &Stabilization| !s.unsettled.contains(&central);
            if stable(free) && stable(wired) {
                settled += 1;
            }
            // reference box is B_5; its Z values must agree with the recorded free tree
            let last = report.levels.last().unwrap();
            let inner = lattice_ball(2, last.radius).unwrap();
            let labels = Labeling::sample_keyed(&inner.edge_keys, seed);
            let z = z_free_all(&inner.graph, &labels);
            for e in inner.graph.edges() {
                assert_eq!(z[e.0].admits(&labels, e), last.free_tree.contains(e));
            }
        }
        assert!(settled * 100 >= seeds * 99, "settled {settled}/{seeds}");
    }
}
