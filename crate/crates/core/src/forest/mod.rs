//! Minimal spanning trees and their free and wired forest approximations.

mod exhaustion;
mod mask;
mod z;

pub use exhaustion::{exhaustion_run, ExhaustionConfig, ExhaustionLevel, ExhaustionReport, Stabilization};
pub use mask::ForestMask;
pub use z::{
    z_free, z_free_all, z_free_cut, z_free_cut_constructive, z_free_paths, z_wired, z_wired_all, ZValue,
    CUT_ENUMERATION_LIMIT, PATH_ENUMERATION_LIMIT,
};

use petgraph::unionfind::UnionFind;

use crate::error::Result;
use crate::graph::{MultiGraph, VertexId, WiredQuotient};
use crate::labeling::Labeling;

/// Kruskal's algorithm under the label order. On a disconnected graph the
/// result is the minimal spanning forest of the components; loops are never
/// included.
pub fn kruskal_mst(graph: &MultiGraph, labels: &Labeling) -> ForestMask {
    let mut uf = UnionFind::<usize>::new(graph.vertex_count());
    let mut tree = ForestMask::empty(graph.edge_count());
    let mut needed = graph.vertex_count().saturating_sub(1);
    for &e in labels.order().sorted() {
        if needed == 0 {
            break;
        }
        let (u, v) = graph.endpoints(e);
        if uf.union(u.0, v.0) {
            tree.insert(e);
            needed -= 1;
        }
    }
    tree
}

/// Keeps `e` iff its endpoints cannot be joined using only edges strictly
/// smaller than `e`, decided by a separate search for every edge.
pub fn criterion_tree(graph: &MultiGraph, labels: &Labeling) -> ForestMask {
    ForestMask::from_predicate(graph.edge_count(), |e| {
        let (u, v) = graph.endpoints(e);
        if u == v {
            return false;
        }
        let reach = graph.reachable(u, |f| labels.less(f, e));
        !reach[v.0]
    })
}

/// Minimal spanning forest of the wired quotient, in original edge ids.
pub fn wired_mst(graph: &MultiGraph, boundary: &[VertexId], labels: &Labeling) -> Result<ForestMask> {
    let quotient = graph.wired_quotient(boundary)?;
    Ok(wired_mst_in(graph, &quotient, labels))
}

pub(crate) fn wired_mst_in(graph: &MultiGraph, quotient: &WiredQuotient, labels: &Labeling) -> ForestMask {
    let q_labels = labels.pullback(&quotient.original_edges);
    let q_tree = kruskal_mst(&quotient.graph, &q_labels);
    ForestMask::from_edges(graph.edge_count(), q_tree.iter().map(|e| quotient.original_edge(e)))
}

/// Finite proxy of the event that the endpoints of `e` lie in distinct
/// infinite clusters of the edges below `e`: distinct clusters of
/// `(G - e)[U(e)]`, both touching the boundary.
pub fn forest_gap_event(graph: &MultiGraph, boundary: &[VertexId], labels: &Labeling, e: crate::graph::EdgeId) -> bool {
    if boundary.is_empty() {
        return false;
    }
    let (x, y) = graph.endpoints(e);
    let below = |f| f != e && labels.less(f, e);
    let from_x = graph.reachable(x, below);
    if from_x[y.0] {
        return false;
    }
    let from_y = graph.reachable(y, below);
    boundary.iter().any(|b| from_x[b.0]) && boundary.iter().any(|b| from_y[b.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{grid_box, random_connected_multigraph, EdgeId, GridTopology, BOUNDARY_TAG};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labeled(n: usize, edges: &[(usize, usize)], values: &[f64]) -> (MultiGraph, Labeling) {
        (
            MultiGraph::new(n, edges).unwrap(),
            Labeling::from_floats(values.to_vec()).unwrap(),
        )
    }

    #[test]
    fn kruskal_examples() {
        let (g, u) = labeled(3, &[(0, 1), (1, 2), (2, 0)], &[0.1, 0.2, 0.3]);
        assert_eq!(kruskal_mst(&g, &u).to_vec(), vec![EdgeId(0), EdgeId(1)]);
        assert_eq!(criterion_tree(&g, &u), kruskal_mst(&g, &u));

        let (g, u) = labeled(4, &[(0, 1), (1, 2), (1, 3)], &[0.9, 0.5, 0.1]);
        assert_eq!(kruskal_mst(&g, &u).len(), 3);

        let (g, u) = labeled(2, &[(0, 1), (0, 1)], &[0.4, 0.6]);
        assert_eq!(kruskal_mst(&g, &u).to_vec(), vec![EdgeId(0)]);

        let (g, u) = labeled(2, &[(0, 0), (0, 1)], &[0.0, 0.5]);
        assert_eq!(criterion_tree(&g, &u).to_vec(), vec![EdgeId(1)]);
        assert_eq!(kruskal_mst(&g, &u).to_vec(), vec![EdgeId(1)]);
    }

    #[test]
    fn disconnected_graph_gives_spanning_forest() {
        let (g, u) = labeled(5, &[(0, 1), (1, 2), (0, 2), (3, 4)], &[0.5, 0.2, 0.1, 0.7]);
        let t = kruskal_mst(&g, &u);
        assert_eq!(t.len(), 3);
        assert!(t.is_spanning_forest(&g));
        assert!(!t.is_spanning_tree(&g));
    }

    #[test]
    fn kruskal_matches_criterion_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..300 {
            let n = rng.random_range(1..7);
            let m = rng.random_range(n - 1..=12);
            let g = random_connected_multigraph(&mut rng, n, m).unwrap();
            let u = Labeling::sample(&g, trial);
            let t = kruskal_mst(&g, &u);
            assert_eq!(t, criterion_tree(&g, &u));
            assert_eq!(t.len(), n - 1);
            assert!(t.is_spanning_tree(&g));
        }
    }

    #[test]
    fn cut_and_cycle_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..100 {
            let n = rng.random_range(2..7);
            let g = random_connected_multigraph(&mut rng, n, n + 3).unwrap();
            let u = Labeling::sample(&g, trial);
            let t = kruskal_mst(&g, &u);
            for mask in 1..(1u32 << n) - 1 {
                let side: Vec<VertexId> = (0..n).filter(|i| mask >> i & 1 == 1).map(VertexId).collect();
                let cut = g.edge_cut(&side);
                if let Some(min) = u.order().min_of(cut) {
                    assert!(t.contains(min));
                }
            }
            // the largest edge of each fundamental cycle stays out
            for e in g.edges().filter(|&e| !t.contains(e) && !g.is_loop(e)) {
                let (a, b) = g.endpoints(e);
                let reach = g.reachable(a, |f| t.contains(f) && u.less(f, e));
                assert!(reach[b.0]);
            }
        }
    }

    #[test]
    fn wired_examples() {
        let g = MultiGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let u = Labeling::from_floats(vec![0.3, 0.6]).unwrap();
        let w = wired_mst(&g, &[VertexId(0), VertexId(2)], &u).unwrap();
        assert_eq!(w.to_vec(), vec![EdgeId(0)]);

        let b = grid_box(2, 5, GridTopology::Free).unwrap();
        let u = Labeling::sample(&b, 8);
        assert_eq!(wired_mst(&b, &[VertexId(12)], &u).unwrap(), kruskal_mst(&b, &u));
    }

    #[test]
    fn wired_forest_is_inside_free_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..1000u64 {
            let n = rng.random_range(2..8);
            let m = rng.random_range(n - 1..n + 6);
            let g = random_connected_multigraph(&mut rng, n, m).unwrap();
            let boundary: Vec<VertexId> = g.vertices().filter(|_| rng.random_bool(0.4)).collect();
            if boundary.is_empty() {
                continue;
            }
            let u = Labeling::sample(&g, trial);
            let w = wired_mst(&g, &boundary, &u).unwrap();
            assert!(w.is_subset(&kruskal_mst(&g, &u)));
            assert!(w.is_forest(&g));
            // every wired component touches the boundary unless it spans
            let part = g.components_of(w.iter());
            if part.count() > 1 {
                for class in part.classes() {
                    assert!(class.iter().any(|v| boundary.contains(v)));
                }
            }
        }
    }

    #[test]
    fn gap_event_matches_forest_difference() {
        for seed in 0..500u64 {
            let side = 3 + (seed % 4) as usize;
            let g = grid_box(2, side, GridTopology::Free).unwrap();
            let boundary = g.tagged(BOUNDARY_TAG).unwrap().to_vec();
            let u = Labeling::sample(&g, seed);
            let gap = kruskal_mst(&g, &u).difference(&wired_mst(&g, &boundary, &u).unwrap());
            for e in g.edges() {
                assert_eq!(forest_gap_event(&g, &boundary, &u, e), gap.contains(e));
            }
        }
        let (g, u) = labeled(3, &[(0, 1), (1, 2)], &[0.1, 0.9]);
        assert!(forest_gap_event(&g, &[VertexId(0), VertexId(2)], &u, EdgeId(1)));
        assert!(!forest_gap_event(&g, &[], &u, EdgeId(1)));
    }

    #[test]
    fn domination_coupling() {
        // T_G restricted to a connected subgraph H sits inside T_H under shared labels.
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for trial in 0..300u64 {
            let n = rng.random_range(2..8);
            let m = rng.random_range(n - 1..n + 6);
            let g = random_connected_multigraph(&mut rng, n, m).unwrap();
            let u = Labeling::sample(&g, trial);
            let kept: Vec<EdgeId> = g.edges().filter(|_| rng.random_bool(0.7)).collect();
            let sub = MultiGraph::new(
                n,
                &kept
                    .iter()
                    .map(|&e| (g.endpoints(e).0 .0, g.endpoints(e).1 .0))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let part = sub.components_of(sub.edges());
            let root = part.find(VertexId(0));
            let h_edges: Vec<EdgeId> = (0..kept.len())
                .filter(|&i| part.find(sub.endpoints(EdgeId(i)).0) == root)
                .map(|i| kept[i])
                .collect();
            let h_graph = MultiGraph::new(
                n,
                &h_edges
                    .iter()
                    .map(|&e| (g.endpoints(e).0 .0, g.endpoints(e).1 .0))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let t_h = kruskal_mst(&h_graph, &u.pullback(&h_edges));
            let t_g = kruskal_mst(&g, &u);
            for (i, &e) in h_edges.iter().enumerate() {
                if t_g.contains(e) {
                    assert!(t_h.contains(EdgeId(i)));
                }
            }
        }
    }
}
