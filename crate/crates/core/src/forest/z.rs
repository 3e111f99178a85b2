//! Minimax path values `Z(e)`.
//!
//! `Z_f(e)` is the smallest achievable maximum label over simple paths in
//! `G - e` joining the endpoints of `e`. Since labels are strictly ordered,
//! the value is always attained at a specific edge, which is what
//! [`ZValue::Edge`] records. Membership in a forest is `U(e) < Z(e)` in the
//! strict order.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::forest::kruskal_mst;
use crate::graph::{EdgeId, MultiGraph, VertexId, WiredQuotient};
use crate::labeling::Labeling;

/// Largest edge count accepted by the exhaustive simple-path search.
pub const PATH_ENUMERATION_LIMIT: usize = 24;
/// Largest vertex count accepted by the exhaustive cut search.
pub const CUT_ENUMERATION_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ZValue {
    /// Below every label: a loop's endpoints are joined by the empty path.
    Bottom,
    /// Attained at this edge's label.
    Edge(EdgeId),
    /// The sentinel value 1, above every edge of the order.
    One,
    /// No joining path exists.
    Infinite,
}

impl ZValue {
    pub fn value(self, labels: &Labeling) -> f64 {
        match self {
            ZValue::Bottom => f64::NEG_INFINITY,
            ZValue::Edge(f) => labels.value(f),
            ZValue::One => 1.0,
            ZValue::Infinite => f64::INFINITY,
        }
    }

    pub fn edge(self) -> Option<EdgeId> {
        match self {
            ZValue::Edge(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ZValue::Edge(_) | ZValue::One)
    }

    /// `U(e) < Z` in the strict order.
    pub fn admits(self, labels: &Labeling, e: EdgeId) -> bool {
        match self {
            ZValue::Bottom => false,
            ZValue::Edge(f) => labels.less(e, f),
            ZValue::One => labels.value(e) < 1.0,
            ZValue::Infinite => true,
        }
    }

    pub fn cmp_by(self, other: ZValue, labels: &Labeling) -> Ordering {
        fn level(z: ZValue) -> u8 {
            match z {
                ZValue::Bottom => 0,
                ZValue::Edge(_) => 1,
                ZValue::One => 2,
                ZValue::Infinite => 3,
            }
        }
        match (self, other) {
            (ZValue::Edge(a), ZValue::Edge(b)) => labels.order().cmp(a, b),
            _ => level(self).cmp(&level(other)),
        }
    }

    /// Maps the attaining edge through an edge table.
    pub fn map_edge(self, f: impl FnOnce(EdgeId) -> EdgeId) -> ZValue {
        match self {
            ZValue::Edge(e) => ZValue::Edge(f(e)),
            other => other,
        }
    }
}

struct RootedForest {
    parent: Vec<Option<(VertexId, EdgeId)>>,
    depth: Vec<usize>,
}

impl RootedForest {
    fn new(graph: &MultiGraph, tree: &crate::forest::ForestMask) -> Self {
        let n = graph.vertex_count();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        for root in graph.vertices() {
            if seen[root.0] {
                continue;
            }
            seen[root.0] = true;
            stack.push(root);
            while let Some(v) = stack.pop() {
                for &(e, w) in graph.neighbors(v) {
                    if tree.contains(e) && !seen[w.0] {
                        seen[w.0] = true;
                        parent[w.0] = Some((v, e));
                        depth[w.0] = depth[v.0] + 1;
                        stack.push(w);
                    }
                }
            }
        }
        Self { parent, depth }
    }
}

/// `Z_f` for every edge, read off the minimal spanning forest.
///
/// A non-tree edge gets the largest edge on the tree path between its
/// endpoints. A tree edge gets the smallest non-tree edge whose tree path
/// covers it, or `Infinite` when it is a bridge. Covering is assigned in one
/// increasing pass with a union-find that skips already-covered tree edges.
pub fn z_free_all(graph: &MultiGraph, labels: &Labeling) -> Vec<ZValue> {
    let tree = kruskal_mst(graph, labels);
    let rooted = RootedForest::new(graph, &tree);
    let mut z = vec![ZValue::Infinite; graph.edge_count()];

    let mut jump: Vec<usize> = (0..graph.vertex_count()).collect();
    fn find(jump: &mut [usize], v: usize) -> usize {
        let mut root = v;
        while jump[root] != root {
            root = jump[root];
        }
        let mut cur = v;
        while jump[cur] != root {
            cur = std::mem::replace(&mut jump[cur], root);
        }
        root
    }

    for &e in labels.order().sorted() {
        if tree.contains(e) {
            continue;
        }
        let (a, b) = graph.endpoints(e);
        if a == b {
            z[e.0] = ZValue::Bottom;
            continue;
        }

        // bottleneck of the tree path
        let (mut x, mut y) = (a, b);
        let mut worst: Option<EdgeId> = None;
        let bump = |f: EdgeId, worst: &mut Option<EdgeId>| {
            if worst.is_none_or(|w| labels.less(w, f)) {
                *worst = Some(f);
            }
        };
        while x != y {
            if rooted.depth[x.0] < rooted.depth[y.0] {
                std::mem::swap(&mut x, &mut y);
            }
            let (p, f) = rooted.parent[x.0].expect("endpoints share a tree");
            bump(f, &mut worst);
            x = p;
        }
        z[e.0] = ZValue::Edge(worst.expect("non-loop edge has a tree path"));

        // cover the still-uncovered tree edges of the path
        let mut x = find(&mut jump, a.0);
        let mut y = find(&mut jump, b.0);
        while x != y {
            if rooted.depth[x] < rooted.depth[y] {
                std::mem::swap(&mut x, &mut y);
            }
            let (p, f) = rooted.parent[x].expect("below the meeting point");
            z[f.0] = ZValue::Edge(e);
            jump[x] = p.0;
            x = find(&mut jump, x);
        }
    }
    z
}

pub fn z_free(graph: &MultiGraph, labels: &Labeling, e: EdgeId) -> Result<ZValue> {
    graph.check_edge(e)?;
    Ok(z_free_all(graph, labels)[e.0])
}

/// `Z_f(e)` by enumerating every simple path of `G - e` between the endpoints.
pub fn z_free_paths(graph: &MultiGraph, labels: &Labeling, e: EdgeId) -> Result<ZValue> {
    graph.check_edge(e)?;
    if graph.edge_count() > PATH_ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            what: "path enumeration",
            size: graph.edge_count(),
            limit: PATH_ENUMERATION_LIMIT,
        });
    }
    let (a, b) = graph.endpoints(e);
    if a == b {
        return Ok(ZValue::Bottom);
    }

    struct Search<'a> {
        graph: &'a MultiGraph,
        labels: &'a Labeling,
        skip: EdgeId,
        target: VertexId,
        on_path: Vec<bool>,
        best: Option<EdgeId>,
    }
    impl Search<'_> {
        fn walk(&mut self, v: VertexId, worst: Option<EdgeId>) {
            if v == self.target {
                let w = worst.expect("non-empty path");
                if self.best.is_none_or(|b| self.labels.less(w, b)) {
                    self.best = Some(w);
                }
                return;
            }
            for &(f, w) in self.graph.neighbors(v) {
                if f == self.skip || self.on_path[w.0] {
                    continue;
                }
                let next = match worst {
                    Some(x) if self.labels.less(f, x) => x,
                    _ => f,
                };
                self.on_path[w.0] = true;
                self.walk(w, Some(next));
                self.on_path[w.0] = false;
            }
        }
    }

    let mut search = Search {
        graph,
        labels,
        skip: e,
        target: b,
        on_path: vec![false; graph.vertex_count()],
        best: None,
    };
    search.on_path[a.0] = true;
    search.walk(a, None);
    Ok(search.best.map_or(ZValue::Infinite, ZValue::Edge))
}

/// `Z_f(e)` as the largest cut minimum: the supremum over vertex sets `W`
/// with `e` in the cut of `W` of the least other edge in that cut.
pub fn z_free_cut(graph: &MultiGraph, labels: &Labeling, e: EdgeId) -> Result<ZValue> {
    graph.check_edge(e)?;
    let n = graph.vertex_count();
    if n > CUT_ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            what: "cut enumeration",
            size: n,
            limit: CUT_ENUMERATION_LIMIT,
        });
    }
    let (a, b) = graph.endpoints(e);
    if a == b {
        return Ok(ZValue::Bottom);
    }
    let mut best = ZValue::Bottom;
    for mask in 0u64..(1u64 << n) {
        let inside = |v: VertexId| mask >> v.0 & 1 == 1;
        // each cut counted once, from the side holding `a`
        if !inside(a) || inside(b) {
            continue;
        }
        let cut_min = labels
            .order()
            .min_of(graph.edges().filter(|&f| {
                let (x, y) = graph.endpoints(f);
                f != e && inside(x) != inside(y)
            }))
            .map_or(ZValue::Infinite, ZValue::Edge);
        if cut_min.cmp_by(best, labels) == Ordering::Greater {
            best = cut_min;
        }
    }
    Ok(best)
}

/// The cut that attains `Z_f(e)`: the component `W` of one endpoint among the
/// edges of `G - e` below `Z_f(e)`. Returns the least other edge of that cut
/// together with `W`.
pub fn z_free_cut_constructive(graph: &MultiGraph, labels: &Labeling, e: EdgeId) -> Result<(ZValue, Vec<VertexId>)> {
    let z = z_free(graph, labels, e)?;
    let (a, b) = graph.endpoints(e);
    if a == b {
        return Ok((ZValue::Bottom, Vec::new()));
    }
    let reach = graph.reachable(a, |f| f != e && ZValue::admits(z, labels, f));
    let side: Vec<VertexId> = graph.vertices().filter(|v| reach[v.0]).collect();
    let value = labels
        .order()
        .min_of(graph.edge_cut(&side).into_iter().filter(|&f| f != e))
        .map_or(ZValue::Infinite, ZValue::Edge);
    Ok((value, side))
}

/// `Z_w` for every edge: `Z_f` computed in the wired quotient. Edges dropped
/// by the quotient get `None`.
pub fn z_wired_all(graph: &MultiGraph, boundary: &[VertexId], labels: &Labeling) -> Result<Vec<Option<ZValue>>> {
    let quotient = graph.wired_quotient(boundary)?;
    Ok(z_wired_in(graph, &quotient, labels))
}

pub(crate) fn z_wired_in(graph: &MultiGraph, quotient: &WiredQuotient, labels: &Labeling) -> Vec<Option<ZValue>> {
    let q_labels = labels.pullback(&quotient.original_edges);
    let q_z = z_free_all(&quotient.graph, &q_labels);
    graph
        .edges()
        .map(|e| quotient.edge_map[e.0].map(|q| q_z[q.0].map_edge(|f| quotient.original_edge(f))))
        .collect()
}

pub fn z_wired(graph: &MultiGraph, boundary: &[VertexId], labels: &Labeling, e: EdgeId) -> Result<ZValue> {
    graph.check_edge(e)?;
    let quotient = graph.wired_quotient(boundary)?;
    quotient.quotient_edge(e)?;
    Ok(z_wired_in(graph, &quotient, labels)[e.0].expect("edge survives"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{kruskal_mst, wired_mst};
    use crate::graph::{grid_box, random_connected_multigraph, random_multigraph, GridTopology, BOUNDARY_TAG};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> (MultiGraph, Labeling) {
        (
            MultiGraph::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap(),
            Labeling::from_floats(vec![0.1, 0.2, 0.3]).unwrap(),
        )
    }

    #[test]
    fn triangle_values() {
        let (g, u) = triangle();
        let c = EdgeId(2);
        assert_eq!(z_free(&g, &u, c).unwrap(), ZValue::Edge(EdgeId(1)));
        assert_eq!(z_free_cut(&g, &u, c).unwrap(), ZValue::Edge(EdgeId(1)));
        assert_eq!(z_free_paths(&g, &u, c).unwrap(), ZValue::Edge(EdgeId(1)));
        assert!((z_free(&g, &u, c).unwrap().value(&u) - 0.2).abs() < 1e-15);
        // tree edges are covered by the excluded edge
        assert_eq!(z_free(&g, &u, EdgeId(0)).unwrap(), ZValue::Edge(c));
    }

    #[test]
    fn bridges_and_loops() {
        let g = MultiGraph::new(3, &[(0, 1), (1, 2), (2, 2)]).unwrap();
        let u = Labeling::from_floats(vec![0.5, 0.6, 0.7]).unwrap();
        for f in [z_free, z_free_paths, z_free_cut] {
            assert_eq!(f(&g, &u, EdgeId(0)).unwrap(), ZValue::Infinite);
            assert_eq!(f(&g, &u, EdgeId(2)).unwrap(), ZValue::Bottom);
        }
        assert!(!ZValue::Bottom.admits(&u, EdgeId(2)));
    }

    #[test]
    fn minimax_matches_exhaustive_searches() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..500u64 {
            let n = rng.random_range(1..7);
            let m = rng.random_range(0..=10);
            let g = random_multigraph(&mut rng, n, m);
            let u = Labeling::sample(&g, trial);
            let all = z_free_all(&g, &u);
            let tree = kruskal_mst(&g, &u);
            for e in g.edges() {
                let paths = z_free_paths(&g, &u, e).unwrap();
                assert_eq!(all[e.0], paths, "trial {trial} edge {e}");
                assert_eq!(z_free_cut(&g, &u, e).unwrap(), paths);
                let (value, side) = z_free_cut_constructive(&g, &u, e).unwrap();
                assert_eq!(value, paths);
                if !g.is_loop(e) {
                    assert!(side.contains(&g.endpoints(e).0) && !side.contains(&g.endpoints(e).1));
                }
                assert_eq!(paths.admits(&u, e), tree.contains(e));
            }
        }
    }

    #[test]
    fn wired_values() {
        let g = MultiGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let u = Labeling::from_floats(vec![0.6, 0.3]).unwrap();
        let b = [VertexId(0), VertexId(2)];
        assert_eq!(z_wired(&g, &b, &u, EdgeId(0)).unwrap(), ZValue::Edge(EdgeId(1)));
        assert_eq!(z_free(&g, &u, EdgeId(0)).unwrap(), ZValue::Infinite);

        let tri = MultiGraph::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let u = Labeling::from_floats(vec![0.1, 0.2, 0.3]).unwrap();
        assert_eq!(
            z_wired(&tri, &[VertexId(0), VertexId(1)], &u, EdgeId(0)),
            Err(Error::EdgeDropped(EdgeId(0)))
        );
    }

    #[test]
    fn wired_never_exceeds_free_and_agrees_with_wired_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for seed in 0..500u64 {
            let side = rng.random_range(2..7);
            let g = grid_box(2, side, GridTopology::Free).unwrap();
            let boundary = g.tagged(BOUNDARY_TAG).unwrap().to_vec();
            let u = Labeling::sample(&g, seed);
            let zf = z_free_all(&g, &u);
            let zw = z_wired_all(&g, &boundary, &u).unwrap();
            let w = wired_mst(&g, &boundary, &u).unwrap();
            for e in g.edges() {
                if let Some(z) = zw[e.0] {
                    assert_ne!(z.cmp_by(zf[e.0], &u), Ordering::Greater);
                    assert_eq!(z.admits(&u, e), w.contains(e));
                } else {
                    assert!(!w.contains(e));
                }
            }
        }
    }

    #[test]
    fn deep_interior_edge_ignores_the_boundary() {
        // Cheap interior square, every route to the surface costs more.
        let g = grid_box(2, 7, GridTopology::Free).unwrap();
        let center = VertexId(3 + 7 * 3);
        let mut values = vec![0.9; g.edge_count()];
        let square = [center.0, center.0 + 1, center.0 + 8, center.0 + 7];
        let mut square_edges = Vec::new();
        for e in g.edges() {
            let (a, b) = g.endpoints(e);
            if square.contains(&a.0) && square.contains(&b.0) {
                square_edges.push(e);
            }
        }
        for (i, &e) in square_edges.iter().enumerate() {
            values[e.0] = 0.1 + 0.1 * i as f64;
        }
        for (i, v) in values.iter_mut().enumerate() {
            *v -= i as f64 * 1e-4;
        }
        let u = Labeling::from_floats(values).unwrap();
        let boundary = g.tagged(BOUNDARY_TAG).unwrap().to_vec();
        for &e in &square_edges {
            assert_eq!(z_wired(&g, &boundary, &u, e).unwrap(), z_free(&g, &u, e).unwrap());
        }
    }

    #[test]
    fn z_on_random_connected_graphs_respects_cut_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..200u64 {
            let n = rng.random_range(2..9);
            let g = random_connected_multigraph(&mut rng, n, n + 4).unwrap();
            let u = Labeling::sample(&g, trial);
            let t = kruskal_mst(&g, &u);
            let z = z_free_all(&g, &u);
            for e in g.edges() {
                assert_eq!(z[e.0].admits(&u, e), t.contains(e));
            }
        }
    }
}
