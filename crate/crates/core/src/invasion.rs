//! Invasion percolation: trees, basins, and the bi-infinite path value `Z_inf`.
//!
//! Inside a wired quotient the wired vertex stands for infinity, so an
//! invasion started elsewhere stops as soon as it reaches it.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{wired_mst_in, ForestMask, ZValue};
use crate::graph::{EdgeId, MultiGraph, VertexId, WiredQuotient};
use crate::labeling::Labeling;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvasionTrace {
    pub source: VertexId,
    /// Accepted edges in acceptance order.
    pub edges_in_order: Vec<EdgeId>,
    /// Invaded vertices in order of acquisition, starting with the source.
    pub vertices_in_order: Vec<VertexId>,
    /// Running maximum of accepted labels, one entry per accepted edge.
    pub frontier_maxima: Vec<f64>,
    /// True when the frontier emptied before the step bound.
    pub saturated: bool,
    /// True when the run stopped on reaching the stop vertex.
    pub reached_stop: bool,
}

impl InvasionTrace {
    pub fn edge_mask(&self, host_edges: usize) -> ForestMask {
        ForestMask::from_edges(host_edges, self.edges_in_order.iter().copied())
    }

    pub fn vertex_mask(&self, vertices: usize) -> Vec<bool> {
        let mut mask = vec![false; vertices];
        for v in &self.vertices_in_order {
            mask[v.0] = true;
        }
        mask
    }

    /// Positions `k` whose label exceeds every later accepted label.
    pub fn record_positions(&self, labels: &Labeling) -> Vec<usize> {
        let mut out = Vec::new();
        let mut best: Option<EdgeId> = None;
        for (k, &e) in self.edges_in_order.iter().enumerate().rev() {
            if best.is_none_or(|b| labels.less(b, e)) {
                out.push(k);
                best = Some(e);
            }
        }
        out.reverse();
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Tree,
    Basin,
}

fn invade(
    graph: &MultiGraph,
    labels: &Labeling,
    source: VertexId,
    max_steps: usize,
    kind: Kind,
    stop: Option<VertexId>,
) -> Result<InvasionTrace> {
    graph.check_vertex(source).map_err(|_| Error::BadSource(source))?;
    let mut inside = vec![false; graph.vertex_count()];
    let mut queued = vec![false; graph.edge_count()];
    let mut heap = BinaryHeap::new();
    let mut trace = InvasionTrace {
        source,
        edges_in_order: Vec::new(),
        vertices_in_order: vec![source],
        frontier_maxima: Vec::new(),
        saturated: false,
        reached_stop: false,
    };

    let mut absorb = |v: VertexId, inside: &mut Vec<bool>, heap: &mut BinaryHeap<_>| {
        inside[v.0] = true;
        for &(e, _) in graph.neighbors(v) {
            if !queued[e.0] {
                queued[e.0] = true;
                heap.push(Reverse((labels.rank(e), e)));
            }
        }
        if kind == Kind::Basin {
            for &e in graph.loops_at(v) {
                if !queued[e.0] {
                    queued[e.0] = true;
                    heap.push(Reverse((labels.rank(e), e)));
                }
            }
        }
    };

    if stop == Some(source) {
        trace.reached_stop = true;
        return Ok(trace);
    }
    absorb(source, &mut inside, &mut heap);
    let mut running: Option<EdgeId> = None;
    while trace.edges_in_order.len() < max_steps {
        let Some(Reverse((_, e))) = heap.pop() else {
            trace.saturated = true;
            break;
        };
        let (a, b) = graph.endpoints(e);
        let fresh = match (inside[a.0], inside[b.0]) {
            (true, true) => None,
            (true, false) => Some(b),
            (false, true) => Some(a),
            (false, false) => unreachable!("queued edges touch the invaded set"),
        };
        if fresh.is_none() && kind == Kind::Tree {
            continue;
        }
        trace.edges_in_order.push(e);
        if running.is_none_or(|r| labels.less(r, e)) {
            running = Some(e);
        }
        trace.frontier_maxima.push(labels.value(running.expect("set above")));
        if let Some(v) = fresh {
            trace.vertices_in_order.push(v);
            if stop == Some(v) {
                trace.reached_stop = true;
                break;
            }
            absorb(v, &mut inside, &mut heap);
        }
    }
    if !trace.saturated && !trace.reached_stop && heap.is_empty() {
        trace.saturated = true;
    }
    Ok(trace)
}

/// Prim-style growth from `source`: each step takes the least edge joining
/// the invaded tree to a new vertex.
pub fn invasion_tree(
    graph: &MultiGraph,
    labels: &Labeling,
    source: VertexId,
    max_steps: usize,
) -> Result<InvasionTrace> {
    invade(graph, labels, source, max_steps, Kind::Tree, None)
}

/// Each step accepts the least edge incident to the invaded set, even when it
/// closes a cycle.
pub fn invasion_basin(
    graph: &MultiGraph,
    labels: &Labeling,
    source: VertexId,
    max_steps: usize,
) -> Result<InvasionTrace> {
    invade(graph, labels, source, max_steps, Kind::Basin, None)
}

/// Invasion tree that halts on acquiring `stop`.
pub fn invasion_tree_until(
    graph: &MultiGraph,
    labels: &Labeling,
    source: VertexId,
    stop: VertexId,
    max_steps: usize,
) -> Result<InvasionTrace> {
    invade(graph, labels, source, max_steps, Kind::Tree, Some(stop))
}

pub fn invasion_basin_until(
    graph: &MultiGraph,
    labels: &Labeling,
    source: VertexId,
    stop: VertexId,
    max_steps: usize,
) -> Result<InvasionTrace> {
    invade(graph, labels, source, max_steps, Kind::Basin, Some(stop))
}

/// Invasions run in the wired quotient from every non-wired vertex, each
/// stopping at the wired vertex.
pub struct WiredInvasions {
    pub quotient: WiredQuotient,
    pub labels: Labeling,
    pub trees: Vec<InvasionTrace>,
    pub basins: Vec<InvasionTrace>,
}

impl WiredInvasions {
    pub fn run(graph: &MultiGraph, boundary: &[VertexId], labels: &Labeling) -> Result<Self> {
        let quotient = graph.wired_quotient(boundary)?;
        let q_labels = labels.pullback(&quotient.original_edges);
        let q = &quotient.graph;
        let sources: Vec<VertexId> = q.vertices().filter(|&v| v != quotient.wired).collect();
        let trees = sources
            .iter()
            .map(|&v| invasion_tree_until(q, &q_labels, v, quotient.wired, usize::MAX))
            .collect::<Result<_>>()?;
        let basins = sources
            .iter()
            .map(|&v| invasion_basin_until(q, &q_labels, v, quotient.wired, usize::MAX))
            .collect::<Result<_>>()?;
        Ok(Self {
            quotient,
            labels: q_labels,
            trees,
            basins,
        })
    }

    fn union(&self, traces: &[InvasionTrace], host_edges: usize) -> ForestMask {
        ForestMask::from_edges(
            host_edges,
            traces
                .iter()
                .flat_map(|t| t.edges_in_order.iter().map(|&e| self.quotient.original_edge(e))),
        )
    }

    pub fn tree_union(&self, host_edges: usize) -> ForestMask {
        self.union(&self.trees, host_edges)
    }

    pub fn basin_union(&self, host_edges: usize) -> ForestMask {
        self.union(&self.basins, host_edges)
    }
}

/// Union of all invasion trees of the wired quotient, in original edge ids.
/// Equals the wired minimal spanning forest.
pub fn invasion_union(graph: &MultiGraph, boundary: &[VertexId], labels: &Labeling) -> Result<ForestMask> {
    if graph.vertex_count() <= 1 {
        return Ok(ForestMask::empty(graph.edge_count()));
    }
    if boundary.is_empty() {
        // no horizon: each invasion saturates its component
        let mut union = ForestMask::empty(graph.edge_count());
        let mut seen = vec![false; graph.vertex_count()];
        for v in graph.vertices() {
            if seen[v.0] {
                continue;
            }
            let t = invasion_tree(graph, labels, v, usize::MAX)?;
            for u in &t.vertices_in_order {
                seen[u.0] = true;
            }
            for &e in &t.edges_in_order {
                union.insert(e);
            }
        }
        return Ok(union);
    }
    Ok(WiredInvasions::run(graph, boundary, labels)?.tree_union(graph.edge_count()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SymDiff {
    pub basins: usize,
    pub trees: usize,
    pub same_component: bool,
}

/// Sizes of `I(x) Δ I(y)` and `T(x) Δ T(y)`, and whether `x` and `y` share a
/// component of the wired forest. With a boundary the invasions run in the
/// wired quotient and stop at the wired vertex.
pub fn invasion_symdiff(
    graph: &MultiGraph,
    boundary: Option<&[VertexId]>,
    labels: &Labeling,
    x: VertexId,
    y: VertexId,
    max_steps: usize,
) -> Result<SymDiff> {
    graph.check_vertex(x).map_err(|_| Error::BadSource(x))?;
    graph.check_vertex(y).map_err(|_| Error::BadSource(y))?;
    let m = graph.edge_count();
    match boundary {
        None | Some([]) => {
            let tx = invasion_tree(graph, labels, x, max_steps)?;
            let ty = invasion_tree(graph, labels, y, max_steps)?;
            let bx = invasion_basin(graph, labels, x, max_steps)?;
            let by = invasion_basin(graph, labels, y, max_steps)?;
            let same = graph.components_of(graph.edges()).same(x, y);
            Ok(SymDiff {
                basins: bx.edge_mask(m).symmetric_difference(&by.edge_mask(m)).len(),
                trees: tx.edge_mask(m).symmetric_difference(&ty.edge_mask(m)).len(),
                same_component: same,
            })
        }
        Some(boundary) => {
            let quotient = graph.wired_quotient(boundary)?;
            let q = &quotient.graph;
            let q_labels = labels.pullback(&quotient.original_edges);
            let (qx, qy) = (quotient.vertex_map[x.0], quotient.vertex_map[y.0]);
            let w = quotient.wired;
            let qm = q.edge_count();
            let tx = invasion_tree_until(q, &q_labels, qx, w, max_steps)?;
            let ty = invasion_tree_until(q, &q_labels, qy, w, max_steps)?;
            let bx = invasion_basin_until(q, &q_labels, qx, w, max_steps)?;
            let by = invasion_basin_until(q, &q_labels, qy, w, max_steps)?;
            let forest = wired_mst_in(graph, &quotient, labels);
            let same = graph.components_of(forest.iter()).same(x, y);
            Ok(SymDiff {
                basins: bx.edge_mask(qm).symmetric_difference(&by.edge_mask(qm)).len(),
                trees: tx.edge_mask(qm).symmetric_difference(&ty.edge_mask(qm)).len(),
                same_component: same,
            })
        }
    }
}

/// Unit-capacity flow network on split vertices, used to look for two
/// vertex-disjoint arms into the wired vertex.
struct ArmNetwork {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<u8>,
    next: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl ArmNetwork {
    fn new(nodes: usize) -> Self {
        Self {
            head: vec![NIL; nodes],
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
        }
    }

    fn arc(&mut self, a: usize, b: usize, c: u8) {
        for (x, y, c) in [(a, b, c), (b, a, 0)] {
            self.to.push(y);
            self.cap.push(c);
            self.next.push(self.head[x]);
            self.head[x] = self.to.len() - 1;
        }
    }

    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut via = vec![NIL; self.head.len()];
        let mut seen = vec![false; self.head.len()];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            let mut a = self.head[v];
            while a != NIL {
                let w = self.to[a];
                if self.cap[a] > 0 && !seen[w] {
                    seen[w] = true;
                    via[w] = a;
                    queue.push_back(w);
                }
                a = self.next[a];
            }
        }
        if !seen[t] {
            return false;
        }
        let mut v = t;
        while v != s {
            let a = via[v];
            self.cap[a] -= 1;
            self.cap[a ^ 1] += 1;
            v = self.to[a ^ 1];
        }
        true
    }
}

/// Whether the quotient edges of rank below `limit`, other than `skip`, hold
/// vertex-disjoint paths from `x` and from `y` to `w`.
fn has_two_arms(
    q: &MultiGraph,
    labels: &Labeling,
    skip: EdgeId,
    limit: usize,
    x: VertexId,
    y: VertexId,
    w: VertexId,
) -> bool {
    let allowed = |f: EdgeId| f != skip && labels.rank(f) < limit;
    if x == w || y == w {
        let other = if x == w { y } else { x };
        return q.reachable(other, allowed)[w.0];
    }
    let n = q.vertex_count();
    let (source, sink) = (2 * n, 2 * w.0 + 1);
    let mut net = ArmNetwork::new(2 * n + 1);
    for v in q.vertices() {
        net.arc(2 * v.0, 2 * v.0 + 1, if v == w { 2 } else { 1 });
    }
    for f in q.edges() {
        if !allowed(f) || q.is_loop(f) {
            continue;
        }
        let (a, b) = q.endpoints(f);
        net.arc(2 * a.0 + 1, 2 * b.0, 1);
        net.arc(2 * b.0 + 1, 2 * a.0, 1);
    }
    net.arc(source, 2 * x.0, 1);
    net.arc(source, 2 * y.0, 1);
    net.augment(source, sink) && net.augment(source, sink)
}

fn z_infinity_in(q: &MultiGraph, labels: &Labeling, w: VertexId, e: EdgeId) -> ZValue {
    let (x, y) = q.endpoints(e);
    if x == y {
        return ZValue::One;
    }
    let m = q.edge_count();
    if !has_two_arms(q, labels, e, m, x, y, w) {
        return ZValue::One;
    }
    // least rank bound admitting two arms
    let (mut lo, mut hi) = (0, m);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_two_arms(q, labels, e, mid, x, y, w) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    ZValue::Edge(labels.order().sorted()[lo - 1])
}

/// Finite proxy for `Z_inf(e)`: the least achievable maximum label, `e`
/// excluded, over pairs of vertex-disjoint arms from the endpoints of `e` to
/// the boundary. `One` when no such pair exists.
pub fn z_infinity_proxy(graph: &MultiGraph, boundary: &[VertexId], labels: &Labeling, e: EdgeId) -> Result<ZValue> {
    graph.check_edge(e)?;
    let quotient = graph.wired_quotient(boundary)?;
    let qe = quotient.quotient_edge(e)?;
    let q_labels = labels.pullback(&quotient.original_edges);
    Ok(z_infinity_in(&quotient.graph, &q_labels, quotient.wired, qe).map_edge(|f| quotient.original_edge(f)))
}

/// `z_infinity_proxy` for every edge; `None` for edges dropped by the quotient.
pub fn z_infinity_proxy_all(
    graph: &MultiGraph,
    boundary: &[VertexId],
    labels: &Labeling,
) -> Result<Vec<Option<ZValue>>> {
    let quotient = graph.wired_quotient(boundary)?;
    let q_labels = labels.pullback(&quotient.original_edges);
    Ok(graph
        .edges()
        .map(|e| {
            quotient.edge_map[e.0].map(|qe| {
                z_infinity_in(&quotient.graph, &q_labels, quotient.wired, qe).map_edge(|f| quotient.original_edge(f))
            })
        })
        .collect())
}

/// Edges with `U(e) < Z_inf(e)`.
pub fn basin_of_infinity_proxy(graph: &MultiGraph, boundary: &[VertexId], labels: &Labeling) -> Result<ForestMask> {
    let z = z_infinity_proxy_all(graph, boundary, labels)?;
    Ok(ForestMask::from_predicate(graph.edge_count(), |e| {
        z[e.0].is_some_and(|z| z.admits(labels, e))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{kruskal_mst, wired_mst, z_wired_all};
    use crate::graph::{grid_box, random_connected_multigraph, GridTopology, BOUNDARY_TAG};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::cmp::Ordering;

    fn triangle() -> (MultiGraph, Labeling) {
        (
            MultiGraph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap(),
            Labeling::from_floats(vec![0.1, 0.5, 0.3]).unwrap(),
        )
    }

    fn path(n: usize) -> MultiGraph {
        MultiGraph::new(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn tree_examples() {
        let (g, u) = triangle();
        let t = invasion_tree(&g, &u, VertexId(0), 10).unwrap();
        assert_eq!(t.edges_in_order, vec![EdgeId(0), EdgeId(2)]);
        assert!(t.saturated);
        assert_eq!(t.frontier_maxima, vec![0.1, 0.3]);

        let p = path(5);
        let u = Labeling::from_floats(vec![0.9, 0.1, 0.8, 0.2]).unwrap();
        let t = invasion_tree(&p, &u, VertexId(0), 100).unwrap();
        assert_eq!(t.edges_in_order, (0..4).map(EdgeId).collect::<Vec<_>>());
        let t = invasion_tree(&p, &u, VertexId(0), 2).unwrap();
        assert_eq!(t.edges_in_order.len(), 2);
        assert!(!t.saturated);
    }

    #[test]
    fn basin_examples() {
        let (g, u) = triangle();
        let b = invasion_basin(&g, &u, VertexId(0), 10).unwrap();
        assert_eq!(b.edges_in_order, vec![EdgeId(0), EdgeId(2), EdgeId(1)]);
        let p = path(4);
        let u = Labeling::sample(&p, 1);
        let t = invasion_tree(&p, &u, VertexId(2), 10).unwrap();
        let b = invasion_basin(&p, &u, VertexId(2), 10).unwrap();
        assert_eq!(t, b);
    }

    #[test]
    fn basin_and_tree_acquire_vertices_identically() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..300u64 {
            let n = rng.random_range(1..9);
            let m = rng.random_range(n - 1..n + 8);
            let g = random_connected_multigraph(&mut rng, n, m).unwrap();
            let u = Labeling::sample(&g, trial);
            let v = VertexId(rng.random_range(0..n));
            let t = invasion_tree(&g, &u, v, usize::MAX).unwrap();
            let b = invasion_basin(&g, &u, v, usize::MAX).unwrap();
            assert_eq!(t.vertices_in_order, b.vertices_in_order);
            assert!(t.edge_mask(m).is_subset(&b.edge_mask(m)));
            assert_eq!(t.edge_mask(m), kruskal_mst(&g, &u));
            // every prefix is a tree through the source
            for k in 0..=t.edges_in_order.len() {
                let prefix = &t.edges_in_order[..k];
                let part = g.components(prefix);
                assert!(t.vertices_in_order[..=k].iter().all(|&x| part.same(x, v)));
            }
        }
    }

    #[test]
    fn record_edges_separate_the_source() {
        let g = grid_box(2, 9, GridTopology::Free).unwrap();
        for seed in 0..50 {
            let u = Labeling::sample(&g, seed);
            let t = invasion_tree(&g, &u, VertexId(40), usize::MAX).unwrap();
            for k in t.record_positions(&u) {
                let e = t.edges_in_order[k];
                let rest: Vec<EdgeId> = t.edges_in_order.iter().copied().filter(|&f| f != e).collect();
                let part = g.components(&rest);
                for &later in &t.vertices_in_order[k + 1..] {
                    assert!(!part.same(later, t.source));
                }
                // running maximum after a record never exceeds it
                assert!(t.frontier_maxima[k] >= u.value(e));
            }
        }
    }

    #[test]
    fn union_identity_and_containment_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for seed in 0..300u64 {
            let dim = rng.random_range(1..=2);
            let side = rng.random_range(3..=7);
            let g = grid_box(dim, side, GridTopology::Free).unwrap();
            let boundary = g.tagged(BOUNDARY_TAG).unwrap().to_vec();
            let u = Labeling::sample(&g, seed);
            let runs = WiredInvasions::run(&g, &boundary, &u).unwrap();
            let trees = runs.tree_union(g.edge_count());
            let basins = runs.basin_union(g.edge_count());
            let infinity = basin_of_infinity_proxy(&g, &boundary, &u).unwrap();
            assert_eq!(trees, wired_mst(&g, &boundary, &u).unwrap());
            assert_eq!(invasion_union(&g, &boundary, &u).unwrap(), trees);
            assert!(trees.is_subset(&basins));
            assert!(basins.is_subset(&infinity), "seed {seed}");
        }
    }

    #[test]
    fn union_edge_cases() {
        let g = MultiGraph::new(1, &[]).unwrap();
        let u = Labeling::from_floats(vec![]).unwrap();
        assert!(invasion_union(&g, &[VertexId(0)], &u).unwrap().is_empty());

        let g = path(3);
        let u = Labeling::from_floats(vec![0.3, 0.6]).unwrap();
        let b = [VertexId(0), VertexId(2)];
        assert_eq!(invasion_union(&g, &b, &u).unwrap(), wired_mst(&g, &b, &u).unwrap());
        assert_eq!(invasion_union(&g, &b, &u).unwrap().to_vec(), vec![EdgeId(0)]);
    }

    #[test]
    fn symdiff_examples() {
        let g = grid_box(2, 4, GridTopology::Free).unwrap();
        let u = Labeling::sample(&g, 5);
        let s = invasion_symdiff(&g, None, &u, VertexId(5), VertexId(5), 100).unwrap();
        assert_eq!(
            s,
            SymDiff {
                basins: 0,
                trees: 0,
                same_component: true
            }
        );
        let s = invasion_symdiff(&g, None, &u, VertexId(0), VertexId(15), usize::MAX).unwrap();
        assert_eq!(s.trees, 0);
        assert!(s.same_component);
        let boundary = g.tagged(BOUNDARY_TAG).unwrap().to_vec();
        let s = invasion_symdiff(&g, Some(&boundary), &u, VertexId(5), VertexId(5), 100).unwrap();
        assert_eq!((s.basins, s.trees), (0, 0));
    }

    #[test]
    fn z_infinity_examples() {
        // boundary endpoints 0 and 4, e in the middle
        let g = path(5);
        let u = Labeling::from_floats(vec![0.2, 0.5, 0.7, 0.4]).unwrap();
        let b = [VertexId(0), VertexId(4)];
        assert_eq!(
            z_infinity_proxy(&g, &b, &u, EdgeId(1)).unwrap(),
            ZValue::Edge(EdgeId(2))
        );
        assert_eq!(
            z_infinity_proxy(&g, &b, &u, EdgeId(2)).unwrap(),
            ZValue::Edge(EdgeId(1))
        );
        assert_eq!(
            z_infinity_proxy(&g, &b, &u, EdgeId(0)).unwrap(),
            ZValue::Edge(EdgeId(2))
        );

        // pendant interior vertex
        let g = MultiGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let u = Labeling::from_floats(vec![0.5, 0.1]).unwrap();
        assert_eq!(
            z_infinity_proxy(&g, &[VertexId(0)], &u, EdgeId(1)).unwrap(),
            ZValue::One
        );

        // three edges, boundary at both ends: basin drops only the top edge
        let g = path(4);
        let u = Labeling::from_floats(vec![0.3, 0.9, 0.6]).unwrap();
        let b = [VertexId(0), VertexId(3)];
        let basin = basin_of_infinity_proxy(&g, &b, &u).unwrap();
        assert_eq!(basin.to_vec(), vec![EdgeId(0), EdgeId(2)]);

        // no boundary-to-boundary path: Z is identically one
        let g = path(3);
        let u = Labeling::sample(&g, 2);
        let basin = basin_of_infinity_proxy(&g, &[VertexId(0)], &u).unwrap();
        assert_eq!(basin.len(), 2);
    }

    #[test]
    fn z_infinity_dominates_z_wired() {
        for seed in 0..200u64 {
            let side = 3 + (seed % 5) as usize;
            let g = grid_box(2, side, GridTopology::Free).unwrap();
            let boundary = g.tagged(BOUNDARY_TAG).unwrap().to_vec();
            let u = Labeling::sample(&g, seed);
            let zi = z_infinity_proxy_all(&g, &boundary, &u).unwrap();
            let zw = z_wired_all(&g, &boundary, &u).unwrap();
            for e in g.edges() {
                match (zi[e.0], zw[e.0]) {
                    (Some(a), Some(b)) if b != ZValue::Infinite => {
                        assert_ne!(a.cmp_by(b, &u), Ordering::Less, "seed {seed} edge {e}");
                    }
                    (None, None) | (Some(_), Some(_)) => {}
                    _ => panic!("quotient disagreement"),
                }
            }
        }
    }

    #[test]
    fn arms_agree_with_brute_force_on_small_graphs() {
        // exhaustive search over pairs of simple paths to the wired vertex
        fn brute(q: &MultiGraph, u: &Labeling, w: VertexId, e: EdgeId) -> ZValue {
            let (x, y) = q.endpoints(e);
            if x == y {
                return ZValue::One;
            }
            fn arms(
                q: &MultiGraph,
                skip: EdgeId,
                v: VertexId,
                w: VertexId,
                used: &mut Vec<bool>,
                path: &mut Vec<EdgeId>,
                out: &mut Vec<(Vec<EdgeId>, Vec<VertexId>)>,
            ) {
                if v == w {
                    let verts = (0..used.len()).filter(|&i| used[i]).map(VertexId).collect();
                    out.push((path.clone(), verts));
                    return;
                }
                for &(f, t) in q.neighbors(v) {
                    if f == skip || used[t.0] {
                        continue;
                    }
                    used[t.0] = true;
                    path.push(f);
                    arms(q, skip, t, w, used, path, out);
                    path.pop();
                    used[t.0] = false;
                }
            }
            let collect = |s: VertexId| {
                let mut used = vec![false; q.vertex_count()];
                used[s.0] = true;
                let mut out = Vec::new();
                arms(q, e, s, w, &mut used, &mut Vec::new(), &mut out);
                out
            };
            let (ax, ay) = (collect(x), collect(y));
            let mut best: Option<EdgeId> = None;
            for (px, vx) in &ax {
                for (py, vy) in &ay {
                    if vx.iter().any(|v| *v != w && vy.contains(v)) {
                        continue;
                    }
                    let worst = u.order().max_of(px.iter().chain(py).copied());
                    match worst {
                        None => return ZValue::Bottom,
                        Some(m) => {
                            if best.is_none_or(|b| u.less(m, b)) {
                                best = Some(m);
                            }
                        }
                    }
                }
            }
            best.map_or(ZValue::One, ZValue::Edge)
        }

        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for trial in 0..300u64 {
            let n = rng.random_range(2..7);
            let m = rng.random_range(n - 1..n + 5);
            let q = random_connected_multigraph(&mut rng, n, m).unwrap();
            let u = Labeling::sample(&q, trial);
            let w = VertexId(n - 1);
            for e in q.edges() {
                let (x, y) = q.endpoints(e);
                if x == w || y == w {
                    continue;
                }
                assert_eq!(
                    z_infinity_in(&q, &u, w, e),
                    brute(&q, &u, w, e),
                    "trial {trial} edge {e}"
                );
            }
        }
    }
}
