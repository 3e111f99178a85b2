//! Combinatorial plane embeddings and planar duality.
//!
//! Edge `e` has two darts: `2e` runs from its first endpoint to its second,
//! `2e + 1` runs back. A rotation lists the darts leaving each vertex in
//! cyclic order. Faces are the orbits of `d -> next(rev(d))`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{kruskal_mst, ForestMask, ZValue};
use crate::graph::{grid_box, EdgeId, GridTopology, MultiGraph, VertexId};
use crate::labeling::Labeling;

pub type Dart = usize;

#[inline]
pub fn dart_edge(d: Dart) -> EdgeId {
    EdgeId(d / 2)
}

#[inline]
pub fn reverse(d: Dart) -> Dart {
    d ^ 1
}

#[derive(Clone, Debug)]
pub struct PlaneEmbedding {
    host: MultiGraph,
    rotation: Vec<Vec<Dart>>,
    next: Vec<Dart>,
    face_of: Vec<usize>,
    faces: Vec<Vec<Dart>>,
    outer_face: usize,
}

impl PlaneEmbedding {
    /// Builds an embedding from the cyclic dart order at every vertex. Each
    /// dart must leave the vertex it is listed at and appear exactly once.
    pub fn from_darts(host: MultiGraph, rotation: Vec<Vec<Dart>>) -> Result<Self> {
        let n = host.vertex_count();
        if rotation.len() != n {
            return Err(Error::InvalidArgument(format!(
                "rotation covers {} of {n} vertices",
                rotation.len()
            )));
        }
        let darts = 2 * host.edge_count();
        let mut next = vec![usize::MAX; darts];
        for (v, ring) in rotation.iter().enumerate() {
            for (i, &d) in ring.iter().enumerate() {
                if d >= darts {
                    return Err(Error::UnknownEdge(dart_edge(d)));
                }
                if tail(&host, d) != VertexId(v) {
                    return Err(Error::InvalidArgument(format!(
                        "dart of edge {} does not leave vertex {v}",
                        dart_edge(d)
                    )));
                }
                if next[d] != usize::MAX {
                    return Err(Error::InvalidArgument(format!(
                        "edge {} listed twice at vertex {v}",
                        dart_edge(d)
                    )));
                }
                next[d] = ring[(i + 1) % ring.len()];
            }
        }
        if let Some(d) = next.iter().position(|&x| x == usize::MAX) {
            return Err(Error::InvalidArgument(format!(
                "edge {} missing from the rotation",
                dart_edge(d)
            )));
        }

        let mut face_of = vec![usize::MAX; darts];
        let mut faces: Vec<Vec<Dart>> = Vec::new();
        for start in 0..darts {
            if face_of[start] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut walk = Vec::new();
            let mut d = start;
            loop {
                face_of[d] = id;
                walk.push(d);
                d = next[reverse(d)];
                if d == start {
                    break;
                }
            }
            faces.push(walk);
        }
        if faces.is_empty() {
            // a lone vertex has one face with an empty boundary
            faces.push(Vec::new());
        }
        let outer_face = (0..faces.len())
            .max_by(|&a, &b| faces[a].len().cmp(&faces[b].len()).then(b.cmp(&a)))
            .expect("at least one face");
        Ok(Self {
            host,
            rotation,
            next,
            face_of,
            faces,
            outer_face,
        })
    }

    /// Builds an embedding from per-vertex cyclic edge lists. A loop is listed
    /// twice at its vertex; the first entry stands for dart `2e`.
    pub fn from_rotation(host: MultiGraph, rotation: &[Vec<EdgeId>]) -> Result<Self> {
        let mut darts = Vec::with_capacity(rotation.len());
        for (v, ring) in rotation.iter().enumerate() {
            let mut seen_loops: Vec<EdgeId> = Vec::new();
            let mut out = Vec::with_capacity(ring.len());
            for &e in ring {
                host.check_edge(e)?;
                let (a, b) = host.endpoints(e);
                let d = if a == b {
                    if seen_loops.contains(&e) {
                        2 * e.0 + 1
                    } else {
                        seen_loops.push(e);
                        2 * e.0
                    }
                } else if a.0 == v {
                    2 * e.0
                } else {
                    2 * e.0 + 1
                };
                out.push(d);
            }
            darts.push(out);
        }
        Self::from_darts(host, darts)
    }

    pub fn host(&self) -> &MultiGraph {
        &self.host
    }

    pub fn rotation(&self) -> &[Vec<Dart>] {
        &self.rotation
    }

    /// Rotation as edge lists, the form used by embedding files.
    pub fn rotation_edges(&self) -> Vec<Vec<EdgeId>> {
        self.rotation
            .iter()
            .map(|r| r.iter().map(|&d| dart_edge(d)).collect())
            .collect()
    }

    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_of(&self, d: Dart) -> usize {
        self.face_of[d]
    }

    pub fn outer_face(&self) -> usize {
        self.outer_face
    }

    pub fn set_outer_face(&mut self, face: usize) -> Result<()> {
        if face >= self.faces.len() {
            return Err(Error::InvalidArgument(format!("no face {face}")));
        }
        self.outer_face = face;
        Ok(())
    }

    /// Successor of `d` in the rotation at its tail.
    pub fn next_dart(&self, d: Dart) -> Dart {
        self.next[d]
    }

    /// `|V| - |E| + |F|`, equal to 2 for connected embeddings.
    pub fn euler_characteristic(&self) -> i64 {
        self.host.vertex_count() as i64 - self.host.edge_count() as i64 + self.faces.len() as i64
    }

    pub fn is_connected(&self) -> bool {
        self.host.is_connected()
    }
}

fn tail(host: &MultiGraph, d: Dart) -> VertexId {
    let (a, b) = host.endpoints(dart_edge(d));
    if d.is_multiple_of(2) {
        a
    } else {
        b
    }
}

/// The side x side grid, with neighbours in counterclockwise order east,
/// north, west, south. Vertex `(x, y)` has index `x + side * y` and the outer
/// face is the unbounded one.
pub fn embed_grid(side: usize) -> Result<PlaneEmbedding> {
    if side == 0 {
        return Err(Error::InvalidArgument("grid side must be positive".into()));
    }
    let host = grid_box(2, side, GridTopology::Free)?;
    let mut lookup: HashMap<(usize, usize), EdgeId> = HashMap::new();
    for e in host.edges() {
        let (a, b) = host.endpoints(e);
        lookup.insert((a.0, b.0), e);
        lookup.insert((b.0, a.0), e);
    }
    let mut rotation = Vec::with_capacity(side * side);
    for v in 0..side * side {
        let (x, y) = (v % side, v / side);
        let mut ring = Vec::new();
        let around = [
            (x + 1 < side).then(|| v + 1),
            (y + 1 < side).then(|| v + side),
            (x > 0).then(|| v - 1),
            (y > 0).then(|| v - side),
        ];
        for w in around.into_iter().flatten() {
            ring.push(lookup[&(v, w)]);
        }
        rotation.push(ring);
    }
    let mut embedding = PlaneEmbedding::from_rotation(host, &rotation)?;
    if side >= 2 {
        // walking east along the bottom row keeps the outside on the right
        let outer = embedding.face_of(0);
        embedding.set_outer_face(outer)?;
    }
    Ok(embedding)
}

#[derive(Clone, Debug)]
pub struct DualPair {
    pub primal: PlaneEmbedding,
    /// Dual embedding; its vertices are the primal faces.
    pub dual: PlaneEmbedding,
    /// `edge_bijection[e]` is the dual edge crossing `e`.
    pub edge_bijection: Vec<EdgeId>,
}

impl DualPair {
    pub fn dual_graph(&self) -> &MultiGraph {
        self.dual.host()
    }

    /// Dual vertex standing for the outer face.
    pub fn outer_vertex(&self) -> VertexId {
        VertexId(self.primal.outer_face())
    }
}

/// One dual vertex per face; dual edge `e` joins the faces on the two sides
/// of `e`. Dart `d` of the dual leaves the face of primal dart `d`.
pub fn dual_graph(embedding: &PlaneEmbedding) -> Result<DualPair> {
    if !embedding.is_connected() {
        return Err(Error::Disconnected);
    }
    let host = embedding.host();
    let edges: Vec<(usize, usize)> = host
        .edges()
        .map(|e| (embedding.face_of(2 * e.0), embedding.face_of(2 * e.0 + 1)))
        .collect();
    let dual_host = MultiGraph::new(embedding.face_count(), &edges)?;
    let rotation = embedding.faces().to_vec();
    let dual = PlaneEmbedding::from_darts(dual_host, rotation)?;
    Ok(DualPair {
        primal: embedding.clone(),
        dual,
        edge_bijection: host.edges().collect(),
    })
}

/// `{e† : e ∉ forest}`.
pub fn forest_complement_dual(pair: &DualPair, forest: &ForestMask) -> ForestMask {
    let mut out = ForestMask::empty(pair.dual_graph().edge_count());
    for e in pair.primal.host().edges() {
        if !forest.contains(e) {
            out.insert(pair.edge_bijection[e.0]);
        }
    }
    out
}

pub fn dual_labeling(pair: &DualPair, labels: &Labeling) -> Result<Labeling> {
    labels.dual(&pair.edge_bijection)
}

/// Whether the duals of the edges outside the primal minimal spanning tree
/// form the minimal spanning tree of the dual under the reversed labels.
pub fn verify_tree_duality(pair: &DualPair, labels: &Labeling) -> Result<bool> {
    let tree = kruskal_mst(pair.primal.host(), labels);
    let dual_labels = dual_labeling(pair, labels)?;
    let dual_tree = kruskal_mst(pair.dual_graph(), &dual_labels);
    Ok(forest_complement_dual(pair, &tree) == dual_tree)
}

/// Carries a primal `Z_f` value to the dual: the attaining edge crosses
/// over, and bridges and loops trade places.
pub fn transfer_z(pair: &DualPair, z: ZValue) -> ZValue {
    match z {
        ZValue::Edge(f) => ZValue::Edge(pair.edge_bijection[f.0]),
        ZValue::Infinite => ZValue::Bottom,
        ZValue::Bottom => ZValue::Infinite,
        ZValue::One => ZValue::One,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DualSummary {
    pub faces: usize,
    pub outer_face: usize,
    pub dual_vertices: usize,
    pub dual_edges: usize,
    pub dual_loops: usize,
}

pub fn summarize(pair: &DualPair) -> DualSummary {
    let g = pair.dual_graph();
    DualSummary {
        faces: pair.primal.face_count(),
        outer_face: pair.primal.outer_face(),
        dual_vertices: g.vertex_count(),
        dual_edges: g.edge_count(),
        dual_loops: g.edges().filter(|&e| g.is_loop(e)).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::z_free_all;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_faces() {
        let e = embed_grid(2).unwrap();
        assert_eq!(
            (e.host().vertex_count(), e.host().edge_count(), e.face_count()),
            (4, 4, 2)
        );
        let e = embed_grid(3).unwrap();
        assert_eq!(e.face_count(), 5);
        assert_eq!(e.euler_characteristic(), 2);
        assert_eq!(e.faces()[e.outer_face()].len(), 8);
        for face in e.faces() {
            // consecutive darts chain head to tail
            for (i, &d) in face.iter().enumerate() {
                let nxt = face[(i + 1) % face.len()];
                assert_eq!(tail(e.host(), reverse(d)), tail(e.host(), nxt));
            }
        }
        let e = embed_grid(1).unwrap();
        assert_eq!(e.face_count(), 1);
        assert_eq!(e.euler_characteristic(), 2);
    }

    #[test]
    fn dual_examples() {
        let pair = dual_graph(&embed_grid(2).unwrap()).unwrap();
        assert_eq!(pair.dual_graph().vertex_count(), 2);
        assert_eq!(pair.dual_graph().edge_count(), 4);
        assert!(pair.dual_graph().edges().all(|e| !pair.dual_graph().is_loop(e)));

        // a bridge dualizes to a loop
        let g = MultiGraph::new(2, &[(0, 1)]).unwrap();
        let emb = PlaneEmbedding::from_rotation(g, &[vec![EdgeId(0)], vec![EdgeId(0)]]).unwrap();
        let pair = dual_graph(&emb).unwrap();
        assert_eq!(pair.dual_graph().vertex_count(), 1);
        assert!(pair.dual_graph().is_loop(EdgeId(0)));

        for side in 2..7 {
            let pair = dual_graph(&embed_grid(side).unwrap()).unwrap();
            let double = dual_graph(&pair.dual).unwrap();
            assert_eq!(double.dual_graph().vertex_count(), side * side);
            assert_eq!(pair.dual.euler_characteristic(), 2);
        }

        let g = MultiGraph::new(3, &[(0, 1)]).unwrap();
        let emb = PlaneEmbedding::from_rotation(g, &[vec![EdgeId(0)], vec![EdgeId(0)], vec![]]).unwrap();
        assert!(matches!(dual_graph(&emb), Err(Error::Disconnected)));
    }

    #[test]
    fn loops_in_rotations() {
        // a vertex with a loop and a pendant edge
        let g = MultiGraph::new(2, &[(0, 0), (0, 1)]).unwrap();
        let emb = PlaneEmbedding::from_rotation(g, &[vec![EdgeId(0), EdgeId(0), EdgeId(1)], vec![EdgeId(1)]]).unwrap();
        assert_eq!(emb.euler_characteristic(), 2);
        let pair = dual_graph(&emb).unwrap();
        assert!(pair.dual_graph().is_loop(EdgeId(1)));
        assert!(!pair.dual_graph().is_loop(EdgeId(0)));
    }

    #[test]
    fn rejects_bad_rotations() {
        let g = MultiGraph::new(2, &[(0, 1)]).unwrap();
        assert!(PlaneEmbedding::from_rotation(g.clone(), &[vec![EdgeId(0)], vec![]]).is_err());
        assert!(PlaneEmbedding::from_darts(g, vec![vec![1], vec![0]]).is_err());
    }

    #[test]
    fn complement_dual_examples() {
        let pair = dual_graph(&embed_grid(3).unwrap()).unwrap();
        let m = pair.primal.host().edge_count();
        assert!(forest_complement_dual(&pair, &ForestMask::full(m)).is_empty());
        assert_eq!(forest_complement_dual(&pair, &ForestMask::empty(m)).len(), m);
        let half = ForestMask::from_predicate(m, |e| e.0 % 2 == 0);
        assert_eq!(half.len() + forest_complement_dual(&pair, &half).len(), m);
    }

    #[test]
    fn triangle_duality_by_hand() {
        let g = MultiGraph::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let rotation = [
            vec![EdgeId(0), EdgeId(2)],
            vec![EdgeId(1), EdgeId(0)],
            vec![EdgeId(2), EdgeId(1)],
        ];
        let pair = dual_graph(&PlaneEmbedding::from_rotation(g, &rotation).unwrap()).unwrap();
        let u = Labeling::from_floats(vec![0.1, 0.2, 0.3]).unwrap();
        assert_eq!(pair.dual_graph().vertex_count(), 2);
        let u_dual = dual_labeling(&pair, &u).unwrap();
        let t = kruskal_mst(pair.dual_graph(), &u_dual);
        assert_eq!(t.to_vec(), vec![EdgeId(2)]);
        assert!(verify_tree_duality(&pair, &u).unwrap());
    }

    #[test]
    fn duality_on_grids_and_z_transfer() {
        for seed in 0..200u64 {
            let side = 2 + (seed % 6) as usize;
            let pair = dual_graph(&embed_grid(side).unwrap()).unwrap();
            let u = Labeling::sample(pair.primal.host(), seed);
            assert!(verify_tree_duality(&pair, &u).unwrap());
            let u_dual = dual_labeling(&pair, &u).unwrap();
            let zp = z_free_all(pair.primal.host(), &u);
            let zd = z_free_all(pair.dual_graph(), &u_dual);
            for e in pair.primal.host().edges() {
                assert_eq!(transfer_z(&pair, zp[e.0]), zd[pair.edge_bijection[e.0].0]);
                if let ZValue::Edge(f) = zp[e.0] {
                    let back = 1.0 - u_dual.value(pair.edge_bijection[f.0]);
                    assert_eq!(back, u.value(f));
                }
            }
        }
    }

    fn is_cycle(g: &MultiGraph, set: &[EdgeId]) -> bool {
        if set.is_empty() {
            return false;
        }
        let mut deg = vec![0; g.vertex_count()];
        for &e in set {
            let (a, b) = g.endpoints(e);
            deg[a.0] += 1;
            deg[b.0] += 1;
        }
        if deg.iter().any(|&d| d != 0 && d != 2) {
            return false;
        }
        let part = g.components(set);
        let touched: Vec<VertexId> = g.vertices().filter(|v| deg[v.0] > 0).collect();
        touched.iter().all(|&v| part.same(v, touched[0]))
    }

    fn is_bond(g: &MultiGraph, set: &[EdgeId]) -> bool {
        if set.is_empty() {
            return false;
        }
        let rest: Vec<EdgeId> = g.edges().filter(|e| !set.contains(e)).collect();
        let before = g.components_of(g.edges()).count();
        let after = g.components(&rest);
        after.count() == before + 1
            && set.iter().all(|&e| {
                let (a, b) = g.endpoints(e);
                !after.same(a, b)
            })
    }

    #[test]
    fn cycles_and_bonds_correspond() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let base = embed_grid(3).unwrap();
        for _ in 0..20 {
            // drop a few edges while staying connected
            let mut keep: Vec<EdgeId> = base.host().edges().collect();
            for _ in 0..rng.random_range(0..4) {
                let i = rng.random_range(0..keep.len());
                let trial: Vec<EdgeId> = keep.iter().copied().filter(|&e| e != keep[i]).collect();
                if base.host().components(&trial).count() == 1 {
                    keep = trial;
                }
            }
            let index: HashMap<EdgeId, EdgeId> = keep.iter().enumerate().map(|(i, &e)| (e, EdgeId(i))).collect();
            let edges: Vec<(usize, usize)> = keep
                .iter()
                .map(|&e| (base.host().endpoints(e).0 .0, base.host().endpoints(e).1 .0))
                .collect();
            let g = MultiGraph::new(9, &edges).unwrap();
            let rotation: Vec<Vec<EdgeId>> = base
                .rotation_edges()
                .iter()
                .map(|r| r.iter().filter_map(|e| index.get(e).copied()).collect())
                .collect();
            let pair = dual_graph(&PlaneEmbedding::from_rotation(g.clone(), &rotation).unwrap()).unwrap();
            let m = g.edge_count();
            for mask in 1u32..(1 << m) {
                let set: Vec<EdgeId> = (0..m).filter(|i| mask >> i & 1 == 1).map(EdgeId).collect();
                let dual_set: Vec<EdgeId> = set.iter().map(|e| pair.edge_bijection[e.0]).collect();
                assert_eq!(is_cycle(&g, &set), is_bond(pair.dual_graph(), &dual_set));
            }
        }
    }
}
