//! Finite multigraphs with stable edge identities.
//!
//! Loops and parallel edges are allowed. A loop is stored once in a per-vertex
//! loop list rather than twice in the adjacency list, and counts twice towards
//! the degree of its vertex. Graphs are immutable once built: contraction and
//! wired quotients produce new graphs together with the tables that map
//! vertices and edges back to the original.

mod generators;

pub use generators::{
    grid_box, half_plane_strip, lattice_ball, random_connected_multigraph, random_multigraph, GridTopology, LatticeBall,
};

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tag conventionally attached to the outer surface of generated boxes.
pub const BOUNDARY_TAG: &str = "boundary";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    endpoints: Vec<(VertexId, VertexId)>,
    /// Non-loop incidences `(edge, other endpoint)`.
    adjacency: Vec<Vec<(EdgeId, VertexId)>>,
    loops: Vec<Vec<EdgeId>>,
    tags: BTreeMap<String, Vec<VertexId>>,
}

impl MultiGraph {
    /// Builds a graph whose edges are numbered in input order.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut loops = vec![Vec::new(); vertex_count];
        let mut endpoints = Vec::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        count: vertex_count,
                    });
                }
            }
            let e = EdgeId(i);
            if u == v {
                loops[u].push(e);
            } else {
                adjacency[u].push((e, VertexId(v)));
                adjacency[v].push((e, VertexId(u)));
            }
            endpoints.push((VertexId(u), VertexId(v)));
        }
        Ok(Self {
            endpoints,
            adjacency,
            loops,
            tags: BTreeMap::new(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = EdgeId> {
        (0..self.edge_count()).map(EdgeId)
    }

    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.endpoints[e.0]
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.endpoints.iter().map(|&(u, v)| (u.0, v.0)).collect()
    }

    #[inline]
    pub fn is_loop(&self, e: EdgeId) -> bool {
        let (u, v) = self.endpoints[e.0];
        u == v
    }

    /// Non-loop incidences of `v` as `(edge, neighbour)` pairs.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        &self.adjacency[v.0]
    }

    pub fn loops_at(&self, v: VertexId) -> &[EdgeId] {
        &self.loops[v.0]
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.0].len() + 2 * self.loops[v.0].len()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v.0 < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v.0,
                count: self.vertex_count(),
            })
        }
    }

    pub fn check_edge(&self, e: EdgeId) -> Result<()> {
        if e.0 < self.edge_count() {
            Ok(())
        } else {
            Err(Error::UnknownEdge(e))
        }
    }

    pub fn tags(&self) -> &BTreeMap<String, Vec<VertexId>> {
        &self.tags
    }

    pub fn tagged(&self, tag: &str) -> Option<&[VertexId]> {
        self.tags.get(tag).map(Vec::as_slice)
    }

    /// Attaches a vertex tag, replacing any previous set under the same name.
    pub fn with_tag(mut self, tag: impl Into<String>, mut vertices: Vec<VertexId>) -> Result<Self> {
        for &v in &vertices {
            self.check_vertex(v)?;
        }
        vertices.sort_unstable();
        vertices.dedup();
        self.tags.insert(tag.into(), vertices);
        Ok(self)
    }

    /// Identifies the endpoints of every edge in `contracted`.
    ///
    /// Edge identities are preserved; contracted edges, and any edge whose
    /// endpoints end up in the same class, become loops.
    pub fn contract(&self, contracted: &[EdgeId]) -> Result<Contraction> {
        for &e in contracted {
            self.check_edge(e)?;
        }
        let classes = self.components_of(contracted.iter().copied());
        let mut class_index = vec![usize::MAX; self.vertex_count()];
        let mut vertex_map = Vec::with_capacity(self.vertex_count());
        let mut next = 0;
        for v in self.vertices() {
            let r = classes.find(v).0;
            if class_index[r] == usize::MAX {
                class_index[r] = next;
                next += 1;
            }
            vertex_map.push(VertexId(class_index[r]));
        }
        let edges: Vec<(usize, usize)> = self
            .endpoints
            .iter()
            .map(|&(u, v)| (vertex_map[u.0].0, vertex_map[v.0].0))
            .collect();
        let graph = MultiGraph::new(next, &edges)?;
        Ok(Contraction { graph, vertex_map })
    }

    /// Number of edges that do not become loops once `contracted` is contracted.
    pub fn non_loop_count(&self, contracted: &[EdgeId]) -> usize {
        let partition = self.components_of(contracted.iter().copied());
        self.endpoints.iter().filter(|&&(u, v)| !partition.same(u, v)).count()
    }

    /// Edges with exactly one endpoint in `side`.
    pub fn edge_cut(&self, side: &[VertexId]) -> Vec<EdgeId> {
        let mut inside = vec![false; self.vertex_count()];
        for &v in side {
            inside[v.0] = true;
        }
        self.edges()
            .filter(|&e| {
                let (u, v) = self.endpoints(e);
                inside[u.0] != inside[v.0]
            })
            .collect()
    }

    /// Connected components of the spanning subgraph `(V, keep)`.
    pub fn components(&self, keep: &[EdgeId]) -> Partition {
        self.components_of(keep.iter().copied())
    }

    pub fn components_of(&self, keep: impl IntoIterator<Item = EdgeId>) -> Partition {
        let mut uf = UnionFind::<usize>::new(self.vertex_count());
        for e in keep {
            let (u, v) = self.endpoints(e);
            uf.union(u.0, v.0);
        }
        Partition::from_union_find(uf)
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() <= 1 || self.components_of(self.edges()).count() == 1
    }

    /// Vertices reachable from `start` using only edges accepted by `allowed`.
    pub fn reachable(&self, start: VertexId, mut allowed: impl FnMut(EdgeId) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([start]);
        seen[start.0] = true;
        while let Some(v) = queue.pop_front() {
            for &(e, w) in self.neighbors(v) {
                if !seen[w.0] && allowed(e) {
                    seen[w.0] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Merges `boundary` into a single wired vertex and drops the edges that
    /// would become loops there.
    ///
    /// Surviving vertices keep their relative order and the wired vertex is
    /// appended last. Surviving edges keep their relative order.
    pub fn wired_quotient(&self, boundary: &[VertexId]) -> Result<WiredQuotient> {
        if boundary.is_empty() {
            return Err(Error::EmptyBoundary);
        }
        let mut wired_set = vec![false; self.vertex_count()];
        for &b in boundary {
            self.check_vertex(b)?;
            wired_set[b.0] = true;
        }
        let interior = wired_set.iter().filter(|&&w| !w).count();
        let wired = VertexId(interior);
        let mut next = 0;
        let vertex_map: Vec<VertexId> = wired_set
            .iter()
            .map(|&w| {
                if w {
                    wired
                } else {
                    next += 1;
                    VertexId(next - 1)
                }
            })
            .collect();

        let mut edge_map = vec![None; self.edge_count()];
        let mut original_edges = Vec::new();
        let mut edges = Vec::new();
        for e in self.edges() {
            let (u, v) = self.endpoints(e);
            if wired_set[u.0] && wired_set[v.0] {
                continue;
            }
            edge_map[e.0] = Some(EdgeId(edges.len()));
            original_edges.push(e);
            edges.push((vertex_map[u.0].0, vertex_map[v.0].0));
        }
        let graph = MultiGraph::new(interior + 1, &edges)?;
        Ok(WiredQuotient {
            graph,
            wired,
            vertex_map,
            edge_map,
            original_edges,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: MultiGraph,
    /// Original vertex to contracted vertex.
    pub vertex_map: Vec<VertexId>,
}

#[derive(Clone, Debug)]
pub struct WiredQuotient {
    pub graph: MultiGraph,
    pub wired: VertexId,
    /// Original vertex to quotient vertex.
    pub vertex_map: Vec<VertexId>,
    /// Original edge to quotient edge, `None` when dropped.
    pub edge_map: Vec<Option<EdgeId>>,
    /// Quotient edge to original edge.
    pub original_edges: Vec<EdgeId>,
}

impl WiredQuotient {
    pub fn quotient_edge(&self, e: EdgeId) -> Result<EdgeId> {
        self.edge_map
            .get(e.0)
            .copied()
            .ok_or(Error::UnknownEdge(e))?
            .ok_or(Error::EdgeDropped(e))
    }

    pub fn original_edge(&self, e: EdgeId) -> EdgeId {
        self.original_edges[e.0]
    }
}

/// Component labelling; every vertex maps to the representative of its class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    representative: Vec<VertexId>,
}

impl Partition {
    fn from_union_find(uf: UnionFind<usize>) -> Self {
        Self {
            representative: uf.into_labeling().into_iter().map(VertexId).collect(),
        }
    }

    #[inline]
    pub fn find(&self, v: VertexId) -> VertexId {
        self.representative[v.0]
    }

    #[inline]
    pub fn same(&self, u: VertexId, v: VertexId) -> bool {
        self.representative[u.0] == self.representative[v.0]
    }

    pub fn count(&self) -> usize {
        self.representative
            .iter()
            .enumerate()
            .filter(|&(i, r)| r.0 == i)
            .count()
    }

    /// Classes ordered by smallest member, members ascending.
    pub fn classes(&self) -> Vec<Vec<VertexId>> {
        let mut slot = vec![usize::MAX; self.representative.len()];
        let mut out: Vec<Vec<VertexId>> = Vec::new();
        for (i, r) in self.representative.iter().enumerate() {
            if slot[r.0] == usize::MAX {
                slot[r.0] = out.len();
                out.push(Vec::new());
            }
            out[slot[r.0]].push(VertexId(i));
        }
        out
    }

    /// Size of the class of each vertex's representative, indexed by representative.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.representative.len()];
        for r in &self.representative {
            sizes[r.0] += 1;
        }
        sizes
    }

    /// True when every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        (0..self.representative.len()).all(|i| {
            let v = VertexId(i);
            coarser.same(v, self.find(v))
        })
    }
}
