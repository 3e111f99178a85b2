use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, MultiGraph};

/// A subset of the edges of a host graph, stored as a membership bitmap over
/// the host's edge ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ForestMask {
    member: Vec<bool>,
}

impl ForestMask {
    pub fn empty(host_edges: usize) -> Self {
        Self {
            member: vec![false; host_edges],
        }
    }

    pub fn full(host_edges: usize) -> Self {
        Self {
            member: vec![true; host_edges],
        }
    }

    pub fn from_edges(host_edges: usize, edges: impl IntoIterator<Item = EdgeId>) -> Self {
        let mut mask = Self::empty(host_edges);
        for e in edges {
            mask.insert(e);
        }
        mask
    }

    pub fn from_predicate(host_edges: usize, mut keep: impl FnMut(EdgeId) -> bool) -> Self {
        Self {
            member: (0..host_edges).map(|i| keep(EdgeId(i))).collect(),
        }
    }

    pub fn host_edge_count(&self) -> usize {
        self.member.len()
    }

    /// Number of member edges.
    pub fn len(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.member.iter().any(|&m| m)
    }

    #[inline]
    pub fn contains(&self, e: EdgeId) -> bool {
        self.member[e.0]
    }

    pub fn insert(&mut self, e: EdgeId) {
        self.member[e.0] = true;
    }

    pub fn remove(&mut self, e: EdgeId) {
        self.member[e.0] = false;
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| EdgeId(i))
    }

    pub fn to_vec(&self) -> Vec<EdgeId> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &ForestMask) -> bool {
        self.member.iter().zip(&other.member).all(|(&a, &b)| !a || b)
    }

    fn zip_with(&self, other: &ForestMask, f: impl Fn(bool, bool) -> bool) -> ForestMask {
        assert_eq!(self.member.len(), other.member.len(), "masks over different hosts");
        ForestMask {
            member: self.member.iter().zip(&other.member).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn union(&self, other: &ForestMask) -> ForestMask {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &ForestMask) -> ForestMask {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &ForestMask) -> ForestMask {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &ForestMask) -> ForestMask {
        self.zip_with(other, |a, b| a != b)
    }

    pub fn complement(&self) -> ForestMask {
        ForestMask {
            member: self.member.iter().map(|&m| !m).collect(),
        }
    }

    /// No cycles, loops included.
    pub fn is_forest(&self, graph: &MultiGraph) -> bool {
        let mut uf = petgraph::unionfind::UnionFind::<usize>::new(graph.vertex_count());
        self.iter().all(|e| {
            let (u, v) = graph.endpoints(e);
            uf.union(u.0, v.0)
        })
    }

    /// Acyclic and connecting every component of the host.
    pub fn is_spanning_forest(&self, graph: &MultiGraph) -> bool {
        self.is_forest(graph) && graph.components_of(self.iter()).count() == graph.components_of(graph.edges()).count()
    }

    pub fn is_spanning_tree(&self, graph: &MultiGraph) -> bool {
        self.is_spanning_forest(graph) && graph.is_connected()
    }

    /// Number of vertices joined to each vertex by member edges, loops counted twice.
    pub fn degrees(&self, graph: &MultiGraph) -> Vec<usize> {
        let mut deg = vec![0; graph.vertex_count()];
        for e in self.iter() {
            let (u, v) = graph.endpoints(e);
            deg[u.0] += 1;
            deg[v.0] += 1;
        }
        deg
    }
}
