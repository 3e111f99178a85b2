//! Exact probabilities under the minimal spanning tree measure.
//!
//! With `N(F)` the number of edges that are not loops once `F` is
//! contracted, the probability of a spanning tree `T = {e_1, .., e_n}` is the
//! sum over orderings of `T` of `1 / prod_j N({e_1, .., e_j})`. The factors
//! depend only on prefix sets, so the sum is evaluated over the subset
//! lattice of `T`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::kruskal_mst;
use crate::graph::{EdgeId, MultiGraph};
use crate::labeling::Labeling;
use crate::rng::derive_seed;

/// Default bound on tree size for [`mst_probability`].
pub const TREE_EDGE_LIMIT: usize = 10;
/// Bound on edge count for the ordering oracles.
pub const ORACLE_EDGE_LIMIT: usize = 11;
/// Bound on edge count for spanning tree enumeration.
pub const ENUMERATION_EDGE_LIMIT: usize = 24;

fn sorted_tree(graph: &MultiGraph, tree: &[EdgeId]) -> Result<Vec<EdgeId>> {
    for &e in tree {
        graph.check_edge(e)?;
    }
    let mut t = tree.to_vec();
    t.sort();
    t.dedup();
    let n = graph.vertex_count();
    if t.len() != tree.len() || t.len() + 1 != n.max(1) {
        return Err(Error::NotSpanningTree);
    }
    let mut uf = UnionFind::<usize>::new(n);
    for &e in &t {
        let (a, b) = graph.endpoints(e);
        if !uf.union(a.0, b.0) {
            return Err(Error::NotSpanningTree);
        }
    }
    Ok(t)
}

fn subset_edges(tree: &[EdgeId], mask: usize) -> Vec<EdgeId> {
    (0..tree.len())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| tree[i])
        .collect()
}

pub fn mst_probability(graph: &MultiGraph, tree: &[EdgeId]) -> Result<BigRational> {
    mst_probability_limited(graph, tree, TREE_EDGE_LIMIT)
}

pub fn mst_probability_limited(graph: &MultiGraph, tree: &[EdgeId], limit: usize) -> Result<BigRational> {
    let t = sorted_tree(graph, tree)?;
    let n = t.len();
    if n > limit {
        return Err(Error::TooLarge {
            what: "tree",
            size: n,
            limit,
        });
    }
    let full = (1usize << n) - 1;
    // a proper subset of a spanning tree always leaves a non-loop edge
    let inverse_n: Vec<BigRational> = (0..full)
        .map(|mask| {
            let count = graph.non_loop_count(&subset_edges(&t, mask));
            BigRational::new(BigInt::one(), BigInt::from(count))
        })
        .collect();
    let mut g = vec![BigRational::zero(); full + 1];
    g[0] = BigRational::one();
    for mask in 1..=full {
        let mut acc = BigRational::zero();
        for i in 0..n {
            if mask >> i & 1 == 1 {
                let rest = mask & !(1 << i);
                acc += &g[rest] * &inverse_n[rest];
            }
        }
        g[mask] = acc;
    }
    Ok(g.swap_remove(full))
}

/// The defining sum over all `n!` orderings of the tree, term by term.
pub fn mst_probability_by_permutations(graph: &MultiGraph, tree: &[EdgeId]) -> Result<BigRational> {
    let mut t = sorted_tree(graph, tree)?;
    if t.len() > 8 {
        return Err(Error::TooLarge {
            what: "permutation sum",
            size: t.len(),
            limit: 8,
        });
    }
    fn heap(k: usize, t: &mut Vec<EdgeId>, graph: &MultiGraph, total: &mut BigRational) {
        if k <= 1 {
            let mut denom = BigInt::one();
            for j in 0..t.len() {
                denom *= graph.non_loop_count(&t[..j]);
            }
            *total += BigRational::new(BigInt::one(), denom);
            return;
        }
        for i in 0..k {
            heap(k - 1, t, graph, total);
            if k.is_multiple_of(2) {
                t.swap(i, k - 1);
            } else {
                t.swap(0, k - 1);
            }
        }
    }
    let mut total = BigRational::zero();
    let k = t.len();
    heap(k, &mut t, graph, &mut total);
    Ok(total)
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

fn check_oracle_size(graph: &MultiGraph) -> Result<()> {
    if graph.edge_count() > ORACLE_EDGE_LIMIT {
        return Err(Error::TooLarge {
            what: "ordering oracle",
            size: graph.edge_count(),
            limit: ORACLE_EDGE_LIMIT,
        });
    }
    Ok(())
}

/// Fraction of the `|E|!` edge orderings whose Kruskal tree is `tree`.
///
/// Orderings are explored prefix by prefix. A prefix is abandoned as soon as
/// Kruskal accepts an edge outside `tree`; once the tree is complete every
/// ordering of the remaining edges counts.
pub fn mst_probability_oracle(graph: &MultiGraph, tree: &[EdgeId]) -> Result<BigRational> {
    check_oracle_size(graph)?;
    let t = sorted_tree(graph, tree)?;
    let m = graph.edge_count();
    let mut in_tree = vec![false; m];
    for &e in &t {
        in_tree[e.0] = true;
    }
    let fact: Vec<u64> = (0..=m).map(factorial).collect();

    struct Walk<'a> {
        graph: &'a MultiGraph,
        in_tree: &'a [bool],
        fact: &'a [u64],
        needed: usize,
    }
    impl Walk<'_> {
        fn count(&self, used: u32, placed: usize, accepted: usize, comp: &mut Vec<usize>) -> u64 {
            let m = self.in_tree.len();
            if accepted == self.needed {
                return self.fact[m - placed];
            }
            let mut total = 0;
            for e in 0..m {
                if used >> e & 1 == 1 {
                    continue;
                }
                let (a, b) = self.graph.endpoints(EdgeId(e));
                let (ca, cb) = (comp[a.0], comp[b.0]);
                if ca == cb {
                    total += self.count(used | 1 << e, placed + 1, accepted, comp);
                } else if self.in_tree[e] {
                    let saved = comp.clone();
                    for c in comp.iter_mut() {
                        if *c == cb {
                            *c = ca;
                        }
                    }
                    total += self.count(used | 1 << e, placed + 1, accepted + 1, comp);
                    *comp = saved;
                }
            }
            total
        }
    }

    let walk = Walk {
        graph,
        in_tree: &in_tree,
        fact: &fact,
        needed: t.len(),
    };
    let mut comp: Vec<usize> = (0..graph.vertex_count()).collect();
    let hits = walk.count(0, 0, 0, &mut comp);
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(fact[m])))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeCatalog {
    pub trees: Vec<Vec<EdgeId>>,
    #[serde(serialize_with = "serialize_rationals")]
    pub probabilities: Vec<BigRational>,
}

fn serialize_rationals<S: serde::Serializer>(values: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(values.iter().map(rational_string))
}

/// `p/q` text of a rational.
pub fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

impl TreeCatalog {
    pub fn total(&self) -> BigRational {
        self.probabilities.iter().fold(BigRational::zero(), |acc, p| acc + p)
    }

    pub fn probability_of(&self, tree: &[EdgeId]) -> Option<&BigRational> {
        let mut key = tree.to_vec();
        key.sort();
        self.trees
            .iter()
            .position(|t| *t == key)
            .map(|i| &self.probabilities[i])
    }

    /// Probability of the trees containing every `required` edge and no
    /// `forbidden` edge.
    pub fn event(&self, required: &[EdgeId], forbidden: &[EdgeId]) -> BigRational {
        self.trees
            .iter()
            .zip(&self.probabilities)
            .filter(|(t, _)| required.iter().all(|e| t.contains(e)) && !forbidden.iter().any(|e| t.contains(e)))
            .fold(BigRational::zero(), |acc, (_, p)| acc + p)
    }

    /// Trees grouped by probability, as (probability, count) in increasing order.
    pub fn classes(&self) -> Vec<(BigRational, usize)> {
        let mut map: BTreeMap<BigRational, usize> = BTreeMap::new();
        for p in &self.probabilities {
            *map.entry(p.clone()).or_default() += 1;
        }
        map.into_iter().collect()
    }
}

/// All spanning trees as sorted edge lists, in lexicographic order. Parallel
/// edges give distinct trees.
pub fn enumerate_spanning_trees(graph: &MultiGraph) -> Result<Vec<Vec<EdgeId>>> {
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    if graph.edge_count() > ENUMERATION_EDGE_LIMIT {
        return Err(Error::TooLarge {
            what: "spanning tree enumeration",
            size: graph.edge_count(),
            limit: ENUMERATION_EDGE_LIMIT,
        });
    }
    let needed = graph.vertex_count().saturating_sub(1);
    let mut out = Vec::new();

    fn grow(
        graph: &MultiGraph,
        next: usize,
        needed: usize,
        chosen: &mut Vec<EdgeId>,
        comp: &mut Vec<usize>,
        out: &mut Vec<Vec<EdgeId>>,
    ) {
        if chosen.len() == needed {
            out.push(chosen.clone());
            return;
        }
        if graph.edge_count() - next < needed - chosen.len() {
            return;
        }
        let e = EdgeId(next);
        let (a, b) = graph.endpoints(e);
        let (ca, cb) = (comp[a.0], comp[b.0]);
        if ca != cb {
            let saved = comp.clone();
            for c in comp.iter_mut() {
                if *c == cb {
                    *c = ca;
                }
            }
            chosen.push(e);
            grow(graph, next + 1, needed, chosen, comp, out);
            chosen.pop();
            *comp = saved;
        }
        grow(graph, next + 1, needed, chosen, comp, out);
    }

    let mut comp: Vec<usize> = graph.vertices().map(|v| v.0).collect();
    grow(graph, 0, needed, &mut Vec::new(), &mut comp, &mut out);
    Ok(out)
}

/// Every spanning tree with its probability, from the subset-lattice sum.
pub fn tree_catalog(graph: &MultiGraph) -> Result<TreeCatalog> {
    let trees = enumerate_spanning_trees(graph)?;
    let probabilities = trees
        .par_iter()
        .map(|t| mst_probability(graph, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(TreeCatalog { trees, probabilities })
}

/// Every spanning tree with its probability, by running Kruskal on each of
/// the `|E|!` orderings of the edges.
pub fn ordering_catalog(graph: &MultiGraph) -> Result<TreeCatalog> {
    check_oracle_size(graph)?;
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let m = graph.edge_count();
    let n = graph.vertex_count();
    let endpoints: Vec<(usize, usize)> = graph.edge_list();

    // split by the first edge of the ordering
    let partial: Vec<BTreeMap<u32, u64>> = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut counts = BTreeMap::new();
            let mut rest: Vec<usize> = (0..m).filter(|&e| e != first).collect();
            let mut order = Vec::with_capacity(m);
            loop {
                order.clear();
                order.push(first);
                order.extend_from_slice(&rest);
                let mut comp: Vec<usize> = (0..n).collect();
                let mut tree = 0u32;
                for &e in &order {
                    let (a, b) = endpoints[e];
                    let (ca, cb) = (comp[a], comp[b]);
                    if ca != cb {
                        for c in comp.iter_mut() {
                            if *c == cb {
                                *c = ca;
                            }
                        }
                        tree |= 1 << e;
                    }
                }
                *counts.entry(tree).or_insert(0) += 1;
                if !next_permutation(&mut rest) {
                    break;
                }
            }
            counts
        })
        .collect();

    let mut counts: BTreeMap<Vec<EdgeId>, u64> = BTreeMap::new();
    for part in partial {
        for (bits, c) in part {
            let tree: Vec<EdgeId> = (0..m).filter(|e| bits >> e & 1 == 1).map(EdgeId).collect();
            *counts.entry(tree).or_insert(0) += c;
        }
    }
    let total = BigInt::from(factorial(m));
    let (trees, probabilities) = counts
        .into_iter()
        .map(|(t, c)| (t, BigRational::new(BigInt::from(c), total.clone())))
        .unzip();
    Ok(TreeCatalog { trees, probabilities })
}

/// Lexicographic successor in place; false after the last permutation.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Probability that the tree contains `required` and avoids `forbidden`.
pub fn edge_event_probability(graph: &MultiGraph, required: &[EdgeId], forbidden: &[EdgeId]) -> Result<BigRational> {
    for &e in required.iter().chain(forbidden) {
        graph.check_edge(e)?;
    }
    Ok(tree_catalog(graph)?.event(required, forbidden))
}

/// The complete graph on four vertices with two disjoint edges each tripled.
#[derive(Clone, Debug)]
pub struct CorrelationExample {
    pub graph: MultiGraph,
    /// `e1 .. e6`: `e1, e2` from the tripled classes, `e3, e4` disjoint,
    /// `e1, e3, e5` meeting at vertex 0.
    pub named: [EdgeId; 6],
    /// The two companions of `e1`, then the two of `e2`.
    pub companions: [EdgeId; 4],
}

impl CorrelationExample {
    /// Edge `e_i` for `i` in `1..=6`.
    pub fn e(&self, i: usize) -> EdgeId {
        self.named[i - 1]
    }
}

pub fn build_correlation_example() -> CorrelationExample {
    let graph = MultiGraph::new(
        4,
        &[
            (0, 1),
            (2, 3),
            (0, 2),
            (1, 3),
            (0, 3),
            (1, 2),
            (0, 1),
            (0, 1),
            (2, 3),
            (2, 3),
        ],
    )
    .expect("valid edge list");
    CorrelationExample {
        graph,
        named: [0, 1, 2, 3, 4, 5].map(EdgeId),
        companions: [6, 7, 8, 9].map(EdgeId),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrelationReport {
    #[serde(serialize_with = "serialize_rational")]
    pub first: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub second: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub joint: BigRational,
    /// `joint / (first * second)`.
    #[serde(serialize_with = "serialize_rational")]
    pub ratio: BigRational,
}

fn serialize_rational<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(q))
}

impl CorrelationReport {
    pub fn positively_correlated(&self) -> bool {
        self.ratio > BigRational::one()
    }
}

pub fn edge_correlation(catalog: &TreeCatalog, a: EdgeId, b: EdgeId) -> Result<CorrelationReport> {
    let first = catalog.event(&[a], &[]);
    let second = catalog.event(&[b], &[]);
    let joint = catalog.event(&[a, b], &[]);
    if first.is_zero() || second.is_zero() {
        return Err(Error::InvalidArgument("edge never appears in a tree".into()));
    }
    let ratio = &joint / (&first * &second);
    Ok(CorrelationReport {
        first,
        second,
        joint,
        ratio,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Frequency {
    pub hits: usize,
    pub trials: usize,
    pub estimate: f64,
    pub stderr: f64,
}

impl Frequency {
    pub fn from_hits(hits: usize, trials: usize) -> Self {
        let p = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        let stderr = if trials == 0 {
            0.0
        } else {
            (p * (1.0 - p) / trials as f64).sqrt()
        };
        Self {
            hits,
            trials,
            estimate: p,
            stderr,
        }
    }
}

/// Frequency of `kruskal_mst = tree` over independent labelings.
pub fn monte_carlo_tree_frequency(graph: &MultiGraph, tree: &[EdgeId], trials: usize, seed: u64) -> Result<Frequency> {
    let mut t = tree.to_vec();
    for &e in &t {
        graph.check_edge(e)?;
    }
    t.sort();
    let hits = (0..trials as u64)
        .into_par_iter()
        .filter(|&i| {
            let u = Labeling::sample(graph, derive_seed(seed, i));
            kruskal_mst(graph, &u).to_vec() == t
        })
        .count();
    Ok(Frequency::from_hits(hits, trials))
}

/// A tree of `G - e` whose probability given `e ∉ T` differs from its
/// probability under the measure of `G - e`.
#[derive(Clone, Debug, Serialize)]
pub struct DeletionExhibit {
    pub deleted: EdgeId,
    /// Tree edges, in the ids of `G`.
    pub tree: Vec<EdgeId>,
    #[serde(serialize_with = "serialize_rational")]
    pub conditional: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub deleted_graph: BigRational,
}

/// Searches the edges and trees of `graph` for a [`DeletionExhibit`].
pub fn deletion_exhibit(graph: &MultiGraph) -> Result<Option<DeletionExhibit>> {
    let catalog = tree_catalog(graph)?;
    for e in graph.edges() {
        let kept: Vec<EdgeId> = graph.edges().filter(|&f| f != e).collect();
        let minor = MultiGraph::new(
            graph.vertex_count(),
            &kept
                .iter()
                .map(|&f| (graph.endpoints(f).0 .0, graph.endpoints(f).1 .0))
                .collect::<Vec<_>>(),
        )?;
        if !minor.is_connected() {
            continue;
        }
        let avoid = catalog.event(&[], &[e]);
        let minor_catalog = tree_catalog(&minor)?;
        for (t, p) in minor_catalog.trees.iter().zip(&minor_catalog.probabilities) {
            let original: Vec<EdgeId> = t.iter().map(|f| kept[f.0]).collect();
            let joint = catalog
                .probability_of(&original)
                .cloned()
                .unwrap_or_else(BigRational::zero);
            let conditional = joint / &avoid;
            if &conditional != p {
                return Ok(Some(DeletionExhibit {
                    deleted: e,
                    tree: original,
                    conditional,
                    deleted_graph: p.clone(),
                }));
            }
        }
    }
    Ok(None)
}

pub fn complete_graph(n: usize) -> MultiGraph {
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    MultiGraph::new(n, &edges).expect("valid edge list")
}
