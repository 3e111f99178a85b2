//! Statistics over sampled forests: degrees, tree counts, coupling
//! residuals, the `xi` configuration, uniqueness scans and forest percolation.

use num_bigint::BigInt;
use num_rational::BigRational;
use petgraph::unionfind::UnionFind;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{kruskal_mst, wired_mst, z_free_all, ForestMask, ZValue};
use crate::graph::{grid_box, GridTopology, MultiGraph, VertexId, BOUNDARY_TAG};
use crate::invasion::{invasion_basin, invasion_basin_until, z_infinity_proxy_all};
use crate::labeling::Labeling;
use crate::rng::{derive_seed, stream};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeStats {
    /// `histogram[k]` vertices have forest degree `k`.
    pub histogram: Vec<usize>,
    #[serde(serialize_with = "crate::analysis::serialize_rational")]
    pub mean: BigRational,
}

pub(crate) fn serialize_rational<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", q.numer(), q.denom()))
}

/// Forest degrees, loops counted twice. The mean is `2 |forest| / |V|`.
pub fn degree_stats(graph: &MultiGraph, forest: &ForestMask) -> Result<DegreeStats> {
    if graph.vertex_count() == 0 {
        return Err(Error::InvalidArgument("graph has no vertices".into()));
    }
    let degrees = forest.degrees(graph);
    let mut histogram = vec![0; degrees.iter().max().map_or(0, |d| d + 1)];
    for d in &degrees {
        histogram[*d] += 1;
    }
    let total: usize = degrees.iter().sum();
    Ok(DegreeStats {
        histogram,
        mean: BigRational::new(BigInt::from(total), BigInt::from(graph.vertex_count())),
    })
}

/// Components of the forest on `V - exclude`; forest edges touching an
/// excluded vertex are ignored.
pub fn tree_count(graph: &MultiGraph, forest: &ForestMask, exclude: &[VertexId]) -> usize {
    let mut gone = vec![false; graph.vertex_count()];
    for v in exclude {
        gone[v.0] = true;
    }
    let mut uf = UnionFind::<usize>::new(graph.vertex_count());
    let mut count = gone.iter().filter(|&&g| !g).count();
    for e in forest.iter() {
        let (a, b) = graph.endpoints(e);
        if !gone[a.0] && !gone[b.0] && uf.union(a.0, b.0) {
            count -= 1;
        }
    }
    count
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl Estimate {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                stderr: f64::NAN,
                trials: 0,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            stderr: (var / n as f64).sqrt(),
            trials: n,
        }
    }
}

/// Frequency with which the invasion basins of `sources` are pairwise
/// vertex-disjoint. With a boundary the basins run in the wired quotient,
/// stop at the wired vertex, and the wired vertex itself is not compared.
pub fn disjoint_invasion_probability(
    graph: &MultiGraph,
    boundary: &[VertexId],
    sources: &[VertexId],
    trials: usize,
    seed: u64,
) -> Result<Estimate> {
    for (i, &s) in sources.iter().enumerate() {
        graph.check_vertex(s).map_err(|_| Error::BadSource(s))?;
        if sources[..i].contains(&s) {
            return Err(Error::InvalidArgument(format!("source {s} repeated")));
        }
    }
    let quotient = if boundary.is_empty() {
        None
    } else {
        let q = graph.wired_quotient(boundary)?;
        if let Some(&s) = sources.iter().find(|s| q.vertex_map[s.0] == q.wired) {
            return Err(Error::BadSource(s));
        }
        Some(q)
    };
    let outcomes: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let u = Labeling::sample(graph, derive_seed(seed, t));
            let masks: Vec<Vec<bool>> = match &quotient {
                None => sources
                    .iter()
                    .map(|&s| {
                        invasion_basin(graph, &u, s, usize::MAX)
                            .expect("checked source")
                            .vertex_mask(graph.vertex_count())
                    })
                    .collect(),
                Some(q) => {
                    let qu = u.pullback(&q.original_edges);
                    sources
                        .iter()
                        .map(|&s| {
                            let mut mask = invasion_basin_until(&q.graph, &qu, q.vertex_map[s.0], q.wired, usize::MAX)
                                .expect("checked source")
                                .vertex_mask(q.graph.vertex_count());
                            mask[q.wired.0] = false;
                            mask
                        })
                        .collect()
                }
            };
            let disjoint = (0..masks.len())
                .all(|i| (i + 1..masks.len()).all(|j| !masks[i].iter().zip(&masks[j]).any(|(&a, &b)| a && b)));
            if disjoint {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    Ok(Estimate::from_values(&outcomes))
}

/// The value of `Z_f` used in inequalities: a loop's empty path has maximum 0.
fn z_level(z: ZValue, labels: &Labeling) -> f64 {
    match z {
        ZValue::Bottom => 0.0,
        other => other.value(labels),
    }
}

/// `{e : 1 - U(e) >= (1 - eps)(1 - Z_f(e))}`; bridges always belong.
pub fn xi_sample(graph: &MultiGraph, labels: &Labeling, epsilon: f64) -> Result<ForestMask> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside [0, 1]")));
    }
    let z = z_free_all(graph, labels);
    Ok(ForestMask::from_predicate(graph.edge_count(), |e| match z[e.0] {
        ZValue::Infinite => true,
        ZValue::Edge(_) if z[e.0].admits(labels, e) => true,
        zv => 1.0 - labels.value(e) >= (1.0 - epsilon) * (1.0 - z_level(zv, labels)),
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct LawCheck {
    pub trials: usize,
    pub epsilon: f64,
    /// Per-edge inclusion frequency of the tree joined with Bernoulli noise.
    pub union_frequency: Vec<f64>,
    /// Per-edge inclusion frequency of `xi`.
    pub xi_frequency: Vec<f64>,
    /// Combined binomial standard error of each difference.
    pub stderr: Vec<f64>,
    pub max_discrepancy: f64,
    /// Largest difference in units of its standard error.
    pub max_z: f64,
    /// Distribution of the configuration size under each law.
    pub union_sizes: Vec<usize>,
    pub xi_sizes: Vec<usize>,
    /// Largest size-bin difference in units of its standard error.
    pub size_max_z: f64,
}

fn z_score(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff.abs() / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Compares the tree joined with independent Bernoulli(`eps`) edges against
/// `xi` drawn from fresh labels.
pub fn free_union_law_check(graph: &MultiGraph, epsilon: f64, trials: usize, seed: u64) -> Result<LawCheck> {
    if trials == 0 {
        return Err(Error::EmptySample);
    }
    let m = graph.edge_count();
    let samples: Vec<(ForestMask, ForestMask)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let u = Labeling::sample(graph, derive_seed(seed, 3 * t));
            let mut union = kruskal_mst(graph, &u);
            let mut noise = stream(derive_seed(seed, 3 * t + 1));
            for e in graph.edges() {
                if noise.random_bool(epsilon) {
                    union.insert(e);
                }
            }
            let fresh = Labeling::sample(graph, derive_seed(seed, 3 * t + 2));
            (union, xi_sample(graph, &fresh, epsilon).expect("checked epsilon"))
        })
        .collect();
    let mut union_count = vec![0usize; m];
    let mut xi_count = vec![0usize; m];
    let mut union_sizes = vec![0usize; m + 1];
    let mut xi_sizes = vec![0usize; m + 1];
    for (a, b) in &samples {
        for e in a.iter() {
            union_count[e.0] += 1;
        }
        for e in b.iter() {
            xi_count[e.0] += 1;
        }
        union_sizes[a.len()] += 1;
        xi_sizes[b.len()] += 1;
    }
    let n = trials as f64;
    let freq = |c: &[usize]| c.iter().map(|&x| x as f64 / n).collect::<Vec<_>>();
    let union_frequency = freq(&union_count);
    let xi_frequency = freq(&xi_count);
    let se = |p1: f64, p2: f64| (p1 * (1.0 - p1) / n + p2 * (1.0 - p2) / n).sqrt();
    let stderr: Vec<f64> = (0..m).map(|i| se(union_frequency[i], xi_frequency[i])).collect();
    let mut max_discrepancy = 0.0f64;
    let mut max_z = 0.0f64;
    for i in 0..m {
        let d = (union_frequency[i] - xi_frequency[i]).abs();
        max_discrepancy = max_discrepancy.max(d);
        max_z = max_z.max(z_score(d, stderr[i]));
    }
    let mut size_max_z = 0.0f64;
    for k in 0..=m {
        let (p1, p2) = (union_sizes[k] as f64 / n, xi_sizes[k] as f64 / n);
        size_max_z = size_max_z.max(z_score(p1 - p2, se(p1, p2)));
    }
    Ok(LawCheck {
        trials,
        epsilon,
        union_frequency,
        xi_frequency,
        stderr,
        max_discrepancy,
        max_z,
        union_sizes,
        xi_sizes,
        size_max_z,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualContext {
    Free,
    Wired,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualSample {
    pub values: Vec<f64>,
    pub context: ResidualContext,
}

impl ResidualSample {
    pub fn extend(&mut self, other: ResidualSample) {
        self.values.extend(other.values);
    }
}

/// `(1 - U(e)) / (1 - Z_f(e))` over edges outside the minimal spanning tree.
pub fn coupling_residuals_free(graph: &MultiGraph, labels: &Labeling) -> ResidualSample {
    let z = z_free_all(graph, labels);
    let values = graph
        .edges()
        .filter(|&e| z[e.0].is_finite() || z[e.0] == ZValue::Bottom)
        .filter(|&e| !z[e.0].admits(labels, e))
        .map(|e| (1.0 - labels.value(e)) / (1.0 - z_level(z[e.0], labels)))
        .collect();
    ResidualSample {
        values,
        context: ResidualContext::Free,
    }
}

/// `U(e) / Z_inf(e)` over the edges of the basin of infinity.
pub fn coupling_residuals_wired(
    graph: &MultiGraph,
    boundary: &[VertexId],
    labels: &Labeling,
) -> Result<ResidualSample> {
    let z = z_infinity_proxy_all(graph, boundary, labels)?;
    let values = graph
        .edges()
        .filter_map(|e| {
            let zv = z[e.0]?;
            zv.admits(labels, e).then(|| labels.value(e) / zv.value(labels))
        })
        .collect();
    Ok(ResidualSample {
        values,
        context: ResidualContext::Wired,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n: usize,
    pub alpha: f64,
    pub critical: f64,
    pub p_value: f64,
    pub pass: bool,
}

/// Asymptotic Kolmogorov critical value `sqrt(-ln(alpha / 2) / 2)`.
pub fn kolmogorov_critical(alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt()
}

/// Kolmogorov survival function `P(K > x)`.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * x * x).exp();
        sum += if k as i64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov distance to the uniform law on [0, 1].
pub fn ks_statistic(sample: &[f64], alpha: f64) -> Result<KsResult> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let x = x.clamp(0.0, 1.0);
        d = d.max((i + 1) as f64 / n - x).max(x - i as f64 / n);
    }
    let critical = kolmogorov_critical(alpha) / n.sqrt();
    let sqrt_n = n.sqrt();
    let p_value = kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
    Ok(KsResult {
        statistic: d,
        n: v.len(),
        alpha,
        critical,
        p_value,
        pass: d < critical,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub p: f64,
    pub mean_macroscopic: f64,
    pub stderr: f64,
    /// Fraction of edges with label near `p` lying in the free but not the
    /// wired tree.
    pub gap_frequency: f64,
}

/// Clusters of `{e : U(e) < p}` meeting both the `x_0 = 0` and `x_0 = side - 1`
/// faces of a free box.
pub fn macroscopic_clusters(graph: &MultiGraph, side: usize, labels: &Labeling, p: f64) -> usize {
    let part = graph.components_of(labels.threshold(p).iter());
    let mut left = vec![false; graph.vertex_count()];
    let mut right = vec![false; graph.vertex_count()];
    for v in graph.vertices() {
        let x = v.0 % side;
        let root = part.find(v).0;
        if x == 0 {
            left[root] = true;
        }
        if x + 1 == side {
            right[root] = true;
        }
    }
    (0..graph.vertex_count()).filter(|&r| left[r] && right[r]).count()
}

/// Mean number of face-to-face clusters of `G[p]` for each `p`, paired with
/// the free-minus-wired gap frequency among edges whose label lies in the
/// bin around `p`.
pub fn ae_uniqueness_scan(
    dimension: usize,
    side: usize,
    p_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<ScanRow>> {
    if p_grid.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidArgument("p grid must lie in [0, 1]".into()));
    }
    if p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("p grid must be increasing".into()));
    }
    if trials == 0 {
        return Err(Error::EmptySample);
    }
    let graph = grid_box(dimension, side, GridTopology::Free)?;
    let boundary = graph.tagged(BOUNDARY_TAG).unwrap_or_default().to_vec();
    let k = p_grid.len();
    let bin = |x: f64| -> Option<usize> {
        (0..k).find(|&i| {
            let lo = if i == 0 { 0.0 } else { (p_grid[i - 1] + p_grid[i]) / 2.0 };
            let hi = if i + 1 == k {
                1.0
            } else {
                (p_grid[i] + p_grid[i + 1]) / 2.0
            };
            x >= lo && (x < hi || (i + 1 == k && x <= hi))
        })
    };
    let per_trial: Vec<(Vec<f64>, Vec<usize>, Vec<usize>)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let u = Labeling::sample(&graph, derive_seed(seed, t));
            let counts = p_grid
                .iter()
                .map(|&p| macroscopic_clusters(&graph, side, &u, p) as f64)
                .collect();
            let mut in_bin = vec![0; k];
            let mut gap_in_bin = vec![0; k];
            let gap = if boundary.is_empty() {
                ForestMask::empty(graph.edge_count())
            } else {
                kruskal_mst(&graph, &u).difference(&wired_mst(&graph, &boundary, &u).expect("boundary exists"))
            };
            for e in graph.edges() {
                if let Some(b) = bin(u.value(e)) {
                    in_bin[b] += 1;
                    if gap.contains(e) {
                        gap_in_bin[b] += 1;
                    }
                }
            }
            (counts, in_bin, gap_in_bin)
        })
        .collect();
    Ok((0..k)
        .map(|i| {
            let values: Vec<f64> = per_trial.iter().map(|r| r.0[i]).collect();
            let est = Estimate::from_values(&values);
            let edges: usize = per_trial.iter().map(|r| r.1[i]).sum();
            let gaps: usize = per_trial.iter().map(|r| r.2[i]).sum();
            ScanRow {
                p: p_grid[i],
                mean_macroscopic: est.mean,
                stderr: est.stderr,
                gap_frequency: if edges == 0 { 0.0 } else { gaps as f64 / edges as f64 },
            }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub p: f64,
    pub mean_largest: f64,
    pub stderr: f64,
}

/// Size of the largest cluster of the open forest edges, over `|V|`.
pub fn largest_open_cluster(graph: &MultiGraph, forest: &ForestMask, open: impl Fn(usize) -> bool) -> f64 {
    let kept = forest.iter().filter(|e| open(e.0));
    let sizes = graph.components_of(kept).class_sizes();
    sizes.into_iter().max().unwrap_or(0) as f64 / graph.vertex_count().max(1) as f64
}

/// Mean normalized largest cluster of Bernoulli(`p`) percolation on the
/// forest's edges, for each `p`.
pub fn pc_forest_probe(
    graph: &MultiGraph,
    forest: &ForestMask,
    p_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<ProbeRow>> {
    if p_grid.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidArgument("p grid must lie in [0, 1]".into()));
    }
    if trials == 0 {
        return Err(Error::EmptySample);
    }
    Ok(p_grid
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let values: Vec<f64> = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let mut coins = stream(derive_seed(seed ^ (i as u64) << 32, t));
                    let open: Vec<bool> = (0..graph.edge_count()).map(|_| coins.random_bool(p)).collect();
                    largest_open_cluster(graph, forest, |e| open[e])
                })
                .collect();
            let est = Estimate::from_values(&values);
            ProbeRow {
                p,
                mean_largest: est.mean,
                stderr: est.stderr,
            }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub tree_edges: usize,
    pub components: usize,
    pub degree_histogram: Vec<usize>,
    /// Edges in the free but not the wired tree.
    pub gap_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialStats {
    pub trials: usize,
    pub records: Vec<TrialRecord>,
}

/// Samples the wired forest `trials` times and records its shape.
pub fn forest_trials(graph: &MultiGraph, boundary: &[VertexId], trials: usize, seed: u64) -> Result<TrialStats> {
    let records = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = derive_seed(seed, t);
            let u = Labeling::sample(graph, s);
            let free = kruskal_mst(graph, &u);
            let wired = if boundary.is_empty() {
                free.clone()
            } else {
                wired_mst(graph, boundary, &u)?
            };
            Ok(TrialRecord {
                seed: s,
                tree_edges: wired.len(),
                components: tree_count(graph, &wired, &[]),
                degree_histogram: degree_stats(graph, &wired)?.histogram,
                gap_size: free.difference(&wired).len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialStats { trials, records })
}
