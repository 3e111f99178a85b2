//! Edge labelings and the strict total order they induce on edges.
//!
//! Ties in value are broken by edge id, so the order is always strict. A
//! dual labeling keeps the exact reverse of its primal order instead, which
//! is what planar duality needs when values coincide.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::forest::ForestMask;
use crate::graph::{EdgeId, MultiGraph};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelMode {
    Float,
    Exact,
}

/// A single label value.
#[derive(Clone, Debug, PartialEq)]
pub enum Label {
    Float(f64),
    Exact(BigRational),
}

impl Label {
    pub fn to_f64(&self) -> f64 {
        match self {
            Label::Float(x) => *x,
            Label::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
        }
    }

    fn to_exact(&self) -> Result<BigRational> {
        match self {
            Label::Exact(q) => Ok(q.clone()),
            Label::Float(x) => {
                BigRational::from_float(*x).ok_or_else(|| Error::InvalidArgument(format!("label {x} is not finite")))
            }
        }
    }

    fn check_unit(&self) -> Result<()> {
        let ok = match self {
            Label::Float(x) => (0.0..=1.0).contains(x),
            Label::Exact(q) => *q >= BigRational::zero() && *q <= BigRational::one(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("label {self} outside [0, 1]")))
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Float(x) => write!(f, "{x}"),
            Label::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

impl FromStr for Label {
    type Err = String;

    /// `p/q` parses as an exact rational, anything else as a decimal float.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let q: BigInt = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if q.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Label::Exact(BigRational::new(p, q)))
        } else {
            s.parse::<f64>()
                .map(Label::Float)
                .map_err(|_| format!("bad label {s:?}"))
        }
    }
}

/// Parses a decimal string exactly, e.g. `"0.3"` as `3/10`.
pub fn parse_decimal_exact(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Strict total order on edges induced by a labeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelOrder {
    rank: Vec<usize>,
    by_rank: Vec<EdgeId>,
}

impl LabelOrder {
    fn from_sorted(by_rank: Vec<EdgeId>) -> Self {
        let mut rank = vec![0; by_rank.len()];
        for (r, e) in by_rank.iter().enumerate() {
            rank[e.0] = r;
        }
        Self { rank, by_rank }
    }

    #[inline]
    pub fn rank(&self, e: EdgeId) -> usize {
        self.rank[e.0]
    }

    #[inline]
    pub fn less(&self, e: EdgeId, f: EdgeId) -> bool {
        self.rank[e.0] < self.rank[f.0]
    }

    pub fn cmp(&self, e: EdgeId, f: EdgeId) -> Ordering {
        self.rank[e.0].cmp(&self.rank[f.0])
    }

    /// Edges from smallest to largest.
    pub fn sorted(&self) -> &[EdgeId] {
        &self.by_rank
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn min_of(&self, edges: impl IntoIterator<Item = EdgeId>) -> Option<EdgeId> {
        edges.into_iter().min_by_key(|&e| self.rank[e.0])
    }

    pub fn max_of(&self, edges: impl IntoIterator<Item = EdgeId>) -> Option<EdgeId> {
        edges.into_iter().max_by_key(|&e| self.rank[e.0])
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Values {
    Float(Vec<f64>),
    Exact(Vec<BigRational>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Labeling {
    values: Values,
    order: LabelOrder,
    seed: Option<u64>,
}

impl Labeling {
    pub fn from_floats(values: Vec<f64>) -> Result<Self> {
        for &x in &values {
            Label::Float(x).check_unit()?;
        }
        let mut by_rank: Vec<EdgeId> = (0..values.len()).map(EdgeId).collect();
        by_rank.sort_by(|a, b| values[a.0].total_cmp(&values[b.0]).then(a.cmp(b)));
        Ok(Self {
            order: LabelOrder::from_sorted(by_rank),
            values: Values::Float(values),
            seed: None,
        })
    }

    pub fn from_rationals(values: Vec<BigRational>) -> Result<Self> {
        for q in &values {
            Label::Exact(q.clone()).check_unit()?;
        }
        let mut by_rank: Vec<EdgeId> = (0..values.len()).map(EdgeId).collect();
        by_rank.sort_by(|a, b| values[a.0].cmp(&values[b.0]).then(a.cmp(b)));
        Ok(Self {
            order: LabelOrder::from_sorted(by_rank),
            values: Values::Exact(values),
            seed: None,
        })
    }

    /// Exact mode if any label is rational, float mode otherwise.
    pub fn from_labels(labels: Vec<Label>) -> Result<Self> {
        if labels.iter().any(|l| matches!(l, Label::Exact(_))) {
            let values = labels.iter().map(Label::to_exact).collect::<Result<Vec<_>>>()?;
            Self::from_rationals(values)
        } else {
            Self::from_floats(labels.iter().map(Label::to_f64).collect())
        }
    }

    /// One uniform label per edge, keyed by `(seed, edge id)`.
    pub fn sample(graph: &MultiGraph, seed: u64) -> Self {
        Self::sample_n(graph.edge_count(), seed, LabelMode::Float)
    }

    /// As [`Labeling::sample`] but stored as exact 53-bit dyadic rationals.
    pub fn sample_exact(graph: &MultiGraph, seed: u64) -> Self {
        Self::sample_n(graph.edge_count(), seed, LabelMode::Exact)
    }

    pub fn sample_n(edges: usize, seed: u64, mode: LabelMode) -> Self {
        let mut stream = rng::stream(seed);
        let bits: Vec<u64> = (0..edges).map(|_| stream.next_u64()).collect();
        Self::from_bits(&bits, seed, mode)
    }

    /// Labels drawn at arbitrary keys, e.g. geometric edge coordinates shared
    /// by nested boxes.
    pub fn sample_keyed(keys: &[u64], seed: u64) -> Self {
        let bits: Vec<u64> = keys.iter().map(|&k| rng::keyed_u64(seed, k)).collect();
        Self::from_bits(&bits, seed, LabelMode::Float)
    }

    fn from_bits(bits: &[u64], seed: u64, mode: LabelMode) -> Self {
        let mut labeling = match mode {
            LabelMode::Float => Self::from_floats(bits.iter().map(|&b| rng::unit_f64(b)).collect()),
            LabelMode::Exact => {
                let denom = BigInt::from(1u64 << 53);
                Self::from_rationals(
                    bits.iter()
                        .map(|&b| BigRational::new(BigInt::from(rng::dyadic_numerator(b)), denom.clone()))
                        .collect(),
                )
            }
        }
        .expect("sampled labels lie in [0, 1)");
        labeling.seed = Some(seed);
        labeling
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn mode(&self) -> LabelMode {
        match self.values {
            Values::Float(_) => LabelMode::Float,
            Values::Exact(_) => LabelMode::Exact,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn order(&self) -> &LabelOrder {
        &self.order
    }

    #[inline]
    pub fn rank(&self, e: EdgeId) -> usize {
        self.order.rank(e)
    }

    #[inline]
    pub fn less(&self, e: EdgeId, f: EdgeId) -> bool {
        self.order.less(e, f)
    }

    #[inline]
    pub fn value(&self, e: EdgeId) -> f64 {
        match &self.values {
            Values::Float(v) => v[e.0],
            Values::Exact(v) => v[e.0].to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn label(&self, e: EdgeId) -> Label {
        match &self.values {
            Values::Float(v) => Label::Float(v[e.0]),
            Values::Exact(v) => Label::Exact(v[e.0].clone()),
        }
    }

    pub fn exact_value(&self, e: EdgeId) -> Option<&BigRational> {
        match &self.values {
            Values::Exact(v) => Some(&v[e.0]),
            Values::Float(_) => None,
        }
    }

    /// Whether the label of `e` is strictly below the level `p`.
    pub fn below(&self, e: EdgeId, p: f64) -> bool {
        match &self.values {
            Values::Float(v) => v[e.0] < p,
            Values::Exact(v) => match BigRational::from_float(p) {
                Some(q) => v[e.0] < q,
                None => p > 0.0,
            },
        }
    }

    /// The standard coupling `{e : U(e) < p}`.
    pub fn threshold(&self, p: f64) -> ForestMask {
        ForestMask::from_predicate(self.len(), |e| self.below(e, p))
    }

    /// Labels `1 - U(e)` moved along `bijection[e]`, in exactly the reverse order.
    pub fn dual(&self, bijection: &[EdgeId]) -> Result<Labeling> {
        let m = self.len();
        if bijection.len() != m {
            return Err(Error::InvalidArgument(format!(
                "bijection covers {} of {m} edges",
                bijection.len()
            )));
        }
        let mut seen = vec![false; m];
        for &d in bijection {
            if d.0 >= m || std::mem::replace(&mut seen[d.0], true) {
                return Err(Error::InvalidArgument("edge map is not a bijection".into()));
            }
        }
        let values = match &self.values {
            Values::Float(v) => {
                let mut out = vec![0.0; m];
                for (e, &d) in bijection.iter().enumerate() {
                    out[d.0] = 1.0 - v[e];
                }
                Values::Float(out)
            }
            Values::Exact(v) => {
                let mut out = vec![BigRational::zero(); m];
                for (e, &d) in bijection.iter().enumerate() {
                    out[d.0] = BigRational::one() - &v[e];
                }
                Values::Exact(out)
            }
        };
        let by_rank = self.order.sorted().iter().rev().map(|e| bijection[e.0]).collect();
        Ok(Labeling {
            values,
            order: LabelOrder::from_sorted(by_rank),
            seed: self.seed,
        })
    }

    /// Replaces the labels of the listed edges and rebuilds the order with the
    /// usual edge-id tie break.
    pub fn perturb(&self, changes: &[(EdgeId, Label)]) -> Result<Labeling> {
        for (e, l) in changes {
            if e.0 >= self.len() {
                return Err(Error::UnknownEdge(*e));
            }
            l.check_unit()?;
        }
        let mut out = match &self.values {
            Values::Float(v) => {
                let mut v = v.clone();
                for (e, l) in changes {
                    v[e.0] = l.to_f64();
                }
                Self::from_floats(v)?
            }
            Values::Exact(v) => {
                let mut v = v.clone();
                for (e, l) in changes {
                    v[e.0] = l.to_exact()?;
                }
                Self::from_rationals(v)?
            }
        };
        out.seed = self.seed;
        Ok(out)
    }

    /// Labeling of a graph whose edge `i` stands for `originals[i]` here; the
    /// relative order of the carried edges is preserved.
    pub fn pullback(&self, originals: &[EdgeId]) -> Labeling {
        let values = match &self.values {
            Values::Float(v) => Values::Float(originals.iter().map(|e| v[e.0]).collect()),
            Values::Exact(v) => Values::Exact(originals.iter().map(|e| v[e.0].clone()).collect()),
        };
        let mut by_rank: Vec<EdgeId> = (0..originals.len()).map(EdgeId).collect();
        by_rank.sort_by_key(|i| self.rank(originals[i.0]));
        Labeling {
            values,
            order: LabelOrder::from_sorted(by_rank),
            seed: self.seed,
        }
    }
}
