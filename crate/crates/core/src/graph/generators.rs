use rand::seq::SliceRandom;
use rand::Rng;

use super::{MultiGraph, VertexId, BOUNDARY_TAG};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridTopology {
    Free,
    Torus,
}

fn checked_volume(dimension: usize, side: usize) -> Result<usize> {
    u32::try_from(dimension)
        .ok()
        .and_then(|d| side.checked_pow(d))
        .and_then(|n| n.checked_mul(dimension.max(1)).map(|_| n))
        .ok_or_else(|| Error::SizeOverflow(format!("{side}^{dimension} vertices")))
}

/// Nearest-neighbour box `[0, side)^dimension`.
///
/// Vertex `x` has index `x_0 + side * x_1 + side^2 * x_2 + ...`. Edges are
/// listed per vertex in index order, one per dimension towards `+1`. In free
/// mode the surface vertices carry the `boundary` tag; the torus wraps every
/// coordinate, so `side = 1` gives loops and `side = 2` parallel pairs.
pub fn grid_box(dimension: usize, side: usize, topology: GridTopology) -> Result<MultiGraph> {
    if dimension == 0 || side == 0 {
        return Err(Error::InvalidArgument(
            "grid dimension and side must be at least 1".into(),
        ));
    }
    let n = checked_volume(dimension, side)?;
    let mut edges = Vec::with_capacity(n * dimension);
    let mut boundary = Vec::new();
    let mut coords = vec![0usize; dimension];
    for v in 0..n {
        let mut stride = 1;
        let mut on_surface = false;
        for &x in &coords {
            on_surface |= x == 0 || x + 1 == side;
            if x + 1 < side {
                edges.push((v, v + stride));
            } else if topology == GridTopology::Torus {
                edges.push((v, v - x * stride));
            }
            stride *= side;
        }
        if on_surface {
            boundary.push(VertexId(v));
        }
        for x in coords.iter_mut() {
            *x += 1;
            if *x < side {
                break;
            }
            *x = 0;
        }
    }
    let g = MultiGraph::new(n, &edges)?;
    match topology {
        GridTopology::Free => g.with_tag(BOUNDARY_TAG, boundary),
        GridTopology::Torus => Ok(g),
    }
}

/// Finite window of two half-plane strips joined only at `slits`.
///
/// The lower strip holds rows `0..height` and the upper strip rows
/// `height..2 * height` of a `width`-wide grid; the only edges between rows
/// `height - 1` and `height` are the junctions at the listed columns. Vertex
/// `(x, row)` has index `row * width + x`. Tags: `lower`, `upper` and
/// `boundary` (the window's outer surface).
pub fn half_plane_strip(width: usize, height: usize, slits: &[usize]) -> Result<MultiGraph> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument(
            "strip width and height must be at least 1".into(),
        ));
    }
    if let Some(&bad) = slits.iter().find(|&&c| c >= width) {
        return Err(Error::InvalidArgument(format!(
            "slit column {bad} outside [0, {width})"
        )));
    }
    let rows = 2 * height;
    let n = width
        .checked_mul(rows)
        .ok_or_else(|| Error::SizeOverflow(format!("{width}x{rows} window")))?;
    let id = |x: usize, row: usize| row * width + x;
    let mut junction = vec![false; width];
    for &c in slits {
        junction[c] = true;
    }
    let mut edges = Vec::new();
    for row in 0..rows {
        for (x, &open) in junction.iter().enumerate() {
            if x + 1 < width {
                edges.push((id(x, row), id(x + 1, row)));
            }
            if row + 1 < rows && (row + 1 != height || open) {
                edges.push((id(x, row), id(x, row + 1)));
            }
        }
    }
    let lower = (0..height * width).map(VertexId).collect();
    let upper = (height * width..n).map(VertexId).collect();
    let boundary = (0..n)
        .filter(|&v| {
            let (x, row) = (v % width, v / width);
            x == 0 || x + 1 == width || row == 0 || row + 1 == rows
        })
        .map(VertexId)
        .collect();
    MultiGraph::new(n, &edges)?
        .with_tag("lower", lower)?
        .with_tag("upper", upper)?
        .with_tag(BOUNDARY_TAG, boundary)
}

/// The box `[-radius, radius]^dimension` of the integer lattice, with a
/// level-independent key per edge so that nested boxes can share labels.
#[derive(Clone, Debug)]
pub struct LatticeBall {
    pub graph: MultiGraph,
    pub radius: usize,
    pub dimension: usize,
    /// Geometric key of each edge (lower endpoint and direction).
    pub edge_keys: Vec<u64>,
    pub coords: Vec<Vec<i64>>,
}

const KEY_COORD_BITS: u32 = 16;
const KEY_OFFSET: i64 = 1 << (KEY_COORD_BITS - 1);

/// Injective key for the lattice edge from `lower` in direction `axis`.
pub fn lattice_edge_key(lower: &[i64], axis: usize) -> u64 {
    let mut key = axis as u64;
    for &c in lower {
        key = (key << KEY_COORD_BITS) | (c + KEY_OFFSET) as u64;
    }
    key
}

pub fn lattice_ball(dimension: usize, radius: usize) -> Result<LatticeBall> {
    if !(1..=3).contains(&dimension) || radius as i64 >= KEY_OFFSET - 1 {
        return Err(Error::InvalidArgument(format!(
            "lattice ball needs dimension in 1..=3 and radius < {}",
            KEY_OFFSET - 1
        )));
    }
    let side = 2 * radius + 1;
    let graph = grid_box(dimension, side, GridTopology::Free)?;
    let r = radius as i64;
    let coords: Vec<Vec<i64>> = (0..graph.vertex_count())
        .map(|mut v| {
            (0..dimension)
                .map(|_| {
                    let x = (v % side) as i64 - r;
                    v /= side;
                    x
                })
                .collect()
        })
        .collect();
    let edge_keys = graph
        .edges()
        .map(|e| {
            let (u, v) = graph.endpoints(e);
            let (a, b) = (&coords[u.0], &coords[v.0]);
            let axis = (0..dimension).find(|&k| a[k] != b[k]).expect("lattice edge");
            lattice_edge_key(a, axis)
        })
        .collect();
    Ok(LatticeBall {
        graph,
        radius,
        dimension,
        edge_keys,
        coords,
    })
}

/// Uniform random multigraph; loops and parallel edges occur naturally.
pub fn random_multigraph<R: Rng + ?Sized>(rng: &mut R, vertices: usize, edges: usize) -> MultiGraph {
    let list: Vec<(usize, usize)> = (0..edges)
        .map(|_| (rng.random_range(0..vertices), rng.random_range(0..vertices)))
        .collect();
    MultiGraph::new(vertices, &list).expect("endpoints in range")
}

/// Random connected multigraph: a random recursive tree on `vertices`
/// followed by `edges - (vertices - 1)` uniform extra edges, shuffled.
pub fn random_connected_multigraph<R: Rng + ?Sized>(rng: &mut R, vertices: usize, edges: usize) -> Result<MultiGraph> {
    if vertices == 0 || edges + 1 < vertices {
        return Err(Error::InvalidArgument(format!(
            "cannot connect {vertices} vertices with {edges} edges"
        )));
    }
    let mut list: Vec<(usize, usize)> = (1..vertices).map(|v| (rng.random_range(0..v), v)).collect();
    while list.len() < edges {
        list.push((rng.random_range(0..vertices), rng.random_range(0..vertices)));
    }
    list.shuffle(rng);
    MultiGraph::new(vertices, &list)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_examples() {
        let g = grid_box(2, 2, GridTopology::Free).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));

        let g = grid_box(1, 5, GridTopology::Free).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 4));
        assert_eq!(g.tagged(BOUNDARY_TAG).unwrap(), &[VertexId(0), VertexId(4)]);
    }

    #[test]
    fn torus_edge_count_matches_enumeration() {
        // d * side^d edges: enumerate (vertex, axis) pairs directly.
        for (d, side) in [(2, 3), (1, 4), (3, 2), (2, 1)] {
            let g = grid_box(d, side, GridTopology::Torus).unwrap();
            let mut count = 0;
            for _v in 0..side.pow(d as u32) {
                for _axis in 0..d {
                    count += 1;
                }
            }
            assert_eq!(g.edge_count(), count);
            for v in g.vertices() {
                assert_eq!(g.degree(v), 2 * d);
            }
        }
        let g = grid_box(2, 3, GridTopology::Torus).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (9, 18));
    }

    #[test]
    fn oversized_box_is_rejected() {
        assert!(matches!(
            grid_box(64, 1 << 20, GridTopology::Free),
            Err(Error::SizeOverflow(_))
        ));
    }

    #[test]
    fn strip_examples() {
        let full = half_plane_strip(3, 1, &[0, 1, 2]).unwrap();
        assert_eq!(full.vertex_count(), 6);
        assert_eq!(full.edge_count(), 7);
        assert!(full.is_connected());

        let split = half_plane_strip(3, 1, &[]).unwrap();
        assert_eq!(split.edge_count(), 4);
        assert_eq!(split.components(&split.edges().collect::<Vec<_>>()).count(), 2);

        let one = half_plane_strip(4, 2, &[1]).unwrap();
        let reach = one.reachable(VertexId(0), |_| true);
        assert!(reach.iter().all(|&r| r));

        assert!(half_plane_strip(3, 1, &[3]).is_err());
    }

    #[test]
    fn lattice_keys_are_shared_between_nested_balls() {
        let small = lattice_ball(2, 2).unwrap();
        let large = lattice_ball(2, 4).unwrap();
        let mut large_keys = large.edge_keys.clone();
        large_keys.sort_unstable();
        large_keys.dedup();
        assert_eq!(large_keys.len(), large.edge_keys.len());
        for k in &small.edge_keys {
            assert!(large_keys.binary_search(k).is_ok());
        }
    }

    #[test]
    fn random_connected_graphs_are_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.random_range(1..7);
            let m = rng.random_range(n - 1..n + 6);
            let g = random_connected_multigraph(&mut rng, n, m).unwrap();
            assert_eq!(g.edge_count(), m);
            assert!(g.is_connected());
        }
    }
}
