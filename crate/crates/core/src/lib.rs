//! Minimal spanning forests on finite multigraphs with i.i.d. uniform edge
//! labels: free and wired minimal spanning trees, invasion percolation,
//! exact tree probabilities, planar duality and Monte Carlo statistics.
//!
//! ```
//! use msflab::{grid_box, kruskal_mst, wired_mst, GridTopology, Labeling, BOUNDARY_TAG};
//!
//! let g = grid_box(2, 6, GridTopology::Free).unwrap();
//! let boundary = g.tagged(BOUNDARY_TAG).unwrap().to_vec();
//! let u = Labeling::sample(&g, 7);
//! let free = kruskal_mst(&g, &u);
//! let wired = wired_mst(&g, &boundary, &u).unwrap();
//! assert!(wired.is_subset(&free));
//! ```

pub mod analysis;
pub mod error;
pub mod exact;
pub mod forest;
pub mod graph;
pub mod invasion;
pub mod io;
pub mod labeling;
pub mod planar;
pub mod rng;
pub mod suite;

pub use error::{Error, Result};
pub use exact::{
    build_correlation_example, edge_correlation, mst_probability, mst_probability_oracle, ordering_catalog,
    tree_catalog, TreeCatalog,
};
pub use forest::{criterion_tree, kruskal_mst, wired_mst, z_free, z_free_cut, z_wired, ForestMask, ZValue};
pub use graph::{
    grid_box, half_plane_strip, lattice_ball, EdgeId, GridTopology, MultiGraph, Partition, VertexId, WiredQuotient,
    BOUNDARY_TAG,
};
pub use invasion::{invasion_basin, invasion_tree, invasion_union, z_infinity_proxy, InvasionTrace};
pub use io::{format_graph, parse_graph, read_graph, write_graph, GraphDocument};
pub use labeling::{Label, LabelMode, Labeling};
pub use planar::{dual_graph, embed_grid, verify_tree_duality, DualPair, PlaneEmbedding};
pub use suite::{run_suite, SuiteLevel, SuiteReport, SCHEMA_VERSION};
