use msflab::analysis::xi_sample;
use msflab::forest::z_free_all;
use msflab::*;
use proptest::prelude::*;

fn graph_strategy(max_v: usize, max_e: usize) -> impl Strategy<Value = MultiGraph> {
    (1..=max_v).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 0..=max_e).prop_map(move |edges| MultiGraph::new(n, &edges).unwrap())
    })
}

fn connected_strategy(max_v: usize, extra: usize) -> impl Strategy<Value = MultiGraph> {
    (1..=max_v).prop_flat_map(move |n| {
        let tree = prop::collection::vec(any::<prop::sample::Index>(), n - 1);
        let more = prop::collection::vec((0..n, 0..n), 0..=extra);
        (tree, more).prop_map(move |(tree, more)| {
            let mut edges: Vec<(usize, usize)> = tree
                .iter()
                .enumerate()
                .map(|(i, ix)| (ix.index(i + 1), i + 1))
                .collect();
            edges.extend(more);
            MultiGraph::new(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn contraction_preserves_non_loop_count(g in graph_strategy(7, 12), mask in any::<u16>()) {
        let f: Vec<EdgeId> = g.edges().filter(|e| mask >> (e.0 % 16) & 1 == 1).collect();
        let c = g.contract(&f).unwrap();
        prop_assert_eq!(c.graph.non_loop_count(&[]), g.non_loop_count(&f));
        prop_assert_eq!(c.graph.edge_count(), g.edge_count());
    }

    #[test]
    fn cuts_are_symmetric(g in graph_strategy(8, 14), mask in any::<u8>()) {
        let side: Vec<VertexId> = g.vertices().filter(|v| mask >> v.0 & 1 == 1).collect();
        let other: Vec<VertexId> = g.vertices().filter(|v| mask >> v.0 & 1 == 0).collect();
        prop_assert_eq!(g.edge_cut(&side), g.edge_cut(&other));
    }

    #[test]
    fn adding_edges_coarsens_partitions(g in graph_strategy(8, 14), a in any::<u16>(), b in any::<u16>()) {
        let small: Vec<EdgeId> = g.edges().filter(|e| a >> (e.0 % 16) & 1 == 1).collect();
        let large: Vec<EdgeId> = g.edges().filter(|e| (a | b) >> (e.0 % 16) & 1 == 1).collect();
        prop_assert!(g.components(&small).refines(&g.components(&large)));
        prop_assert_eq!(g.components(&[]).count(), g.vertex_count());
    }

    #[test]
    fn single_label_change_moves_one_edge(g in graph_strategy(7, 12), seed in any::<u64>(), pick in any::<prop::sample::Index>(), x in 0.0f64..1.0) {
        prop_assume!(g.edge_count() > 0);
        let u = Labeling::sample(&g, seed);
        let e = EdgeId(pick.index(g.edge_count()));
        let v = u.perturb(&[(e, Label::Float(x))]).unwrap();
        let d = kruskal_mst(&g, &u).symmetric_difference(&kruskal_mst(&g, &v));
        prop_assert!(d.len() <= 2);
        prop_assert!(d.iter().filter(|&f| f != e).count() <= 1);
    }

    #[test]
    fn spanning_forest_shape(g in graph_strategy(8, 16), seed in any::<u64>()) {
        let u = Labeling::sample(&g, seed);
        let t = kruskal_mst(&g, &u);
        prop_assert!(t.is_spanning_forest(&g));
        let all: Vec<EdgeId> = g.edges().collect();
        prop_assert_eq!(t.len(), g.vertex_count() - g.components(&all).count());
        prop_assert_eq!(t, criterion_tree(&g, &u));
    }

    #[test]
    fn z_values_separate_tree_edges(g in graph_strategy(7, 12), seed in any::<u64>()) {
        let u = Labeling::sample(&g, seed);
        let t = kruskal_mst(&g, &u);
        for (i, z) in z_free_all(&g, &u).into_iter().enumerate() {
            prop_assert_eq!(z.admits(&u, EdgeId(i)), t.contains(EdgeId(i)));
        }
    }

    #[test]
    fn wired_inside_free(g in connected_strategy(8, 8), seed in any::<u64>(), mask in 1u8..) {
        let boundary: Vec<VertexId> = g.vertices().filter(|v| mask >> v.0 & 1 == 1).collect();
        prop_assume!(!boundary.is_empty());
        let u = Labeling::sample(&g, seed);
        let w = wired_mst(&g, &boundary, &u).unwrap();
        prop_assert!(w.is_subset(&kruskal_mst(&g, &u)));
        prop_assert_eq!(invasion_union(&g, &boundary, &u).unwrap(), w);
    }

    #[test]
    fn xi_contains_tree_and_connects(g in connected_strategy(8, 8), seed in any::<u64>(), eps in 0.0f64..=1.0) {
        let u = Labeling::sample(&g, seed);
        let xi = xi_sample(&g, &u, eps).unwrap();
        prop_assert!(kruskal_mst(&g, &u).is_subset(&xi));
        prop_assert_eq!(g.components_of(xi.iter()).count(), 1);
    }

    #[test]
    fn text_round_trip(g in graph_strategy(8, 12), seed in any::<u64>()) {
        let u = Labeling::sample(&g, seed);
        let doc = GraphDocument::new(g.clone()).with_labels(u.clone()).unwrap();
        let back = parse_graph(&format_graph(&doc)).unwrap();
        prop_assert_eq!(back.graph.edge_list(), g.edge_list());
        let Some(l) = back.labels else {
            prop_assert_eq!(g.edge_count(), 0);
            return Ok(());
        };
        for e in g.edges() {
            prop_assert_eq!(l.value(e).to_bits(), u.value(e).to_bits());
        }
    }
}
