use std::path::{Path, PathBuf};

use msflab::analysis::{
    ae_uniqueness_scan, coupling_residuals_free, coupling_residuals_wired, disjoint_invasion_probability,
    forest_trials, free_union_law_check, ks_statistic, pc_forest_probe, xi_sample,
};
use msflab::exact::{complete_graph, deletion_exhibit, mst_probability_oracle, rational_string, CorrelationReport};
use msflab::forest::{exhaustion_run, z_free_all, z_wired_all, ExhaustionConfig};
use msflab::invasion::{invasion_basin_until, invasion_tree_until};
use msflab::io::parse_vertex_list;
use msflab::rng::{derive_seed, stream};
use msflab::suite::{run_criterion, CriterionResult, CRITERIA};
use msflab::*;
use serde_json::{json, Value};
use std::result::Result;

use crate::run::Run;
use crate::{
    CliError, Command, DualArgs, ExactArgs, ForestArgs, Format, GenerateArgs, GraphBoundary, InvadeArgs, LabelArgs,
    Level, ResidualKind, StatsKind, SuiteArgs,
};

type Out = Result<(), CliError>;

pub fn dispatch(command: Command, args: Vec<String>, manifest: Option<PathBuf>) -> Out {
    let name = match &command {
        Command::Generate(_) => "generate",
        Command::Forest(_) => "forest",
        Command::Invade(_) => "invade",
        Command::Exact(_) => "exact",
        Command::Dual(_) => "dual",
        Command::Stats(_) => "stats",
        Command::Suite(_) => "suite",
    };
    let mut run = Run::new(name, args, manifest);
    let outcome = match command {
        Command::Generate(a) => generate(&mut run, a),
        Command::Forest(a) => forest(&mut run, a),
        Command::Invade(a) => invade(&mut run, a),
        Command::Exact(a) => exact(&mut run, a),
        Command::Dual(a) => dual(&mut run, a),
        Command::Stats(a) => stats(&mut run, a.kind),
        Command::Suite(a) => suite(&mut run, a),
    };
    // the manifest is written even when a suite fails, so the failure replays
    let finished = run.finish();
    outcome.and(finished)
}

fn load(run: &mut Run, path: &Path) -> Result<GraphDocument, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Io(format!("{}: not UTF-8", path.display())))?;
    let doc = parse_graph(&text).map_err(|e| match e {
        Error::Parse { line, message } => CliError::Failed(format!("{}:{line}: {message}", path.display())),
        other => other.into(),
    })?;
    run.graph(path, &bytes, doc.graph.vertex_count(), doc.graph.edge_count());
    Ok(doc)
}

fn boundary_of(run: &mut Run, doc: &GraphDocument, spec: Option<&str>, none: bool) -> Result<Vec<VertexId>, CliError> {
    let vertices = if none {
        Vec::new()
    } else {
        match spec {
            None => doc
                .graph
                .tagged(BOUNDARY_TAG)
                .map(<[VertexId]>::to_vec)
                .unwrap_or_default(),
            Some(name) => {
                if let Some(vs) = doc.graph.tagged(name) {
                    vs.to_vec()
                } else if Path::new(name).is_file() {
                    let text = std::fs::read_to_string(name).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
                    let vs = parse_vertex_list(&text)?;
                    for &v in &vs {
                        doc.graph.check_vertex(v)?;
                    }
                    vs
                } else {
                    return Err(CliError::Usage(format!(
                        "--boundary {name:?} is neither a tag nor a file"
                    )));
                }
            }
        }
    };
    run.param(
        "boundary",
        spec.unwrap_or(if none || vertices.is_empty() {
            "none"
        } else {
            BOUNDARY_TAG
        }),
    );
    run.param("boundary_size", vertices.len());
    Ok(vertices)
}

fn labels_of(run: &mut Run, doc: &GraphDocument, seed: Option<u64>) -> Labeling {
    match (seed, &doc.labels) {
        (None, Some(l)) => {
            run.param("labels", "file");
            l.clone()
        }
        (s, _) => {
            let s = s.unwrap_or(0);
            run.seed(s);
            run.param("labels", "sampled");
            Labeling::sample(&doc.graph, s)
        }
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn json_text(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes") + "\n"
}

fn flag(b: bool) -> String {
    u8::from(b).to_string()
}

fn z_text(z: ZValue, labels: &Labeling) -> String {
    match z {
        ZValue::Bottom => "0".into(),
        ZValue::Edge(f) => labels.label(f).to_string(),
        ZValue::One => "1".into(),
        ZValue::Infinite => "inf".into(),
    }
}

fn pair(v: &[usize]) -> (usize, usize) {
    (v[0], v[1])
}

fn generate(run: &mut Run, a: GenerateArgs) -> Out {
    let s = &a.shape;
    let torus = if a.torus {
        GridTopology::Torus
    } else {
        GridTopology::Free
    };
    let mut embedding = None;
    let graph = if let Some(g) = &s.grid {
        let (dim, side) = pair(g);
        run.param("grid", [dim, side]);
        run.param("torus", a.torus);
        if a.embed {
            if dim != 2 || a.torus {
                return Err(CliError::Usage("--embed needs a free 2-dimensional grid".into()));
            }
            let emb = embed_grid(side)?;
            let g = emb.host().clone();
            embedding = Some(emb);
            g
        } else {
            grid_box(dim, side, torus)?
        }
    } else if let Some(v) = &s.strip {
        let (w, h) = pair(v);
        run.param("strip", [w, h]);
        run.param("slits", &a.slits);
        half_plane_strip(w, h, &a.slits)?
    } else if let Some(v) = &s.ball {
        let (dim, r) = pair(v);
        run.param("ball", [dim, r]);
        lattice_ball(dim, r)?.graph
    } else if let Some(v) = &s.random {
        let (n, m) = pair(v);
        run.param("random", [n, m]);
        run.param("connected", a.connected);
        run.seed(a.seed);
        let mut rng = stream(a.seed);
        if a.connected {
            graph::random_connected_multigraph(&mut rng, n, m)?
        } else {
            if n == 0 && m > 0 {
                return Err(CliError::Usage("edges need at least one vertex".into()));
            }
            graph::random_multigraph(&mut rng, n, m)
        }
    } else if let Some(n) = s.complete {
        run.param("complete", n);
        complete_graph(n)
    } else {
        run.param("correlation_example", true);
        build_correlation_example().graph
    };
    if a.embed && embedding.is_none() {
        return Err(CliError::Usage("--embed needs --grid 2 SIDE".into()));
    }
    let mut doc = GraphDocument::new(graph);
    if let Some(seed) = a.label_seed {
        run.seed(seed);
        run.param("exact_labels", a.exact_labels);
        let l = if a.exact_labels {
            Labeling::sample_exact(&doc.graph, seed)
        } else {
            Labeling::sample(&doc.graph, seed)
        };
        doc = doc.with_labels(l)?;
    }
    if let Some(e) = &embedding {
        doc = doc.with_embedding(e);
    }
    run.emit(a.out.as_deref(), &format_graph(&doc))
}

fn forest(run: &mut Run, a: ForestArgs) -> Out {
    let LabelArgs {
        graph,
        seed,
        boundary,
        no_boundary,
    } = &a.input;
    let doc = load(run, graph)?;
    let g = &doc.graph;
    let boundary = boundary_of(run, &doc, boundary.as_deref(), *no_boundary)?;
    let u = labels_of(run, &doc, *seed);
    let free = kruskal_mst(g, &u);
    let zf = z_free_all(g, &u);
    let (wired, zw) = if boundary.is_empty() {
        (free.clone(), zf.iter().copied().map(Some).collect())
    } else {
        (wired_mst(g, &boundary, &u)?, z_wired_all(g, &boundary, &u)?)
    };
    let rows: Vec<Vec<String>> = g
        .edges()
        .map(|e| {
            let (x, y) = g.endpoints(e);
            vec![
                e.0.to_string(),
                x.0.to_string(),
                y.0.to_string(),
                u.label(e).to_string(),
                flag(free.contains(e)),
                flag(wired.contains(e)),
                z_text(zf[e.0], &u),
                zw[e.0].map_or(String::new(), |z| z_text(z, &u)),
            ]
        })
        .collect();
    let header = ["edge_id", "u", "v", "label", "in_free", "in_wired", "z_free", "z_wired"];
    let text = match a.format {
        Format::Csv => csv_text(&header, rows),
        Format::Json => json_text(&json!({
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "free_size": free.len(),
            "wired_size": wired.len(),
            "boundary_size": boundary.len(),
            "rows": rows.iter().map(|r| {
                header.iter().zip(r).map(|(k, v)| (k.to_string(), Value::String(v.clone()))).collect::<serde_json::Map<_, _>>()
            }).collect::<Vec<_>>(),
        })),
    };
    run.emit(a.out.as_deref(), &text)
}

fn invade(run: &mut Run, a: InvadeArgs) -> Out {
    let LabelArgs {
        graph,
        seed,
        boundary,
        no_boundary,
    } = &a.input;
    let doc = load(run, graph)?;
    let g = &doc.graph;
    let boundary = boundary_of(run, &doc, boundary.as_deref(), *no_boundary)?;
    let u = labels_of(run, &doc, *seed);
    let source = VertexId(a.source);
    g.check_vertex(source).map_err(|_| Error::BadSource(source))?;
    let steps = a.steps.unwrap_or(usize::MAX);
    run.param("source", a.source);
    run.param("basin", a.basin);
    run.param("steps", a.steps);
    let (trace, edge_map): (InvasionTrace, Box<dyn Fn(EdgeId) -> EdgeId>) = if boundary.is_empty() {
        let t = if a.basin {
            invasion_basin(g, &u, source, steps)?
        } else {
            invasion_tree(g, &u, source, steps)?
        };
        (t, Box::new(|e| e))
    } else {
        let q = g.wired_quotient(&boundary)?;
        let s = q.vertex_map[source.0];
        if s == q.wired {
            return Err(Error::BadSource(source).into());
        }
        let qu = u.pullback(&q.original_edges);
        let t = if a.basin {
            invasion_basin_until(&q.graph, &qu, s, q.wired, steps)?
        } else {
            invasion_tree_until(&q.graph, &qu, s, q.wired, steps)?
        };
        let originals = q.original_edges.clone();
        (t, Box::new(move |e: EdgeId| originals[e.0]))
    };
    let edges: Vec<EdgeId> = trace.edges_in_order.iter().map(|&e| edge_map(e)).collect();
    let mut is_record = vec![false; edges.len()];
    let mut best: Option<EdgeId> = None;
    for (k, &e) in edges.iter().enumerate().rev() {
        if best.is_none_or(|b| u.less(b, e)) {
            is_record[k] = true;
            best = Some(e);
        }
    }
    let mut running: Option<EdgeId> = None;
    let rows: Vec<Vec<String>> = edges
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            if running.is_none_or(|r| u.less(r, e)) {
                running = Some(e);
            }
            let (x, y) = g.endpoints(e);
            vec![
                k.to_string(),
                e.0.to_string(),
                x.0.to_string(),
                y.0.to_string(),
                u.label(e).to_string(),
                u.label(running.expect("set above")).to_string(),
                flag(is_record[k]),
            ]
        })
        .collect();
    let header = ["step", "edge_id", "u", "v", "label", "running_max", "record"];
    let text = match a.format {
        Format::Csv => csv_text(&header, rows),
        Format::Json => json_text(&json!({
            "source": a.source,
            "kind": if a.basin { "basin" } else { "tree" },
            "saturated": trace.saturated,
            "reached_boundary": trace.reached_stop,
            "edges": edges.iter().map(|e| e.0).collect::<Vec<_>>(),
            "records": is_record.iter().enumerate().filter(|r| *r.1).map(|r| r.0).collect::<Vec<_>>(),
            "labels": edges.iter().map(|&e| u.label(e).to_string()).collect::<Vec<_>>(),
        })),
    };
    run.emit(a.out.as_deref(), &text)
}

fn correlation_json(a: EdgeId, b: EdgeId, c: &CorrelationReport) -> Value {
    json!({
        "a": a.0,
        "b": b.0,
        "first": rational_string(&c.first),
        "second": rational_string(&c.second),
        "joint": rational_string(&c.joint),
        "ratio": rational_string(&c.ratio),
        "positive": c.positively_correlated(),
    })
}

fn exact(run: &mut Run, a: ExactArgs) -> Out {
    if a.tree.is_none() && !a.all && !a.exhibit {
        return Err(CliError::Usage("choose --tree, --all or --exhibit".into()));
    }
    if a.pair.is_some() && !a.all {
        return Err(CliError::Usage("--pair needs --all".into()));
    }
    let doc = load(run, &a.graph)?;
    let g = &doc.graph;
    run.param("oracle", a.oracle);
    let mut out = serde_json::Map::new();
    let mut csv_rows: Vec<Vec<String>> = Vec::new();
    if let Some(t) = &a.tree {
        run.param("tree", t);
        let tree: Vec<EdgeId> = t.iter().map(|&e| EdgeId(e)).collect();
        let p = mst_probability(g, &tree)?;
        let mut entry = json!({ "tree": t, "probability": rational_string(&p) });
        if a.oracle {
            let o = mst_probability_oracle(g, &tree)?;
            if o != p {
                return Err(CliError::Failed(format!(
                    "oracle gives {} for the tree",
                    rational_string(&o)
                )));
            }
            entry["oracle_agrees"] = json!(true);
        }
        csv_rows.push(vec![join(t.iter()), rational_string(&p)]);
        out.insert("tree".into(), entry);
    }
    if a.all {
        let catalog = tree_catalog(g)?;
        if a.oracle {
            for (t, p) in catalog.trees.iter().zip(&catalog.probabilities) {
                if &mst_probability_oracle(g, t)? != p {
                    return Err(CliError::Failed(format!(
                        "oracle disagrees on tree {}",
                        join(t.iter().map(|e| e.0))
                    )));
                }
            }
        }
        let pairs: Vec<(EdgeId, EdgeId)> = match &a.pair {
            Some(p) => {
                run.param("pair", p);
                vec![(EdgeId(p[0]), EdgeId(p[1]))]
            }
            None => {
                let present: Vec<EdgeId> = g
                    .edges()
                    .filter(|e| catalog.trees.iter().any(|t| t.contains(e)))
                    .collect();
                present
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &x)| present[i + 1..].iter().map(move |&y| (x, y)))
                    .collect()
            }
        };
        let mut correlations = Vec::new();
        for (x, y) in pairs {
            g.check_edge(x)?;
            g.check_edge(y)?;
            correlations.push(correlation_json(x, y, &edge_correlation(&catalog, x, y)?));
        }
        for (t, p) in catalog.trees.iter().zip(&catalog.probabilities) {
            csv_rows.push(vec![join(t.iter().map(|e| e.0)), rational_string(p)]);
        }
        out.insert(
            "catalog".into(),
            json!({
                "trees": catalog.trees.iter().zip(&catalog.probabilities).map(|(t, p)| json!({
                    "edges": t.iter().map(|e| e.0).collect::<Vec<_>>(),
                    "probability": rational_string(p),
                })).collect::<Vec<_>>(),
                "classes": catalog.classes().iter().map(|(p, n)| json!({
                    "probability": rational_string(p),
                    "count": n,
                })).collect::<Vec<_>>(),
                "total": rational_string(&catalog.total()),
                "oracle_agrees": a.oracle.then_some(true),
                "correlations": correlations,
            }),
        );
    }
    if a.exhibit {
        let x = deletion_exhibit(g)?;
        out.insert(
            "exhibit".into(),
            match &x {
                Some(x) => json!({
                    "deleted": x.deleted.0,
                    "tree": x.tree.iter().map(|e| e.0).collect::<Vec<_>>(),
                    "conditional": rational_string(&x.conditional),
                    "deleted_graph": rational_string(&x.deleted_graph),
                }),
                None => Value::Null,
            },
        );
        if let Some(x) = x {
            csv_rows.push(vec![
                format!("{} given {} absent", join(x.tree.iter().map(|e| e.0)), x.deleted.0),
                format!(
                    "{} vs {}",
                    rational_string(&x.conditional),
                    rational_string(&x.deleted_graph)
                ),
            ]);
        }
    }
    let text = match a.format {
        Format::Json => json_text(&Value::Object(out)),
        Format::Csv => csv_text(&["tree", "probability"], csv_rows),
    };
    run.emit(a.out.as_deref(), &text)
}

fn join<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn dual(run: &mut Run, a: DualArgs) -> Out {
    let doc = load(run, &a.graph)?;
    let emb = doc
        .embedding()?
        .ok_or_else(|| CliError::Failed(format!("{}: no rotation block", a.graph.display())))?;
    let pair = dual_graph(&emb)?;
    let d = pair.dual_graph();
    let dual_doc = GraphDocument::new(d.clone()).with_embedding(&pair.dual);
    run.emit(Some(&a.out), &format_graph(&dual_doc))?;
    let verified = match a.verify_seed {
        Some(s) => {
            run.seed(s);
            let ok = verify_tree_duality(&pair, &Labeling::sample(emb.host(), s))?;
            Some(ok)
        }
        None => None,
    };
    let rows: Vec<Vec<String>> = emb
        .host()
        .edges()
        .map(|e| {
            let f = pair.edge_bijection[e.0];
            let (x, y) = d.endpoints(f);
            vec![e.0.to_string(), f.0.to_string(), x.0.to_string(), y.0.to_string()]
        })
        .collect();
    let summary = msflab::planar::summarize(&pair);
    let text = match a.format {
        Format::Csv => csv_text(&["primal_edge", "dual_edge", "face_a", "face_b"], rows),
        Format::Json => json_text(&json!({
            "summary": summary,
            "outer_vertex": pair.outer_vertex().0,
            "tree_duality": verified,
            "bijection": rows.iter().map(|r| json!({
                "primal_edge": r[0].parse::<usize>().expect("numeric"),
                "dual_edge": r[1].parse::<usize>().expect("numeric"),
                "face_a": r[2].parse::<usize>().expect("numeric"),
                "face_b": r[3].parse::<usize>().expect("numeric"),
            })).collect::<Vec<_>>(),
        })),
    };
    run.emit(a.table.as_deref(), &text)?;
    if verified == Some(false) {
        return Err(CliError::Failed("tree duality check failed".into()));
    }
    Ok(())
}

fn graph_and_boundary(run: &mut Run, g: &GraphBoundary) -> Result<(GraphDocument, Vec<VertexId>), CliError> {
    let doc = load(run, &g.graph)?;
    let b = boundary_of(run, &doc, g.boundary.as_deref(), g.no_boundary)?;
    Ok((doc, b))
}

fn check_p_grid(p: &[f64]) -> Out {
    if p.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(CliError::Usage("--p-grid values must lie in [0, 1]".into()));
    }
    Ok(())
}

fn stats(run: &mut Run, kind: StatsKind) -> Out {
    match kind {
        StatsKind::Degree { g, t } => {
            let (doc, boundary) = graph_and_boundary(run, &g)?;
            run.param("kind", "degree");
            run.param("trials", t.trials);
            run.seed(t.seed);
            let stats = forest_trials(&doc.graph, &boundary, t.trials, t.seed)?;
            let n = doc.graph.vertex_count().max(1);
            let rows = stats.records.iter().enumerate().map(|(i, r)| {
                let k = gcd(2 * r.tree_edges, n);
                vec![
                    i.to_string(),
                    r.seed.to_string(),
                    r.tree_edges.to_string(),
                    r.components.to_string(),
                    format!("{}/{}", 2 * r.tree_edges / k, n / k),
                    r.gap_size.to_string(),
                ]
            });
            let text = match t.format {
                Format::Csv => csv_text(
                    &["trial", "seed", "tree_edges", "components", "mean_degree", "gap_size"],
                    rows,
                ),
                Format::Json => json_text(&serde_json::to_value(&stats).expect("serializes")),
            };
            run.emit(t.out.as_deref(), &text)
        }
        StatsKind::Residuals { g, context, alpha, t } => {
            let (doc, boundary) = graph_and_boundary(run, &g)?;
            run.param("kind", "residuals");
            run.param("context", format!("{context:?}").to_lowercase());
            run.param("alpha", alpha);
            run.param("trials", t.trials);
            run.seed(t.seed);
            if context == ResidualKind::Wired && boundary.is_empty() {
                return Err(Error::EmptyBoundary.into());
            }
            let mut values = Vec::new();
            for i in 0..t.trials as u64 {
                let u = Labeling::sample(&doc.graph, derive_seed(t.seed, i));
                values.extend(match context {
                    ResidualKind::Free => coupling_residuals_free(&doc.graph, &u).values,
                    ResidualKind::Wired => coupling_residuals_wired(&doc.graph, &boundary, &u)?.values,
                });
            }
            let ks = ks_statistic(&values, alpha)?;
            eprintln!(
                "KS D={:.5} n={} critical={:.5} p={:.4} {}",
                ks.statistic,
                ks.n,
                ks.critical,
                ks.p_value,
                if ks.pass { "pass" } else { "fail" }
            );
            let text = match t.format {
                Format::Csv => csv_text(&["value"], values.iter().map(|v| vec![v.to_string()])),
                Format::Json => json_text(&json!({ "ks": ks, "values": values })),
            };
            run.emit(t.out.as_deref(), &text)
        }
        StatsKind::Scan { grid, p_grid, t } => {
            check_p_grid(&p_grid)?;
            let (dim, side) = pair(&grid);
            run.param("kind", "scan");
            run.param("grid", [dim, side]);
            run.param("p_grid", &p_grid);
            run.param("trials", t.trials);
            run.seed(t.seed);
            let rows = ae_uniqueness_scan(dim, side, &p_grid, t.trials, t.seed)?;
            let text = match t.format {
                Format::Csv => csv_text(
                    &["p", "mean_macroscopic", "stderr", "gap_frequency"],
                    rows.iter().map(|r| {
                        vec![
                            r.p.to_string(),
                            r.mean_macroscopic.to_string(),
                            r.stderr.to_string(),
                            r.gap_frequency.to_string(),
                        ]
                    }),
                ),
                Format::Json => json_text(&serde_json::to_value(&rows).expect("serializes")),
            };
            run.emit(t.out.as_deref(), &text)
        }
        StatsKind::Probe {
            g,
            p_grid,
            forest_seed,
            t,
        } => {
            check_p_grid(&p_grid)?;
            let (doc, boundary) = graph_and_boundary(run, &g)?;
            run.param("kind", "probe");
            run.param("p_grid", &p_grid);
            run.param("trials", t.trials);
            run.seed(forest_seed);
            run.seed(t.seed);
            let u = Labeling::sample(&doc.graph, forest_seed);
            let forest = if boundary.is_empty() {
                kruskal_mst(&doc.graph, &u)
            } else {
                wired_mst(&doc.graph, &boundary, &u)?
            };
            let rows = pc_forest_probe(&doc.graph, &forest, &p_grid, t.trials, t.seed)?;
            let text = match t.format {
                Format::Csv => csv_text(
                    &["p", "mean_largest", "stderr"],
                    rows.iter()
                        .map(|r| vec![r.p.to_string(), r.mean_largest.to_string(), r.stderr.to_string()]),
                ),
                Format::Json => json_text(&serde_json::to_value(&rows).expect("serializes")),
            };
            run.emit(t.out.as_deref(), &text)
        }
        StatsKind::Xi { graph, eps, t } => {
            if !(0.0..=1.0).contains(&eps) {
                return Err(CliError::Usage("--eps must lie in [0, 1]".into()));
            }
            let doc = load(run, &graph)?;
            let g = &doc.graph;
            run.param("kind", "xi");
            run.param("eps", eps);
            run.param("trials", t.trials);
            run.seed(t.seed);
            let all: Vec<EdgeId> = g.edges().collect();
            let parts = g.components(&all).count();
            let mut rows = Vec::with_capacity(t.trials);
            for i in 0..t.trials as u64 {
                let s = derive_seed(t.seed, i);
                let u = Labeling::sample(g, s);
                let xi = xi_sample(g, &u, eps)?;
                let tree = kruskal_mst(g, &u);
                rows.push(vec![
                    i.to_string(),
                    s.to_string(),
                    xi.len().to_string(),
                    tree.len().to_string(),
                    flag(g.components_of(xi.iter()).count() == parts),
                    flag(tree.is_subset(&xi)),
                ]);
            }
            let header = ["trial", "seed", "xi_edges", "tree_edges", "connected", "contains_tree"];
            let text = match t.format {
                Format::Csv => csv_text(&header, rows),
                Format::Json => json_text(&Value::Array(
                    rows.iter()
                        .map(|r| {
                            header
                                .iter()
                                .zip(r)
                                .map(|(k, v)| (k.to_string(), json!(v.parse::<u64>().expect("numeric"))))
                                .collect()
                        })
                        .collect(),
                )),
            };
            run.emit(t.out.as_deref(), &text)
        }
        StatsKind::Law { graph, eps, t } => {
            if !(0.0..=1.0).contains(&eps) {
                return Err(CliError::Usage("--eps must lie in [0, 1]".into()));
            }
            let doc = load(run, &graph)?;
            run.param("kind", "law");
            run.param("eps", eps);
            run.param("trials", t.trials);
            run.seed(t.seed);
            let law = free_union_law_check(&doc.graph, eps, t.trials, t.seed)?;
            eprintln!(
                "max discrepancy {:.5} ({:.2} standard errors)",
                law.max_discrepancy, law.max_z
            );
            let text = match t.format {
                Format::Csv => csv_text(
                    &["edge_id", "union_frequency", "xi_frequency", "stderr"],
                    (0..doc.graph.edge_count()).map(|e| {
                        vec![
                            e.to_string(),
                            law.union_frequency[e].to_string(),
                            law.xi_frequency[e].to_string(),
                            law.stderr[e].to_string(),
                        ]
                    }),
                ),
                Format::Json => json_text(&serde_json::to_value(&law).expect("serializes")),
            };
            run.emit(t.out.as_deref(), &text)
        }
        StatsKind::Disjoint { g, sources, t } => {
            let (doc, boundary) = graph_and_boundary(run, &g)?;
            run.param("kind", "disjoint");
            run.param("sources", &sources);
            run.param("trials", t.trials);
            run.seed(t.seed);
            let vs: Vec<VertexId> = sources.iter().map(|&v| VertexId(v)).collect();
            let est = disjoint_invasion_probability(&doc.graph, &boundary, &vs, t.trials, t.seed)?;
            let text = match t.format {
                Format::Csv => csv_text(
                    &["sources", "mean", "stderr", "trials"],
                    [vec![
                        join(sources.iter()),
                        est.mean.to_string(),
                        est.stderr.to_string(),
                        est.trials.to_string(),
                    ]],
                ),
                Format::Json => json_text(&json!({ "sources": sources, "estimate": est })),
            };
            run.emit(t.out.as_deref(), &text)
        }
        StatsKind::Exhaustion {
            dim,
            radii,
            window,
            seed,
            format,
            out,
        } => {
            run.param("kind", "exhaustion");
            run.param("dim", dim);
            run.param("radii", &radii);
            run.param("window", window);
            run.seed(seed);
            let report = exhaustion_run(&ExhaustionConfig {
                dimension: dim,
                radii,
                seed,
                window,
            })?;
            let text = match format {
                Format::Csv => csv_text(
                    &["radius", "side", "free_reference_edges", "wired_reference_edges", "gap"],
                    report.levels.iter().map(|l| {
                        vec![
                            l.radius.to_string(),
                            l.side.to_string(),
                            l.free.len().to_string(),
                            l.wired.len().to_string(),
                            l.free.difference(&l.wired).len().to_string(),
                        ]
                    }),
                ),
                Format::Json => json_text(&json!({
                    "dimension": report.dimension,
                    "window": report.window,
                    "reference_edges": report.reference_keys.len(),
                    "free": report.free,
                    "wired": report.wired,
                    "gap": report.gap,
                    "inconclusive": report.inconclusive(),
                })),
            };
            run.emit(out.as_deref(), &text)
        }
    }
}

fn suite(run: &mut Run, a: SuiteArgs) -> Out {
    let level = match a.level {
        Level::Quick => SuiteLevel::Quick,
        Level::Full => SuiteLevel::Full,
    };
    let ids: Vec<u8> = if a.only.is_empty() {
        CRITERIA.collect()
    } else {
        a.only.clone()
    };
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.contains(id)) {
        return Err(CliError::Usage(format!("no criterion {bad}; choose 1 to 15")));
    }
    let previous = match &a.compare {
        Some(p) => Some(read_report(p)?),
        None => None,
    };
    run.param("level", level.to_string());
    run.param("criteria", &ids);
    let mut results: Vec<CriterionResult> = Vec::with_capacity(ids.len());
    for id in ids {
        let r = run_criterion(id, level)?;
        eprintln!("{}", r.line());
        run.seed(r.seed);
        results.push(r);
    }
    let report = SuiteReport {
        schema_version: SCHEMA_VERSION,
        level,
        version: env!("CARGO_PKG_VERSION").to_string(),
        pass: results.iter().all(|r| r.pass),
        results,
    };
    if let Some(prev) = &previous {
        for r in &report.results {
            match prev.results.iter().find(|p| p.id == r.id) {
                Some(p) if p.pass != r.pass => {
                    eprintln!("criterion {}: was {}, now {}", r.id, verdict(p.pass), verdict(r.pass))
                }
                Some(p) if p.metrics != r.metrics => eprintln!("criterion {}: metrics changed", r.id),
                Some(_) => {}
                None => eprintln!("criterion {}: not in the earlier report", r.id),
            }
        }
    }
    let text = match a.format {
        Format::Json => json_text(&serde_json::to_value(&report).expect("serializes")),
        Format::Csv => csv_text(
            &["id", "name", "pass", "trials", "failures", "seed", "tolerance"],
            report.results.iter().map(|r| {
                vec![
                    r.id.to_string(),
                    r.name.clone(),
                    flag(r.pass),
                    r.trials.to_string(),
                    r.failures.to_string(),
                    r.seed.to_string(),
                    r.tolerance.clone(),
                ]
            }),
        ),
    };
    run.emit(a.out.as_deref(), &text)?;
    let failed = report.results.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} criteria failed")));
    }
    Ok(())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn read_report(path: &Path) -> Result<SuiteReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
    let version = value.get("schema_version").and_then(Value::as_u64);
    if version != Some(u64::from(SCHEMA_VERSION)) {
        return Err(CliError::Failed(format!(
            "{}: schema version {} does not match this build's {SCHEMA_VERSION}; refusing to compare",
            path.display(),
            version.map_or("missing".to_string(), |v| v.to_string())
        )));
    }
    serde_json::from_value(value).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}
