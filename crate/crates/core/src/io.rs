//! Edge-list text format.
//!
//! ```text
//! # comment
//! vertices 4 edges 3
//! 0 1 0.25
//! 1 2 1/3
//! 2 3 0.9
//! tag boundary 0 3
//! 0: 0
//! 1: 0 1
//! ```
//!
//! After the header come exactly `M` edge lines `u v [label]`. Labels are
//! either given on every edge or on none. The edge block may be followed by
//! `tag <name> v...` lines and by rotation lines `v: e1 e2 ...` giving a plane
//! embedding; a rotation, when present, must list every vertex.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::labeling::{Label, Labeling};
use crate::planar::PlaneEmbedding;

#[derive(Clone, Debug)]
pub struct GraphDocument {
    pub graph: MultiGraph,
    pub labels: Option<Labeling>,
    /// Cyclic edge order at each vertex.
    pub rotation: Option<Vec<Vec<EdgeId>>>,
}

impl GraphDocument {
    pub fn new(graph: MultiGraph) -> Self {
        Self {
            graph,
            labels: None,
            rotation: None,
        }
    }

    pub fn with_labels(mut self, labels: Labeling) -> Result<Self> {
        if labels.len() != self.graph.edge_count() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} edges",
                labels.len(),
                self.graph.edge_count()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_embedding(mut self, embedding: &PlaneEmbedding) -> Self {
        self.rotation = Some(embedding.rotation_edges());
        self
    }

    pub fn embedding(&self) -> Result<Option<PlaneEmbedding>> {
        self.rotation
            .as_ref()
            .map(|r| PlaneEmbedding::from_rotation(self.graph.clone(), r))
            .transpose()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_index(token: &str, line: usize, what: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("bad {what} {token:?}")))
}

pub fn parse_graph(text: &str) -> Result<GraphDocument> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "vertices" || h[2] != "edges" {
        return Err(parse_err(hline, "expected `vertices N edges M`"));
    }
    let n = parse_index(h[1], hline, "vertex count")?;
    let m = parse_index(h[3], hline, "edge count")?;

    let mut edges = Vec::with_capacity(m);
    let mut labels: Vec<Label> = Vec::new();
    let mut labelled: Option<bool> = None;
    let mut last_line = hline;
    for _ in 0..m {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(last_line + 1, format!("expected {m} edge lines, found {}", edges.len())))?;
        last_line = ln;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() < 2 {
            return Err(parse_err(ln, "edge line needs two endpoints"));
        }
        if t.len() > 3 {
            return Err(parse_err(ln, "too many fields on edge line"));
        }
        let u = parse_index(t[0], ln, "endpoint")?;
        let v = parse_index(t[1], ln, "endpoint")?;
        if u >= n || v >= n {
            return Err(parse_err(ln, format!("endpoint out of range for {n} vertices")));
        }
        edges.push((u, v));
        let has = t.len() == 3;
        if *labelled.get_or_insert(has) != has {
            return Err(parse_err(ln, "labels must be given on every edge or none"));
        }
        if has {
            let label: Label = t[2].parse().map_err(|e: String| parse_err(ln, e))?;
            if !(0.0..=1.0).contains(&label.to_f64()) {
                return Err(parse_err(ln, format!("label {label} outside [0, 1]")));
            }
            labels.push(label);
        }
    }

    let mut graph = MultiGraph::new(n, &edges).map_err(|e| parse_err(hline, e.to_string()))?;
    let mut rotation: Vec<Option<Vec<EdgeId>>> = Vec::new();
    let mut rotation_line = last_line;
    for (ln, line) in lines {
        if let Some(rest) = line.strip_prefix("tag ") {
            let mut t = rest.split_whitespace();
            let name = t.next().ok_or_else(|| parse_err(ln, "tag needs a name"))?;
            let vs = t
                .map(|x| {
                    let v = parse_index(x, ln, "vertex")?;
                    if v >= n {
                        return Err(parse_err(ln, format!("vertex {v} out of range")));
                    }
                    Ok(VertexId(v))
                })
                .collect::<Result<Vec<_>>>()?;
            graph = graph.with_tag(name, vs).map_err(|e| parse_err(ln, e.to_string()))?;
        } else if let Some((v, ring)) = line.split_once(':') {
            let v = parse_index(v.trim(), ln, "vertex")?;
            if v >= n {
                return Err(parse_err(ln, format!("vertex {v} out of range")));
            }
            let ring = ring
                .split_whitespace()
                .map(|x| {
                    let e = parse_index(x, ln, "edge")?;
                    if e >= m {
                        return Err(parse_err(ln, format!("edge {e} out of range")));
                    }
                    Ok(EdgeId(e))
                })
                .collect::<Result<Vec<_>>>()?;
            rotation.resize(n, None);
            rotation_line = ln;
            if rotation[v].replace(ring).is_some() {
                return Err(parse_err(ln, format!("second rotation for vertex {v}")));
            }
        } else {
            return Err(parse_err(ln, format!("unexpected line {line:?}")));
        }
    }
    let rotation = if rotation.is_empty() {
        None
    } else {
        if let Some(v) = rotation.iter().position(Option::is_none) {
            return Err(parse_err(rotation_line, format!("rotation missing for vertex {v}")));
        }
        Some(rotation.into_iter().map(Option::unwrap).collect())
    };
    let labels = if labelled == Some(true) {
        Some(Labeling::from_labels(labels).map_err(|e| parse_err(hline, e.to_string()))?)
    } else {
        None
    };
    Ok(GraphDocument {
        graph,
        labels,
        rotation,
    })
}

/// Floats print as the shortest decimal that reads back to the same value;
/// rationals print as `p/q`.
pub fn format_graph(doc: &GraphDocument) -> String {
    let g = &doc.graph;
    let mut out = format!("vertices {} edges {}\n", g.vertex_count(), g.edge_count());
    for e in g.edges() {
        let (u, v) = g.endpoints(e);
        match &doc.labels {
            Some(l) => writeln!(out, "{} {} {}", u.0, v.0, l.label(e)),
            None => writeln!(out, "{} {}", u.0, v.0),
        }
        .expect("writing to a string");
    }
    for (name, vs) in g.tags() {
        out.push_str("tag ");
        out.push_str(name);
        for v in vs {
            write!(out, " {}", v.0).expect("writing to a string");
        }
        out.push('\n');
    }
    if let Some(rot) = &doc.rotation {
        for (v, ring) in rot.iter().enumerate() {
            write!(out, "{v}:").expect("writing to a string");
            for e in ring {
                write!(out, " {}", e.0).expect("writing to a string");
            }
            out.push('\n');
        }
    }
    out
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<GraphDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_graph(&text)
}

pub fn write_graph(doc: &GraphDocument, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_graph(doc)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// A vertex list file: whitespace-separated vertex ids, `#` comments.
pub fn parse_vertex_list(text: &str) -> Result<Vec<VertexId>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for t in line.split('#').next().unwrap_or("").split_whitespace() {
            out.push(VertexId(parse_index(t, i + 1, "vertex")?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::build_correlation_example;
    use crate::graph::{grid_box, GridTopology, BOUNDARY_TAG};
    use crate::planar::embed_grid;
    use num_rational::BigRational;

    #[test]
    fn round_trip_structure() {
        let g = build_correlation_example().graph;
        let doc = GraphDocument::new(g.clone());
        let back = parse_graph(&format_graph(&doc)).unwrap();
        assert_eq!(back.graph.edge_list(), g.edge_list());
        assert_eq!(back.graph.vertex_count(), g.vertex_count());
        assert!(back.labels.is_none() && back.rotation.is_none());
    }

    #[test]
    fn round_trip_labels_tags_and_rotation() {
        let g = grid_box(2, 4, GridTopology::Free).unwrap();
        let emb = embed_grid(4).unwrap();
        let labels = Labeling::sample(&g, 11);
        let doc = GraphDocument::new(g.clone())
            .with_labels(labels.clone())
            .unwrap()
            .with_embedding(&emb);
        let text = format_graph(&doc);
        let back = parse_graph(&text).unwrap();
        assert_eq!(
            back.labels.as_ref().unwrap(),
            &Labeling::from_floats((0..g.edge_count()).map(|i| labels.value(EdgeId(i))).collect()).unwrap()
        );
        for e in g.edges() {
            assert_eq!(
                back.labels.as_ref().unwrap().value(e).to_bits(),
                labels.value(e).to_bits()
            );
        }
        assert_eq!(back.graph.tagged(BOUNDARY_TAG), g.tagged(BOUNDARY_TAG));
        assert_eq!(back.rotation.as_ref().unwrap(), &emb.rotation_edges());
        assert_eq!(back.embedding().unwrap().unwrap().face_count(), emb.face_count());
        assert_eq!(format_graph(&back), text);
    }

    #[test]
    fn rational_labels_are_exact() {
        let doc = parse_graph("vertices 2 edges 2\n0 1 1/3\n1 0 0.5 # comment\n").unwrap();
        let l = doc.labels.unwrap();
        assert_eq!(l.exact_value(EdgeId(0)).unwrap(), &BigRational::new(1.into(), 3.into()));
        assert_eq!(l.exact_value(EdgeId(1)).unwrap(), &BigRational::new(1.into(), 2.into()));
        let again = parse_graph(&format_graph(
            &GraphDocument::new(doc.graph).with_labels(l.clone()).unwrap(),
        ))
        .unwrap();
        assert_eq!(again.labels.unwrap(), l);
    }

    #[test]
    fn errors_name_the_line() {
        let cases = [
            ("vertices 3 edges 2\n0 1\n2\n", 3),
            ("# hi\nvertices 3 edges 1\n0 5\n", 3),
            ("vertices 3 edges 2\n0 1 0.5\n1 2\n", 3),
            ("vertices 3 edges 1\n0 1 1.5\n", 2),
            ("vertices 3 edges 1\n0 1\nbogus\n", 3),
            ("verts 3\n", 1),
            ("vertices 2 edges 2\n0 1\n", 3),
            ("vertices 2 edges 1\n0 1\n0: 0\n", 3),
        ];
        for (text, line) in cases {
            match parse_graph(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn loops_and_parallel_edges() {
        let doc = parse_graph("vertices 2 edges 3\n0 0\n0 1\n0 1\n").unwrap();
        assert!(doc.graph.is_loop(EdgeId(0)));
        assert_eq!(doc.graph.degree(VertexId(0)), 4);
    }

    #[test]
    fn vertex_lists() {
        assert_eq!(
            parse_vertex_list("1 2\n# x\n3").unwrap(),
            vec![VertexId(1), VertexId(2), VertexId(3)]
        );
        assert!(parse_vertex_list("a").is_err());
    }
}
