//! JSON documents for graphs, paths, orbits and homology.
//!
//! Every document carries `"schema": 1`. Keys are emitted in sorted order,
//! so equal inputs give equal text. Words are written in the labelling of
//! the parameters as given; coordinates refer to the canonical triangle.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::coding::{BiPath, GraphPath};
use crate::geom::{order_label, BoundaryPoint};
use crate::group_graph::{face_left_of, GraphBall, TriangleParams, VertexKind};
use crate::orbits::PeriodicOrbit;
use crate::topology::{h1, linking_matrix, SurgeryPresentation};
use crate::words::{format_blocks, Block, Relabel};

pub const SCHEMA: u32 = 1;

fn kind_str(k: VertexKind) -> &'static str {
    match k {
        VertexKind::A => "A",
        VertexKind::B => "B",
    }
}

pub fn params_json(params: &TriangleParams) -> Value {
    json!({
        "p": params.p,
        "q": params.q,
        "r": order_label(params.r),
        "pq_swapped": params.swaps.pq_swapped,
        "qr_swapped": params.swaps.qr_swapped,
    })
}

fn relabel_blocks(blocks: &[Block], params: &TriangleParams) -> Vec<Block> {
    if params.swaps.pq_swapped {
        blocks.iter().map(|b| b.swapped()).collect()
    } else {
        blocks.to_vec()
    }
}

/// Vertices, undirected edges, and the complete faces of the ball as lists
/// of indices into `edges`.
pub fn graph_json(ball: &GraphBall) -> Value {
    let vertices: Vec<Value> = ball
        .vertices
        .iter()
        .enumerate()
        .map(|(id, v)| json!({"id": id, "kind": kind_str(v.kind), "x": v.pos.re, "y": v.pos.im}))
        .collect();
    let edges: Vec<(usize, usize)> = ball
        .edges()
        .into_iter()
        .filter(|e| e.src < e.dst)
        .map(|e| (e.src, e.dst))
        .collect();
    let edge_id = |a: usize, b: usize| edges.binary_search(&(a.min(b), a.max(b))).ok();
    let mut seen = BTreeSet::new();
    let mut faces = Vec::new();
    for e in ball.edges() {
        let Ok(face) = face_left_of(ball, e) else { continue };
        let Some(ids) = face
            .edges
            .iter()
            .map(|f| edge_id(f.src, f.dst))
            .collect::<Option<Vec<usize>>>()
        else {
            continue;
        };
        let mut key = ids.clone();
        key.sort_unstable();
        if seen.insert(key) {
            faces.push(ids);
        }
    }
    json!({
        "schema": SCHEMA,
        "params": params_json(&ball.params),
        "depth": ball.depth,
        "vertices": vertices,
        "edges": edges.iter().map(|&(s, d)| json!({"src": s, "dst": d})).collect::<Vec<_>>(),
        "faces": faces,
    })
}

/// Ball vertex ids along `path`, `null` where the path leaves the ball.
fn path_vertex_ids(ball: &GraphBall, path: &GraphPath) -> Vec<Option<usize>> {
    let pts = path.vertices(&ball.triangle);
    let mut kind = path.start_kind;
    pts.into_iter()
        .map(|p| {
            let id = ball.find_vertex(kind, p);
            kind = kind.other();
            id
        })
        .collect()
}

pub fn path_json(ball: &GraphBall, path: &GraphPath, eta: Option<BoundaryPoint>, xi: BoundaryPoint) -> Value {
    json!({
        "schema": SCHEMA,
        "params": params_json(&ball.params),
        "start_kind": kind_str(path.start_kind),
        "vertex_ids": path_vertex_ids(ball, path),
        "code": format_blocks(&relabel_blocks(&path.code, &ball.params)),
        "eta": eta.map(|e| e.theta),
        "xi": xi.theta,
    })
}

pub fn bipath_json(ball: &GraphBall, bi: &BiPath) -> Value {
    let mut v = path_json(ball, &bi.window, Some(bi.eta), bi.xi);
    v["merged_pairs"] = json!(bi.merged_pairs);
    v["certificate"] = json!(bi
        .certificate
        .as_ref()
        .map(|c| c.relabel(&ball.params.swaps).to_string()));
    v
}

pub fn orbit_json(orbit: &PeriodicOrbit, params: &TriangleParams) -> Value {
    json!({
        "word": orbit.word.relabel(&params.swaps).to_string(),
        "blocks": orbit.word.block_count(),
        "trace": orbit.trace(),
        "attracting": orbit.attracting().theta,
        "repelling": orbit.repelling().theta,
        "exceptional": orbit.exceptional,
        "secondary": orbit.secondary.as_ref().map(|w| w.relabel(&params.swaps).to_string()),
    })
}

/// Orbit list in the order given, which `enumerate_orbits` already makes
/// stable: block count, then letters.
pub fn orbits_json(params: &TriangleParams, max_blocks: usize, orbits: &[PeriodicOrbit]) -> Value {
    json!({
        "schema": SCHEMA,
        "params": params_json(params),
        "max_blocks": max_blocks,
        "count": orbits.len(),
        "orbits": orbits.iter().map(|o| orbit_json(o, params)).collect::<Vec<_>>(),
    })
}

pub fn h1_json(params: &TriangleParams, pres: &SurgeryPresentation) -> Value {
    let group = h1(pres);
    let matrix: Vec<Vec<String>> = linking_matrix(pres)
        .iter()
        .map(|row| row.iter().map(|x| x.to_string()).collect())
        .collect();
    json!({
        "schema": SCHEMA,
        "params": params_json(params),
        "slopes": pres.slopes,
        "matrix": matrix,
        "invariant_factors": group.invariant_factors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "free_rank": group.free_rank,
        "order": group.order().map(|o| o.to_string()),
        "group": group.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_graph::{canonicalize, expand};
    use crate::orbits::enumerate_orbits;
    use crate::topology::surgery_presentation;

    #[test]
    fn graph_faces_are_closed_cycles_of_length_2r() {
        let t = canonicalize(3, 4, Some(5)).unwrap();
        let ball = expand(&t, 5).unwrap();
        let v = graph_json(&ball);
        assert_eq!(v["schema"], 1);
        let edges = v["edges"].as_array().unwrap();
        assert_eq!(edges.len(), ball.undirected_edge_count());
        let faces = v["faces"].as_array().unwrap();
        assert!(!faces.is_empty());
        for f in faces {
            let ids = f.as_array().unwrap();
            assert_eq!(ids.len(), 10);
        }
    }

    #[test]
    fn infinite_faces_are_omitted() {
        let t = canonicalize(2, 3, None).unwrap();
        let ball = expand(&t, 2).unwrap();
        assert!(graph_json(&ball)["faces"].as_array().unwrap().is_empty());
    }

    #[test]
    fn orbit_list_shape() {
        let t = canonicalize(3, 4, Some(5)).unwrap();
        let orbits = enumerate_orbits(&t, 2).unwrap();
        let v = orbits_json(&t, 2, &orbits);
        let words: Vec<&str> = v["orbits"]
            .as_array()
            .unwrap()
            .iter()
            .map(|o| o["word"].as_str().unwrap())
            .collect();
        // Letterwise admissibility keeps four of the six two-block words.
        assert_eq!(words, ["<a^2 b^2>", "<a^2 b^3>", "<a b>", "<a b^2>"]);
        assert!(v["orbits"][0]["trace"].as_f64().unwrap() > 2.0);
    }

    #[test]
    fn swapped_input_relabels_words() {
        let t = canonicalize(4, 3, Some(5)).unwrap();
        assert!(t.swaps.pq_swapped);
        let orbits = enumerate_orbits(&t, 2).unwrap();
        let v = orbits_json(&t, 2, &orbits);
        assert_eq!(v["orbits"][2]["word"], "<a b>");
        assert_eq!(v["orbits"][3]["word"], "<a^2 b>");
    }

    #[test]
    fn homology_document() {
        let t = canonicalize(3, 4, Some(5)).unwrap();
        let v = h1_json(&t, &surgery_presentation(&t));
        assert_eq!(v["invariant_factors"], json!(["13"]));
        assert_eq!(v["free_rank"], 0);
        assert_eq!(v["matrix"][0], json!(["2", "-1", "-1"]));
        let t = canonicalize(3, 4, None).unwrap();
        let v = h1_json(&t, &surgery_presentation(&t));
        assert_eq!(v["free_rank"], 1);
        assert_eq!(v["order"], Value::Null);
    }
}
