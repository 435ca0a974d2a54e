//! End-to-end flows through the public API.

use tworibbon::coding::{base_spectacles_sf, forward_path, verify_branching, Coder};
use tworibbon::export::{graph_json, orbits_json, path_json};
use tworibbon::geom::BoundaryPoint;
use tworibbon::group_graph::{canonicalize, expand, GraphBall};
use tworibbon::orbits::{enumerate_orbits, roundtrip_verify, tango};
use tworibbon::render::{render_scene, Overlays};
use tworibbon::topology::{h1, surgery_presentation};

#[test]
fn ball_to_svg_and_json() {
    let t = canonicalize(3, 4, Some(5)).unwrap();
    let ball = expand(&t, 4).unwrap();
    let s = base_spectacles_sf(&ball).unwrap();
    assert!(verify_branching(&s, &ball));
    let xi = BoundaryPoint::new(2.0);
    let path = forward_path(&s, &ball, GraphBall::BASE_A, xi, 4).unwrap();
    let doc = path_json(&ball, &path, None, xi);
    let ids = doc["vertex_ids"].as_array().unwrap();
    assert_eq!(ids.len(), 5);
    assert_eq!(ids[0], 0);
    assert!(ids.iter().all(|v| v.is_u64()));
    let graph = graph_json(&ball);
    assert_eq!(graph["vertices"].as_array().unwrap().len(), ball.vertices.len());
    let w = "<a^2 b a b^3>".parse().unwrap();
    let ov = Overlays::default()
        .with_spectacles(&s)
        .with_path(&path, &ball.triangle)
        .with_tango(&tango(&ball, &w).unwrap(), &Coder::new(&t).unwrap().frames);
    let svg = render_scene(Some(&ball), &ov);
    assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
}

#[test]
fn orbits_round_trip_and_serialize() {
    let t = canonicalize(2, 4, Some(6)).unwrap();
    let c = Coder::new(&t).unwrap();
    let orbits = enumerate_orbits(&t, 6).unwrap();
    assert!(orbits.iter().all(|o| roundtrip_verify(&c, o)));
    let doc = orbits_json(&t, 6, &orbits);
    assert_eq!(doc["count"], orbits.len());
    let text = serde_json::to_string(&doc).unwrap();
    assert_eq!(text, serde_json::to_string(&orbits_json(&t, 6, &orbits)).unwrap());
}

#[test]
fn homology_over_a_family() {
    for r in 7..15 {
        let t = canonicalize(2, 3, Some(r)).unwrap();
        let g = h1(&surgery_presentation(&t));
        assert_eq!(g.order().unwrap(), (r as i64 - 6).abs().into(), "r = {r}");
    }
}
