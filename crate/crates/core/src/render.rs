//! Deterministic SVG scenes of the Poincare disk.
//!
//! Every number is written with six decimals and negative zero is folded
//! into zero, so identical inputs give byte-identical files.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coding::{EdgeFrame, Frames, GraphPath, SpectaclesPair};
use crate::error::{Error, Result};
use crate::geom::{BoundaryArc, BoundaryPoint, DiskPoint, Isometry, Orientation, Transform, Triangle};
use crate::group_graph::{GraphBall, VertexKind};
use crate::orbits::TangoPath;

/// Side of the square viewport.
pub const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;
const RADIUS: f64 = SIZE / 2.0 - MARGIN;
/// Spectacles are drawn just outside the unit circle.
const SPECTACLE_RADIUS: f64 = 1.04;

/// Fixed six-decimal formatting without negative zero.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn screen(re: f64, im: f64) -> (f64, f64) {
    (SIZE / 2.0 + RADIUS * re, SIZE / 2.0 - RADIUS * im)
}

fn pt(re: f64, im: f64) -> String {
    let (x, y) = screen(re, im);
    format!("{} {}", fmt6(x), fmt6(y))
}

/// The geodesic between two boundary points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GeodesicArc {
    Diameter { from: BoundaryPoint, to: BoundaryPoint },
    Circle { from: BoundaryPoint, to: BoundaryPoint, center: (f64, f64), radius: f64 },
}

/// Circle orthogonal to the unit circle through `eta` and `xi`, or the
/// diameter when they are antipodal.
pub fn geodesic_arc(eta: BoundaryPoint, xi: BoundaryPoint) -> Result<GeodesicArc> {
    let delta = eta.angular_dist(xi);
    if delta < 1e-12 {
        return Err(Error::EndpointsEqual);
    }
    if (delta - PI).abs() < 1e-9 {
        return Ok(GeodesicArc::Diameter { from: eta, to: xi });
    }
    // The center lies on the bisector at distance sec(delta/2).
    let half = delta / 2.0;
    let mid = {
        let (s, c) = ((eta.theta.sin() + xi.theta.sin()) / 2.0, (eta.theta.cos() + xi.theta.cos()) / 2.0);
        s.atan2(c)
    };
    let d = 1.0 / half.cos();
    Ok(GeodesicArc::Circle {
        from: eta,
        to: xi,
        center: (d * mid.cos(), d * mid.sin()),
        radius: half.tan(),
    })
}

/// `|center|^2 - 1 - radius^2`, zero for circles orthogonal to the boundary.
pub fn orthogonality_residual(arc: &GeodesicArc) -> f64 {
    match arc {
        GeodesicArc::Diameter { .. } => 0.0,
        GeodesicArc::Circle { center, radius, .. } => {
            center.0 * center.0 + center.1 * center.1 - 1.0 - radius * radius
        }
    }
}

/// SVG path data for the geodesic segment from `z1` to `z2`.
pub fn segment_path(z1: DiskPoint, z2: DiskPoint) -> String {
    let (a, b) = (z1.to_complex(), z2.to_complex());
    let cross = a.re * b.im - a.im * b.re;
    if cross.abs() < 1e-12 {
        return format!("M {} L {}", pt(a.re, a.im), pt(b.re, b.im));
    }
    // The geodesic circle also passes through the inversion of z1.
    let inv = if a.norm_sqr() > 1e-24 { a / a.norm_sqr() } else { b / b.norm_sqr() };
    let center = circumcenter(a, b, inv);
    let r = (a - center).norm() * RADIUS;
    let (p1, p2, c) = (screen(a.re, a.im), screen(b.re, b.im), screen(center.re, center.im));
    let sweep = ((p1.0 - c.0) * (p2.1 - c.1) - (p1.1 - c.1) * (p2.0 - c.0)) > 0.0;
    format!(
        "M {} A {} {} 0 0 {} {}",
        pt(a.re, a.im),
        fmt6(r),
        fmt6(r),
        u8::from(sweep),
        pt(b.re, b.im)
    )
}

fn circumcenter(a: num_complex::Complex64, b: num_complex::Complex64, c: num_complex::Complex64) -> num_complex::Complex64 {
    let d = 2.0 * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    let (na, nb, nc) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr());
    num_complex::Complex64::new(
        (na * (b.im - c.im) + nb * (c.im - a.im) + nc * (a.im - b.im)) / d,
        (na * (c.re - b.re) + nb * (a.re - c.re) + nc * (b.re - a.re)) / d,
    )
}

fn geodesic_path(arc: &GeodesicArc) -> String {
    match arc {
        GeodesicArc::Diameter { from, to } => {
            format!("M {} L {}", pt(from.theta.cos(), from.theta.sin()), pt(to.theta.cos(), to.theta.sin()))
        }
        GeodesicArc::Circle { from, to, radius, center } => {
            let p1 = (from.theta.cos(), from.theta.sin());
            let p2 = (to.theta.cos(), to.theta.sin());
            let s1 = screen(p1.0, p1.1);
            let s2 = screen(p2.0, p2.1);
            let c = screen(center.0, center.1);
            let sweep = ((s1.0 - c.0) * (s2.1 - c.1) - (s1.1 - c.1) * (s2.0 - c.0)) > 0.0;
            let r = radius * RADIUS;
            format!(
                "M {} A {} {} 0 0 {} {}",
                pt(p1.0, p1.1),
                fmt6(r),
                fmt6(r),
                u8::from(sweep),
                pt(p2.0, p2.1)
            )
        }
    }
}

/// SVG path data for a boundary arc drawn at radius `rho`.
fn boundary_arc_path(arc: &BoundaryArc, orient: Orientation, rho: f64) -> String {
    let len = arc.length(orient);
    let (l, r) = (arc.left.theta, arc.right.theta);
    // Counterclockwise in the disk is clockwise on screen, which SVG sweeps
    // with flag 1.
    let sweep = u8::from(orient == Orientation::CounterClockwise);
    let large = u8::from(len > PI);
    format!(
        "M {} A {} {} 0 {} {} {}",
        pt(rho * l.cos(), rho * l.sin()),
        fmt6(rho * RADIUS),
        fmt6(rho * RADIUS),
        large,
        sweep,
        pt(rho * r.cos(), rho * r.sin())
    )
}

/// Direction of the geodesic from `v` toward `w`, as an angle at `v`.
fn tangent_angle(v: DiskPoint, w: DiskPoint) -> f64 {
    let t = Isometry::translation_to(v).inverse();
    w.transformed(&t).arg()
}

/// Geometry of one tango arc: a circular arc around `center` from angle
/// `start`, turning by `turn` radians (positive counterclockwise).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangoGeom {
    pub center: DiskPoint,
    pub start: f64,
    pub turn: f64,
}

fn tango_arc_path(g: &TangoGeom) -> String {
    let c = g.center.to_complex();
    // Euclidean radius shrinking with the conformal factor.
    let rho = 0.05 * (1.0 - c.norm_sqr());
    let p = |a: f64| (c.re + rho * a.cos(), c.im + rho * a.sin());
    let (x1, y1) = p(g.start);
    let (x2, y2) = p(g.start + g.turn);
    format!(
        "M {} A {} {} 0 {} {} {}",
        pt(x1, y1),
        fmt6(rho * RADIUS),
        fmt6(rho * RADIUS),
        u8::from(g.turn.abs() > PI),
        u8::from(g.turn > 0.0),
        pt(x2, y2)
    )
}

/// What to draw on top of the graph, already resolved to disk geometry.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Overlays {
    pub spectacles: Vec<BoundaryArc>,
    pub spectacles_orient: Option<Orientation>,
    pub path: Vec<DiskPoint>,
    pub bigon: Vec<(DiskPoint, DiskPoint)>,
    pub tango: Vec<TangoGeom>,
    pub geodesic: Option<(BoundaryPoint, BoundaryPoint)>,
}

impl Overlays {
    pub fn with_spectacles(mut self, s: &SpectaclesPair) -> Self {
        self.spectacles = vec![s.i_a2b, s.i_b2a];
        self.spectacles_orient = Some(s.orient);
        self
    }

    pub fn with_path(mut self, path: &GraphPath, tri: &Triangle) -> Self {
        self.path = path.vertices(tri);
        self
    }

    pub fn with_bigon(mut self, edges: &[EdgeFrame], tri: &Triangle) -> Self {
        self.bigon = edges.iter().map(|e| (e.src(tri), e.dst(tri))).collect();
        self
    }

    pub fn with_tango(mut self, tango: &TangoPath, frames: &Frames) -> Self {
        self.tango = tango
            .arcs
            .iter()
            .map(|arc| {
                let v = arc.vertex;
                let step = 2.0 * PI / frames.order(arc.kind) as f64;
                let sign = if arc.counterclockwise { 1.0 } else { -1.0 };
                TangoGeom {
                    center: v,
                    start: tangent_angle(v, arc.entry.src(&frames.tri)),
                    turn: sign * step * arc.sectors as f64,
                }
            })
            .collect();
        self
    }

    pub fn with_geodesic(mut self, eta: BoundaryPoint, xi: BoundaryPoint) -> Self {
        self.geodesic = Some((eta, xi));
        self
    }
}

/// Renders the disk, the ball's vertices and edges, and the overlays.
pub fn render_scene(ball: Option<&GraphBall>, overlays: &Overlays) -> String {
    let mut out = String::new();
    let size = fmt6(SIZE);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    out.push_str(concat!(
        "<style>",
        ".disk{fill:#fbfaf7;stroke:#222;stroke-width:1.5}",
        ".edge{fill:none;stroke:#8a8a8a;stroke-width:0.8}",
        ".va{fill:#c0392b}.vb{fill:#2c6fbb}",
        ".spectacle{fill:none;stroke:#d68910;stroke-width:4}",
        ".path{fill:none;stroke:#111;stroke-width:2.5}",
        ".bigon{fill:none;stroke:#27ae60;stroke-width:2}",
        ".tango{fill:none;stroke:#8e44ad;stroke-width:2}",
        ".geodesic{fill:none;stroke:#e74c3c;stroke-width:1.5;stroke-dasharray:6 4}",
        "</style>\n"
    ));
    let c = fmt6(SIZE / 2.0);
    let _ = writeln!(out, r#"<circle id="disk" class="disk" cx="{c}" cy="{c}" r="{}"/>"#, fmt6(RADIUS));
    if let Some(ball) = ball {
        out.push_str("<g id=\"edges\">\n");
        for e in ball.edges().into_iter().filter(|e| e.src < e.dst) {
            let d = segment_path(ball.vertices[e.src].pos, ball.vertices[e.dst].pos);
            let _ = writeln!(out, r#"<path class="edge" d="{d}"/>"#);
        }
        out.push_str("</g>\n<g id=\"vertices\">\n");
        for v in &ball.vertices {
            let p = v.pos.to_complex();
            let (x, y) = screen(p.re, p.im);
            let r = (5.0 * (1.0 - p.norm_sqr())).max(0.5);
            let class = match v.kind {
                VertexKind::A => "va",
                VertexKind::B => "vb",
            };
            let _ = writeln!(
                out,
                r#"<circle class="{class}" cx="{}" cy="{}" r="{}"/>"#,
                fmt6(x),
                fmt6(y),
                fmt6(r)
            );
        }
        out.push_str("</g>\n");
    }
    if let Some(orient) = overlays.spectacles_orient {
        out.push_str("<g id=\"spectacles\">\n");
        for arc in &overlays.spectacles {
            let d = boundary_arc_path(arc, orient, SPECTACLE_RADIUS);
            let _ = writeln!(out, r#"<path class="spectacle" d="{d}"/>"#);
        }
        out.push_str("</g>\n");
    }
    if !overlays.bigon.is_empty() {
        out.push_str("<g id=\"bigon\">\n");
        for (a, b) in &overlays.bigon {
            let _ = writeln!(out, r#"<path class="bigon" d="{}"/>"#, segment_path(*a, *b));
        }
        out.push_str("</g>\n");
    }
    if let Some((eta, xi)) = overlays.geodesic {
        if let Ok(arc) = geodesic_arc(eta, xi) {
            let _ = writeln!(out, r#"<path id="geodesic" class="geodesic" d="{}"/>"#, geodesic_path(&arc));
        }
    }
    if overlays.path.len() > 1 {
        out.push_str("<g id=\"path\">\n");
        for w in overlays.path.windows(2) {
            let _ = writeln!(out, r#"<path class="path" d="{}"/>"#, segment_path(w[0], w[1]));
        }
        out.push_str("</g>\n");
    }
    if !overlays.tango.is_empty() {
        out.push_str("<g id=\"tango\">\n");
        for g in &overlays.tango {
            let _ = writeln!(out, r#"<path class="tango" d="{}"/>"#, tango_arc_path(g));
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::bigon_edges;
    use crate::coding::Coder;
    use crate::group_graph::{canonicalize, expand};
    use crate::orbits::tango_word;

    fn count(svg: &str, needle: &str) -> usize {
        svg.matches(needle).count()
    }

    #[test]
    fn antipodal_points_give_a_diameter() {
        let arc = geodesic_arc(BoundaryPoint::new(0.0), BoundaryPoint::new(PI)).unwrap();
        assert!(matches!(arc, GeodesicArc::Diameter { .. }));
    }

    #[test]
    fn quarter_geodesic_is_orthogonal() {
        let arc = geodesic_arc(BoundaryPoint::new(0.0), BoundaryPoint::new(PI / 2.0)).unwrap();
        match arc {
            GeodesicArc::Circle { center, radius, .. } => {
                assert!((center.0 - 1.0).abs() < 1e-12 && (center.1 - 1.0).abs() < 1e-12);
                assert!((radius - 1.0).abs() < 1e-12);
            }
            _ => panic!("expected a circle"),
        }
        assert!(orthogonality_residual(&arc).abs() < 1e-10);
    }

    #[test]
    fn swapped_endpoints_give_the_same_circle() {
        let (x, y) = (BoundaryPoint::new(0.4), BoundaryPoint::new(2.9));
        match (geodesic_arc(x, y).unwrap(), geodesic_arc(y, x).unwrap()) {
            (GeodesicArc::Circle { center: c1, radius: r1, .. }, GeodesicArc::Circle { center: c2, radius: r2, .. }) => {
                assert!((c1.0 - c2.0).abs() < 1e-12 && (c1.1 - c2.1).abs() < 1e-12);
                assert!((r1 - r2).abs() < 1e-12);
            }
            _ => panic!("expected circles"),
        }
        assert!(matches!(geodesic_arc(x, x), Err(Error::EndpointsEqual)));
    }

    #[test]
    fn no_negative_zero() {
        assert_eq!(fmt6(-0.0), "0.000000");
        assert_eq!(fmt6(-1e-9), "0.000000");
        assert_eq!(fmt6(1.5), "1.500000");
    }

    #[test]
    fn empty_scene_is_just_the_disk() {
        let svg = render_scene(None, &Overlays::default());
        assert_eq!(count(&svg, "<circle"), 1);
        assert_eq!(count(&svg, "<path"), 0);
        roxmltree::Document::parse(&svg).unwrap();
    }

    #[test]
    fn depth_one_ball_counts() {
        let t = canonicalize(3, 4, Some(5)).unwrap();
        let ball = expand(&t, 1).unwrap();
        let svg = render_scene(Some(&ball), &Overlays::default());
        assert_eq!(count(&svg, r#"class="va""#) + count(&svg, r#"class="vb""#), 7);
        assert_eq!(count(&svg, r#"class="edge""#), 6);
        assert_eq!(svg, render_scene(Some(&ball), &Overlays::default()));
    }

    #[test]
    fn overlays_are_well_formed_and_inside_the_viewport() {
        let t = canonicalize(3, 4, Some(5)).unwrap();
        let ball = expand(&t, 3).unwrap();
        let c = Coder::new(&t).unwrap();
        let f = Frames::new(&t);
        let path = c
            .forward_from(&Isometry::IDENTITY, VertexKind::A, BoundaryPoint::new(1.0), 8)
            .unwrap();
        let tango = tango_word(&f, &"<a^2 b a b^3>".parse().unwrap()).unwrap();
        let bigon = bigon_edges(&f, &EdgeFrame::BASE, 3).unwrap();
        let ov = Overlays::default()
            .with_spectacles(&c.spectacles)
            .with_path(&path, &f.tri)
            .with_bigon(&bigon, &f.tri)
            .with_tango(&tango, &f)
            .with_geodesic(BoundaryPoint::new(0.2), BoundaryPoint::new(3.0));
        let svg = render_scene(Some(&ball), &ov);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        for id in ["spectacles", "path", "bigon", "tango", "geodesic"] {
            assert!(doc.descendants().any(|n| n.attribute("id") == Some(id)), "{id}");
        }
        assert_eq!(count(&svg, r#"class="tango""#), 4);
        // Every absolute coordinate pair after M, L or an arc lies in the box.
        for n in doc.descendants().filter(|n| n.has_tag_name("path")) {
            let d = n.attribute("d").unwrap();
            let nums: Vec<f64> = d
                .split(|ch: char| ch.is_ascii_alphabetic() || ch.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().unwrap())
                .collect();
            let pieces: Vec<&str> = d.split_whitespace().collect();
            let mut i = 0;
            let mut k = 0;
            while i < pieces.len() {
                let take = match pieces[i] {
                    "M" | "L" => 2,
                    "A" => 7,
                    _ => unreachable!(),
                };
                let (x, y) = (nums[k + take - 2], nums[k + take - 1]);
                assert!((0.0..=SIZE).contains(&x) && (0.0..=SIZE).contains(&y), "{d}");
                k += take;
                i += take + 1;
            }
        }
        assert_eq!(svg, render_scene(Some(&ball), &ov));
    }
}
