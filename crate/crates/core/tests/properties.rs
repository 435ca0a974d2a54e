use std::f64::consts::TAU;

use proptest::prelude::*;
use tworibbon::coding::Coder;
use tworibbon::geom::{BoundaryPoint, Isometry, Transform};
use tworibbon::group_graph::{canonicalize, TriangleParams, VertexKind};
use tworibbon::orbits::{axis, enumerate_orbits, holonomy_frames, tango_word};
use tworibbon::render::{geodesic_arc, orthogonality_residual, GeodesicArc};
use tworibbon::words::CyclicWord;
use tworibbon::Tolerances;

const TRIPLES: [(u32, u32, Option<u32>); 8] = [
    (3, 4, Some(5)),
    (3, 3, Some(4)),
    (4, 5, Some(6)),
    (2, 3, Some(7)),
    (2, 4, Some(5)),
    (2, 4, Some(6)),
    (3, 4, None),
    (2, 3, None),
];

fn triple() -> impl Strategy<Value = TriangleParams> {
    (0..TRIPLES.len()).prop_map(|i| {
        let (p, q, r) = TRIPLES[i];
        canonicalize(p, q, r).unwrap()
    })
}

/// A vertex frame reached by a short random walk.
fn walk(coder: &Coder, slots: &[u32]) -> (Isometry, VertexKind) {
    let mut h = Isometry::IDENTITY;
    let mut kind = VertexKind::A;
    for &k in slots {
        let e = coder.frames.out_edge(&h, kind, k % coder.frames.order(kind));
        h = e.h;
        kind = kind.other();
    }
    (h, kind)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectacles_are_equivariant(t in triple(), slots in prop::collection::vec(0u32..8, 0..5), k in 0u32..8) {
        let c = Coder::new(&t).unwrap();
        let (h, kind) = walk(&c, &slots);
        let k = k % c.frames.order(kind);
        let local = c.spectacles.spectacle(&c.frames.out_edge(&Isometry::IDENTITY, kind, k));
        let moved = local.transformed(&h);
        let direct = c.spectacles.spectacle(&c.frames.out_edge(&h, kind, k));
        prop_assert!(moved.left.angular_dist(direct.left) < 1e-8);
        prop_assert!(moved.right.angular_dist(direct.right) < 1e-8);
    }

    #[test]
    fn exactly_one_out_spectacle_contains_a_point(t in triple(), slots in prop::collection::vec(0u32..8, 0..4), theta in 0.0..TAU) {
        let c = Coder::new(&t).unwrap();
        let (h, kind) = walk(&c, &slots);
        let x = BoundaryPoint::new(theta);
        let hits = (0..c.frames.order(kind))
            .filter(|&k| c.spectacles.contains(&c.frames.out_edge(&h, kind, k), x))
            .count();
        prop_assert_eq!(hits, 1);
    }

    #[test]
    fn forward_codes_respect_exponent_ranges(t in triple(), theta in 0.0..TAU) {
        let c = Coder::new(&t).unwrap();
        let path = c.forward_from(&Isometry::IDENTITY, VertexKind::A, BoundaryPoint::new(theta), 12).unwrap();
        prop_assert_eq!(path.edges.len(), 12);
        for b in &path.code {
            let max = match b.letter {
                tworibbon::words::Letter::A => t.p,
                tworibbon::words::Letter::B => t.q,
            };
            prop_assert!(b.exp >= 1 && b.exp < max);
        }
    }

    #[test]
    fn geodesic_arcs_are_orthogonal_and_symmetric(a in 0.0..TAU, d in 1e-3..(TAU - 1e-3)) {
        let (x, y) = (BoundaryPoint::new(a), BoundaryPoint::new(a + d));
        let g = geodesic_arc(x, y).unwrap();
        let h = geodesic_arc(y, x).unwrap();
        prop_assert!(orthogonality_residual(&g).abs() < 1e-10 * (1.0 + orthogonality_residual_scale(&g)));
        match (g, h) {
            (GeodesicArc::Circle { center: c1, radius: r1, .. }, GeodesicArc::Circle { center: c2, radius: r2, .. }) => {
                prop_assert!((c1.0 - c2.0).abs() < 1e-9 * (1.0 + r1) && (c1.1 - c2.1).abs() < 1e-9 * (1.0 + r1));
                prop_assert!((r1 - r2).abs() < 1e-9 * (1.0 + r1));
            }
            (GeodesicArc::Diameter { .. }, GeodesicArc::Diameter { .. }) => {}
            _ => prop_assert!(false, "swap changed the arc type"),
        }
    }
}

/// Residual magnitude grows with the square of the radius near antipodes.
fn orthogonality_residual_scale(g: &GeodesicArc) -> f64 {
    match g {
        GeodesicArc::Circle { radius, .. } => radius * radius,
        GeodesicArc::Diameter { .. } => 0.0,
    }
}

#[test]
fn orbit_invariants() {
    let tol = Tolerances::DEFAULT;
    for &(p, q, r) in &TRIPLES {
        let t = canonicalize(p, q, r).unwrap();
        let c = Coder::new(&t).unwrap();
        for o in enumerate_orbits(&t, 4).unwrap() {
            // Hyperbolic, with attracting and repelling swapped by inversion.
            assert!(o.trace() > 2.0, "{t} {}", o.word);
            let (att, rep) = axis(&o.holonomy.inverse(), &tol).unwrap();
            assert!(att.angular_dist(o.repelling()) < 1e-8);
            assert!(rep.angular_dist(o.attracting()) < 1e-8);
            // Rotating the necklace conjugates the holonomy.
            let b = o.word.blocks();
            let mut rot = b[2..].to_vec();
            rot.extend_from_slice(&b[..2]);
            let g = holonomy_frames(&c.frames, &CyclicWord::from_parts(&rot).unwrap()).unwrap();
            assert!((g.trace().abs() - o.trace()).abs() < 1e-8);
            // Tango arcs turn by the block exponents, within a full turn.
            let tango = tango_word(&c.frames, &o.word).unwrap();
            assert_eq!(tango.arcs.len(), b.len());
            for (arc, blk) in tango.arcs.iter().zip(b) {
                assert_eq!(arc.sectors, blk.exp);
                assert!(arc.sectors < c.frames.order(arc.kind));
                assert_eq!(arc.counterclockwise, arc.kind == VertexKind::A);
            }
        }
    }
}
