//! The triangle group and its invariant graph: the orbit of the base edge
//! `A0 B0`, materialized as a finite ball with a rotation system.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geom::{
    is_hyperbolic, make_triangle, order_label, rotation_about, DiskPoint, Isometry, ThirdVertex,
    Transform, Triangle,
};

/// Which parameter swaps the canonicalization applied.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Swaps {
    pub pq_swapped: bool,
    pub qr_swapped: bool,
}

/// Cone orders `(p, q, r)`, `r = None` standing for a cusp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriangleParams {
    pub p: u32,
    pub q: u32,
    pub r: Option<u32>,
    pub swaps: Swaps,
}

impl fmt::Display for TriangleParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.p, self.q, order_label(self.r))
    }
}

impl TriangleParams {
    pub fn triangle(&self) -> Triangle {
        make_triangle(self.p, self.q, self.r).expect("canonical parameters are hyperbolic")
    }

    /// Order of the cone point of the given vertex kind.
    pub fn order(&self, kind: VertexKind) -> u32 {
        match kind {
            VertexKind::A => self.p,
            VertexKind::B => self.q,
        }
    }
}

/// Normalizes to `p <= q` and, when `p = 2`, to `r >= 5` or `r` infinite.
///
/// A cone of order 2 given in the `r` slot is first moved to the `q` slot and
/// then to `p`; both swaps are recorded.
pub fn canonicalize(p: u32, q: u32, r: Option<u32>) -> Result<TriangleParams> {
    if p < 2 || q < 2 || r.is_some_and(|r| r < 2) {
        return Err(Error::InvalidParameter(format!(
            "orders must be >= 2, got ({p}, {q}, {})",
            order_label(r)
        )));
    }
    if !is_hyperbolic(p, q, r) {
        return Err(Error::NonHyperbolic {
            p,
            q,
            r: order_label(r),
        });
    }
    let (mut p, mut q, mut r) = (p, q, r);
    let mut swaps = Swaps::default();
    if r == Some(2) {
        let old_q = q;
        q = 2;
        r = Some(old_q);
        swaps.qr_swapped = true;
    }
    if p > q {
        std::mem::swap(&mut p, &mut q);
        swaps.pq_swapped = true;
    }
    if p == 2 {
        if let Some(rr) = r {
            if rr < 5 {
                r = Some(q);
                q = rr;
                swaps.qr_swapped = !swaps.qr_swapped;
            }
        }
    }
    if p > q {
        std::mem::swap(&mut p, &mut q);
        swaps.pq_swapped = !swaps.pq_swapped;
    }
    debug_assert!(p <= q && (p > 2 || r.is_none_or(|r| r >= 5)));
    Ok(TriangleParams { p, q, r, swaps })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexKind {
    A,
    B,
}

impl VertexKind {
    pub fn other(self) -> VertexKind {
        match self {
            VertexKind::A => VertexKind::B,
            VertexKind::B => VertexKind::A,
        }
    }
}

/// Rotations about the triangle vertices. Applying `rho_c`, then `rho_b`,
/// then `rho_a` is the identity: `rho_a . rho_b . rho_c = 1` as matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Generators {
    pub rho_a: Isometry,
    pub rho_b: Isometry,
    pub rho_c: Isometry,
    pub signs: [i8; 3],
}

/// Generators with `rho_a` the counterclockwise rotation by `2 pi / p`.
/// The remaining signs are found by testing the product relation.
pub fn generators(params: &TriangleParams) -> Result<Generators> {
    let tri = params.triangle();
    let tol = Tolerances::DEFAULT.relation;
    for sa in [1i8, -1] {
        for sb in [1i8, -1] {
            let rho_a = rotation_about(tri.a0, sa as i64, params.p);
            let rho_b = rotation_about(tri.b0, sb as i64, params.q);
            match (params.r, tri.c0) {
                (Some(r), ThirdVertex::Finite(c0)) => {
                    for sc in [1i8, -1] {
                        let rho_c = rotation_about(c0, sc as i64, r);
                        if sa == 1 && rho_a.compose(&rho_b).compose(&rho_c).is_identity(tol) {
                            return Ok(Generators {
                                rho_a,
                                rho_b,
                                rho_c,
                                signs: [sa, sb, sc],
                            });
                        }
                    }
                }
                (None, ThirdVertex::Ideal(c0)) => {
                    let rho_c = rho_a.compose(&rho_b).inverse();
                    let z = c0.to_complex();
                    let parabolic = (rho_c.trace().abs() - 2.0).abs() < 1e-9
                        && (rho_c.apply(z) - z).norm() < 1e-7;
                    if sa == 1 && parabolic {
                        return Ok(Generators {
                            rho_a,
                            rho_b,
                            rho_c,
                            signs: [sa, sb, 0],
                        });
                    }
                }
                _ => unreachable!("third vertex matches r"),
            }
        }
    }
    Err(Error::RelationFailure)
}

/// Counterclockwise rotation by `2 pi / n` about the base vertex of `kind`.
pub fn base_rotation(tri: &Triangle, params: &TriangleParams, kind: VertexKind) -> Isometry {
    match kind {
        VertexKind::A => rotation_about(tri.a0, 1, params.p),
        VertexKind::B => rotation_about(tri.b0, 1, params.q),
    }
}

pub fn base_point(tri: &Triangle, kind: VertexKind) -> DiskPoint {
    match kind {
        VertexKind::A => tri.a0,
        VertexKind::B => tri.b0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub kind: VertexKind,
    /// Carries the base vertex of this kind onto the vertex.
    pub g: Isometry,
    pub pos: DiskPoint,
    pub key: (i64, i64),
    /// Edge steps from the base edge.
    pub level: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirectedEdge {
    pub src: usize,
    pub dst: usize,
}

impl DirectedEdge {
    pub fn reversed(self) -> DirectedEdge {
        DirectedEdge {
            src: self.dst,
            dst: self.src,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceCycle {
    pub edges: Vec<DirectedEdge>,
}

impl FaceCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn index_of(&self, e: DirectedEdge) -> Option<usize> {
        self.edges.iter().position(|&x| x == e)
    }
}

/// Finite ball of the invariant graph around the base edge.
///
/// Neighbour slot `k` of a vertex `v` of kind A holds `v.g R_A^k (B0)`, and
/// likewise for kind B, so slot order is counterclockwise order.
#[derive(Debug, Clone)]
pub struct GraphBall {
    pub params: TriangleParams,
    pub triangle: Triangle,
    pub vertices: Vec<Vertex>,
    pub slots: Vec<Vec<Option<usize>>>,
    pub depth: usize,
    rot: [Isometry; 2],
    index: HashMap<(i64, i64), Vec<usize>>,
    tol: Tolerances,
}

impl GraphBall {
    pub const BASE_A: usize = 0;
    pub const BASE_B: usize = 1;

    pub fn base_edge(&self) -> DirectedEdge {
        DirectedEdge {
            src: Self::BASE_A,
            dst: Self::BASE_B,
        }
    }

    pub fn rotation(&self, kind: VertexKind) -> &Isometry {
        match kind {
            VertexKind::A => &self.rot[0],
            VertexKind::B => &self.rot[1],
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.slots[v].iter().filter(|s| s.is_some()).count()
    }

    /// Whether every neighbour of `v` is in the ball.
    pub fn is_complete(&self, v: usize) -> bool {
        self.slots[v].iter().all(Option::is_some)
    }

    /// Neighbours in counterclockwise order, starting at slot 0.
    pub fn rotation_system(&self, v: usize) -> Vec<usize> {
        self.slots[v].iter().flatten().copied().collect()
    }

    pub fn edges(&self) -> Vec<DirectedEdge> {
        let mut out = Vec::new();
        for (src, s) in self.slots.iter().enumerate() {
            for &dst in s.iter().flatten() {
                out.push(DirectedEdge { src, dst });
            }
        }
        out
    }

    pub fn undirected_edge_count(&self) -> usize {
        self.edges().len() / 2
    }

    pub fn slot_of(&self, e: DirectedEdge) -> Option<usize> {
        self.slots[e.src].iter().position(|&s| s == Some(e.dst))
    }

    fn neighbor_position(&self, v: usize, k: usize) -> (VertexKind, DiskPoint) {
        let vert = &self.vertices[v];
        let other = vert.kind.other();
        let h = vert.g.compose(&self.rotation(vert.kind).pow(k as i64));
        (other, base_point(&self.triangle, other).transformed(&h))
    }

    fn key_of(&self, p: DiskPoint) -> (i64, i64) {
        let g = self.tol.vertex_grid;
        ((p.re / g).round() as i64, (p.im / g).round() as i64)
    }

    /// Vertex of `kind` at `p`, searching the neighbouring grid cells.
    pub fn find_vertex(&self, kind: VertexKind, p: DiskPoint) -> Option<usize> {
        let (kx, ky) = self.key_of(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.index.get(&(kx + dx, ky + dy)) {
                    for &id in ids {
                        let v = &self.vertices[id];
                        if v.kind == kind && v.pos.euclid_dist(p) < self.tol.vertex_match {
                            return Some(id);
                        }
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, kind: VertexKind, g: Isometry, pos: DiskPoint, level: usize) -> usize {
        let key = self.key_of(pos);
        let id = self.vertices.len();
        self.vertices.push(Vertex {
            kind,
            g,
            pos,
            key,
            level,
        });
        let deg = self.params.order(kind) as usize;
        self.slots.push(vec![None; deg]);
        self.index.entry(key).or_default().push(id);
        id
    }

    /// Isometry mapping the base edge of the source kind onto `e`.
    pub fn edge_transform(&self, e: DirectedEdge) -> Result<Isometry> {
        let k = self.slot_of(e).ok_or(Error::EdgeMismatch)?;
        let src = &self.vertices[e.src];
        let dst = &self.vertices[e.dst];
        let g = src.g.compose(&self.rotation(src.kind).pow(k as i64));
        let s0 = base_point(&self.triangle, src.kind).transformed(&g);
        let d0 = base_point(&self.triangle, dst.kind).transformed(&g);
        if s0.euclid_dist(src.pos) > self.tol.edge || d0.euclid_dist(dst.pos) > self.tol.edge {
            return Err(Error::NotRepresentable(format!(
                "edge {} -> {} fails the endpoint check",
                e.src, e.dst
            )));
        }
        Ok(g)
    }
}

/// Breadth-first ball of radius `depth` edge steps around the base edge.
pub fn expand(params: &TriangleParams, depth: usize) -> Result<GraphBall> {
    expand_with(params, depth, &Tolerances::DEFAULT)
}

pub fn expand_with(params: &TriangleParams, depth: usize, tol: &Tolerances) -> Result<GraphBall> {
    let triangle = params.triangle();
    let rot = [
        base_rotation(&triangle, params, VertexKind::A),
        base_rotation(&triangle, params, VertexKind::B),
    ];
    let mut ball = GraphBall {
        params: *params,
        triangle,
        vertices: Vec::new(),
        slots: Vec::new(),
        depth,
        rot,
        index: HashMap::new(),
        tol: *tol,
    };
    ball.insert(VertexKind::A, Isometry::IDENTITY, triangle.a0, 0);
    ball.insert(VertexKind::B, Isometry::IDENTITY, triangle.b0, 0);
    ball.slots[0][0] = Some(1);
    ball.slots[1][0] = Some(0);

    let mut queue: VecDeque<usize> = VecDeque::from([0, 1]);
    while let Some(v) = queue.pop_front() {
        let level = ball.vertices[v].level;
        let deg = ball.slots[v].len();
        for k in 0..deg {
            if ball.slots[v][k].is_some() {
                continue;
            }
            let (kind, pos) = ball.neighbor_position(v, k);
            let found = ball.find_vertex(kind, pos);
            let id = match found {
                Some(id) => id,
                None if level < depth => {
                    if ball.vertices.len() >= tol.vertex_cap {
                        return Err(Error::DepthOverflow(depth));
                    }
                    let vert = &ball.vertices[v];
                    let h = vert.g.compose(&ball.rotation(vert.kind).pow(k as i64));
                    // The new vertex's frame puts `v` in its slot 0.
                    let id = ball.insert(kind, h, pos, level + 1);
                    queue.push_back(id);
                    id
                }
                None => continue,
            };
            ball.slots[v][k] = Some(id);
            link_back(&mut ball, id, v);
        }
    }
    Ok(ball)
}

/// Records `v` in the slot of `u` that points at it.
fn link_back(ball: &mut GraphBall, u: usize, v: usize) {
    if ball.slots[u].contains(&Some(v)) {
        return;
    }
    let target = ball.vertices[v].pos;
    let deg = ball.slots[u].len();
    let best = (0..deg)
        .map(|k| (k, ball.neighbor_position(u, k).1.euclid_dist(target)))
        .min_by(|x, y| x.1.total_cmp(&y.1));
    if let Some((k, d)) = best {
        if d < ball.tol.vertex_match && ball.slots[u][k].is_none() {
            ball.slots[u][k] = Some(v);
        }
    }
}

/// Closed walk keeping the face on its left: from `u -> v` continue along the
/// neighbour of `v` just clockwise of `u`.
pub fn face_left_of(ball: &GraphBall, e: DirectedEdge) -> Result<FaceCycle> {
    let r = ball.params.r.ok_or(Error::InfiniteFace)? as usize;
    let mut edges = vec![e];
    let mut cur = e;
    for _ in 0..2 * r {
        let back = ball.slot_of(cur.reversed()).ok_or(Error::BallTooSmall)?;
        let deg = ball.slots[cur.dst].len();
        let k = (back + deg - 1) % deg;
        let next = ball.slots[cur.dst][k].ok_or(Error::BallTooSmall)?;
        cur = DirectedEdge {
            src: cur.dst,
            dst: next,
        };
        if cur == e {
            break;
        }
        edges.push(cur);
    }
    if cur != e || edges.len() != 2 * r {
        return Err(Error::BallTooSmall);
    }
    Ok(FaceCycle { edges })
}

/// The edge `r` positions further along the `2r`-cycle.
pub fn opposite_edge(face: &FaceCycle, e: DirectedEdge) -> Result<DirectedEdge> {
    let i = face.index_of(e).ok_or(Error::EdgeNotInFace)?;
    let n = face.len();
    Ok(face.edges[(i + n / 2) % n])
}

pub fn edge_transform(ball: &GraphBall, e: DirectedEdge) -> Result<Isometry> {
    ball.edge_transform(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u32, q: u32, r: Option<u32>) -> TriangleParams {
        canonicalize(p, q, r).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let t = params(3, 4, Some(5));
        assert_eq!((t.p, t.q, t.r), (3, 4, Some(5)));
        assert_eq!(t.swaps, Swaps::default());
        let t = params(2, 5, Some(4));
        assert_eq!((t.p, t.q, t.r), (2, 4, Some(5)));
        assert!(t.swaps.qr_swapped && !t.swaps.pq_swapped);
        let t = params(4, 2, Some(5));
        assert_eq!((t.p, t.q, t.r), (2, 4, Some(5)));
        assert!(t.swaps.pq_swapped && !t.swaps.qr_swapped);
        let t = params(7, 3, Some(2));
        assert_eq!((t.p, t.q, t.r), (2, 3, Some(7)));
        assert!(matches!(
            canonicalize(2, 4, Some(4)),
            Err(Error::NonHyperbolic { .. })
        ));
    }

    #[test]
    fn generator_relations() {
        for &(p, q, r) in &[(3, 4, Some(5)), (2, 3, Some(7)), (3, 4, None), (2, 3, None)] {
            let t = params(p, q, r);
            let g = generators(&t).unwrap();
            assert!(g.rho_a.pow(p as i64).is_identity(1e-9));
            assert!(g.rho_b.pow(q as i64).is_identity(1e-9));
            if let Some(r) = r {
                assert!(g.rho_c.pow(r as i64).is_identity(1e-9));
            }
            assert!(g
                .rho_a
                .compose(&g.rho_b)
                .compose(&g.rho_c)
                .is_identity(1e-9));
            let tri = t.triangle();
            let moved = tri.b0.transformed(&g.rho_a);
            assert!((moved.dist(tri.a0) - tri.side_ab).abs() < 1e-8);
        }
    }

    #[test]
    fn small_balls() {
        let t = params(3, 4, Some(5));
        let b0 = expand(&t, 0).unwrap();
        assert_eq!(b0.vertices.len(), 2);
        assert_eq!(b0.undirected_edge_count(), 1);
        let b1 = expand(&t, 1).unwrap();
        assert_eq!(b1.vertices.len(), 7);
        assert_eq!(b1.degree(0), 3);
        assert_eq!(b1.degree(1), 4);
        assert_eq!(b1.undirected_edge_count(), 6);
    }

    #[test]
    fn cusped_ball_is_a_tree() {
        let t = params(2, 3, None);
        for d in 0..6 {
            let b = expand(&t, d).unwrap();
            assert_eq!(b.vertices.len(), b.undirected_edge_count() + 1, "depth {d}");
        }
    }

    #[test]
    fn faces_and_opposites() {
        let t = params(3, 4, Some(5));
        let ball = expand(&t, 6).unwrap();
        let f = face_left_of(&ball, ball.base_edge()).unwrap();
        assert_eq!(f.len(), 10);
        let opp = opposite_edge(&f, f.edges[0]).unwrap();
        assert_eq!(opp, f.edges[5]);
        assert_eq!(opposite_edge(&f, opp).unwrap(), f.edges[0]);
        let t = params(3, 3, Some(4));
        let ball = expand(&t, 5).unwrap();
        let f = face_left_of(&ball, ball.base_edge()).unwrap();
        assert_eq!(f.len(), 8);
        assert_eq!(opposite_edge(&f, f.edges[2]).unwrap(), f.edges[6]);
        let t = params(2, 4, Some(6));
        let ball = expand(&t, 8).unwrap();
        let f = face_left_of(&ball, ball.base_edge()).unwrap();
        assert_eq!(f.len(), 12);
        let a_count = f
            .edges
            .iter()
            .filter(|e| ball.vertices[e.src].kind == VertexKind::A)
            .count();
        assert_eq!(a_count, 6);
        let stranger = DirectedEdge { src: 0, dst: 0 };
        assert_eq!(opposite_edge(&f, stranger), Err(Error::EdgeNotInFace));
    }

    #[test]
    fn face_errors() {
        let t = params(3, 4, None);
        let ball = expand(&t, 2).unwrap();
        assert_eq!(
            face_left_of(&ball, ball.base_edge()),
            Err(Error::InfiniteFace)
        );
        let t = params(3, 4, Some(5));
        let ball = expand(&t, 1).unwrap();
        assert_eq!(
            face_left_of(&ball, ball.base_edge()),
            Err(Error::BallTooSmall)
        );
    }

    #[test]
    fn edge_transforms() {
        let t = params(3, 4, Some(5));
        let ball = expand(&t, 3).unwrap();
        assert!(ball
            .edge_transform(ball.base_edge())
            .unwrap()
            .is_identity(1e-12));
        let g = generators(&t).unwrap();
        let e = DirectedEdge {
            src: 0,
            dst: ball.slots[0][1].unwrap(),
        };
        assert!(ball.edge_transform(e).unwrap().approx_eq(&g.rho_a, 1e-10));
        for e in ball.edges() {
            ball.edge_transform(e).unwrap();
        }
    }
}
