//! Spectacles, bigons, admissible paths and their two-letter codes.
//!
//! Directed edges of the invariant graph are handled as frames: an isometry
//! `h` with `h(A0)` the A-end and `h(B0)` the B-end, plus a direction. The
//! group acts freely on edges, so a frame names its edge uniquely. Turning at
//! the head of an edge by the letter `a^k` (at an A-vertex) or `b^k` (at a
//! B-vertex) multiplies `h` on the right by `R_A^k` or `R_B^-k`, where
//! `R_A`, `R_B` are the counterclockwise rotations by `2 pi / p`, `2 pi / q`
//! about `A0`, `B0`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geom::{
    classify, rotation_about, visual_direction, BoundaryArc, BoundaryPoint, DiskPoint,
    Isometry, IsometryClass, Orientation, ThirdVertex, Transform, Triangle,
};
use crate::group_graph::{DirectedEdge, GraphBall, TriangleParams, VertexKind};
use crate::words::{detect_period, format_blocks, Block, KneadingSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    AtoB,
    BtoA,
}

impl Dir {
    pub fn src_kind(self) -> VertexKind {
        match self {
            Dir::AtoB => VertexKind::A,
            Dir::BtoA => VertexKind::B,
        }
    }

    pub fn dst_kind(self) -> VertexKind {
        self.src_kind().other()
    }

    pub fn flipped(self) -> Dir {
        match self {
            Dir::AtoB => Dir::BtoA,
            Dir::BtoA => Dir::AtoB,
        }
    }

    pub fn from_src(kind: VertexKind) -> Dir {
        match kind {
            VertexKind::A => Dir::AtoB,
            VertexKind::B => Dir::BtoA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeFrame {
    pub h: Isometry,
    pub dir: Dir,
}

impl EdgeFrame {
    /// The base edge `A0 -> B0`.
    pub const BASE: EdgeFrame = EdgeFrame {
        h: Isometry::IDENTITY,
        dir: Dir::AtoB,
    };

    pub fn reversed(&self) -> EdgeFrame {
        EdgeFrame {
            h: self.h,
            dir: self.dir.flipped(),
        }
    }

    pub fn src(&self, tri: &Triangle) -> DiskPoint {
        base_point(tri, self.dir.src_kind()).transformed(&self.h)
    }

    pub fn dst(&self, tri: &Triangle) -> DiskPoint {
        base_point(tri, self.dir.dst_kind()).transformed(&self.h)
    }

    pub fn same_edge(&self, other: &EdgeFrame, tol: f64) -> bool {
        self.dir == other.dir && self.h.approx_eq(&other.h, tol)
    }

    /// The frame moved by `g` acting on the left.
    pub fn moved(&self, g: &Isometry) -> EdgeFrame {
        EdgeFrame {
            h: g.compose(&self.h),
            dir: self.dir,
        }
    }
}

fn base_point(tri: &Triangle, kind: VertexKind) -> DiskPoint {
    match kind {
        VertexKind::A => tri.a0,
        VertexKind::B => tri.b0,
    }
}

/// A turn of exponent `k` at a vertex of the given kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Turn {
    pub kind: VertexKind,
    pub k: u32,
}

impl Turn {
    fn block(self) -> Block {
        match self.kind {
            VertexKind::A => Block::a(self.k),
            VertexKind::B => Block::b(self.k),
        }
    }
}

pub fn turns_to_blocks(turns: &[Turn]) -> Vec<Block> {
    turns.iter().map(|t| t.block()).collect()
}

/// Local moves on edge frames for one parameter triple.
#[derive(Debug, Clone)]
pub struct Frames {
    pub params: TriangleParams,
    pub tri: Triangle,
    /// `R_A^k` for `k` in `0..p`.
    pow_a: Vec<Isometry>,
    /// `R_B^-k` for `k` in `0..q`.
    pow_b: Vec<Isometry>,
}

impl Frames {
    pub fn new(params: &TriangleParams) -> Frames {
        let tri = params.triangle();
        let pow_a = (0..params.p)
            .map(|k| rotation_about(tri.a0, k as i64, params.p))
            .collect();
        let pow_b = (0..params.q)
            .map(|k| rotation_about(tri.b0, -(k as i64), params.q))
            .collect();
        Frames {
            params: *params,
            tri,
            pow_a,
            pow_b,
        }
    }

    pub fn order(&self, kind: VertexKind) -> u32 {
        self.params.order(kind)
    }

    /// Counterclockwise rotation by `2 pi / n` about the base vertex of `kind`.
    pub fn rotation(&self, kind: VertexKind) -> Isometry {
        match kind {
            VertexKind::A => self.pow_a[1 % self.pow_a.len()],
            VertexKind::B => self.pow_b[self.pow_b.len() - 1],
        }
    }

    /// The move realizing the letter of exponent `k` at a vertex of `kind`.
    pub fn letter_move(&self, kind: VertexKind, k: u32) -> Isometry {
        match kind {
            VertexKind::A => self.pow_a[(k % self.params.p) as usize],
            VertexKind::B => self.pow_b[(k % self.params.q) as usize],
        }
    }

    /// Out-edge number `k` at the vertex `h(X0)` of kind `X`. Slot 0 points
    /// at `h(Y0)`, so for an arrival frame `k` is the code exponent.
    pub fn out_edge(&self, h: &Isometry, kind: VertexKind, k: u32) -> EdgeFrame {
        EdgeFrame {
            h: h.compose(&self.letter_move(kind, k)),
            dir: Dir::from_src(kind),
        }
    }

    /// Continues through the head of `e` with exponent `k`.
    pub fn turn(&self, e: &EdgeFrame, k: u32) -> EdgeFrame {
        self.out_edge(&e.h, e.dir.dst_kind(), k)
    }

    /// Exponent of the sharpest left turn, which keeps the face on the left.
    pub fn left_exponent(&self, kind: VertexKind) -> u32 {
        match kind {
            VertexKind::A => self.params.p - 1,
            VertexKind::B => 1,
        }
    }

    pub fn face_next(&self, e: &EdgeFrame) -> EdgeFrame {
        self.turn(e, self.left_exponent(e.dir.dst_kind()))
    }

    /// The edge preceding `e` along its left face.
    pub fn face_prev(&self, e: &EdgeFrame) -> EdgeFrame {
        let kind = e.dir.src_kind();
        let undo = self.letter_move(kind, self.left_exponent(kind)).inverse();
        EdgeFrame {
            h: e.h.compose(&undo),
            dir: e.dir.flipped(),
        }
    }

    /// The `2r` edges of the face on the left of `e`, starting with `e`.
    pub fn face_walk(&self, e: &EdgeFrame) -> Result<Vec<EdgeFrame>> {
        let r = self.params.r.ok_or(Error::InfiniteFace)? as usize;
        let mut out = Vec::with_capacity(2 * r);
        let mut cur = *e;
        for _ in 0..2 * r {
            out.push(cur);
            cur = self.face_next(&cur);
        }
        if !cur.same_edge(e, 1e-8) {
            return Err(Error::ValidationFailure(
                "face walk does not close after 2r steps".into(),
            ));
        }
        Ok(out)
    }

    /// Exponent of the turn from `e_in` into `e_out`, read off the turning
    /// angle at the shared vertex.
    pub fn turn_exponent(&self, e_in: &EdgeFrame, e_out: &EdgeFrame) -> Result<u32> {
        let kind = e_in.dir.dst_kind();
        if e_out.dir.src_kind() != kind {
            return Err(Error::EdgeMismatch);
        }
        let rel = e_in.h.inverse().compose(&e_out.h);
        let x0 = base_point(&self.tri, kind);
        let y0 = base_point(&self.tri, kind.other());
        if x0.transformed(&rel).euclid_dist(x0) > 1e-6 {
            return Err(Error::EdgeMismatch);
        }
        let before = visual_direction(x0, y0.to_complex());
        let after = visual_direction(x0, y0.transformed(&rel).to_complex());
        let angle = after.theta - before.theta;
        let n = self.order(kind) as f64;
        let signed = match kind {
            VertexKind::A => angle,
            VertexKind::B => -angle,
        };
        let steps = signed / (TAU / n);
        let k = steps.round();
        if (steps - k).abs() > 1e-6 {
            return Err(Error::EdgeMismatch);
        }
        Ok(k.rem_euclid(n) as u32)
    }

    /// Ideal vertex of the face left of `e` when `r` is infinite.
    fn ideal_vertex_left(&self, e: &EdgeFrame) -> Option<BoundaryPoint> {
        let ThirdVertex::Ideal(c0) = self.tri.c0 else {
            return None;
        };
        let g = match e.dir {
            Dir::AtoB => e.h,
            Dir::BtoA => e.h.compose(&self.letter_move(VertexKind::A, self.params.p - 1)),
        };
        Some(c0.transformed(&g))
    }

    /// Geodesic midpoint of the edge.
    pub fn midpoint(&self, e: &EdgeFrame) -> DiskPoint {
        let m = DiskPoint {
            re: (self.tri.side_ab / 4.0).tanh(),
            im: 0.0,
        };
        m.transformed(&e.h)
    }
}

/// Shared edges `d_1 = e, d_2, ...` of the bigon of `e`, in absolute frames.
pub fn bigon_edges(frames: &Frames, e: &EdgeFrame, faces: usize) -> Result<Vec<EdgeFrame>> {
    let r = frames.params.r.ok_or(Error::InfiniteFace)? as usize;
    let mut out = vec![*e];
    let mut d = *e;
    for _ in 0..faces {
        let walk = frames.face_walk(&d)?;
        d = walk[r].reversed();
        out.push(d);
    }
    Ok(out)
}

/// The bigon of `e` is invariant under a translation carrying `e` one or two
/// faces ahead; its attracting fixed point is the normal extremity.
pub fn bigon_translation(frames: &Frames, e: &EdgeFrame) -> Result<Isometry> {
    let d = bigon_edges(frames, e, 4)?;
    let j = if d[1].dir == e.dir { 1 } else { 2 };
    let t = d[j].h.compose(&e.h.inverse());
    if !d[2 * j].same_edge(&d[j].moved(&t), 1e-8) {
        return Err(Error::ValidationFailure(
            "bigon is not periodic under its translation".into(),
        ));
    }
    Ok(t)
}

/// Normal extremity as the attracting fixed point of the bigon translation,
/// or the ideal vertex of the left face when `r` is infinite.
pub fn normal_extremity_exact(frames: &Frames, e: &EdgeFrame) -> Result<BoundaryPoint> {
    if frames.params.r.is_none() {
        return Ok(frames.ideal_vertex_left(e).expect("ideal third vertex"));
    }
    match classify(&bigon_translation(frames, e)?) {
        IsometryClass::Hyperbolic { attracting, .. } => Ok(attracting),
        other => Err(Error::ValidationFailure(format!(
            "bigon translation is {}",
            other.tag()
        ))),
    }
}

/// Normal extremity as the limit of midpoints of the shared bigon edges.
pub fn normal_extremity_iter(
    frames: &Frames,
    e: &EdgeFrame,
    tol: &Tolerances,
) -> Result<BoundaryPoint> {
    if frames.params.r.is_none() {
        return Ok(frames.ideal_vertex_left(e).expect("ideal third vertex"));
    }
    let r = frames.params.r.unwrap() as usize;
    // Faces are walked near the origin; `acc` carries them back out.
    let mut acc = e.h;
    let mut dir = e.dir;
    let local = |dir: Dir| EdgeFrame {
        h: Isometry::IDENTITY,
        dir,
    };
    let mut prev = BoundaryPoint::from_complex(acc.apply(frames.midpoint(&local(dir)).to_complex()));
    for _ in 0..tol.extremity_max_iter {
        let walk = frames.face_walk(&local(dir))?;
        let d = walk[r].reversed();
        acc = acc.compose(&d.h);
        dir = d.dir;
        let cur = BoundaryPoint::from_complex(acc.apply(frames.midpoint(&local(dir)).to_complex()));
        if cur.angular_dist(prev) < tol.extremity {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NoConvergence(tol.extremity_max_iter))
}

/// Normal extremity of a ball edge.
pub fn normal_extremity(ball: &GraphBall, e: DirectedEdge, tol: &Tolerances) -> Result<BoundaryPoint> {
    let frames = Frames::new(&ball.params);
    normal_extremity_iter(&frames, &ball_frame(ball, e)?, tol)
}

/// Frame of a ball edge.
pub fn ball_frame(ball: &GraphBall, e: DirectedEdge) -> Result<EdgeFrame> {
    let h = ball.edge_transform(e)?;
    Ok(EdgeFrame {
        h,
        dir: Dir::from_src(ball.vertices[e.src].kind),
    })
}

/// Removes backtracks from a turn sequence. A zero turn at `Y` between turns
/// `k1`, `k2` at the same vertex `X` collapses into one turn `k1 + k2`.
pub fn remove_spurs(turns: &[Turn], frames: &Frames) -> Result<Vec<Turn>> {
    let mut out: Vec<Turn> = Vec::with_capacity(turns.len());
    let mut i = 0;
    let mut carry: Option<Turn> = None;
    loop {
        let t = match carry.take() {
            Some(t) => t,
            None if i < turns.len() => {
                i += 1;
                turns[i - 1]
            }
            None => break,
        };
        if t.k != 0 {
            out.push(t);
            continue;
        }
        let prev = out.pop().ok_or(Error::EdgeMismatch)?;
        if i >= turns.len() {
            break;
        }
        let next = turns[i];
        i += 1;
        if next.kind != prev.kind {
            return Err(Error::EdgeMismatch);
        }
        let n = frames.order(prev.kind);
        carry = Some(Turn {
            kind: prev.kind,
            k: (prev.k + next.k) % n,
        });
    }
    Ok(out)
}

/// Turn sequences along the right and left boundaries of the bigon of the
/// base edge. The right boundary starts at `B0`, the left one at `A0`.
/// Faces are re-based near the origin one at a time to keep precision.
pub fn bigon_boundary_turns(frames: &Frames, faces: usize) -> Result<(Vec<Turn>, Vec<Turn>)> {
    let mut right_turns = Vec::new();
    let mut left_turns = Vec::new();
    let mut right_last: Option<EdgeFrame> = None;
    let mut left_last: Option<EdgeFrame> = None;
    let push = |last: &mut Option<EdgeFrame>, turns: &mut Vec<Turn>, e: EdgeFrame| -> Result<()> {
        if let Some(prev) = last {
            let k = frames.turn_exponent(prev, &e)?;
            turns.push(Turn {
                kind: e.dir.src_kind(),
                k,
            });
        }
        *last = Some(e);
        Ok(())
    };
    match frames.params.r {
        None => {
            // One infinite face: the right boundary follows it forward from
            // the base edge, the left boundary follows it backward.
            let steps = 2 * faces.max(6) * 2;
            let mut fwd = EdgeFrame::BASE;
            let mut back = EdgeFrame::BASE;
            for _ in 0..steps {
                fwd = frames.face_next(&fwd);
                push(&mut right_last, &mut right_turns, fwd)?;
                back = frames.face_prev(&back);
                push(&mut left_last, &mut left_turns, back.reversed())?;
                // Re-base both walks.
                let fi = fwd.h.inverse();
                fwd = fwd.moved(&fi);
                right_last = right_last.map(|x| x.moved(&fi));
                let bi = back.h.inverse();
                back = back.moved(&bi);
                left_last = left_last.map(|x| x.moved(&bi));
            }
        }
        Some(r) => {
            let r = r as usize;
            let mut d = EdgeFrame::BASE;
            for _ in 0..faces {
                let walk = frames.face_walk(&d)?;
                for e in &walk[1..r] {
                    push(&mut right_last, &mut right_turns, *e)?;
                }
                for j in (r + 1..2 * r).rev() {
                    push(&mut left_last, &mut left_turns, walk[j].reversed())?;
                }
                let next = walk[r].reversed();
                let inv = next.h.inverse();
                right_last = right_last.map(|x| x.moved(&inv));
                left_last = left_last.map(|x| x.moved(&inv));
                d = next.moved(&inv);
            }
        }
    }
    Ok((
        remove_spurs(&right_turns, frames)?,
        remove_spurs(&left_turns, frames)?,
    ))
}

/// Kneading sequences read off the bigon of the base edge: the right
/// boundary carries `u_L`, the left boundary `v_R`.
pub fn geometric_kneading_frames(frames: &Frames) -> Result<KneadingSet> {
    let faces = 16;
    let (right, left) = bigon_boundary_turns(frames, faces)?;
    let trim = |t: &[Turn]| turns_to_blocks(&t[..t.len().saturating_sub(2)]);
    let u_l = detect_period(&trim(&right), 3).ok_or(Error::PeriodNotDetected)?;
    let v_r = detect_period(&trim(&left), 3).ok_or(Error::PeriodNotDetected)?;
    Ok(KneadingSet::from_left_right(u_l, v_r))
}

pub fn geometric_kneading(ball: &GraphBall) -> Result<KneadingSet> {
    geometric_kneading_frames(&Frames::new(&ball.params))
}

/// A base pair of spectacles: semi-open boundary arcs for the two directions
/// of the base edge, traversed in `orient`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectaclesPair {
    pub i_a2b: BoundaryArc,
    pub i_b2a: BoundaryArc,
    pub orient: Orientation,
    /// Normal extremity of the base edge, shared endpoint of the two arcs.
    pub xi: BoundaryPoint,
    pub sign: i8,
}

impl SpectaclesPair {
    pub fn base_arc(&self, dir: Dir) -> &BoundaryArc {
        match dir {
            Dir::AtoB => &self.i_a2b,
            Dir::BtoA => &self.i_b2a,
        }
    }

    /// Spectacle of an edge: the base arc moved by the edge frame.
    pub fn spectacle(&self, e: &EdgeFrame) -> BoundaryArc {
        self.base_arc(e.dir).transformed(&e.h)
    }

    /// Membership of `x` in the spectacle of `e`, tested in base coordinates
    /// so that the endpoint snap applies at the base arc's endpoints.
    pub fn contains(&self, e: &EdgeFrame, x: BoundaryPoint) -> bool {
        let y = x.transformed(&e.h.inverse());
        // h^-1 stretches boundary angles by up to 4|a|^2, which magnifies
        // the rounding in x; the endpoint snap grows with it.
        let snap = Tolerances::DEFAULT.snap.max(1e-14 * e.h.a.norm_sqr());
        self.base_arc(e.dir).contains_oriented(y, self.orient, snap)
    }

    /// Copy with `I_A2B` widened by `frac` of its length, half at each end.
    pub fn widened(&self, frac: f64) -> SpectaclesPair {
        let len = self.i_a2b.length(self.orient);
        let s = self.orient.sign() * len * frac / 2.0;
        let mut out = *self;
        out.i_a2b = BoundaryArc {
            left: self.i_a2b.left.rotated(-s),
            right: self.i_a2b.right.rotated(s),
        };
        out
    }
}

/// Spectacles with both base arcs having `xi` as an endpoint:
/// `I_A2B = [xi, R_A^s xi)` and `I_B2A = [R_B^-s xi, xi)`.
pub fn spectacles_from_extremity(
    frames: &Frames,
    xi: BoundaryPoint,
    orient: Orientation,
    sign: i8,
) -> SpectaclesPair {
    let ra = rotation_about(frames.tri.a0, sign as i64, frames.params.p);
    let rb = rotation_about(frames.tri.b0, -(sign as i64), frames.params.q);
    SpectaclesPair {
        i_a2b: BoundaryArc {
            left: xi,
            right: xi.transformed(&ra),
        },
        i_b2a: BoundaryArc {
            left: xi.transformed(&rb),
            right: xi,
        },
        orient,
        xi,
        sign,
    }
}

/// Visual angle subtended at `v` by the arc, measured in `orient`.
fn visual_length(v: DiskPoint, arc: &BoundaryArc, orient: Orientation) -> f64 {
    let l = visual_direction(v, arc.left.to_complex());
    let r = visual_direction(v, arc.right.to_complex());
    BoundaryArc { left: l, right: r }.length(orient)
}

/// Structural checks of a candidate pair: angular spans seen from `A0` and
/// `B0`, and disjointness of the two arcs.
pub fn spectacles_well_formed(frames: &Frames, s: &SpectaclesPair) -> bool {
    let tol = 1e-9;
    let span_a = visual_length(frames.tri.a0, &s.i_a2b, s.orient);
    let span_b = visual_length(frames.tri.b0, &s.i_b2a, s.orient);
    let ok_a = (span_a - TAU / frames.params.p as f64).abs() < tol;
    let ok_b = (span_b - TAU / frames.params.q as f64).abs() < tol;
    let total = s.i_a2b.length(s.orient) + s.i_b2a.length(s.orient);
    let disjoint = total <= TAU + tol
        && !s.i_a2b.contains_oriented(s.i_b2a.midpoint(s.orient), s.orient, 0.0)
        && !s.i_b2a.contains_oriented(s.i_a2b.midpoint(s.orient), s.orient, 0.0);
    ok_a && ok_b && disjoint
}

/// Semi-infinite or finite path in the invariant graph with its code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphPath {
    pub start_kind: VertexKind,
    /// Carries the base vertex of `start_kind` onto the first vertex.
    pub start: Isometry,
    pub edges: Vec<EdgeFrame>,
    /// Turns at the interior vertices, one block per vertex.
    pub code: Vec<Block>,
}

impl GraphPath {
    pub fn vertices(&self, tri: &Triangle) -> Vec<DiskPoint> {
        let mut out = vec![base_point(tri, self.start_kind).transformed(&self.start)];
        out.extend(self.edges.iter().map(|e| e.dst(tri)));
        out
    }

    pub fn code_string(&self) -> String {
        format_blocks(&self.code)
    }

    pub fn code_letters(&self) -> String {
        crate::words::blocks_letters(&self.code)
    }

    pub fn last_edge(&self) -> Option<&EdgeFrame> {
        self.edges.last()
    }
}

/// A boundary point in the coordinates of a vertex frame, with a bound on
/// the rounding it has picked up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalTarget {
    pub y: BoundaryPoint,
    pub err: f64,
}

/// Factor by which `g` stretches boundary angles at `x`.
fn boundary_stretch(g: &Isometry, x: BoundaryPoint) -> f64 {
    1.0 / (g.b.conj() * x.to_complex() + g.a.conj()).norm_sqr()
}

impl LocalTarget {
    /// `x` seen from the frame `h`.
    pub fn new(h: &Isometry, x: BoundaryPoint) -> LocalTarget {
        let inv = h.inverse();
        LocalTarget {
            y: x.transformed(&inv),
            err: 1e-15 * boundary_stretch(&inv, x).max(1.0),
        }
    }

    /// The same point seen after moving the frame by `m`, given `m^-1`.
    pub fn pulled(&self, m_inv: &Isometry) -> LocalTarget {
        LocalTarget {
            y: self.y.transformed(m_inv),
            err: self.err * boundary_stretch(m_inv, self.y) + 1e-15,
        }
    }

    /// Endpoint snap wide enough to absorb the accumulated rounding.
    pub fn snap(&self) -> f64 {
        Tolerances::DEFAULT.snap.max(1e3 * self.err)
    }
}

/// Frames plus a base pair of spectacles: everything needed to code paths.
#[derive(Debug, Clone)]
pub struct Coder {
    pub frames: Frames,
    pub spectacles: SpectaclesPair,
}

type CalibrationKey = (u32, u32, Option<u32>);

fn calibration_cache() -> &'static Mutex<HashMap<CalibrationKey, (Orientation, i8)>> {
    static CACHE: OnceLock<Mutex<HashMap<CalibrationKey, (Orientation, i8)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Result of testing one orientation and sign choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTrial {
    pub orient: Orientation,
    pub sign: i8,
    pub well_formed: bool,
    pub code_from_b0: String,
    pub code_from_a0: String,
    pub accepted: bool,
}

/// Letters compared against the closed forms during calibration.
pub const CALIBRATION_LETTERS: usize = 12;

/// Tries both orientations and both arc signs; a choice is accepted when the
/// arcs are well formed and the admissible paths from `B0` and `A0` to the
/// normal extremity carry the closed-form `u_L` and `v_L` prefixes.
pub fn calibration_trials(params: &TriangleParams) -> Result<Vec<CalibrationTrial>> {
    let frames = Frames::new(params);
    let xi = normal_extremity_exact(&frames, &EdgeFrame::BASE)?;
    let table = crate::words::table1_kneading(params)?;
    let want_b = table.u_l.prefix_string(CALIBRATION_LETTERS);
    let want_a = table.v_l.prefix_string(CALIBRATION_LETTERS);
    let mut out = Vec::new();
    for orient in [Orientation::Clockwise, Orientation::CounterClockwise] {
        for sign in [1i8, -1] {
            let s = spectacles_from_extremity(&frames, xi, orient, sign);
            let coder = Coder {
                frames: frames.clone(),
                spectacles: s,
            };
            let well_formed = spectacles_well_formed(&frames, &s);
            let code = |kind| -> String {
                coder
                    .forward_from(&Isometry::IDENTITY, kind, xi, CALIBRATION_LETTERS + 2)
                    .map(|p| p.code_letters().chars().take(CALIBRATION_LETTERS).collect())
                    .unwrap_or_default()
            };
            let code_from_b0 = code(VertexKind::B);
            let code_from_a0 = code(VertexKind::A);
            let accepted = well_formed && code_from_b0 == want_b && code_from_a0 == want_a;
            out.push(CalibrationTrial {
                orient,
                sign,
                well_formed,
                code_from_b0,
                code_from_a0,
                accepted,
            });
        }
    }
    Ok(out)
}

/// The calibrated orientation and sign, cached per parameter triple. Choices
/// producing the same pair of arcs count once.
pub fn calibrate(params: &TriangleParams) -> Result<(Orientation, i8)> {
    let key = (params.p, params.q, params.r);
    if let Some(hit) = calibration_cache().lock().unwrap().get(&key) {
        return Ok(*hit);
    }
    let frames = Frames::new(params);
    let xi = normal_extremity_exact(&frames, &EdgeFrame::BASE)?;
    let accepted: Vec<(Orientation, i8)> = calibration_trials(params)?
        .into_iter()
        .filter(|t| t.accepted)
        .map(|t| (t.orient, t.sign))
        .collect();
    let mut distinct: Vec<(Orientation, i8)> = Vec::new();
    for &(o, s) in &accepted {
        let arcs = spectacles_from_extremity(&frames, xi, o, s);
        let dup = distinct.iter().any(|&(o2, s2)| {
            let other = spectacles_from_extremity(&frames, xi, o2, s2);
            o == o2
                && arcs.i_a2b.right.angular_dist(other.i_a2b.right) < 1e-12
                && arcs.i_b2a.left.angular_dist(other.i_b2a.left) < 1e-12
        });
        if !dup {
            distinct.push((o, s));
        }
    }
    match distinct.as_slice() {
        [one] => {
            calibration_cache().lock().unwrap().insert(key, *one);
            Ok(*one)
        }
        [] => Err(Error::ValidationFailure(
            "no orientation and sign reproduce the closed-form kneading prefixes".into(),
        )),
        _ => Err(Error::ValidationFailure(
            "several orientation and sign choices reproduce the kneading prefixes".into(),
        )),
    }
}

impl Coder {
    /// Frames and the calibrated spectacles built on the normal extremity of
    /// the base edge.
    pub fn new(params: &TriangleParams) -> Result<Coder> {
        let (orient, sign) = calibrate(params)?;
        Coder::with_choice(params, orient, sign)
    }

    pub fn with_choice(params: &TriangleParams, orient: Orientation, sign: i8) -> Result<Coder> {
        let frames = Frames::new(params);
        let xi = normal_extremity_exact(&frames, &EdgeFrame::BASE)?;
        let spectacles = spectacles_from_extremity(&frames, xi, orient, sign);
        Ok(Coder { frames, spectacles })
    }

    pub fn params(&self) -> &TriangleParams {
        &self.frames.params
    }

    pub fn tri(&self) -> &Triangle {
        &self.frames.tri
    }

    /// Slot at a vertex of `kind` whose base spectacle contains the target,
    /// given in the vertex's own coordinates.
    pub fn next_slot(&self, kind: VertexKind, t: &LocalTarget) -> Result<u32> {
        let n = self.frames.order(kind);
        let arc = self.spectacles.base_arc(Dir::from_src(kind));
        let snap = t.snap();
        let mut hit = None;
        let mut count = 0;
        for k in 0..n {
            let m_inv = self.frames.letter_move(kind, k).inverse();
            if arc.contains_oriented(t.y.transformed(&m_inv), self.spectacles.orient, snap) {
                count += 1;
                hit = Some(k);
            }
        }
        match count {
            0 => Err(Error::NoMatch),
            1 => Ok(hit.unwrap()),
            n => Err(Error::Ambiguous(n)),
        }
    }

    /// The unique out-edge at `h(X0)` whose spectacle contains `xi`, with its
    /// slot index.
    pub fn next_out(&self, h: &Isometry, kind: VertexKind, xi: BoundaryPoint) -> Result<(u32, EdgeFrame)> {
        let k = self.next_slot(kind, &LocalTarget::new(h, xi))?;
        Ok((k, self.frames.out_edge(h, kind, k)))
    }

    /// Admissible path of `steps` edges from the vertex `h(X0)` toward `xi`.
    pub fn forward_from(
        &self,
        h: &Isometry,
        kind: VertexKind,
        xi: BoundaryPoint,
        steps: usize,
    ) -> Result<GraphPath> {
        Ok(self.forward_local(h, kind, LocalTarget::new(h, xi), steps)?.0)
    }

    /// Like `forward_from`, with the target carried in local coordinates so
    /// that decisions never depend on the size of the frames. Also returns
    /// the target as seen from the last vertex.
    pub fn forward_local(
        &self,
        h: &Isometry,
        kind: VertexKind,
        target: LocalTarget,
        steps: usize,
    ) -> Result<(GraphPath, LocalTarget)> {
        let mut edges = Vec::with_capacity(steps);
        let mut code = Vec::new();
        let mut t = target;
        let mut cur = *h;
        let mut at = kind;
        while edges.len() < steps {
            let k = self.next_slot(at, &t)?;
            if !edges.is_empty() {
                code.push(match at {
                    VertexKind::A => Block::a(k),
                    VertexKind::B => Block::b(k),
                });
            }
            let m = self.frames.letter_move(at, k);
            t = t.pulled(&m.inverse());
            let e = self.frames.out_edge(&cur, at, k);
            cur = e.h;
            at = at.other();
            edges.push(e);
        }
        Ok((
            GraphPath {
                start_kind: kind,
                start: *h,
                edges,
                code,
            },
            t,
        ))
    }

    /// Continues a path from the head of `e`.
    pub fn forward_from_edge(&self, e: &EdgeFrame, xi: BoundaryPoint, steps: usize) -> Result<GraphPath> {
        self.forward_from(&e.h, e.dir.dst_kind(), xi, steps)
    }
}

/// The calibrated spectacles `S^f` of the ball's parameters.
pub fn base_spectacles_sf(ball: &GraphBall) -> Result<SpectaclesPair> {
    Ok(Coder::new(&ball.params)?.spectacles)
}

pub fn edge_spectacle(s: &SpectaclesPair, ball: &GraphBall, e: DirectedEdge) -> Result<BoundaryArc> {
    Ok(s.spectacle(&ball_frame(ball, e)?))
}

/// The out-edge of ball vertex `v` whose spectacle contains `xi`.
pub fn next_edge(
    s: &SpectaclesPair,
    ball: &GraphBall,
    v: usize,
    xi: BoundaryPoint,
) -> Result<DirectedEdge> {
    let mut hits = Vec::new();
    for (k, slot) in ball.slots[v].iter().enumerate() {
        let dst = slot.ok_or(Error::BallTooSmall)?;
        let e = DirectedEdge { src: v, dst };
        if s.contains(&ball_frame(ball, e)?, xi) {
            hits.push((k, e));
        }
    }
    match hits.len() {
        0 => Err(Error::NoMatch),
        1 => Ok(hits[0].1),
        n => Err(Error::Ambiguous(n)),
    }
}

/// Admissible path from ball vertex `v` toward `xi`. Vertices beyond the
/// ball are materialized on the fly from frames.
pub fn forward_path(
    s: &SpectaclesPair,
    ball: &GraphBall,
    v: usize,
    xi: BoundaryPoint,
    steps: usize,
) -> Result<GraphPath> {
    let coder = Coder {
        frames: Frames::new(&ball.params),
        spectacles: *s,
    };
    let vert = &ball.vertices[v];
    coder.forward_from(&vert.g, vert.kind, xi, steps)
}

/// Bi-infinite admissible path, kept as a finite window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiPath {
    pub eta: BoundaryPoint,
    pub xi: BoundaryPoint,
    /// Path from the farthest seed toward `xi`.
    pub window: GraphPath,
    /// Consecutive seed pairs whose paths merged.
    pub merged_pairs: usize,
    /// Periodic code when a holonomy fixing both endpoints was supplied.
    pub certificate: Option<crate::words::CyclicWord>,
}

pub const SEED_COUNT: usize = 8;
const SEED_TAIL: usize = 8;

/// First pair of indices at which two paths share an edge and agree on
/// every later turn they both have. Turns are compared symbolically, since
/// frames far from the origin lose relative precision.
fn merge_point(a: &GraphPath, b: &GraphPath) -> Option<(usize, usize)> {
    for (ib, eb) in b.edges.iter().enumerate() {
        for (ia, ea) in a.edges.iter().enumerate() {
            if !ea.same_edge(eb, 1e-6) {
                continue;
            }
            let n = (a.code.len() - ia.min(a.code.len())).min(b.code.len() - ib.min(b.code.len()));
            if (0..n).all(|t| a.code[ia + t] == b.code[ib + t]) {
                return Some((ia, ib));
            }
        }
    }
    None
}

impl Coder {
    /// Admissible path from `eta` to `xi`: forward paths toward `xi` are
    /// started from seeds along the path from `A0` toward `eta`, and must
    /// merge. With `holonomy` fixing both points, the periodic code is
    /// recovered by walking on toward `xi` modulo the holonomy.
    pub fn biinfinite_path(
        &self,
        eta: BoundaryPoint,
        xi: BoundaryPoint,
        holonomy: Option<&Isometry>,
    ) -> Result<BiPath> {
        if eta.angular_dist(xi) < 1e-12 {
            return Err(Error::EndpointsEqual);
        }
        // Walk toward eta, carrying xi along in local coordinates so that the
        // far seeds still see it accurately.
        let mut h = Isometry::IDENTITY;
        let mut at = VertexKind::A;
        let mut t_eta = LocalTarget::new(&h, eta);
        let mut t_xi = LocalTarget::new(&h, xi);
        let mut seeds = Vec::with_capacity(SEED_COUNT);
        for _ in 0..SEED_COUNT {
            let k = self.next_slot(at, &t_eta)?;
            let m_inv = self.frames.letter_move(at, k).inverse();
            t_eta = t_eta.pulled(&m_inv);
            t_xi = t_xi.pulled(&m_inv);
            h = self.frames.out_edge(&h, at, k).h;
            at = at.other();
            seeds.push((h, at, t_xi));
        }
        let mut paths = Vec::with_capacity(SEED_COUNT);
        for (j, (h, kind, t)) in seeds.iter().enumerate() {
            paths.push(self.forward_local(h, *kind, *t, j + 1 + SEED_TAIL)?.0);
        }
        let merged_pairs = paths
            .windows(2)
            .filter(|w| merge_point(&w[0], &w[1]).is_some())
            .count();
        // Around an axis carrying two admissible paths the seeds may alternate
        // between them, so the last seed is matched with the latest seed that
        // agrees with it.
        let last = paths.pop().unwrap();
        let ib = paths
            .iter()
            .rev()
            .find_map(|p| merge_point(p, &last).map(|(_, ib)| ib))
            .ok_or(Error::NoStabilization)?;
        let certificate = match holonomy {
            Some(g) => Some(self.periodic_certificate(&last.edges[ib], xi, g)?),
            None => None,
        };
        Ok(BiPath {
            eta,
            xi,
            window: last,
            merged_pairs,
            certificate,
        })
    }

    /// Walks from `start` toward the fixed point `xi` of `g`, reducing each
    /// frame by powers of `g` toward the origin, until a reduced frame
    /// repeats. The turns around the loop form the periodic code.
    pub fn periodic_certificate(
        &self,
        start: &EdgeFrame,
        xi: BoundaryPoint,
        g: &Isometry,
    ) -> Result<crate::words::CyclicWord> {
        let g_inv = g.inverse();
        let reduce = |e: EdgeFrame| -> EdgeFrame {
            let mut cur = e;
            loop {
                let fwd = cur.moved(g);
                let back = cur.moved(&g_inv);
                let size = cur.h.a.norm();
                if fwd.h.a.norm() < size - 1e-12 {
                    cur = fwd;
                } else if back.h.a.norm() < size - 1e-12 {
                    cur = back;
                } else {
                    return cur;
                }
            }
        };
        let same = |x: &EdgeFrame, y: &EdgeFrame| {
            x.same_edge(y, 1e-6) || x.same_edge(&y.moved(g), 1e-6) || x.same_edge(&y.moved(&g_inv), 1e-6)
        };
        let mut states: Vec<EdgeFrame> = Vec::new();
        let mut turns: Vec<Block> = Vec::new();
        let mut e = reduce(*start);
        for _ in 0..4096 {
            if let Some(i) = states.iter().position(|s| same(s, &e)) {
                return crate::words::CyclicWord::from_parts(&turns[i..]);
            }
            states.push(e);
            let at = e.dir.dst_kind();
            let (k, next) = self.next_out(&e.h, at, xi)?;
            turns.push(match at {
                VertexKind::A => Block::a(k),
                VertexKind::B => Block::b(k),
            });
            e = reduce(next);
        }
        Err(Error::PeriodNotDetected)
    }

    /// The four branch arcs at the base switch: the two base spectacles and
    /// their neighbours `R_A^-1 I_B2A` and `R_B I_A2B`.
    pub fn branching_arcs(&self, s: &SpectaclesPair) -> [BoundaryArc; 4] {
        let ra_inv = self.frames.rotation(VertexKind::A).inverse();
        let rb = self.frames.rotation(VertexKind::B);
        [
            s.i_b2a,
            s.i_a2b,
            s.i_b2a.transformed(&ra_inv),
            s.i_a2b.transformed(&rb),
        ]
    }

    /// The two base spectacles abut at one point and their union contains
    /// all four branch arcs.
    pub fn verify_branching_with(&self, s: &SpectaclesPair) -> bool {
        let tol = 1e-9;
        if s.i_b2a.right.angular_dist(s.i_a2b.left) > tol {
            return false;
        }
        let union = BoundaryArc {
            left: s.i_b2a.left,
            right: s.i_a2b.right,
        };
        let parts = s.i_b2a.length(s.orient) + s.i_a2b.length(s.orient);
        if (parts - std::f64::consts::TAU).abs() < tol {
            // With an ideal third vertex the two spectacles close up into
            // the whole circle, which contains every arc.
            return true;
        }
        if (union.length(s.orient) - parts).abs() > tol {
            return false;
        }
        self.branching_arcs(s)
            .iter()
            .all(|arc| union.contains_arc(arc, s.orient, tol))
    }
}

pub fn biinfinite_path(
    s: &SpectaclesPair,
    ball: &GraphBall,
    eta: BoundaryPoint,
    xi: BoundaryPoint,
    holonomy: Option<&Isometry>,
) -> Result<BiPath> {
    let coder = Coder {
        frames: Frames::new(&ball.params),
        spectacles: *s,
    };
    coder.biinfinite_path(eta, xi, holonomy)
}

pub fn verify_branching(s: &SpectaclesPair, ball: &GraphBall) -> bool {
    let coder = Coder {
        frames: Frames::new(&ball.params),
        spectacles: *s,
    };
    coder.verify_branching_with(s)
}
