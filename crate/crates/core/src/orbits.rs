//! Periodic orbits of the template, coded by admissible cyclic words.
//!
//! A cyclic word is laid out as a path through the base edge `B0 -> A0`,
//! starting with its canonical rotation. Composing the vertex rotations along
//! one period gives the holonomy, whose axis is the closed geodesic of the
//! orbit. Re-coding that axis must give the word back.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::coding::{Coder, Dir, EdgeFrame, Frames, GraphPath};
use crate::error::{Error, Result};
use crate::geom::{
    classify_with, rotation_about, BoundaryPoint, DiskPoint, Isometry, IsometryClass, Transform,
};
use crate::group_graph::{GraphBall, TriangleParams, VertexKind};
use crate::words::{
    admissible_cyclic, expand, table2_exceptional, Block, CyclicWord, KneadingSet, Letter,
};
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub word: CyclicWord,
    pub holonomy: Isometry,
    /// `(attracting, repelling)` fixed points of the holonomy.
    pub axis: (BoundaryPoint, BoundaryPoint),
    pub exceptional: bool,
    /// The second code of an exceptional orbit.
    pub secondary: Option<CyclicWord>,
}

impl PeriodicOrbit {
    pub fn trace(&self) -> f64 {
        self.holonomy.trace().abs()
    }

    pub fn attracting(&self) -> BoundaryPoint {
        self.axis.0
    }

    pub fn repelling(&self) -> BoundaryPoint {
        self.axis.1
    }
}

/// Start of the laid-out path: the base edge traversed from `B0` to `A0`.
pub const START: EdgeFrame = EdgeFrame {
    h: Isometry::IDENTITY,
    dir: Dir::BtoA,
};

fn kind_of(letter: Letter) -> VertexKind {
    match letter {
        Letter::A => VertexKind::A,
        Letter::B => VertexKind::B,
    }
}

/// Lays out one period of `w` from `START`. Returns the out-edge after each
/// block.
pub fn layout(frames: &Frames, w: &CyclicWord) -> Result<Vec<EdgeFrame>> {
    w.check_exponents(frames.params.p, frames.params.q)?;
    let mut e = START;
    let mut out = Vec::with_capacity(w.block_count());
    for blk in w.blocks() {
        if kind_of(blk.letter) != e.dir.dst_kind() {
            return Err(Error::EdgeMismatch);
        }
        e = frames.turn(&e, blk.exp);
        out.push(e);
    }
    Ok(out)
}

/// Holonomy of `w`: the product of the rotations about the visited vertices,
/// by `k` steps counterclockwise at `A` and clockwise at `B`. Checked against
/// the frame walk, which must end on the image of the start edge.
pub fn holonomy_frames(frames: &Frames, w: &CyclicWord) -> Result<Isometry> {
    let walk = layout(frames, w)?;
    let tri = &frames.tri;
    let mut g = Isometry::IDENTITY;
    let mut e = START;
    for (blk, next) in w.blocks().iter().zip(&walk) {
        let center = e.dst(tri);
        let (k, n) = match blk.letter {
            Letter::A => (blk.exp as i64, frames.params.p),
            Letter::B => (-(blk.exp as i64), frames.params.q),
        };
        g = rotation_about(center, k, n).compose(&g);
        e = *next;
    }
    let end = walk.last().ok_or(Error::EdgeMismatch)?;
    let tol = 1e-8;
    let moved_src = START.src(tri).transformed(&g);
    let moved_dst = START.dst(tri).transformed(&g);
    if end.dir != START.dir
        || moved_src.euclid_dist(end.src(tri)) > tol
        || moved_dst.euclid_dist(end.dst(tri)) > tol
    {
        return Err(Error::EdgeMismatch);
    }
    Ok(g)
}

pub fn holonomy(ball: &GraphBall, w: &CyclicWord) -> Result<Isometry> {
    holonomy_frames(&Frames::new(&ball.params), w)
}

/// `(attracting, repelling)` endpoints of a hyperbolic isometry.
pub fn axis(g: &Isometry, tol: &Tolerances) -> Result<(BoundaryPoint, BoundaryPoint)> {
    match classify_with(g, tol) {
        IsometryClass::Hyperbolic {
            attracting,
            repelling,
        } => Ok((attracting, repelling)),
        other => Err(Error::ValidationFailure(format!(
            "holonomy is {}, not hyperbolic",
            other.tag()
        ))),
    }
}

pub fn make_orbit(frames: &Frames, w: CyclicWord, tol: &Tolerances) -> Result<PeriodicOrbit> {
    let g = holonomy_frames(frames, &w)?;
    let axis = axis(&g, tol)?;
    Ok(PeriodicOrbit {
        word: w,
        holonomy: g,
        axis,
        exceptional: false,
        secondary: None,
    })
}

/// Whether the finite letter sequence `xs` can still start a word in the
/// window `[lo, hi)`.
fn window_open(xs: &[Letter], lo: &crate::words::EPWord, hi: &crate::words::EPWord) -> bool {
    for (x, l) in xs.iter().zip(lo.letters()) {
        if x != &l {
            if x < &l {
                return false;
            }
            break;
        }
    }
    for (x, h) in xs.iter().zip(hi.letters()) {
        if x != &h {
            return x < &h;
        }
    }
    true
}

/// Every suffix of a partial necklace must still fit its kneading window.
pub fn prefix_viable(blocks: &[Block], k: &KneadingSet) -> bool {
    (0..blocks.len()).all(|i| {
        let xs: Vec<Letter> = expand(&blocks[i..]).collect();
        match blocks[i].letter {
            Letter::A => window_open(&xs, &k.u_l, &k.u_r),
            Letter::B => window_open(&xs, &k.v_l, &k.v_r),
        }
    })
}

fn exponent_range(letter: Letter, p: u32, q: u32) -> std::ops::RangeInclusive<u32> {
    match letter {
        Letter::A => 1..=p - 1,
        Letter::B => 1..=q - 1,
    }
}

/// Primitive alternating necklaces with at most `max_blocks` blocks, as
/// canonical cyclic words. With `prune`, partial words outside the kneading
/// windows are cut early.
pub fn candidate_words(
    params: &TriangleParams,
    k: &KneadingSet,
    max_blocks: usize,
    prune: bool,
) -> BTreeSet<CyclicWord> {
    fn grow(
        cur: &mut Vec<Block>,
        max: usize,
        params: &TriangleParams,
        k: &KneadingSet,
        prune: bool,
        out: &mut BTreeSet<CyclicWord>,
    ) {
        if cur.len().is_multiple_of(2) && !cur.is_empty() {
            if let Ok(w) = CyclicWord::new(cur.clone()) {
                if w.blocks() == cur.as_slice() && w.is_primitive() {
                    out.insert(w);
                }
            }
        }
        if cur.len() == max {
            return;
        }
        let letter = if cur.len().is_multiple_of(2) { Letter::A } else { Letter::B };
        for exp in exponent_range(letter, params.p, params.q) {
            cur.push(Block { letter, exp });
            if !prune || prefix_viable(cur, k) {
                grow(cur, max, params, k, prune, out);
            }
            cur.pop();
        }
    }
    let mut out = BTreeSet::new();
    let mut cur = Vec::new();
    grow(&mut cur, max_blocks - max_blocks % 2, params, k, prune, &mut out);
    out
}

/// Stable orbit order: block count, then the letter expansion.
pub fn orbit_order(x: &CyclicWord, y: &CyclicWord) -> std::cmp::Ordering {
    x.block_count()
        .cmp(&y.block_count())
        .then_with(|| x.letters_string().cmp(&y.letters_string()))
}

/// Admissible periodic orbits with at most `max_blocks` blocks. The two codes
/// of the exceptional orbit are merged under the first one.
pub fn enumerate_orbits_with(
    coder: &Coder,
    k: &KneadingSet,
    max_blocks: usize,
    tol: &Tolerances,
) -> Result<Vec<PeriodicOrbit>> {
    let params = coder.params();
    let mut words: Vec<CyclicWord> = candidate_words(params, k, max_blocks, true)
        .into_iter()
        .filter(|w| admissible_cyclic(w, k))
        .collect();
    let pair = if params.r.is_some() {
        table2_exceptional(params).ok()
    } else {
        None
    };
    if params.r.is_none() {
        // The closed end of the window is the loop around the cusp, whose
        // holonomy is parabolic: it bounds the orbits rather than being one.
        words.retain(|w| !is_cusp_word(w, params));
    }
    let mut merged = None;
    if let Some((w_l, w_r)) = &pair {
        if words.contains(w_l) && words.contains(w_r) {
            words.retain(|w| w != w_r);
            merged = Some((w_l.clone(), w_r.clone()));
        }
    }
    words.sort_by(orbit_order);
    words
        .into_iter()
        .map(|w| {
            let mut orbit = make_orbit(&coder.frames, w, tol)?;
            if let Some((w_l, w_r)) = &merged {
                if &orbit.word == w_l {
                    orbit.exceptional = true;
                    orbit.secondary = Some(w_r.clone());
                }
            }
            Ok(orbit)
        })
        .collect()
}

pub fn enumerate_orbits(params: &TriangleParams, max_blocks: usize) -> Result<Vec<PeriodicOrbit>> {
    let coder = Coder::new(params)?;
    let k = crate::coding::geometric_kneading_frames(&coder.frames)?;
    enumerate_orbits_with(&coder, &k, max_blocks, &Tolerances::DEFAULT)
}

/// The loop `(a^(p-1) b)` around the cusp of an orbifold with `r` infinite.
pub fn is_cusp_word(w: &CyclicWord, params: &TriangleParams) -> bool {
    params.r.is_none() && w.blocks() == [Block::a(params.p - 1), Block::b(1)]
}

/// Re-codes the axis of the orbit and compares with its word.
pub fn roundtrip_verify(coder: &Coder, orbit: &PeriodicOrbit) -> bool {
    let (xi, eta) = orbit.axis;
    match coder.biinfinite_path(eta, xi, Some(&orbit.holonomy)) {
        Ok(bi) => match bi.certificate {
            Some(c) => c == orbit.word || orbit.secondary.as_ref() == Some(&c),
            None => false,
        },
        Err(_) => false,
    }
}

/// One rotation around a roundabout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangoArc {
    pub vertex: DiskPoint,
    pub kind: VertexKind,
    pub entry: EdgeFrame,
    pub exit: EdgeFrame,
    pub sectors: u32,
    pub counterclockwise: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangoPath {
    pub arcs: Vec<TangoArc>,
}

fn tango_arc(frames: &Frames, entry: EdgeFrame, exit: EdgeFrame, sectors: u32) -> Result<TangoArc> {
    let kind = entry.dir.dst_kind();
    let n = frames.order(kind);
    if sectors == 0 || sectors >= n {
        return Err(Error::ExponentOutOfRange {
            letter: match kind {
                VertexKind::A => 'a',
                VertexKind::B => 'b',
            },
            exp: sectors,
            max: n - 1,
        });
    }
    Ok(TangoArc {
        vertex: entry.dst(&frames.tri),
        kind,
        entry,
        exit,
        sectors,
        counterclockwise: kind == VertexKind::A,
    })
}

/// Tango of one period of a cyclic word laid out from the base edge.
pub fn tango_word(frames: &Frames, w: &CyclicWord) -> Result<TangoPath> {
    let walk = layout(frames, w)?;
    let mut entry = START;
    let mut arcs = Vec::with_capacity(walk.len());
    for (blk, exit) in w.blocks().iter().zip(walk) {
        arcs.push(tango_arc(frames, entry, exit, blk.exp)?);
        entry = exit;
    }
    Ok(TangoPath { arcs })
}

/// Tango along the interior vertices of a path.
pub fn tango_path(frames: &Frames, path: &GraphPath) -> Result<TangoPath> {
    let arcs = path
        .edges
        .windows(2)
        .zip(&path.code)
        .map(|(pair, blk)| tango_arc(frames, pair[0], pair[1], blk.exp))
        .collect::<Result<Vec<_>>>()?;
    Ok(TangoPath { arcs })
}

pub fn tango(ball: &GraphBall, w: &CyclicWord) -> Result<TangoPath> {
    tango_word(&Frames::new(&ball.params), w)
}

/// A vertex of the graph, seen as the circle the template winds around.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roundabout {
    pub vertex: usize,
}

/// The contact point of two roundabouts, one per undirected edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Switch {
    pub a_end: usize,
    pub b_end: usize,
}

/// Roundabouts and switches of the ball.
pub fn snake(ball: &GraphBall) -> (Vec<Roundabout>, Vec<Switch>) {
    let roundabouts = (0..ball.vertices.len())
        .map(|vertex| Roundabout { vertex })
        .collect();
    let switches = ball
        .edges()
        .into_iter()
        .filter(|e| ball.vertices[e.src].kind == VertexKind::A)
        .map(|e| Switch {
            a_end: e.src,
            b_end: e.dst,
        })
        .collect();
    (roundabouts, switches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::geometric_kneading_frames;
    use crate::group_graph::{canonicalize, expand};
    use crate::words::table1_kneading;

    fn setup(p: u32, q: u32, r: Option<u32>) -> (Coder, KneadingSet) {
        let t = canonicalize(p, q, r).unwrap();
        (Coder::new(&t).unwrap(), table1_kneading(&t).unwrap())
    }

    fn letters(blocks: &[Block], n: usize) -> String {
        crate::words::expand(blocks).cycle().take(n).map(Letter::as_char).collect()
    }

    fn word_letters(w: &crate::words::EPWord, n: usize) -> String {
        w.letters().take(n).map(Letter::as_char).collect()
    }

    /// Admissibility read off long letter strings: every block rotation of
    /// the periodic word lies in `[u_L, u_R)` or `[v_L, v_R)` by its first
    /// letter. Strings are compared at a length far past any period.
    fn admissible_by_letters(w: &CyclicWord, k: &KneadingSet) -> bool {
        let n = 240;
        let b = w.blocks();
        (0..b.len()).all(|i| {
            let mut rot = b[i..].to_vec();
            rot.extend_from_slice(&b[..i]);
            let x = letters(&rot, n);
            let (lo, hi) = match rot[0].letter {
                Letter::A => (&k.u_l, &k.u_r),
                Letter::B => (&k.v_l, &k.v_r),
            };
            word_letters(lo, n) <= x && x < word_letters(hi, n)
        })
    }

    #[test]
    fn two_block_candidates_for_345() {
        let (c, k) = setup(3, 4, Some(5));
        let all = candidate_words(c.params(), &k, 2, false);
        assert_eq!(all.len(), 6);
        let adm: Vec<String> = all
            .iter()
            .filter(|w| admissible_by_letters(w, &k))
            .map(|w| w.to_string())
            .collect();
        assert!(adm.contains(&"<a b>".to_string()));
        assert!(adm.contains(&"<a^2 b^3>".to_string()));
        assert!(!adm.contains(&"<a^2 b>".to_string()));
        let orbits = enumerate_orbits(c.params(), 2).unwrap();
        let mut got: Vec<String> = orbits.iter().map(|o| o.word.to_string()).collect();
        // Orbits come sorted by letter expansion: "aabb" before "ab".
        assert_eq!(got[0], "<a^2 b^2>");
        got.sort();
        assert_eq!(got, adm);
    }

    #[test]
    fn two_block_candidates_with_a_cusp() {
        let (c, k) = setup(3, 4, None);
        let all = candidate_words(c.params(), &k, 2, false);
        assert_eq!(all.len(), 6);
        let adm: Vec<&CyclicWord> = all.iter().filter(|w| admissible_by_letters(w, &k)).collect();
        // Only the open end of the window, (a b^3), is cut.
        assert_eq!(adm.len(), 5);
        assert!(!adm.iter().any(|w| w.to_string() == "<a b^3>"));
        // The closed end is the loop around the cusp and is not an orbit.
        let orbits = enumerate_orbits(c.params(), 2).unwrap();
        assert_eq!(orbits.len(), 4);
        assert!(!orbits.iter().any(|o| o.word.to_string() == "<a^2 b>"));
    }

    #[test]
    fn pruning_loses_nothing() {
        for (p, q, r) in [(3, 4, Some(5)), (3, 3, Some(4)), (2, 3, Some(7)), (2, 4, Some(6)), (3, 4, None)] {
            let (c, k) = setup(p, q, r);
            let pruned: BTreeSet<CyclicWord> = candidate_words(c.params(), &k, 4, true)
                .into_iter()
                .filter(|w| admissible_cyclic(w, &k))
                .collect();
            let brute: BTreeSet<CyclicWord> = candidate_words(c.params(), &k, 4, false)
                .into_iter()
                .filter(|w| admissible_by_letters(w, &k))
                .collect();
            assert_eq!(pruned, brute, "({p},{q},{r:?})");
        }
    }

    #[test]
    fn exceptional_pair_is_merged() {
        let (c, k) = setup(3, 4, Some(5));
        let orbits = enumerate_orbits_with(&c, &k, 4, &Tolerances::DEFAULT).unwrap();
        let exc: Vec<&PeriodicOrbit> = orbits.iter().filter(|o| o.exceptional).collect();
        assert_eq!(exc.len(), 1);
        assert_eq!(exc[0].word.to_string(), "<a^2 b a b>");
        assert_eq!(exc[0].secondary.as_ref().unwrap().to_string(), "<a b^2 a b^3>");
        assert!(!orbits.iter().any(|o| o.word.to_string() == "<a b^2 a b^3>"));
        assert!(roundtrip_verify(&c, exc[0]));
        let small = enumerate_orbits_with(&c, &k, 2, &Tolerances::DEFAULT).unwrap();
        assert!(small.iter().all(|o| !o.exceptional));
    }

    #[test]
    fn holonomy_is_hyperbolic_and_rotation_invariant() {
        let (c, _) = setup(3, 4, Some(5));
        let ball = expand(c.params(), 1).unwrap();
        let w: CyclicWord = "<ab>".parse().unwrap();
        let g = holonomy(&ball, &w).unwrap();
        assert!(g.trace().abs() > 2.0);
        let w: CyclicWord = "<a^2 b a b^3>".parse().unwrap();
        let g = holonomy_frames(&c.frames, &w).unwrap();
        // Rotating by two blocks moves the base point along the path.
        let mut rot = w.blocks().to_vec();
        rot.rotate_left(2);
        let mut e = START;
        for blk in &rot {
            e = c.frames.turn(&e, blk.exp);
        }
        assert!((g.trace().abs() - e.h.trace().abs()).abs() < 1e-8);
    }

    #[test]
    fn out_of_range_exponent() {
        let (c, _) = setup(3, 4, Some(5));
        let w: CyclicWord = "<a^3 b>".parse().unwrap();
        assert!(matches!(
            holonomy_frames(&c.frames, &w),
            Err(Error::ExponentOutOfRange { letter: 'a', exp: 3, max: 2 })
        ));
        assert!(matches!(tango_word(&c.frames, &w), Err(Error::ExponentOutOfRange { .. })));
    }

    #[test]
    fn axis_endpoints_swap_under_inverse() {
        let (c, _) = setup(3, 3, Some(4));
        let w: CyclicWord = "<a b^2 a^2 b>".parse().unwrap();
        let g = holonomy_frames(&c.frames, &w).unwrap();
        let (att, rep) = axis(&g, &Tolerances::DEFAULT).unwrap();
        let (att_i, rep_i) = axis(&g.inverse(), &Tolerances::DEFAULT).unwrap();
        assert!(att.angular_dist(rep_i) < 1e-9);
        assert!(rep.angular_dist(att_i) < 1e-9);
    }

    #[test]
    fn round_trip_for_small_orbits() {
        for (p, q, r) in [(3, 4, Some(5)), (2, 3, Some(7)), (2, 3, None)] {
            let (c, k) = setup(p, q, r);
            let orbits = enumerate_orbits_with(&c, &k, 4, &Tolerances::DEFAULT).unwrap();
            assert!(!orbits.is_empty());
            for o in &orbits {
                assert!(roundtrip_verify(&c, o), "({p},{q},{r:?}) {}", o.word);
            }
        }
    }

    #[test]
    fn distinct_words_have_distinct_holonomy() {
        let (c, k) = setup(3, 4, Some(5));
        let orbits = enumerate_orbits_with(&c, &k, 6, &Tolerances::DEFAULT).unwrap();
        for (i, x) in orbits.iter().enumerate() {
            for y in &orbits[i + 1..] {
                let trace_gap = (x.trace() - y.trace()).abs();
                let axis_gap = x.attracting().angular_dist(y.attracting()) + x.repelling().angular_dist(y.repelling());
                assert!(trace_gap > 1e-6 || axis_gap > 1e-6, "{} {}", x.word, y.word);
            }
        }
    }

    #[test]
    fn geometric_and_closed_form_kneading_enumerate_alike() {
        let (c, k) = setup(2, 4, Some(5));
        let geo = geometric_kneading_frames(&c.frames).unwrap();
        let a = enumerate_orbits_with(&c, &k, 6, &Tolerances::DEFAULT).unwrap();
        let b = enumerate_orbits_with(&c, &geo, 6, &Tolerances::DEFAULT).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tango_sectors_are_block_exponents() {
        let (c, _) = setup(3, 4, Some(5));
        let t = tango_word(&c.frames, &"<ab>".parse().unwrap()).unwrap();
        let sectors: Vec<u32> = t.arcs.iter().map(|a| a.sectors).collect();
        assert_eq!(sectors, vec![1, 1]);
        let t = tango_word(&c.frames, &"<a^2 b^3>".parse().unwrap()).unwrap();
        let sectors: Vec<u32> = t.arcs.iter().map(|a| a.sectors).collect();
        assert_eq!(sectors, vec![2, 3]);
        assert!(t.arcs[0].counterclockwise && !t.arcs[1].counterclockwise);
        let w: CyclicWord = "<a^2 b a b^3 a b^2>".parse().unwrap();
        assert_eq!(tango_word(&c.frames, &w).unwrap().arcs.len(), w.block_count());
    }

    #[test]
    fn tango_along_a_path() {
        let (c, _) = setup(3, 4, Some(5));
        let path = c
            .forward_from(&Isometry::IDENTITY, VertexKind::A, BoundaryPoint::new(0.3), 8)
            .unwrap();
        let t = tango_path(&c.frames, &path).unwrap();
        assert_eq!(t.arcs.len(), path.code.len());
        for (arc, blk) in t.arcs.iter().zip(&path.code) {
            assert_eq!(arc.sectors, blk.exp);
        }
    }

    #[test]
    fn snake_has_one_switch_per_edge() {
        let t = canonicalize(3, 4, Some(5)).unwrap();
        let ball = expand(&t, 3).unwrap();
        let (r, s) = snake(&ball);
        assert_eq!(r.len(), ball.vertices.len());
        assert_eq!(s.len(), ball.undirected_edge_count());
    }
}
