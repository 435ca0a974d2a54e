//! Desk-scale verification checks, one per property, for a single triangle.

use std::f64::consts::TAU;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coding::{edge_spectacle, geometric_kneading_frames, Coder, EdgeFrame};
use crate::geom::{BoundaryPoint, Isometry};
use crate::group_graph::{expand, TriangleParams, VertexKind};
use crate::orbits::{axis, enumerate_orbits_with, holonomy_frames, roundtrip_verify};
use crate::topology::{euler_order, h1, surgery_presentation};
use crate::words::{admissible_cyclic, table1_kneading, table2_exceptional};
use crate::{Result, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            name,
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: &'static str, r: Result<(bool, String)>) -> Check {
        match r {
            Ok((passed, detail)) => Check::new(name, passed, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub max_blocks: usize,
    pub uniqueness_samples: usize,
    pub uniqueness_len: usize,
    pub ordering_pairs: usize,
    pub tiling_depth: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            max_blocks: 6,
            uniqueness_samples: 20,
            uniqueness_len: 8,
            ordering_pairs: 100,
            tiling_depth: 3,
        }
    }
}

fn sample(rng: &mut ChaCha8Rng) -> BoundaryPoint {
    BoundaryPoint::new(rng.gen_range(0.0..TAU))
}

/// Geometric kneading from the bigon equals the closed forms.
pub fn check_kneading(params: &TriangleParams) -> Check {
    let start = Instant::now();
    let r = (|| {
        let coder = Coder::new(params)?;
        let geo = geometric_kneading_frames(&coder.frames)?;
        let closed = table1_kneading(params)?;
        Ok((geo == closed, format!("u_L = {} in {:.2?}", geo.u_l, start.elapsed())))
    })();
    Check::from_result("kneading", r)
}

/// Conjugates of `g` by the edge isometries of a ball, one of which should
/// share the axis of `target`.
fn shares_axis_up_to_conjugacy(params: &TriangleParams, g: &Isometry, target: (BoundaryPoint, BoundaryPoint)) -> Result<f64> {
    let ball = expand(params, 5)?;
    let tol = Tolerances::DEFAULT;
    let mut best = f64::INFINITY;
    for e in ball.edges() {
        let h = ball.edge_transform(e)?;
        let c = h.compose(g).compose(&h.inverse());
        let (att, rep) = axis(&c, &tol)?;
        best = best.min(att.angular_dist(target.0).max(rep.angular_dist(target.1)));
    }
    Ok(best)
}

/// The two exceptional words are admissible, code one geodesic, and are
/// merged by the enumeration.
pub fn check_exceptional(params: &TriangleParams) -> Check {
    if params.r.is_none() {
        return Check::new("exceptional", true, "no exceptional pair when r is infinite");
    }
    let r = (|| {
        let coder = Coder::new(params)?;
        let k = table1_kneading(params)?;
        let tol = Tolerances::DEFAULT;
        let (w_l, w_r) = table2_exceptional(params)?;
        let admissible = admissible_cyclic(&w_l, &k) && admissible_cyclic(&w_r, &k);
        let g_l = holonomy_frames(&coder.frames, &w_l)?;
        let g_r = holonomy_frames(&coder.frames, &w_r)?;
        let gap = shares_axis_up_to_conjugacy(params, &g_r, axis(&g_l, &tol)?)?;
        let blocks = w_l.block_count().max(w_r.block_count());
        let orbits = enumerate_orbits_with(&coder, &k, blocks, &tol)?;
        let flagged: Vec<_> = orbits.iter().filter(|o| o.exceptional).collect();
        let merged = flagged.len() == 1
            && flagged[0].word == w_l
            && flagged[0].secondary.as_ref() == Some(&w_r)
            && !orbits.iter().any(|o| o.word == w_r);
        Ok((
            admissible && gap < 1e-7 && merged,
            format!("{w_l} / {w_r}: admissible {admissible}, axis gap {gap:.1e}, merged {merged}"),
        ))
    })();
    Check::from_result("exceptional", r)
}

/// Every enumerated orbit is recovered from its axis.
pub fn check_roundtrip(params: &TriangleParams, max_blocks: usize) -> Check {
    let start = Instant::now();
    let r = (|| {
        let coder = Coder::new(params)?;
        let k = geometric_kneading_frames(&coder.frames)?;
        let orbits = enumerate_orbits_with(&coder, &k, max_blocks, &Tolerances::DEFAULT)?;
        let failed: Vec<String> = orbits
            .iter()
            .filter(|o| !roundtrip_verify(&coder, o))
            .map(|o| o.word.to_string())
            .collect();
        Ok((
            failed.is_empty(),
            format!(
                "{}/{} orbits with <= {max_blocks} blocks in {:.2?}{}",
                orbits.len() - failed.len(),
                orbits.len(),
                start.elapsed(),
                if failed.is_empty() { String::new() } else { format!(", failed {}", failed.join(" ")) }
            ),
        ))
    })();
    Check::from_result("roundtrip", r)
}

/// Slot sequences of every path of `len` edges from `A0` whose spectacles
/// all contain `x`.
pub fn consistent_paths(coder: &Coder, x: BoundaryPoint, len: usize) -> Vec<Vec<u32>> {
    fn go(c: &Coder, x: BoundaryPoint, h: Isometry, kind: VertexKind, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in 0..c.frames.order(kind) {
            let e = c.frames.out_edge(&h, kind, k);
            if c.spectacles.contains(&e, x) {
                cur.push(k);
                go(c, x, e.h, kind.other(), left - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(coder, x, Isometry::IDENTITY, VertexKind::A, len, &mut Vec::new(), &mut out);
    out
}

/// Exhaustive search finds exactly the forward path for each sample.
pub fn check_uniqueness(params: &TriangleParams, cfg: &SuiteConfig) -> Check {
    let r = (|| {
        let coder = Coder::new(params)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut good = 0;
        for _ in 0..cfg.uniqueness_samples {
            let x = sample(&mut rng);
            let all = consistent_paths(&coder, x, cfg.uniqueness_len);
            let fwd = coder.forward_from(&Isometry::IDENTITY, VertexKind::A, x, cfg.uniqueness_len)?;
            if all.len() == 1 {
                let mut h = Isometry::IDENTITY;
                let mut kind = VertexKind::A;
                let same = fwd.edges.iter().zip(&all[0]).all(|(e, &k)| {
                    let f: EdgeFrame = coder.frames.out_edge(&h, kind, k);
                    h = f.h;
                    kind = kind.other();
                    f.same_edge(e, 1e-9)
                });
                if same {
                    good += 1;
                }
            }
        }
        Ok((
            good == cfg.uniqueness_samples,
            format!("{good}/{} samples with one consistent path of length {}", cfg.uniqueness_samples, cfg.uniqueness_len),
        ))
    })();
    Check::from_result("uniqueness", r)
}

/// Codes of paths leaving along the base edge compare like their endpoints.
pub fn check_ordering(params: &TriangleParams, cfg: &SuiteConfig) -> Check {
    let r = (|| {
        let coder = Coder::new(params)?;
        let arc = coder.spectacles.i_a2b;
        let orient = coder.spectacles.orient;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
        let (mut agree, mut pairs, mut draws) = (0, 0, 0);
        while pairs < cfg.ordering_pairs && draws < 1_000_000 {
            draws += 1;
            let (x, y) = (sample(&mut rng), sample(&mut rng));
            if !arc.contains_oriented(x, orient, 0.0) || !arc.contains_oriented(y, orient, 0.0) {
                continue;
            }
            let px = coder.forward_from(&Isometry::IDENTITY, VertexKind::A, x, 16)?.code_letters();
            let py = coder.forward_from(&Isometry::IDENTITY, VertexKind::A, y, 16)?.code_letters();
            let Some((cx, cy)) = px.chars().zip(py.chars()).find(|(a, b)| a != b) else {
                continue;
            };
            pairs += 1;
            let nearer = arc.position(x, orient) < arc.position(y, orient);
            if (cx < cy) == nearer {
                agree += 1;
            }
        }
        Ok((
            pairs == cfg.ordering_pairs && agree == pairs,
            format!("{agree}/{pairs} pairs agree"),
        ))
    })();
    Check::from_result("ordering", r)
}

/// Outgoing spectacles at each interior vertex of a ball tile the circle.
pub fn check_tiling(params: &TriangleParams, depth: usize) -> Check {
    let r = (|| {
        let coder = Coder::new(params)?;
        let ball = expand(params, depth)?;
        let orient = coder.spectacles.orient;
        let mut worst: f64 = 0.0;
        let mut interior = 0;
        for v in 0..ball.vertices.len() {
            if !ball.is_complete(v) {
                continue;
            }
            interior += 1;
            let arcs: Vec<_> = ball
                .edges()
                .into_iter()
                .filter(|e| e.src == v)
                .map(|e| edge_spectacle(&coder.spectacles, &ball, e))
                .collect::<Result<_>>()?;
            let total: f64 = arcs.iter().map(|a| a.length(orient)).sum();
            worst = worst.max((total - TAU).abs());
            for a in &arcs {
                let gap = arcs
                    .iter()
                    .map(|b| a.right.angular_dist(b.left))
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(gap);
            }
        }
        Ok((worst < 1e-9 && interior > 0, format!("{interior} interior vertices, worst gap {worst:.1e}")))
    })();
    Check::from_result("tiling", r)
}

/// Homology order from Smith normal form against `|pqr - pq - qr - rp|`.
pub fn check_homology(params: &TriangleParams) -> Check {
    let group = h1(&surgery_presentation(params));
    match (group.order(), euler_order(params)) {
        (Some(o), Some(e)) => Check::new("homology", o == e, format!("H1 = {group}, expected order {e}")),
        (None, None) => Check::new("homology", group.free_rank >= 1, format!("H1 = {group}")),
        _ => Check::new("homology", false, format!("H1 = {group}")),
    }
}

pub fn check_branching(params: &TriangleParams) -> Check {
    let r = Coder::new(params).map(|c| {
        let ok = c.verify_branching_with(&c.spectacles);
        (ok, "branch arcs inside the union of the base spectacles".to_string())
    });
    Check::from_result("branching", r)
}

/// All checks for one triangle.
pub fn run_suite(params: &TriangleParams, cfg: &SuiteConfig) -> Vec<Check> {
    vec![
        check_kneading(params),
        check_exceptional(params),
        check_roundtrip(params, cfg.max_blocks),
        check_uniqueness(params, cfg),
        check_ordering(params, cfg),
        check_tiling(params, cfg.tiling_depth),
        check_homology(params),
        check_branching(params),
    ]
}
