//! Browser bindings: graph pictures, orbit pictures and orbit lists.

use tworibbon::coding::{bigon_edges, geometric_kneading_frames, Coder, EdgeFrame};
use tworibbon::export::orbits_json;
use tworibbon::geom::Isometry;
use tworibbon::group_graph::{canonicalize, expand, TriangleParams, VertexKind};
use tworibbon::orbits::{enumerate_orbits_with, make_orbit, tango_word};
use tworibbon::render::{render_scene, Overlays};
use tworibbon::words::{relabel, CyclicWord};
use tworibbon::Tolerances;
use wasm_bindgen::prelude::*;

/// Deepest ball the page may ask for.
pub const MAX_DEPTH: usize = 7;

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn params(p: u32, q: u32, r: &str) -> Result<TriangleParams, JsError> {
    let r = match r.trim() {
        "inf" | "" => None,
        s => Some(s.parse::<u32>().map_err(err)?),
    };
    canonicalize(p, q, r).map_err(err)
}

/// Graph ball with any of the overlays `spectacles`, `bigon`, `kneading`
/// (the path toward the normal extremity), separated by commas.
#[wasm_bindgen]
pub fn render_ball(p: u32, q: u32, r: &str, depth: usize, overlays: &str) -> Result<String, JsError> {
    let t = params(p, q, r)?;
    let coder = Coder::new(&t).map_err(err)?;
    let ball = expand(&t, depth.min(MAX_DEPTH)).map_err(err)?;
    let mut ov = Overlays::default();
    for name in overlays.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        ov = match name {
            "spectacles" => ov.with_spectacles(&coder.spectacles),
            "bigon" if t.r.is_some() => {
                ov.with_bigon(&bigon_edges(&coder.frames, &EdgeFrame::BASE, 3).map_err(err)?, &coder.frames.tri)
            }
            "bigon" => ov,
            "kneading" => {
                let path = coder
                    .forward_from(&Isometry::IDENTITY, VertexKind::A, coder.spectacles.xi, 12)
                    .map_err(err)?;
                ov.with_path(&path, &coder.frames.tri)
            }
            other => return Err(JsError::new(&format!("unknown overlay `{other}`"))),
        };
    }
    Ok(render_scene(Some(&ball), &ov))
}

/// The axis of the orbit coded by `word`, its tango path, and the admissible
/// path that re-codes it.
#[wasm_bindgen]
pub fn render_orbit(p: u32, q: u32, r: &str, depth: usize, word: &str) -> Result<String, JsError> {
    let t = params(p, q, r)?;
    let coder = Coder::new(&t).map_err(err)?;
    let ball = expand(&t, depth.min(MAX_DEPTH)).map_err(err)?;
    let w: CyclicWord = relabel(&word.parse::<CyclicWord>().map_err(err)?, &t.swaps);
    w.check_exponents(t.p, t.q).map_err(err)?;
    let orbit = make_orbit(&coder.frames, w.clone(), &Tolerances::DEFAULT).map_err(err)?;
    let bi = coder
        .biinfinite_path(orbit.repelling(), orbit.attracting(), Some(&orbit.holonomy))
        .map_err(err)?;
    let ov = Overlays::default()
        .with_geodesic(orbit.repelling(), orbit.attracting())
        .with_path(&bi.window, &coder.frames.tri)
        .with_tango(&tango_word(&coder.frames, &w).map_err(err)?, &coder.frames);
    Ok(render_scene(Some(&ball), &ov))
}

/// Orbit list as JSON, as written by the command-line tool.
#[wasm_bindgen]
pub fn list_orbits(p: u32, q: u32, r: &str, max_blocks: usize) -> Result<String, JsError> {
    let t = params(p, q, r)?;
    let coder = Coder::new(&t).map_err(err)?;
    let k = geometric_kneading_frames(&coder.frames).map_err(err)?;
    let orbits = enumerate_orbits_with(&coder, &k, max_blocks.clamp(2, 8), &Tolerances::DEFAULT).map_err(err)?;
    Ok(orbits_json(&t, max_blocks, &orbits).to_string())
}
