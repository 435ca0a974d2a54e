//! Commands behind the `tworibbon` binary. Each returns its output text and
//! an exit code, so the binary only parses flags and prints.

use std::fmt::Write as _;

use serde_json::{json, Value};
use tworibbon::coding::{bigon_edges, geometric_kneading_frames, Coder, EdgeFrame};
use tworibbon::export::{bipath_json, graph_json, h1_json, orbits_json, params_json, SCHEMA};
use tworibbon::geom::{BoundaryPoint, Isometry};
use tworibbon::group_graph::{canonicalize, expand, TriangleParams, VertexKind};
use tworibbon::orbits::{enumerate_orbits_with, make_orbit, tango_word, PeriodicOrbit};
use tworibbon::render::{render_scene, Overlays};
use tworibbon::suite::{run_suite, SuiteConfig};
use tworibbon::topology::surgery_presentation;
use tworibbon::words::{relabel, table1_kneading, CyclicWord, Relabel};
use tworibbon::{Error, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
    Svg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub p: u32,
    pub q: u32,
    pub r: Option<u32>,
    pub depth: usize,
    pub max_blocks: usize,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub format: Option<Format>,
}

impl Config {
    pub fn new(p: u32, q: u32, r: Option<u32>) -> Config {
        Config {
            p,
            q,
            r,
            depth: 5,
            max_blocks: 6,
            tolerances: Tolerances::DEFAULT,
            seed: 0,
            format: None,
        }
    }

    pub fn params(&self) -> Result<TriangleParams, CmdError> {
        Ok(canonicalize(self.p, self.q, self.r)?)
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(text: String) -> Output {
        Output { text, code: EXIT_OK }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CmdError {
    Usage(String),
    Failed(String),
}

impl CmdError {
    pub fn code(&self) -> i32 {
        match self {
            CmdError::Usage(_) => EXIT_USAGE,
            CmdError::Failed(_) => EXIT_FAILED,
        }
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Usage(m) | CmdError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonHyperbolic { .. }
            | Error::InvalidParameter(_)
            | Error::Parse(_)
            | Error::EndpointsEqual
            | Error::ExponentOutOfRange { .. } => CmdError::Usage(e.to_string()),
            _ => CmdError::Failed(e.to_string()),
        }
    }
}

pub type CmdResult = Result<Output, CmdError>;

/// Parses a cone order; `inf` means a cusp.
pub fn parse_order(s: &str) -> Result<Option<u32>, String> {
    match s {
        "inf" | "infinity" | "∞" => Ok(None),
        _ => s
            .parse::<u32>()
            .map(Some)
            .map_err(|_| format!("expected a positive integer or `inf`, got `{s}`")),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn parse_word(s: &str, params: &TriangleParams) -> Result<CyclicWord, CmdError> {
    let w: CyclicWord = s.parse()?;
    let w = relabel(&w, &params.swaps);
    w.check_exponents(params.p, params.q)?;
    Ok(w)
}

/// Closed-form and geometric kneading data with an equality verdict.
pub fn cmd_knead(cfg: &Config) -> CmdResult {
    let params = cfg.params()?;
    let coder = Coder::new(&params)?;
    let closed = table1_kneading(&params)?;
    let geo = geometric_kneading_frames(&coder.frames)?;
    let same = closed == geo;
    let verdict = if same { "MATCH" } else { "MISMATCH" };
    let rows = |k: &tworibbon::words::KneadingSet| {
        [
            ("u_L", k.u_l.relabel(&params.swaps).to_string()),
            ("u_R", k.u_r.relabel(&params.swaps).to_string()),
            ("v_L", k.v_l.relabel(&params.swaps).to_string()),
            ("v_R", k.v_r.relabel(&params.swaps).to_string()),
        ]
    };
    let text = match cfg.format_or(Format::Text) {
        Format::Json => pretty(&json!({
            "schema": SCHEMA,
            "params": params_json(&params),
            "closed_form": rows(&closed).iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
            "geometric": rows(&geo).iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
            "verdict": verdict,
        })),
        _ => {
            let mut s = format!("triangle {params}\n");
            for ((name, c), (_, g)) in rows(&closed).iter().zip(rows(&geo).iter()) {
                let _ = writeln!(s, "{name} = {c}");
                if c != g {
                    let _ = writeln!(s, "{name} (geometric) = {g}");
                }
            }
            let _ = writeln!(s, "verdict {verdict}");
            s
        }
    };
    Ok(Output {
        text,
        code: if same { EXIT_OK } else { EXIT_FAILED },
    })
}

fn orbits(cfg: &Config, params: &TriangleParams) -> Result<(Coder, Vec<PeriodicOrbit>), CmdError> {
    if cfg.max_blocks < 2 {
        return Err(CmdError::Usage("max_blocks must be at least 2".into()));
    }
    let coder = Coder::new(params)?;
    let k = geometric_kneading_frames(&coder.frames)?;
    let list = enumerate_orbits_with(&coder, &k, cfg.max_blocks, &cfg.tolerances)?;
    Ok((coder, list))
}

/// Periodic orbits with at most `max_blocks` blocks.
pub fn cmd_orbits(cfg: &Config) -> CmdResult {
    let params = cfg.params()?;
    let (_, list) = orbits(cfg, &params)?;
    let text = match cfg.format_or(Format::Json) {
        Format::Text => {
            let mut s = String::new();
            for o in &list {
                let _ = write!(s, "{} trace {:.6}", o.word.relabel(&params.swaps), o.trace());
                if let Some(w) = &o.secondary {
                    let _ = write!(s, " exceptional with {}", w.relabel(&params.swaps));
                }
                s.push('\n');
            }
            s
        }
        _ => pretty(&orbits_json(&params, cfg.max_blocks, &list)),
    };
    Ok(Output::ok(text))
}

/// Where the bi-infinite path should run.
#[derive(Debug, Clone, PartialEq)]
pub enum CodeTarget {
    /// Endpoint angles in radians.
    Angles { eta: f64, xi: f64 },
    /// The axis of the orbit coded by a cyclic word.
    Word(String),
}

/// Bi-infinite admissible path between two boundary points. When they are
/// the axis of an enumerated orbit, its periodic code is certified.
pub fn cmd_code(cfg: &Config, target: &CodeTarget) -> CmdResult {
    let params = cfg.params()?;
    let coder = Coder::new(&params)?;
    let (eta, xi, g) = match target {
        CodeTarget::Word(s) => {
            let w = parse_word(s, &params)?;
            let o = make_orbit(&coder.frames, w, &cfg.tolerances)?;
            (o.repelling(), o.attracting(), Some(o.holonomy))
        }
        CodeTarget::Angles { eta, xi } => {
            let (eta, xi) = (BoundaryPoint::new(*eta), BoundaryPoint::new(*xi));
            if eta.angular_dist(xi) < 1e-12 {
                return Err(Error::EndpointsEqual.into());
            }
            let g = orbits(cfg, &params)?.1.into_iter().find_map(|o| {
                (o.repelling().angular_dist(eta) < 1e-9 && o.attracting().angular_dist(xi) < 1e-9).then_some(o.holonomy)
            });
            (eta, xi, g)
        }
    };
    let bi = coder.biinfinite_path(eta, xi, g.as_ref())?;
    let ball = expand(&params, cfg.depth)?;
    let v = bipath_json(&ball, &bi);
    Ok(Output::ok(match cfg.format_or(Format::Json) {
        Format::Text => format!(
            "window {}\ncertificate {}\n",
            v["code"].as_str().unwrap_or_default(),
            v["certificate"].as_str().unwrap_or("none")
        ),
        _ => pretty(&v),
    }))
}

/// First homology of the surgered manifold.
pub fn cmd_h1(cfg: &Config) -> CmdResult {
    let params = cfg.params()?;
    let v = h1_json(&params, &surgery_presentation(&params));
    Ok(Output::ok(match cfg.format_or(Format::Json) {
        Format::Text => format!("H1 = {}\n", v["group"].as_str().unwrap_or_default()),
        _ => pretty(&v),
    }))
}

/// Graph ball as JSON.
pub fn cmd_graph(cfg: &Config) -> CmdResult {
    let params = cfg.params()?;
    let ball = expand(&params, cfg.depth)?;
    Ok(Output::ok(pretty(&graph_json(&ball))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overlay {
    Spectacles,
    Bigon,
    Path,
    Tango,
    Geodesic,
}

impl std::str::FromStr for Overlay {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "spectacles" => Overlay::Spectacles,
            "bigon" => Overlay::Bigon,
            "path" => Overlay::Path,
            "tango" => Overlay::Tango,
            "geodesic" => Overlay::Geodesic,
            _ => return Err(format!("unknown overlay `{s}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderRequest {
    pub overlays: Vec<Overlay>,
    /// Word for the tango and geodesic overlays; the first enumerated orbit
    /// by default.
    pub word: Option<String>,
    /// Target of the path overlay; the normal extremity of the base edge by
    /// default.
    pub xi: Option<f64>,
}

/// SVG of the graph ball with the requested overlays.
pub fn cmd_render(cfg: &Config, req: &RenderRequest) -> CmdResult {
    let params = cfg.params()?;
    let coder = Coder::new(&params)?;
    let ball = expand(&params, cfg.depth)?;
    let frames = &coder.frames;
    let word = match &req.word {
        Some(s) => parse_word(s, &params)?,
        None if req.overlays.iter().any(|o| matches!(o, Overlay::Tango | Overlay::Geodesic)) => orbits(cfg, &params)?
            .1
            .into_iter()
            .next()
            .map(|o| o.word)
            .ok_or_else(|| CmdError::Usage("no orbit within max_blocks; pass --word".into()))?,
        None => "<a b>".parse()?,
    };
    let mut ov = Overlays::default();
    for o in &req.overlays {
        ov = match o {
            Overlay::Spectacles => ov.with_spectacles(&coder.spectacles),
            Overlay::Bigon => {
                if params.r.is_none() {
                    return Err(Error::InfiniteFace.into());
                }
                ov.with_bigon(&bigon_edges(frames, &EdgeFrame::BASE, 3)?, &frames.tri)
            }
            Overlay::Path => {
                let xi = req.xi.map_or(coder.spectacles.xi, BoundaryPoint::new);
                let path = coder.forward_from(&Isometry::IDENTITY, VertexKind::A, xi, 2 * cfg.depth.max(1))?;
                ov.with_path(&path, &frames.tri)
            }
            Overlay::Tango => ov.with_tango(&tango_word(frames, &word)?, frames),
            Overlay::Geodesic => {
                let orbit = make_orbit(frames, word.clone(), &cfg.tolerances)?;
                ov.with_geodesic(orbit.repelling(), orbit.attracting())
            }
        };
    }
    Ok(Output::ok(render_scene(Some(&ball), &ov)))
}

/// Runs every desk-scale check for one triangle.
pub fn cmd_verify(cfg: &Config) -> CmdResult {
    let params = cfg.params()?;
    let suite = SuiteConfig {
        seed: cfg.seed,
        max_blocks: cfg.max_blocks,
        ..SuiteConfig::default()
    };
    let checks = run_suite(&params, &suite);
    let all = checks.iter().all(|c| c.passed);
    let text = match cfg.format_or(Format::Text) {
        Format::Json => pretty(&json!({
            "schema": SCHEMA,
            "params": params_json(&params),
            "checks": checks,
            "passed": all,
        })),
        _ => {
            let mut s = String::new();
            for c in &checks {
                let _ = writeln!(s, "{c}");
            }
            s
        }
    };
    Ok(Output {
        text,
        code: if all { EXIT_OK } else { EXIT_FAILED },
    })
}
