use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tworibbon_cli::{
    cmd_code, cmd_graph, cmd_h1, cmd_knead, cmd_orbits, cmd_render, cmd_verify, parse_order, CmdResult, CodeTarget,
    Config, Format, Overlay, RenderRequest, EXIT_USAGE,
};

/// Two-letter coding of geodesics on hyperbolic (p, q, r) triangle orbifolds.
#[derive(Parser)]
#[command(name = "tworibbon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    p: u32,
    q: u32,
    /// Third cone order, or `inf` for a cusp.
    #[arg(value_parser = |s: &str| parse_order(s).map(Order))]
    r: Order,
    #[arg(long, default_value_t = 5)]
    depth: usize,
    #[arg(long, default_value_t = 6)]
    max_blocks: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write to this file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy)]
struct Order(Option<u32>);

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and geometric kneading sequences.
    Knead(Common),
    /// Periodic orbits as admissible cyclic words.
    Orbits(Common),
    /// Bi-infinite admissible path between two boundary points.
    Code {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true, requires = "xi", conflicts_with = "word")]
        eta: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires = "eta")]
        xi: Option<f64>,
        /// Use the axis of this cyclic word, e.g. "<a^2 b^3>".
        #[arg(long)]
        word: Option<String>,
    },
    /// First homology of the surgered unit tangent bundle.
    H1(Common),
    /// SVG picture of a graph ball.
    Render {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = |s: &str| s.parse::<Overlay>())]
        overlay: Vec<Overlay>,
        #[arg(long)]
        word: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<f64>,
    },
    /// All desk-scale checks for one triangle.
    Verify(Common),
    /// Graph ball as JSON.
    Graph(Common),
}

fn config(c: &Common) -> Config {
    let mut cfg = Config::new(c.p, c.q, c.r.0);
    cfg.depth = c.depth;
    cfg.max_blocks = c.max_blocks;
    cfg.seed = c.seed;
    cfg.format = c.format.map(|f| match f {
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
        FormatArg::Svg => Format::Svg,
    });
    cfg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result): (&Common, CmdResult) = match &cli.command {
        Command::Knead(c) => (c, cmd_knead(&config(c))),
        Command::Orbits(c) => (c, cmd_orbits(&config(c))),
        Command::H1(c) => (c, cmd_h1(&config(c))),
        Command::Verify(c) => (c, cmd_verify(&config(c))),
        Command::Graph(c) => (c, cmd_graph(&config(c))),
        Command::Code { common, eta, xi, word } => {
            let target = match (eta, xi, word) {
                (_, _, Some(w)) => CodeTarget::Word(w.clone()),
                (Some(eta), Some(xi), None) => CodeTarget::Angles { eta: *eta, xi: *xi },
                _ => {
                    eprintln!("error: give either --eta and --xi, or --word");
                    return ExitCode::from(EXIT_USAGE as u8);
                }
            };
            (common, cmd_code(&config(common), &target))
        }
        Command::Render { common, overlay, word, xi } => {
            let req = RenderRequest {
                overlays: overlay.clone(),
                word: word.clone(),
                xi: *xi,
            };
            (common, cmd_render(&config(common), &req))
        }
    };
    match result {
        Ok(out) => {
            if let Some(path) = &common.output {
                if let Err(e) = std::fs::write(path, &out.text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(EXIT_USAGE as u8);
                }
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
