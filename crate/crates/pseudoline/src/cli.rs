//! The `arr` command line tool: generation, conversion, statistics, the
//! long-path pipeline, brute-force search, reachability, Monte Carlo
//! experiments, rendering, and path verification.
//!
//! Exit codes: 0 success, 2 validation error, 3 audit failure,
//! 4 incomplete brute-force search.

use crate::bicolored::{
    build_directed_dual, depth_map, monte_carlo, reach, stats_to_csv, Coloring,
};
use crate::dual::DualGraph;
use crate::error::Error;
use crate::geom::{gen_polygon_extension, gen_theorem2, lines_to_wiring, LineSet};
use crate::longpath::{glue, initial_family, run_pipeline};
use crate::oracle::{longest_alternating, longest_path, SearchBudget, SearchOutcome};
use crate::path::{verify_path, DualPath};
use crate::plane::PlaneGraph;
use crate::render::{render, RenderMode, RenderSpec};
use crate::tunnel::TunnelDecomposition;
use crate::wiring::{gen_random_wiring, LineColor, WiringDiagram};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "arr", about = "Pseudoline arrangements and long dual paths", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate named instances as wiring diagrams.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Convert a line set file (slope/intercept rows) to a wiring diagram.
    FromLines {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print counting statistics of an arrangement.
    Stats {
        file: PathBuf,
        #[arg(long, default_value = "text")]
        format: OutputFormat,
    },
    /// Run the long-path construction and print the path.
    Longpath {
        file: PathBuf,
        /// Re-verify all charge audits (they also run by default; this
        /// flag additionally prints the audit summary).
        #[arg(long)]
        audit: bool,
        /// Glue only this subset of the initial tunnel paths, e.g. 1,3.
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
        /// Also write an SVG with the path overlaid.
        #[arg(long)]
        emit_svg: Option<PathBuf>,
    },
    /// Exhaustive longest (alternating) dual path search.
    Brute {
        file: PathBuf,
        #[arg(long)]
        alternating: bool,
        /// Pseudoline colors, e.g. RBRB (bottom wire first).
        #[arg(long)]
        coloring: Option<String>,
        #[arg(long, default_value_t = 100_000_000)]
        node_limit: u64,
        /// Time limit in seconds.
        #[arg(long, default_value_t = 300)]
        time_limit: u64,
    },
    /// Faces reachable by alternating paths from a face.
    Reach {
        file: PathBuf,
        #[arg(long)]
        coloring: String,
        #[arg(long)]
        from: usize,
    },
    /// Monte Carlo over uniformly random colorings.
    RandomColoring {
        file: PathBuf,
        #[arg(long)]
        w: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value = "text")]
        format: OutputFormat,
    },
    /// Render a diagram to SVG.
    Render {
        file: PathBuf,
        #[command(flatten)]
        spec: RenderArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify a path file against an arrangement.
    VerifyPath {
        file: PathBuf,
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        coloring: Option<String>,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Extension of the sides of a regular k-gon (k odd).
    Polygon {
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The bicolored extremal instance: 3k red, 2k blue lines (k odd).
    Thm2 {
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Uniformly random full wiring diagram.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long, default_value = "wiring")]
    mode: String,
    #[arg(long)]
    w: Option<usize>,
    #[arg(long, default_value_t = 800)]
    width: u32,
    #[arg(long, default_value_t = 400)]
    height: u32,
    /// Overlay a path file.
    #[arg(long)]
    path: Option<PathBuf>,
    #[arg(long)]
    coloring: Option<String>,
    /// Accept partial diagrams (renderer only).
    #[arg(long)]
    permissive: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::AuditFailure { .. } => 3,
        Error::InternalInvariant(_) => 3,
        _ => 2,
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn read_diagram(file: &PathBuf) -> crate::Result<(WiringDiagram, Option<Vec<LineColor>>)> {
    let text = std::fs::read_to_string(file)?;
    WiringDiagram::parse(&text)
}

fn emit(output: &Option<PathBuf>, content: &str) -> crate::Result<()> {
    match output {
        Some(path) => std::fs::write(path, content)?,
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> crate::Result<i32> {
    match cli.command {
        Command::Gen { what } => {
            let (text, output) = match what {
                GenCommand::Polygon { k, output } => {
                    let p = gen_polygon_extension(k)?;
                    let (d, _, _) = p.to_wiring()?;
                    (d.to_text(None), output)
                }
                GenCommand::Thm2 { k, output } => {
                    let inst = gen_theorem2(k)?;
                    let (d, colors, _, _) = inst.to_wiring()?;
                    (d.to_text(Some(&colors)), output)
                }
                GenCommand::Random { n, seed, output } => {
                    (gen_random_wiring(n, seed).to_text(None), output)
                }
            };
            emit(&output, &text)?;
            Ok(0)
        }
        Command::FromLines { file, output } => {
            let ls = LineSet::parse(&std::fs::read_to_string(&file)?)?;
            let (d, colors) = lines_to_wiring(&ls)?;
            emit(&output, &d.to_text(colors.as_deref()))?;
            Ok(0)
        }
        Command::Stats { file, format } => {
            let (d, _) = read_diagram(&file)?;
            let g = PlaneGraph::build(&d)?;
            let dm = depth_map(&g);
            match format {
                OutputFormat::Text => {
                    println!(
                        "V={} E={} F={} U={}",
                        g.vertices.len(),
                        g.edges.len(),
                        g.faces.len(),
                        g.unbounded_faces().count()
                    );
                    println!("maxdepth={}", dm.max_depth());
                }
                OutputFormat::Json => {
                    let json = serde_json::json!({
                        "vertices": g.vertices.len(),
                        "edges": g.edges.len(),
                        "faces": g.faces.len(),
                        "unbounded": g.unbounded_faces().count(),
                        "max_depth": dm.max_depth(),
                    });
                    println!("{}", serde_json::to_string_pretty(&json)?);
                }
            }
            Ok(0)
        }
        Command::Longpath {
            file,
            audit,
            subset,
            emit_svg,
        } => {
            let (d, colors) = read_diagram(&file)?;
            let g = PlaneGraph::build(&d)?;
            let path = match &subset {
                Some(indices) => {
                    let td = TunnelDecomposition::with_offset(&g, 2, 1)?;
                    let fam = initial_family(&g, &td)?;
                    glue(&g, &fam, Some(indices))?
                }
                None => {
                    let result = run_pipeline(&g)?;
                    if audit {
                        eprintln!(
                            "audits passed: {} events, {} reroutings, |T*| = {}",
                            result.ledger.events.len(),
                            result.ledger.insertions.len(),
                            result.traversed_bounded
                        );
                    }
                    result.final_path
                }
            };
            print!("{}", path.to_text());
            if let Some(svg_path) = emit_svg {
                let spec = RenderSpec {
                    overlay: Some(path),
                    colors: colors.clone(),
                    ..Default::default()
                };
                std::fs::write(svg_path, render(&d, &g, &spec)?)?;
            }
            Ok(0)
        }
        Command::Brute {
            file,
            alternating,
            coloring,
            node_limit,
            time_limit,
        } => {
            let (d, file_colors) = read_diagram(&file)?;
            let g = PlaneGraph::build(&d)?;
            let budget = SearchBudget {
                node_limit,
                time_limit: Duration::from_secs(time_limit),
                ..Default::default()
            };
            let outcome = if alternating {
                let colors = match (coloring, file_colors) {
                    (Some(s), _) => Coloring::parse(&s)?,
                    (None, Some(cs)) => Coloring::new(cs)?,
                    (None, None) => {
                        return Err(Error::BadParameter(
                            "--alternating needs --coloring or a colors trailer".into(),
                        ))
                    }
                };
                let dd = build_directed_dual(&g, &colors)?;
                longest_alternating(&g, &dd, &colors, &budget, None)?
            } else {
                let dg = DualGraph::build(&g);
                longest_path(&g, &dg, &budget)
            };
            match &outcome {
                SearchOutcome::Exact { length, witness } => {
                    println!("# exact longest = {length}");
                    print!("{}", witness.to_text());
                    Ok(0)
                }
                SearchOutcome::Incomplete { best, witness, nodes } => {
                    println!("# incomplete after {nodes} nodes; best found = {best}");
                    print!("{}", witness.to_text());
                    Ok(4)
                }
            }
        }
        Command::Reach { file, coloring, from } => {
            let (d, _) = read_diagram(&file)?;
            let g = PlaneGraph::build(&d)?;
            let colors = Coloring::parse(&coloring)?;
            let dd = build_directed_dual(&g, &colors)?;
            let set = reach(&dd, from)?;
            println!("reach {}", set.len());
            for f in set {
                println!("{f}");
            }
            Ok(0)
        }
        Command::RandomColoring {
            file,
            w,
            trials,
            seed,
            csv,
            format,
        } => {
            let (d, _) = read_diagram(&file)?;
            let g = PlaneGraph::build(&d)?;
            let stats = monte_carlo(&g, w, trials, seed)?;
            if let Some(path) = csv {
                std::fs::write(path, stats_to_csv(&stats))?;
            }
            match format {
                OutputFormat::Text => {
                    println!(
                        "trials={} w={} seed={} success_rate={:.4} blocked_rate={:.4} mean_length={:.2} p10={} p50={} p90={}",
                        stats.trials,
                        stats.w,
                        stats.seed,
                        stats.success_rate,
                        stats.blocked_rate,
                        stats.mean_length,
                        stats.length_percentiles[0],
                        stats.length_percentiles[1],
                        stats.length_percentiles[2],
                    );
                }
                OutputFormat::Json => {
                    let json = serde_json::json!({
                        "trials": stats.trials,
                        "w": stats.w,
                        "seed": stats.seed,
                        "success_rate": stats.success_rate,
                        "blocked_rate": stats.blocked_rate,
                        "mean_length": stats.mean_length,
                        "rows": stats.rows,
                    });
                    println!("{}", serde_json::to_string_pretty(&json)?);
                }
            }
            Ok(0)
        }
        Command::Render { file, spec, output } => {
            let text = std::fs::read_to_string(&file)?;
            let (d, file_colors) = WiringDiagram::parse(&text)?;
            let g = if spec.permissive {
                PlaneGraph::build_permissive(&d)?
            } else {
                PlaneGraph::build(&d)?
            };
            let mode = match spec.mode.as_str() {
                "wiring" => RenderMode::Wiring,
                "tunnel" => RenderMode::Tunnel,
                other => {
                    return Err(Error::BadParameter(format!(
                        "render mode {other:?} (use wiring or tunnel)"
                    )))
                }
            };
            let overlay = match &spec.path {
                Some(p) => Some(DualPath::parse(&std::fs::read_to_string(p)?)?),
                None => None,
            };
            let colors = match &spec.coloring {
                Some(s) => Some(Coloring::parse(s)?.0),
                None => file_colors,
            };
            let rendered = render(
                &d,
                &g,
                &RenderSpec {
                    mode,
                    width: spec.width,
                    height: spec.height,
                    tunnel_width: spec.w,
                    overlay,
                    colors,
                },
            )?;
            emit(&output, &rendered)?;
            Ok(0)
        }
        Command::VerifyPath { file, path, coloring } => {
            let (d, file_colors) = read_diagram(&file)?;
            let g = PlaneGraph::build(&d)?;
            let p = DualPath::parse(&std::fs::read_to_string(&path)?)?;
            let colors = match coloring {
                Some(s) => Some(Coloring::parse(&s)?.0),
                None => file_colors,
            };
            let violations = verify_path(&g, &p, colors.as_deref());
            if violations.is_empty() {
                println!("ok: path of length {}", p.len());
                Ok(0)
            } else {
                for v in &violations {
                    println!("violation: {v}");
                }
                Ok(2)
            }
        }
    }
}
