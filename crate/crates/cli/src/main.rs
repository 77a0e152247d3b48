//! Command-line driver: homology tables, long exact sequences, T-homotopy
//! checks, PV grid building, and the brute-force oracle.
//!
//! Exit codes: 0 success, 1 parse or validation failure, 2 verification
//! failure (oracle mismatch, inexact sequence, or a failed T-check).

use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use dihom::germs::{
    branching_homology, check_t_homotopy, germ_pi0_total, les_report, merging_homology,
    oracle_compare, BranchingHomology, Side,
};
use dihom::ingest::{self, parse_flow, parse_forbidden, parse_morphism, pv_grid, serialize_flow};
use dihom::{FlowMorphism, FlowPresentation};

mod report;
use report::*;

#[derive(Parser)]
#[command(name = "dihom", version, about = "Branching and merging homology of flows")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Subcommand)]
enum Cmd {
    /// Branching (or merging) homology of a flow
    Homology {
        /// Flow file; or use --builtin
        file: Option<PathBuf>,
        /// Builtin flow name (dirseg, seg2, branch1, branch2, swiss)
        #[arg(long)]
        builtin: Option<String>,
        /// Compute merging homology instead of branching
        #[arg(long)]
        merging: bool,
        /// Report degrees up to this bound (lowers the derived bound only)
        #[arg(long)]
        max_dim: Option<usize>,
        /// Include the per-state germ table
        #[arg(long)]
        per_state: bool,
    },
    /// Long exact sequence of a morphism's cone, with exactness verdicts
    Les {
        /// Source flow file
        x: Option<PathBuf>,
        /// Target flow file
        y: Option<PathBuf>,
        /// Morphism file (with X and Y)
        #[arg(long)]
        map: Option<PathBuf>,
        /// Builtin morphism (phi), or with --identity a builtin flow
        #[arg(long)]
        builtin: Option<String>,
        /// Use the identity morphism of the given flow
        #[arg(long)]
        identity: bool,
        /// Top degree of the reported sequence (lowers the bound only)
        #[arg(long)]
        max_dim: Option<usize>,
    },
    /// Check the three conditions of a T-homotopy equivalence
    CheckT {
        x: Option<PathBuf>,
        y: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long)]
        identity: bool,
    },
    /// Build a PV grid flow from a forbidden-cell set
    Pv {
        /// Grid size, e.g. 5x5
        #[arg(long)]
        grid: String,
        /// Forbidden cells: `plus` or `(i,j),(k,l),...`
        #[arg(long, default_value = "")]
        forbidden: String,
        /// Write the flow file here instead of printing counts only
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare germ-reduction homology against the brute-force coequalizer
    Oracle {
        file: Option<PathBuf>,
        #[arg(long)]
        builtin: Option<String>,
        /// Word-dimension cap for the brute force (default: derived bound)
        #[arg(long)]
        max_dim: Option<usize>,
    },
}

enum Failure {
    /// Parse or validation problem: exit 1.
    Input(String),
    /// Verification failure (oracle, exactness, T-check): exit 2.
    Verification(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let machine = cli.format == Format::Machine;
    match run(cli) {
        Ok(report) => {
            emit(&report, machine);
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Write the report, tolerating a closed pipe.
fn emit(report: &Report, machine: bool) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = if machine {
        writeln!(out, "{}", serde_json::to_string_pretty(report).unwrap())
    } else {
        write!(out, "{report}")
    };
}

fn read_flow(path: &Path) -> Result<FlowPresentation, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_flow(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_flow(file: &Option<PathBuf>, builtin: &Option<String>) -> Result<FlowPresentation, Failure> {
    match (file, builtin) {
        (Some(path), None) => read_flow(path),
        (None, Some(name)) => match ingest::builtin(name) {
            Ok(ingest::Builtin::Flow(p)) => Ok(p),
            Ok(ingest::Builtin::Morphism(_)) => {
                Err(Failure::Input(format!("builtin '{name}' is a morphism, not a flow")))
            }
            Err(e) => Err(Failure::Input(e.to_string())),
        },
        _ => Err(Failure::Input("give a flow file or --builtin, not both".into())),
    }
}

fn load_morphism(
    x: &Option<PathBuf>,
    y: &Option<PathBuf>,
    map: &Option<PathBuf>,
    builtin: &Option<String>,
    identity: bool,
) -> Result<FlowMorphism, Failure> {
    if identity {
        let p = load_flow(x, builtin)?;
        return Ok(FlowMorphism::identity(&p));
    }
    if let Some(name) = builtin {
        return match ingest::builtin(name) {
            Ok(ingest::Builtin::Morphism(f)) => Ok(f),
            Ok(ingest::Builtin::Flow(_)) => Err(Failure::Input(format!(
                "builtin '{name}' is a flow; pass --identity to use its identity morphism"
            ))),
            Err(e) => Err(Failure::Input(e.to_string())),
        };
    }
    let (Some(x), Some(y), Some(map)) = (x, y, map) else {
        return Err(Failure::Input(
            "give two flow files and --map, or --builtin phi, or --identity".into(),
        ));
    };
    let px = read_flow(x)?;
    let py = read_flow(y)?;
    let text = std::fs::read_to_string(map)
        .map_err(|e| Failure::Input(format!("{}: {e}", map.display())))?;
    parse_morphism(&text, &px, &py).map_err(|e| Failure::Input(format!("{}: {e}", map.display())))
}

fn homology_rows(h: &BranchingHomology, top: usize) -> Vec<GroupRow> {
    (0..=top).map(|n| GroupRow::new(n, &h.group(n))).collect()
}

fn run(cli: Cli) -> Result<Report, Failure> {
    match cli.cmd {
        Cmd::Homology { file, builtin, merging, max_dim, per_state } => {
            let start = Instant::now();
            let p = load_flow(&file, &builtin)?;
            let h = if merging {
                merging_homology(&p)
            } else {
                branching_homology(&p)
            }
            .map_err(|e| Failure::Input(e.to_string()))?;
            let natural_top = h.top_degree();
            let top = max_dim.map_or(natural_top, |m| m.min(natural_top));
            let per_state_rows = per_state.then(|| {
                h.per_state
                    .iter()
                    .map(|s| StateRow {
                        state: s.state.clone(),
                        components: s.components,
                        reduced: s
                            .reduced
                            .iter()
                            .enumerate()
                            .map(|(n, g)| GroupRow::new(n, g))
                            .collect(),
                    })
                    .collect()
            });
            Ok(Report::Homology {
                flow: p.name().to_string(),
                states: p.state_count(),
                cells: cell_counts(&p),
                side: if merging { "merging" } else { "branching" }.into(),
                groups: homology_rows(&h, top),
                per_state: per_state_rows,
                elapsed_ms: start.elapsed().as_millis(),
            })
        }
        Cmd::Les { x, y, map, builtin, identity, max_dim } => {
            let start = Instant::now();
            let f = load_morphism(&x, &y, &map, &builtin, identity)?;
            let report =
                les_report(&f, max_dim).map_err(|e| Failure::Input(e.to_string()))?;
            let rows: Vec<LesRow> = (0..report.cone_groups.len())
                .rev()
                .map(|n| LesRow {
                    degree: n,
                    x: report.x_groups[n].to_string(),
                    y: report.y_groups[n].to_string(),
                    cone: report.cone_groups[n].to_string(),
                    branching_degree: if n >= 1 { Some(n + 1) } else { None },
                })
                .collect();
            let nodes: Vec<NodeRow> = report
                .nodes
                .iter()
                .map(|n| NodeRow {
                    label: n.label.clone(),
                    exact: n.exact,
                    witness: n.witness.clone(),
                })
                .collect();
            let out = Report::Les {
                morphism: f.name.clone(),
                x: f.x.name().to_string(),
                y: f.y.name().to_string(),
                rows,
                nodes,
                exact: report.exact,
                elapsed_ms: start.elapsed().as_millis(),
            };
            if !report.exact {
                print_and_fail(&out, cli.format == Format::Machine)?;
            }
            Ok(out)
        }
        Cmd::CheckT { x, y, map, builtin, identity } => {
            let f = load_morphism(&x, &y, &map, &builtin, identity)?;
            let t = check_t_homotopy(&f).map_err(|e| Failure::Input(e.to_string()))?;
            let conditions = vec![
                ConditionRow::new("restriction isomorphism", &t.restriction_iso),
                ConditionRow::new("singleton germs at new states", &t.singleton_germs),
                ConditionRow::new("new states surrounded by the image", &t.surrounded),
            ];
            let tables = if t.pass() {
                let hx = branching_homology(&f.x).map_err(|e| Failure::Input(e.to_string()))?;
                let hy = branching_homology(&f.y).map_err(|e| Failure::Input(e.to_string()))?;
                let mx = merging_homology(&f.x).map_err(|e| Failure::Input(e.to_string()))?;
                let my = merging_homology(&f.y).map_err(|e| Failure::Input(e.to_string()))?;
                let top = hx.top_degree().max(hy.top_degree());
                Some(SideBySide {
                    x: f.x.name().to_string(),
                    y: f.y.name().to_string(),
                    branching_x: homology_rows(&hx, top),
                    branching_y: homology_rows(&hy, top),
                    merging_x: homology_rows(&mx, top),
                    merging_y: homology_rows(&my, top),
                    pi0_x: germ_pi0_total(&f.x, Side::Branching)
                        .map_err(|e| Failure::Input(e.to_string()))?,
                    pi0_y: germ_pi0_total(&f.y, Side::Branching)
                        .map_err(|e| Failure::Input(e.to_string()))?,
                })
            } else {
                None
            };
            let out = Report::CheckT { morphism: f.name.clone(), pass: t.pass(), conditions, tables };
            if !t.pass() {
                print_and_fail(&out, cli.format == Format::Machine)?;
            }
            Ok(out)
        }
        Cmd::Pv { grid, forbidden, out } => {
            let (w, h) = parse_grid(&grid)?;
            let cells =
                parse_forbidden(&forbidden).map_err(|e| Failure::Input(e.to_string()))?;
            let p = pv_grid(w, h, &cells).map_err(|e| Failure::Input(e.to_string()))?;
            let written = match out {
                Some(path) => {
                    std::fs::write(&path, serialize_flow(&p))
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    Some(path.display().to_string())
                }
                None => None,
            };
            let counts = cell_counts(&p);
            Ok(Report::Pv {
                states: p.state_count(),
                edges: counts.first().copied().unwrap_or(0),
                squares: counts.get(1).copied().unwrap_or(0),
                written,
            })
        }
        Cmd::Oracle { file, builtin, max_dim } => {
            let start = Instant::now();
            let p = load_flow(&file, &builtin)?;
            let maxdim = max_dim
                .map_or(p.default_dim_cap(), |m| m.min(p.default_dim_cap()))
                .max(p.max_generator_dim())
                .max(1);
            let top = maxdim.saturating_sub(1);
            let result = oracle_compare(&p, maxdim, top);
            let out = Report::Oracle {
                flow: p.name().to_string(),
                max_dim: maxdim,
                degrees_checked: top,
                states: p.state_count(),
                agree: result.is_ok(),
                mismatch: result.as_ref().err().map(|e| e.to_string()),
                elapsed_ms: start.elapsed().as_millis(),
            };
            if result.is_err() {
                print_and_fail(&out, cli.format == Format::Machine)?;
            }
            Ok(out)
        }
    }
}

/// Print the report, then signal a verification failure (exit 2).
fn print_and_fail(report: &Report, machine: bool) -> Result<(), Failure> {
    emit(report, machine);
    Err(Failure::Verification(report.failure_summary()))
}

fn cell_counts(p: &FlowPresentation) -> Vec<usize> {
    let top = p.max_generator_dim();
    (0..=top)
        .map(|d| p.generators().iter().filter(|g| g.dim == d).count())
        .collect()
}

fn parse_grid(s: &str) -> Result<(usize, usize), Failure> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    if parts.len() != 2 {
        return Err(Failure::Input(format!("bad grid '{s}', expected WxH")));
    }
    let w = parts[0].trim().parse().map_err(|_| Failure::Input(format!("bad width in '{s}'")))?;
    let h = parts[1].trim().parse().map_err(|_| Failure::Input(format!("bad height in '{s}'")))?;
    Ok((w, h))
}
