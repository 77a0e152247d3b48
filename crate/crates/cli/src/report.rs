//! One report value per command; the human and machine renderings both read
//! from it.

use dihom::germs::Verdict;
use dihom::AbelianGroup;
use serde::Serialize;
use std::fmt;

#[derive(Serialize)]
pub struct GroupRow {
    pub degree: usize,
    pub betti: usize,
    pub torsion: Vec<String>,
    pub display: String,
}

impl GroupRow {
    pub fn new(degree: usize, g: &AbelianGroup) -> Self {
        GroupRow {
            degree,
            betti: g.betti,
            torsion: g.torsion.iter().map(|t| t.to_string()).collect(),
            display: g.to_string(),
        }
    }
}

#[derive(Serialize)]
pub struct StateRow {
    pub state: String,
    pub components: usize,
    pub reduced: Vec<GroupRow>,
}

#[derive(Serialize)]
pub struct LesRow {
    pub degree: usize,
    pub x: String,
    pub y: String,
    pub cone: String,
    /// Where this row sits in branching-homology numbering (degree + 1),
    /// absent for the unreduced bottom row.
    pub branching_degree: Option<usize>,
}

#[derive(Serialize)]
pub struct NodeRow {
    pub label: String,
    pub exact: bool,
    pub witness: Option<String>,
}

#[derive(Serialize)]
pub struct ConditionRow {
    pub name: String,
    pub pass: bool,
    pub witnesses: Vec<String>,
}

impl ConditionRow {
    pub fn new(name: &str, v: &Verdict) -> Self {
        ConditionRow { name: name.to_string(), pass: v.pass, witnesses: v.witnesses.clone() }
    }
}

#[derive(Serialize)]
pub struct SideBySide {
    pub x: String,
    pub y: String,
    pub branching_x: Vec<GroupRow>,
    pub branching_y: Vec<GroupRow>,
    pub merging_x: Vec<GroupRow>,
    pub merging_y: Vec<GroupRow>,
    pub pi0_x: usize,
    pub pi0_y: usize,
}

#[derive(Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Homology {
        flow: String,
        states: usize,
        /// Generator counts by dimension.
        cells: Vec<usize>,
        side: String,
        groups: Vec<GroupRow>,
        per_state: Option<Vec<StateRow>>,
        elapsed_ms: u128,
    },
    Les {
        morphism: String,
        x: String,
        y: String,
        /// Top degree first; the last row is the unreduced bottom row.
        rows: Vec<LesRow>,
        nodes: Vec<NodeRow>,
        exact: bool,
        elapsed_ms: u128,
    },
    CheckT {
        morphism: String,
        pass: bool,
        conditions: Vec<ConditionRow>,
        tables: Option<SideBySide>,
    },
    Pv {
        states: usize,
        edges: usize,
        squares: usize,
        written: Option<String>,
    },
    Oracle {
        flow: String,
        max_dim: usize,
        degrees_checked: usize,
        states: usize,
        agree: bool,
        mismatch: Option<String>,
        elapsed_ms: u128,
    },
}

impl Report {
    pub fn failure_summary(&self) -> String {
        match self {
            Report::Les { nodes, .. } => {
                let bad: Vec<&str> =
                    nodes.iter().filter(|n| !n.exact).map(|n| n.label.as_str()).collect();
                format!("sequence not exact at [{}]", bad.join(", "))
            }
            Report::CheckT { conditions, .. } => {
                let bad: Vec<&str> =
                    conditions.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
                format!("T-check failed: {}", bad.join("; "))
            }
            Report::Oracle { mismatch, .. } => {
                mismatch.clone().unwrap_or_else(|| "oracle mismatch".into())
            }
            _ => "failed".into(),
        }
    }
}

fn side_symbol(side: &str) -> &'static str {
    if side == "merging" {
        "H^+"
    } else {
        "H^-"
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Report::Homology { flow, states, cells, side, groups, per_state, elapsed_ms } => {
                let cell_str: Vec<String> =
                    cells.iter().enumerate().map(|(d, n)| format!("{n} dim-{d}")).collect();
                writeln!(f, "flow {flow}: {states} states, {}", cell_str.join(", "))?;
                let sym = side_symbol(side);
                for g in groups {
                    writeln!(f, "{sym}_{} = {}", g.degree, g.display)?;
                }
                if let Some(rows) = per_state {
                    writeln!(f, "per-state germ table ({side}):")?;
                    for r in rows {
                        let reduced: Vec<String> = r
                            .reduced
                            .iter()
                            .map(|g| format!("H~{} = {}", g.degree, g.display))
                            .collect();
                        writeln!(
                            f,
                            "  {}: components {}, {}",
                            r.state,
                            r.components,
                            reduced.join(", ")
                        )?;
                    }
                }
                writeln!(f, "({elapsed_ms} ms)")
            }
            Report::Les { morphism, x, y, rows, nodes, exact, elapsed_ms } => {
                writeln!(f, "long exact sequence for {morphism}: {x} -> {y}")?;
                for r in rows {
                    let tag = match r.branching_degree {
                        Some(b) => format!("degree {} (H^-_{b})", r.degree),
                        None => "bottom row ".to_string(),
                    };
                    writeln!(f, "  {tag}: {} -> {} -> {}", r.x, r.y, r.cone)?;
                }
                for n in nodes {
                    let mark = if n.exact { "exact" } else { "NOT EXACT" };
                    match &n.witness {
                        Some(w) => writeln!(f, "  node {}: {mark} ({w})", n.label)?,
                        None => writeln!(f, "  node {}: {mark}", n.label)?,
                    }
                }
                writeln!(f, "sequence {}", if *exact { "exact" } else { "NOT exact" })?;
                writeln!(f, "({elapsed_ms} ms)")
            }
            Report::CheckT { morphism, pass, conditions, tables } => {
                writeln!(f, "T-homotopy check for {morphism}")?;
                for c in conditions {
                    writeln!(f, "  {}: {}", c.name, if c.pass { "pass" } else { "FAIL" })?;
                    for w in &c.witnesses {
                        writeln!(f, "    - {w}")?;
                    }
                }
                if let Some(t) = tables {
                    writeln!(f, "homology tables ({} | {}):", t.x, t.y)?;
                    for (gx, gy) in t.branching_x.iter().zip(&t.branching_y) {
                        writeln!(f, "  H^-_{} = {} | {}", gx.degree, gx.display, gy.display)?;
                    }
                    for (gx, gy) in t.merging_x.iter().zip(&t.merging_y) {
                        writeln!(f, "  H^+_{} = {} | {}", gx.degree, gx.display, gy.display)?;
                    }
                    writeln!(f, "  germ pi0 totals: {} | {}", t.pi0_x, t.pi0_y)?;
                }
                writeln!(f, "verdict: {}", if *pass { "T-homotopy equivalence" } else { "NOT a T-homotopy equivalence" })
            }
            Report::Pv { states, edges, squares, written } => {
                writeln!(f, "{states} states, {edges} edges, {squares} squares")?;
                if let Some(path) = written {
                    writeln!(f, "written to {path}")?;
                }
                Ok(())
            }
            Report::Oracle { flow, max_dim, degrees_checked, states, agree, mismatch, elapsed_ms } => {
                writeln!(
                    f,
                    "oracle on {flow}: {states} states, word cap {max_dim}, degrees 0..={degrees_checked}"
                )?;
                match (agree, mismatch) {
                    (true, _) => writeln!(f, "germ reduction and brute force agree")?,
                    (false, Some(m)) => writeln!(f, "MISMATCH: {m}")?,
                    (false, None) => writeln!(f, "MISMATCH")?,
                }
                writeln!(f, "({elapsed_ms} ms)")
            }
        }
    }
}
