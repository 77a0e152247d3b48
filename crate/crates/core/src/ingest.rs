//! Textual flow and morphism formats, the PV grid builder, and the builtin
//! examples.
//!
//! Flow grammar, one declaration per line, `#` starts a comment:
//!
//! ```text
//! flow <name>
//! state <id>
//! edge <id> : <state> -> <state>
//! square <id> : <word> => <word>
//! cube <id> dim <d> : <axis> <sign> => <word> ; ...
//! ```
//!
//! Words are dot-separated generator ids. States are declared on first use;
//! an explicit `state` line covers isolated states. Morphism grammar:
//!
//! ```text
//! map <name>
//! state <x-state> -> <y-state>
//! gen <x-generator> -> <word over y>
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

use crate::flow::{
    FlowMorphism, FlowPresentation, MorphismError, RawFlow, RawMorphism,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Invalid(#[from] crate::flow::FlowError),
    #[error(transparent)]
    InvalidMorphism(#[from] MorphismError),
    #[error("forbidden cell ({0}, {1}) lies outside a {2}x{3} grid")]
    ForbiddenOutOfRange(usize, usize, usize, usize),
    #[error("unknown builtin '{0}'")]
    UnknownBuiltin(String),
}

// ---------------------------------------------------------------------------
// tokenizer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Id(String),
    Colon,
    Semi,
    Arrow,       // ->
    DoubleArrow, // =>
}

struct Token {
    tok: Tok,
    col: usize,
}

fn is_id_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '(' | ')' | ',' | '\'' | '+' | '*' | '^')
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token>, IngestError> {
    let mut out = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == ':' {
            out.push(Token { tok: Tok::Colon, col });
            i += 1;
        } else if c == ';' {
            out.push(Token { tok: Tok::Semi, col });
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Token { tok: Tok::Arrow, col });
            i += 2;
        } else if c == '=' && chars.get(i + 1) == Some(&'>') {
            out.push(Token { tok: Tok::DoubleArrow, col });
            i += 2;
        } else if is_id_char(c) || c == '.' {
            let start = i;
            while i < chars.len() && (is_id_char(chars[i]) || chars[i] == '.') {
                i += 1;
            }
            out.push(Token { tok: Tok::Id(chars[start..i].iter().collect()), col });
        } else {
            return Err(IngestError::Syntax {
                line: lineno,
                col,
                msg: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

fn split_word(tok: &str, line: usize, col: usize) -> Result<Vec<String>, IngestError> {
    let parts: Vec<String> = tok.split('.').map(|s| s.to_string()).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(IngestError::Syntax { line, col, msg: format!("malformed word '{tok}'") });
    }
    Ok(parts)
}

// ---------------------------------------------------------------------------
// flow parsing

struct LineParser<'a> {
    toks: &'a [Token],
    line: usize,
    pos: usize,
}

impl<'a> LineParser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, IngestError> {
        let col = self.toks.get(self.pos).map_or_else(
            || self.toks.last().map_or(1, |t| t.col + 1),
            |t| t.col,
        );
        Err(IngestError::Syntax { line: self.line, col, msg: msg.into() })
    }

    fn id(&mut self) -> Result<(String, usize), IngestError> {
        match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Id(s), col }) => {
                self.pos += 1;
                Ok((s.clone(), *col))
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), IngestError> {
        match self.toks.get(self.pos) {
            Some(tok) if tok.tok == t => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn done(&mut self) -> Result<(), IngestError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.err("trailing tokens")
        }
    }
}

/// Parse the flow grammar and validate the result.
pub fn parse_flow(text: &str) -> Result<FlowPresentation, IngestError> {
    let mut raw = RawFlow::default();
    let mut named = false;
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let toks = tokenize(line, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut p = LineParser { toks: &toks, line: lineno, pos: 0 };
        let (kw, _) = p.id()?;
        match kw.as_str() {
            "flow" => {
                let (name, _) = p.id()?;
                p.done()?;
                raw.name = name;
                named = true;
            }
            "state" => {
                let (id, _) = p.id()?;
                p.done()?;
                raw.state(id);
            }
            "edge" => {
                let (id, _) = p.id()?;
                p.expect(Tok::Colon, "':'")?;
                let (src, _) = p.id()?;
                p.expect(Tok::Arrow, "'->'")?;
                let (tgt, _) = p.id()?;
                p.done()?;
                raw.edge(id, src, tgt);
            }
            "square" => {
                let (id, _) = p.id()?;
                p.expect(Tok::Colon, "':'")?;
                let (w0, c0) = p.id()?;
                p.expect(Tok::DoubleArrow, "'=>'")?;
                let (w1, c1) = p.id()?;
                p.done()?;
                let lower = split_word(&w0, lineno, c0)?;
                let upper = split_word(&w1, lineno, c1)?;
                raw.square_owned(id, lower, upper);
            }
            "cube" => {
                let (id, _) = p.id()?;
                let (dim_kw, _) = p.id()?;
                if dim_kw != "dim" {
                    return p.err("expected 'dim'");
                }
                let (d_str, d_col) = p.id()?;
                let dim: usize = d_str.parse().map_err(|_| IngestError::Syntax {
                    line: lineno,
                    col: d_col,
                    msg: format!("bad dimension '{d_str}'"),
                })?;
                p.expect(Tok::Colon, "':'")?;
                let mut faces: Vec<[Option<Vec<String>>; 2]> = vec![[None, None]; dim];
                loop {
                    let (axis_str, axis_col) = p.id()?;
                    let axis: usize = axis_str.parse().map_err(|_| IngestError::Syntax {
                        line: lineno,
                        col: axis_col,
                        msg: format!("bad axis '{axis_str}'"),
                    })?;
                    if axis == 0 || axis > dim {
                        return Err(IngestError::Syntax {
                            line: lineno,
                            col: axis_col,
                            msg: format!("axis {axis} out of range 1..={dim}"),
                        });
                    }
                    let (sign_str, sign_col) = p.id()?;
                    let sign: usize = match sign_str.as_str() {
                        "0" => 0,
                        "1" => 1,
                        _ => {
                            return Err(IngestError::Syntax {
                                line: lineno,
                                col: sign_col,
                                msg: format!("face sign must be 0 or 1, got '{sign_str}'"),
                            })
                        }
                    };
                    p.expect(Tok::DoubleArrow, "'=>'")?;
                    let (w, wc) = p.id()?;
                    if faces[axis - 1][sign].is_some() {
                        return Err(IngestError::Syntax {
                            line: lineno,
                            col: axis_col,
                            msg: format!("face {axis}/{sign} declared twice"),
                        });
                    }
                    faces[axis - 1][sign] = Some(split_word(&w, lineno, wc)?);
                    if p.pos == p.toks.len() {
                        break;
                    }
                    p.expect(Tok::Semi, "';'")?;
                }
                let mut resolved = Vec::with_capacity(dim);
                for (axis0, pair) in faces.into_iter().enumerate() {
                    match pair {
                        [Some(lo), Some(hi)] => resolved.push([lo, hi]),
                        _ => {
                            return Err(IngestError::Syntax {
                                line: lineno,
                                col: 1,
                                msg: format!("cube '{id}' is missing a face on axis {}", axis0 + 1),
                            })
                        }
                    }
                }
                raw.cube(id, dim, resolved);
            }
            other => {
                return p.err(format!("unknown declaration '{other}'"));
            }
        }
    }
    if !named {
        raw.name = "flow".to_string();
    }
    Ok(raw.build()?)
}

/// Deterministic text form; `parse_flow(serialize_flow(p))` is structurally
/// equal to `p`.
pub fn serialize_flow(p: &FlowPresentation) -> String {
    let mut out = String::new();
    writeln!(out, "flow {}", p.name()).unwrap();
    for s in p.states() {
        writeln!(out, "state {s}").unwrap();
    }
    for g in p.generators() {
        match g.dim {
            0 => writeln!(
                out,
                "edge {} : {} -> {}",
                g.id,
                p.state_name(g.source),
                p.state_name(g.target)
            )
            .unwrap(),
            1 => writeln!(
                out,
                "square {} : {} => {}",
                g.id,
                p.word_name(&g.faces[0][0]),
                p.word_name(&g.faces[0][1])
            )
            .unwrap(),
            d => {
                let mut parts = Vec::new();
                for axis in 1..=d {
                    for sign in 0..2 {
                        parts.push(format!(
                            "{axis} {sign} => {}",
                            p.word_name(&g.faces[axis - 1][sign])
                        ));
                    }
                }
                writeln!(out, "cube {} dim {} : {}", g.id, d, parts.join(" ; ")).unwrap();
            }
        }
    }
    out
}

/// Parse the morphism grammar against two validated presentations.
pub fn parse_morphism(
    text: &str,
    x: &FlowPresentation,
    y: &FlowPresentation,
) -> Result<FlowMorphism, IngestError> {
    let mut raw = RawMorphism::default();
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let toks = tokenize(line, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut p = LineParser { toks: &toks, line: lineno, pos: 0 };
        let (kw, _) = p.id()?;
        match kw.as_str() {
            "map" => {
                let (name, _) = p.id()?;
                p.done()?;
                raw.name = name;
            }
            "state" => {
                let (from, _) = p.id()?;
                p.expect(Tok::Arrow, "'->'")?;
                let (to, _) = p.id()?;
                p.done()?;
                raw.state_map.push((from, to));
            }
            "gen" => {
                let (from, _) = p.id()?;
                p.expect(Tok::Arrow, "'->'")?;
                let (w, wc) = p.id()?;
                p.done()?;
                raw.gen_map.push((from, split_word(&w, lineno, wc)?));
            }
            other => {
                return p.err(format!("unknown declaration '{other}'"));
            }
        }
    }
    Ok(FlowMorphism::new(x.clone(), y.clone(), &raw)?)
}

// ---------------------------------------------------------------------------
// PV grids

/// The plus-shaped forbidden region of the 5x5 Swiss flag.
pub fn plus_forbidden() -> BTreeSet<(usize, usize)> {
    [(2, 1), (1, 2), (2, 2), (3, 2), (2, 3)].into_iter().collect()
}

/// Grid model of two sequential processes: all (w+1)(h+1) grid points stay;
/// an edge is dropped only when every unit cell beside it is forbidden (a
/// cell outside the grid counts as free, so boundary edges always stay);
/// the square of a cell is attached when the cell is not forbidden, with
/// lower face bottom.right and upper face left.top.
pub fn pv_grid(
    width: usize,
    height: usize,
    forbidden: &BTreeSet<(usize, usize)>,
) -> Result<FlowPresentation, IngestError> {
    for &(i, j) in forbidden {
        if i >= width || j >= height {
            return Err(IngestError::ForbiddenOutOfRange(i, j, width, height));
        }
    }
    let cell = |i: isize, j: isize| -> bool {
        // cells outside the grid are free
        i >= 0
            && j >= 0
            && (i as usize) < width
            && (j as usize) < height
            && forbidden.contains(&(i as usize, j as usize))
    };
    let state = |i: usize, j: usize| format!("({i},{j})");
    let h_edge = |i: usize, j: usize| format!("h({i},{j})");
    let v_edge = |i: usize, j: usize| format!("v({i},{j})");

    let mut raw = RawFlow::new("pv");
    for i in 0..=width {
        for j in 0..=height {
            raw.state(state(i, j));
        }
    }
    for i in 0..width {
        for j in 0..=height {
            let below = cell(i as isize, j as isize - 1);
            let above = cell(i as isize, j as isize);
            if !(below && above) {
                raw.edge(h_edge(i, j), state(i, j), state(i + 1, j));
            }
        }
    }
    for i in 0..=width {
        for j in 0..height {
            let left = cell(i as isize - 1, j as isize);
            let right = cell(i as isize, j as isize);
            if !(left && right) {
                raw.edge(v_edge(i, j), state(i, j), state(i, j + 1));
            }
        }
    }
    for i in 0..width {
        for j in 0..height {
            if forbidden.contains(&(i, j)) {
                continue;
            }
            raw.square_owned(
                format!("s({i},{j})"),
                vec![h_edge(i, j), v_edge(i + 1, j)],
                vec![v_edge(i, j), h_edge(i, j + 1)],
            );
        }
    }
    Ok(raw.build()?)
}

/// Parse a forbidden-cell list: the name `plus` or `(i,j),(k,l),...`.
pub fn parse_forbidden(s: &str) -> Result<BTreeSet<(usize, usize)>, IngestError> {
    if s.trim() == "plus" {
        return Ok(plus_forbidden());
    }
    let mut out = BTreeSet::new();
    let body = s.trim();
    if body.is_empty() {
        return Ok(out);
    }
    // split "(a,b),(c,d)" on the commas between groups
    let mut depth = 0usize;
    let mut start = 0usize;
    let bytes: Vec<char> = body.chars().collect();
    let mut groups = Vec::new();
    for (i, c) in bytes.iter().enumerate() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                groups.push(body[start..i].to_string());
                start = i + 1;
            }
            _ => {}
        }
    }
    groups.push(body[start..].to_string());
    for g in groups {
        let t = g.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = t.split(',').collect();
        let bad = || IngestError::Syntax {
            line: 1,
            col: 1,
            msg: format!("bad forbidden cell '{g}'"),
        };
        if parts.len() != 2 {
            return Err(bad());
        }
        let i: usize = parts[0].trim().parse().map_err(|_| bad())?;
        let j: usize = parts[1].trim().parse().map_err(|_| bad())?;
        out.insert((i, j));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// builtins

/// A named example: either a flow or a morphism bundle.
pub enum Builtin {
    Flow(FlowPresentation),
    Morphism(FlowMorphism),
}

pub const BUILTIN_NAMES: [&str; 6] = ["dirseg", "seg2", "phi", "branch1", "branch2", "swiss"];

/// The directed segment: two states, one edge.
pub fn dirseg() -> FlowPresentation {
    let mut raw = RawFlow::new("dirseg");
    raw.edge("u", "0", "1");
    raw.build().expect("builtin")
}

/// Two directed segments glued end to end.
pub fn seg2() -> FlowPresentation {
    let mut raw = RawFlow::new("seg2");
    raw.edge("v", "0", "A").edge("w", "A", "1");
    raw.build().expect("builtin")
}

/// The subdivision morphism dirseg -> seg2, u |-> v.w.
pub fn phi() -> FlowMorphism {
    let raw = RawMorphism {
        name: "phi".into(),
        state_map: vec![("0".into(), "0".into()), ("1".into(), "1".into())],
        gen_map: vec![("u".into(), vec!["v".into(), "w".into()])],
    };
    FlowMorphism::new(dirseg(), seg2(), &raw).expect("builtin")
}

/// One-dimensional branching: a fork into two final states.
pub fn branch1() -> FlowPresentation {
    let mut raw = RawFlow::new("branch1");
    raw.edge("e01", "0", "1").edge("e12", "1", "2").edge("e03", "0", "3");
    raw.build().expect("builtin")
}

/// Two-dimensional branching: three squares pairwise sharing the three edges
/// at a common initial corner (the hollow corner of a cube), each square
/// running to its own far corner.
pub fn branch2() -> FlowPresentation {
    let mut raw = RawFlow::new("branch2");
    raw.edge("e1", "c", "p1").edge("e2", "c", "p2").edge("e3", "c", "p3");
    raw.edge("a1", "p1", "q12").edge("a2", "p2", "q12");
    raw.edge("f2", "p2", "q23").edge("f3", "p3", "q23");
    raw.edge("i3", "p3", "q31").edge("i1", "p1", "q31");
    raw.square("A", &["e1", "a1"], &["e2", "a2"]);
    raw.square("F", &["e2", "f2"], &["e3", "f3"]);
    raw.square("I", &["e3", "i3"], &["e1", "i1"]);
    raw.build().expect("builtin")
}

/// The Swiss flag: a 5x5 PV grid with the plus-shaped forbidden region.
pub fn swiss() -> FlowPresentation {
    let mut p = pv_grid(5, 5, &plus_forbidden()).expect("builtin");
    p = {
        // rename for recognizability in reports
        let text = serialize_flow(&p).replacen("flow pv", "flow swiss", 1);
        parse_flow(&text).expect("builtin")
    };
    p
}

pub fn builtin(name: &str) -> Result<Builtin, IngestError> {
    match name {
        "dirseg" => Ok(Builtin::Flow(dirseg())),
        "seg2" => Ok(Builtin::Flow(seg2())),
        "phi" => Ok(Builtin::Morphism(phi())),
        "branch1" => Ok(Builtin::Flow(branch1())),
        "branch2" => Ok(Builtin::Flow(branch2())),
        "swiss" => Ok(Builtin::Flow(swiss())),
        other => Err(IngestError::UnknownBuiltin(other.to_string())),
    }
}
