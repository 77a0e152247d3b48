//! Flow presentations: finite state sets plus globular generator cells, the
//! execution-path precubical complex they generate, opposites, and morphisms.
//!
//! A generator of dimension `d` contributes a `d`-cube to the path complex;
//! edges are dimension 0. Face words of a dimension-`d` generator are words
//! of total dimension `d - 1` with the same endpoints. Axes of a word are
//! assigned to its letters left to right, each letter owning as many
//! consecutive axes as its dimension.

use serde::Serialize;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use thiserror::Error;

use crate::cubical::{CubeRef, PrecubicalComplex};

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("invalid flow presentation:\n{0}")]
    Invalid(FlowReport),
    #[error("dimension cap {cap} is below the dimension {dim} of generator '{gen}'")]
    CapTooSmall { cap: usize, dim: usize, gen: String },
}

// ---------------------------------------------------------------------------
// raw declarations

/// Unvalidated generator declaration; face words are given by generator ids.
#[derive(Clone, Debug)]
pub struct RawGenerator {
    pub id: String,
    pub dim: usize,
    pub source: String,
    pub target: String,
    /// One `[lower, upper]` pair of face words per axis; empty for edges.
    pub faces: Vec<[Vec<String>; 2]>,
}

/// Unvalidated flow declaration, as produced by parsers and builders.
#[derive(Clone, Debug, Default)]
pub struct RawFlow {
    pub name: String,
    pub states: Vec<String>,
    pub generators: Vec<RawGenerator>,
}

impl RawFlow {
    pub fn new(name: impl Into<String>) -> Self {
        RawFlow { name: name.into(), states: Vec::new(), generators: Vec::new() }
    }

    pub fn state(&mut self, id: impl Into<String>) -> &mut Self {
        let id = id.into();
        if !self.states.contains(&id) {
            self.states.push(id);
        }
        self
    }

    pub fn edge(
        &mut self,
        id: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
    ) -> &mut Self {
        let source = source.into();
        let target = target.into();
        self.state(source.clone());
        self.state(target.clone());
        self.generators.push(RawGenerator {
            id: id.into(),
            dim: 0,
            source,
            target,
            faces: Vec::new(),
        });
        self
    }

    /// Square sugar: a dimension-1 generator with `d_1^0 = lower` and
    /// `d_1^1 = upper`. Endpoints are inferred from the lower word during
    /// validation.
    pub fn square(&mut self, id: impl Into<String>, lower: &[&str], upper: &[&str]) -> &mut Self {
        self.square_owned(
            id,
            lower.iter().map(|s| s.to_string()).collect(),
            upper.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn square_owned(
        &mut self,
        id: impl Into<String>,
        lower: Vec<String>,
        upper: Vec<String>,
    ) -> &mut Self {
        self.generators.push(RawGenerator {
            id: id.into(),
            dim: 1,
            source: String::new(),
            target: String::new(),
            faces: vec![[lower, upper]],
        });
        self
    }

    pub fn cube(&mut self, id: impl Into<String>, dim: usize, faces: Vec<[Vec<String>; 2]>) -> &mut Self {
        self.generators.push(RawGenerator {
            id: id.into(),
            dim,
            source: String::new(),
            target: String::new(),
            faces,
        });
        self
    }

    pub fn build(self) -> Result<FlowPresentation, FlowError> {
        FlowPresentation::from_raw(self)
    }
}

// ---------------------------------------------------------------------------
// validation report

#[derive(Debug, Clone, Serialize)]
pub enum FlowViolation {
    DuplicateState { id: String },
    DuplicateGenerator { id: String },
    UnknownState { gen: String, id: String },
    UnknownGenerator { gen: String, id: String },
    FaceCount { gen: String, expected: usize, found: usize },
    EmptyFaceWord { gen: String, axis: usize, sign: usize },
    NotComposable { gen: String, axis: usize, sign: usize },
    EndpointMismatch { gen: String, axis: usize, sign: usize },
    FaceDimension { gen: String, axis: usize, sign: usize, expected: usize, found: usize },
    PrecubicalIdentity { gen: String, i: usize, j: usize, alpha: usize, beta: usize },
    Cycle { states: Vec<String> },
}

impl fmt::Display for FlowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FlowViolation::*;
        match self {
            DuplicateState { id } => write!(f, "duplicate state '{id}'"),
            DuplicateGenerator { id } => write!(f, "duplicate generator '{id}'"),
            UnknownState { gen, id } => write!(f, "generator '{gen}' uses unknown state '{id}'"),
            UnknownGenerator { gen, id } => {
                write!(f, "generator '{gen}' uses unknown generator '{id}' in a face word")
            }
            FaceCount { gen, expected, found } => {
                write!(f, "generator '{gen}' declares {found} axes, expected {expected}")
            }
            EmptyFaceWord { gen, axis, sign } => {
                write!(f, "generator '{gen}': face {axis}/{sign} is empty")
            }
            NotComposable { gen, axis, sign } => {
                write!(f, "generator '{gen}': face word {axis}/{sign} is not composable")
            }
            EndpointMismatch { gen, axis, sign } => {
                write!(f, "generator '{gen}': face word {axis}/{sign} has wrong endpoints")
            }
            FaceDimension { gen, axis, sign, expected, found } => write!(
                f,
                "generator '{gen}': face word {axis}/{sign} has total dimension {found}, expected {expected}"
            ),
            PrecubicalIdentity { gen, i, j, alpha, beta } => write!(
                f,
                "generator '{gen}': spliced faces violate d_{i}^{alpha} d_{j}^{beta} = d_{}^{beta} d_{i}^{alpha}",
                j - 1
            ),
            Cycle { states } => write!(f, "state graph has a cycle through [{}]", states.join(", ")),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct FlowReport {
    pub violations: Vec<FlowViolation>,
}

impl FlowReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for FlowReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "- {v}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// validated presentations

/// A generator cell. For `dim >= 1`, `faces[i][e]` is the face word along
/// axis `i + 1` with sign `e`; every face word has the generator's own
/// endpoints and total dimension `dim - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub id: String,
    pub dim: usize,
    pub source: usize,
    pub target: usize,
    pub faces: Vec<[Word; 2]>,
}

/// Nonempty composable sequence of generator indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn single(g: usize) -> Self {
        Word(vec![g])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Validated flow presentation: states are sorted by id, generators sorted by
/// id, and all structural invariants hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowPresentation {
    name: String,
    states: Vec<String>,
    generators: Vec<Generator>,
}

/// List every violation in a raw declaration; empty report iff buildable.
pub fn validate_presentation(raw: &RawFlow) -> FlowReport {
    match Builder::run(raw) {
        Ok(_) => FlowReport::default(),
        Err(report) => report,
    }
}

struct Builder<'a> {
    raw: &'a RawFlow,
    report: FlowReport,
    state_index: HashMap<String, usize>,
    gen_index: HashMap<String, usize>,
    order: Vec<usize>, // raw generator order after sorting by id
}

impl<'a> Builder<'a> {
    fn run(raw: &'a RawFlow) -> Result<FlowPresentation, FlowReport> {
        let mut b = Builder {
            raw,
            report: FlowReport::default(),
            state_index: HashMap::new(),
            gen_index: HashMap::new(),
            order: Vec::new(),
        };
        b.index();
        if !b.report.is_valid() {
            return Err(b.report);
        }
        b.build()
    }

    fn index(&mut self) {
        let mut states: Vec<String> = Vec::new();
        for s in &self.raw.states {
            if states.contains(s) {
                self.report.violations.push(FlowViolation::DuplicateState { id: s.clone() });
            } else {
                states.push(s.clone());
            }
        }
        states.sort();
        for (i, s) in states.iter().enumerate() {
            self.state_index.insert(s.clone(), i);
        }
        let mut order: Vec<usize> = (0..self.raw.generators.len()).collect();
        order.sort_by(|a, b| self.raw.generators[*a].id.cmp(&self.raw.generators[*b].id));
        for (pos, &raw_idx) in order.iter().enumerate() {
            let id = &self.raw.generators[raw_idx].id;
            if self.gen_index.insert(id.clone(), pos).is_some() {
                self.report.violations.push(FlowViolation::DuplicateGenerator { id: id.clone() });
            }
        }
        self.order = order;
    }

    fn build(&mut self) -> Result<FlowPresentation, FlowReport> {
        let states: Vec<String> = {
            let mut v: Vec<(usize, String)> =
                self.state_index.iter().map(|(s, i)| (*i, s.clone())).collect();
            v.sort();
            v.into_iter().map(|(_, s)| s).collect()
        };

        // first pass: endpoints and face-word letters resolve
        let order = self.order.clone();
        let mut gens: Vec<Generator> = Vec::with_capacity(order.len());
        for &raw_idx in &order {
            let rg = &self.raw.generators[raw_idx];
            if rg.faces.len() != rg.dim {
                self.report.violations.push(FlowViolation::FaceCount {
                    gen: rg.id.clone(),
                    expected: rg.dim,
                    found: rg.faces.len(),
                });
            }
            let mut faces: Vec<[Word; 2]> = Vec::with_capacity(rg.faces.len());
            for (axis0, pair) in rg.faces.iter().enumerate() {
                let mut resolved: [Word; 2] = [Word(Vec::new()), Word(Vec::new())];
                for (sign, word) in pair.iter().enumerate() {
                    if word.is_empty() {
                        self.report.violations.push(FlowViolation::EmptyFaceWord {
                            gen: rg.id.clone(),
                            axis: axis0 + 1,
                            sign,
                        });
                        continue;
                    }
                    let mut letters = Vec::with_capacity(word.len());
                    for letter in word {
                        match self.gen_index.get(letter) {
                            Some(&g) => letters.push(g),
                            None => {
                                self.report.violations.push(FlowViolation::UnknownGenerator {
                                    gen: rg.id.clone(),
                                    id: letter.clone(),
                                });
                            }
                        }
                    }
                    resolved[sign] = Word(letters);
                }
                let _ = axis0;
                faces.push(resolved);
            }
            // endpoints: edges carry explicit states; higher cells may infer
            // them from their first face word once it resolves
            let (src, tgt) = if rg.dim == 0 {
                let s = self.resolve_state(&rg.id, &rg.source);
                let t = self.resolve_state(&rg.id, &rg.target);
                (s, t)
            } else {
                (usize::MAX, usize::MAX) // filled in the second pass
            };
            gens.push(Generator {
                id: rg.id.clone(),
                dim: rg.dim,
                source: src,
                target: tgt,
                faces,
            });
        }
        if !self.report.is_valid() {
            return Err(std::mem::take(&mut self.report));
        }

        // second pass: infer endpoints of positive-dimension generators from
        // their first face word, iterating since faces may name other cells
        let mut remaining = gens.iter().filter(|g| g.dim > 0).count();
        loop {
            let mut progressed = false;
            for i in 0..gens.len() {
                if gens[i].dim == 0 || gens[i].source != usize::MAX {
                    continue;
                }
                let word = gens[i].faces[0][0].clone();
                let first = word.0.first().copied();
                let last = word.0.last().copied();
                if let (Some(a), Some(b)) = (first, last) {
                    if gens[a].source != usize::MAX && gens[b].target != usize::MAX {
                        gens[i].source = gens[a].source;
                        gens[i].target = gens[b].target;
                        remaining -= 1;
                        progressed = true;
                    }
                }
            }
            if remaining == 0 || !progressed {
                break;
            }
        }
        if remaining > 0 {
            // unresolvable endpoints only happen with cyclic face references
            for g in gens.iter().filter(|g| g.source == usize::MAX) {
                self.report.violations.push(FlowViolation::NotComposable {
                    gen: g.id.clone(),
                    axis: 1,
                    sign: 0,
                });
            }
            return Err(std::mem::take(&mut self.report));
        }

        let p = FlowPresentation { name: self.raw.name.clone(), states, generators: gens };

        // third pass: word composability, endpoints, dimensions, identities
        for g in &p.generators {
            for (axis0, pair) in g.faces.iter().enumerate() {
                for (sign, word) in pair.iter().enumerate() {
                    if !p.word_composable(word) {
                        self.report.violations.push(FlowViolation::NotComposable {
                            gen: g.id.clone(),
                            axis: axis0 + 1,
                            sign,
                        });
                        continue;
                    }
                    if p.word_source(word) != g.source || p.word_target(word) != g.target {
                        self.report.violations.push(FlowViolation::EndpointMismatch {
                            gen: g.id.clone(),
                            axis: axis0 + 1,
                            sign,
                        });
                    }
                    let found = p.word_dim(word);
                    if found + 1 != g.dim {
                        self.report.violations.push(FlowViolation::FaceDimension {
                            gen: g.id.clone(),
                            axis: axis0 + 1,
                            sign,
                            expected: g.dim - 1,
                            found,
                        });
                    }
                }
            }
        }
        if !self.report.is_valid() {
            return Err(std::mem::take(&mut self.report));
        }
        for g in &p.generators {
            let d = g.dim;
            for j in 2..=d {
                for i in 1..j {
                    for (alpha, beta) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
                        let lhs = p.word_face(&g.faces[j - 1][beta], i, alpha);
                        let rhs = p.word_face(&g.faces[i - 1][alpha], j - 1, beta);
                        if lhs != rhs {
                            self.report.violations.push(FlowViolation::PrecubicalIdentity {
                                gen: g.id.clone(),
                                i,
                                j,
                                alpha,
                                beta,
                            });
                        }
                    }
                }
            }
        }

        // acyclicity of the state graph (generators as edges)
        if let Some(cycle) = p.find_cycle() {
            self.report.violations.push(FlowViolation::Cycle { states: cycle });
        }

        if self.report.is_valid() {
            Ok(p)
        } else {
            Err(std::mem::take(&mut self.report))
        }
    }

    fn resolve_state(&mut self, gen: &str, id: &str) -> usize {
        match self.state_index.get(id) {
            Some(&i) => i,
            None => {
                self.report.violations.push(FlowViolation::UnknownState {
                    gen: gen.to_string(),
                    id: id.to_string(),
                });
                usize::MAX
            }
        }
    }
}

impl FlowPresentation {
    pub fn from_raw(raw: RawFlow) -> Result<Self, FlowError> {
        Builder::run(&raw).map_err(FlowError::Invalid)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.states[i]
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.states.binary_search_by(|s| s.as_str().cmp(name)).ok()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, g: usize) -> &Generator {
        &self.generators[g]
    }

    pub fn generator_id(&self, id: &str) -> Option<usize> {
        self.generators.binary_search_by(|g| g.id.as_str().cmp(id)).ok()
    }

    pub fn max_generator_dim(&self) -> usize {
        self.generators.iter().map(|g| g.dim).max().unwrap_or(0)
    }

    // -- words ---------------------------------------------------------

    pub fn word_composable(&self, w: &Word) -> bool {
        !w.0.is_empty()
            && w.0.windows(2).all(|p| self.generators[p[0]].target == self.generators[p[1]].source)
    }

    pub fn word_source(&self, w: &Word) -> usize {
        self.generators[w.0[0]].source
    }

    pub fn word_target(&self, w: &Word) -> usize {
        self.generators[*w.0.last().unwrap()].target
    }

    pub fn word_dim(&self, w: &Word) -> usize {
        w.0.iter().map(|&g| self.generators[g].dim).sum()
    }

    pub fn word_name(&self, w: &Word) -> String {
        w.0.iter().map(|&g| self.generators[g].id.as_str()).collect::<Vec<_>>().join(".")
    }

    /// Face of a word along a 1-based axis: the face is applied to the
    /// unique letter owning that axis and the letter's face word is spliced
    /// into the sequence.
    pub fn word_face(&self, w: &Word, axis: usize, sign: usize) -> Word {
        let mut remaining = axis;
        for (pos, &g) in w.0.iter().enumerate() {
            let d = self.generators[g].dim;
            if remaining <= d {
                let fw = &self.generators[g].faces[remaining - 1][sign];
                let mut out = Vec::with_capacity(w.0.len() - 1 + fw.0.len());
                out.extend_from_slice(&w.0[..pos]);
                out.extend_from_slice(&fw.0);
                out.extend_from_slice(&w.0[pos + 1..]);
                return Word(out);
            }
            remaining -= d;
        }
        panic!("axis {axis} out of range for word of dimension {}", self.word_dim(w));
    }

    // -- state graph ----------------------------------------------------

    fn find_cycle(&self) -> Option<Vec<String>> {
        // iterative DFS with colors; any back edge closes a cycle
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Grey,
            Black,
        }
        let n = self.states.len();
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for g in &self.generators {
            out[g.source].push(g.target);
        }
        let mut color = vec![Color::White; n];
        let mut parent = vec![usize::MAX; n];
        for start in 0..n {
            if color[start] != Color::White {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            color[start] = Color::Grey;
            while let Some((v, i)) = stack.pop() {
                if i < out[v].len() {
                    stack.push((v, i + 1));
                    let w = out[v][i];
                    match color[w] {
                        Color::White => {
                            color[w] = Color::Grey;
                            parent[w] = v;
                            stack.push((w, 0));
                        }
                        Color::Grey => {
                            // reconstruct the cycle w -> ... -> v -> w
                            let mut cyc = vec![self.states[w].clone()];
                            let mut cur = v;
                            while cur != w && cur != usize::MAX {
                                cyc.push(self.states[cur].clone());
                                cur = parent[cur];
                            }
                            cyc.push(self.states[w].clone());
                            cyc.reverse();
                            return Some(cyc);
                        }
                        Color::Black => {}
                    }
                } else {
                    color[v] = Color::Black;
                }
            }
        }
        None
    }

    /// States with no outgoing generator.
    pub fn final_states(&self) -> Vec<usize> {
        let mut has_out = vec![false; self.states.len()];
        for g in &self.generators {
            has_out[g.source] = true;
        }
        (0..self.states.len()).filter(|&s| !has_out[s]).collect()
    }

    /// States with no incoming generator.
    pub fn initial_states(&self) -> Vec<usize> {
        let mut has_in = vec![false; self.states.len()];
        for g in &self.generators {
            has_in[g.target] = true;
        }
        (0..self.states.len()).filter(|&s| !has_in[s]).collect()
    }

    /// Longest-path bound on word dimension plus one; always covers every
    /// generator dimension so compilation with the default cap cannot fail.
    pub fn default_dim_cap(&self) -> usize {
        let n = self.states.len();
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut indeg = vec![0usize; n];
        for g in &self.generators {
            indeg[g.target] += 1;
        }
        let mut queue: VecDeque<usize> =
            (0..n).filter(|&s| indeg[s] == 0).collect();
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for g in self.generators.iter().filter(|g| g.source == s) {
                indeg[g.target] -= 1;
                if indeg[g.target] == 0 {
                    queue.push_back(g.target);
                }
            }
        }
        let mut weight = vec![0usize; n];
        for &s in &order {
            for g in self.generators.iter().filter(|g| g.source == s) {
                let w = weight[s] + if g.dim > 0 { 1 } else { 0 };
                if w > weight[g.target] {
                    weight[g.target] = w;
                }
            }
        }
        let longest = weight.into_iter().max().unwrap_or(0);
        (longest + 1).max(self.max_generator_dim())
    }

    // -- opposite --------------------------------------------------------

    /// Time reversal: endpoints swap, face words reverse, and the cube
    /// structure is reflected (axis order reversed, face signs swapped).
    /// An involution.
    pub fn opposite(&self) -> FlowPresentation {
        let generators = self
            .generators
            .iter()
            .map(|g| {
                let d = g.dim;
                let faces = (0..d)
                    .map(|axis0| {
                        let src = &g.faces[d - 1 - axis0];
                        [reverse_word(&src[1]), reverse_word(&src[0])]
                    })
                    .collect();
                Generator {
                    id: g.id.clone(),
                    dim: g.dim,
                    source: g.target,
                    target: g.source,
                    faces,
                }
            })
            .collect();
        let name = match self.name.strip_suffix("^op") {
            Some(base) => base.to_string(),
            None => format!("{}^op", self.name),
        };
        FlowPresentation { name, states: self.states.clone(), generators }
    }
}

fn reverse_word(w: &Word) -> Word {
    Word(w.0.iter().rev().copied().collect())
}

// ---------------------------------------------------------------------------
// path complexes

/// The precubical complex of execution-path words, graded by (source,
/// target). `words[d][i]` is the word of the `i`-th `d`-cube.
pub struct PathComplex {
    pub complex: PrecubicalComplex,
    pub words: Vec<Vec<Word>>,
    pub grading: Vec<Vec<(usize, usize)>>,
    index: HashMap<Word, CubeRef>,
}

impl PathComplex {
    pub fn cube_of(&self, w: &Word) -> Option<CubeRef> {
        self.index.get(w).copied()
    }

    pub fn count(&self, d: usize) -> usize {
        self.words.get(d).map_or(0, |v| v.len())
    }
}

/// All words of total dimension at most `cap`, from every source state.
pub fn compile_paths(p: &FlowPresentation, cap: usize) -> Result<PathComplex, FlowError> {
    compile_words(p, cap, None)
}

/// All words with the given source state, up to the cap.
pub fn compile_paths_from(
    p: &FlowPresentation,
    state: usize,
    cap: usize,
) -> Result<PathComplex, FlowError> {
    compile_words(p, cap, Some(state))
}

fn compile_words(
    p: &FlowPresentation,
    cap: usize,
    source: Option<usize>,
) -> Result<PathComplex, FlowError> {
    if let Some(g) = p.generators().iter().find(|g| g.dim > cap) {
        return Err(FlowError::CapTooSmall { cap, dim: g.dim, gen: g.id.clone() });
    }
    // group generators by source state for the extension step
    let mut by_source: Vec<Vec<usize>> = vec![Vec::new(); p.state_count()];
    for (i, g) in p.generators().iter().enumerate() {
        by_source[g.source].push(i);
    }

    let mut words: Vec<Vec<Word>> = vec![Vec::new(); cap + 1];
    let mut index: HashMap<Word, CubeRef> = HashMap::new();
    let mut queue: VecDeque<(Word, usize, usize)> = VecDeque::new(); // word, dim, target

    let push = |w: Word,
                    dim: usize,
                    tgt: usize,
                    words: &mut Vec<Vec<Word>>,
                    index: &mut HashMap<Word, CubeRef>,
                    queue: &mut VecDeque<(Word, usize, usize)>| {
        if index.contains_key(&w) {
            return;
        }
        let r = CubeRef { dim, index: words[dim].len() };
        index.insert(w.clone(), r);
        words[dim].push(w.clone());
        queue.push_back((w, dim, tgt));
    };

    for (i, g) in p.generators().iter().enumerate() {
        if source.is_some() && source != Some(g.source) {
            continue;
        }
        if g.dim <= cap {
            push(Word::single(i), g.dim, g.target, &mut words, &mut index, &mut queue);
        }
    }
    while let Some((w, dim, tgt)) = queue.pop_front() {
        for &g in &by_source[tgt] {
            let gd = p.generator(g).dim;
            if dim + gd > cap {
                continue;
            }
            let mut next = w.0.clone();
            next.push(g);
            push(
                Word(next),
                dim + gd,
                p.generator(g).target,
                &mut words,
                &mut index,
                &mut queue,
            );
        }
    }

    // trim trailing empty dimensions but keep at least degree 0
    while words.len() > 1 && words.last().is_some_and(|v| v.is_empty()) {
        words.pop();
    }

    let mut complex = PrecubicalComplex::new();
    let mut grading: Vec<Vec<(usize, usize)>> = Vec::with_capacity(words.len());
    for (d, layer) in words.iter().enumerate() {
        let mut grades = Vec::with_capacity(layer.len());
        for w in layer {
            let faces = (1..=d)
                .map(|axis| {
                    [0usize, 1].map(|sign| {
                        let fw = p.word_face(w, axis, sign);
                        *index.get(&fw).expect("faces of compiled words are compiled")
                    })
                })
                .collect();
            complex.add_cube(d, p.word_name(w), faces);
            grades.push((p.word_source(w), p.word_target(w)));
        }
        grading.push(grades);
    }

    Ok(PathComplex { complex, words, grading, index })
}

// ---------------------------------------------------------------------------
// morphisms

/// Raw morphism declaration by names.
#[derive(Clone, Debug, Default)]
pub struct RawMorphism {
    pub name: String,
    pub state_map: Vec<(String, String)>,
    pub gen_map: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Clone, Serialize)]
pub enum MorphismViolation {
    MissingState { id: String },
    UnknownState { id: String },
    MissingGenerator { id: String },
    UnknownGenerator { id: String },
    UnknownImageLetter { gen: String, id: String },
    ImageNotComposable { gen: String },
    ImageEndpoints { gen: String },
    ImageDimension { gen: String, expected: usize, found: usize },
    FaceIncompatible { gen: String, axis: usize, sign: usize },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use MorphismViolation::*;
        match self {
            MissingState { id } => write!(f, "state '{id}' has no image"),
            UnknownState { id } => write!(f, "unknown state '{id}'"),
            MissingGenerator { id } => write!(f, "generator '{id}' has no image"),
            UnknownGenerator { id } => write!(f, "unknown generator '{id}'"),
            UnknownImageLetter { gen, id } => {
                write!(f, "image of '{gen}' uses unknown generator '{id}'")
            }
            ImageNotComposable { gen } => write!(f, "image word of '{gen}' is not composable"),
            ImageEndpoints { gen } => write!(f, "image word of '{gen}' has wrong endpoints"),
            ImageDimension { gen, expected, found } => {
                write!(f, "image of '{gen}' has dimension {found}, expected {expected}")
            }
            FaceIncompatible { gen, axis, sign } => {
                write!(f, "image of '{gen}' breaks face {axis}/{sign}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MorphismReport {
    pub violations: Vec<MorphismViolation>,
}

impl MorphismReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for MorphismReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "- {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
#[error("invalid flow morphism:\n{0}")]
pub struct MorphismError(pub MorphismReport);

/// A morphism of presentations: a state map plus a generator-to-word map of
/// equal dimension with corresponding endpoints and compatible faces.
#[derive(Clone, Debug)]
pub struct FlowMorphism {
    pub name: String,
    pub x: FlowPresentation,
    pub y: FlowPresentation,
    pub state_map: Vec<usize>,
    pub gen_map: Vec<Word>,
}

impl FlowMorphism {
    pub fn new(
        x: FlowPresentation,
        y: FlowPresentation,
        raw: &RawMorphism,
    ) -> Result<Self, MorphismError> {
        let mut report = MorphismReport::default();
        let mut state_map = vec![usize::MAX; x.state_count()];
        for (from, to) in &raw.state_map {
            match (x.state_id(from), y.state_id(to)) {
                (Some(a), Some(b)) => state_map[a] = b,
                (None, _) => {
                    report.violations.push(MorphismViolation::UnknownState { id: from.clone() })
                }
                (_, None) => {
                    report.violations.push(MorphismViolation::UnknownState { id: to.clone() })
                }
            }
        }
        for (i, m) in state_map.iter().enumerate() {
            if *m == usize::MAX {
                report
                    .violations
                    .push(MorphismViolation::MissingState { id: x.state_name(i).to_string() });
            }
        }
        let mut gen_map = vec![Word(Vec::new()); x.generators().len()];
        for (from, to) in &raw.gen_map {
            let Some(g) = x.generator_id(from) else {
                report.violations.push(MorphismViolation::UnknownGenerator { id: from.clone() });
                continue;
            };
            let mut letters = Vec::with_capacity(to.len());
            let mut ok = true;
            for letter in to {
                match y.generator_id(letter) {
                    Some(h) => letters.push(h),
                    None => {
                        report.violations.push(MorphismViolation::UnknownImageLetter {
                            gen: from.clone(),
                            id: letter.clone(),
                        });
                        ok = false;
                    }
                }
            }
            if ok {
                gen_map[g] = Word(letters);
            }
        }
        for (i, w) in gen_map.iter().enumerate() {
            if w.is_empty() {
                report
                    .violations
                    .push(MorphismViolation::MissingGenerator { id: x.generator(i).id.clone() });
            }
        }
        if !report.is_valid() {
            return Err(MorphismError(report));
        }
        let f = FlowMorphism { name: raw.name.clone(), x, y, state_map, gen_map };
        let report = f.validate();
        if report.is_valid() {
            Ok(f)
        } else {
            Err(MorphismError(report))
        }
    }

    pub fn identity(p: &FlowPresentation) -> Self {
        FlowMorphism {
            name: format!("id_{}", p.name()),
            x: p.clone(),
            y: p.clone(),
            state_map: (0..p.state_count()).collect(),
            gen_map: (0..p.generators().len()).map(Word::single).collect(),
        }
    }

    pub fn map_word(&self, w: &Word) -> Word {
        let mut out = Vec::new();
        for &g in &w.0 {
            out.extend_from_slice(&self.gen_map[g].0);
        }
        Word(out)
    }

    /// Endpoint, dimension, and face compatibility.
    pub fn validate(&self) -> MorphismReport {
        let mut report = MorphismReport::default();
        for (i, g) in self.x.generators().iter().enumerate() {
            let img = &self.gen_map[i];
            if !self.y.word_composable(img) {
                report
                    .violations
                    .push(MorphismViolation::ImageNotComposable { gen: g.id.clone() });
                continue;
            }
            let found = self.y.word_dim(img);
            if found != g.dim {
                report.violations.push(MorphismViolation::ImageDimension {
                    gen: g.id.clone(),
                    expected: g.dim,
                    found,
                });
                continue;
            }
            if self.y.word_source(img) != self.state_map[g.source]
                || self.y.word_target(img) != self.state_map[g.target]
            {
                report.violations.push(MorphismViolation::ImageEndpoints { gen: g.id.clone() });
                continue;
            }
            for axis in 1..=g.dim {
                for sign in 0..2 {
                    let lhs = self.map_word(&g.faces[axis - 1][sign]);
                    let rhs = self.y.word_face(img, axis, sign);
                    if lhs != rhs {
                        report.violations.push(MorphismViolation::FaceIncompatible {
                            gen: g.id.clone(),
                            axis,
                            sign,
                        });
                    }
                }
            }
        }
        report
    }
}
