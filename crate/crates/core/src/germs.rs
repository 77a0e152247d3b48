//! Branching and merging germ complexes, their homology, the brute-force
//! coequalizer oracle, T-homotopy checking, and the long exact sequence of a
//! morphism's cone.
//!
//! The germ complex at a state has one basis element per generator emitted
//! there; boundaries reduce face words to their leading (or trailing) letter.
//! The brute-force route quotients the full word complex by every
//! 2-factorization relation instead and must agree.

use num_bigint::BigInt;
use serde::Serialize;
use std::collections::{HashMap, HashSet, VecDeque};
use thiserror::Error;

use crate::cubical::{
    normalize_sparse, quotient_by_relations, ChainComplex, CubicalError, QuotientComplex,
    SparseMat,
};
use crate::flow::{compile_paths, compile_paths_from, FlowError, FlowMorphism, FlowPresentation, Word};
use crate::linalg::{
    self, mapping_cone, AbelianGroup, ChainMap, ExactSequence, ExactnessReport, IntMatrix,
    LinalgError, NodeVerdict, PresentedGroup,
};

#[derive(Debug, Error)]
pub enum GermError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Cubical(#[from] CubicalError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("word is not composable in this presentation")]
    NotAWord,
    #[error("induced chain map fails the chain identity at degree {degree} (encoder bug)")]
    InducedMapInconsistent { degree: usize },
    #[error(
        "oracle mismatch at state '{state}' degree {degree}: germ route {germ}, brute force {brute}"
    )]
    OracleMismatch { state: String, degree: usize, germ: AbelianGroup, brute: AbelianGroup },
}

/// Which quotient of the path space is taken.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Side {
    Branching,
    Merging,
}

// ---------------------------------------------------------------------------
// germ reduction

/// Normal form of a word's class in the branching (resp. merging) quotient:
/// the first letter when every later letter is an edge, the last letter when
/// every earlier letter is an edge, and zero otherwise.
pub fn germ_reduce(p: &FlowPresentation, w: &Word, side: Side) -> Result<Option<usize>, GermError> {
    if !p.word_composable(w) {
        return Err(GermError::NotAWord);
    }
    let letters = &w.0;
    match side {
        Side::Branching => {
            let tail_dim: usize = letters[1..].iter().map(|&g| p.generator(g).dim).sum();
            Ok(if tail_dim == 0 { Some(letters[0]) } else { None })
        }
        Side::Merging => {
            let head_dim: usize =
                letters[..letters.len() - 1].iter().map(|&g| p.generator(g).dim).sum();
            Ok(if head_dim == 0 { Some(letters[letters.len() - 1]) } else { None })
        }
    }
}

// ---------------------------------------------------------------------------
// germ complexes

/// Per-state chain complex whose degree-n basis is the dimension-n
/// generators emitted (branching) or absorbed (merging) at the state.
pub struct GermComplex {
    pub state: usize,
    pub side: Side,
    pub complex: ChainComplex,
    /// Generator indices behind each degree's basis.
    pub basis: Vec<Vec<usize>>,
}

fn germ_basis(p: &FlowPresentation, state: usize, side: Side) -> Vec<Vec<usize>> {
    let top = p.max_generator_dim();
    let mut basis: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
    for (i, g) in p.generators().iter().enumerate() {
        let anchored = match side {
            Side::Branching => g.source == state,
            Side::Merging => g.target == state,
        };
        if anchored {
            basis[g.dim].push(i);
        }
    }
    while basis.len() > 1 && basis.last().is_some_and(|v| v.is_empty()) {
        basis.pop();
    }
    basis
}

fn germ_complex_for(
    p: &FlowPresentation,
    state: usize,
    side: Side,
) -> Result<GermComplex, GermError> {
    // merging is branching in the opposite flow; the per-degree sign
    // discrepancy between the two readings is a chain isomorphism
    if side == Side::Merging {
        let op = p.opposite();
        let mut gc = germ_complex_for(&op, state, Side::Branching)?;
        gc.side = Side::Merging;
        return Ok(gc);
    }
    let basis = germ_basis(p, state, side);
    let pos: HashMap<usize, (usize, usize)> = basis
        .iter()
        .enumerate()
        .flat_map(|(d, v)| v.iter().enumerate().map(move |(i, &g)| (g, (d, i))))
        .collect();
    let ranks: Vec<usize> = basis.iter().map(|v| v.len()).collect();
    let labels: Vec<Vec<String>> = basis
        .iter()
        .map(|v| v.iter().map(|&g| p.generator(g).id.clone()).collect())
        .collect();
    let mut boundaries = Vec::new();
    for d in 1..basis.len() {
        let rows = ranks[d - 1];
        let mut cols = Vec::with_capacity(ranks[d]);
        for &g in &basis[d] {
            let mut terms: Vec<(usize, BigInt)> = Vec::new();
            for axis in 1..=d {
                let sgn: i64 = if axis % 2 == 1 { -1 } else { 1 };
                for (sign, coef) in [(0usize, sgn), (1usize, -sgn)] {
                    let fw = &p.generator(g).faces[axis - 1][sign];
                    if let Some(h) = germ_reduce(p, fw, Side::Branching)? {
                        let (hd, hi) = pos[&h];
                        debug_assert_eq!(hd, d - 1);
                        terms.push((hi, BigInt::from(coef)));
                    }
                }
            }
            cols.push(normalize_sparse(terms));
        }
        boundaries.push(SparseMat { rows, cols });
    }
    let complex = ChainComplex::new(ranks, boundaries, labels);
    debug_assert!(complex.verify_dd().is_ok());
    Ok(GermComplex { state, side, complex, basis })
}

/// Branching germ complex at a state.
pub fn branching_complex(p: &FlowPresentation, state: usize) -> Result<GermComplex, GermError> {
    germ_complex_for(p, state, Side::Branching)
}

/// Merging germ complex at a state.
pub fn merging_complex(p: &FlowPresentation, state: usize) -> Result<GermComplex, GermError> {
    germ_complex_for(p, state, Side::Merging)
}

impl GermComplex {
    pub fn is_empty(&self) -> bool {
        self.complex.ranks().iter().all(|&r| r == 0)
    }

    /// Number of path-connected components (unreduced H0 rank, counted by
    /// union-find over the degree-0 basis).
    pub fn components(&self) -> usize {
        let n = self.complex.rank(0);
        if n == 0 {
            return 0;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut k: usize) -> usize {
            while p[k] != k {
                p[k] = p[p[k]];
                k = p[k];
            }
            k
        }
        if let Some(b) = self.complex.boundary(1) {
            for col in &b.cols {
                if col.len() == 2 {
                    let a = find(&mut parent, col[0].0);
                    let b2 = find(&mut parent, col[1].0);
                    if a != b2 {
                        parent[a] = b2;
                    }
                }
            }
        }
        (0..n).filter(|&k| find(&mut parent, k) == k).count()
    }

    /// Reduced homology; the empty complex contributes zero in every degree.
    pub fn reduced_homology(&self, n: usize) -> AbelianGroup {
        if self.is_empty() {
            return AbelianGroup::zero();
        }
        linalg::homology(&self.augmented(), n + 1)
    }

    /// Unreduced homology.
    pub fn homology(&self, n: usize) -> AbelianGroup {
        linalg::homology(&self.complex, n)
    }

    /// The complex with one Z glued in below degree 0 via the all-ones
    /// augmentation.
    fn augmented(&self) -> ChainComplex {
        augment(&self.complex, &vec![0usize; self.complex.rank(0)], 1, &["*".to_string()])
    }
}

/// Shift a complex up one degree and glue a chosen degree-0 group under it:
/// each old degree-0 basis element is sent to the base row given by
/// `targets`.
fn augment(
    c: &ChainComplex,
    targets: &[usize],
    base_rank: usize,
    base_labels: &[String],
) -> ChainComplex {
    let mut ranks = Vec::with_capacity(c.len() + 1);
    let mut labels = Vec::with_capacity(c.len() + 1);
    ranks.push(base_rank);
    labels.push(base_labels.to_vec());
    for n in 0..c.len() {
        ranks.push(c.rank(n));
        labels.push(c.labels(n).to_vec());
    }
    let mut boundaries = Vec::new();
    let eps = SparseMat {
        rows: base_rank,
        cols: targets.iter().map(|&t| vec![(t, BigInt::from(1))]).collect(),
    };
    boundaries.push(eps);
    for n in 1..c.len() {
        boundaries.push(c.boundary(n).unwrap().clone());
    }
    ChainComplex::new(ranks, boundaries, labels)
}

/// Component count of the germ complex at one state.
pub fn germ_pi0(p: &FlowPresentation, state: usize, side: Side) -> Result<usize, GermError> {
    Ok(germ_complex_for(p, state, side)?.components())
}

/// Sum of germ component counts over all states: the rank of the unreduced
/// H0 of the whole branching (or merging) space.
pub fn germ_pi0_total(p: &FlowPresentation, side: Side) -> Result<usize, GermError> {
    let mut total = 0;
    for s in 0..p.state_count() {
        total += germ_pi0(p, s, side)?;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// total complexes and branching homology

/// Basis bookkeeping for the state-summed germ complex: state blocks in
/// sorted order, generators sorted within each block.
pub struct TotalBasis {
    pub by_degree: Vec<Vec<usize>>,
    pub pos: HashMap<usize, (usize, usize)>,
}

/// The direct sum over states of the germ complexes, with deterministic
/// block order.
pub fn total_complex(
    p: &FlowPresentation,
    side: Side,
) -> Result<(ChainComplex, TotalBasis), GermError> {
    if side == Side::Merging {
        let op = p.opposite();
        return total_complex(&op, Side::Branching);
    }
    let top = p.max_generator_dim();
    let mut by_degree: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
    for state in 0..p.state_count() {
        for (d, v) in germ_basis(p, state, side).iter().enumerate() {
            by_degree[d].extend(v.iter().copied());
        }
    }
    let pos: HashMap<usize, (usize, usize)> = by_degree
        .iter()
        .enumerate()
        .flat_map(|(d, v)| v.iter().enumerate().map(move |(i, &g)| (g, (d, i))))
        .collect();
    let ranks: Vec<usize> = by_degree.iter().map(|v| v.len()).collect();
    let labels: Vec<Vec<String>> = by_degree
        .iter()
        .map(|v| v.iter().map(|&g| p.generator(g).id.clone()).collect())
        .collect();
    let mut boundaries = Vec::new();
    for d in 1..by_degree.len() {
        let rows = ranks[d - 1];
        let mut cols = Vec::with_capacity(ranks[d]);
        for &g in &by_degree[d] {
            let mut terms: Vec<(usize, BigInt)> = Vec::new();
            for axis in 1..=d {
                let sgn: i64 = if axis % 2 == 1 { -1 } else { 1 };
                for (sign, coef) in [(0usize, sgn), (1usize, -sgn)] {
                    let fw = &p.generator(g).faces[axis - 1][sign];
                    if let Some(h) = germ_reduce(p, fw, Side::Branching)? {
                        terms.push((pos[&h].1, BigInt::from(coef)));
                    }
                }
            }
            cols.push(normalize_sparse(terms));
        }
        boundaries.push(SparseMat { rows, cols });
    }
    let complex = ChainComplex::new(ranks, boundaries, labels);
    debug_assert!(complex.verify_dd().is_ok());
    Ok((complex, TotalBasis { by_degree, pos }))
}

/// Per-state summary row.
#[derive(Clone, Serialize)]
pub struct StateGerms {
    pub state: String,
    pub components: usize,
    /// Reduced homology of the germ complex, degrees 0..
    pub reduced: Vec<AbelianGroup>,
}

/// The graded branching (or merging) homology of a presentation, plus the
/// per-state table behind it.
#[derive(Clone, Serialize)]
pub struct BranchingHomology {
    pub side: Side,
    /// Degrees 0..=(max generator dimension + 1); zero beyond.
    pub groups: Vec<AbelianGroup>,
    pub per_state: Vec<StateGerms>,
}

impl BranchingHomology {
    pub fn group(&self, n: usize) -> AbelianGroup {
        self.groups.get(n).cloned().unwrap_or_else(AbelianGroup::zero)
    }

    pub fn top_degree(&self) -> usize {
        self.groups.len().saturating_sub(1)
    }

    pub fn table_equal(&self, other: &BranchingHomology) -> bool {
        let top = self.top_degree().max(other.top_degree());
        (0..=top).all(|n| self.group(n) == other.group(n))
    }
}

/// Branching homology: the homology of the state-augmented total germ
/// complex. Degree 0 is free on the final states, degree n+1 collects the
/// degree-n germ cycles over all states.
pub fn branching_homology(p: &FlowPresentation) -> Result<BranchingHomology, GermError> {
    homology_for(p, Side::Branching)
}

/// Merging homology, computed on the opposite flow.
pub fn merging_homology(p: &FlowPresentation) -> Result<BranchingHomology, GermError> {
    homology_for(p, Side::Merging)
}

fn homology_for(p: &FlowPresentation, side: Side) -> Result<BranchingHomology, GermError> {
    if side == Side::Merging {
        let op = p.opposite();
        let mut h = homology_for(&op, Side::Branching)?;
        h.side = Side::Merging;
        return Ok(h);
    }
    let (total, basis) = total_complex(p, side)?;
    // augmentation sends a degree-0 germ class to its source state
    let targets: Vec<usize> =
        basis.by_degree[0].iter().map(|&g| p.generator(g).source).collect();
    let aug = augment(&total, &targets, p.state_count(), p.states());
    let top = p.max_generator_dim() + 1;
    let groups = (0..=top).map(|n| linalg::homology(&aug, n)).collect();
    let mut per_state = Vec::with_capacity(p.state_count());
    for state in 0..p.state_count() {
        let gc = germ_complex_for(p, state, side)?;
        let reduced = (0..=p.max_generator_dim()).map(|n| gc.reduced_homology(n)).collect();
        per_state.push(StateGerms {
            state: p.state_name(state).to_string(),
            components: gc.components(),
            reduced,
        });
    }
    Ok(BranchingHomology { side, groups, per_state })
}

// ---------------------------------------------------------------------------
// brute-force coequalizer

/// Literal coequalizer of the composition and projection maps on the word
/// complex at one state: every 2-factorization `w = a.b` contributes the
/// relation `[w] - [a]` when `b` is all edges (projection hits `a`) and
/// `[w]` alone otherwise (projection is degenerate, so zero in normalized
/// chains).
pub fn brute_force_branching(
    p: &FlowPresentation,
    state: usize,
    maxdim: usize,
) -> Result<QuotientComplex, GermError> {
    let pc = compile_paths_from(p, state, maxdim)?;
    let chains = pc.complex.chain_complex()?;
    let q = quotient_by_relations(chains, |sink| {
        for layer in &pc.words {
            for w in layer {
                if w.len() < 2 {
                    continue;
                }
                let widx = pc.cube_of(w).expect("compiled word");
                for cut in 1..w.len() {
                    let suffix_dim: usize =
                        w.0[cut..].iter().map(|&g| p.generator(g).dim).sum();
                    let rel = if suffix_dim == 0 {
                        let prefix = Word(w.0[..cut].to_vec());
                        let pidx = pc.cube_of(&prefix).expect("prefixes are compiled");
                        normalize_sparse(vec![
                            (widx.index, BigInt::from(1)),
                            (pidx.index, BigInt::from(-1)),
                        ])
                    } else {
                        vec![(widx.index, BigInt::from(1))]
                    };
                    sink(widx.dim, rel)?;
                }
            }
        }
        Ok(())
    })?;
    Ok(q)
}

/// Compare germ-reduction homology against the brute-force coequalizer at
/// every state, in degrees `0..=top`.
pub fn oracle_compare(p: &FlowPresentation, maxdim: usize, top: usize) -> Result<(), GermError> {
    for state in 0..p.state_count() {
        let germ = branching_complex(p, state)?;
        let brute = brute_force_branching(p, state, maxdim)?;
        for n in 0..=top {
            let g = germ.homology(n);
            let b = brute.homology(n);
            if g != b {
                return Err(GermError::OracleMismatch {
                    state: p.state_name(state).to_string(),
                    degree: n,
                    germ: g,
                    brute: b,
                });
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// induced chain maps

/// Chain map induced on total branching complexes: a basis generator goes to
/// the germ reduction of its image word.
pub fn induced_chain_map(f: &FlowMorphism) -> Result<ChainMap, GermError> {
    let (cx, bx) = total_complex(&f.x, Side::Branching)?;
    let (cy, by) = total_complex(&f.y, Side::Branching)?;
    let top = cx.len().max(cy.len());
    let mut maps = Vec::with_capacity(top);
    for n in 0..top {
        let mut m = IntMatrix::zeros(cy.rank(n), cx.rank(n));
        if n < bx.by_degree.len() {
            for (j, &g) in bx.by_degree[n].iter().enumerate() {
                let img = f.map_word(&Word::single(g));
                if let Some(h) = germ_reduce(&f.y, &img, Side::Branching)? {
                    let (hd, hi) = by.pos[&h];
                    debug_assert_eq!(hd, n);
                    m.set(hi, j, BigInt::from(1));
                }
            }
        }
        maps.push(m);
    }
    let cm = ChainMap { source: cx, target: cy, maps };
    cm.validate().map_err(|e| match e {
        LinalgError::ChainMapIdentity { degree } => GermError::InducedMapInconsistent { degree },
        other => GermError::Linalg(other),
    })?;
    Ok(cm)
}

// ---------------------------------------------------------------------------
// T-homotopy

#[derive(Clone, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub witnesses: Vec<String>,
}

impl Verdict {
    fn ok() -> Self {
        Verdict { pass: true, witnesses: Vec::new() }
    }

    fn fail(witnesses: Vec<String>) -> Self {
        Verdict { pass: false, witnesses }
    }
}

/// Verdicts for the three conditions of a T-homotopy equivalence:
/// restriction isomorphism, singleton germs at new states, and the
/// surrounded relation.
#[derive(Clone, Serialize)]
pub struct TReport {
    pub restriction_iso: Verdict,
    pub singleton_germs: Verdict,
    pub surrounded: Verdict,
}

impl TReport {
    pub fn pass(&self) -> bool {
        self.restriction_iso.pass && self.singleton_germs.pass && self.surrounded.pass
    }
}

/// Check the three conditions of a T-homotopy equivalence.
pub fn check_t_homotopy(f: &FlowMorphism) -> Result<TReport, GermError> {
    let image: HashSet<usize> = f.state_map.iter().copied().collect();

    // (1) restriction isomorphism
    let mut witnesses = Vec::new();
    if image.len() != f.state_map.len() {
        witnesses.push("state map is not injective".to_string());
    }
    if witnesses.is_empty() {
        if image.len() == f.y.state_count() {
            // surjective on states: isomorphism iff generators biject by
            // single letters
            let mut seen: HashMap<usize, usize> = HashMap::new();
            for (g, img) in f.gen_map.iter().enumerate() {
                if img.len() != 1 {
                    witnesses.push(format!(
                        "generator '{}' maps to a composite word",
                        f.x.generator(g).id
                    ));
                } else if let Some(prev) = seen.insert(img.0[0], g) {
                    witnesses.push(format!(
                        "generators '{}' and '{}' share an image",
                        f.x.generator(prev).id,
                        f.x.generator(g).id
                    ));
                }
            }
            for (h, gen) in f.y.generators().iter().enumerate() {
                if !seen.contains_key(&h) {
                    witnesses.push(format!("generator '{}' has no preimage", gen.id));
                }
            }
        } else {
            // compare path complexes: images of X-words must exhaust the
            // Y-words running between image states
            let cap = f.x.default_dim_cap().max(f.y.default_dim_cap());
            let px = compile_paths(&f.x, cap)?;
            let py = compile_paths(&f.y, cap)?;
            let mut images: HashSet<Word> = HashSet::new();
            for layer in &px.words {
                for w in layer {
                    let img = f.map_word(w);
                    if !images.insert(img.clone()) {
                        witnesses.push(format!(
                            "two paths share the image '{}'",
                            f.y.word_name(&img)
                        ));
                    }
                }
            }
            for layer in &py.words {
                for w in layer {
                    let s = f.y.word_source(w);
                    let t = f.y.word_target(w);
                    if image.contains(&s) && image.contains(&t) && !images.contains(w) {
                        witnesses.push(format!(
                            "path '{}' between image states has no preimage",
                            f.y.word_name(w)
                        ));
                    }
                }
            }
        }
    }
    let restriction_iso =
        if witnesses.is_empty() { Verdict::ok() } else { Verdict::fail(witnesses) };

    // (2) singleton branching and merging germs at every new state
    let mut witnesses = Vec::new();
    for state in 0..f.y.state_count() {
        if image.contains(&state) {
            continue;
        }
        for side in [Side::Branching, Side::Merging] {
            let basis = germ_basis(&f.y, state, side);
            let zero_cubes = basis.first().map_or(0, |v| v.len());
            let higher: usize = basis.iter().skip(1).map(|v| v.len()).sum();
            if zero_cubes != 1 || higher != 0 {
                witnesses.push(format!(
                    "state '{}': {:?} germ has {} zero-cubes and {} higher cubes",
                    f.y.state_name(state),
                    side,
                    zero_cubes,
                    higher
                ));
            }
        }
    }
    let singleton_germs =
        if witnesses.is_empty() { Verdict::ok() } else { Verdict::fail(witnesses) };

    // (3) every new state is surrounded by the image
    let n = f.y.state_count();
    let mut fwd = vec![false; n];
    let mut bwd = vec![false; n];
    let mut queue: VecDeque<usize> = image.iter().copied().collect();
    for &s in &queue {
        fwd[s] = true;
    }
    while let Some(s) = queue.pop_front() {
        for g in f.y.generators() {
            if g.source == s && !fwd[g.target] {
                fwd[g.target] = true;
                queue.push_back(g.target);
            }
        }
    }
    let mut queue: VecDeque<usize> = image.iter().copied().collect();
    for &s in &queue {
        bwd[s] = true;
    }
    while let Some(s) = queue.pop_front() {
        for g in f.y.generators() {
            if g.target == s && !bwd[g.source] {
                bwd[g.source] = true;
                queue.push_back(g.source);
            }
        }
    }
    let mut witnesses = Vec::new();
    for state in 0..n {
        if image.contains(&state) {
            continue;
        }
        if !(fwd[state] && bwd[state]) {
            witnesses.push(format!(
                "state '{}' is not surrounded by the image",
                f.y.state_name(state)
            ));
        }
    }
    let surrounded = if witnesses.is_empty() { Verdict::ok() } else { Verdict::fail(witnesses) };

    Ok(TReport { restriction_iso, singleton_germs, surrounded })
}

// ---------------------------------------------------------------------------
// long exact sequence

/// The assembled long exact sequence of a morphism's cone on total branching
/// complexes: the three group columns, the per-node exactness verdicts, and
/// the branching-homology translation of the cone column.
#[derive(Clone, Serialize)]
pub struct LesReport {
    /// Unreduced homology of the total branching complex of X, degrees 0..
    pub x_groups: Vec<AbelianGroup>,
    pub y_groups: Vec<AbelianGroup>,
    pub cone_groups: Vec<AbelianGroup>,
    pub nodes: Vec<NodeVerdict>,
    pub exact: bool,
}

impl LesReport {
    /// Degree-`n` (chain) groups become branching homology in degree `n+1`
    /// for `n >= 1`; the bottom row stays in unreduced path-component terms.
    pub fn translated_cone(&self) -> Vec<(String, AbelianGroup)> {
        let mut rows = Vec::new();
        for n in (1..self.cone_groups.len()).rev() {
            rows.push((format!("H^-_{}(Cf)", n + 1), self.cone_groups[n].clone()));
        }
        rows.push(("H_0(germs Cf)".to_string(), self.cone_groups[0].clone()));
        rows
    }
}

fn homology_node(c: &ChainComplex, n: usize, label: String) -> PresentedGroup {
    let rank = c.rank(n);
    let gens = match c.boundary(n) {
        Some(b) if rank > 0 => linalg::kernel_basis(&IntMatrix::from_sparse(b)),
        _ => IntMatrix::identity(rank),
    };
    let rels = match c.boundary(n + 1) {
        Some(b) => IntMatrix::from_sparse(b),
        None => IntMatrix::zeros(rank, 0),
    };
    PresentedGroup { label, ambient: rank, gens, rels }
}

/// Build the long exact sequence of the cone of `f` and verify exactness at
/// every node.
pub fn les_report(f: &FlowMorphism, top: Option<usize>) -> Result<LesReport, GermError> {
    let fmap = induced_chain_map(f)?;
    let cone = mapping_cone(&fmap)?;
    let natural_top = cone.len().saturating_sub(1).max(1);
    let top = top.map_or(natural_top, |t| t.min(natural_top).max(1));

    let cx = &fmap.source;
    let cy = &fmap.target;
    let x_groups: Vec<AbelianGroup> = (0..=top).map(|n| linalg::homology(cx, n)).collect();
    let y_groups: Vec<AbelianGroup> = (0..=top).map(|n| linalg::homology(cy, n)).collect();
    let cone_groups: Vec<AbelianGroup> = (0..=top).map(|n| linalg::homology(&cone, n)).collect();

    let mut groups = vec![PresentedGroup::zero("0")];
    let mut maps: Vec<IntMatrix> = Vec::new();
    maps.push(IntMatrix::zeros(cx.rank(top), 0));
    for n in (0..=top).rev() {
        groups.push(homology_node(cx, n, format!("H_{n}(X)")));
        groups.push(homology_node(cy, n, format!("H_{n}(Y)")));
        groups.push(homology_node(&cone, n, format!("H_{n}(Cf)")));
        // f_*: X_n -> Y_n
        maps.push(fmap.map(n));
        // inclusion Y_n -> cone_n = X_{n-1} (+) Y_n
        let src_rows = if n > 0 { cx.rank(n - 1) } else { 0 };
        let mut incl = IntMatrix::zeros(cone.rank(n), cy.rank(n));
        for i in 0..cy.rank(n) {
            incl.set(src_rows + i, i, BigInt::from(1));
        }
        maps.push(incl);
        if n > 0 {
            // connecting map: project the cone onto its X block
            let mut proj = IntMatrix::zeros(cx.rank(n - 1), cone.rank(n));
            for i in 0..cx.rank(n - 1) {
                proj.set(i, i, BigInt::from(1));
            }
            maps.push(proj);
        }
    }
    groups.push(PresentedGroup::zero("0"));
    maps.push(IntMatrix::zeros(0, cone.rank(0)));

    let seq = ExactSequence { groups, maps };
    let report: ExactnessReport = seq.verify_exactness()?;
    let exact = report.pass();
    Ok(LesReport { x_groups, y_groups, cone_groups, nodes: report.nodes, exact })
}
