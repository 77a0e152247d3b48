//! Finite precubical complexes, their normalized integer chain complexes,
//! and quotient-by-relations chain constructions.
//!
//! Degenerate cubes are never stored; a map whose image would be degenerate
//! is represented by the zero vector, which is what normalized chains do to
//! degeneracies.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

use crate::linalg::{self, AbelianGroup, IntMatrix};

#[derive(Debug, Error)]
pub enum CubicalError {
    #[error("invalid precubical complex:\n{0}")]
    Invalid(CubicalReport),
    #[error("relation vector in degree {degree} has index {index} outside rank {rank}")]
    RelationOutOfRange { degree: usize, index: usize, rank: usize },
    #[error("relation span is not closed under the boundary in degree {degree}")]
    RelationNotBoundaryClosed { degree: usize },
}

// ---------------------------------------------------------------------------
// sparse chain data

/// Sparse column vector: (row index, coefficient) pairs, sorted, nonzero.
pub type SparseVec = Vec<(usize, BigInt)>;

/// Column-major sparse integer matrix.
#[derive(Clone, Debug)]
pub struct SparseMat {
    pub rows: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols: vec![Vec::new(); cols] }
    }
}

/// Combine sparse terms, dropping zero coefficients.
pub fn normalize_sparse(mut terms: Vec<(usize, BigInt)>) -> SparseVec {
    terms.sort_by_key(|(i, _)| *i);
    let mut out: SparseVec = Vec::with_capacity(terms.len());
    for (i, c) in terms {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc += c,
            _ => out.push((i, c)),
        }
        if let Some((_, acc)) = out.last() {
            if acc.is_zero() {
                out.pop();
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// cubes

/// Reference to a cube by dimension and index; kept unresolved so that
/// malformed complexes can be represented and reported.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CubeRef {
    pub dim: usize,
    pub index: usize,
}

/// A single cube. The dimension is the number of axes; for each axis `i`
/// (0-based here, 1-based in formulas) the two faces are `faces[i][0]`
/// (lower) and `faces[i][1]` (upper).
#[derive(Clone, Debug)]
pub struct Cube {
    pub label: String,
    pub faces: Vec<[CubeRef; 2]>,
}

impl Cube {
    pub fn dim(&self) -> usize {
        self.faces.len()
    }
}

/// Finite precubical complex, cubes indexed by dimension.
#[derive(Clone, Default)]
pub struct PrecubicalComplex {
    pub cubes: Vec<Vec<Cube>>,
}

#[derive(Debug, Clone, Serialize)]
pub enum CubicalViolation {
    FaceDimension { cube: String, axis: usize, sign: usize, expected: usize, found: usize },
    FaceUnresolved { cube: String, axis: usize, sign: usize },
    PrecubicalIdentity { cube: String, i: usize, j: usize, alpha: usize, beta: usize },
}

impl fmt::Display for CubicalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CubicalViolation::FaceDimension { cube, axis, sign, expected, found } => write!(
                f,
                "cube {cube}: face d_{axis}^{sign} has dimension {found}, expected {expected}"
            ),
            CubicalViolation::FaceUnresolved { cube, axis, sign } => {
                write!(f, "cube {cube}: face d_{axis}^{sign} does not resolve")
            }
            CubicalViolation::PrecubicalIdentity { cube, i, j, alpha, beta } => write!(
                f,
                "cube {cube}: d_{i}^{alpha} d_{j}^{beta} != d_{}^{beta} d_{i}^{alpha}",
                j - 1
            ),
        }
    }
}

/// Validation outcome; empty iff the complex is valid.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CubicalReport {
    pub violations: Vec<CubicalViolation>,
}

impl CubicalReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for CubicalReport {
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

impl PrecubicalComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of cubes in dimension `d`.
    pub fn count(&self, d: usize) -> usize {
        self.cubes.get(d).map_or(0, |v| v.len())
    }

    pub fn top_dim(&self) -> usize {
        self.cubes.len().saturating_sub(1)
    }

    pub fn add_cube(&mut self, dim: usize, label: String, faces: Vec<[CubeRef; 2]>) -> CubeRef {
        assert_eq!(faces.len(), dim, "a dim-{dim} cube needs {dim} face pairs");
        while self.cubes.len() <= dim {
            self.cubes.push(Vec::new());
        }
        self.cubes[dim].push(Cube { label, faces });
        CubeRef { dim, index: self.cubes[dim].len() - 1 }
    }

    pub fn cube(&self, r: CubeRef) -> Option<&Cube> {
        self.cubes.get(r.dim).and_then(|v| v.get(r.index))
    }

    /// Reports every violated face-dimension or precubical-identity
    /// constraint; never aborts.
    pub fn validate(&self) -> CubicalReport {
        let mut report = CubicalReport::default();
        for (d, layer) in self.cubes.iter().enumerate() {
            for cube in layer {
                for (axis, pair) in cube.faces.iter().enumerate() {
                    for (sign, fref) in pair.iter().enumerate() {
                        if self.cube(*fref).is_none() {
                            report.violations.push(CubicalViolation::FaceUnresolved {
                                cube: cube.label.clone(),
                                axis: axis + 1,
                                sign,
                            });
                        } else if fref.dim + 1 != d {
                            report.violations.push(CubicalViolation::FaceDimension {
                                cube: cube.label.clone(),
                                axis: axis + 1,
                                sign,
                                expected: d - 1,
                                found: fref.dim,
                            });
                        }
                    }
                }
            }
        }
        if !report.violations.is_empty() {
            return report; // identities only make sense on resolvable faces
        }
        for layer in self.cubes.iter().skip(2) {
            for cube in layer {
                let d = cube.dim();
                for j in 2..=d {
                    for i in 1..j {
                        for (alpha, beta) in
                            [(0usize, 0usize), (0, 1), (1, 0), (1, 1)]
                        {
                            let lhs = {
                                let fj = cube.faces[j - 1][beta];
                                self.cube(fj).unwrap().faces[i - 1][alpha]
                            };
                            let rhs = {
                                let fi = cube.faces[i - 1][alpha];
                                self.cube(fi).unwrap().faces[j - 2][beta]
                            };
                            if lhs != rhs {
                                report.violations.push(CubicalViolation::PrecubicalIdentity {
                                    cube: cube.label.clone(),
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
        }
        report
    }

    /// Normalized chain complex. Sign convention:
    /// `dx = sum_i (-1)^i (d_i^0 x - d_i^1 x)` with axes numbered from 1.
    pub fn chain_complex(&self) -> Result<ChainComplex, CubicalError> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(CubicalError::Invalid(report));
        }
        Ok(self.chain_complex_unchecked())
    }

    pub fn chain_complex_unchecked(&self) -> ChainComplex {
        let top = self.cubes.len();
        let mut ranks = Vec::with_capacity(top);
        let mut labels = Vec::with_capacity(top);
        for layer in &self.cubes {
            ranks.push(layer.len());
            labels.push(layer.iter().map(|c| c.label.clone()).collect());
        }
        let mut boundaries = Vec::new();
        for d in 1..top {
            let rows = ranks[d - 1];
            let mut cols = Vec::with_capacity(ranks[d]);
            for cube in &self.cubes[d] {
                let mut terms: Vec<(usize, BigInt)> = Vec::with_capacity(2 * d);
                for (axis0, pair) in cube.faces.iter().enumerate() {
                    // (-1)^i with i = axis0 + 1
                    let sgn = if (axis0 + 1) % 2 == 1 { -1i64 } else { 1 };
                    terms.push((pair[0].index, BigInt::from(sgn)));
                    terms.push((pair[1].index, BigInt::from(-sgn)));
                }
                cols.push(normalize_sparse(terms));
            }
            boundaries.push(SparseMat { rows, cols });
        }
        ChainComplex::new(ranks, boundaries, labels)
    }

    /// Degreewise disjoint union (labels kept as-is).
    pub fn disjoint_union(&self, other: &PrecubicalComplex) -> PrecubicalComplex {
        let top = self.cubes.len().max(other.cubes.len());
        let mut out = PrecubicalComplex::new();
        for d in 0..top {
            for cube in self.cubes.get(d).into_iter().flatten() {
                out.add_cube(d, cube.label.clone(), cube.faces.clone());
            }
        }
        for d in 0..top {
            let shift: Vec<usize> = (0..top).map(|k| self.count(k)).collect();
            for cube in other.cubes.get(d).into_iter().flatten() {
                let faces = cube
                    .faces
                    .iter()
                    .map(|pair| {
                        [
                            CubeRef { dim: pair[0].dim, index: pair[0].index + shift[pair[0].dim] },
                            CubeRef { dim: pair[1].dim, index: pair[1].index + shift[pair[1].dim] },
                        ]
                    })
                    .collect();
                out.add_cube(d, cube.label.clone(), faces);
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// chain complexes

/// Chain complex of free abelian groups with labeled bases. `boundaries[n-1]`
/// maps degree `n` to degree `n-1`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    ranks: Vec<usize>,
    boundaries: Vec<SparseMat>,
    labels: Vec<Vec<String>>,
}

impl ChainComplex {
    pub fn new(ranks: Vec<usize>, boundaries: Vec<SparseMat>, labels: Vec<Vec<String>>) -> Self {
        assert_eq!(ranks.len(), labels.len());
        if !ranks.is_empty() {
            assert_eq!(boundaries.len(), ranks.len() - 1, "one boundary per positive degree");
        }
        for (n, b) in boundaries.iter().enumerate() {
            assert_eq!(b.rows, ranks[n], "boundary row count");
            assert_eq!(b.cols.len(), ranks[n + 1], "boundary column count");
        }
        ChainComplex { ranks, boundaries, labels }
    }

    pub fn empty() -> Self {
        ChainComplex { ranks: Vec::new(), boundaries: Vec::new(), labels: Vec::new() }
    }

    /// Number of tracked degrees (0..len).
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn rank(&self, n: usize) -> usize {
        self.ranks.get(n).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Boundary from degree `n` into degree `n-1`; `None` outside range or
    /// for `n = 0`.
    pub fn boundary(&self, n: usize) -> Option<&SparseMat> {
        if n == 0 {
            return None;
        }
        self.boundaries.get(n - 1)
    }

    pub fn labels(&self, n: usize) -> &[String] {
        self.labels.get(n).map_or(&[], |v| v.as_slice())
    }

    /// Check that consecutive boundary matrices compose to zero.
    pub fn verify_dd(&self) -> Result<(), usize> {
        for n in 2..self.len() {
            let high = self.boundary(n).unwrap();
            let low = self.boundary(n - 1).unwrap();
            for col in &high.cols {
                let mut acc: HashMap<usize, BigInt> = HashMap::new();
                for (i, c) in col {
                    for (k, d) in &low.cols[*i] {
                        let e = acc.entry(*k).or_insert_with(BigInt::zero);
                        *e += c * d;
                    }
                }
                if acc.values().any(|v| !v.is_zero()) {
                    return Err(n);
                }
            }
        }
        Ok(())
    }

    /// Degreewise direct sum; the other complex's basis is appended.
    pub fn direct_sum(&self, other: &ChainComplex) -> ChainComplex {
        let top = self.len().max(other.len());
        let mut ranks = Vec::with_capacity(top);
        let mut labels = Vec::with_capacity(top);
        for n in 0..top {
            ranks.push(self.rank(n) + other.rank(n));
            let mut lab: Vec<String> = self.labels(n).to_vec();
            lab.extend(other.labels(n).iter().cloned());
            labels.push(lab);
        }
        let mut boundaries = Vec::new();
        for n in 1..top {
            let rows = ranks[n - 1];
            let mut cols = Vec::with_capacity(ranks[n]);
            if let Some(b) = self.boundary(n) {
                cols.extend(b.cols.iter().cloned());
            } else {
                cols.extend(std::iter::repeat_n(Vec::new(), self.rank(n)));
            }
            let off = self.rank(n - 1);
            if let Some(b) = other.boundary(n) {
                for col in &b.cols {
                    cols.push(col.iter().map(|(i, c)| (i + off, c.clone())).collect());
                }
            } else {
                cols.extend(std::iter::repeat_n(Vec::new(), other.rank(n)));
            }
            boundaries.push(SparseMat { rows, cols });
        }
        ChainComplex::new(ranks, boundaries, labels)
    }
}

// ---------------------------------------------------------------------------
// quotient by relations

/// Substitution target of a basis element under the generated congruence.
#[derive(Clone, Debug)]
enum Target {
    Root,
    Zero,
    Link { coef: BigInt, to: usize },
}

struct DegreeClasses {
    targets: Vec<Target>,
}

impl DegreeClasses {
    fn new(rank: usize) -> Self {
        DegreeClasses { targets: vec![Target::Root; rank] }
    }

    /// Resolve index `k` to `None` (zero) or `(coef, root)`, compressing the
    /// path walked.
    fn find(&mut self, k: usize) -> Option<(BigInt, usize)> {
        let mut path = vec![k];
        let root = loop {
            let last = *path.last().unwrap();
            match &self.targets[last] {
                Target::Root => break last,
                Target::Zero => {
                    for &p in &path {
                        self.targets[p] = Target::Zero;
                    }
                    return None;
                }
                Target::Link { to, .. } => path.push(*to),
            }
        };
        path.pop();
        // rewrite coefficients from the node nearest the root outward
        let mut running = BigInt::one();
        for &p in path.iter().rev() {
            let Target::Link { coef, .. } = &self.targets[p] else { unreachable!() };
            running = coef * running;
            self.targets[p] = Target::Link { coef: running.clone(), to: root };
        }
        if path.is_empty() {
            Some((BigInt::one(), root))
        } else {
            Some((running, root))
        }
    }

    fn reduce(&mut self, v: &SparseVec) -> SparseVec {
        let mut terms = Vec::with_capacity(v.len());
        for (i, c) in v {
            if let Some((coef, root)) = self.find(*i) {
                terms.push((root, c * coef));
            }
        }
        normalize_sparse(terms)
    }
}

/// A chain complex presented as a degreewise cokernel: the ambient free
/// complex together with relation vectors whose span is closed under the
/// boundary. Construction eliminates every relation with a unit pivot;
/// anything left over is carried as explicit relations on the reduced
/// presentation.
#[derive(Debug)]
pub struct QuotientComplex {
    pub ambient: ChainComplex,
    pub reduced: ChainComplex,
    pub leftover: Vec<Vec<SparseVec>>,
    pub relation_count: Vec<usize>,
}

impl QuotientComplex {
    /// Homology of the quotient presentation in degree `n`.
    pub fn homology(&self, n: usize) -> AbelianGroup {
        let has_leftover = self.leftover.iter().any(|v| !v.is_empty());
        if !has_leftover {
            return linalg::homology(&self.reduced, n);
        }
        if n >= self.reduced.len() {
            return AbelianGroup::zero();
        }
        // cycles mod relations: x with dx in span(R_{n-1}); boundaries plus R_n
        let rank = self.reduced.rank(n);
        let d_n = self
            .reduced
            .boundary(n)
            .map(IntMatrix::from_sparse)
            .unwrap_or_else(|| IntMatrix::zeros(if n == 0 { 0 } else { self.reduced.rank(n - 1) }, rank));
        let rel_below = self.relation_matrix(n.wrapping_sub(1));
        let cycles = if n == 0 {
            IntMatrix::identity(rank)
        } else {
            let stacked = d_n.hconcat(&rel_below);
            let ker = linalg::kernel_basis(&stacked);
            let mut cols = Vec::new();
            for j in 0..ker.cols() {
                let x: Vec<BigInt> = (0..rank).map(|i| ker.get(i, j).clone()).collect();
                cols.push(x);
            }
            IntMatrix::from_cols(rank, &cols)
        };
        let d_above = self
            .reduced
            .boundary(n + 1)
            .map(IntMatrix::from_sparse)
            .unwrap_or_else(|| IntMatrix::zeros(rank, 0));
        let den = d_above.hconcat(&self.relation_matrix(n));
        linalg::subquotient(&cycles, &den).expect("quotient boundaries are cycles")
    }

    fn relation_matrix(&self, n: usize) -> IntMatrix {
        let rank = self.reduced.rank(n);
        let empty = Vec::new();
        let rels = self.leftover.get(n).unwrap_or(&empty);
        let cols: Vec<Vec<BigInt>> = rels
            .iter()
            .map(|r| {
                let mut col = vec![BigInt::zero(); rank];
                for (i, c) in r {
                    col[*i] = c.clone();
                }
                col
            })
            .collect();
        IntMatrix::from_cols(rank, &cols)
    }

    /// The quotient as a free complex on surviving classes, available when
    /// every relation was eliminated by a unit pivot.
    pub fn to_free(&self) -> Option<&ChainComplex> {
        if self.leftover.iter().all(|v| v.is_empty()) {
            Some(&self.reduced)
        } else {
            None
        }
    }
}

/// Present the cokernel of a relation family on a chain complex. Relations
/// are consumed through a callback so callers can stream very large families
/// without materializing them; the callback is invoked twice (once to build
/// the congruence, once for the boundary-closure check).
#[allow(clippy::needless_range_loop)] // parallel tables are indexed together
pub fn quotient_by_relations<F>(
    complex: ChainComplex,
    mut emit: F,
) -> Result<QuotientComplex, CubicalError>
where
    F: FnMut(&mut dyn FnMut(usize, SparseVec) -> Result<(), CubicalError>) -> Result<(), CubicalError>,
{
    let top = complex.len();
    let mut classes: Vec<DegreeClasses> =
        (0..top).map(|n| DegreeClasses::new(complex.rank(n))).collect();
    let mut pending: Vec<Vec<SparseVec>> = vec![Vec::new(); top];
    let mut relation_count = vec![0usize; top];

    {
        let mut sink = |degree: usize, vec: SparseVec| -> Result<(), CubicalError> {
            if degree >= top {
                return Err(CubicalError::RelationOutOfRange { degree, index: 0, rank: 0 });
            }
            let rank = complex.rank(degree);
            for (i, _) in &vec {
                if *i >= rank {
                    return Err(CubicalError::RelationOutOfRange { degree, index: *i, rank });
                }
            }
            relation_count[degree] += 1;
            absorb(&mut classes[degree], &mut pending[degree], vec);
            Ok(())
        };
        emit(&mut sink)?;
    }

    // revisit deferred relations until nothing changes
    for (degree, queue) in pending.iter_mut().enumerate() {
        loop {
            let mut changed = false;
            let mut keep = Vec::new();
            for rel in queue.drain(..) {
                let r = classes[degree].reduce(&rel);
                match classify(&r) {
                    Classification::Trivial => changed = true,
                    Classification::Eliminates => {
                        apply(&mut classes[degree], &r);
                        changed = true;
                    }
                    Classification::Stuck => keep.push(r),
                }
            }
            *queue = keep;
            if !changed {
                break;
            }
        }
    }

    // build the reduced complex on surviving roots
    let mut new_index: Vec<Vec<Option<usize>>> = Vec::with_capacity(top);
    let mut ranks = Vec::with_capacity(top);
    let mut labels = Vec::with_capacity(top);
    for n in 0..top {
        let mut idx = vec![None; complex.rank(n)];
        let mut lab = Vec::new();
        let mut count = 0;
        for k in 0..complex.rank(n) {
            if let Some((c, root)) = classes[n].find(k) {
                if root == k && c.is_one() {
                    idx[k] = Some(count);
                    lab.push(complex.labels(n)[k].clone());
                    count += 1;
                }
            }
        }
        new_index.push(idx);
        ranks.push(count);
        labels.push(lab);
    }
    let mut boundaries = Vec::new();
    for n in 1..top {
        let rows = ranks[n - 1];
        let mut cols = Vec::with_capacity(ranks[n]);
        for k in 0..complex.rank(n) {
            if new_index[n][k].is_none() {
                continue;
            }
            let src_col = complex
                .boundary(n)
                .map(|b| b.cols[k].clone())
                .unwrap_or_default();
            let reduced = classes[n - 1].reduce(&src_col);
            let col: Vec<(usize, BigInt)> = reduced
                .into_iter()
                .map(|(i, c)| (new_index[n - 1][i].expect("roots survive"), c))
                .collect();
            cols.push(normalize_sparse(col));
        }
        boundaries.push(SparseMat { rows, cols });
    }
    let mut leftover: Vec<Vec<SparseVec>> = vec![Vec::new(); top];
    for n in 0..top {
        for rel in &pending[n] {
            let r = classes[n].reduce(rel);
            if r.is_empty() {
                continue;
            }
            let mapped: Vec<(usize, BigInt)> = r
                .into_iter()
                .map(|(i, c)| (new_index[n][i].expect("roots survive"), c))
                .collect();
            leftover[n].push(normalize_sparse(mapped));
        }
    }
    let reduced = ChainComplex::new(ranks, boundaries, labels);

    // boundary-closure check: the boundary of every relation must reduce to
    // a combination of leftover relations (zero when none remain)
    {
        let mut sink = |degree: usize, vec: SparseVec| -> Result<(), CubicalError> {
            if degree == 0 {
                return Ok(());
            }
            let mut terms: Vec<(usize, BigInt)> = Vec::new();
            if let Some(b) = complex.boundary(degree) {
                for (i, c) in &vec {
                    for (k, d) in &b.cols[*i] {
                        terms.push((*k, c * d));
                    }
                }
            }
            let boundary = normalize_sparse(terms);
            let reduced_b = classes[degree - 1].reduce(&boundary);
            if reduced_b.is_empty() {
                return Ok(());
            }
            if leftover[degree - 1].is_empty() {
                return Err(CubicalError::RelationNotBoundaryClosed { degree });
            }
            let mapped: Vec<(usize, BigInt)> = reduced_b
                .into_iter()
                .map(|(i, c)| (new_index[degree - 1][i].expect("roots survive"), c))
                .collect();
            let v = sparse_to_dense(&normalize_sparse(mapped), reduced.rank(degree - 1));
            let rel_mat = {
                let cols: Vec<Vec<BigInt>> = leftover[degree - 1]
                    .iter()
                    .map(|r| sparse_to_dense(r, reduced.rank(degree - 1)))
                    .collect();
                IntMatrix::from_cols(reduced.rank(degree - 1), &cols)
            };
            if !linalg::in_lattice(&rel_mat, &v) {
                return Err(CubicalError::RelationNotBoundaryClosed { degree });
            }
            Ok(())
        };
        emit(&mut sink)?;
    }

    Ok(QuotientComplex { ambient: complex, reduced, leftover, relation_count })
}

fn sparse_to_dense(v: &SparseVec, len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, c) in v {
        out[*i] = c.clone();
    }
    out
}

enum Classification {
    Trivial,
    Eliminates,
    Stuck,
}

fn classify(r: &SparseVec) -> Classification {
    if r.is_empty() {
        return Classification::Trivial;
    }
    // substitution targets are single links, so only one- and two-term
    // relations with a unit coefficient can be eliminated in place
    if r.len() <= 2 && r.iter().any(|(_, c)| c.abs().is_one()) {
        Classification::Eliminates
    } else {
        Classification::Stuck
    }
}

/// Eliminate one basis element using a relation with a unit coefficient:
/// write that element in terms of the rest.
fn apply(classes: &mut DegreeClasses, r: &SparseVec) {
    let (pos, _) = r
        .iter()
        .enumerate()
        .find(|(_, (_, c))| c.abs().is_one())
        .expect("caller checked for a unit pivot");
    let (k, ck) = &r[pos];
    if r.len() == 1 {
        classes.targets[*k] = Target::Zero;
        return;
    }
    if r.len() == 2 {
        let (j, cj) = &r[if pos == 0 { 1 } else { 0 }];
        // ck * e_k + cj * e_j = 0  =>  e_k = -(cj / ck) e_j
        let coef = -(cj * ck); // ck in {1, -1} so 1/ck = ck
        classes.targets[*k] = Target::Link { coef, to: *j };
        return;
    }
    unreachable!("apply called only for vectors of length <= 2");
}

fn absorb(classes: &mut DegreeClasses, pending: &mut Vec<SparseVec>, vec: SparseVec) {
    let r = classes.reduce(&vec);
    match classify(&r) {
        Classification::Trivial => {}
        Classification::Eliminates => apply(classes, &r),
        Classification::Stuck => pending.push(r),
    }
}

/// Spec-shaped entry point: quotient of `complex` by an explicit per-degree
/// relation family.
pub fn relation_cokernel(
    complex: ChainComplex,
    relations: &[Vec<SparseVec>],
) -> Result<QuotientComplex, CubicalError> {
    quotient_by_relations(complex, |sink| {
        for (degree, rels) in relations.iter().enumerate() {
            for r in rels {
                sink(degree, r.clone())?;
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// set-level quotient (oracle)

/// Quotient of the cube set itself by identifications and deletions, kept as
/// an independent check against the chain-level cokernel. Merges identify
/// two cubes of the same dimension; kills send a cube (and anything merged
/// with it) to zero.
#[allow(clippy::needless_range_loop)] // parallel tables are indexed together
pub fn set_level_quotient(
    complex: &PrecubicalComplex,
    merges: &[(CubeRef, CubeRef)],
    kills: &[CubeRef],
) -> ChainComplex {
    let top = complex.cubes.len();
    // plain union-find with a kill flag per class
    let mut parent: Vec<Vec<usize>> =
        (0..top).map(|d| (0..complex.count(d)).collect()).collect();
    let mut dead: Vec<Vec<bool>> = (0..top).map(|d| vec![false; complex.count(d)]).collect();

    fn find(parent: &mut [Vec<usize>], d: usize, k: usize) -> usize {
        let mut k = k;
        while parent[d][k] != k {
            parent[d][k] = parent[d][parent[d][k]];
            k = parent[d][k];
        }
        k
    }

    for (a, b) in merges {
        assert_eq!(a.dim, b.dim, "merge across dimensions");
        let ra = find(&mut parent, a.dim, a.index);
        let rb = find(&mut parent, b.dim, b.index);
        if ra != rb {
            let killed = dead[a.dim][ra] || dead[a.dim][rb];
            parent[a.dim][ra] = rb;
            dead[a.dim][rb] = killed;
        }
    }
    for k in kills {
        let r = find(&mut parent, k.dim, k.index);
        dead[k.dim][r] = true;
    }

    let mut new_index: Vec<Vec<Option<usize>>> = Vec::with_capacity(top);
    let mut ranks = Vec::with_capacity(top);
    let mut labels: Vec<Vec<String>> = Vec::with_capacity(top);
    for d in 0..top {
        let mut idx = vec![None; complex.count(d)];
        let mut lab = Vec::new();
        let mut count = 0;
        for k in 0..complex.count(d) {
            let r = find(&mut parent, d, k);
            if r == k && !dead[d][k] {
                idx[k] = Some(count);
                lab.push(complex.cubes[d][k].label.clone());
                count += 1;
            }
        }
        new_index.push(idx);
        ranks.push(count);
        labels.push(lab);
    }
    let mut boundaries = Vec::new();
    for d in 1..top {
        let rows = ranks[d - 1];
        let mut cols = Vec::with_capacity(ranks[d]);
        for k in 0..complex.count(d) {
            let r = find(&mut parent, d, k);
            if r != k || dead[d][k] {
                continue;
            }
            // descend the boundary of the class representative
            let cube = &complex.cubes[d][k];
            let mut terms: Vec<(usize, BigInt)> = Vec::new();
            for (axis0, pair) in cube.faces.iter().enumerate() {
                let sgn = if (axis0 + 1) % 2 == 1 { -1i64 } else { 1 };
                for (si, fref) in pair.iter().enumerate() {
                    let root = find(&mut parent, d - 1, fref.index);
                    if dead[d - 1][root] {
                        continue;
                    }
                    let coef = if si == 0 { sgn } else { -sgn };
                    terms.push((new_index[d - 1][root].unwrap(), BigInt::from(coef)));
                }
            }
            cols.push(normalize_sparse(terms));
        }
        boundaries.push(SparseMat { rows, cols });
    }
    ChainComplex::new(ranks, boundaries, labels)
}
