//! Exact integer linear algebra: Smith normal form, homology of integer
//! chain complexes, chain maps, mapping cones, and exactness checking for
//! sequences of finitely generated abelian groups.
//!
//! Everything here works over arbitrary-precision integers; intermediate
//! entries of a Smith reduction overflow fixed-width types even on small
//! inputs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

use crate::cubical::{ChainComplex, SparseMat};

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("chain map does not commute with boundaries at degree {degree}")]
    ChainMapIdentity { degree: usize },
    #[error("denominator generators do not lie in the numerator lattice")]
    NotASubgroup,
    #[error("malformed exact sequence: {0}")]
    Structural(String),
}

// ---------------------------------------------------------------------------
// dense integer matrices

/// Dense matrix of arbitrary-precision integers, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(*v));
            }
        }
        m
    }

    /// Build from column vectors living in an ambient of `rows` coordinates.
    pub fn from_cols(rows: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = IntMatrix::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column has wrong length");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_sparse(s: &SparseMat) -> Self {
        let mut m = IntMatrix::zeros(s.rows, s.cols.len());
        for (j, col) in s.cols.iter().enumerate() {
            for (i, v) in col {
                m.set(*i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "shape mismatch in mul_vec");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = IntMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let swap = (k + 1..n).find(|&i| !a.get(i, k).is_zero());
                match swap {
                    None => return BigInt::zero(),
                    Some(i) => {
                        for j in 0..n {
                            let x = a.get(k, j).clone();
                            let y = a.get(i, j).clone();
                            a.set(k, j, y);
                            a.set(i, j, x);
                        }
                        sign = -sign;
                    }
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j);
                    a.set(i, j, num / &prev);
                }
            }
            for i in k + 1..n {
                a.set(i, k, BigInt::zero());
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1).clone()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// Smith normal form

/// Decomposition `u * m * v = d` with `u`, `v` unimodular and `d` diagonal
/// with a divisibility chain. The inverses are tracked during the reduction
/// so lattice computations do not need a separate inversion step.
pub struct Snf {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Snf {
    pub fn diag(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diag().iter().filter(|v| !v.is_zero()).count()
    }
}

struct SnfWork {
    d: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfWork {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.d.cols() {
            let x = self.d.get(a, j).clone();
            let y = self.d.get(b, j).clone();
            self.d.set(a, j, y);
            self.d.set(b, j, x);
        }
        for j in 0..self.u.cols() {
            let x = self.u.get(a, j).clone();
            let y = self.u.get(b, j).clone();
            self.u.set(a, j, y);
            self.u.set(b, j, x);
        }
        for i in 0..self.u_inv.rows() {
            let x = self.u_inv.get(i, a).clone();
            let y = self.u_inv.get(i, b).clone();
            self.u_inv.set(i, a, y);
            self.u_inv.set(i, b, x);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.d.rows() {
            let x = self.d.get(i, a).clone();
            let y = self.d.get(i, b).clone();
            self.d.set(i, a, y);
            self.d.set(i, b, x);
        }
        for i in 0..self.v.rows() {
            let x = self.v.get(i, a).clone();
            let y = self.v.get(i, b).clone();
            self.v.set(i, a, y);
            self.v.set(i, b, x);
        }
        for j in 0..self.v_inv.cols() {
            let x = self.v_inv.get(a, j).clone();
            let y = self.v_inv.get(b, j).clone();
            self.v_inv.set(a, j, y);
            self.v_inv.set(b, j, x);
        }
    }

    /// row a -= q * row b
    fn row_sub(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.d.cols() {
            let x = self.d.get(a, j) - q * self.d.get(b, j);
            self.d.set(a, j, x);
        }
        for j in 0..self.u.cols() {
            let x = self.u.get(a, j) - q * self.u.get(b, j);
            self.u.set(a, j, x);
        }
        // U_inv gains the inverse column operation: col b += q * col a
        for i in 0..self.u_inv.rows() {
            let x = self.u_inv.get(i, b) + q * self.u_inv.get(i, a);
            self.u_inv.set(i, b, x);
        }
    }

    /// col a -= q * col b
    fn col_sub(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.d.rows() {
            let x = self.d.get(i, a) - q * self.d.get(i, b);
            self.d.set(i, a, x);
        }
        for i in 0..self.v.rows() {
            let x = self.v.get(i, a) - q * self.v.get(i, b);
            self.v.set(i, a, x);
        }
        for j in 0..self.v_inv.cols() {
            let x = self.v_inv.get(b, j) + q * self.v_inv.get(a, j);
            self.v_inv.set(b, j, x);
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.d.cols() {
            let x = -self.d.get(a, j).clone();
            self.d.set(a, j, x);
        }
        for j in 0..self.u.cols() {
            let x = -self.u.get(a, j).clone();
            self.u.set(a, j, x);
        }
        for i in 0..self.u_inv.rows() {
            let x = -self.u_inv.get(i, a).clone();
            self.u_inv.set(i, a, x);
        }
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let rows = m.rows();
    let cols = m.cols();
    let mut w = SnfWork {
        d: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };

    for k in 0..rows.min(cols) {
        'pivot: loop {
            // smallest nonzero entry of the trailing submatrix becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if w.d.get(i, j).is_zero() {
                        continue;
                    }
                    match &best {
                        None => best = Some((i, j)),
                        Some((bi, bj)) => {
                            if w.d.get(i, j).abs() < w.d.get(*bi, *bj).abs() {
                                best = Some((i, j));
                            }
                        }
                    }
                }
            }
            let (pi, pj) = match best {
                None => break 'pivot, // trailing block is zero; done
                Some(p) => p,
            };
            w.swap_rows(k, pi);
            w.swap_cols(k, pj);
            if w.d.get(k, k).is_negative() {
                w.negate_row(k);
            }

            let pivot = w.d.get(k, k).clone();
            let mut dirty = false;
            for i in k + 1..rows {
                let q = w.d.get(i, k).div_floor(&pivot);
                w.row_sub(i, k, &q);
                if !w.d.get(i, k).is_zero() {
                    dirty = true;
                }
            }
            for j in k + 1..cols {
                let q = w.d.get(k, j).div_floor(&pivot);
                w.col_sub(j, k, &q);
                if !w.d.get(k, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'pivot;
            }
            // enforce divisibility of the trailing block by the pivot
            let mut fixed = true;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !w.d.get(i, j).mod_floor(&pivot).is_zero() {
                        let one = BigInt::one();
                        w.row_sub(k, i, &(-&one));
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break 'pivot;
            }
        }
        if w.d.get(k, k).is_zero() {
            break;
        }
    }

    Snf { u: w.u, u_inv: w.u_inv, d: w.d, v: w.v, v_inv: w.v_inv }
}

/// Basis of the column lattice of `m`: the nonzero columns of `u_inv * d`.
pub fn lattice_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let mut cols: Vec<Vec<BigInt>> = Vec::new();
    for (j, dj) in snf.diag().iter().enumerate() {
        if dj.is_zero() {
            continue;
        }
        let col = (0..m.rows()).map(|i| snf.u_inv.get(i, j) * dj).collect();
        cols.push(col);
    }
    IntMatrix::from_cols(m.rows(), &cols)
}

/// Basis of the integer kernel of `m`, as columns.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let diag = snf.diag();
    let mut cols: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..m.cols() {
        let zero_diag = j >= diag.len() || diag[j].is_zero();
        if zero_diag {
            cols.push(snf.v.col(j));
        }
    }
    IntMatrix::from_cols(m.cols(), &cols)
}

/// Exact solution of `m x = b` over the integers, if one exists.
pub fn solve(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(m.rows(), b.len());
    let snf = smith_normal_form(m);
    let y = snf.u.mul_vec(b);
    let diag = snf.diag();
    let mut t = vec![BigInt::zero(); m.cols()];
    for (i, yi) in y.iter().enumerate() {
        let di = if i < diag.len() { diag[i].clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !yi.is_zero() {
                return None;
            }
        } else {
            let (q, r) = yi.div_rem(&di);
            if !r.is_zero() {
                return None;
            }
            if i < t.len() {
                t[i] = q;
            }
        }
    }
    Some(snf.v.mul_vec(&t))
}

/// Does `b` lie in the column lattice of `m`?
pub fn in_lattice(m: &IntMatrix, b: &[BigInt]) -> bool {
    solve(m, b).is_some()
}

// ---------------------------------------------------------------------------
// finitely generated abelian groups

/// Finitely generated abelian group in canonical form: free rank plus
/// invariant factors `d1 | d2 | ...`, each at least 2.
#[derive(Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

impl Serialize for AbelianGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AbelianGroup", 3)?;
        st.serialize_field("betti", &self.betti)?;
        let torsion: Vec<String> = self.torsion.iter().map(|t| t.to_string()).collect();
        st.serialize_field("torsion", &torsion)?;
        st.serialize_field("display", &self.to_string())?;
        st.end()
    }
}

impl AbelianGroup {
    pub fn zero() -> Self {
        AbelianGroup { betti: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { betti: rank, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }

    /// Canonical invariant factors of a direct sum. Concatenating torsion
    /// lists does not preserve the divisibility chain, so renormalize via
    /// the Smith form of the block-diagonal relation matrix.
    pub fn direct_sum(groups: &[AbelianGroup]) -> AbelianGroup {
        let betti = groups.iter().map(|g| g.betti).sum();
        let factors: Vec<BigInt> =
            groups.iter().flat_map(|g| g.torsion.iter().cloned()).collect();
        if factors.is_empty() {
            return AbelianGroup { betti, torsion: Vec::new() };
        }
        let n = factors.len();
        let mut diag = IntMatrix::zeros(n, n);
        for (i, f) in factors.iter().enumerate() {
            diag.set(i, i, f.clone());
        }
        let snf = smith_normal_form(&diag);
        let torsion = snf.diag().into_iter().filter(|d| d > &BigInt::one()).collect();
        AbelianGroup { betti, torsion }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".to_string()),
            b => parts.push(format!("Z^{}", b)),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{}", d));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// The group `span(num) / span(den)` for column generating sets in a common
/// ambient free group. Fails if the denominator does not lie in the span of
/// the numerator.
pub fn subquotient(num: &IntMatrix, den: &IntMatrix) -> Result<AbelianGroup, LinalgError> {
    if num.rows() != den.rows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "subquotient ambients differ: {} vs {}",
            num.rows(),
            den.rows()
        )));
    }
    let basis = lattice_basis(num);
    let rank = basis.cols();
    let mut coord_cols = Vec::with_capacity(den.cols());
    for j in 0..den.cols() {
        let col = den.col(j);
        let t = solve(&basis, &col).ok_or(LinalgError::NotASubgroup)?;
        coord_cols.push(t);
    }
    let coords = IntMatrix::from_cols(rank, &coord_cols);
    let snf = smith_normal_form(&coords);
    let diag = snf.diag();
    let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
    let torsion = diag.into_iter().filter(|d| d > &BigInt::one()).collect();
    Ok(AbelianGroup { betti: rank - nonzero, torsion })
}

/// Homology of `c` in degree `n`. Degrees outside the complex give the zero
/// group.
pub fn homology(c: &ChainComplex, n: usize) -> AbelianGroup {
    if n >= c.len() {
        return AbelianGroup::zero();
    }
    let rank = c.rank(n);
    let cycles = match c.boundary(n) {
        Some(b) => kernel_basis(&IntMatrix::from_sparse(b)),
        None => IntMatrix::identity(rank),
    };
    let boundaries = match c.boundary(n + 1) {
        Some(b) => IntMatrix::from_sparse(b),
        None => IntMatrix::zeros(rank, 0),
    };
    subquotient(&cycles, &boundaries).expect("boundaries are cycles when dd = 0")
}

// ---------------------------------------------------------------------------
// chain maps and mapping cones

/// Degreewise integer matrices commuting with the boundaries.
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    pub maps: Vec<IntMatrix>,
}

impl ChainMap {
    pub fn map(&self, n: usize) -> IntMatrix {
        if n < self.maps.len() {
            self.maps[n].clone()
        } else {
            IntMatrix::zeros(self.target.rank(n), self.source.rank(n))
        }
    }

    /// Exact matrix identity `d_target . f_n = f_{n-1} . d_source` in every
    /// degree.
    pub fn validate(&self) -> Result<(), LinalgError> {
        let top = self.source.len().max(self.target.len());
        for n in 0..=top {
            let f_n = self.map(n);
            if f_n.rows() != self.target.rank(n) || f_n.cols() != self.source.rank(n) {
                return Err(LinalgError::DimensionMismatch(format!(
                    "chain map degree {n}: {}x{} against ranks {}x{}",
                    f_n.rows(),
                    f_n.cols(),
                    self.target.rank(n),
                    self.source.rank(n)
                )));
            }
            if n == 0 {
                continue;
            }
            let d_src = self
                .source
                .boundary(n)
                .map(IntMatrix::from_sparse)
                .unwrap_or_else(|| IntMatrix::zeros(self.source.rank(n - 1), self.source.rank(n)));
            let d_tgt = self
                .target
                .boundary(n)
                .map(IntMatrix::from_sparse)
                .unwrap_or_else(|| IntMatrix::zeros(self.target.rank(n - 1), self.target.rank(n)));
            let lhs = d_tgt.mul(&f_n);
            let rhs = self.map(n - 1).mul(&d_src);
            if lhs != rhs {
                return Err(LinalgError::ChainMapIdentity { degree: n });
            }
        }
        Ok(())
    }
}

/// Mapping cone with `cone_n = source_{n-1} (+) target_n` and
/// `d(x, y) = (-dx, dy - f(x))`. The source block comes first.
pub fn mapping_cone(f: &ChainMap) -> Result<ChainComplex, LinalgError> {
    f.validate()?;
    let top = self_top(f);
    let mut ranks = Vec::with_capacity(top + 1);
    let mut labels: Vec<Vec<String>> = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let src_part = if n > 0 { f.source.rank(n - 1) } else { 0 };
        ranks.push(src_part + f.target.rank(n));
        let mut lab = Vec::new();
        if n > 0 {
            lab.extend(f.source.labels(n - 1).iter().map(|l| format!("src:{l}")));
        }
        lab.extend(f.target.labels(n).iter().map(|l| format!("tgt:{l}")));
        labels.push(lab);
    }
    let mut boundaries = Vec::new();
    for n in 1..=top {
        let rows = ranks[n - 1];
        let src_rows = if n > 1 { f.source.rank(n - 2) } else { 0 };
        let mut cols: Vec<Vec<(usize, BigInt)>> = Vec::with_capacity(ranks[n]);
        // source block of degree n is source_{n-1}
        let d_src = f.source.boundary(n - 1);
        let f_low = f.map(n - 1);
        for j in 0..f.source.rank(n - 1) {
            let mut col: Vec<(usize, BigInt)> = Vec::new();
            if let Some(b) = d_src {
                for (i, v) in &b.cols[j] {
                    col.push((*i, -v.clone()));
                }
            }
            for i in 0..f_low.rows() {
                let v = f_low.get(i, j);
                if !v.is_zero() {
                    col.push((src_rows + i, -v.clone()));
                }
            }
            col.sort_by_key(|(i, _)| *i);
            cols.push(col);
        }
        // target block of degree n
        let d_tgt = f.target.boundary(n);
        for j in 0..f.target.rank(n) {
            let mut col: Vec<(usize, BigInt)> = Vec::new();
            if let Some(b) = d_tgt {
                for (i, v) in &b.cols[j] {
                    col.push((src_rows + i, v.clone()));
                }
            }
            cols.push(col);
        }
        boundaries.push(SparseMat { rows, cols });
    }
    let cone = ChainComplex::new(ranks, boundaries, labels);
    debug_assert!(cone.verify_dd().is_ok());
    Ok(cone)
}

fn self_top(f: &ChainMap) -> usize {
    // highest degree where the cone can be nonzero
    (f.source.len() + 1).max(f.target.len()).max(1)
}

// ---------------------------------------------------------------------------
// presented groups and exactness

/// A finitely generated abelian group presented as a subquotient
/// `span(gens) / span(rels)` of an ambient free group, with generators and
/// relations given as column vectors over the ambient basis.
#[derive(Clone)]
pub struct PresentedGroup {
    pub label: String,
    pub ambient: usize,
    pub gens: IntMatrix,
    pub rels: IntMatrix,
}

impl PresentedGroup {
    pub fn zero(label: impl Into<String>) -> Self {
        PresentedGroup {
            label: label.into(),
            ambient: 0,
            gens: IntMatrix::zeros(0, 0),
            rels: IntMatrix::zeros(0, 0),
        }
    }

    pub fn group(&self) -> AbelianGroup {
        subquotient(&self.gens, &self.rels).expect("relations lie in the generator span")
    }
}

/// A sequence of presented groups joined by explicit integer matrices on the
/// ambient free groups.
pub struct ExactSequence {
    pub groups: Vec<PresentedGroup>,
    pub maps: Vec<IntMatrix>,
}

#[derive(Clone, Serialize)]
pub struct NodeVerdict {
    pub label: String,
    pub exact: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Serialize)]
pub struct ExactnessReport {
    pub nodes: Vec<NodeVerdict>,
}

impl ExactnessReport {
    pub fn pass(&self) -> bool {
        self.nodes.iter().all(|n| n.exact)
    }
}

impl ExactSequence {
    fn structural_check(&self) -> Result<(), LinalgError> {
        if self.groups.len() < 2 {
            return Err(LinalgError::Structural("sequence needs at least two groups".into()));
        }
        if self.maps.len() + 1 != self.groups.len() {
            return Err(LinalgError::Structural(format!(
                "{} groups need {} maps, got {}",
                self.groups.len(),
                self.groups.len() - 1,
                self.maps.len()
            )));
        }
        for (i, g) in self.groups.iter().enumerate() {
            if g.gens.rows() != g.ambient || g.rels.rows() != g.ambient {
                return Err(LinalgError::Structural(format!(
                    "group {} ({}) has presentation vectors outside its ambient",
                    i, g.label
                )));
            }
            // relations must lie in the generator span
            for j in 0..g.rels.cols() {
                if !in_lattice(&g.gens, &g.rels.col(j)) {
                    return Err(LinalgError::Structural(format!(
                        "group {} ({}): relation {} outside generator span",
                        i, g.label, j
                    )));
                }
            }
        }
        for (i, m) in self.maps.iter().enumerate() {
            let src = &self.groups[i];
            let tgt = &self.groups[i + 1];
            if m.rows() != tgt.ambient || m.cols() != src.ambient {
                return Err(LinalgError::Structural(format!(
                    "map {}: shape {}x{} against ambients {} -> {}",
                    i,
                    m.rows(),
                    m.cols(),
                    src.ambient,
                    tgt.ambient
                )));
            }
            let tgt_span = tgt.gens.hconcat(&tgt.rels);
            for j in 0..src.gens.cols() {
                let img = m.mul_vec(&src.gens.col(j));
                if !in_lattice(&tgt_span, &img) {
                    return Err(LinalgError::Structural(format!(
                        "map {}: image of generator {} misses the target span",
                        i, j
                    )));
                }
            }
            for j in 0..src.rels.cols() {
                let img = m.mul_vec(&src.rels.col(j));
                if !in_lattice(&tgt.rels, &img) {
                    return Err(LinalgError::Structural(format!(
                        "map {}: relation {} not carried into target relations",
                        i, j
                    )));
                }
            }
        }
        Ok(())
    }

    /// Decide `im(incoming) = ker(outgoing)` exactly over the integers at
    /// every interior node.
    pub fn verify_exactness(&self) -> Result<ExactnessReport, LinalgError> {
        self.structural_check()?;
        let mut nodes = Vec::new();
        for i in 1..self.groups.len() - 1 {
            let g = &self.groups[i];
            let incoming = &self.maps[i - 1];
            let outgoing = &self.maps[i];
            let prev = &self.groups[i - 1];
            let next = &self.groups[i + 1];

            // image lattice: images of the previous generators plus relations
            let mut im_cols: Vec<Vec<BigInt>> = Vec::new();
            for j in 0..prev.gens.cols() {
                im_cols.push(incoming.mul_vec(&prev.gens.col(j)));
            }
            for j in 0..g.rels.cols() {
                im_cols.push(g.rels.col(j));
            }
            let im = IntMatrix::from_cols(g.ambient, &im_cols);

            // kernel lattice: x in span(gens) with outgoing(x) in span(next rels)
            let basis = lattice_basis(&g.gens);
            let mapped = outgoing.mul(&basis);
            let next_rel_basis = lattice_basis(&next.rels);
            let stacked = mapped.hconcat(&next_rel_basis);
            let ker = kernel_basis(&stacked);
            let mut ker_cols: Vec<Vec<BigInt>> = Vec::new();
            for j in 0..ker.cols() {
                let t: Vec<BigInt> = (0..basis.cols()).map(|r| ker.get(r, j).clone()).collect();
                ker_cols.push(basis.mul_vec(&t));
            }
            for j in 0..g.rels.cols() {
                ker_cols.push(g.rels.col(j));
            }
            let ker_gens = IntMatrix::from_cols(g.ambient, &ker_cols);

            let mut witness = None;
            // ker included in im?
            for j in 0..ker_gens.cols() {
                let v = ker_gens.col(j);
                if !in_lattice(&im, &v) {
                    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    witness = Some(format!("kernel element ({}) not in image", parts.join(", ")));
                    break;
                }
            }
            // im included in ker?
            if witness.is_none() {
                for j in 0..im.cols() {
                    let v = im.col(j);
                    if !in_lattice(&ker_gens, &v) {
                        let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                        witness =
                            Some(format!("image element ({}) not in kernel", parts.join(", ")));
                        break;
                    }
                }
            }
            nodes.push(NodeVerdict {
                label: g.label.clone(),
                exact: witness.is_none(),
                witness,
            });
        }
        Ok(ExactnessReport { nodes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn snf_identity() {
        let m = IntMatrix::identity(3);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.d, IntMatrix::identity(3));
    }

    #[test]
    fn snf_zero_one_by_one() {
        let m = IntMatrix::from_rows(&[vec![0]]);
        let snf = smith_normal_form(&m);
        assert!(snf.d.get(0, 0).is_zero());
    }

    #[test]
    fn snf_two_by_two() {
        // row/column reduction by hand: gcd of entries 2, |det| 8, so diag(2, 4)
        let m = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diag(), vec![big(2), big(4)]);
        assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.d);
        assert_eq!(snf.u.det().abs(), big(1));
        assert_eq!(snf.v.det().abs(), big(1));
    }

    #[test]
    fn snf_contract_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let r = rng.gen_range(1..=8);
            let c = rng.gen_range(1..=8);
            let mut m = IntMatrix::zeros(r, c);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, big(rng.gen_range(-9..=9)));
                }
            }
            let snf = smith_normal_form(&m);
            assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.d, "UMV = D");
            assert_eq!(snf.u.det().abs(), big(1));
            assert_eq!(snf.v.det().abs(), big(1));
            assert_eq!(snf.u.mul(&snf.u_inv), IntMatrix::identity(r));
            assert_eq!(snf.v.mul(&snf.v_inv), IntMatrix::identity(c));
            let diag = snf.diag();
            for w in diag.windows(2) {
                if !w[0].is_zero() && !w[1].is_zero() {
                    assert!(w[1].mod_floor(&w[0]).is_zero(), "divisibility chain");
                } else if w[0].is_zero() {
                    assert!(w[1].is_zero(), "zeros trail the chain");
                }
            }
            for d in &diag {
                assert!(!d.is_negative());
            }
        }
    }

    #[test]
    fn solve_and_kernel() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let x = solve(&m, &[big(4), big(9)]).unwrap();
        assert_eq!(x, vec![big(2), big(3)]);
        assert!(solve(&m, &[big(1), big(0)]).is_none());

        let m = IntMatrix::from_rows(&[vec![1, 1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.cols(), 2);
        for j in 0..2 {
            let img = m.mul_vec(&k.col(j));
            assert!(img[0].is_zero());
        }
    }

    #[test]
    fn subquotient_torsion() {
        // Z^2 / <(2, 0), (0, 1)> = Z/2
        let num = IntMatrix::identity(2);
        let den = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]);
        let g = subquotient(&num, &den).unwrap();
        assert_eq!(g, AbelianGroup { betti: 0, torsion: vec![big(2)] });
    }

    #[test]
    fn direct_sum_renormalizes_factors() {
        let a = AbelianGroup { betti: 1, torsion: vec![big(2)] };
        let b = AbelianGroup { betti: 0, torsion: vec![big(3)] };
        let s = AbelianGroup::direct_sum(&[a, b]);
        assert_eq!(s, AbelianGroup { betti: 1, torsion: vec![big(6)] });

        let a = AbelianGroup { betti: 0, torsion: vec![big(2)] };
        let b = AbelianGroup { betti: 0, torsion: vec![big(2)] };
        let s = AbelianGroup::direct_sum(&[a, b]);
        assert_eq!(s, AbelianGroup { betti: 0, torsion: vec![big(2), big(2)] });
    }

    #[test]
    fn doubled_edge_gives_torsion() {
        // ranks [1, 1] with boundary [2]: H_0 = Z/2, H_1 = 0
        use crate::cubical::{ChainComplex, SparseMat};
        let c = ChainComplex::new(
            vec![1, 1],
            vec![SparseMat { rows: 1, cols: vec![vec![(0, big(2))]] }],
            vec![vec!["v".into()], vec!["e".into()]],
        );
        assert_eq!(homology(&c, 0), AbelianGroup { betti: 0, torsion: vec![big(2)] });
        assert!(homology(&c, 1).is_zero());
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        use crate::cubical::{ChainComplex, SparseMat};
        let c = ChainComplex::new(
            vec![2, 1],
            vec![SparseMat { rows: 2, cols: vec![vec![(0, big(-1)), (1, big(1))]] }],
            vec![vec!["a".into(), "b".into()], vec!["e".into()]],
        );
        let f = ChainMap {
            source: c.clone(),
            target: c.clone(),
            maps: vec![IntMatrix::identity(2), IntMatrix::identity(1)],
        };
        let cone = mapping_cone(&f).unwrap();
        for n in 0..cone.len() {
            assert!(homology(&cone, n).is_zero(), "degree {n}");
        }
    }

    #[test]
    fn cone_from_zero_source_is_the_target() {
        use crate::cubical::{ChainComplex, SparseMat};
        let c = ChainComplex::new(
            vec![1, 1],
            vec![SparseMat { rows: 1, cols: vec![Vec::new()] }],
            vec![vec!["v".into()], vec!["e".into()]],
        );
        let zero = ChainComplex::new(vec![0], Vec::new(), vec![Vec::new()]);
        let f = ChainMap {
            source: zero,
            target: c.clone(),
            maps: vec![IntMatrix::zeros(1, 0), IntMatrix::zeros(1, 0)],
        };
        let cone = mapping_cone(&f).unwrap();
        for n in 0..c.len() {
            assert_eq!(homology(&cone, n), homology(&c, n));
        }
    }

    #[test]
    fn non_commuting_chain_map_rejected() {
        use crate::cubical::{ChainComplex, SparseMat};
        let seg = ChainComplex::new(
            vec![2, 1],
            vec![SparseMat { rows: 2, cols: vec![vec![(0, big(-1)), (1, big(1))]] }],
            vec![vec!["a".into(), "b".into()], vec!["e".into()]],
        );
        let mut swap = IntMatrix::zeros(2, 2);
        swap.set(0, 1, big(1));
        swap.set(1, 0, big(1));
        // swapping endpoints without negating the edge breaks the identity
        let f = ChainMap {
            source: seg.clone(),
            target: seg.clone(),
            maps: vec![swap, IntMatrix::identity(1)],
        };
        match f.validate() {
            Err(LinalgError::ChainMapIdentity { degree: 1 }) => {}
            other => panic!("expected failure at degree 1, got {other:?}"),
        }
    }

    #[test]
    fn display_forms() {
        assert_eq!(AbelianGroup::zero().to_string(), "0");
        assert_eq!(AbelianGroup::free(1).to_string(), "Z");
        assert_eq!(AbelianGroup::free(2).to_string(), "Z^2");
        let g = AbelianGroup { betti: 1, torsion: vec![big(2), big(6)] };
        assert_eq!(g.to_string(), "Z + Z/2 + Z/6");
    }

    #[test]
    fn exactness_short_sequences() {
        // 0 -> Z --id--> Z -> 0
        let seq = ExactSequence {
            groups: vec![
                PresentedGroup::zero("0"),
                PresentedGroup {
                    label: "Z".into(),
                    ambient: 1,
                    gens: IntMatrix::identity(1),
                    rels: IntMatrix::zeros(1, 0),
                },
                PresentedGroup {
                    label: "Z'".into(),
                    ambient: 1,
                    gens: IntMatrix::identity(1),
                    rels: IntMatrix::zeros(1, 0),
                },
                PresentedGroup::zero("0"),
            ],
            maps: vec![
                IntMatrix::zeros(1, 0),
                IntMatrix::identity(1),
                IntMatrix::zeros(0, 1),
            ],
        };
        assert!(seq.verify_exactness().unwrap().pass());

        // 0 -> Z --x2--> Z -> Z/2 -> 0
        let seq = ExactSequence {
            groups: vec![
                PresentedGroup::zero("0"),
                PresentedGroup {
                    label: "Z".into(),
                    ambient: 1,
                    gens: IntMatrix::identity(1),
                    rels: IntMatrix::zeros(1, 0),
                },
                PresentedGroup {
                    label: "Z'".into(),
                    ambient: 1,
                    gens: IntMatrix::identity(1),
                    rels: IntMatrix::zeros(1, 0),
                },
                PresentedGroup {
                    label: "Z/2".into(),
                    ambient: 1,
                    gens: IntMatrix::identity(1),
                    rels: IntMatrix::from_rows(&[vec![2]]),
                },
                PresentedGroup::zero("0"),
            ],
            maps: vec![
                IntMatrix::zeros(1, 0),
                IntMatrix::from_rows(&[vec![2]]),
                IntMatrix::identity(1),
                IntMatrix::zeros(0, 1),
            ],
        };
        assert!(seq.verify_exactness().unwrap().pass());

        // 0 -> Z --x2--> Z -> Z -> 0 fails at the third node with a witness
        let seq = ExactSequence {
            groups: vec![
                PresentedGroup::zero("0"),
                PresentedGroup {
                    label: "Z".into(),
                    ambient: 1,
                    gens: IntMatrix::identity(1),
                    rels: IntMatrix::zeros(1, 0),
                },
                PresentedGroup {
                    label: "Z'".into(),
                    ambient: 1,
                    gens: IntMatrix::identity(1),
                    rels: IntMatrix::zeros(1, 0),
                },
                PresentedGroup {
                    label: "Z''".into(),
                    ambient: 1,
                    gens: IntMatrix::identity(1),
                    rels: IntMatrix::zeros(1, 0),
                },
                PresentedGroup::zero("0"),
            ],
            maps: vec![
                IntMatrix::zeros(1, 0),
                IntMatrix::from_rows(&[vec![2]]),
                IntMatrix::identity(1),
                IntMatrix::zeros(0, 1),
            ],
        };
        let report = seq.verify_exactness().unwrap();
        assert!(!report.pass());
        let bad: Vec<&NodeVerdict> = report.nodes.iter().filter(|n| !n.exact).collect();
        // im(x2) = 2Z but ker(id) = 0 at the middle node; the tail is exact
        assert_eq!(bad.len(), 1);
        assert!(bad[0].label == "Z'" && bad[0].witness.is_some());
    }
}
