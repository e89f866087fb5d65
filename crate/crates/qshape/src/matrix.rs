//! Dense exact matrices and the elimination routines everything else is
//! built on: reduced echelon forms, kernels, solving, and subquotient
//! dimensions.
//!
//! Pivot selection is deterministic (leftmost column, then topmost row) so
//! all derived bases are reproducible across runs.

use crate::scalar::{parse_scalar, FieldSpec, Scalar};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    entries: Vec<Scalar>, // row-major, rows * cols
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize, field: FieldSpec) -> Matrix {
        Matrix {
            rows,
            cols,
            field,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Matrix {
        let mut m = Matrix::zero(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            for e in &row {
                debug_assert_eq!(e.field(), field);
            }
            entries.extend(row);
        }
        Matrix { rows: r, cols: c, field, entries }
    }

    pub fn from_cols(field: FieldSpec, cols: Vec<Vec<Scalar>>) -> Matrix {
        let c = cols.len();
        let r = cols.first().map(|x| x.len()).unwrap_or(0);
        assert!(cols.iter().all(|x| x.len() == r), "ragged columns");
        let mut m = Matrix::zero(r, c, field);
        for (j, col) in cols.into_iter().enumerate() {
            for (i, e) in col.into_iter().enumerate() {
                m.set(i, j, e);
            }
        }
        m
    }

    /// Convenience constructor from integer literals.
    pub fn from_i64(field: FieldSpec, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&n| Scalar::from_i64(n, field)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        debug_assert_eq!(v.field(), self.field);
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn row(&self, r: usize) -> Vec<Scalar> {
        (0..self.cols).map(|c| self.at(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zero(self.cols, self.rows, self.field);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.at(r, c).clone());
            }
        }
        m
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        assert_eq!(self.field, rhs.field);
        let mut out = Matrix::zero(self.rows, rhs.cols, self.field);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = &(a * b) + out.at(i, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        acc = &acc + &(self.at(i, j) * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for i in 0..self.rows * self.cols {
            out.entries[i] = &out.entries[i] + &rhs.entries[i];
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = &*e * s;
        }
        out
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&Scalar::from_i64(-1, self.field))
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, field: self.field, entries }
    }

    /// Puts `other` to the right of `self`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Matrix::zero(self.rows, self.cols + other.cols, self.field);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.at(r, c).clone());
            }
            for c in 0..other.cols {
                m.set(r, self.cols + c, other.at(r, c).clone());
            }
        }
        m
    }

    /// Writes `block` into `self` at offset `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.at(r, c).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zero(rows, cols, self.field);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, self.at(r0 + r, c0 + c).clone());
            }
        }
        m
    }

    /// Reduced row-echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    let a = m.at(row, c).clone();
                    let b = m.at(pr, c).clone();
                    m.set(row, c, b);
                    m.set(pr, c, a);
                }
            }
            let inv = m.at(row, col).inverse().expect("pivot must be invertible");
            for c in col..m.cols {
                let v = &*m.at(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || m.at(r, col).is_zero() {
                    continue;
                }
                let f = m.at(r, col).clone();
                for c in col..m.cols {
                    let v = &*m.at(r, c) - &(&f * m.at(row, c));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{ v : M v = 0 }`, one vector per free column, in reduced
    /// echelon normal form (the free coordinate of each vector is 1, pivot
    /// coordinates carry the negated elimination coefficients).
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (ri, &pc) in pivots.iter().enumerate() {
                let coeff = r.at(ri, free);
                if !coeff.is_zero() {
                    v[pc] = coeff.neg();
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `M x = b`. Returns the unique solution that is zero in all
    /// non-pivot coordinates, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows, "dimension mismatch in solve");
        let rhs = Matrix::from_cols(self.field, vec![b.to_vec()]);
        let aug = self.hstack(&rhs);
        let (r, pivots) = aug.rref();
        // Inconsistent iff the last column is a pivot.
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = r.at(ri, self.cols).clone();
        }
        Some(x)
    }

    /// Solves `M X = B` columnwise; `None` if any column is inconsistent.
    pub fn solve_matrix(&self, b: &Matrix) -> Option<Matrix> {
        assert_eq!(b.rows, self.rows);
        let mut cols = Vec::with_capacity(b.cols);
        for j in 0..b.cols {
            cols.push(self.solve(&b.col(j))?);
        }
        Some(Matrix::from_cols(self.field, cols))
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let inv = self.solve_matrix(&Matrix::identity(self.rows, self.field))?;
        if self.mul(&inv) == Matrix::identity(self.rows, self.field) {
            Some(inv)
        } else {
            None
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

/// Dimension of `span(U) / (span(U) ∩ span(W))` inside an ambient space,
/// computed as `rank(U ∪ W) − rank(W)`. `span(W) ⊆ span(U)` is not assumed.
pub fn subquotient_dim(ambient_dim: usize, u: &[Vec<Scalar>], w: &[Vec<Scalar>], field: FieldSpec) -> usize {
    for v in u.iter().chain(w.iter()) {
        assert_eq!(v.len(), ambient_dim, "dimension mismatch in subquotient");
    }
    let w_mat = Matrix::from_rows(field, w.to_vec());
    let mut all = w.to_vec();
    all.extend(u.iter().cloned());
    let all_mat = Matrix::from_rows(field, all);
    if ambient_dim == 0 {
        return 0;
    }
    all_mat.rank() - w_mat.rank()
}

/// Row space of `span` in reduced echelon form plus helpers for quotient
/// coordinates: `reduce` maps a vector to its canonical remainder, and the
/// free coordinates of the remainder are coordinates in the quotient.
#[derive(Clone, Debug)]
pub struct SpanReducer {
    pub field: FieldSpec,
    pub ambient: usize,
    pub rows: Matrix,
    pub pivots: Vec<usize>,
    pub free: Vec<usize>,
}

impl SpanReducer {
    /// `vectors` are ambient-space elements spanning the subspace.
    pub fn new(ambient: usize, vectors: &[Vec<Scalar>], field: FieldSpec) -> SpanReducer {
        let m = Matrix::from_rows(field, vectors.to_vec());
        let m = if vectors.is_empty() {
            Matrix::zero(0, ambient, field)
        } else {
            m
        };
        let (r, pivots) = m.rref();
        let rank = pivots.len();
        let rows = r.block(0, 0, rank, ambient);
        let mut is_p = vec![false; ambient];
        for &c in &pivots {
            is_p[c] = true;
        }
        let free = (0..ambient).filter(|&c| !is_p[c]).collect();
        SpanReducer { field, ambient, rows, pivots, free }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn quotient_dim(&self) -> usize {
        self.ambient - self.rank()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Canonical remainder of `v` modulo the subspace.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = v.to_vec();
        for (ri, &pc) in self.pivots.iter().enumerate() {
            if out[pc].is_zero() {
                continue;
            }
            let f = out[pc].clone();
            for c in 0..self.ambient {
                let t = &out[c] - &(&f * self.rows.at(ri, c));
                out[c] = t;
            }
        }
        out
    }

    /// Matrix of the projection `ambient -> quotient coordinates`.
    pub fn projection(&self) -> Matrix {
        let mut m = Matrix::zero(self.free.len(), self.ambient, self.field);
        for c in 0..self.ambient {
            let mut e = vec![self.field.zero(); self.ambient];
            e[c] = self.field.one();
            let red = self.reduce(&e);
            for (qi, &fc) in self.free.iter().enumerate() {
                m.set(qi, c, red[fc].clone());
            }
        }
        m
    }

    /// Section of the projection: quotient coordinate `i` maps to the unit
    /// vector at the `i`-th free column.
    pub fn section(&self) -> Matrix {
        let mut m = Matrix::zero(self.ambient, self.free.len(), self.field);
        for (qi, &fc) in self.free.iter().enumerate() {
            m.set(fc, qi, self.field.one());
        }
        m
    }
}

// --- JSON form -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    field: String,
    entries: Vec<String>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            field: self.field.to_string(),
            entries: self.entries.iter().map(|e| e.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        use serde::de::Error;
        let j = MatrixJson::deserialize(d)?;
        let field = match j.field.as_str() {
            "Q" => FieldSpec::Q,
            s => {
                let p = s
                    .strip_prefix("Fp:")
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| D::Error::custom(format!("bad field tag {s:?}")))?;
                FieldSpec::Fp(p)
            }
        };
        if j.entries.len() != j.rows * j.cols {
            return Err(D::Error::custom("entries length mismatch"));
        }
        let mut m = Matrix::zero(j.rows, j.cols, field);
        for (i, e) in j.entries.iter().enumerate() {
            let v = parse_scalar(e, field).map_err(D::Error::custom)?;
            m.entries[i] = v;
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_single_constraint_f2() {
        let m = Matrix::from_i64(FieldSpec::Fp(2), &[&[1, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![Scalar::from_i64(1, FieldSpec::Fp(2)), Scalar::from_i64(1, FieldSpec::Fp(2))]);
    }

    #[test]
    fn kernel_of_identity_is_zero() {
        let m = Matrix::identity(2, FieldSpec::Q);
        assert!(m.kernel_basis().is_empty());
    }

    #[test]
    fn kernel_rank_one_rational() {
        let m = Matrix::from_i64(FieldSpec::Q, &[&[1, 2], &[2, 4]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![Scalar::from_i64(-2, FieldSpec::Q), Scalar::from_i64(1, FieldSpec::Q)]);
    }

    #[test]
    fn solve_scalar_cases() {
        let m = Matrix::from_i64(FieldSpec::Q, &[&[2]]);
        assert_eq!(m.solve(&[Scalar::from_i64(4, FieldSpec::Q)]), Some(vec![Scalar::from_i64(2, FieldSpec::Q)]));
        let z = Matrix::from_i64(FieldSpec::Q, &[&[0]]);
        assert_eq!(z.solve(&[Scalar::from_i64(1, FieldSpec::Q)]), None);
    }

    #[test]
    fn solve_back_substitution_f5() {
        let f = FieldSpec::Fp(5);
        let m = Matrix::from_i64(f, &[&[1, 1], &[0, 1]]);
        let b = vec![Scalar::from_i64(3, f), Scalar::from_i64(1, f)];
        let x = m.solve(&b).unwrap();
        assert_eq!(x, vec![Scalar::from_i64(2, f), Scalar::from_i64(1, f)]);
    }

    #[test]
    fn subquotient_examples() {
        let f = FieldSpec::Q;
        let e1 = vec![f.one(), f.zero()];
        let e2 = vec![f.zero(), f.one()];
        let e12 = vec![f.one(), f.one()];
        assert_eq!(subquotient_dim(2, &[e1.clone()], &[], f), 1);
        assert_eq!(subquotient_dim(2, &[e1.clone()], &[e1.clone()], f), 0);
        assert_eq!(subquotient_dim(2, &[e1, e2], &[e12], f), 1);
    }

    #[test]
    fn json_round_trip() {
        let m = Matrix::from_rows(
            FieldSpec::Q,
            vec![vec![
                Scalar::from_ratio(1, 2, FieldSpec::Q).unwrap(),
                Scalar::from_i64(3, FieldSpec::Q),
            ]],
        );
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"1/2\""));
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn reducer_projection_section() {
        let f = FieldSpec::Fp(5);
        let span = vec![vec![f.one(), f.one(), f.zero()]];
        let red = SpanReducer::new(3, &span, f);
        assert_eq!(red.quotient_dim(), 2);
        let proj = red.projection();
        let sect = red.section();
        let comp = proj.mul(&sect);
        assert_eq!(comp, Matrix::identity(2, f));
    }
}
