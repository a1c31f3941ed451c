//! Exact dense matrices and row reduction over a [`Scalar`] field.
//!
//! All elimination goes through [`Echelon`], an incremental reduced row
//! echelon form over sparse rows. The reduced row echelon form of a row space
//! is unique, so ranks, kernel bases and particular solutions do not depend on
//! the order in which rows are inserted.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec<F> = Vec<(usize, F)>;

pub fn sparse_from_dense<F: Scalar>(v: &[F]) -> SparseVec<F> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn dense_from_sparse<F: Scalar>(v: &[(usize, F)], len: usize) -> Vec<F> {
    let mut out = vec![F::zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// `a - c * b` on sparse vectors.
fn sparse_axpy<F: Scalar>(a: &[(usize, F)], c: &F, b: &[(usize, F)]) -> SparseVec<F> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let v = -(c.clone() * &b[j].1);
            out.push((b[j].0, v));
            j += 1;
        } else {
            let mut v = a[i].1.clone();
            v.sub_mul(c, &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn sparse_get<F: Scalar>(v: &[(usize, F)], idx: usize) -> Option<&F> {
    v.binary_search_by_key(&idx, |(i, _)| *i).ok().map(|p| &v[p].1)
}

/// Incrementally maintained reduced row echelon form.
///
/// Every stored row has a leading 1 at its pivot column and zeros in all other
/// pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    cols: usize,
    rows: Vec<SparseVec<F>>,
    // pivot column -> index into `rows`
    pivot_row: Vec<Option<usize>>,
}

impl<F: Scalar> Echelon<F> {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            rows: Vec::new(),
            pivot_row: vec![None; cols],
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored pivots; the result has zeros in every
    /// pivot column.
    pub fn reduce(&self, v: &[(usize, F)]) -> SparseVec<F> {
        let mut cur: SparseVec<F> = v.to_vec();
        let hits: Vec<(usize, F)> = v
            .iter()
            .filter_map(|(c, x)| self.pivot_row[*c].map(|r| (r, x.clone())))
            .collect();
        for (r, coeff) in hits {
            cur = sparse_axpy(&cur, &coeff, &self.rows[r]);
        }
        cur
    }

    /// Inserts a row; returns `true` when it enlarged the row space.
    pub fn insert(&mut self, v: &[(usize, F)]) -> bool {
        let mut red = self.reduce(v);
        let Some((pivot, lead)) = red.first().cloned() else {
            return false;
        };
        let inv = lead.inv().expect("nonzero leading entry");
        for (_, x) in red.iter_mut() {
            *x *= &inv;
        }
        for row in self.rows.iter_mut() {
            if let Some(c) = sparse_get(row, pivot).cloned() {
                *row = sparse_axpy(row, &c, &red);
            }
        }
        self.pivot_row[pivot] = Some(self.rows.len());
        self.rows.push(red);
        true
    }

    pub fn insert_dense(&mut self, v: &[F]) -> bool {
        self.insert(&sparse_from_dense(v))
    }

    pub fn contains(&self, v: &[(usize, F)]) -> bool {
        self.reduce(v).is_empty()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        (0..self.cols).filter(|c| self.pivot_row[*c].is_some()).collect()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.cols).filter(|c| self.pivot_row[*c].is_none()).collect()
    }

    /// Rows sorted by pivot column.
    pub fn sorted_rows(&self) -> Vec<(usize, &SparseVec<F>)> {
        (0..self.cols)
            .filter_map(|c| self.pivot_row[c].map(|r| (c, &self.rows[r])))
            .collect()
    }

    /// Kernel basis of the stored rows: one vector per free column, in
    /// ascending order, with a 1 at its free column and zeros at the others.
    pub fn nullspace(&self) -> Vec<SparseVec<F>> {
        let free = self.free_columns();
        let mut by_free: Vec<SparseVec<F>> = vec![Vec::new(); self.cols];
        let mut out: Vec<SparseVec<F>> = free.iter().map(|f| vec![(*f, F::one())]).collect();
        for (pc, row) in self.sorted_rows() {
            for (c, x) in row.iter() {
                if *c != pc {
                    by_free[*c].push((pc, -x.clone()));
                }
            }
        }
        for (k, f) in free.iter().enumerate() {
            out[k].append(&mut by_free[*f]);
            out[k].sort_by_key(|(i, _)| *i);
        }
        out
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Result<Self, KernelError> {
        if data.len() != rows * cols {
            return Err(KernelError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self, KernelError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(KernelError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience for tests and builders.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|x| F::from_i64(*x)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn from_columns(rows: usize, columns: &[Vec<F>]) -> Result<Self, KernelError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(KernelError::DimensionMismatch(format!(
                    "column {j} has length {} instead of {rows}",
                    col.len()
                )));
            }
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix<F>) -> Result<Matrix<F>, KernelError> {
        if self.cols != rhs.rows {
            return Err(KernelError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j].add_mul(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[F]) -> Result<Vec<F>, KernelError> {
        if v.len() != self.cols {
            return Err(KernelError::DimensionMismatch(format!(
                "{}x{} matrix applied to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc.add_mul(a, b);
                }
                acc
            })
            .collect())
    }

    pub fn add(&self, rhs: &Matrix<F>) -> Result<Matrix<F>, KernelError> {
        self.zip_with(rhs, |a, b| a.clone() + b)
    }

    pub fn sub(&self, rhs: &Matrix<F>) -> Result<Matrix<F>, KernelError> {
        self.zip_with(rhs, |a, b| a.clone() - b)
    }

    fn zip_with(&self, rhs: &Matrix<F>, f: impl Fn(&F, &F) -> F) -> Result<Matrix<F>, KernelError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(KernelError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: &F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * c).collect(),
        }
    }

    /// Stacks `blocks` vertically; all must share the column count.
    pub fn vstack(blocks: &[Matrix<F>]) -> Result<Matrix<F>, KernelError> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(KernelError::DimensionMismatch("vstack column counts differ".into()));
        }
        Ok(Matrix {
            rows: blocks.iter().map(|b| b.rows).sum(),
            cols,
            data: blocks.iter().flat_map(|b| b.data.iter().cloned()).collect(),
        })
    }

    /// Kronecker product, row-major block layout.
    pub fn kron(&self, rhs: &Matrix<F>) -> Matrix<F> {
        let (r, c) = (self.rows * rhs.rows, self.cols * rhs.cols);
        let mut out = Self::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let b = rhs.get(k, l);
                        if !b.is_zero() {
                            out.set(i * rhs.rows + k, j * rhs.cols + l, a.clone() * b);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn echelon(&self) -> Echelon<F> {
        let mut e = Echelon::new(self.cols);
        for i in 0..self.rows {
            e.insert_dense(self.row(i));
        }
        e
    }

    pub fn inverse(&self) -> Option<Matrix<F>> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut e = Echelon::new(2 * n);
        for i in 0..n {
            let mut row = sparse_from_dense(self.row(i));
            row.push((n + i, F::one()));
            e.insert(&row);
        }
        if e.pivot_columns().iter().take_while(|c| **c < n).count() != n {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for (pc, row) in e.sorted_rows() {
            for (c, x) in row {
                if *c >= n {
                    inv.set(pc, c - n, x.clone());
                }
            }
        }
        Some(inv)
    }
}

impl<F: Scalar> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Exact rank.
pub fn rank<F: Scalar>(m: &Matrix<F>) -> usize {
    m.echelon().rank()
}

/// Basis of the right kernel as the columns of a `cols x (cols - rank)`
/// matrix. Free variables are taken in ascending order; each basis vector has
/// a 1 at its free variable and 0 at the other free variables.
pub fn nullspace<F: Scalar>(m: &Matrix<F>) -> Matrix<F> {
    let e = m.echelon();
    let basis = e.nullspace();
    let mut out = Matrix::zeros(m.cols, basis.len());
    for (j, v) in basis.iter().enumerate() {
        for (i, x) in v {
            out.set(*i, j, x.clone());
        }
    }
    out
}

/// One particular solution of `a x = b`, free variables set to zero; `None`
/// when the system is inconsistent.
pub fn solve<F: Scalar>(a: &Matrix<F>, b: &[F]) -> Result<Option<Vec<F>>, KernelError> {
    if a.rows != b.len() {
        return Err(KernelError::DimensionMismatch(format!(
            "{} equations but right-hand side of length {}",
            a.rows,
            b.len()
        )));
    }
    let n = a.cols;
    let mut e = Echelon::new(n + 1);
    for i in 0..a.rows {
        let mut row = sparse_from_dense(a.row(i));
        if !b[i].is_zero() {
            row.push((n, b[i].clone()));
        }
        e.insert(&row);
    }
    Ok(particular_solution(&e, n))
}

/// Reads the particular solution off an echelon form of `[A | b]` whose
/// augmented column sits at index `n`.
pub(crate) fn particular_solution<F: Scalar>(e: &Echelon<F>, n: usize) -> Option<Vec<F>> {
    if e.pivot_columns().contains(&n) {
        return None;
    }
    let mut x = vec![F::zero(); n];
    for (pc, row) in e.sorted_rows() {
        if let Some(v) = sparse_get(row, n) {
            x[pc] = v.clone();
        }
    }
    Some(x)
}
