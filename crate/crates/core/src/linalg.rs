//! Exact dense linear algebra over F_{q^m}.
//!
//! [`MatFqm`] is a row-major matrix of [`FieldElem`]s tied to a shared
//! [`FieldCtx`]. Reduced row-echelon form is fully canonical (leading ones,
//! eliminated above and below), so two matrices span the same row space iff
//! their rrefs are equal — that byte-equality test is the verification oracle
//! used throughout the crate. Row-space intersections go through the double
//! dual: Row(A) ∩ Row(B) is the right kernel of the stacked right kernels.

use std::sync::Arc;

use rand::Rng;

use crate::error::Error;
use crate::field::{FieldCtx, FieldElem};
use crate::Result;

/// Dense matrix over F_{q^m}, row-major.
#[derive(Clone)]
pub struct MatFqm {
    field: Arc<FieldCtx>,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl PartialEq for MatFqm {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
            && self.field.modulus() == other.field.modulus()
            && self.field.p() == other.field.p()
    }
}

impl Eq for MatFqm {}

impl std::fmt::Debug for MatFqm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "MatFqm {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<u64> = self.row(r).iter().map(|e| e.index()).collect();
            writeln!(f, "  {:?}", row)?;
        }
        write!(f, "]")
    }
}

/// Canonical echelonization result.
pub struct RrefResult {
    pub mat: MatFqm,
    pub rank: usize,
    /// Pivot column of each of the first `rank` rows, strictly increasing.
    pub pivots: Vec<usize>,
}

impl MatFqm {
    pub fn zeros(field: Arc<FieldCtx>, rows: usize, cols: usize) -> MatFqm {
        MatFqm {
            field,
            rows,
            cols,
            data: vec![FieldElem::ZERO; rows * cols],
        }
    }

    pub fn identity(field: Arc<FieldCtx>, n: usize) -> MatFqm {
        let mut m = MatFqm::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, FieldElem::ONE);
        }
        m
    }

    pub fn from_rows(field: Arc<FieldCtx>, rows: Vec<Vec<FieldElem>>) -> Result<MatFqm> {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::ShapeMismatch("ragged row lengths".into()));
        }
        Ok(MatFqm {
            field,
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> FieldElem>(
        field: Arc<FieldCtx>,
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> MatFqm {
        let mut m = MatFqm::zeros(field, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(
        field: Arc<FieldCtx>,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> MatFqm {
        let f = Arc::clone(&field);
        MatFqm::from_fn(field, rows, cols, |_, _| f.random_elem(rng))
    }

    /// Uniformly random invertible n×n matrix (rejection sampling).
    pub fn random_invertible<R: Rng + ?Sized>(
        field: Arc<FieldCtx>,
        n: usize,
        rng: &mut R,
    ) -> MatFqm {
        loop {
            let m = MatFqm::random(Arc::clone(&field), n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    /// Random invertible n×n matrix with all entries in the subfield F_q.
    pub fn random_invertible_fq<R: Rng + ?Sized>(
        field: Arc<FieldCtx>,
        n: usize,
        rng: &mut R,
    ) -> MatFqm {
        loop {
            let f = Arc::clone(&field);
            let m = MatFqm::from_fn(Arc::clone(&field), n, n, |_, _| f.random_fq(rng));
            if m.rank() == n {
                return m;
            }
        }
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElem {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> MatFqm {
        MatFqm::from_fn(Arc::clone(&self.field), self.cols, self.rows, |r, c| {
            self.get(c, r)
        })
    }

    pub fn map<F: FnMut(FieldElem) -> FieldElem>(&self, mut f: F) -> MatFqm {
        MatFqm {
            field: Arc::clone(&self.field),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&e| f(e)).collect(),
        }
    }

    pub fn scale(&self, c: FieldElem) -> MatFqm {
        let f = Arc::clone(&self.field);
        self.map(|e| f.mul(c, e))
    }

    pub fn add(&self, other: &MatFqm) -> Result<MatFqm> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "add {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        Ok(MatFqm {
            field: Arc::clone(&self.field),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn matmul(&self, other: &MatFqm) -> Result<MatFqm> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "matmul {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = MatFqm::zeros(Arc::clone(&self.field), self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let prod = f.mul(a, other.get(k, c));
                    let cur = out.get(r, c);
                    out.set(r, c, f.add(cur, prod));
                }
            }
        }
        Ok(out)
    }

    /// x · M for a row vector x of length `rows`.
    pub fn mul_left_vec(&self, x: &[FieldElem]) -> Result<Vec<FieldElem>> {
        if x.len() != self.rows {
            return Err(Error::ShapeMismatch(format!(
                "row vector of length {} times {}x{}",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        let f = &self.field;
        let mut out = vec![FieldElem::ZERO; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr.is_zero() {
                continue;
            }
            for c in 0..self.cols {
                out[c] = f.add(out[c], f.mul(xr, self.get(r, c)));
            }
        }
        Ok(out)
    }

    /// M · xᵀ for a vector x of length `cols`.
    pub fn mul_right_vec(&self, x: &[FieldElem]) -> Result<Vec<FieldElem>> {
        if x.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times column vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let f = &self.field;
        let mut out = vec![FieldElem::ZERO; self.rows];
        for r in 0..self.rows {
            let mut acc = FieldElem::ZERO;
            for (c, &xc) in x.iter().enumerate() {
                acc = f.add(acc, f.mul(self.get(r, c), xc));
            }
            out[r] = acc;
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &MatFqm) -> Result<MatFqm> {
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "vstack with {} vs {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(MatFqm {
            field: Arc::clone(&self.field),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Canonical reduced row-echelon form: leading entries are 1, each pivot
    /// column is zero elsewhere, zero rows sink to the bottom.
    pub fn rref(&self) -> RrefResult {
        let f = Arc::clone(&self.field);
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pr) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if pr != rank {
                for c in 0..m.cols {
                    let a = m.get(rank, c);
                    let b = m.get(pr, c);
                    m.set(rank, c, b);
                    m.set(pr, c, a);
                }
            }
            let inv = f.inv(m.get(rank, col)).expect("pivot is nonzero");
            for c in col..m.cols {
                m.set(rank, c, f.mul(inv, m.get(rank, c)));
            }
            for r in 0..m.rows {
                if r != rank && !m.get(r, col).is_zero() {
                    let factor = m.get(r, col);
                    for c in col..m.cols {
                        let sub = f.mul(factor, m.get(rank, c));
                        let cur = m.get(r, c);
                        m.set(r, c, f.sub(cur, sub));
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        RrefResult { mat: m, rank, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of {x : M·xᵀ = 0}, one vector per row; rows = cols − rank(M).
    pub fn right_kernel(&self) -> MatFqm {
        let RrefResult { mat, rank, pivots } = self.rref();
        let f = &self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = MatFqm::zeros(Arc::clone(&self.field), free.len(), self.cols);
        for (krow, &fc) in free.iter().enumerate() {
            out.set(krow, fc, FieldElem::ONE);
            for r in 0..rank {
                out.set(krow, pivots[r], f.neg(mat.get(r, fc)));
            }
        }
        out
    }
}

/// Row space of a matrix, held as its canonical rref basis with zero rows
/// dropped. Equality of row spaces is plain equality of bases.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RowSpace {
    basis: MatFqm,
}

impl RowSpace {
    pub fn of(mat: &MatFqm) -> RowSpace {
        let RrefResult { mat: r, rank, .. } = mat.rref();
        let mut data = r.data;
        data.truncate(rank * mat.cols());
        RowSpace {
            basis: MatFqm {
                field: Arc::clone(mat.field()),
                rows: rank,
                cols: mat.cols(),
                data,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &MatFqm {
        &self.basis
    }

    /// Membership test by reduction against the echelon basis.
    pub fn contains(&self, v: &[FieldElem]) -> bool {
        if v.len() != self.basis.cols() {
            return false;
        }
        let f = self.basis.field();
        let mut w = v.to_vec();
        for r in 0..self.basis.rows() {
            let pivot = (0..self.basis.cols())
                .find(|&c| !self.basis.get(r, c).is_zero())
                .expect("basis has no zero rows");
            if !w[pivot].is_zero() {
                let factor = w[pivot];
                for c in 0..w.len() {
                    w[c] = f.sub(w[c], f.mul(factor, self.basis.get(r, c)));
                }
            }
        }
        w.iter().all(|e| e.is_zero())
    }

    pub fn contains_space(&self, other: &RowSpace) -> bool {
        (0..other.basis.rows()).all(|r| self.contains(other.basis.row(r)))
    }
}

/// Row(A) + Row(B), as the rref of the stacked rows.
pub fn row_space_sum(a: &MatFqm, b: &MatFqm) -> Result<RowSpace> {
    Ok(RowSpace::of(&a.vstack(b)?))
}

/// Row(A) ∩ Row(B) via the double dual: the intersection is the right kernel
/// of the stacked right kernels.
pub fn row_space_intersection(a: &MatFqm, b: &MatFqm) -> Result<RowSpace> {
    if a.cols() != b.cols() {
        return Err(Error::ShapeMismatch(format!(
            "intersection with {} vs {} columns",
            a.cols(),
            b.cols()
        )));
    }
    let ka = a.right_kernel();
    let kb = b.right_kernel();
    let stacked = ka.vstack(&kb)?;
    Ok(RowSpace::of(&stacked.right_kernel()))
}

/// The t×m matrix of fq_basis-coordinates of the entries of `v`; its rank is
/// the number of F_q-linearly independent entries of `v`.
pub fn expand_over_fq(field: &Arc<FieldCtx>, v: &[FieldElem]) -> MatFqm {
    let rows: Vec<Vec<FieldElem>> = v.iter().map(|&e| field.expand_elem(e)).collect();
    MatFqm::from_rows(Arc::clone(field), rows).expect("expansions all have length m")
}

/// One solution of A·x = b (free variables zero), or `NoSolution`.
pub fn solve_linear(a: &MatFqm, b: &[FieldElem]) -> Result<Vec<FieldElem>> {
    if b.len() != a.rows() {
        return Err(Error::ShapeMismatch(format!(
            "rhs length {} for {}x{} system",
            b.len(),
            a.rows(),
            a.cols()
        )));
    }
    let mut aug = MatFqm::zeros(Arc::clone(a.field()), a.rows(), a.cols() + 1);
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            aug.set(r, c, a.get(r, c));
        }
        aug.set(r, a.cols(), b[r]);
    }
    let RrefResult { mat, rank, pivots } = aug.rref();
    if pivots.last() == Some(&a.cols()) {
        return Err(Error::NoSolution);
    }
    let mut x = vec![FieldElem::ZERO; a.cols()];
    for r in 0..rank {
        x[pivots[r]] = mat.get(r, a.cols());
    }
    Ok(x)
}
