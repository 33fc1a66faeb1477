//! Dense matrices and subspaces over a finite field.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field, FieldCtx, OrderedBasis};

/// Row-reduces `buf` (row-major, `rows × cols`) in place to reduced echelon
/// form and returns the pivot columns. The pivot in each column is the first
/// nonzero entry at or below the current row.
pub fn rref_in_place(f: &FieldCtx, buf: &mut [Elem], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !buf[i * cols + c].is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                buf.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(buf[r * cols + c]);
        for j in c..cols {
            buf[r * cols + j] = f.mul(buf[r * cols + j], inv);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = buf[i * cols + c];
            if factor.is_zero() {
                continue;
            }
            for j in c..cols {
                let v = f.mul(factor, buf[r * cols + j]);
                buf[i * cols + j] = f.sub(buf[i * cols + j], v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of `buf` by forward elimination; the buffer is clobbered.
pub fn rank_in_place(f: &FieldCtx, buf: &mut [Elem], rows: usize, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !buf[i * cols + c].is_zero()) else {
            continue;
        };
        if pr != r {
            for j in c..cols {
                buf.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(buf[r * cols + c]);
        for i in r + 1..rows {
            let x = buf[i * cols + c];
            if x.is_zero() {
                continue;
            }
            let factor = f.mul(x, inv);
            for j in c..cols {
                let v = f.mul(factor, buf[r * cols + j]);
                buf[i * cols + j] = f.sub(buf[i * cols + j], v);
            }
        }
        r += 1;
    }
    r
}

/// Determinant of the square matrix in `buf` (row swaps tracked); the buffer is clobbered.
pub fn det_in_place(f: &FieldCtx, buf: &mut [Elem], n: usize) -> Elem {
    let mut det = Elem::ONE;
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !buf[i * n + c].is_zero()) else {
            return Elem::ZERO;
        };
        if pr != c {
            for j in c..n {
                buf.swap(pr * n + j, c * n + j);
            }
            det = f.neg(det);
        }
        let pivot = buf[c * n + c];
        det = f.mul(det, pivot);
        let inv = f.inv(pivot);
        for i in c + 1..n {
            let x = buf[i * n + c];
            if x.is_zero() {
                continue;
            }
            let factor = f.mul(x, inv);
            for j in c..n {
                let v = f.mul(factor, buf[c * n + j]);
                buf[i * n + j] = f.sub(buf[i * n + j], v);
            }
        }
    }
    det
}

/// True when no scalar of the field is an eigenvalue of the square matrix `m`.
/// `scratch` must hold at least `n * n` entries.
pub fn spectrum_free_slice(f: &FieldCtx, m: &[Elem], n: usize, scratch: &mut [Elem]) -> bool {
    for lambda in f.elements() {
        let s = &mut scratch[..n * n];
        s.copy_from_slice(&m[..n * n]);
        for i in 0..n {
            s[i * n + i] = f.sub(s[i * n + i], lambda);
        }
        if rank_in_place(f, s, n, n) < n {
            return false;
        }
    }
    true
}

/// A dense row-major matrix over a finite field.
#[derive(Clone)]
pub struct GfMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl PartialEq for GfMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data && *self.field == *other.field
    }
}

impl Eq for GfMatrix {}

impl fmt::Debug for GfMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GfMatrix {}x{} over GF({})", self.rows, self.cols, self.field.order())?;
        write!(f, "{self}")
    }
}

impl fmt::Display for GfMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl GfMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        GfMatrix { field: field.clone(), rows, cols, data: vec![Elem::ZERO; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        Self::from_fn(field, n, n, |i, j| if i == j { Elem::ONE } else { Elem::ZERO })
    }

    pub fn from_fn(field: &Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        GfMatrix { field: field.clone(), rows, cols, data }
    }

    /// Builds from row-major data; panics when the length is wrong or an entry is out of range.
    pub fn from_data(field: &Field, rows: usize, cols: usize, data: Vec<Elem>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        assert!(data.iter().all(|e| e.0 < field.order()), "entry outside field");
        GfMatrix { field: field.clone(), rows, cols, data }
    }

    /// Builds from integer rows.
    pub fn from_rows(field: &Field, rows: &[Vec<u32>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged rows");
                r.iter().map(|&v| Elem(v))
            })
            .collect();
        Self::from_data(field, rows.len(), cols, data)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        GfMatrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        GfMatrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: Elem) -> Self {
        let f = &self.field;
        GfMatrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, s)).collect(),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: Elem, other: &Self) {
        if s.is_zero() {
            return;
        }
        let f = self.field.clone();
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = f.add(*a, f.mul(s, b));
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        let f = &self.field;
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(Elem::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
            .collect()
    }

    /// `v^T M` for a row vector `v`.
    pub fn vec_mul(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.rows, v.len(), "vector length mismatch");
        let f = &self.field;
        let mut out = vec![Elem::ZERO; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.row(i)) {
                *o = f.add(*o, f.mul(a, b));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        assert!(self.is_square(), "power of non-square matrix");
        (0..e).fold(Self::identity(&self.field, self.rows), |acc, _| acc.mul(self))
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "row count mismatch");
        Self::from_fn(&self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                other.get(i, j - self.cols)
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "column count mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        GfMatrix { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(&self.field, rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    /// Keeps the first `cols` columns.
    pub fn truncate_cols(&self, cols: usize) -> Self {
        Self::from_fn(&self.field, self.rows, cols, |i, j| self.get(i, j))
    }

    pub fn rank(&self) -> usize {
        let mut buf = self.data.clone();
        rank_in_place(&self.field, &mut buf, self.rows, self.cols)
    }

    /// Reduced row echelon form and pivot columns (0-based).
    pub fn rref(&self) -> (GfMatrix, Vec<usize>) {
        let mut out = self.clone();
        let piv = rref_in_place(&self.field, &mut out.data, self.rows, self.cols);
        (out, piv)
    }

    pub fn det(&self) -> Result<Elem> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of non-square matrix".into()));
        }
        let mut buf = self.data.clone();
        Ok(det_in_place(&self.field, &mut buf, self.rows))
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(&self.field, n));
        let (r, piv) = aug.rref();
        (piv.len() == n && piv[n - 1] == n - 1)
            .then(|| Self::from_fn(&self.field, n, n, |i, j| r.get(i, n + j)))
    }

    /// Basis (as rows) of the right kernel `{x : M x = 0}`.
    pub fn kernel(&self) -> GfMatrix {
        let (r, piv) = self.rref();
        let f = &self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        let mut out = Self::zeros(f, free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out.set(k, fc, Elem::ONE);
            for (pi, &pc) in piv.iter().enumerate() {
                out.set(k, pc, f.neg(r.get(pi, fc)));
            }
        }
        out
    }

    /// True when no field scalar is an eigenvalue.
    pub fn spectrum_free(&self) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::Dimension("spectrum of non-square matrix".into()));
        }
        let mut scratch = vec![Elem::ZERO; self.data.len()];
        Ok(spectrum_free_slice(&self.field, &self.data, self.rows, &mut scratch))
    }

    /// True when `v` lies in the column space.
    pub fn colspace_contains(&self, v: &[Elem]) -> Result<bool> {
        if v.len() != self.rows {
            return Err(Error::Dimension(format!("vector length {} vs {} rows", v.len(), self.rows)));
        }
        let col = Self::from_fn(&self.field, self.rows, 1, |i, _| v[i]);
        Ok(self.hstack(&col).rank() == self.rank())
    }

    /// Row space as a subspace.
    pub fn row_space(&self) -> Subspace {
        Subspace::from_rows(self)
    }

    /// Flattens to a row vector of length `rows * cols`.
    pub fn flatten(&self) -> Vec<Elem> {
        self.data.clone()
    }
}

/// A subspace of `F^ambient` stored as a basis in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    basis: GfMatrix,
}

impl Subspace {
    pub fn zero(field: &Field, ambient: usize) -> Self {
        Subspace { basis: GfMatrix::zeros(field, 0, ambient) }
    }

    pub fn full(field: &Field, ambient: usize) -> Self {
        Subspace { basis: GfMatrix::identity(field, ambient) }
    }

    pub fn from_rows(m: &GfMatrix) -> Self {
        let (r, piv) = m.rref();
        let rows: Vec<usize> = (0..piv.len()).collect();
        let cols: Vec<usize> = (0..m.cols()).collect();
        Subspace { basis: r.submatrix(&rows, &cols) }
    }

    pub fn span(field: &Field, ambient: usize, vectors: &[Vec<Elem>]) -> Self {
        let m = GfMatrix::from_fn(field, vectors.len(), ambient, |i, j| vectors[i][j]);
        Self::from_rows(&m)
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// RREF basis, one vector per row.
    pub fn basis(&self) -> &GfMatrix {
        &self.basis
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        let f = self.field();
        let mut w = v.to_vec();
        for i in 0..self.dim() {
            let row = self.basis.row(i);
            let piv = row.iter().position(|e| !e.is_zero()).expect("RREF rows are nonzero");
            let c = w[piv];
            if !c.is_zero() {
                for (x, &r) in w.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        w.iter().all(|e| e.is_zero())
    }

    pub fn with_vector(&self, v: &[Elem]) -> Self {
        let row = GfMatrix::from_fn(self.field(), 1, self.ambient(), |_, j| v[j]);
        Self::from_rows(&self.basis.vstack(&row))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        Ok(Self::from_rows(&self.basis.vstack(&other.basis)))
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient() != other.ambient() {
            return Err(Error::Dimension(format!("ambient {} vs {}", self.ambient(), other.ambient())));
        }
        Ok(())
    }

    /// `U ∩ V` from the left kernel of the stacked bases.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let (a, b) = (self.dim(), other.dim());
        if a == 0 || b == 0 {
            return Ok(Self::zero(self.field(), self.ambient()));
        }
        let stacked = self.basis.vstack(&other.basis);
        let ker = stacked.transpose().kernel();
        let rows: Vec<usize> = (0..ker.rows()).collect();
        let first: Vec<usize> = (0..a).collect();
        let coeffs = ker.submatrix(&rows, &first);
        Ok(Self::from_rows(&coeffs.mul(&self.basis)))
    }

    /// Enumerates all vectors, lexicographically by coordinates.
    pub fn vectors(&self) -> impl Iterator<Item = Vec<Elem>> + '_ {
        let q = self.field().order() as u128;
        let d = self.dim();
        let total = q.pow(d as u32);
        (0..total).map(move |idx| {
            let mut lam = vec![Elem::ZERO; d];
            let mut x = idx;
            for i in (0..d).rev() {
                lam[i] = Elem((x % q) as u32);
                x /= q;
            }
            self.basis.vec_mul(&lam)
        })
    }

    /// Lexicographically smallest vector of `self` not contained in `other`.
    pub fn first_vector_outside(&self, other: &Subspace) -> Option<Vec<Elem>> {
        self.vectors().find(|v| !other.contains(v))
    }
}

/// `{v · a : v ∈ V}` for a subspace of an extension given in `basis` coordinates.
pub fn scaled_subspace(v: &Subspace, a: Elem, basis: &OrderedBasis) -> Result<Subspace> {
    if a.is_zero() {
        return Err(Error::Precondition("scaling by zero".into()));
    }
    let ext = basis.field();
    let rows: Vec<Vec<Elem>> = (0..v.dim())
        .map(|i| basis.coords(ext.mul(basis.combine(v.basis().row(i)), a)))
        .collect();
    Ok(Subspace::span(v.field(), v.ambient(), &rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn gf(p: u32) -> Field {
        make_field(p, 1).unwrap()
    }

    #[test]
    fn rank_examples() {
        let f = gf(2);
        assert_eq!(GfMatrix::zeros(&f, 3, 3).rank(), 0);
        assert_eq!(GfMatrix::identity(&f, 5).rank(), 5);
        let c = GfMatrix::from_rows(&f, &[vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 0]]);
        assert_eq!(c.rank(), 3);
    }

    #[test]
    fn rref_examples() {
        let f = gf(2);
        let id = GfMatrix::identity(&f, 3);
        assert_eq!(id.rref(), (id.clone(), vec![0, 1, 2]));
        let r = GfMatrix::from_rows(&f, &[vec![0, 1, 1]]);
        assert_eq!(r.rref(), (r.clone(), vec![1]));
        let s = GfMatrix::from_rows(&f, &[vec![1, 0, 1, 1], vec![0, 1, 0, 1]]);
        assert_eq!(s.rref().1, vec![0, 1]);
        assert_eq!(s.rref().0, s);
    }

    #[test]
    fn spectrum_examples() {
        let f = gf(2);
        assert!(GfMatrix::from_rows(&f, &[vec![0, 1], vec![1, 1]]).spectrum_free().unwrap());
        assert!(!GfMatrix::identity(&f, 3).spectrum_free().unwrap());
        for a in 0..3 {
            assert!(!GfMatrix::from_rows(&gf(3), &[vec![a]]).spectrum_free().unwrap());
        }
        assert!(GfMatrix::zeros(&f, 2, 3).spectrum_free().is_err());
    }

    #[test]
    fn colspace_examples() {
        let f = gf(3);
        let m = GfMatrix::from_rows(&f, &[vec![1, 2], vec![0, 1], vec![2, 2]]);
        assert!(m.colspace_contains(&[Elem(0); 3]).unwrap());
        assert!(m.colspace_contains(&m.column(0)).unwrap());
        assert!(!GfMatrix::zeros(&f, 3, 2).colspace_contains(&[Elem(1), Elem(0), Elem(0)]).unwrap());
        assert!(m.colspace_contains(&[Elem(1)]).is_err());
    }

    #[test]
    fn intersection_examples() {
        let f = gf(2);
        let u = Subspace::span(&f, 3, &[vec![Elem(1), Elem(1), Elem(0)], vec![Elem(0), Elem(1), Elem(1)]]);
        assert_eq!(u.intersect(&u).unwrap(), u);
        assert_eq!(u.intersect(&Subspace::full(&f, 3)).unwrap(), u);
        let l1 = Subspace::span(&f, 2, &[vec![Elem(1), Elem(0)]]);
        let l2 = Subspace::span(&f, 2, &[vec![Elem(1), Elem(1)]]);
        assert_eq!(l1.intersect(&l2).unwrap().dim(), 0);
    }

    #[test]
    fn kernel_and_inverse() {
        let f = gf(5);
        let m = GfMatrix::from_rows(&f, &[vec![1, 2, 3], vec![2, 4, 2]]);
        let k = m.kernel();
        assert_eq!(k.rows(), 1);
        assert!(m.mul(&k.transpose()).is_zero());
        let a = GfMatrix::from_rows(&f, &[vec![2, 1], vec![1, 1]]);
        assert_eq!(a.mul(&a.inverse().unwrap()), GfMatrix::identity(&f, 2));
        assert!(GfMatrix::from_rows(&f, &[vec![1, 2], vec![2, 4]]).inverse().is_none());
    }

    #[test]
    fn determinant_matches_formula() {
        let f = gf(7);
        for a in 0..7 {
            for d in 0..7 {
                let m = GfMatrix::from_rows(&f, &[vec![a, 3], vec![5, d]]);
                let expect = (a * d + 7 * 15 - 15) % 7;
                assert_eq!(m.det().unwrap(), Elem(expect));
            }
        }
    }
}
