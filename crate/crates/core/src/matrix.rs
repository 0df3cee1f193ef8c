//! Dense row-major matrices over a [`Scalar`] field.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn scalar_identity(n: usize, a: T) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { a.clone() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.iter().flatten().cloned().collect() })
    }

    pub fn from_i64(rows: usize, cols: usize, vals: &[i64]) -> Self {
        assert_eq!(vals.len(), rows * cols);
        Matrix { rows, cols, data: vals.iter().map(|&v| T::from_i64(v)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn check_same(&self, o: &Self, what: &str) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Dimension(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_same(o, "add")?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add_ref(b)).collect(),
        })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check_same(o, "sub")?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub_ref(b)).collect(),
        })
    }

    /// Product; zero entries of `self` and `o` are skipped, which matters for
    /// the very sparse elementary matrices.
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "mul: {}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o.data[k * o.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    out.data[idx] = out.data[idx].add_ref(&a.mul_ref(b));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("matrix add")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("matrix sub")
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("matrix mul")
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.neg_ref())
    }

    pub fn scale(&self, a: &T) -> Self {
        self.map(|x| x.mul_ref(a))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_negligible())
    }

    /// Equality up to [`Scalar::is_negligible`]; exact for rationals.
    pub fn approx_eq(&self, o: &Self) -> bool {
        self.rows == o.rows
            && self.cols == o.cols
            && self.data.iter().zip(&o.data).all(|(a, b)| a.sub_ref(b).is_negligible())
    }

    /// Is this `a * I` for some scalar `a`? Returns `a`.
    pub fn as_scalar_identity(&self) -> Option<T> {
        if !self.is_square() {
            return None;
        }
        if self.rows == 0 {
            return Some(T::zero());
        }
        let a = self[(0, 0)].clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { a.clone() } else { T::zero() };
                if !self[(i, j)].sub_ref(&want).is_negligible() {
                    return None;
                }
            }
        }
        Some(a)
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "submatrix out of range");
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn set_submatrix(&mut self, r0: usize, c0: usize, m: &Self) {
        assert!(r0 + m.rows <= self.rows && c0 + m.cols <= self.cols, "set_submatrix out of range");
        for i in 0..m.rows {
            for j in 0..m.cols {
                self[(r0 + i, c0 + j)] = m[(i, j)].clone();
            }
        }
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let p = if T::EXACT {
                (r..self.rows).find(|&i| !self[(i, c)].is_zero())
            } else {
                (r..self.rows)
                    .filter(|&i| !self[(i, c)].is_negligible())
                    .max_by(|&a, &b| {
                        self[(a, c)].magnitude().partial_cmp(&self[(b, c)].magnitude()).unwrap()
                    })
            };
            let Some(p) = p else { continue };
            self.swap_rows(p, r);
            let inv = T::one() / self[(r, c)].clone();
            for j in c..self.cols {
                self[(r, j)] = self[(r, j)].mul_ref(&inv);
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    let v = self[(r, j)].mul_ref(&f);
                    self[(i, j)] = self[(i, j)].sub_ref(&v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Rank by Gaussian elimination (exact for rationals).
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    pub fn is_nonsingular(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let p = if T::EXACT {
                (c..n).find(|&i| !m[(i, c)].is_zero())
            } else {
                (c..n).max_by(|&a, &b| m[(a, c)].magnitude().partial_cmp(&m[(b, c)].magnitude()).unwrap())
            };
            let Some(p) = p else { return Ok(T::zero()) };
            if m[(p, c)].is_zero() {
                return Ok(T::zero());
            }
            if p != c {
                m.swap_rows(p, c);
                det = det.neg_ref();
            }
            let piv = m[(c, c)].clone();
            det = det.mul_ref(&piv);
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].div_ref(&piv);
                for j in c..n {
                    let v = m[(c, j)].mul_ref(&f);
                    m[(i, j)] = m[(i, j)].sub_ref(&v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        aug.set_submatrix(0, 0, self);
        aug.set_submatrix(0, n, &Self::identity(n));
        let piv = aug.rref_in_place();
        if piv.len() < n || piv[n - 1] >= n {
            return Err(Error::Singular(format!("{n}x{n} matrix has no inverse")));
        }
        Ok(aug.submatrix(0, n, n, n))
    }

    /// A particular solution of `self * x = b` (free variables set to zero),
    /// or `None` when the system is inconsistent.
    pub fn solve_particular(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        aug.set_submatrix(0, 0, self);
        for (i, v) in b.iter().enumerate() {
            aug[(i, self.cols)] = v.clone();
        }
        let piv = aug.rref_in_place();
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (r, &c) in piv.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Dimension of the null space.
    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| Value::Array((0..self.cols).map(|j| self[(i, j)].to_json()).collect()))
                .collect(),
        )
    }

    /// Parses a list of rows. `expect` gives the shape when the list may be
    /// empty (0-row or 0-column matrices).
    pub fn from_json(v: &Value, expect: Option<(usize, usize)>) -> Result<Self> {
        let rows = v.as_array().ok_or_else(|| Error::Parse("matrix must be a list of rows".into()))?;
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            let r = r.as_array().ok_or_else(|| Error::Parse("matrix row must be a list".into()))?;
            out.push(r.iter().map(T::from_json).collect::<Result<Vec<_>>>()?);
        }
        let m = if out.is_empty() {
            let (r, c) = expect.unwrap_or((0, 0));
            if r != 0 {
                return Err(Error::Dimension(format!("expected {r} rows, got none")));
            }
            Self::zeros(0, c)
        } else {
            Self::from_rows(&out)?
        };
        if let Some((r, c)) = expect {
            if m.rows != r || m.cols != c {
                return Err(Error::Dimension(format!("expected {r}x{c}, got {}x{}", m.rows, m.cols)));
            }
        }
        Ok(m)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio, Rational};

    fn m(r: usize, c: usize, v: &[i64]) -> Matrix<Rational> {
        Matrix::from_i64(r, c, v)
    }

    #[test]
    fn inverse_and_det() {
        let a = m(3, 3, &[2, 1, 0, 1, 3, 1, 0, 1, 4]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(3));
        assert_eq!(a.det().unwrap(), rat(18));
        assert!(m(2, 2, &[1, 2, 2, 4]).inverse().is_err());
        assert_eq!(m(2, 2, &[1, 2, 2, 4]).det().unwrap(), rat(0));
    }

    #[test]
    fn rank_and_solve() {
        let a = m(3, 4, &[1, 2, 3, 4, 2, 4, 6, 8, 0, 1, 0, 1]);
        assert_eq!(a.rank(), 2);
        let b = vec![rat(10), rat(20), rat(2)];
        let x = a.solve_particular(&b).unwrap();
        let ax: Vec<_> = (0..3)
            .map(|i| (0..4).fold(rat(0), |s, j| s + a[(i, j)].clone() * x[j].clone()))
            .collect();
        assert_eq!(ax, b);
        assert!(a.solve_particular(&[rat(1), rat(1), rat(0)]).is_none());
    }

    #[test]
    fn scalar_identity_detection() {
        assert_eq!(Matrix::scalar_identity(2, ratio(1, 2)).as_scalar_identity(), Some(ratio(1, 2)));
        assert_eq!(m(2, 2, &[1, 1, 0, 1]).as_scalar_identity(), None);
    }

    #[test]
    fn float_rank_uses_pivoting() {
        let a: Matrix<f64> = Matrix::from_rows(&[vec![1e-3, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(a.rank(), 2);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).approx_eq(&Matrix::identity(2)));
    }
}
