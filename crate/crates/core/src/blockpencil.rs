//! Pencils `λX + Y` partitioned into `n×n` blocks, and block permutations.
//!
//! Block accessors take zero-based positions. Block permutations hold
//! one-based values, following the `(1:k)` notation for index lists.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matpoly::{check_field, get_usize, PolyMatrix};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct BlockPencil<T> {
    n: usize,
    rows: usize,
    cols: usize,
    lambda: Matrix<T>,
    constant: Matrix<T>,
}

impl<T: Scalar> BlockPencil<T> {
    pub fn new(n: usize, rows: usize, cols: usize, lambda: Matrix<T>, constant: Matrix<T>) -> Result<Self> {
        for (name, m) in [("lambda", &lambda), ("const", &constant)] {
            if m.rows() != rows * n || m.cols() != cols * n {
                return Err(Error::Dimension(format!(
                    "{name} part is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    rows * n,
                    cols * n
                )));
            }
        }
        Ok(BlockPencil { n, rows, cols, lambda, constant })
    }

    pub fn zeros(n: usize, rows: usize, cols: usize) -> Self {
        BlockPencil {
            n,
            rows,
            cols,
            lambda: Matrix::zeros(rows * n, cols * n),
            constant: Matrix::zeros(rows * n, cols * n),
        }
    }

    /// A constant block matrix viewed as a pencil with zero λ-part.
    pub fn from_constant(n: usize, m: Matrix<T>) -> Result<Self> {
        if !m.rows().is_multiple_of(n) || !m.cols().is_multiple_of(n) {
            return Err(Error::Dimension(format!("{}x{} is not a grid of {n}x{n} blocks", m.rows(), m.cols())));
        }
        let (r, c) = (m.rows() / n, m.cols() / n);
        Self::new(n, r, c, Matrix::zeros(m.rows(), m.cols()), m)
    }

    /// Constant pencil with an explicit block shape, for empty grids.
    pub fn from_constant_shaped(n: usize, rows: usize, cols: usize, m: Matrix<T>) -> Result<Self> {
        Self::new(n, rows, cols, Matrix::zeros(rows * n, cols * n), m)
    }

    pub fn identity(n: usize, k: usize) -> Self {
        Self::from_constant(n, Matrix::identity(n * k)).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
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

    /// The λ-part `X`.
    pub fn lambda(&self) -> &Matrix<T> {
        &self.lambda
    }

    /// The constant part `Y`.
    pub fn constant(&self) -> &Matrix<T> {
        &self.constant
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.is_zero() && self.constant.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.lambda.is_zero()
    }

    fn check_block(&self, i: usize, j: usize) {
        assert!(i < self.rows && j < self.cols, "block ({i},{j}) outside {}x{} grid", self.rows, self.cols);
    }

    /// `(X_ij, Y_ij)`, zero-based.
    pub fn block(&self, i: usize, j: usize) -> (Matrix<T>, Matrix<T>) {
        self.check_block(i, j);
        let n = self.n;
        (self.lambda.submatrix(i * n, j * n, n, n), self.constant.submatrix(i * n, j * n, n, n))
    }

    pub fn set_block(&mut self, i: usize, j: usize, x: &Matrix<T>, y: &Matrix<T>) {
        self.check_block(i, j);
        let n = self.n;
        self.lambda.set_submatrix(i * n, j * n, x);
        self.constant.set_submatrix(i * n, j * n, y);
    }

    pub fn add_to_block(&mut self, i: usize, j: usize, x: &Matrix<T>, y: &Matrix<T>) {
        let (a, b) = self.block(i, j);
        self.set_block(i, j, &a.add(x), &b.add(y));
    }

    /// Sub-grid of `nr × nc` blocks starting at block `(r0, c0)`.
    pub fn sub_pencil(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        let n = self.n;
        BlockPencil {
            n,
            rows: nr,
            cols: nc,
            lambda: self.lambda.submatrix(r0 * n, c0 * n, nr * n, nc * n),
            constant: self.constant.submatrix(r0 * n, c0 * n, nr * n, nc * n),
        }
    }

    /// Writes `p` into the grid with its top-left block at `(r0, c0)`.
    pub fn set_sub_pencil(&mut self, r0: usize, c0: usize, p: &Self) {
        assert_eq!(p.n, self.n);
        let n = self.n;
        self.lambda.set_submatrix(r0 * n, c0 * n, &p.lambda);
        self.constant.set_submatrix(r0 * n, c0 * n, &p.constant);
    }

    /// Block grid transposed; the blocks themselves are not transposed.
    pub fn block_transpose(&self) -> Self {
        let mut out = Self::zeros(self.n, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (x, y) = self.block(i, j);
                out.set_block(j, i, &x, &y);
            }
        }
        out
    }

    pub fn is_block_symmetric(&self) -> bool {
        self.is_square() && self.approx_eq(&self.block_transpose())
    }

    pub fn transpose(&self) -> Self {
        BlockPencil {
            n: self.n,
            rows: self.cols,
            cols: self.rows,
            lambda: self.lambda.transpose(),
            constant: self.constant.transpose(),
        }
    }

    pub fn conj_transpose(&self) -> Self {
        BlockPencil {
            n: self.n,
            rows: self.cols,
            cols: self.rows,
            lambda: self.lambda.conj_transpose(),
            constant: self.constant.conj_transpose(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.approx_eq(&self.transpose())
    }

    pub fn is_hermitian(&self) -> Result<bool> {
        if !T::COMPLEX {
            return Err(Error::Field(format!("hermitian check needs a complex field, got {}", T::FIELD.name())));
        }
        Ok(self.approx_eq(&self.conj_transpose()))
    }

    pub fn approx_eq(&self, o: &Self) -> bool {
        self.n == o.n
            && self.rows == o.rows
            && self.cols == o.cols
            && self.lambda.approx_eq(&o.lambda)
            && self.constant.approx_eq(&o.constant)
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.n != o.n || self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Dimension(format!(
                "pencils {}x{} (n={}) and {}x{} (n={})",
                self.rows, self.cols, self.n, o.rows, o.cols, o.n
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        Ok(BlockPencil { lambda: self.lambda.add(&o.lambda), constant: self.constant.add(&o.constant), ..self.clone() })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        Ok(BlockPencil { lambda: self.lambda.sub(&o.lambda), constant: self.constant.sub(&o.constant), ..self.clone() })
    }

    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("pencil add")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("pencil sub")
    }

    pub fn neg(&self) -> Self {
        BlockPencil { lambda: self.lambda.neg(), constant: self.constant.neg(), ..self.clone() }
    }

    pub fn scale(&self, a: &T) -> Self {
        BlockPencil { lambda: self.lambda.scale(a), constant: self.constant.scale(a), ..self.clone() }
    }

    /// Product of two pencils, at least one of which must be constant.
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.n != o.n || self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "pencil product {}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let (lambda, constant) = if o.is_constant() {
            (self.lambda.mul(&o.constant), self.constant.mul(&o.constant))
        } else if self.is_constant() {
            (self.constant.mul(&o.lambda), self.constant.mul(&o.constant))
        } else {
            return Err(Error::Dimension("product of two non-constant pencils is not a pencil".into()));
        };
        Ok(BlockPencil { n: self.n, rows: self.rows, cols: o.cols, lambda, constant })
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("pencil mul")
    }

    /// `λX + Y` from two constant block matrices.
    pub fn from_parts(x: &Self, y: &Self) -> Result<Self> {
        x.check_same(y)?;
        Ok(BlockPencil { lambda: x.constant.clone(), constant: y.constant.clone(), ..x.clone() })
    }

    /// `λX` as a constant block matrix `X`.
    pub fn lambda_part(&self) -> Self {
        BlockPencil { lambda: Matrix::zeros(self.lambda.rows(), self.lambda.cols()), constant: self.lambda.clone(), ..self.clone() }
    }

    /// The constant part as a constant pencil.
    pub fn constant_part(&self) -> Self {
        BlockPencil { lambda: Matrix::zeros(self.lambda.rows(), self.lambda.cols()), ..self.clone() }
    }

    /// `rev(λX + Y) = λY + X`.
    pub fn rev(&self) -> Self {
        BlockPencil { lambda: self.constant.clone(), constant: self.lambda.clone(), ..self.clone() }
    }

    pub fn evaluate(&self, x: &T) -> Matrix<T> {
        self.lambda.scale(x).add(&self.constant)
    }

    /// `(Π_c)^B L Π_c`, whose `(i,j)` block is `L_{c_i, c_j}`.
    pub fn congruence(&self, c: &BlockPermutation) -> Result<Self> {
        if !self.is_square() || c.len() != self.rows {
            return Err(Error::Dimension(format!(
                "congruence of a {}x{} pencil by a permutation of length {}",
                self.rows,
                self.cols,
                c.len()
            )));
        }
        let mut out = Self::zeros(self.n, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (x, y) = self.block(c.get(i + 1) - 1, c.get(j + 1) - 1);
                out.set_block(i, j, &x, &y);
            }
        }
        Ok(out)
    }

    /// `L Π_c`: block column `j` of the result is block column `c_j` of `L`.
    pub fn permute_columns(&self, c: &BlockPermutation) -> Result<Self> {
        if c.len() != self.cols {
            return Err(Error::Dimension("column permutation length".into()));
        }
        let mut out = Self::zeros(self.n, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (x, y) = self.block(i, c.get(j + 1) - 1);
                out.set_block(i, j, &x, &y);
            }
        }
        Ok(out)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> BlockPencil<U> {
        BlockPencil { n: self.n, rows: self.rows, cols: self.cols, lambda: self.lambda.map(f), constant: self.constant.map(f) }
    }

    pub fn to_poly_matrix(&self) -> PolyMatrix<T> {
        PolyMatrix::new(
            self.rows * self.n,
            self.cols * self.n,
            vec![self.constant.clone(), self.lambda.clone()],
        )
        .unwrap()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "rows": self.rows,
            "cols": self.cols,
            "field": T::FIELD.name(),
            "lambda": self.lambda.to_json(),
            "const": self.constant.to_json(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        if let Some(f) = v.get("field").and_then(Value::as_str) {
            check_field::<T>(f)?;
        }
        let n = get_usize(v, "n")?;
        let rows = get_usize(v, "rows")?;
        let cols = get_usize(v, "cols")?;
        let shape = Some((rows * n, cols * n));
        let x = Matrix::from_json(v.get("lambda").ok_or_else(|| Error::Parse("missing `lambda`".into()))?, shape)?;
        let y = Matrix::from_json(v.get("const").ok_or_else(|| Error::Parse("missing `const`".into()))?, shape)?;
        Self::new(n, rows, cols, x, y)
    }
}

/// A permutation `c` of `{1..k}`, one-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockPermutation {
    c: Vec<usize>,
}

impl BlockPermutation {
    pub fn new(c: Vec<usize>) -> Result<Self> {
        let k = c.len();
        let mut seen = vec![false; k];
        for &v in &c {
            if v == 0 || v > k || seen[v - 1] {
                return Err(Error::Permutation(format!("{c:?} is not a bijection on 1..{k}")));
            }
            seen[v - 1] = true;
        }
        Ok(BlockPermutation { c })
    }

    pub fn identity(k: usize) -> Self {
        BlockPermutation { c: (1..=k).collect() }
    }

    /// `(k:1)`, the permutation behind the sip matrix `R_k`.
    pub fn reverse(k: usize) -> Self {
        BlockPermutation { c: (1..=k).rev().collect() }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// `c_i` for one-based `i`.
    pub fn get(&self, i: usize) -> usize {
        self.c[i - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.c
    }

    /// `(self ∘ other)_i = self(other(i))`, so that
    /// `Π_self Π_other = Π_{self ∘ other}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension("composing permutations of different length".into()));
        }
        Ok(BlockPermutation { c: other.c.iter().map(|&i| self.c[i - 1]).collect() })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.c.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        BlockPermutation { c: inv }
    }

    /// `Π_c`: the `(c_i, i)` block is `I_n`.
    pub fn matrix<T: Scalar>(&self, n: usize) -> BlockPencil<T> {
        let k = self.len();
        let mut m = Matrix::zeros(k * n, k * n);
        for (i, &ci) in self.c.iter().enumerate() {
            m.set_submatrix((ci - 1) * n, i * n, &Matrix::identity(n));
        }
        BlockPencil::from_constant(n, m).unwrap()
    }

    /// Parses `(1,3,2)` or `1,3,2`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let c = t
            .split(',')
            .filter(|x| !x.trim().is_empty())
            .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad permutation entry `{x}`"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(c)
    }
}

impl fmt::Display for BlockPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.c.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn sample(k: usize, n: usize) -> BlockPencil<Rational> {
        let m = k * n;
        let x = Matrix::from_fn(m, m, |i, j| Rational::from_i64((i * 7 + j * 3) as i64 % 11 - 5));
        let y = Matrix::from_fn(m, m, |i, j| Rational::from_i64((i * 5 + j * 2) as i64 % 13 - 6));
        BlockPencil::new(n, k, k, x, y).unwrap()
    }

    #[test]
    fn block_transpose_is_involution() {
        let l = sample(3, 2);
        assert_eq!(l.block_transpose().block_transpose(), l);
        let one = sample(1, 2);
        assert_eq!(one.block_transpose(), one);
    }

    #[test]
    fn congruence_matches_matrix_product() {
        let l = sample(4, 2);
        let c = BlockPermutation::new(vec![2, 4, 1, 3]).unwrap();
        let pi = c.matrix::<Rational>(2);
        let direct = pi.block_transpose().mul(&l).mul(&pi);
        assert_eq!(l.congruence(&c).unwrap(), direct);
        assert_eq!(pi.block_transpose().mul(&pi), BlockPencil::identity(2, 4));
    }

    #[test]
    fn permutation_composition_matches_matrices() {
        let c = BlockPermutation::new(vec![3, 1, 4, 2]).unwrap();
        let d = BlockPermutation::new(vec![2, 4, 3, 1]).unwrap();
        let lhs = c.compose(&d).unwrap().matrix::<Rational>(1);
        let rhs = c.matrix::<Rational>(1).mul(&d.matrix(1));
        assert_eq!(lhs, rhs);
        assert_eq!(c.compose(&c.inverse()).unwrap(), BlockPermutation::identity(4));
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(BlockPermutation::new(vec![1, 1, 2]).is_err());
        assert!(BlockPermutation::new(vec![0, 1]).is_err());
        assert_eq!(BlockPermutation::parse("(1,3,2)").unwrap().as_slice(), &[1, 3, 2]);
    }

    #[test]
    fn json_round_trip() {
        let l = sample(2, 2);
        assert_eq!(BlockPencil::<Rational>::from_json(&l.to_json()).unwrap(), l);
    }
}
