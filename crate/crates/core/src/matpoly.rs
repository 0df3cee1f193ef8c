//! Matrix polynomials `P(λ) = Σ A_i λ^i` with an explicit grade, plus a
//! small rectangular polynomial-matrix type used for dual-basis products.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Field, Scalar};

/// Square matrix polynomial of grade `k` (coefficients `A_0..A_k`).
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPolynomial<T> {
    n: usize,
    coeffs: Vec<Matrix<T>>,
}

impl<T: Scalar> MatrixPolynomial<T> {
    pub fn new(coeffs: Vec<Matrix<T>>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::Grade("a matrix polynomial needs at least one coefficient".into()));
        };
        let n = first.rows();
        if n == 0 {
            return Err(Error::Dimension("block size must be positive".into()));
        }
        for (i, a) in coeffs.iter().enumerate() {
            if a.rows() != n || a.cols() != n {
                return Err(Error::Dimension(format!("A_{i} is {}x{}, expected {n}x{n}", a.rows(), a.cols())));
            }
        }
        Ok(MatrixPolynomial { n, coeffs })
    }

    /// Scalar polynomial (n = 1) from integer coefficients, lowest first.
    pub fn scalar(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Matrix::from_i64(1, 1, &[c])).collect()).expect("non-empty")
    }

    pub fn zeros(n: usize, k: usize) -> Self {
        MatrixPolynomial { n, coeffs: vec![Matrix::zeros(n, n); k + 1] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The declared grade.
    pub fn grade(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Largest `d` with `A_d != 0`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|a| !a.is_zero())
    }

    pub fn coeff(&self, i: usize) -> &Matrix<T> {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[Matrix<T>] {
        &self.coeffs
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> MatrixPolynomial<U> {
        MatrixPolynomial { n: self.n, coeffs: self.coeffs.iter().map(|a| a.map(f)).collect() }
    }

    /// Horner evaluation at `x`.
    pub fn evaluate(&self, x: &T) -> Matrix<T> {
        let mut acc = self.coeffs.last().unwrap().clone();
        for a in self.coeffs.iter().rev().skip(1) {
            acc = acc.scale(x).add(a);
        }
        acc
    }

    /// `rev P(λ) = λ^k P(1/λ)`: coefficient `i` becomes `A_{k-i}`.
    pub fn reversal(&self) -> Self {
        MatrixPolynomial { n: self.n, coeffs: self.coeffs.iter().rev().cloned().collect() }
    }

    pub fn neg(&self) -> Self {
        MatrixPolynomial { n: self.n, coeffs: self.coeffs.iter().map(Matrix::neg).collect() }
    }

    fn need_positive_grade(&self) -> Result<usize> {
        match self.grade() {
            0 => Err(Error::Grade("operation needs grade k >= 1".into())),
            k => Ok(k),
        }
    }

    /// `P^{k-1}`: drops `A_k`.
    pub fn truncate_low(&self) -> Result<Self> {
        let k = self.need_positive_grade()?;
        Ok(MatrixPolynomial { n: self.n, coeffs: self.coeffs[..k].to_vec() })
    }

    /// `P^{k-1}_{k-1}`: coefficient `i` is `A_{i+1}` for `i = 0..k-2`.
    pub fn middle_part(&self) -> Result<Self> {
        let k = self.need_positive_grade()?;
        if k < 2 {
            return Err(Error::Grade("middle part needs grade k >= 2".into()));
        }
        Ok(MatrixPolynomial { n: self.n, coeffs: self.coeffs[1..k].to_vec() })
    }

    /// The `(k-1)`th Horner shift `P_{k-1}`: coefficient `i` is `A_{i+1}`.
    pub fn horner_shift(&self) -> Result<Self> {
        self.need_positive_grade()?;
        Ok(MatrixPolynomial { n: self.n, coeffs: self.coeffs[1..].to_vec() })
    }

    /// Coefficients `A_lo..A_hi` as a polynomial of grade `hi - lo`.
    pub fn slice(&self, lo: usize, hi: usize) -> Self {
        MatrixPolynomial { n: self.n, coeffs: self.coeffs[lo..=hi].to_vec() }
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|a| a.approx_eq(&a.transpose()))
    }

    pub fn is_hermitian(&self) -> Result<bool> {
        if !T::COMPLEX {
            return Err(Error::Field(format!(
                "hermitian check needs a complex field, got {}",
                T::FIELD.name()
            )));
        }
        Ok(self.coeffs.iter().all(|a| a.approx_eq(&a.conj_transpose())))
    }

    /// Regularity test: `det P` has degree at most `kn`, so it vanishes
    /// identically iff it vanishes at `kn + 1` distinct points. Exact over
    /// the rationals.
    pub fn is_regular(&self) -> bool {
        let pts = self.grade() * self.n + 1;
        (0..pts as i64).any(|i| {
            let x = T::from_i64(2 * i + 1) / T::from_i64(i + 2);
            !self.evaluate(&x).det().expect("square").is_negligible()
        })
    }

    pub fn to_poly_matrix(&self) -> PolyMatrix<T> {
        PolyMatrix { rows: self.n, cols: self.n, coeffs: self.coeffs.clone() }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "k": self.grade(),
            "field": T::FIELD.name(),
            "coeffs": self.coeffs.iter().map(Matrix::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = v.get("field").and_then(Value::as_str).unwrap_or(T::FIELD.name());
        check_field::<T>(field)?;
        let n = get_usize(v, "n")?;
        let k = get_usize(v, "k")?;
        let cs = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing `coeffs`".into()))?;
        if cs.len() != k + 1 {
            return Err(Error::Grade(format!("k = {k} but {} coefficients", cs.len())));
        }
        let coeffs = cs.iter().map(|c| Matrix::from_json(c, Some((n, n)))).collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }
}

pub(crate) fn get_usize(v: &Value, key: &str) -> Result<usize> {
    v.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("missing or invalid `{key}`")))
}

/// Rejects a JSON `field` tag that cannot be read as `T`. Rational data may
/// be read into a float type, not the other way round.
pub(crate) fn check_field<T: Scalar>(field: &str) -> Result<()> {
    let f = Field::parse(field)?;
    let ok = f == T::FIELD || f == Field::Rational || (f == Field::Real && T::FIELD == Field::Complex);
    if ok {
        Ok(())
    } else {
        Err(Error::Field(format!("cannot read {} data as {}", f.name(), T::FIELD.name())))
    }
}

/// Rectangular matrix with polynomial entries, stored by coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix<T> {
    rows: usize,
    cols: usize,
    coeffs: Vec<Matrix<T>>,
}

impl<T: Scalar> PolyMatrix<T> {
    pub fn new(rows: usize, cols: usize, coeffs: Vec<Matrix<T>>) -> Result<Self> {
        if coeffs.iter().any(|c| c.rows() != rows || c.cols() != cols) {
            return Err(Error::Dimension("polynomial matrix coefficients of unequal shape".into()));
        }
        let mut p = PolyMatrix { rows, cols, coeffs };
        p.trim();
        Ok(p)
    }

    pub fn constant(m: Matrix<T>) -> Self {
        PolyMatrix::new(m.rows(), m.cols(), vec![m]).unwrap()
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Coefficients, lowest first; trailing zero coefficients are trimmed.
    pub fn coeffs(&self) -> &[Matrix<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Matrix<T> {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Matrix::zeros(self.rows, self.cols))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn entry_degree(&self, i: usize, j: usize) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c[(i, j)].is_negligible())
    }

    pub fn row_degree(&self, i: usize) -> Option<usize> {
        (0..self.cols).filter_map(|j| self.entry_degree(i, j)).max()
    }

    /// Row `i` of the highest-row-degree coefficient matrix collects the
    /// coefficients of `λ^{d_i}` in row `i`.
    pub fn highest_row_degree_matrix(&self) -> Matrix<T> {
        let mut out = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            if let Some(d) = self.row_degree(i) {
                for j in 0..self.cols {
                    out[(i, j)] = self.coeffs[d][(i, j)].clone();
                }
            }
        }
        out
    }

    pub fn evaluate(&self, x: &T) -> Matrix<T> {
        let mut acc = Matrix::zeros(self.rows, self.cols);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(x).add(c);
        }
        acc
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "poly mul: {}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        if self.is_zero() || o.is_zero() {
            return Ok(PolyMatrix { rows: self.rows, cols: o.cols, coeffs: vec![] });
        }
        let mut coeffs = vec![Matrix::zeros(self.rows, o.cols); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.try_mul(b)?);
            }
        }
        PolyMatrix::new(self.rows, o.cols, coeffs)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Dimension("poly add shape mismatch".into()));
        }
        let len = self.coeffs.len().max(o.coeffs.len());
        PolyMatrix::new(self.rows, self.cols, (0..len).map(|i| self.coeff(i).add(&o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&T::one().neg_ref()))
    }

    pub fn scale(&self, a: &T) -> Self {
        let mut p = PolyMatrix { rows: self.rows, cols: self.cols, coeffs: self.coeffs.iter().map(|c| c.scale(a)).collect() };
        p.trim();
        p
    }

    pub fn left_mul_const(&self, b: &Matrix<T>) -> Result<Self> {
        PolyMatrix::constant(b.clone()).mul(self)
    }

    pub fn transpose(&self) -> Self {
        PolyMatrix { rows: self.cols, cols: self.rows, coeffs: self.coeffs.iter().map(Matrix::transpose).collect() }
    }

    /// Reads a square polynomial matrix as a matrix polynomial of the given
    /// grade (higher coefficients must vanish).
    pub fn to_matrix_polynomial(&self, grade: usize) -> Result<MatrixPolynomial<T>> {
        if self.rows != self.cols {
            return Err(Error::Dimension("not square".into()));
        }
        if self.coeffs.len() > grade + 1 {
            return Err(Error::Grade(format!("degree {} exceeds grade {grade}", self.coeffs.len() - 1)));
        }
        MatrixPolynomial::new((0..=grade).map(|i| self.coeff(i)).collect())
    }
}

impl<T: Scalar> PolyMatrix<T> {
    /// `λ` times the identity of size `n`.
    pub fn lambda_identity(n: usize) -> Self {
        PolyMatrix::new(n, n, vec![Matrix::zeros(n, n), Matrix::identity(n)]).unwrap()
    }
}

/// `x^p` by repeated multiplication.
pub fn pow<T: Scalar>(x: &T, p: usize) -> T {
    let mut r = T::one();
    for _ in 0..p {
        r = r.mul_ref(x);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio, Rational};

    fn p_of(c: &[i64]) -> MatrixPolynomial<Rational> {
        MatrixPolynomial::scalar(c)
    }

    #[test]
    fn evaluation() {
        assert_eq!(p_of(&[-1, 0, 1]).evaluate(&rat(2))[(0, 0)], rat(3));
        assert_eq!(p_of(&[0, -1, 0, 1]).evaluate(&rat(-1))[(0, 0)], rat(0));
        assert_eq!(p_of(&[7, 3, 1]).evaluate(&rat(0))[(0, 0)], rat(7));
    }

    #[test]
    fn reversal_matches_definition() {
        let p = p_of(&[0, -1, 0, 1]);
        assert_eq!(p.reversal(), p_of(&[1, 0, -1, 0]));
        assert_eq!(p.reversal().reversal(), p);
        let x = ratio(3, 7);
        let lhs = p.reversal().evaluate(&x);
        let rhs = p.evaluate(&(rat(1) / x.clone())).scale(&pow(&x, 3));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn truncations() {
        let p = p_of(&[0, 1, 2, 3, 4, 5]);
        assert_eq!(p.truncate_low().unwrap(), p_of(&[0, 1, 2, 3, 4]));
        assert_eq!(p.middle_part().unwrap(), p_of(&[1, 2, 3, 4]));
        assert_eq!(p.horner_shift().unwrap(), p_of(&[1, 2, 3, 4, 5]));
        assert!(p_of(&[1]).truncate_low().is_err());
        // P = λ P_{k-1} + A_0
        let x = ratio(-2, 5);
        let lhs = p.horner_shift().unwrap().evaluate(&x).scale(&x).add(p.coeff(0));
        assert_eq!(lhs, p.evaluate(&x));
    }

    #[test]
    fn symmetry_flags() {
        let a1 = Matrix::from_i64(2, 2, &[0, 1, 0, 0]);
        let p = MatrixPolynomial::new(vec![Matrix::<Rational>::identity(2), a1]).unwrap();
        assert!(!p.is_symmetric());
        assert!(p_of(&[3, 1, 4]).is_symmetric());
        assert!(p.is_hermitian().is_err());
    }

    #[test]
    fn regularity() {
        assert!(p_of(&[1, 0, 1]).is_regular());
        let z = MatrixPolynomial::new(vec![Matrix::<Rational>::from_i64(2, 2, &[1, 0, 0, 0]); 3]).unwrap();
        assert!(!z.is_regular());
    }

    #[test]
    fn json_round_trip() {
        let p = p_of(&[1, -2, 3]);
        let back = MatrixPolynomial::<Rational>::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn poly_matrix_product() {
        // [1, λ] * [λ; -1] = 0
        let a = PolyMatrix::new(1, 2, vec![Matrix::<Rational>::from_i64(1, 2, &[1, 0]), Matrix::from_i64(1, 2, &[0, 1])]).unwrap();
        let b = PolyMatrix::new(2, 1, vec![Matrix::from_i64(2, 1, &[0, -1]), Matrix::from_i64(2, 1, &[1, 0])]).unwrap();
        assert!(a.mul(&b).unwrap().is_zero());
    }
}
