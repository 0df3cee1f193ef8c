//! The dual minimal bases `K_s = L_s ⊗ I_n` and `Λ_s ⊗ I_n`, an exact
//! minimal-basis test, and recovery of the polynomial linearized by a block
//! minimal bases pencil.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blockpencil::BlockPencil;
use crate::error::{Error, Result};
use crate::matpoly::{MatrixPolynomial, PolyMatrix};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// `K_s(λ) = L_s(λ) ⊗ I_n` as an `s × (s+1)` block pencil.
pub fn make_k<T: Scalar>(s: usize, n: usize) -> BlockPencil<T> {
    let mut k = BlockPencil::zeros(n, s, s + 1);
    let z = Matrix::zeros(n, n);
    let id = Matrix::identity(n);
    for i in 0..s {
        k.set_block(i, i, &z, &id.neg());
        k.set_block(i, i + 1, &id, &z);
    }
    k
}

/// `Λ_s(λ) ⊗ I_n = [λ^s I, …, λ I, I]`, an `n × (s+1)n` polynomial matrix.
pub fn make_lambda<T: Scalar>(s: usize, n: usize) -> PolyMatrix<T> {
    let coeffs = (0..=s)
        .map(|d| {
            let mut m = Matrix::zeros(n, (s + 1) * n);
            m.set_submatrix(0, (s - d) * n, &Matrix::identity(n));
            m
        })
        .collect();
    PolyMatrix::new(n, (s + 1) * n, coeffs).unwrap()
}

// Dense univariate polynomials, lowest coefficient first, no trailing zeros.
mod upoly {
    use crate::scalar::Scalar;

    pub fn trim<T: Scalar>(mut p: Vec<T>) -> Vec<T> {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }

    /// Interpolates through `(xs[i], ys[i])` with Newton divided differences.
    pub fn interpolate<T: Scalar>(xs: &[T], ys: &[T]) -> Vec<T> {
        let m = xs.len();
        let mut dd = ys.to_vec();
        for j in 1..m {
            for i in (j..m).rev() {
                let num = dd[i].sub_ref(&dd[i - 1]);
                dd[i] = num.div_ref(&xs[i].sub_ref(&xs[i - j]));
            }
        }
        let mut p = vec![T::zero(); m];
        for i in (0..m).rev() {
            // p = p * (λ - xs[i]) + dd[i]
            let mut q = vec![T::zero(); m];
            for d in 0..m {
                if p[d].is_zero() {
                    continue;
                }
                if d + 1 < m {
                    q[d + 1] = q[d + 1].add_ref(&p[d]);
                }
                q[d] = q[d].sub_ref(&p[d].mul_ref(&xs[i]));
            }
            q[0] = q[0].add_ref(&dd[i]);
            p = q;
        }
        trim(p)
    }

    fn rem<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
        let mut r = a.to_vec();
        let lb = b.last().unwrap().clone();
        while r.len() >= b.len() && !r.is_empty() {
            let f = r.last().unwrap().div_ref(&lb);
            let shift = r.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                r[shift + i] = r[shift + i].sub_ref(&c.mul_ref(&f));
            }
            r.pop();
            r = trim(r);
        }
        r
    }

    pub fn gcd<T: Scalar>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
        let (mut a, mut b) = (trim(a), trim(b));
        while !b.is_empty() {
            let r = rem(&a, &b);
            a = b;
            b = r;
        }
        a
    }

    pub fn is_nonzero_constant<T: Scalar>(p: &[T]) -> bool {
        p.len() == 1
    }
}

/// Ceiling on the number of maximal minors examined before giving up.
const MAX_MINORS: usize = 50_000;

/// Exact minimal-basis test: the highest-row-degree matrix has full row
/// rank, and `G(λ₀)` has full row rank for every `λ₀`, certified by the gcd
/// of the maximal minors being a nonzero constant. Needs an exact field.
pub fn is_minimal_basis<T: Scalar>(g: &PolyMatrix<T>) -> Result<bool> {
    if !T::EXACT {
        return Err(Error::Field("the minimal-basis test needs exact arithmetic".into()));
    }
    let (m, cols) = (g.rows(), g.cols());
    if m == 0 {
        return Ok(true);
    }
    if m > cols {
        return Ok(false);
    }
    let mut degsum = 0;
    for i in 0..m {
        match g.row_degree(i) {
            Some(d) => degsum += d,
            None => return Ok(false),
        }
    }
    if g.highest_row_degree_matrix().rank() < m {
        return Ok(false);
    }
    let xs: Vec<T> = (0..=degsum as i64).map(T::from_i64).collect();
    let evals: Vec<Matrix<T>> = xs.iter().map(|x| g.evaluate(x)).collect();
    if evals.iter().any(|e| e.rank() < m) {
        return Ok(false);
    }

    // Random combinations det(G(λ)R) are sums of maximal minors, so their
    // gcd is a multiple of the gcd of all minors.
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d62);
    let mut acc: Vec<T> = Vec::new();
    for _ in 0..4 {
        let r = Matrix::from_fn(cols, m, |_, _| T::from_i64(rng.gen_range(-3..=3)));
        let ys: Vec<T> = evals.iter().map(|e| e.mul(&r).det().unwrap()).collect();
        acc = upoly::gcd(acc, upoly::interpolate(&xs, &ys));
        if upoly::is_nonzero_constant(&acc) {
            return Ok(true);
        }
    }

    // Fall back to the minors themselves.
    let mut idx: Vec<usize> = (0..m).collect();
    let mut seen = 0usize;
    loop {
        seen += 1;
        if seen > MAX_MINORS {
            return Err(Error::Certificate(format!("minimal-basis test undecided after {MAX_MINORS} minors")));
        }
        let ys: Vec<T> = evals
            .iter()
            .map(|e| Matrix::from_fn(m, m, |i, j| e[(i, idx[j])].clone()).det().unwrap())
            .collect();
        acc = upoly::gcd(acc, upoly::interpolate(&xs, &ys));
        if upoly::is_nonzero_constant(&acc) {
            return Ok(true);
        }
        // next combination
        let mut i = m;
        while i > 0 && idx[i - 1] == cols - m + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return Ok(false);
        }
        idx[i - 1] += 1;
        for j in i..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `G N^T = 0` identically.
pub fn annihilates<T: Scalar>(g: &PolyMatrix<T>, n: &PolyMatrix<T>) -> Result<bool> {
    Ok(g.mul(&n.transpose())?.is_zero())
}

/// Two polynomial matrices claimed to be dual minimal bases.
#[derive(Clone, Debug)]
pub struct DualBasisPair<T> {
    pub basis: PolyMatrix<T>,
    pub dual: PolyMatrix<T>,
}

impl<T: Scalar> DualBasisPair<T> {
    /// `K_s` with `Λ_s`.
    pub fn kronecker(s: usize, n: usize) -> Self {
        DualBasisPair { basis: make_k::<T>(s, n).to_poly_matrix(), dual: make_lambda(s, n) }
    }

    /// Row counts add up to the column count, both are minimal bases, and
    /// `basis · dual^T = 0`.
    pub fn check(&self) -> Result<bool> {
        if self.basis.cols() != self.dual.cols() || self.basis.rows() + self.dual.rows() != self.basis.cols() {
            return Ok(false);
        }
        Ok(annihilates(&self.basis, &self.dual)? && is_minimal_basis(&self.basis)? && is_minimal_basis(&self.dual)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisCheck {
    Holds,
    Fails,
    /// `B` is singular, so nothing is claimed.
    NotApplicable,
}

/// For nonsingular `B`, `B·G` is again a minimal basis and `dual` is still
/// dual to it.
pub fn scaled_basis_check<T: Scalar>(b: &Matrix<T>, g: &PolyMatrix<T>, dual: &PolyMatrix<T>) -> Result<BasisCheck> {
    if !b.is_nonsingular() {
        return Ok(BasisCheck::NotApplicable);
    }
    let bg = g.left_mul_const(b)?;
    let ok = is_minimal_basis(&bg)? && annihilates(&bg, dual)?;
    Ok(if ok { BasisCheck::Holds } else { BasisCheck::Fails })
}

/// The pieces of `[M | G2^T ; G1 | 0]` where `M` is `(q+1)×(p+1)` blocks,
/// `G1` is `p×(p+1)` and `G2` is `q×(q+1)`.
#[derive(Clone, Debug)]
pub struct MinimalBasesPartition<T> {
    pub body: BlockPencil<T>,
    pub g1: BlockPencil<T>,
    pub g2: BlockPencil<T>,
    pub p: usize,
    pub q: usize,
}

pub fn partition<T: Scalar>(c: &BlockPencil<T>, p: usize, q: usize) -> Result<MinimalBasesPartition<T>> {
    if c.rows() != p + q + 1 || c.cols() != p + q + 1 {
        return Err(Error::Dimension(format!(
            "a {}x{} pencil cannot be split with p={p}, q={q}",
            c.rows(),
            c.cols()
        )));
    }
    if !c.sub_pencil(q + 1, p + 1, p, q).is_zero() {
        return Err(Error::Dimension("the bottom-right block of the partition is not zero".into()));
    }
    Ok(MinimalBasesPartition {
        body: c.sub_pencil(0, 0, q + 1, p + 1),
        g1: c.sub_pencil(q + 1, 0, p, p + 1),
        g2: c.sub_pencil(0, p + 1, q + 1, q).transpose(),
        p,
        q,
    })
}

impl<T: Scalar> MinimalBasesPartition<T> {
    /// Both off-diagonal pieces are minimal bases.
    pub fn is_block_minimal_bases_pencil(&self) -> Result<bool> {
        Ok(is_minimal_basis(&self.g1.to_poly_matrix())? && is_minimal_basis(&self.g2.to_poly_matrix())?)
    }
}

/// `Q = N2 M N1^T` read as a polynomial of grade `1 + deg N1 + deg N2`.
pub fn recover_q<T: Scalar>(
    body: &BlockPencil<T>,
    n1: &PolyMatrix<T>,
    n2: &PolyMatrix<T>,
    grade: usize,
) -> Result<MatrixPolynomial<T>> {
    let q = n2.mul(&body.to_poly_matrix())?.mul(&n1.transpose())?;
    q.to_matrix_polynomial(grade)
}

/// [`recover_q`] for a pencil partitioned with `p = s1`, `q = s2` and the
/// duals `Λ_{s1}`, `Λ_{s2}`.
pub fn recover_q_kronecker<T: Scalar>(c: &BlockPencil<T>, s1: usize, s2: usize) -> Result<MatrixPolynomial<T>> {
    let part = partition(c, s1, s2)?;
    let n = c.n();
    recover_q(&part.body, &make_lambda(s1, n), &make_lambda(s2, n), 1 + s1 + s2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn pm(rows: usize, cols: usize, coeffs: &[&[i64]]) -> PolyMatrix<Rational> {
        PolyMatrix::new(rows, cols, coeffs.iter().map(|c| Matrix::from_i64(rows, cols, c)).collect()).unwrap()
    }

    #[test]
    fn k_and_lambda_smallest() {
        let k = make_k::<Rational>(1, 1);
        assert_eq!(k.lambda(), &Matrix::from_i64(1, 2, &[0, 1]));
        assert_eq!(k.constant(), &Matrix::from_i64(1, 2, &[-1, 0]));
        let l = make_lambda::<Rational>(2, 1);
        assert_eq!(l.evaluate(&rat(3)), Matrix::from_i64(1, 3, &[9, 3, 1]));
    }

    #[test]
    fn k_lambda_duality() {
        for s in 0..5 {
            for n in 1..3 {
                let pair = DualBasisPair::<Rational>::kronecker(s, n);
                assert!(pair.check().unwrap(), "s={s} n={n}");
            }
        }
    }

    #[test]
    fn textbook_minimal_basis() {
        // [[1, λ², 1-λ], [0, 1, λ]]
        let g = pm(2, 3, &[&[1, 0, 1, 0, 1, 0], &[0, 0, -1, 0, 0, 1], &[0, 1, 0, 0, 0, 0]]);
        assert!(is_minimal_basis(&g).unwrap());
    }

    #[test]
    fn rank_drop_at_zero() {
        let g = pm(2, 2, &[&[0, 0, 0, 0], &[1, 0, 0, 1]]);
        assert!(!is_minimal_basis(&g).unwrap());
        // full rank everywhere but highest-row-degree matrix singular
        let g = pm(1, 2, &[&[1, 0], &[0, 0], &[1, 1]]);
        assert!(is_minimal_basis(&g).unwrap());
        let g = pm(2, 3, &[&[1, 0, 0, 0, 1, 0], &[0, 0, 1, 0, 0, 1]]);
        assert!(!is_minimal_basis(&g).unwrap());
    }

    #[test]
    fn rank_drop_away_from_sample_points() {
        // [λ² + 1, 0] loses rank at ±i only
        let g = pm(1, 2, &[&[1, 0], &[0, 0], &[1, 0]]);
        assert!(!is_minimal_basis(&g).unwrap());
    }

    #[test]
    fn scaled_bases() {
        let g = make_k::<Rational>(2, 1).to_poly_matrix();
        let dual = make_lambda::<Rational>(2, 1);
        assert_eq!(scaled_basis_check(&Matrix::identity(2), &g, &dual).unwrap(), BasisCheck::Holds);
        let b = Matrix::from_i64(2, 2, &[2, 1, -1, 3]);
        assert_eq!(scaled_basis_check(&b, &g, &dual).unwrap(), BasisCheck::Holds);
        let b = Matrix::from_i64(2, 2, &[1, 2, 2, 4]);
        assert_eq!(scaled_basis_check(&b, &g, &dual).unwrap(), BasisCheck::NotApplicable);
    }
}
