//! Elementary matrices `M_i(B)`, their products over index tuples, the
//! block-symmetric GFP `T_P` and block-symmetric GFPR.

use crate::blockpencil::{BlockPencil, BlockPermutation};
use crate::error::{Error, Result};
use crate::matpoly::MatrixPolynomial;
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::tuples::{admissible_tuple, satisfies_sip, symmetric_complement, IndexTuple};

/// Index of an elementary matrix. `Neg(0)` is the index written `-0`,
/// distinct from `Pos(0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElemIndex {
    Pos(usize),
    Neg(usize),
}

impl ElemIndex {
    /// Tuple convention: nonnegative integers are `Pos`, negative ones `Neg`.
    pub fn from_int(i: i64) -> Self {
        if i >= 0 {
            ElemIndex::Pos(i as usize)
        } else {
            ElemIndex::Neg((-i) as usize)
        }
    }

    pub fn abs(self) -> usize {
        match self {
            ElemIndex::Pos(i) | ElemIndex::Neg(i) => i,
        }
    }
}

fn window<T: Scalar>(k: usize, n: usize, top: usize, w: [[Matrix<T>; 2]; 2]) -> BlockPencil<T> {
    let mut m = Matrix::identity(k * n);
    for (a, row) in w.iter().enumerate() {
        for (b, blk) in row.iter().enumerate() {
            m.set_submatrix((top + a) * n, (top + b) * n, blk);
        }
    }
    BlockPencil::from_constant(n, m).unwrap()
}

fn diag_at<T: Scalar>(k: usize, n: usize, pos: usize, b: &Matrix<T>) -> BlockPencil<T> {
    let mut m = Matrix::identity(k * n);
    m.set_submatrix(pos * n, pos * n, b);
    BlockPencil::from_constant(n, m).unwrap()
}

/// The elementary matrix `M_idx(B)` as a `k×k` grid of `n×n` blocks.
pub fn elementary<T: Scalar>(idx: ElemIndex, b: &Matrix<T>, k: usize, n: usize) -> Result<BlockPencil<T>> {
    if b.rows() != n || b.cols() != n {
        return Err(Error::Dimension(format!("elementary block is {}x{}, expected {n}x{n}", b.rows(), b.cols())));
    }
    if k == 0 {
        return Err(Error::Grade("k must be positive".into()));
    }
    let z = Matrix::zeros(n, n);
    let id = Matrix::identity(n);
    Ok(match idx {
        ElemIndex::Pos(0) => diag_at(k, n, k - 1, b),
        ElemIndex::Neg(i) if i == k => diag_at(k, n, 0, b),
        ElemIndex::Neg(0) => diag_at(k, n, k - 1, &b.inverse()?),
        ElemIndex::Pos(i) if i == k => diag_at(k, n, 0, &b.inverse()?),
        ElemIndex::Pos(i) if i < k => window(k, n, k - i - 1, [[b.clone(), id.clone()], [id, z]]),
        ElemIndex::Neg(i) if i < k => window(k, n, k - i - 1, [[z, id.clone()], [id, b.clone()]]),
        other => return Err(Error::Index(format!("{other:?} outside -{k}..{k}"))),
    })
}

/// `M_t(Z) = M_{i_1}(Z_1) ... M_{i_r}(Z_r)`; the identity for an empty tuple.
pub fn product<T: Scalar>(t: &IndexTuple, z: &[Matrix<T>], k: usize, n: usize) -> Result<BlockPencil<T>> {
    if t.len() != z.len() {
        return Err(Error::Dimension(format!("tuple of length {} with {} matrices", t.len(), z.len())));
    }
    let mut acc = BlockPencil::identity(n, k);
    for (&i, b) in t.as_slice().iter().zip(z) {
        check_tuple_index(i, k)?;
        acc = acc.mul(&elementary(ElemIndex::from_int(i), b, k, n)?);
    }
    Ok(acc)
}

fn check_tuple_index(i: i64, k: usize) -> Result<()> {
    let k = k as i64;
    if i < -k || i > k - 1 {
        return Err(Error::Index(format!("index {i} outside -{k}..{}", k - 1)));
    }
    Ok(())
}

/// `M_i^P = M_i(-A_i)` for `i = 0..k-1`, `M_{-i}^P = M_{-i}(A_i)` for
/// `i = 1..k`. The even-degree `T_P` also needs `M_k^P`, taken as
/// `M_k(A_k) = M_{-k}(A_k)^{-1}`.
pub fn elementary_p<T: Scalar>(p: &MatrixPolynomial<T>, idx: ElemIndex) -> Result<BlockPencil<T>> {
    let (k, n) = (p.grade(), p.n());
    match idx {
        ElemIndex::Pos(i) if i < k => elementary(idx, &p.coeff(i).neg(), k, n),
        ElemIndex::Pos(i) if i == k => elementary(idx, p.coeff(k), k, n),
        ElemIndex::Neg(i) if (1..=k).contains(&i) => elementary(idx, p.coeff(i), k, n),
        other => Err(Error::Index(format!("M^P undefined for {other:?} with k = {k}"))),
    }
}

/// `M^P_t` for a tuple of integers.
pub fn product_p<T: Scalar>(p: &MatrixPolynomial<T>, t: &IndexTuple) -> Result<BlockPencil<T>> {
    let mut acc = BlockPencil::identity(p.n(), p.grade());
    for &i in t.as_slice() {
        acc = acc.mul(&elementary_p(p, ElemIndex::from_int(i))?);
    }
    Ok(acc)
}

/// `λX - Y` for constant block matrices `X`, `Y`.
fn lambda_minus<T: Scalar>(x: &BlockPencil<T>, y: &BlockPencil<T>) -> BlockPencil<T> {
    BlockPencil::from_parts(x, &y.neg()).expect("same shape")
}

/// `T_P` from its elementary-product definition.
pub fn gfp_t_product<T: Scalar>(p: &MatrixPolynomial<T>) -> Result<BlockPencil<T>> {
    let k = p.grade();
    if k < 2 {
        return Err(Error::Grade(format!("T_P needs k >= 2, got {k}")));
    }
    let neg: Vec<i64> = (1..=k as i64).step_by(2).map(|i| -i).collect();
    let pos: Vec<i64> = (0..=k as i64).step_by(2).filter(|&i| k.is_multiple_of(2) || i < k as i64).collect();
    let x = product_p(p, &IndexTuple::new(neg))?;
    let y = product_p(p, &IndexTuple::new(pos))?;
    Ok(lambda_minus(&x, &y))
}

/// `T_P` from its explicit block template. For even `k` the corner block is
/// `-A_k^{-1}`, so `A_k` must be nonsingular.
pub fn gfp_t<T: Scalar>(p: &MatrixPolynomial<T>) -> Result<BlockPencil<T>> {
    let (k, n) = (p.grade(), p.n());
    if k < 2 {
        return Err(Error::Grade(format!("T_P needs k >= 2, got {k}")));
    }
    let id = Matrix::identity(n);
    let z = Matrix::zeros(n, n);
    let a = |i: usize| p.coeff(i).clone();
    let mut l = BlockPencil::zeros(n, k, k);
    // one-based block position p carries λA_{k-p+1} + A_{k-p} when p has
    // the parity of the first full diagonal block
    let full = if k % 2 == 1 { 1 } else { 2 };
    for q in 1..=k {
        if q % 2 == full % 2 {
            l.set_block(q - 1, q - 1, &a(k - q + 1), &a(k - q));
        }
        if q < k {
            // (q, q+1): -I after a full block, λI otherwise
            let (x, y) = if q % 2 == full % 2 { (z.clone(), id.neg()) } else { (id.clone(), z.clone()) };
            l.set_block(q - 1, q, &x, &y);
            l.set_block(q, q - 1, &x, &y);
        }
    }
    if k % 2 == 0 {
        let inv = p.coeff(k).inverse().map_err(|_| Error::Singular("T_P for even k needs A_k nonsingular".into()))?;
        l.set_block(0, 0, &z, &inv.neg());
    }
    Ok(l)
}

/// Which convention a caller uses for `t_v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TvConvention {
    /// Indices already in `-k..-h-2`, as they appear inside the product.
    Negative,
    /// Indices of `k + t_v`, in `0..k-h-2`.
    Shifted,
}

/// Recipe `(h, t_w, t_v, Z_w, Z_v)` for one block-symmetric GFPR of grade `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct GfprSpec<T> {
    pub k: usize,
    pub h: usize,
    pub t_w: IndexTuple,
    /// Stored negative.
    pub t_v: IndexTuple,
    pub z_w: Vec<Matrix<T>>,
    pub z_v: Vec<Matrix<T>>,
}

/// `v_h = -k + w_{k-h-1}`.
pub fn v_tuple(k: usize, h: usize) -> IndexTuple {
    admissible_tuple(k - h - 1).shift(-(k as i64))
}

impl<T: Scalar> GfprSpec<T> {
    pub fn new(
        k: usize,
        h: usize,
        t_w: IndexTuple,
        t_v: IndexTuple,
        conv: TvConvention,
        z_w: Vec<Matrix<T>>,
        z_v: Vec<Matrix<T>>,
    ) -> Result<Self> {
        if h >= k {
            return Err(Error::Index(format!("need 0 <= h < k, got h = {h}, k = {k}")));
        }
        let t_v = match conv {
            TvConvention::Negative => t_v,
            TvConvention::Shifted => t_v.shift(-(k as i64)),
        };
        let s = GfprSpec { k, h, t_w, t_v, z_w, z_v };
        s.validate()?;
        Ok(s)
    }

    /// FPR-free spec with empty tuples.
    pub fn simple(k: usize, h: usize) -> Result<Self> {
        Self::new(k, h, IndexTuple::empty(), IndexTuple::empty(), TvConvention::Negative, vec![], vec![])
    }

    pub fn validate(&self) -> Result<()> {
        let (k, h) = (self.k as i64, self.h as i64);
        if let Some(&x) = self.t_w.as_slice().iter().find(|&&x| x < 0 || x > h - 1) {
            return Err(Error::Index(format!("t_w index {x} outside 0..{}", h - 1)));
        }
        if let Some(&x) = self.t_v.as_slice().iter().find(|&&x| x < -k || x > -h - 2) {
            return Err(Error::Index(format!("t_v index {x} outside -{k}..{}", -h - 2)));
        }
        if self.z_w.len() != self.t_w.len() || self.z_v.len() != self.t_v.len() {
            return Err(Error::Dimension("matrix assignment length differs from tuple length".into()));
        }
        let tw = IndexTuple::concat(&[&self.t_w, &admissible_tuple(self.h), &symmetric_complement(self.h), &self.t_w.rev()]);
        if !satisfies_sip(&tw)? {
            return Err(Error::Sip(format!("(t_w, w_h, c_h, rev t_w) = {tw}")));
        }
        let c2 = symmetric_complement(self.k - self.h - 1).shift(-k);
        let tv = IndexTuple::concat(&[&self.t_v, &v_tuple(self.k, self.h), &c2, &self.t_v.rev()]);
        if !satisfies_sip(&tv)? {
            return Err(Error::Sip(format!("(t_v, v_h, -k + c, rev t_v) = {tv}")));
        }
        Ok(())
    }

    /// Matrices at the positions of `0` in `t_w` and `-k` in `t_v` are
    /// nonsingular.
    pub fn has_nonsingular_assignments(&self) -> bool {
        let k = self.k as i64;
        let w = self.t_w.as_slice().iter().zip(&self.z_w).filter(|(&i, _)| i == 0);
        let v = self.t_v.as_slice().iter().zip(&self.z_v).filter(|(&i, _)| i == -k);
        w.chain(v).all(|(_, z)| z.is_nonsingular())
    }

    /// Hypotheses under which the GFPR is a strong linearization:
    /// nonsingular assignments, `A_0` nonsingular for odd `h`, `A_k`
    /// nonsingular for even `k - h`.
    pub fn linearization_hypotheses(&self, p: &MatrixPolynomial<T>) -> bool {
        self.has_nonsingular_assignments()
            && (self.h.is_multiple_of(2) || p.coeff(0).is_nonsingular())
            && ((self.k - self.h) % 2 == 1 || p.coeff(self.k).is_nonsingular())
    }

    pub fn is_symmetric_assignment(&self) -> bool {
        self.z_w.iter().chain(&self.z_v).all(|z| z.approx_eq(&z.transpose()))
    }

    pub fn t_v_shifted(&self) -> IndexTuple {
        self.t_v.shift(self.k as i64)
    }
}

/// The block-symmetric GFPR
/// `M_{t_w,t_v}(Z_w,Z_v) (λ M^P_{v_h} - M^P_{w_h}) M^P_{-k+c_{k-h-1}, c_h} M_{rev t_w, rev t_v}(rev Z_w, rev Z_v)`.
pub fn build_gfpr<T: Scalar>(p: &MatrixPolynomial<T>, spec: &GfprSpec<T>) -> Result<BlockPencil<T>> {
    let (k, n, h) = (p.grade(), p.n(), spec.h);
    if spec.k != k {
        return Err(Error::Grade(format!("spec is for k = {}, polynomial has grade {k}", spec.k)));
    }
    spec.validate()?;
    for z in spec.z_w.iter().chain(&spec.z_v) {
        if z.rows() != n || z.cols() != n {
            return Err(Error::Dimension("assignment matrix of wrong size".into()));
        }
    }
    let left = product(&spec.t_w, &spec.z_w, k, n)?.mul(&product(&spec.t_v, &spec.z_v, k, n)?);
    let core = lambda_minus(&product_p(p, &v_tuple(k, h))?, &product_p(p, &admissible_tuple(h))?);
    let c2 = symmetric_complement(k - h - 1).shift(-(k as i64));
    let right_p = product_p(p, &IndexTuple::concat(&[&c2, &symmetric_complement(h)]))?;
    let zw_rev: Vec<_> = spec.z_w.iter().rev().cloned().collect();
    let zv_rev: Vec<_> = spec.z_v.iter().rev().cloned().collect();
    let right = product(&spec.t_w.rev(), &zw_rev, k, n)?.mul(&product(&spec.t_v.rev(), &zv_rev, k, n)?);
    Ok(left.mul(&core).mul(&right_p).mul(&right))
}

/// Explicit template of the simple FPR `F_k = (λM^P_{-k} - M^P_{w_{k-1}}) M^P_{c_{k-1}}`.
///
/// Chain positions `1, 2, 4, 6, ...` carry the coefficients: diagonal
/// `A_{k-p-1} - λA_{k-p}` at even `p` (with `A_{-1} = 0`), `A_{k-b}` between
/// consecutive chain positions `a < b`. Odd positions `q >= 3` hold the
/// wings: `λI` at `(q-1, q)` and `-I` one chain step earlier.
pub fn simple_fpr<T: Scalar>(p: &MatrixPolynomial<T>) -> Result<BlockPencil<T>> {
    let (k, n) = (p.grade(), p.n());
    if k < 2 {
        return Err(Error::Grade(format!("simple FPR needs k >= 2, got {k}")));
    }
    let z = Matrix::zeros(n, n);
    let id = Matrix::identity(n);
    let a = |i: usize| p.coeff(i).clone();
    let mut l = BlockPencil::zeros(n, k, k);
    let sym = |l: &mut BlockPencil<T>, i: usize, j: usize, x: &Matrix<T>, y: &Matrix<T>| {
        l.set_block(i - 1, j - 1, x, y);
        l.set_block(j - 1, i - 1, x, y);
    };
    l.set_block(0, 0, &a(k), &a(k - 1));
    let chain: Vec<usize> = std::iter::once(1).chain((2..=k).step_by(2)).collect();
    for w in chain.windows(2) {
        sym(&mut l, w[0], w[1], &z, &a(k - w[1]));
    }
    for &q in &chain[1..] {
        let y = if q < k { a(k - q - 1) } else { z.clone() };
        l.set_block(q - 1, q - 1, &a(k - q).neg(), &y);
    }
    for q in (3..=k).step_by(2) {
        let before = if q == 3 { 1 } else { q - 3 };
        sym(&mut l, before, q, &z, &id.neg());
        sym(&mut l, q - 1, q, &id, &z);
    }
    Ok(l)
}

/// `R_k M_{-i}(B) R_k = M_{k-i}(B)` for `1 <= i <= k`.
pub fn sip_conjugate_elementary_identity_check<T: Scalar>(i: usize, b: &Matrix<T>, k: usize, n: usize) -> Result<bool> {
    if i == 0 || i > k {
        return Err(Error::Index(format!("need 1 <= i <= k, got i = {i}")));
    }
    let r = BlockPermutation::reverse(k);
    let lhs = elementary(ElemIndex::Neg(i), b, k, n)?.congruence(&r)?;
    let rhs = elementary(ElemIndex::Pos(k - i), b, k, n)?;
    Ok(lhs == rhs)
}

/// `M_i(B_1) M_j(B_2) = M_j(B_2) M_i(B_1)`; meaningful when
/// `||i| - |j|| != 1` and `|i| != |j|`.
pub fn commutation_check<T: Scalar>(i: i64, j: i64, b1: &Matrix<T>, b2: &Matrix<T>, k: usize, n: usize) -> Result<bool> {
    check_tuple_index(i, k)?;
    check_tuple_index(j, k)?;
    let mi = elementary(ElemIndex::from_int(i), b1, k, n)?;
    let mj = elementary(ElemIndex::from_int(j), b2, k, n)?;
    Ok(mi.mul(&mj) == mj.mul(&mi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn poly(k: usize, n: usize) -> MatrixPolynomial<Rational> {
        MatrixPolynomial::new(
            (0..=k).map(|i| Matrix::from_fn(n, n, |r, c| rat((10 * i + 3 * r + c) as i64 + 1))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn elementary_shapes() {
        let b = Matrix::<Rational>::from_i64(1, 1, &[5]);
        let m0 = elementary(ElemIndex::Pos(0), &b, 3, 1).unwrap();
        assert_eq!(m0.constant(), &Matrix::from_i64(3, 3, &[1, 0, 0, 0, 1, 0, 0, 0, 5]));
        let mk = elementary(ElemIndex::Neg(3), &b, 3, 1).unwrap();
        assert_eq!(mk.constant(), &Matrix::from_i64(3, 3, &[5, 0, 0, 0, 1, 0, 0, 0, 1]));
        let m1 = elementary(ElemIndex::Pos(1), &b, 3, 1).unwrap();
        assert_eq!(m1.constant(), &Matrix::from_i64(3, 3, &[1, 0, 0, 0, 5, 1, 0, 1, 0]));
        let mm1 = elementary(ElemIndex::Neg(1), &b, 3, 1).unwrap();
        assert_eq!(mm1.constant(), &Matrix::from_i64(3, 3, &[1, 0, 0, 0, 0, 1, 0, 1, 5]));
        let inv = elementary(ElemIndex::Neg(0), &b, 3, 1).unwrap();
        assert_eq!(inv.mul(&m0), BlockPencil::identity(1, 3));
        assert!(elementary(ElemIndex::Neg(0), &Matrix::<Rational>::zeros(1, 1), 3, 1).is_err());
    }

    #[test]
    fn inverse_pairs() {
        let b = Matrix::<Rational>::from_i64(2, 2, &[1, 2, 3, 4]);
        for i in 1..4 {
            let a = elementary(ElemIndex::Pos(i), &b, 4, 2).unwrap();
            let c = elementary(ElemIndex::Neg(i), &b.neg(), 4, 2).unwrap();
            assert_eq!(a.mul(&c), BlockPencil::identity(2, 4));
        }
    }

    #[test]
    fn t_p_template_matches_product() {
        for k in 2..=7 {
            let p = poly(k, 2);
            assert_eq!(gfp_t(&p).unwrap(), gfp_t_product(&p).unwrap(), "k = {k}");
            assert!(gfp_t(&p).unwrap().is_block_symmetric());
        }
    }

    #[test]
    fn simple_fpr_matches_product() {
        for k in 2..=8 {
            let p = poly(k, 2);
            let spec = GfprSpec::simple(k, k - 1).unwrap();
            assert_eq!(simple_fpr(&p).unwrap(), build_gfpr(&p, &spec).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn spec_validation() {
        assert!(GfprSpec::<Rational>::simple(5, 5).is_err());
        let bad = GfprSpec::<Rational>::new(
            5,
            3,
            IndexTuple::new(vec![3]),
            IndexTuple::empty(),
            TvConvention::Negative,
            vec![Matrix::identity(1)],
            vec![],
        );
        assert!(matches!(bad, Err(Error::Index(_))));
        let sip = GfprSpec::<Rational>::new(
            5,
            3,
            IndexTuple::new(vec![0, 0]),
            IndexTuple::empty(),
            TvConvention::Negative,
            vec![Matrix::identity(1), Matrix::identity(1)],
            vec![],
        );
        assert!(matches!(sip, Err(Error::Sip(_))));
    }

    #[test]
    fn sip_conjugation_small() {
        let b = Matrix::<Rational>::from_i64(1, 1, &[2]);
        for i in 1..=3 {
            assert!(sip_conjugate_elementary_identity_check(i, &b, 3, 1).unwrap());
        }
        assert!(sip_conjugate_elementary_identity_check(1, &Matrix::<Rational>::identity(1), 2, 1).unwrap());
    }
}
