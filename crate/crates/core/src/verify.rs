//! Spectral checks against the Frobenius companion form.
//!
//! Generalized eigenvalues come from LAPACK's `zggev` (QZ) and are kept in
//! homogeneous form `(α, β)`, so infinite eigenvalues need no special case.
//! Spectra are matched by a minimum-cost assignment in the chordal metric.

use std::os::raw::{c_char, c_int};

use num_complex::Complex64;
use pathfinding::prelude::{kuhn_munkres_min, Matrix as WeightMatrix};
use serde_json::{json, Value};

use crate::blockpencil::BlockPencil;
use crate::error::{Error, Result};
use crate::matpoly::MatrixPolynomial;
use crate::matrix::Matrix;
use crate::scalar::{ratio, Scalar};

/// Default chordal tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Singular values below `RANK_TOL * σ_max` count as zero.
pub const RANK_TOL: f64 = 1e-10;
/// `|β| <= INF_TOL * |(α, β)|` is reported as infinite.
pub const INF_TOL: f64 = 1e-10;

/// A generalized eigenvalue `α / β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eig {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Eig {
    fn norm(&self) -> f64 {
        (self.alpha.norm_sqr() + self.beta.norm_sqr()).sqrt()
    }

    pub fn is_infinite(&self) -> bool {
        self.beta.norm() <= INF_TOL * self.norm()
    }

    pub fn value(&self) -> Option<Complex64> {
        if self.is_infinite() {
            None
        } else {
            Some(self.alpha / self.beta)
        }
    }

    pub fn to_json(&self) -> Value {
        match self.value() {
            Some(z) => json!([z.re, z.im]),
            None => json!("inf"),
        }
    }
}

/// Chordal distance `|x - y| / (√(1+|x|²) √(1+|y|²))`, in homogeneous
/// coordinates so that `∞` is the north pole.
pub fn chordal(a: &Eig, b: &Eig) -> f64 {
    let cross = a.alpha * b.beta - b.alpha * a.beta;
    let d = a.norm() * b.norm();
    if d == 0.0 {
        return 1.0;
    }
    (cross.norm() / d).min(1.0)
}

fn to_lapack(m: &Matrix<Complex64>) -> Vec<Complex64> {
    // Column major.
    let (r, c) = (m.rows(), m.cols());
    let mut out = Vec::with_capacity(r * c);
    for j in 0..c {
        for i in 0..r {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Generalized eigenvalues of the square pencil `λX + Y`, that is of
/// `Y v = λ (-X) v`.
pub fn pencil_eigenvalues<T: Scalar>(l: &BlockPencil<T>) -> Result<Vec<Eig>> {
    if !l.is_square() {
        return Err(Error::Dimension("eigenvalues of a non-square pencil".into()));
    }
    let x = l.lambda().map(|v| v.to_complex());
    let y = l.constant().map(|v| v.to_complex());
    let n = x.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut a = to_lapack(&y);
    let mut b: Vec<Complex64> = to_lapack(&x).into_iter().map(|v| -v).collect();
    let mut alpha = vec![Complex64::new(0.0, 0.0); n];
    let mut beta = vec![Complex64::new(0.0, 0.0); n];
    let mut dummy = vec![Complex64::new(0.0, 0.0); 1];
    let nn = n as c_int;
    let one: c_int = 1;
    let no = b'N' as c_char;
    let mut rwork = vec![0.0f64; 8 * n];
    let mut info: c_int = 0;
    let mut query = [Complex64::new(0.0, 0.0)];
    let mut lwork: c_int = -1;
    // SAFETY: every buffer has the size zggev documents for JOBVL = JOBVR = 'N';
    // Complex64 is repr(C) with the same layout as LAPACK's double complex.
    unsafe {
        lapack_sys::zggev_(
            &no,
            &no,
            &nn,
            a.as_mut_ptr().cast(),
            &nn,
            b.as_mut_ptr().cast(),
            &nn,
            alpha.as_mut_ptr().cast(),
            beta.as_mut_ptr().cast(),
            dummy.as_mut_ptr().cast(),
            &one,
            dummy.as_mut_ptr().cast(),
            &one,
            query.as_mut_ptr().cast(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    lwork = (query[0].re as c_int).max(2 * n as c_int);
    let mut work = vec![Complex64::new(0.0, 0.0); lwork as usize];
    unsafe {
        lapack_sys::zggev_(
            &no,
            &no,
            &nn,
            a.as_mut_ptr().cast(),
            &nn,
            b.as_mut_ptr().cast(),
            &nn,
            alpha.as_mut_ptr().cast(),
            beta.as_mut_ptr().cast(),
            dummy.as_mut_ptr().cast(),
            &one,
            dummy.as_mut_ptr().cast(),
            &one,
            work.as_mut_ptr().cast(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Backend(format!("zggev returned info = {info}")));
    }
    Ok(alpha.into_iter().zip(beta).map(|(alpha, beta)| Eig { alpha, beta }).collect())
}

/// Singular values, largest first.
pub fn singular_values<T: Scalar>(m: &Matrix<T>) -> Result<Vec<f64>> {
    let (r, c) = (m.rows(), m.cols());
    if r == 0 || c == 0 {
        return Ok(vec![]);
    }
    let mut a = to_lapack(&m.map(|v| v.to_complex()));
    let (rr, cc) = (r as c_int, c as c_int);
    let mut s = vec![0.0f64; r.min(c)];
    let mut dummy = vec![Complex64::new(0.0, 0.0); 1];
    let one: c_int = 1;
    let no = b'N' as c_char;
    let mut rwork = vec![0.0f64; 5 * r.min(c)];
    let mut info: c_int = 0;
    let mut query = [Complex64::new(0.0, 0.0)];
    let mut lwork: c_int = -1;
    // SAFETY: sizes follow the zgesvd documentation for JOBU = JOBVT = 'N'.
    unsafe {
        lapack_sys::zgesvd_(
            &no,
            &no,
            &rr,
            &cc,
            a.as_mut_ptr().cast(),
            &rr,
            s.as_mut_ptr(),
            dummy.as_mut_ptr().cast(),
            &one,
            dummy.as_mut_ptr().cast(),
            &one,
            query.as_mut_ptr().cast(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    lwork = (query[0].re as c_int).max(1);
    let mut work = vec![Complex64::new(0.0, 0.0); lwork as usize];
    unsafe {
        lapack_sys::zgesvd_(
            &no,
            &no,
            &rr,
            &cc,
            a.as_mut_ptr().cast(),
            &rr,
            s.as_mut_ptr(),
            dummy.as_mut_ptr().cast(),
            &one,
            dummy.as_mut_ptr().cast(),
            &one,
            work.as_mut_ptr().cast(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Backend(format!("zgesvd returned info = {info}")));
    }
    Ok(s)
}

/// Numerical rank with threshold `RANK_TOL * σ_max`; exact rank for exact
/// fields.
pub fn numeric_rank<T: Scalar>(m: &Matrix<T>) -> Result<usize> {
    if T::EXACT {
        return Ok(m.rank());
    }
    let s = singular_values(m)?;
    let top = s.first().copied().unwrap_or(0.0);
    Ok(s.iter().filter(|&&v| v > RANK_TOL * top && v > 0.0).count())
}

/// First Frobenius companion form
/// `[[λA_k + A_{k-1}, A_{k-2}, …, A_0], [-I, λI, 0, …], …]`.
pub fn frobenius_companion<T: Scalar>(p: &MatrixPolynomial<T>) -> Result<BlockPencil<T>> {
    let (k, n) = (p.grade(), p.n());
    if k == 0 {
        return Err(Error::Grade("the companion form needs k >= 1".into()));
    }
    let mut l = BlockPencil::zeros(n, k, k);
    let z = Matrix::zeros(n, n);
    let id = Matrix::identity(n);
    l.set_block(0, 0, p.coeff(k), p.coeff(k - 1));
    for j in 1..k {
        l.set_block(0, j, &z, p.coeff(k - 1 - j));
        l.set_block(j, j - 1, &z, &id.neg());
        l.set_block(j, j, &id, &z);
    }
    Ok(l)
}

/// `det P(x) != 0` at one of a few fixed points (exactly for exact fields,
/// by singular values otherwise).
pub fn is_regular<T: Scalar>(p: &MatrixPolynomial<T>) -> Result<bool> {
    if T::EXACT {
        return Ok(p.is_regular());
    }
    for (a, b) in [(1, 2), (-2, 3), (7, 5)] {
        let q = ratio(a, b);
        let x = q.to_complex();
        let at = p.map(|v| v.to_complex()).evaluate(&x);
        let s = singular_values(&at)?;
        if s.last().copied().unwrap_or(0.0) > RANK_TOL * s[0] {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Outcome of comparing the spectrum of a pencil with that of `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    /// `(eigenvalue of L, eigenvalue of the companion form, distance)`.
    pub pairs: Vec<(Eig, Eig, f64)>,
    pub finite: (usize, usize),
    pub infinite: (usize, usize),
    pub max_distance: f64,
    pub tol: f64,
    pub passed: bool,
}

impl SpectralReport {
    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed,
            "tol": self.tol,
            "max_distance": self.max_distance,
            "finite": [self.finite.0, self.finite.1],
            "infinite": [self.infinite.0, self.infinite.1],
            "pairs": self.pairs.iter().map(|(a, b, d)| json!([a.to_json(), b.to_json(), d])).collect::<Vec<_>>(),
        })
    }
}

/// Minimum total chordal distance matching between two spectra of equal
/// size. Returns for each `a[i]` the matched index into `b`.
pub fn match_spectra(a: &[Eig], b: &[Eig]) -> Result<Vec<usize>> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("spectra of sizes {} and {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Ok(vec![]);
    }
    // Integer weights at 1e-12 resolution, far below any tolerance in use.
    let scale = 1e12;
    let w: Vec<i64> = a.iter().flat_map(|x| b.iter().map(move |y| (chordal(x, y) * scale).round() as i64)).collect();
    let m = WeightMatrix::from_vec(a.len(), b.len(), w).map_err(|e| Error::Dimension(e.to_string()))?;
    Ok(kuhn_munkres_min(&m).1)
}

/// Compares the generalized eigenvalues of `L` with those of the Frobenius
/// companion form of a regular `P`.
pub fn check_strong_linearization<T: Scalar>(
    l: &BlockPencil<T>,
    p: &MatrixPolynomial<T>,
    tol: f64,
) -> Result<SpectralReport> {
    let (k, n) = (p.grade(), p.n());
    if l.rows() != k || l.cols() != k || l.n() != n {
        return Err(Error::Dimension(format!("expected a {k}x{k} block pencil with {n}x{n} blocks")));
    }
    if !is_regular(p)? {
        return Err(Error::Singular("spectral checks need a regular polynomial".into()));
    }
    let ours = pencil_eigenvalues(l)?;
    let reference = pencil_eigenvalues(&frobenius_companion(p)?)?;
    let assign = match_spectra(&ours, &reference)?;
    let pairs: Vec<_> = ours.iter().zip(&assign).map(|(x, &j)| (*x, reference[j], chordal(x, &reference[j]))).collect();
    let max_distance = pairs.iter().map(|p| p.2).fold(0.0, f64::max);
    let count = |v: &[Eig]| v.iter().filter(|e| e.is_infinite()).count();
    let infinite = (count(&ours), count(&reference));
    let finite = (ours.len() - infinite.0, reference.len() - infinite.1);
    let passed = max_distance < tol && infinite.0 == infinite.1;
    Ok(SpectralReport { pairs, finite, infinite, max_distance, tol, passed })
}

/// `(dim ker X, dim ker A_k)` for `L = λX + Y`: the geometric multiplicities
/// of the eigenvalue at infinity of `L` and of `P`.
pub fn infinite_ev_count<T: Scalar>(l: &BlockPencil<T>, p: &MatrixPolynomial<T>) -> Result<(usize, usize)> {
    let x = l.lambda();
    let ak = p.coeff(p.grade());
    Ok((x.cols() - numeric_rank(x)?, ak.cols() - numeric_rank(ak)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_family, skeleton, FamilyForm, FamilyTag};
    use crate::scalar::{rat, Rational};

    fn finite_sorted(es: &[Eig]) -> Vec<f64> {
        let mut v: Vec<f64> = es.iter().filter_map(|e| e.value()).map(|z| z.re).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn companion_small_cases() {
        let p = MatrixPolynomial::<Rational>::scalar(&[-1, 0, 1]);
        let l = frobenius_companion(&p).unwrap();
        let want = BlockPencil::new(1, 2, 2, Matrix::from_i64(2, 2, &[1, 0, 0, 1]), Matrix::from_i64(2, 2, &[0, -1, -1, 0])).unwrap();
        assert_eq!(l, want);
        let ev = finite_sorted(&pencil_eigenvalues(&l).unwrap());
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);

        let p = MatrixPolynomial::<Rational>::scalar(&[0, -1, 0, 1]);
        let ev = finite_sorted(&pencil_eigenvalues(&frobenius_companion(&p).unwrap()).unwrap());
        for (a, b) in ev.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-10);
        }
        let p = MatrixPolynomial::<Rational>::scalar(&[3, 5]);
        assert_eq!(frobenius_companion(&p).unwrap(), BlockPencil::new(1, 1, 1, Matrix::from_i64(1, 1, &[5]), Matrix::from_i64(1, 1, &[3])).unwrap());
    }

    #[test]
    fn companion_rational_roots() {
        // (x-1)(x+2)(2x-1)(x-3)(3x+1)
        let roots = [1.0, -2.0, 0.5, 3.0, -1.0 / 3.0];
        for deg in 1..=5 {
            let mut cc = vec![rat(1)];
            for (num, den) in [(1, 1), (-2, 1), (1, 2), (3, 1), (-1, 3)].iter().take(deg) {
                // multiply by (den x - num)
                let mut next = vec![rat(0); cc.len() + 1];
                for (i, a) in cc.iter().enumerate() {
                    next[i] = next[i].clone() - a.clone() * rat(*num);
                    next[i + 1] = next[i + 1].clone() + a.clone() * rat(*den);
                }
                cc = next;
            }
            let p = MatrixPolynomial::new(cc.into_iter().map(|v| Matrix::from_fn(1, 1, |_, _| v.clone())).collect()).unwrap();
            let ev = finite_sorted(&pencil_eigenvalues(&frobenius_companion(&p).unwrap()).unwrap());
            let mut want = roots[..deg].to_vec();
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in ev.iter().zip(&want) {
                assert!((a - b).abs() < 1e-10, "deg {deg}: {ev:?}");
            }
        }
    }

    #[test]
    fn o1_skeleton_linearizes() {
        let p = MatrixPolynomial::<Rational>::scalar(&[0, -1, 0, 1]);
        let l = skeleton(&p, FamilyTag::O1).unwrap();
        let r = check_strong_linearization(&l, &p, DEFAULT_TOL).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.finite, (3, 3));
    }

    #[test]
    fn chordal_metric() {
        let inf = Eig { alpha: Complex64::new(1.0, 0.0), beta: Complex64::new(0.0, 0.0) };
        let zero = Eig { alpha: Complex64::new(0.0, 0.0), beta: Complex64::new(1.0, 0.0) };
        let one = Eig { alpha: Complex64::new(2.0, 0.0), beta: Complex64::new(2.0, 0.0) };
        assert!((chordal(&inf, &zero) - 1.0).abs() < 1e-15);
        assert!((chordal(&one, &zero) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(chordal(&one, &one) < 1e-15);
        assert!(inf.is_infinite() && inf.value().is_none());
    }

    #[test]
    fn infinite_counts() {
        let p = MatrixPolynomial::<Rational>::new(vec![
            Matrix::from_i64(2, 2, &[1, 2, 0, 1]),
            Matrix::from_i64(2, 2, &[0, 1, 1, 0]),
            Matrix::from_i64(2, 2, &[3, 0, 1, 1]),
            Matrix::zeros(2, 2),
        ])
        .unwrap();
        let l = build_family(&p, &FamilyForm::skeleton(FamilyTag::O1, 3, 2).unwrap()).unwrap();
        assert_eq!(infinite_ev_count(&l, &p).unwrap(), (2, 2));
        let lc = l.map(|v| v.to_complex());
        assert_eq!(infinite_ev_count(&lc, &p.map(|v| v.to_complex())).unwrap(), (2, 2));
        let r = check_strong_linearization(&l, &p, DEFAULT_TOL).unwrap();
        assert_eq!(r.infinite, (2, 2));
        assert!(r.passed);
    }

    #[test]
    fn singular_polynomial_refused() {
        let p = MatrixPolynomial::<Rational>::new(vec![Matrix::from_i64(2, 2, &[1, 1, 1, 1]); 3]).unwrap();
        let l = frobenius_companion(&p).unwrap();
        assert!(matches!(check_strong_linearization(&l, &p, DEFAULT_TOL), Err(Error::Singular(_))));
    }
}
