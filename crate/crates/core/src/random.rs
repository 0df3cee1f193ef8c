//! Seeded random inputs: integer-valued polynomials and SIP-valid GFPR specs.

use rand::Rng;

use crate::fiedler::{v_tuple, GfprSpec, TvConvention};
use crate::matpoly::MatrixPolynomial;
use crate::matrix::Matrix;
use crate::scalar::{ratio, Rational, Scalar};
use crate::tuples::{admissible_tuple, satisfies_sip, symmetric_complement, IndexTuple};

/// Entries drawn uniformly from `-5..=5`.
pub const ENTRY_RANGE: i64 = 5;

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix<Rational> {
    Matrix::from_fn(rows, cols, |_, _| Rational::from_i64(rng.gen_range(-ENTRY_RANGE..=ENTRY_RANGE)))
}

/// Square matrix with entries `p/q`, `|p| <= 5`, `1 <= q <= 4`.
pub fn random_rational_matrix<R: Rng>(rng: &mut R, n: usize) -> Matrix<Rational> {
    Matrix::from_fn(n, n, |_, _| ratio(rng.gen_range(-ENTRY_RANGE..=ENTRY_RANGE), rng.gen_range(1..=4)))
}

pub fn random_nonsingular<R: Rng>(rng: &mut R, n: usize) -> Matrix<Rational> {
    loop {
        let m = random_matrix(rng, n, n);
        if m.is_nonsingular() {
            return m;
        }
    }
}

pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> Matrix<Rational> {
    let m = random_matrix(rng, n, n);
    Matrix::from_fn(n, n, |i, j| if i <= j { m[(i, j)].clone() } else { m[(j, i)].clone() })
}

/// Random `P` of grade `k`; `A_0` and/or `A_k` forced nonsingular on request.
pub fn random_polynomial<R: Rng>(
    rng: &mut R,
    n: usize,
    k: usize,
    nonsingular_a0: bool,
    nonsingular_ak: bool,
) -> MatrixPolynomial<Rational> {
    let coeffs = (0..=k)
        .map(|i| {
            if (i == 0 && nonsingular_a0) || (i == k && nonsingular_ak) {
                random_nonsingular(rng, n)
            } else {
                random_matrix(rng, n, n)
            }
        })
        .collect();
    MatrixPolynomial::new(coeffs).unwrap()
}

/// Random regular `P` with both end coefficients nonsingular and
/// `det P(1/2) != 0`.
pub fn random_regular_polynomial<R: Rng>(rng: &mut R, n: usize, k: usize) -> MatrixPolynomial<Rational> {
    loop {
        let p = random_polynomial(rng, n, k, true, true);
        if p.evaluate(&ratio(1, 2)).is_nonsingular() {
            return p;
        }
    }
}

/// Random tuple `t` over `lo..=hi` of length at most `max_len` such that
/// `(t, core, rev t)` satisfies the SIP. The length is drawn first and
/// lowered when rejection sampling keeps failing.
pub fn random_sip_prefix<R: Rng>(rng: &mut R, lo: i64, hi: i64, core: &IndexTuple, max_len: usize) -> IndexTuple {
    if hi < lo || max_len == 0 {
        return IndexTuple::empty();
    }
    let mut len = rng.gen_range(0..=max_len);
    while len > 0 {
        for _ in 0..200 {
            let t = IndexTuple((0..len).map(|_| rng.gen_range(lo..=hi)).collect());
            let full = IndexTuple::concat(&[&t, core, &t.rev()]);
            if satisfies_sip(&full).unwrap_or(false) {
                return t;
            }
        }
        len -= 1;
    }
    IndexTuple::empty()
}

/// A random valid GFPR spec of grade `k` with parameter `h`: SIP-valid tuples
/// of length at most `max_len` and integer assignments, nonsingular at the
/// indices `0` and `-k`.
pub fn random_gfpr_spec<R: Rng>(rng: &mut R, k: usize, h: usize, n: usize, max_len: usize) -> GfprSpec<Rational> {
    let core_w = IndexTuple::concat(&[&admissible_tuple(h), &symmetric_complement(h)]);
    let t_w = random_sip_prefix(rng, 0, h as i64 - 1, &core_w, max_len);
    let ki = k as i64;
    let core_v = IndexTuple::concat(&[&v_tuple(k, h), &symmetric_complement(k - h - 1).shift(-ki)]);
    let t_v = random_sip_prefix(rng, -ki, -(h as i64) - 2, &core_v, max_len);
    let assign = |rng: &mut R, t: &IndexTuple, special: i64| -> Vec<Matrix<Rational>> {
        t.as_slice().iter().map(|&i| if i == special { random_nonsingular(rng, n) } else { random_matrix(rng, n, n) }).collect()
    };
    let z_w = assign(rng, &t_w, 0);
    let z_v = assign(rng, &t_v, -ki);
    GfprSpec::new(k, h, t_w, t_v, TvConvention::Negative, z_w, z_v).expect("sampled spec is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn specs_are_valid_and_reproducible() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::new();
            for k in 1..=7 {
                for h in 0..k {
                    out.push(random_gfpr_spec(&mut rng, k, h, 2, 4));
                }
            }
            out
        };
        let a = draw(9);
        assert_eq!(a, draw(9));
        assert!(a.iter().all(|s| s.validate().is_ok() && s.has_nonsingular_assignments()));
        assert!(a.iter().any(|s| !s.t_w.is_empty()) && a.iter().any(|s| !s.t_v.is_empty()));
    }

    #[test]
    fn regular_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_regular_polynomial(&mut rng, 3, 4);
        assert!(p.coeff(0).is_nonsingular() && p.coeff(4).is_nonsingular());
    }
}
