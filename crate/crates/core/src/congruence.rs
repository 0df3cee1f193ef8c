//! Block-permutation congruence carrying block-symmetric GFPR into the four
//! families.
//!
//! The permutation is computed from the tuples alone. The GFPR is split into
//! a `t_w` half and a `t_v` half, each half is tracked index by index
//! starting from the simple FPR layout, the `t_v` half through the reversal
//! map `R rev(-G) R`, and the two orders are interleaved. Every result is
//! verified exactly against the family template before it is returned.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde_json::{json, Value};

use crate::blockpencil::{BlockPencil, BlockPermutation};
use crate::error::{Error, Result};
use crate::families::{build_family, solve_family_params, FamilyForm, FamilyTag};
use crate::fiedler::{build_gfpr, gfp_t, GfprSpec, TvConvention};
use crate::matpoly::MatrixPolynomial;
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};
use crate::tuples::{admissible_tuple, index_type, sip_append_positions, symmetric_complement, IndexTuple, IndexType};

/// A verified reduction: `congruence(L, c) = build_family(P, form)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CongruenceCertificate<T> {
    pub c: BlockPermutation,
    pub form: FamilyForm<T>,
    pub residual: bool,
}

impl<T: Scalar> CongruenceCertificate<T> {
    pub fn tag(&self) -> FamilyTag {
        self.form.tag
    }

    /// The wing parameter (`B` of O1, `E` of O2, `D` of E1/E2) has full rank.
    pub fn wing_param_nonsingular(&self) -> bool {
        let w = self.form.param(self.form.tag.wing_param()).unwrap();
        w.rows() == 0 || w.constant().is_nonsingular()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "c": self.c.as_slice(),
            "tag": self.form.tag.name(),
            "params": self.form.to_json()["params"].clone(),
            "verified": self.residual,
        })
    }
}

/// The two halves of a GFPR around its center block `λA_{h+1} + A_h`.
#[derive(Clone, Debug)]
pub struct Split<T> {
    /// Trailing `h + 1` block rows and columns, a GFPR of `A_0..A_{h+1}`.
    pub f: BlockPencil<T>,
    pub f_spec: GfprSpec<T>,
    /// Leading `k - h` block rows and columns, a GFPR of `A_h..A_k`.
    pub g: BlockPencil<T>,
    pub g_spec: GfprSpec<T>,
}

/// Splits `L_P(h, t_w, t_v, Z_w, Z_v)` into its two halves, checking the
/// zero off-diagonal corners, the shared center and that both halves equal
/// GFPR built from their own specs.
pub fn split_gfpr<T: Scalar>(p: &MatrixPolynomial<T>, spec: &GfprSpec<T>) -> Result<Split<T>> {
    let (k, h) = (spec.k, spec.h);
    let l = build_gfpr(p, spec)?;
    let m = k - h;
    let (cl, cc) = l.block(m - 1, m - 1);
    if cl != *p.coeff(h + 1) || cc != *p.coeff(h) {
        return Err(Error::Certificate(format!("center block at ({m},{m}) is not λA_{} + A_{h}", h + 1)));
    }
    if !l.sub_pencil(0, m, m - 1, h).is_zero() || !l.sub_pencil(m, 0, h, m - 1).is_zero() {
        return Err(Error::Certificate("split corners are not zero".into()));
    }
    let f_spec = GfprSpec::new(
        h + 1,
        h,
        spec.t_w.clone(),
        IndexTuple::empty(),
        TvConvention::Negative,
        spec.z_w.clone(),
        vec![],
    )?;
    let g_spec =
        GfprSpec::new(m, 0, IndexTuple::empty(), spec.t_v.shift(h as i64), TvConvention::Negative, vec![], spec.z_v.clone())?;
    let f = l.sub_pencil(m - 1, m - 1, h + 1, h + 1);
    let g = l.sub_pencil(0, 0, m, m);
    if f != build_gfpr(&p.slice(0, h + 1), &f_spec)? {
        return Err(Error::Certificate("t_w half differs from its own GFPR".into()));
    }
    if g != build_gfpr(&p.slice(h, k), &g_spec)? {
        return Err(Error::Certificate("t_v half differs from its own GFPR".into()));
    }
    Ok(Split { f, f_spec, g, g_spec })
}

/// Block rows of one half, in family order, as one-based local indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfOrder {
    pub body: Vec<usize>,
    pub exceptional: Option<usize>,
    pub wings: Vec<usize>,
}

/// Simple FPR layout of grade `m`: `(1,2,4,…,m-1,3,5,…,m)` for odd `m`,
/// `(1,2,4,…,m,3,5,…,m-1)` for even `m`.
pub fn simple_fpr_permutation(m: usize) -> Vec<usize> {
    if m == 1 {
        return vec![1];
    }
    let mut c = vec![1];
    c.extend((2..=m).step_by(2));
    c.extend((3..=m).step_by(2));
    c
}

fn body_count(m: usize) -> usize {
    if m % 2 == 1 {
        m.div_ceil(2)
    } else {
        m / 2
    }
}

/// Row order for `M_t (λM_{-m} - M_{w_{m-1}}) M_{c_{m-1}} M_{rev t}` with
/// `t ⊂ 0..m-2`. Indices of `t` are absorbed innermost first; a Type I index
/// `x ≠ 0` whose row `m-x+1` is not a wing row swaps rows `m-x` and `m-x+1`.
pub fn track_half(m: usize, t: &IndexTuple) -> Result<HalfOrder> {
    if m == 0 {
        return Err(Error::Grade("half of grade 0".into()));
    }
    let mi = m as i64;
    let core = IndexTuple::concat(&[&admissible_tuple(m - 1), &symmetric_complement(m - 1)]);
    let mut sigma = simple_fpr_permutation(m);
    let bc = body_count(m);
    let wing_count = m - bc - usize::from(m.is_multiple_of(2));
    let xs = t.as_slice();
    for idx in (0..xs.len()).rev() {
        let x = xs[idx];
        if x < 0 || x > mi - 2 {
            return Err(Error::Index(format!("index {x} outside 0..{}", mi - 2)));
        }
        let suffix = IndexTuple(xs[idx + 1..].to_vec());
        let current = IndexTuple::concat(&[&suffix, &core, &suffix.rev()]);
        let ty = index_type(&current, x)?;
        if x == 0 || ty == IndexType::TypeII {
            continue;
        }
        let (a, b) = ((mi - x) as usize, (mi - x + 1) as usize);
        // Body and exceptional rows both sit before the wings.
        let pos = sigma.iter().position(|&r| r == b).unwrap();
        if pos < m - wing_count {
            for r in sigma.iter_mut() {
                if *r == a {
                    *r = b;
                } else if *r == b {
                    *r = a;
                }
            }
        }
    }
    let exceptional = if m.is_multiple_of(2) { Some(sigma[bc]) } else { None };
    let wings = sigma[bc + usize::from(m.is_multiple_of(2))..].to_vec();
    Ok(HalfOrder { body: sigma[..bc].to_vec(), exceptional, wings })
}

/// The block permutation of the main reduction, from the tuples alone.
/// `t_v` is stored negative.
pub fn gfpr_permutation(k: usize, h: usize, t_w: &IndexTuple, t_v: &IndexTuple) -> Result<BlockPermutation> {
    if h >= k {
        return Err(Error::Index(format!("need 0 <= h < k, got h = {h}, k = {k}")));
    }
    let m = k - h;
    let f = track_half(h + 1, t_w)?;
    // The t_v half reversed is a t_w-type GFPR of grade m with tuple t_v + k;
    // reversing its order again maps local row r to m + 1 - r.
    let g_hat = track_half(m, &t_v.shift(k as i64))?;
    let flip = |v: &[usize]| v.iter().rev().map(|&r| m + 1 - r).collect::<Vec<_>>();
    let g_body = flip(&g_hat.body);
    let g_wings = flip(&g_hat.wings);
    let g_exc = g_hat.exceptional.map(|r| m + 1 - r);
    let off = m - 1;

    let mut c = Vec::with_capacity(k);
    c.extend(g_exc);
    c.extend(&g_body[..g_body.len() - 1]);
    c.push(m);
    c.extend(f.body[1..].iter().map(|r| r + off));
    c.extend(f.exceptional.map(|r| r + off));
    c.extend(&g_wings);
    c.extend(f.wings.iter().map(|r| r + off));
    BlockPermutation::new(c)
}

fn certify<T: Scalar>(
    l: &BlockPencil<T>,
    p: &MatrixPolynomial<T>,
    c: BlockPermutation,
    tag: FamilyTag,
) -> Result<CongruenceCertificate<T>> {
    let permuted = l.congruence(&c)?;
    match solve_family_params(&permuted, p, tag)? {
        Some(form) => {
            let rebuilt = build_family(p, &form)?;
            let residual = if T::EXACT { rebuilt == permuted } else { rebuilt.approx_eq(&permuted) };
            if !residual {
                return Err(Error::Certificate(format!("c = {c} fails the {tag} template")));
            }
            Ok(CongruenceCertificate { c, form, residual })
        }
        None => Err(Error::Certificate(format!("c = {c} does not carry the pencil into {tag}"))),
    }
}

/// Reduces `L_P(h, t_w, t_v, Z_w, Z_v)` into the family fixed by the parities
/// of `k` and `h`. Fails loudly when the computed permutation does not verify.
pub fn main_permutation<T: Scalar>(p: &MatrixPolynomial<T>, spec: &GfprSpec<T>) -> Result<CongruenceCertificate<T>> {
    let k = p.grade();
    if spec.k != k {
        return Err(Error::Grade(format!("spec is for k = {}, polynomial has grade {k}", spec.k)));
    }
    let split = split_gfpr(p, spec)?;
    let l = build_gfpr(p, spec)?;
    debug_assert_eq!(l.sub_pencil(k - spec.h - 1, k - spec.h - 1, spec.h + 1, spec.h + 1), split.f);
    let c = gfpr_permutation(k, spec.h, &spec.t_w, &spec.t_v)?;
    certify(&l, p, c, FamilyTag::for_gfpr(k, spec.h))
}

/// `c = (1, 3, 5, …, k, 2, 4, …, k-1)`.
pub fn gfp_permutation(k: usize) -> Result<BlockPermutation> {
    if k.is_multiple_of(2) {
        return Err(Error::Grade(format!("the T_P reduction needs odd k, got {k}")));
    }
    BlockPermutation::new((1..=k).step_by(2).chain((2..k).step_by(2)).collect())
}

/// Reduces `T_P` (odd `k`) to the O1 skeleton.
pub fn gfp_congruence<T: Scalar>(p: &MatrixPolynomial<T>) -> Result<CongruenceCertificate<T>> {
    let k = p.grade();
    let c = gfp_permutation(k)?;
    let cert = certify(&gfp_t(p)?, p, c, FamilyTag::O1)?;
    if cert.form != FamilyForm::skeleton(FamilyTag::O1, k, p.n())? {
        return Err(Error::Certificate("T_P reduces into O1 but not onto the skeleton".into()));
    }
    Ok(cert)
}

/// Largest grade the exhaustive search accepts.
pub const BRUTE_FORCE_MAX_K: usize = 8;

/// Exhaustive search over all block permutations in lexicographic order,
/// trying the families of matching parity. Returns the first verified
/// certificate, or `None`.
pub fn brute_force_oracle<T: Scalar>(
    l: &BlockPencil<T>,
    p: &MatrixPolynomial<T>,
) -> Result<Option<CongruenceCertificate<T>>> {
    let k = p.grade();
    if k > BRUTE_FORCE_MAX_K {
        return Err(Error::Grade(format!("exhaustive search is capped at k = {BRUTE_FORCE_MAX_K}, got {k}")));
    }
    if l.rows() != k || l.cols() != k || l.n() != p.n() {
        return Err(Error::Dimension("pencil and polynomial sizes disagree".into()));
    }
    let tags: Vec<_> =
        FamilyTag::ALL.into_iter().filter(|t| t.odd_degree() == (k % 2 == 1) && t.wing_size(k).is_ok()).collect();
    let masks: Vec<_> = tags.iter().map(|&t| template_support(t, k)).collect::<Result<_>>()?;
    let nonzero: Vec<Vec<bool>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let (x, y) = l.block(i, j);
                    !(x.is_zero() && y.is_zero())
                })
                .collect()
        })
        .collect();
    for perm in (1..=k).permutations(k) {
        for (&tag, mask) in tags.iter().zip(&masks) {
            let fits = (0..k).all(|i| (0..k).all(|j| mask[i][j] || !nonzero[perm[i] - 1][perm[j] - 1]));
            if !fits {
                continue;
            }
            let c = BlockPermutation::new(perm.clone())?;
            let permuted = l.congruence(&c)?;
            if let Some(form) = solve_family_params(&permuted, p, tag)? {
                return Ok(Some(CongruenceCertificate { c, form, residual: true }));
            }
        }
    }
    Ok(None)
}

/// Block positions that some member of the family can make nonzero.
#[allow(clippy::needless_range_loop)]
fn template_support(tag: FamilyTag, k: usize) -> Result<Vec<Vec<bool>>> {
    // With every coefficient and parameter a nonzero generic value the
    // support is the union of all possible supports.
    let p = MatrixPolynomial::new((0..=k).map(|i| Matrix::<Rational>::from_i64(1, 1, &[i as i64 + 2])).collect())?;
    let mut form = FamilyForm::zeros(tag, k, 1)?;
    let mut seed = 3i64;
    for (c, r, q) in tag.param_shapes(k)? {
        for i in 0..r {
            for j in 0..q {
                seed = (seed * 7 + 1) % 101;
                form.set_block(c, i, j, &Matrix::from_i64(1, 1, &[seed + 1]))?;
            }
        }
    }
    let l = build_family(&p, &form)?;
    let mut out = vec![vec![false; k]; k];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (x, y) = l.block(i, j);
            *v = !(x.is_zero() && y.is_zero());
        }
    }
    // A coincidental cancellation would hide a position; widen with the
    // transpose to stay safe on the symmetric templates.
    for i in 0..k {
        for j in 0..i {
            let v = out[i][j] || out[j][i];
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

/// Wing rows of the permuted pencil of the form `-e_i ⊗ I + λ e_{i+1} ⊗ I`,
/// reported as block-row indices of the unpermuted pencil.
pub fn plain_wing_rows<T: Scalar>(l: &BlockPencil<T>, c: &BlockPermutation, tag: FamilyTag) -> Result<BTreeSet<usize>> {
    let permuted = l.congruence(c)?;
    let (k, n) = (l.rows(), l.n());
    let id = Matrix::<T>::identity(n);
    let minus = id.neg();
    let mut out = BTreeSet::new();
    for i in k - tag.wing_size(k)?..k {
        let mut lam = Vec::new();
        let mut con = Vec::new();
        for j in 0..k {
            let (x, y) = permuted.block(i, j);
            if !x.is_zero() {
                lam.push((j, x));
            }
            if !y.is_zero() {
                con.push((j, y));
            }
        }
        if let ([(jl, x)], [(jc, y)]) = (lam.as_slice(), con.as_slice()) {
            if *jl == jc + 1 && *x == id && *y == minus {
                out.insert(c.get(i + 1));
            }
        }
    }
    Ok(out)
}

/// Positions `k - j` predicted to hold plain wing rows coming from the `t_w`
/// half: `j ∈ 0..h-1` with `(t_w, w_h, c_h, rev t_w, j)` satisfying the SIP.
pub fn predicted_plain_wings(k: usize, h: usize, t_w: &IndexTuple) -> Result<BTreeSet<usize>> {
    if h == 0 {
        return Ok(BTreeSet::new());
    }
    Ok(sip_append_positions(t_w, h + 1)?.into_iter().map(|j| k - j as usize).collect())
}

/// Compares the predicted plain wing rows of the `t_w` half with those
/// observed in the certified congruence. Rows of the `t_v` half (positions
/// `1..=k-h`) are ignored.
pub fn wing_prediction_holds<T: Scalar>(
    p: &MatrixPolynomial<T>,
    spec: &GfprSpec<T>,
    cert: &CongruenceCertificate<T>,
) -> Result<bool> {
    let l = build_gfpr(p, spec)?;
    let observed: BTreeSet<usize> =
        plain_wing_rows(&l, &cert.c, cert.tag())?.into_iter().filter(|&r| r > spec.k - spec.h).collect();
    Ok(observed == predicted_plain_wings(spec.k, spec.h, &spec.t_w)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_gfpr_spec, random_nonsingular, random_polynomial};
    use crate::scalar::rat;
    use crate::symbolic::parse_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn distinct_poly(k: usize, n: usize) -> MatrixPolynomial<Rational> {
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64 * 31 + n as u64);
        random_polynomial(&mut rng, n, k, true, true)
    }

    #[test]
    fn simple_layouts() {
        assert_eq!(simple_fpr_permutation(7), vec![1, 2, 4, 6, 3, 5, 7]);
        assert_eq!(simple_fpr_permutation(6), vec![1, 2, 4, 6, 3, 5]);
        assert_eq!(simple_fpr_permutation(2), vec![1, 2]);
        assert_eq!(gfp_permutation(5).unwrap().as_slice(), &[1, 3, 5, 2, 4]);
        assert!(gfp_permutation(4).is_err());
    }

    #[test]
    fn split_boundaries() {
        let p = distinct_poly(5, 2);
        let s = split_gfpr(&p, &GfprSpec::simple(5, 4).unwrap()).unwrap();
        assert_eq!(s.g.rows(), 1);
        assert_eq!(s.f.rows(), 5);
        let s = split_gfpr(&p, &GfprSpec::simple(5, 0).unwrap()).unwrap();
        assert_eq!(s.f.rows(), 1);
        let s = split_gfpr(&p, &GfprSpec::simple(5, 3).unwrap()).unwrap();
        assert_eq!((s.f.rows(), s.g.rows()), (4, 2));
    }

    #[test]
    fn example_k7_h6() {
        for n in 1..=2 {
            let p = distinct_poly(7, n);
            let cert = main_permutation(&p, &GfprSpec::simple(7, 6).unwrap()).unwrap();
            assert_eq!(cert.c.as_slice(), &[1, 2, 4, 6, 3, 5, 7]);
            assert_eq!(cert.tag(), FamilyTag::O1);
            let l = build_gfpr(&p, &GfprSpec::simple(7, 6).unwrap()).unwrap().congruence(&cert.c).unwrap();
            let want = parse_grid(
                &[
                    &["λA7+A6", "A5", "0", "0", "-I", "0", "0"],
                    &["A5", "-λA5+A4", "A3", "0", "λI", "-I", "0"],
                    &["0", "A3", "-λA3+A2", "A1", "0", "λI", "-I"],
                    &["0", "0", "A1", "-λA1+A0", "0", "0", "λI"],
                    &["-I", "λI", "0", "0", "0", "0", "0"],
                    &["0", "-I", "λI", "0", "0", "0", "0"],
                    &["0", "0", "-I", "λI", "0", "0", "0"],
                ],
                &p,
            )
            .unwrap();
            assert_eq!(l, want);
            let mut form = FamilyForm::skeleton(FamilyTag::O1, 7, n).unwrap();
            for (i, a) in [(1, 5), (2, 3), (3, 1)] {
                form.set_block('C', i, i - 1, &p.coeff(a).neg()).unwrap();
            }
            assert_eq!(build_family(&p, &form).unwrap(), l);
            assert_eq!(cert.form, form);
        }
    }

    #[test]
    fn appendix_examples() {
        let p = distinct_poly(5, 2);
        let cert = main_permutation(&p, &GfprSpec::simple(5, 4).unwrap()).unwrap();
        assert_eq!((cert.c.as_slice(), cert.tag()), (&[1, 2, 4, 3, 5][..], FamilyTag::O1));
        let p = distinct_poly(6, 2);
        let cert = main_permutation(&p, &GfprSpec::simple(6, 5).unwrap()).unwrap();
        assert_eq!((cert.c.as_slice(), cert.tag()), (&[1, 2, 4, 6, 3, 5][..], FamilyTag::E1));
    }

    #[test]
    fn gfp_reduces_to_skeleton() {
        for k in [3, 5, 7, 9] {
            for n in 1..=3 {
                let p = distinct_poly(k, n);
                let cert = gfp_congruence(&p).unwrap();
                assert!(cert.residual, "k = {k}");
            }
        }
        assert!(gfp_congruence(&distinct_poly(4, 1)).is_err());
    }

    #[test]
    fn random_specs_all_cells() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..6 {
            for k in 1..=8 {
                for h in 0..k {
                    let n = 1 + round % 2;
                    let p = random_polynomial(&mut rng, n, k, true, true);
                    let spec = random_gfpr_spec(&mut rng, k, h, n, 4);
                    let cert = main_permutation(&p, &spec)
                        .unwrap_or_else(|e| panic!("k={k} h={h} t_w={} t_v={}: {e}", spec.t_w, spec.t_v));
                    assert_eq!(cert.tag(), FamilyTag::for_gfpr(k, h));
                    assert!(cert.wing_param_nonsingular(), "k={k} h={h}");
                    // With n = 1 a scaled wing can look plain by accident.
                    if n == 2 {
                        assert!(wing_prediction_holds(&p, &spec, &cert).unwrap(), "k={k} h={h} t_w={}", spec.t_w);
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_agrees_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for k in 1..=5 {
            for h in 0..k {
                let p = random_polynomial(&mut rng, 1, k, true, true);
                let spec = random_gfpr_spec(&mut rng, k, h, 1, 3);
                let l = build_gfpr(&p, &spec).unwrap();
                let ours = main_permutation(&p, &spec).unwrap();
                let found = brute_force_oracle(&l, &p).unwrap().expect("oracle finds a certificate");
                assert_eq!(found.tag(), ours.tag(), "k={k} h={h}");
            }
        }
    }

    #[test]
    fn oracle_finds_gfp_permutation() {
        let p = distinct_poly(5, 1);
        let l = gfp_t(&p).unwrap();
        let found = brute_force_oracle(&l, &p).unwrap().unwrap();
        assert_eq!(found.tag(), FamilyTag::O1);
        // Every permutation the oracle can certify must include the closed form.
        assert!(certify(&l, &p, gfp_permutation(5).unwrap(), FamilyTag::O1).is_ok());
    }

    #[test]
    fn oracle_rejects_generic_pencil() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let k = 4;
        let p = random_polynomial(&mut rng, 1, k, true, true);
        let mut l = BlockPencil::<Rational>::zeros(1, k, k);
        for i in 0..k {
            for j in i..k {
                let x = Matrix::from_fn(1, 1, |_, _| rat(rng.gen_range(1..=9)));
                let y = random_nonsingular(&mut rng, 1);
                l.set_block(i, j, &x, &y);
                l.set_block(j, i, &x, &y);
            }
        }
        assert!(brute_force_oracle(&l, &p).unwrap().is_none());
    }
}
