//! The block-diagonal pencil `M(λ;Q)`, the four fundamental block-symmetric
//! families `⟨O1⟩`, `⟨O2⟩` (odd degree) and `⟨E1⟩`, `⟨E2⟩` (even degree),
//! and the antidiagonal-sum (AS) condition.
//!
//! Parameters `B, C, D, E` are constant block matrices held as constant
//! [`BlockPencil`]s. Their block-transposes are always derived, never stored.

use std::fmt;

use serde_json::{json, Map, Value};

use crate::blockpencil::{BlockPencil, BlockPermutation};
use crate::error::{Error, Result};
use crate::matpoly::{check_field, get_usize, MatrixPolynomial};
use crate::matrix::Matrix;
use crate::minbases::{make_k, make_lambda};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyTag {
    O1,
    O2,
    E1,
    E2,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 4] = [FamilyTag::O1, FamilyTag::O2, FamilyTag::E1, FamilyTag::E2];

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::O1 => "O1",
            FamilyTag::O2 => "O2",
            FamilyTag::E1 => "E1",
            FamilyTag::E2 => "E2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "O1" => Ok(FamilyTag::O1),
            "O2" => Ok(FamilyTag::O2),
            "E1" => Ok(FamilyTag::E1),
            "E2" => Ok(FamilyTag::E2),
            _ => Err(Error::Parse(format!("unknown family tag `{s}`"))),
        }
    }

    pub fn odd_degree(self) -> bool {
        matches!(self, FamilyTag::O1 | FamilyTag::O2)
    }

    /// The tag a block-symmetric GFPR with parameter `h` reduces to.
    pub fn for_gfpr(k: usize, h: usize) -> Self {
        match (k % 2 == 1, h.is_multiple_of(2)) {
            (true, true) => FamilyTag::O1,
            (true, false) => FamilyTag::O2,
            (false, false) => FamilyTag::E1,
            (false, true) => FamilyTag::E2,
        }
    }

    /// `s`: `(k-1)/2` for odd tags, `(k-2)/2` for even ones.
    pub fn wing_size(self, k: usize) -> Result<usize> {
        let min = match self {
            FamilyTag::O1 => 1,
            FamilyTag::O2 => 3,
            FamilyTag::E1 | FamilyTag::E2 => 2,
        };
        if k < min || (k % 2 == 1) != self.odd_degree() {
            return Err(Error::Grade(format!("family {} is not defined for degree {k}", self.name())));
        }
        Ok(if self.odd_degree() { (k - 1) / 2 } else { (k - 2) / 2 })
    }

    /// Parameter names with their shapes in blocks.
    pub fn param_shapes(self, k: usize) -> Result<Vec<(char, usize, usize)>> {
        let s = self.wing_size(k)?;
        Ok(match self {
            FamilyTag::O1 => vec![('B', s, s), ('C', s + 1, s)],
            FamilyTag::O2 => vec![('B', 1, s - 1), ('C', s, s - 1), ('D', 1, s - 1), ('E', s - 1, s - 1)],
            FamilyTag::E1 | FamilyTag::E2 => vec![('B', s + 1, s), ('C', 1, s), ('D', s, s)],
        })
    }

    /// The parameter multiplying `K` in the wing rows; the skeleton sets it
    /// to the identity.
    pub fn wing_param(self) -> char {
        match self {
            FamilyTag::O1 => 'B',
            FamilyTag::O2 => 'E',
            FamilyTag::E1 | FamilyTag::E2 => 'D',
        }
    }

    /// Parameters whose blocks sit alone in the λ-part of some row strip,
    /// as `(name, first block row, first block column)`.
    fn readable_params(self, k: usize) -> Vec<(char, usize, usize)> {
        let s = self.wing_size(k).unwrap();
        match self {
            FamilyTag::O1 => vec![('B', s + 1, 1)],
            FamilyTag::O2 => vec![('B', 0, 2), ('D', s + 1, 2), ('E', s + 2, 2)],
            FamilyTag::E1 => vec![('C', s + 1, 1), ('D', s + 2, 1)],
            FamilyTag::E2 => vec![('C', 0, 2), ('D', s + 2, 2)],
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A member of one of the four families: its tag and parameter blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyForm<T> {
    pub tag: FamilyTag,
    pub k: usize,
    pub n: usize,
    params: Vec<(char, BlockPencil<T>)>,
}

impl<T: Scalar> FamilyForm<T> {
    /// All parameters zero.
    pub fn zeros(tag: FamilyTag, k: usize, n: usize) -> Result<Self> {
        let params = tag.param_shapes(k)?.into_iter().map(|(c, r, q)| (c, BlockPencil::zeros(n, r, q))).collect();
        Ok(FamilyForm { tag, k, n, params })
    }

    /// The parameters giving the skeleton: wing parameter `I`, the rest zero.
    pub fn skeleton(tag: FamilyTag, k: usize, n: usize) -> Result<Self> {
        let mut f = Self::zeros(tag, k, n)?;
        let s = f.param(tag.wing_param()).unwrap().rows();
        f.set(tag.wing_param(), BlockPencil::from_constant_shaped(n, s, s, Matrix::identity(s * n)).unwrap())?;
        Ok(f)
    }

    pub fn s(&self) -> usize {
        self.tag.wing_size(self.k).unwrap()
    }

    pub fn params(&self) -> &[(char, BlockPencil<T>)] {
        &self.params
    }

    pub fn param(&self, name: char) -> Option<&BlockPencil<T>> {
        self.params.iter().find(|(c, _)| *c == name).map(|(_, b)| b)
    }

    fn get(&self, name: char) -> &BlockPencil<T> {
        self.param(name).expect("parameter present for tag")
    }

    /// Replaces a parameter, checking its shape.
    pub fn set(&mut self, name: char, value: BlockPencil<T>) -> Result<()> {
        let n = self.n;
        let slot = self
            .params
            .iter_mut()
            .find(|(c, _)| *c == name)
            .ok_or_else(|| Error::Dimension(format!("family {} has no parameter {name}", self.tag)))?;
        let old = &slot.1;
        if value.n() != n || value.rows() != old.rows() || value.cols() != old.cols() || !value.is_constant() {
            return Err(Error::Dimension(format!(
                "parameter {name} must be a constant {}x{} block matrix with {n}x{n} blocks",
                old.rows(),
                old.cols()
            )));
        }
        slot.1 = value;
        Ok(())
    }

    /// Sets block `(i, j)` of a parameter.
    pub fn set_block(&mut self, name: char, i: usize, j: usize, m: &Matrix<T>) -> Result<()> {
        let mut p = self
            .param(name)
            .cloned()
            .ok_or_else(|| Error::Dimension(format!("family {} has no parameter {name}", self.tag)))?;
        p.set_block(i, j, &Matrix::zeros(self.n, self.n), m);
        self.set(name, p)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> FamilyForm<U> {
        FamilyForm { tag: self.tag, k: self.k, n: self.n, params: self.params.iter().map(|(c, b)| (*c, b.map(f))).collect() }
    }

    pub fn to_json(&self) -> Value {
        let mut params = Map::new();
        for (c, b) in &self.params {
            params.insert(c.to_string(), b.constant().to_json());
        }
        json!({
            "tag": self.tag.name(),
            "k": self.k,
            "n": self.n,
            "field": T::FIELD.name(),
            "params": Value::Object(params),
        })
    }

    /// Reads a form. Missing parameters take their skeleton values.
    pub fn from_json(v: &Value) -> Result<Self> {
        if let Some(f) = v.get("field").and_then(Value::as_str) {
            check_field::<T>(f)?;
        }
        let tag = FamilyTag::parse(v.get("tag").and_then(Value::as_str).ok_or_else(|| Error::Parse("missing `tag`".into()))?)?;
        let k = get_usize(v, "k")?;
        let n = get_usize(v, "n")?;
        let mut form = Self::skeleton(tag, k, n)?;
        if let Some(ps) = v.get("params").and_then(Value::as_object) {
            for (name, val) in ps {
                let c = name.chars().next().filter(|_| name.len() == 1).ok_or_else(|| Error::Parse(format!("bad parameter name `{name}`")))?;
                let shape = form
                    .param(c)
                    .map(|b| (b.rows() * n, b.cols() * n))
                    .ok_or_else(|| Error::Dimension(format!("family {tag} has no parameter {c}")))?;
                let m = Matrix::from_json(val, Some(shape))?;
                form.set(c, BlockPencil::from_constant_shaped(n, shape.0 / n, shape.1 / n, m)?)?;
            }
        }
        Ok(form)
    }
}

/// `M(λ;Q) = diag(λQ_d + Q_{d-1}, …, λQ_1 + Q_0)` for odd grade `d`.
pub fn m_of<T: Scalar>(q: &MatrixPolynomial<T>) -> Result<BlockPencil<T>> {
    let d = q.grade();
    if d.is_multiple_of(2) {
        return Err(Error::Grade(format!("M(λ;Q) needs odd grade, got {d}")));
    }
    let blocks = d.div_ceil(2);
    let mut m = BlockPencil::zeros(q.n(), blocks, blocks);
    for i in 0..blocks {
        m.set_block(i, i, q.coeff(d - 2 * i), q.coeff(d - 2 * i - 1));
    }
    Ok(m)
}

// X + X^B
fn sym<T: Scalar>(x: &BlockPencil<T>) -> BlockPencil<T> {
    x.add(&x.block_transpose())
}

// Places x at (r, c) and x^B at (c, r).
fn place_pair<T: Scalar>(l: &mut BlockPencil<T>, r: usize, c: usize, x: &BlockPencil<T>) {
    l.set_sub_pencil(r, c, x);
    l.set_sub_pencil(c, r, &x.block_transpose());
}

/// `[λA_k 0 … 0]` with `len` blocks.
fn lead_row<T: Scalar>(p: &MatrixPolynomial<T>, len: usize) -> BlockPencil<T> {
    let n = p.n();
    let mut r = BlockPencil::zeros(n, 1, len);
    r.set_block(0, 0, p.coeff(p.grade()), &Matrix::zeros(n, n));
    r
}

/// `[0 … 0 A_0]` with `len` blocks.
fn trail_row<T: Scalar>(p: &MatrixPolynomial<T>, len: usize) -> BlockPencil<T> {
    let n = p.n();
    let mut r = BlockPencil::zeros(n, 1, len);
    r.set_block(0, len - 1, &Matrix::zeros(n, n), p.coeff(0));
    r
}

/// Instantiates the family template for `P` with the given parameters.
pub fn build_family<T: Scalar>(p: &MatrixPolynomial<T>, form: &FamilyForm<T>) -> Result<BlockPencil<T>> {
    let (k, n) = (p.grade(), p.n());
    if form.k != k || form.n != n {
        return Err(Error::Dimension(format!(
            "form for k={}, n={} used with a polynomial of grade {k} and size {n}",
            form.k, form.n
        )));
    }
    let s = form.tag.wing_size(k)?;
    let z = Matrix::zeros(n, n);
    let mut l = BlockPencil::zeros(n, k, k);
    match form.tag {
        FamilyTag::O1 => {
            let ks = make_k(s, n);
            l.set_sub_pencil(0, 0, &m_of(p)?.add(&sym(&form.get('C').mul(&ks))));
            place_pair(&mut l, s + 1, 0, &form.get('B').mul(&ks));
        }
        FamilyTag::O2 => {
            let ks = make_k(s - 1, n);
            l.set_block(0, 0, &z, &p.coeff(k).neg());
            place_pair(&mut l, 0, 1, &lead_row(p, s).add(&form.get('B').mul(&ks)));
            l.set_sub_pencil(1, 1, &m_of(&p.middle_part()?)?.add(&sym(&form.get('C').mul(&ks))));
            place_pair(&mut l, s + 1, 1, &trail_row(p, s).add(&form.get('D').mul(&ks)));
            l.set_block(s + 1, s + 1, &p.coeff(0).neg(), &z);
            place_pair(&mut l, s + 2, 1, &form.get('E').mul(&ks));
        }
        FamilyTag::E1 => {
            let ks = make_k(s, n);
            l.set_sub_pencil(0, 0, &m_of(&p.horner_shift()?)?.add(&sym(&form.get('B').mul(&ks))));
            place_pair(&mut l, s + 1, 0, &trail_row(p, s + 1).add(&form.get('C').mul(&ks)));
            l.set_block(s + 1, s + 1, &p.coeff(0).neg(), &z);
            place_pair(&mut l, s + 2, 0, &form.get('D').mul(&ks));
        }
        FamilyTag::E2 => {
            let ks = make_k(s, n);
            l.set_block(0, 0, &z, &p.coeff(k).neg());
            place_pair(&mut l, 0, 1, &lead_row(p, s + 1).add(&form.get('C').mul(&ks)));
            l.set_sub_pencil(1, 1, &m_of(&p.truncate_low()?)?.add(&sym(&form.get('B').mul(&ks))));
            place_pair(&mut l, s + 2, 1, &form.get('D').mul(&ks));
        }
    }
    Ok(l)
}

/// The zero-parameter member: `O1^P`, `O2^P`, `E1^P` or `E2^P`.
pub fn skeleton<T: Scalar>(p: &MatrixPolynomial<T>, tag: FamilyTag) -> Result<BlockPencil<T>> {
    build_family(p, &FamilyForm::skeleton(tag, p.grade(), p.n())?)
}

/// The constant block matrix `T` with `build_family(P, form) = T · skeleton · T^B`.
pub fn congruence_factor<T: Scalar>(form: &FamilyForm<T>) -> BlockPencil<T> {
    let (k, n, s) = (form.k, form.n, form.s());
    let mut t = BlockPencil::from_constant(n, Matrix::identity(k * n)).unwrap();
    // (parameter, first block row, first block column)
    let placement: Vec<(char, usize, usize)> = match form.tag {
        FamilyTag::O1 => vec![('C', 0, s + 1), ('B', s + 1, s + 1)],
        FamilyTag::O2 => vec![('B', 0, s + 2), ('C', 1, s + 2), ('D', s + 1, s + 2), ('E', s + 2, s + 2)],
        FamilyTag::E1 => vec![('B', 0, s + 2), ('C', s + 1, s + 2), ('D', s + 2, s + 2)],
        FamilyTag::E2 => vec![('C', 0, s + 2), ('B', 1, s + 2), ('D', s + 2, s + 2)],
    };
    for (c, r0, c0) in placement {
        t.set_sub_pencil(r0, c0, form.get(c));
    }
    t
}

/// Column permutation taking the skeleton layout to an extended block
/// Kronecker pencil: moves the first block column behind the next `s+1`
/// (`O2`, `E2`), identity otherwise.
pub fn kronecker_column_permutation(tag: FamilyTag, k: usize) -> Result<BlockPermutation> {
    let s = tag.wing_size(k)?;
    match tag {
        FamilyTag::O1 | FamilyTag::E1 => Ok(BlockPermutation::identity(k)),
        FamilyTag::O2 | FamilyTag::E2 => {
            let mut c: Vec<usize> = (2..=s + 2).collect();
            c.push(1);
            c.extend(s + 3..=k);
            BlockPermutation::new(c)
        }
    }
}

/// `(p, q)` of the natural extended block Kronecker partition of
/// `L Π` (body `(q+1)×(p+1)` blocks).
pub fn kronecker_partition(tag: FamilyTag, k: usize) -> Result<(usize, usize)> {
    let s = tag.wing_size(k)?;
    Ok(match tag {
        FamilyTag::O1 | FamilyTag::O2 => (s, s),
        FamilyTag::E1 | FamilyTag::E2 => (s, s + 1),
    })
}

/// `L Π` for the family's column permutation.
pub fn kronecker_form<T: Scalar>(l: &BlockPencil<T>, tag: FamilyTag) -> Result<BlockPencil<T>> {
    l.permute_columns(&kronecker_column_permutation(tag, l.rows())?)
}

/// Antidiagonal sums of a `(q+1)×(p+1)` body against `P`.
#[derive(Clone, Debug)]
pub struct AsReport<T> {
    /// `AS(M, s)` for `s = 0..=k`.
    pub sums: Vec<Matrix<T>>,
    /// Degrees `s` where `AS(M, s) ≠ A_s`.
    pub violated: Vec<usize>,
}

impl<T> AsReport<T> {
    pub fn holds(&self) -> bool {
        self.violated.is_empty()
    }
}

fn same<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> bool {
    if T::EXACT {
        a == b
    } else {
        a.approx_eq(b)
    }
}

/// The AS condition. Blocks are indexed from one at the top left:
/// `AS(M, s) = Σ_{i+j=k+2-s} [M_1]_{ij} + Σ_{i+j=k+1-s} [M_0]_{ij}`.
pub fn as_condition<T: Scalar>(m: &BlockPencil<T>, p: &MatrixPolynomial<T>) -> Result<AsReport<T>> {
    let k = p.grade();
    if m.n() != p.n() || m.rows() + m.cols() != k + 1 {
        return Err(Error::Dimension(format!(
            "a {}x{} body does not fit a polynomial of grade {k}",
            m.rows(),
            m.cols()
        )));
    }
    let n = p.n();
    let mut sums = Vec::with_capacity(k + 1);
    let mut violated = Vec::new();
    for s in 0..=k {
        let mut acc = Matrix::zeros(n, n);
        for i in 1..=m.rows() {
            for j in 1..=m.cols() {
                let (x, y) = m.block(i - 1, j - 1);
                if i + j == k + 2 - s {
                    acc = acc.add(&x);
                }
                if i + j == k + 1 - s {
                    acc = acc.add(&y);
                }
            }
        }
        if !same(&acc, p.coeff(s)) {
            violated.push(s);
        }
        sums.push(acc);
    }
    Ok(AsReport { sums, violated })
}

/// `(Λ_q ⊗ I) M (Λ_p ⊗ I)^T` for a `(q+1)×(p+1)` body, as a polynomial of
/// grade `p + q + 1`.
pub fn lambda_sandwich<T: Scalar>(m: &BlockPencil<T>) -> Result<MatrixPolynomial<T>> {
    let (q, p, n) = (m.rows() - 1, m.cols() - 1, m.n());
    make_lambda(q, n)
        .mul(&m.to_poly_matrix())?
        .mul(&make_lambda(p, n).transpose())?
        .to_matrix_polynomial(p + q + 1)
}

/// Both sides of the AS equivalence for one body.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AsEquivalence {
    pub as_holds: bool,
    pub product_holds: bool,
}

impl AsEquivalence {
    pub fn agree(&self) -> bool {
        self.as_holds == self.product_holds
    }
}

/// Evaluates the AS condition and the product identity separately.
pub fn as_equiv_product_check<T: Scalar>(m: &BlockPencil<T>, p: &MatrixPolynomial<T>) -> Result<AsEquivalence> {
    let as_holds = as_condition(m, p)?.holds();
    let prod = lambda_sandwich(m)?;
    let product_holds = (0..=p.grade()).all(|i| same(prod.coeff(i), p.coeff(i)));
    Ok(AsEquivalence { as_holds, product_holds })
}

/// Nonsingularity hypotheses under which a family member is a strong linearization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub checks: Vec<(String, bool)>,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, ok)| !ok).map(|(s, _)| s.as_str()).collect()
    }
}

/// Sufficient conditions for a strong linearization: `O1` needs `B`, `B^B`
/// nonsingular; `O2` needs `A_0`, `A_k`, `E`, `E^B`; `E1` needs `A_0`, `D`,
/// `D^B`; `E2` needs `A_k`, `D`, `D^B`.
pub fn linearization_conditions<T: Scalar>(form: &FamilyForm<T>, p: &MatrixPolynomial<T>) -> ConditionReport {
    let k = p.grade();
    let mut checks = Vec::new();
    let mut coeff = |i: usize, name: String| checks.push((name, p.coeff(i).is_nonsingular()));
    match form.tag {
        FamilyTag::O1 => {}
        FamilyTag::O2 => {
            coeff(0, "A0".into());
            coeff(k, format!("A{k}"));
        }
        FamilyTag::E1 => coeff(0, "A0".into()),
        FamilyTag::E2 => coeff(k, format!("A{k}")),
    }
    let w = form.tag.wing_param();
    let b = form.get(w);
    checks.push((w.to_string(), b.constant().is_nonsingular()));
    checks.push((format!("{w}^B"), b.block_transpose().constant().is_nonsingular()));
    ConditionReport { checks }
}

fn unknowns(tag: FamilyTag, k: usize) -> Vec<(char, usize, usize)> {
    let mut out = Vec::new();
    for (c, r, q) in tag.param_shapes(k).unwrap() {
        for i in 0..r {
            for j in 0..q {
                out.push((c, i, j));
            }
        }
    }
    out
}

/// Reads the wing-type parameters straight off the λ-parts of their rows.
pub fn read_wing_params<T: Scalar>(l: &BlockPencil<T>, tag: FamilyTag) -> Result<Vec<(char, BlockPencil<T>)>> {
    let k = l.rows();
    let shapes = tag.param_shapes(k)?;
    let mut out = Vec::new();
    for (c, r0, c0) in tag.readable_params(k) {
        let (_, r, q) = shapes.iter().find(|(x, _, _)| *x == c).copied().unwrap();
        out.push((c, l.sub_pencil(r0, c0, r, q).lambda_part()));
    }
    Ok(out)
}

/// Finds parameters with `build_family(P, form) = L`, or `None` when `L` is
/// not in the family. `C` (and `B` for the even tags) is one particular
/// solution of an affine system; the parameters read off wing rows are
/// checked against the solve.
pub fn solve_family_params<T: Scalar>(
    l: &BlockPencil<T>,
    p: &MatrixPolynomial<T>,
    tag: FamilyTag,
) -> Result<Option<FamilyForm<T>>> {
    let (k, n) = (p.grade(), p.n());
    if l.rows() != k || l.cols() != k || l.n() != n {
        return Err(Error::Dimension("pencil and polynomial sizes disagree".into()));
    }
    tag.wing_size(k)?;
    let base = build_family(p, &FamilyForm::zeros(tag, k, n)?)?;
    let resid = l.sub(&base);

    // Every template entry is a scalar multiple of I times one parameter
    // block, so the coefficient patterns come from a scalar build.
    let unk = unknowns(tag, k);
    let zero_poly = MatrixPolynomial::<T>::zeros(1, k);
    let eqs = 2 * k * k;
    let mut a = Matrix::<T>::zeros(eqs, unk.len());
    for (u, &(c, i, j)) in unk.iter().enumerate() {
        let mut f = FamilyForm::<T>::zeros(tag, k, 1)?;
        f.set_block(c, i, j, &Matrix::identity(1))?;
        let pat = build_family(&zero_poly, &f)?;
        for r in 0..k {
            for q in 0..k {
                a[(r * k + q, u)] = pat.lambda()[(r, q)].clone();
                a[(k * k + r * k + q, u)] = pat.constant()[(r, q)].clone();
            }
        }
    }

    let mut form = FamilyForm::zeros(tag, k, n)?;
    let mut values: Vec<Matrix<T>> = vec![Matrix::zeros(n, n); unk.len()];
    for er in 0..n {
        for ec in 0..n {
            let mut rhs = Vec::with_capacity(eqs);
            for part in [resid.lambda(), resid.constant()] {
                for r in 0..k {
                    for q in 0..k {
                        rhs.push(part[(r * n + er, q * n + ec)].clone());
                    }
                }
            }
            let Some(x) = a.solve_particular(&rhs) else { return Ok(None) };
            for (u, v) in x.into_iter().enumerate() {
                values[u][(er, ec)] = v;
            }
        }
    }
    for (&(c, i, j), v) in unk.iter().zip(&values) {
        form.set_block(c, i, j, v)?;
    }
    let rebuilt = build_family(p, &form)?;
    let equal = if T::EXACT { rebuilt == *l } else { rebuilt.approx_eq(l) };
    if !equal {
        return Ok(None);
    }
    for (c, read) in read_wing_params(l, tag)? {
        let solved = form.get(c);
        let ok = if T::EXACT { *solved == read } else { solved.approx_eq(&read) };
        if !ok {
            return Err(Error::Certificate(format!("parameter {c} read from the wing rows disagrees with the solve")));
        }
    }
    Ok(Some(form))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minbases::recover_q_kronecker;
    use crate::scalar::Rational;
    use crate::symbolic::parse_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix<Rational> {
        Matrix::from_fn(r, c, |_, _| Rational::from_i64(rng.gen_range(-5..=5)))
    }

    fn rand_poly(rng: &mut ChaCha8Rng, n: usize, k: usize) -> MatrixPolynomial<Rational> {
        MatrixPolynomial::new((0..=k).map(|_| rand_mat(rng, n, n)).collect()).unwrap()
    }

    fn rand_form(rng: &mut ChaCha8Rng, tag: FamilyTag, k: usize, n: usize) -> FamilyForm<Rational> {
        let mut f = FamilyForm::zeros(tag, k, n).unwrap();
        for (c, r, q) in tag.param_shapes(k).unwrap() {
            f.set(c, BlockPencil::from_constant_shaped(n, r, q, rand_mat(rng, r * n, q * n)).unwrap()).unwrap();
        }
        f
    }

    fn distinct_poly(n: usize, k: usize) -> MatrixPolynomial<Rational> {
        MatrixPolynomial::new(
            (0..=k as i64).map(|i| Matrix::from_fn(n, n, |r, c| Rational::from_i64(10 * (i + 1) + (r * n + c) as i64))).collect(),
        )
        .unwrap()
    }

    fn tags_for(k: usize) -> Vec<FamilyTag> {
        FamilyTag::ALL.into_iter().filter(|t| t.wing_size(k).is_ok()).collect()
    }

    #[test]
    fn m_of_small() {
        let q = distinct_poly(1, 3);
        let m = m_of(&q).unwrap();
        let want = parse_grid(&[&["λA3+A2", "0"], &["0", "λA1+A0"]], &q).unwrap();
        assert_eq!(m, want);
        assert!(m_of(&distinct_poly(1, 2)).is_err());
    }

    #[test]
    fn m_of_satisfies_as() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [1, 3, 5, 7] {
            let q = rand_poly(&mut rng, 2, d);
            assert!(as_condition(&m_of(&q).unwrap(), &q).unwrap().holds());
        }
    }

    #[test]
    fn parameter_shapes() {
        assert_eq!(FamilyTag::O1.param_shapes(7).unwrap(), vec![('B', 3, 3), ('C', 4, 3)]);
        assert_eq!(
            FamilyTag::O2.param_shapes(7).unwrap(),
            vec![('B', 1, 2), ('C', 3, 2), ('D', 1, 2), ('E', 2, 2)]
        );
        assert_eq!(FamilyTag::E1.param_shapes(6).unwrap(), vec![('B', 3, 2), ('C', 1, 2), ('D', 2, 2)]);
        assert_eq!(FamilyTag::E2.param_shapes(6).unwrap(), vec![('B', 3, 2), ('C', 1, 2), ('D', 2, 2)]);
        assert!(FamilyTag::O1.wing_size(6).is_err());
        assert!(FamilyTag::E2.wing_size(5).is_err());
        assert!(FamilyTag::O2.wing_size(1).is_err());
    }

    #[test]
    fn o2_skeleton_degree_seven() {
        let p = distinct_poly(2, 7);
        let want = parse_grid(
            &[
                &["-A7", "λA7", "0", "0", "0", "0", "0"],
                &["λA7", "λA6+A5", "0", "0", "0", "-I", "0"],
                &["0", "0", "λA4+A3", "0", "0", "λI", "-I"],
                &["0", "0", "0", "λA2+A1", "A0", "0", "λI"],
                &["0", "0", "0", "A0", "-λA0", "0", "0"],
                &["0", "-I", "λI", "0", "0", "0", "0"],
                &["0", "0", "-I", "λI", "0", "0", "0"],
            ],
            &p,
        )
        .unwrap();
        let o2 = skeleton(&p, FamilyTag::O2).unwrap();
        assert_eq!(o2, want);
        let permuted = parse_grid(
            &[
                &["λA7", "0", "0", "0", "-A7", "0", "0"],
                &["λA6+A5", "0", "0", "0", "λA7", "-I", "0"],
                &["0", "λA4+A3", "0", "0", "0", "λI", "-I"],
                &["0", "0", "λA2+A1", "A0", "0", "0", "λI"],
                &["0", "0", "A0", "-λA0", "0", "0", "0"],
                &["-I", "λI", "0", "0", "0", "0", "0"],
                &["0", "-I", "λI", "0", "0", "0", "0"],
            ],
            &p,
        )
        .unwrap();
        assert_eq!(kronecker_form(&o2, FamilyTag::O2).unwrap(), permuted);
    }

    #[test]
    fn e1_skeleton_degree_six() {
        let p = distinct_poly(2, 6);
        let want = parse_grid(
            &[
                &["λA6+A5", "0", "0", "0", "-I", "0"],
                &["0", "λA4+A3", "0", "0", "λI", "-I"],
                &["0", "0", "λA2+A1", "A0", "0", "λI"],
                &["0", "0", "A0", "-λA0", "0", "0"],
                &["-I", "λI", "0", "0", "0", "0"],
                &["0", "-I", "λI", "0", "0", "0"],
            ],
            &p,
        )
        .unwrap();
        assert_eq!(skeleton(&p, FamilyTag::E1).unwrap(), want);
    }

    #[test]
    fn e2_skeleton_degree_six() {
        let p = distinct_poly(2, 6);
        let want = parse_grid(
            &[
                &["-A6", "λA6", "0", "0", "0", "0"],
                &["λA6", "λA5+A4", "0", "0", "-I", "0"],
                &["0", "0", "λA3+A2", "0", "λI", "-I"],
                &["0", "0", "0", "λA1+A0", "0", "λI"],
                &["0", "-I", "λI", "0", "0", "0"],
                &["0", "0", "-I", "λI", "0", "0"],
            ],
            &p,
        )
        .unwrap();
        let e2 = skeleton(&p, FamilyTag::E2).unwrap();
        assert_eq!(e2, want);
        let permuted = parse_grid(
            &[
                &["λA6", "0", "0", "-A6", "0", "0"],
                &["λA5+A4", "0", "0", "λA6", "-I", "0"],
                &["0", "λA3+A2", "0", "0", "λI", "-I"],
                &["0", "0", "λA1+A0", "0", "0", "λI"],
                &["-I", "λI", "0", "0", "0", "0"],
                &["0", "-I", "λI", "0", "0", "0"],
            ],
            &p,
        )
        .unwrap();
        assert_eq!(kronecker_form(&e2, FamilyTag::E2).unwrap(), permuted);
    }

    #[test]
    fn build_equals_congruence_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 1..=9 {
            for tag in tags_for(k) {
                for n in 1..=2 {
                    let p = rand_poly(&mut rng, n, k);
                    let f = rand_form(&mut rng, tag, k, n);
                    let l = build_family(&p, &f).unwrap();
                    assert!(l.is_block_symmetric(), "{tag} k={k}");
                    let t = congruence_factor(&f);
                    let prod = t.mul(&skeleton(&p, tag).unwrap()).mul(&t.block_transpose());
                    assert_eq!(prod, l, "{tag} k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn symmetric_inputs_give_symmetric_pencils() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let symm = |m: Matrix<Rational>| m.add(&m.transpose());
        for k in 2..=7 {
            for tag in tags_for(k) {
                let n = 2;
                let p = MatrixPolynomial::new((0..=k).map(|_| symm(rand_mat(&mut rng, n, n))).collect()).unwrap();
                let mut f = FamilyForm::zeros(tag, k, n).unwrap();
                for (c, r, q) in tag.param_shapes(k).unwrap() {
                    for i in 0..r {
                        for j in 0..q {
                            f.set_block(c, i, j, &symm(rand_mat(&mut rng, n, n))).unwrap();
                        }
                    }
                }
                assert!(build_family(&p, &f).unwrap().is_symmetric(), "{tag} k={k}");
            }
        }
    }

    #[test]
    fn permuted_bodies_satisfy_as() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for k in 2..=9 {
            for tag in tags_for(k) {
                let p = rand_poly(&mut rng, 2, k);
                let f = rand_form(&mut rng, tag, k, 2);
                let lp = kronecker_form(&build_family(&p, &f).unwrap(), tag).unwrap();
                let (pp, q) = kronecker_partition(tag, k).unwrap();
                let body = lp.sub_pencil(0, 0, q + 1, pp + 1);
                assert!(as_condition(&body, &p).unwrap().holds(), "{tag} k={k}");
            }
        }
    }

    #[test]
    fn skeleton_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 1..=8 {
            for tag in tags_for(k) {
                let p = rand_poly(&mut rng, 2, k);
                let lp = kronecker_form(&skeleton(&p, tag).unwrap(), tag).unwrap();
                let (s1, s2) = kronecker_partition(tag, k).unwrap();
                assert_eq!(recover_q_kronecker(&lp, s1, s2).unwrap(), p, "{tag} k={k}");
            }
        }
    }

    #[test]
    fn as_degree_five_example() {
        let p = distinct_poly(1, 5);
        let m = parse_grid(&[&["λA5", "0", "0"], &["λA4", "0", "0"], &["λA3", "λA2", "λA1+A0"]], &p).unwrap();
        assert!(as_condition(&m, &p).unwrap().holds());
        let mut bad = m.clone();
        bad.add_to_block(1, 1, &Matrix::zeros(1, 1), &Matrix::identity(1));
        let rep = as_condition(&bad, &p).unwrap();
        assert!(!rep.holds());
        assert_eq!(rep.violated, vec![2]);
    }

    #[test]
    fn conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = rand_poly(&mut rng, 2, 5);
        let f = FamilyForm::skeleton(FamilyTag::O1, 5, 2).unwrap();
        assert!(linearization_conditions(&f, &p).holds());
        let f = FamilyForm::zeros(FamilyTag::O2, 5, 2).unwrap();
        assert!(linearization_conditions(&f, &p).failed().contains(&"E"));
        let mut p = rand_poly(&mut rng, 2, 4);
        let mut cs: Vec<_> = p.coeffs().to_vec();
        cs[0] = Matrix::from_i64(2, 2, &[1, 2, 2, 4]);
        p = MatrixPolynomial::new(cs).unwrap();
        let f = FamilyForm::skeleton(FamilyTag::E1, 4, 2).unwrap();
        assert_eq!(linearization_conditions(&f, &p).failed(), vec!["A0"]);
    }

    #[test]
    fn solve_recovers_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 2..=7 {
            for tag in tags_for(k) {
                let p = rand_poly(&mut rng, 2, k);
                let f = rand_form(&mut rng, tag, k, 2);
                let l = build_family(&p, &f).unwrap();
                let got = solve_family_params(&l, &p, tag).unwrap().expect("member");
                assert_eq!(build_family(&p, &got).unwrap(), l);
                let w = tag.wing_param();
                assert_eq!(got.param(w), f.param(w));
                // a generic perturbation leaves the family
                let mut bad = l.clone();
                bad.add_to_block(k - 1, k - 1, &Matrix::identity(2), &Matrix::zeros(2, 2));
                assert!(solve_family_params(&bad, &p, tag).unwrap().is_none());
            }
        }
    }

    #[test]
    fn form_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = rand_form(&mut rng, FamilyTag::O2, 7, 2);
        assert_eq!(FamilyForm::<Rational>::from_json(&f.to_json()).unwrap(), f);
        let sk: FamilyForm<Rational> = FamilyForm::from_json(&json!({"tag": "E1", "k": 4, "n": 1})).unwrap();
        assert_eq!(sk, FamilyForm::skeleton(FamilyTag::E1, 4, 1).unwrap());
    }
}
