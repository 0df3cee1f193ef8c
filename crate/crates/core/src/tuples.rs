//! Index tuples: the successor infix property, column standard form,
//! heads, Type I/II indices, admissible tuples and symmetric complements.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// An ordered list of integer indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IndexTuple(pub Vec<i64>);

/// Two indices may be swapped when adjacent in a tuple iff they are
/// distinct and not consecutive integers.
pub fn commute(i: i64, j: i64) -> bool {
    i != j && (i - j).abs() != 1
}

impl IndexTuple {
    pub fn new(v: Vec<i64>) -> Self {
        IndexTuple(v)
    }

    pub fn empty() -> Self {
        IndexTuple(Vec::new())
    }

    /// `(a:b)` ascending; empty when `a > b`.
    pub fn range(a: i64, b: i64) -> Self {
        IndexTuple((a..=b).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn rev(&self) -> Self {
        IndexTuple(self.0.iter().rev().copied().collect())
    }

    pub fn shift(&self, a: i64) -> Self {
        IndexTuple(self.0.iter().map(|&x| x + a).collect())
    }

    pub fn concat(parts: &[&IndexTuple]) -> Self {
        IndexTuple(parts.iter().flat_map(|p| p.0.iter().copied()).collect())
    }

    pub fn push(&mut self, x: i64) {
        self.0.push(x)
    }

    fn sign_class(&self) -> Result<Sign> {
        let nonneg = self.0.iter().all(|&x| x >= 0);
        let neg = self.0.iter().all(|&x| x < 0);
        match (nonneg, neg) {
            (true, _) => Ok(Sign::NonNegative),
            (_, true) => Ok(Sign::Negative),
            _ => Err(Error::Tuple(format!("{self} mixes negative and nonnegative indices"))),
        }
    }

    /// Parses `(5:6, 3:5, 0)`, `()` or a bare comma list. `a:b` expands to
    /// the ascending run `a, a+1, ..., b`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = match (t.strip_prefix('('), t.ends_with(')')) {
            (Some(inner), true) => &inner[..inner.len() - 1],
            (None, false) => t,
            _ => return Err(Error::Parse(format!("unbalanced parentheses in `{s}`"))),
        };
        let mut out = Vec::new();
        if t.trim().is_empty() {
            return Ok(IndexTuple(out));
        }
        for part in t.split(',') {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::Parse(format!("empty entry in `{s}`")));
            }
            let num = |x: &str| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad index `{x}` in `{s}`")));
            match part.split_once(':') {
                Some((a, b)) => {
                    let (a, b) = (num(a)?, num(b)?);
                    if a > b {
                        return Err(Error::Parse(format!("descending range `{part}`")));
                    }
                    out.extend(a..=b);
                }
                None => out.push(num(part)?),
            }
        }
        Ok(IndexTuple(out))
    }
}

enum Sign {
    NonNegative,
    Negative,
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<Vec<i64>> for IndexTuple {
    fn from(v: Vec<i64>) -> Self {
        IndexTuple(v)
    }
}

/// Successor infix property: between any two equal indices there is an
/// index one larger. Mixed-sign tuples are rejected.
pub fn satisfies_sip(t: &IndexTuple) -> Result<bool> {
    t.sign_class()?;
    Ok(sip_unchecked(&t.0))
}

fn sip_unchecked(t: &[i64]) -> bool {
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            if t[a] == t[b] {
                if !t[a + 1..b].contains(&(t[a] + 1)) {
                    return false;
                }
                break;
            }
        }
    }
    true
}

/// A tuple in column standard form: strings `(a_s:b_s, ..., a_1:b_1)` with
/// `b_s > ... > b_1`. Stored left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Csf {
    pub strings: Vec<(i64, i64)>,
}

impl Csf {
    pub fn to_tuple(&self) -> IndexTuple {
        IndexTuple(self.strings.iter().flat_map(|&(a, b)| a..=b).collect())
    }

    pub fn heads(&self) -> BTreeSet<i64> {
        self.strings.iter().map(|&(_, b)| b).collect()
    }

    /// Splits a tuple into maximal ascending runs and checks the run ends
    /// decrease. The split is forced: a run that stopped early would be
    /// followed by a larger head.
    pub fn from_tuple(t: &[i64]) -> Option<Csf> {
        let mut strings: Vec<(i64, i64)> = Vec::new();
        for &x in t {
            match strings.last_mut() {
                Some(last) if x == last.1 + 1 => last.1 = x,
                _ => strings.push((x, x)),
            }
        }
        strings.windows(2).all(|w| w[0].1 > w[1].1).then_some(Csf { strings })
    }
}

impl fmt::Display for Csf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .strings
            .iter()
            .map(|&(a, b)| if a == b { a.to_string() } else { format!("{a}:{b}") })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Column standard form of a nonnegative SIP tuple.
///
/// Built greedily: at each step take, among the letters that can be moved
/// to the front (they commute with everything before them), the largest.
/// This yields the lexicographically largest representative of the
/// equivalence class, which is the one in column standard form.
pub fn csf(t: &IndexTuple) -> Result<Csf> {
    if !matches!(t.sign_class()?, Sign::NonNegative) {
        return Err(Error::Tuple(format!("csf needs nonnegative indices, got {t}")));
    }
    if !sip_unchecked(&t.0) {
        return Err(Error::Sip(t.to_string()));
    }
    let mut rest = t.0.clone();
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for p in 0..rest.len() {
            if rest[..p].iter().all(|&q| commute(q, rest[p])) && best.is_none_or(|b| rest[p] > rest[b]) {
                best = Some(p);
            }
        }
        let p = best.expect("the first letter is always movable");
        out.push(rest.remove(p));
    }
    Csf::from_tuple(&out).ok_or_else(|| Error::Tuple(format!("no column standard form found for {t}")))
}

pub fn heads(t: &IndexTuple) -> Result<BTreeSet<i64>> {
    Ok(csf(t)?.heads())
}

pub fn head_count(t: &IndexTuple) -> Result<usize> {
    Ok(csf(t)?.strings.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexType {
    TypeI,
    TypeII,
}

/// Type of `x` relative to `t`: Type I iff appending `x` keeps the number of
/// strings. Computed from head counts and checked against the `x-1 ∈ heads`
/// criterion; a disagreement is an error.
pub fn index_type(t: &IndexTuple, x: i64) -> Result<IndexType> {
    let mut tx = t.clone();
    tx.push(x);
    if !satisfies_sip(&tx)? {
        return Err(Error::Sip(tx.to_string()));
    }
    let base = csf(t)?;
    let by_count = if csf(&tx)?.strings.len() == base.strings.len() { IndexType::TypeI } else { IndexType::TypeII };
    let by_heads = if base.heads().contains(&(x - 1)) { IndexType::TypeI } else { IndexType::TypeII };
    if by_count != by_heads {
        return Err(Error::Tuple(format!("type criteria disagree for {t} + {x}")));
    }
    Ok(by_count)
}

/// Heads after appending `x` of the given type.
pub fn update_heads(h: &BTreeSet<i64>, x: i64, ty: IndexType) -> BTreeSet<i64> {
    let mut out = h.clone();
    if ty == IndexType::TypeI {
        out.remove(&(x - 1));
    }
    out.insert(x);
    out
}

/// `w_h = (h-1:h, h-3:h-2, ..., p+1:p+2, 0:p)` with `p = h mod 2`.
pub fn admissible_tuple(h: usize) -> IndexTuple {
    let h = h as i64;
    let p = h % 2;
    let mut out = Vec::new();
    let mut top = h;
    while top > p {
        out.extend([top - 1, top]);
        top -= 2;
    }
    out.extend(0..=p);
    IndexTuple(out)
}

/// `c_h`: `(h-1, h-3, ..., 2, 0)` for odd `h`, `(h-1, h-3, ..., 1)` for even
/// `h > 0`, empty for `h = 0`.
pub fn symmetric_complement(h: usize) -> IndexTuple {
    IndexTuple((0..h as i64).rev().step_by(2).collect())
}

/// Wing positions of the simple structure extended by `t_w`: the indices
/// `j ∈ 0..k-2` with `(T, j)` SIP, where `T = (t_w, w_{k-1}, c_{k-1}, rev t_w)`.
/// Computed both as `j ∉ heads(T)` and by the direct SIP test.
pub fn sip_append_positions(t_w: &IndexTuple, k: usize) -> Result<BTreeSet<i64>> {
    if k < 2 {
        return Err(Error::Grade(format!("need k >= 2, got {k}")));
    }
    let w = admissible_tuple(k - 1);
    let c = symmetric_complement(k - 1);
    let t = IndexTuple::concat(&[t_w, &w, &c, &t_w.rev()]);
    if !satisfies_sip(&t)? {
        return Err(Error::Sip(t.to_string()));
    }
    let hs = heads(&t)?;
    let by_heads: BTreeSet<i64> = (0..=k as i64 - 2).filter(|j| !hs.contains(j)).collect();
    let by_sip: BTreeSet<i64> = (0..=k as i64 - 2)
        .filter(|&j| {
            let mut tj = t.clone();
            tj.push(j);
            sip_unchecked(&tj.0)
        })
        .collect();
    if by_heads != by_sip {
        return Err(Error::Tuple(format!("append criteria disagree for {t}")));
    }
    Ok(by_heads)
}
