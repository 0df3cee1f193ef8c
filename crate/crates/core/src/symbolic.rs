//! Symbolic reading and writing of block pencils in terms of the
//! coefficients of a matrix polynomial: blocks such as `λA3+A2`, `-I`,
//! `λI`, `0`, `-A5`, `A4^-1`.

use crate::blockpencil::BlockPencil;
use crate::error::{Error, Result};
use crate::matpoly::MatrixPolynomial;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Name of a constant `n×n` block: `0`, `I`, `-I`, `3I`, `A2`, `-A2`, or `*`.
pub fn name_constant<T: Scalar>(m: &Matrix<T>, p: Option<&MatrixPolynomial<T>>) -> String {
    if m.is_zero() {
        return "0".into();
    }
    if let Some(a) = m.as_scalar_identity() {
        if a.sub_ref(&T::one()).is_negligible() {
            return "I".into();
        }
        if a.add_ref(&T::one()).is_negligible() {
            return "-I".into();
        }
    }
    if let Some(p) = p {
        for (i, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if m.approx_eq(c) {
                return format!("A{i}");
            }
            if m.approx_eq(&c.neg()) {
                return format!("-A{i}");
            }
        }
    }
    if let Some(a) = m.as_scalar_identity() {
        return format!("({a:?})I");
    }
    "*".into()
}

/// Name of the block `λX + Y`.
pub fn name_block<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>, p: Option<&MatrixPolynomial<T>>) -> String {
    let xs = name_constant(x, p);
    let ys = name_constant(y, p);
    let lam = match xs.as_str() {
        "0" => None,
        s => Some(match s.strip_prefix('-') {
            Some(rest) => format!("-λ{rest}"),
            None => format!("λ{s}"),
        }),
    };
    match (lam, ys.as_str()) {
        (None, y) => y.to_string(),
        (Some(l), "0") => l,
        (Some(l), y) if y.starts_with('-') => format!("{l}{y}"),
        (Some(l), y) => format!("{l}+{y}"),
    }
}

/// The whole grid as symbolic names, row by row.
pub fn symbolic_grid<T: Scalar>(l: &BlockPencil<T>, p: Option<&MatrixPolynomial<T>>) -> Vec<Vec<String>> {
    (0..l.rows())
        .map(|i| {
            (0..l.cols())
                .map(|j| {
                    let (x, y) = l.block(i, j);
                    name_block(&x, &y, p)
                })
                .collect()
        })
        .collect()
}

/// Column-aligned text rendering of [`symbolic_grid`].
pub fn render<T: Scalar>(l: &BlockPencil<T>, p: Option<&MatrixPolynomial<T>>) -> String {
    let g = symbolic_grid(l, p);
    let width = g.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1);
    let mut out = String::new();
    for row in &g {
        let cells: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
        out.push_str("[ ");
        out.push_str(&cells.join("  "));
        out.push_str(" ]\n");
    }
    out
}

fn parse_atom<T: Scalar>(atom: &str, p: &MatrixPolynomial<T>) -> Result<Matrix<T>> {
    let n = p.n();
    let bad = || Error::Parse(format!("unknown block atom `{atom}`"));
    if atom == "0" {
        return Ok(Matrix::zeros(n, n));
    }
    if atom == "I" {
        return Ok(Matrix::identity(n));
    }
    let rest = atom.strip_prefix('A').ok_or_else(bad)?;
    let (idx, inv) = match rest.strip_suffix("^-1") {
        Some(r) => (r, true),
        None => (rest, false),
    };
    let i: usize = idx.trim_start_matches('_').parse().map_err(|_| bad())?;
    if i > p.grade() {
        return Err(Error::Index(format!("A{i} with grade {}", p.grade())));
    }
    let m = p.coeff(i).clone();
    if inv {
        m.inverse()
    } else {
        Ok(m)
    }
}

/// Parses a block such as `λA3+A2`, `-λA1+A0`, `-I`, `lI`, `A4^-1`.
/// `l` may stand for `λ`.
pub fn parse_block<T: Scalar>(s: &str, p: &MatrixPolynomial<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    let n = p.n();
    let mut x = Matrix::zeros(n, n);
    let mut y = Matrix::zeros(n, n);
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().replace('λ', "l");
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for (i, ch) in s.char_indices() {
        let after_caret = s[..i].ends_with('^');
        if (ch == '+' || ch == '-') && !after_caret {
            if !cur.is_empty() {
                terms.push((neg, std::mem::take(&mut cur)));
            }
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        terms.push((neg, cur));
    }
    if terms.is_empty() {
        return Err(Error::Parse(format!("empty block `{s}`")));
    }
    for (neg, t) in terms {
        let (is_lambda, atom) = match t.strip_prefix('l') {
            Some(a) => (true, a.to_string()),
            None => (false, t.clone()),
        };
        let mut m = parse_atom(&atom, p)?;
        if neg {
            m = m.neg();
        }
        if is_lambda {
            x = x.add(&m);
        } else {
            y = y.add(&m);
        }
    }
    Ok((x, y))
}

/// Builds a square pencil from a grid of symbolic block strings.
pub fn parse_grid<T: Scalar>(rows: &[&[&str]], p: &MatrixPolynomial<T>) -> Result<BlockPencil<T>> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    let mut l = BlockPencil::zeros(p.n(), r, c);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != c {
            return Err(Error::Dimension("ragged symbolic grid".into()));
        }
        for (j, s) in row.iter().enumerate() {
            let (x, y) = parse_block(s, p)?;
            l.set_block(i, j, &x, &y);
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn p() -> MatrixPolynomial<Rational> {
        MatrixPolynomial::new((0..4).map(|i| Matrix::from_i64(2, 2, &[i + 2, 1, 0, 2 * i + 3])).collect()).unwrap()
    }

    #[test]
    fn round_trip_names() {
        let p = p();
        for s in ["λA3+A2", "-λA1+A0", "-I", "λI", "0", "-A2", "λA0", "A1"] {
            let (x, y) = parse_block(s, &p).unwrap();
            assert_eq!(name_block(&x, &y, Some(&p)), s);
        }
        let (x, y) = parse_block("lA3 - A2", &p).unwrap();
        assert_eq!(name_block(&x, &y, Some(&p)), "λA3-A2");
    }

    #[test]
    fn non_ascii_input_is_an_error() {
        let p = p();
        assert!(parse_block("µA1-A2", &p).is_err());
        assert!(parse_block("A1−A2", &p).is_err());
    }

    #[test]
    fn inverse_atom() {
        let p = p();
        let (_, y) = parse_block("-A3^-1", &p).unwrap();
        assert_eq!(y.mul(p.coeff(3)), Matrix::identity(2).neg());
    }
}
