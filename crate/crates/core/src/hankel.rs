//! Finite matrix realization of the multiplicative Hankel form of a polynomial symbol.
//!
//! The infinite matrix has entry `ρ_{mn}` at `(m, n)`. With the pairing
//! `H_φ(fg) = ⟨fg, φ⟩` this is the conjugated coefficient of the symbol at the
//! multi-index of `mn`, so `aᵀ M b` reproduces the form exactly. For a polynomial symbol every nonzero
//! entry has both `m` and `n` dividing some support label, so restricting to
//! the divisor closure of the support loses nothing.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::bohr_lift::MultiIndex;
use crate::error::{Error, Result};
use crate::spectra::DenseMatrix;
use crate::symbols::Symbol;

/// Default cap on the number of labels (matrix dimension).
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Symmetric matrix of a Hankel form over a divisor-closed label set.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelMatrix {
    labels: Vec<MultiIndex>,
    entries: DenseMatrix,
}

impl HankelMatrix {
    pub fn labels(&self) -> &[MultiIndex] {
        &self.labels
    }

    pub fn entries(&self) -> &DenseMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Coefficient vector of `f` on the label set, plus the largest modulus
    /// of a coefficient of `f` whose index is not a label.
    pub fn restrict(&self, f: &Symbol) -> (Vec<Complex64>, f64) {
        let index: HashMap<&MultiIndex, usize> =
            self.labels.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut v = vec![Complex64::new(0.0, 0.0); self.labels.len()];
        let mut outside = 0.0f64;
        for (k, c) in f.terms() {
            match index.get(k) {
                Some(&i) => v[i] = *c,
                None => outside = outside.max(c.norm()),
            }
        }
        (v, outside)
    }

    /// `aᵀ M b` for coefficient vectors of `f` and `g` restricted to the labels.
    pub fn apply_form(&self, f: &Symbol, g: &Symbol) -> Complex64 {
        let (a, _) = self.restrict(f);
        let (b, _) = self.restrict(g);
        self.entries.bilinear(&a, &b)
    }

    /// CSV with one row per line, entries written as `re+imi` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        matrix_to_csv(&self.entries)
    }
}

/// Divisor closure of `support`, sorted graded-lexicographically. Always contains `()`.
pub fn support_closure<'a, I>(support: I) -> Vec<MultiIndex>
where
    I: IntoIterator<Item = &'a MultiIndex>,
{
    closure_capped(support, usize::MAX).expect("uncapped closure")
}

fn closure_capped<'a, I>(support: I, cap: usize) -> Option<Vec<MultiIndex>>
where
    I: IntoIterator<Item = &'a MultiIndex>,
{
    let mut set = BTreeSet::new();
    set.insert(MultiIndex::one());
    for k in support {
        if set.contains(k) {
            continue;
        }
        for d in k.divisors() {
            set.insert(d);
        }
        if set.len() > cap {
            return None;
        }
    }
    Some(set.into_iter().collect())
}

pub fn build_matrix(phi: &Symbol) -> Result<HankelMatrix> {
    build_matrix_capped(phi, DEFAULT_MAX_DIM)
}

pub fn build_matrix_capped(phi: &Symbol, max_dim: usize) -> Result<HankelMatrix> {
    if phi.is_zero() {
        return Err(Error::ZeroSymbol);
    }
    let labels = closure_capped(phi.support(), max_dim)
        .ok_or(Error::MatrixTooLarge { dim: max_dim + 1, cap: max_dim })?;
    let entries = fill_entries(phi, &labels);
    Ok(HankelMatrix { labels, entries })
}

/// Hankel matrix of `phi` over an explicit label list. Labels must be distinct;
/// the result is exact only if the list contains the support closure.
pub fn build_matrix_on(phi: &Symbol, labels: Vec<MultiIndex>) -> HankelMatrix {
    let entries = fill_entries(phi, &labels);
    HankelMatrix { labels, entries }
}

fn fill_entries(phi: &Symbol, labels: &[MultiIndex]) -> DenseMatrix {
    let index: HashMap<&MultiIndex, usize> = labels.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let n = labels.len();
    let mut m = DenseMatrix::zeros(n, n);
    // each term κ lands on every (α, κ - α) with both in the label set
    for (kappa, c) in phi.terms() {
        for alpha in kappa.divisors() {
            let beta = kappa.checked_sub(&alpha).expect("divisor");
            if let (Some(&i), Some(&j)) = (index.get(&alpha), index.get(&beta)) {
                // 0.0 - im keeps a zero imaginary part positive
                m.set(i, j, Complex64::new(c.re, 0.0 - c.im));
            }
        }
    }
    m
}

/// `H_φ(fg) = ⟨fg, φ⟩`, computed without any matrix.
pub fn form_apply(phi: &Symbol, f: &Symbol, g: &Symbol) -> Complex64 {
    f.multiply(g).inner(phi)
}

/// Format one complex number as `re±imi`.
pub fn format_complex(z: Complex64) -> String {
    let im = if z.im.is_sign_negative() {
        format!("-{:.16e}", -z.im)
    } else {
        format!("+{:.16e}", z.im)
    };
    format!("{:.16e}{}i", z.re, im)
}

pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let body = s
        .strip_suffix('i')
        .ok_or_else(|| Error::Parse(format!("complex entry {s:?} lacks trailing 'i'")))?;
    // split at the last sign that is not part of an exponent or the leading sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(|| Error::Parse(format!("complex entry {s:?} lacks an imaginary part")))?;
    let re: f64 = body[..split].parse().map_err(|_| Error::Parse(format!("bad real part in {s:?}")))?;
    let im: f64 = body[split..].parse().map_err(|_| Error::Parse(format!("bad imaginary part in {s:?}")))?;
    Ok(Complex64::new(re, im))
}

pub fn matrix_to_csv(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for (j, z) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", format_complex(*z));
        }
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<DenseMatrix> {
    let rows = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(parse_complex).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    DenseMatrix::from_rows(rows)
}
