//! Dense complex matrices, singular values and Schatten norms.
//!
//! Singular values come from a one-sided (Hestenes) Jacobi iteration on the
//! columns of the matrix itself. Working on `M` rather than `M M*` keeps
//! zero singular values at roundoff level instead of at its square root.
//! Nothing here knows about Hankel structure.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative threshold below which a singular value counts as zero.
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-12;

const MAX_SWEEPS: usize = 80;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Ok(DenseMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = DenseMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `aᵀ M b` (no conjugation).
    pub fn bilinear(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        assert_eq!(a.len(), self.rows);
        assert_eq!(b.len(), self.cols);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, ai) in a.iter().enumerate() {
            if ai.norm_sqr() == 0.0 {
                continue;
            }
            let row: Complex64 = self.row(i).iter().zip(b).map(|(m, bj)| m * bj).sum();
            acc += ai * row;
        }
        acc
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols)
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Nonincreasing singular values with the threshold used to decide rank.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
    zero_threshold: f64,
}

impl SingularSpectrum {
    /// Sorts `values` in nonincreasing order. Negative or non-finite input is rejected.
    pub fn new(mut values: Vec<f64>, zero_threshold: f64) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NonFinite);
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(SingularSpectrum { values, zero_threshold })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn zero_threshold(&self) -> f64 {
        self.zero_threshold
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn rank(&self) -> usize {
        let cut = self.zero_threshold * self.max().max(1.0);
        self.values.iter().filter(|&&v| v > cut).count()
    }

    /// Schatten p-(quasi)norm; `p = f64::INFINITY` gives the operator norm.
    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        schatten_norm(&self.values, p)
    }
}

/// ℓ^p (quasi)norm of a list of nonnegative values, `p ∈ (0, ∞]`.
pub fn schatten_norm(values: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidExponent(p));
    }
    let top = values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if p == f64::INFINITY || top == 0.0 {
        return Ok(top);
    }
    // factor out the maximum so large p cannot overflow
    let s: f64 = values.iter().map(|&v| (v.abs() / top).powf(p)).sum();
    Ok(top * s.powf(1.0 / p))
}

/// All `min(rows, cols)` singular values, using [`DEFAULT_ZERO_THRESHOLD`].
pub fn singular_values(m: &DenseMatrix) -> Result<SingularSpectrum> {
    singular_values_with_threshold(m, DEFAULT_ZERO_THRESHOLD)
}

pub fn singular_values_with_threshold(m: &DenseMatrix, zero_threshold: f64) -> Result<SingularSpectrum> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    // Orthogonalize the columns of the wider dimension's transpose so there
    // are at most min(rows, cols) columns.
    let work = if m.cols <= m.rows { m.clone() } else { m.transpose() };
    let mut cols: Vec<Vec<Complex64>> = (0..work.cols)
        .map(|j| (0..work.rows).map(|i| work.get(i, j)).collect())
        .collect();
    jacobi_orthogonalize(&mut cols)?;
    let values = cols.iter().map(|c| norm(c)).collect();
    SingularSpectrum::new(values, zero_threshold)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn jacobi_orthogonalize(cols: &mut [Vec<Complex64>]) -> Result<()> {
    let n = cols.len();
    let eps = f64::EPSILON;
    let mut sq: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect();
    // columns this small only carry roundoff and are left alone
    let negligible = (eps * eps) * sq.iter().sum::<f64>();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta) = (sq[p], sq[q]);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma: Complex64 =
                    cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                    let bq = *b * phase;
                    let ap = *a;
                    *a = ap * c - bq * s;
                    *b = ap * s + bq * c;
                }
                sq[p] = cp.iter().map(|z| z.norm_sqr()).sum();
                sq[q] = cq.iter().map(|z| z.norm_sqr()).sum();
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::SvdNoConvergence(MAX_SWEEPS))
}
