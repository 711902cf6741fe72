//! Sparse polynomial symbols on the polytorus.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bohr_lift::{shift_multiindex, MultiIndex};

/// Coefficients with modulus below this are dropped after arithmetic.
pub const PRUNE_TOL: f64 = 1e-15;

/// Polynomial `Σ c_κ z^κ` with finitely many nonzero coefficients.
///
/// Terms are kept in graded lexicographic order of their multi-indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Symbol {
    terms: BTreeMap<MultiIndex, Complex64>,
}

/// Serialized form of one term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exponents: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

impl Symbol {
    pub fn zero() -> Self {
        Symbol::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Symbol::monomial(MultiIndex::one(), c)
    }

    pub fn monomial(kappa: MultiIndex, c: Complex64) -> Self {
        Symbol::from_terms([(kappa, c)])
    }

    /// Sums duplicate keys and drops exact zeros.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            *map.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c: &mut Complex64| c.norm() != 0.0);
        Symbol { terms: map }
    }

    /// `Σ c_j z_{j+1}`; zero entries are dropped.
    pub fn linear(coeffs: &[Complex64]) -> Self {
        Symbol::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| (MultiIndex::unit(j), c)),
        )
    }

    /// `(z_1 + ... + z_d) / √d`.
    pub fn normalized_linear(d: usize) -> Self {
        assert!(d >= 1, "normalized_linear needs at least one variable");
        let c = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        Symbol::linear(&vec![c; d])
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, kappa: &MultiIndex) -> Complex64 {
        self.terms.get(kappa).copied().unwrap_or_default()
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> {
        self.terms.keys()
    }

    /// Largest variable index in use (1-based), 0 for constants.
    pub fn width(&self) -> usize {
        self.terms.keys().map(MultiIndex::width).max().unwrap_or(0)
    }

    pub fn degree(&self) -> u64 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// 0-based indices of the variables that occur with a nonzero exponent.
    pub fn active_variables(&self) -> Vec<usize> {
        let mut used = vec![false; self.width()];
        for k in self.terms.keys() {
            for (j, &e) in k.exponents().iter().enumerate() {
                if e > 0 {
                    used[j] = true;
                }
            }
        }
        used.iter().enumerate().filter(|(_, &u)| u).map(|(j, _)| j).collect()
    }

    /// Coefficient ℓ² norm, which is also the L² norm on the torus.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Symbol {
        let mut out = Symbol::from_terms(self.terms.iter().map(|(k, c)| (k.clone(), c * s)));
        out.prune();
        out
    }

    pub fn add(&self, other: &Symbol) -> Symbol {
        let mut out = Symbol::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(k, c)| (k.clone(), *c)),
        );
        out.prune();
        out
    }

    /// Coefficient convolution.
    pub fn multiply(&self, other: &Symbol) -> Symbol {
        let mut map: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                *map.entry(ka.add(kb)).or_default() += ca * cb;
            }
        }
        let mut out = Symbol { terms: map };
        out.prune();
        out
    }

    /// `z_j -> z_{j+k}` for every variable.
    pub fn shift(&self, k: usize) -> Symbol {
        Symbol {
            terms: self
                .terms
                .iter()
                .map(|(kappa, c)| (shift_multiindex(kappa, k), *c))
                .collect(),
        }
    }

    /// `⟨self, phi⟩ = Σ self_κ · conj(phi_κ)`.
    pub fn inner(&self, phi: &Symbol) -> Complex64 {
        let (small, large, flip) = if self.len() <= phi.len() {
            (self, phi, false)
        } else {
            (phi, self, true)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &small.terms {
            if let Some(d) = large.terms.get(k) {
                acc += if flip { d * c.conj() } else { c * d.conj() };
            }
        }
        acc
    }

    /// Value at a point; `z[j]` is variable `j + 1`, missing coordinates count as 1.
    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        self.terms
            .iter()
            .map(|(k, c)| {
                k.exponents()
                    .iter()
                    .enumerate()
                    .fold(*c, |acc, (j, &e)| acc * z.get(j).copied().unwrap_or(one).powu(e))
            })
            .sum()
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(k, c)| TermRecord { exponents: k.exponents().to_vec(), re: c.re, im: c.im })
            .collect()
    }

    pub fn from_records(records: &[TermRecord]) -> Symbol {
        Symbol::from_terms(
            records
                .iter()
                .map(|r| (MultiIndex::new(r.exponents.clone()), Complex64::new(r.re, r.im))),
        )
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
    }
}

impl Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_records().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(d)?;
        Ok(Symbol::from_records(&records))
    }
}
