//! Prime tables and the integer ↔ multi-index correspondence.
//!
//! A positive integer `n = p_1^k_1 p_2^k_2 ...` is identified with the exponent
//! vector `(k_1, k_2, ...)`, which in turn names the monomial `z_1^k_1 z_2^k_2 ...`
//! on the polytorus. Multi-indices are the canonical keys; integer labels are
//! derived on demand and can overflow.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of primes the sieve may produce.
pub const DEFAULT_PRIME_LIMIT: usize = 1 << 17;

/// Finite exponent vector with trailing zeros trimmed.
///
/// The empty vector is the constant monomial (label 1). Ordering is graded
/// lexicographic: total degree first, then the index with the larger
/// exponent in the earliest variable comes first, so labels sort as
/// `1, 2, 3, 5, ..., 4, 6, 9, ...`.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<u32>", into = "Vec<u32>")]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(mut exponents: Vec<u32>) -> Self {
        while exponents.last() == Some(&0) {
            exponents.pop();
        }
        MultiIndex(exponents)
    }

    pub fn one() -> Self {
        MultiIndex(Vec::new())
    }

    /// The unit vector `e_j` for the 0-based variable `j`.
    pub fn unit(j: usize) -> Self {
        let mut v = vec![0; j + 1];
        v[j] = 1;
        MultiIndex(v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0.get(j).copied().unwrap_or(0)
    }

    /// Number of variables up to the last one with a nonzero exponent.
    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        let (long, short) = if self.0.len() >= other.0.len() {
            (&self.0, &other.0)
        } else {
            (&other.0, &self.0)
        };
        let mut out = long.clone();
        for (o, s) in out.iter_mut().zip(short) {
            *o += s;
        }
        MultiIndex(out)
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut out = self.0.clone();
        for (o, s) in out.iter_mut().zip(&other.0) {
            *o = o.checked_sub(*s)?;
        }
        Some(MultiIndex::new(out))
    }

    /// Componentwise `self <= other` (divisibility of the labels).
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Every multi-index dominated componentwise by `self`, including `()` and `self`.
    pub fn divisors(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::<u32>::new()];
        for &e in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for prefix in &out {
                for k in 0..=e {
                    let mut v = prefix.clone();
                    v.push(k);
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(MultiIndex::new).collect()
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex::new(v)
    }
}

impl From<MultiIndex> for Vec<u32> {
    fn from(m: MultiIndex) -> Self {
        m.0
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for j in 0..n {
                match other.get(j).cmp(&self.get(j)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The first `k` primes in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Sieve the first `k` primes, refusing requests above [`DEFAULT_PRIME_LIMIT`].
    pub fn first(k: usize) -> Result<Self> {
        Self::first_with_limit(k, DEFAULT_PRIME_LIMIT)
    }

    pub fn first_with_limit(k: usize, limit: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("prime count must be positive".into()));
        }
        if k > limit {
            return Err(Error::SieveLimit { requested: k, limit });
        }
        // p_k < k (ln k + ln ln k) for k >= 6
        let kf = k as f64;
        let bound = if k < 6 {
            15
        } else {
            (kf * (kf.ln() + kf.ln().ln())).ceil() as usize + 1
        };
        let mut composite = vec![false; bound + 1];
        let mut primes = Vec::with_capacity(k);
        for i in 2..=bound {
            if composite[i] {
                continue;
            }
            primes.push(i as u64);
            if primes.len() == k {
                break;
            }
            let mut j = i * i;
            while j <= bound {
                composite[j] = true;
                j += i;
            }
        }
        debug_assert_eq!(primes.len(), k);
        Ok(PrimeTable { primes })
    }

    /// Shared table of [`DEFAULT_PRIME_LIMIT`] primes.
    pub fn global() -> &'static PrimeTable {
        static TABLE: OnceLock<PrimeTable> = OnceLock::new();
        TABLE.get_or_init(|| PrimeTable::first(DEFAULT_PRIME_LIMIT).expect("default limit"))
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// The `j`-th prime, 0-based (`prime(0) == 2`).
    pub fn prime(&self, j: usize) -> Option<u64> {
        self.primes.get(j).copied()
    }

    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok()
    }

    pub fn factorize(&self, mut n: u64) -> Result<MultiIndex> {
        if n == 0 {
            return Err(Error::ZeroLabel);
        }
        let original = n;
        let mut exps = Vec::new();
        for (j, &p) in self.primes.iter().enumerate() {
            if n == 1 {
                break;
            }
            if p.saturating_mul(p) > n {
                // remaining cofactor is prime
                let idx = self.index_of(n).ok_or(Error::PrimeOutOfRange(original))?;
                exps.resize(idx + 1, 0);
                exps[idx] += 1;
                n = 1;
                break;
            }
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                exps.resize(j + 1, 0);
                exps[j] = e;
            }
        }
        if n != 1 {
            return Err(Error::PrimeOutOfRange(original));
        }
        Ok(MultiIndex::new(exps))
    }

    pub fn label(&self, kappa: &MultiIndex) -> Result<u64> {
        let mut n: u64 = 1;
        for (j, &e) in kappa.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let p = self.prime(j).ok_or(Error::OverflowLabel)?;
            for _ in 0..e {
                n = n.checked_mul(p).ok_or(Error::OverflowLabel)?;
            }
        }
        Ok(n)
    }
}

pub fn nth_primes(k: usize) -> Result<PrimeTable> {
    PrimeTable::first(k)
}

/// Exponent vector of `n` under the Bohr correspondence.
pub fn factorize(n: u64) -> Result<MultiIndex> {
    PrimeTable::global().factorize(n)
}

/// Integer `Π p_j^κ_j`, or [`Error::OverflowLabel`] if it does not fit in `u64`.
pub fn label(kappa: &MultiIndex) -> Result<u64> {
    PrimeTable::global().label(kappa)
}

/// Move every variable up by `k` (`z_j -> z_{j+k}`).
pub fn shift_multiindex(kappa: &MultiIndex, k: usize) -> MultiIndex {
    if kappa.is_one() {
        return MultiIndex::one();
    }
    let mut v = vec![0; k];
    v.extend_from_slice(kappa.exponents());
    MultiIndex(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eratosthenes(limit: usize) -> Vec<u64> {
        (2..=limit as u64)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect()
    }

    #[test]
    fn small_prime_tables() {
        assert_eq!(nth_primes(1).unwrap().primes(), &[2]);
        assert_eq!(nth_primes(5).unwrap().primes(), &[2, 3, 5, 7, 11]);
        let oracle = eratosthenes(100);
        assert_eq!(oracle.len(), 25);
        let t = nth_primes(25).unwrap();
        assert_eq!(t.primes(), oracle.as_slice());
        assert_eq!(*t.primes().last().unwrap(), 97);
    }

    #[test]
    fn sieve_limit_is_enforced() {
        assert_eq!(
            PrimeTable::first_with_limit(11, 10),
            Err(Error::SieveLimit { requested: 11, limit: 10 })
        );
        assert!(nth_primes(0).is_err());
        let g = PrimeTable::global();
        assert_eq!(g.len(), DEFAULT_PRIME_LIMIT);
        assert_eq!(g.prime(63), Some(311));
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(1).unwrap(), MultiIndex::one());
        assert_eq!(factorize(12).unwrap().exponents(), &[2, 1]);
        assert_eq!(factorize(9).unwrap().exponents(), &[0, 2]);
        assert_eq!(factorize(0), Err(Error::ZeroLabel));
        // large prime cofactor inside the table
        assert_eq!(factorize(2 * 1_742_537).unwrap().width(), DEFAULT_PRIME_LIMIT);
        // prime beyond the table
        assert_eq!(factorize(1_742_539), Err(Error::PrimeOutOfRange(1_742_539)));
    }

    #[test]
    fn label_examples() {
        assert_eq!(label(&MultiIndex::one()).unwrap(), 1);
        assert_eq!(label(&MultiIndex::new(vec![2, 1])).unwrap(), 12);
        let primorial16: u128 = eratosthenes(60).iter().take(16).map(|&p| p as u128).product();
        assert_eq!(primorial16, 32_589_158_477_190_044_730);
        let k = MultiIndex::new(vec![1; 16]);
        // the big-integer oracle says the product does not fit in u64
        assert!(primorial16 > u64::MAX as u128);
        assert_eq!(label(&k), Err(Error::OverflowLabel));
        let primorial15: u128 = eratosthenes(60).iter().take(15).map(|&p| p as u128).product();
        assert_eq!(label(&MultiIndex::new(vec![1; 15])).unwrap() as u128, primorial15);
        assert_eq!(label(&MultiIndex::new(vec![64])), Err(Error::OverflowLabel));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_multiindex(&MultiIndex::new(vec![1]), 2).exponents(), &[0, 0, 1]);
        assert_eq!(shift_multiindex(&MultiIndex::one(), 5), MultiIndex::one());
        let s = shift_multiindex(&MultiIndex::new(vec![1, 1]), 2);
        assert_eq!(label(&s).unwrap(), 35);
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        assert_eq!(MultiIndex::new(vec![1, 0, 0]), MultiIndex::new(vec![1]));
        assert_eq!(MultiIndex::new(vec![0, 0]), MultiIndex::one());
        let back: MultiIndex = serde_json::from_str("[0,3,0]").unwrap();
        assert_eq!(back.exponents(), &[0, 3]);
    }

    #[test]
    fn graded_order_on_labels() {
        let mut ks: Vec<MultiIndex> = [1u64, 2, 3, 4, 5, 6, 9, 7, 10]
            .iter()
            .map(|&n| factorize(n).unwrap())
            .collect();
        ks.sort();
        let labels: Vec<u64> = ks.iter().map(|k| label(k).unwrap()).collect();
        assert_eq!(labels, vec![1, 2, 3, 5, 7, 4, 6, 10, 9]);
    }

    #[test]
    fn divisors_of_twelve() {
        let mut ds: Vec<u64> = factorize(12)
            .unwrap()
            .divisors()
            .iter()
            .map(|k| label(k).unwrap())
            .collect();
        ds.sort();
        assert_eq!(ds, vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn round_trip_first_million() {
        let t = PrimeTable::global();
        for n in 1..=1_000_000u64 {
            assert_eq!(t.label(&t.factorize(n).unwrap()).unwrap(), n);
        }
    }

    proptest! {
        #[test]
        fn degree_additivity(m in 1u64..1000, n in 1u64..1000) {
            let lhs = factorize(m * n).unwrap();
            let rhs = factorize(m).unwrap().add(&factorize(n).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn shift_composition(e in proptest::collection::vec(0u32..4, 0..6), a in 0usize..5, b in 0usize..5) {
            let k = MultiIndex::new(e);
            prop_assert_eq!(
                shift_multiindex(&shift_multiindex(&k, a), b),
                shift_multiindex(&k, a + b)
            );
            prop_assert_eq!(shift_multiindex(&k, a).degree(), k.degree());
        }
    }
}
