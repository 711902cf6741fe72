//! L^q norms of polynomial symbols on the polytorus.
//!
//! Two routes: a tensor-product uniform-angle rule with node doubling, and
//! Steinhaus Monte Carlo with a delta-method standard error.
//!
//! Before gridding, the integrand `|Σ c_κ z^κ|` is reduced to the smallest
//! torus it actually depends on. Multiplying by `z^{-κ₀}` does not change the
//! modulus, so only the differences `κ - κ₀` matter. A unimodular change of
//! angle variables brings the lattice they span to the first `r` coordinates,
//! and the Haar measure pushes forward to Haar measure on `T^r`. An `N`-point
//! uniform grid is mapped onto itself by such a change of variables, so the
//! reduced rule is the same rule as on the original torus, only cheaper.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::Symbol;

/// Largest torus dimension the grid rule will integrate over.
pub const GRID_MAX_DIM: usize = 4;
/// Default node budget (total over all axes) for one grid evaluation.
pub const GRID_MAX_TOTAL_NODES: u64 = 1 << 27;
/// Samples per Monte Carlo chunk; chunk `c` draws from stream `c` of the seed.
pub const MC_CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Grid,
    Mc,
}

/// A computed `‖f‖_q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    /// Zero for the grid rule.
    pub stderr: f64,
    pub method: Method,
    /// Nodes per axis for the grid rule, sample count for Monte Carlo.
    pub samples_or_nodes: u64,
    /// Dimension of the torus actually integrated over.
    pub dims: usize,
    pub seed: Option<u64>,
}

/// How to estimate a norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    Grid { tol: f64 },
    MonteCarlo { samples: u64, seed: u64 },
}

impl Integrator {
    pub fn norm(&self, f: &Symbol, q: f64) -> Result<NormEstimate> {
        match *self {
            Integrator::Grid { tol } => norm_grid(f, q, tol),
            Integrator::MonteCarlo { samples, seed } => norm_mc(f, q, samples, seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    pub tol: f64,
    pub max_dim: usize,
    pub max_total_nodes: u64,
}

impl GridOptions {
    pub fn with_tol(tol: f64) -> Self {
        GridOptions { tol, max_dim: GRID_MAX_DIM, max_total_nodes: GRID_MAX_TOTAL_NODES }
    }
}

/// Integrand `|Σ c_i e^{i e_i·ψ}|` on `T^dims` with integer frequency vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedIntegrand {
    coeffs: Vec<Complex64>,
    freqs: Vec<Vec<i64>>,
    dims: usize,
}

impl ReducedIntegrand {
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn frequencies(&self) -> &[Vec<i64>] {
        &self.freqs
    }

    /// Largest per-axis spread of frequencies.
    fn spread(&self) -> i64 {
        (0..self.dims)
            .map(|j| {
                let (lo, hi) = self
                    .freqs
                    .iter()
                    .fold((i64::MAX, i64::MIN), |(lo, hi), e| (lo.min(e[j]), hi.max(e[j])));
                hi - lo
            })
            .max()
            .unwrap_or(0)
    }

    /// Mean of `|f|^q` over the `nodes^dims` uniform grid.
    pub fn grid_mean(&self, q: f64, nodes: usize) -> f64 {
        if self.dims == 0 {
            let v: Complex64 = self.coeffs.iter().sum();
            return pow_abs(v, q);
        }
        let n = nodes as i64;
        let table: Vec<Complex64> =
            (0..nodes).map(|t| Complex64::from_polar(1.0, TAU * t as f64 / nodes as f64)).collect();
        let base: Vec<Vec<i64>> =
            self.freqs.iter().map(|e| e.iter().map(|x| x.rem_euclid(n)).collect()).collect();
        let rows: Vec<f64> = (0..nodes)
            .into_par_iter()
            .map(|k0| {
                let mut idx: Vec<i64> = base.iter().map(|e| (e[0] * k0 as i64) % n).collect();
                let mut counter = vec![0usize; self.dims];
                let mut sum = 0.0;
                loop {
                    let v: Complex64 = self
                        .coeffs
                        .iter()
                        .zip(&idx)
                        .map(|(c, &t)| c * table[t as usize])
                        .sum();
                    sum += pow_abs(v, q);
                    // odometer over axes 1..dims
                    let mut axis = 1;
                    loop {
                        if axis == self.dims {
                            return sum;
                        }
                        counter[axis] += 1;
                        for (t, e) in idx.iter_mut().zip(&base) {
                            *t = (*t + e[axis]) % n;
                        }
                        if counter[axis] < nodes {
                            break;
                        }
                        counter[axis] = 0;
                        // the increments above wrapped this axis back to 0
                        axis += 1;
                    }
                }
            })
            .collect();
        let total: f64 = rows.iter().sum();
        total / (nodes as f64).powi(self.dims as i32)
    }
}

fn pow_abs(v: Complex64, q: f64) -> f64 {
    if q == 1.0 {
        v.norm()
    } else if q == 2.0 {
        v.norm_sqr()
    } else {
        v.norm_sqr().powf(q / 2.0)
    }
}

/// Reduce `|f|` to a function on the smallest torus it depends on.
pub fn reduce(f: &Symbol) -> ReducedIntegrand {
    let active = f.active_variables();
    let coeffs: Vec<Complex64> = f.terms().map(|(_, c)| *c).collect();
    let exps: Vec<Vec<i64>> = f
        .terms()
        .map(|(k, _)| active.iter().map(|&j| i64::from(k.get(j))).collect())
        .collect();
    let n = active.len();
    if coeffs.len() <= 1 {
        return ReducedIntegrand { coeffs, freqs: vec![Vec::new(); exps.len()], dims: 0 };
    }
    let mut d: Vec<Vec<i64>> = exps
        .iter()
        .map(|e| e.iter().zip(&exps[0]).map(|(a, b)| a - b).collect())
        .collect();
    // unimodular column operations to lower echelon form
    let mut pivot = 0;
    for row in 1..d.len() {
        if pivot == n {
            break;
        }
        loop {
            let best = (pivot..n)
                .filter(|&j| d[row][j] != 0)
                .min_by_key(|&j| d[row][j].abs());
            let Some(best) = best else { break };
            if best != pivot {
                for r in d.iter_mut() {
                    r.swap(best, pivot);
                }
            }
            let mut done = true;
            for j in pivot + 1..n {
                if d[row][j] != 0 {
                    let factor = d[row][j] / d[row][pivot];
                    for r in d.iter_mut() {
                        r[j] -= factor * r[pivot];
                    }
                    if d[row][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                pivot += 1;
                break;
            }
        }
    }
    let freqs = d.into_iter().map(|mut r| {
        r.truncate(pivot);
        r
    });
    ReducedIntegrand { coeffs, freqs: freqs.collect(), dims: pivot }
}

/// Adaptive grid rule with the default limits.
pub fn norm_grid(f: &Symbol, q: f64, tol: f64) -> Result<NormEstimate> {
    norm_grid_with(f, q, &GridOptions::with_tol(tol))
}

pub fn norm_grid_with(f: &Symbol, q: f64, opts: &GridOptions) -> Result<NormEstimate> {
    check_q(q)?;
    let red = reduce(f);
    if red.dims > opts.max_dim {
        return Err(Error::WidthTooLarge { dim: red.dims, limit: opts.max_dim });
    }
    let budget = |nodes: usize| (nodes as f64).powi(red.dims as i32) <= opts.max_total_nodes as f64;
    let start = ((q.ceil() as i64) * red.spread() + 1).max(8) as usize;
    let mut nodes = start.next_power_of_two();
    if !budget(nodes) {
        return Err(Error::NoConvergence { nodes, change: f64::INFINITY });
    }
    let mut prev = red.grid_mean(q, nodes).powf(1.0 / q);
    if red.dims == 0 {
        return Ok(grid_estimate(prev, 1, 0));
    }
    let mut change = f64::INFINITY;
    loop {
        let next = nodes * 2;
        if !budget(next) {
            return Err(Error::NoConvergence { nodes, change });
        }
        let cur = red.grid_mean(q, next).powf(1.0 / q);
        change = if cur == 0.0 { (cur - prev).abs() } else { (cur - prev).abs() / cur };
        nodes = next;
        if change <= opts.tol {
            return Ok(grid_estimate(cur, nodes, red.dims));
        }
        prev = cur;
    }
}

/// The grid rule at a fixed number of nodes per axis.
pub fn norm_grid_at(f: &Symbol, q: f64, nodes: usize) -> Result<NormEstimate> {
    check_q(q)?;
    if nodes == 0 {
        return Err(Error::InvalidArgument("grid needs at least one node".into()));
    }
    let red = reduce(f);
    if red.dims > GRID_MAX_DIM {
        return Err(Error::WidthTooLarge { dim: red.dims, limit: GRID_MAX_DIM });
    }
    let value = red.grid_mean(q, nodes).powf(1.0 / q);
    Ok(grid_estimate(value, nodes, red.dims))
}

fn grid_estimate(value: f64, nodes: usize, dims: usize) -> NormEstimate {
    NormEstimate { value, stderr: 0.0, method: Method::Grid, samples_or_nodes: nodes as u64, dims, seed: None }
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidArgument(format!("norm exponent q = {q} must be a finite value >= 1")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Moments { count, mean, m2 }
    }
}

/// Steinhaus Monte Carlo estimate of `‖f‖_q` from `samples` points.
///
/// Chunk `c` of [`MC_CHUNK`] samples draws from ChaCha8 stream `c` seeded with
/// `seed`, and chunk moments are merged in chunk order, so the result does not
/// depend on the thread count.
pub fn norm_mc(f: &Symbol, q: f64, samples: u64, seed: u64) -> Result<NormEstimate> {
    check_q(q)?;
    if samples < 2 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least 2 samples".into()));
    }
    let active = f.active_variables();
    let terms: Vec<(Complex64, Vec<(usize, u32)>)> = f
        .terms()
        .map(|(k, c)| {
            let powers = active
                .iter()
                .enumerate()
                .filter(|(_, &j)| k.get(j) > 0)
                .map(|(pos, &j)| (pos, k.get(j)))
                .collect();
            (*c, powers)
        })
        .collect();
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let len = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut z = vec![Complex64::new(1.0, 0.0); active.len()];
            let mut m = Moments::default();
            for _ in 0..len {
                for zj in z.iter_mut() {
                    *zj = Complex64::from_polar(1.0, TAU * rng.random::<f64>());
                }
                let v: Complex64 = terms
                    .iter()
                    .map(|(c, pw)| pw.iter().fold(*c, |acc, &(pos, e)| acc * z[pos].powu(e)))
                    .sum();
                m.push(pow_abs(v, q));
            }
            m
        })
        .collect();
    let m = parts.into_iter().fold(Moments::default(), Moments::merge);
    let mean = m.mean.max(0.0);
    let var = m.m2 / (m.count - 1) as f64;
    let se_mean = (var / m.count as f64).sqrt();
    let value = mean.powf(1.0 / q);
    let stderr = if mean > 0.0 { value / (q * mean) * se_mean } else { 0.0 };
    Ok(NormEstimate {
        value,
        stderr,
        method: Method::Mc,
        samples_or_nodes: samples,
        dims: active.len(),
        seed: Some(seed),
    })
}
