//! Derivative-free maximization of the ratio over pairs of linear symbols.
//!
//! `φ = Σ a_j z_j` and `f = Σ b_j z_j` are each parameterized by `2d - 1`
//! reals: a nonnegative real first coefficient followed by the real and
//! imaginary parts of the rest. The ratio is invariant under scaling either
//! symbol, so parameters are normalized to the unit sphere before evaluation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::Integrator;
use crate::nehari::{p_format, ratio};
use crate::symbols::Symbol;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub d: usize,
    pub p: f64,
    pub restarts: usize,
    /// Simplex iterations per restart.
    pub iters: usize,
    pub seed: u64,
    /// Relative tolerance of the grid rule used for every evaluation.
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    #[serde(with = "p_format")]
    pub p: f64,
    pub best_ratio: f64,
    pub evaluations: usize,
    pub seed: u64,
    pub restart: usize,
    pub tol: f64,
    /// Best ratio after each iteration of the winning restart.
    pub history: Vec<f64>,
}

impl SearchResult {
    /// Recompute the reported ratio from scratch.
    pub fn recompute(&self) -> Result<f64> {
        let r = ratio(
            &Symbol::linear(&self.b),
            &Symbol::linear(&self.a),
            self.p,
            &Integrator::Grid { tol: self.tol },
        )?;
        Ok(r.ratio)
    }
}

fn decode(x: &[f64], d: usize) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(d);
    v.push(Complex64::new(x[0].abs(), 0.0));
    for j in 1..d {
        v.push(Complex64::new(x[2 * j - 1], x[2 * j]));
    }
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
    v
}

fn encode(v: &[Complex64]) -> Vec<f64> {
    // rotate so the first coefficient is real and nonnegative
    let phase = if v[0].norm() > 0.0 { v[0].conj() / v[0].norm() } else { Complex64::new(1.0, 0.0) };
    let mut x = vec![(v[0] * phase).re];
    for z in &v[1..] {
        let w = z * phase;
        x.push(w.re);
        x.push(w.im);
    }
    x
}

struct Objective {
    d: usize,
    p: f64,
    tol: f64,
    evaluations: usize,
}

impl Objective {
    fn split<'a>(&self, x: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        x.split_at(2 * self.d - 1)
    }

    /// Ratio at `x`, or -∞ where a symbol vanishes or the quadrature fails.
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        let (xa, xb) = self.split(x);
        let phi = Symbol::linear(&decode(xa, self.d));
        let f = Symbol::linear(&decode(xb, self.d));
        if phi.is_zero() || f.is_zero() {
            return f64::NEG_INFINITY;
        }
        ratio(&f, &phi, self.p, &Integrator::Grid { tol: self.tol })
            .map(|r| r.ratio)
            .unwrap_or(f64::NEG_INFINITY)
    }
}

struct RestartOutcome {
    x: Vec<f64>,
    value: f64,
    evaluations: usize,
    history: Vec<f64>,
}

fn steinhaus_start(d: usize, seed: u64, restart: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let mut draw = || -> Vec<Complex64> {
        (0..d)
            .map(|_| Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>()))
            .collect()
    };
    let a = draw();
    let b = draw();
    let mut x = encode(&a);
    x.extend(encode(&b));
    x
}

/// Nelder–Mead on `-ratio`, tracking the best point seen.
fn nelder_mead(obj: &mut Objective, x0: Vec<f64>, iters: usize) -> RestartOutcome {
    let f0 = obj.eval(&x0);
    let mut best = (x0.clone(), f0);
    let mut history = Vec::with_capacity(iters);
    if iters == 0 {
        return RestartOutcome { x: best.0, value: best.1, evaluations: obj.evaluations, history };
    }
    let n = x0.len();
    // minimize g = -ratio
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.clone(), -f0)];
    for i in 0..n {
        let mut x = x0.clone();
        x[i] += if x[i].abs() > 0.05 { 0.25 * x[i].abs().max(0.2) } else { 0.25 };
        let g = -obj.eval(&x);
        simplex.push((x, g));
    }
    let note = |x: &[f64], g: f64, best: &mut (Vec<f64>, f64)| {
        if -g > best.1 {
            *best = (x.to_vec(), -g);
        }
    };
    for (x, g) in &simplex {
        note(x, *g, &mut best);
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread.is_finite() && spread.abs() < 1e-13 {
            history.push(best.1);
            break;
        }
        let centroid: Vec<f64> =
            (0..n).map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64, worst: &[f64]| -> Vec<f64> {
            centroid.iter().zip(worst).map(|(c, w)| c + t * (w - c)).collect()
        };
        let worst = simplex[n].0.clone();
        let xr = along(-alpha, &worst);
        let gr = -obj.eval(&xr);
        note(&xr, gr, &mut best);
        if gr < simplex[0].1 {
            let xe = along(-gamma, &worst);
            let ge = -obj.eval(&xe);
            note(&xe, ge, &mut best);
            simplex[n] = if ge < gr { (xe, ge) } else { (xr, gr) };
        } else if gr < simplex[n - 1].1 {
            simplex[n] = (xr, gr);
        } else {
            let (xc, gc) = if gr < simplex[n].1 {
                let xc = along(-rho, &worst);
                (xc.clone(), -obj.eval(&xc))
            } else {
                let xc = along(rho, &worst);
                (xc.clone(), -obj.eval(&xc))
            };
            note(&xc, gc, &mut best);
            if gc < simplex[n].1.min(gr) {
                simplex[n] = (xc, gc);
            } else {
                let x_best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let xs: Vec<f64> = x_best.iter().zip(&v.0).map(|(b, x)| b + sigma * (x - b)).collect();
                    let gs = -obj.eval(&xs);
                    note(&xs, gs, &mut best);
                    *v = (xs, gs);
                }
            }
        }
        history.push(best.1);
    }
    RestartOutcome { x: best.0, value: best.1, evaluations: obj.evaluations, history }
}

/// Best ratio over linear pairs in `d ≤ 3` variables found by restarted simplex search.
///
/// Restarts run concurrently; the winner is the highest ratio, ties going to
/// the lowest restart index.
pub fn maximize_ratio_linear(opts: &SearchOptions) -> Result<SearchResult> {
    if opts.d == 0 || opts.d > 3 {
        return Err(Error::InvalidArgument(format!("search dimension {} outside 1..=3", opts.d)));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    if opts.p.is_nan() || opts.p <= 0.0 {
        return Err(Error::InvalidExponent(opts.p));
    }
    let outcomes: Vec<RestartOutcome> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut obj = Objective { d: opts.d, p: opts.p, tol: opts.tol, evaluations: 0 };
            nelder_mead(&mut obj, steinhaus_start(opts.d, opts.seed, r), opts.iters)
        })
        .collect();
    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    let (restart, win) = outcomes
        .into_iter()
        .enumerate()
        .reduce(|acc, cur| if cur.1.value > acc.1.value { cur } else { acc })
        .expect("at least one restart");
    if !win.value.is_finite() {
        return Err(Error::InvalidArgument("no restart produced a finite ratio".into()));
    }
    let (xa, xb) = win.x.split_at(2 * opts.d - 1);
    Ok(SearchResult {
        a: decode(xa, opts.d),
        b: decode(xb, opts.d),
        p: opts.p,
        best_ratio: win.value,
        evaluations,
        seed: opts.seed,
        restart,
        tol: opts.tol,
        history: win.history,
    })
}
