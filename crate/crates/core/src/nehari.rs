//! The ratio `|⟨f, φ⟩| / (‖H_φ‖_{S_p} ‖f‖₁)` and the machinery that drives it above 1.
//!
//! If the ratio exceeds 1 for some pair `(f, φ)`, products of `m` copies on
//! disjoint variables raise it to the `m`-th power, which rules out a uniform
//! bound on it over forms in `S_p`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::{build_matrix, build_matrix_capped};
use crate::integrals::{Integrator, Method, NormEstimate};
use crate::spectra::singular_values;
use crate::symbols::Symbol;

/// Grid-based threshold decisions use this absolute margin.
pub const GRID_DECISION_TOL: f64 = 1e-9;
/// Monte Carlo threshold decisions require the ratio to clear 1 by this many standard errors.
pub const MC_GUARD_SIGMAS: f64 = 4.0;

/// `(1 - ln π / ln 4)^{-1}`, the exponent at which `2^{1/p} · √π/2 = 1`.
pub fn p_zero() -> f64 {
    1.0 / (1.0 - std::f64::consts::PI.ln() / 4f64.ln())
}

/// `lim ‖(z_1 + ... + z_d)/√d‖₁ = √π / 2`.
pub fn steinhaus_l1_limit() -> f64 {
    std::f64::consts::PI.sqrt() / 2.0
}

pub(crate) mod p_format {
    //! Schatten exponents serialize as numbers, with `"inf"` for the operator norm.
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => super::parse_p(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// Parse a Schatten exponent; accepts `inf`, `infinity` and `∞`.
pub fn parse_p(text: &str) -> Result<f64> {
    let t = text.trim();
    let p = match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        _ => t.parse::<f64>().map_err(|_| Error::Parse(format!("bad exponent {t:?}")))?,
    };
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub inner: Complex64,
    pub schatten: f64,
    pub l1: NormEstimate,
    pub ratio: f64,
    #[serde(with = "p_format")]
    pub p: f64,
    pub d: usize,
    pub exceeded_one: bool,
    /// Standard error of the ratio induced by the L¹ estimate (0 for the grid rule).
    pub ratio_stderr: f64,
    /// What the ratio had to clear: `1 + 1e-9` for grid, `1 + 4σ` for Monte Carlo.
    pub threshold: f64,
}

/// One line of a scan report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub d: usize,
    #[serde(with = "p_format")]
    pub p: f64,
    pub inner_abs: f64,
    pub schatten: f64,
    pub l1: f64,
    pub l1_stderr: f64,
    pub ratio: f64,
    pub exceeded_one: bool,
}

impl RatioReport {
    pub fn record(&self) -> RatioRecord {
        RatioRecord {
            d: self.d,
            p: self.p,
            inner_abs: self.inner.norm(),
            schatten: self.schatten,
            l1: self.l1.value,
            l1_stderr: self.l1.stderr,
            ratio: self.ratio,
            exceeded_one: self.exceeded_one,
        }
    }

    /// The ratio of the `m`-fold disjoint product, from the factorization identity.
    pub fn amplified(&self, m: u32) -> f64 {
        self.ratio.powi(m as i32)
    }
}

/// `‖H_φ‖_{S_p}` from the dense singular values of the Hankel block.
pub fn schatten_of(phi: &Symbol, p: f64) -> Result<f64> {
    let m = build_matrix(phi)?;
    singular_values(m.entries())?.schatten_norm(p)
}

pub fn ratio(f: &Symbol, phi: &Symbol, p: f64, integrator: &Integrator) -> Result<RatioReport> {
    ratio_capped(f, phi, p, integrator, crate::hankel::DEFAULT_MAX_DIM)
}

pub fn ratio_capped(
    f: &Symbol,
    phi: &Symbol,
    p: f64,
    integrator: &Integrator,
    max_dim: usize,
) -> Result<RatioReport> {
    if f.is_zero() || phi.is_zero() {
        return Err(Error::ZeroSymbol);
    }
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidExponent(p));
    }
    let inner = f.inner(phi);
    let m = build_matrix_capped(phi, max_dim)?;
    let schatten = singular_values(m.entries())?.schatten_norm(p)?;
    let l1 = integrator.norm(f, 1.0)?;
    Ok(assemble(inner, schatten, l1, p, f.width().max(phi.width())))
}

fn assemble(inner: Complex64, schatten: f64, l1: NormEstimate, p: f64, d: usize) -> RatioReport {
    let ratio = inner.norm() / (schatten * l1.value);
    let (ratio_stderr, threshold) = match l1.method {
        Method::Grid => (0.0, 1.0 + GRID_DECISION_TOL),
        Method::Mc => {
            let se = ratio * l1.stderr / l1.value;
            (se, 1.0 + MC_GUARD_SIGMAS * se)
        }
    };
    RatioReport {
        inner,
        schatten,
        exceeded_one: ratio > threshold,
        ratio,
        p,
        d,
        l1,
        ratio_stderr,
        threshold,
    }
}

/// Products of `m` copies of `f` and `φ`, copy `j` shifted by `j·d` with `d` the larger width.
pub fn amplify(f: &Symbol, phi: &Symbol, m: usize) -> Result<(Symbol, Symbol)> {
    if m == 0 {
        return Err(Error::InvalidArgument("amplification count must be positive".into()));
    }
    let step = f.width().max(phi.width());
    let mut big_f = f.clone();
    let mut big_phi = phi.clone();
    for j in 1..m {
        big_f = big_f.multiply(&f.shift(step * j));
        big_phi = big_phi.multiply(&phi.shift(step * j));
    }
    Ok((big_f, big_phi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub d: usize,
    pub singular_values: Vec<f64>,
    /// Largest deviation of the spectrum from `{1, 1, 0, ..., 0}`.
    pub spectrum_error: f64,
    /// `|‖H_φ‖_{S_p} - 2^{1/p}|`.
    pub schatten_error: f64,
    pub spectrum_ok: bool,
    pub report: RatioReport,
}

/// Check the bordered-matrix facts for `φ = f = (z_1 + ... + z_d)/√d` and report the ratio.
pub fn verify_theorem1(d: usize, p: f64, integrator: &Integrator) -> Result<Theorem1Report> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    let phi = Symbol::normalized_linear(d);
    let m = build_matrix(&phi)?;
    let sp = singular_values(m.entries())?;
    let spectrum_error = sp
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (v - if i < 2 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    let schatten = sp.schatten_norm(p)?;
    let expected = if p.is_infinite() { 1.0 } else { 2f64.powf(1.0 / p) };
    let schatten_error = (schatten - expected).abs();
    let l1 = integrator.norm(&phi, 1.0)?;
    let report = assemble(phi.inner(&phi), schatten, l1, p, d);
    Ok(Theorem1Report {
        d,
        singular_values: sp.values().to_vec(),
        spectrum_error,
        schatten_error,
        spectrum_ok: spectrum_error < 1e-10 && schatten_error < 1e-10,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOutcome {
    #[serde(with = "p_format")]
    pub p: f64,
    pub records: Vec<RatioRecord>,
    pub minimal_d: Option<usize>,
}

/// Ratio of `f = φ = (z_1 + ... + z_d)/√d` for `d = 1..=d_max`, in order of `d`.
///
/// With `stop_at_first` the scan ends at the first `d` whose ratio clears
/// the decision threshold.
pub fn counterexample_scan(
    p: f64,
    d_max: usize,
    integrator: &Integrator,
    stop_at_first: bool,
) -> Result<ScanOutcome> {
    if d_max == 0 {
        return Err(Error::InvalidArgument("d_max must be positive".into()));
    }
    let mut records = Vec::new();
    let mut minimal_d = None;
    for d in 1..=d_max {
        let phi = Symbol::normalized_linear(d);
        let r = ratio(&phi, &phi, p, integrator)?;
        if r.exceeded_one && minimal_d.is_none() {
            minimal_d = Some(d);
        }
        records.push(r.record());
        if stop_at_first && minimal_d.is_some() {
            break;
        }
    }
    Ok(ScanOutcome { p, records, minimal_d })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Report {
    #[serde(with = "p_format")]
    pub p: f64,
    /// `‖H_φ‖_{S_p} · ‖f‖₁`.
    pub lhs: f64,
    /// `2^{1/p} ‖a‖ · (√π/2) ‖b‖`.
    pub khintchine: f64,
    /// `‖a‖ ‖b‖`.
    pub cauchy_schwarz: f64,
    /// `|⟨f, φ⟩|`.
    pub inner_abs: f64,
    pub schatten: f64,
    pub l1: NormEstimate,
    /// Each link of `lhs ≥ khintchine ≥ cauchy_schwarz ≥ inner_abs`.
    pub links: [bool; 3],
    pub holds: bool,
}

/// Tolerance on the quadrature-dependent link of the chain.
pub const THEOREM2_TOL: f64 = 1e-6;

/// Check `|⟨f, φ⟩| ≤ ‖H_φ‖_{S_p} ‖f‖₁` link by link for `φ = Σ a_j z_j`, `f = Σ b_j z_j`.
pub fn verify_theorem2(a: &[Complex64], b: &[Complex64], p: f64, tol: f64) -> Result<Theorem2Report> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidExponent(p));
    }
    if p > p_zero() {
        return Err(Error::AboveCritical(p));
    }
    let phi = Symbol::linear(a);
    let f = Symbol::linear(b);
    if phi.is_zero() || f.is_zero() {
        return Err(Error::ZeroSymbol);
    }
    let schatten = schatten_of(&phi, p)?;
    let l1 = crate::integrals::norm_grid(&f, 1.0, tol)?;
    let (na, nb) = (phi.coeff_norm(), f.coeff_norm());
    let two_p = 2f64.powf(1.0 / p);
    let lhs = schatten * l1.value;
    let khintchine = two_p * na * steinhaus_l1_limit() * nb;
    let cauchy_schwarz = na * nb;
    let inner_abs = f.inner(&phi).norm();
    let scale = na * nb;
    let links = [
        lhs >= khintchine - THEOREM2_TOL * scale,
        khintchine >= cauchy_schwarz - 1e-12 * scale,
        cauchy_schwarz >= inner_abs - 1e-12 * scale,
    ];
    Ok(Theorem2Report {
        p,
        lhs,
        khintchine,
        cauchy_schwarz,
        inner_abs,
        schatten,
        l1,
        holds: links.iter().all(|&l| l) && inner_abs <= lhs + THEOREM2_TOL * scale,
        links,
    })
}
