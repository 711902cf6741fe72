//! Multiplicative Hankel forms on the infinite polytorus.
//!
//! A sequence `ρ` defines the form `ρ(a, b) = Σ ρ_{mn} a_m b_n`. Under the
//! Bohr lift, integers become monomials in infinitely many variables and the
//! form becomes `H_φ(fg) = ⟨fg, φ⟩` on the Hardy space of the polytorus.
//! For polynomial symbols the form has an exact finite matrix, so its Schatten
//! norms can be computed directly. Together with L¹ norms of test polynomials
//! this gives the ratio `|⟨f, φ⟩| / (‖H_φ‖_{S_p} ‖f‖₁)`, which this crate
//! evaluates, amplifies over disjoint variables and searches over.
//!
//! Modules:
//! - [`bohr_lift`]: primes, `n ↔ κ(n)`, variable shifts.
//! - [`symbols`]: sparse polynomial symbols.
//! - [`hankel`]: the matrix of a symbol's form and a matrix-free evaluator.
//! - [`spectra`]: singular values and Schatten norms.
//! - [`integrals`]: L^q norms by grid quadrature or Monte Carlo.
//! - [`nehari`]: the ratio, amplification and the threshold checks.
//! - [`search`]: simplex search over linear symbol pairs.

pub mod bohr_lift;
pub mod error;
pub mod hankel;
pub mod integrals;
pub mod nehari;
pub mod search;
pub mod spectra;
pub mod symbols;

pub use bohr_lift::{factorize, label, nth_primes, shift_multiindex, MultiIndex, PrimeTable};
pub use error::{Error, Result};
pub use hankel::{build_matrix, form_apply, support_closure, HankelMatrix};
pub use integrals::{norm_grid, norm_grid_at, norm_mc, Integrator, Method, NormEstimate};
pub use nehari::{
    amplify, counterexample_scan, p_zero, ratio, verify_theorem1, verify_theorem2, RatioRecord,
    RatioReport, ScanOutcome,
};
pub use num_complex::Complex64;
pub use search::{maximize_ratio_linear, SearchOptions, SearchResult};
pub use spectra::{schatten_norm, singular_values, DenseMatrix, SingularSpectrum};
pub use symbols::{Symbol, TermRecord};
