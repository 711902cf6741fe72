//! `nehari`: command-line access to multiplicative Hankel form experiments.
//!
//! Every command writes line-delimited JSON records to stdout or `--output`.
//! Exit status is 0 on success, 2 for bad usage or input, 3 when a
//! computation fails (overflow, size cap, no convergence).

mod input;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use nehari_core::hankel::{build_matrix_capped, matrix_to_csv};
use nehari_core::nehari::{parse_p, ratio_capped, steinhaus_l1_limit};
use nehari_core::{
    amplify, counterexample_scan, factorize, label, maximize_ratio_linear, p_zero, singular_values,
    verify_theorem1, verify_theorem2, Error, Integrator, MultiIndex, SearchOptions,
};

use crate::output::Records;

#[derive(Parser)]
#[command(name = "nehari", version, about = "Multiplicative Hankel forms on the infinite polytorus")]
struct Cli {
    /// Write records here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (1 gives a sequential run)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Grid,
    Mc,
}

#[derive(Args, Clone, Debug)]
struct Quadrature {
    /// L¹ estimator
    #[arg(long, value_enum, default_value = "grid")]
    method: MethodArg,
    /// Relative tolerance of the grid rule
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Monte Carlo sample count
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Monte Carlo seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Quadrature {
    fn integrator(&self) -> Integrator {
        match self.method {
            MethodArg::Grid => Integrator::Grid { tol: self.tol },
            MethodArg::Mc => Integrator::MonteCarlo { samples: self.samples, seed: self.seed },
        }
    }
}

#[derive(Args, Clone, Debug)]
struct SymbolSource {
    /// Symbol file: JSON list of {exponents, re, im}
    #[arg(long)]
    symbol: Option<PathBuf>,
    /// Use (z_1 + ... + z_d)/√d when no file is given
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Largest matrix dimension to build
    #[arg(long, default_value_t = nehari_core::hankel::DEFAULT_MAX_DIM)]
    max_dim: usize,
}

#[derive(Args, Clone, Debug)]
struct PairSource {
    /// Test polynomial file (defaults to the normalized linear symbol)
    #[arg(long)]
    f: Option<PathBuf>,
    /// Symbol file (defaults to the normalized linear symbol)
    #[arg(long)]
    phi: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = nehari_core::hankel::DEFAULT_MAX_DIM)]
    max_dim: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Exponent vector of an integer, or the integer of an exponent vector
    Lift {
        #[arg(long, conflicts_with = "exponents", required_unless_present = "exponents")]
        n: Option<u64>,
        /// Comma-separated exponents, e.g. 2,1
        #[arg(long, value_delimiter = ',')]
        exponents: Option<Vec<u32>>,
    },
    /// Export the Hankel matrix as CSV plus a label file
    Matrix {
        #[command(flatten)]
        source: SymbolSource,
        /// CSV destination
        #[arg(long)]
        csv: PathBuf,
        /// Label destination, one exponent list per line (default: CSV path + .labels)
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Singular values of a symbol's matrix or of an exported CSV
    Svd {
        #[command(flatten)]
        source: SymbolSource,
        #[arg(long, conflicts_with = "symbol")]
        matrix: Option<PathBuf>,
    },
    /// Schatten p-norm of a symbol's matrix or of an exported CSV
    Schatten {
        #[command(flatten)]
        source: SymbolSource,
        #[arg(long, conflicts_with = "symbol")]
        matrix: Option<PathBuf>,
        /// Exponent in (0, ∞], "inf" allowed
        #[arg(long, value_parser = p_arg)]
        p: f64,
    },
    /// L^q norm of a symbol on the torus
    L1 {
        #[command(flatten)]
        source: SymbolSource,
        #[command(flatten)]
        quad: Quadrature,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
    },
    /// |⟨f, φ⟩| / (‖H_φ‖_{S_p} ‖f‖₁)
    Ratio {
        #[command(flatten)]
        pair: PairSource,
        #[command(flatten)]
        quad: Quadrature,
        #[arg(long, value_parser = p_arg)]
        p: f64,
    },
    /// Ratio of the m-fold disjoint product
    Amplify {
        #[command(flatten)]
        pair: PairSource,
        #[command(flatten)]
        quad: Quadrature,
        #[arg(long, value_parser = p_arg)]
        p: f64,
        #[arg(long)]
        m: usize,
        /// Also build the product symbols and compute their ratio directly
        #[arg(long)]
        assemble: bool,
    },
    /// Ratio of the normalized linear symbol for d = 1..=d-max
    Scan {
        #[command(flatten)]
        quad: Quadrature,
        #[arg(long, value_parser = p_arg)]
        p: f64,
        #[arg(long, default_value_t = 32)]
        d_max: usize,
        /// Stop at the first d whose ratio clears the threshold
        #[arg(long)]
        stop_at_first: bool,
    },
    /// Simplex search for the largest ratio over linear pairs
    Maximize {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_parser = p_arg)]
        p: f64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Bordered-matrix spectrum and ratio for the normalized linear symbol
    VerifyThm1 {
        #[arg(long)]
        d: usize,
        #[arg(long, value_parser = p_arg)]
        p: f64,
        #[command(flatten)]
        quad: Quadrature,
    },
    /// Chain of bounds for a linear pair at p ≤ p0
    VerifyThm2 {
        /// Symbol coefficients, e.g. 1,0.5-2i
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Test polynomial coefficients
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, value_parser = p_arg)]
        p: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// The critical exponent p0
    Pzero,
}

fn p_arg(s: &str) -> Result<f64, String> {
    parse_p(s).map_err(|e| e.to_string())
}

/// Error with the exit status it maps to.
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: String) -> Self {
        Failure { code: 2, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_)
            | Error::InvalidExponent(_)
            | Error::Parse(_)
            | Error::ZeroLabel
            | Error::ZeroSymbol
            | Error::AboveCritical(_) => 2,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

fn schatten_json(p: f64) -> serde_json::Value {
    if p.is_infinite() {
        json!("inf")
    } else {
        json!(p)
    }
}

fn source_matrix(source: &SymbolSource, csv: Option<&Path>) -> Result<nehari_core::DenseMatrix, Failure> {
    match csv {
        Some(path) => input::read_matrix(path),
        None => {
            let phi = input::symbol_or_linear(source.symbol.as_deref(), source.d)?;
            Ok(build_matrix_capped(&phi, source.max_dim)?.entries().clone())
        }
    }
}

fn pair(src: &PairSource) -> Result<(nehari_core::Symbol, nehari_core::Symbol), Failure> {
    let f = input::symbol_or_linear(src.f.as_deref(), src.d)?;
    let phi = input::symbol_or_linear(src.phi.as_deref(), src.d)?;
    Ok((f, phi))
}

fn seed_of(quad: &Quadrature) -> Option<u64> {
    matches!(quad.method, MethodArg::Mc).then_some(quad.seed)
}

fn run(command: Command, out: &mut Records) -> Result<(), Failure> {
    match command {
        Command::Lift { n, exponents } => match (n, exponents) {
            (Some(n), _) => {
                let kappa = factorize(n)?;
                out.emit(&json!({ "exponents": kappa.exponents() }))?;
            }
            (None, Some(e)) => {
                let kappa = MultiIndex::new(e);
                out.emit(&json!({ "exponents": kappa.exponents(), "n": label(&kappa)? }))?;
            }
            (None, None) => unreachable!("clap requires one of --n, --exponents"),
        },
        Command::Matrix { source, csv, labels } => {
            let phi = input::symbol_or_linear(source.symbol.as_deref(), source.d)?;
            let m = build_matrix_capped(&phi, source.max_dim)?;
            let labels_path = labels.unwrap_or_else(|| {
                let mut p = csv.clone().into_os_string();
                p.push(".labels");
                PathBuf::from(p)
            });
            fs::write(&csv, matrix_to_csv(m.entries()))?;
            let label_lines: String = m
                .labels()
                .iter()
                .map(|k| serde_json::to_string(k.exponents()).expect("exponents serialize") + "\n")
                .collect();
            fs::write(&labels_path, label_lines)?;
            out.emit(&json!({
                "dim": m.dim(),
                "csv": csv.display().to_string(),
                "labels": labels_path.display().to_string(),
            }))?;
        }
        Command::Svd { source, matrix } => {
            let m = source_matrix(&source, matrix.as_deref())?;
            let sp = singular_values(&m)?;
            out.emit(&json!({ "dim": m.rows(), "rank": sp.rank(), "singular_values": sp.values() }))?;
        }
        Command::Schatten { source, matrix, p } => {
            let m = source_matrix(&source, matrix.as_deref())?;
            let s = singular_values(&m)?.schatten_norm(p)?;
            out.emit(&json!({ "p": schatten_json(p), "schatten": s }))?;
        }
        Command::L1 { source, quad, q } => {
            let f = input::symbol_or_linear(source.symbol.as_deref(), source.d)?;
            let est = quad.integrator().norm(&f, q)?;
            out.emit(&json!({ "q": q, "estimate": est }))?;
        }
        Command::Ratio { pair: src, quad, p } => {
            let (f, phi) = pair(&src)?;
            let rep = ratio_capped(&f, &phi, p, &quad.integrator(), src.max_dim)?;
            out.emit(&json!({ "report": rep, "seed": seed_of(&quad) }))?;
        }
        Command::Amplify { pair: src, quad, p, m, assemble } => {
            let (f, phi) = pair(&src)?;
            let base = ratio_capped(&f, &phi, p, &quad.integrator(), src.max_dim)?;
            let (big_f, big_phi) = amplify(&f, &phi, m)?;
            let mut rec = json!({
                "m": m,
                "base": base.record(),
                "amplified_ratio": base.amplified(m as u32),
                "inner": big_f.inner(&big_phi),
                "seed": seed_of(&quad),
            });
            if assemble {
                let direct = ratio_capped(&big_f, &big_phi, p, &quad.integrator(), src.max_dim)?;
                rec["assembled"] = serde_json::to_value(direct.record()).expect("record serializes");
            }
            out.emit(&rec)?;
        }
        Command::Scan { quad, p, d_max, stop_at_first } => {
            let scan = counterexample_scan(p, d_max, &quad.integrator(), stop_at_first)?;
            for r in &scan.records {
                out.emit(r)?;
            }
            out.emit(&json!({ "p": schatten_json(p), "minimal_d": scan.minimal_d, "seed": seed_of(&quad) }))?;
        }
        Command::Maximize { d, p, restarts, iters, seed, tol } => {
            let res = maximize_ratio_linear(&SearchOptions { d, p, restarts, iters, seed, tol })?;
            out.emit(&res)?;
        }
        Command::VerifyThm1 { d, p, quad } => {
            let rep = verify_theorem1(d, p, &quad.integrator())?;
            emit_flat(out, &rep, seed_of(&quad))?;
        }
        Command::VerifyThm2 { a, b, p, tol } => {
            let a = input::parse_vector(&a).map_err(Failure::usage)?;
            let b = input::parse_vector(&b).map_err(Failure::usage)?;
            let rep = verify_theorem2(&a, &b, p, tol)?;
            out.emit(&rep)?;
        }
        Command::Pzero => {
            let p0 = p_zero();
            out.emit(&json!({ "p0": p0, "steinhaus_l1_limit": steinhaus_l1_limit() }))?;
        }
    }
    Ok(())
}

/// Serialize `value` and lift the nested ratio report fields to the top level.
fn emit_flat<T: Serialize>(out: &mut Records, value: &T, seed: Option<u64>) -> Result<(), Failure> {
    let mut v = serde_json::to_value(value).expect("report serializes");
    if let Some(obj) = v.as_object_mut() {
        if let Some(serde_json::Value::Object(inner)) = obj.remove("report") {
            obj.extend(inner);
        }
        obj.insert("seed".into(), json!(seed));
    }
    out.emit(&v)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = Records::open(cli.output.as_deref())
        .map_err(Failure::from)
        .and_then(|mut out| {
            run(cli.command, &mut out)?;
            out.finish().map_err(Failure::from)
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
