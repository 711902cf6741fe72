use std::fs;
use std::path::Path;

use nehari_core::hankel::matrix_from_csv;
use nehari_core::{Complex64, DenseMatrix, Symbol, TermRecord};

use crate::Failure;

/// Symbol from a JSON list of `{exponents, re, im}` records.
pub fn read_symbol(path: &Path) -> Result<Symbol, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let records: Vec<TermRecord> =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Ok(Symbol::from_records(&records))
}

/// `--symbol FILE` if given, otherwise the normalized linear symbol in `d` variables.
pub fn symbol_or_linear(path: Option<&Path>, d: usize) -> Result<Symbol, Failure> {
    match path {
        Some(p) => read_symbol(p),
        None if d == 0 => Err(Failure::usage("--d must be positive".into())),
        None => Ok(Symbol::normalized_linear(d)),
    }
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    matrix_from_csv(&text).map_err(Failure::from)
}

/// Comma-separated complex numbers such as `1,0.5-2i,3i`.
pub fn parse_vector(text: &str) -> Result<Vec<Complex64>, String> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<Complex64>().map_err(|_| format!("bad complex number {s:?}"))
        })
        .collect()
}
