//! Wire format: UTF-8 JSON with every float written to 17 significant digits.

use std::io;
use std::path::Path;

use lsd_core::linalg::{ComplexMatrix, HermitianMatrix, C64};
use lsd_core::two_qubit::{DensityMatrix, PureState};
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::CliError;

/// Largest Frobenius norm of `(A − A†)/2` accepted from a file.
pub const ANTI_HERMITIAN_TOL: f64 = 1e-8;

/// Rows of `[re, im]` pairs.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

/// Compact output with `{:.16e}` floats, which round-trip exactly.
struct SignificantDigits;

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes `value` on one line; non-finite floats become `null`.
pub fn to_line<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SignificantDigits);
    value.serialize(&mut ser).expect("report types serialize infallibly");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })
}

pub fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse { path: path.display().to_string(), message: e.to_string() })
}

pub fn matrix_rows(m: &ComplexMatrix) -> MatrixRows {
    (0..m.dim()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub fn vector_entries(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

/// Square matrix of dimension `dim`, Hermitized after checking the
/// anti-Hermitian part against [`ANTI_HERMITIAN_TOL`].
pub fn hermitian_from_rows(rows: &MatrixRows, dim: usize) -> Result<HermitianMatrix, CliError> {
    if rows.len() != dim {
        return Err(lsd_core::Error::DimMismatch { expected: dim, got: rows.len() }.into());
    }
    if let Some(r) = rows.iter().find(|r| r.len() != dim) {
        return Err(lsd_core::Error::DimMismatch { expected: dim, got: r.len() }.into());
    }
    let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect()).collect();
    let m = ComplexMatrix::from_rows(&rows)?;
    if !m.is_finite() {
        return Err(lsd_core::Error::InvalidMatrix("non-finite entries".into()).into());
    }
    let anti = m.anti_hermitian_norm();
    if anti > ANTI_HERMITIAN_TOL {
        return Err(lsd_core::Error::InvalidMatrix(format!("anti-Hermitian part {anti:e} exceeds {ANTI_HERMITIAN_TOL:e}")).into());
    }
    Ok(HermitianMatrix::hermitize(&m))
}

pub fn pure_from_entries(entries: &[[f64; 2]]) -> Result<PureState, CliError> {
    let v: Vec<C64> = entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
    let amplitudes: [C64; 4] = v
        .try_into()
        .map_err(|v: Vec<C64>| lsd_core::Error::DimMismatch { expected: 4, got: v.len() })?;
    Ok(PureState::new(amplitudes)?)
}

/// `{"matrix": [[[re, im], …], …], "label": …}` in the computational basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub matrix: MatrixRows,
}

impl StateFile {
    pub fn new(rho: &DensityMatrix, label: Option<String>) -> Self {
        Self { label, matrix: matrix_rows(rho.matrix()) }
    }

    pub fn density(&self) -> Result<DensityMatrix, CliError> {
        Ok(DensityMatrix::new(hermitian_from_rows(&self.matrix, 4)?)?)
    }
}

/// Reads and validates a state file.
pub fn read_state(path: &Path) -> Result<(StateFile, DensityMatrix), CliError> {
    let file: StateFile = parse(path, &read_file(path)?)?;
    let rho = file.density()?;
    Ok((file, rho))
}
