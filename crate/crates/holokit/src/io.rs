//! Serialization: JSON matrix encoding, transfer-matrix files, and CSV
//! study tables.
//!
//! Matrices serialize as row-major `[re, im]` pairs alongside explicit
//! `rows`/`cols` keys, so files are self-describing and byte-stable.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{real, ComplexMatrix, Scalar};

/// JSON-facing matrix record: row-major `[re, im]` entry pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixRecord {
    pub fn from_matrix<T: Scalar>(m: &ComplexMatrix<T>) -> Self {
        let entries = (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
            .map(|(i, j)| {
                let z = m.get(i, j);
                [z.re.to_f64().unwrap(), z.im.to_f64().unwrap()]
            })
            .collect();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries,
        }
    }

    pub fn to_matrix<T: Scalar>(&self) -> Result<ComplexMatrix<T>> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::Parse {
                location: "matrix record".into(),
                message: format!(
                    "{}x{} matrix needs {} entries, got {}",
                    self.rows,
                    self.cols,
                    self.rows * self.cols,
                    self.entries.len()
                ),
            });
        }
        ComplexMatrix::from_entries(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .map(|&[re, im]| Complex::new(real::<T>(re), real::<T>(im)))
                .collect(),
        )
    }
}

/// A file of per-step transfer matrices, applied in listed order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferModelFile {
    pub ambient_dim: usize,
    pub steps: Vec<MatrixRecord>,
}

/// Reads a transfer-matrix JSON file; parse errors name the offending
/// record.
pub fn load_transfer_model<T: Scalar>(path: &Path) -> Result<Vec<ComplexMatrix<T>>> {
    let text = fs::read_to_string(path)?;
    let file: TransferModelFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut steps = Vec::with_capacity(file.steps.len());
    for (k, rec) in file.steps.iter().enumerate() {
        if rec.rows != file.ambient_dim || rec.cols != file.ambient_dim {
            return Err(Error::Parse {
                location: format!("{} step {k}", path.display()),
                message: format!(
                    "expected {0}x{0}, got {1}x{2}",
                    file.ambient_dim, rec.rows, rec.cols
                ),
            });
        }
        steps.push(rec.to_matrix().map_err(|e| Error::Parse {
            location: format!("{} step {k}", path.display()),
            message: e.to_string(),
        })?);
    }
    if steps.is_empty() {
        return Err(Error::Parse {
            location: path.display().to_string(),
            message: "transfer model lists no steps".into(),
        });
    }
    Ok(steps)
}

pub fn save_transfer_model<T: Scalar>(path: &Path, steps: &[ComplexMatrix<T>]) -> Result<()> {
    let ambient_dim = steps.first().map(|m| m.rows()).unwrap_or(0);
    let file = TransferModelFile {
        ambient_dim,
        steps: steps.iter().map(MatrixRecord::from_matrix).collect(),
    };
    write_json(path, &file)
}

/// Writes any serializable report as pretty JSON with a trailing newline.
pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// One row of a convergence CSV table.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub error: f64,
    pub mu_min: f64,
    pub unitarity_residual: f64,
}

/// Writes `N,h,error,mu_min,unitarity_residual` rows; floats carry 17
/// significant digits so reading them back is lossless.
pub fn write_convergence_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    let mut out = fs::File::create(path)?;
    writeln!(out, "N,h,error,mu_min,unitarity_residual")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.n, r.h, r.error, r.mu_min, r.unitarity_residual
        )?;
    }
    Ok(())
}

/// Writes a noise-study grid as `mu,rho,mean_error` rows.
pub fn write_noise_csv(
    path: &Path,
    mu_levels: &[f64],
    rho_grid: &[f64],
    mean_errors: &[Vec<f64>],
) -> Result<()> {
    let mut out = fs::File::create(path)?;
    writeln!(out, "mu,rho,mean_error")?;
    for (mu, row) in mu_levels.iter().zip(mean_errors) {
        for (rho, err) in rho_grid.iter().zip(row) {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", mu, rho, err)?;
        }
    }
    Ok(())
}
