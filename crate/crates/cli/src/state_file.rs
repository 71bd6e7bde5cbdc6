//! JSON state files: `{"dims": [..], "kind": "pure" | "density",
//! "amplitudes" | "matrix": [[re, im], ..]}`, row-major, party 0 most
//! significant. `matrix` may also be given as a list of rows or as
//! `{"rows", "cols", "data"}`.

use std::path::Path;

use gme_core::qcore::{CMatrix, DensityOperator, PartyDims, PureState, QuantumState};
use gme_core::C;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixEntries {
    Flat(Vec<[f64; 2]>),
    Rows(Vec<Vec<[f64; 2]>>),
    /// The layout used for matrices inside reports.
    Dense {
        rows: usize,
        cols: usize,
        data: Vec<[f64; 2]>,
    },
}

/// Unknown fields are ignored, so a `final_state` object copied out of a
/// report loads as is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixEntries>,
}

#[derive(Debug, Clone)]
pub enum LoadedState {
    Pure(PureState<f64>),
    Density(DensityOperator<f64>),
}

impl LoadedState {
    pub fn to_density(&self) -> DensityOperator<f64> {
        match self {
            LoadedState::Pure(s) => s.to_density(),
            LoadedState::Density(r) => r.clone(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        match self {
            LoadedState::Pure(s) => s.dims().as_slice(),
            LoadedState::Density(r) => r.dims().as_slice(),
        }
    }
}

fn complex(v: &[[f64; 2]]) -> Vec<C<f64>> {
    v.iter().map(|&[re, im]| C::new(re, im)).collect()
}

impl StateFile {
    pub fn from_pure(state: &PureState<f64>) -> Self {
        Self {
            dims: state.dims().as_slice().to_vec(),
            kind: StateKind::Pure,
            amplitudes: Some(state.amplitudes().iter().map(|z| [z.re, z.im]).collect()),
            matrix: None,
        }
    }

    pub fn from_density(rho: &DensityOperator<f64>) -> Self {
        Self {
            dims: rho.dims().as_slice().to_vec(),
            kind: StateKind::Density,
            amplitudes: None,
            matrix: Some(MatrixEntries::Flat(
                rho.matrix()
                    .as_slice()
                    .iter()
                    .map(|z| [z.re, z.im])
                    .collect(),
            )),
        }
    }

    /// Pure states off unit norm by more than 1e-12 are renormalized and a
    /// note records the input norm; density operators must be valid.
    pub fn build(&self) -> std::result::Result<(LoadedState, Option<String>), String> {
        let dims = PartyDims::new(self.dims.clone()).map_err(|e| e.to_string())?;
        let total = dims.total();
        match (self.kind, &self.amplitudes, &self.matrix) {
            (StateKind::Pure, Some(a), None) => {
                if a.len() != total {
                    return Err(format!("expected {total} amplitudes, found {}", a.len()));
                }
                let raw = PureState::unnormalized(complex(a), dims).map_err(|e| e.to_string())?;
                let norm = raw.norm();
                if (norm - 1.0).abs() <= 1e-12 {
                    return Ok((LoadedState::Pure(raw.with_normalized_flag(true)), None));
                }
                let state = raw.renormalized().map_err(|e| e.to_string())?;
                Ok((
                    LoadedState::Pure(state),
                    Some(format!("input amplitudes renormalized (norm {norm})")),
                ))
            }
            (StateKind::Density, None, Some(m)) => {
                let flat: Vec<[f64; 2]> = match m {
                    MatrixEntries::Flat(v) => v.clone(),
                    MatrixEntries::Rows(rows) => {
                        if rows.iter().any(|r| r.len() != total) {
                            return Err(format!("every matrix row needs {total} entries"));
                        }
                        rows.concat()
                    }
                    MatrixEntries::Dense { rows, cols, data } => {
                        if *rows != total || *cols != total {
                            return Err(format!(
                                "matrix is {rows}x{cols}, expected {total}x{total}"
                            ));
                        }
                        data.clone()
                    }
                };
                if flat.len() != total * total {
                    return Err(format!(
                        "expected {} matrix entries, found {}",
                        total * total,
                        flat.len()
                    ));
                }
                let matrix = CMatrix::from_vec(total, total, complex(&flat));
                let rho = DensityOperator::new(dims, matrix).map_err(|e| e.to_string())?;
                Ok((LoadedState::Density(rho), None))
            }
            (StateKind::Pure, _, _) => {
                Err("a pure state needs `amplitudes` and no `matrix`".into())
            }
            (StateKind::Density, _, _) => {
                Err("a density state needs `matrix` and no `amplitudes`".into())
            }
        }
    }
}

pub fn load_state(path: &Path) -> Result<(LoadedState, Option<String>)> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let malformed = |reason: String| CliError::StateFile {
        path: path.to_path_buf(),
        reason,
    };
    let file: StateFile = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
    file.build().map_err(malformed)
}
