//! Matrix JSON format: `{"n": 2, "entries": [[[re, im], ...], ...]}`, row-major.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmatrix::FMatrix;
use crate::linalg::{CMat, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Result<MatrixJson> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
        }
        let entries = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Ok(MatrixJson { n: m.nrows(), entries })
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        if self.entries.len() != self.n || self.entries.iter().any(|r| r.len() != self.n) {
            return Err(Error::InvalidInput(format!("entries do not form a {0}x{0} matrix", self.n)));
        }
        if self.entries.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite entry".into()));
        }
        Ok(CMat::from_fn(self.n, self.n, |i, j| {
            let [re, im] = self.entries[i][j];
            C64::new(re, im)
        }))
    }
}

pub fn parse_matrix(s: &str) -> Result<CMat> {
    let m: MatrixJson = serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("matrix JSON: {e}")))?;
    m.to_matrix()
}

pub fn matrix_to_string(m: &CMat) -> Result<String> {
    serde_json::to_string(&MatrixJson::from_matrix(m)?).map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn read_matrix(path: &Path) -> Result<CMat> {
    let s = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix(&s)
}

pub fn read_fmatrix(path: &Path) -> Result<FMatrix> {
    FMatrix::new(read_matrix(path)?)
}
