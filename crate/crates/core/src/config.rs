use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every computation.
///
/// `rank` governs rank and invertibility decisions, `check` bounds identity
/// residuals (relative Frobenius norm) and `kms` bounds the KMS residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rank: f64,
    pub check: f64,
    pub kms: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rank: 1e-10, check: 1e-8, kms: 1e-7 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        if 0.0 < self.rank && self.rank < self.check && self.check <= self.kms {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "tolerances must satisfy 0 < rank < check <= kms, got {} / {} / {}",
                self.rank, self.check, self.kms
            )))
        }
    }
}
