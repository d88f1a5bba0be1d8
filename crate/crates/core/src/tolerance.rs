use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Numerical cutoffs shared by every decision in the crate.
///
/// The rank cutoff for a matrix with largest singular value `s` and shape
/// `p × q` is `rank_tol_factor · s · max(p, q) · ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub rank_tol_factor: f64,
    pub psd_tol: f64,
    pub residual_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_tol_factor: 100.0,
            psd_tol: 1e-10,
            residual_tol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rank_tol_factor: f64, psd_tol: f64, residual_tol: f64) -> Result<Self> {
        let cfg = Self {
            rank_tol_factor,
            psd_tol,
            residual_tol,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        for (name, v) in [
            ("rank_tol_factor", self.rank_tol_factor),
            ("psd_tol", self.psd_tol),
            ("residual_tol", self.residual_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Tolerance(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Looser relative bound for structural identities (commutation,
    /// normality, diagonality) of matrices that went through an inversion.
    pub fn structural(&self) -> f64 {
        100.0 * self.residual_tol
    }

    pub fn rank_cutoff(&self, sigma_max: f64, rows: usize, cols: usize) -> f64 {
        self.rank_tol_factor * sigma_max * rows.max(cols) as f64 * f64::EPSILON
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive() {
        assert!(ToleranceConfig::new(0.0, 1e-10, 1e-9).is_err());
        assert!(ToleranceConfig::new(100.0, -1.0, 1e-9).is_err());
        assert!(ToleranceConfig::new(100.0, 1e-10, f64::NAN).is_err());
        assert!(ToleranceConfig::new(100.0, 1e-10, 1e-9).is_ok());
    }

    #[test]
    fn cutoff_scales_with_shape() {
        let cfg = ToleranceConfig::default();
        assert_eq!(cfg.rank_cutoff(1.0, 3, 5), 500.0 * f64::EPSILON);
    }
}
