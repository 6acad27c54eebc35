use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Which-path detector, described by the overlap `<d1|d2>` of the two
/// detector states left behind by slit A and slit B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    overlap: C64,
}

impl DetectorModel {
    pub fn new(overlap: C64) -> Result<Self> {
        let m = overlap.norm();
        if !m.is_finite() || m > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("|<d1|d2>| must not exceed 1, got {m}")));
        }
        let overlap = if m > 1.0 { overlap / m } else { overlap };
        Ok(DetectorModel { overlap })
    }

    pub fn from_polar(magnitude: f64, phase: f64) -> Result<Self> {
        if magnitude < 0.0 {
            return Err(Error::Domain(format!("overlap magnitude must be non-negative, got {magnitude}")));
        }
        Self::new(C64::from_polar(magnitude, phase))
    }

    /// Perfect which-path marking, `<d1|d2> = 0`.
    pub fn orthogonal_states() -> Self {
        DetectorModel {
            overlap: C64::new(0.0, 0.0),
        }
    }

    pub fn overlap(&self) -> C64 {
        self.overlap
    }

    pub fn is_orthogonal(&self) -> bool {
        self.overlap.norm() <= 1e-15
    }

    /// `D1 = sqrt(1 - |<d1|d2>|^2)`.
    pub fn distinguishability(&self) -> f64 {
        (1.0 - self.overlap.norm_sqr()).max(0.0).sqrt()
    }
}
