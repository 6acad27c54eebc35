//! Fixtures shared by the benchmarks.

use ghostsim::experiment::{default_z2_range, uniform_grid};
use ghostsim::{DetectorModel, Geometry};

/// Far-field geometry with well separated slit images.
pub fn reference_geometry() -> Geometry {
    Geometry::new(10.0, 1000.0, 0.1, 2.0, 0.01, 100.0, 50.0).expect("valid geometry")
}

pub fn reference_detector() -> DetectorModel {
    DetectorModel::from_polar(0.5, 0.3).expect("valid overlap")
}

pub fn reference_grid(n: usize) -> Vec<f64> {
    let (lo, hi) = default_z2_range(&reference_geometry()).expect("range");
    uniform_grid(lo, hi, n).expect("grid")
}
