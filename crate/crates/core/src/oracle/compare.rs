use crate::error::{Error, Result};
use crate::experiment::{NormalizationMode, Pattern};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    pub max_abs_error: f64,
    /// `max |a - b| / max |b|`.
    pub max_rel_error: f64,
    /// `||a - b||_2 / ||b||_2`.
    pub l2_error: f64,
    /// z2 at which `|a - b|` is largest.
    pub location_of_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alignment {
    /// Compare as stored when both patterns share a normalization, otherwise
    /// rescale both to unit peak.
    #[default]
    MatchModes,
    /// Always rescale both to unit peak.
    UnitPeak,
}

pub fn compare_patterns(a: &Pattern, b: &Pattern) -> Result<ComparisonReport> {
    compare_patterns_aligned(a, b, Alignment::MatchModes)
}

/// Error norms of `a` against the reference `b`.
pub fn compare_patterns_aligned(a: &Pattern, b: &Pattern, align: Alignment) -> Result<ComparisonReport> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} vs {} samples", a.len(), b.len())));
    }
    if let Some((x, y)) = a
        .z2()
        .iter()
        .zip(b.z2())
        .find(|(x, y)| (*x - *y).abs() > 1e-12 * (1.0 + x.abs()))
    {
        return Err(Error::GridMismatch(format!("grid points {x} and {y} differ")));
    }
    let unit = align == Alignment::UnitPeak || a.meta().normalization != b.meta().normalization;
    let (a, b) = if unit {
        (
            a.clone().with_normalization(NormalizationMode::UnitPeak),
            b.clone().with_normalization(NormalizationMode::UnitPeak),
        )
    } else {
        (a.clone(), b.clone())
    };
    let mut max_abs_error = 0.0;
    let mut location_of_max = a.z2()[0];
    let mut diff_sq = 0.0;
    let mut ref_sq = 0.0;
    for ((&z, &x), &y) in a.z2().iter().zip(a.intensity()).zip(b.intensity()) {
        let d = (x - y).abs();
        if d > max_abs_error {
            max_abs_error = d;
            location_of_max = z;
        }
        diff_sq += d * d;
        ref_sq += y * y;
    }
    let scale = |num: f64, den: f64| {
        if den > 0.0 {
            num / den
        } else if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    Ok(ComparisonReport {
        max_abs_error,
        max_rel_error: scale(max_abs_error, b.peak()),
        l2_error: scale(diff_sq.sqrt(), ref_sq.sqrt()),
        location_of_max,
    })
}
