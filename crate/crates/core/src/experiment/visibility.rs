//! Fringe extraction from sampled patterns.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use super::Pattern;
use crate::error::{Error, Result};

/// Maxima below this fraction of the pattern peak are treated as noise.
const MAXIMUM_FLOOR: f64 = 1e-8;

/// Local extrema of a sampled curve, refined by three-point parabolic
/// interpolation. Each entry is `(position, value)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extrema {
    pub maxima: Vec<(f64, f64)>,
    pub minima: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredVisibility {
    /// `|S| / B` at the requested point, where `B` is the slowly varying
    /// background and `S` the analytic fringe signal of the pattern.
    pub visibility: f64,
    /// `(Imax - Imin) / (Imax + Imin)` from the maximum and minimum nearest
    /// the requested point.
    pub extrema_visibility: f64,
    /// Median distance between neighbouring maxima.
    pub period: f64,
    /// Set when fewer than two fringe maxima were found; all values are 0.
    pub no_fringes: bool,
}

impl MeasuredVisibility {
    fn none() -> Self {
        MeasuredVisibility {
            visibility: 0.0,
            extrema_visibility: 0.0,
            period: 0.0,
            no_fringes: true,
        }
    }
}

fn refine(z: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let curvature = y0 - 2.0 * y1 + y2;
    if curvature == 0.0 {
        return (z[i], y1);
    }
    let delta = 0.5 * (y0 - y2) / curvature;
    let h = 0.5 * (z[i + 1] - z[i - 1]);
    (z[i] + delta * h, y1 - 0.25 * (y0 - y2) * delta)
}

/// Extrema of `y(z)` found by comparison with neighbours.
///
/// Maxima below `1e-8` of the largest sample are dropped, and a minimum is
/// kept only when kept maxima lie on both sides of it.
pub fn find_extrema(z: &[f64], y: &[f64]) -> Extrema {
    let n = z.len().min(y.len());
    if n < 3 {
        return Extrema::default();
    }
    let peak = y[..n].iter().cloned().fold(0.0, f64::max);
    let floor = MAXIMUM_FLOOR * peak;
    let mut maxima = Vec::new();
    let mut raw_minima = Vec::new();
    for i in 1..n - 1 {
        if y[i] > y[i - 1] && y[i] >= y[i + 1] {
            if y[i] > floor {
                maxima.push(refine(z, y, i));
            }
        } else if y[i] < y[i - 1] && y[i] <= y[i + 1] {
            raw_minima.push(refine(z, y, i));
        }
    }
    let minima = match (maxima.first(), maxima.last()) {
        (Some(&(lo, _)), Some(&(hi, _))) if maxima.len() >= 2 => raw_minima
            .into_iter()
            .filter(|&(x, _)| x > lo && x < hi)
            .collect(),
        _ => Vec::new(),
    };
    Extrema { maxima, minima }
}

fn grid_step(z: &[f64]) -> Result<f64> {
    if z.len() < 16 {
        return Err(Error::Domain(format!(
            "visibility needs at least 16 samples, got {}",
            z.len()
        )));
    }
    let h = (z[z.len() - 1] - z[0]) / (z.len() - 1) as f64;
    if !(h > 0.0) || z.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::Domain("visibility needs a uniform increasing grid".into()));
    }
    Ok(h)
}

fn nearest(points: &[(f64, f64)], at: f64) -> Option<(f64, f64)> {
    points
        .iter()
        .cloned()
        .min_by(|a, b| (a.0 - at).abs().total_cmp(&(b.0 - at).abs()))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Fringe visibility of `p` at `around`.
///
/// Extrema are located by neighbour comparison and parabolic refinement; they
/// give the fringe period and the adjacent-extrema contrast. The reported
/// `visibility` splits the spectrum of the pattern at half the fringe
/// frequency into background and fringe sideband and takes their ratio at
/// `around`, which removes the bias that a sloped envelope puts on
/// adjacent extrema. It is accurate when the pattern vanishes at both ends of
/// the grid and the envelope spans many fringes.
pub fn measured_visibility(p: &Pattern, around: f64) -> Result<MeasuredVisibility> {
    let z = p.z2();
    let y = p.intensity();
    let h = grid_step(z)?;
    if !(around >= z[0] && around <= z[z.len() - 1]) {
        return Err(Error::Domain(format!(
            "{around} lies outside the pattern range [{}, {}]",
            z[0],
            z[z.len() - 1]
        )));
    }
    let extrema = find_extrema(z, y);
    if extrema.maxima.len() < 2 || extrema.minima.is_empty() {
        return Ok(MeasuredVisibility::none());
    }
    let period = median(extrema.maxima.windows(2).map(|w| w[1].0 - w[0].0).collect());

    let (imax, imin) = (
        nearest(&extrema.maxima, around).map_or(0.0, |m| m.1),
        nearest(&extrema.minima, around).map_or(0.0, |m| m.1),
    );
    let extrema_visibility = if imax + imin > 0.0 {
        (imax - imin) / (imax + imin)
    } else {
        0.0
    };

    let n = z.len();
    let mut spectrum: Vec<C64> = y.iter().map(|&v| C64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut spectrum);
    let carrier = 2.0 * PI / period;
    let dq = 2.0 * PI / (n as f64 * h);
    let offset = around - z[0];
    let mut background = 0.0;
    let mut sideband = C64::new(0.0, 0.0);
    for (m, coeff) in spectrum.iter().enumerate() {
        let signed = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
        let q = signed * dq;
        let term = coeff * C64::from_polar(1.0, q * offset);
        if q.abs() < 0.5 * carrier {
            background += term.re;
        } else if q > 0.0 && !(n % 2 == 0 && m == n / 2) {
            sideband += 2.0 * term;
        }
    }
    background /= n as f64;
    sideband /= n as f64;
    let visibility = if background > 0.0 {
        sideband.norm() / background
    } else {
        0.0
    };
    Ok(MeasuredVisibility {
        visibility,
        extrema_visibility,
        period,
        no_fringes: false,
    })
}

/// Distance between neighbouring maxima next to `around`: the mean of the
/// two gaps around the nearest maximum when both exist.
pub fn peak_separation(p: &Pattern, around: f64) -> Result<f64> {
    let maxima = find_extrema(p.z2(), p.intensity()).maxima;
    if maxima.len() < 2 {
        return Err(Error::Domain("pattern has fewer than two maxima".into()));
    }
    let i = maxima
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 .0 - around).abs().total_cmp(&(b.1 .0 - around).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let x = |j: usize| maxima[j].0;
    Ok(if i > 0 && i + 1 < maxima.len() {
        0.5 * (x(i + 1) - x(i - 1))
    } else if i + 1 < maxima.len() {
        x(i + 1) - x(i)
    } else {
        x(i) - x(i - 1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{
        coincidence_pattern, detector_plane_state, uniform_grid, DetectorModel, Geometry,
        NormalizationMode, PatternKind,
    };

    fn synthetic(c: f64, k: f64, width: f64, n: usize, range: f64) -> Pattern {
        let z = uniform_grid(-range, range, n).unwrap();
        let y = z
            .iter()
            .map(|&x| (-x * x / (width * width)).exp() * (1.0 + c * (k * x).cos()))
            .collect();
        let g = Geometry::new(10.0, 20.0, 0.1, 2.0, 0.01, 100.0, 50.0).unwrap();
        Pattern::from_raw(
            z,
            y,
            g,
            C64::new(c, 0.0),
            0.0,
            PatternKind::Coincidence,
            NormalizationMode::Raw,
        )
        .unwrap()
    }

    #[test]
    fn parabolic_refinement_is_exact_for_parabolas() {
        let z: Vec<f64> = (0..5).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = z.iter().map(|x| 3.0 - (x - 1.1f64).powi(2)).collect();
        let e = find_extrema(&z, &y);
        assert_eq!(e.maxima.len(), 1);
        assert!((e.maxima[0].0 - 1.1).abs() < 1e-14);
        assert!((e.maxima[0].1 - 3.0).abs() < 1e-14);
    }

    #[test]
    fn demodulation_recovers_contrast_of_synthetic_fringes() {
        for c in [0.25, 0.6, 1.0] {
            let p = synthetic(c, 2.0 * PI, 8.0, 4096, 50.0);
            let m = measured_visibility(&p, 0.0).unwrap();
            assert!(!m.no_fringes);
            assert!((m.visibility - c).abs() < 1e-10, "{c}: {}", m.visibility);
            assert!((m.period - 1.0).abs() < 1e-2, "{}", m.period);
            // the sloped envelope biases the extrema estimate
            assert!((m.extrema_visibility - c).abs() < 1e-2);
        }
    }

    #[test]
    fn fringeless_pattern_reports_no_fringes() {
        let p = synthetic(0.0, 2.0 * PI, 8.0, 1024, 50.0);
        let m = measured_visibility(&p, 0.0).unwrap();
        assert!(m.no_fringes);
        assert_eq!(m.visibility, 0.0);
    }

    #[test]
    fn rejects_points_outside_and_short_grids() {
        let p = synthetic(0.5, 2.0 * PI, 8.0, 1024, 50.0);
        assert!(measured_visibility(&p, 60.0).is_err());
        let short = synthetic(0.5, 2.0 * PI, 8.0, 8, 50.0);
        assert!(measured_visibility(&short, 0.0).is_err());
    }

    #[test]
    fn generated_patterns_match_overlap_at_centre() {
        let g = Geometry::new(10.0, 20.0, 0.1, 2.0, 0.01, 100.0, 50.0).unwrap();
        let grid = uniform_grid(-25.0, 25.0, 2048).unwrap();
        for (c, tol) in [(1.0, 1e-3), (0.6, 1e-2), (0.0, 0.0)] {
            let det = DetectorModel::from_polar(c, 0.0).unwrap();
            let bs = detector_plane_state(&g, &det).unwrap();
            let p = coincidence_pattern(&bs, &det, 0.0, &grid, NormalizationMode::UnitPeak).unwrap();
            let m = measured_visibility(&p, 0.0).unwrap();
            assert!((m.visibility - c).abs() <= tol, "{c}: {m:?}");
        }
    }

    #[test]
    fn peak_separation_of_synthetic_fringes() {
        let p = synthetic(1.0, 2.0 * PI / 0.7, 30.0, 8192, 60.0);
        let d = peak_separation(&p, 0.0).unwrap();
        assert!((d - 0.7).abs() < 1e-4, "{d}");
    }
}
