//! Coincidence patterns at the scanning detector D2.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::{gamma_param, slit_image_center, BranchedState, DetectorModel, Geometry};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalizationMode {
    /// Probability density of the renormalized branch amplitudes, as is.
    Raw,
    /// Divided by the largest sample.
    UnitPeak,
}

/// Detector-basis projection used by the quantum eraser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EraserBasis {
    /// `(|d1> + |d2>) / sqrt 2`: fringes.
    Plus,
    /// `(|d1> - |d2>) / sqrt 2`: anti-fringes.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternKind {
    /// Exact branch evaluation traced over the detector.
    Coincidence,
    /// Exact branch evaluation after projecting the detector.
    Eraser(EraserBasis),
    /// Closed-form large-Omega expression.
    LargeOmega,
    LargeOmegaEraser(EraserBasis),
    /// Rebuilt on grids by the numeric oracle.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternMeta {
    pub geometry: Geometry,
    pub overlap: C64,
    pub z1_fixed: f64,
    pub normalization: NormalizationMode,
    /// Largest raw intensity; converts between normalization modes.
    pub raw_peak: f64,
    pub kind: PatternKind,
}

/// Coincidence intensity sampled along z2.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    z2: Vec<f64>,
    intensity: Vec<f64>,
    meta: PatternMeta,
}

impl Pattern {
    /// Builds a pattern from raw (unnormalized) intensities and applies `mode`.
    pub fn from_raw(
        z2: Vec<f64>,
        mut raw: Vec<f64>,
        geometry: Geometry,
        overlap: C64,
        z1_fixed: f64,
        kind: PatternKind,
        mode: NormalizationMode,
    ) -> Result<Self> {
        if z2.is_empty() {
            return Err(Error::Domain("z2 grid is empty".into()));
        }
        if z2.len() != raw.len() {
            return Err(Error::Domain(format!(
                "{} samples for {} grid points",
                raw.len(),
                z2.len()
            )));
        }
        if let Some(bad) = raw.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite intensity {bad}")));
        }
        // |f1|^2 + |f2|^2 + 2 Re(...) can round to -1e-300 in dark fringes
        for v in raw.iter_mut() {
            *v = v.max(0.0);
        }
        let raw_peak = raw.iter().cloned().fold(0.0, f64::max);
        let pattern = Pattern {
            z2,
            intensity: raw,
            meta: PatternMeta {
                geometry,
                overlap,
                z1_fixed,
                normalization: NormalizationMode::Raw,
                raw_peak,
                kind,
            },
        };
        Ok(pattern.with_normalization(mode))
    }

    pub fn z2(&self) -> &[f64] {
        &self.z2
    }

    pub fn intensity(&self) -> &[f64] {
        &self.intensity
    }

    pub fn meta(&self) -> &PatternMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.z2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z2.is_empty()
    }

    pub fn peak(&self) -> f64 {
        self.intensity.iter().cloned().fold(0.0, f64::max)
    }

    pub fn with_normalization(mut self, mode: NormalizationMode) -> Self {
        if mode == self.meta.normalization || self.meta.raw_peak == 0.0 {
            self.meta.normalization = mode;
            return self;
        }
        let factor = match mode {
            NormalizationMode::UnitPeak => 1.0 / self.meta.raw_peak,
            NormalizationMode::Raw => self.meta.raw_peak,
        };
        for v in &mut self.intensity {
            *v *= factor;
        }
        self.meta.normalization = mode;
        self
    }
}

/// `n` evenly spaced points from `min` to `max` inclusive.
pub fn uniform_grid(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(max > min) || !min.is_finite() || !max.is_finite() {
        return Err(Error::Domain(format!(
            "need at least 2 points on a finite increasing range, got [{min}, {max}] x {n}"
        )));
    }
    let h = (max - min) / (n - 1) as f64;
    Ok((0..n).map(|i| min + i as f64 * h).collect())
}

/// Symmetric z2 range over which the coincidence envelope falls to ~1e-16
/// of its peak, from the exact heralded packet at D2.
pub fn default_z2_range(geom: &Geometry) -> Result<(f64, f64)> {
    let at_d2 = gamma_param(geom, true)? + 2.0 * C64::i() * geom.tau_after_slit().value();
    let center = slit_image_center(geom, true)?;
    let half = center.abs() + (18.5 / (1.0 / at_d2).re).sqrt();
    Ok((-half, half))
}

fn check_grid(z2_grid: &[f64]) -> Result<()> {
    if z2_grid.is_empty() {
        return Err(Error::Domain("z2 grid is empty".into()));
    }
    if z2_grid.iter().any(|z| !z.is_finite()) {
        return Err(Error::Domain("z2 grid contains non-finite values".into()));
    }
    Ok(())
}

/// Coincidence density at `(z1_fixed, z2)` with the detector traced out:
///
/// `|f1|^2 + |f2|^2 + 2 Re[<d1|d2> conj(f1) f2]`.
pub fn coincidence_pattern(
    bs: &BranchedState,
    det: &DetectorModel,
    z1_fixed: f64,
    z2_grid: &[f64],
    mode: NormalizationMode,
) -> Result<Pattern> {
    check_grid(z2_grid)?;
    let c = det.overlap();
    let raw = z2_grid
        .iter()
        .map(|&z2| {
            let [f1, f2] = bs.amplitudes(z1_fixed, z2);
            f1.norm_sqr() + f2.norm_sqr() + 2.0 * (c * f1.conj() * f2).re
        })
        .collect();
    Pattern::from_raw(
        z2_grid.to_vec(),
        raw,
        *bs.geometry(),
        c,
        z1_fixed,
        PatternKind::Coincidence,
        mode,
    )
}

/// Coincidence density after projecting the (orthogonal) detector states
/// onto `(|d1> +- |d2>) / sqrt 2`.
pub fn eraser_pattern(
    bs: &BranchedState,
    basis: EraserBasis,
    z1_fixed: f64,
    z2_grid: &[f64],
    mode: NormalizationMode,
) -> Result<Pattern> {
    if !bs.detector().is_orthogonal() {
        return Err(Error::Precondition(format!(
            "eraser needs orthogonal detector states, <d1|d2> = {}",
            bs.detector().overlap()
        )));
    }
    check_grid(z2_grid)?;
    let sign = match basis {
        EraserBasis::Plus => 1.0,
        EraserBasis::Minus => -1.0,
    };
    let raw = z2_grid
        .iter()
        .map(|&z2| {
            let [f1, f2] = bs.amplitudes(z1_fixed, z2);
            0.5 * (f1 + sign * f2).norm_sqr()
        })
        .collect();
    Pattern::from_raw(
        z2_grid.to_vec(),
        raw,
        *bs.geometry(),
        bs.detector().overlap(),
        z1_fixed,
        PatternKind::Eraser(basis),
        mode,
    )
}

/// Fringe contrast of the exact pattern at one point,
/// `2 |c| |f1| |f2| / (|f1|^2 + |f2|^2)`.
///
/// Never exceeds `|<d1|d2>|` by the AM-GM inequality.
pub fn exact_local_visibility(bs: &BranchedState, det: &DetectorModel, z1_fixed: f64, z2: f64) -> f64 {
    let [f1, f2] = bs.amplitudes(z1_fixed, z2);
    let denom = f1.norm_sqr() + f2.norm_sqr();
    if denom == 0.0 {
        return 0.0;
    }
    2.0 * det.overlap().norm() * f1.norm() * f2.norm() / denom
}

/// Prefactor `alpha = |Ct|^2 exp[-2 z0^2 / (eps^2 + (lambda L1 / pi eps)^2)]`
/// of the large-Omega pattern, with `Gamma = gamma^2 + 4 i tau0`.
fn large_omega_alpha(geom: &Geometry) -> f64 {
    let eps = geom.epsilon;
    let flight = geom.wavelength * geom.l1 / PI;
    let gamma = geom.gamma_sq() + 4.0 * C64::i() * geom.tau_to_slit().value();
    let sqrt_re = gamma.re.sqrt();
    let ct_sq = 1.0
        / (PI
            * C64::new(eps, flight / eps).norm()
            * (sqrt_re + C64::new(0.0, 1.0) * (gamma.im + flight) / sqrt_re).norm());
    ct_sq * (-2.0 * geom.z0 * geom.z0 / (eps * eps + (flight / eps).powi(2))).exp()
}

/// Envelope `exp[-2(z^2 + z0^2)/W] cosh(4 z z0 / W)` and fringe phase
/// `4 z z0 lambda D pi / (gamma^4 pi^2 + lambda^2 D^2)` of the large-Omega
/// pattern at `z`, plus `cosh(4 z z0 / W)`.
fn large_omega_terms(geom: &Geometry, z: f64) -> (f64, f64, f64) {
    let w = geom.envelope_scale_sq();
    let z0 = geom.z0;
    let ld = geom.wavelength * geom.total_path();
    let g2 = geom.gamma_sq();
    let ch = (4.0 * z * z0 / w).cosh();
    let envelope = (-2.0 * (z * z + z0 * z0) / w).exp() * ch;
    let phase = 4.0 * z * z0 * ld * PI / (g2 * g2 * PI * PI + ld * ld);
    (envelope, phase, ch)
}

/// Large-Omega closed form of the coincidence pattern with D1 at `z1 = 0`:
///
/// `2 alpha exp[-2(z^2+z0^2)/W] cosh(4 z z0/W) {1 + |c| cos(phase) / cosh(4 z z0/W)}`.
///
/// The factor 2 comes from `e^{-2(z-z0)^2/W} + e^{-2(z+z0)^2/W}` with each
/// branch carrying half the probability.
/// Only `|<d1|d2>|` enters; the overlap phase (a fringe shift) is ignored.
pub fn large_omega_pattern(
    geom: &Geometry,
    det: &DetectorModel,
    z2_grid: &[f64],
    mode: NormalizationMode,
) -> Result<Pattern> {
    geom.require_approx("large-Omega pattern")?;
    check_grid(z2_grid)?;
    let alpha = large_omega_alpha(geom);
    let c = det.overlap().norm();
    let raw = z2_grid
        .iter()
        .map(|&z| {
            let (env, phase, ch) = large_omega_terms(geom, z);
            2.0 * alpha * env * (1.0 + c * phase.cos() / ch)
        })
        .collect();
    Pattern::from_raw(
        z2_grid.to_vec(),
        raw,
        *geom,
        det.overlap(),
        0.0,
        PatternKind::LargeOmega,
        mode,
    )
}

/// Large-Omega eraser patterns:
/// `alpha env {1 +- cos(phase) / cosh(4 z z0/W)}`, summing to the orthogonal
/// coincidence pattern.
pub fn large_omega_eraser_pattern(
    geom: &Geometry,
    basis: EraserBasis,
    z2_grid: &[f64],
    mode: NormalizationMode,
) -> Result<Pattern> {
    geom.require_approx("large-Omega eraser pattern")?;
    check_grid(z2_grid)?;
    let alpha = large_omega_alpha(geom);
    let sign = match basis {
        EraserBasis::Plus => 1.0,
        EraserBasis::Minus => -1.0,
    };
    let raw = z2_grid
        .iter()
        .map(|&z| {
            let (env, phase, ch) = large_omega_terms(geom, z);
            alpha * env * (1.0 + sign * phase.cos() / ch)
        })
        .collect();
    Pattern::from_raw(
        z2_grid.to_vec(),
        raw,
        *geom,
        C64::new(0.0, 0.0),
        0.0,
        PatternKind::LargeOmegaEraser(basis),
        mode,
    )
}

/// Local fringe visibility `|<d1|d2>| / cosh(4 z2 z0 / W)` in the
/// large-Omega regime.
pub fn local_visibility(geom: &Geometry, det: &DetectorModel, z2: f64) -> Result<f64> {
    geom.require_approx("local visibility formula")?;
    Ok(det.overlap().norm() / (4.0 * z2 * geom.z0 / geom.envelope_scale_sq()).cosh())
}

/// Period of the ghost fringes, `(gamma^4 pi^2 + lambda^2 D^2) / (2 z0 lambda D)`.
pub fn fringe_spacing(geom: &Geometry) -> Result<f64> {
    geom.require_approx("fringe spacing formula")?;
    let g2 = geom.gamma_sq();
    let ld = geom.wavelength * geom.total_path();
    Ok((g2 * g2 * PI * PI + ld * ld) / (2.0 * geom.z0 * ld))
}

/// `1 - (D1^2 + V2^2)`; non-negative whenever the duality bound holds.
pub fn duality_margin(det: &DetectorModel, v2_peak: f64) -> Result<f64> {
    duality_margin_from(det.distinguishability(), v2_peak)
}

pub fn duality_margin_from(distinguishability: f64, visibility: f64) -> Result<f64> {
    for (name, v) in [("distinguishability", distinguishability), ("visibility", visibility)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("{name} must lie in [0, 1], got {v}")));
        }
    }
    Ok(1.0 - (distinguishability * distinguishability + visibility * visibility))
}
