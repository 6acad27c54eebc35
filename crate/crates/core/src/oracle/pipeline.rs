//! Grid rebuild of the coincidence pattern.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::grid::{momentum_space_propagate, sample_packet, Grid1D, Grid2D, MAX_POINTS};
use crate::error::{Error, Result};
use crate::experiment::{
    gamma_param, slit_image_center, slit_probes, DetectorModel, EraserBasis, Geometry,
    NormalizationMode, Pattern, PatternKind,
};
use crate::gaussian::{make_epr, GaussianPacket};

/// Grids are sized so that Gaussian amplitudes have fallen to `e^{-TAIL}`
/// at the window edge and at the largest resolved wavenumber.
const TAIL: f64 = 25.0;

/// Fraction of the window, and of the band, that a sized grid fills.
const FILL: f64 = 0.7;

/// Largest number of samples in the two-particle source grid.
const MAX_SOURCE_SAMPLES: usize = 1 << 24;

/// Distance from the origin beyond which a packet of this centre and width
/// parameter is below `e^{-TAIL}` in amplitude.
fn reach(center: f64, width: C64) -> f64 {
    center.abs() + (TAIL / (1.0 / width).re).sqrt()
}

/// Wavenumber beyond which the packet spectrum is below `e^{-TAIL}`.
fn bandwidth(width: C64) -> f64 {
    (4.0 * TAIL / width.re).sqrt()
}

fn points_for(half_extent: f64, max_wavenumber: f64) -> Result<usize> {
    let needed = (2.0 * half_extent * max_wavenumber / (FILL * PI)).ceil().max(64.0) as usize;
    let n = needed.next_power_of_two();
    if n > MAX_POINTS {
        return Err(Error::Resolution {
            reason: format!("geometry needs {n} points on one axis"),
            suggested_points: n,
        });
    }
    Ok(n)
}

/// Branch amplitudes `f1 = phiA(z1) psiA(z2) / sqrt(P)` and
/// `f2 = phiB(z1) psiB(z2) / sqrt(P)` rebuilt on grids, where `P` is the
/// slit pass probability.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericBranches {
    geometry: Geometry,
    z1_fixed: f64,
    z2: Vec<f64>,
    amplitudes: [Vec<C64>; 2],
    pass_probability: f64,
    source_points: [usize; 2],
}

impl NumericBranches {
    pub fn z2(&self) -> &[f64] {
        &self.z2
    }

    pub fn amplitudes(&self) -> &[Vec<C64>; 2] {
        &self.amplitudes
    }

    pub fn pass_probability(&self) -> f64 {
        self.pass_probability
    }

    /// Points per axis `(z1, z2)` of the source grid.
    pub fn source_points(&self) -> [usize; 2] {
        self.source_points
    }

    pub fn pattern(&self, det: &DetectorModel, mode: NormalizationMode) -> Result<Pattern> {
        let c = det.overlap();
        let [a, b] = &self.amplitudes;
        let raw = a
            .iter()
            .zip(b)
            .map(|(f1, f2)| f1.norm_sqr() + f2.norm_sqr() + 2.0 * (c * f1.conj() * f2).re)
            .collect();
        Pattern::from_raw(
            self.z2.clone(),
            raw,
            self.geometry,
            c,
            self.z1_fixed,
            PatternKind::Oracle,
            mode,
        )
    }

    pub fn eraser_pattern(&self, basis: EraserBasis, mode: NormalizationMode) -> Result<Pattern> {
        let sign = match basis {
            EraserBasis::Plus => 1.0,
            EraserBasis::Minus => -1.0,
        };
        let [a, b] = &self.amplitudes;
        let raw = a
            .iter()
            .zip(b)
            .map(|(f1, f2)| 0.5 * (f1 + sign * f2).norm_sqr())
            .collect();
        Pattern::from_raw(
            self.z2.clone(),
            raw,
            self.geometry,
            C64::new(0.0, 0.0),
            self.z1_fixed,
            PatternKind::Oracle,
            mode,
        )
    }
}

fn probe_at_detector(probe: &GaussianPacket, geom: &Geometry, z1_fixed: f64) -> Result<C64> {
    let tau = geom.tau_after_slit();
    let width = probe.width();
    let spread = width + 2.0 * C64::i() * tau.value();
    let half = reach(probe.center(), spread).max(reach(probe.center(), width)).max(z1_fixed.abs()) / FILL;
    let n = points_for(half, bandwidth(width))?;
    let sampled = sample_packet(probe, half, n)?;
    let moved = momentum_space_propagate(&sampled, tau)?;
    Ok(moved.interpolate(&[z1_fixed])?[0])
}

/// Branch amplitudes at the detectors computed on grids.
///
/// The source pair state is sampled once on a `(z1, z2)` grid; every later
/// step is numeric. Particle 1 is evolved to the slits by FFT and projected
/// onto each slit packet by the trapezoid rule, which is evaluated as
/// `sum_i (U phi)(z1_i) Psi0(z1_i, z2)` because for a real probe
/// `conj(U^dagger phi) = U phi` holds exactly for the discrete propagator.
/// The heralded particle-2 amplitudes are evolved to D2 by FFT and read off
/// at `z2_grid` by trigonometric interpolation.
///
/// The source grid only spans the slit-probe support along z1, so parts of
/// the pair state far from the slits are truncated; they would contribute
/// less than the probe tail `e^{-25}`.
pub fn numeric_branches(geom: &Geometry, z1_fixed: f64, z2_grid: &[f64]) -> Result<NumericBranches> {
    geom.validate()?;
    if z2_grid.is_empty() || z2_grid.iter().any(|z| !z.is_finite()) || !z1_fixed.is_finite() {
        return Err(Error::Domain("detector positions must be finite and non-empty".into()));
    }
    let tau0 = geom.tau_to_slit();
    let tau1 = geom.tau_after_slit();
    let i2 = 2.0 * C64::i();
    let source = make_epr(geom.sigma, geom.omega)?;
    let (phi_a, phi_b) = slit_probes(geom)?;

    // z1 axis: slit probes moved by tau0, times the source rows
    let probe_width = phi_a.width();
    let half1 = reach(geom.z0, probe_width + i2 * tau0.value()) / FILL;
    let row_band = bandwidth(C64::new(1.0, 0.0) / source.quad().xx);
    let probe_band = bandwidth(probe_width);
    let n1 = points_for(half1, probe_band)?.max(points_for(half1, 0.5 * FILL * (probe_band + row_band))?);

    // z2 axis: heralded packet from the slits to D2
    let gamma = gamma_param(geom, true)?;
    let center = slit_image_center(geom, true)?;
    let req = z2_grid.iter().fold(0.0f64, |m, z| m.max(z.abs()));
    let half2 = reach(center, gamma - i2 * tau0.value())
        .max(reach(center, gamma + i2 * tau1.value()))
        .max(req * 1.05)
        / FILL;
    let n2 = points_for(half2, bandwidth(gamma))?;
    if n1 * n2 > MAX_SOURCE_SAMPLES {
        return Err(Error::Resolution {
            reason: format!("source grid {n1} x {n2} exceeds {MAX_SOURCE_SAMPLES} samples"),
            suggested_points: n1.max(n2),
        });
    }

    let sampled = Grid2D::from_fn([half1, half2], [n1, n2], |z1, z2| source.evaluate(z1, z2))?;
    let heralded = |probe: &GaussianPacket| -> Result<Grid1D> {
        let on_grid = sample_packet(probe, half1, n1)?;
        let moved = momentum_space_propagate(&on_grid, tau0)?;
        Grid1D::new(half2, sampled.contract_z1(moved.samples()))
    };
    let chi_a = heralded(&phi_a)?;
    let chi_b = heralded(&phi_b)?;
    let pass_probability = chi_a.norm_sq() + chi_b.norm_sq();
    if !(pass_probability > 0.0) || !pass_probability.is_finite() {
        return Err(Error::Domain(format!(
            "no amplitude reaches the slits (pass probability {pass_probability})"
        )));
    }
    let flight = tau0 + tau1;
    let norm = 1.0 / pass_probability.sqrt();
    let mut amplitudes = [Vec::new(), Vec::new()];
    for (slot, (probe, chi)) in amplitudes.iter_mut().zip([(&phi_a, chi_a), (&phi_b, chi_b)]) {
        let at_d2 = momentum_space_propagate(&chi, flight)?;
        let at_d1 = probe_at_detector(probe, geom, z1_fixed)? * norm;
        *slot = at_d2
            .interpolate(z2_grid)?
            .into_iter()
            .map(|v| at_d1 * v)
            .collect();
    }
    Ok(NumericBranches {
        geometry: *geom,
        z1_fixed,
        z2: z2_grid.to_vec(),
        amplitudes,
        pass_probability,
        source_points: [n1, n2],
    })
}

/// Coincidence pattern rebuilt on grids; see [`numeric_branches`].
pub fn pattern_numeric(
    geom: &Geometry,
    det: &DetectorModel,
    z1_fixed: f64,
    z2_grid: &[f64],
    mode: NormalizationMode,
) -> Result<Pattern> {
    numeric_branches(geom, z1_fixed, z2_grid)?.pattern(det, mode)
}
