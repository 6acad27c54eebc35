//! Uniform periodic grids, sampling, FFT free evolution and quadrature.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::gaussian::{BipartiteGaussianState, EvolutionParam, GaussianPacket};

/// Largest admissible energy fraction near the band edge or the window edge.
pub const LEAKAGE_TOLERANCE: f64 = 1e-10;

/// Largest grid the oracle will allocate along one axis.
pub const MAX_POINTS: usize = 1 << 22;

/// Complex samples at `x_i = -half_extent + i h`, `h = 2 half_extent / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    half_extent: f64,
    samples: Vec<C64>,
}

/// Complex samples on a product grid; z1 runs fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    half_extent: [f64; 2],
    n: [usize; 2],
    samples: Vec<C64>,
}

fn check_axis(half_extent: f64, n: usize) -> Result<()> {
    if !(half_extent > 0.0) || !half_extent.is_finite() {
        return Err(Error::Domain(format!("half extent must be positive, got {half_extent}")));
    }
    if n < 4 || !n.is_power_of_two() || n > MAX_POINTS {
        return Err(Error::Domain(format!(
            "point count must be a power of two in [4, {MAX_POINTS}], got {n}"
        )));
    }
    Ok(())
}

fn axis_points(half_extent: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    let h = 2.0 * half_extent / n as f64;
    (0..n).map(move |i| -half_extent + i as f64 * h)
}

fn signed_index(m: usize, n: usize) -> f64 {
    if m <= n / 2 {
        m as f64
    } else {
        m as f64 - n as f64
    }
}

impl Grid1D {
    pub fn new(half_extent: f64, samples: Vec<C64>) -> Result<Self> {
        check_axis(half_extent, samples.len())?;
        Ok(Grid1D { half_extent, samples })
    }

    pub fn from_fn(half_extent: f64, n: usize, f: impl Fn(f64) -> C64 + Sync) -> Result<Self> {
        check_axis(half_extent, n)?;
        let h = 2.0 * half_extent / n as f64;
        let samples = (0..n)
            .into_par_iter()
            .map(|i| f(-half_extent + i as f64 * h))
            .collect();
        Ok(Grid1D { half_extent, samples })
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn n_points(&self) -> usize {
        self.samples.len()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.samples.len() as f64
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn points(&self) -> Vec<f64> {
        axis_points(self.half_extent, self.samples.len()).collect()
    }

    /// Periodic trapezoid rule for `int |psi|^2`.
    pub fn norm_sq(&self) -> f64 {
        self.spacing() * self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// Trigonometric interpolation of the samples at arbitrary points.
    pub fn interpolate(&self, points: &[f64]) -> Result<Vec<C64>> {
        let lo = -self.half_extent;
        let hi = self.half_extent;
        if let Some(z) = points.iter().find(|z| !(**z >= lo && **z <= hi)) {
            return Err(Error::Resolution {
                reason: format!("interpolation point {z} outside grid [{lo}, {hi}]"),
                suggested_points: 2 * self.n_points(),
            });
        }
        let n = self.n_points();
        let mut coeffs = self.samples.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut coeffs);
        let scale = 1.0 / n as f64;
        let dq = PI / self.half_extent;
        let nyquist = n / 2;
        Ok(points
            .par_iter()
            .map(|&z| {
                let u = z - lo;
                let step = C64::from_polar(1.0, dq * u);
                let mut acc = C64::new(0.0, 0.0);
                let mut phase = C64::new(1.0, 0.0);
                for (m, c) in coeffs.iter().enumerate().take(nyquist) {
                    // re-anchor the recurrence to keep rounding at the 1e-15 level
                    if m % 64 == 0 {
                        phase = C64::from_polar(1.0, dq * u * m as f64);
                    }
                    acc += c * phase;
                    phase *= step;
                }
                let back = step.conj();
                let mut phase = back;
                for k in 1..nyquist {
                    if k % 64 == 0 {
                        phase = C64::from_polar(1.0, -dq * u * k as f64);
                    }
                    acc += coeffs[n - k] * phase;
                    phase *= back;
                }
                acc += coeffs[nyquist] * (dq * u * nyquist as f64).cos();
                acc * scale
            })
            .collect())
    }
}

impl Grid2D {
    pub fn from_fn(
        half_extent: [f64; 2],
        n: [usize; 2],
        f: impl Fn(f64, f64) -> C64 + Sync,
    ) -> Result<Self> {
        check_axis(half_extent[0], n[0])?;
        check_axis(half_extent[1], n[1])?;
        let z1: Vec<f64> = axis_points(half_extent[0], n[0]).collect();
        let z2: Vec<f64> = axis_points(half_extent[1], n[1]).collect();
        let mut samples = vec![C64::new(0.0, 0.0); n[0] * n[1]];
        samples
            .par_chunks_mut(n[0])
            .zip(z2.par_iter())
            .for_each(|(row, &y)| {
                for (v, &x) in row.iter_mut().zip(&z1) {
                    *v = f(x, y);
                }
            });
        Ok(Grid2D {
            half_extent,
            n,
            samples,
        })
    }

    pub fn half_extent(&self) -> [f64; 2] {
        self.half_extent
    }

    pub fn n_points(&self) -> [usize; 2] {
        self.n
    }

    pub fn spacing(&self) -> [f64; 2] {
        [
            2.0 * self.half_extent[0] / self.n[0] as f64,
            2.0 * self.half_extent[1] / self.n[1] as f64,
        ]
    }

    pub fn axis(&self, k: usize) -> Vec<f64> {
        axis_points(self.half_extent[k], self.n[k]).collect()
    }

    /// Sample at `(z1_i, z2_j)`.
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.samples[j * self.n[0] + i]
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn norm_sq(&self) -> f64 {
        let [h1, h2] = self.spacing();
        h1 * h2 * self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// `h1 sum_i w_i Psi(z1_i, z2_j)` for every `j`.
    pub(crate) fn contract_z1(&self, weights: &[C64]) -> Vec<C64> {
        let h1 = self.spacing()[0];
        self.samples
            .par_chunks(self.n[0])
            .map(|row| h1 * row.iter().zip(weights).map(|(p, w)| p * w).sum::<C64>())
            .collect()
    }
}

fn band_edge_fraction(spectrum: &[C64]) -> f64 {
    let n = spectrum.len();
    let total: f64 = spectrum.iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let edge: f64 = spectrum
        .iter()
        .enumerate()
        .filter(|(m, _)| signed_index(*m, n).abs() > 3.0 * n as f64 / 8.0)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    edge / total
}

fn window_edge_fraction(samples: &[C64]) -> f64 {
    let n = samples.len();
    let total: f64 = samples.iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let m = (n / 16).max(1);
    let edge: f64 = samples[..m]
        .iter()
        .chain(&samples[n - m..])
        .map(|c| c.norm_sqr())
        .sum();
    edge / total
}

fn check_window(samples: &[C64], what: &str) -> Result<()> {
    let f = window_edge_fraction(samples);
    if f > LEAKAGE_TOLERANCE {
        return Err(Error::Resolution {
            reason: format!("{what}: {f:.3e} of the norm lies at the window edge; widen the grid"),
            suggested_points: 2 * samples.len(),
        });
    }
    Ok(())
}

fn check_band(spectrum: &[C64], what: &str) -> Result<()> {
    let f = band_edge_fraction(spectrum);
    if f > LEAKAGE_TOLERANCE {
        return Err(Error::Resolution {
            reason: format!("{what}: {f:.3e} of the norm lies at the band edge; refine the grid"),
            suggested_points: 2 * spectrum.len(),
        });
    }
    Ok(())
}

/// Samples `packet` on `n` points over `[-half_extent, half_extent)`.
///
/// Fails with a resolution error when the packet reaches the window edge or
/// the band edge of the grid.
pub fn sample_packet(packet: &GaussianPacket, half_extent: f64, n: usize) -> Result<Grid1D> {
    let grid = Grid1D::from_fn(half_extent, n, |z| packet.evaluate(z))?;
    check_window(&grid.samples, "packet sampling")?;
    let mut spectrum = grid.samples.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut spectrum);
    check_band(&spectrum, "packet sampling")?;
    Ok(grid)
}

/// Samples `state` on the product grid with the same checks as
/// [`sample_packet`], applied to every row and column.
pub fn sample_bipartite(
    state: &BipartiteGaussianState,
    half_extent: [f64; 2],
    n: [usize; 2],
) -> Result<Grid2D> {
    let grid = Grid2D::from_fn(half_extent, n, |z1, z2| state.evaluate(z1, z2))?;
    let [n1, n2] = n;
    let column = |i: usize| -> Vec<C64> { (0..n2).map(|j| grid.at(i, j)).collect() };
    let marginal1: Vec<C64> = (0..n1)
        .map(|i| C64::new(column(i).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(), 0.0))
        .collect();
    let marginal2: Vec<C64> = grid
        .samples
        .chunks(n1)
        .map(|row| C64::new(row.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(), 0.0))
        .collect();
    check_window(&marginal1, "bipartite sampling along z1")?;
    check_window(&marginal2, "bipartite sampling along z2")?;
    let spectral = propagate_2d_unchecked(&grid, None);
    check_band(&spectral.0, "bipartite sampling along z1")?;
    check_band(&spectral.1, "bipartite sampling along z2")?;
    Ok(grid)
}

fn free_phase(spectrum: &mut [C64], half_extent: f64, tau: f64) {
    let n = spectrum.len();
    let dq = PI / half_extent;
    for (m, c) in spectrum.iter_mut().enumerate() {
        let q = signed_index(m, n) * dq;
        *c *= C64::from_polar(1.0, -0.5 * q * q * tau);
    }
}

/// Free evolution by `tau` through the discrete Fourier transform: each
/// plane wave `e^{iqz}` picks up `e^{-i q^2 tau / 2}`.
///
/// Fails when the input has appreciable weight at the band edge (aliasing)
/// or the result reaches the window edge (wrap-around).
pub fn momentum_space_propagate(grid: &Grid1D, tau: EvolutionParam) -> Result<Grid1D> {
    let n = grid.n_points();
    let mut planner = FftPlanner::new();
    let mut buf = grid.samples.clone();
    planner.plan_fft_forward(n).process(&mut buf);
    check_band(&buf, "momentum-space propagation")?;
    free_phase(&mut buf, grid.half_extent, tau.value());
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in &mut buf {
        *v *= scale;
    }
    check_window(&buf, "momentum-space propagation")?;
    Ok(Grid1D {
        half_extent: grid.half_extent,
        samples: buf,
    })
}

/// Marginal spectra along each axis (for band checks) and, when `tau` is
/// given, the grid evolved by `tau` in both coordinates.
fn propagate_2d_unchecked(grid: &Grid2D, tau: Option<f64>) -> (Vec<C64>, Vec<C64>, Option<Grid2D>) {
    let [n1, n2] = grid.n;
    let mut planner = FftPlanner::new();
    let (f1, i1) = (planner.plan_fft_forward(n1), planner.plan_fft_inverse(n1));
    let (f2, i2) = (planner.plan_fft_forward(n2), planner.plan_fft_inverse(n2));
    let mut data = grid.samples.clone();
    data.par_chunks_mut(n1).for_each(|row| f1.process(row));
    // transpose so z2 runs fastest
    let mut t = vec![C64::new(0.0, 0.0); n1 * n2];
    t.par_chunks_mut(n2).enumerate().for_each(|(i, col)| {
        for (j, v) in col.iter_mut().enumerate() {
            *v = data[j * n1 + i];
        }
    });
    t.par_chunks_mut(n2).for_each(|col| f2.process(col));
    let mut energy1 = vec![0.0; n1];
    let mut energy2 = vec![0.0; n2];
    for (i, col) in t.chunks(n2).enumerate() {
        for (j, v) in col.iter().enumerate() {
            let e = v.norm_sqr();
            energy1[i] += e;
            energy2[j] += e;
        }
    }
    let spec1 = energy1.into_iter().map(|e| C64::new(e.sqrt(), 0.0)).collect();
    let spec2 = energy2.into_iter().map(|e| C64::new(e.sqrt(), 0.0)).collect();
    let Some(tau) = tau else {
        return (spec1, spec2, None);
    };
    let dq1 = PI / grid.half_extent[0];
    let dq2 = PI / grid.half_extent[1];
    t.par_chunks_mut(n2).enumerate().for_each(|(i, col)| {
        let q1 = signed_index(i, n1) * dq1;
        for (j, v) in col.iter_mut().enumerate() {
            let q2 = signed_index(j, n2) * dq2;
            *v *= C64::from_polar(1.0, -0.5 * (q1 * q1 + q2 * q2) * tau);
        }
        i2.process(col);
    });
    data.par_chunks_mut(n1).enumerate().for_each(|(j, row)| {
        for (i, v) in row.iter_mut().enumerate() {
            *v = t[i * n2 + j];
        }
        i1.process(row);
    });
    let scale = 1.0 / (n1 * n2) as f64;
    data.par_iter_mut().for_each(|v| *v *= scale);
    let out = Grid2D {
        half_extent: grid.half_extent,
        n: grid.n,
        samples: data,
    };
    (spec1, spec2, Some(out))
}

/// Free evolution of both particles by `tau` on a product grid.
pub fn momentum_space_propagate_2d(grid: &Grid2D, tau: EvolutionParam) -> Result<Grid2D> {
    let (spec1, spec2, out) = propagate_2d_unchecked(grid, Some(tau.value()));
    check_band(&spec1, "momentum-space propagation along z1")?;
    check_band(&spec2, "momentum-space propagation along z2")?;
    let out = out.expect("propagated grid");
    let [n1, _] = out.n;
    let marginal = |k: usize| -> Vec<C64> {
        let len = out.n[k];
        let mut e = vec![0.0; len];
        for (j, row) in out.samples.chunks(n1).enumerate() {
            for (i, v) in row.iter().enumerate() {
                e[if k == 0 { i } else { j }] += v.norm_sqr();
            }
        }
        e.into_iter().map(|x| C64::new(x.sqrt(), 0.0)).collect()
    };
    check_window(&marginal(0), "momentum-space propagation along z1")?;
    check_window(&marginal(1), "momentum-space propagation along z2")?;
    Ok(out)
}

/// `int dz1 conj(probe(z1)) Psi(z1, z2)` by the trapezoid rule, for every
/// z2 sample of the grid.
pub fn quadrature_project(grid: &Grid2D, probe: &GaussianPacket) -> Result<Grid1D> {
    let z1 = grid.axis(0);
    let weights: Vec<C64> = z1.iter().map(|&x| probe.evaluate(x).conj()).collect();
    check_window(&weights, "projection probe")?;
    Ok(Grid1D {
        half_extent: grid.half_extent[1],
        samples: grid.contract_z1(&weights),
    })
}
