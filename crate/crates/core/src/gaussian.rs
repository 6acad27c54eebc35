//! Closed-form algebra for one- and two-coordinate complex Gaussian
//! wavefunctions.
//!
//! Natural units are used throughout: `hbar = m = 1`, so time only enters
//! through the evolution parameter `tau = hbar t / m` (a length squared).
//! Free evolution of `exp[-(z - c)^2 / beta]` maps `beta -> beta + 2 i tau`.
//!
//! Internally every Gaussian is handled as an exponent polynomial
//! `-a z^2 + b z + g` (or its two-coordinate analogue); the public types keep
//! the centre/width parametrisation.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::Add;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Free-evolution parameter `tau = hbar t / m` (units of length squared).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct EvolutionParam(f64);

impl EvolutionParam {
    pub const ZERO: EvolutionParam = EvolutionParam(0.0);

    pub fn new(tau: f64) -> Result<Self> {
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::domain(format!(
                "evolution parameter must be finite and non-negative, got {tau}"
            )));
        }
        Ok(EvolutionParam(tau))
    }

    /// `tau` accumulated by a particle of de Broglie wavelength `wavelength`
    /// that travels `length` along the beam axis: `lambda * L / 2 pi`.
    pub fn from_path_length(wavelength: f64, length: f64) -> Result<Self> {
        if !(wavelength > 0.0) || !(length >= 0.0) {
            return Err(Error::domain(format!(
                "wavelength must be positive and path length non-negative (got {wavelength}, {length})"
            )));
        }
        Self::new(wavelength * length / (2.0 * PI))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Add for EvolutionParam {
    type Output = EvolutionParam;

    fn add(self, rhs: Self) -> Self {
        EvolutionParam(self.0 + rhs.0)
    }
}

/// Exponent polynomial `-a z^2 + b z + g` of a one-coordinate Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Quadratic {
    pub a: C64,
    pub b: C64,
    pub g: C64,
}

/// One-coordinate complex Gaussian amplitude
///
/// `psi(z) = exp[log_coeff - (z - center)^2 / width + i k (z - center)]`
///
/// where `k` is the linear phase. `width` is the complex `beta` parameter and
/// must have a positive real part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    log_coeff: C64,
    center: f64,
    width: C64,
    linear_phase: f64,
}

impl GaussianPacket {
    pub fn new(log_coeff: C64, center: f64, width: C64, linear_phase: f64) -> Result<Self> {
        let finite = log_coeff.re.is_finite()
            && log_coeff.im.is_finite()
            && center.is_finite()
            && width.re.is_finite()
            && width.im.is_finite()
            && linear_phase.is_finite();
        if !finite {
            return Err(Error::domain("packet parameters must be finite"));
        }
        if !(width.re > 0.0) {
            return Err(Error::domain(format!(
                "packet width must have a positive real part, got {width}"
            )));
        }
        Ok(GaussianPacket {
            log_coeff,
            center,
            width,
            linear_phase,
        })
    }

    /// Unit-norm packet with real amplitude at its centre and no linear phase.
    pub fn normalized(center: f64, width: C64) -> Result<Self> {
        let p = Self::new(C64::new(0.0, 0.0), center, width, 0.0)?;
        Ok(p.normalize())
    }

    pub fn log_coeff(&self) -> C64 {
        self.log_coeff
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> C64 {
        self.width
    }

    pub fn linear_phase(&self) -> f64 {
        self.linear_phase
    }

    pub fn evaluate(&self, z: f64) -> C64 {
        let x = z - self.center;
        (self.log_coeff - x * x / self.width + I * (self.linear_phase * x)).exp()
    }

    /// `<psi|psi>`.
    pub fn norm_sq(&self) -> f64 {
        let re_a = (1.0 / self.width).re;
        (2.0 * self.log_coeff.re).exp() * (PI / (2.0 * re_a)).sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalize(self) -> Self {
        let re_a = (1.0 / self.width).re;
        // log of sqrt(norm_sq) without forming the (possibly tiny) norm itself
        let log_norm = self.log_coeff.re + 0.25 * (PI / (2.0 * re_a)).ln();
        GaussianPacket {
            log_coeff: self.log_coeff - log_norm,
            ..self
        }
    }

    /// Multiplies the amplitude by a non-zero complex factor.
    pub fn scaled(self, factor: C64) -> Self {
        GaussianPacket {
            log_coeff: self.log_coeff + factor.ln(),
            ..self
        }
    }

    /// The packet reflected through the origin, `psi(-z)`.
    pub fn mirrored(self) -> Self {
        GaussianPacket {
            center: -self.center,
            linear_phase: -self.linear_phase,
            ..self
        }
    }

    /// `<self|other>` in closed form.
    pub fn overlap(&self, other: &GaussianPacket) -> C64 {
        let p = self.quadratic();
        let q = other.quadratic();
        let a = p.a.conj() + q.a;
        let b = p.b.conj() + q.b;
        let g = p.g.conj() + q.g;
        (g + b * b / (4.0 * a) + 0.5 * (PI / a).ln()).exp()
    }

    /// Free evolution under `H = p^2 / 2` for the given `tau`.
    pub fn free_evolve(&self, tau: EvolutionParam) -> GaussianPacket {
        if tau.value() == 0.0 {
            return *self;
        }
        let q = self.quadratic();
        let t = I * (2.0 * tau.value());
        let denom = 1.0 + t * q.a;
        let evolved = Quadratic {
            a: q.a / denom,
            b: q.b / denom,
            g: q.g + 0.25 * t * q.b * q.b / denom - 0.5 * denom.ln(),
        };
        Self::from_quadratic(evolved).expect("free evolution keeps Re(width) > 0")
    }

    pub(crate) fn quadratic(&self) -> Quadratic {
        let a = 1.0 / self.width;
        let c = self.center;
        let k = self.linear_phase;
        Quadratic {
            a,
            b: 2.0 * c * a + I * k,
            g: self.log_coeff - a * c * c - I * (k * c),
        }
    }

    pub(crate) fn from_quadratic(q: Quadratic) -> Result<Self> {
        if !(q.a.re > 0.0) {
            return Err(Error::domain(format!(
                "exponent {} z^2 is not normalizable",
                -q.a
            )));
        }
        let center = q.b.re / (2.0 * q.a.re);
        let linear_phase = q.b.im - 2.0 * center * q.a.im;
        let log_coeff = q.g + q.a * center * center + I * (linear_phase * center);
        Self::new(log_coeff, center, 1.0 / q.a, linear_phase)
    }
}

/// Symmetric complex 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix2 {
    pub xx: C64,
    pub xy: C64,
    pub yy: C64,
}

impl SymMatrix2 {
    pub fn trace(&self) -> C64 {
        self.xx + self.yy
    }

    pub fn det(&self) -> C64 {
        self.xx * self.yy - self.xy * self.xy
    }

    fn real_part_positive_definite(&self) -> bool {
        self.xx.re > 0.0 && self.xx.re * self.yy.re - self.xy.re * self.xy.re > 0.0
    }

    /// Both eigenvalues, larger-magnitude root first.
    fn eigenvalues(&self) -> (C64, C64) {
        let half_tr = 0.5 * self.trace();
        let disc = (half_tr * half_tr - self.det()).sqrt();
        // pick the sign that avoids cancellation, recover the other from det
        let big = if (half_tr + disc).norm() >= (half_tr - disc).norm() {
            half_tr + disc
        } else {
            half_tr - disc
        };
        if big.norm() == 0.0 {
            return (big, big);
        }
        (big, self.det() / big)
    }
}

/// Two-coordinate complex Gaussian
///
/// `Psi(z1, z2) = exp[-z^T Q z + l^T z + log_coeff]`, `z = (z1, z2)`,
/// with `Re Q` positive definite.
///
/// Internally the form is held in the coordinates `u = (z1 + z2)/sqrt 2`,
/// `v = (z1 - z2)/sqrt 2`, where correlated pairs are nearly diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteGaussianState {
    rot: SymMatrix2,
    rot_lin: [C64; 2],
    log_coeff: C64,
}

/// The 45 degree rotation is its own inverse, so one map serves both ways.
fn rotate_form(q: &SymMatrix2) -> SymMatrix2 {
    let mean = 0.5 * (q.xx + q.yy);
    SymMatrix2 {
        xx: mean + q.xy,
        xy: 0.5 * (q.xx - q.yy),
        yy: mean - q.xy,
    }
}

fn rotate_vec(l: [C64; 2]) -> [C64; 2] {
    [(l[0] + l[1]) * FRAC_1_SQRT_2, (l[0] - l[1]) * FRAC_1_SQRT_2]
}

impl BipartiteGaussianState {
    pub fn new(quad: SymMatrix2, lin: [C64; 2], log_coeff: C64) -> Result<Self> {
        Self::from_rotated(rotate_form(&quad), rotate_vec(lin), log_coeff)
    }

    fn from_rotated(rot: SymMatrix2, rot_lin: [C64; 2], log_coeff: C64) -> Result<Self> {
        if !rot.real_part_positive_definite() {
            return Err(Error::domain(
                "real part of the quadratic form must be positive definite",
            ));
        }
        Ok(BipartiteGaussianState {
            rot,
            rot_lin,
            log_coeff,
        })
    }

    pub fn quad(&self) -> SymMatrix2 {
        rotate_form(&self.rot)
    }

    pub fn lin(&self) -> [C64; 2] {
        rotate_vec(self.rot_lin)
    }

    pub fn log_coeff(&self) -> C64 {
        self.log_coeff
    }

    pub fn evaluate(&self, z1: f64, z2: f64) -> C64 {
        let u = (z1 + z2) * FRAC_1_SQRT_2;
        let v = (z1 - z2) * FRAC_1_SQRT_2;
        let q = &self.rot;
        let form = q.xx * (u * u) + q.xy * (2.0 * u * v) + q.yy * (v * v);
        (self.log_coeff - form + self.rot_lin[0] * u + self.rot_lin[1] * v).exp()
    }

    /// `<Psi|Psi>`.
    pub fn norm_sq(&self) -> f64 {
        let (m11, m12, m22) = (
            2.0 * self.rot.xx.re,
            2.0 * self.rot.xy.re,
            2.0 * self.rot.yy.re,
        );
        let (v1, v2) = (2.0 * self.rot_lin[0].re, 2.0 * self.rot_lin[1].re);
        let det = m11 * m22 - m12 * m12;
        // v^T M^{-1} v via the adjugate
        let quad_form = (m22 * v1 * v1 - 2.0 * m12 * v1 * v2 + m11 * v2 * v2) / det;
        (2.0 * self.log_coeff.re + 0.25 * quad_form).exp() * PI / det.sqrt()
    }

    pub fn normalize(self) -> Self {
        let log_norm = 0.5 * self.norm_sq().ln();
        BipartiteGaussianState {
            log_coeff: self.log_coeff - log_norm,
            ..self
        }
    }

    pub fn scaled(self, factor: C64) -> Self {
        BipartiteGaussianState {
            log_coeff: self.log_coeff + factor.ln(),
            ..self
        }
    }

    /// Free evolution of both coordinates under `H = p1^2/2 + p2^2/2`.
    ///
    /// With `T = 1 + 2 i tau Q` the evolved form is `Q' = Q T^-1`,
    /// `l' = T^-1 l`, and the log-coefficient gains
    /// `(i tau / 2) l^T T^-1 l - log det(T) / 2`. `Q^-1` is never formed, which
    /// keeps strongly correlated states (`Omega sigma >> 1`) well conditioned.
    pub fn free_evolve(&self, tau: EvolutionParam) -> BipartiteGaussianState {
        if tau.value() == 0.0 {
            return *self;
        }
        // the kinetic term is rotation invariant, so this runs in (u, v)
        let q = &self.rot;
        let t = I * (2.0 * tau.value());
        let det_q = q.det();
        let t11 = 1.0 + t * q.xx;
        let t12 = t * q.xy;
        let t22 = 1.0 + t * q.yy;
        let det_t = t11 * t22 - t12 * t12;

        let rot = SymMatrix2 {
            xx: (q.xx + t * det_q) / det_t,
            xy: q.xy / det_t,
            yy: (q.yy + t * det_q) / det_t,
        };
        let [l1, l2] = self.rot_lin;
        let rot_lin = [(t22 * l1 - t12 * l2) / det_t, (t11 * l2 - t12 * l1) / det_t];
        let l_tinv_l = l1 * rot_lin[0] + l2 * rot_lin[1];

        // each factor 1 + 2 i tau lambda stays in the upper half plane, so the
        // principal logarithm is continuous in tau
        let (lam1, lam2) = q.eigenvalues();
        let log_det_t = (1.0 + t * lam1).ln() + (1.0 + t * lam2).ln();

        let log_coeff = self.log_coeff + 0.25 * t * l_tinv_l - 0.5 * log_det_t;
        BipartiteGaussianState::from_rotated(rot, rot_lin, log_coeff)
            .expect("free evolution keeps Re Q positive definite")
    }

    /// Amplitude of particle 2 conditioned on particle 1 being found in
    /// `probe`: `psi(z2) = integral conj(probe(z1)) Psi(z1, z2) dz1`.
    ///
    /// The result is unnormalized; its squared norm is the probability of the
    /// projection.
    pub fn project_particle1(&self, probe: &GaussianPacket) -> GaussianPacket {
        let p = probe.quadratic();
        let q = self.quad();
        let lin = self.lin();
        let pa = p.a.conj();
        let a = q.xx + pa;
        let b = lin[0] + p.b.conj();
        let out = Quadratic {
            // q.yy - q.xy^2 / a, with det Q taken from the rotated form
            a: (self.rot.det() + q.yy * pa) / a,
            b: lin[1] - q.xy * b / a,
            g: self.log_coeff + p.g.conj() + b * b / (4.0 * a) + 0.5 * (PI / a).ln(),
        };
        GaussianPacket::from_quadratic(out).expect("marginal of a normalizable form is normalizable")
    }
}

/// Normalized generalized EPR state
///
/// `Psi(z1, z2) = sqrt(2 sigma / (pi Omega)) exp[-(z1 - z2)^2 sigma^2 - (z1 + z2)^2 / 4 Omega^2]`.
///
/// `sigma` controls the momentum correlation and `Omega` the spread of the
/// pair's centre of mass.
pub fn make_epr(sigma: f64, omega: f64) -> Result<BipartiteGaussianState> {
    if !(sigma > 0.0 && sigma.is_finite()) || !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain(format!(
            "sigma and omega must be positive (got sigma = {sigma}, omega = {omega})"
        )));
    }
    // diagonal in (u, v): exponent -u^2 / (2 Omega^2) - 2 sigma^2 v^2
    let rot = SymMatrix2 {
        xx: C64::new(0.5 / (omega * omega), 0.0),
        xy: C64::new(0.0, 0.0),
        yy: C64::new(2.0 * sigma * sigma, 0.0),
    };
    let log_coeff = C64::new(0.5 * (2.0 * sigma / (PI * omega)).ln(), 0.0);
    BipartiteGaussianState::from_rotated(rot, [C64::new(0.0, 0.0); 2], log_coeff)
}

/// See [`BipartiteGaussianState::project_particle1`].
pub fn project_particle1(state: &BipartiteGaussianState, probe: &GaussianPacket) -> GaussianPacket {
    state.project_particle1(probe)
}
