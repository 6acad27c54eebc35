//! Double-slit projection of particle 1 and the which-path branches it
//! leaves behind.

use num_complex::Complex64 as C64;

use super::{DetectorModel, Geometry};
use crate::error::{Error, Result};
use crate::gaussian::{make_epr, BipartiteGaussianState, EvolutionParam, GaussianPacket};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Detector state correlated with a branch: `D1` for slit A, `D2` for slit B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectorTag {
    D1,
    D2,
}

/// One term `weight |d> |particle1> |particle2>` of the post-slit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub weight: C64,
    pub tag: DetectorTag,
    pub particle1: GaussianPacket,
    pub particle2: GaussianPacket,
}

impl Branch {
    pub fn norm_sq(&self) -> f64 {
        self.weight.norm_sqr() * self.particle1.norm_sq() * self.particle2.norm_sq()
    }

    pub fn amplitude(&self, z1: f64, z2: f64) -> C64 {
        self.weight * self.particle1.evaluate(z1) * self.particle2.evaluate(z2)
    }

    fn free_evolve(&self, tau: EvolutionParam) -> Branch {
        Branch {
            particle1: self.particle1.free_evolve(tau),
            particle2: self.particle2.free_evolve(tau),
            ..*self
        }
    }
}

/// Pair state after particle 1 made it through the double slit.
///
/// The blocked amplitude is discarded and the two surviving branches are
/// renormalized so that their norms (cross term excluded) sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchedState {
    branches: [Branch; 2],
    pass_probability: f64,
    geometry: Geometry,
    detector: DetectorModel,
    overlapping_slits: bool,
}

impl BranchedState {
    /// Slit A (`D1`) branch first, slit B (`D2`) second.
    pub fn branches(&self) -> &[Branch; 2] {
        &self.branches
    }

    /// Probability that particle 1 passes the slits, before renormalization.
    pub fn pass_probability(&self) -> f64 {
        self.pass_probability
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn detector(&self) -> &DetectorModel {
        &self.detector
    }

    /// Set when the two slit packets overlap appreciably, so the branch
    /// renormalization that ignores `<phiA|phiB>` is no longer accurate.
    pub fn overlapping_slits(&self) -> bool {
        self.overlapping_slits
    }

    /// Sum of branch norms, cross terms excluded. One after renormalization.
    pub fn branch_norm_total(&self) -> f64 {
        self.branches.iter().map(Branch::norm_sq).sum()
    }

    /// Full norm of the state including the
    /// `2 Re <d1|d2> <phiA|phiB> <psiA|psiB>` interference term.
    pub fn exact_norm_sq(&self, det: &DetectorModel) -> f64 {
        let [a, b] = &self.branches;
        let cross = det.overlap()
            * a.weight.conj()
            * b.weight
            * a.particle1.overlap(&b.particle1)
            * a.particle2.overlap(&b.particle2);
        self.branch_norm_total() + 2.0 * cross.re
    }

    /// Amplitudes multiplying `|d1>` and `|d2>` at `(z1, z2)`.
    pub fn amplitudes(&self, z1: f64, z2: f64) -> [C64; 2] {
        [
            self.branches[0].amplitude(z1, z2),
            self.branches[1].amplitude(z1, z2),
        ]
    }
}

/// Unit-norm slit transmission packets `phiA` (at `+z0`) and `phiB` (at `-z0`).
pub fn slit_probes(geom: &Geometry) -> Result<(GaussianPacket, GaussianPacket)> {
    geom.validate()?;
    let width = C64::new(geom.epsilon * geom.epsilon, 0.0);
    Ok((
        GaussianPacket::normalized(geom.z0, width)?,
        GaussianPacket::normalized(-geom.z0, width)?,
    ))
}

/// Projects particle 1 onto the two slit packets and entangles each branch
/// with its which-path detector state.
pub fn apply_double_slit(
    state_at_slit: &BipartiteGaussianState,
    geom: &Geometry,
    det: &DetectorModel,
) -> Result<BranchedState> {
    let (phi_a, phi_b) = slit_probes(geom)?;
    let psi_a = state_at_slit.project_particle1(&phi_a);
    let psi_b = state_at_slit.project_particle1(&phi_b);
    let (na, nb) = (psi_a.norm_sq(), psi_b.norm_sq());
    let pass_probability = na + nb;
    if !(pass_probability > 0.0) || !pass_probability.is_finite() {
        return Err(Error::Domain(format!(
            "no amplitude reaches the slits (pass probability {pass_probability})"
        )));
    }
    let branch = |n: f64, tag, p1, p2: GaussianPacket| Branch {
        weight: C64::new((n / pass_probability).sqrt(), 0.0),
        tag,
        particle1: p1,
        particle2: p2.normalize(),
    };
    Ok(BranchedState {
        branches: [
            branch(na, DetectorTag::D1, phi_a, psi_a),
            branch(nb, DetectorTag::D2, phi_b, psi_b),
        ],
        pass_probability,
        geometry: *geom,
        detector: *det,
        overlapping_slits: phi_a.overlap(&phi_b).norm() > 1e-3,
    })
}

/// Free flight of both particles in every branch; weights are untouched.
pub fn propagate_branches(bs: &BranchedState, tau: EvolutionParam) -> BranchedState {
    BranchedState {
        branches: [bs.branches[0].free_evolve(tau), bs.branches[1].free_evolve(tau)],
        ..bs.clone()
    }
}

/// Pair state at the slit plane, `Psi(t0)`.
pub fn state_at_slit(geom: &Geometry) -> Result<BipartiteGaussianState> {
    geom.validate()?;
    Ok(make_epr(geom.sigma, geom.omega)?.free_evolve(geom.tau_to_slit()))
}

/// Complete closed-form pipeline: source, flight to the slits, slit
/// projection, and flight to the detectors.
pub fn detector_plane_state(geom: &Geometry, det: &DetectorModel) -> Result<BranchedState> {
    let at_slit = apply_double_slit(&state_at_slit(geom)?, geom, det)?;
    Ok(propagate_branches(&at_slit, geom.tau_after_slit()))
}

fn slit_image(geom: &Geometry) -> Result<GaussianPacket> {
    let (phi_a, _) = slit_probes(geom)?;
    Ok(state_at_slit(geom)?.project_particle1(&phi_a))
}

/// Centre `z0'` of the particle-2 packet heralded by slit A, at the slit plane.
///
/// `exact = false` returns the large-Omega value `z0' = z0` and is refused
/// outside that regime.
pub fn slit_image_center(geom: &Geometry, exact: bool) -> Result<f64> {
    if exact {
        Ok(slit_image(geom)?.center())
    } else {
        geom.require_approx("large-Omega slit image centre")?;
        Ok(geom.z0)
    }
}

/// Width parameter `Gamma` of the heralded particle-2 packet at the slit plane.
///
/// `exact = false` gives `gamma^2 + 4 i tau0`, valid for large Omega.
pub fn gamma_param(geom: &Geometry, exact: bool) -> Result<C64> {
    if exact {
        Ok(slit_image(geom)?.width())
    } else {
        geom.require_approx("large-Omega Gamma")?;
        Ok(geom.gamma_sq() + 4.0 * I * geom.tau_to_slit().value())
    }
}

/// Rational form of the slit image centre
///
/// `z0 / [(4 Omega^2 sigma^2 + 1)/(4 Omega^2 sigma^2 - 1) + 4 epsilon^2 / (4 Omega^2 - 1/sigma^2)]`.
///
/// It is exact when the pair is projected at emission (`tau0 = 0`) and tends
/// to `z0` for large Omega, but drops the `O(tau0 / Omega^2)` shift present for
/// finite flight times.
pub fn slit_image_center_interpolating(geom: &Geometry) -> Result<f64> {
    geom.validate()?;
    let (s2, o2, e2) = (
        geom.sigma * geom.sigma,
        geom.omega * geom.omega,
        geom.epsilon * geom.epsilon,
    );
    let denom = (4.0 * o2 * s2 + 1.0) / (4.0 * o2 * s2 - 1.0) + 4.0 * e2 / (4.0 * o2 - 1.0 / s2);
    Ok(geom.z0 / denom)
}

/// Rational interpolation of `Gamma` between the `tau0 = 0` value and the
/// large-Omega limit `gamma^2 + 4 i tau0`:
///
/// `(eps^2 + 1/sigma^2 + eps^2/(4 Omega^2 sigma^2) + 2 i tau0)
///  / (1 + eps^2/Omega^2 + 2 i tau0/(4 Omega^2) + 1/(4 Omega^2 sigma^2)) + 2 i tau0`.
pub fn gamma_param_interpolating(geom: &Geometry) -> Result<C64> {
    geom.validate()?;
    let (s2, o2, e2) = (
        geom.sigma * geom.sigma,
        geom.omega * geom.omega,
        geom.epsilon * geom.epsilon,
    );
    let t = 2.0 * I * geom.tau_to_slit().value();
    let num = e2 + 1.0 / s2 + e2 / (4.0 * o2 * s2) + t;
    let den = 1.0 + e2 / o2 + t / (4.0 * o2) + 1.0 / (4.0 * o2 * s2);
    Ok(num / den + t)
}
