use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gaussian::EvolutionParam;

/// Source, slit and detector layout. All lengths share one arbitrary unit.
///
/// Particle 1 flies `l2` from the source to the double slit and then `l1` to
/// the fixed detector D1. Particle 2 covers the same total distance towards
/// the scanning detector D2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Momentum-correlation parameter of the pair (inverse length).
    pub sigma: f64,
    /// Position spread of the pair's centre of mass.
    pub omega: f64,
    /// Slit width parameter.
    pub epsilon: f64,
    /// Slit half-separation; the slits sit at `+z0` and `-z0`.
    pub z0: f64,
    pub wavelength: f64,
    /// Slit to detector distance.
    pub l1: f64,
    /// Source to slit distance.
    pub l2: f64,
}

impl Geometry {
    pub fn new(
        sigma: f64,
        omega: f64,
        epsilon: f64,
        z0: f64,
        wavelength: f64,
        l1: f64,
        l2: f64,
    ) -> Result<Self> {
        let g = Geometry {
            sigma,
            omega,
            epsilon,
            z0,
            wavelength,
            l1,
            l2,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named_fields() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn named_fields(&self) -> [(&'static str, f64); 7] {
        [
            ("sigma", self.sigma),
            ("omega", self.omega),
            ("epsilon", self.epsilon),
            ("z0", self.z0),
            ("lambda", self.wavelength),
            ("L1", self.l1),
            ("L2", self.l2),
        ]
    }

    /// `d = 2 z0`.
    pub fn slit_separation(&self) -> f64 {
        2.0 * self.z0
    }

    /// `D = L1 + 2 L2`.
    pub fn total_path(&self) -> f64 {
        self.l1 + 2.0 * self.l2
    }

    /// `gamma^2 = epsilon^2 + 1/sigma^2`.
    pub fn gamma_sq(&self) -> f64 {
        self.epsilon * self.epsilon + 1.0 / (self.sigma * self.sigma)
    }

    pub fn tau_to_slit(&self) -> EvolutionParam {
        EvolutionParam::from_path_length(self.wavelength, self.l2).expect("validated geometry")
    }

    pub fn tau_after_slit(&self) -> EvolutionParam {
        EvolutionParam::from_path_length(self.wavelength, self.l1).expect("validated geometry")
    }

    /// Large-Omega formulas are trusted when `Omega >= 100 max(epsilon, 1/sigma)`.
    pub fn approx_valid(&self) -> bool {
        self.omega >= 100.0 * self.epsilon.max(1.0 / self.sigma)
    }

    pub(crate) fn require_approx(&self, what: &str) -> Result<()> {
        self.validate()?;
        if !self.approx_valid() {
            return Err(Error::Regime(format!(
                "{what} needs omega >= 100 max(epsilon, 1/sigma) = {}, got omega = {}",
                100.0 * self.epsilon.max(1.0 / self.sigma),
                self.omega
            )));
        }
        Ok(())
    }

    /// `gamma^2 + (lambda D / pi gamma)^2`, the squared envelope scale of the
    /// coincidence pattern in the large-Omega limit.
    pub fn envelope_scale_sq(&self) -> f64 {
        let g2 = self.gamma_sq();
        let ld = self.wavelength * self.total_path() / PI;
        g2 + ld * ld / g2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_lengths() {
        let g = Geometry::new(2.0, 50.0, 0.25, 1.0, 0.01, 100.0, 50.0).unwrap();
        assert_eq!(g.total_path(), 200.0);
        assert_eq!(g.slit_separation(), 2.0);
        assert!((g.gamma_sq() - 0.3125).abs() < 1e-15);
        assert!((g.tau_to_slit().value() - 0.5 / (2.0 * PI)).abs() < 1e-15);
        assert!(g.approx_valid());
        let g = Geometry { omega: 49.9, ..g };
        assert!(!g.approx_valid());
    }

    #[test]
    fn rejects_non_positive_fields() {
        assert!(Geometry::new(-1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(Geometry::new(1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(Geometry::new(1.0, 1.0, 1.0, 1.0, f64::INFINITY, 1.0, 1.0).is_err());
    }
}
