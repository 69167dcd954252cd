//! Closed-form field kernels: point magnetic dipole, slowly moving point
//! charge, moving dipole, and the exterior potential of an ideal flux string.
//!
//! Gaussian natural units with c = 1. Moving-source fields are kept to first
//! order in the velocity (no retardation).

use std::f64::consts::TAU;

use crate::error::{invalid, Error, Result};
use crate::numerics::Vec3;

/// Field evaluations closer than this to a point source are rejected.
pub const SINGULARITY_RADIUS: f64 = 1e-9;

/// Upper bound on source speeds (units of c).
pub const MAX_SPEED: f64 = 0.1;

fn separation(r: Vec3, source: Vec3) -> Result<(Vec3, f64)> {
    let s = r - source;
    let dist = s.norm();
    if dist < SINGULARITY_RADIUS {
        return Err(Error::Singularity { distance: dist });
    }
    Ok((s, dist))
}

/// Point magnetic dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticDipole {
    pub moment: Vec3,
    pub position: Vec3,
}

impl MagneticDipole {
    pub fn new(moment: Vec3, position: Vec3) -> Self {
        Self { moment, position }
    }

    /// `B = [3(m·s)s - s²m] / s⁵` with `s = r - position`.
    pub fn b_field(&self, r: Vec3) -> Result<Vec3> {
        let (s, dist) = separation(r, self.position)?;
        let r2 = dist * dist;
        let r5 = r2 * r2 * dist;
        Ok((3.0 * self.moment.dot(s) * s - r2 * self.moment) / r5)
    }

    /// `A = m × s / s³`.
    pub fn vector_potential(&self, r: Vec3) -> Result<Vec3> {
        let (s, dist) = separation(r, self.position)?;
        Ok(self.moment.cross(s) / (dist * dist * dist))
    }

    /// Electric field seen in the lab when the dipole moves with velocity
    /// `v`: `E = -v × B`.
    pub fn moving_e_field(&self, v: Vec3, r: Vec3) -> Result<Vec3> {
        Ok(-v.cross(self.b_field(r)?))
    }
}

/// Point charge moving slowly with constant velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovingCharge {
    /// Signed charge; an electron carries a negative value.
    pub charge: f64,
    pub velocity: Vec3,
    pub position: Vec3,
}

impl MovingCharge {
    pub fn new(charge: f64, velocity: Vec3, position: Vec3) -> Result<Self> {
        let speed = velocity.norm();
        if !(speed < MAX_SPEED) {
            return Err(invalid(format!(
                "charge speed {speed} violates the nonrelativistic bound {MAX_SPEED}"
            )));
        }
        if !charge.is_finite() || !position.is_finite() {
            return Err(invalid("charge and position must be finite"));
        }
        Ok(Self {
            charge,
            velocity,
            position,
        })
    }

    /// Coulomb field `q s / s³`.
    pub fn e_field(&self, r: Vec3) -> Result<Vec3> {
        let (s, dist) = separation(r, self.position)?;
        Ok(self.charge / (dist * dist * dist) * s)
    }

    /// `B = v × E`, first order in the velocity.
    pub fn b_field(&self, r: Vec3) -> Result<Vec3> {
        Ok(self.velocity.cross(self.e_field(r)?))
    }
}

/// Infinitely long magnet (or solenoid) of given radius and total flux,
/// axis along z. Its field is confined to `rho < radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxString {
    pub radius: f64,
    pub flux: f64,
}

impl FluxString {
    pub fn new(radius: f64, flux: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!(
                "flux-string radius must be positive, got {radius}"
            )));
        }
        if !flux.is_finite() {
            return Err(invalid("flux must be finite"));
        }
        Ok(Self { radius, flux })
    }

    /// Exterior potential `A_φ = Φ / (2π ρ)`, i.e. `Φ (-y, x, 0) / (2π ρ²)`.
    pub fn vector_potential(&self, r: Vec3) -> Result<Vec3> {
        let rho2 = r.x * r.x + r.y * r.y;
        let rho = rho2.sqrt();
        if rho <= self.radius {
            return Err(Error::InsideMagnet {
                rho,
                radius: self.radius,
            });
        }
        Ok(self.flux / (TAU * rho2) * Vec3::new(-r.y, r.x, 0.0))
    }
}
