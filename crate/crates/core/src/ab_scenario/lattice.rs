use std::f64::consts::{PI, TAU};

use super::{ABGeometry, ActionMethod, ActionReport, Side};
use crate::error::{invalid, Error, Result};
use crate::fields::{MagneticDipole, MovingCharge, SINGULARITY_RADIUS};
use crate::numerics::{QuadResult, Tolerance, Vec3};

/// Cells along the axis, across the radius and around the circumference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeCounts {
    pub n_z: usize,
    pub n_r: usize,
    pub n_phi: usize,
}

impl LatticeCounts {
    pub fn new(n_z: usize, n_r: usize, n_phi: usize) -> Self {
        Self { n_z, n_r, n_phi }
    }

    pub fn total(&self) -> usize {
        self.n_z * self.n_r * self.n_phi
    }
}

/// Finite, uniformly magnetized cylinder (axis z, centred on the origin)
/// represented by one point dipole per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleLattice {
    pub cells: Vec<MagneticDipole>,
    pub magnet_radius: f64,
    pub half_length: f64,
    pub counts: LatticeCounts,
    /// Flux of the infinitely long cylinder with the same magnetization.
    pub flux: f64,
    /// Moment per unit volume, along z.
    pub magnetization: f64,
}

/// Discretize a cylinder of the given radius and half-length whose uniform
/// magnetization `M = Φ / (4π² R²)` carries total flux `Φ` in the
/// infinite-length limit.
///
/// Radial edges sit at `R √(k / n_r)` so every ring has the same area; each
/// cell holds `M · volume` at its geometric centroid.
pub fn build_lattice(
    radius: f64,
    half_length: f64,
    flux: f64,
    counts: LatticeCounts,
) -> Result<DipoleLattice> {
    if counts.n_z == 0 || counts.n_r == 0 || counts.n_phi == 0 {
        return Err(invalid(format!("lattice counts must be >= 1, got {counts:?}")));
    }
    if !(radius > 0.0 && half_length > 0.0 && radius.is_finite() && half_length.is_finite()) {
        return Err(invalid("lattice radius and half-length must be positive"));
    }
    if !flux.is_finite() {
        return Err(invalid("flux must be finite"));
    }

    let magnetization = flux / (4.0 * PI * PI * radius * radius);
    let dz = 2.0 * half_length / counts.n_z as f64;
    let dphi = TAU / counts.n_phi as f64;
    let edge = |k: usize| radius * (k as f64 / counts.n_r as f64).sqrt();
    // sin(Δφ/2) / (Δφ/2); zero for a full ring, whose centroid is on the axis
    let arc_factor = if counts.n_phi == 1 {
        0.0
    } else {
        (0.5 * dphi).sin() / (0.5 * dphi)
    };

    let mut cells = Vec::with_capacity(counts.total());
    for iz in 0..counts.n_z {
        let z = -half_length + (iz as f64 + 0.5) * dz;
        for ir in 0..counts.n_r {
            let (r0, r1) = (edge(ir), edge(ir + 1));
            let area = 0.5 * (r1 * r1 - r0 * r0) * dphi;
            let rho = 2.0 / 3.0 * (r1.powi(3) - r0.powi(3)) / (r1 * r1 - r0 * r0) * arc_factor;
            let moment = magnetization * area * dz;
            for ip in 0..counts.n_phi {
                let phi = (ip as f64 + 0.5) * dphi;
                cells.push(MagneticDipole::new(
                    moment * Vec3::Z,
                    Vec3::new(rho * phi.cos(), rho * phi.sin(), z),
                ));
            }
        }
    }

    Ok(DipoleLattice {
        cells,
        magnet_radius: radius,
        half_length,
        counts,
        flux,
        magnetization,
    })
}

impl DipoleLattice {
    pub fn total_moment(&self) -> Vec3 {
        self.cells.iter().map(|c| c.moment).sum()
    }

    /// `Σ_i A_i(r)`.
    pub fn vector_potential(&self, r: Vec3) -> Result<Vec3> {
        let mut total = Vec3::ZERO;
        for cell in &self.cells {
            total += cell.vector_potential(r)?;
        }
        Ok(total)
    }

    /// `Σ_i B_e(r_i)·m_i` for the field of the moving charge at every cell.
    pub fn interaction_with(&self, charge: &MovingCharge) -> Result<f64> {
        let mut total = 0.0;
        for cell in &self.cells {
            total += charge.b_field(cell.position)?.dot(cell.moment);
        }
        Ok(total)
    }

    fn check_clearance(&self, g: &ABGeometry) -> Result<()> {
        let clearance = g.impact - self.magnet_radius;
        if clearance <= SINGULARITY_RADIUS {
            return Err(Error::Clearance {
                clearance,
                required: SINGULARITY_RADIUS,
            });
        }
        Ok(())
    }
}

/// Potential picture: the electron couples to the summed potential of all
/// cells, `e v·Σ A_i(r_e)`, integrated along each path.
pub fn lattice_action_potential_picture(
    lat: &DipoleLattice,
    g: &ABGeometry,
    tol: Tolerance,
) -> Result<ActionReport> {
    lat.check_clearance(g)?;
    let action = |side: Side| -> Result<QuadResult> {
        let path = g.path(side);
        let q = path.integrate(|p| Ok(lat.vector_potential(p)?.dot(path.direction)), tol)?;
        Ok(q.scaled(g.charge))
    };
    Ok(ActionReport::from_paths(
        action(Side::Left)?,
        action(Side::Right)?,
        ActionMethod::LatticePotentialPicture,
    ))
}

/// Field picture: every cell couples to the magnetic field of the passing
/// electron, `Σ B_e(r_i)·m_i`, integrated over time with `dt = dy / v`.
pub fn lattice_action_field_picture(
    lat: &DipoleLattice,
    g: &ABGeometry,
    tol: Tolerance,
) -> Result<ActionReport> {
    lat.check_clearance(g)?;
    let velocity = g.velocity();
    let action = |side: Side| -> Result<QuadResult> {
        let path = g.path(side);
        let q = path.integrate(
            |p| {
                let electron = MovingCharge {
                    charge: g.charge,
                    velocity,
                    position: p,
                };
                lat.interaction_with(&electron)
            },
            tol,
        )?;
        Ok(q.scaled(1.0 / g.speed))
    };
    Ok(ActionReport::from_paths(
        action(Side::Left)?,
        action(Side::Right)?,
        ActionMethod::LatticeFieldPicture,
    ))
}
