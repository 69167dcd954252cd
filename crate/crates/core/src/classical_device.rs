//! Classical replacement for the magnet: a solenoid whose current is carried
//! by a frictionless charged liquid. The passing electron's magnetic field
//! changes the liquid's kinetic energy, and that change contributes an
//! action exactly opposite to the electron's `e∫A·dl` term.
//!
//! Orientation conventions: the current density `j` circulates in +φ, so
//! `j > 0` gives flux along +z; line elements `dl` point along +φ and the
//! cross-section `ds` along +z. With these choices the energy change is
//! `ΔW(y) = -2π R² a v e j / (a² + y²)` for an electron at `(a, y, 0)`.

use std::f64::consts::PI;

use crate::ab_scenario::{action_along_path, ABGeometry, Side};
use crate::error::{invalid, Error, Result};
use crate::fields::{FluxString, MovingCharge, SINGULARITY_RADIUS};
use crate::numerics::{try_integrate_improper, QuadResult, Tolerance, Vec3};

/// Largest `radius / impact` treated as a thin solenoid.
pub const THIN_RATIO: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalSolenoid {
    pub radius: f64,
    /// `j = n I`, turns per unit length times current.
    pub current_density: f64,
    /// Mass of the liquid; only energy differences enter the action.
    pub liquid_mass: f64,
    pub initial_speed: f64,
}

impl ClassicalSolenoid {
    pub fn new(radius: f64, current_density: f64, liquid_mass: f64, initial_speed: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!("solenoid radius must be positive, got {radius}")));
        }
        if !(liquid_mass > 0.0) {
            return Err(invalid("liquid mass must be positive"));
        }
        if !(current_density.is_finite() && initial_speed.is_finite()) {
            return Err(invalid("current density and liquid speed must be finite"));
        }
        Ok(Self {
            radius,
            current_density,
            liquid_mass,
            initial_speed,
        })
    }

    /// Solenoid carrying the given flux (unit liquid mass, liquid at rest).
    pub fn with_flux(radius: f64, flux: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(invalid(format!("solenoid radius must be positive, got {radius}")));
        }
        Self::new(radius, flux / (4.0 * PI * PI * radius * radius), 1.0, 0.0)
    }

    /// `Φ = 4π² R² j`.
    pub fn flux(&self) -> f64 {
        4.0 * PI * PI * self.radius * self.radius * self.current_density
    }

    pub fn as_flux_string(&self) -> FluxString {
        FluxString {
            radius: self.radius,
            flux: self.flux(),
        }
    }

    pub fn is_thin_for(&self, impact: f64) -> bool {
        self.radius / impact <= THIN_RATIO
    }

    /// Concentric thin shells at radii `R k / n`, each carrying `j / n`.
    pub fn shells(&self, n_shells: usize) -> Result<Vec<ClassicalSolenoid>> {
        if n_shells == 0 {
            return Err(invalid("need at least one shell"));
        }
        let n = n_shells as f64;
        Ok((1..=n_shells)
            .map(|k| ClassicalSolenoid {
                radius: self.radius * k as f64 / n,
                current_density: self.current_density / n,
                ..*self
            })
            .collect())
    }
}

/// The two action contributions for one electron path and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CancellationReport {
    /// Electron's `e∫A·dl` term, `eΦ/2`.
    pub delta_i1: QuadResult,
    /// Liquid kinetic-energy term, `-eΦ/2`.
    pub delta_i2: QuadResult,
    pub total: f64,
    pub flux: f64,
}

/// Geometry of `g` with the magnet replaced by this solenoid.
fn probe(s: &ClassicalSolenoid, g: &ABGeometry) -> Result<ABGeometry> {
    ABGeometry::with_range(
        s.as_flux_string(),
        g.impact,
        g.speed,
        g.charge,
        g.y_start,
        g.y_end,
    )
}

/// Electron `e∫A·dl` along the right-hand path.
pub fn delta_i1(s: &ClassicalSolenoid, g: &ABGeometry, tol: Tolerance) -> Result<QuadResult> {
    action_along_path(&probe(s, g)?, Side::Right, tol)
}

/// `B_z = v a e / (a² + y² + z²)^{3/2}` on the solenoid axis at height `z`,
/// for the electron at `(a, y_rel, 0)` moving along +y.
pub fn electron_bz_at(y_rel: f64, z: f64, g: &ABGeometry) -> Result<f64> {
    let a = g.impact;
    let d2 = a * a + y_rel * y_rel + z * z;
    if d2.sqrt() < SINGULARITY_RADIUS {
        return Err(Error::Singularity { distance: d2.sqrt() });
    }
    Ok(g.speed * a * g.charge / (d2 * d2.sqrt()))
}

/// Closed-form thin-solenoid energy change `-2π R² a v e j / (a² + y²)`.
pub fn delta_w_thin(s: &ClassicalSolenoid, g: &ABGeometry, y: f64) -> f64 {
    let a = g.impact;
    -2.0 * PI * s.radius * s.radius * a * g.speed * g.charge * s.current_density / (a * a + y * y)
}

/// Same energy change by quadrature: `-j π R² ∫ B_z dz` with `B_z` taken
/// from the moving-charge field kernel.
pub fn delta_w_numeric(s: &ClassicalSolenoid, g: &ABGeometry, y: f64, tol: Tolerance) -> Result<QuadResult> {
    let electron = MovingCharge::new(g.charge, g.velocity(), Vec3::new(g.impact, y, 0.0))?;
    let bz = try_integrate_improper(|z| Ok(electron.b_field(Vec3::new(0.0, 0.0, z))?.z), tol)?;
    Ok(bz.scaled(-s.current_density * PI * s.radius * s.radius))
}

fn check_outside(s: &ClassicalSolenoid, g: &ABGeometry) -> Result<()> {
    if g.impact <= s.radius {
        return Err(invalid(format!(
            "electron path at a = {} passes through the solenoid of radius {}",
            g.impact, s.radius
        )));
    }
    Ok(())
}

/// `ΔI₂ = ∫ ΔW dt` along the right-hand path, with `dt = dy / v`.
pub fn delta_i2(s: &ClassicalSolenoid, g: &ABGeometry, tol: Tolerance) -> Result<QuadResult> {
    check_outside(s, g)?;
    g.path(Side::Right)
        .integrate(|p| Ok(delta_w_thin(s, g, p.y) / g.speed), tol)
}

/// `ΔI₂` with the inner z-integral done numerically as well.
pub fn delta_i2_numeric(s: &ClassicalSolenoid, g: &ABGeometry, tol: Tolerance) -> Result<QuadResult> {
    check_outside(s, g)?;
    let inner = Tolerance {
        rel: tol.rel * 1e-2,
        ..tol
    };
    g.path(Side::Right)
        .integrate(|p| Ok(delta_w_numeric(s, g, p.y, inner)?.value / g.speed), tol)
}

pub fn cancellation(s: &ClassicalSolenoid, g: &ABGeometry, tol: Tolerance) -> Result<CancellationReport> {
    let delta_i1 = delta_i1(s, g, tol)?;
    let delta_i2 = delta_i2(s, g, tol)?;
    Ok(CancellationReport {
        delta_i1,
        delta_i2,
        total: delta_i1.value + delta_i2.value,
        flux: s.flux(),
    })
}

/// `ΔI₂` of a thick solenoid as the sum over `n_shells` thin shells.
pub fn thick_solenoid_delta_i2(
    s: &ClassicalSolenoid,
    g: &ABGeometry,
    n_shells: usize,
    tol: Tolerance,
) -> Result<QuadResult> {
    let mut total = QuadResult::exact(0.0);
    for shell in s.shells(n_shells)? {
        total = total + delta_i2(&shell, g, tol)?;
    }
    Ok(total)
}
