//! Polarized neutron moving along the axis of a solenoid whose uniform,
//! time-dependent field is parallel to the neutron's moment: the phase
//! accumulated through `m·B`, and the vanishing EMF the moving neutron
//! induces around the solenoid.

use std::f64::consts::{PI, TAU};

use crate::error::{invalid, Result};
use crate::fields::MagneticDipole;
use crate::numerics::{try_integrate, QuadResult, Tolerance, Vec3};

/// Time dependence of the spatially uniform, z-directed solenoid field.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldProfile {
    Constant {
        value: f64,
    },
    /// `A sin(2π t / T + phase)`
    Sinusoid {
        amplitude: f64,
        period: f64,
        phase: f64,
    },
    /// `B₀ exp(-(t - t_c)² / τ²)`
    Gaussian {
        amplitude: f64,
        tau: f64,
        center: f64,
    },
    /// Piecewise-linear interpolation through `(times[i], values[i])`.
    Table {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

impl FieldProfile {
    pub fn table(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(invalid(
                "a field table needs >= 2 (time, value) pairs of equal length",
            ));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("field table times must be strictly increasing"));
        }
        Ok(FieldProfile::Table { times, values })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            FieldProfile::Sinusoid { period, .. } if !(period > 0.0) => {
                Err(invalid("sinusoid period must be positive"))
            }
            FieldProfile::Gaussian { tau, .. } if !(tau > 0.0) => {
                Err(invalid("gaussian width must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Field at time `t`; NaN outside a table's range.
    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            FieldProfile::Constant { value } => *value,
            FieldProfile::Sinusoid {
                amplitude,
                period,
                phase,
            } => amplitude * (TAU * t / period + phase).sin(),
            FieldProfile::Gaussian {
                amplitude,
                tau,
                center,
            } => {
                let u = (t - center) / tau;
                amplitude * (-u * u).exp()
            }
            FieldProfile::Table { times, values } => {
                if t < times[0] || t > times[times.len() - 1] {
                    return f64::NAN;
                }
                let k = times.partition_point(|&x| x <= t).clamp(1, times.len() - 1);
                let (t0, t1) = (times[k - 1], times[k]);
                let w = (t - t0) / (t1 - t0);
                values[k - 1] + w * (values[k] - values[k - 1])
            }
        }
    }

    fn covers(&self, t0: f64, t1: f64) -> bool {
        match self {
            FieldProfile::Table { times, .. } => t0 >= times[0] && t1 <= times[times.len() - 1],
            _ => true,
        }
    }

    /// Interior kinks of the profile inside `(t0, t1)`.
    fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        match self {
            FieldProfile::Table { times, .. } => {
                times.iter().copied().filter(|&t| t > t0 && t < t1).collect()
            }
            _ => Vec::new(),
        }
    }

    /// `∫ B dt` over `[t0, t1]` where an elementary closed form exists.
    ///
    /// The gaussian qualifies only when the window spans at least eight
    /// widths on both sides of the centre (the neglected tail is below 1e-28).
    pub fn closed_form_integral(&self, t0: f64, t1: f64) -> Option<f64> {
        match self {
            FieldProfile::Constant { value } => Some(value * (t1 - t0)),
            FieldProfile::Sinusoid {
                amplitude,
                period,
                phase,
            } => {
                let arg = |t: f64| TAU * t / period + phase;
                Some(amplitude * period / TAU * (arg(t0).cos() - arg(t1).cos()))
            }
            FieldProfile::Gaussian {
                amplitude,
                tau,
                center,
            } => {
                let covered = t0 <= center - 8.0 * tau && t1 >= center + 8.0 * tau;
                covered.then(|| amplitude * tau * PI.sqrt())
            }
            FieldProfile::Table { .. } => {
                if !self.covers(t0, t1) {
                    return None;
                }
                let mut nodes = vec![t0];
                nodes.extend(self.breakpoints(t0, t1));
                nodes.push(t1);
                Some(
                    nodes
                        .windows(2)
                        .map(|w| 0.5 * (w[1] - w[0]) * (self.value_at(w[0]) + self.value_at(w[1])))
                        .sum(),
                )
            }
        }
    }
}

/// Neutron with z-directed moment travelling along the solenoid axis.
#[derive(Debug, Clone, PartialEq)]
pub struct NeutronRun {
    pub moment: f64,
    pub speed: f64,
    pub profile: FieldProfile,
    pub duration: (f64, f64),
}

impl NeutronRun {
    pub fn new(moment: f64, speed: f64, profile: FieldProfile, duration: (f64, f64)) -> Result<Self> {
        let (t0, t1) = duration;
        if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
            return Err(invalid(format!(
                "duration [{t0}, {t1}] must be finite and ordered"
            )));
        }
        if !(speed > 0.0) {
            return Err(invalid("neutron speed must be positive"));
        }
        profile.validate()?;
        if !profile.covers(t0, t1) {
            return Err(invalid("field table does not cover the run duration"));
        }
        Ok(Self {
            moment,
            speed,
            profile,
            duration,
        })
    }
}

/// Field-dependent phase `∫ m·B(t) dt`. The kinetic term does not depend on
/// the field and drops out of any phase difference.
pub fn neutron_phase(run: &NeutronRun, tol: Tolerance) -> Result<QuadResult> {
    let (t0, t1) = run.duration;
    let mut nodes = vec![t0];
    nodes.extend(run.profile.breakpoints(t0, t1));
    nodes.push(t1);
    let mut total = QuadResult::exact(0.0);
    for w in nodes.windows(2) {
        total = total + try_integrate(|t| Ok(run.profile.value_at(t)), w[0], w[1], tol)?;
    }
    Ok(total.scaled(run.moment))
}

/// Number of azimuthal nodes of the surface grid.
pub const DEFAULT_PHI_POINTS: usize = 64;

/// Moving neutron near a truncated cylindrical solenoid surface
/// `rho = solenoid_radius, |z| <= half_length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmfCheck {
    pub solenoid_radius: f64,
    pub half_length: f64,
    pub neutron_position: Vec3,
    pub neutron_moment: Vec3,
    pub neutron_velocity: Vec3,
    pub phi_points: usize,
}

impl EmfCheck {
    pub fn new(
        solenoid_radius: f64,
        half_length: f64,
        neutron_position: Vec3,
        neutron_moment: Vec3,
        neutron_velocity: Vec3,
    ) -> Result<Self> {
        if !(solenoid_radius > 0.0 && half_length > 0.0) {
            return Err(invalid("solenoid radius and half-length must be positive"));
        }
        let transverse = neutron_velocity.x.hypot(neutron_velocity.y);
        if transverse > 1e-12 * neutron_velocity.norm() {
            return Err(invalid("neutron velocity must be parallel to the solenoid axis"));
        }
        if (neutron_position.rho() - solenoid_radius).abs() < 1e-6 * solenoid_radius {
            return Err(invalid("neutron sits on the solenoid surface"));
        }
        if neutron_position.z.abs() >= half_length {
            return Err(invalid("neutron must lie between the end caps"));
        }
        Ok(Self {
            solenoid_radius,
            half_length,
            neutron_position,
            neutron_moment,
            neutron_velocity,
            phi_points: DEFAULT_PHI_POINTS,
        })
    }

    fn dipole(&self) -> MagneticDipole {
        MagneticDipole::new(self.neutron_moment, self.neutron_position)
    }

    /// `|v| |m| / R`, the size of the surface integrals before cancellation.
    pub fn scale(&self) -> f64 {
        self.neutron_velocity.norm() * self.neutron_moment.norm() / self.solenoid_radius
    }

    fn phis(&self) -> impl Iterator<Item = (f64, f64)> {
        let n = self.phi_points as f64;
        (0..self.phi_points).map(move |k| {
            let phi = TAU * k as f64 / n;
            (phi.cos(), phi.sin())
        })
    }

    /// `∫ dz ∫ R dφ f(point, unit normal)` over the side surface: periodic
    /// trapezoid rule in φ, adaptive in z with a break at the neutron height.
    fn side_integral<F>(&self, f: F, tol: Tolerance) -> Result<QuadResult>
    where
        F: Fn(Vec3, Vec3) -> Result<f64>,
    {
        let r = self.solenoid_radius;
        let weight = r * TAU / self.phi_points as f64;
        let ring = |z: f64| -> Result<f64> {
            let mut sum = 0.0;
            for (c, s) in self.phis() {
                sum += f(Vec3::new(r * c, r * s, z), Vec3::new(c, s, 0.0))?;
            }
            Ok(sum * weight)
        };
        let (lo, hi, zn) = (-self.half_length, self.half_length, self.neutron_position.z);
        Ok(try_integrate(ring, lo, zn, tol)? + try_integrate(ring, zn, hi, tol)?)
    }

    /// Outward flux of `B` through the end cap at `z = ±half_length`.
    fn cap_flux(&self, top: bool, tol: Tolerance) -> Result<QuadResult> {
        let d = self.dipole();
        let (z, normal) = if top {
            (self.half_length, 1.0)
        } else {
            (-self.half_length, -1.0)
        };
        let dphi = TAU / self.phi_points as f64;
        let disk = try_integrate(
            |rho| {
                let mut sum = 0.0;
                for (c, s) in self.phis() {
                    sum += d.b_field(Vec3::new(rho * c, rho * s, z))?.z;
                }
                Ok(sum * dphi * rho)
            },
            0.0,
            self.solenoid_radius,
            tol,
        )?;
        Ok(disk.scaled(normal))
    }
}

/// Azimuthal EMF `∫_S E_φ ds` exerted by the moving neutron on the side
/// surface of the solenoid.
pub fn emf_on_solenoid(chk: &EmfCheck, tol: Tolerance) -> Result<QuadResult> {
    let d = chk.dipole();
    let v = chk.neutron_velocity;
    chk.side_integral(
        |p, n| {
            let phi_hat = Vec3::new(-n.y, n.x, 0.0);
            Ok(d.moving_e_field(v, p)?.dot(phi_hat))
        },
        tol,
    )
}

/// Both routes to the side-surface EMF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussCheck {
    /// `∫_S E_φ ds`
    pub surface_e: QuadResult,
    /// `-v ∫_S B_r ds`
    pub surface_br: QuadResult,
    pub scale: f64,
}

impl GaussCheck {
    pub fn relative_gap(&self) -> f64 {
        (self.surface_e.value - self.surface_br.value).abs() / self.scale
    }
}

pub fn emf_gauss_check(chk: &EmfCheck, tol: Tolerance) -> Result<GaussCheck> {
    let surface_e = emf_on_solenoid(chk, tol)?;
    let surface_br = side_b_flux(chk, tol)?.scaled(-chk.neutron_velocity.z);
    Ok(GaussCheck {
        surface_e,
        surface_br,
        scale: chk.scale(),
    })
}

/// Outward flux `∫_S B_r ds` of the neutron's dipole field through the side.
pub fn side_b_flux(chk: &EmfCheck, tol: Tolerance) -> Result<QuadResult> {
    let d = chk.dipole();
    chk.side_integral(|p, n| Ok(d.b_field(p)?.dot(n)), tol)
}

/// Outward B flux through the closed truncated cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedSurfaceFlux {
    pub side: QuadResult,
    pub top: QuadResult,
    pub bottom: QuadResult,
}

impl ClosedSurfaceFlux {
    pub fn total(&self) -> f64 {
        self.side.value + self.top.value + self.bottom.value
    }
}

pub fn closed_surface_flux(chk: &EmfCheck, tol: Tolerance) -> Result<ClosedSurfaceFlux> {
    Ok(ClosedSurfaceFlux {
        side: side_b_flux(chk, tol)?,
        top: chk.cap_flux(true, tol)?,
        bottom: chk.cap_flux(false, tol)?,
    })
}
