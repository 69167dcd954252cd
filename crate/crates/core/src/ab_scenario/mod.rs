//! The magnetic AB arrangement: an electron split into two straight paths
//! passing either side of an infinitely long magnet, the resulting action
//! difference and fringe shift, the charge/dipole pair identity, and the
//! dipole-lattice model of the magnet summed in two equivalent ways.

mod lattice;

use std::f64::consts::TAU;

pub use lattice::{
    build_lattice, lattice_action_field_picture, lattice_action_potential_picture, DipoleLattice,
    LatticeCounts,
};

use crate::error::{invalid, Result};
use crate::fields::{FluxString, MagneticDipole, MovingCharge, MAX_SPEED};
use crate::numerics::{line_integral, Polyline, QuadResult, StraightPath, Tolerance, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `x = -a`
    Left,
    /// `x = +a`
    Right,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

/// Magnet plus the two electron paths `x = ±impact, z = 0`, travelled in +y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ABGeometry {
    pub magnet: FluxString,
    pub impact: f64,
    /// `-Y₀`; may be `-inf`.
    pub y_start: f64,
    /// May be `+inf`.
    pub y_end: f64,
    pub speed: f64,
    /// Signed electron charge.
    pub charge: f64,
}

impl ABGeometry {
    /// Geometry with infinitely long paths.
    pub fn new(magnet: FluxString, impact: f64, speed: f64, charge: f64) -> Result<Self> {
        Self::with_range(magnet, impact, speed, charge, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn with_range(
        magnet: FluxString,
        impact: f64,
        speed: f64,
        charge: f64,
        y_start: f64,
        y_end: f64,
    ) -> Result<Self> {
        if !(impact > magnet.radius && impact.is_finite()) {
            return Err(invalid(format!(
                "impact parameter {impact} must exceed the magnet radius {}",
                magnet.radius
            )));
        }
        if !(speed > 0.0 && speed < MAX_SPEED) {
            return Err(invalid(format!("speed {speed} outside (0, {MAX_SPEED})")));
        }
        if !(y_start < 0.0 && y_end > 0.0) {
            return Err(invalid(format!(
                "path range [{y_start}, {y_end}] must straddle y = 0"
            )));
        }
        if !charge.is_finite() {
            return Err(invalid("charge must be finite"));
        }
        Ok(Self {
            magnet,
            impact,
            y_start,
            y_end,
            speed,
            charge,
        })
    }

    /// `a = 1, R = 0.1, v = 0.01, e = -1, Φ = 2π`.
    pub fn canonical() -> Self {
        let magnet = FluxString::new(0.1, TAU).expect("valid magnet");
        Self::new(magnet, 1.0, 0.01, -1.0).expect("valid geometry")
    }

    pub fn path(&self, side: Side) -> StraightPath {
        StraightPath::along_y(
            side.sign() * self.impact,
            0.0,
            self.speed,
            (self.y_start, self.y_end),
        )
        .expect("geometry invariants give a valid path")
    }

    pub fn velocity(&self) -> Vec3 {
        self.speed * Vec3::Y
    }

    /// `eΦ`, the closed-form two-path action difference.
    pub fn expected_delta_i(&self) -> f64 {
        self.charge * self.magnet.flux
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionMethod {
    FluxString,
    LatticePotentialPicture,
    LatticeFieldPicture,
}

/// Two-path action difference, in radians of phase (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionReport {
    /// `right.value - left.value`
    pub delta_i: f64,
    pub left: QuadResult,
    pub right: QuadResult,
    pub method: ActionMethod,
}

impl ActionReport {
    pub(crate) fn from_paths(left: QuadResult, right: QuadResult, method: ActionMethod) -> Self {
        Self {
            delta_i: right.value - left.value,
            left,
            right,
            method,
        }
    }

    pub fn error_estimate(&self) -> f64 {
        self.left.error_estimate + self.right.error_estimate
    }

    pub fn converged(&self) -> bool {
        self.left.converged && self.right.converged
    }
}

/// `e ∫ v·A dt = e ∫ A_y dy` along one of the two straight paths.
pub fn action_along_path(g: &ABGeometry, side: Side, tol: Tolerance) -> Result<QuadResult> {
    let path = g.path(side);
    let q = path.integrate(|p| Ok(g.magnet.vector_potential(p)?.dot(path.direction)), tol)?;
    Ok(q.scaled(g.charge))
}

pub fn ab_action_difference(g: &ABGeometry, tol: Tolerance) -> Result<ActionReport> {
    let left = action_along_path(g, Side::Left, tol)?;
    let right = action_along_path(g, Side::Right, tol)?;
    Ok(ActionReport::from_paths(left, right, ActionMethod::FluxString))
}

/// `e ∫ A·dl` along an arbitrary piecewise-straight exterior path.
pub fn action_along_polyline(
    magnet: &FluxString,
    charge: f64,
    path: &Polyline,
    tol: Tolerance,
) -> Result<QuadResult> {
    Ok(line_integral(path, |r| magnet.vector_potential(r), tol)?.scaled(charge))
}

/// Screen intensity of two unit-amplitude subpackets,
/// `I(x) = 2 (1 + cos(2π x / Λ + δ))`, for fringe spacing `Λ` and phase
/// difference `δ`.
pub fn interference_pattern(
    delta_phase: f64,
    screen_xs: &[f64],
    fringe_scale: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(fringe_scale > 0.0 && fringe_scale.is_finite()) {
        return Err(invalid(format!(
            "fringe scale must be positive, got {fringe_scale}"
        )));
    }
    Ok(screen_xs
        .iter()
        .map(|&x| (x, 2.0 * (1.0 + (TAU * x / fringe_scale + delta_phase).cos())))
        .collect())
}

/// Screen position of the fringe that sits at `x = 0` without flux.
pub fn fringe_shift(delta_phase: f64, fringe_scale: f64) -> f64 {
    -fringe_scale * delta_phase / TAU
}

/// Both sides of `B_e(r_m)·m = e v_e·A_m(r_e)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairIdentity {
    pub lhs: f64,
    pub rhs: f64,
    /// `|e| |v| |m| / r²`, the natural size of either side.
    pub scale: f64,
}

impl PairIdentity {
    pub fn relative_deviation(&self) -> f64 {
        if self.scale == 0.0 {
            (self.lhs - self.rhs).abs()
        } else {
            (self.lhs - self.rhs).abs() / self.scale
        }
    }
}

pub fn pair_identity_check(c: &MovingCharge, d: &MagneticDipole) -> Result<PairIdentity> {
    let lhs = c.b_field(d.position)?.dot(d.moment);
    let rhs = c.charge * c.velocity.dot(d.vector_potential(c.position)?);
    let r2 = (c.position - d.position).norm_squared();
    Ok(PairIdentity {
        lhs,
        rhs,
        scale: c.charge.abs() * c.velocity.norm() * d.moment.norm() / r2,
    })
}

/// Order-of-magnitude estimate that a magnet atom stays in its ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertnessBound {
    /// Electron-field strength relative to the neighbouring-atom field.
    pub field_ratio: f64,
    /// Square of the interaction ratio.
    pub transition_probability: f64,
    /// Expected number of excited atoms in the whole magnet.
    pub aggregate: f64,
}

pub fn inertness_bound(atomic_distance: f64, electron_distance: f64, n_atoms: f64) -> Result<InertnessBound> {
    if !(atomic_distance > 0.0 && electron_distance > 0.0) {
        return Err(invalid("distances must be positive"));
    }
    if !(n_atoms >= 0.0) {
        return Err(invalid("atom count must be non-negative"));
    }
    let field_ratio = (atomic_distance * atomic_distance) / (electron_distance * electron_distance);
    let transition_probability = field_ratio * field_ratio;
    Ok(InertnessBound {
        field_ratio,
        transition_probability,
        aggregate: n_atoms * transition_probability,
    })
}

/// `m e v sinθ cosφ / r²` for an electron at spherical position `(r, θ, φ)`
/// about a z-directed dipole, moving along +y.
pub fn pair_identity_closed_form(moment: f64, charge: f64, speed: f64, electron: Vec3) -> f64 {
    let r = electron.norm();
    let sin_theta = electron.rho() / r;
    let cos_phi = if electron.rho() == 0.0 {
        1.0
    } else {
        electron.x / electron.rho()
    };
    moment * charge * speed * sin_theta * cos_phi / (r * r)
}
