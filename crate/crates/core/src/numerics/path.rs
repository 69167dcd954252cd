use super::quad::{try_integrate, try_integrate_half_line, try_integrate_improper};
use super::{QuadResult, Tolerance, Vec3};
use crate::error::{invalid, Result};

/// Straight worldline `anchor + s * direction` with `anchor = (impact_x, 0, z_offset)`
/// and arc parameter `s` restricted to `y_range`. With the default direction
/// `ŷ` the arc parameter is the y coordinate itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StraightPath {
    pub impact_x: f64,
    pub z_offset: f64,
    pub direction: Vec3,
    pub speed: f64,
    /// May hold infinities for paths that come from / go to infinity.
    pub y_range: (f64, f64),
}

impl StraightPath {
    pub fn new(
        impact_x: f64,
        z_offset: f64,
        direction: Vec3,
        speed: f64,
        y_range: (f64, f64),
    ) -> Result<Self> {
        if (direction.norm() - 1.0).abs() > 1e-12 {
            return Err(invalid(format!(
                "path direction {direction} is not a unit vector"
            )));
        }
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(invalid(format!("path speed must be positive, got {speed}")));
        }
        let (lo, hi) = y_range;
        if lo.is_nan() || hi.is_nan() || lo >= hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(invalid(format!("invalid path range [{lo}, {hi}]")));
        }
        if !(impact_x.is_finite() && z_offset.is_finite()) {
            return Err(invalid("path offsets must be finite"));
        }
        Ok(Self {
            impact_x,
            z_offset,
            direction,
            speed,
            y_range,
        })
    }

    /// Path parallel to the y-axis along `x = impact_x, z = z_offset`.
    pub fn along_y(impact_x: f64, z_offset: f64, speed: f64, y_range: (f64, f64)) -> Result<Self> {
        Self::new(impact_x, z_offset, Vec3::Y, speed, y_range)
    }

    pub fn anchor(&self) -> Vec3 {
        Vec3::new(self.impact_x, 0.0, self.z_offset)
    }

    pub fn point_at(&self, s: f64) -> Vec3 {
        self.anchor() + s * self.direction
    }

    pub fn velocity(&self) -> Vec3 {
        self.speed * self.direction
    }

    /// Position at time `t`; `t = 0` sits at the start of the range
    /// (or at the anchor when the range starts at -inf).
    pub fn position(&self, t: f64) -> Vec3 {
        let start = if self.y_range.0.is_finite() {
            self.y_range.0
        } else {
            0.0
        };
        self.point_at(start + self.speed * t)
    }

    /// `∫ g(point(s)) ds` over the path's range.
    pub fn integrate<G>(&self, mut g: G, tol: Tolerance) -> Result<QuadResult>
    where
        G: FnMut(Vec3) -> Result<f64>,
    {
        let (lo, hi) = self.y_range;
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => try_integrate(|s| g(self.point_at(s)), lo, hi, tol),
            (true, false) => try_integrate_half_line(|s| g(self.point_at(s)), lo, tol),
            (false, true) => try_integrate_half_line(|s| g(self.point_at(-s)), -hi, tol),
            (false, false) => try_integrate_improper(|s| g(self.point_at(s)), tol),
        }
    }
}

/// Piecewise-straight path: optional ray arriving from infinity along
/// `incoming`, the finite legs between `vertices`, and an optional ray
/// leaving the last vertex along `outgoing`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub incoming: Option<Vec3>,
    pub vertices: Vec<Vec3>,
    pub outgoing: Option<Vec3>,
}

impl Polyline {
    pub fn closed(mut vertices: Vec<Vec3>) -> Self {
        if let Some(&first) = vertices.first() {
            vertices.push(first);
        }
        Self {
            incoming: None,
            vertices,
            outgoing: None,
        }
    }

    /// Regular polygon of `sides` vertices on the circle of radius `radius`
    /// about `(cx, cy)` in the plane `z`, traversed counter-clockwise.
    pub fn circle(cx: f64, cy: f64, z: f64, radius: f64, sides: usize) -> Self {
        let vertices = (0..sides)
            .map(|k| {
                let phi = std::f64::consts::TAU * k as f64 / sides as f64;
                Vec3::new(cx + radius * phi.cos(), cy + radius * phi.sin(), z)
            })
            .collect();
        Self::closed(vertices)
    }
}
