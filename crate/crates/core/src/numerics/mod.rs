//! Vector algebra, straight-line path parametrization and adaptive quadrature.

mod path;
mod quad;
mod vec3;

pub use path::{Polyline, StraightPath};
pub use quad::{
    integrate_adaptive, integrate_half_line, integrate_improper, line_integral, try_integrate,
    try_integrate_half_line, try_integrate_improper, QuadResult, Tolerance, DEFAULT_EVAL_BUDGET,
};
pub use vec3::Vec3;
