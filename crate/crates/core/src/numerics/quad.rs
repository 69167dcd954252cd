//! Adaptive Gauss-Kronrod quadrature (15-point Kronrod rule with embedded
//! 7-point Gauss estimate), plus tangent-mapped variants for infinite ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;
use std::ops::Add;

use super::{Polyline, Vec3};
use crate::error::{invalid, Error, Result};

/// Maximum integrand evaluations per integral before giving up.
pub const DEFAULT_EVAL_BUDGET: usize = 1_000_000;

// Kronrod abscissae, descending; the odd indices are the Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Requested accuracy of an integral: `|error| <= max(rel * |value|, abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_evals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-9,
            abs: 1e-12,
            max_evals: DEFAULT_EVAL_BUDGET,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Self {
            rel,
            abs,
            ..Self::default()
        }
    }

    pub fn with_budget(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    /// Whether an error estimate meets this tolerance for `value`.
    pub fn accepts(&self, value: f64, error: f64) -> bool {
        error <= (self.rel * value.abs()).max(self.abs)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.rel > 0.0 && self.abs > 0.0 && self.rel.is_finite() && self.abs.is_finite();
        if !ok {
            return Err(invalid(format!(
                "tolerances must be positive and finite (rel = {}, abs = {})",
                self.rel, self.abs
            )));
        }
        if self.max_evals < 15 {
            return Err(invalid("evaluation budget below one 15-point rule"));
        }
        Ok(())
    }
}

/// Outcome of a numerical integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// `true` iff `error_estimate` met the requested tolerance within budget.
    pub converged: bool,
}

impl QuadResult {
    /// An exactly known value that needed no evaluations.
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            ..self
        }
    }
}

impl Add for QuadResult {
    type Output = QuadResult;

    fn add(self, rhs: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + rhs.value,
            error_estimate: self.error_estimate + rhs.error_estimate,
            evaluations: self.evaluations + rhs.evaluations,
            converged: self.converged && rhs.converged,
        }
    }
}

impl std::iter::Sum for QuadResult {
    fn sum<I: Iterator<Item = QuadResult>>(iter: I) -> QuadResult {
        iter.fold(QuadResult::exact(0.0), |acc, q| acc + q)
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// The error sits at the roundoff floor; bisection cannot lower it.
    at_floor: bool,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn checked<F>(f: &mut F, x: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let y = f(x)?;
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { x, value: y })
    }
}

fn gauss_kronrod_15<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = checked(f, center)?;

    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    let at_floor = floor >= error;
    if at_floor {
        error = floor;
    }

    Ok(Segment {
        a,
        b,
        value,
        error,
        at_floor,
    })
}

/// Adaptive integration of a fallible integrand over a finite interval.
///
/// Never aborts on non-convergence: when the evaluation budget runs out, or
/// the remaining error is pure roundoff, the best estimate is returned with
/// `converged = false`. Errors from `f`, and non-finite integrand values,
/// abort with the offending abscissa.
pub fn try_integrate<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    tol.validate()?;
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(invalid(format!(
            "integration bounds must be finite with a < b (got [{a}, {b}])"
        )));
    }

    let first = gauss_kronrod_15(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    let mut frozen = Vec::new();
    heap.push(first);
    let mut value = first.value;
    let mut error = first.error;
    let mut converged = false;

    loop {
        if tol.accepts(value, error) {
            converged = true;
            break;
        }
        if evaluations + 30 > tol.max_evals {
            break;
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.at_floor || mid <= worst.a || mid >= worst.b {
            // nothing left to gain on this piece
            frozen.push(worst);
            continue;
        }
        let left = gauss_kronrod_15(&mut f, worst.a, mid)?;
        let right = gauss_kronrod_15(&mut f, mid, worst.b)?;
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum in interval order so the result does not depend on the
    // incremental update history.
    let mut segments = heap.into_vec();
    segments.extend(frozen);
    segments.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = segments.iter().map(|s| s.value).sum();
    let error: f64 = segments.iter().map(|s| s.error).sum();

    Ok(QuadResult {
        value,
        error_estimate: error,
        evaluations,
        converged: converged && tol.accepts(value, error),
    })
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, Tolerance::new(rel_tol, abs_tol))
}

/// Integral over the whole real line via `y = tan(u)`.
///
/// The integrand must decay at least as fast as `|y|^-2`.
pub fn try_integrate_improper<F>(mut f: F, tol: Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    try_integrate(
        |u| {
            let c = u.cos();
            Ok(f(u.tan())? / (c * c))
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        tol,
    )
}

pub fn integrate_improper<F>(f: F, rel_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    let tol = Tolerance {
        rel: rel_tol,
        ..Tolerance::default()
    };
    try_integrate_improper(|y| Ok(f(y)), tol)
}

/// Integral over `[start, inf)` via `y = start + tan(u)`.
pub fn try_integrate_half_line<F>(mut f: F, start: f64, tol: Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !start.is_finite() {
        return Err(invalid("half-line start must be finite"));
    }
    try_integrate(
        |u| {
            let c = u.cos();
            Ok(f(start + u.tan())? / (c * c))
        },
        0.0,
        FRAC_PI_2,
        tol,
    )
}

pub fn integrate_half_line<F>(f: F, start: f64, tol: Tolerance) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    try_integrate_half_line(|y| Ok(f(y)), start, tol)
}

/// Line integral of a vector field along a polyline, including the
/// semi-infinite legs when present.
pub fn line_integral<F>(path: &Polyline, mut field: F, tol: Tolerance) -> Result<QuadResult>
where
    F: FnMut(Vec3) -> Result<Vec3>,
{
    let mut total = QuadResult::exact(0.0);

    if let Some(dir) = path.incoming {
        let origin = path.vertices[0];
        total = total + try_integrate_half_line(|s| Ok(field(origin - s * dir)?.dot(dir)), 0.0, tol)?;
    }
    for pair in path.vertices.windows(2) {
        let (p0, p1) = (pair[0], pair[1]);
        let step = p1 - p0;
        if step.norm() == 0.0 {
            continue;
        }
        total = total + try_integrate(|t| Ok(field(p0 + t * step)?.dot(step)), 0.0, 1.0, tol)?;
    }
    if let Some(dir) = path.outgoing {
        let origin = *path.vertices.last().expect("polyline has a vertex");
        total = total + try_integrate_half_line(|s| Ok(field(origin + s * dir)?.dot(dir)), 0.0, tol)?;
    }
    Ok(total)
}
