//! Planar α-catenaries and the cylinders over them.
//!
//! Curves live in the `(u, y)` half-plane `y > 0` with `v = (0, 1)`, so the
//! height `y = <γ, v>`. Arclength parametrization with tangent angle `θ`:
//!
//! ```text
//! u' = cos θ,   y' = sin θ,   θ' = α cos θ / y.
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Metric, Vec3};
use crate::surface::{Domain, Jet2, ParamSurface};

/// Heights at or below this leave the halfspace.
pub const Y_FLOOR: f64 = 1e-12;
/// Initial angles tried before bisection in [`solve_bvp`].
pub const BVP_SCAN: usize = 64;
/// `|<ruling, v>|` allowed in [`catenary_cylinder`].
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatenaryError {
    #[error("height {y:e} is not above the floor {Y_FLOOR:e}")]
    HalfspaceViolation { y: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no initial angle reaches the target")]
    NoSolution,
    #[error("ruling is not orthogonal to v: <ruling, v> = {0:e}")]
    NotOrthogonal(f64),
    #[error("Lorentzian catenary cylinders are not supported")]
    Unsupported,
}

pub type Result<T> = std::result::Result<T, CatenaryError>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatenaryState {
    pub u: f64,
    pub y: f64,
    pub theta: f64,
    /// Arclength.
    pub s: f64,
}

impl CatenaryState {
    pub fn new(u: f64, y: f64, theta: f64) -> Self {
        CatenaryState { u, y, theta, s: 0.0 }
    }
}

/// `(u', y', θ')` at `state`.
pub fn catenary_rhs(state: &CatenaryState, alpha: f64) -> Result<[f64; 3]> {
    if !(state.y > Y_FLOOR) {
        return Err(CatenaryError::HalfspaceViolation { y: state.y });
    }
    let (sn, cs) = state.theta.sin_cos();
    Ok([cs, sn, alpha * cs / state.y])
}

fn rk4_step(st: &CatenaryState, alpha: f64, h: f64) -> Result<CatenaryState> {
    let shift = |k: &[f64; 3], c: f64| CatenaryState {
        u: st.u + c * k[0],
        y: st.y + c * k[1],
        theta: st.theta + c * k[2],
        s: st.s + c,
    };
    let k1 = catenary_rhs(st, alpha)?;
    let k2 = catenary_rhs(&shift(&k1, 0.5 * h), alpha)?;
    let k3 = catenary_rhs(&shift(&k2, 0.5 * h), alpha)?;
    let k4 = catenary_rhs(&shift(&k3, h), alpha)?;
    let comb = |i: usize| h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    let next = CatenaryState { u: st.u + comb(0), y: st.y + comb(1), theta: st.theta + comb(2), s: st.s + h };
    if !(next.y > Y_FLOOR) {
        return Err(CatenaryError::HalfspaceViolation { y: next.y });
    }
    Ok(next)
}

/// Integrated α-catenary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatenaryPath {
    pub alpha: f64,
    pub states: Vec<CatenaryState>,
    /// The curve reached the floor before the requested length; `states`
    /// stops at the last admissible node.
    pub halfspace_exit: bool,
}

impl CatenaryPath {
    pub fn end(&self) -> &CatenaryState {
        self.states.last().expect("path holds the start state")
    }

    /// CSV rows `s,u,y,theta`. A flagged path gets an extra `flag` column
    /// that is 1 on the last row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(if self.halfspace_exit { "s,u,y,theta,flag\n" } else { "s,u,y,theta\n" });
        let last = self.states.len() - 1;
        for (i, st) in self.states.iter().enumerate() {
            let _ = write!(out, "{},{},{},{}", st.s, st.u, st.y, st.theta);
            if self.halfspace_exit {
                let _ = write!(out, ",{}", u8::from(i == last));
            }
            out.push('\n');
        }
        out
    }

    /// `θ' y − α cos θ` at every node, with `θ'` from the right-hand side.
    pub fn curvature_defect(&self) -> f64 {
        self.states
            .iter()
            .map(|st| match catenary_rhs(st, self.alpha) {
                Ok(d) => (d[2] * st.y - self.alpha * st.theta.cos()).abs(),
                Err(_) => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }
}

/// Fixed-step RK4 over arclength `length`, using `ceil(length / step)`
/// equal steps. Leaving the halfspace stops the integration and sets
/// [`CatenaryPath::halfspace_exit`].
pub fn integrate(start: CatenaryState, alpha: f64, length: f64, step: f64) -> Result<CatenaryPath> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(CatenaryError::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(length >= 0.0) || !length.is_finite() {
        return Err(CatenaryError::InvalidArgument(format!("length must be non-negative, got {length}")));
    }
    if !alpha.is_finite() || !start.u.is_finite() || !start.theta.is_finite() {
        return Err(CatenaryError::InvalidArgument("non-finite input".into()));
    }
    if !(start.y > Y_FLOOR) {
        return Err(CatenaryError::HalfspaceViolation { y: start.y });
    }
    let n = ((length / step) * (1.0 - 1e-12)).ceil().max(if length > 0.0 { 1.0 } else { 0.0 }) as usize;
    let h = if n == 0 { 0.0 } else { length / n as f64 };
    let mut states = Vec::with_capacity(n + 1);
    states.push(start);
    let mut halfspace_exit = false;
    for k in 0..n {
        match rk4_step(&states[k], alpha, h) {
            Ok(mut next) => {
                next.s = start.s + h * (k + 1) as f64;
                states.push(next);
            }
            Err(CatenaryError::HalfspaceViolation { .. }) => {
                halfspace_exit = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(CatenaryPath { alpha, states, halfspace_exit })
}

/// Closed form of the classical catenary through `(0, 1)` with horizontal
/// tangent: `(asinh s, √(1 + s²))`, `θ = atan s`.
pub fn classical_catenary(s: f64) -> CatenaryState {
    CatenaryState { u: s.asinh(), y: (1.0 + s * s).sqrt(), theta: s.atan(), s }
}

const BVP_STEPS: usize = 2000;

/// Height reached at `u1` when shooting from `p0` with angle `theta0`, or
/// `None` if the shot turns vertical or leaves the halfspace.
fn shoot(p0: (f64, f64), u1: f64, alpha: f64, theta0: f64) -> Option<f64> {
    // graph form over u: y' = tan θ, θ' = α / y
    let h = (u1 - p0.0) / BVP_STEPS as f64;
    let f = |y: f64, th: f64| -> Option<(f64, f64)> {
        if y > Y_FLOOR && th.abs() < std::f64::consts::FRAC_PI_2 {
            Some((th.tan(), alpha / y))
        } else {
            None
        }
    };
    let (mut y, mut th) = (p0.1, theta0);
    for _ in 0..BVP_STEPS {
        let k1 = f(y, th)?;
        let k2 = f(y + 0.5 * h * k1.0, th + 0.5 * h * k1.1)?;
        let k3 = f(y + 0.5 * h * k2.0, th + 0.5 * h * k2.1)?;
        let k4 = f(y + h * k3.0, th + h * k3.1)?;
        y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        th += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    (y > Y_FLOOR && y.is_finite()).then_some(y)
}

/// Initial angle of the α-catenary from `p0` through `p1`.
///
/// The shot endpoint misfit is scanned over 64 angles in `(−π/2, π/2)`; of
/// the brackets found, the one nearest angle 0 is bisected until the miss
/// is at most `tol`.
pub fn solve_bvp(p0: (f64, f64), p1: (f64, f64), alpha: f64, tol: f64) -> Result<f64> {
    if !(p0.1 > 0.0 && p1.1 > 0.0) {
        return Err(CatenaryError::HalfspaceViolation { y: p0.1.min(p1.1) });
    }
    if !(p0.0 < p1.0) {
        return Err(CatenaryError::InvalidArgument("endpoints must satisfy p0.u < p1.u".into()));
    }
    if !(tol > 0.0) {
        return Err(CatenaryError::InvalidArgument("tolerance must be positive".into()));
    }
    let miss = |th: f64| shoot(p0, p1.0, alpha, th).map(|y| y - p1.1);
    let angles: Vec<f64> =
        (0..BVP_SCAN).map(|k| -std::f64::consts::FRAC_PI_2 + (k as f64 + 0.5) * std::f64::consts::PI / BVP_SCAN as f64).collect();
    let values: Vec<Option<f64>> = angles.iter().map(|&a| miss(a)).collect();
    let mut best: Option<(f64, f64, f64)> = None;
    for k in 0..BVP_SCAN - 1 {
        if let (Some(fa), Some(fb)) = (values[k], values[k + 1]) {
            if fa == 0.0 {
                return Ok(angles[k]);
            }
            if fa * fb <= 0.0 {
                let mid = 0.5 * (angles[k] + angles[k + 1]);
                if best.map_or(true, |(a, b, _)| mid.abs() < (0.5 * (a + b)).abs()) {
                    best = Some((angles[k], angles[k + 1], fa));
                }
            }
        }
    }
    let (mut a, mut b, mut fa) = best.ok_or(CatenaryError::NoSolution)?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = miss(m).ok_or(CatenaryError::NoSolution)?;
        if fm.abs() <= tol || b - a <= 4.0 * f64::EPSILON {
            return Ok(m);
        }
        if fa * fm <= 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

/// Clamped cubic spline through `(x_i, f_i)` with prescribed end slopes.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    f: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl CubicSpline {
    /// Requires at least two strictly increasing knots.
    pub fn clamped(x: Vec<f64>, f: Vec<f64>, d0: f64, dn: f64) -> Self {
        let n = x.len();
        assert!(n >= 2 && f.len() == n, "spline needs matching knots and values");
        // tridiagonal system for the knot second derivatives
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut lower = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = h[0] / 3.0;
        upper[0] = h[0] / 6.0;
        rhs[0] = (f[1] - f[0]) / h[0] - d0;
        for i in 1..n - 1 {
            lower[i] = h[i - 1] / 6.0;
            diag[i] = (h[i - 1] + h[i]) / 3.0;
            upper[i] = h[i] / 6.0;
            rhs[i] = (f[i + 1] - f[i]) / h[i] - (f[i] - f[i - 1]) / h[i - 1];
        }
        lower[n - 1] = h[n - 2] / 6.0;
        diag[n - 1] = h[n - 2] / 3.0;
        rhs[n - 1] = dn - (f[n - 1] - f[n - 2]) / h[n - 2];
        // Thomas algorithm
        for i in 1..n {
            let w = lower[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
        }
        CubicSpline { x, f, m }
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Value, first and second derivative at `t` (extrapolated by the end
    /// cubics outside the knot range).
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let n = self.x.len();
        let i = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let (a, b) = ((x1 - t) / h, (t - x0) / h);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (f0, f1) = (self.f[i], self.f[i + 1]);
        let val = a * f0 + b * f1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (f1 - f0) / h + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let d2 = a * m0 + b * m1;
        (val, d1, d2)
    }
}

/// Cylinder over a planar curve: `X(s, t) = u(s) e + y(s) v + t r`, with
/// `r` the unit ruling and `e = v × r`, so `<X, v> = y` and `<X_t, v> = 0`.
#[derive(Clone, Debug)]
pub struct CatenaryCylinder {
    u: CubicSpline,
    y: CubicSpline,
    e: Vec3,
    v: Vec3,
    ruling: Vec3,
}

impl CatenaryCylinder {
    pub fn s_range(&self) -> (f64, f64) {
        self.u.range()
    }

    pub fn jet(&self, s: f64, t: f64) -> Jet2 {
        let (u, u1, u2) = self.u.eval(s);
        let (y, y1, y2) = self.y.eval(s);
        Jet2 {
            x: self.e * u + self.v * y + self.ruling * t,
            xs: self.e * u1 + self.v * y1,
            xt: self.ruling,
            xss: self.e * u2 + self.v * y2,
            xst: Vec3::ZERO,
            xtt: Vec3::ZERO,
        }
    }

    pub fn surface(&self, t_range: (f64, f64)) -> ParamSurface {
        let cyl = self.clone();
        ParamSurface::exact(Domain::new(self.s_range(), t_range), move |s, t| cyl.jet(s, t))
    }
}

/// Spline reconstruction of a cylinder over `curve`, extruded along `ruling`.
///
/// `v` and `ruling` are rescaled to unit length. Only the Euclidean metric
/// is supported.
pub fn catenary_cylinder(curve: &CatenaryPath, v: Vec3, ruling: Vec3, m: Metric) -> Result<CatenaryCylinder> {
    if m != Metric::Euclidean {
        return Err(CatenaryError::Unsupported);
    }
    if curve.states.len() < 2 {
        return Err(CatenaryError::InvalidArgument("curve needs at least two nodes".into()));
    }
    let (vn, rn) = (v.norm(), ruling.norm());
    if !(vn > 0.0 && rn > 0.0) || !v.is_finite() || !ruling.is_finite() {
        return Err(CatenaryError::InvalidArgument("v and ruling must be nonzero".into()));
    }
    let (v, ruling) = (v / vn, ruling / rn);
    let dot = v.dot(&ruling);
    if dot.abs() > ORTHOGONALITY_TOL {
        return Err(CatenaryError::NotOrthogonal(dot));
    }
    let s: Vec<f64> = curve.states.iter().map(|st| st.s).collect();
    let first = curve.states[0];
    let last = *curve.end();
    let u = CubicSpline::clamped(s.clone(), curve.states.iter().map(|st| st.u).collect(), first.theta.cos(), last.theta.cos());
    let y = CubicSpline::clamped(s, curve.states.iter().map(|st| st.y).collect(), first.theta.sin(), last.theta.sin());
    Ok(CatenaryCylinder { u, y, e: v.cross(&ruling), v, ruling })
}
