//! Ruled surfaces `X(s, t) = γ(s) + t w(s)` and the coefficient polynomials
//! of the singular-minimality residual in the ruling parameter `t`.
//!
//! Three normalized classes are supported:
//!
//! * [`DirectorClass::EuclidStandard`]: in `R³`, `<γ',w> = <γ',w'> = 0`,
//!   `<w,w> = <w',w'> = 1`. Frame `{w, w', w×w'}` with `P = (w,w',γ')`,
//!   `Q = (w,w',w'')`.
//! * [`DirectorClass::LorentzNondegenerate`]: in `L³`, the same relations with
//!   `<w',w'>_L = δ = ±1`, `P = (γ',w,w')`, `Q = (w,w',w'')`.
//! * [`DirectorClass::LorentzLightlikeDirector`]: in `L³`, `w'` null,
//!   `<γ',γ'>_L = <w,w>_L = 1`, `<γ',w>_L = 0`, `Q = <γ',w'>_L`.
//!
//! For each class, multiplying the residual through by `<X,v>` yields a
//! polynomial in `t` whose coefficients `A_n(s)` have closed forms in the
//! frame quantities. [`coefficients`] evaluates those closed forms and
//! [`residual_polynomial_consistency`] checks them against the residual
//! computed directly from the surface jets.

mod generate;
mod normalize;
mod sweep;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{triple, Metric, Vec3};
use crate::curve::{CurveFn, CurveJet};
use crate::surface::{self, Direction, Domain, Jet2, ParamSurface, SurfaceError};

pub use generate::{
    helicoid, lightlike_reference, random_case, random_direction, random_helicoid_case, random_lorentz_input, LorentzRawInput, SweepCase,
    RANDOM_S_RANGE,
};
pub use normalize::{normalize_euclidean, normalize_lorentz};
pub use sweep::{
    falsification_sweep, run_sweep, ExcludedSurface, SurfaceRow, SweepClass, SweepConfig, SweepFamily, SweepReport, CYLINDER_FLOOR,
    FLAG_THRESHOLD,
};

/// Step of the central difference used for `P'` (and `Q'` in the lightlike
/// class).
pub const DERIVATIVE_STEP: f64 = 1e-4;
/// Tolerance for the normalization relations.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// `|Q|` below this is rejected in the lightlike class.
pub const ZERO_Q_FLOOR: f64 = 1e-10;

/// Sign `σ` with `Σ A_n t^n = σ · D(s, t)`, where `D` is the cleared residual
/// from [`surface::cleared_residual`].
pub const EUCLID_ORACLE_SIGN: f64 = -1.0;
pub const LORENTZ_ORACLE_SIGN: f64 = 1.0;
pub const LIGHTLIKE_ORACLE_SIGN: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuledError {
    #[error("ruling direction must be nonzero")]
    ZeroDirection,
    #[error("surface is not in normalized form: {relation} off by {defect:e} at s = {s}")]
    NotNormalized { relation: &'static str, defect: f64, s: f64 },
    #[error("director is (nearly) constant: min |w'| = {0:e}")]
    CylindricalInput(f64),
    #[error("director is not unit length: |<w,w> - 1| = {0:e}")]
    NotUnitDirector(f64),
    #[error("input curve is not spacelike at s = {s}")]
    NonSpacelikeInput { s: f64 },
    #[error("input violates the precondition {relation} (off by {defect:e})")]
    Precondition { relation: &'static str, defect: f64 },
    #[error("reparametrization ODE broke down at s = {s}: {reason}")]
    OdeBreakdown { s: f64, reason: String },
    #[error("Q = {0:e} vanishes on a lightlike-director surface")]
    ZeroQ(f64),
    #[error("only {valid} admissible t-samples (need at least 4)")]
    InsufficientSamples { valid: usize },
    #[error("metric does not match the director class")]
    MetricMismatch,
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

pub type Result<T> = std::result::Result<T, RuledError>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectorClass {
    EuclidStandard,
    /// `<w', w'>_L = δ`.
    LorentzNondegenerate(i8),
    LorentzLightlikeDirector,
    /// `w' = 0`: not a normalized class, carried only by cylinders.
    Cylindrical(Metric),
}

impl DirectorClass {
    pub fn metric(&self) -> Metric {
        match self {
            DirectorClass::EuclidStandard => Metric::Euclidean,
            DirectorClass::LorentzNondegenerate(_) | DirectorClass::LorentzLightlikeDirector => Metric::Lorentzian,
            DirectorClass::Cylindrical(m) => *m,
        }
    }

    pub fn oracle_sign(&self) -> f64 {
        match self {
            DirectorClass::EuclidStandard => EUCLID_ORACLE_SIGN,
            DirectorClass::LorentzNondegenerate(_) => LORENTZ_ORACLE_SIGN,
            DirectorClass::LorentzLightlikeDirector => LIGHTLIKE_ORACLE_SIGN,
            DirectorClass::Cylindrical(_) => 0.0,
        }
    }

    /// Number of coefficients `A_n` of the residual polynomial.
    pub fn coefficient_count(&self) -> usize {
        match self {
            DirectorClass::LorentzLightlikeDirector => 3,
            _ => 4,
        }
    }
}

#[derive(Clone)]
pub struct RuledSurface {
    base: CurveFn,
    director: CurveFn,
    s_range: (f64, f64),
    class: DirectorClass,
}

impl std::fmt::Debug for RuledSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RuledSurface").field("s_range", &self.s_range).field("class", &self.class).finish()
    }
}

/// Samples used when verifying the normalization relations.
const CHECK_SAMPLES: usize = 33;

impl RuledSurface {
    /// Builds a normalized surface, verifying the class relations on a
    /// sample of the parameter range.
    pub fn normalized(base: CurveFn, director: CurveFn, s_range: (f64, f64), class: DirectorClass) -> Result<Self> {
        if matches!(class, DirectorClass::Cylindrical(_)) {
            return Err(RuledError::CylindricalInput(0.0));
        }
        let rs = RuledSurface { base, director, s_range, class };
        rs.check_relations(NORMALIZATION_TOL)?;
        Ok(rs)
    }

    /// Skips the normalization check. The caller vouches for the relations.
    pub fn normalized_unchecked(base: CurveFn, director: CurveFn, s_range: (f64, f64), class: DirectorClass) -> Self {
        RuledSurface { base, director, s_range, class }
    }

    pub fn class(&self) -> DirectorClass {
        self.class
    }

    pub fn metric(&self) -> Metric {
        self.class.metric()
    }

    pub fn s_range(&self) -> (f64, f64) {
        self.s_range
    }

    pub fn base(&self, s: f64) -> CurveJet {
        (self.base)(s)
    }

    pub fn director(&self, s: f64) -> CurveJet {
        (self.director)(s)
    }

    pub fn base_fn(&self) -> CurveFn {
        self.base.clone()
    }

    pub fn director_fn(&self) -> CurveFn {
        self.director.clone()
    }

    /// Sample points spanning the parameter range, endpoints included.
    pub fn sample_points(&self, n: usize) -> Vec<f64> {
        let (a, b) = self.s_range;
        if n == 1 {
            return vec![0.5 * (a + b)];
        }
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    /// Largest violation of the class relations over a sample of the range.
    pub fn relation_defects(&self, samples: usize) -> Vec<(&'static str, f64, f64)> {
        let m = self.metric();
        let mut worst: Vec<(&'static str, f64, f64)> = Vec::new();
        let mut record = |name: &'static str, defect: f64, s: f64| {
            match worst.iter_mut().find(|(n, _, _)| *n == name) {
                Some(entry) if defect.abs() > entry.1 || defect.is_nan() => *entry = (name, defect.abs(), s),
                Some(_) => {}
                None => worst.push((name, defect.abs(), s)),
            }
        };
        for s in self.sample_points(samples) {
            let g = self.base(s);
            let w = self.director(s);
            match self.class {
                DirectorClass::EuclidStandard | DirectorClass::LorentzNondegenerate(_) => {
                    let delta = match self.class {
                        DirectorClass::LorentzNondegenerate(d) => f64::from(d),
                        _ => 1.0,
                    };
                    record("<g',w>", m.inner(&g.d1, &w.p), s);
                    record("<g',w'>", m.inner(&g.d1, &w.d1), s);
                    record("<w,w>", m.inner(&w.p, &w.p) - 1.0, s);
                    record("<w',w'>", m.inner(&w.d1, &w.d1) - delta, s);
                }
                DirectorClass::LorentzLightlikeDirector => {
                    record("<g',g'>", m.inner(&g.d1, &g.d1) - 1.0, s);
                    record("<g',w>", m.inner(&g.d1, &w.p), s);
                    record("<w,w>", m.inner(&w.p, &w.p) - 1.0, s);
                    record("<w',w'>", m.inner(&w.d1, &w.d1), s);
                    // w' must not vanish
                    record("w'!=0", if w.d1.norm() > 1e-8 { 0.0 } else { 1.0 }, s);
                }
                DirectorClass::Cylindrical(_) => record("w'=0", w.d1.norm(), s),
            }
        }
        worst
    }

    fn check_relations(&self, tol: f64) -> Result<()> {
        for (relation, defect, s) in self.relation_defects(CHECK_SAMPLES) {
            if !(defect <= tol) {
                return Err(RuledError::NotNormalized { relation, defect, s });
            }
        }
        Ok(())
    }

    /// Jet of `X(s, t) = γ(s) + t w(s)`.
    pub fn jet(&self, s: f64, t: f64) -> Jet2 {
        let g = self.base(s);
        let w = self.director(s);
        Jet2 {
            x: g.p + w.p * t,
            xs: g.d1 + w.d1 * t,
            xt: w.p,
            xss: g.d2 + w.d2 * t,
            xst: w.d1,
            xtt: Vec3::ZERO,
        }
    }

    /// The same surface as a [`ParamSurface`] with exact jets over
    /// `s_range × t_range`.
    pub fn to_param_surface(&self, t_range: (f64, f64)) -> ParamSurface {
        let rs = self.clone();
        ParamSurface::exact(Domain::new(self.s_range, t_range), move |s, t| rs.jet(s, t))
    }
}

/// Cylinder over `base` with constant rulings along `direction`.
///
/// The direction is rescaled to unit length in the metric unless it is
/// null, in which case it is kept as given.
pub fn make_cylinder(base: CurveFn, s_range: (f64, f64), direction: Vec3, m: Metric) -> Result<RuledSurface> {
    if direction == Vec3::ZERO || !direction.is_finite() {
        return Err(RuledError::ZeroDirection);
    }
    let n = m.norm(&direction);
    let w = if n > 1e-12 * direction.norm() { direction / n } else { direction };
    let director: CurveFn = Arc::new(move |_| CurveJet { p: w, d1: Vec3::ZERO, d2: Vec3::ZERO });
    Ok(RuledSurface { base, director, s_range, class: DirectorClass::Cylindrical(m) })
}

/// Frame quantities of a normalized ruled surface at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuledFrame {
    pub w: Vec3,
    pub wp: Vec3,
    /// `w × w'` in the surface metric.
    pub wxwp: Vec3,
    /// Zero in the lightlike class, where it plays no role.
    pub p: f64,
    pub q: f64,
    /// `+1` in `R³`, `δ` in the nondegenerate Lorentzian class, `0` for the
    /// lightlike class.
    pub delta: i8,
}

pub fn frame(rs: &RuledSurface, s: f64) -> Result<RuledFrame> {
    let m = rs.metric();
    let g = rs.base(s);
    let w = rs.director(s);
    let wxwp = m.cross(&w.p, &w.d1);
    let (p, q, delta) = match rs.class {
        DirectorClass::Cylindrical(_) => {
            return Err(RuledError::NotNormalized { relation: "w'=0 (cylinder)", defect: 1.0, s });
        }
        DirectorClass::EuclidStandard => (triple(&w.p, &w.d1, &g.d1), triple(&w.p, &w.d1, &w.d2), 1),
        DirectorClass::LorentzNondegenerate(d) => (triple(&g.d1, &w.p, &w.d1), triple(&w.p, &w.d1, &w.d2), d),
        DirectorClass::LorentzLightlikeDirector => (0.0, m.inner(&g.d1, &w.d1), 0),
    };
    Ok(RuledFrame { w: w.p, wp: w.d1, wxwp, p, q, delta })
}

/// Norms of the frame identities that hold for a normalized surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameDefects {
    /// Euclid: `|γ' − P w×w'|`; Lorentz: `|γ' + δP w×w'|`;
    /// lightlike: `|w' − Q(γ' + γ'×w)|`.
    pub base_tangent: f64,
    /// Euclid: `|w'' + w − Q w×w'|`; Lorentz: `|w'' + δ(w + Q w×w')|`;
    /// lightlike: `|γ'' + Q w + (Q'/Q) γ'×w|`.
    pub director_accel: f64,
    /// Euclid: `|γ'×w − P w'|`; Lorentz: `|γ'×w − δP w'|`;
    /// lightlike: `|w×w' + w'|`.
    pub cross: f64,
}

pub fn frame_defects(rs: &RuledSurface, s: f64) -> Result<FrameDefects> {
    let fr = frame(rs, s)?;
    let m = rs.metric();
    let g = rs.base(s);
    let w = rs.director(s);
    let n = fr.wxwp;
    Ok(match rs.class {
        DirectorClass::EuclidStandard => FrameDefects {
            base_tangent: (g.d1 - n * fr.p).norm(),
            director_accel: (w.d2 + w.p - n * fr.q).norm(),
            cross: (m.cross(&g.d1, &w.p) - w.d1 * fr.p).norm(),
        },
        DirectorClass::LorentzNondegenerate(d) => {
            let d = f64::from(d);
            FrameDefects {
                base_tangent: (g.d1 + n * (d * fr.p)).norm(),
                director_accel: (w.d2 + (w.p + n * fr.q) * d).norm(),
                cross: (m.cross(&g.d1, &w.p) - w.d1 * (d * fr.p)).norm(),
            }
        }
        DirectorClass::LorentzLightlikeDirector => {
            let gxw = m.cross(&g.d1, &w.p);
            let qp = lightlike_q_prime(rs, s)?;
            FrameDefects {
                base_tangent: (w.d1 - (g.d1 + gxw) * fr.q).norm(),
                director_accel: (g.d2 + w.p * fr.q + gxw * (qp / fr.q)).norm(),
                cross: (n + w.d1).norm(),
            }
        }
        DirectorClass::Cylindrical(_) => unreachable!("frame() rejects cylinders"),
    })
}

fn central_difference(f: impl Fn(f64) -> Result<f64>, s: f64) -> Result<f64> {
    Ok((f(s + DERIVATIVE_STEP)? - f(s - DERIVATIVE_STEP)?) / (2.0 * DERIVATIVE_STEP))
}

fn lightlike_q_prime(rs: &RuledSurface, s: f64) -> Result<f64> {
    central_difference(|x| Ok(frame(rs, x)?.q), s)
}

/// Values `A_0 … A_3` (or `A_0 … A_2`) of the residual polynomial at `s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientVector {
    pub a: Vec<f64>,
    pub s: f64,
    pub class: DirectorClass,
}

impl CoefficientVector {
    /// `Σ A_n t^n`.
    pub fn eval(&self, t: f64) -> f64 {
        self.a.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

fn check_direction_metric(rs: &RuledSurface, v: &Direction) -> Result<()> {
    if v.metric() != rs.metric() {
        return Err(RuledError::MetricMismatch);
    }
    Ok(())
}

pub fn coefficients(rs: &RuledSurface, s: f64, v: &Direction, alpha: f64) -> Result<CoefficientVector> {
    check_direction_metric(rs, v)?;
    let m = rs.metric();
    let fr = frame(rs, s)?;
    let g = rs.base(s);
    let vv = v.vector();
    let gv = m.inner(&g.p, &vv);
    let wv = m.inner(&fr.w, &vv);
    let a = match rs.class {
        DirectorClass::EuclidStandard => {
            let (p, q) = (fr.p, fr.q);
            let dp = central_difference(|x| Ok(frame(rs, x)?.p), s)?;
            let wpv = m.inner(&fr.wp, &vv);
            let wwv = triple(&fr.w, &fr.wp, &vv);
            vec![
                alpha * p.powi(3) * wpv + p * p * q * gv,
                -alpha * p * p * wwv + p * p * q * wv + dp * gv,
                alpha * p * wpv + q * gv + dp * wv,
                -alpha * wwv + q * wv,
            ]
        }
        DirectorClass::LorentzNondegenerate(d) => {
            let d = f64::from(d);
            let (p, q) = (fr.p, fr.q);
            let dp = central_difference(|x| Ok(frame(rs, x)?.p), s)?;
            let wpv = m.inner(&fr.wp, &vv);
            let wwv = triple(&fr.w, &fr.wp, &vv);
            vec![
                -alpha * p.powi(3) * wpv + p * p * q * gv,
                alpha * d * p * p * wwv + p * p * q * wv - dp * gv,
                alpha * p * wpv - q * gv - dp * wv,
                -alpha * d * wwv - q * wv,
            ]
        }
        DirectorClass::LorentzLightlikeDirector => {
            let q = fr.q;
            if !(q.abs() >= ZERO_Q_FLOOR) {
                return Err(RuledError::ZeroQ(q));
            }
            let dq = lightlike_q_prime(rs, s)?;
            let gpv = m.inner(&g.d1, &vv);
            let gwv = triple(&g.d1, &fr.w, &vv);
            vec![
                dq / q * gv + alpha * gwv,
                dq / q * wv + dq * gv + alpha * q * (gpv + 3.0 * gwv),
                dq * wv + 2.0 * alpha * q * q * (gpv + gwv),
            ]
        }
        DirectorClass::Cylindrical(_) => unreachable!("frame() rejects cylinders"),
    };
    Ok(CoefficientVector { a, s, class: rs.class })
}

/// `D(s, t)`: the residual cleared of its `<X,v>` denominator, from the raw
/// surface jet.
pub fn cleared_residual(rs: &RuledSurface, s: f64, t: f64, v: &Direction, alpha: f64) -> Result<f64> {
    check_direction_metric(rs, v)?;
    Ok(surface::cleared_residual(rs.metric(), &rs.jet(s, t), v, alpha)?)
}

/// Default ruling-parameter samples.
pub fn default_t_samples() -> Vec<f64> {
    (0..9).map(|i| -1.0 + 0.25 * i as f64).collect()
}

/// `max_t |Σ A_n t^n − σ D(s,t)|` over the admissible samples.
///
/// A sample is admissible when `X(s,t)` lies in the halfspace of `v` (for
/// `L³`: `<X,v>_L ≠ 0`) and the surface is regular there (spacelike in
/// `L³`). At least four admissible samples are required.
pub fn residual_polynomial_consistency(rs: &RuledSurface, s: f64, v: &Direction, alpha: f64, t_samples: &[f64]) -> Result<f64> {
    let cv = coefficients(rs, s, v, alpha)?;
    let sign = rs.class.oracle_sign();
    let m = rs.metric();
    let mut valid = 0;
    let mut worst = 0.0f64;
    for &t in t_samples {
        let j = rs.jet(s, t);
        let height = m.inner(&j.x, &v.vector());
        let admissible_height = match m {
            Metric::Euclidean => height > 0.0,
            Metric::Lorentzian => height != 0.0,
        };
        if !admissible_height {
            continue;
        }
        let d = match surface::cleared_residual(m, &j, v, alpha) {
            Ok(d) => d,
            Err(SurfaceError::DegenerateMetric { .. } | SurfaceError::NotSpacelike { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        valid += 1;
        worst = worst.max((cv.eval(t) - sign * d).abs());
    }
    if valid < 4 {
        return Err(RuledError::InsufficientSamples { valid });
    }
    Ok(worst)
}
