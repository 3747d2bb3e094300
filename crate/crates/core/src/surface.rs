//! Parametric immersions, their second-order jets, and the curvature
//! quantities built from them.
//!
//! Sign conventions. The unit normal is always `N = Xs × Xt / |Xs × Xt|` in
//! parameter order; no global orientation is attempted. The second
//! fundamental form uses `e = <N, Xss>`, so with this `N` the outward-oriented
//! unit sphere has `H = −1` and the upper sheet of the unit hyperboloid in
//! `L³` has `|H| = 1`. Euclidean mean curvature is `(Ge − 2Ff + Eg) / 2W`;
//! Lorentzian mean curvature is
//! `−½ [G(Xs,Xt,Xss) − 2F(Xs,Xt,Xst) + E(Xs,Xt,Xtt)] / |W|^{3/2}`, with
//! `W = EG − F²`.
//!
//! The singular-minimality residual is the polynomial form
//!
//! ```text
//! G(Xs,Xt,Xss) − 2F(Xs,Xt,Xst) + E(Xs,Xt,Xtt) − ε α W (Xs,Xt,v) / <X,v>
//! ```
//!
//! with `ε = <N,N>` (`−1` on spacelike surfaces of `L³`, and taken as `+1` in
//! the Euclidean case). In `R³` it vanishes exactly where
//! `2H = α <N,v> / <X,v>`. In `L³` the same expression is used verbatim; it
//! vanishes where `2H = α <N,v>_L / <X,v>_L` under the mean-curvature formula
//! above, i.e. it carries the same factor 2 as the Euclidean condition.

use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{self, triple, CausalCharacter, Metric, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("parameter ({s}, {t}) outside the evaluation domain")]
    OutOfDomain { s: f64, t: f64 },
    #[error("degenerate induced metric: |EG - F^2| = {w2:e} below floor {floor:e}")]
    DegenerateMetric { w2: f64, floor: f64 },
    #[error("surface is not spacelike at this point (EG - F^2 = {w2:e})")]
    NotSpacelike { w2: f64 },
    #[error("point leaves the halfspace: <X, v> = {value:e}")]
    HalfspaceViolation { value: f64 },
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error("direction must be timelike in the Lorentzian metric: {0}")]
    DirectionNotTimelike(Vec3),
    #[error("direction is not unit length (|<v,v>| = {0})")]
    NotUnit(f64),
    #[error("grid needs at least 2 nodes per axis, got {ns}x{nt}")]
    BadGrid { ns: usize, nt: usize },
}

pub type Result<T> = std::result::Result<T, SurfaceError>;

/// Value and partial derivatives up to order two of an immersion at `(s, t)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet2 {
    pub x: Vec3,
    pub xs: Vec3,
    pub xt: Vec3,
    pub xss: Vec3,
    pub xst: Vec3,
    pub xtt: Vec3,
}

/// A unit (Euclidean) or unit timelike (Lorentzian) direction `v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    unit: Vec3,
    original: Vec3,
    metric: Metric,
}

impl Direction {
    /// Normalizes `v` in the given metric, keeping the original for reference.
    pub fn normalized(metric: Metric, v: Vec3) -> Result<Self> {
        if v == Vec3::ZERO {
            return Err(SurfaceError::ZeroDirection);
        }
        if metric == Metric::Lorentzian && algebra::causal_character(&v) != CausalCharacter::Timelike {
            return Err(SurfaceError::DirectionNotTimelike(v));
        }
        let unit = v / metric.norm(&v);
        Ok(Direction { unit, original: v, metric })
    }

    /// Accepts `v` only if it already has unit length (to 1e-12).
    pub fn unit(metric: Metric, v: Vec3) -> Result<Self> {
        let d = Direction::normalized(metric, v)?;
        let q = metric.inner(&v, &v).abs();
        if (q - 1.0).abs() > 1e-12 {
            return Err(SurfaceError::NotUnit(q));
        }
        Ok(d)
    }

    pub fn vector(&self) -> Vec3 {
        self.unit
    }

    pub fn original(&self) -> Vec3 {
        self.original
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn negated(&self) -> Direction {
        Direction { unit: -self.unit, original: -self.original, metric: self.metric }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub s0: f64,
    pub s1: f64,
    pub t0: f64,
    pub t1: f64,
}

impl Domain {
    pub fn new(s: (f64, f64), t: (f64, f64)) -> Self {
        Domain { s0: s.0, s1: s.1, t0: t.0, t1: t.1 }
    }

    pub fn contains(&self, s: f64, t: f64) -> bool {
        self.contains_with_margin(s, t, 0.0)
    }

    fn contains_with_margin(&self, s: f64, t: f64, margin: f64) -> bool {
        s >= self.s0 + margin && s <= self.s1 - margin && t >= self.t0 + margin && t <= self.t1 - margin
    }

    pub fn diameter(&self) -> f64 {
        (self.s1 - self.s0).hypot(self.t1 - self.t0)
    }
}

/// Tensor grid of `ns × nt` nodes spanning a domain, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub ns: usize,
    pub nt: usize,
}

impl Grid {
    pub const DEFAULT: Grid = Grid { ns: 64, nt: 64 };

    pub fn new(ns: usize, nt: usize) -> Result<Self> {
        if ns < 2 || nt < 2 {
            return Err(SurfaceError::BadGrid { ns, nt });
        }
        Ok(Grid { ns, nt })
    }

    /// Node coordinates along one axis.
    pub fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let step = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect()
    }

    /// Composite trapezoid weights along one axis.
    pub fn trapezoid_weights(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let step = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| if i == 0 || i + 1 == n { 0.5 * step } else { step }).collect()
    }
}

pub type JetFn = Arc<dyn Fn(f64, f64) -> Jet2 + Send + Sync>;
pub type PointFn = Arc<dyn Fn(f64, f64) -> Vec3 + Send + Sync>;

#[derive(Clone)]
pub enum JetSource {
    Exact(JetFn),
    FiniteDifference { point: PointFn, h: f64 },
}

#[derive(Clone)]
pub struct ParamSurface {
    pub domain: Domain,
    pub source: JetSource,
}

impl std::fmt::Debug for ParamSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.source {
            JetSource::Exact(_) => "exact".to_string(),
            JetSource::FiniteDifference { h, .. } => format!("finite-difference(h={h})"),
        };
        f.debug_struct("ParamSurface").field("domain", &self.domain).field("source", &kind).finish()
    }
}

impl ParamSurface {
    pub fn exact<F>(domain: Domain, jet: F) -> Self
    where
        F: Fn(f64, f64) -> Jet2 + Send + Sync + 'static,
    {
        ParamSurface { domain, source: JetSource::Exact(Arc::new(jet)) }
    }

    /// Finite-difference jets with step `h`; `None` picks `1e-4 · diameter`.
    pub fn finite_difference<F>(domain: Domain, point: F, h: Option<f64>) -> Self
    where
        F: Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
    {
        let h = h.unwrap_or(1e-4 * domain.diameter());
        ParamSurface { domain, source: JetSource::FiniteDifference { point: Arc::new(point), h } }
    }

    pub fn jet(&self, s: f64, t: f64) -> Result<Jet2> {
        match &self.source {
            JetSource::Exact(f) => {
                if !self.domain.contains(s, t) {
                    return Err(SurfaceError::OutOfDomain { s, t });
                }
                Ok(f(s, t))
            }
            JetSource::FiniteDifference { point, h } => {
                if !self.domain.contains_with_margin(s, t, 2.0 * h) {
                    return Err(SurfaceError::OutOfDomain { s, t });
                }
                Ok(finite_difference_jet(point.as_ref(), s, t, *h))
            }
        }
    }

    /// Position only; no derivative work.
    pub fn point(&self, s: f64, t: f64) -> Result<Vec3> {
        match &self.source {
            JetSource::FiniteDifference { point, .. } if self.domain.contains(s, t) => Ok(point(s, t)),
            _ => self.jet(s, t).map(|j| j.x),
        }
    }
}

// five-point central weights for f' (offsets -2..2, divided by 12h)
const D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
// five-point central weights for f'' (divided by 12h²)
const D2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];

/// Fourth-order central-difference jet of a point map.
pub fn finite_difference_jet(point: &dyn Fn(f64, f64) -> Vec3, s: f64, t: f64, h: f64) -> Jet2 {
    let x = point(s, t);
    let mut xs = Vec3::ZERO;
    let mut xt = Vec3::ZERO;
    let mut xss = Vec3::ZERO;
    let mut xtt = Vec3::ZERO;
    let mut xst = Vec3::ZERO;
    for (k, (&a, &b)) in D1.iter().zip(D2.iter()).enumerate() {
        let off = (k as f64 - 2.0) * h;
        let ps = if k == 2 { x } else { point(s + off, t) };
        let pt = if k == 2 { x } else { point(s, t + off) };
        xs += ps * a;
        xss += ps * b;
        xt += pt * a;
        xtt += pt * b;
    }
    for (i, &a) in D1.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in D1.iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            let p = point(s + (i as f64 - 2.0) * h, t + (j as f64 - 2.0) * h);
            xst += p * (a * b);
        }
    }
    let h12 = 12.0 * h;
    Jet2 {
        x,
        xs: xs / h12,
        xt: xt / h12,
        xss: xss / (h12 * h),
        xst: xst / (h12 * h12),
        xtt: xtt / (h12 * h),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalForms {
    pub e_cap: f64,
    pub f_cap: f64,
    pub g_cap: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    /// `EG − F²`.
    pub w2: f64,
    /// `<N, N>`: always `+1` in the Euclidean metric.
    pub eps: i8,
}

/// `|EG − F²|` must exceed `1e-14 · (E² + G² + 1)`.
pub fn regularity_floor(e_cap: f64, g_cap: f64) -> f64 {
    1e-14 * (e_cap * e_cap + g_cap * g_cap + 1.0)
}

pub fn fundamental_forms(m: Metric, j: &Jet2) -> Result<FundamentalForms> {
    let e_cap = m.inner(&j.xs, &j.xs);
    let f_cap = m.inner(&j.xs, &j.xt);
    let g_cap = m.inner(&j.xt, &j.xt);
    let w2 = e_cap * g_cap - f_cap * f_cap;
    let floor = regularity_floor(e_cap, g_cap);
    if !(w2.abs() >= floor) {
        return Err(SurfaceError::DegenerateMetric { w2, floor });
    }
    let eps = match m {
        Metric::Euclidean => 1,
        // <Xs×Xt, Xs×Xt>_L = −(EG − F²)
        Metric::Lorentzian => {
            if w2 > 0.0 {
                -1
            } else {
                1
            }
        }
    };
    let root = w2.abs().sqrt();
    Ok(FundamentalForms {
        e_cap,
        f_cap,
        g_cap,
        e: triple(&j.xs, &j.xt, &j.xss) / root,
        f: triple(&j.xs, &j.xt, &j.xst) / root,
        g: triple(&j.xs, &j.xt, &j.xtt) / root,
        w2,
        eps,
    })
}

fn spacelike_forms(m: Metric, j: &Jet2) -> Result<FundamentalForms> {
    let ff = fundamental_forms(m, j)?;
    if m == Metric::Lorentzian && ff.eps != -1 {
        return Err(SurfaceError::NotSpacelike { w2: ff.w2 });
    }
    Ok(ff)
}

pub fn unit_normal(m: Metric, j: &Jet2) -> Result<Vec3> {
    let ff = fundamental_forms(m, j)?;
    Ok(m.cross(&j.xs, &j.xt) / ff.w2.abs().sqrt())
}

/// `G(Xs,Xt,Xss) − 2F(Xs,Xt,Xst) + E(Xs,Xt,Xtt)`.
fn curvature_bracket(ff: &FundamentalForms) -> f64 {
    let root = ff.w2.abs().sqrt();
    (ff.g_cap * ff.e - 2.0 * ff.f_cap * ff.f + ff.e_cap * ff.g) * root
}

pub fn mean_curvature(m: Metric, j: &Jet2) -> Result<f64> {
    let ff = spacelike_forms(m, j)?;
    Ok(match m {
        Metric::Euclidean => (ff.g_cap * ff.e - 2.0 * ff.f_cap * ff.f + ff.e_cap * ff.g) / (2.0 * ff.w2),
        Metric::Lorentzian => -0.5 * curvature_bracket(&ff) / ff.w2.abs().powf(1.5),
    })
}

/// `<X, v>` multiplied through the residual: no division, no halfspace check.
///
/// Returns `<X,v> · [G(Xs,Xt,Xss) − 2F(Xs,Xt,Xst) + E(Xs,Xt,Xtt)] − ε α W (Xs,Xt,v)`.
pub fn cleared_residual(m: Metric, j: &Jet2, v: &Direction, alpha: f64) -> Result<f64> {
    let ff = spacelike_forms(m, j)?;
    let vv = v.vector();
    let height = m.inner(&j.x, &vv);
    let rhs = f64::from(ff.eps) * alpha * ff.w2 * triple(&j.xs, &j.xt, &vv);
    Ok(height * curvature_bracket(&ff) - rhs)
}

fn check_height(m: Metric, height: f64) -> Result<()> {
    let bad = match m {
        Metric::Euclidean => !(height > 0.0),
        Metric::Lorentzian => !(height.abs() > 0.0),
    };
    if bad {
        Err(SurfaceError::HalfspaceViolation { value: height })
    } else {
        Ok(())
    }
}

/// Singular-minimality residual at a single jet.
pub fn residual_at(m: Metric, j: &Jet2, v: &Direction, alpha: f64) -> Result<f64> {
    let ff = spacelike_forms(m, j)?;
    let vv = v.vector();
    let height = m.inner(&j.x, &vv);
    check_height(m, height)?;
    let rhs = f64::from(ff.eps) * alpha * ff.w2 / height * triple(&j.xs, &j.xt, &vv);
    Ok(curvature_bracket(&ff) - rhs)
}

pub fn singular_residual(m: Metric, surf: &ParamSurface, s: f64, t: f64, v: &Direction, alpha: f64) -> Result<f64> {
    residual_at(m, &surf.jet(s, t)?, v, alpha)
}

/// Residuals on every grid node, row-major in `s`.
pub fn residual_field(m: Metric, surf: &ParamSurface, v: &Direction, alpha: f64, grid: Grid) -> Result<Vec<(f64, f64, f64)>> {
    let d = surf.domain;
    let ss = Grid::axis(d.s0, d.s1, grid.ns);
    let ts = Grid::axis(d.t0, d.t1, grid.nt);
    let mut out = Vec::with_capacity(grid.ns * grid.nt);
    for &s in &ss {
        for &t in &ts {
            out.push((s, t, singular_residual(m, surf, s, t, v, alpha)?));
        }
    }
    Ok(out)
}

fn energy_density(m: Metric, x: &Vec3, xs: &Vec3, xt: &Vec3, v: &Direction, alpha: f64) -> Result<f64> {
    let e_cap = m.inner(xs, xs);
    let f_cap = m.inner(xs, xt);
    let g_cap = m.inner(xt, xt);
    let w2 = e_cap * g_cap - f_cap * f_cap;
    let floor = regularity_floor(e_cap, g_cap);
    if !(w2.abs() >= floor) {
        return Err(SurfaceError::DegenerateMetric { w2, floor });
    }
    if m == Metric::Lorentzian && w2 < 0.0 {
        return Err(SurfaceError::NotSpacelike { w2 });
    }
    let height = m.inner(x, &v.vector());
    if !(height > 0.0) {
        return Err(SurfaceError::HalfspaceViolation { value: height });
    }
    Ok(height.powf(alpha) * w2.abs().sqrt())
}

/// Trapezoid quadrature of `<X,v>^α √|EG − F²|` over the surface domain.
pub fn potential_energy(m: Metric, surf: &ParamSurface, v: &Direction, alpha: f64, grid: Grid) -> Result<f64> {
    let d = surf.domain;
    let ss = Grid::axis(d.s0, d.s1, grid.ns);
    let ts = Grid::axis(d.t0, d.t1, grid.nt);
    let ws = Grid::trapezoid_weights(d.s0, d.s1, grid.ns);
    let wt = Grid::trapezoid_weights(d.t0, d.t1, grid.nt);
    let mut total = 0.0;
    for (s, a) in ss.iter().zip(&ws) {
        for (t, b) in ts.iter().zip(&wt) {
            let j = surf.jet(*s, *t)?;
            total += a * b * energy_density(m, &j.x, &j.xs, &j.xt, v, alpha)?;
        }
    }
    Ok(total)
}

/// Normal and its two partial derivatives, from a jet.
fn normal_with_derivatives(m: Metric, j: &Jet2) -> Result<(Vec3, Vec3, Vec3)> {
    fundamental_forms(m, j)?;
    let c = m.cross(&j.xs, &j.xt);
    let cs = m.cross(&j.xss, &j.xt) + m.cross(&j.xs, &j.xst);
    let ct = m.cross(&j.xst, &j.xt) + m.cross(&j.xs, &j.xtt);
    let q = m.inner(&c, &c);
    let sign = q.signum();
    let r = q.abs().sqrt();
    let r3 = r * r * r;
    let n = c / r;
    let ns = cs / r - c * (sign * m.inner(&c, &cs) / r3);
    let nt = ct / r - c * (sign * m.inner(&c, &ct) / r3);
    Ok((n, ns, nt))
}

/// Central difference in `h` of the energy along the normal variation
/// `X ± h · bump · N`.
///
/// The perturbed tangent vectors are formed analytically from the jet; only
/// the gradient of `bump` is taken by finite differences.
pub fn first_variation<B>(m: Metric, surf: &ParamSurface, v: &Direction, alpha: f64, bump: B, h: f64, grid: Grid) -> Result<f64>
where
    B: Fn(f64, f64) -> f64,
{
    let d = surf.domain;
    let ss = Grid::axis(d.s0, d.s1, grid.ns);
    let ts = Grid::axis(d.t0, d.t1, grid.nt);
    let ws = Grid::trapezoid_weights(d.s0, d.s1, grid.ns);
    let wt = Grid::trapezoid_weights(d.t0, d.t1, grid.nt);
    let k = 1e-3 * d.diameter();
    let mut plus = 0.0;
    let mut minus = 0.0;
    for (s, a) in ss.iter().zip(&ws) {
        for (t, b) in ts.iter().zip(&wt) {
            let (s, t) = (*s, *t);
            let j = surf.jet(s, t)?;
            let (n, ns, nt) = normal_with_derivatives(m, &j)?;
            let phi = bump(s, t);
            let mut phi_s = 0.0;
            let mut phi_t = 0.0;
            for (idx, c) in D1.iter().enumerate() {
                if *c != 0.0 {
                    let off = (idx as f64 - 2.0) * k;
                    phi_s += c * bump(s + off, t);
                    phi_t += c * bump(s, t + off);
                }
            }
            phi_s /= 12.0 * k;
            phi_t /= 12.0 * k;
            let dx = n * phi;
            let dxs = n * phi_s + ns * phi;
            let dxt = n * phi_t + nt * phi;
            let wgt = a * b;
            plus += wgt * energy_density(m, &(j.x + dx * h), &(j.xs + dxs * h), &(j.xt + dxt * h), v, alpha)?;
            minus += wgt * energy_density(m, &(j.x - dx * h), &(j.xs - dxs * h), &(j.xt - dxt * h), v, alpha)?;
        }
    }
    Ok((plus - minus) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const E: Metric = Metric::Euclidean;
    const L: Metric = Metric::Lorentzian;

    fn plane() -> ParamSurface {
        ParamSurface::exact(Domain::new((0.0, 1.0), (0.0, 1.0)), |s, t| Jet2 {
            x: Vec3::new(s, t, 0.0),
            xs: Vec3::E1,
            xt: Vec3::E2,
            ..Default::default()
        })
    }

    pub(crate) fn sphere_jet(s: f64, t: f64) -> Jet2 {
        let (cs, ss) = (s.cos(), s.sin());
        let (ct, st) = (t.cos(), t.sin());
        Jet2 {
            x: Vec3::new(cs * ct, ss * ct, st),
            xs: Vec3::new(-ss * ct, cs * ct, 0.0),
            xt: Vec3::new(-cs * st, -ss * st, ct),
            xss: Vec3::new(-cs * ct, -ss * ct, 0.0),
            xst: Vec3::new(ss * st, -cs * st, 0.0),
            xtt: Vec3::new(-cs * ct, -ss * ct, -st),
        }
    }

    fn hyperboloid_point(s: f64, t: f64) -> Vec3 {
        Vec3::new(s, t, (1.0 + s * s + t * t).sqrt())
    }

    fn hyperboloid_jet(s: f64, t: f64) -> Jet2 {
        let r = (1.0 + s * s + t * t).sqrt();
        let r3 = r * r * r;
        Jet2 {
            x: hyperboloid_point(s, t),
            xs: Vec3::new(1.0, 0.0, s / r),
            xt: Vec3::new(0.0, 1.0, t / r),
            xss: Vec3::new(0.0, 0.0, (1.0 + t * t) / r3),
            xst: Vec3::new(0.0, 0.0, -s * t / r3),
            xtt: Vec3::new(0.0, 0.0, (1.0 + s * s) / r3),
        }
    }

    #[test]
    fn plane_jet_has_no_second_derivatives() {
        let j = plane().jet(0.3, 0.7).unwrap();
        assert_eq!(j.xss, Vec3::ZERO);
        assert_eq!(j.xst, Vec3::ZERO);
        assert_eq!(j.xtt, Vec3::ZERO);
    }

    #[test]
    fn graph_jet_matches_polynomial_derivatives() {
        let surf = ParamSurface::exact(Domain::new((0.0, 2.0), (-1.0, 1.0)), |s, t| Jet2 {
            x: Vec3::new(s, t, s * s),
            xs: Vec3::new(1.0, 0.0, 2.0 * s),
            xt: Vec3::E2,
            xss: Vec3::new(0.0, 0.0, 2.0),
            ..Default::default()
        });
        let j = surf.jet(1.0, 0.0).unwrap();
        assert_eq!(j.xss, Vec3::new(0.0, 0.0, 2.0));
        assert_eq!(j.xs, Vec3::new(1.0, 0.0, 2.0));
        let fd = ParamSurface::finite_difference(Domain::new((0.0, 2.0), (-1.0, 1.0)), |s, t| Vec3::new(s, t, s * s), Some(1e-3));
        let jf = fd.jet(1.0, 0.0).unwrap();
        assert!((jf.xss - j.xss).norm() < 1e-7);
    }

    #[test]
    fn finite_difference_sine_graph() {
        let surf = ParamSurface::finite_difference(Domain::new((-1.0, 1.0), (-1.0, 1.0)), |s, t| Vec3::new(s, t, s.sin()), Some(1e-3));
        let j = surf.jet(0.0, 0.0).unwrap();
        assert!(j.xss.norm() <= 1e-8);
        assert!((j.xs - Vec3::new(1.0, 0.0, 1.0)).norm() <= 1e-10);
    }

    #[test]
    fn finite_difference_requires_margin() {
        let surf = ParamSurface::finite_difference(Domain::new((0.0, 1.0), (0.0, 1.0)), |s, t| Vec3::new(s, t, 0.0), Some(1e-2));
        assert!(matches!(surf.jet(0.01, 0.5), Err(SurfaceError::OutOfDomain { .. })));
        assert!(surf.jet(0.03, 0.5).is_ok());
        assert!(matches!(plane().jet(1.5, 0.5), Err(SurfaceError::OutOfDomain { .. })));
    }

    #[test]
    fn default_fd_step_scales_with_domain() {
        let surf = ParamSurface::finite_difference(Domain::new((0.0, 3.0), (0.0, 4.0)), |s, t| Vec3::new(s, t, 0.0), None);
        match surf.source {
            JetSource::FiniteDifference { h, .. } => assert_abs_diff_eq!(h, 5e-4, epsilon = 1e-18),
            _ => unreachable!(),
        }
    }

    #[test]
    fn plane_forms() {
        let j = plane().jet(0.5, 0.5).unwrap();
        let ff = fundamental_forms(E, &j).unwrap();
        assert_eq!((ff.e_cap, ff.f_cap, ff.g_cap), (1.0, 0.0, 1.0));
        assert_eq!((ff.e, ff.f, ff.g), (0.0, 0.0, 0.0));
        assert_eq!(ff.eps, 1);
        let fl = fundamental_forms(L, &j).unwrap();
        assert_eq!(fl.eps, -1);
    }

    #[test]
    fn sphere_first_form_on_equator() {
        let ff = fundamental_forms(E, &sphere_jet(0.7, 0.0)).unwrap();
        assert_abs_diff_eq!(ff.e_cap, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ff.f_cap, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ff.g_cap, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_metric_detected() {
        let j = Jet2 { xs: Vec3::E1, xt: Vec3::E1 * 2.0, ..Default::default() };
        assert!(matches!(fundamental_forms(E, &j), Err(SurfaceError::DegenerateMetric { .. })));
        // null tangent plane in L³
        let j = Jet2 { xs: Vec3::new(1.0, 0.0, 1.0), xt: Vec3::E2, ..Default::default() };
        assert!(matches!(fundamental_forms(L, &j), Err(SurfaceError::DegenerateMetric { .. })));
    }

    #[test]
    fn normals() {
        let j = plane().jet(0.5, 0.5).unwrap();
        assert_eq!(unit_normal(E, &j).unwrap(), Vec3::E3);
        assert_eq!(unit_normal(L, &j).unwrap(), Vec3::new(0.0, 0.0, -1.0));
        let js = sphere_jet(0.0, 0.0);
        let n = unit_normal(E, &js).unwrap();
        assert_abs_diff_eq!(n.x.abs(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(E.inner(&n, &js.xs), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sphere_mean_curvature_is_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let s = rng.gen_range(0.0..6.28);
            let t = rng.gen_range(-1.4..1.4);
            let h = mean_curvature(E, &sphere_jet(s, t)).unwrap();
            // outward normal with e = <N, Xss> gives H = −1
            assert_abs_diff_eq!(h, -1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn hyperboloid_mean_curvature_is_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fd = ParamSurface::finite_difference(Domain::new((-2.0, 2.0), (-2.0, 2.0)), hyperboloid_point, Some(1e-3));
        for _ in 0..20 {
            let s = rng.gen_range(-1.5..1.5);
            let t = rng.gen_range(-1.5..1.5);
            let h = mean_curvature(L, &hyperboloid_jet(s, t)).unwrap();
            assert_abs_diff_eq!(h.abs(), 1.0, epsilon = 1e-12);
            let hf = mean_curvature(L, &fd.jet(s, t).unwrap()).unwrap();
            assert_abs_diff_eq!(hf, h, epsilon = 1e-7);
        }
    }

    #[test]
    fn timelike_surface_rejected_in_lorentzian_branch() {
        let j = Jet2 { xs: Vec3::E1, xt: Vec3::E3, x: Vec3::E3, ..Default::default() };
        assert!(matches!(mean_curvature(L, &j), Err(SurfaceError::NotSpacelike { .. })));
        let v = Direction::normalized(L, Vec3::E3).unwrap();
        assert!(matches!(residual_at(L, &j, &v, 1.0), Err(SurfaceError::NotSpacelike { .. })));
    }

    #[test]
    fn vertical_plane_is_singular_minimal_for_any_alpha() {
        // the plane y = 1 contains the direction v = e3
        let surf = ParamSurface::exact(Domain::new((0.0, 1.0), (0.5, 1.5)), |s, t| Jet2 {
            x: Vec3::new(s, 1.0, t),
            xs: Vec3::E1,
            xt: Vec3::E3,
            ..Default::default()
        });
        let v = Direction::unit(E, Vec3::E3).unwrap();
        for alpha in [-2.0, 0.0, 1.0, 3.5] {
            assert_eq!(singular_residual(E, &surf, 0.4, 0.8, &v, alpha).unwrap(), 0.0);
        }
    }

    #[test]
    fn sphere_residual_vanishes_for_its_own_alpha() {
        let v = Direction::unit(E, Vec3::E3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let j = sphere_jet(rng.gen_range(0.0..6.28), rng.gen_range(0.1..1.4));
            let h = mean_curvature(E, &j).unwrap();
            let n = unit_normal(E, &j).unwrap();
            let alpha = 2.0 * h * j.x.z / n.z;
            assert_abs_diff_eq!(alpha, -2.0, epsilon = 1e-12);
            assert!(residual_at(E, &j, &v, alpha).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn halfspace_violation() {
        let v = Direction::unit(E, Vec3::E3).unwrap();
        let j = sphere_jet(0.3, -0.5);
        assert!(matches!(residual_at(E, &j, &v, 1.0), Err(SurfaceError::HalfspaceViolation { .. })));
    }

    #[test]
    fn directions() {
        assert!(matches!(Direction::unit(E, Vec3::new(0.0, 0.0, 2.0)), Err(SurfaceError::NotUnit(_))));
        let d = Direction::normalized(E, Vec3::new(0.0, 0.0, 2.0)).unwrap();
        assert_eq!(d.vector(), Vec3::E3);
        assert_eq!(d.original(), Vec3::new(0.0, 0.0, 2.0));
        assert!(matches!(Direction::normalized(L, Vec3::E1), Err(SurfaceError::DirectionNotTimelike(_))));
        let b = Direction::normalized(L, Vec3::new(1.0, 0.0, 2.0)).unwrap();
        assert_abs_diff_eq!(L.inner(&b.vector(), &b.vector()), -1.0, epsilon = 1e-15);
        assert!(matches!(Direction::normalized(E, Vec3::ZERO), Err(SurfaceError::ZeroDirection)));
    }

    fn raised_square(c: f64) -> ParamSurface {
        ParamSurface::exact(Domain::new((0.0, 1.0), (0.0, 1.0)), move |s, t| Jet2 {
            x: Vec3::new(s, t, c),
            xs: Vec3::E1,
            xt: Vec3::E2,
            ..Default::default()
        })
    }

    #[test]
    fn energy_of_flat_squares() {
        let v = Direction::unit(E, Vec3::E3).unwrap();
        for alpha in [-1.0, 0.0, 1.0, 2.5] {
            assert_abs_diff_eq!(potential_energy(E, &raised_square(1.0), &v, alpha, Grid::DEFAULT).unwrap(), 1.0, epsilon = 1e-12);
            let c: f64 = 1.7;
            assert_abs_diff_eq!(
                potential_energy(E, &raised_square(c), &v, alpha, Grid::new(9, 5).unwrap()).unwrap(),
                c.powf(alpha),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn energy_of_inclined_plane() {
        let surf = ParamSurface::exact(Domain::new((0.0, 1.0), (0.0, 1.0)), |s, t| Jet2 {
            x: Vec3::new(s, t, s + 2.0),
            xs: Vec3::new(1.0, 0.0, 1.0),
            xt: Vec3::E2,
            ..Default::default()
        });
        let v = Direction::unit(E, Vec3::E3).unwrap();
        let e = potential_energy(E, &surf, &v, 1.0, Grid::DEFAULT).unwrap();
        assert_abs_diff_eq!(e, 2.5 * 2f64.sqrt(), epsilon = 1e-8);
    }

    #[test]
    fn energy_rejects_halfspace_and_grid() {
        let v = Direction::unit(E, Vec3::E3).unwrap();
        assert!(matches!(
            potential_energy(E, &raised_square(-0.5), &v, 1.0, Grid::DEFAULT),
            Err(SurfaceError::HalfspaceViolation { .. })
        ));
        assert!(Grid::new(1, 5).is_err());
    }

    #[test]
    fn variation_of_vertical_plane_vanishes() {
        // the plane y = 1 contains the direction v = e3
        let surf = ParamSurface::exact(Domain::new((0.0, 1.0), (0.5, 1.5)), |s, t| Jet2 {
            x: Vec3::new(s, 1.0, t),
            xs: Vec3::E1,
            xt: Vec3::E3,
            ..Default::default()
        });
        let v = Direction::unit(E, Vec3::E3).unwrap();
        let bump = |s: f64, t: f64| (std::f64::consts::PI * s).sin() * (1.0 + t * t);
        let dv = first_variation(E, &surf, &v, 1.5, bump, 1e-4, Grid::DEFAULT).unwrap();
        assert!(dv.abs() <= 1e-6, "{dv}");
    }

    #[test]
    fn variation_of_tilted_plane_matches_formula() {
        let surf = ParamSurface::exact(Domain::new((0.0, 1.0), (0.0, 1.0)), |s, t| Jet2 {
            x: Vec3::new(s, t, 1.0 + 0.5 * t),
            xs: Vec3::E1,
            xt: Vec3::new(0.0, 1.0, 0.5),
            ..Default::default()
        });
        let v = Direction::unit(E, Vec3::E3).unwrap();
        let bump = |s: f64, t: f64| 1.0 + s * t;
        let dv = first_variation(E, &surf, &v, 1.0, bump, 1e-4, Grid::DEFAULT).unwrap();
        assert!(dv.abs() > 1e-3);
        // plane: H = 0, so δE = ∫ bump · <N,v> dM, with <N,v> = 1/√1.25 and dM = √1.25 ds dt
        let ws = Grid::trapezoid_weights(0.0, 1.0, 64);
        let xs = Grid::axis(0.0, 1.0, 64);
        let mut oracle = 0.0;
        for (s, a) in xs.iter().zip(&ws) {
            for (t, b) in xs.iter().zip(&ws) {
                oracle += a * b * bump(*s, *t);
            }
        }
        assert!(((dv - oracle) / oracle).abs() < 1e-5, "{dv} vs {oracle}");
    }
}
