//! Putting raw ruled-surface data into the normalized forms.

use std::sync::Arc;

use crate::algebra::Metric;
use crate::curve::{normalize_jet, CurveFn, CurveFn3, CurveJet, CurveJet3, UnitSpeed};

use super::{DirectorClass, LorentzRawInput, Result, RuledError, RuledSurface};

const ARCLENGTH_INTERVALS: usize = 512;
const DEGENERATE_DIRECTOR: f64 = 1e-8;
const PRECONDITION_TOL: f64 = 1e-8;
const ODE_STEPS: usize = 400;

fn samples(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

/// Euclidean normalization.
///
/// `director` is rescaled to unit length and reparametrized by the arclength
/// of the resulting spherical curve; the base is moved along the rulings by
/// `λ = −<γ₁', w'>` so that `<γ', w'> = 0`. Both curves take the raw
/// parameter `τ ∈ tau_range` and need three derivatives. The output
/// parameter runs over `[0, L]`, `L` the spherical length of `w`.
///
/// The remaining relation `<γ', w> = 0` is not something the base shift can
/// arrange; inputs where it fails are reported as `NotNormalized`.
pub fn normalize_euclidean(base: CurveFn3, director: CurveFn3, tau_range: (f64, f64)) -> Result<RuledSurface> {
    let m = Metric::Euclidean;
    let (lo, hi) = tau_range;
    let mut min_speed = f64::INFINITY;
    for tau in samples(lo, hi, 65) {
        let c = director(tau);
        if !(c.p.norm() > 0.0) {
            return Err(RuledError::ZeroDirection);
        }
        min_speed = min_speed.min(normalize_jet(m, &c).d1.norm());
    }
    if !(min_speed >= DEGENERATE_DIRECTOR) {
        return Err(RuledError::CylindricalInput(min_speed));
    }
    let unit_dir = director.clone();
    let raw: CurveFn3 = Arc::new(move |tau| normalize_jet(m, &unit_dir(tau)));
    let us = Arc::new(UnitSpeed::new(raw, m, lo, hi, lo, ARCLENGTH_INTERVALS));
    let length = us.arclength(hi);

    let us_w = us.clone();
    let w_fn: CurveFn = Arc::new(move |s| us_w.jet(s));
    let base_fn: CurveFn = Arc::new(move |s| {
        let (w, g1) = us.companion_jet3(s, &*base);
        shift_to_striction(&w, &g1)
    });
    RuledSurface::normalized(base_fn, w_fn, (0.0, length), DirectorClass::EuclidStandard)
}

/// `γ = γ₁ + λ w` with `λ = −<γ₁', w'>` (unit-speed `w`).
fn shift_to_striction(w: &CurveJet3, g1: &CurveJet3) -> CurveJet {
    let lam = -g1.d1.dot(&w.d1);
    let lam1 = -(g1.d2.dot(&w.d1) + g1.d1.dot(&w.d2));
    let lam2 = -(g1.d3.dot(&w.d1) + 2.0 * g1.d2.dot(&w.d2) + g1.d1.dot(&w.d3));
    CurveJet {
        p: g1.p + w.p * lam,
        d1: g1.d1 + w.p * lam1 + w.d1 * lam,
        d2: g1.d2 + w.p * lam2 + w.d1 * (2.0 * lam1) + w.d2 * lam,
    }
}

/// Coefficient data of the reparametrization system at one parameter.
struct OdeCoeffs {
    f1: f64,
    f2: f64,
    f3: f64,
    df1: f64,
    df2: f64,
    df3: f64,
    g: CurveJet,
    w: CurveJet,
}

struct LorentzOde {
    base: CurveFn,
    director: CurveFn,
    delta: f64,
    lo: f64,
    step: f64,
    nodes: Vec<[f64; 2]>,
}

impl LorentzOde {
    fn coeffs(&self, s: f64) -> OdeCoeffs {
        let m = Metric::Lorentzian;
        let g = (self.base)(s);
        let w = (self.director)(s);
        OdeCoeffs {
            f1: m.inner(&g.p, &w.p),
            f2: m.inner(&g.d1, &w.d1),
            f3: m.inner(&g.p, &w.d1),
            df1: m.inner(&g.d1, &w.p) + m.inner(&g.p, &w.d1),
            df2: m.inner(&g.d2, &w.d1) + m.inner(&g.d1, &w.d2),
            df3: m.inner(&g.d1, &w.d1) + m.inner(&g.p, &w.d2),
            g,
            w,
        }
    }

    /// `(y₁', y₂')` from `f₂y₁ + f₃y₁' + δy₂ = 0` and `f₁y₁' + y₂' = 0`.
    fn rhs(&self, c: &OdeCoeffs, y: [f64; 2]) -> [f64; 2] {
        let y1p = -(c.f2 * y[0] + self.delta * y[1]) / c.f3;
        [y1p, -c.f1 * y1p]
    }

    fn rk4(&self, s: f64, y: [f64; 2], h: f64) -> [f64; 2] {
        let f = |x: f64, y: [f64; 2]| self.rhs(&self.coeffs(x), y);
        let k1 = f(s, y);
        let k2 = f(s + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f(s + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f(s + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    }

    fn solution(&self, s: f64) -> [f64; 2] {
        let k = ((s - self.lo) / self.step).floor().clamp(0.0, (self.nodes.len() - 1) as f64) as usize;
        let sk = self.lo + self.step * k as f64;
        if s == sk {
            return self.nodes[k];
        }
        self.rk4(sk, self.nodes[k], s - sk)
    }

    /// Jet of `γ = y₁γ₁ + y₂w`.
    fn base_jet(&self, s: f64) -> CurveJet {
        let c = self.coeffs(s);
        let y = self.solution(s);
        let [y1p, y2p] = self.rhs(&c, y);
        let num1 = -(c.df2 * y[0] + c.f2 * y1p + self.delta * y2p);
        let y1pp = (num1 - c.df3 * y1p) / c.f3;
        let y2pp = -(c.df1 * y1p + c.f1 * y1pp);
        let (g, w) = (c.g, c.w);
        CurveJet {
            p: g.p * y[0] + w.p * y[1],
            d1: g.p * y1p + g.d1 * y[0] + w.p * y2p + w.d1 * y[1],
            d2: g.p * y1pp + g.d1 * (2.0 * y1p) + g.d2 * y[0] + w.p * y2pp + w.d1 * (2.0 * y2p) + w.d2 * y[1],
        }
    }
}

/// Lorentzian reparametrization of a spacelike ruled surface.
///
/// The input must satisfy `<γ₁', w> = 0`, `<w, w> = 1` and
/// `<w', w'> = δ`. The new base is `γ = y₁γ₁ + y₂w` where `(y₁, y₂)` solves
/// the linear system that forces `<γ', w> = <γ', w'> = 0`, started from
/// `(1, 0)` at the left end of the range and integrated with fixed-step RK4.
/// Values between nodes come from one partial RK4 step off the nearest node.
pub fn normalize_lorentz(input: &LorentzRawInput, delta: i8) -> Result<RuledSurface> {
    if delta != 1 && delta != -1 {
        return Err(RuledError::Config(format!("delta must be +1 or -1, got {delta}")));
    }
    let m = Metric::Lorentzian;
    let (lo, hi) = input.s_range;
    let d = f64::from(delta);
    for s in samples(lo, hi, 33) {
        let g = (input.base)(s);
        let w = (input.director)(s);
        if !(m.inner(&g.d1, &g.d1) > 0.0) || !(m.inner(&w.p, &w.p) > 0.0) {
            return Err(RuledError::NonSpacelikeInput { s });
        }
        for (relation, defect) in [
            ("<g1',w> = 0", m.inner(&g.d1, &w.p)),
            ("<w,w> = 1", m.inner(&w.p, &w.p) - 1.0),
            ("<w',w'> = delta", m.inner(&w.d1, &w.d1) - d),
        ] {
            if !(defect.abs() <= PRECONDITION_TOL) {
                return Err(RuledError::Precondition { relation, defect: defect.abs() });
            }
        }
    }

    let step = (hi - lo) / ODE_STEPS as f64;
    let mut ode = LorentzOde {
        base: input.base.clone(),
        director: input.director.clone(),
        delta: d,
        lo,
        step,
        nodes: Vec::with_capacity(ODE_STEPS + 1),
    };
    let scale = |c: &OdeCoeffs| 1e-10 * (1.0 + c.f1.abs() + c.f2.abs());
    let mut y = [1.0, 0.0];
    ode.nodes.push(y);
    for k in 0..ODE_STEPS {
        let s = lo + step * k as f64;
        for x in [s, s + 0.5 * step, s + step] {
            let c = ode.coeffs(x);
            if !(c.f3.abs() > scale(&c)) {
                return Err(RuledError::OdeBreakdown { s: x, reason: format!("<g1, w'> = {:e} vanishes", c.f3) });
            }
        }
        y = ode.rk4(s, y, step);
        if !y.iter().all(|v| v.is_finite()) || y[0].abs().max(y[1].abs()) > 1e12 {
            return Err(RuledError::OdeBreakdown { s: s + step, reason: "solution blew up".into() });
        }
        ode.nodes.push(y);
    }
    let director = input.director.clone();
    let ode = Arc::new(ode);
    let base: CurveFn = Arc::new(move |s| ode.base_jet(s));
    RuledSurface::normalized(base, director, input.s_range, DirectorClass::LorentzNondegenerate(delta))
}
