//! Reference surfaces and random normalized ruled surfaces.
//!
//! Random surfaces are built directly in normalized form: a unit-speed
//! director `w` is drawn first, then the base is integrated from the frame
//! identity `γ' = P w×w'` (or its Lorentzian analogue) with a random smooth
//! `P`. No isometry is applied afterwards; the direction `v` is random
//! instead, and the base is translated so that the sampled patch sits in the
//! halfspace of `v`.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::{Metric, Vec3};
use crate::curve::{normalize_jet, CurveFn, CurveFn3, CurveJet, CurveJet3, IntegratedCurve, UnitSpeed};
use crate::surface::Direction;

use super::{DirectorClass, Result, RuledError, RuledSurface};

/// Parameter range of every random surface.
pub const RANDOM_S_RANGE: (f64, f64) = (0.0, 2.0);
const TAU_RANGE: (f64, f64) = (-1.0, 4.0);
const BASE_RANGE: (f64, f64) = (-0.1, 2.1);
const BASE_INTERVALS: usize = 64;
const ARCLENGTH_INTERVALS: usize = 400;

/// A random surface together with the data of one residual evaluation.
#[derive(Clone, Debug)]
pub struct SweepCase {
    pub surface: RuledSurface,
    pub v: Direction,
    pub alpha: f64,
}

/// Raw data for the Lorentzian reparametrization: `<γ₁', w> = 0`,
/// `<w, w> = 1`, `<w', w'> = δ`, but in general `<γ₁', w'> ≠ 0`.
#[derive(Clone)]
pub struct LorentzRawInput {
    pub base: CurveFn,
    pub director: CurveFn,
    pub s_range: (f64, f64),
}

impl std::fmt::Debug for LorentzRawInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LorentzRawInput").field("s_range", &self.s_range).finish()
    }
}

/// Helicoid `X = (0, 0, c s + z0) + t (cos s, sin s, 0)`: `P = c`, `Q = 0`.
pub fn helicoid(c: f64, s_range: (f64, f64), z0: f64) -> Result<RuledSurface> {
    helicoid_at(c, s_range, Vec3::new(0.0, 0.0, z0))
}

fn helicoid_at(c: f64, s_range: (f64, f64), offset: Vec3) -> Result<RuledSurface> {
    let base: CurveFn = Arc::new(move |s| CurveJet { p: offset + Vec3::new(0.0, 0.0, c * s), d1: Vec3::new(0.0, 0.0, c), d2: Vec3::ZERO });
    RuledSurface::normalized(base, circle_director(), s_range, DirectorClass::EuclidStandard)
}

fn circle_director() -> CurveFn {
    Arc::new(|s: f64| {
        let (sn, cs) = s.sin_cos();
        CurveJet { p: Vec3::new(cs, sn, 0.0), d1: Vec3::new(-sn, cs, 0.0), d2: Vec3::new(-cs, -sn, 0.0) }
    })
}

/// `w = (1, s, s)`, `w' = (0, 1, 1)`.
fn lightlike_director() -> CurveFn {
    Arc::new(|s| CurveJet { p: Vec3::new(1.0, s, s), d1: Vec3::new(0.0, 1.0, 1.0), d2: Vec3::ZERO })
}

/// `ℓ = (2s, s² − 1, s² + 1)`: null, orthogonal to `w`, `<ℓ, w'> = −2`.
fn ell(s: f64) -> Vec3 {
    Vec3::new(2.0 * s, s * s - 1.0, s * s + 1.0)
}

/// Lightlike-director surface with `w = (1, s, s)` and base
/// `γ' = a w' − ℓ / (4a)` for constant `a`, so `Q = 1 / (2a)` and
/// `γ(0) = 0`.
pub fn lightlike_reference(a: f64, s_range: (f64, f64)) -> Result<RuledSurface> {
    if !(a.abs() > 0.0) {
        return Err(RuledError::ZeroQ(f64::INFINITY));
    }
    let base: CurveFn = Arc::new(move |s: f64| {
        let k = 1.0 / (4.0 * a);
        let p = Vec3::new(0.0, a * s, a * s) - Vec3::new(s * s, s * s * s / 3.0 - s, s * s * s / 3.0 + s) * k;
        CurveJet { p, d1: Vec3::new(0.0, a, a) - ell(s) * k, d2: Vec3::new(2.0, 2.0 * s, 2.0 * s) * (-k) }
    });
    RuledSurface::normalized(base, lightlike_director(), s_range, DirectorClass::LorentzLightlikeDirector)
}

/// `a cos kτ + b sin kτ` with three derivatives.
fn trig_jet(k: f64, a: Vec3, b: Vec3, tau: f64) -> CurveJet3 {
    let (sn, cs) = (k * tau).sin_cos();
    let p = a * cs + b * sn;
    let q = b * cs - a * sn;
    CurveJet3 { p, d1: q * k, d2: p * (-k * k), d3: q * (-k * k * k) }
}

fn add3(x: CurveJet3, y: CurveJet3) -> CurveJet3 {
    CurveJet3 { p: x.p + y.p, d1: x.d1 + y.d1, d2: x.d2 + y.d2, d3: x.d3 + y.d3 }
}

fn random_vec(rng: &mut impl Rng, max_norm: f64) -> Vec3 {
    let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    v * (max_norm * rng.gen::<f64>() / 3f64.sqrt())
}

fn signed(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let x = rng.gen_range(lo..hi);
    if rng.gen::<bool>() {
        x
    } else {
        -x
    }
}

/// Smooth scalar `p0 + p1 sin(ωs + φ)` and its derivative.
#[derive(Clone, Copy, Debug)]
struct Wave {
    p0: f64,
    p1: f64,
    omega: f64,
    phi: f64,
}

impl Wave {
    fn random(rng: &mut impl Rng, p0: (f64, f64), p1_max: f64) -> Self {
        Wave {
            p0: signed(rng, p0.0, p0.1),
            p1: rng.gen_range(-p1_max..p1_max),
            omega: rng.gen_range(0.5..1.0),
            phi: rng.gen_range(0.0..std::f64::consts::TAU),
        }
    }

    fn eval(&self, s: f64) -> (f64, f64) {
        let (sn, cs) = (self.omega * s + self.phi).sin_cos();
        (self.p0 + self.p1 * sn, self.p1 * self.omega * cs)
    }
}

/// Unit-speed director for the Euclidean class (`δ = 0` here) or the
/// nondegenerate Lorentzian class with `<w', w'> = δ`.
fn random_director(metric: Metric, delta: i8, rng: &mut impl Rng) -> Result<Arc<UnitSpeed>> {
    let raw: CurveFn3 = match (metric, delta) {
        (Metric::Euclidean, _) => {
            let a1 = random_vec(rng, 0.05);
            let b1 = random_vec(rng, 0.05);
            let a2 = random_vec(rng, 0.03);
            let b2 = random_vec(rng, 0.03);
            Arc::new(move |tau| {
                let c = add3(trig_jet(1.0, Vec3::E1 + a1, Vec3::E2 + b1, tau), trig_jet(2.0, a2, b2, tau));
                normalize_jet(Metric::Euclidean, &c)
            })
        }
        (Metric::Lorentzian, 1) => {
            let z0 = rng.gen_range(-0.2..0.2);
            let z1 = rng.gen_range(-0.25..0.25);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            Arc::new(move |tau| {
                let mut c = trig_jet(1.0, Vec3::E1 + Vec3::E3 * (z1 * phi.sin()), Vec3::E2 + Vec3::E3 * (z1 * phi.cos()), tau);
                c.p += Vec3::E3 * z0;
                normalize_jet(Metric::Lorentzian, &c)
            })
        }
        (Metric::Lorentzian, -1) => {
            let b0 = rng.gen_range(-0.3..0.3);
            let b1 = rng.gen_range(-0.3..0.3);
            let omega = rng.gen_range(0.5..1.5);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            Arc::new(move |tau| {
                let (ch, sh) = (tau.cosh(), tau.sinh());
                let b = trig_jet(omega, Vec3::E2 * (b1 * phi.sin()), Vec3::E2 * (b1 * phi.cos()), tau);
                let hyp = CurveJet3 {
                    p: Vec3::new(ch, b0, sh),
                    d1: Vec3::new(sh, 0.0, ch),
                    d2: Vec3::new(ch, 0.0, sh),
                    d3: Vec3::new(sh, 0.0, ch),
                };
                normalize_jet(Metric::Lorentzian, &add3(hyp, b))
            })
        }
        _ => return Err(RuledError::Config(format!("no director family for {metric} with delta {delta}"))),
    };
    let us = UnitSpeed::new(raw, metric, TAU_RANGE.0, TAU_RANGE.1, 0.0, ARCLENGTH_INTERVALS);
    let want = if metric == Metric::Euclidean { 1.0 } else { f64::from(delta) };
    if us.causal_sign() != want {
        return Err(RuledError::Config("director has the wrong causal character".into()));
    }
    if us.arclength(TAU_RANGE.1) < BASE_RANGE.1 + 0.1 || us.arclength(TAU_RANGE.0) > BASE_RANGE.0 - 0.1 {
        return Err(RuledError::Config("director too short for the parameter range".into()));
    }
    Ok(Arc::new(us))
}

/// Random unit direction: uniform on the sphere, or a future unit timelike
/// vector of hyperbolic angle at most 1 from `e3`.
pub fn random_direction(metric: Metric, rng: &mut impl Rng) -> Direction {
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let v = match metric {
        Metric::Euclidean => {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let r = (1.0 - z * z).sqrt();
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        }
        Metric::Lorentzian => {
            let r: f64 = rng.gen_range(0.0..1.0);
            Vec3::new(r.sinh() * phi.cos(), r.sinh() * phi.sin(), r.cosh())
        }
    };
    Direction::normalized(metric, v).expect("sampled direction is admissible")
}

/// Translates `base` so that `<X, v> ∈ [1, 2]` at its minimum over
/// `s ∈ RANDOM_S_RANGE`, `t ∈ [−1, 1]`.
fn lift(base: CurveFn, director: &CurveFn, v: &Direction, rng: &mut impl Rng) -> CurveFn {
    let m = v.metric();
    let vv = v.vector();
    let (a, b) = RANDOM_S_RANGE;
    let mut lowest = f64::INFINITY;
    for i in 0..=40 {
        let s = a + (b - a) * i as f64 / 40.0;
        let g = base(s).p;
        let w = director(s).p;
        for t in [-1.0, 1.0] {
            lowest = lowest.min(m.inner(&(g + w * t), &vv));
        }
    }
    let shift = 1.0 + rng.gen::<f64>() - lowest;
    // <v, v> = ±1 picks the sign that raises the height by `shift`
    let offset = vv * (shift * m.inner(&vv, &vv));
    Arc::new(move |s| {
        let mut j = base(s);
        j.p += offset;
        j
    })
}

fn integrated<F>(tangent: F) -> CurveFn
where
    F: Fn(f64) -> (Vec3, Vec3) + Send + Sync + 'static,
{
    let curve = IntegratedCurve::new(tangent, Vec3::ZERO, 0.0, BASE_RANGE.0, BASE_RANGE.1, BASE_INTERVALS);
    Arc::new(move |s| curve.jet(s))
}

fn random_surface(class: DirectorClass, v: &Direction, rng: &mut impl Rng) -> Result<RuledSurface> {
    let (director, base): (CurveFn, CurveFn) = match class {
        DirectorClass::EuclidStandard => {
            let us = random_director(Metric::Euclidean, 0, rng)?;
            let p = Wave::random(rng, (0.5, 1.5), 0.2);
            let us_b = us.clone();
            let base = integrated(move |s| {
                let w = us_b.jet(s);
                let (pv, dp) = p.eval(s);
                let n = w.p.cross(&w.d1);
                (n * pv, n * dp + w.p.cross(&w.d2) * pv)
            });
            (Arc::new(move |s| us.jet(s)), base)
        }
        DirectorClass::LorentzNondegenerate(delta) => {
            let us = random_director(Metric::Lorentzian, delta, rng)?;
            let p = if delta == 1 { Wave::random(rng, (0.15, 0.35), 0.05) } else { Wave::random(rng, (1.3, 1.8), 0.1) };
            let d = f64::from(delta);
            let m = Metric::Lorentzian;
            let us_b = us.clone();
            let base = integrated(move |s| {
                let w = us_b.jet(s);
                let (pv, dp) = p.eval(s);
                let n = m.cross(&w.p, &w.d1);
                (n * (-d * pv), (n * dp + m.cross(&w.p, &w.d2) * pv) * (-d))
            });
            (Arc::new(move |s| us.jet(s)), base)
        }
        DirectorClass::LorentzLightlikeDirector => {
            let a = Wave::random(rng, (1.2, 2.0), 0.3);
            let base = integrated(move |s| {
                let (av, da) = a.eval(s);
                let w1 = Vec3::new(0.0, 1.0, 1.0);
                let l = ell(s);
                let dl = Vec3::new(2.0, 2.0 * s, 2.0 * s);
                (w1 * av - l / (4.0 * av), w1 * da - dl / (4.0 * av) + l * (da / (4.0 * av * av)))
            });
            (lightlike_director(), base)
        }
        DirectorClass::Cylindrical(_) => return Err(RuledError::Config("cylinders are not generated".into())),
    };
    let base = lift(base, &director, v, rng);
    RuledSurface::normalized(base, director, RANDOM_S_RANGE, class)
}

/// Random normalized non-cylindrical surface of the given class with a
/// random direction `v`, lifted into the halfspace of `v`.
pub fn random_case(class: DirectorClass, alpha: f64, rng: &mut impl Rng) -> Result<SweepCase> {
    let v = random_direction(class.metric(), rng);
    let surface = random_surface(class, &v, rng)?;
    Ok(SweepCase { surface, v, alpha })
}

/// Random helicoid with pitch `|c| ∈ [0.5, 2]`, lifted into the halfspace
/// of a random `v`.
pub fn random_helicoid_case(alpha: f64, rng: &mut impl Rng) -> Result<SweepCase> {
    let v = random_direction(Metric::Euclidean, rng);
    let c = signed(rng, 0.5, 2.0);
    let raw = helicoid(c, RANDOM_S_RANGE, 0.0)?;
    let base = lift(raw.base_fn(), &raw.director_fn(), &v, rng);
    let surface = RuledSurface::normalized(base, raw.director_fn(), RANDOM_S_RANGE, DirectorClass::EuclidStandard)?;
    Ok(SweepCase { surface, v, alpha })
}

/// Random admissible input for the Lorentzian reparametrization.
///
/// `γ₁' = a w' + b (w × w')` with `δ(a² − b²) > 0`, so `γ₁'` is spacelike,
/// orthogonal to `w`, and `<γ₁', w'> = δ a`.
pub fn random_lorentz_input(delta: i8, rng: &mut impl Rng) -> Result<LorentzRawInput> {
    lorentz_input(delta, 1.0, rng)
}

/// As [`random_lorentz_input`] with the `w'` component of `γ₁'` scaled by
/// `tilt` (for `δ = −1`; `tilt = 0` gives an input that is already
/// normalized).
pub(crate) fn lorentz_input(delta: i8, tilt: f64, rng: &mut impl Rng) -> Result<LorentzRawInput> {
    let m = Metric::Lorentzian;
    let us = random_director(m, delta, rng)?;
    let (a, b) = if delta == 1 {
        (Wave::random(rng, (0.8, 1.2), 0.2), Wave::random(rng, (0.0, 0.2), 0.1))
    } else {
        let mut a = Wave::random(rng, (0.1, 0.3), 0.05);
        a.p0 *= tilt;
        a.p1 *= tilt;
        (a, Wave::random(rng, (0.8, 1.2), 0.2))
    };
    let us_b = us.clone();
    let raw_base = integrated(move |s| {
        let w = us_b.jet(s);
        let (av, da) = a.eval(s);
        let (bv, db) = b.eval(s);
        let n = m.cross(&w.p, &w.d1);
        let dn = m.cross(&w.p, &w.d2);
        (w.d1 * av + n * bv, w.d1 * da + w.d2 * av + n * db + dn * bv)
    });
    // keep <γ₁, w'> away from zero so the reparametrization system is regular
    let (lo, hi) = RANDOM_S_RANGE;
    let anchor = us.jet(0.5 * (lo + hi)).d1;
    let mut min_g = f64::INFINITY;
    let mut worst = 0.0f64;
    for i in 0..=40 {
        let s = lo + (hi - lo) * i as f64 / 40.0;
        let wp = us.jet(s).d1;
        let g = f64::from(delta) * m.inner(&anchor, &wp);
        min_g = min_g.min(g);
        worst = worst.max(-m.inner(&raw_base(s).p, &wp) / g.abs().max(1e-300));
    }
    if !(min_g > 0.05) {
        return Err(RuledError::Config("director turns too far for a regular reparametrization".into()));
    }
    let offset = anchor * (f64::from(delta) * (1.0 / min_g + worst.max(0.0)));
    let base: CurveFn = Arc::new(move |s| {
        let mut j = raw_base(s);
        j.p += offset;
        j
    });
    let us_w = us.clone();
    Ok(LorentzRawInput { base, director: Arc::new(move |s| us_w.jet(s)), s_range: RANDOM_S_RANGE })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ruled::frame_defects;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_cases_are_normalized_and_lifted() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for class in [
            DirectorClass::EuclidStandard,
            DirectorClass::LorentzNondegenerate(1),
            DirectorClass::LorentzNondegenerate(-1),
            DirectorClass::LorentzLightlikeDirector,
        ] {
            for _ in 0..3 {
                let case = random_case(class, 1.0, &mut rng).unwrap();
                let m = class.metric();
                for s in case.surface.sample_points(11) {
                    for t in [-1.0, 0.0, 1.0] {
                        let x = case.surface.jet(s, t).x;
                        assert!(m.inner(&x, &case.v.vector()) >= 1.0 - 1e-9);
                    }
                    let d = frame_defects(&case.surface, s).unwrap();
                    assert!(d.base_tangent <= 1e-8 && d.director_accel <= 1e-7 && d.cross <= 1e-8, "{class:?} {d:?}");
                }
            }
        }
    }

    #[test]
    fn lorentz_input_relations() {
        let m = Metric::Lorentzian;
        for delta in [1i8, -1] {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let input = random_lorentz_input(delta, &mut rng).unwrap();
            for i in 0..=10 {
                let s = 0.2 * i as f64;
                let g = (input.base)(s);
                let w = (input.director)(s);
                assert!(m.inner(&g.d1, &w.p).abs() < 1e-12);
                assert!((m.inner(&w.d1, &w.d1) - f64::from(delta)).abs() < 1e-12);
                assert!(m.inner(&g.d1, &g.d1) > 0.0);
                assert!(m.inner(&g.p, &w.d1).abs() >= 0.9);
            }
        }
    }
}
