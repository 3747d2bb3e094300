//! Space-curve jets, unit-speed reparametrization, and curves defined by
//! integrating a tangent field.

use std::sync::Arc;

use crate::algebra::{Metric, Vec3};

/// Position with first and second derivative.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CurveJet {
    pub p: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
}

/// Position with derivatives up to order three.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CurveJet3 {
    pub p: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
    pub d3: Vec3,
}

impl CurveJet3 {
    pub fn truncate(&self) -> CurveJet {
        CurveJet { p: self.p, d1: self.d1, d2: self.d2 }
    }
}

pub type CurveFn = Arc<dyn Fn(f64) -> CurveJet + Send + Sync>;
pub type CurveFn3 = Arc<dyn Fn(f64) -> CurveJet3 + Send + Sync>;

// 5-point Gauss-Legendre on [-1, 1]
const GL_X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
const GL_W: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

/// Gauss-Legendre (5 nodes) integral of a vector field over `[a, b]`.
pub fn gauss5_vec(f: &dyn Fn(f64) -> Vec3, a: f64, b: f64) -> Vec3 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Vec3::ZERO;
    for (x, w) in GL_X.iter().zip(GL_W.iter()) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

pub fn gauss5(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL_X.iter().zip(GL_W.iter()).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Jet of `c / |c|` in the given metric. Requires `<c, c> > 0`.
pub fn normalize_jet(m: Metric, c: &CurveJet3) -> CurveJet3 {
    // r² = q, differentiate q and solve for the derivatives of r
    let q = m.inner(&c.p, &c.p);
    let q1 = 2.0 * m.inner(&c.p, &c.d1);
    let q2 = 2.0 * (m.inner(&c.d1, &c.d1) + m.inner(&c.p, &c.d2));
    let q3 = 2.0 * (3.0 * m.inner(&c.d1, &c.d2) + m.inner(&c.p, &c.d3));
    let r = q.sqrt();
    let r1 = q1 / (2.0 * r);
    let r2 = (0.5 * q2 - r1 * r1) / r;
    let r3 = (0.5 * q3 - 3.0 * r1 * r2) / r;
    // c = r w, Leibniz: c^(k) = sum binom(k, j) r^(k-j) w^(j)
    let w0 = c.p / r;
    let w1 = (c.d1 - w0 * r1) / r;
    let w2 = (c.d2 - w0 * r2 - w1 * (2.0 * r1)) / r;
    let w3 = (c.d3 - w0 * r3 - w1 * (3.0 * r2) - w2 * (3.0 * r1)) / r;
    CurveJet3 { p: w0, d1: w1, d2: w2, d3: w3 }
}

/// A curve reparametrized by arclength in a metric.
///
/// The tangent must keep a fixed causal sign (`<c', c'>` never vanishes). The
/// reported derivatives are those of the exact unit-speed curve evaluated at
/// the numerically inverted raw parameter, so `|<w', w'>| = 1` holds to
/// rounding regardless of the inversion accuracy.
#[derive(Clone)]
pub struct UnitSpeed {
    raw: CurveFn3,
    metric: Metric,
    sign: f64,
    tau0: f64,
    dtau: f64,
    // cumulative arclength at the table nodes, measured from `origin`
    table: Vec<f64>,
}

impl std::fmt::Debug for UnitSpeed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UnitSpeed").field("metric", &self.metric).field("nodes", &self.table.len()).finish()
    }
}

impl UnitSpeed {
    /// Tabulates arclength over `[tau_lo, tau_hi]` with `s = 0` at `origin`.
    pub fn new(raw: CurveFn3, metric: Metric, tau_lo: f64, tau_hi: f64, origin: f64, intervals: usize) -> Self {
        let sign = metric.inner(&raw(origin).d1, &raw(origin).d1).signum();
        let dtau = (tau_hi - tau_lo) / intervals as f64;
        let mut us = UnitSpeed { raw, metric, sign, tau0: tau_lo, dtau, table: Vec::with_capacity(intervals + 1) };
        let mut acc = 0.0;
        us.table.push(0.0);
        for k in 0..intervals {
            let a = tau_lo + dtau * k as f64;
            acc += gauss5(&|x| us.speed(x), a, a + dtau);
            us.table.push(acc);
        }
        let at_origin = us.arclength_raw(origin);
        for v in us.table.iter_mut() {
            *v -= at_origin;
        }
        us
    }

    /// `+1` or `−1`: the sign of `<c', c'>` along the curve.
    pub fn causal_sign(&self) -> f64 {
        self.sign
    }

    fn speed(&self, tau: f64) -> f64 {
        let d = (self.raw)(tau).d1;
        (self.sign * self.metric.inner(&d, &d)).max(0.0).sqrt()
    }

    fn node_index(&self, tau: f64) -> usize {
        let k = ((tau - self.tau0) / self.dtau).floor();
        k.clamp(0.0, (self.table.len() - 2) as f64) as usize
    }

    fn arclength_raw(&self, tau: f64) -> f64 {
        let k = self.node_index(tau);
        let a = self.tau0 + self.dtau * k as f64;
        self.table[k] + gauss5(&|x| self.speed(x), a, tau)
    }

    /// Arclength (from the origin) at raw parameter `tau`.
    pub fn arclength(&self, tau: f64) -> f64 {
        self.arclength_raw(tau)
    }

    /// Raw parameter at arclength `s`, by Newton iteration.
    pub fn parameter_at(&self, s: f64) -> f64 {
        let k = match self.table.binary_search_by(|v| v.partial_cmp(&s).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => return self.tau0 + self.dtau * i as f64,
            Err(i) => i.clamp(1, self.table.len() - 1) - 1,
        };
        let (sa, sb) = (self.table[k], self.table[k + 1]);
        let a = self.tau0 + self.dtau * k as f64;
        let mut tau = a + self.dtau * (s - sa) / (sb - sa);
        for _ in 0..30 {
            let step = (self.arclength_raw(tau) - s) / self.speed(tau);
            tau -= step;
            if step.abs() <= 1e-15 * (1.0 + tau.abs()) {
                break;
            }
        }
        tau
    }

    fn reparam_at(&self, tau: f64) -> (CurveJet3, Reparam) {
        let c = (self.raw)(tau);
        let m = self.metric;
        let k = self.speed(tau);
        let k1 = self.sign * m.inner(&c.d1, &c.d2) / k;
        let k2 = (self.sign * (m.inner(&c.d2, &c.d2) + m.inner(&c.d1, &c.d3)) - k1 * k1) / k;
        (c, Reparam { k, k1, k2 })
    }

    /// Unit-speed jet at arclength `s`.
    pub fn jet3(&self, s: f64) -> CurveJet3 {
        let (c, r) = self.reparam_at(self.parameter_at(s));
        r.apply(&c)
    }

    pub fn jet(&self, s: f64) -> CurveJet {
        self.jet3(s).truncate()
    }

    /// Applies the same reparametrization to a companion curve (for example
    /// the base of a ruled surface sharing the director's parameter).
    pub fn companion_jet3(&self, s: f64, other: &dyn Fn(f64) -> CurveJet3) -> (CurveJet3, CurveJet3) {
        let tau = self.parameter_at(s);
        let (c, r) = self.reparam_at(tau);
        (r.apply(&c), r.apply(&other(tau)))
    }
}

/// Chain-rule coefficients for `d/ds = (1/κ) d/dτ`.
struct Reparam {
    k: f64,
    k1: f64,
    k2: f64,
}

impl Reparam {
    fn apply(&self, f: &CurveJet3) -> CurveJet3 {
        let (k, k1, k2) = (self.k, self.k1, self.k2);
        let k2p = k * k;
        let k3p = k2p * k;
        let k4p = k2p * k2p;
        CurveJet3 {
            p: f.p,
            d1: f.d1 / k,
            d2: (f.d2 / k2p) - f.d1 * (k1 / k3p),
            d3: (f.d3 / k2p - f.d2 * (3.0 * k1 / k3p) - f.d1 * (k2 / k3p) + f.d1 * (3.0 * k1 * k1 / k4p)) / k,
        }
    }
}

/// `γ(s) = γ(origin) + ∫ tangent`, tabulated with Gauss-Legendre panels.
#[derive(Clone)]
pub struct IntegratedCurve {
    tangent: Arc<dyn Fn(f64) -> (Vec3, Vec3) + Send + Sync>,
    lo: f64,
    step: f64,
    nodes: Vec<Vec3>,
}

impl std::fmt::Debug for IntegratedCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IntegratedCurve").field("lo", &self.lo).field("nodes", &self.nodes.len()).finish()
    }
}

impl IntegratedCurve {
    /// `tangent(s)` returns `(γ'(s), γ''(s))`.
    pub fn new<F>(tangent: F, start: Vec3, origin: f64, lo: f64, hi: f64, intervals: usize) -> Self
    where
        F: Fn(f64) -> (Vec3, Vec3) + Send + Sync + 'static,
    {
        let tangent: Arc<dyn Fn(f64) -> (Vec3, Vec3) + Send + Sync> = Arc::new(tangent);
        let step = (hi - lo) / intervals as f64;
        let mut nodes = Vec::with_capacity(intervals + 1);
        let mut acc = Vec3::ZERO;
        nodes.push(acc);
        for k in 0..intervals {
            let a = lo + step * k as f64;
            acc += gauss5_vec(&|x| tangent(x).0, a, a + step);
            nodes.push(acc);
        }
        let mut curve = IntegratedCurve { tangent, lo, step, nodes };
        let shift = start - curve.position(origin);
        for n in curve.nodes.iter_mut() {
            *n += shift;
        }
        curve
    }

    fn position(&self, s: f64) -> Vec3 {
        let k = (((s - self.lo) / self.step).floor()).clamp(0.0, (self.nodes.len() - 2) as f64) as usize;
        let a = self.lo + self.step * k as f64;
        let f = &self.tangent;
        self.nodes[k] + gauss5_vec(&|x| f(x).0, a, s)
    }

    pub fn jet(&self, s: f64) -> CurveJet {
        let (d1, d2) = (self.tangent)(s);
        CurveJet { p: self.position(s), d1, d2 }
    }

    /// Moves the whole curve by `offset`.
    pub fn translate(&mut self, offset: Vec3) {
        for n in self.nodes.iter_mut() {
            *n += offset;
        }
    }
}
