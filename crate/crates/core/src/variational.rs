//! Discrete potential α-energy of height fields `z(x, y)` with `v = e3`:
//!
//! ```text
//! E(z) = ∫∫ z^α √(1 + z_x² + z_y²) dx dy
//! ```
//!
//! discretized with piecewise-linear triangles (both diagonal splits of every
//! cell, averaged). The gradient with respect to the interior heights is the
//! exact derivative of that sum.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{Metric, Vec3};
use crate::surface::{residual_at, Direction, Jet2};

/// Lower bound enforced by the projection step of [`descend`].
pub const HEIGHT_FLOOR: f64 = 1e-9;
/// Consecutive steps above the best energy that count as divergence.
pub const DIVERGENCE_RUN: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VariationalError {
    #[error("height z({i}, {j}) = {z:e} is not positive")]
    HalfspaceViolation { i: usize, j: usize, z: f64 },
    #[error("descent diverged at step {step} (energy {energy:e}); lower the rate")]
    Diverged { step: usize, energy: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed height-field CSV: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, VariationalError>;

/// Heights on an `nu × nv` tensor grid over `x_range × y_range`. The
/// boundary rows and columns are held fixed by [`descend`].
#[derive(Clone, Debug, PartialEq)]
pub struct HeightField {
    nu: usize,
    nv: usize,
    x_range: (f64, f64),
    y_range: (f64, f64),
    z: Vec<f64>,
}

impl HeightField {
    pub fn from_fn(nu: usize, nv: usize, x_range: (f64, f64), y_range: (f64, f64), f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut h = HeightField { nu, nv, x_range, y_range, z: vec![0.0; nu * nv] };
        h.check_shape()?;
        for i in 0..nu {
            for j in 0..nv {
                h.z[i * nv + j] = f(h.x(i), h.y(j));
            }
        }
        Ok(h)
    }

    /// Row-major values, `z[i * nv + j]` at `(x_i, y_j)`.
    pub fn from_values(nu: usize, nv: usize, x_range: (f64, f64), y_range: (f64, f64), z: Vec<f64>) -> Result<Self> {
        if z.len() != nu * nv {
            return Err(VariationalError::InvalidArgument(format!("expected {} heights, got {}", nu * nv, z.len())));
        }
        let h = HeightField { nu, nv, x_range, y_range, z };
        h.check_shape()?;
        Ok(h)
    }

    fn check_shape(&self) -> Result<()> {
        if self.nu < 3 || self.nv < 3 {
            return Err(VariationalError::InvalidArgument("height fields need at least 3 nodes per axis".into()));
        }
        let ok = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 < r.1;
        if !ok(self.x_range) || !ok(self.y_range) {
            return Err(VariationalError::InvalidArgument("ranges must be finite with lo < hi".into()));
        }
        Ok(())
    }

    /// Cylinder over the α-catenary through `(0, 1)` with horizontal
    /// tangent, `z = f(x)`, rulings along `y`.
    pub fn alpha_catenary(alpha: f64, nu: usize, nv: usize, x_range: (f64, f64), y_range: (f64, f64)) -> Result<Self> {
        let mut h = HeightField::from_fn(nu, nv, x_range, y_range, |_, _| 1.0)?;
        let xs: Vec<f64> = (0..nu).map(|i| h.x(i)).collect();
        let profile = catenary_graph(alpha, &xs)?;
        for i in 0..nu {
            for j in 0..nv {
                h.z[i * nv + j] = profile[i];
            }
        }
        Ok(h)
    }

    /// Same boundary, interior replaced by the mean boundary height.
    pub fn flattened(&self) -> Self {
        let mut out = self.clone();
        let (mut sum, mut count) = (0.0, 0);
        for i in 0..self.nu {
            for j in 0..self.nv {
                if self.is_boundary(i, j) {
                    sum += self.get(i, j);
                    count += 1;
                }
            }
        }
        let mean = sum / count as f64;
        for i in 1..self.nu - 1 {
            for j in 1..self.nv - 1 {
                out.z[i * self.nv + j] = mean;
            }
        }
        out
    }

    /// Interior heights multiplied by `1 + amplitude·ξ`, `ξ` uniform in
    /// `[−1, 1]` from a seeded ChaCha8 stream.
    pub fn with_noise(&self, amplitude: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        for i in 1..self.nu - 1 {
            for j in 1..self.nv - 1 {
                out.z[i * self.nv + j] *= 1.0 + amplitude * rng.gen_range(-1.0..=1.0);
            }
        }
        out
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nu, self.nv)
    }

    pub fn x_range(&self) -> (f64, f64) {
        self.x_range
    }

    pub fn y_range(&self) -> (f64, f64) {
        self.y_range
    }

    pub fn dx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / (self.nu - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_range.1 - self.y_range.0) / (self.nv - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_range.0 + self.dx() * i as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_range.0 + self.dy() * j as f64
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.z[i * self.nv + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: f64) {
        self.z[i * self.nv + j] = z;
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nu - 1 || j == self.nv - 1
    }

    fn check_positive(&self) -> Result<()> {
        match self.z.iter().position(|&z| !(z > 0.0)) {
            Some(k) => Err(VariationalError::HalfspaceViolation { i: k / self.nv, j: k % self.nv, z: self.z[k] }),
            None => Ok(()),
        }
    }

    /// CSV rows `i,j,x,y,z` in row-major order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,x,y,z\n");
        for i in 0..self.nu {
            for j in 0..self.nv {
                let _ = writeln!(out, "{},{},{},{},{}", i, j, self.x(i), self.y(j), self.get(i, j));
            }
        }
        out
    }

    /// Inverse of [`HeightField::to_csv`]; the grid shape and ranges are
    /// recovered from the rows.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| VariationalError::Parse("empty input".into()))?;
        if header.trim() != "i,j,x,y,z" {
            return Err(VariationalError::Parse(format!("unexpected header '{header}'")));
        }
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 5 {
                return Err(VariationalError::Parse(format!("row {}: expected 5 fields", n + 1)));
            }
            let bad = |e: String| VariationalError::Parse(format!("row {}: {e}", n + 1));
            let i: usize = f[0].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
            let j: usize = f[1].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
            let mut v = [0.0; 3];
            for (k, slot) in v.iter_mut().enumerate() {
                *slot = f[2 + k].parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?;
            }
            rows.push((i, j, v));
        }
        let nu = rows.iter().map(|r| r.0).max().map_or(0, |m| m + 1);
        let nv = rows.iter().map(|r| r.1).max().map_or(0, |m| m + 1);
        if rows.len() != nu * nv {
            return Err(VariationalError::Parse(format!("{} rows do not fill a {nu}x{nv} grid", rows.len())));
        }
        let mut z = vec![f64::NAN; nu * nv];
        let (mut x_range, mut y_range) = ((f64::NAN, f64::NAN), (f64::NAN, f64::NAN));
        for (i, j, [x, y, zv]) in rows {
            z[i * nv + j] = zv;
            if i == 0 {
                x_range.0 = x;
            }
            if i == nu - 1 {
                x_range.1 = x;
            }
            if j == 0 {
                y_range.0 = y;
            }
            if j == nv - 1 {
                y_range.1 = y;
            }
        }
        if z.iter().any(|v| v.is_nan()) {
            return Err(VariationalError::Parse("duplicate or missing grid nodes".into()));
        }
        HeightField::from_values(nu, nv, x_range, y_range, z)
    }
}

/// Profile `z = f(x)` of the α-catenary graph with `f(0) = 1`, `f'(0) = 0`:
/// `f' = tan θ`, `θ' = α / f`, RK4 with steps of at most `1e-3`.
fn catenary_graph(alpha: f64, xs: &[f64]) -> Result<Vec<f64>> {
    let rhs = |y: f64, th: f64| (th.tan(), alpha / y);
    let mut out = Vec::with_capacity(xs.len());
    for &target in xs {
        let n = (target.abs() / 1e-3).ceil().max(1.0) as usize;
        let h = target / n as f64;
        let (mut y, mut th) = (1.0f64, 0.0f64);
        for _ in 0..n {
            let k1 = rhs(y, th);
            let k2 = rhs(y + 0.5 * h * k1.0, th + 0.5 * h * k1.1);
            let k3 = rhs(y + 0.5 * h * k2.0, th + 0.5 * h * k2.1);
            let k4 = rhs(y + h * k3.0, th + h * k3.1);
            y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            th += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            if !(y > 0.0) || th.abs() >= std::f64::consts::FRAC_PI_2 || !y.is_finite() {
                return Err(VariationalError::InvalidArgument(format!("the {alpha}-catenary graph does not reach x = {target}")));
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// One linear triangle of a cell: corner indices (0 = `(i, j)`, 1 = `(i+1, j)`,
/// 2 = `(i, j+1)`, 3 = `(i+1, j+1)`) and the signs of the corners in the
/// forward differences giving `z_x`, `z_y`.
struct Tri {
    verts: [usize; 3],
    gx: [(usize, f64); 2],
    gy: [(usize, f64); 2],
}

// Both diagonal splits of the cell, each triangle weighted by half its area.
const CELL_TRIS: [Tri; 4] = [
    Tri { verts: [0, 1, 3], gx: [(0, -1.0), (1, 1.0)], gy: [(1, -1.0), (3, 1.0)] },
    Tri { verts: [0, 2, 3], gx: [(2, -1.0), (3, 1.0)], gy: [(0, -1.0), (2, 1.0)] },
    Tri { verts: [0, 1, 2], gx: [(0, -1.0), (1, 1.0)], gy: [(0, -1.0), (2, 1.0)] },
    Tri { verts: [1, 2, 3], gx: [(2, -1.0), (3, 1.0)], gy: [(1, -1.0), (3, 1.0)] },
];

fn cell_corners(h: &HeightField, i: usize, j: usize) -> [usize; 4] {
    let k = i * h.nv + j;
    [k, k + h.nv, k + 1, k + h.nv + 1]
}

/// Visits every triangle with its corner indices, `(z̄, z_x, z_y)` and weight.
fn for_each_tri(h: &HeightField, mut f: impl FnMut(&[usize; 4], &Tri, f64, f64, f64)) {
    let (dx, dy) = (h.dx(), h.dy());
    for i in 0..h.nu - 1 {
        for j in 0..h.nv - 1 {
            let c = cell_corners(h, i, j);
            for t in &CELL_TRIS {
                let zm = t.verts.iter().map(|&v| h.z[c[v]]).sum::<f64>() / 3.0;
                let zx = t.gx.iter().map(|&(v, s)| s * h.z[c[v]]).sum::<f64>() / dx;
                let zy = t.gy.iter().map(|&(v, s)| s * h.z[c[v]]).sum::<f64>() / dy;
                f(&c, t, zm, zx, zy);
            }
        }
    }
}

/// Piecewise-linear energy: each cell is split along both diagonals and
/// every triangle contributes a quarter of the cell area times the
/// integrand at its mean height and constant slope.
pub fn height_energy(h: &HeightField, alpha: f64) -> Result<f64> {
    h.check_positive()?;
    let w = 0.25 * h.dx() * h.dy();
    let mut e = 0.0;
    for_each_tri(h, |_, _, zm, zx, zy| {
        e += w * zm.powf(alpha) * (1.0 + zx * zx + zy * zy).sqrt();
    });
    Ok(e)
}

/// `∂E/∂z(i, j)` on the interior; zero on the boundary.
pub fn interior_gradient(h: &HeightField, alpha: f64) -> Result<Vec<f64>> {
    Ok(energy_and_gradient(h, alpha)?.1)
}

fn energy_and_gradient(h: &HeightField, alpha: f64) -> Result<(f64, Vec<f64>)> {
    h.check_positive()?;
    let (dx, dy) = (h.dx(), h.dy());
    let w = 0.25 * dx * dy;
    let mut e = 0.0;
    let mut g = vec![0.0; h.nu * h.nv];
    for_each_tri(h, |c, t, zm, zx, zy| {
        let root = (1.0 + zx * zx + zy * zy).sqrt();
        let za = zm.powf(alpha);
        e += w * za * root;
        let dz = w * alpha * za / zm * root / 3.0;
        for &v in &t.verts {
            g[c[v]] += dz;
        }
        let (px, py) = (w * za * zx / (root * dx), w * za * zy / (root * dy));
        for &(v, s) in &t.gx {
            g[c[v]] += s * px;
        }
        for &(v, s) in &t.gy {
            g[c[v]] += s * py;
        }
    });
    for i in 0..h.nu {
        for j in 0..h.nv {
            if h.is_boundary(i, j) {
                g[i * h.nv + j] = 0.0;
            }
        }
    }
    Ok((e, g))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Descent {
    pub field: HeightField,
    /// Energy before the first step and after every step.
    pub trace: Vec<f64>,
}

impl Descent {
    /// CSV rows `step,energy`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("step,energy\n");
        for (k, e) in self.trace.iter().enumerate() {
            let _ = writeln!(out, "{k},{e}");
        }
        out
    }
}

/// Projected gradient descent on the interior heights.
///
/// Each step moves `z ← max(z − rate · ∂E/∂z / (dx dy), HEIGHT_FLOOR)`; the
/// division by the cell area makes `rate` independent of the grid. Five
/// consecutive steps ending above the lowest energy reached so far (relative
/// slack `1e-12`), or a non-finite energy, abort with `Diverged`. Measuring
/// against the best value rather than the previous one also catches runs
/// that jump up once and then stall on the floor. Explicit descent is stable for `rate` below roughly
/// `min(dx, dy)² / (4 max z^α)`.
pub fn descend(h: &HeightField, alpha: f64, steps: usize, rate: f64) -> Result<Descent> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(VariationalError::InvalidArgument(format!("rate must be non-negative, got {rate}")));
    }
    let mut field = h.clone();
    let mut trace = Vec::with_capacity(steps + 1);
    let scale = rate / (field.dx() * field.dy());
    let (e0, mut g) = energy_and_gradient(&field, alpha)?;
    trace.push(e0);
    let mut best = e0;
    let mut rising = 0;
    for step in 1..=steps {
        for (z, gk) in field.z.iter_mut().zip(&g) {
            if *gk != 0.0 {
                *z = (*z - scale * gk).max(HEIGHT_FLOOR);
            }
        }
        let e = match energy_and_gradient(&field, alpha) {
            Ok((e, next)) if e.is_finite() => {
                g = next;
                e
            }
            Ok((e, _)) => return Err(VariationalError::Diverged { step, energy: e }),
            Err(_) => return Err(VariationalError::Diverged { step, energy: f64::NAN }),
        };
        if e > best + 1e-12 * best.abs() {
            rising += 1;
        } else {
            rising = 0;
            best = best.min(e);
        }
        trace.push(e);
        if rising >= DIVERGENCE_RUN {
            return Err(VariationalError::Diverged { step, energy: e });
        }
    }
    Ok(Descent { field, trace })
}

/// Curvature residual (with `v = e3`) at the interior nodes from central
/// difference stencils.
pub fn residual_field(h: &HeightField, alpha: f64) -> Result<Vec<(usize, usize, f64)>> {
    h.check_positive()?;
    let v = Direction::unit(Metric::Euclidean, Vec3::E3).expect("e3 is unit");
    let (dx, dy) = (h.dx(), h.dy());
    let z = |i: usize, j: usize| h.get(i, j);
    let mut out = Vec::new();
    for i in 1..h.nu - 1 {
        for j in 1..h.nv - 1 {
            let zx = (z(i + 1, j) - z(i - 1, j)) / (2.0 * dx);
            let zy = (z(i, j + 1) - z(i, j - 1)) / (2.0 * dy);
            let zxx = (z(i + 1, j) - 2.0 * z(i, j) + z(i - 1, j)) / (dx * dx);
            let zyy = (z(i, j + 1) - 2.0 * z(i, j) + z(i, j - 1)) / (dy * dy);
            let zxy = (z(i + 1, j + 1) - z(i + 1, j - 1) - z(i - 1, j + 1) + z(i - 1, j - 1)) / (4.0 * dx * dy);
            let jet = Jet2 {
                x: Vec3::new(h.x(i), h.y(j), z(i, j)),
                xs: Vec3::new(1.0, 0.0, zx),
                xt: Vec3::new(0.0, 1.0, zy),
                xss: Vec3::new(0.0, 0.0, zxx),
                xst: Vec3::new(0.0, 0.0, zxy),
                xtt: Vec3::new(0.0, 0.0, zyy),
            };
            let r = residual_at(Metric::Euclidean, &jet, &v, alpha).map_err(|e| VariationalError::InvalidArgument(e.to_string()))?;
            out.push((i, j, r));
        }
    }
    Ok(out)
}

pub fn max_residual(h: &HeightField, alpha: f64) -> Result<f64> {
    Ok(residual_field(h, alpha)?.iter().fold(0.0, |m, r| m.max(r.2.abs())))
}
