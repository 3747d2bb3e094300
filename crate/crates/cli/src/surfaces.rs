//! Built-in surfaces and flag parsers shared by the commands.

use std::str::FromStr;

use singular_geom::catenary::{catenary_cylinder, integrate, CatenaryState};
use singular_geom::ruled::{helicoid, lightlike_reference};
use singular_geom::{Domain, Grid, Jet2, Metric, ParamSurface, Vec3};

use crate::config::{CliResult, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Plane,
    CatenaryCylinder,
    Helicoid,
    Sphere,
    Hyperboloid,
    LightlikeReference,
    File,
}

impl FromStr for Builtin {
    type Err = Failure;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "plane" => Builtin::Plane,
            "catenary-cylinder" => Builtin::CatenaryCylinder,
            "helicoid" => Builtin::Helicoid,
            "sphere" => Builtin::Sphere,
            "hyperboloid" => Builtin::Hyperboloid,
            "lightlike-reference" => Builtin::LightlikeReference,
            "file" => Builtin::File,
            other => {
                return Err(Failure::usage(format!(
                    "unknown surface '{other}' (plane, catenary-cylinder, helicoid, sphere, hyperboloid, lightlike-reference, file)"
                )))
            }
        })
    }
}

impl Builtin {
    pub fn default_metric(self) -> Metric {
        match self {
            Builtin::Hyperboloid | Builtin::LightlikeReference => Metric::Lorentzian,
            _ => Metric::Euclidean,
        }
    }
}

pub fn parse_metric(s: &str) -> CliResult<Metric> {
    match s {
        "euclid" | "euclidean" => Ok(Metric::Euclidean),
        "lorentz" | "lorentzian" => Ok(Metric::Lorentzian),
        other => Err(Failure::usage(format!("unknown metric '{other}' (euclid, lorentz)"))),
    }
}

pub fn metric_name(m: Metric) -> &'static str {
    match m {
        Metric::Euclidean => "euclid",
        Metric::Lorentzian => "lorentz",
    }
}

/// `x,y,z`.
pub fn parse_vec(s: &str) -> CliResult<Vec3> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Failure::usage(format!("expected a vector 'x,y,z', got '{s}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut c = [0.0; 3];
    for (slot, p) in c.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| bad())?;
    }
    Vec3::try_new(c[0], c[1], c[2]).map_err(|_| bad())
}

/// `N` or `NxM`, at least 2 nodes per axis.
pub fn parse_grid(s: &str) -> CliResult<(usize, usize)> {
    let bad = || Failure::usage(format!("expected a grid 'N' or 'NxM' with N, M >= 2, got '{s}'"));
    let (a, b) = match s.split_once(['x', 'X']) {
        Some((a, b)) => (a, b),
        None => (s, s),
    };
    let n: usize = a.trim().parse().map_err(|_| bad())?;
    let m: usize = b.trim().parse().map_err(|_| bad())?;
    if n < 2 || m < 2 {
        return Err(bad());
    }
    Ok((n, m))
}

pub fn grid(shape: (usize, usize)) -> Grid {
    Grid::new(shape.0, shape.1).expect("parse_grid enforces the minimum")
}

/// Arclength of the built-in α-catenary from its apex `(0, 1)`.
pub fn catenary_length(alpha: f64) -> f64 {
    if alpha < 0.0 {
        1.0
    } else {
        2.0
    }
}

/// A unit vector orthogonal to `v`, as close to `e2` as possible.
fn ruling_for(v: Vec3) -> Vec3 {
    let v = v / v.norm();
    let candidate = Vec3::E2 - v * v.y;
    if candidate.norm() > 1e-6 {
        candidate / candidate.norm()
    } else {
        let c = Vec3::E1 - v * v.x;
        c / c.norm()
    }
}

/// Parametric form of a built-in surface. `v` positions surfaces that
/// depend on it (the catenary cylinder is built over `v`).
pub fn build(kind: Builtin, alpha: f64, v: Vec3) -> CliResult<ParamSurface> {
    match kind {
        Builtin::Plane => Ok(ParamSurface::exact(Domain::new((0.0, 1.0), (0.0, 1.0)), |s, t| Jet2 {
            x: Vec3::new(s, t, 1.0),
            xs: Vec3::E1,
            xt: Vec3::E2,
            ..Default::default()
        })),
        Builtin::CatenaryCylinder => {
            let path = integrate(CatenaryState::new(0.0, 1.0, 0.0), alpha, catenary_length(alpha), 1e-3)
                .map_err(|e| Failure::usage(e.to_string()))?;
            if path.halfspace_exit {
                return Err(Failure::new(Failure::HALFSPACE, format!("the {alpha}-catenary leaves the halfspace")));
            }
            let cyl = catenary_cylinder(&path, v, ruling_for(v), Metric::Euclidean).map_err(|e| Failure::usage(e.to_string()))?;
            Ok(cyl.surface((-1.0, 1.0)))
        }
        Builtin::Helicoid => {
            let rs = helicoid(1.0, (0.0, 2.0), 1.0).map_err(|e| Failure::usage(e.to_string()))?;
            Ok(rs.to_param_surface((-1.0, 1.0)))
        }
        Builtin::Sphere => Ok(ParamSurface::exact(Domain::new((0.0, std::f64::consts::TAU), (0.2, 1.3)), sphere_jet)),
        Builtin::Hyperboloid => Ok(ParamSurface::exact(Domain::new((0.2, 1.5), (0.0, std::f64::consts::TAU)), hyperboloid_jet)),
        Builtin::LightlikeReference => {
            let rs = lightlike_reference(1.0, (-1.0, 1.0)).map_err(|e| Failure::usage(e.to_string()))?;
            // lifted off the origin so that <X, e3>_L stays negative
            let lift = Vec3::new(0.0, 0.0, 3.0);
            Ok(ParamSurface::exact(Domain::new((-1.0, 1.0), (-0.4, 0.4)), move |s, t| {
                let mut j = rs.jet(s, t);
                j.x = j.x + lift;
                j
            }))
        }
        Builtin::File => Err(Failure::usage("surface 'file' is read from --input")),
    }
}

/// Unit sphere, `X = (cos s cos t, sin s cos t, sin t)`.
fn sphere_jet(s: f64, t: f64) -> Jet2 {
    let (ss, cs) = s.sin_cos();
    let (st, ct) = t.sin_cos();
    Jet2 {
        x: Vec3::new(cs * ct, ss * ct, st),
        xs: Vec3::new(-ss * ct, cs * ct, 0.0),
        xt: Vec3::new(-cs * st, -ss * st, ct),
        xss: Vec3::new(-cs * ct, -ss * ct, 0.0),
        xst: Vec3::new(ss * st, -cs * st, 0.0),
        xtt: Vec3::new(-cs * ct, -ss * ct, -st),
    }
}

/// Upper sheet of the unit hyperboloid `<X, X>_L = −1`.
fn hyperboloid_jet(u: f64, p: f64) -> Jet2 {
    let (sh, ch) = (u.sinh(), u.cosh());
    let (sp, cp) = p.sin_cos();
    Jet2 {
        x: Vec3::new(sh * cp, sh * sp, ch),
        xs: Vec3::new(ch * cp, ch * sp, sh),
        xt: Vec3::new(-sh * sp, sh * cp, 0.0),
        xss: Vec3::new(sh * cp, sh * sp, ch),
        xst: Vec3::new(-ch * sp, ch * cp, 0.0),
        xtt: Vec3::new(-sh * cp, -sh * sp, 0.0),
    }
}
