use proptest::prelude::*;
use singular_geom::surface::{first_variation, fundamental_forms, mean_curvature, singular_residual, unit_normal, SurfaceError};
use singular_geom::{Direction, Domain, Grid, Jet2, Metric, ParamSurface, Vec3};

const E: Metric = Metric::Euclidean;
const L: Metric = Metric::Lorentzian;

/// Graph `z = c + a s² + b s t + k sin t` with exact jets.
fn graph(c: f64, a: f64, b: f64, k: f64) -> ParamSurface {
    ParamSurface::exact(Domain::new((0.0, 1.0), (0.0, 1.0)), move |s, t| Jet2 {
        x: Vec3::new(s, t, c + a * s * s + b * s * t + k * t.sin()),
        xs: Vec3::new(1.0, 0.0, 2.0 * a * s + b * t),
        xt: Vec3::new(0.0, 1.0, b * s + k * t.cos()),
        xss: Vec3::new(0.0, 0.0, 2.0 * a),
        xst: Vec3::new(0.0, 0.0, b),
        xtt: Vec3::new(0.0, 0.0, -k * t.sin()),
    })
}

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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn first_variation_matches_the_curvature_integral(
        c in 1.0..2.0f64, a in -0.4..0.4f64, b in -0.4..0.4f64, k in -0.4..0.4f64, alpha in -2.0..3.0f64,
    ) {
        let surf = graph(c, a, b, k);
        let v = Direction::unit(E, Vec3::E3).unwrap();
        let bump = |s: f64, t: f64| 1.0 + s * t;
        let grid = Grid::DEFAULT;
        let numeric = first_variation(E, &surf, &v, alpha, bump, 1e-4, grid).unwrap();
        let ws = Grid::trapezoid_weights(0.0, 1.0, grid.ns);
        let xs = Grid::axis(0.0, 1.0, grid.ns);
        let (mut oracle, mut scale) = (0.0, 0.0);
        for (s, p) in xs.iter().zip(&ws) {
            for (t, q) in xs.iter().zip(&ws) {
                let j = surf.jet(*s, *t).unwrap();
                let ff = fundamental_forms(E, &j).unwrap();
                let dm = ff.w2.sqrt();
                let n = unit_normal(E, &j).unwrap();
                let h = mean_curvature(E, &j).unwrap();
                let z = j.x.z;
                let term = p * q * bump(*s, *t) * z.powf(alpha - 1.0) * dm;
                oracle += term * (alpha * n.z - 2.0 * h * z);
                scale += term * (alpha * n.z).abs().max((2.0 * h * z).abs());
            }
        }
        prop_assert!((numeric - oracle).abs() <= 1e-4 * oracle.abs().max(scale), "{numeric} vs {oracle}");
    }
}

proptest! {
    #[test]
    fn unit_normals_have_unit_length(u in 0.2..2.0f64, p in -3.0..3.0f64, s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let j = hyperboloid_jet(u, p);
        let n = unit_normal(L, &j).unwrap();
        prop_assert!((L.inner(&n, &n) + 1.0).abs() <= 1e-12);
        let j = graph(1.0, 0.3, -0.2, 0.1).jet(s, t).unwrap();
        let n = unit_normal(E, &j).unwrap();
        prop_assert!((n.dot(&n) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn residual_needs_a_unit_direction(scale in 1.5..10.0f64) {
        prop_assert!(matches!(Direction::unit(E, Vec3::E3 * scale), Err(SurfaceError::NotUnit(_))));
        let v = Direction::normalized(E, Vec3::E3 * scale).unwrap();
        let w = Direction::unit(E, Vec3::E3).unwrap();
        let surf = graph(1.5, 0.2, 0.1, 0.3);
        let a = singular_residual(E, &surf, 0.4, 0.6, &v, 1.3).unwrap();
        let b = singular_residual(E, &surf, 0.4, 0.6, &w, 1.3).unwrap();
        prop_assert!((a - b).abs() <= 1e-14);
    }
}

fn jet_error(a: &Jet2, b: &Jet2) -> f64 {
    [a.x - b.x, a.xs - b.xs, a.xt - b.xt, a.xss - b.xss, a.xst - b.xst, a.xtt - b.xtt]
        .iter()
        .fold(0.0, |m, d| m.max(d.norm_inf()))
}

#[test]
fn finite_difference_jets_converge_at_fourth_order() {
    let point = |s: f64, t: f64| Vec3::new((5.0 * s + t).cos(), s * (4.0 * t).sin(), (3.0 * s - 2.0 * t).exp());
    let truth = |s: f64, t: f64| {
        let (sn, cs) = (5.0 * s + t).sin_cos();
        let (s4, c4) = (4.0 * t).sin_cos();
        let e = (3.0 * s - 2.0 * t).exp();
        Jet2 {
            x: Vec3::new(cs, s * s4, e),
            xs: Vec3::new(-5.0 * sn, s4, 3.0 * e),
            xt: Vec3::new(-sn, 4.0 * s * c4, -2.0 * e),
            xss: Vec3::new(-25.0 * cs, 0.0, 9.0 * e),
            xst: Vec3::new(-5.0 * cs, 4.0 * c4, -6.0 * e),
            xtt: Vec3::new(-cs, -16.0 * s * s4, 4.0 * e),
        }
    };
    let errors: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|&h| {
            let fd = ParamSurface::finite_difference(Domain::new((0.0, 1.0), (0.0, 1.0)), point, Some(h));
            [(0.3, 0.4), (0.7, 0.2), (0.5, 0.9)].iter().fold(0.0f64, |m, &(s, t)| m.max(jet_error(&fd.jet(s, t).unwrap(), &truth(s, t))))
        })
        .collect();
    for w in errors.windows(2) {
        let slope = (w[0] / w[1]).log2();
        assert!(slope >= 3.7, "slope {slope} from {errors:?}");
    }
}

#[test]
fn hyperboloid_has_unit_mean_curvature() {
    let j = hyperboloid_jet(0.7, 1.1);
    assert!((mean_curvature(L, &j).unwrap().abs() - 1.0).abs() <= 1e-12);
}
