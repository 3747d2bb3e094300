use proptest::prelude::*;
use singular_geom::algebra::{causal_character, cross, hyperbolic_angle, inner, triple};
use singular_geom::{CausalCharacter, Metric, Vec3};

const METRICS: [Metric; 2] = [Metric::Euclidean, Metric::Lorentzian];

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

/// Future-pointing timelike vectors, strictly inside the cone.
fn timelike() -> impl Strategy<Value = Vec3> {
    (-3.0..3.0f64, -3.0..3.0f64, 0.05..3.0f64).prop_map(|(x, y, extra)| Vec3::new(x, y, x.hypot(y) + extra))
}

fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
    (a - b).norm_inf() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cross_is_dual_to_triple(u in vec3(10.0), v in vec3(10.0), w in vec3(10.0)) {
        let scale = 1.0 + u.norm() * v.norm() * w.norm();
        for m in METRICS {
            let d = inner(m, &cross(m, &u, &v), &w) - triple(&u, &v, &w);
            prop_assert!(d.abs() <= 1e-12 * scale, "{m}: {d:e}");
        }
    }
}

proptest! {
    #[test]
    fn cross_is_bilinear_and_antisymmetric(u in vec3(5.0), v in vec3(5.0), w in vec3(5.0), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        for m in METRICS {
            prop_assert!(close(cross(m, &u, &v), -cross(m, &v, &u), 1e-13));
            let left = cross(m, &(u * a + w * b), &v);
            let right = cross(m, &u, &v) * a + cross(m, &w, &v) * b;
            prop_assert!(close(left, right, 1e-11));
            prop_assert!(inner(m, &cross(m, &u, &v), &u).abs() <= 1e-11);
        }
    }

    #[test]
    fn complement_of_timelike_is_spacelike(v in timelike(), e in vec3(4.0), f in vec3(4.0), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let l = Metric::Lorentzian;
        prop_assume!(causal_character(&v) == CausalCharacter::Timelike);
        let vv = inner(l, &v, &v);
        let project = |x: Vec3| x - v * (inner(l, &x, &v) / vv);
        let w = project(e) * a + project(f) * b;
        prop_assert!(inner(l, &w, &v).abs() <= 1e-10 * (1.0 + w.norm() * v.norm()));
        prop_assume!(w.norm() > 1e-6);
        prop_assert_eq!(causal_character(&w), CausalCharacter::Spacelike);
    }

    #[test]
    fn hyperbolic_angle_is_scale_invariant(u in timelike(), v in timelike(), lam in 0.01..100.0f64, mu in 0.01..100.0f64) {
        let base = hyperbolic_angle(&u, &v).unwrap();
        let scaled = hyperbolic_angle(&(u * lam), &(v * mu)).unwrap();
        prop_assert!(base >= 0.0);
        prop_assert!((base - scaled).abs() <= 1e-7 * (1.0 + base), "{base} vs {scaled}");
    }
}

#[test]
fn orientation_is_right_handed_in_both_signatures() {
    assert_eq!(triple(&Vec3::E1, &Vec3::E2, &Vec3::E3), 1.0);
    assert_eq!(cross(Metric::Euclidean, &Vec3::E1, &Vec3::E2), Vec3::E3);
    assert_eq!(inner(Metric::Lorentzian, &cross(Metric::Lorentzian, &Vec3::E1, &Vec3::E2), &Vec3::E3), 1.0);
}
