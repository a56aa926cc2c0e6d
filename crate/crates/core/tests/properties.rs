use num_complex::Complex64;
use polymod::combinatorics::{validate_weight, Marking, WeightVector};
use polymod::fiber::{apex_w, fiber_theta5, fiber_theta6, round_trip, UpperHalfPoint};
use polymod::lorentz::{area_signature, build_model};
use polymod::moduli::{psi5, psi6};
use proptest::prelude::*;

/// Weight vectors built from positive proportions, kept only if every
/// pairwise sum stays below π.
fn weights(n: usize) -> impl Strategy<Value = WeightVector> {
    prop::collection::vec(0.05f64..1.0, n).prop_filter_map("outside the weight domain", |raw| {
        let total: f64 = raw.iter().sum();
        let angles: Vec<f64> = raw.iter().map(|x| x / total * std::f64::consts::TAU).collect();
        validate_weight(&angles).ok()
    })
}

fn perms(n: usize) -> impl Strategy<Value = Marking> {
    Just((1..=n as u32).collect::<Vec<u32>>()).prop_shuffle().prop_map(|w| Marking::new(&w).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pentagon_round_trip(theta in weights(5)) {
        prop_assert!(round_trip(&theta).unwrap() < 1e-9);
    }

    #[test]
    fn hexahedron_round_trip(theta in weights(6)) {
        prop_assert!(round_trip(&theta).unwrap() < 1e-9);
    }

    #[test]
    fn area_form_is_lorentzian(theta in weights(6), m in perms(6)) {
        prop_assert_eq!(area_signature(&theta, &m).unwrap(), (1, 3));
    }

    #[test]
    fn pentagon_shapes_are_admissible(theta in weights(5), m in perms(5)) {
        let s = psi5(&theta, &m).unwrap();
        prop_assert!(s.is_admissible());
    }

    #[test]
    fn fiber_recovers_shape_and_apex(theta in weights(5), m in perms(5)) {
        let s = psi5(&theta, &m).unwrap();
        let w = apex_w(&theta, &m).unwrap();
        let back = fiber_theta5(&s, &w, &m).unwrap();
        prop_assert!(back.distance_inf(&theta) < 1e-9);
    }

    #[test]
    fn hexahedron_fiber_recovers_theta(theta in weights(6), m in perms(6)) {
        let s = psi6(&theta, &m).unwrap();
        let w = apex_w(&theta, &m).unwrap();
        let back = fiber_theta6(&s, &w, &m).unwrap();
        prop_assert!(back.distance_inf(&theta) < 1e-9);
    }

    #[test]
    fn klein_coordinates_ignore_scale(theta in weights(6), scale in 0.1f64..10.0) {
        let model = build_model(&theta, &Marking::identity(6)).unwrap();
        let v = model.vertex(&[0, 2, 4]).unwrap();
        let x = model.klein_of(&v).unwrap();
        let y = model.klein_of(&(&v * scale)).unwrap();
        for (a, b) in x.coords.iter().zip(&y.coords) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn lower_half_plane_is_rejected() {
    assert!(UpperHalfPoint::new(Complex64::new(0.3, -0.1)).is_err());
    assert!(UpperHalfPoint::new(Complex64::new(0.3, 0.0)).is_err());
}
