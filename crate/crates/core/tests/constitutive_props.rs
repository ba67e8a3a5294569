use fracrod::{ConstitutiveModel, CutSide, Error};
use num_complex::Complex64;
use proptest::prelude::*;

fn cut_plane_point() -> impl Strategy<Value = Complex64> {
    // radius and angle strictly inside (−π, π)
    (-6.0f64..6.0, -3.1f64..3.1).prop_map(|(lr, th)| Complex64::from_polar(10f64.powf(lr / 2.0), th))
}

fn zener_params() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.05f64..0.95, 0.01f64..5.0, 0.0f64..1.0).prop_map(|(alpha, a, frac)| (alpha, a, a + frac * 3.0))
}

proptest! {
    #[test]
    fn zener_conjugate_symmetry((alpha, a, b) in zener_params(), s in cut_plane_point()) {
        let z = ConstitutiveModel::zener(alpha, a, b).unwrap();
        let m = z.m(s).unwrap();
        let mc = z.m(s.conj()).unwrap();
        prop_assert!((m.conj() - mc).norm() <= 1e-12 * m.norm());
    }

    #[test]
    fn principal_root_has_positive_real_part((alpha, a, b) in zener_params(), s in cut_plane_point()) {
        let z = ConstitutiveModel::zener(alpha, a, b).unwrap();
        prop_assert!(z.m(s).unwrap().re > 0.0);
    }

    #[test]
    fn zener_between_limits_on_positive_axis((alpha, a, b) in zener_params(), lr in -6.0f64..6.0) {
        let z = ConstitutiveModel::zener(alpha, a, b).unwrap();
        let lim = z.limits().unwrap();
        let m = z.m(Complex64::new(10f64.powf(lr), 0.0)).unwrap();
        prop_assert!(m.im.abs() < 1e-14);
        prop_assert!(m.re <= lim.c_0 + 1e-12 && m.re >= lim.c_inf - 1e-12);
    }

    #[test]
    fn equal_coefficients_collapse(alpha in 0.05f64..0.95, a in 0.01f64..5.0, s in cut_plane_point()) {
        let z = ConstitutiveModel::zener(alpha, a, a).unwrap();
        prop_assert!((z.m(s).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn derivative_matches_finite_difference((alpha, a, b) in zener_params(), s in cut_plane_point()) {
        prop_assume!(s.norm() > 1e-2 && s.arg().abs() < 3.0);
        let z = ConstitutiveModel::zener(alpha, a, b).unwrap();
        let h = 1e-5 * s.norm();
        let fd = (z.sm(s + h).unwrap() - z.sm(s - h).unwrap()) / (2.0 * h);
        let d = z.d_sm(s).unwrap();
        prop_assert!((fd - d).norm() <= 1e-5 * d.norm().max(1.0), "fd {} vs {}", fd, d);
    }

    #[test]
    fn cut_limits_are_conjugate((alpha, a, b) in zener_params(), lq in -4.0f64..4.0) {
        let z = ConstitutiveModel::zener(alpha, a, b).unwrap();
        let q = 10f64.powf(lq);
        let up = z.m_on_cut(q, CutSide::Upper).unwrap();
        let lo = z.m_on_cut(q, CutSide::Lower).unwrap();
        prop_assert!((up - lo.conj()).norm() <= 1e-13 * up.norm());
    }

    #[test]
    fn grammar_round_trip((alpha, a, b) in zener_params()) {
        let z = ConstitutiveModel::zener(alpha, a, b).unwrap();
        let back: ConstitutiveModel = z.to_string().parse().unwrap();
        prop_assert_eq!(z, back);
    }
}

#[test]
fn thermodynamic_restriction() {
    let err = ConstitutiveModel::zener(0.5, 0.7, 0.3).unwrap_err();
    assert!(err.to_string().contains("thermodynamic restriction"));
}

#[test]
fn negative_axis_is_outside_domain() {
    let z = ConstitutiveModel::zener(0.5, 0.2, 0.6).unwrap();
    assert!(matches!(z.m(Complex64::new(-1.0, 0.0)), Err(Error::Domain(_))));
}

#[test]
fn zener_real_axis_value() {
    let z = ConstitutiveModel::zener(0.5, 0.2, 0.6).unwrap();
    // s = 4: s^α = 2, M² = 1.4/2.2
    let m = z.m(Complex64::new(4.0, 0.0)).unwrap();
    assert!((m.re - (1.4f64 / 2.2).sqrt()).abs() < 1e-15);
}
