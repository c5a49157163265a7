use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rnc_core::geodesic::{NormalChart, NormalChartOptions};
use rnc_core::metrics::{warped_chart, Differentiation, StereographicChart};
use rnc_core::radial::closed_form::normal_metric;
use rnc_core::radial::{hypersurface_metric, integrate_radial, taylor_metric, ChartCurvatureSource, CurvatureExpansion, DEFAULT_STEP};
use rnc_core::tensor::Signature;

fn quad(g: &DMatrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    (DVector::from_column_slice(a).transpose() * g * DVector::from_column_slice(b))[(0, 0)]
}

#[test]
fn sphere_circle_by_hand() {
    // at normal radius r on the unit sphere a transverse unit step has length sin r / r
    let z = [0.3, 0.4];
    let g = normal_metric(1.0, &Signature::euclidean(2), &z);
    let t = [-0.8, 0.6];
    assert!((quad(&g, &t, &t) - (0.5f64.sin() / 0.5).powi(2)).abs() < 1e-14);
    assert!((quad(&g, &z, &z) - 0.25).abs() < 1e-14);
    assert!(quad(&g, &z, &t).abs() < 1e-14);

    let h = normal_metric(-1.0, &Signature::euclidean(2), &z);
    assert!((quad(&h, &t, &t) - (0.5f64.sinh() / 0.5).powi(2)).abs() < 1e-14);
}

#[test]
fn shooting_and_radial_agree_without_constant_curvature() {
    let origin = [0.2, -0.1];
    let options = NormalChartOptions {
        t_max: 3.0,
        directions: 8,
        ..Default::default()
    };
    let nc = NormalChart::with_options(warped_chart(0.4), &origin, options).unwrap();
    let source = ChartCurvatureSource::from_normal_chart(&nc, DEFAULT_STEP).unwrap();
    for z in [[0.3, 0.2], [-0.5, 0.1], [0.05, -0.6]] {
        let shot = nc.pullback_metric(&z).unwrap();
        let rc = integrate_radial(&source, &z, DEFAULT_STEP).unwrap();
        let radial = hypersurface_metric(&rc);
        assert!((&shot - &radial).amax() <= 1e-6 * shot.amax(), "{z:?}");
    }
}

#[test]
fn three_constructions_meet_near_the_origin() {
    let sig = Signature::lorentzian(3);
    let origin = [0.1, 0.0, 0.2];
    let options = NormalChartOptions {
        t_max: 3.0,
        directions: 8,
        ..Default::default()
    };
    let nc = NormalChart::with_options(StereographicChart::new(1.0, sig.clone()), &origin, options).unwrap();
    let exp = CurvatureExpansion::from_chart(nc.chart(), &origin, Differentiation::Auto).unwrap();
    let z = [0.02, 0.01, -0.015];
    let closed = normal_metric(1.0, &sig, &z);
    let shot = nc.pullback_metric(&z).unwrap();
    let series = taylor_metric(&exp, &z).unwrap();
    assert!((&shot - &closed).amax() < 1e-9);
    // fourth order in a radius of about 0.03
    assert!((&series - &closed).amax() < 1e-7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn radial_vector_keeps_its_flat_inner_products(
        k in prop_oneof![Just(1.0), Just(-1.0), -2.0f64..2.0],
        lorentzian in any::<bool>(),
        z in prop::collection::vec(-1.0f64..1.0, 3),
        w in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let sig = if lorentzian { Signature::lorentzian(3) } else { Signature::euclidean(3) };
        let g = normal_metric(k, &sig, &z);
        prop_assert!((&g - g.transpose()).amax() == 0.0);
        // G(z, w) = η(z, w) for every w
        let lhs = quad(&g, &z, &w);
        prop_assert!((lhs - sig.dot(&z, &w)).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn flat_limit_is_eta(z in prop::collection::vec(-3.0f64..3.0, 4)) {
        let sig = Signature::lorentzian(4);
        let g = normal_metric(0.0, &sig, &z);
        prop_assert!((g - sig.eta()).amax() <= 1e-14);
    }
}
