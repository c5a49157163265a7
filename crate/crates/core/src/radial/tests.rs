use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use super::closed_form::normal_metric;
use super::*;
use crate::geodesic::{NormalChart, NormalChartOptions};
use crate::metrics::tests::bump_chart;
use crate::metrics::{Differentiation, PseudoSphereChart, StereographicChart};
use crate::tensor::Variance;

fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

fn constant_run(k: f64, sig: Signature, z: &[f64]) -> RadialConnection {
    integrate_radial(&ConstantCurvatureSource::new(k, sig), z, DEFAULT_STEP).unwrap()
}

#[test]
fn sphere_matches_closed_form_at_quarter_circle() {
    let sig = Signature::euclidean(2);
    let r = PI / 2.0;
    let rc = constant_run(1.0, sig.clone(), &[r, 0.0]);
    let g = hypersurface_metric(&rc);
    assert!(max_diff(&g, &normal_metric(1.0, &sig, &[r, 0.0])) < 1e-10);
    // g_11 = 1 - F r²
    let f = (1.0 - g[(1, 1)]) / (r * r);
    assert!((f - (r * r - 1.0) / r.powi(4)).abs() < 1e-10, "F = {f}");
    assert!((f - 0.241028).abs() < 2e-6, "F = {f}");
}

#[test]
fn hyperbolic_plane_matches_closed_form() {
    let sig = Signature::euclidean(2);
    let rc = constant_run(-1.0, sig.clone(), &[1.0, 0.0]);
    let g = hypersurface_metric(&rc);
    let f = (1.0 - g[(1, 1)]) / 1.0;
    assert!((f - (1.0 - 1f64.sinh().powi(2))).abs() < 1e-10);
    assert!(max_diff(&g, &normal_metric(-1.0, &sig, &[1.0, 0.0])) < 1e-10);
}

#[test]
fn lorentzian_constant_curvature_matches_closed_form() {
    let sig = Signature::lorentzian(3);
    let z = [0.75f64.sqrt(), 0.5, 0.0];
    assert!((sig.dot(&z, &z) - 0.5).abs() < 1e-15);
    for k in [1.0, -1.0] {
        let rc = constant_run(k, sig.clone(), &z);
        assert!(max_diff(&hypersurface_metric(&rc), &normal_metric(k, &sig, &z)) < 1e-10);
    }
    let timelike_and_spacelike = [[0.2, 0.9, 0.1], [1.1, 0.3, -0.4]];
    for z in timelike_and_spacelike {
        let rc = constant_run(1.0, sig.clone(), &z);
        assert!(max_diff(&hypersurface_metric(&rc), &normal_metric(1.0, &sig, &z)) < 1e-10);
    }
}

#[test]
fn coframe_and_pair_forms_agree() {
    let sig = Signature::pq(2, 2);
    let src = FnCurvatureSource::new(sig.clone(), |t, _z| {
        // a t-dependent block with the algebraic symmetries of curvature
        let eta = sig_eta(4);
        Ok(constant_curvature_riemann_f64(0.3 + 0.5 * t, &eta))
    });
    let rc = integrate_radial(&src, &[0.4, -0.3, 0.2, 0.5], DEFAULT_STEP).unwrap();
    assert!(max_diff(&hypersurface_metric(&rc), &rc.coframe_metric()) < 1e-10);
}

fn sig_eta(n: usize) -> Vec<Vec<f64>> {
    let sig = Signature::pq(n / 2, n - n / 2);
    crate::tensor::matrix_rows(&sig.eta())
}

fn constant_curvature_riemann_f64(k: f64, g: &[Vec<f64>]) -> DenseTensor {
    crate::tensor::constant_curvature_riemann(k, g)
}

#[test]
fn antisymmetry_is_preserved_along_the_ray() {
    let chart = bump_chart(0.4);
    let src = ChartCurvatureSource::new(&chart, &[0.1, -0.2], DEFAULT_STEP).unwrap();
    let rc = integrate_radial(&src, &[0.5, 0.3], DEFAULT_STEP).unwrap();
    assert!(!rc.partial);
    let (va, vb) = rc.max_symmetry_violation();
    assert!(va < 1e-12 && vb < 1e-12, "{va} {vb}");
}

#[test]
fn chart_source_reproduces_constant_curvature() {
    let sig = Signature::euclidean(3);
    let chart = StereographicChart::new(-1.0, sig.clone());
    let src = ChartCurvatureSource::new(&chart, &[0.1, 0.2, -0.1], DEFAULT_STEP).unwrap();
    let z = [0.6, -0.4, 0.3];
    let g = hypersurface_metric(&integrate_radial(&src, &z, DEFAULT_STEP).unwrap());
    assert!(max_diff(&g, &normal_metric(-1.0, &sig, &z)) < 1e-8);

    let lsig = Signature::lorentzian(3);
    let chart = StereographicChart::new(1.0, lsig.clone());
    let src = ChartCurvatureSource::new(&chart, &[0.0, 0.0, 0.0], DEFAULT_STEP).unwrap();
    let z = [0.75f64.sqrt(), 0.5, 0.0];
    let g = hypersurface_metric(&integrate_radial(&src, &z, DEFAULT_STEP).unwrap());
    assert!(max_diff(&g, &normal_metric(1.0, &lsig, &z)) < 1e-8);
}

#[test]
fn radial_metric_agrees_with_geodesic_pullback() {
    let options = NormalChartOptions {
        t_max: 2.0,
        directions: 8,
        ..Default::default()
    };
    let nc = NormalChart::with_options(bump_chart(0.4), &[0.2, -0.1], options).unwrap();
    let src = ChartCurvatureSource::from_normal_chart(&nc, DEFAULT_STEP).unwrap();
    for z in [[0.5, 0.3], [-0.4, 0.6], [0.8, 0.0]] {
        let g = hypersurface_metric(&integrate_radial(&src, &z, DEFAULT_STEP).unwrap());
        let pulled = nc.pullback_metric(&z).unwrap();
        assert!(max_diff(&g, &pulled) < 1e-6, "{z:?}: {}", max_diff(&g, &pulled));
    }
}

#[test]
fn leaving_the_chart_gives_a_partial_result() {
    let chart = PseudoSphereChart::new(1.0, Signature::euclidean(2));
    let src = ChartCurvatureSource::new(&chart, &[0.0, 0.0], DEFAULT_STEP).unwrap();
    let rc = integrate_radial(&src, &[2.0, 0.0], DEFAULT_STEP).unwrap();
    assert!(rc.partial);
    assert!(*rc.ts.last().unwrap() < 1.0);
}

#[test]
fn half_step_check_flags_coarse_runs() {
    let src = ConstantCurvatureSource::new(1.0, Signature::euclidean(3));
    let z = [1.0, 0.8, -0.5];
    let fine = integrate_radial_checked(&src, &z, DEFAULT_STEP).unwrap();
    assert!(!fine.flagged && fine.richardson_mismatch.unwrap() < RICHARDSON_TOLERANCE);
    let coarse = integrate_radial_checked(&src, &z, 0.25).unwrap();
    assert!(coarse.flagged);
}

#[test]
fn rejects_bad_input() {
    let src = ConstantCurvatureSource::new(1.0, Signature::euclidean(2));
    assert!(matches!(
        integrate_radial(&src, &[1.0, 0.0, 0.0], DEFAULT_STEP),
        Err(GeomError::DimensionMismatch { .. })
    ));
    assert!(integrate_radial(&src, &[1.0, 0.0], 0.0).is_err());
}

#[test]
fn taylor_metric_error_is_fourth_order_for_constant_curvature() {
    for sig in [Signature::euclidean(3), Signature::lorentzian(3)] {
        let exp = CurvatureExpansion::constant(1.0, sig.clone());
        let dir = [0.6, 0.3, 0.2];
        let err = |r: f64| {
            let z: Vec<f64> = dir.iter().map(|c| c * r).collect();
            max_diff(&taylor_metric(&exp, &z).unwrap(), &normal_metric(1.0, &sig, &z))
        };
        let (e1, e2, e3) = (err(0.4), err(0.2), err(0.1));
        assert!((e1 / e2).log2() >= 3.7 && (e2 / e3).log2() >= 3.7, "{e1} {e2} {e3}");
    }
}

#[test]
fn taylor_tangential_coefficient() {
    let exp = CurvatureExpansion::constant(2.0, Signature::euclidean(2));
    let r: f64 = 0.1;
    let g = taylor_metric(&exp, &[r, 0.0]).unwrap();
    assert!((g[(1, 1)] - (1.0 - 2.0 * r * r / 3.0)).abs() < 1e-15);
    assert_eq!(g[(0, 0)], 1.0);
}

#[test]
fn taylor_metric_with_gradient_tracks_the_pullback() {
    let options = NormalChartOptions {
        t_max: 2.0,
        directions: 8,
        ..Default::default()
    };
    let origin = [0.3, -0.2];
    let nc = NormalChart::with_options(bump_chart(0.4), &origin, options).unwrap();
    let exp = CurvatureExpansion::from_chart(nc.chart(), &origin, Differentiation::Auto).unwrap();
    assert!(exp.dr.max_abs() > 1e-2);
    let dir = [0.7, 0.5];
    let err = |r: f64| {
        let z: Vec<f64> = dir.iter().map(|c| c * r).collect();
        max_diff(&taylor_metric(&exp, &z).unwrap(), &nc.pullback_metric(&z).unwrap())
    };
    let (e1, e2) = (err(0.2), err(0.1));
    assert!((e1 / e2).log2() >= 3.7, "{e1} {e2}");
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `(h ⊙ k)_abcd = h_ac k_bd + h_bd k_ac - h_ad k_bc - h_bc k_ad`.
fn kulkarni_nomizu(h: &[Vec<BigRational>], k: &[Vec<BigRational>]) -> DenseTensor<BigRational> {
    DenseTensor::covariant(4, h.len(), |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        &h[a][c] * &k[b][d] + &h[b][d] * &k[a][c] - &h[a][d] * &k[b][c] - &h[b][c] * &k[a][d]
    })
}

fn symmetric(n: usize, entries: &[(i64, i64)]) -> Vec<Vec<BigRational>> {
    let mut m = vec![vec![BigRational::zero(); n]; n];
    let mut it = entries.iter().cycle();
    for i in 0..n {
        for j in i..n {
            let &(p, q) = it.next().unwrap();
            m[i][j] = rational(p, q);
            m[j][i] = m[i][j].clone();
        }
    }
    m
}

fn entries() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-6i64..=6, 1i64..=5), 10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn normal_tensor_identities_hold_exactly(n in 2usize..=4, a in entries(), b in entries(), c in entries()) {
        let (h, k, m) = (symmetric(n, &a), symmetric(n, &b), symmetric(n, &c));
        let r1 = kulkarni_nomizu(&h, &k);
        let r2 = kulkarni_nomizu(&m, &m);
        let r = r1.zip_with(&r2, |x, y| x + y).unwrap();
        let d = normal_tensor_from_curvature(&r).unwrap();
        prop_assert_eq!(d.curvature(), r);
        prop_assert!(d.cyclic_sum().values().iter().all(|v| v.is_zero()));
        for i in crate::tensor::multi_indices(&[n; 4]) {
            prop_assert_eq!(d.get(i[0], i[1], i[2], i[3]), d.get(i[0], i[2], i[1], i[3]));
        }
    }
}

#[test]
fn normal_tensor_of_unit_sphere() {
    let eta = vec![vec![BigRational::one(), BigRational::zero()], vec![BigRational::zero(), BigRational::one()]];
    let r = crate::tensor::constant_curvature_riemann(BigRational::one(), &eta);
    let d = normal_tensor_from_curvature(&r).unwrap();
    // D_0110 = -(R_0110 + R_0110)/3 = 2/3
    assert_eq!(d.get(0, 1, 1, 0), &rational(2, 3));
    assert_eq!(d.get(0, 0, 1, 1), &rational(-1, 3));
    assert_eq!(d.tensor().variance(), &[Variance::Covariant; 4]);
}

#[test]
fn normal_tensor_rejects_asymmetric_input() {
    let mut r = ConstantCurvatureSource::new(1.0, Signature::euclidean(3)).curvature(0.0, &[0.0; 3]).unwrap();
    assert!(normal_tensor_from_curvature(&r).is_ok());
    r.set(&[0, 1, 0, 2], 1e-6);
    assert!(matches!(
        normal_tensor_from_curvature(&r),
        Err(GeomError::SymmetryViolation { .. })
    ));
    let tiny = {
        let mut t = ConstantCurvatureSource::new(1.0, Signature::euclidean(3)).curvature(0.0, &[0.0; 3]).unwrap();
        t.set(&[0, 1, 0, 2], 1e-10);
        t
    };
    assert!(normal_tensor_from_curvature(&tiny).is_ok());
}

fn loglog_slope(rs: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / xs.len() as f64, ys.iter().sum::<f64>() / ys.len() as f64);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[test]
fn taylor_slope_on_small_radii() {
    let options = NormalChartOptions {
        t_max: 2.0,
        directions: 8,
        ..Default::default()
    };
    let sig = Signature::euclidean(2);
    let charts: Vec<(Box<dyn crate::metrics::MetricChart>, Vec<f64>)> = vec![
        (Box::new(StereographicChart::new(1.0, sig.clone())), vec![0.3, -0.2]),
        (Box::new(StereographicChart::new(-1.0, sig.clone())), vec![0.3, -0.2]),
        (Box::new(PseudoSphereChart::new(1.0, sig.clone())), vec![0.2, 0.1]),
        (Box::new(PseudoSphereChart::new(-1.0, sig.clone())), vec![0.2, 0.1]),
        (Box::new(bump_chart(0.4)), vec![0.3, -0.2]),
    ];
    let rs = [0.01, 0.02, 0.04, 0.08];
    for (chart, origin) in charts {
        let nc = NormalChart::with_options(chart, &origin, options.clone()).unwrap();
        let exp = CurvatureExpansion::from_chart(nc.chart(), &origin, Differentiation::Auto).unwrap();
        let dir = [0.8, 0.6];
        let errs: Vec<f64> = rs
            .iter()
            .map(|r| {
                let z: Vec<f64> = dir.iter().map(|c| c * r).collect();
                max_diff(&taylor_metric(&exp, &z).unwrap(), &nc.pullback_metric(&z).unwrap())
            })
            .collect();
        let slope = loglog_slope(&rs, &errs);
        assert!(slope >= 3.7, "{}: {errs:?} slope {slope}", nc.chart().label());
    }
}

#[test]
fn taylor_tangential_error_on_the_sphere() {
    let exp = CurvatureExpansion::constant(1.0, Signature::euclidean(2));
    let r: f64 = 0.05;
    let g = taylor_metric(&exp, &[r, 0.0]).unwrap();
    assert!((g[(1, 1)] - r.sin().powi(2) / (r * r)).abs() <= 3e-6);
    assert_eq!(taylor_metric(&exp, &[0.0, 0.0]).unwrap(), Signature::euclidean(2).eta());
}

#[test]
fn flat_source_gives_vanishing_connection() {
    let src = ConstantCurvatureSource::new(0.0, Signature::lorentzian(3));
    let rc = integrate_radial(&src, &[0.3, 1.0, -0.2], DEFAULT_STEP).unwrap();
    assert_eq!(rc.final_a().max_abs(), 0.0);
    assert_eq!(rc.final_b().max_abs(), 0.0);
    let origin = integrate_radial(&ConstantCurvatureSource::new(1.0, Signature::euclidean(2)), &[0.0, 0.0], DEFAULT_STEP).unwrap();
    assert_eq!(hypersurface_metric(&origin), Signature::euclidean(2).eta());
}
