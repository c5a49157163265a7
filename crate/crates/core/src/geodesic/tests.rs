use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::metrics::{FlatChart, PseudoSphereChart, StereographicChart};
use crate::tensor::Signature;

fn sphere_at_origin() -> NormalChart<StereographicChart> {
    NormalChart::new(StereographicChart::new(1.0, Signature::euclidean(2)), &[0.0, 0.0]).unwrap()
}

/// Origin on the equator, so the projection pole is off every scanned ray.
fn sphere_at_equator() -> NormalChart<StereographicChart> {
    NormalChart::new(StereographicChart::new(1.0, Signature::euclidean(2)), &[2.0, 0.0]).unwrap()
}

fn state(x: &[f64], v: &[f64]) -> GeodesicState {
    GeodesicState {
        t: 0.0,
        x: x.to_vec(),
        v: v.to_vec(),
    }
}

#[test]
fn flat_geodesic_is_straight() {
    let flat = FlatChart::new(Signature::euclidean(2));
    let path = integrate_geodesic(&flat, &state(&[0.0, 0.0], &[1.0, 0.0]), 1.0, 1e-3).unwrap();
    assert!(!path.exited);
    let x = &path.last().x;
    assert!((x[0] - 1.0).abs() < 1e-12 && x[1] == 0.0, "{x:?}");
    assert_eq!(path.last().t, 1.0);
}

#[test]
fn great_circle_returns_after_two_pi() {
    let chart = StereographicChart::new(1.0, Signature::euclidean(2));
    // g = I/4 at (2, 0): unit speed is coordinate speed 2
    let x0 = [2.0, 0.0];
    let v0 = [0.0, 2.0];
    assert!((norm_squared(&chart, &x0, &v0).unwrap() - 1.0).abs() < 1e-15);
    let path = integrate_geodesic(&chart, &state(&x0, &v0), 2.0 * PI, 1e-3).unwrap();
    let end = &path.last().x;
    let miss = ((end[0] - x0[0]).powi(2) + (end[1] - x0[1]).powi(2)).sqrt();
    assert!(miss < 1e-6, "{miss}");
}

#[test]
fn pseudo_sphere_chart_ends_at_the_equator() {
    let chart = PseudoSphereChart::new(1.0, Signature::euclidean(2));
    let path = integrate_geodesic(&chart, &state(&[0.0, 0.0], &[1.0, 0.0]), 2.0 * PI, 1e-3).unwrap();
    assert!(path.exited);
    assert!((path.last().t - PI / 2.0).abs() < 1e-2);
}

#[test]
fn energy_is_conserved() {
    let charts: Vec<Box<dyn MetricChart>> = vec![
        Box::new(PseudoSphereChart::new(-1.0, Signature::euclidean(2))),
        Box::new(PseudoSphereChart::new(1.0, Signature::euclidean(3))),
        Box::new(PseudoSphereChart::new(1.0, Signature::lorentzian(3))),
        Box::new(StereographicChart::new(-1.0, Signature::lorentzian(3))),
        Box::new(StereographicChart::new(1.0, Signature::euclidean(4))),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for chart in &charts {
        let n = chart.dim();
        for _ in 0..5 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.2..0.2)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let e0 = norm_squared(chart, &x, &v).unwrap();
            let path = integrate_geodesic(chart, &state(&x, &v), 1.0, 1e-3).unwrap();
            assert!(!path.exited);
            let last = path.last();
            let e1 = norm_squared(chart, &last.x, &last.v).unwrap();
            let drift = (e1 - e0).abs() / e0.abs().max(1e-12);
            assert!(drift <= 1e-8, "{} drift {drift}", chart.label());
        }
    }
}

#[test]
fn fourth_order_convergence() {
    let chart = StereographicChart::new(1.0, Signature::euclidean(2));
    let s = state(&[0.1, -0.2], &[0.9, 0.7]);
    let end = |h: f64| integrate_geodesic(&chart, &s, 2.0, h).unwrap().last().x.clone();
    let reference = end(0.025 / 4.0);
    let err = |h: f64| {
        let x = end(h);
        ((x[0] - reference[0]).powi(2) + (x[1] - reference[1]).powi(2)).sqrt()
    };
    let ratio = err(0.05) / err(0.025);
    assert!(ratio >= 14.0, "{ratio}");
}

#[test]
fn bad_step_is_rejected() {
    let flat = FlatChart::new(Signature::euclidean(2));
    assert!(integrate_geodesic(&flat, &state(&[0.0, 0.0], &[1.0, 0.0]), 1.0, 0.0).is_err());
}

#[test]
fn exp_basics() {
    let nc = sphere_at_origin();
    assert_eq!(nc.exp_map(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    // stereographic radius of geodesic distance r is 2 tan(r/2)
    let p = nc.exp_map(&[PI / 2.0, 0.0]).unwrap();
    assert!((p[0] - 2.0).abs() < 1e-8 && p[1].abs() < 1e-12, "{p:?}");
    let path = integrate_geodesic(nc.chart(), &state(&[0.0, 0.0], &nc.initial_velocity(&[PI / 2.0, 0.0])), 1.0, 1e-3).unwrap();
    let mut length = 0.0;
    for w in path.states.windows(2) {
        // trapezoid rule; the speed is constant so this is exact up to drift
        let s0 = norm_squared(nc.chart(), &w[0].x, &w[0].v).unwrap().sqrt();
        let s1 = norm_squared(nc.chart(), &w[1].x, &w[1].v).unwrap().sqrt();
        length += 0.5 * (s0 + s1) * (w[1].t - w[0].t);
    }
    assert!((length - PI / 2.0).abs() < 1e-8, "{length}");

    let flat = NormalChart::new(FlatChart::new(Signature::lorentzian(2)), &[1.0, -1.0]).unwrap();
    let p = flat.exp_map(&[0.3, 0.4]).unwrap();
    assert!((p[0] - 1.3).abs() < 1e-12 && (p[1] + 0.6).abs() < 1e-12, "{p:?}");
}

#[test]
fn exp_derivative_at_origin_is_frame() {
    let nc = NormalChart::new(PseudoSphereChart::new(-1.0, Signature::lorentzian(3)), &[0.1, 0.2, -0.1]).unwrap();
    let d = 1e-6;
    let e = nc.frame().frame_vectors();
    for a in 0..3 {
        let mut v = vec![0.0; 3];
        v[a] = d;
        let p = nc.exp_map(&v).unwrap();
        v[a] = -d;
        let m = nc.exp_map(&v).unwrap();
        for i in 0..3 {
            assert!(((p[i] - m[i]) / (2.0 * d) - e[(i, a)]).abs() < 1e-6);
        }
    }
}

#[test]
fn variational_jacobian_matches_differences() {
    let nc = sphere_at_origin();
    let v = [1.1, -0.4];
    let (x, jac) = nc.exp_with_jacobian(&v).unwrap();
    assert_eq!(x, nc.exp_map(&v).unwrap());
    let d = 1e-6;
    for a in 0..2 {
        let mut vp = v.to_vec();
        let mut vm = v.to_vec();
        vp[a] += d;
        vm[a] -= d;
        let (p, m) = (nc.exp_map(&vp).unwrap(), nc.exp_map(&vm).unwrap());
        for i in 0..2 {
            assert!(((p[i] - m[i]) / (2.0 * d) - jac[(i, a)]).abs() < 1e-7);
        }
    }
}

#[test]
fn log_inverts_exp_on_the_sphere() {
    let nc = sphere_at_origin();
    assert_eq!(nc.log_map(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    assert!(nc.guard().min_radius() >= 2.5, "{}", nc.guard().min_radius());
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..50 {
        let r = rng.gen_range(0.0..2.5);
        let a = rng.gen_range(0.0..2.0 * PI);
        let v = [r * a.cos(), r * a.sin()];
        let back = nc.log_map(&nc.exp_map(&v).unwrap()).unwrap();
        let err = ((back[0] - v[0]).powi(2) + (back[1] - v[1]).powi(2)).sqrt();
        assert!(err < 1e-8, "v={v:?} err={err}");
    }
}

#[test]
fn log_refuses_points_past_the_guard() {
    let nc = sphere_at_equator();
    let dir = [(0.3f64).cos(), (0.3f64).sin()];
    // beyond the conjugate point at π
    let p = nc.exp_unguarded(&[3.5 * dir[0], 3.5 * dir[1]]).unwrap();
    match nc.log_map(&p) {
        Err(GeomError::BeyondGuard { .. }) | Err(GeomError::NoConvergence { .. }) => {}
        other => panic!("expected refusal, got {other:?}"),
    }
    assert!(matches!(nc.exp_map(&[3.5, 0.0]), Err(GeomError::BeyondGuard { .. })));
}

#[test]
fn pullback_at_origin_is_flat() {
    let nc = NormalChart::new(StereographicChart::new(-1.0, Signature::lorentzian(3)), &[0.1, 0.0, 0.2]).unwrap();
    let g = nc.pullback_metric(&[0.0; 3]).unwrap();
    assert!((g - nc.eta()).amax() < 1e-8);
}

#[test]
fn pullback_tangential_coefficient() {
    let nc = sphere_at_origin();
    let r: f64 = 0.7;
    let g = nc.pullback_metric(&[r, 0.0]).unwrap();
    let expected = r.sin().powi(2) / (r * r);
    assert!((g[(1, 1)] - expected).abs() < 1e-6, "{} vs {expected}", g[(1, 1)]);
    assert!((g[(0, 0)] - 1.0).abs() < 1e-7);
    assert!(g[(0, 1)].abs() < 1e-7);
}

#[test]
fn gauss_lemma() {
    let charts: Vec<(Box<dyn MetricChart>, Vec<f64>)> = vec![
        (Box::new(StereographicChart::new(1.0, Signature::euclidean(2))), vec![0.3, -0.1]),
        (Box::new(PseudoSphereChart::new(-1.0, Signature::euclidean(2))), vec![0.2, 0.2]),
        (Box::new(PseudoSphereChart::new(1.0, Signature::lorentzian(2))), vec![0.1, 0.0]),
    ];
    for (chart, origin) in charts {
        let label = chart.label();
        let nc = NormalChart::new(chart, &origin).unwrap();
        let eta = nc.eta();
        for k in 0..20 {
            let a = (k as f64 + 0.25) * 2.0 * PI / 20.0;
            let dir = [a.cos(), a.sin()];
            let guard = nc.guard_radius(&dir);
            for i in 1..=10 {
                let r = 0.8 * guard * i as f64 / 10.0;
                let v = [r * dir[0], r * dir[1]];
                let g = nc.pullback_metric(&v).unwrap();
                let vv = DMatrix::from_row_slice(2, 1, &dir);
                let radial = (vv.transpose() * &g * &vv)[(0, 0)];
                let flat = (vv.transpose() * &eta * &vv)[(0, 0)];
                assert!((radial - flat).abs() <= 1e-7, "{label} dir {k} r {r}: {radial} vs {flat}");
            }
        }
    }
}

#[test]
fn conjugate_points() {
    let flat = NormalChart::new(FlatChart::new(Signature::euclidean(2)), &[0.0, 0.0]).unwrap();
    let scan = conjugate_scan(&flat, &[0.6, 0.8], 20.0).unwrap();
    assert_eq!(scan, ConjugateScan { distance: None, exit: None });

    let sphere = sphere_at_equator();
    for (dir, c) in sphere.guard().directions.iter().zip(&sphere.guard().conjugate) {
        let t = c.unwrap_or_else(|| panic!("no conjugate point along {dir:?}"));
        assert!((t - PI).abs() < 1e-3, "{dir:?}: {t}");
    }

    let hyperbolic = NormalChart::new(PseudoSphereChart::new(-1.0, Signature::euclidean(2)), &[0.0, 0.0]).unwrap();
    for k in 0..8 {
        let a = k as f64 * PI / 4.0;
        let scan = conjugate_scan(&hyperbolic, &[a.cos(), a.sin()], 10.0).unwrap();
        assert_eq!(scan.distance, None);
    }
}

#[test]
fn even_multiplicity_conjugate_point() {
    let sphere = NormalChart::new(StereographicChart::new(1.0, Signature::euclidean(3)), &[2.0, 0.0, 0.0]).unwrap();
    let scan = conjugate_scan(&sphere, &[0.0, 0.6, 0.8], 2.0 * PI).unwrap();
    let t = scan.distance.expect("conjugate point");
    assert!((t - PI).abs() < 1e-3, "{t}");
}

#[test]
fn transport_preserves_inner_products() {
    let chart = PseudoSphereChart::new(1.0, Signature::euclidean(3));
    let x0 = [0.1, 0.0, 0.05];
    let v0 = [0.3, 0.2, -0.1];
    let frame = [1.0, 0.2, 0.0, 0.0, 1.0, 0.1, 0.3, 0.0, 1.0];
    let samples = parallel_transport(&chart, &x0, &v0, &frame, 1.0, 1e-2).unwrap();
    let gram = |s: &TransportedFrame| {
        let g = chart.metric(&s.x).unwrap();
        let p = DMatrix::from_row_slice(3, 3, &s.frame);
        p.transpose() * g * p
    };
    let g0 = gram(&samples[0]);
    let g1 = gram(samples.last().unwrap());
    assert!((g0 - g1).amax() < 1e-9);
    assert_eq!(samples.len(), 201);
}
