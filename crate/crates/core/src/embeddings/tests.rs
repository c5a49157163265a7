use nalgebra::{DMatrix, DVector};
use num_rational::Rational64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hypercone::tangential_sigma;
use super::killing::{generator_fields, linear_field};
use super::*;
use crate::fields::{lie_bracket, lie_derivative_metric, ScalarField, VectorField};
use crate::metrics::{riemann, Differentiation, FlatChart, MetricChart};
use crate::tensor::{constant_curvature_riemann, matrix_rows, Signature};

fn sample_points(rng: &mut ChaCha8Rng, n: usize, radius: f64, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(-radius..radius)).collect()).collect()
}

#[test]
fn origin_maps_to_pole() {
    let e = PseudoSphereEmbedding::new(1.0, Signature::euclidean(3)).unwrap();
    assert_eq!(e.embed_point(&[0.0; 3]).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
    assert_eq!(e.induced_metric(&[0.0; 3]).unwrap(), DMatrix::identity(3, 3));
}

#[test]
fn sphere_point_and_metric() {
    let e = PseudoSphereEmbedding::new(1.0, Signature::euclidean(2)).unwrap();
    let p = e.embed_point(&[0.3, 0.0]).unwrap();
    assert_eq!(p[..2], [0.3, 0.0]);
    assert!((p[2] - 0.91f64.sqrt()).abs() < 1e-15);
    assert!(e.constraint_residual(&p) <= 1e-12);
    let g = e.induced_metric(&[0.3, 0.0]).unwrap();
    assert!((g[(0, 0)] - 1.0 / 0.91).abs() < 1e-12);
    assert!((g[(0, 0)] - 1.098901).abs() < 1e-6);
    assert_eq!(g[(0, 1)], 0.0);
    assert!((g[(1, 1)] - 1.0).abs() < 1e-15);
}

#[test]
fn hyperbolic_constraint_and_rejections() {
    let e = PseudoSphereEmbedding::new(-1.0, Signature::euclidean(2)).unwrap();
    let p = e.embed_point(&[0.6, -1.2]).unwrap();
    assert!(e.constraint_residual(&p) <= 1e-15);
    let s = PseudoSphereEmbedding::new(1.0, Signature::euclidean(2)).unwrap();
    assert!(matches!(s.embed_point(&[1.0, 0.2]), Err(GeomError::OutsideValidity { .. })));
    assert!(PseudoSphereEmbedding::new(0.0, Signature::euclidean(2)).is_err());
}

use crate::error::GeomError;

#[test]
fn induced_metric_matches_closed_chart() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (k, sig) in [
        (1.0, Signature::euclidean(3)),
        (-1.0, Signature::euclidean(3)),
        (1.0, Signature::lorentzian(3)),
        (-0.5, Signature::lorentzian(4)),
    ] {
        let e = PseudoSphereEmbedding::new(k, sig.clone()).unwrap();
        let closed = e.chart();
        for x in sample_points(&mut rng, sig.dim(), 0.5, 30) {
            let d = e.induced_metric(&x).unwrap() - closed.metric(&x).unwrap();
            assert!(d.amax() < 1e-12, "{k} {x:?}");
            assert!(e.constraint_residual(&e.embed_point(&x).unwrap()) <= 1e-12);
        }
    }
}

#[test]
fn conformal_line_element_matches_quadratic_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (k, sig) in [(1.0, Signature::euclidean(3)), (-1.0, Signature::lorentzian(3))] {
        let e = PseudoSphereEmbedding::new(k, sig.clone()).unwrap();
        let x = [0.2, -0.3, 0.1];
        for dx in sample_points(&mut rng, 3, 1.0, 20) {
            let g = e.induced_metric(&x).unwrap();
            let v = DVector::from_vec(dx.clone());
            let direct = (v.transpose() * g * &v)[(0, 0)];
            let conf = e.conformal_line_element(&x, &dx).unwrap();
            assert!((direct - conf).abs() <= 1e-10 * direct.abs().max(1.0), "{direct} {conf}");
        }
    }
}

#[test]
fn induced_riemann_has_constant_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (k, sig) in [(1.0, Signature::euclidean(3)), (-1.0, Signature::lorentzian(3))] {
        let e = PseudoSphereEmbedding::new(k, sig.clone()).unwrap();
        for x in sample_points(&mut rng, 3, 0.4, 10) {
            let r = riemann(&e, &x, Differentiation::Numeric { step: 1e-4 }).unwrap();
            let g = e.induced_metric(&x).unwrap();
            let want = constant_curvature_riemann(k, &matrix_rows(&g));
            let err = r.zip_with(&want, |a, b| a - b).unwrap().max_abs();
            assert!(err <= 1e-5 * want.max_abs(), "{err}");
        }
    }
}

#[test]
fn projection_at_pole() {
    let e = PseudoSphereEmbedding::new(1.0, Signature::euclidean(2)).unwrap();
    let p = e.project_constant_vector(&[0.0, 0.0, 1.0], &[0.0, 0.0]).unwrap();
    assert!(p.tangent.iter().all(|v| v.abs() < 1e-15));
    let p = e.project_constant_vector(&[1.0, 0.0, 0.0], &[0.0, 0.0]).unwrap();
    assert_eq!(p.tangent, vec![1.0, 0.0, 0.0]);
}

#[test]
fn projected_vector_scales_the_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (k, sig) in [(1.0, Signature::euclidean(2)), (-1.0, Signature::euclidean(3)), (1.0, Signature::lorentzian(3))] {
        let e = PseudoSphereEmbedding::new(k, sig.clone()).unwrap();
        let n = sig.dim();
        let u: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let e2 = e.clone();
        let u2 = u.clone();
        let field = VectorField::new(n, move |x| e2.project_constant_vector(&u2, x).unwrap().chart_vector());
        for x in sample_points(&mut rng, n, 0.4, 20) {
            let p = e.project_constant_vector(&u, &x).unwrap();
            let normal: Vec<f64> = e.frame_point(&x).unwrap().iter().map(|v| v * k.abs().sqrt()).collect();
            assert!(e.ambient_signature().dot(&p.tangent, &normal).abs() <= 1e-13);
            let lie = lie_derivative_metric(&e, &field, &x).unwrap();
            let want = e.induced_metric(&x).unwrap() * e.projection_lie_factor(&p);
            assert!((lie - want).amax() <= 1e-6);
        }
    }
}

fn int(v: i64) -> Rational64 {
    Rational64::from_integer(v)
}

#[test]
fn self_commutator_vanishes() {
    let gs = generators(&Signature::euclidean(3));
    let l = gs.get(0, 1);
    assert!((&l * &l - &l * &l).iter().all(|z| z.is_zero()));
}

#[test]
fn one_commutator_by_hand() {
    // [L₁₂, L₂₃] = i η₂₂ L₁₃, from the matrix units directly
    for sig in [Signature::euclidean(3), Signature::pq(1, 2), Signature::pq(2, 1)] {
        let gs = generators(&sig);
        let lhs = gs.get(0, 1) * gs.get(1, 2) - gs.get(1, 2) * gs.get(0, 1);
        let eta22 = i64::from(sig.entries()[1]);
        let rhs = gs.get(0, 2).map(|z| z * num_complex::Complex::new(int(0), int(eta22)));
        assert_eq!(lhs, rhs);
        assert_eq!(gs.structure_rhs((0, 1), (1, 2)), rhs);
    }
}

#[test]
fn generators_are_pseudo_antisymmetric() {
    let sig = Signature::pq(2, 3);
    let gs = generators(&sig);
    let eta = sig.eta();
    for &(a, b) in gs.pairs() {
        let m = gs.real_matrix(a, b);
        let em = &eta * m;
        assert_eq!(em.transpose(), -em);
        assert_eq!(gs.get(b, a), gs.get(a, b).map(|z| -z));
    }
}

#[test]
fn lorentz_table_is_exact() {
    let gs = generators(&Signature::pq(1, 3));
    let table = gs.commutator_table();
    assert_eq!(table.len(), 15);
    assert!(table.iter().all(|e| e.exact && e.deviation == 0.0));
}

#[test]
fn every_small_signature_closes() {
    for m in 2..=5 {
        for p in 0..=m {
            let gs = generators(&Signature::pq(p, m - p));
            assert!(gs.commutator_table().iter().all(|e| e.exact), "p={p} m={m}");
            let scaled = gs.scaled(Rational64::new(3, 2));
            assert!(scaled.commutator_table().iter().all(|e| e.exact));
        }
    }
}

#[test]
fn rotation_casimir_is_scalar() {
    let gs = generators(&Signature::euclidean(3));
    let rep = casimir_check(&gs);
    assert!(rep.exact);
    assert_eq!(rep.max_commutator_norm, 0.0);
    // the full double sum counts each plane twice
    let four = ExactMatrix::identity(3, 3).map(|z| z * num_complex::Complex::new(int(4), int(0)));
    assert_eq!(rep.casimir, four);
}

#[test]
fn casimir_commutes_for_indefinite_and_scaled_sets() {
    let gs = generators(&Signature::pq(1, 2));
    assert!(casimir_check(&gs).exact);
    let lambda = Rational64::new(-5, 3);
    let scaled = casimir_check(&gs.scaled(lambda));
    assert!(scaled.exact);
    let base = casimir_check(&gs).casimir;
    let l2 = num_complex::Complex::new(lambda * lambda, int(0));
    assert_eq!(scaled.casimir, base.map(|z| z * l2));
}

#[test]
fn rotation_is_killing_on_flat_space() {
    let flat = FlatChart::new(Signature::euclidean(3));
    let rot = VectorField::new(3, |x| vec![-x[1], x[0], 0.0]).with_jacobian(|_| {
        DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    });
    let pts = vec![vec![0.3, -1.0, 2.0], vec![5.0, 1.0, 0.0]];
    let rep = killing_residual(&flat, &rot, &pts).unwrap();
    assert!(rep.max_residual <= 1e-12);
    assert_eq!((rep.evaluated, rep.skipped), (2, 0));
}

#[test]
fn stretching_field_is_not_killing() {
    let flat = FlatChart::new(Signature::euclidean(2));
    let f = VectorField::new(2, |x| vec![x[0], 0.0]);
    let rep = killing_residual(&flat, &f, &[vec![0.4, 0.1]]).unwrap();
    assert!((rep.max_residual - 2.0).abs() < 1e-9);
}

#[test]
fn pseudo_sphere_generators_are_killing() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (k, sig) in [(1.0, Signature::euclidean(3)), (-1.0, Signature::euclidean(3)), (-1.0, Signature::lorentzian(3))] {
        let e = PseudoSphereEmbedding::new(k, sig.clone()).unwrap();
        let chart = e.chart();
        let mut pts = sample_points(&mut rng, 3, 0.5, 50);
        pts.push(vec![2.0, 0.0, 0.0]);
        let fields = generator_fields(&e);
        assert_eq!(fields.len(), 6);
        for f in &fields {
            let rep = killing_residual(&chart, f, &pts).unwrap();
            assert!(rep.max_residual <= 1e-8, "{}", rep.max_residual);
            if k > 0.0 {
                assert_eq!(rep.skipped, 1);
            }
        }
    }
}

#[test]
fn field_bracket_follows_matrix_commutator() {
    let e = PseudoSphereEmbedding::new(1.0, Signature::euclidean(3)).unwrap();
    let gs = generators(e.ambient_signature());
    let chart = e.chart();
    let x = [0.1, 0.25, -0.2];
    for &(a, b) in gs.pairs() {
        for &(c, d) in gs.pairs() {
            let ma = gs.real_matrix(a, b);
            let mb = gs.real_matrix(c, d);
            let bracket = lie_bracket(&linear_field(&e, ma.clone()), &linear_field(&e, mb.clone()));
            let want = linear_field(&e, -(&ma * &mb - &mb * &ma));
            let diff: f64 = bracket.eval(&x).iter().zip(want.eval(&x)).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            assert!(diff < 1e-12);
            let lie = lie_derivative_metric(&chart, &VectorField::new(3, move |y| bracket.eval(y)), &x).unwrap();
            assert!(lie.amax() <= 1e-6);
        }
    }
}

#[test]
fn invariant_tensors_of_the_sphere() {
    let e = PseudoSphereEmbedding::new(1.0, Signature::euclidean(3)).unwrap();
    let chart = e.chart();
    let fields = generator_fields(&e);
    let x0 = [0.2, -0.1, 0.3];
    let anti = invariant_tensor_solve(&chart, &fields, TensorSymmetry::Antisymmetric, &x0, 3, 1).unwrap();
    assert_eq!(anti.dim(), 0);
    assert!(anti.gap >= 1e6);
    let sym = invariant_tensor_solve(&chart, &fields, TensorSymmetry::Symmetric, &x0, 3, 1).unwrap();
    assert_eq!(sym.dim(), 1);
    assert!(sym.gap >= 1e6);
    assert!(sym.cosine_with(&chart.metric(&x0).unwrap()).unwrap() >= 1.0 - 1e-8);
    assert_eq!(sym.isotropy_dim, 3);
}

#[test]
fn plane_keeps_its_area_form() {
    let e = PseudoSphereEmbedding::new(-1.0, Signature::euclidean(2)).unwrap();
    let chart = e.chart();
    let x0 = [0.3, 0.4];
    let sol = invariant_tensor_solve(&chart, &generator_fields(&e), TensorSymmetry::Antisymmetric, &x0, 3, 2).unwrap();
    assert_eq!(sol.dim(), 1);
    let all = invariant_tensor_solve(&chart, &generator_fields(&e), TensorSymmetry::Unconstrained, &x0, 3, 2).unwrap();
    assert_eq!(all.dim(), 2);
}

#[test]
fn four_dimensional_two_forms_vanish() {
    for sig in [Signature::euclidean(4), Signature::lorentzian(4)] {
        let e = PseudoSphereEmbedding::new(1.0, sig).unwrap();
        let sol = invariant_tensor_solve(&e.chart(), &generator_fields(&e), TensorSymmetry::Antisymmetric, &[0.1, 0.2, 0.0, -0.1], 3, 4)
            .unwrap();
        assert_eq!(sol.dim(), 0);
    }
}

#[test]
fn undersampled_system_is_refused() {
    let e = PseudoSphereEmbedding::new(1.0, Signature::euclidean(3)).unwrap();
    let fields = generator_fields(&e);
    let r = invariant_tensor_solve(&e.chart(), &fields, TensorSymmetry::Symmetric, &[0.0; 3], 2, 0);
    assert!(matches!(r, Err(GeomError::InsufficientSampling { equations: 12, unknowns: 6 })));
    // translations alone fix no point
    let flat = FlatChart::new(Signature::euclidean(2));
    let tr = vec![VectorField::new(2, |_| vec![1.0, 0.0]), VectorField::new(2, |_| vec![0.0, 1.0])];
    let r = invariant_tensor_solve(&flat, &tr, TensorSymmetry::Symmetric, &[0.0; 2], 5, 0);
    assert!(matches!(r, Err(GeomError::InsufficientSampling { equations: 0, .. })));
}

#[test]
fn hypercone_examples() {
    let sig = Signature::euclidean(2);
    let zero = ScalarField::constant(0.0);
    let y = hypercone_map(&sig, &zero, &[1.0, 0.0]).unwrap();
    assert_eq!(y, vec![1.0, 0.0, 0.75, 1.25]);
    let amb = sig.extended(&[1, -1]);
    assert_eq!(amb.dot(&y, &y), 0.0);
    assert_eq!(hypercone_map(&sig, &zero, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0, -0.25, 0.25]);
    let sphere = HyperconeEmbedding::new(sig.clone(), tangential_sigma(1.0, sig.clone()));
    assert!(null_residual(&amb, &sphere.map(&[0.5, 0.2]).unwrap()) <= 1e-12);
}

#[test]
fn hypercone_pullback_examples() {
    let sig = Signature::lorentzian(3);
    let dz = [0.3, 1.0, -0.4];
    let z = [0.2, 0.1, 0.5];
    let flat = hypercone_pullback(&sig, &ScalarField::constant(0.0), &z, &dz).unwrap();
    assert!((flat - sig.dot(&dz, &dz)).abs() <= 1e-15);
    let c = 0.7;
    let scaled = hypercone_pullback(&sig, &ScalarField::constant(c), &z, &dz).unwrap();
    assert!((scaled - (2.0 * c).exp() * sig.dot(&dz, &dz)).abs() <= 1e-12);
}

#[test]
fn sphere_factor_pulls_back_exactly() {
    let sig = Signature::euclidean(2);
    let sigma = tangential_sigma(1.0, sig.clone());
    let plain = {
        let s = sigma.clone();
        ScalarField::new(move |z| s.eval(z))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let amb = sig.extended(&[1, -1]);
    for _ in 0..50 {
        let z: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.2..1.2)).collect();
        let dz: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let want = (2.0 * sigma.eval(&z)).exp() * sig.dot(&dz, &dz);
        let got = hypercone_pullback(&sig, &sigma, &z, &dz).unwrap();
        assert!((got - want).abs() <= 1e-8 * want.abs());
        let fd = hypercone_pullback(&sig, &plain, &z, &dz).unwrap();
        assert!((fd - want).abs() <= 1e-5 * want.abs());
        assert!(null_residual(&amb, &hypercone_map(&sig, &sigma, &z).unwrap()) <= 1e-12);
    }
}

#[test]
fn sigma_gradient_agrees_with_differences() {
    // crossing the series cutoff on both sides
    for k in [1.0, -1.0] {
        let sigma = tangential_sigma(k, Signature::lorentzian(3));
        for z in [[0.1, 0.2, 0.3], [1.0, 0.3, 0.2], [0.2, 1.1, 0.4], [0.3, 0.1, 0.9]] {
            let a = sigma.gradient(&z);
            let h = 1e-6;
            for i in 0..3 {
                let mut p = z.to_vec();
                let mut m = z.to_vec();
                p[i] += h;
                m[i] -= h;
                let fd = (sigma.eval(&p) - sigma.eval(&m)) / (2.0 * h);
                assert!((a[i] - fd).abs() < 1e-7, "{k} {z:?} {i}: {} {fd}", a[i]);
            }
        }
    }
}

