use rayon::prelude::*;
use rnc_core::embeddings::hypercone::tangential_sigma;
use rnc_core::embeddings::{hypercone_map, hypercone_pullback, null_residual, PseudoSphereEmbedding};
use rnc_core::fields::{lie_derivative_metric, ScalarField, VectorField};
use rnc_core::metrics::{riemann, Differentiation, MetricChart};
use rnc_core::tensor::{constant_curvature_riemann, matrix_rows, Signature};

use super::{k_name, random_point, relative_diff, sig_name, Context, RIEMANN_STEP};
use crate::report::Record;
use crate::CliError;

/// Sample points per embedded space.
pub const POINTS: usize = 100;
const RADIUS: f64 = 0.5;
/// Finite-difference curvature of the induced metric.
const RIEMANN_TOLERANCE: f64 = 1e-5;
/// Lie derivatives by finite differences.
const LIE_TOLERANCE: f64 = 1e-6;
const PSEUDO_TOPIC: &str = "pseudo-sphere embedding";
const CONE_TOPIC: &str = "null-cone embedding";

fn spaces(ctx: &Context) -> Vec<(f64, Signature)> {
    let mut out = Vec::new();
    for k in ctx.curvatures(&[1.0, -1.0]) {
        for n in ctx.dims(&[3]) {
            for sig in ctx.signatures(n) {
                out.push((k, sig));
            }
        }
    }
    out
}

fn dot(g: &nalgebra::DMatrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| g[(i, j)] * a[i] * b[j]).sum()
}

fn one_pseudo_sphere(ctx: &Context, k: f64, sig: Signature) -> Vec<Record> {
    let tag = format!("{}/{}", k_name(k), sig_name(&sig));
    let id = |s: &str| format!("{tag}/{s}");
    let Ok(e) = PseudoSphereEmbedding::new(k, sig.clone()) else {
        return vec![Record::failed(id("constraint"), PSEUDO_TOPIC, 0.0, ctx.algebraic)];
    };
    let n = sig.dim();
    let chart = e.chart();
    let mut rng = ctx.rng(&tag);
    let points: Vec<Vec<f64>> = (0..POINTS).map(|_| random_point(&mut rng, n, RADIUS)).collect();
    let tangents: Vec<Vec<f64>> = (0..POINTS).map(|_| random_point(&mut rng, n, 1.0)).collect();
    let u: Vec<f64> = random_point(&mut rng, n + 1, 1.0);

    let per_point: Vec<Option<[f64; 5]>> = points
        .par_iter()
        .zip(&tangents)
        .map(|(x, dx)| {
            let constraint = e.constraint_residual(&e.embed_point(x).ok()?);
            let g = e.induced_metric(x).ok()?;
            let closed = relative_diff(&g, &chart.metric(x).ok()?);
            let r = riemann(&e, x, Differentiation::Numeric { step: RIEMANN_STEP }).ok()?;
            let want = constant_curvature_riemann(k, &matrix_rows(&g));
            let curv = r.zip_with(&want, |a, b| a - b).ok()?.max_abs() / want.max_abs();
            let direct = dot(&g, dx, dx);
            let conf = (e.conformal_line_element(x, dx).ok()? - direct).abs() / direct.abs().max(1.0);
            let e2 = e.clone();
            let u2 = u.clone();
            let field = VectorField::new(n, move |y| {
                e2.project_constant_vector(&u2, y).map(|p| p.chart_vector()).unwrap_or_else(|_| vec![f64::NAN; y.len()])
            });
            let p = e.project_constant_vector(&u, x).ok()?;
            let lie = lie_derivative_metric(&e, &field, x).ok()?;
            let lie = (lie - &g * e.projection_lie_factor(&p)).amax();
            Some([constraint, closed, curv, conf, lie])
        })
        .collect();
    let names = ["constraint", "induced-vs-chart", "riemann", "conformal-form", "projection-lie"];
    let tols = [ctx.algebraic, ctx.algebraic, RIEMANN_TOLERANCE, ctx.algebraic, LIE_TOLERANCE];
    let mut records: Vec<Record> = if per_point.iter().any(Option::is_none) {
        names.iter().zip(tols).map(|(s, t)| Record::failed(id(s), PSEUDO_TOPIC, 0.0, t)).collect()
    } else {
        (0..5)
            .map(|c| {
                let worst = per_point.iter().flatten().map(|v| v[c]).fold(0.0, f64::max);
                Record::at_most(id(names[c]), PSEUDO_TOPIC, worst, tols[c])
            })
            .collect()
    };

    // at the base point the frame form reduces to η
    let origin = vec![0.0; n];
    let frame = e.frame_jacobian(&origin).map(|j| {
        let eta = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n + 1, |i, _| e.ambient_signature().eps(i)));
        let flat = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| sig.eps(i)));
        (j.transpose() * eta * j - flat).amax()
    });
    records.push(match frame {
        Ok(v) => Record::at_most(id("frame-at-origin"), PSEUDO_TOPIC, v, ctx.algebraic),
        Err(_) => Record::failed(id("frame-at-origin"), PSEUDO_TOPIC, 0.0, ctx.algebraic),
    });
    records
}

pub(super) fn pseudo_sphere(ctx: &Context) -> Result<Vec<Record>, CliError> {
    let mut records: Vec<Record> =
        spaces(ctx).into_par_iter().flat_map_iter(|(k, sig)| one_pseudo_sphere(ctx, k, sig)).collect();
    // a hand-computed point on the unit sphere
    let spot = PseudoSphereEmbedding::new(1.0, Signature::euclidean(2))
        .and_then(|e| e.induced_metric(&[0.3, 0.0]))
        .map(|g| g[(0, 0)]);
    let want = 1.0 / 0.91;
    records.push(match spot {
        Ok(v) => Record::within("spot/g11", PSEUDO_TOPIC, v, want, 1e-6),
        Err(_) => Record::failed("spot/g11", PSEUDO_TOPIC, want, 1e-6),
    });
    Ok(records)
}

/// Conformal factors whose pullback has a known value.
fn sigma_fields(sig: &Signature) -> Vec<(&'static str, ScalarField)> {
    let s = sig.clone();
    vec![
        ("zero", ScalarField::constant(0.0)),
        ("constant", ScalarField::constant(0.7).with_gradient(|z| vec![0.0; z.len()])),
        (
            "quadratic",
            ScalarField::new(move |z| 0.1 * s.dot(z, z)).with_gradient({
                let s = sig.clone();
                move |z| z.iter().enumerate().map(|(i, v)| 0.2 * s.eps(i) * v).collect()
            }),
        ),
        ("sphere", tangential_sigma(1.0, sig.clone())),
        ("hyperbolic", tangential_sigma(-1.0, sig.clone())),
    ]
}

fn one_cone(ctx: &Context, sig: Signature) -> Vec<Record> {
    let n = sig.dim();
    let ambient = sig.extended(&[1, -1]);
    let tag = sig_name(&sig);
    let mut rng = ctx.rng(&format!("cone/{tag}"));
    let points: Vec<Vec<f64>> = (0..POINTS).map(|_| random_point(&mut rng, n, 1.0)).collect();
    let tangents: Vec<Vec<f64>> = (0..POINTS).map(|_| random_point(&mut rng, n, 1.0)).collect();
    let mut records = Vec::new();
    for (name, sigma) in sigma_fields(&sig) {
        let id = |s: &str| format!("{tag}/{name}/{s}");
        // the same field without its gradient, for the difference quotient
        let bare = {
            let s = sigma.clone();
            ScalarField::new(move |z| s.eval(z))
        };
        let mut null = 0.0_f64;
        let mut analytic = 0.0_f64;
        let mut numeric = 0.0_f64;
        let mut broken = false;
        for (z, dz) in points.iter().zip(&tangents) {
            let want = (2.0 * sigma.eval(z)).exp() * sig.dot(dz, dz);
            let scale = want.abs().max((2.0 * sigma.eval(z)).exp() * dz.iter().map(|v| v * v).sum::<f64>());
            match (
                hypercone_map(&sig, &sigma, z),
                hypercone_pullback(&sig, &sigma, z, dz),
                hypercone_pullback(&sig, &bare, z, dz),
            ) {
                (Ok(y), Ok(a), Ok(f)) if want.is_finite() => {
                    null = null.max(null_residual(&ambient, &y));
                    analytic = analytic.max((a - want).abs() / scale);
                    numeric = numeric.max((f - want).abs() / scale);
                }
                _ => broken = true,
            }
        }
        if broken {
            records.push(Record::failed(id("null"), CONE_TOPIC, 0.0, ctx.algebraic));
            continue;
        }
        records.push(Record::at_most(id("null"), CONE_TOPIC, null, ctx.algebraic));
        if name == "zero" {
            records.push(Record::at_most(id("pullback"), CONE_TOPIC, analytic, ctx.algebraic));
        } else {
            records.push(Record::at_most(id("pullback"), CONE_TOPIC, analytic, 1e-8));
            records.push(Record::at_most(id("pullback-differenced"), CONE_TOPIC, numeric, 1e-5));
        }
    }
    records
}

pub(super) fn hypercone(ctx: &Context) -> Result<Vec<Record>, CliError> {
    let mut sigs = Vec::new();
    for n in ctx.dims(&[2, 3, 4]) {
        sigs.extend(ctx.signatures(n));
    }
    let mut records: Vec<Record> = sigs.into_par_iter().flat_map_iter(|s| one_cone(ctx, s)).collect();
    let sig = Signature::euclidean(2);
    let y = hypercone_map(&sig, &ScalarField::constant(0.0), &[1.0, 0.0]).unwrap_or_default();
    let ok = y == [1.0, 0.0, 0.75, 1.25];
    records.push(Record::exact("example/unit-point", CONE_TOPIC, f64::from(u8::from(ok)), 1.0));
    Ok(records)
}
