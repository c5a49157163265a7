use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::Rational64;
use rayon::prelude::*;
use rnc_core::embeddings::killing::{generator_fields, linear_field};
use rnc_core::embeddings::{
    casimir_check, generators, invariant_tensor_solve, killing_residual, PseudoSphereEmbedding, TensorSymmetry,
};
use rnc_core::fields::{lie_bracket, lie_derivative_metric, VectorField};
use rnc_core::metrics::MetricChart;
use rnc_core::tensor::Signature;

use super::{k_name, random_point, sig_name, Context};
use crate::report::{Record, PLUMBING};
use crate::CliError;

const ALGEBRA_TOPIC: &str = "so(p,q) commutation relations";
const KILLING_TOPIC: &str = "pseudo-sphere isometries";
const INVARIANT_TOPIC: &str = "invariant tensors";
/// Killing residual of the generator fields.
pub const KILLING_TOLERANCE: f64 = 1e-8;
/// Lie derivatives by finite differences.
const LIE_TOLERANCE: f64 = 1e-6;
pub const KILLING_POINTS: usize = 50;
/// Smallest acceptable ratio across the nullspace cut.
pub const MIN_GAP: f64 = 1e6;

fn flag(b: bool) -> f64 {
    f64::from(u8::from(b))
}

fn one_algebra(p: usize, q: usize) -> Vec<Record> {
    let tag = format!("so({p},{q})");
    let gs = generators(&Signature::pq(p, q));
    let m = p + q;
    let inexact = |g: &rnc_core::embeddings::GeneratorSet| g.commutator_table().iter().filter(|e| !e.exact).count();
    let lambda = Rational64::new(3, 2);
    let scaled = gs.scaled(lambda);
    let base = casimir_check(&gs);
    let sc = casimir_check(&scaled);
    let l2 = Complex::new(lambda * lambda, Rational64::from_integer(0));
    let casimir_scales = sc.casimir == base.casimir.map(|z| z * l2);
    vec![
        Record::exact(format!("{tag}/generators"), PLUMBING, gs.len() as f64, (m * (m - 1) / 2) as f64),
        Record::exact(format!("{tag}/inexact-commutators"), ALGEBRA_TOPIC, inexact(&gs) as f64, 0.0),
        Record::exact(format!("{tag}/inexact-scaled-commutators"), ALGEBRA_TOPIC, inexact(&scaled) as f64, 0.0),
        Record::exact(format!("{tag}/casimir-central"), ALGEBRA_TOPIC, flag(base.exact && sc.exact), 1.0),
        Record::exact(format!("{tag}/casimir-scales"), ALGEBRA_TOPIC, flag(casimir_scales), 1.0),
    ]
}

pub(super) fn algebra(ctx: &Context) -> Result<Vec<Record>, CliError> {
    let shapes: Vec<(usize, usize)> = match &ctx.cfg.algebra {
        Some(a) => vec![(a.p, a.q)],
        None => (2..=5).flat_map(|m| (0..=m).map(move |p| (p, m - p))).collect(),
    };
    let mut records: Vec<Record> = shapes.into_par_iter().flat_map_iter(|(p, q)| one_algebra(p, q)).collect();
    // [L12, L23] = i η22 L13 for rotations of three-space
    let gs = generators(&Signature::euclidean(3));
    let (a, b) = (gs.get(0, 1), gs.get(1, 2));
    let lhs = &a * &b - &b * &a;
    let rhs = gs.get(0, 2).map(|z| z * Complex::new(Rational64::from_integer(0), Rational64::from_integer(1)));
    records.push(Record::exact("example/L12-L23", ALGEBRA_TOPIC, flag(lhs == rhs), 1.0));
    Ok(records)
}

fn spaces(ctx: &Context) -> Vec<(f64, Signature)> {
    let mut out = Vec::new();
    for k in ctx.curvatures(&[1.0, -1.0]) {
        for n in ctx.dims(&[3]) {
            out.extend(ctx.signatures(n).into_iter().map(|s| (k, s)));
        }
    }
    out
}

fn one_killing(ctx: &Context, k: f64, sig: Signature) -> Vec<Record> {
    let tag = format!("{}/{}", k_name(k), sig_name(&sig));
    let n = sig.dim();
    let Ok(e) = PseudoSphereEmbedding::new(k, sig) else {
        return vec![Record::failed(format!("{tag}/residual"), KILLING_TOPIC, 0.0, KILLING_TOLERANCE)];
    };
    let chart = e.chart();
    let mut rng = ctx.rng(&tag);
    let points: Vec<Vec<f64>> = (0..KILLING_POINTS).map(|_| random_point(&mut rng, n, 0.5)).collect();
    let fields = generator_fields(&e);
    let mut worst = 0.0_f64;
    let mut evaluated = 0;
    for f in &fields {
        match killing_residual(&chart, f, &points) {
            Ok(rep) => {
                worst = worst.max(rep.max_residual);
                evaluated += rep.evaluated;
            }
            Err(_) => worst = f64::NAN,
        }
    }
    let mut records = vec![
        Record::at_most(format!("{tag}/residual"), KILLING_TOPIC, worst, KILLING_TOLERANCE),
        Record::exact(
            format!("{tag}/fields"),
            PLUMBING,
            fields.len() as f64,
            (n * (n + 1) / 2) as f64,
        ),
        Record::exact(
            format!("{tag}/evaluated"),
            PLUMBING,
            evaluated as f64,
            (fields.len() * KILLING_POINTS) as f64,
        ),
    ];

    // brackets of generator fields are again Killing
    let gs = generators(e.ambient_signature());
    let x = &points[0];
    let mut bracket_dev = 0.0_f64;
    let mut bracket_lie = 0.0_f64;
    for &(a, b) in gs.pairs() {
        for &(c, d) in gs.pairs() {
            let ma = gs.real_matrix(a, b);
            let mb = gs.real_matrix(c, d);
            let bracket = lie_bracket(&linear_field(&e, ma.clone()), &linear_field(&e, mb.clone()));
            let want = linear_field(&e, -(&ma * &mb - &mb * &ma));
            let diff = bracket.eval(x).iter().zip(want.eval(x)).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            bracket_dev = bracket_dev.max(diff);
            let field = VectorField::new(n, move |y| bracket.eval(y));
            bracket_lie = match lie_derivative_metric(&chart, &field, x) {
                Ok(l) => bracket_lie.max(l.amax()),
                Err(_) => f64::NAN,
            };
        }
    }
    records.push(Record::at_most(format!("{tag}/bracket-vs-commutator"), KILLING_TOPIC, bracket_dev, 1e-10));
    records.push(Record::at_most(format!("{tag}/bracket-lie-derivative"), KILLING_TOPIC, bracket_lie, LIE_TOLERANCE));
    records
}

pub(super) fn killing(ctx: &Context) -> Result<Vec<Record>, CliError> {
    Ok(spaces(ctx).into_par_iter().flat_map_iter(|(k, sig)| one_killing(ctx, k, sig)).collect())
}

/// One invariant-tensor problem and its expected solution count.
struct Case {
    k: f64,
    sig: Signature,
    symmetry: TensorSymmetry,
    expected: usize,
    /// Compare the single solution with the metric.
    metric_like: bool,
}

fn cases() -> Vec<Case> {
    let case = |k, sig, symmetry, expected, metric_like| Case {
        k,
        sig,
        symmetry,
        expected,
        metric_like,
    };
    vec![
        case(1.0, Signature::euclidean(3), TensorSymmetry::Antisymmetric, 0, false),
        case(1.0, Signature::euclidean(3), TensorSymmetry::Symmetric, 1, true),
        case(-1.0, Signature::lorentzian(3), TensorSymmetry::Antisymmetric, 0, false),
        case(-1.0, Signature::lorentzian(3), TensorSymmetry::Symmetric, 1, true),
        case(-1.0, Signature::euclidean(2), TensorSymmetry::Antisymmetric, 1, false),
        case(1.0, Signature::euclidean(2), TensorSymmetry::Unconstrained, 2, false),
        case(1.0, Signature::euclidean(4), TensorSymmetry::Antisymmetric, 0, false),
        case(1.0, Signature::lorentzian(4), TensorSymmetry::Antisymmetric, 0, false),
    ]
}

fn symmetry_name(s: TensorSymmetry) -> &'static str {
    match s {
        TensorSymmetry::Antisymmetric => "antisymmetric",
        TensorSymmetry::Symmetric => "symmetric",
        TensorSymmetry::Unconstrained => "unconstrained",
    }
}

fn one_case(ctx: &Context, case: &Case) -> Vec<Record> {
    let tag = format!("{}/{}/{}", k_name(case.k), sig_name(&case.sig), symmetry_name(case.symmetry));
    let n = case.sig.dim();
    let mut rng = ctx.rng(&tag);
    let x0 = random_point(&mut rng, n, 0.3);
    let solved = PseudoSphereEmbedding::new(case.k, case.sig.clone()).and_then(|e| {
        let chart = e.chart();
        let sol = invariant_tensor_solve(&chart, &generator_fields(&e), case.symmetry, &x0, 3, ctx.seed)?;
        let g: DMatrix<f64> = chart.metric(&x0)?;
        Ok((sol, g))
    });
    let Ok((sol, g)) = solved else {
        return vec![Record::failed(format!("{tag}/dimension"), INVARIANT_TOPIC, case.expected as f64, 0.0)];
    };
    let mut records = vec![
        Record::exact(format!("{tag}/dimension"), INVARIANT_TOPIC, sol.dim() as f64, case.expected as f64),
        Record::at_least(format!("{tag}/gap"), INVARIANT_TOPIC, sol.gap, MIN_GAP),
    ];
    if case.metric_like {
        let cos = sol.cosine_with(&g).unwrap_or(f64::NAN);
        records.push(Record::within(format!("{tag}/cosine-with-metric"), INVARIANT_TOPIC, cos, 1.0, 1e-8));
    }
    records
}

pub(super) fn invariant_tensors(ctx: &Context) -> Result<Vec<Record>, CliError> {
    Ok(cases().par_iter().flat_map_iter(|c| one_case(ctx, c)).collect())
}
