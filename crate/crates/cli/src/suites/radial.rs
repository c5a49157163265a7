use num_rational::Rational64;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rnc_core::geodesic::{NormalChart, NormalChartOptions};
use rnc_core::metrics::{warped_chart, MetricChart, PseudoSphereChart, StereographicChart};
use rnc_core::radial::{
    hypersurface_metric, integrate_radial, integrate_radial_checked, normal_tensor_from_curvature, ChartCurvatureSource,
    DEFAULT_STEP,
};
use rnc_core::tensor::{multi_indices, DenseTensor, Signature};

use super::{random_unit, relative_diff, Context};
use crate::report::Record;
use crate::CliError;

const DIRECTIONS: usize = 6;
/// Random curvature tensors for the normal-tensor identities.
pub const IDENTITY_SAMPLES: usize = 100;
const IDENTITY_DIM: usize = 4;
const TOPIC: &str = "radial connection equations";
const NORMAL_TOPIC: &str = "normal tensors";

fn one_chart(ctx: &Context, id: &str, chart: Box<dyn MetricChart>, origin: &[f64]) -> Vec<Record> {
    let n = chart.dim();
    let options = NormalChartOptions {
        t_max: 3.0,
        directions: 8,
        ..Default::default()
    };
    let ids = ["symmetry", "against-shooting", "coframe-form", "richardson"].map(|s| format!("{id}/{s}"));
    let fail = |ids: &[String; 4]| {
        vec![
            Record::failed(&ids[0], TOPIC, 0.0, ctx.algebraic),
            Record::failed(&ids[1], TOPIC, 0.0, ctx.differential),
            Record::failed(&ids[2], TOPIC, 0.0, ctx.algebraic),
            Record::failed(&ids[3], TOPIC, 0.0, 0.0),
        ]
    };
    let Ok(nc) = NormalChart::with_options(chart, origin, options) else {
        return fail(&ids);
    };
    let Ok(source) = ChartCurvatureSource::from_normal_chart(&nc, DEFAULT_STEP) else {
        return fail(&ids);
    };
    let mut rng = ctx.rng(id);
    let (mut sym, mut shoot, mut cof) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut flagged = 0;
    for k in 0..DIRECTIONS {
        let dir = random_unit(&mut rng, n);
        let r = 0.5 * nc.guard_radius(&dir).min(1.0);
        let z: Vec<f64> = dir.iter().map(|c| c * r).collect();
        let run = if k == 0 {
            integrate_radial_checked(&source, &z, DEFAULT_STEP)
        } else {
            integrate_radial(&source, &z, DEFAULT_STEP)
        };
        let (Ok(rc), Ok(pull)) = (run, nc.pullback_metric(&z)) else {
            return fail(&ids);
        };
        if rc.partial {
            return fail(&ids);
        }
        let (va, vb) = rc.max_symmetry_violation();
        sym = sym.max(va).max(vb);
        let g = hypersurface_metric(&rc);
        shoot = shoot.max(relative_diff(&g, &pull));
        cof = cof.max(relative_diff(&rc.coframe_metric(), &g));
        flagged += usize::from(rc.flagged);
    }
    vec![
        Record::at_most(&ids[0], TOPIC, sym, ctx.algebraic),
        Record::at_most(&ids[1], TOPIC, shoot, ctx.differential),
        Record::at_most(&ids[2], TOPIC, cof, ctx.algebraic),
        Record::exact(&ids[3], TOPIC, flagged as f64, 0.0),
    ]
}

/// A random algebraic curvature tensor with small rational entries: pair
/// antisymmetry, pair exchange, then removal of the cyclic part.
pub fn random_rational_curvature(rng: &mut ChaCha8Rng, n: usize) -> DenseTensor<Rational64> {
    let raw = DenseTensor::covariant(4, n, |_| Rational64::from_integer(rng.gen_range(-5..=5)));
    let r = |t: &DenseTensor<Rational64>, a, b, c, d| *t.get(&[a, b, c, d]);
    let anti = DenseTensor::covariant(4, n, |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        r(&raw, a, b, c, d) - r(&raw, b, a, c, d) - r(&raw, a, b, d, c) + r(&raw, b, a, d, c)
    });
    let pair = DenseTensor::covariant(4, n, |i| r(&anti, i[0], i[1], i[2], i[3]) + r(&anti, i[2], i[3], i[0], i[1]));
    DenseTensor::covariant(4, n, |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        (r(&pair, a, b, c, d) * 2 - r(&pair, a, c, d, b) - r(&pair, a, d, b, c)) / 3
    })
}

/// Counts of samples failing reconstruction, the cyclic identity, and the
/// symmetry of the middle indices, in exact arithmetic.
pub fn identity_failures(ctx: &Context) -> (usize, usize, usize) {
    let mut rng = ctx.rng("normal-tensor");
    let mut fails = (0, 0, 0);
    for _ in 0..IDENTITY_SAMPLES {
        let r = random_rational_curvature(&mut rng, IDENTITY_DIM);
        let Ok(d) = normal_tensor_from_curvature(&r) else {
            fails.0 += 1;
            fails.1 += 1;
            fails.2 += 1;
            continue;
        };
        fails.0 += usize::from(d.curvature() != r);
        fails.1 += usize::from(!d.cyclic_sum().values().iter().all(|v| v.is_zero()));
        let symmetric = multi_indices(&[IDENTITY_DIM; 4]).all(|i| d.get(i[0], i[1], i[2], i[3]) == d.get(i[0], i[2], i[1], i[3]));
        fails.2 += usize::from(!symmetric);
    }
    fails
}

pub(super) fn run(ctx: &Context) -> Result<Vec<Record>, CliError> {
    let charts: Vec<(String, Box<dyn MetricChart>, Vec<f64>)> = match ctx.chart()? {
        Some(c) => {
            let name = ctx.cfg.chart.as_ref().map(|s| s.name.clone()).unwrap_or_default();
            vec![(name, c.chart, c.origin)]
        }
        None => vec![
            ("warped/eps=0.4".into(), Box::new(warped_chart(0.4)), vec![0.2, -0.1]),
            (
                "stereographic/K=-1/lorentzian-3".into(),
                Box::new(StereographicChart::new(-1.0, Signature::lorentzian(3))),
                vec![0.1, 0.0, 0.2],
            ),
            (
                "pseudo-sphere/K=+1/euclidean-3".into(),
                Box::new(PseudoSphereChart::new(1.0, Signature::euclidean(3))),
                vec![0.1, -0.2, 0.1],
            ),
        ],
    };
    let mut records: Vec<Record> = charts
        .into_par_iter()
        .flat_map_iter(|(id, chart, origin)| one_chart(ctx, &id, chart, &origin))
        .collect();
    let (recon, cyclic, middle) = identity_failures(ctx);
    let samples = IDENTITY_SAMPLES as f64;
    records.push(Record::exact("normal-tensor/reconstruction-failures", NORMAL_TOPIC, recon as f64, 0.0));
    records.push(Record::exact("normal-tensor/cyclic-failures", NORMAL_TOPIC, cyclic as f64, 0.0));
    records.push(Record::exact("normal-tensor/symmetry-failures", NORMAL_TOPIC, middle as f64, 0.0));
    records.push(Record::exact("normal-tensor/samples", crate::report::PLUMBING, samples, samples));
    Ok(records)
}
