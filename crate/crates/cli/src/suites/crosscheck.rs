use rayon::prelude::*;
use rnc_core::geodesic::{NormalChart, NormalChartOptions};
use rnc_core::metrics::{FlatChart, MetricChart, StereographicChart};
use rnc_core::radial::closed_form::normal_metric;
use rnc_core::radial::{hypersurface_metric, integrate_radial, ChartCurvatureSource};
use rnc_core::tensor::Signature;

use super::{k_name, random_unit, relative_diff, sig_name, Context};
use crate::report::Record;
use crate::CliError;

const SAMPLES: usize = 20;
/// Radial equations against the closed form.
const ODE_TOLERANCE: f64 = 1e-8;
/// Longest normal radius sampled, whatever the guard allows.
const MAX_RADIUS: f64 = 1.5;
/// Radial and transport step; the closed-form comparison leaves a wide margin.
pub const RADIAL_STEP: f64 = 5e-3;
/// Geodesic step for the shooting pullback.
pub const SHOOTING_STEP: f64 = 2.5e-3;
const TOPIC: &str = "constant-curvature line element";

fn chart_for(k: f64, sig: &Signature) -> Box<dyn MetricChart> {
    if k == 0.0 {
        Box::new(FlatChart::new(sig.clone()))
    } else {
        Box::new(StereographicChart::new(k, sig.clone()))
    }
}

fn origin_for(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.1 * (i as f64 + 1.0) / n as f64).collect()
}

fn one_space(ctx: &Context, k: f64, chart: Box<dyn MetricChart>, origin: &[f64]) -> Vec<Record> {
    let sig = chart.signature().clone();
    let n = sig.dim();
    let tag = format!("{}/{}", k_name(k), sig_name(&sig));
    // the guard only has to see past MAX_RADIUS
    let options = NormalChartOptions {
        step: SHOOTING_STEP,
        t_max: 4.0,
        directions: 8,
        ..Default::default()
    };
    let nc = match NormalChart::with_options(chart, origin, options) {
        Ok(nc) => nc,
        Err(_) => {
            return vec![
                Record::failed(format!("{tag}/shooting"), TOPIC, 0.0, ctx.differential),
                Record::failed(format!("{tag}/radial"), TOPIC, 0.0, ODE_TOLERANCE),
            ]
        }
    };
    let mut rng = ctx.rng(&tag);
    let zs: Vec<Vec<f64>> = (0..SAMPLES)
        .map(|_| {
            use rand::Rng;
            let dir = random_unit(&mut rng, n);
            let r = rng.gen_range(0.05..1.0) * nc.guard_radius(&dir).min(MAX_RADIUS);
            dir.into_iter().map(|c| c * r).collect()
        })
        .collect();
    let source = ChartCurvatureSource::from_normal_chart(&nc, RADIAL_STEP);
    let mut shooting = 0.0_f64;
    let mut radial = 0.0_f64;
    let mut broken = (false, false);
    for z in &zs {
        let closed = normal_metric(k, &sig, z);
        match nc.pullback_metric(z) {
            Ok(g) => shooting = shooting.max(relative_diff(&g, &closed)),
            Err(_) => broken.0 = true,
        }
        let rc = source
            .as_ref()
            .ok()
            .and_then(|s| integrate_radial(s, z, RADIAL_STEP).ok())
            .filter(|rc| !rc.partial);
        match rc {
            Some(rc) => radial = radial.max(relative_diff(&hypersurface_metric(&rc), &closed)),
            None => broken.1 = true,
        }
    }
    let shoot = if broken.0 {
        Record::failed(format!("{tag}/shooting"), TOPIC, 0.0, ctx.differential)
    } else {
        Record::at_most(format!("{tag}/shooting"), TOPIC, shooting, ctx.differential)
    };
    let ode = if broken.1 {
        Record::failed(format!("{tag}/radial"), TOPIC, 0.0, ODE_TOLERANCE)
    } else {
        Record::at_most(format!("{tag}/radial"), TOPIC, radial, ODE_TOLERANCE)
    };
    vec![shoot, ode]
}

pub(super) fn run(ctx: &Context) -> Result<Vec<Record>, CliError> {
    if let Some(c) = ctx.chart()? {
        let k = c.constant_curvature().ok_or_else(|| {
            CliError::Config("constant-curvature-crosscheck needs a chart of constant curvature".into())
        })?;
        return Ok(one_space(ctx, k, c.chart, &c.origin));
    }
    let mut jobs = Vec::new();
    for k in ctx.curvatures(&[1.0, -1.0]) {
        for n in ctx.dims(&[2, 3, 4]) {
            for sig in ctx.signatures(n) {
                jobs.push((k, sig));
            }
        }
    }
    Ok(jobs
        .par_iter()
        .flat_map_iter(|(k, sig)| one_space(ctx, *k, chart_for(*k, sig), &origin_for(sig.dim())))
        .collect())
}
