use rayon::prelude::*;
use rnc_core::geodesic::{NormalChart, NormalChartOptions};
use rnc_core::metrics::{warped_chart, Differentiation, MetricChart, PseudoSphereChart, StereographicChart};
use rnc_core::radial::{taylor_metric, CurvatureExpansion};
use rnc_core::tensor::Signature;

use super::{k_name, sig_name, Context};
use crate::report::Record;
use crate::CliError;

/// Normal radii of the convergence fit.
pub const RADII: [f64; 4] = [0.01, 0.02, 0.04, 0.08];
/// Smallest acceptable log-log slope; the truncation error is fourth order.
pub const MIN_SLOPE: f64 = 3.7;
/// Errors below this are rounding, and the fit is skipped.
const EXACT_FLOOR: f64 = 1e-13;
const TOPIC: &str = "curvature Taylor expansion of the metric";

/// Least-squares slope of `ln e` against `ln r`.
pub fn loglog_slope(r: &[f64], e: &[f64]) -> f64 {
    let xs: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn one_chart(id: &str, chart: Box<dyn MetricChart>, origin: &[f64]) -> Record {
    let n = chart.dim();
    let options = NormalChartOptions {
        t_max: 2.0,
        directions: 8,
        ..Default::default()
    };
    let errors = NormalChart::with_options(chart, origin, options).and_then(|nc| {
        let exp = CurvatureExpansion::from_chart(nc.chart(), origin, Differentiation::Auto)?;
        // a fixed direction off every coordinate axis
        let mut dir: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * i as f64).collect();
        let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        dir.iter_mut().for_each(|c| *c /= norm);
        RADII
            .iter()
            .map(|r| {
                let z: Vec<f64> = dir.iter().map(|c| c * r).collect();
                Ok((taylor_metric(&exp, &z)? - nc.pullback_metric(&z)?).amax())
            })
            .collect::<rnc_core::Result<Vec<f64>>>()
    });
    match errors {
        Ok(e) if e.iter().all(|v| *v < EXACT_FLOOR) => {
            Record::at_most(format!("{id}/max-error"), TOPIC, e.iter().copied().fold(0.0, f64::max), EXACT_FLOOR)
        }
        Ok(e) => Record::at_least(format!("{id}/slope"), TOPIC, loglog_slope(&RADII, &e), MIN_SLOPE),
        Err(_) => Record::failed(format!("{id}/slope"), TOPIC, MIN_SLOPE, 0.0),
    }
}

/// Every built-in chart with curvature, at a generic base point.
fn built_in() -> Vec<(String, Box<dyn MetricChart>, Vec<f64>)> {
    let mut out: Vec<(String, Box<dyn MetricChart>, Vec<f64>)> = Vec::new();
    for sig in [Signature::euclidean(2), Signature::lorentzian(3)] {
        let o2: Vec<f64> = [0.3, -0.2, 0.1][..sig.dim()].to_vec();
        let o1: Vec<f64> = [0.2, 0.1, -0.1][..sig.dim()].to_vec();
        for k in [1.0, -1.0] {
            let tag = format!("{}/{}", k_name(k), sig_name(&sig));
            out.push((format!("stereographic/{tag}"), Box::new(StereographicChart::new(k, sig.clone())), o2.clone()));
            out.push((format!("pseudo-sphere/{tag}"), Box::new(PseudoSphereChart::new(k, sig.clone())), o1.clone()));
        }
    }
    out.push(("warped/eps=0.4".into(), Box::new(warped_chart(0.4)), vec![0.3, -0.2]));
    out
}

pub(super) fn run(ctx: &Context) -> Result<Vec<Record>, CliError> {
    if let Some(c) = ctx.chart()? {
        let name = ctx.cfg.chart.as_ref().map(|s| s.name.clone()).unwrap_or_default();
        return Ok(vec![one_chart(&name, c.chart, &c.origin)]);
    }
    Ok(built_in().into_par_iter().map(|(id, chart, origin)| one_chart(&id, chart, &origin)).collect())
}
