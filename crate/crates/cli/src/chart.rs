//! Chart definitions from configuration.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnc_core::metrics::{validate_at, warped_chart, FlatChart, FnChart, MetricChart, PseudoSphereChart, StereographicChart};
use rnc_core::tensor::Signature;

use crate::config::ChartSpec;
use crate::expr::{parse, Expr};
use crate::CliError;

/// Points at which a chart is validated before use.
pub const VALIDATION_POINTS: usize = 20;
const DEFAULT_SAMPLE_RADIUS: f64 = 0.5;
const DEFAULT_WARP: f64 = 0.4;

pub struct IngestedChart {
    pub chart: Box<dyn MetricChart>,
    /// Suggested base point.
    pub origin: Vec<f64>,
    /// Points the chart was validated at.
    pub validated: Vec<Vec<f64>>,
}

impl IngestedChart {
    pub fn constant_curvature(&self) -> Option<f64> {
        self.chart.constant_curvature()
    }
}

fn signature_of(spec: &ChartSpec) -> Result<Signature, CliError> {
    let sig = match (&spec.signature, spec.dim) {
        (Some(s), _) => Signature::new(s.iter().copied()).map_err(|e| CliError::Chart(e.to_string()))?,
        (None, Some(n)) => Signature::euclidean(n),
        (None, None) => Signature::euclidean(2),
    };
    if let Some(n) = spec.dim {
        if n != sig.dim() {
            return Err(CliError::Chart(format!("dim = {n} but the signature has {} entries", sig.dim())));
        }
    }
    if sig.dim() == 0 {
        return Err(CliError::Chart("dimension must be positive".into()));
    }
    Ok(sig)
}

fn curvature_of(spec: &ChartSpec) -> Result<f64, CliError> {
    spec.curvature
        .filter(|k| k.is_finite())
        .ok_or_else(|| CliError::Chart(format!("chart '{}' needs a finite curvature K", spec.name)))
}

fn user_chart(spec: &ChartSpec, sig: Signature) -> Result<FnChart, CliError> {
    let n = sig.dim();
    let names: Vec<String> = match &spec.coordinates {
        Some(c) if c.len() == n => c.clone(),
        Some(c) => {
            return Err(CliError::Chart(format!("{} coordinate names for a {n}-dimensional chart", c.len())));
        }
        None => (0..n).map(|i| format!("x{i}")).collect(),
    };
    let rows = spec
        .components
        .as_ref()
        .ok_or_else(|| CliError::Chart("a user chart needs 'components'".into()))?;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Chart(format!("'components' must be a {n}×{n} array")));
    }
    let mut exprs: Vec<Expr> = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        for (j, src) in row.iter().enumerate() {
            let e = parse(src, &names, &spec.constants).map_err(|e| CliError::Parse {
                component: format!("components[{i}][{j}]"),
                column: e.column,
                message: e.message,
            })?;
            exprs.push(e);
        }
    }
    let label = format!("user chart {:?}", sig.entries());
    let exprs = Arc::new(exprs);
    let domain = Arc::clone(&exprs);
    Ok(FnChart::new(sig, label, move |x| DMatrix::from_fn(n, n, |i, j| exprs[i * n + j].eval(x)))
        .with_domain(move |x| domain.iter().all(|e| e.eval(x).is_finite())))
}

/// Builds the chart a spec describes and validates it at
/// [`VALIDATION_POINTS`] seeded sample points.
pub fn ingest_chart(spec: &ChartSpec, seed: u64) -> Result<IngestedChart, CliError> {
    let sig = signature_of(spec)?;
    let n = sig.dim();
    let chart: Box<dyn MetricChart> = match spec.name.as_str() {
        "flat" => Box::new(FlatChart::new(sig)),
        "stereographic" => Box::new(StereographicChart::new(curvature_of(spec)?, sig)),
        "pseudo-sphere" => {
            let k = curvature_of(spec)?;
            if k == 0.0 {
                return Err(CliError::Chart("the pseudo-sphere chart needs K ≠ 0".into()));
            }
            Box::new(PseudoSphereChart::new(k, sig))
        }
        "warped" => {
            if sig != Signature::euclidean(2) {
                return Err(CliError::Chart("the warped chart is two-dimensional Euclidean".into()));
            }
            Box::new(warped_chart(spec.eps.unwrap_or(DEFAULT_WARP)))
        }
        "user" => Box::new(user_chart(spec, sig)?),
        other => {
            return Err(CliError::Chart(format!(
                "unknown chart '{other}' (flat, stereographic, pseudo-sphere, warped, user)"
            )))
        }
    };
    let origin = match &spec.origin {
        Some(o) if o.len() == n => o.clone(),
        Some(o) => return Err(CliError::Chart(format!("origin has {} entries, chart has dimension {n}", o.len()))),
        None => vec![0.0; n],
    };
    if !chart.contains(&origin) {
        return Err(CliError::Chart(format!("origin {origin:?} is outside the chart")));
    }
    let radius = spec.sample_radius.unwrap_or(DEFAULT_SAMPLE_RADIUS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut validated = Vec::with_capacity(VALIDATION_POINTS);
    let mut attempts = 0;
    while validated.len() < VALIDATION_POINTS {
        attempts += 1;
        if attempts > 50 * VALIDATION_POINTS {
            return Err(CliError::Chart(format!(
                "only {} of {VALIDATION_POINTS} sample points fall inside the chart",
                validated.len()
            )));
        }
        let x: Vec<f64> = origin.iter().map(|o| o + rng.gen_range(-radius..radius)).collect();
        if !chart.contains(&x) {
            continue;
        }
        validate_at(chart.as_ref(), &x).map_err(|e| CliError::Chart(e.to_string()))?;
        validated.push(x);
    }
    Ok(IngestedChart {
        chart,
        origin,
        validated,
    })
}
