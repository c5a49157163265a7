//! Coordinate charts and their curvature.
//!
//! Layouts used throughout:
//! - Christoffel symbols `[a][b][c] = Γ^a_bc`
//! - their derivatives `[a][b][c][e] = ∂_e Γ^a_bc`
//! - Riemann `[a][b][c][d] = R_abcd`, fully covariant, with
//!   `R^a_bcd = ∂_c Γ^a_db - ∂_d Γ^a_cb + Γ^a_ce Γ^e_db - Γ^a_de Γ^e_cb`
//!   so that a sphere has `R_1212 > 0`
//! - covariant derivative of Riemann `[a][b][c][d][e] = ∇_e R_abcd`

mod charts;
mod vielbein;

pub use charts::{warped_chart, FlatChart, FnChart, PseudoSphereChart, StereographicChart};
pub use vielbein::{vielbein_at, Vielbein};

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::tensor::{inverse_metric, DenseTensor, Signature, Variance};

/// A coordinate patch carrying a pseudo-Riemannian metric.
pub trait MetricChart: Send + Sync {
    fn dim(&self) -> usize;

    fn signature(&self) -> &Signature;

    /// Validity predicate. Points outside are rejected, never evaluated.
    fn contains(&self, x: &[f64]) -> bool;

    /// Metric components without any validity check.
    fn metric_unchecked(&self, x: &[f64]) -> DMatrix<f64>;

    fn metric(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        Ok(self.metric_unchecked(x))
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if x.iter().all(|v| v.is_finite()) && self.contains(x) {
            Ok(())
        } else {
            Err(GeomError::OutsideValidity { point: x.to_vec() })
        }
    }

    fn christoffel_analytic(&self, _x: &[f64]) -> Option<DenseTensor> {
        None
    }

    fn christoffel_derivative_analytic(&self, _x: &[f64]) -> Option<DenseTensor> {
        None
    }

    fn riemann_analytic(&self, _x: &[f64]) -> Option<DenseTensor> {
        None
    }

    /// `Some(K)` for charts of constant sectional curvature `K`.
    fn constant_curvature(&self) -> Option<f64> {
        None
    }

    fn label(&self) -> String;
}

impl<C: MetricChart + ?Sized> MetricChart for Box<C> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn signature(&self) -> &Signature {
        (**self).signature()
    }
    fn contains(&self, x: &[f64]) -> bool {
        (**self).contains(x)
    }
    fn metric_unchecked(&self, x: &[f64]) -> DMatrix<f64> {
        (**self).metric_unchecked(x)
    }
    fn christoffel_analytic(&self, x: &[f64]) -> Option<DenseTensor> {
        (**self).christoffel_analytic(x)
    }
    fn christoffel_derivative_analytic(&self, x: &[f64]) -> Option<DenseTensor> {
        (**self).christoffel_derivative_analytic(x)
    }
    fn riemann_analytic(&self, x: &[f64]) -> Option<DenseTensor> {
        (**self).riemann_analytic(x)
    }
    fn constant_curvature(&self) -> Option<f64> {
        (**self).constant_curvature()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

/// How derivatives of the metric are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Differentiation {
    /// Closed forms supplied by the chart; an error if the chart has none.
    Analytic,
    /// Central differences with step `step * max(1, |x_i|)` per coordinate.
    Numeric { step: f64 },
    /// Closed forms when available, otherwise numeric with the default step.
    #[default]
    Auto,
}

/// Default first-derivative step.
pub const DEFAULT_STEP: f64 = 1e-5;
/// Step for second derivatives of the metric.
pub const SECOND_STEP: f64 = 1e-4;

pub(crate) fn coord_step(x: &[f64], i: usize, h: f64) -> f64 {
    h * x[i].abs().max(1.0)
}

fn shifted(x: &[f64], i: usize, d: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += d;
    y
}

/// `∂_c g` for each coordinate `c`, by central differences.
pub fn metric_gradient(chart: &dyn MetricChart, x: &[f64], h: f64) -> Result<Vec<DMatrix<f64>>> {
    chart.check_point(x)?;
    (0..x.len())
        .map(|c| {
            let s = coord_step(x, c, h);
            let gp = chart.metric(&shifted(x, c, s))?;
            let gm = chart.metric(&shifted(x, c, -s))?;
            Ok((gp - gm) / (2.0 * s))
        })
        .collect()
}

/// `∂_c ∂_e g`, indexed `[c][e]`.
pub fn metric_hessian(chart: &dyn MetricChart, x: &[f64], h: f64) -> Result<Vec<Vec<DMatrix<f64>>>> {
    chart.check_point(x)?;
    let n = x.len();
    let g0 = chart.metric(x)?;
    let mut out = vec![vec![DMatrix::zeros(n, n); n]; n];
    for c in 0..n {
        let sc = coord_step(x, c, h);
        let gp = chart.metric(&shifted(x, c, sc))?;
        let gm = chart.metric(&shifted(x, c, -sc))?;
        out[c][c] = (gp - 2.0 * &g0 + gm) / (sc * sc);
        for e in (c + 1)..n {
            let se = coord_step(x, e, h);
            let at = |a: f64, b: f64| {
                let mut y = x.to_vec();
                y[c] += a;
                y[e] += b;
                chart.metric(&y)
            };
            let m = (at(sc, se)? - at(sc, -se)? - at(-sc, se)? + at(-sc, -se)?) / (4.0 * sc * se);
            out[c][e] = m.clone();
            out[e][c] = m;
        }
    }
    Ok(out)
}

fn christoffel_from_metric(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> DenseTensor {
    let n = ginv.nrows();
    // first kind [d][b][c] = ½(∂_b g_dc + ∂_c g_db − ∂_d g_bc)
    let first = |d: usize, b: usize, c: usize| 0.5 * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]);
    christoffel_tensor(n, |a, b, c| (0..n).map(|d| ginv[(a, d)] * first(d, b, c)).sum())
}

pub(crate) fn christoffel_tensor(n: usize, f: impl Fn(usize, usize, usize) -> f64) -> DenseTensor {
    DenseTensor::from_fn(
        vec![n; 3],
        vec![Variance::Contravariant, Variance::Covariant, Variance::Covariant],
        |i| f(i[0], i[1], i[2]),
    )
}

pub(crate) fn christoffel_derivative_tensor(n: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> DenseTensor {
    DenseTensor::from_fn(
        vec![n; 4],
        vec![Variance::Contravariant, Variance::Covariant, Variance::Covariant, Variance::Covariant],
        |i| f(i[0], i[1], i[2], i[3]),
    )
}

pub fn christoffel(chart: &dyn MetricChart, x: &[f64], how: Differentiation) -> Result<DenseTensor> {
    chart.check_point(x)?;
    let step = match how {
        Differentiation::Analytic => {
            return chart
                .christoffel_analytic(x)
                .ok_or(GeomError::NoAnalyticForm("Christoffel symbols"))
        }
        Differentiation::Auto => {
            if let Some(g) = chart.christoffel_analytic(x) {
                return Ok(g);
            }
            DEFAULT_STEP
        }
        Differentiation::Numeric { step } => step,
    };
    let ginv = inverse_metric(&chart.metric(x)?)?;
    let dg = metric_gradient(chart, x, step)?;
    Ok(christoffel_from_metric(&ginv, &dg))
}

/// `∂_e Γ^a_bc`.
pub fn christoffel_derivative(chart: &dyn MetricChart, x: &[f64], how: Differentiation) -> Result<DenseTensor> {
    chart.check_point(x)?;
    let step = match how {
        Differentiation::Analytic => {
            return chart
                .christoffel_derivative_analytic(x)
                .ok_or(GeomError::NoAnalyticForm("Christoffel derivatives"))
        }
        Differentiation::Auto => {
            if let Some(d) = chart.christoffel_derivative_analytic(x) {
                return Ok(d);
            }
            if chart.christoffel_analytic(x).is_some() {
                return christoffel_derivative_from_symbols(chart, x, DEFAULT_STEP);
            }
            DEFAULT_STEP
        }
        Differentiation::Numeric { step } => step,
    };
    let n = x.len();
    let ginv = inverse_metric(&chart.metric(x)?)?;
    let dg = metric_gradient(chart, x, step)?;
    let ddg = metric_hessian(chart, x, SECOND_STEP.max(step))?;
    // ∂_e g^{ad} = −g^{ap} ∂_e g_pq g^{qd}
    let dginv: Vec<DMatrix<f64>> = dg.iter().map(|d| -(&ginv * d * &ginv)).collect();
    let first = |d: usize, b: usize, c: usize| 0.5 * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]);
    let dfirst =
        |d: usize, b: usize, c: usize, e: usize| 0.5 * (ddg[b][e][(d, c)] + ddg[c][e][(d, b)] - ddg[d][e][(b, c)]);
    Ok(christoffel_derivative_tensor(n, |a, b, c, e| {
        (0..n)
            .map(|d| dginv[e][(a, d)] * first(d, b, c) + ginv[(a, d)] * dfirst(d, b, c, e))
            .sum()
    }))
}

/// Differentiates analytic Christoffel symbols by central differences.
fn christoffel_derivative_from_symbols(chart: &dyn MetricChart, x: &[f64], h: f64) -> Result<DenseTensor> {
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    for e in 0..n {
        let s = coord_step(x, e, h);
        let p = christoffel(chart, &shifted(x, e, s), Differentiation::Auto)?;
        let m = christoffel(chart, &shifted(x, e, -s), Differentiation::Auto)?;
        cols.push((p, m, s));
    }
    Ok(christoffel_derivative_tensor(n, |a, b, c, e| {
        let (p, m, s) = &cols[e];
        (p.get(&[a, b, c]) - m.get(&[a, b, c])) / (2.0 * s)
    }))
}

/// Assembles the covariant Riemann tensor from `g`, `Γ` and `∂Γ`.
pub fn riemann_from_connection(g: &DMatrix<f64>, gamma: &DenseTensor, dgamma: &DenseTensor) -> DenseTensor {
    let n = g.nrows();
    let mut up = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = dgamma.get(&[a, d, b, c]) - dgamma.get(&[a, c, b, d]);
                    for e in 0..n {
                        v += gamma.get(&[a, c, e]) * gamma.get(&[e, d, b]) - gamma.get(&[a, d, e]) * gamma.get(&[e, c, b]);
                    }
                    up[((a * n + b) * n + c) * n + d] = v;
                }
            }
        }
    }
    DenseTensor::covariant(4, n, |i| {
        (0..n)
            .map(|p| g[(i[0], p)] * up[((p * n + i[1]) * n + i[2]) * n + i[3]])
            .sum()
    })
}

/// Fully covariant Riemann tensor.
pub fn riemann(chart: &dyn MetricChart, x: &[f64], how: Differentiation) -> Result<DenseTensor> {
    chart.check_point(x)?;
    let g = chart.metric(x)?;
    match how {
        Differentiation::Analytic | Differentiation::Auto => {
            if let Some(r) = chart.riemann_analytic(x) {
                return Ok(r);
            }
            if let (Some(gamma), Some(dgamma)) = (chart.christoffel_analytic(x), chart.christoffel_derivative_analytic(x)) {
                return Ok(riemann_from_connection(&g, &gamma, &dgamma));
            }
            if how == Differentiation::Analytic {
                return Err(GeomError::NoAnalyticForm("Riemann tensor"));
            }
            let gamma = christoffel(chart, x, Differentiation::Auto)?;
            let dgamma = christoffel_derivative(chart, x, Differentiation::Auto)?;
            Ok(riemann_from_connection(&g, &gamma, &dgamma))
        }
        Differentiation::Numeric { .. } => {
            let gamma = christoffel(chart, x, how)?;
            let dgamma = christoffel_derivative(chart, x, how)?;
            Ok(riemann_from_connection(&g, &gamma, &dgamma))
        }
    }
}

/// Default step for differentiating the Riemann tensor.
pub const RIEMANN_DERIVATIVE_STEP: f64 = 2e-3;

/// `∇_e R_abcd`. The analytic path knows only that constant-curvature charts
/// have covariantly constant curvature; the numeric path differences the best
/// available Riemann tensor (Richardson-extrapolated) and adds the connection
/// terms.
pub fn covariant_derivative_riemann(chart: &dyn MetricChart, x: &[f64], how: Differentiation) -> Result<DenseTensor> {
    chart.check_point(x)?;
    let n = x.len();
    let step = match how {
        Differentiation::Analytic => {
            return match chart.constant_curvature() {
                Some(_) => Ok(DenseTensor::covariant(5, n, |_| 0.0)),
                None => Err(GeomError::NoAnalyticForm("covariant derivative of curvature")),
            }
        }
        Differentiation::Auto => {
            if chart.constant_curvature().is_some() {
                return Ok(DenseTensor::covariant(5, n, |_| 0.0));
            }
            RIEMANN_DERIVATIVE_STEP
        }
        Differentiation::Numeric { step } => step,
    };
    let r0 = riemann(chart, x, Differentiation::Auto)?;
    let gamma = christoffel(chart, x, Differentiation::Auto)?;
    let mut partial = Vec::with_capacity(n);
    for e in 0..n {
        let s = coord_step(x, e, step);
        let diff = |s: f64| -> Result<DenseTensor> {
            let p = riemann(chart, &shifted(x, e, s), Differentiation::Auto)?;
            let m = riemann(chart, &shifted(x, e, -s), Differentiation::Auto)?;
            p.zip_with(&m, |a, b| (a - b) / (2.0 * s))
        };
        let coarse = diff(s)?;
        let fine = diff(0.5 * s)?;
        partial.push(fine.zip_with(&coarse, |f, c| (4.0 * f - c) / 3.0)?);
    }
    Ok(DenseTensor::covariant(5, n, |i| {
        let (a, b, c, d, e) = (i[0], i[1], i[2], i[3], i[4]);
        let mut v = *partial[e].get(&[a, b, c, d]);
        for p in 0..n {
            v -= gamma.get(&[p, e, a]) * r0.get(&[p, b, c, d])
                + gamma.get(&[p, e, b]) * r0.get(&[a, p, c, d])
                + gamma.get(&[p, e, c]) * r0.get(&[a, b, p, d])
                + gamma.get(&[p, e, d]) * r0.get(&[a, b, c, p]);
        }
        v
    }))
}

/// Counts of positive and negative eigenvalues of a symmetric matrix.
pub fn inertia(g: &DMatrix<f64>) -> (usize, usize) {
    let ev = g.clone().symmetric_eigenvalues();
    let scale = ev.amax().max(f64::MIN_POSITIVE);
    let pos = ev.iter().filter(|&&l| l > 1e-12 * scale).count();
    let neg = ev.iter().filter(|&&l| l < -1e-12 * scale).count();
    (pos, neg)
}

/// Checks symmetry and signature of `g(x)` against the chart declaration.
pub fn validate_at(chart: &dyn MetricChart, x: &[f64]) -> Result<()> {
    let g = chart.metric(x)?;
    let scale = g.amax().max(f64::MIN_POSITIVE);
    let asym = (&g - g.transpose()).amax();
    if asym > 1e-14 * scale {
        return Err(GeomError::AsymmetricMetric { asymmetry: asym });
    }
    let found = inertia(&g);
    let expected = chart.signature().pq_counts();
    if found != expected {
        return Err(GeomError::SignatureMismatch {
            point: x.to_vec(),
            expected,
            found,
        });
    }
    Ok(())
}
