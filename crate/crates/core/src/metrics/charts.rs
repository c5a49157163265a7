use std::sync::Arc;

use nalgebra::DMatrix;

use super::{christoffel_derivative_tensor, christoffel_tensor, MetricChart};
use crate::tensor::{constant_curvature_riemann, matrix_rows, DenseTensor, Signature};

/// Constant metric `η`.
#[derive(Debug, Clone)]
pub struct FlatChart {
    sig: Signature,
}

impl FlatChart {
    pub fn new(sig: Signature) -> Self {
        Self { sig }
    }
}

impl MetricChart for FlatChart {
    fn dim(&self) -> usize {
        self.sig.dim()
    }
    fn signature(&self) -> &Signature {
        &self.sig
    }
    fn contains(&self, _x: &[f64]) -> bool {
        true
    }
    fn metric_unchecked(&self, _x: &[f64]) -> DMatrix<f64> {
        self.sig.eta()
    }
    fn christoffel_analytic(&self, _x: &[f64]) -> Option<DenseTensor> {
        Some(christoffel_tensor(self.dim(), |_, _, _| 0.0))
    }
    fn christoffel_derivative_analytic(&self, _x: &[f64]) -> Option<DenseTensor> {
        Some(christoffel_derivative_tensor(self.dim(), |_, _, _, _| 0.0))
    }
    fn riemann_analytic(&self, _x: &[f64]) -> Option<DenseTensor> {
        Some(DenseTensor::covariant(4, self.dim(), |_| 0.0))
    }
    fn constant_curvature(&self) -> Option<f64> {
        Some(0.0)
    }
    fn label(&self) -> String {
        format!("flat{:?}", self.sig.entries())
    }
}

/// Conformally flat form `g = η / (1 + K η(Ω, Ω)/4)²`.
///
/// The patch is the component containing the origin, `1 + K η(Ω,Ω)/4 > 0`.
#[derive(Debug, Clone)]
pub struct StereographicChart {
    k: f64,
    sig: Signature,
}

impl StereographicChart {
    pub fn new(k: f64, sig: Signature) -> Self {
        Self { k, sig }
    }

    pub fn curvature(&self) -> f64 {
        self.k
    }

    /// `1 + K η(Ω,Ω)/4`.
    pub fn denominator(&self, x: &[f64]) -> f64 {
        1.0 + self.k * self.sig.dot(x, x) / 4.0
    }

    /// `u = ηΩ` and `∂_c ln(1/D) = -(K/2) u_c / D`.
    fn log_gradient(&self, x: &[f64]) -> (Vec<f64>, f64, Vec<f64>) {
        let u: Vec<f64> = x.iter().enumerate().map(|(i, v)| self.sig.eps(i) * v).collect();
        let d = self.denominator(x);
        let f = u.iter().map(|uc| -0.5 * self.k * uc / d).collect();
        (u, d, f)
    }
}

impl MetricChart for StereographicChart {
    fn dim(&self) -> usize {
        self.sig.dim()
    }
    fn signature(&self) -> &Signature {
        &self.sig
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.denominator(x) > 0.0
    }
    fn metric_unchecked(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.denominator(x);
        self.sig.eta() / (d * d)
    }
    fn christoffel_analytic(&self, x: &[f64]) -> Option<DenseTensor> {
        let (_, _, f) = self.log_gradient(x);
        let s = &self.sig;
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let eta = |a: usize, b: usize| if a == b { s.eps(a) } else { 0.0 };
        Some(christoffel_tensor(self.dim(), |a, b, c| {
            delta(a, b) * f[c] + delta(a, c) * f[b] - eta(b, c) * s.eps(a) * f[a]
        }))
    }
    fn christoffel_derivative_analytic(&self, x: &[f64]) -> Option<DenseTensor> {
        let (u, d, _) = self.log_gradient(x);
        let k = self.k;
        let s = &self.sig;
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let eta = |a: usize, b: usize| if a == b { s.eps(a) } else { 0.0 };
        let ff = |c: usize, e: usize| -0.5 * k * eta(c, e) / d + 0.25 * k * k * u[c] * u[e] / (d * d);
        Some(christoffel_derivative_tensor(self.dim(), |a, b, c, e| {
            delta(a, b) * ff(c, e) + delta(a, c) * ff(b, e) - eta(b, c) * s.eps(a) * ff(a, e)
        }))
    }
    fn riemann_analytic(&self, x: &[f64]) -> Option<DenseTensor> {
        Some(constant_curvature_riemann(self.k, &matrix_rows(&self.metric_unchecked(x))))
    }
    fn constant_curvature(&self) -> Option<f64> {
        Some(self.k)
    }
    fn label(&self) -> String {
        format!("stereographic(K={}){:?}", self.k, self.sig.entries())
    }
}

/// Graph chart of the pseudo-sphere `K η(x,x) + z² = 1`, positive branch:
/// `g = η + K (ηx)(ηx)ᵀ / (1 - K η(x,x))`.
#[derive(Debug, Clone)]
pub struct PseudoSphereChart {
    k: f64,
    sig: Signature,
}

impl PseudoSphereChart {
    pub fn new(k: f64, sig: Signature) -> Self {
        Self { k, sig }
    }

    pub fn curvature(&self) -> f64 {
        self.k
    }

    /// `1 - K η(x,x)`.
    pub fn w(&self, x: &[f64]) -> f64 {
        1.0 - self.k * self.sig.dot(x, x)
    }

    fn lowered(&self, x: &[f64]) -> Vec<f64> {
        x.iter().enumerate().map(|(i, v)| self.sig.eps(i) * v).collect()
    }
}

impl MetricChart for PseudoSphereChart {
    fn dim(&self) -> usize {
        self.sig.dim()
    }
    fn signature(&self) -> &Signature {
        &self.sig
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.w(x) > 0.0
    }
    fn metric_unchecked(&self, x: &[f64]) -> DMatrix<f64> {
        let u = self.lowered(x);
        let w = self.w(x);
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| {
            let eta = if i == j { self.sig.eps(i) } else { 0.0 };
            eta + self.k * u[i] * u[j] / w
        })
    }
    fn christoffel_analytic(&self, x: &[f64]) -> Option<DenseTensor> {
        let g = self.metric_unchecked(x);
        Some(christoffel_tensor(self.dim(), |a, b, c| self.k * x[a] * g[(b, c)]))
    }
    fn christoffel_derivative_analytic(&self, x: &[f64]) -> Option<DenseTensor> {
        let g = self.metric_unchecked(x);
        let u = self.lowered(x);
        let w = self.w(x);
        let k = self.k;
        let s = &self.sig;
        let eta = |a: usize, b: usize| if a == b { s.eps(a) } else { 0.0 };
        let dg = |b: usize, c: usize, e: usize| {
            k * (eta(b, e) * u[c] + u[b] * eta(c, e)) / w + 2.0 * k * k * u[b] * u[c] * u[e] / (w * w)
        };
        Some(christoffel_derivative_tensor(self.dim(), |a, b, c, e| {
            let de = if a == e { 1.0 } else { 0.0 };
            k * de * g[(b, c)] + k * x[a] * dg(b, c, e)
        }))
    }
    fn riemann_analytic(&self, x: &[f64]) -> Option<DenseTensor> {
        Some(constant_curvature_riemann(self.k, &matrix_rows(&self.metric_unchecked(x))))
    }
    fn constant_curvature(&self) -> Option<f64> {
        Some(self.k)
    }
    fn label(&self) -> String {
        format!("pseudo-sphere(K={}){:?}", self.k, self.sig.entries())
    }
}

type MetricFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;
type ContainsFn = dyn Fn(&[f64]) -> bool + Send + Sync;
type TensorFn = dyn Fn(&[f64]) -> DenseTensor + Send + Sync;

/// A chart assembled from closures.
#[derive(Clone)]
pub struct FnChart {
    sig: Signature,
    label: String,
    metric: Arc<MetricFn>,
    contains: Arc<ContainsFn>,
    christoffel: Option<Arc<TensorFn>>,
    christoffel_derivative: Option<Arc<TensorFn>>,
}

impl std::fmt::Debug for FnChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnChart").field("label", &self.label).field("sig", &self.sig).finish()
    }
}

impl FnChart {
    pub fn new(
        sig: Signature,
        label: impl Into<String>,
        metric: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            sig,
            label: label.into(),
            metric: Arc::new(metric),
            contains: Arc::new(|_| true),
            christoffel: None,
            christoffel_derivative: None,
        }
    }

    pub fn with_domain(mut self, contains: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.contains = Arc::new(contains);
        self
    }

    pub fn with_christoffel(mut self, f: impl Fn(&[f64]) -> DenseTensor + Send + Sync + 'static) -> Self {
        self.christoffel = Some(Arc::new(f));
        self
    }

    pub fn with_christoffel_derivative(mut self, f: impl Fn(&[f64]) -> DenseTensor + Send + Sync + 'static) -> Self {
        self.christoffel_derivative = Some(Arc::new(f));
        self
    }
}

impl MetricChart for FnChart {
    fn dim(&self) -> usize {
        self.sig.dim()
    }
    fn signature(&self) -> &Signature {
        &self.sig
    }
    fn contains(&self, x: &[f64]) -> bool {
        (self.contains)(x)
    }
    fn metric_unchecked(&self, x: &[f64]) -> DMatrix<f64> {
        (self.metric)(x)
    }
    fn christoffel_analytic(&self, x: &[f64]) -> Option<DenseTensor> {
        self.christoffel.as_ref().map(|f| f(x))
    }
    fn christoffel_derivative_analytic(&self, x: &[f64]) -> Option<DenseTensor> {
        self.christoffel_derivative.as_ref().map(|f| f(x))
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `g = diag(1 + ε x1², 1 + ε x0²)` with closed-form connection.
pub fn warped_chart(eps: f64) -> FnChart {
    let h = move |x: &[f64]| [1.0 + eps * x[1] * x[1], 1.0 + eps * x[0] * x[0]];
    // dh[i][c] = ∂_c h_i, ddh[i][c][e]
    let dh = move |x: &[f64]| [[0.0, 2.0 * eps * x[1]], [2.0 * eps * x[0], 0.0]];
    let ddh = move |_: &[f64]| [[[0.0, 0.0], [0.0, 2.0 * eps]], [[2.0 * eps, 0.0], [0.0, 0.0]]];
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let gamma = move |x: &[f64], a: usize, b: usize, c: usize| {
        let (hv, d) = (h(x), dh(x));
        (delta(a, c) * d[a][b] + delta(a, b) * d[a][c] - delta(b, c) * d[b][a]) / (2.0 * hv[a])
    };
    FnChart::new(Signature::euclidean(2), format!("warped eps={eps}"), move |x| {
        let hv = h(x);
        DMatrix::from_row_slice(2, 2, &[hv[0], 0.0, 0.0, hv[1]])
    })
    .with_christoffel(move |x| christoffel_tensor(2, |a, b, c| gamma(x, a, b, c)))
    .with_christoffel_derivative(move |x| {
        let (hv, d, dd) = (h(x), dh(x), ddh(x));
        christoffel_derivative_tensor(2, |a, b, c, e| {
            let bracket = delta(a, c) * d[a][b] + delta(a, b) * d[a][c] - delta(b, c) * d[b][a];
            let dbracket = delta(a, c) * dd[a][b][e] + delta(a, b) * dd[a][c][e] - delta(b, c) * dd[b][a][e];
            -d[a][e] * bracket / (2.0 * hv[a] * hv[a]) + dbracket / (2.0 * hv[a])
        })
    })
}
