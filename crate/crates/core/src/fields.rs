//! Vector and scalar fields on a chart, Lie derivatives of the metric and the
//! Killing operator.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::metrics::{christoffel, Differentiation, MetricChart};

/// Step for central differences of fields and metrics.
pub const FIELD_STEP: f64 = 1e-5;

type VecFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type MatFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;
type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A vector field `ξ^a(x)`, optionally with its Jacobian `∂_b ξ^a`.
#[derive(Clone)]
pub struct VectorField {
    dim: usize,
    f: Arc<VecFn>,
    jacobian: Option<Arc<MatFn>>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField")
            .field("dim", &self.dim)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

/// Richardson-extrapolated central difference of `f` along coordinate `c`.
fn richardson<T>(x: &[f64], c: usize, h: f64, mut f: impl FnMut(&[f64]) -> T) -> T
where
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + Clone,
{
    let s = h * x[c].abs().max(1.0);
    let mut diff = |s: f64| {
        let mut p = x.to_vec();
        let mut m = x.to_vec();
        p[c] += s;
        m[c] -= s;
        (f(&p) - f(&m)) * (0.5 / s)
    };
    let coarse = diff(s);
    let fine = diff(0.5 * s);
    (fine.clone() * 4.0 - coarse) * (1.0 / 3.0)
}

impl VectorField {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self {
            dim,
            f: Arc::new(f),
            jacobian: None,
        }
    }

    /// Supplies `J[(a, b)] = ∂_b ξ^a`.
    pub fn with_jacobian(mut self, j: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(j));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }

    /// `∂_b ξ^a` as `J[(a, b)]`, analytic when supplied.
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        if let Some(j) = &self.jacobian {
            return j(x);
        }
        let n = self.dim;
        let mut out = DMatrix::zeros(n, n);
        for b in 0..n {
            let col = richardson(x, b, FIELD_STEP, |y| nalgebra::DVector::from_vec(self.eval(y)));
            out.set_column(b, &col);
        }
        out
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let f = self.f.clone();
        let out = Self::new(self.dim, move |x| f(x).into_iter().map(|v| lambda * v).collect());
        match &self.jacobian {
            Some(j) => {
                let j = j.clone();
                out.with_jacobian(move |x| j(x) * lambda)
            }
            None => out,
        }
    }

    /// `a ξ + b η`.
    pub fn combine(a: f64, xi: &Self, b: f64, eta: &Self) -> Self {
        let (f, g) = (xi.f.clone(), eta.f.clone());
        let out = Self::new(xi.dim, move |x| f(x).iter().zip(g(x)).map(|(p, q)| a * p + b * q).collect());
        match (&xi.jacobian, &eta.jacobian) {
            (Some(jf), Some(jg)) => {
                let (jf, jg) = (jf.clone(), jg.clone());
                out.with_jacobian(move |x| jf(x) * a + jg(x) * b)
            }
            _ => out,
        }
    }

    /// Directional derivative `ξ(ψ) = ξ^a ∂_a ψ`.
    pub fn apply(&self, psi: &ScalarField, x: &[f64]) -> f64 {
        let v = self.eval(x);
        psi.gradient(x).iter().zip(&v).map(|(g, v)| g * v).sum()
    }
}

/// `[X, Y]^a = X^b ∂_b Y^a - Y^b ∂_b X^a`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    let (x, y) = (x.clone(), y.clone());
    VectorField::new(x.dim, move |p| {
        let (xv, yv) = (DMatrixVec::from(x.eval(p)), DMatrixVec::from(y.eval(p)));
        let out = y.jacobian(p) * xv - x.jacobian(p) * yv;
        out.iter().copied().collect()
    })
}

type DMatrixVec = nalgebra::DVector<f64>;

/// A scalar field, optionally with its gradient.
#[derive(Clone)]
pub struct ScalarField {
    f: Arc<ScalarFn>,
    gradient: Option<Arc<VecFn>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            gradient: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c).with_gradient(|x| vec![0.0; x.len()])
    }

    pub fn with_gradient(mut self, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.gradient {
            Some(g) => g(x),
            None => self.numeric_gradient(x, FIELD_STEP),
        }
    }

    /// Central differences at step `h`, without extrapolation.
    pub fn numeric_gradient(&self, x: &[f64], h: f64) -> Vec<f64> {
        (0..x.len())
            .map(|c| {
                let s = h * x[c].abs().max(1.0);
                let mut p = x.to_vec();
                let mut m = x.to_vec();
                p[c] += s;
                m[c] -= s;
                (self.eval(&p) - self.eval(&m)) / (2.0 * s)
            })
            .collect()
    }
}

fn check_dims(chart: &dyn MetricChart, xi: &VectorField, x: &[f64]) -> Result<()> {
    chart.check_point(x)?;
    if xi.dim != chart.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: chart.dim(),
            got: xi.dim,
        });
    }
    Ok(())
}

/// `(L_ξ g)_ab = ξ^c ∂_c g_ab + g_cb ∂_a ξ^c + g_ac ∂_b ξ^c`, with metric
/// derivatives from Richardson-extrapolated central differences.
pub fn lie_derivative_metric(chart: &dyn MetricChart, xi: &VectorField, x: &[f64]) -> Result<DMatrix<f64>> {
    check_dims(chart, xi, x)?;
    let n = chart.dim();
    let g = chart.metric(x)?;
    let v = xi.eval(x);
    let mut out = DMatrix::zeros(n, n);
    for (c, vc) in v.iter().enumerate() {
        if *vc == 0.0 {
            continue;
        }
        // points the stencil cannot reach make the derivative undefined
        let mut bad = None;
        let dg = richardson(x, c, FIELD_STEP, |y| match chart.metric(y) {
            Ok(m) => m,
            Err(e) => {
                bad = Some(e);
                DMatrix::zeros(n, n)
            }
        });
        if let Some(e) = bad {
            return Err(e);
        }
        out += dg * *vc;
    }
    let j = xi.jacobian(x);
    // g_cb ∂_a ξ^c = (Jᵀ g)_ab
    let t = j.transpose() * &g;
    out += &t + t.transpose();
    Ok(out)
}

/// `∇_μ ξ_ν + ∇_ν ξ_μ` with the chart connection.
pub fn killing_tensor(chart: &dyn MetricChart, xi: &VectorField, x: &[f64]) -> Result<DMatrix<f64>> {
    check_dims(chart, xi, x)?;
    let n = chart.dim();
    let g = chart.metric(x)?;
    let gamma = christoffel(chart, x, Differentiation::Auto)?;
    let v = xi.eval(x);
    let j = xi.jacobian(x);
    // ∇_ν ξ^a = ∂_ν ξ^a + Γ^a_νc ξ^c, stored as cov[(a, ν)]
    let cov = DMatrix::from_fn(n, n, |a, nu| j[(a, nu)] + (0..n).map(|c| gamma.get(&[a, nu, c]) * v[c]).sum::<f64>());
    // ∇_ν ξ_μ = g_μa ∇_ν ξ^a
    let lowered = &g * cov;
    Ok(&lowered + lowered.transpose())
}
