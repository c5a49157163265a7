use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::metrics::{MetricChart, PseudoSphereChart};
use crate::tensor::{DenseTensor, Signature};

/// The hypersurface `K η(x,x) + z² = 1`, `z > 0`, charted by `x`.
///
/// Two ambient descriptions are used. The *normalized* point is `(x, z)`
/// with ambient metric `diag(η, 1/K)`. The *frame* point is
/// `Y = (x, z/√|K|)` with ambient metric `η̃ = diag(η, sign K)`; isometries
/// act on `Y` by pseudo-rotations, and the unit normal is `N = √|K| Y`.
#[derive(Debug, Clone)]
pub struct PseudoSphereEmbedding {
    k: f64,
    sig: Signature,
    ambient: Signature,
}

/// A constant ambient vector split against the hypersurface.
#[derive(Debug, Clone)]
pub struct TangentProjection {
    /// `Ū = U - ⟨U,N⟩ N / ⟨N,N⟩` in frame coordinates.
    pub tangent: Vec<f64>,
    /// `⟨U, N⟩`.
    pub normal_component: f64,
    /// `⟨N, N⟩ = sign K`.
    pub normal_norm: f64,
}

impl TangentProjection {
    /// Chart components of the tangent part.
    pub fn chart_vector(&self) -> Vec<f64> {
        self.tangent[..self.tangent.len() - 1].to_vec()
    }
}

impl PseudoSphereEmbedding {
    pub fn new(k: f64, sig: Signature) -> Result<Self> {
        if k == 0.0 || !k.is_finite() {
            return Err(GeomError::InvalidParameter(format!(
                "pseudo-sphere needs finite nonzero curvature, got {k}"
            )));
        }
        let ambient = sig.extended(&[if k > 0.0 { 1 } else { -1 }]);
        Ok(Self { k, sig, ambient })
    }

    pub fn curvature(&self) -> f64 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.sig.dim()
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// `η̃ = diag(η, sign K)`, the signature the isometries preserve.
    pub fn ambient_signature(&self) -> &Signature {
        &self.ambient
    }

    /// `diag(η, 1/K)`, the metric for normalized points.
    pub fn ambient_metric(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n + 1, n + 1, |i, j| match (i == j, i < n) {
            (false, _) => 0.0,
            (true, true) => self.sig.eps(i),
            (true, false) => 1.0 / self.k,
        })
    }

    /// The closed-form chart of the same space.
    pub fn chart(&self) -> PseudoSphereChart {
        PseudoSphereChart::new(self.k, self.sig.clone())
    }

    fn height(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let w = 1.0 - self.k * self.sig.dot(x, x);
        if w <= 0.0 || !w.is_finite() {
            return Err(GeomError::OutsideValidity { point: x.to_vec() });
        }
        Ok(w.sqrt())
    }

    /// `(x, z)` with `z = √(1 - K η(x,x))`.
    pub fn embed_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        let z = self.height(x)?;
        let mut p = x.to_vec();
        p.push(z);
        Ok(p)
    }

    /// `Y = (x, z/√|K|)`.
    pub fn frame_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut p = self.embed_point(x)?;
        let n = self.dim();
        p[n] /= self.k.abs().sqrt();
        Ok(p)
    }

    /// `|K η(x,x) + z² - 1|` for a normalized point.
    pub fn constraint_residual(&self, p: &[f64]) -> f64 {
        let n = self.dim();
        (self.k * self.sig.dot(&p[..n], &p[..n]) + p[n] * p[n] - 1.0).abs()
    }

    /// `∂(x, z)/∂x`, an `(n+1) × n` matrix.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let z = self.height(x)?;
        let n = self.dim();
        Ok(DMatrix::from_fn(n + 1, n, |i, b| {
            if i < n {
                if i == b {
                    1.0
                } else {
                    0.0
                }
            } else {
                -self.k * self.sig.eps(b) * x[b] / z
            }
        }))
    }

    /// `∂Y/∂x`.
    pub fn frame_jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let mut j = self.jacobian(x)?;
        let n = self.dim();
        let s = 1.0 / self.k.abs().sqrt();
        for b in 0..n {
            j[(n, b)] *= s;
        }
        Ok(j)
    }

    /// `Jᵀ diag(η, 1/K) J`.
    pub fn induced_metric(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let j = self.jacobian(x)?;
        Ok(j.transpose() * self.ambient_metric() * j)
    }

    /// `η(dx,dx) / (W + ε K Λ(x,u))` with `W = 1 - K η(x,x)`,
    /// `Λ(x,u) = η(x,x) η(u,u) - η(x,u)²`, `u = dx/√|g(dx,dx)|` and `ε` the
    /// sign of `g(dx,dx)`.
    pub fn conformal_line_element(&self, x: &[f64], dx: &[f64]) -> Result<f64> {
        let w = self.height(x)?.powi(2);
        let g = self.induced_metric(x)?;
        let v = nalgebra::DVector::from_column_slice(dx);
        let gdx = (v.transpose() * &g * &v)[(0, 0)];
        if gdx == 0.0 {
            return Err(GeomError::NullDirection);
        }
        let scale = gdx.abs().sqrt();
        let u: Vec<f64> = dx.iter().map(|d| d / scale).collect();
        let s = &self.sig;
        let lambda = s.dot(x, x) * s.dot(&u, &u) - s.dot(x, &u).powi(2);
        Ok(s.dot(dx, dx) / (w + gdx.signum() * self.k * lambda))
    }

    /// Splits a constant frame-coordinate vector `U` at `x`.
    pub fn project_constant_vector(&self, u: &[f64], x: &[f64]) -> Result<TangentProjection> {
        let n = self.dim();
        if u.len() != n + 1 {
            return Err(GeomError::DimensionMismatch {
                expected: n + 1,
                got: u.len(),
            });
        }
        let y = self.frame_point(x)?;
        let root = self.k.abs().sqrt();
        let normal: Vec<f64> = y.iter().map(|v| root * v).collect();
        let un = self.ambient.dot(u, &normal);
        let nn = self.ambient.dot(&normal, &normal);
        let tangent = u.iter().zip(&normal).map(|(a, b)| a - un / nn * b).collect();
        Ok(TangentProjection {
            tangent,
            normal_component: un,
            normal_norm: nn,
        })
    }

    /// `-2 √|K| ⟨U,N⟩ / ⟨N,N⟩`, the factor in `L_Ū g = factor · g`.
    pub fn projection_lie_factor(&self, p: &TangentProjection) -> f64 {
        -2.0 * self.k.abs().sqrt() * p.normal_component / p.normal_norm
    }
}

impl MetricChart for PseudoSphereEmbedding {
    fn dim(&self) -> usize {
        self.sig.dim()
    }
    fn signature(&self) -> &Signature {
        &self.sig
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.height(x).is_ok()
    }
    fn metric_unchecked(&self, x: &[f64]) -> DMatrix<f64> {
        self.induced_metric(x).unwrap_or_else(|_| DMatrix::from_element(x.len(), x.len(), f64::NAN))
    }
    fn christoffel_analytic(&self, x: &[f64]) -> Option<DenseTensor> {
        self.chart().christoffel_analytic(x)
    }
    fn christoffel_derivative_analytic(&self, x: &[f64]) -> Option<DenseTensor> {
        self.chart().christoffel_derivative_analytic(x)
    }
    fn label(&self) -> String {
        format!("pseudo-sphere embedding K={} {:?}", self.k, self.sig.entries())
    }
}
