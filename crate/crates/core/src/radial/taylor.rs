use nalgebra::DMatrix;

use super::pair_quadratic_form;
use super::source::to_frame;
use crate::error::{GeomError, Result};
use crate::metrics::{covariant_derivative_riemann, riemann, vielbein_at, Differentiation, MetricChart};
use crate::tensor::{constant_curvature_riemann, matrix_rows, DenseTensor, Signature};

/// Curvature and its first covariant derivative at the origin, in the origin
/// frame. `dr` is stored with the derivative index last.
#[derive(Debug, Clone)]
pub struct CurvatureExpansion {
    pub signature: Signature,
    pub r: DenseTensor,
    pub dr: DenseTensor,
}

impl CurvatureExpansion {
    pub fn constant(k: f64, signature: Signature) -> Self {
        let n = signature.dim();
        Self {
            r: constant_curvature_riemann(k, &matrix_rows(&signature.eta())),
            dr: DenseTensor::covariant(5, n, |_| 0.0),
            signature,
        }
    }

    pub fn from_chart(chart: &dyn MetricChart, origin: &[f64], how: Differentiation) -> Result<Self> {
        let frame = vielbein_at(chart, origin)?;
        let n = chart.dim();
        let f = frame.frame_vectors();
        let m: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|i| f[(i, a)]).collect()).collect();
        let r = riemann(chart, origin, how)?;
        let dr = covariant_derivative_riemann(chart, origin, how)?;
        Ok(Self {
            r: to_frame(&r, &m)?,
            dr: to_frame(&dr, &m)?,
            signature: frame.signature,
        })
    }

    /// `R + ½ z^e ∇_e R`.
    pub fn effective_curvature(&self, z: &[f64]) -> DenseTensor {
        let n = z.len();
        let dr = self.dr.values();
        DenseTensor::covariant(4, n, |i| {
            let base = (((i[0] * n + i[1]) * n + i[2]) * n + i[3]) * n;
            let grad: f64 = (0..n).map(|e| z[e] * dr[base + e]).sum();
            self.r.get(i) + 0.5 * grad
        })
    }
}

/// Metric in normal coordinates through third order:
/// `η + (1/12) (R + ½ z^e ∇_e R)_ABCD X^AB Y^CD`.
pub fn taylor_metric(exp: &CurvatureExpansion, z: &[f64]) -> Result<DMatrix<f64>> {
    let n = exp.signature.dim();
    if z.len() != n {
        return Err(GeomError::DimensionMismatch { expected: n, got: z.len() });
    }
    Ok(exp.signature.eta() + pair_quadratic_form(&exp.effective_curvature(z), z) / 12.0)
}
