//! Killing fields of the pseudo-sphere and tensors they leave invariant.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::PseudoSphereEmbedding;
use crate::error::{GeomError, Result};
use crate::fields::{killing_tensor, VectorField};
use crate::linalg::{nullspace, nullspace_with_reference};
use crate::metrics::MetricChart;

/// Relative singular-value cut for invariant tensors.
pub const NULLSPACE_THRESHOLD: f64 = 1e-8;
/// Equations per unknown demanded of the isotropy system.
pub const OVERSAMPLING: usize = 3;

/// The chart field of the ambient linear map `Y ↦ M Y`, restricted to the
/// hypersurface. `m` acts on frame coordinates.
pub fn linear_field(emb: &PseudoSphereEmbedding, m: DMatrix<f64>) -> VectorField {
    let n = emb.dim();
    let e1 = emb.clone();
    let m1 = m.clone();
    let e2 = emb.clone();
    VectorField::new(n, move |x| match e1.frame_point(x) {
        Ok(y) => (&m1 * DVector::from_vec(y)).rows(0, n).iter().copied().collect(),
        Err(_) => vec![f64::NAN; n],
    })
    .with_jacobian(move |x| match e2.frame_jacobian(x) {
        Ok(dy) => (&m * dy).rows(0, n).into_owned(),
        Err(_) => DMatrix::from_element(n, n, f64::NAN),
    })
}

/// The Killing field of the pseudo-rotation in the `(a, b)` plane.
pub fn generator_field(emb: &PseudoSphereEmbedding, a: usize, b: usize) -> VectorField {
    let m = emb.dim() + 1;
    let eta = emb.ambient_signature();
    let mut r = DMatrix::zeros(m, m);
    if a != b {
        r[(a, b)] = eta.eps(b);
        r[(b, a)] = -eta.eps(a);
    }
    linear_field(emb, r)
}

/// All `n(n+1)/2` pseudo-rotation fields, ordered by `(a, b)` with `a < b`.
pub fn generator_fields(emb: &PseudoSphereEmbedding) -> Vec<VectorField> {
    let m = emb.dim() + 1;
    (0..m)
        .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
        .map(|(a, b)| generator_field(emb, a, b))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KillingReport {
    /// Largest entry of `∇_μ ξ_ν + ∇_ν ξ_μ` over evaluated points.
    pub max_residual: f64,
    pub evaluated: usize,
    /// Points outside the chart, or where the field could not be evaluated.
    pub skipped: usize,
}

pub fn killing_residual(chart: &dyn MetricChart, xi: &VectorField, points: &[Vec<f64>]) -> Result<KillingReport> {
    let per_point: Vec<Option<f64>> = points
        .par_iter()
        .map(|x| {
            if !chart.contains(x) {
                return Ok(None);
            }
            let k = killing_tensor(chart, xi, x)?;
            if k.iter().any(|v| !v.is_finite()) {
                return Ok(None);
            }
            Ok(Some(k.amax()))
        })
        .collect::<Result<_>>()?;
    let evaluated = per_point.iter().flatten().count();
    Ok(KillingReport {
        max_residual: per_point.iter().flatten().copied().fold(0.0, f64::max),
        evaluated,
        skipped: points.len() - evaluated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorSymmetry {
    Antisymmetric,
    Symmetric,
    Unconstrained,
}

impl TensorSymmetry {
    fn basis(self, n: usize) -> Vec<DMatrix<f64>> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let keep = match self {
                    Self::Antisymmetric => i < j,
                    Self::Symmetric => i <= j,
                    Self::Unconstrained => true,
                };
                if !keep {
                    continue;
                }
                let mut e = DMatrix::zeros(n, n);
                e[(i, j)] = 1.0;
                match self {
                    Self::Antisymmetric => e[(j, i)] = -1.0,
                    Self::Symmetric => e[(j, i)] = 1.0,
                    Self::Unconstrained => {}
                }
                out.push(e);
            }
        }
        out
    }

    /// Independent entries of a matrix of this symmetry.
    fn rows(self, m: &DMatrix<f64>) -> Vec<f64> {
        let n = m.nrows();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let keep = match self {
                    Self::Antisymmetric => i < j,
                    Self::Symmetric => i <= j,
                    Self::Unconstrained => true,
                };
                if keep {
                    out.push(m[(i, j)]);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct InvariantTensorSolution {
    /// Solutions `B_ab` at the base point, orthonormal in the entry norm.
    pub basis: Vec<DMatrix<f64>>,
    pub singular_values: Vec<f64>,
    pub gap: f64,
    pub equations: usize,
    pub unknowns: usize,
    /// Dimension of the stabilizer of the base point.
    pub isotropy_dim: usize,
}

impl InvariantTensorSolution {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `|⟨B, t⟩| / (|B| |t|)` for the first basis element.
    pub fn cosine_with(&self, t: &DMatrix<f64>) -> Option<f64> {
        let b = self.basis.first()?;
        Some(b.dot(t).abs() / (b.norm() * t.norm()))
    }
}

/// Tensors `B` at `x0` with `L_ξ B = 0` for every field in the span of
/// `fields`.
///
/// A field vanishing at `x0` acts on `B(x0)` by `Jᵀ B + B J` with `J = ∂ξ`,
/// so invariance reduces to linear conditions from random elements of the
/// stabilizer. `samples` such elements are drawn; at least
/// [`OVERSAMPLING`] are required.
pub fn invariant_tensor_solve(
    chart: &dyn MetricChart,
    fields: &[VectorField],
    symmetry: TensorSymmetry,
    x0: &[f64],
    samples: usize,
    seed: u64,
) -> Result<InvariantTensorSolution> {
    chart.check_point(x0)?;
    let n = chart.dim();
    if let Some(f) = fields.iter().find(|f| f.dim() != n) {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            got: f.dim(),
        });
    }
    let unit = symmetry.basis(n);
    let unknowns = unit.len();
    let values = DMatrix::from_fn(n, fields.len(), |i, k| fields[k].eval(x0)[i]);
    let stabilizer = if fields.is_empty() {
        Vec::new()
    } else {
        nullspace(&values, 1e-10).basis
    };
    let equations = if stabilizer.is_empty() { 0 } else { samples * unknowns };
    if unknowns > 0 && equations < OVERSAMPLING * unknowns {
        return Err(GeomError::InsufficientSampling { equations, unknowns });
    }
    let jacobians: Vec<DMatrix<f64>> = fields.iter().map(|f| f.jacobian(x0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DMatrix::zeros(equations, unknowns);
    // size of the sampled stabilizer action, against which A is judged zero
    let mut reference: f64 = 0.0;
    for s in 0..samples {
        let mut j = DMatrix::zeros(n, n);
        for c in &stabilizer {
            let w: f64 = StandardNormal.sample(&mut rng);
            for (k, jk) in jacobians.iter().enumerate() {
                j += jk * (w * c[k]);
            }
        }
        reference = reference.max(j.norm());
        for (col, e) in unit.iter().enumerate() {
            let image = j.transpose() * e + e * &j;
            for (r, v) in symmetry.rows(&image).into_iter().enumerate() {
                a[(s * unknowns + r, col)] = v;
            }
        }
    }
    let ns = nullspace_with_reference(&a, NULLSPACE_THRESHOLD, reference);
    let basis = ns
        .basis
        .iter()
        .map(|v| unit.iter().zip(v.iter()).fold(DMatrix::zeros(n, n), |acc, (e, c)| acc + e * *c))
        .collect();
    Ok(InvariantTensorSolution {
        basis,
        singular_values: ns.singular_values,
        gap: ns.gap,
        equations,
        unknowns,
        isotropy_dim: stabilizer.len(),
    })
}
