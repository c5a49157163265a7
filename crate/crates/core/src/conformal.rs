//! Angular-momentum form of the normal-coordinate line element, the
//! along-curve conformal factor, the proper-time split and the stereographic
//! transform of constant-curvature spaces.

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::fields::{lie_derivative_metric, ScalarField, VectorField};
use crate::geodesic::NormalChart;
use crate::metrics::MetricChart;
use crate::radial::closed_form::{angular_coefficient, normal_metric};
use crate::tensor::Signature;

/// A metric written in normal coordinates around some origin.
pub trait NormalForm {
    fn signature(&self) -> &Signature;
    fn normal_metric(&self, z: &[f64]) -> Result<DMatrix<f64>>;
}

/// Closed-form normal coordinates of a space of constant curvature `k`.
#[derive(Debug, Clone)]
pub struct ConstantCurvatureNormal {
    pub k: f64,
    pub signature: Signature,
}

impl ConstantCurvatureNormal {
    pub fn new(k: f64, signature: Signature) -> Self {
        Self { k, signature }
    }
}

impl NormalForm for ConstantCurvatureNormal {
    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn normal_metric(&self, z: &[f64]) -> Result<DMatrix<f64>> {
        if z.len() != self.signature.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.signature.dim(),
                got: z.len(),
            });
        }
        Ok(normal_metric(self.k, &self.signature, z))
    }
}

impl<C: MetricChart> NormalForm for NormalChart<C> {
    fn signature(&self) -> &Signature {
        &self.frame().signature
    }

    fn normal_metric(&self, z: &[f64]) -> Result<DMatrix<f64>> {
        self.pullback_metric(z)
    }
}

fn quad(m: &DMatrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[i] * m[(i, j)] * b[j]).sum::<f64>()).sum()
}

/// `L^AB = z^A dz^B - z^B dz^A`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularMomentum {
    pub l: DMatrix<f64>,
}

impl AngularMomentum {
    /// Half the full `η`-contraction, `½ L^AB L_AB`, which equals
    /// `η(z,z) η(dz,dz) - η(z,dz)²`.
    pub fn square(&self, sig: &Signature) -> f64 {
        let n = self.l.nrows();
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += sig.eps(a) * sig.eps(b) * self.l[(a, b)].powi(2);
            }
        }
        0.5 * s
    }

    /// `L^AB z_A z_B`, zero for any `z` by antisymmetry.
    pub fn radial_contraction(&self, sig: &Signature, z: &[f64]) -> f64 {
        let u: Vec<f64> = z.iter().enumerate().map(|(i, v)| sig.eps(i) * v).collect();
        let n = u.len();
        // pair (a,b) with (b,a) so the cancellation is exact in floating point
        let mut s = 0.0;
        for a in 0..n {
            s += self.l[(a, a)] * u[a] * u[a];
            for b in (a + 1)..n {
                s += (self.l[(a, b)] + self.l[(b, a)]) * u[a] * u[b];
            }
        }
        s
    }
}

pub fn angular_momentum(z: &[f64], dz: &[f64]) -> Result<AngularMomentum> {
    if z.len() != dz.len() {
        return Err(GeomError::DimensionMismatch {
            expected: z.len(),
            got: dz.len(),
        });
    }
    let n = z.len();
    Ok(AngularMomentum {
        l: DMatrix::from_fn(n, n, |a, b| z[a] * dz[b] - z[b] * dz[a]),
    })
}

/// `σ` at `z` along `dz`, with `G(dz,dz) = exp(2σ) η(dz,dz)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalFactorSample {
    pub z: Vec<f64>,
    pub dz: Vec<f64>,
    pub sigma: f64,
}

impl ConformalFactorSample {
    pub fn exp_minus_two_sigma(&self) -> f64 {
        (-2.0 * self.sigma).exp()
    }
}

/// Null test relative to the Euclidean size of `dz`.
fn is_null(sig: &Signature, dz: &[f64]) -> bool {
    let scale: f64 = dz.iter().map(|v| v * v).sum();
    scale == 0.0 || sig.dot(dz, dz).abs() <= 1e-14 * scale
}

/// Solves `G(dz,dz) = exp(2σ) η(dz,dz)` for `σ` and rechecks the identity.
pub fn along_curve_sigma(nf: &dyn NormalForm, z: &[f64], dz: &[f64]) -> Result<ConformalFactorSample> {
    let sig = nf.signature();
    if dz.len() != sig.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: sig.dim(),
            got: dz.len(),
        });
    }
    if is_null(sig, dz) {
        return Err(GeomError::NullDirection);
    }
    let g = nf.normal_metric(z)?;
    let full = quad(&g, dz, dz);
    let flat = sig.dot(dz, dz);
    let ratio = full / flat;
    if ratio <= 0.0 || !ratio.is_finite() {
        // the full metric reverses or nulls the causal character of dz
        return Err(GeomError::NullDirection);
    }
    let sigma = 0.5 * ratio.ln();
    let residual = (full - (2.0 * sigma).exp() * flat).abs();
    if residual > 1e-10 * full.abs().max(1.0) {
        return Err(GeomError::NoConvergence { iterations: 1, residual });
    }
    Ok(ConformalFactorSample {
        z: z.to_vec(),
        dz: dz.to_vec(),
        sigma,
    })
}

/// Closed form for constant curvature: `exp(-2σ) = 1 + ε F Λ(z, u)` with `u`
/// the tangent normalized by the full metric (`G(u,u) = ε = ±1`) and
/// `Λ = ½ L^AB L_AB`.
pub fn constant_curvature_exp_minus_two_sigma(k: f64, sig: &Signature, z: &[f64], dz: &[f64]) -> Result<f64> {
    if is_null(sig, dz) {
        return Err(GeomError::NullDirection);
    }
    let g = normal_metric(k, sig, z);
    let full = quad(&g, dz, dz);
    if full == 0.0 || !full.is_finite() {
        return Err(GeomError::NullDirection);
    }
    let eps = full.signum();
    let u: Vec<f64> = dz.iter().map(|v| v / full.abs().sqrt()).collect();
    let l = angular_momentum(z, &u)?;
    Ok(1.0 + eps * angular_coefficient(k, sig, z) * l.square(sig))
}

/// `ds² = dρ² + Σ_{a≠τ} η_aa (dz^a)²` with `τ` the distinguished coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct ProperTimeSplit {
    /// Coefficient of `dτ²` in `dρ²`.
    pub coefficient: f64,
    pub dtau: f64,
    /// The flat remainder as a quadratic form (the `τ` row and column are zero).
    pub spatial: DMatrix<f64>,
}

impl ProperTimeSplit {
    pub fn d_rho_squared(&self) -> f64 {
        self.coefficient * self.dtau * self.dtau
    }

    pub fn total(&self, dz: &[f64]) -> f64 {
        self.d_rho_squared() + quad(&self.spatial, dz, dz)
    }
}

pub fn proper_time_split(nf: &dyn NormalForm, z: &[f64], dz: &[f64], time_index: usize) -> Result<ProperTimeSplit> {
    let sig = nf.signature();
    let n = sig.dim();
    if dz.len() != n {
        return Err(GeomError::DimensionMismatch { expected: n, got: dz.len() });
    }
    if time_index >= n {
        return Err(GeomError::IndexOutOfRange { index: time_index, rank: n });
    }
    let dtau = dz[time_index];
    if dtau == 0.0 {
        return Err(GeomError::InapplicableSplit);
    }
    let g = nf.normal_metric(z)?;
    let eta = sig.eta();
    let excess = quad(&(&g - &eta), dz, dz);
    let mut spatial = eta.clone();
    spatial[(time_index, time_index)] = 0.0;
    Ok(ProperTimeSplit {
        coefficient: sig.eps(time_index) + excess / (dtau * dtau),
        dtau,
        spatial,
    })
}

/// Stereographic coordinates of a point of the positive pseudo-sphere branch:
/// `Ω = 2x / (1 + z)` with `z = √(1 - K η(x,x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct StereographicImage {
    pub omega: Vec<f64>,
    /// `(1 + K η(Ω,Ω)/4)^-2`.
    pub factor: f64,
}

fn height(k: f64, sig: &Signature, x: &[f64]) -> Result<f64> {
    let w = 1.0 - k * sig.dot(x, x);
    if w <= 0.0 || !w.is_finite() {
        return Err(GeomError::OutsideValidity { point: x.to_vec() });
    }
    Ok(w.sqrt())
}

pub fn stereographic_transform(k: f64, sig: &Signature, x: &[f64]) -> Result<StereographicImage> {
    let z = height(k, sig, x)?;
    if 1.0 + z <= f64::EPSILON {
        return Err(GeomError::StereographicPole { point: x.to_vec() });
    }
    let omega: Vec<f64> = x.iter().map(|v| 2.0 * v / (1.0 + z)).collect();
    let d = 1.0 + k * sig.dot(&omega, &omega) / 4.0;
    Ok(StereographicImage {
        factor: 1.0 / (d * d),
        omega,
    })
}

/// `x = Ω / D`, `z = (1 - K η(Ω,Ω)/4) / D`, `D = 1 + K η(Ω,Ω)/4`. Points with
/// `D ≤ 0` or landing on the other branch are rejected.
pub fn stereographic_inverse(k: f64, sig: &Signature, omega: &[f64]) -> Result<Vec<f64>> {
    let q = k * sig.dot(omega, omega) / 4.0;
    let d = 1.0 + q;
    if d <= 0.0 || !d.is_finite() {
        return Err(GeomError::StereographicPole { point: omega.to_vec() });
    }
    if (1.0 - q) / d <= 0.0 {
        return Err(GeomError::OutsideValidity { point: omega.to_vec() });
    }
    Ok(omega.iter().map(|v| v / d).collect())
}

/// `∂Ω^a/∂x^b`.
pub fn stereographic_jacobian(k: f64, sig: &Signature, x: &[f64]) -> Result<DMatrix<f64>> {
    let z = height(k, sig, x)?;
    let n = x.len();
    let p = 1.0 + z;
    // ∂z/∂x^b = -K η_bb x^b / z
    let dz: Vec<f64> = (0..n).map(|b| -k * sig.eps(b) * x[b] / z).collect();
    Ok(DMatrix::from_fn(n, n, |a, b| {
        let delta = if a == b { 1.0 } else { 0.0 };
        2.0 * delta / p - 2.0 * x[a] * dz[b] / (p * p)
    }))
}

/// Outcome of checking that a conformal Killing field of `g` with
/// `g' = exp(2ψ) g` is a Killing field of `g'`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    /// Largest `|g' - exp(2ψ) g|`, relative to `|g'|`.
    pub patch_residual: f64,
    /// Largest `|2 ξ(ψ) g + L_ξ g|`.
    pub conformal_residual: f64,
    /// Largest `|L_ξ g'|`.
    pub killing_residual: f64,
    pub points: usize,
}

/// Evaluates `2 ξ(ψ) g + L_ξ g` and `L_ξ g'` at `points`, after checking the
/// two charts are conformally related there to `1e-8`.
pub fn conformal_killing_transfer(
    xi: &VectorField,
    psi: &ScalarField,
    g: &dyn MetricChart,
    g_prime: &dyn MetricChart,
    points: &[Vec<f64>],
) -> Result<TransferReport> {
    let mut report = TransferReport {
        patch_residual: 0.0,
        conformal_residual: 0.0,
        killing_residual: 0.0,
        points: points.len(),
    };
    for x in points {
        let gx = g.metric(x)?;
        let gp = g_prime.metric(x)?;
        let scaled = &gx * (2.0 * psi.eval(x)).exp();
        let mismatch = (&gp - &scaled).amax() / gp.amax().max(f64::MIN_POSITIVE);
        report.patch_residual = report.patch_residual.max(mismatch);
        if mismatch > 1e-8 {
            return Err(GeomError::PatchMismatch { residual: mismatch });
        }
        let conformal = gx * (2.0 * xi.apply(psi, x)) + lie_derivative_metric(g, xi, x)?;
        report.conformal_residual = report.conformal_residual.max(conformal.amax());
        report.killing_residual = report.killing_residual.max(lie_derivative_metric(g_prime, xi, x)?.amax());
    }
    Ok(report)
}
