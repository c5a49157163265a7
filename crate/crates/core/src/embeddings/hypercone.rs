//! The null-cone picture of a conformally flat metric `e^{2σ} η`.
//!
//! `y = e^σ (z, η(z,z) - 1/4, η(z,z) + 1/4)` lies on the null cone of
//! `diag(η, +1, -1)` and pulls its flat line element back to
//! `e^{2σ} η(dz,dz)`.

use crate::error::{GeomError, Result};
use crate::fields::{ScalarField, FIELD_STEP};
use crate::radial::closed_form::{tangential_coefficient, tangential_coefficient_derivative};
use crate::tensor::Signature;

#[derive(Debug, Clone)]
pub struct HyperconeEmbedding {
    sig: Signature,
    ambient: Signature,
    sigma: ScalarField,
}

impl HyperconeEmbedding {
    pub fn new(sig: Signature, sigma: ScalarField) -> Self {
        let ambient = sig.extended(&[1, -1]);
        Self { sig, ambient, sigma }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// `diag(η, +1, -1)`.
    pub fn ambient_signature(&self) -> &Signature {
        &self.ambient
    }

    pub fn sigma(&self) -> &ScalarField {
        &self.sigma
    }

    pub fn map(&self, z: &[f64]) -> Result<Vec<f64>> {
        hypercone_map(&self.sig, &self.sigma, z)
    }

    pub fn pullback(&self, z: &[f64], dz: &[f64]) -> Result<f64> {
        hypercone_pullback(&self.sig, &self.sigma, z, dz)
    }
}

fn check(sig: &Signature, v: &[f64]) -> Result<()> {
    if v.len() != sig.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: sig.dim(),
            got: v.len(),
        });
    }
    Ok(())
}

fn cone_base(sig: &Signature, z: &[f64]) -> Vec<f64> {
    let zz = sig.dot(z, z);
    let mut y = z.to_vec();
    y.push(zz - 0.25);
    y.push(zz + 0.25);
    y
}

pub fn hypercone_map(sig: &Signature, sigma: &ScalarField, z: &[f64]) -> Result<Vec<f64>> {
    check(sig, z)?;
    let e = sigma.eval(z).exp();
    Ok(cone_base(sig, z).into_iter().map(|v| e * v).collect())
}

/// `|η̃(y,y)|` relative to the sum of the magnitudes of its terms.
pub fn null_residual(ambient: &Signature, y: &[f64]) -> f64 {
    let scale: f64 = y.iter().map(|v| v * v).sum();
    if scale == 0.0 {
        return 0.0;
    }
    ambient.dot(y, y).abs() / scale
}

/// `η̃(dy, dy)` with `dy = y dσ + e^σ d(base)`, evaluated term by term.
pub fn hypercone_pullback(sig: &Signature, sigma: &ScalarField, z: &[f64], dz: &[f64]) -> Result<f64> {
    check(sig, z)?;
    check(sig, dz)?;
    let ambient = sig.extended(&[1, -1]);
    let e = sigma.eval(z).exp();
    let grad = if sigma.has_analytic_gradient() {
        sigma.gradient(z)
    } else {
        sigma.numeric_gradient(z, FIELD_STEP)
    };
    let dsigma: f64 = grad.iter().zip(dz).map(|(g, d)| g * d).sum();
    let zdz = 2.0 * sig.dot(z, dz);
    let mut dbase = dz.to_vec();
    dbase.push(zdz);
    dbase.push(zdz);
    let dy: Vec<f64> = cone_base(sig, z)
        .iter()
        .zip(&dbase)
        .map(|(b, db)| e * (b * dsigma + db))
        .collect();
    Ok(ambient.dot(&dy, &dy))
}

/// `σ = ½ ln s(K η(z,z))`, the conformal factor of a constant-curvature
/// space along tangential directions in normal coordinates, with its
/// gradient.
pub fn tangential_sigma(k: f64, sig: Signature) -> ScalarField {
    let s1 = sig.clone();
    ScalarField::new(move |z| 0.5 * tangential_coefficient(k * s1.dot(z, z)).ln()).with_gradient(move |z| {
        let x = k * sig.dot(z, z);
        let f = tangential_coefficient_derivative(x) / tangential_coefficient(x) * k;
        z.iter().enumerate().map(|(i, v)| f * sig.eps(i) * v).collect()
    })
}
