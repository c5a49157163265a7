//! Closed forms for constant curvature in normal coordinates.
//!
//! With `x = K η(z,z)`, the normal-coordinate metric is
//! `G(z) = η - F (η(z,z) η - (ηz)(ηz)ᵀ)` where `F = K h(x)` and
//! `h(x) = (x - sin²√x) / x²`, continued analytically to `x < 0`
//! (`sin → sinh`). The tangential coefficient is `s(x) = sin²√x / x`.

use nalgebra::DMatrix;

use crate::tensor::Signature;

const SERIES_CUTOFF: f64 = 0.5;

/// `sin²√x / x`, continued to `x ≤ 0`.
pub fn tangential_coefficient(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        // Σ_{k≥1} (-1)^{k+1} 2^{2k-1} x^{k-1} / (2k)!
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            let k = k as f64;
            // ratio of consecutive terms: -4x / ((2k+1)(2k+2))
            term *= -4.0 * x / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else if x > 0.0 {
        let s = x.sqrt().sin();
        s * s / x
    } else {
        let s = (-x).sqrt().sinh();
        s * s / -x
    }
}

/// `ds/dx` for [`tangential_coefficient`].
pub fn tangential_coefficient_derivative(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        // Σ_{k≥2} (k-1) c_k x^{k-2}, c_k the coefficients of s
        let mut c = 1.0;
        let mut pow = 1.0;
        let mut sum = 0.0;
        for k in 1..30 {
            let kf = k as f64;
            c *= -4.0 / ((2.0 * kf + 1.0) * (2.0 * kf + 2.0));
            let term = kf * c * pow;
            sum += term;
            pow *= x;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        let r = x.abs().sqrt();
        let sinc2 = if x > 0.0 { (2.0 * r).sin() } else { (2.0 * r).sinh() } / (2.0 * r);
        (sinc2 - tangential_coefficient(x)) / x
    }
}

/// `(x - sin²√x) / x² = (1 - s(x)) / x`, continued to `x ≤ 0`.
pub fn h(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        // Σ_{k≥2} (-1)^k 2^{2k-1} x^{k-2} / (2k)!
        let mut term = 1.0 / 3.0;
        let mut sum = term;
        for k in 2..30 {
            let k = k as f64;
            term *= -4.0 * x / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (1.0 - tangential_coefficient(x)) / x
    }
}

/// `F = K h(K η(z,z))`, the coefficient multiplying the angular-momentum
/// square in the normal-coordinate metric.
pub fn angular_coefficient(k: f64, sig: &Signature, z: &[f64]) -> f64 {
    k * h(k * sig.dot(z, z))
}

/// `η(z,z) η(dz,dz) - η(z,dz)²`, the squared angular momentum of `dz` about
/// the origin.
pub fn angular_square(sig: &Signature, z: &[f64], dz: &[f64]) -> f64 {
    sig.dot(z, z) * sig.dot(dz, dz) - sig.dot(z, dz).powi(2)
}

/// Exact metric at normal coordinates `z` of a space of constant curvature `k`.
pub fn normal_metric(k: f64, sig: &Signature, z: &[f64]) -> DMatrix<f64> {
    let n = sig.dim();
    let f = angular_coefficient(k, sig, z);
    let zz = sig.dot(z, z);
    let u: Vec<f64> = z.iter().enumerate().map(|(i, v)| sig.eps(i) * v).collect();
    DMatrix::from_fn(n, n, |i, j| {
        let eta = if i == j { sig.eps(i) } else { 0.0 };
        eta - f * (zz * eta - u[i] * u[j])
    })
}
