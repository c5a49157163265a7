//! Cartan's radial equations for the connection in normal coordinates.
//!
//! Along the ray `u = z t` the orthonormal coframe is
//! `ϖ^A = t dz^A + A^A_CD(t) z^C dz^D`, with `A` and the auxiliary `B` obeying
//!
//! ```text
//! A''_ACD  = t z^B R_ABCD + Σ_N Q_AN ε_N A_NCD,        Q_AN  = z^L z^M R_ALMN
//! B''_ABCD = t R_ABCD     + Σ_N W_ABN ε_N z^M B_NMCD,  W_ABN = z^L R_ABLN
//! ```
//!
//! from zero initial data. All frame indices are lowered with `η`; `R` is
//! the frame curvature along the ray.

pub mod closed_form;
mod normal_tensor;
mod source;
mod taylor;

pub use normal_tensor::{normal_tensor_from_curvature, NormalTensor};
pub use source::{ChartCurvatureSource, ConstantCurvatureSource, CurvatureSource, FnCurvatureSource};
pub use taylor::{taylor_metric, CurvatureExpansion};

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::ode::{rk4_step, step_count};
use crate::tensor::{check_symmetry, DenseTensor, Signature, SymmetryClass};

/// Default step in `t`.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Richardson mismatch above which a run is flagged.
pub const RICHARDSON_TOLERANCE: f64 = 1e-8;

/// Samples of `A_ACD(t)` and `B_ABCD(t)` along one ray.
#[derive(Debug, Clone)]
pub struct RadialConnection {
    pub z: Vec<f64>,
    pub signature: Signature,
    pub ts: Vec<f64>,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    /// The curvature source failed before `t = 1`.
    pub partial: bool,
    /// Half-step Richardson comparison exceeded its tolerance.
    pub flagged: bool,
    /// Largest half-step mismatch seen, when a check was run.
    pub richardson_mismatch: Option<f64>,
}

impl RadialConnection {
    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    fn n(&self) -> usize {
        self.signature.dim()
    }

    pub fn a(&self, k: usize) -> DenseTensor {
        let n = self.n();
        DenseTensor::covariant(3, n, |i| self.a[k][(i[0] * n + i[1]) * n + i[2]])
    }

    pub fn b(&self, k: usize) -> DenseTensor {
        let n = self.n();
        DenseTensor::covariant(4, n, |i| self.b[k][((i[0] * n + i[1]) * n + i[2]) * n + i[3]])
    }

    pub fn final_a(&self) -> DenseTensor {
        self.a(self.len() - 1)
    }

    pub fn final_b(&self) -> DenseTensor {
        self.b(self.len() - 1)
    }

    /// Largest antisymmetry violations of `A` (in `C,D`) and `B` (in `A,B` and
    /// in `C,D`) over every stored sample.
    pub fn max_symmetry_violation(&self) -> (f64, f64) {
        let mut va: f64 = 0.0;
        let mut vb: f64 = 0.0;
        for k in 0..self.len() {
            va = va.max(check_symmetry(&self.a(k), SymmetryClass::AntisymmetricPair(1, 2), 0.0).max_violation);
            let b = self.b(k);
            vb = vb.max(check_symmetry(&b, SymmetryClass::AntisymmetricPair(0, 1), 0.0).max_violation);
            vb = vb.max(check_symmetry(&b, SymmetryClass::AntisymmetricPair(2, 3), 0.0).max_violation);
        }
        (va, vb)
    }

    /// Same metric as [`hypersurface_metric`] but read straight off the
    /// coframe: `η_AB ϖ^A ϖ^B` at `t = 1`.
    pub fn coframe_metric(&self) -> DMatrix<f64> {
        let n = self.n();
        let a = self.a.last().expect("non-empty");
        let z = &self.z;
        // ϖ^A = dz^A + ε_A Σ_C A_ACD z^C dz^D = Σ_D W[A][D] dz^D
        let w = DMatrix::from_fn(n, n, |ai, d| {
            let delta = if ai == d { 1.0 } else { 0.0 };
            delta + self.signature.eps(ai) * (0..n).map(|c| a[(ai * n + c) * n + d] * z[c]).sum::<f64>()
        });
        w.transpose() * self.signature.eta() * w
    }
}

fn frame_curvature_values(r: &DenseTensor, n: usize) -> Result<&[f64]> {
    if r.dims() != [n, n, n, n] {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            got: r.dims().first().copied().unwrap_or(0),
        });
    }
    Ok(r.values())
}

fn radial_rhs(r: &[f64], sig: &Signature, z: &[f64], t: f64, y: &[f64]) -> Vec<f64> {
    let n = z.len();
    let (n3, n4) = (n * n * n, n * n * n * n);
    let a = &y[..n3];
    let ad = &y[n3..2 * n3];
    let b = &y[2 * n3..2 * n3 + n4];
    let bd = &y[2 * n3 + n4..];
    let ri = |a: usize, b: usize, c: usize, d: usize| r[((a * n + b) * n + c) * n + d];
    let eps: Vec<f64> = (0..n).map(|i| sig.eps(i)).collect();

    let mut q = vec![0.0; n * n];
    let mut w = vec![0.0; n3];
    let mut rz = vec![0.0; n3]; // z^B R_ABCD as [A][C][D]
    for a_ in 0..n {
        for l in 0..n {
            for m in 0..n {
                for nn in 0..n {
                    let v = ri(a_, l, m, nn);
                    q[a_ * n + nn] += z[l] * z[m] * v;
                    w[(a_ * n + l) * n + nn] += z[m] * v; // W_{A L N} with L the second index
                    rz[(a_ * n + m) * n + nn] += z[l] * v;
                }
            }
        }
    }
    // zb[N][C][D] = z^M B_NMCD
    let mut zb = vec![0.0; n3];
    for nn in 0..n {
        for m in 0..n {
            for c in 0..n {
                for d in 0..n {
                    zb[(nn * n + c) * n + d] += z[m] * b[((nn * n + m) * n + c) * n + d];
                }
            }
        }
    }

    let mut out = Vec::with_capacity(y.len());
    out.extend_from_slice(ad);
    for a_ in 0..n {
        for c in 0..n {
            for d in 0..n {
                let mut v = t * rz[(a_ * n + c) * n + d];
                for nn in 0..n {
                    v += q[a_ * n + nn] * eps[nn] * a[(nn * n + c) * n + d];
                }
                out.push(v);
            }
        }
    }
    out.extend_from_slice(bd);
    for a_ in 0..n {
        for b_ in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = t * ri(a_, b_, c, d);
                    for nn in 0..n {
                        // W_ABN = z^L R_ABLN
                        let wabn: f64 = (0..n).map(|l| z[l] * ri(a_, b_, l, nn)).sum();
                        v += wabn * eps[nn] * zb[(nn * n + c) * n + d];
                    }
                    out.push(v);
                }
            }
        }
    }
    let _ = w;
    out
}

/// Integrates the radial system along `z` from `t = 0` to `t = 1`.
pub fn integrate_radial(source: &dyn CurvatureSource, z: &[f64], step: f64) -> Result<RadialConnection> {
    let sig = source.signature().clone();
    let n = sig.dim();
    if z.len() != n {
        return Err(GeomError::DimensionMismatch { expected: n, got: z.len() });
    }
    if step <= 0.0 || !step.is_finite() {
        return Err(GeomError::InvalidParameter(format!("step must be positive, got {step}")));
    }
    let (n3, n4) = (n * n * n, n * n * n * n);
    let steps = step_count(1.0, step);
    let h = 1.0 / steps as f64;
    let mut y = vec![0.0; 2 * n3 + 2 * n4];
    let mut rc = RadialConnection {
        z: z.to_vec(),
        signature: sig.clone(),
        ts: vec![0.0],
        a: vec![vec![0.0; n3]],
        b: vec![vec![0.0; n4]],
        partial: false,
        flagged: false,
        richardson_mismatch: None,
    };
    let mut rhs = |t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let r = source.curvature(t, z)?;
        Ok(radial_rhs(frame_curvature_values(&r, n)?, &sig, z, t, y))
    };
    for k in 0..steps {
        let t = k as f64 * h;
        match rk4_step(&mut rhs, t, &y, h) {
            Ok(next) => y = next,
            Err(GeomError::DimensionMismatch { expected, got }) => return Err(GeomError::DimensionMismatch { expected, got }),
            Err(_) => {
                rc.partial = true;
                return Ok(rc);
            }
        }
        rc.ts.push(if k + 1 == steps { 1.0 } else { (k + 1) as f64 * h });
        rc.a.push(y[..n3].to_vec());
        rc.b.push(y[2 * n3..2 * n3 + n4].to_vec());
    }
    Ok(rc)
}

/// [`integrate_radial`] plus a rerun at half the step; the run is flagged when
/// the final `A` or `B` differ by more than [`RICHARDSON_TOLERANCE`].
pub fn integrate_radial_checked(source: &dyn CurvatureSource, z: &[f64], step: f64) -> Result<RadialConnection> {
    let mut coarse = integrate_radial(source, z, step)?;
    let fine = integrate_radial(source, z, 0.5 * step)?;
    if coarse.partial || fine.partial {
        coarse.partial = true;
        return Ok(coarse);
    }
    let (la, lb) = (coarse.a.last().unwrap(), coarse.b.last().unwrap());
    let (fa, fb) = (fine.a.last().unwrap(), fine.b.last().unwrap());
    let mismatch = la
        .iter()
        .zip(fa)
        .chain(lb.iter().zip(fb))
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    coarse.richardson_mismatch = Some(mismatch);
    coarse.flagged = mismatch > RICHARDSON_TOLERANCE;
    Ok(coarse)
}

/// Matrix of the quadratic form `dz ↦ T_ABCD X^AB Y^CD` with
/// `X^AB = z^B dz^A - z^A dz^B` and `Y^CD = z^C dz^D - z^D dz^C`.
pub fn pair_quadratic_form(t: &DenseTensor, z: &[f64]) -> DMatrix<f64> {
    let n = z.len();
    let v = t.values();
    let ti = |a: usize, b: usize, c: usize, d: usize| v[((a * n + b) * n + c) * n + d];
    let m = DMatrix::from_fn(n, n, |e, f| {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                let zz = z[p] * z[q];
                if zz == 0.0 {
                    continue;
                }
                s += zz * (ti(e, p, q, f) - ti(e, p, f, q) - ti(p, e, q, f) + ti(p, e, f, q));
            }
        }
        s
    });
    (&m + m.transpose()) * 0.5
}

/// Line element at `t = 1`:
/// `η(dz,dz) + ½ B_ABCD X^AB Y^CD + η^MN P_M P_N`, `P_M = A_MCD z^C dz^D`.
pub fn hypersurface_metric(rc: &RadialConnection) -> DMatrix<f64> {
    let n = rc.signature.dim();
    let z = &rc.z;
    let a = rc.a.last().expect("non-empty");
    let eta = rc.signature.eta();
    let b_form = pair_quadratic_form(&rc.final_b(), z) * 0.5;
    // P[M][D] = A_MCD z^C
    let p = DMatrix::from_fn(n, n, |m, d| (0..n).map(|c| a[(m * n + c) * n + d] * z[c]).sum::<f64>());
    let a_form = p.transpose() * &eta * &p;
    eta + b_form + a_form
}

#[cfg(test)]
mod tests;
