//! Geodesics, Jacobi fields and normal charts built by shooting.

mod conjugate;
mod normal;

pub use conjugate::{conjugate_scan, ConjugateScan};
pub use normal::{NormalChart, NormalChartOptions, RadiusGuard};

use crate::error::{GeomError, Result};
use crate::metrics::{christoffel, christoffel_derivative, Differentiation, MetricChart};
use crate::ode::{rk4_step, step_count};

/// Default affine step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Coordinates beyond this magnitude count as leaving the chart.
pub const ESCAPE_RADIUS: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicState {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub states: Vec<GeodesicState>,
    /// The trajectory left the validity region before `t_end`.
    pub exited: bool,
}

impl GeodesicPath {
    pub fn last(&self) -> &GeodesicState {
        self.states.last().expect("path holds the initial state")
    }
}

/// `g(x)[v, v]`.
pub fn norm_squared(chart: &dyn MetricChart, x: &[f64], v: &[f64]) -> Result<f64> {
    let g = chart.metric(x)?;
    let n = v.len();
    Ok((0..n).map(|i| (0..n).map(|j| g[(i, j)] * v[i] * v[j]).sum::<f64>()).sum())
}

/// `-Γ^a_bc v^b w^c`, symmetrized input allowed.
pub(crate) fn contract_gamma(gamma: &[f64], n: usize, v: &[f64], w: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|a| {
            let mut s = 0.0;
            for b in 0..n {
                if v[b] == 0.0 {
                    continue;
                }
                for c in 0..n {
                    s += gamma[(a * n + b) * n + c] * v[b] * w[c];
                }
            }
            -s
        })
        .collect()
}

pub(crate) fn inside(chart: &dyn MetricChart, x: &[f64]) -> bool {
    x.iter().all(|c| c.is_finite() && c.abs() <= ESCAPE_RADIUS) && chart.contains(x)
}

fn exit_error(x: &[f64]) -> GeomError {
    GeomError::OutsideValidity { point: x.to_vec() }
}

pub(crate) fn geodesic_rhs(chart: &dyn MetricChart, y: &[f64]) -> Result<Vec<f64>> {
    let n = chart.dim();
    let (x, v) = y.split_at(n);
    if !inside(chart, x) {
        return Err(exit_error(x));
    }
    let gamma = christoffel(chart, x, Differentiation::Auto)?;
    let mut out = v.to_vec();
    out.extend(contract_gamma(gamma.values(), n, v, v));
    Ok(out)
}

/// Fixed-step fourth-order integration of the geodesic equation. Leaving the
/// chart ends the path early with `exited` set.
pub fn integrate_geodesic(chart: &dyn MetricChart, state0: &GeodesicState, t_end: f64, step: f64) -> Result<GeodesicPath> {
    if step <= 0.0 || !step.is_finite() {
        return Err(GeomError::InvalidParameter(format!("step must be positive, got {step}")));
    }
    chart.check_point(&state0.x)?;
    let n = chart.dim();
    if state0.v.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            got: state0.v.len(),
        });
    }
    let steps = step_count(t_end - state0.t, step);
    let h = (t_end - state0.t) / steps as f64;
    let mut y: Vec<f64> = state0.x.iter().chain(&state0.v).copied().collect();
    let mut states = vec![state0.clone()];
    let mut rhs = |_t: f64, y: &[f64]| geodesic_rhs(chart, y);
    for k in 0..steps {
        let t = state0.t + k as f64 * h;
        match rk4_step(&mut rhs, t, &y, h) {
            Ok(next) if inside(chart, &next[..n]) => y = next,
            Ok(_) | Err(GeomError::OutsideValidity { .. }) => return Ok(GeodesicPath { states, exited: true }),
            Err(e) => return Err(e),
        }
        let t = if k + 1 == steps { t_end } else { state0.t + (k + 1) as f64 * h };
        states.push(GeodesicState {
            t,
            x: y[..n].to_vec(),
            v: y[n..].to_vec(),
        });
    }
    Ok(GeodesicPath { states, exited: false })
}

/// Right-hand side for the geodesic plus `m` Jacobi fields.
///
/// Layout: `x`, `v`, then `J` and `J'` as `n × m` row-major blocks.
pub(crate) fn jacobi_rhs(chart: &dyn MetricChart, y: &[f64], m: usize) -> Result<Vec<f64>> {
    let n = chart.dim();
    let x = &y[..n];
    let v = &y[n..2 * n];
    let j = &y[2 * n..2 * n + n * m];
    let jd = &y[2 * n + n * m..];
    if !inside(chart, x) {
        return Err(exit_error(x));
    }
    let gamma = christoffel(chart, x, Differentiation::Auto)?;
    let dgamma = christoffel_derivative(chart, x, Differentiation::Auto)?;
    let (g, dg) = (gamma.values(), dgamma.values());
    let mut out = Vec::with_capacity(y.len());
    out.extend_from_slice(v);
    out.extend(contract_gamma(g, n, v, v));
    out.extend_from_slice(jd);
    // J'' = -∂_r Γ^a_bc J^r v^b v^c - 2 Γ^a_bc v^b J'^c
    let mut vv = vec![0.0; n * n * n]; // [a][r] = ∂_r Γ^a_bc v^b v^c
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let w = v[b] * v[c];
                if w == 0.0 {
                    continue;
                }
                for r in 0..n {
                    vv[a * n + r] += dg[((a * n + b) * n + c) * n + r] * w;
                }
            }
        }
    }
    let mut gv = vec![0.0; n * n]; // [a][c] = Γ^a_bc v^b
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                gv[a * n + c] += g[(a * n + b) * n + c] * v[b];
            }
        }
    }
    for a in 0..n {
        for k in 0..m {
            let mut s = 0.0;
            for r in 0..n {
                s -= vv[a * n + r] * j[r * m + k] + 2.0 * gv[a * n + r] * jd[r * m + k];
            }
            out.push(s);
        }
    }
    Ok(out)
}

/// Right-hand side for the geodesic plus `m` parallel-transported vectors:
/// `P' = -Γ(v, P)`.
pub(crate) fn transport_rhs(chart: &dyn MetricChart, y: &[f64], m: usize) -> Result<Vec<f64>> {
    let n = chart.dim();
    let x = &y[..n];
    let v = &y[n..2 * n];
    let p = &y[2 * n..];
    if !inside(chart, x) {
        return Err(exit_error(x));
    }
    let gamma = christoffel(chart, x, Differentiation::Auto)?;
    let g = gamma.values();
    let mut out = Vec::with_capacity(y.len());
    out.extend_from_slice(v);
    out.extend(contract_gamma(g, n, v, v));
    for a in 0..n {
        for k in 0..m {
            let mut s = 0.0;
            for b in 0..n {
                for c in 0..n {
                    s -= g[(a * n + b) * n + c] * v[b] * p[c * m + k];
                }
            }
            out.push(s);
        }
    }
    Ok(out)
}

/// A geodesic sample carrying transported vectors (`n × m`, row-major).
#[derive(Debug, Clone)]
pub struct TransportedFrame {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub frame: Vec<f64>,
}

/// Parallel transport of the columns of `frame` (`n × m`, row-major) along the
/// geodesic from `(x0, v0)`, sampled at every step and at half steps.
pub fn parallel_transport(
    chart: &dyn MetricChart,
    x0: &[f64],
    v0: &[f64],
    frame: &[f64],
    t_end: f64,
    step: f64,
) -> Result<Vec<TransportedFrame>> {
    let n = chart.dim();
    let m = frame.len() / n;
    let steps = step_count(t_end, step);
    let h = t_end / steps as f64;
    let mut rhs = |_t: f64, y: &[f64]| transport_rhs(chart, y, m);
    let pack = |t: f64, y: &[f64]| TransportedFrame {
        t,
        x: y[..n].to_vec(),
        v: y[n..2 * n].to_vec(),
        frame: y[2 * n..].to_vec(),
    };
    let mut y: Vec<f64> = x0.iter().chain(v0).chain(frame).copied().collect();
    let mut out = vec![pack(0.0, &y)];
    for k in 0..steps {
        let t = k as f64 * h;
        let half = rk4_step(&mut rhs, t, &y, 0.5 * h)?;
        out.push(pack(t + 0.5 * h, &half));
        y = rk4_step(&mut rhs, t, &y, h)?;
        out.push(pack(if k + 1 == steps { t_end } else { t + h }, &y));
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
