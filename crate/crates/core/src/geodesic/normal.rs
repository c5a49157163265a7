use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{conjugate_scan, geodesic_rhs, inside, jacobi_rhs, DEFAULT_STEP};
use crate::error::{GeomError, Result};
use crate::metrics::{vielbein_at, MetricChart, Vielbein};
use crate::ode::{rk4_step, step_count};

/// Uniform direction on the unit sphere via normalized Gaussians.
pub(crate) fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = euclid(&v);
        if norm > 1e-6 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalChartOptions {
    /// Affine step for exp.
    pub step: f64,
    /// Step for the conjugate scans behind the guard.
    pub scan_step: f64,
    /// Scan length per direction.
    pub t_max: f64,
    pub directions: usize,
    /// Fraction of the conjugate (or exit) distance kept as the guard.
    pub guard_fraction: f64,
    /// Seeds the random scan directions used when `n ≥ 3`.
    pub seed: u64,
}

impl Default for NormalChartOptions {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            scan_step: 5e-3,
            t_max: 2.0 * PI,
            directions: 32,
            guard_fraction: 0.8,
            seed: 0x5eed,
        }
    }
}

/// Per-direction limit on the frame-component length of tangent vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusGuard {
    /// Unit (Euclidean) frame directions that were scanned.
    pub directions: Vec<Vec<f64>>,
    /// First conjugate distance found along each direction.
    pub conjugate: Vec<Option<f64>>,
    /// Parameter at which each scan left the chart, if it did.
    pub exit: Vec<Option<f64>>,
    /// Guard radius per direction.
    pub limits: Vec<f64>,
}

impl RadiusGuard {
    /// Guard radius for an arbitrary direction: the minimum over the nearest
    /// scanned directions.
    pub fn radius(&self, dir: &[f64]) -> f64 {
        let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return self.limits.iter().copied().fold(f64::INFINITY, f64::min);
        }
        let mut scored: Vec<(f64, usize)> = self
            .directions
            .iter()
            .enumerate()
            .map(|(i, d)| (d.iter().zip(dir).map(|(a, b)| a * b).sum::<f64>() / norm, i))
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));
        if scored[0].0 > 1.0 - 1e-12 {
            return self.limits[scored[0].1];
        }
        let take = dir.len().max(2);
        scored.iter().take(take).map(|&(_, i)| self.limits[i]).fold(f64::INFINITY, f64::min)
    }

    pub fn min_radius(&self) -> f64 {
        self.limits.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Riemann normal coordinates around `origin`: tangent vectors are frame
/// components with respect to the vielbein at the origin.
#[derive(Debug, Clone)]
pub struct NormalChart<C> {
    chart: C,
    origin: Vec<f64>,
    frame: Vielbein,
    guard: RadiusGuard,
    options: NormalChartOptions,
}

fn scan_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    if n == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    if n == 2 {
        return (0..count)
            .map(|k| {
                let a = (k as f64 + 0.5) * 2.0 * PI / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
    }
    let mut dirs = Vec::with_capacity(count.max(2 * n));
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[i] = s;
            dirs.push(d);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while dirs.len() < count {
        dirs.push(unit_vector(&mut rng, n));
    }
    dirs
}

impl<C: MetricChart> NormalChart<C> {
    pub fn new(chart: C, origin: &[f64]) -> Result<Self> {
        Self::with_options(chart, origin, NormalChartOptions::default())
    }

    /// Builds the frame at `origin` and scans for conjugate points to fix the
    /// guard radius.
    pub fn with_options(chart: C, origin: &[f64], options: NormalChartOptions) -> Result<Self> {
        let frame = vielbein_at(&chart, origin)?;
        let mut nc = Self {
            chart,
            origin: origin.to_vec(),
            frame,
            guard: RadiusGuard {
                directions: vec![],
                conjugate: vec![],
                exit: vec![],
                limits: vec![],
            },
            options,
        };
        let dirs = scan_directions(nc.dim(), nc.options.directions, nc.options.seed);
        let scans: Vec<super::ConjugateScan> = dirs
            .par_iter()
            .map(|d| conjugate_scan(&nc, d, nc.options.t_max))
            .collect::<Result<_>>()?;
        let f = nc.options.guard_fraction;
        nc.guard = RadiusGuard {
            limits: scans
                .iter()
                .map(|s| match (s.distance, s.exit) {
                    (Some(t), _) => f * t,
                    (None, Some(t)) => f * t,
                    (None, None) => nc.options.t_max,
                })
                .collect(),
            conjugate: scans.iter().map(|s| s.distance).collect(),
            exit: scans.iter().map(|s| s.exit).collect(),
            directions: dirs,
        };
        Ok(nc)
    }

    pub fn chart(&self) -> &C {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn frame(&self) -> &Vielbein {
        &self.frame
    }

    pub fn guard(&self) -> &RadiusGuard {
        &self.guard
    }

    pub fn options(&self) -> &NormalChartOptions {
        &self.options
    }

    pub fn eta(&self) -> DMatrix<f64> {
        self.frame.signature.eta()
    }

    pub fn guard_radius(&self, v: &[f64]) -> f64 {
        self.guard.radius(v)
    }

    /// Coordinate initial velocity of the geodesic with frame components `v`.
    pub fn initial_velocity(&self, v: &[f64]) -> Vec<f64> {
        self.frame.to_coordinates(v)
    }

    fn check_guard(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let norm = euclid(v);
        let guard = self.guard_radius(v);
        if norm > guard {
            return Err(GeomError::BeyondGuard { norm, guard });
        }
        Ok(())
    }

    /// Endpoint of the geodesic with initial frame velocity `v` at `t = 1`.
    pub fn exp_map(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_guard(v)?;
        self.exp_unguarded(v)
    }

    /// [`Self::exp_map`] without the conjugate-point guard.
    pub fn exp_unguarded(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if v.iter().all(|&c| c == 0.0) {
            return Ok(self.origin.clone());
        }
        let steps = step_count(1.0, self.options.step);
        let h = 1.0 / steps as f64;
        let mut y: Vec<f64> = self.origin.iter().copied().chain(self.initial_velocity(v)).collect();
        let mut rhs = |_t: f64, y: &[f64]| geodesic_rhs(&self.chart, y);
        for k in 0..steps {
            y = rk4_step(&mut rhs, k as f64 * h, &y, h)?;
        }
        if !inside(&self.chart, &y[..n]) {
            return Err(GeomError::OutsideValidity { point: y[..n].to_vec() });
        }
        y.truncate(n);
        Ok(y)
    }

    /// `exp(v)` and its derivative with respect to the frame components,
    /// from the variational equation.
    pub fn exp_with_jacobian(&self, v: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let n = self.dim();
        let e = self.frame.frame_vectors();
        let mut y: Vec<f64> = self.origin.iter().copied().chain(self.initial_velocity(v)).collect();
        y.extend(std::iter::repeat(0.0).take(n * n));
        for i in 0..n {
            for k in 0..n {
                y.push(e[(i, k)]);
            }
        }
        let steps = step_count(1.0, self.options.step);
        let h = 1.0 / steps as f64;
        let mut rhs = |_t: f64, y: &[f64]| jacobi_rhs(&self.chart, y, n);
        for k in 0..steps {
            y = rk4_step(&mut rhs, k as f64 * h, &y, h)?;
        }
        if !inside(&self.chart, &y[..n]) {
            return Err(GeomError::OutsideValidity { point: y[..n].to_vec() });
        }
        let jac = DMatrix::from_row_slice(n, n, &y[2 * n..2 * n + n * n]);
        Ok((y[..n].to_vec(), jac))
    }

    /// Inverse of [`Self::exp_map`] by damped Newton shooting.
    pub fn log_map(&self, p: &[f64]) -> Result<Vec<f64>> {
        const MAX_ITER: usize = 50;
        const TOL: f64 = 1e-10;
        let n = self.dim();
        self.chart.check_point(p)?;
        let target = DVector::from_column_slice(p);
        let diff: Vec<f64> = p.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        if diff.iter().all(|&d| d == 0.0) {
            return Ok(vec![0.0; n]);
        }
        let mut v = DVector::from_vec(self.frame.to_frame(&diff));
        let residual_at = |v: &DVector<f64>| -> Option<f64> {
            self.exp_unguarded(v.as_slice())
                .ok()
                .map(|x| (DVector::from_vec(x) - &target).norm())
        };
        // the linear guess can overshoot the chart; pull it back until it lands
        let mut res = f64::INFINITY;
        for _ in 0..60 {
            if let Some(r) = residual_at(&v) {
                res = r;
                break;
            }
            v *= 0.5;
        }
        let mut iterations = 0;
        while iterations < MAX_ITER {
            iterations += 1;
            if res <= 1e-3 * TOL {
                break;
            }
            let Ok((x, jac)) = self.exp_with_jacobian(v.as_slice()) else {
                break;
            };
            let f = DVector::from_vec(x) - &target;
            let Some(delta) = jac.lu().solve(&(-f)) else {
                break;
            };
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let trial = &v + lambda * &delta;
                if let Some(r) = residual_at(&trial) {
                    if r < res {
                        v = trial;
                        res = r;
                        improved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if res > TOL || !res.is_finite() {
            return Err(GeomError::NoConvergence { iterations, residual: res });
        }
        let out: Vec<f64> = v.iter().copied().collect();
        self.check_guard(&out)?;
        Ok(out)
    }

    /// Metric in normal coordinates at the normal point `v`:
    /// `(∂exp/∂v)ᵀ g(exp v) (∂exp/∂v)` with a central-difference Jacobian.
    pub fn pullback_metric(&self, v: &[f64]) -> Result<DMatrix<f64>> {
        self.check_guard(v)?;
        let n = self.dim();
        let x = self.exp_unguarded(v)?;
        let g = self.chart.metric(&x)?;
        let d = 1e-5 * euclid(v).max(1.0);
        let mut jac = DMatrix::zeros(n, n);
        for a in 0..n {
            let mut vp = v.to_vec();
            let mut vm = v.to_vec();
            vp[a] += d;
            vm[a] -= d;
            let xp = self.exp_unguarded(&vp)?;
            let xm = self.exp_unguarded(&vm)?;
            for i in 0..n {
                jac[(i, a)] = (xp[i] - xm[i]) / (2.0 * d);
            }
        }
        let out = jac.transpose() * g * jac;
        Ok((&out + out.transpose()) * 0.5)
    }
}

pub(crate) fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}
