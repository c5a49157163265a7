use std::sync::Mutex;

use crate::error::{GeomError, Result};
use crate::geodesic::{parallel_transport, transport_rhs, NormalChart, TransportedFrame};
use crate::metrics::{riemann, vielbein_at, Differentiation, MetricChart, Vielbein};
use crate::ode::rk4_step;
use crate::tensor::{constant_curvature_riemann, matrix_rows, DenseTensor, Signature};

/// Frame components `R_ABCD` of the curvature at parameter `t` along the ray
/// with normal coordinates `z t`.
pub trait CurvatureSource {
    fn signature(&self) -> &Signature;
    fn curvature(&self, t: f64, z: &[f64]) -> Result<DenseTensor>;
}

/// `R_ABCD = K (η_AC η_BD - η_AD η_BC)` everywhere.
#[derive(Debug, Clone)]
pub struct ConstantCurvatureSource {
    k: f64,
    signature: Signature,
    r: DenseTensor,
}

impl ConstantCurvatureSource {
    pub fn new(k: f64, signature: Signature) -> Self {
        let r = constant_curvature_riemann(k, &matrix_rows(&signature.eta()));
        Self { k, signature, r }
    }

    pub fn curvature_constant(&self) -> f64 {
        self.k
    }
}

impl CurvatureSource for ConstantCurvatureSource {
    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn curvature(&self, _t: f64, _z: &[f64]) -> Result<DenseTensor> {
        Ok(self.r.clone())
    }
}

type CurvatureFn = dyn Fn(f64, &[f64]) -> Result<DenseTensor> + Send + Sync;

/// Curvature supplied by a closure.
pub struct FnCurvatureSource {
    signature: Signature,
    f: Box<CurvatureFn>,
}

impl FnCurvatureSource {
    pub fn new(signature: Signature, f: impl Fn(f64, &[f64]) -> Result<DenseTensor> + Send + Sync + 'static) -> Self {
        Self {
            signature,
            f: Box::new(f),
        }
    }
}

impl CurvatureSource for FnCurvatureSource {
    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn curvature(&self, t: f64, z: &[f64]) -> Result<DenseTensor> {
        (self.f)(t, z)
    }
}

/// Curvature of a chart, expressed in the origin frame parallel-transported
/// along the radial geodesic.
///
/// The transport for the current ray is computed once at `step` (sampled at
/// half steps) and cached; parameters between samples are reached with one
/// extra Runge-Kutta step from the previous sample.
pub struct ChartCurvatureSource<'a> {
    chart: &'a dyn MetricChart,
    origin: Vec<f64>,
    frame: Vielbein,
    step: f64,
    cache: Mutex<Option<(Vec<f64>, Vec<TransportedFrame>)>>,
}

impl<'a> ChartCurvatureSource<'a> {
    pub fn new(chart: &'a dyn MetricChart, origin: &[f64], step: f64) -> Result<Self> {
        chart.check_point(origin)?;
        if step <= 0.0 || !step.is_finite() {
            return Err(GeomError::InvalidParameter(format!("step must be positive, got {step}")));
        }
        Ok(Self {
            chart,
            origin: origin.to_vec(),
            frame: vielbein_at(chart, origin)?,
            step,
            cache: Mutex::new(None),
        })
    }

    /// Uses the origin and frame of an existing normal chart.
    pub fn from_normal_chart<C: MetricChart>(nc: &'a NormalChart<C>, step: f64) -> Result<Self> {
        let mut src = Self::new(nc.chart(), nc.origin(), step)?;
        src.frame = nc.frame().clone();
        Ok(src)
    }

    pub fn frame(&self) -> &Vielbein {
        &self.frame
    }

    fn transport(&self, z: &[f64]) -> Result<Vec<TransportedFrame>> {
        let n = self.chart.dim();
        let e = self.frame.frame_vectors();
        let frame: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |a| (i, a))).map(|(i, a)| e[(i, a)]).collect();
        let v0 = self.frame.to_coordinates(z);
        parallel_transport(self.chart, &self.origin, &v0, &frame, 1.0, self.step)
    }

    fn sample_at(&self, t: f64, z: &[f64]) -> Result<TransportedFrame> {
        let mut cache = self.cache.lock().expect("cache poisoned");
        if !matches!(cache.as_ref(), Some((key, _)) if key.as_slice() == z) {
            *cache = Some((z.to_vec(), self.transport(z)?));
        }
        let samples = &cache.as_ref().expect("filled").1;
        let idx = match samples.binary_search_by(|s| s.t.partial_cmp(&t).expect("finite")) {
            Ok(i) => return Ok(samples[i].clone()),
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let base = &samples[idx.min(samples.len() - 1)];
        if (base.t - t).abs() < 1e-13 {
            return Ok(base.clone());
        }
        let n = self.chart.dim();
        let y: Vec<f64> = base.x.iter().chain(&base.v).chain(&base.frame).copied().collect();
        let mut rhs = |_t: f64, y: &[f64]| transport_rhs(self.chart, y, n);
        let y = rk4_step(&mut rhs, base.t, &y, t - base.t)?;
        Ok(TransportedFrame {
            t,
            x: y[..n].to_vec(),
            v: y[n..2 * n].to_vec(),
            frame: y[2 * n..].to_vec(),
        })
    }
}

impl CurvatureSource for ChartCurvatureSource<'_> {
    fn signature(&self) -> &Signature {
        &self.frame.signature
    }

    fn curvature(&self, t: f64, z: &[f64]) -> Result<DenseTensor> {
        let n = self.chart.dim();
        if z.len() != n {
            return Err(GeomError::DimensionMismatch { expected: n, got: z.len() });
        }
        let s = self.sample_at(t, z)?;
        let r = riemann(self.chart, &s.x, Differentiation::Auto)?;
        // m[A][a] = component a of transported frame vector A
        let m: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|i| s.frame[i * n + a]).collect()).collect();
        to_frame(&r, &m)
    }
}

/// Contracts every index of a covariant tensor with `m[A][a]`.
pub(crate) fn to_frame(t: &DenseTensor, m: &[Vec<f64>]) -> Result<DenseTensor> {
    let mut out = t.clone();
    for i in 0..t.rank() {
        out = out.transform_index(i, m)?;
    }
    Ok(out.with_basis(crate::tensor::Basis::Frame))
}
