use nalgebra::DMatrix;

use super::{inside, jacobi_rhs, NormalChart};
use crate::error::{GeomError, Result};
use crate::metrics::MetricChart;
use crate::ode::{rk4_step, step_count};

/// Outcome of scanning one direction for conjugate points.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateScan {
    /// First conjugate distance, if one was found before `t_max`.
    pub distance: Option<f64>,
    /// Set when the geodesic left the chart first; the last parameter reached.
    pub exit: Option<f64>,
}

struct Sample {
    t: f64,
    y: Vec<f64>,
    det: f64,
    ratio: f64,
}

fn measure(y: &[f64], n: usize) -> (f64, f64) {
    let j = DMatrix::from_row_slice(n, n, &y[2 * n..2 * n + n * n]);
    let det = j.determinant();
    let sv = j.singular_values();
    let max = sv.max();
    let ratio = if max > 0.0 { sv.min() / max } else { 1.0 };
    (det, ratio)
}

/// Integrates the Jacobi propagator (`J(0) = 0`, `J'(0) = frame`) along the
/// geodesic leaving the origin with frame velocity `direction` and reports
/// the first parameter where `J` becomes singular.
///
/// A sign change of `det J` is refined by bisection. Conjugate points of even
/// multiplicity do not flip the sign, so a dip of `σ_min/σ_max` below `1e-2`
/// is also refined, by golden-section search, and accepted below `1e-4`.
pub fn conjugate_scan<C: MetricChart>(nc: &NormalChart<C>, direction: &[f64], t_max: f64) -> Result<ConjugateScan> {
    let chart = nc.chart();
    let n = chart.dim();
    if direction.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            got: direction.len(),
        });
    }
    let e = nc.frame().frame_vectors();
    let mut y0: Vec<f64> = nc.origin().iter().copied().chain(nc.initial_velocity(direction)).collect();
    y0.extend(std::iter::repeat(0.0).take(n * n));
    for i in 0..n {
        for k in 0..n {
            y0.push(e[(i, k)]);
        }
    }
    let mut rhs = |_t: f64, y: &[f64]| jacobi_rhs(chart, y, n);
    let mut advance = |from: &Sample, to: f64| -> Result<Vec<f64>> { rk4_step(&mut rhs, from.t, &from.y, to - from.t) };

    let steps = step_count(t_max, nc.options().scan_step);
    let h = t_max / steps as f64;
    let mut hist: Vec<Sample> = vec![Sample {
        t: 0.0,
        y: y0,
        det: 0.0,
        ratio: 1.0,
    }];
    for k in 0..steps {
        let prev = hist.last().expect("non-empty");
        let t = if k + 1 == steps { t_max } else { (k + 1) as f64 * h };
        let y = match advance(prev, t) {
            Ok(y) if inside(chart, &y[..n]) && y.iter().all(|c| c.is_finite()) => y,
            Ok(_) | Err(GeomError::OutsideValidity { .. }) => {
                return Ok(ConjugateScan {
                    distance: None,
                    exit: Some(prev.t),
                })
            }
            Err(err) => return Err(err),
        };
        let (det, ratio) = measure(&y, n);
        let cur = Sample { t, y, det, ratio };

        if prev.det != 0.0 && prev.det.signum() != cur.det.signum() {
            let (mut lo, mut hi) = (prev.t, cur.t);
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                let (d, _) = measure(&advance(prev, mid)?, n);
                if d == 0.0 {
                    lo = mid;
                    hi = mid;
                } else if d.signum() == prev.det.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(ConjugateScan {
                distance: Some(0.5 * (lo + hi)),
                exit: None,
            });
        }

        if hist.len() >= 2 {
            let a = &hist[hist.len() - 2];
            let b = prev;
            if b.ratio < 1e-2 && b.ratio < a.ratio && b.ratio <= cur.ratio {
                let (t_min, r_min) = golden_minimum(a.t, cur.t, |t| Ok(measure(&advance(a, t)?, n).1))?;
                if r_min < 1e-4 {
                    return Ok(ConjugateScan {
                        distance: Some(t_min),
                        exit: None,
                    });
                }
            }
        }
        hist.push(cur);
        if hist.len() > 3 {
            hist.remove(0);
        }
    }
    Ok(ConjugateScan {
        distance: None,
        exit: None,
    })
}

fn golden_minimum(mut a: f64, mut b: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d)?;
        }
    }
    let t = 0.5 * (a + b);
    Ok((t, f(t)?))
}
