//! Classical fourth-order Runge-Kutta on flat `Vec<f64>` states.

use crate::error::Result;

/// One RK4 step of `y' = f(t, y)`.
pub fn rk4_step<F>(f: &mut F, t: f64, y: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    let k1 = f(t, y)?;
    let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
    let k2 = f(t + 0.5 * h, &y2)?;
    let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
    let k3 = f(t + 0.5 * h, &y3)?;
    let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
    let k4 = f(t + h, &y4)?;
    Ok(y
        .iter()
        .enumerate()
        .map(|(i, a)| a + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Number of equal steps of size at most `h` covering `span`.
pub fn step_count(span: f64, h: f64) -> usize {
    ((span.abs() / h) - 1e-9).ceil().max(1.0) as usize
}

/// Fixed-step integration that lands exactly on `t_end`. `observe` sees every
/// accepted state (including the initial one) and may stop the run early by
/// returning `false`.
pub fn integrate<F, O>(mut f: F, t0: f64, y0: Vec<f64>, t_end: f64, h: f64, mut observe: O) -> Result<(f64, Vec<f64>)>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
    O: FnMut(f64, &[f64]) -> bool,
{
    let steps = step_count(t_end - t0, h);
    let h = (t_end - t0) / steps as f64;
    let mut y = y0;
    let mut t = t0;
    if !observe(t, &y) {
        return Ok((t, y));
    }
    for k in 0..steps {
        y = rk4_step(&mut f, t, &y, h)?;
        t = if k + 1 == steps { t_end } else { t0 + (k + 1) as f64 * h };
        if !observe(t, &y) {
            break;
        }
    }
    Ok((t, y))
}
