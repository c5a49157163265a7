use std::f64::consts::PI;

use rayon::prelude::*;
use rnc_core::conformal::{along_curve_sigma, constant_curvature_exp_minus_two_sigma, ConstantCurvatureNormal};
use rnc_core::geodesic::{conjugate_scan, NormalChart, NormalChartOptions};
use rnc_core::metrics::{PseudoSphereChart, StereographicChart};
use rnc_core::tensor::Signature;
use rnc_core::GeomError;

use super::{k_name, random_point, random_unit, sig_name, Context};
use crate::report::Record;
use crate::CliError;

const SAMPLES: usize = 20;
/// Shooting against the closed form.
pub const FACTOR_TOLERANCE: f64 = 1e-8;
const FACTOR_TOPIC: &str = "along-curve conformal factor";
const SCAN_TOPIC: &str = "conjugate points";
/// Distance from the first conjugate point on the unit sphere.
pub const CONJUGATE_TOLERANCE: f64 = 1e-3;
const SPHERE_DIRECTIONS: usize = 16;
const HYPERBOLIC_DIRECTIONS: usize = 8;
const HYPERBOLIC_REACH: f64 = 10.0;

/// `exp(-2σ)` on the unit sphere at `z = (π/2, 0)` along `dz = (0, 1)`.
pub fn quarter_circle_factor() -> rnc_core::Result<f64> {
    let nf = ConstantCurvatureNormal::new(1.0, Signature::euclidean(2));
    along_curve_sigma(&nf, &[PI / 2.0, 0.0], &[0.0, 1.0]).map(|s| s.exp_minus_two_sigma())
}

fn scan_options() -> NormalChartOptions {
    NormalChartOptions {
        t_max: 4.0,
        directions: 8,
        ..Default::default()
    }
}

fn one_space(ctx: &Context, k: f64, sig: Signature) -> Vec<Record> {
    let tag = format!("{}/{}", k_name(k), sig_name(&sig));
    let n = sig.dim();
    let shooting_id = format!("{tag}/shooting");
    let closed_id = format!("{tag}/closed-normal-form");
    let broken = || {
        vec![
            Record::failed(&shooting_id, FACTOR_TOPIC, 0.0, FACTOR_TOLERANCE),
            Record::failed(&closed_id, FACTOR_TOPIC, 0.0, ctx.algebraic),
        ]
    };
    let Ok(nc) = NormalChart::with_options(StereographicChart::new(k, sig.clone()), &vec![0.0; n], scan_options())
    else {
        return broken();
    };
    let normal = ConstantCurvatureNormal::new(k, sig.clone());
    let mut rng = ctx.rng(&tag);
    let (mut shoot, mut closed) = (0.0_f64, 0.0_f64);
    let mut used = 0;
    for _ in 0..SAMPLES {
        let dir = random_unit(&mut rng, n);
        let r = 0.7 * nc.guard_radius(&dir).min(1.5);
        let z: Vec<f64> = dir.iter().map(|c| c * r).collect();
        let dz = random_point(&mut rng, n, 1.0);
        let want = match constant_curvature_exp_minus_two_sigma(k, &sig, &z, &dz) {
            Ok(v) => v,
            Err(GeomError::NullDirection) => continue,
            Err(_) => return broken(),
        };
        // the full metric may flip the causal character of dz, where no real σ exists
        let (a, b) = match (along_curve_sigma(&nc, &z, &dz), along_curve_sigma(&normal, &z, &dz)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(GeomError::NullDirection), _) | (_, Err(GeomError::NullDirection)) => continue,
            _ => return broken(),
        };
        shoot = shoot.max((a.exp_minus_two_sigma() - want).abs() / want.abs());
        closed = closed.max((b.exp_minus_two_sigma() - want).abs() / want.abs());
        used += 1;
    }
    if used == 0 {
        return broken();
    }
    vec![
        Record::at_most(shooting_id, FACTOR_TOPIC, shoot, FACTOR_TOLERANCE),
        Record::at_most(closed_id, FACTOR_TOPIC, closed, ctx.algebraic.max(1e-10)),
    ]
}

pub(super) fn conformal_factor(ctx: &Context) -> Result<Vec<Record>, CliError> {
    let mut jobs = Vec::new();
    for k in ctx.curvatures(&[1.0, -1.0]) {
        for n in ctx.dims(&[2, 3]) {
            for sig in ctx.signatures(n) {
                jobs.push((k, sig));
            }
        }
    }
    let mut records: Vec<Record> = jobs.into_par_iter().flat_map_iter(|(k, sig)| one_space(ctx, k, sig)).collect();
    let want = PI * PI / 4.0;
    records.push(match quarter_circle_factor() {
        Ok(v) => Record::within("spot/quarter-circle", FACTOR_TOPIC, v, want, 1e-6),
        Err(_) => Record::failed("spot/quarter-circle", FACTOR_TOPIC, want, 1e-6),
    });
    Ok(records)
}

pub(super) fn conjugate_scan_suite(_ctx: &Context) -> Result<Vec<Record>, CliError> {
    let options = NormalChartOptions {
        directions: 4,
        ..Default::default()
    };
    let mut records = Vec::new();

    let sphere = NormalChart::with_options(StereographicChart::new(1.0, Signature::euclidean(2)), &[2.0, 0.0], options.clone());
    let worst = sphere.map_err(|e| e.to_string()).and_then(|nc| {
        (0..SPHERE_DIRECTIONS)
            .into_par_iter()
            .map(|i| {
                let a = (i as f64 + 0.25) * 2.0 * PI / SPHERE_DIRECTIONS as f64;
                let scan = conjugate_scan(&nc, &[a.cos(), a.sin()], 2.0 * PI).map_err(|e| e.to_string())?;
                scan.distance.map(|t| (t - PI).abs()).ok_or_else(|| format!("no conjugate point at angle {a}"))
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    });
    records.push(match worst {
        Ok(v) => Record::at_most("sphere/first-conjugate", SCAN_TOPIC, v, CONJUGATE_TOLERANCE),
        Err(_) => Record::failed("sphere/first-conjugate", SCAN_TOPIC, 0.0, CONJUGATE_TOLERANCE),
    });

    let hyperbolic =
        NormalChart::with_options(PseudoSphereChart::new(-1.0, Signature::euclidean(2)), &[0.0, 0.0], options);
    let found = hyperbolic.map_err(|e| e.to_string()).and_then(|nc| {
        (0..HYPERBOLIC_DIRECTIONS)
            .into_par_iter()
            .map(|i| {
                let a = i as f64 * 2.0 * PI / HYPERBOLIC_DIRECTIONS as f64;
                let scan = conjugate_scan(&nc, &[a.cos(), a.sin()], HYPERBOLIC_REACH).map_err(|e| e.to_string())?;
                Ok(usize::from(scan.distance.is_some()))
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))
    });
    records.push(match found {
        Ok(v) => Record::exact("hyperbolic/conjugate-points", SCAN_TOPIC, v as f64, 0.0),
        Err(_) => Record::failed("hyperbolic/conjugate-points", SCAN_TOPIC, 0.0, 0.0),
    });
    Ok(records)
}
