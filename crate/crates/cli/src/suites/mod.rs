//! The verification suites.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnc_core::tensor::Signature;

use crate::chart::{ingest_chart, IngestedChart};
use crate::config::{SignatureKind, SuiteConfig};
use crate::report::{Record, Report};
use crate::CliError;

pub use conformal::quarter_circle_factor;

mod algebra;
mod conformal;
mod crosscheck;
mod embedding;
mod radial;
mod taylor;

/// Suite names, in the order `list-suites` prints them.
pub const SUITES: [(&str, &str); 10] = [
    (
        "constant-curvature-crosscheck",
        "shooting and radial-equation metrics against the constant-curvature closed form",
    ),
    ("taylor-order", "convergence order of the curvature Taylor metric"),
    ("radial-ode", "radial connection equations and normal-tensor identities"),
    ("embedding-pseudosphere", "pseudo-sphere embedding, induced metric and its curvature"),
    ("hypercone", "null-cone embedding of conformally flat metrics"),
    ("algebra", "exact so(p,q) commutators and Casimir"),
    ("killing", "Killing equation for the pseudo-sphere isometries"),
    ("invariant-tensors", "rank-two tensors invariant under the isometries"),
    ("conformal-factor", "along-curve conformal factor against its closed form"),
    ("conjugate-scan", "first conjugate distances on the sphere and hyperbolic plane"),
];

/// Step sizes reported in the environment stanza.
pub fn steps() -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("field".to_string(), rnc_core::fields::FIELD_STEP),
        ("geodesic".to_string(), rnc_core::geodesic::DEFAULT_STEP),
        ("geodesic-crosscheck".to_string(), crosscheck::SHOOTING_STEP),
        ("radial".to_string(), rnc_core::radial::DEFAULT_STEP),
        ("radial-crosscheck".to_string(), crosscheck::RADIAL_STEP),
        ("riemann".to_string(), RIEMANN_STEP),
        ("scan".to_string(), rnc_core::geodesic::NormalChartOptions::default().scan_step),
    ])
}

/// Finite-difference step for curvature of induced metrics.
pub(crate) const RIEMANN_STEP: f64 = 1e-4;

pub(crate) struct Context<'a> {
    pub cfg: &'a SuiteConfig,
    pub seed: u64,
    pub algebraic: f64,
    pub differential: f64,
}

impl Context<'_> {
    /// A generator for one named stream; streams are independent of the
    /// order in which checks run.
    pub fn rng(&self, stream: &str) -> ChaCha8Rng {
        // FNV-1a over the stream name, mixed with the seed
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in stream.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        ChaCha8Rng::seed_from_u64(self.seed ^ h)
    }

    pub fn chart(&self) -> Result<Option<IngestedChart>, CliError> {
        self.cfg.chart.as_ref().map(|c| ingest_chart(c, self.seed)).transpose()
    }

    pub fn curvatures(&self, default: &[f64]) -> Vec<f64> {
        self.cfg.sweep.curvatures.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn dims(&self, default: &[usize]) -> Vec<usize> {
        self.cfg.sweep.dims.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn signatures(&self, n: usize) -> Vec<Signature> {
        self.cfg
            .sweep
            .signatures
            .clone()
            .unwrap_or_else(|| vec![SignatureKind::Euclidean, SignatureKind::Lorentzian])
            .into_iter()
            .map(|k| match k {
                SignatureKind::Euclidean => Signature::euclidean(n),
                SignatureKind::Lorentzian => Signature::lorentzian(n),
            })
            .collect()
    }
}

/// `euclidean-3`, `lorentzian-4`, or the raw entries.
pub(crate) fn sig_name(sig: &Signature) -> String {
    let n = sig.dim();
    if *sig == Signature::euclidean(n) {
        format!("euclidean-{n}")
    } else if *sig == Signature::lorentzian(n) {
        format!("lorentzian-{n}")
    } else {
        let s: Vec<String> = sig.entries().iter().map(|e| if *e > 0 { "+" } else { "-" }.to_string()).collect();
        s.concat()
    }
}

pub(crate) fn k_name(k: f64) -> String {
    if k > 0.0 {
        format!("K=+{k}")
    } else {
        format!("K={k}")
    }
}

pub(crate) fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.1 && norm <= 1.0 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

pub(crate) fn random_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-radius..radius)).collect()
}

/// `max |a - b| / max |b|`.
pub(crate) fn relative_diff(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(f64::MIN_POSITIVE)
}

pub fn run_suite(name: &str, cfg: &SuiteConfig, seed: u64) -> Result<Report, CliError> {
    let ctx = Context {
        cfg,
        seed,
        algebraic: cfg.algebraic_tolerance()?,
        differential: cfg.differential_tolerance(),
    };
    let records: Vec<Record> = match name {
        "constant-curvature-crosscheck" => crosscheck::run(&ctx)?,
        "taylor-order" => taylor::run(&ctx)?,
        "radial-ode" => radial::run(&ctx)?,
        "embedding-pseudosphere" => embedding::pseudo_sphere(&ctx)?,
        "hypercone" => embedding::hypercone(&ctx)?,
        "algebra" => algebra::algebra(&ctx)?,
        "killing" => algebra::killing(&ctx)?,
        "invariant-tensors" => algebra::invariant_tensors(&ctx)?,
        "conformal-factor" => conformal::conformal_factor(&ctx)?,
        "conjugate-scan" => conformal::conjugate_scan_suite(&ctx)?,
        other => return Err(CliError::UnknownSuite(other.to_string())),
    };
    Ok(Report::new(name, seed, steps(), records))
}
