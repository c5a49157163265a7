//! Riemann normal coordinates, three ways.
//!
//! The metric of a pseudo-Riemannian space written in normal coordinates
//! around a point can be built by shooting geodesics ([`geodesic`]), by
//! integrating Cartan's radial equations for the connection ([`radial`]), or
//! by a curvature Taylor series ([`radial::taylor_metric`]). This crate does
//! all three and checks them against each other and against closed forms for
//! constant curvature. It also carries the embedding and symmetry machinery
//! used to verify constant-curvature spaces: pseudo-sphere and hypercone
//! embeddings, Killing fields, and the `so(p,q)` generator algebra.
//!
//! ```
//! use rnc_core::prelude::*;
//!
//! let sphere = StereographicChart::new(1.0, Signature::euclidean(2));
//! let r = riemann(&sphere, &[0.0, 0.0], Differentiation::Auto).unwrap();
//! assert!((r.get(&[0, 1, 0, 1]) - 1.0).abs() < 1e-12);
//! ```

pub mod conformal;
pub mod embeddings;
pub mod error;
pub mod fields;
pub mod geodesic;
pub mod linalg;
pub mod metrics;
pub mod ode;
pub mod radial;
pub mod tensor;
pub mod tolerance;

pub use error::{GeomError, Result};

pub mod prelude {
    pub use crate::error::{GeomError, Result};
    pub use crate::metrics::{
        christoffel, covariant_derivative_riemann, riemann, vielbein_at, Differentiation, FlatChart, FnChart,
        MetricChart, PseudoSphereChart, StereographicChart, Vielbein,
    };
    pub use crate::tensor::{check_symmetry, DenseTensor, Signature, SymmetryClass, Variance};
}
