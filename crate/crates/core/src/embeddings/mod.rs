//! Embeddings of constant-curvature spaces and their symmetry algebra.
//!
//! A space of constant curvature `K` is the hypersurface
//! `K η(x,x) + z² = 1` in a flat space with line element
//! `η(dx,dx) + dz²/K` ([`PseudoSphereEmbedding`]). Its isometries are the
//! pseudo-rotations of that flat space ([`GeneratorSet`], [`killing`]). A
//! conformally flat metric `e^{2σ} η` also sits on the null cone of a flat
//! space two dimensions up ([`hypercone`]).

mod algebra;
pub mod hypercone;
pub mod killing;
mod pseudo_sphere;

pub use algebra::{casimir_check, generators, CasimirReport, CommutatorEntry, ExactMatrix, GeneratorSet};
pub use hypercone::{hypercone_map, hypercone_pullback, null_residual, HyperconeEmbedding};
pub use killing::{
    generator_field, invariant_tensor_solve, killing_residual, InvariantTensorSolution, KillingReport, TensorSymmetry,
};
pub use pseudo_sphere::{PseudoSphereEmbedding, TangentProjection};

#[cfg(test)]
mod tests;
