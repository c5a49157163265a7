use crate::error::{GeomError, Result};
use crate::tensor::{check_symmetry, DenseTensor, Scalar, SymmetryClass};

/// Tolerance on the curvature symmetries accepted by
/// [`normal_tensor_from_curvature`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;

/// `D_ρμλν = -(R_ρμλν + R_ρλμν) / 3`, the slope of the connection at the
/// origin of normal coordinates: `Γ^ρ_μλ(x) = D^ρ_μλν x^ν + O(x²)`.
///
/// Symmetric in `μ, λ`; the cyclic sum over its last three indices vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalTensor<T: Scalar = f64> {
    d: DenseTensor<T>,
}

fn three<T: Scalar>() -> T {
    T::one() + T::one() + T::one()
}

impl<T: Scalar> NormalTensor<T> {
    pub fn tensor(&self) -> &DenseTensor<T> {
        &self.d
    }

    pub fn get(&self, rho: usize, mu: usize, lambda: usize, nu: usize) -> &T {
        self.d.get(&[rho, mu, lambda, nu])
    }

    /// `R_ρμλν = D_ρμνλ - D_ρμλν`.
    pub fn curvature(&self) -> DenseTensor<T> {
        DenseTensor::from_fn(self.d.dims().to_vec(), self.d.variance().to_vec(), |i| {
            self.get(i[0], i[1], i[3], i[2]).clone() - self.get(i[0], i[1], i[2], i[3]).clone()
        })
    }

    /// `D_ρμλν + D_ρλνμ + D_ρνμλ` for every index tuple.
    pub fn cyclic_sum(&self) -> DenseTensor<T> {
        DenseTensor::from_fn(self.d.dims().to_vec(), self.d.variance().to_vec(), |i| {
            let (r, m, l, n) = (i[0], i[1], i[2], i[3]);
            self.get(r, m, l, n).clone() + self.get(r, l, n, m).clone() + self.get(r, n, m, l).clone()
        })
    }
}

/// Builds the normal tensor of a fully covariant curvature tensor after
/// checking its algebraic symmetries.
pub fn normal_tensor_from_curvature<T: Scalar>(r: &DenseTensor<T>) -> Result<NormalTensor<T>> {
    if r.rank() != 4 {
        return Err(GeomError::DimensionMismatch {
            expected: 4,
            got: r.rank(),
        });
    }
    let report = check_symmetry(r, SymmetryClass::RiemannBlock([0, 1, 2, 3]), SYMMETRY_TOLERANCE);
    if !report.is_clean() {
        return Err(GeomError::SymmetryViolation {
            violation: report.max_violation,
        });
    }
    let third = T::one() / three::<T>();
    let d = DenseTensor::from_fn(r.dims().to_vec(), r.variance().to_vec(), |i| {
        let (rho, mu, l, nu) = (i[0], i[1], i[2], i[3]);
        -(third.clone() * (r.get(&[rho, mu, l, nu]).clone() + r.get(&[rho, l, mu, nu]).clone()))
    });
    Ok(NormalTensor { d })
}
