//! Dense multi-index tensors with variance flags, signature-aware index
//! gymnastics and symmetry checks.
//!
//! Components are stored row-major. The scalar type is generic so the same
//! code runs on `f64` and on exact rationals.

use std::fmt::Debug;

use nalgebra::DMatrix;
use num_traits::{Num, Signed, ToPrimitive};

use crate::error::{GeomError, Result};

/// Scalars a [`DenseTensor`] can hold.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + ToPrimitive + Send + Sync {}
impl<T> Scalar for T where T: Clone + Debug + PartialOrd + Num + Signed + ToPrimitive + Send + Sync {}

/// Diagonal entries of the flat metric.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    entries: Vec<i8>,
}

impl Signature {
    pub fn new<I: IntoIterator<Item = i64>>(entries: I) -> Result<Self> {
        let entries = entries
            .into_iter()
            .map(|e| match e {
                1 => Ok(1i8),
                -1 => Ok(-1i8),
                other => Err(GeomError::InvalidSignature(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    pub fn euclidean(n: usize) -> Self {
        Self { entries: vec![1; n] }
    }

    /// `(+, -, ..., -)`.
    pub fn lorentzian(n: usize) -> Self {
        let mut entries = vec![-1; n];
        if n > 0 {
            entries[0] = 1;
        }
        Self { entries }
    }

    /// `p` plus entries followed by `q` minus entries.
    pub fn pq(p: usize, q: usize) -> Self {
        let mut entries = vec![1; p];
        entries.extend(std::iter::repeat(-1).take(q));
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn eps(&self, i: usize) -> f64 {
        f64::from(self.entries[i])
    }

    pub fn p(&self) -> usize {
        self.entries.iter().filter(|&&e| e == 1).count()
    }

    pub fn q(&self) -> usize {
        self.dim() - self.p()
    }

    pub fn pq_counts(&self) -> (usize, usize) {
        (self.p(), self.q())
    }

    pub fn eta(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| if i == j { self.eps(i) } else { 0.0 })
    }

    /// Signature with extra entries appended.
    pub fn extended(&self, extra: &[i8]) -> Self {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(extra);
        Self { entries }
    }

    /// `η(a, b)`.
    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        self.entries.iter().zip(a).zip(b).map(|((&e, x), y)| f64::from(e) * x * y).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variance {
    Covariant,
    Contravariant,
}

impl Variance {
    pub fn flipped(self) -> Self {
        match self {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
        }
    }
}

/// Which basis the components live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Basis {
    #[default]
    Coordinate,
    Frame,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor<T = f64> {
    dims: Vec<usize>,
    variance: Vec<Variance>,
    values: Vec<T>,
    basis: Basis,
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Iterates all multi-indices of `dims` in row-major order.
pub fn multi_indices(dims: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = dims.iter().product();
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            idx[k] = flat % dims[k];
            flat /= dims[k];
        }
        idx
    })
}

impl<T: Scalar> DenseTensor<T> {
    pub fn new(dims: Vec<usize>, variance: Vec<Variance>, values: Vec<T>) -> Result<Self> {
        if dims.len() != variance.len() {
            return Err(GeomError::DimensionMismatch {
                expected: dims.len(),
                got: variance.len(),
            });
        }
        let expected: usize = dims.iter().product();
        if values.len() != expected {
            return Err(GeomError::ComponentCount {
                expected,
                got: values.len(),
            });
        }
        Ok(Self {
            dims,
            variance,
            values,
            basis: Basis::Coordinate,
        })
    }

    pub fn zeros(dims: Vec<usize>, variance: Vec<Variance>) -> Self {
        let total = dims.iter().product();
        Self {
            dims,
            variance,
            values: vec![T::zero(); total],
            basis: Basis::Coordinate,
        }
    }

    pub fn from_fn(dims: Vec<usize>, variance: Vec<Variance>, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let total: usize = dims.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut idx = vec![0; dims.len()];
        for _ in 0..total {
            values.push(f(&idx));
            for k in (0..dims.len()).rev() {
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Self {
            dims,
            variance,
            values,
            basis: Basis::Coordinate,
        }
    }

    /// All indices covariant, every extent `n`.
    pub fn covariant(rank: usize, n: usize, f: impl FnMut(&[usize]) -> T) -> Self {
        Self::from_fn(vec![n; rank], vec![Variance::Covariant; rank], f)
    }

    pub fn scalar(value: T) -> Self {
        Self {
            dims: vec![],
            variance: vec![],
            values: vec![value],
            basis: Basis::Coordinate,
        }
    }

    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        &self.values[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: T) {
        let o = self.offset(idx);
        self.values[o] = value;
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> DenseTensor<U> {
        DenseTensor {
            dims: self.dims.clone(),
            variance: self.variance.clone(),
            values: self.values.iter().map(f).collect(),
            basis: self.basis,
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.dims != other.dims {
            return Err(GeomError::DimensionMismatch {
                expected: self.values.len(),
                got: other.values.len(),
            });
        }
        Ok(Self {
            dims: self.dims.clone(),
            variance: self.variance.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
            basis: self.basis,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.abs().to_f64().unwrap_or(f64::NAN))
            .fold(0.0, f64::max)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.rank() {
            Err(GeomError::IndexOutOfRange {
                index: i,
                rank: self.rank(),
            })
        } else {
            Ok(())
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j || self.dims[i] != self.dims[j] {
            return Err(GeomError::ExtentMismatch {
                i,
                j,
                extent_i: self.dims[i],
                extent_j: self.dims[j],
            });
        }
        Ok(())
    }

    /// Trace over one upper and one lower index.
    pub fn contract(&self, i: usize, j: usize) -> Result<Self> {
        self.check_pair(i, j)?;
        if self.variance[i] == self.variance[j] {
            return Err(GeomError::VarianceMismatch { i, j });
        }
        Ok(self.trace_with(i, j, |a, b| if a == b { Some(T::one()) } else { None }))
    }

    /// Trace over two indices of equal variance, using `metric` (the inverse
    /// metric for two lower indices, the metric for two upper ones).
    pub fn contract_via_metric(&self, i: usize, j: usize, metric: &[Vec<T>]) -> Result<Self> {
        self.check_pair(i, j)?;
        if self.variance[i] != self.variance[j] {
            return self.contract(i, j);
        }
        let n = self.dims[i];
        if metric.len() != n || metric.iter().any(|r| r.len() != n) {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: metric.len(),
            });
        }
        Ok(self.trace_with(i, j, |a, b| Some(metric[a][b].clone())))
    }

    fn trace_with(&self, i: usize, j: usize, weight: impl Fn(usize, usize) -> Option<T>) -> Self {
        let keep: Vec<usize> = (0..self.rank()).filter(|&k| k != i && k != j).collect();
        let dims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let variance: Vec<Variance> = keep.iter().map(|&k| self.variance[k]).collect();
        let n = self.dims[i];
        let mut full = vec![0; self.rank()];
        let values = multi_indices(&dims)
            .map(|out| {
                for (slot, &k) in keep.iter().enumerate() {
                    full[k] = out[slot];
                }
                let mut acc = T::zero();
                for a in 0..n {
                    for b in 0..n {
                        if let Some(w) = weight(a, b) {
                            full[i] = a;
                            full[j] = b;
                            acc = acc + w * self.values[self.offset(&full)].clone();
                        }
                    }
                }
                acc
            })
            .collect();
        Self {
            dims,
            variance,
            values,
            basis: self.basis,
        }
    }

    /// Applies `m[a][b]` to index `i`: `t'_{..a..} = Σ_b m[a][b] t_{..b..}`.
    pub fn transform_index(&self, i: usize, m: &[Vec<T>]) -> Result<Self> {
        self.check_index(i)?;
        let n = self.dims[i];
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: m.len(),
            });
        }
        let st = strides(&self.dims)[i];
        let mut out = self.clone();
        for (flat, slot) in out.values.iter_mut().enumerate() {
            let a = (flat / st) % n;
            let base = flat - a * st;
            let mut acc = T::zero();
            for (b, w) in m[a].iter().enumerate() {
                if !w.is_zero() {
                    acc = acc + w.clone() * self.values[base + b * st].clone();
                }
            }
            *slot = acc;
        }
        Ok(out)
    }

    /// Reorders indices: index `k` of the result is index `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let r = self.rank();
        let mut seen = vec![false; r];
        if perm.len() != r {
            return Err(GeomError::DimensionMismatch {
                expected: r,
                got: perm.len(),
            });
        }
        for &p in perm {
            self.check_index(p)?;
            if seen[p] {
                return Err(GeomError::InvalidParameter(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let variance = perm.iter().map(|&p| self.variance[p]).collect();
        let mut src = vec![0; r];
        let values = multi_indices(&dims)
            .map(|idx| {
                for (k, &p) in perm.iter().enumerate() {
                    src[p] = idx[k];
                }
                self.values[self.offset(&src)].clone()
            })
            .collect();
        Ok(Self {
            dims,
            variance,
            values,
            basis: self.basis,
        })
    }
}

impl DenseTensor<f64> {
    /// Flips the variance of index `i`: a lower index is raised with the
    /// inverse of `g`, an upper index is lowered with `g`.
    pub fn raise_lower(&self, i: usize, g: &DMatrix<f64>) -> Result<Self> {
        self.check_index(i)?;
        let n = self.dims[i];
        if g.nrows() != n || g.ncols() != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: g.nrows(),
            });
        }
        let m = match self.variance[i] {
            Variance::Contravariant => {
                check_metric(g)?;
                g.clone()
            }
            Variance::Covariant => inverse_metric(g)?,
        };
        let rows: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| m[(a, b)]).collect()).collect();
        let mut out = self.transform_index(i, &rows)?;
        out.variance[i] = self.variance[i].flipped();
        Ok(out)
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.rank() != 2 {
            return Err(GeomError::DimensionMismatch {
                expected: 2,
                got: self.rank(),
            });
        }
        Ok(DMatrix::from_row_slice(self.dims[0], self.dims[1], &self.values))
    }

    pub fn from_matrix(m: &DMatrix<f64>, variance: [Variance; 2]) -> Self {
        Self::from_fn(vec![m.nrows(), m.ncols()], variance.to_vec(), |i| m[(i[0], i[1])])
    }
}

/// Symmetry and nondegeneracy check shared by metric consumers.
pub fn check_metric(g: &DMatrix<f64>) -> Result<()> {
    let scale = g.amax();
    let asym = (g - g.transpose()).amax();
    if asym > 1e-14 * scale.max(1.0) {
        return Err(GeomError::AsymmetricMetric { asymmetry: asym });
    }
    let det = g.determinant();
    let n = g.nrows() as i32;
    if !det.is_finite() || det.abs() < 1e-12 * scale.powi(n) || scale == 0.0 {
        return Err(GeomError::DegenerateMetric { det, scale });
    }
    Ok(())
}

pub fn inverse_metric(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_metric(g)?;
    let inv = g.clone().try_inverse().ok_or(GeomError::DegenerateMetric {
        det: 0.0,
        scale: g.amax(),
    })?;
    Ok((&inv + inv.transpose()) * 0.5)
}

/// Index symmetries that can be checked on a tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryClass {
    /// `T_{..a..b..} = -T_{..b..a..}` for the given positions.
    AntisymmetricPair(usize, usize),
    SymmetricPair(usize, usize),
    /// Antisymmetry in each pair, pair exchange and the cyclic identity over
    /// the four listed positions.
    RiemannBlock([usize; 4]),
}

/// Result of [`check_symmetry`]. `offending` is `None` when the largest
/// violation is within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub max_violation: f64,
    pub offending: Option<Vec<usize>>,
    pub identity: Option<&'static str>,
}

impl SymmetryReport {
    pub fn is_clean(&self) -> bool {
        self.offending.is_none()
    }
}

/// Largest violation of `class`, computed in the tensor's own arithmetic and
/// converted to `f64` once per component.
pub fn check_symmetry<T: Scalar>(t: &DenseTensor<T>, class: SymmetryClass, tol: f64) -> SymmetryReport {
    let mut worst = 0.0f64;
    let mut at: Option<(Vec<usize>, &'static str)> = None;
    let mut consider = |v: T, idx: &[usize], name: &'static str, worst: &mut f64| {
        let v = v.abs().to_f64().unwrap_or(f64::INFINITY);
        if v > *worst {
            *worst = v;
            at = Some((idx.to_vec(), name));
        }
    };
    let swap = |idx: &[usize], a: usize, b: usize| {
        let mut s = idx.to_vec();
        s.swap(a, b);
        s
    };
    let rank = t.rank();
    let in_range = |ps: &[usize]| ps.iter().all(|&p| p < rank);
    let all: Vec<Vec<usize>> = multi_indices(t.dims()).collect();
    match class {
        SymmetryClass::AntisymmetricPair(a, b) if in_range(&[a, b]) => {
            for idx in &all {
                let v = t.get(idx).clone() + t.get(&swap(idx, a, b)).clone();
                consider(v, idx, "antisymmetric pair", &mut worst);
            }
        }
        SymmetryClass::SymmetricPair(a, b) if in_range(&[a, b]) => {
            for idx in &all {
                let v = t.get(idx).clone() - t.get(&swap(idx, a, b)).clone();
                consider(v, idx, "symmetric pair", &mut worst);
            }
        }
        SymmetryClass::RiemannBlock(p) if in_range(&p) => {
            for idx in &all {
                let v = t.get(idx).clone() + t.get(&swap(idx, p[0], p[1])).clone();
                consider(v, idx, "antisymmetry in the first pair", &mut worst);
            }
            for idx in &all {
                let v = t.get(idx).clone() + t.get(&swap(idx, p[2], p[3])).clone();
                consider(v, idx, "antisymmetry in the second pair", &mut worst);
            }
            for idx in &all {
                let mut e = idx.clone();
                e[p[0]] = idx[p[2]];
                e[p[1]] = idx[p[3]];
                e[p[2]] = idx[p[0]];
                e[p[3]] = idx[p[1]];
                let v = t.get(idx).clone() - t.get(&e).clone();
                consider(v, idx, "pair exchange", &mut worst);
            }
            for idx in &all {
                // R_abcd + R_acdb + R_adbc
                let (b, c, d) = (idx[p[1]], idx[p[2]], idx[p[3]]);
                let mut i2 = idx.clone();
                i2[p[1]] = c;
                i2[p[2]] = d;
                i2[p[3]] = b;
                let mut i3 = idx.clone();
                i3[p[1]] = d;
                i3[p[2]] = b;
                i3[p[3]] = c;
                let v = t.get(idx).clone() + t.get(&i2).clone() + t.get(&i3).clone();
                consider(v, idx, "cyclic identity", &mut worst);
            }
        }
        _ => {
            return SymmetryReport {
                max_violation: f64::INFINITY,
                offending: Some(vec![]),
                identity: Some("positions out of range"),
            }
        }
    }
    match at {
        Some((idx, name)) if worst > tol => SymmetryReport {
            max_violation: worst,
            offending: Some(idx),
            identity: Some(name),
        },
        _ => SymmetryReport {
            max_violation: worst,
            offending: None,
            identity: None,
        },
    }
}

/// `K (g_ac g_bd - g_ad g_bc)`, fully covariant.
pub fn constant_curvature_riemann<T: Scalar>(k: T, g: &[Vec<T>]) -> DenseTensor<T> {
    let n = g.len();
    DenseTensor::covariant(4, n, |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        k.clone() * (g[a][c].clone() * g[b][d].clone() - g[a][d].clone() * g[b][c].clone())
    })
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}
