use nalgebra::{DMatrix, DVector};

/// Numerical nullspace of a matrix.
#[derive(Debug, Clone)]
pub struct Nullspace {
    /// Orthonormal basis vectors.
    pub basis: Vec<DVector<f64>>,
    /// Singular values, descending.
    pub singular_values: Vec<f64>,
    /// Smallest retained singular value over the largest discarded one. When
    /// nothing is discarded the denominator is machine epsilon times the
    /// largest singular value.
    pub gap: f64,
}

impl Nullspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Right nullspace of `a`: singular values below `rel_threshold` times the
/// largest are treated as zero. Short matrices are padded with zero rows.
pub fn nullspace(a: &DMatrix<f64>, rel_threshold: f64) -> Nullspace {
    nullspace_with_reference(a, rel_threshold, 0.0)
}

/// Like [`nullspace`], but the cut is `rel_threshold * max(σ_max, reference)`,
/// so a matrix that is zero relative to `reference` has a full nullspace.
pub fn nullspace_with_reference(a: &DMatrix<f64>, rel_threshold: f64, reference: f64) -> Nullspace {
    let k = a.ncols();
    let padded = if a.nrows() < k {
        let mut m = DMatrix::zeros(k, k);
        m.view_mut((0, 0), (a.nrows(), k)).copy_from(a);
        m
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let top = sv.first().copied().unwrap_or(0.0).max(reference);
    let cut = rel_threshold * top;
    let rank = sv.iter().filter(|&&s| s > cut).count();
    let basis = order[rank..].iter().map(|&i| v_t.row(i).transpose()).collect();
    let smallest_kept = if rank > 0 { sv[rank - 1] } else { top };
    let denom = sv.get(rank).copied().unwrap_or(0.0).max(f64::EPSILON * top);
    let gap = if denom > 0.0 { smallest_kept / denom } else { f64::INFINITY };
    Nullspace {
        basis,
        singular_values: sv,
        gap,
    }
}
