use nalgebra::DMatrix;

use super::MetricChart;
use crate::error::{GeomError, Result};
use crate::tensor::Signature;

/// Frame matrix with `E η Eᵀ = g`. Rows are coordinate indices, columns frame
/// indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Vielbein {
    pub e: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub signature: Signature,
}

impl Vielbein {
    /// Coordinate components of the orthonormal frame vectors, one per
    /// column: `E^{-T}`.
    pub fn frame_vectors(&self) -> DMatrix<f64> {
        self.inverse.transpose()
    }

    /// Coordinate vector of the frame components `v`.
    pub fn to_coordinates(&self, v: &[f64]) -> Vec<f64> {
        let f = self.frame_vectors();
        (0..f.nrows()).map(|i| (0..v.len()).map(|a| f[(i, a)] * v[a]).sum()).collect()
    }

    /// Frame components of the coordinate vector `w`: `Eᵀ w`.
    pub fn to_frame(&self, w: &[f64]) -> Vec<f64> {
        (0..self.e.ncols()).map(|a| (0..w.len()).map(|i| self.e[(i, a)] * w[i]).sum()).collect()
    }

    pub fn recompose(&self) -> DMatrix<f64> {
        &self.e * self.signature.eta() * self.e.transpose()
    }

    /// Builds the frame of a symmetric matrix by eigendecomposition.
    ///
    /// Eigenpairs are sorted into the `+` and `-` slots of `sig` by the
    /// coordinate index where each eigenvector peaks, and each frame vector is
    /// signed so its first non-negligible entry is positive.
    pub fn from_metric(g: &DMatrix<f64>, sig: &Signature) -> Result<Self> {
        let n = sig.dim();
        if g.nrows() != n || g.ncols() != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: g.nrows(),
            });
        }
        let eig = g.clone().symmetric_eigen();
        let scale = eig.eigenvalues.amax();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for k in 0..n {
            let l = eig.eigenvalues[k];
            if l.abs() <= 1e-12 * scale || !l.is_finite() {
                return Err(GeomError::DegenerateMetric {
                    det: g.determinant(),
                    scale,
                });
            }
            let v = eig.eigenvectors.column(k);
            let peak = v.iamax();
            if l > 0.0 {
                pos.push((peak, k));
            } else {
                neg.push((peak, k));
            }
        }
        if (pos.len(), neg.len()) != sig.pq_counts() {
            return Err(GeomError::SignatureMismatch {
                point: vec![],
                expected: sig.pq_counts(),
                found: (pos.len(), neg.len()),
            });
        }
        let order = |list: &mut Vec<(usize, usize)>| {
            list.sort_by(|a, b| a.0.cmp(&b.0).then(eig.eigenvalues[a.1].abs().total_cmp(&eig.eigenvalues[b.1].abs())))
        };
        order(&mut pos);
        order(&mut neg);
        let (mut pi, mut ni) = (pos.into_iter(), neg.into_iter());
        let mut e = DMatrix::zeros(n, n);
        for slot in 0..n {
            let (_, k) = if sig.entries()[slot] > 0 { pi.next() } else { ni.next() }.expect("counts checked");
            let mut col = eig.eigenvectors.column(k) * eig.eigenvalues[k].abs().sqrt();
            if let Some(first) = col.iter().find(|c| c.abs() > 1e-12) {
                if *first < 0.0 {
                    col = -col;
                }
            }
            e.set_column(slot, &col);
        }
        let inverse = e.clone().try_inverse().ok_or(GeomError::DegenerateMetric {
            det: g.determinant(),
            scale,
        })?;
        Ok(Self {
            e,
            inverse,
            signature: sig.clone(),
        })
    }
}

pub fn vielbein_at(chart: &dyn MetricChart, x: &[f64]) -> Result<Vielbein> {
    let g = chart.metric(x)?;
    Vielbein::from_metric(&g, chart.signature()).map_err(|err| match err {
        GeomError::SignatureMismatch { expected, found, .. } => GeomError::SignatureMismatch {
            point: x.to_vec(),
            expected,
            found,
        },
        other => other,
    })
}
