use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::tensor::Signature;

/// A matrix with exact complex rational entries.
pub type ExactMatrix = DMatrix<Complex<Rational64>>;

fn c(re: i64, im: i64) -> Complex<Rational64> {
    Complex::new(Rational64::from_integer(re), Rational64::from_integer(im))
}

fn commutator(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    a * b - b * a
}

fn max_modulus(m: &ExactMatrix) -> f64 {
    m.iter()
        .map(|z| {
            let re = z.re.to_f64().unwrap_or(f64::NAN);
            let im = z.im.to_f64().unwrap_or(f64::NAN);
            re.hypot(im)
        })
        .fold(0.0, f64::max)
}

/// The pseudo-rotation generators `(L_AB)^M_N = i(δ^M_A η_BN - δ^M_B η_AN)`
/// of `so(p,q)` acting on ambient coordinates.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    ambient: Signature,
    scale: Rational64,
    pairs: Vec<(usize, usize)>,
    matrices: Vec<ExactMatrix>,
}

/// One entry of the commutator table `[L_AB, L_CD]`.
#[derive(Debug, Clone)]
pub struct CommutatorEntry {
    pub first: (usize, usize),
    pub second: (usize, usize),
    /// Whether the product and the structure-constant formula agree exactly.
    pub exact: bool,
    /// Largest entry modulus of the difference.
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct CasimirReport {
    /// `η^AC η^BD L_AB L_CD`, summed over all index values.
    pub casimir: ExactMatrix,
    /// Largest entry modulus of `[C, L_AB]` over all generators.
    pub max_commutator_norm: f64,
    pub exact: bool,
}

/// Generators for the given ambient signature.
pub fn generators(ambient: &Signature) -> GeneratorSet {
    let m = ambient.dim();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
    let matrices = pairs
        .iter()
        .map(|&(a, b)| {
            let mut l = ExactMatrix::from_element(m, m, Complex::zero());
            l[(a, b)] = c(0, ambient.entries()[b].into());
            l[(b, a)] = c(0, -i64::from(ambient.entries()[a]));
            l
        })
        .collect();
    GeneratorSet {
        ambient: ambient.clone(),
        scale: Rational64::from_integer(1),
        pairs,
        matrices,
    }
}

impl GeneratorSet {
    pub fn ambient(&self) -> &Signature {
        &self.ambient
    }

    pub fn scale(&self) -> Rational64 {
        self.scale
    }

    /// Index pairs `(A, B)` with `A < B`, in storage order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `L_AB` for any ordered pair; `L_AA = 0` and `L_BA = -L_AB`.
    pub fn get(&self, a: usize, b: usize) -> ExactMatrix {
        let m = self.ambient.dim();
        if a == b {
            return ExactMatrix::from_element(m, m, Complex::zero());
        }
        let (lo, hi, sign) = if a < b { (a, b, 1) } else { (b, a, -1) };
        let idx = self.pairs.iter().position(|&p| p == (lo, hi)).expect("index in range");
        self.matrices[idx].map(|z| z * c(sign, 0))
    }

    /// All generators multiplied by `lambda`.
    pub fn scaled(&self, lambda: Rational64) -> Self {
        let f = Complex::new(lambda, Rational64::zero());
        Self {
            ambient: self.ambient.clone(),
            scale: self.scale * lambda,
            pairs: self.pairs.clone(),
            matrices: self.matrices.iter().map(|m| m.map(|z| z * f)).collect(),
        }
    }

    /// The real matrix `-i L_AB / scale`, an infinitesimal pseudo-rotation.
    pub fn real_matrix(&self, a: usize, b: usize) -> DMatrix<f64> {
        let l = self.get(a, b);
        l.map(|z| (z.im / self.scale).to_f64().unwrap_or(f64::NAN))
    }

    fn eta(&self, a: usize, b: usize) -> i64 {
        if a == b {
            self.ambient.entries()[a].into()
        } else {
            0
        }
    }

    /// `-i s (η_AC L_BD + η_AD L_CB + η_BC L_DA + η_BD L_AC)`, where `s` is
    /// the overall scale.
    pub fn structure_rhs(&self, (a, b): (usize, usize), (cc, d): (usize, usize)) -> ExactMatrix {
        let terms = [
            (self.eta(a, cc), self.get(b, d)),
            (self.eta(a, d), self.get(cc, b)),
            (self.eta(b, cc), self.get(d, a)),
            (self.eta(b, d), self.get(a, cc)),
        ];
        let m = self.ambient.dim();
        let mut sum = ExactMatrix::from_element(m, m, Complex::zero());
        for (e, l) in terms {
            if e != 0 {
                sum += l.map(|z| z * c(e, 0));
            }
        }
        let f = Complex::new(Rational64::zero(), -self.scale);
        sum.map(|z| z * f)
    }

    /// Every unordered pair of distinct generators against the structure
    /// formula.
    pub fn commutator_table(&self) -> Vec<CommutatorEntry> {
        let n = self.pairs.len();
        let jobs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        jobs.par_iter()
            .map(|&(i, j)| {
                let lhs = commutator(&self.matrices[i], &self.matrices[j]);
                let diff = lhs - self.structure_rhs(self.pairs[i], self.pairs[j]);
                CommutatorEntry {
                    first: self.pairs[i],
                    second: self.pairs[j],
                    exact: diff.iter().all(|z| z.is_zero()),
                    deviation: max_modulus(&diff),
                }
            })
            .collect()
    }
}

/// Builds the quadratic Casimir and commutes it with every generator.
pub fn casimir_check(gs: &GeneratorSet) -> CasimirReport {
    let m = gs.ambient.dim();
    let mut cas = ExactMatrix::from_element(m, m, Complex::zero());
    for a in 0..m {
        for b in 0..m {
            let w = gs.eta(a, a) * gs.eta(b, b);
            if a != b && w != 0 {
                let l = gs.get(a, b);
                cas += (&l * &l).map(|z| z * c(w, 0));
            }
        }
    }
    let residuals: Vec<ExactMatrix> = gs.matrices.par_iter().map(|l| commutator(&cas, l)).collect();
    CasimirReport {
        exact: residuals.iter().all(|r| r.iter().all(|z| z.is_zero())),
        max_commutator_norm: residuals.iter().map(max_modulus).fold(0.0, f64::max),
        casimir: cas,
    }
}
