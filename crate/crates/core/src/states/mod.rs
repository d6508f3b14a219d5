//! Density matrices and the scalar functionals computed on them.

mod ensemble;
mod io;

pub use ensemble::{
    complex_gaussian, ginibre_state, haar_unitary, haar_vector, sample, sample_one, substream, EnsembleKind,
    EnsembleSpec, GaussianSource,
};
pub use io::{read_state, state_from_json, state_to_json, write_state, StateFile};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{eig_hermitian, normalized, ComplexMatrix, HermitianEig, C64};

/// Trace must equal one within this.
pub const TRACE_TOL: f64 = 1e-10;
/// Minimum eigenvalue must be at least `-MIN_EIG_TOL`.
pub const MIN_EIG_TOL: f64 = 1e-9;
/// Default amplitude threshold when counting coherence rank.
pub const DEFAULT_COHERENCE_RANK_TOL: f64 = 1e-7;

/// Hermitian, unit-trace, positive semidefinite matrix in the fixed incoherent basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and symmetrizes `m`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.dim() == 0 {
            return Err(Error::InvalidState("dimension must be positive".into()));
        }
        let m = m.to_hermitian().map_err(|e| Error::InvalidState(e.to_string()))?;
        let tr = m.trace().re;
        if !((tr - 1.0).abs() <= TRACE_TOL) {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = eig_hermitian(&m)?.min();
        if !(min >= -MIN_EIG_TOL) {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:e} is negative")));
        }
        Ok(Self { matrix: m })
    }

    /// Skips validation; callers guarantee the invariants up to round-off.
    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self { matrix: m.hermitian_part() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64) }
    }

    /// `|v><v|` for `v` normalized internally.
    pub fn pure(v: &[C64]) -> Result<Self> {
        let v = normalized(v)?;
        Ok(Self { matrix: ComplexMatrix::outer(&v) })
    }

    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diagonal(probabilities))
    }

    /// `|+_d><+_d|`, the uniform superposition.
    pub fn max_coherent(dim: usize) -> Self {
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { matrix: ComplexMatrix::outer(&vec![a; dim]) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn eig(&self) -> HermitianEig {
        eig_hermitian(&self.matrix).expect("density matrices are Hermitian")
    }

    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `sum_{i != j} |rho_ij|`
    pub fn l1_coherence(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += self.matrix[(i, j)].norm();
                }
            }
        }
        acc
    }

    pub fn dephased(&self) -> Self {
        Self { matrix: ComplexMatrix::from_diagonal(&self.matrix.diagonal()) }
    }

    pub fn is_diagonal(&self) -> bool {
        self.matrix.off_diagonal_norm() == 0.0
    }

    /// `p * self + (1 - p) * other`
    pub fn mix(&self, other: &Self, p: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadParameters(format!("mixing probability {p} outside [0, 1]")));
        }
        Ok(Self { matrix: &self.matrix.scale(p) + &other.matrix.scale(1.0 - p) })
    }
}

/// Number of amplitudes of the normalized vector with modulus above `tol`.
pub fn coherence_rank(v: &[C64], tol: f64) -> Result<usize> {
    let v = normalized(v)?;
    Ok(v.iter().filter(|z| z.norm() > tol).count())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateDiagnostics {
    pub purity: f64,
    /// `1 / Tr rho^2`
    pub participation_ratio: f64,
    /// `2 (1 - Tr rho^2)`, normalized linear entropy for qubits.
    pub mixedness: f64,
    pub l1_coherence: f64,
    pub min_eigenvalue: f64,
    /// Equals `min_eigenvalue` for `dim == 1`.
    pub second_min_eigenvalue: f64,
    pub min_eigvec_coherence_rank: usize,
}

pub fn diagnostics(rho: &DensityMatrix, coherence_rank_tol: f64) -> Result<StateDiagnostics> {
    let purity = rho.purity();
    if !(purity > 0.0 && purity <= 1.0 + 1e-9) {
        return Err(Error::InvalidState(format!("purity {purity} out of range")));
    }
    let eig = rho.eig();
    let second = if rho.dim() > 1 { eig.eigenvalues[1] } else { eig.eigenvalues[0] };
    Ok(StateDiagnostics {
        purity,
        participation_ratio: 1.0 / purity,
        mixedness: 2.0 * (1.0 - purity),
        l1_coherence: rho.l1_coherence(),
        min_eigenvalue: eig.min(),
        second_min_eigenvalue: second,
        min_eigvec_coherence_rank: coherence_rank(&eig.eigenvector(0), coherence_rank_tol)?,
    })
}

#[derive(Clone, Debug)]
pub struct DirectSumBlock {
    pub weight: f64,
    pub state: DensityMatrix,
}

/// Blocks occupy consecutive index ranges of the ambient basis in order.
#[derive(Clone, Debug)]
pub struct DirectSumSpec {
    pub dim: usize,
    pub blocks: Vec<DirectSumBlock>,
}

impl DirectSumSpec {
    pub fn new(blocks: Vec<(f64, DensityMatrix)>) -> Self {
        let dim = blocks.iter().map(|(_, s)| s.dim()).sum();
        Self { dim, blocks: blocks.into_iter().map(|(weight, state)| DirectSumBlock { weight, state }).collect() }
    }
}

pub fn direct_sum(spec: &DirectSumSpec) -> Result<DensityMatrix> {
    let total: usize = spec.blocks.iter().map(|b| b.state.dim()).sum();
    if total != spec.dim {
        return Err(Error::DimensionMismatch { expected: spec.dim, found: total });
    }
    if spec.blocks.iter().any(|b| !(b.weight > 0.0)) {
        return Err(Error::BadParameters("block weights must be positive".into()));
    }
    let wsum: f64 = spec.blocks.iter().map(|b| b.weight).sum();
    if !((wsum - 1.0).abs() <= 1e-12) {
        return Err(Error::BadParameters(format!("block weights sum to {wsum}")));
    }
    let mut m = ComplexMatrix::zeros(spec.dim);
    let mut offset = 0;
    for b in &spec.blocks {
        let n = b.state.dim();
        for i in 0..n {
            for j in 0..n {
                m[(offset + i, offset + j)] = b.state.get(i, j) * b.weight;
            }
        }
        offset += n;
    }
    Ok(DensityMatrix::new_unchecked(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus2() -> DensityMatrix {
        DensityMatrix::max_coherent(2)
    }

    #[test]
    fn validation() {
        let m = ComplexMatrix::from_diagonal(&[0.5, 0.4]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.6], &[0.6, 0.5]]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
    }

    #[test]
    fn diagnostics_examples() {
        let d = diagnostics(&DensityMatrix::maximally_mixed(3), DEFAULT_COHERENCE_RANK_TOL).unwrap();
        assert!((d.purity - 1.0 / 3.0).abs() < 1e-15);
        assert!((d.participation_ratio - 3.0).abs() < 1e-12);
        assert_eq!(d.l1_coherence, 0.0);

        let d = diagnostics(&plus2(), DEFAULT_COHERENCE_RANK_TOL).unwrap();
        assert!((d.purity - 1.0).abs() < 1e-15);
        assert!(d.mixedness.abs() < 1e-15);
        assert!((d.l1_coherence - 1.0).abs() < 1e-15);
        // kernel of |+><+| is |->, coherence rank 2
        assert_eq!(d.min_eigvec_coherence_rank, 2);

        let rho = DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.5, 0.25], &[0.25, 0.5]])).unwrap();
        let d = diagnostics(&rho, DEFAULT_COHERENCE_RANK_TOL).unwrap();
        // Tr rho^2 = 2 * (0.25 + 0.0625)
        assert!((d.mixedness - 0.75).abs() < 1e-15);
        assert!((d.l1_coherence - 0.5).abs() < 1e-15);
        assert!((d.participation_ratio * d.purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn direct_sum_examples() {
        let single = direct_sum(&DirectSumSpec::new(vec![(1.0, plus2())])).unwrap();
        assert_eq!(single, plus2());

        let ds = direct_sum(&DirectSumSpec::new(vec![(0.5, plus2()), (0.5, plus2())])).unwrap();
        assert_eq!(ds.dim(), 4);
        assert!((ds.get(0, 1) - C64::new(0.25, 0.0)).norm() < 1e-15);
        assert!((ds.get(2, 3) - C64::new(0.25, 0.0)).norm() < 1e-15);
        assert_eq!(ds.get(1, 2), C64::new(0.0, 0.0));

        let a = DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.9, 0.2], &[0.2, 0.1]])).unwrap();
        let b = DensityMatrix::maximally_mixed(3);
        let ds = direct_sum(&DirectSumSpec::new(vec![(0.3, a.clone()), (0.7, b.clone())])).unwrap();
        assert_eq!(ds.dim(), 5);
        assert!((ds.matrix().trace().re - 1.0).abs() < 1e-15);
        for i in 0..2 {
            for j in 2..5 {
                assert_eq!(ds.get(i, j), C64::new(0.0, 0.0));
            }
        }
        let expected = 0.09 * a.purity() + 0.49 * b.purity();
        assert!((ds.purity() - expected).abs() < 1e-15);

        let bad = DirectSumSpec { dim: 4, blocks: DirectSumSpec::new(vec![(1.0, plus2())]).blocks };
        assert!(matches!(direct_sum(&bad), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn coherence_rank_counts_amplitudes() {
        let v = [C64::new(1.0, 0.0), C64::new(0.0, 1e-9), C64::new(0.5, 0.5)];
        assert_eq!(coherence_rank(&v, 1e-7).unwrap(), 2);
        assert!(coherence_rank(&[C64::new(0.0, 0.0)], 1e-7).is_err());
    }
}
