//! Mixed maximally coherent states: mixed states whose coherence weight is 1.
//!
//! A state reaches weight 1 exactly when no incoherent projector `|i><i|` can
//! be subtracted from it, i.e. every `|i>` has a component in the kernel. Two
//! constructive families are provided (kernel with full coherence rank, and
//! direct sums of coherent pure blocks), plus the classifier used on qutrits
//! where rank two with a fully coherent kernel vector is also necessary.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{norm, ComplexMatrix, C64};
use crate::states::{
    coherence_rank, direct_sum, ginibre_state, haar_unitary, haar_vector, substream, DensityMatrix, DirectSumSpec,
    GaussianSource, DEFAULT_COHERENCE_RANK_TOL,
};
use crate::weight::{coherence_weight, SolverConfig};

/// Weight at or above `1 - MMCS_WEIGHT_TOL` counts as maximal.
pub const MMCS_WEIGHT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QutritClassification {
    NotApplicable,
    Mmcs,
    NotMmcs,
}

#[derive(Clone, Debug, Serialize)]
pub struct MmcsVerdict {
    pub rank: usize,
    pub is_rank_deficient: bool,
    /// Orthonormal basis of the numerical kernel.
    #[serde(skip)]
    pub kernel_vectors: Vec<Vec<C64>>,
    /// Largest coherence rank attained by any kernel vector.
    pub max_kernel_coherence_rank: usize,
    pub theorem2_applies: bool,
    pub qutrit_classification: QutritClassification,
    pub participation_ratio: f64,
    /// Raw smallest eigenvalue, reported even when it is above the rank cutoff.
    pub min_eigenvalue: f64,
}

/// Spectral MMCS tests.
///
/// The largest coherence rank over the kernel is the number of indices `i`
/// with `|<i|k>| > coherence_rank_tol` for some unit kernel vector `k`, which
/// is `sqrt(<i|K|i>)` for the kernel projector `K`; a generic kernel vector
/// attains all of them at once.
pub fn classify(rho: &DensityMatrix, rank_tol: f64, coherence_rank_tol: f64) -> Result<MmcsVerdict> {
    let d = rho.dim();
    if d < 2 {
        return Err(Error::InvalidState("classification needs dimension at least 2".into()));
    }
    let eig = rho.eig();
    let (range, kernel) = eig.split_range(rank_tol);
    let rank = range.len();
    let max_kernel_coherence_rank = (0..d)
        .filter(|&i| kernel.iter().map(|k| k[i].norm_sqr()).sum::<f64>().sqrt() > coherence_rank_tol)
        .count();
    let is_rank_deficient = !kernel.is_empty();
    let theorem2_applies = is_rank_deficient && max_kernel_coherence_rank == d;
    let qutrit_classification = match (d, rank) {
        (3, 2) if theorem2_applies => QutritClassification::Mmcs,
        (3, 2) | (3, 3) => QutritClassification::NotMmcs,
        _ => QutritClassification::NotApplicable,
    };
    Ok(MmcsVerdict {
        rank,
        is_rank_deficient,
        kernel_vectors: kernel,
        max_kernel_coherence_rank,
        theorem2_applies,
        qutrit_classification,
        participation_ratio: 1.0 / rho.purity(),
        min_eigenvalue: eig.min(),
    })
}

#[derive(Clone, Debug)]
pub enum MmcsConstructionSpec {
    /// Kernel containing `psi` (all amplitudes nonzero). The state is
    /// `(1 - t) Q / (d - 1) + t Q W Q / Tr(Q W Q)` with `Q = 1 - |psi><psi|`,
    /// `t = complement_mix` and `W` a seeded Ginibre matrix.
    Theorem2Kernel { psi: Vec<C64>, complement_mix: f64 },
    /// `sum_j p_j |phi_j><phi_j|` on consecutive blocks, each `phi_j` of
    /// coherence rank at least two.
    ReversibleDirectSum { blocks: Vec<(f64, Vec<C64>)> },
}

impl MmcsConstructionSpec {
    pub fn dim(&self) -> usize {
        match self {
            MmcsConstructionSpec::Theorem2Kernel { psi, .. } => psi.len(),
            MmcsConstructionSpec::ReversibleDirectSum { blocks } => blocks.iter().map(|(_, v)| v.len()).sum(),
        }
    }
}

pub fn construct(spec: &MmcsConstructionSpec, seed: u64) -> Result<DensityMatrix> {
    match spec {
        MmcsConstructionSpec::Theorem2Kernel { psi, complement_mix } => {
            construct_theorem2(psi, *complement_mix, seed)
        }
        MmcsConstructionSpec::ReversibleDirectSum { blocks } => construct_reversible(blocks),
    }
}

fn check_normalized(v: &[C64]) -> Result<()> {
    let n = norm(v);
    if !((n - 1.0).abs() <= 1e-10) {
        return Err(Error::BadParameters(format!("vector norm {n} is not 1")));
    }
    Ok(())
}

fn construct_theorem2(psi: &[C64], t: f64, seed: u64) -> Result<DensityMatrix> {
    let d = psi.len();
    if d < 2 {
        return Err(Error::BadParameters("kernel vector needs dimension at least 2".into()));
    }
    check_normalized(psi)?;
    if psi.iter().any(|z| !(z.norm() > DEFAULT_COHERENCE_RANK_TOL)) {
        return Err(Error::BadParameters("kernel vector must have full coherence rank".into()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::BadParameters(format!("complement_mix {t} outside [0, 1]")));
    }
    let q = &ComplexMatrix::identity(d) - &ComplexMatrix::outer(psi);
    let mut m = q.scale((1.0 - t) / (d - 1) as f64);
    if t > 0.0 {
        let mut src = GaussianSource::new(substream(seed, 0));
        let w = ginibre_state(d, &mut src);
        let qwq = &(&q * w.matrix()) * &q;
        let tr = qwq.trace().re;
        m = &m + &qwq.scale(t / tr);
    }
    // Renormalize away round-off in the trace.
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(1.0 / tr))
}

fn construct_reversible(blocks: &[(f64, Vec<C64>)]) -> Result<DensityMatrix> {
    if blocks.is_empty() {
        return Err(Error::BadParameters("at least one block is required".into()));
    }
    let mut parts = Vec::with_capacity(blocks.len());
    for (p, phi) in blocks {
        check_normalized(phi)?;
        if coherence_rank(phi, DEFAULT_COHERENCE_RANK_TOL)? < 2 {
            return Err(Error::BadParameters("every block needs coherence rank at least 2".into()));
        }
        parts.push((*p, DensityMatrix::pure(phi)?));
    }
    direct_sum(&DirectSumSpec::new(parts))
}

/// Random theorem-2 spec: Haar kernel vector and uniform complement mix.
pub fn random_theorem2_spec(dim: usize, seed: u64) -> Result<MmcsConstructionSpec> {
    if dim < 2 {
        return Err(Error::BadParameters("dimension must be at least 2".into()));
    }
    let mut src = GaussianSource::new(substream(seed, 1));
    let psi = loop {
        let v = haar_vector(dim, &mut src);
        if v.iter().all(|z| z.norm() > 1e-3) {
            break v;
        }
    };
    let complement_mix = src.uniform();
    Ok(MmcsConstructionSpec::Theorem2Kernel { psi, complement_mix })
}

/// Random reversible spec with the given block sizes (each at least 2).
pub fn random_reversible_spec(block_dims: &[usize], seed: u64) -> Result<MmcsConstructionSpec> {
    if block_dims.is_empty() || block_dims.iter().any(|&b| b < 2) {
        return Err(Error::BadParameters("block sizes must all be at least 2".into()));
    }
    let mut src = GaussianSource::new(substream(seed, 1));
    let raw: Vec<f64> = block_dims.iter().map(|_| -(1.0 - src.uniform()).ln() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let head: f64 = weights[..weights.len() - 1].iter().sum();
    *weights.last_mut().unwrap() = 1.0 - head;
    let blocks = block_dims
        .iter()
        .zip(weights)
        .map(|(&b, p)| {
            let phi = loop {
                let v = haar_vector(b, &mut src);
                if v.iter().all(|z| z.norm() > 1e-3) {
                    break v;
                }
            };
            (p, phi)
        })
        .collect();
    Ok(MmcsConstructionSpec::ReversibleDirectSum { blocks })
}

/// Random rank-2 qutrit: Haar 3x2 isometry columns with weights `(w, 1 - w)`,
/// `w` uniform in `[0.01, 0.99]`.
pub fn random_rank2_qutrit(seed: u64) -> DensityMatrix {
    let mut src = GaussianSource::new(substream(seed, 2));
    let u = haar_unitary(3, &mut src);
    let w = 0.01 + 0.98 * src.uniform();
    let col = |k: usize| -> Vec<C64> { (0..3).map(|i| u[(i, k)]).collect() };
    let m = &ComplexMatrix::outer(&col(0)).scale(w) + &ComplexMatrix::outer(&col(1)).scale(1.0 - w);
    DensityMatrix::new_unchecked(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParticipationBound {
    pub cw: f64,
    pub r: f64,
    /// False only for a qutrit with weight 1 and participation ratio above 2.
    pub consistent: bool,
}

pub fn qutrit_participation_bound(rho: &DensityMatrix, cfg: &SolverConfig) -> Result<ParticipationBound> {
    if rho.dim() != 3 {
        return Err(Error::WrongDimension { expected: 3, found: rho.dim() });
    }
    let cw = coherence_weight(rho, cfg)?.weight;
    let r = 1.0 / rho.purity();
    Ok(ParticipationBound { cw, r, consistent: !(cw >= 1.0 - MMCS_WEIGHT_TOL && r > 2.0 + 1e-6) })
}
