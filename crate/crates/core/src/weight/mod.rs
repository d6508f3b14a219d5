//! Coherence weight and the best incoherent approximation.
//!
//! The coherence weight of `rho` is `1 - max sum_i lambda_i` over `lambda >= 0`
//! with `rho - diag(lambda) >= 0`. The optimum splits the state as
//! `rho = (1 - w) rho_f + w rho_r` with `rho_f` diagonal and `w` as small as
//! possible. Every solve returns a primal point and a dual witness, and the
//! reported weight is bracketed by the two.

mod barrier;
mod witness;

pub use barrier::SolverState;
pub use witness::{check_dual_feasible, dual_witness, DualWitness, DUAL_FEAS_TOL};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{min_eigenvalue, ComplexMatrix};
use crate::states::DensityMatrix;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub barrier_mu0: f64,
    pub mu_shrink: f64,
    pub mu_floor: f64,
    /// Centering stops when half the squared scaled Newton decrement drops below this.
    pub newton_tol: f64,
    /// Per centering step.
    pub max_newton_iters: usize,
    pub psd_tol: f64,
    /// Relative eigenvalue cutoff separating range from kernel.
    pub rank_tol: f64,
    /// Path following stops once the certified gap falls below this.
    pub target_gap: f64,
    /// Largest certified gap accepted without reporting a stall.
    pub certified_gap_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            barrier_mu0: 1.0,
            mu_shrink: 0.1,
            mu_floor: 1e-10,
            newton_tol: 1e-10,
            max_newton_iters: 100,
            psd_tol: 1e-9,
            rank_tol: 1e-10,
            target_gap: 1e-8,
            certified_gap_tol: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("barrier_mu0", self.barrier_mu0),
            ("mu_floor", self.mu_floor),
            ("newton_tol", self.newton_tol),
            ("psd_tol", self.psd_tol),
            ("rank_tol", self.rank_tol),
            ("target_gap", self.target_gap),
            ("certified_gap_tol", self.certified_gap_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::BadParameters(format!("{name} must be positive")));
            }
        }
        if !(self.mu_shrink > 0.0 && self.mu_shrink < 1.0) {
            return Err(Error::BadParameters("mu_shrink must lie in (0, 1)".into()));
        }
        if self.max_newton_iters == 0 {
            return Err(Error::BadParameters("max_newton_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Optimal split of a state into an incoherent part and a coherent remainder.
#[derive(Clone, Debug, Serialize)]
pub struct BfaDecomposition {
    /// `1 - sum(lambda)`
    pub weight: f64,
    pub lambda: Vec<f64>,
    /// `diag(lambda) / sum(lambda)`; absent when the weight is 1.
    #[serde(skip)]
    pub rho_f: Option<DensityMatrix>,
    /// `(rho - diag(lambda)) / weight`; absent when the weight is 0.
    #[serde(skip)]
    pub rho_r: Option<DensityMatrix>,
    /// Certified duality gap.
    pub gap: f64,
    #[serde(skip)]
    pub state: DensityMatrix,
}

impl BfaDecomposition {
    /// Builds the split induced by an arbitrary `lambda`; `gap` is left at infinity.
    pub fn from_lambda(rho: &DensityMatrix, lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() != rho.dim() {
            return Err(Error::DimensionMismatch { expected: rho.dim(), found: lambda.len() });
        }
        let total: f64 = lambda.iter().sum();
        let weight = (1.0 - total).clamp(0.0, 1.0);
        let rho_f = (total > 0.0)
            .then(|| DensityMatrix::new_unchecked(ComplexMatrix::from_diagonal(&lambda).scale(1.0 / total)));
        let rho_r = (weight > 0.0).then(|| {
            let rem = rho.matrix() - &ComplexMatrix::from_diagonal(&lambda);
            DensityMatrix::new_unchecked(rem.scale(1.0 / weight))
        });
        Ok(Self { weight, lambda, rho_f, rho_r, gap: f64::INFINITY, state: rho.clone() })
    }
}

impl BfaDecomposition {
    /// Builds the split from the slack diagonal `s_i = rho_ii - lambda_i`, which
    /// keeps the remainder accurate when the weight is tiny. `gap` is left at infinity.
    fn from_slack_diagonal(rho: &DensityMatrix, slack: &[f64]) -> Result<Self> {
        let m = rho.matrix();
        let lambda: Vec<f64> = slack.iter().enumerate().map(|(i, s)| (m[(i, i)].re - s).max(0.0)).collect();
        let total: f64 = lambda.iter().sum();
        let weight = slack.iter().sum::<f64>().clamp(0.0, 1.0);
        if !(weight > 0.0) || total <= 0.0 {
            return Self::from_lambda(rho, lambda);
        }
        let rho_f = DensityMatrix::new_unchecked(ComplexMatrix::from_diagonal(&lambda).scale(1.0 / total));
        let rho_r = DensityMatrix::new_unchecked(barrier::with_diagonal(m, slack).scale(1.0 / weight));
        Ok(Self { weight, lambda, rho_f: Some(rho_f), rho_r: Some(rho_r), gap: f64::INFINITY, state: rho.clone() })
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub decomposition: BfaDecomposition,
    pub witness: DualWitness,
    /// `None` for inputs that needed no iterations (diagonal states).
    pub solver_state: Option<SolverState>,
}

pub fn coherence_weight(rho: &DensityMatrix, cfg: &SolverConfig) -> Result<BfaDecomposition> {
    Ok(solve(rho, cfg)?.decomposition)
}

pub fn solve(rho: &DensityMatrix, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    let d = rho.dim();
    if rho.is_diagonal() {
        let mut decomposition = BfaDecomposition::from_lambda(rho, rho.matrix().diagonal())?;
        decomposition.weight = 0.0;
        decomposition.rho_r = None;
        decomposition.gap = 0.0;
        return Ok(Solution { decomposition, witness: DualWitness::zero(d), solver_state: None });
    }

    let eig = rho.eig();
    // Near the floor the slack is conditioned like 1/mu and the lifted witness
    // loses accuracy, so the tightest certificate seen along the tail is kept.
    let mut best: Option<(f64, SolverState, DualWitness)> = None;
    let last = barrier::run(rho, &eig, cfg, |state| {
        // omega = 0 certifies a zero bound, which wins for nearly diagonal states.
        let witness = match dual_witness(rho, state) {
            Ok(w) if w.bound > 0.0 => w,
            _ => DualWitness::zero(d),
        };
        let weight = (1.0 - state.lambda.iter().sum::<f64>()).clamp(0.0, 1.0);
        let gap = weight - witness.bound;
        if best.as_ref().is_none_or(|b| gap < b.0) {
            best = Some((gap, state.clone(), witness));
        }
        gap <= cfg.target_gap
    })?;
    let Some((gap, state, witness)) = best else {
        let upper = (1.0 - last.lambda.iter().sum::<f64>()).clamp(0.0, 1.0);
        return Err(Error::SolverStall { mu: last.mu, lower: 0.0, upper });
    };
    if !(gap <= cfg.certified_gap_tol) {
        let upper = (1.0 - state.lambda.iter().sum::<f64>()).clamp(0.0, 1.0);
        return Err(Error::SolverStall { mu: state.mu, lower: witness.bound.max(0.0), upper });
    }
    // The centered iterate sits about mu inside the cone, which for small
    // weights leaves the remainder well away from the boundary.
    let pushed = barrier::push_to_boundary(rho, &state).and_then(|slack_diag| {
        let dec = BfaDecomposition::from_slack_diagonal(rho, &slack_diag).ok()?;
        let slack = barrier::with_diagonal(rho.matrix(), &slack_diag);
        let ok = dec.weight >= witness.bound - cfg.target_gap
            && min_eigenvalue(&slack).is_ok_and(|m| m >= -1e-9 * dec.weight);
        ok.then_some(dec)
    });
    let mut decomposition = match pushed {
        Some(dec) => dec,
        None => BfaDecomposition::from_lambda(rho, state.lambda.clone())?,
    };
    decomposition.gap = (decomposition.weight - witness.bound).max(0.0);
    Ok(Solution { decomposition, witness, solver_state: Some(state) })
}

/// Weak-duality check. Returns `weight - bound`, which brackets the true value
/// in `[w.bound, dec.weight]`.
pub fn verify_certificate(rho: &DensityMatrix, dec: &BfaDecomposition, w: &DualWitness) -> Result<f64> {
    verify_certificate_with(rho, dec, w, SolverConfig::default().psd_tol)
}

pub fn verify_certificate_with(rho: &DensityMatrix, dec: &BfaDecomposition, w: &DualWitness, psd_tol: f64) -> Result<f64> {
    if dec.lambda.len() != rho.dim() || w.omega.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: dec.lambda.len().max(w.omega.dim()) });
    }
    if let Some(&neg) = dec.lambda.iter().find(|&&l| l < -1e-12) {
        return Err(Error::PrimalInfeasible { min_eigenvalue: neg });
    }
    let slack = rho.matrix() - &ComplexMatrix::from_diagonal(&dec.lambda);
    let min_eigenvalue = min_eigenvalue(&slack)?;
    if !(min_eigenvalue >= -psd_tol) {
        return Err(Error::PrimalInfeasible { min_eigenvalue });
    }
    check_dual_feasible(&w.omega, DUAL_FEAS_TOL).map_err(Error::DualInfeasible)?;
    let primal = 1.0 - dec.lambda.iter().sum::<f64>();
    let bound = rho.matrix().trace_product_re(&w.omega);
    let gap = primal - bound;
    if gap < -1e-8 {
        return Err(Error::DualInfeasible(format!("bound {bound} exceeds primal value {primal}")));
    }
    Ok(gap)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryDiagnostics {
    /// Near zero when `rho_r` sits on the boundary of the state space.
    pub rho_r_min_eig: f64,
    pub rho_f_min_diag: f64,
    /// `|(1 - w) - ||rho - rho_r|| / ||rho_r - rho_f|||` in Hilbert–Schmidt norm.
    pub collinearity_residual: f64,
}

pub fn boundary_diagnostics(dec: &BfaDecomposition) -> Result<BoundaryDiagnostics> {
    let rho_f = dec.rho_f.as_ref().ok_or(Error::MissingPart("incoherent"))?;
    let rho_r = dec.rho_r.as_ref().ok_or(Error::MissingPart("coherent remainder"))?;
    let rho_r_min_eig = rho_r.eig().min();
    let rho_f_min_diag = rho_f.matrix().diagonal().into_iter().fold(f64::INFINITY, f64::min);
    let num = (dec.state.matrix() - rho_r.matrix()).frobenius_norm();
    let den = (rho_r.matrix() - rho_f.matrix()).frobenius_norm();
    let collinearity_residual = ((1.0 - dec.weight) - num / den).abs();
    Ok(BoundaryDiagnostics { rho_r_min_eig, rho_f_min_diag, collinearity_residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonotoneBound {
    /// `C_l1 / (d - 1)`
    pub lhs: f64,
    /// Coherence weight.
    pub rhs: f64,
}

/// Normalized l1-coherence against the coherence weight; `lhs <= rhs` always.
pub fn normalized_monotone_bound(rho: &DensityMatrix, cfg: &SolverConfig) -> Result<MonotoneBound> {
    let d = rho.dim();
    let lhs = if d > 1 { rho.l1_coherence() / (d - 1) as f64 } else { 0.0 };
    Ok(MonotoneBound { lhs, rhs: coherence_weight(rho, cfg)?.weight })
}
