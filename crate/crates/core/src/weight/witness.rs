//! Dual witnesses `omega` with `diag(omega) <= 0` and `omega <= 1`, whose value
//! `Tr(rho omega)` lower-bounds the coherence weight.

use serde::Serialize;

use super::barrier::SolverState;
use crate::error::{Error, Result};
use crate::hermitian::{eig_hermitian, ComplexMatrix, C64};
use crate::states::DensityMatrix;

/// Feasibility slack allowed on both dual constraints.
pub const DUAL_FEAS_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct DualWitness {
    pub omega: ComplexMatrix,
    /// `Tr(rho omega)`
    pub bound: f64,
}

impl DualWitness {
    pub fn new(rho: &DensityMatrix, omega: ComplexMatrix) -> Result<Self> {
        if omega.dim() != rho.dim() {
            return Err(Error::DimensionMismatch { expected: rho.dim(), found: omega.dim() });
        }
        let omega = omega.to_hermitian()?;
        let bound = rho.matrix().trace_product_re(&omega);
        Ok(Self { omega, bound })
    }

    /// `omega = 0`, feasible for every state.
    pub fn zero(dim: usize) -> Self {
        Self { omega: ComplexMatrix::zeros(dim), bound: 0.0 }
    }
}

/// Checks `diag(omega) <= tol` and `max eig(omega) <= 1 + tol`.
pub fn check_dual_feasible(omega: &ComplexMatrix, tol: f64) -> std::result::Result<(), String> {
    let max_diag = omega.diagonal().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if !(max_diag <= tol) {
        return Err(format!("diagonal entry {max_diag:e} is positive"));
    }
    let max_eig = eig_hermitian(omega).map_err(|e| e.to_string())?.max();
    if !(max_eig <= 1.0 + tol) {
        return Err(format!("largest eigenvalue {max_eig} exceeds 1"));
    }
    Ok(())
}

/// Lifts `Z = mu X^{-1}` from the range subspace, adds a multiple of the kernel
/// projector so that `Z_ii >= 1` on pinned indices, rescales by
/// `1 / min_i Z_ii` if needed, and returns `omega = 1 - Z`.
pub fn dual_witness(rho: &DensityMatrix, state: &SolverState) -> Result<DualWitness> {
    let d = rho.dim();
    let mut z = match (&state.slack_inverse, &state.range_basis) {
        (None, _) => ComplexMatrix::zeros(d),
        (Some(w), None) => w.scale(state.mu),
        (Some(w), Some(basis)) => {
            let r = basis.len();
            ComplexMatrix::from_fn(d, |i, j| {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..r {
                    for b in 0..r {
                        acc += basis[a][i] * w[(a, b)] * basis[b][j].conj();
                    }
                }
                acc * state.mu
            })
        }
    };

    if !state.kernel_basis.is_empty() {
        let kernel = ComplexMatrix::from_fn(d, |i, j| state.kernel_basis.iter().map(|k| k[i] * k[j].conj()).sum());
        let mut c: f64 = 0.0;
        for i in (0..d).filter(|i| !state.free.contains(i)) {
            let kii = kernel[(i, i)].re;
            if !(kii > 0.0) {
                return Err(Error::InfeasibleWitness(format!("pinned index {i} has no kernel overlap")));
            }
            c = c.max((1.0 - z[(i, i)].re) / kii);
        }
        if c > 0.0 {
            z = &z + &kernel.scale(c);
        }
    }

    let min_diag = z.diagonal().into_iter().fold(f64::INFINITY, f64::min);
    if !(min_diag > 0.0) {
        return Err(Error::InfeasibleWitness(format!("lifted witness has diagonal {min_diag:e}")));
    }
    if min_diag < 1.0 {
        z = z.scale(1.0 / min_diag);
    }
    let omega = (&ComplexMatrix::identity(d) - &z).hermitian_part();
    check_dual_feasible(&omega, DUAL_FEAS_TOL).map_err(Error::InfeasibleWitness)?;
    DualWitness::new(rho, omega)
}
