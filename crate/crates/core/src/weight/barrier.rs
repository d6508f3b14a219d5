//! Log-det barrier path following for
//!
//! ```text
//! maximize  sum_i lambda_i   s.t.  rho - diag(lambda) >= 0,  lambda >= 0
//! ```
//!
//! Indices whose basis vector lies outside the range of `rho` are pinned to
//! zero, and the remaining problem is compressed onto the range, where the
//! slack `X(lambda) = V† rho V - sum_i lambda_i a_i a_i†` (with `a_i = V† |i>`)
//! is positive definite on the whole central path.

use crate::error::Result;
use crate::hermitian::{basis_vector, eig_hermitian, inner, ComplexMatrix, Cholesky, HermitianEig, C64};
use crate::states::DensityMatrix;

use super::SolverConfig;

/// Armijo fraction and backtracking factor.
const ARMIJO: f64 = 0.25;
const BACKTRACK: f64 = 0.5;
/// Below this (scaled) Newton decrement the full step is taken when feasible.
const QUADRATIC_REGION: f64 = 0.2;
const MIN_STEP: f64 = 1e-20;

/// Snapshot of the path-following iterate, enough to lift a dual witness.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub dim: usize,
    /// Current barrier parameter.
    pub mu: f64,
    /// Full-length weight vector; pinned indices are exactly zero.
    pub lambda: Vec<f64>,
    /// Indices allowed to be positive.
    pub free: Vec<usize>,
    /// Orthonormal basis of range(rho); `None` when rho is full rank (identity basis).
    pub range_basis: Option<Vec<Vec<C64>>>,
    /// Orthonormal basis of the numerical kernel of rho.
    pub kernel_basis: Vec<Vec<C64>>,
    /// Inverse of the compressed slack at `lambda`, if any index is free.
    pub slack_inverse: Option<ComplexMatrix>,
    pub outer_iterations: usize,
    pub newton_iterations: usize,
    /// Largest scaled Newton decrement left at the end of any centering step.
    pub worst_decrement: f64,
}

impl SolverState {
    /// `mu * (range slots + free weights)`, the exact gap on the central path.
    pub fn estimated_gap(&self) -> f64 {
        let r = self.range_basis.as_ref().map_or(self.dim, |b| b.len());
        self.mu * (r + self.free.len()) as f64
    }
}

struct Reduced {
    /// `V† rho V`
    base: ComplexMatrix,
    /// `a_i = V† |i>` for the free indices.
    columns: Vec<Vec<C64>>,
}

impl Reduced {
    fn slack(&self, lambda: &[f64]) -> ComplexMatrix {
        let mut x = self.base.clone();
        let r = x.dim();
        for (a, &l) in self.columns.iter().zip(lambda) {
            for i in 0..r {
                for j in 0..r {
                    x[(i, j)] -= a[i] * a[j].conj() * l;
                }
            }
        }
        x
    }

    /// Gram matrix `G_ij = a_i† W a_j`.
    fn gram(&self, w: &ComplexMatrix) -> Vec<Vec<C64>> {
        let wa: Vec<Vec<C64>> = self.columns.iter().map(|a| w.mul_vec(a)).collect();
        self.columns.iter().map(|ai| wa.iter().map(|waj| inner(ai, waj)).collect()).collect()
    }
}

/// Follows the central path. Once the estimated gap drops below
/// `cfg.certified_gap_tol`, each centered iterate is offered to `accept`;
/// returning `true` stops the schedule there.
pub(super) fn run<F>(rho: &DensityMatrix, eig: &HermitianEig, cfg: &SolverConfig, mut accept: F) -> Result<SolverState>
where
    F: FnMut(&SolverState) -> bool,
{
    let d = rho.dim();
    let (range, kernel) = eig.split_range(cfg.rank_tol);
    let full_rank = kernel.is_empty();

    // |i> is in range iff its kernel component is negligible.
    let free: Vec<usize> = (0..d)
        .filter(|&i| {
            let residual: f64 = kernel.iter().map(|k| k[i].norm_sqr()).sum::<f64>().sqrt();
            residual <= cfg.rank_tol
        })
        .collect();

    let reduced = if full_rank {
        Reduced { base: rho.matrix().clone(), columns: free.iter().map(|&i| basis_vector(d, i)).collect() }
    } else {
        let r = range.len();
        let base = ComplexMatrix::from_fn(r, |a, b| rho.matrix().sandwich(&range[a], &range[b]));
        let columns = free.iter().map(|&i| range.iter().map(|v| v[i].conj()).collect()).collect();
        Reduced { base: base.hermitian_part(), columns }
    };

    let mut state = SolverState {
        dim: d,
        mu: cfg.barrier_mu0,
        lambda: vec![0.0; d],
        free: free.clone(),
        range_basis: if full_rank { None } else { Some(range) },
        kernel_basis: kernel,
        slack_inverse: None,
        outer_iterations: 0,
        newton_iterations: 0,
        worst_decrement: 0.0,
    };
    if free.is_empty() {
        state.mu = 0.0;
        accept(&state);
        return Ok(state);
    }

    // Strictly feasible start: each a_i a_i† / (a_i† B^{-1} a_i) <= B, so
    // lambda_i = 1 / (2 n a_i† B^{-1} a_i) keeps X >= B / 2.
    let n = free.len();
    let base_chol = match Cholesky::new(&reduced.base) {
        Some(c) => c,
        None => {
            // The range compression is positive definite by construction;
            // failing here means the spectrum is degenerate at round-off.
            return Err(crate::error::Error::SolverStall { mu: cfg.barrier_mu0, lower: 0.0, upper: 1.0 });
        }
    };
    let mut lambda: Vec<f64> = reduced
        .columns
        .iter()
        .map(|a| 1.0 / (2.0 * n as f64 * inner(a, &base_chol.solve(a)).re))
        .collect();

    let mut mu = cfg.barrier_mu0;
    let mut slack_inv = base_chol.inverse();
    loop {
        state.outer_iterations += 1;
        let (inv, iters, dec) = center(&reduced, &mut lambda, mu, cfg);
        state.newton_iterations += iters;
        state.worst_decrement = state.worst_decrement.max(dec);
        if let Some(inv) = inv {
            slack_inv = inv;
        }
        for (k, &i) in free.iter().enumerate() {
            state.lambda[i] = lambda[k];
        }
        state.mu = mu;
        state.slack_inverse = Some(slack_inv.clone());
        let est = mu * (reduced.base.dim() + n) as f64;
        if est <= cfg.certified_gap_tol && accept(&state) {
            break;
        }
        if mu <= cfg.mu_floor {
            break;
        }
        mu = (mu * cfg.mu_shrink).max(cfg.mu_floor);
    }
    Ok(state)
}

/// Raises every free weight by the same amount until the slack turns singular,
/// stopping a relative `1e-9` short of the exact crossing. Returns the new
/// slack diagonal `rho_ii - lambda_i`, kept separately because for small
/// weights it is far below the resolution of `lambda` itself. `None` when the
/// slack at `state` is not positive definite on the range.
pub(super) fn push_to_boundary(rho: &DensityMatrix, state: &SolverState) -> Option<Vec<f64>> {
    if state.free.is_empty() {
        return None;
    }
    let d = state.dim;
    let diag: Vec<f64> = (0..d).map(|i| rho.matrix()[(i, i)].re - state.lambda[i]).collect();
    let slack = with_diagonal(rho.matrix(), &diag);
    let mut dir = vec![0.0; d];
    for &i in &state.free {
        dir[i] = 1.0;
    }
    let dir = ComplexMatrix::from_diagonal(&dir);
    let (x, p) = match &state.range_basis {
        None => (slack, dir),
        Some(v) => {
            let r = v.len();
            (
                ComplexMatrix::from_fn(r, |a, b| slack.sandwich(&v[a], &v[b])).hermitian_part(),
                ComplexMatrix::from_fn(r, |a, b| dir.sandwich(&v[a], &v[b])),
            )
        }
    };
    let eig = eig_hermitian(&x).ok()?;
    if !(eig.min() > 0.0) {
        return None;
    }
    // Largest t with X - t P >= 0 is 1 / max eig(X^{-1/2} P X^{-1/2}).
    let inv_sqrt = eig.map_spectrum(|e| 1.0 / e.sqrt());
    let scaled = &(&inv_sqrt * &p) * &inv_sqrt;
    let top = eig_hermitian(&scaled.hermitian_part()).ok()?.max();
    let t = (1.0 - 1e-9) / top;
    if !(t > 0.0 && t.is_finite()) {
        return None;
    }
    let mut diag = diag;
    for &i in &state.free {
        diag[i] -= t;
    }
    Some(diag)
}

/// `m` with its diagonal replaced by `diag`.
pub(super) fn with_diagonal(m: &ComplexMatrix, diag: &[f64]) -> ComplexMatrix {
    let mut out = m.clone();
    for (i, &v) in diag.iter().enumerate() {
        out[(i, i)] = C64::new(v, 0.0);
    }
    out
}

/// Barrier value relative to the reference point, computed term by term so that
/// differences far below `|sum lambda|` survive rounding.
struct Point {
    lambda: Vec<f64>,
    chol: Cholesky,
    log_det: f64,
}

impl Point {
    fn new(reduced: &Reduced, lambda: Vec<f64>) -> Option<Self> {
        if lambda.iter().any(|&l| !(l > 0.0)) {
            return None;
        }
        let chol = Cholesky::new(&reduced.slack(&lambda))?;
        let log_det = chol.log_det();
        Some(Self { lambda, chol, log_det })
    }

    /// `f(other) - f(self)` for `f = -sum l - mu log det X - mu sum log l`.
    fn delta(&self, other: &Point, mu: f64) -> f64 {
        let lin: f64 = self.lambda.iter().zip(&other.lambda).map(|(a, b)| b - a).sum();
        let logs: f64 = self.lambda.iter().zip(&other.lambda).map(|(a, b)| ((b - a) / a).ln_1p()).sum();
        -lin - mu * (other.log_det - self.log_det) - mu * logs
    }
}

/// Damped Newton centering at fixed `mu`. Returns the slack inverse at the
/// final point, the iteration count and the final scaled decrement.
fn center(reduced: &Reduced, lambda: &mut Vec<f64>, mu: f64, cfg: &SolverConfig) -> (Option<ComplexMatrix>, usize, f64) {
    let n = lambda.len();
    let Some(mut point) = Point::new(reduced, lambda.clone()) else {
        return (None, 0, f64::INFINITY);
    };
    let mut iters = 0;
    let mut dec2 = f64::INFINITY;
    while iters < cfg.max_newton_iters {
        let w = point.chol.inverse();
        let g = reduced.gram(&w);
        let grad: Vec<f64> = (0..n).map(|i| -1.0 + mu * g[i][i].re - mu / point.lambda[i]).collect();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = mu * g[i][j].norm_sqr();
            }
            hess[i * n + i] += mu / (point.lambda[i] * point.lambda[i]);
        }
        let Some(step) = solve_spd(&hess, n, &grad.iter().map(|x| -x).collect::<Vec<_>>()) else {
            break;
        };
        let slope: f64 = grad.iter().zip(&step).map(|(a, b)| a * b).sum();
        dec2 = (-slope / mu).max(0.0);
        if dec2 / 2.0 <= cfg.newton_tol {
            break;
        }
        iters += 1;

        let quadratic = dec2.sqrt() < QUADRATIC_REGION;
        let mut t = 1.0;
        let mut accepted = None;
        while t >= MIN_STEP {
            let trial: Vec<f64> = point.lambda.iter().zip(&step).map(|(l, s)| l + t * s).collect();
            if let Some(p) = Point::new(reduced, trial) {
                if quadratic || point.delta(&p, mu) <= ARMIJO * t * slope {
                    accepted = Some(p);
                    break;
                }
            }
            t *= BACKTRACK;
        }
        match accepted {
            Some(p) => point = p,
            None => break,
        }
    }
    let inv = point.chol.inverse();
    *lambda = point.lambda;
    (Some(inv), iters, dec2)
}

/// Solves `H x = b` for symmetric positive definite `H` (row-major, `n x n`).
fn solve_spd(h: &[f64], n: usize, b: &[f64]) -> Option<Vec<f64>> {
    // Jacobi scaling keeps the factorization stable when mu / lambda^2 spans
    // many orders of magnitude.
    let s: Vec<f64> = (0..n).map(|i| 1.0 / h[i * n + i].sqrt()).collect();
    if s.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = h[j * n + j] * s[j] * s[j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut v = h[i * n + j] * s[i] * s[j];
            for k in 0..j {
                v -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = v / d;
        }
    }
    let mut y: Vec<f64> = (0..n).map(|i| b[i] * s[i]).collect();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    Some(y.iter().zip(&s).map(|(a, b)| a * b).collect())
}
