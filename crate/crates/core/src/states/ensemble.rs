//! Seeded random-state ensembles.
//!
//! State `i` of an ensemble is drawn from its own ChaCha substream keyed by
//! `seed ^ i`, so any index range can be generated independently and the
//! merged sequence is identical regardless of how the work is split.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DensityMatrix;
use crate::error::{Error, Result};
use crate::hermitian::{inner, norm, ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Normalized complex Gaussian vector.
    HaarPure,
    /// `G G† / Tr(G G†)` with square Ginibre `G` (Hilbert–Schmidt measure).
    GinibreMixed,
    /// Qubit with Bloch vector uniform in the unit ball.
    BlochBallUniform,
}

impl EnsembleKind {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::HaarPure => "haar_pure",
            EnsembleKind::GinibreMixed => "ginibre_mixed",
            EnsembleKind::BlochBallUniform => "bloch_ball_uniform",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar_pure" => Ok(EnsembleKind::HaarPure),
            "ginibre_mixed" => Ok(EnsembleKind::GinibreMixed),
            "bloch_ball_uniform" => Ok(EnsembleKind::BlochBallUniform),
            other => Err(Error::BadParameters(format!("unknown ensemble '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::DimensionZero);
        }
        if self.count == 0 {
            return Err(Error::BadParameters("count must be positive".into()));
        }
        if self.kind == EnsembleKind::BlochBallUniform && self.dim != 2 {
            return Err(Error::UnsupportedDim { kind: self.kind.name(), dim: self.dim });
        }
        Ok(())
    }
}

/// Generator for state `index` of stream `seed`: the index is XORed into a
/// scrambled seed, so nearby seeds do not reuse each other's substreams.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(scramble(seed) ^ index)
}

/// SplitMix64 finalizer.
fn scramble(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Box–Muller normal deviates over any uniform generator.
pub struct GaussianSource<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: Rng> GaussianSource<R> {
    pub fn new(rng: R) -> Self {
        Self { rng, spare: None }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Standard normal deviate.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2 = self.rng.gen::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Standard complex Gaussian, `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng>(src: &mut GaussianSource<R>) -> C64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    C64::new(src.normal() * h, src.normal() * h)
}

/// Haar-random unit vector.
pub fn haar_vector<R: Rng>(dim: usize, src: &mut GaussianSource<R>) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(src)).collect();
        let n = norm(&v);
        if n > 1e-150 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Haar-random unitary from Gram–Schmidt on Ginibre columns.
pub fn haar_unitary<R: Rng>(dim: usize, src: &mut GaussianSource<R>) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| complex_gaussian(src)).collect();
        for _ in 0..2 {
            for c in &cols {
                let proj = inner(c, &v);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// Hilbert–Schmidt random mixed state.
pub fn ginibre_state<R: Rng>(dim: usize, src: &mut GaussianSource<R>) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| complex_gaussian(src));
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new_unchecked(w.scale(1.0 / tr))
}

fn bloch_ball_state<R: Rng>(src: &mut GaussianSource<R>) -> DensityMatrix {
    let dir = loop {
        let d = [src.normal(), src.normal(), src.normal()];
        let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if n > 1e-150 {
            break [d[0] / n, d[1] / n, d[2] / n];
        }
    };
    let r = src.uniform().cbrt();
    let (u1, u2, u3) = (r * dir[0], r * dir[1], r * dir[2]);
    let m = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => C64::new(0.5 * (1.0 + u3), 0.0),
        (1, 1) => C64::new(0.5 * (1.0 - u3), 0.0),
        (0, 1) => C64::new(0.5 * u1, -0.5 * u2),
        _ => C64::new(0.5 * u1, 0.5 * u2),
    });
    DensityMatrix::new_unchecked(m)
}

/// The `index`-th state of the ensemble `(kind, dim, seed)`.
pub fn sample_one(kind: EnsembleKind, dim: usize, seed: u64, index: u64) -> Result<DensityMatrix> {
    EnsembleSpec { kind, dim, count: 1, seed }.validate()?;
    let mut src = GaussianSource::new(substream(seed, index));
    Ok(match kind {
        EnsembleKind::HaarPure => DensityMatrix::new_unchecked(ComplexMatrix::outer(&haar_vector(dim, &mut src))),
        EnsembleKind::GinibreMixed => ginibre_state(dim, &mut src),
        EnsembleKind::BlochBallUniform => bloch_ball_state(&mut src),
    })
}

pub fn sample(spec: &EnsembleSpec) -> Result<Vec<DensityMatrix>> {
    spec.validate()?;
    (0..spec.count as u64).into_par_iter().map(|i| sample_one(spec.kind, spec.dim, spec.seed, i)).collect()
}
