//! Census of qubits on and off the line `C_w = C_l1`.
//!
//! The on-line region is the double cone `|u3| + sqrt(u1^2 + u2^2) <= 1`
//! inside the Bloch ball; its complement in the ball has the same volume.

use rayon::prelude::*;
use serde::Serialize;

use super::{bloch_to_state, l1_comparison, qubit_weight, BlochVector};
use crate::error::{Error, Result};
use crate::states::{sample_one, DensityMatrix, EnsembleKind};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VolumeCensus {
    /// States with `C_w > C_l1`.
    pub strict: usize,
    /// States with `C_w = C_l1` within the on-line tolerance.
    pub equal: usize,
    /// `strict / equal` (infinite when `equal == 0`).
    pub ratio: f64,
}

pub fn census<'a>(states: impl IntoIterator<Item = &'a DensityMatrix>) -> Result<VolumeCensus> {
    let (mut strict, mut equal) = (0, 0);
    for rho in states {
        if l1_comparison(rho)?.on_line {
            equal += 1;
        } else {
            strict += 1;
        }
    }
    Ok(VolumeCensus { strict, equal, ratio: ratio(strict, equal) })
}

fn ratio(strict: usize, equal: usize) -> f64 {
    if equal == 0 {
        f64::INFINITY
    } else {
        strict as f64 / equal as f64
    }
}

/// Monte Carlo census over `count` uniform Bloch-ball qubits.
pub fn volume_ratio(count: usize, seed: u64) -> Result<VolumeCensus> {
    if count == 0 {
        return Err(Error::BadParameters("count must be at least 1".into()));
    }
    let on_line: Vec<bool> = (0..count as u64)
        .into_par_iter()
        .map(|i| Ok(l1_comparison(&sample_one(EnsembleKind::BlochBallUniform, 2, seed, i)?)?.on_line))
        .collect::<Result<_>>()?;
    let equal = on_line.iter().filter(|&&b| b).count();
    let strict = count - equal;
    Ok(VolumeCensus { strict, equal, ratio: ratio(strict, equal) })
}

/// Exact ball-minus-double-cone over double-cone volume ratio with cone height
/// equal to the radius. Volumes are counted in units of `pi r^3 / 3`, where the
/// ball is 4 and each cone 1, so the result is exact in floating point.
pub fn analytic_cone_ratio() -> f64 {
    let ball = 4.0;
    let cone = 1.0;
    (ball - 2.0 * cone) / (2.0 * cone)
}

/// `C_w - C_l1` along the vertical segment of fixed transverse length `a`.
pub fn cone_excess(a: f64, u3: f64) -> Result<f64> {
    let rho = bloch_to_state(&BlochVector::new(a, 0.0, u3)?)?;
    Ok(qubit_weight(&rho)? - rho.l1_coherence())
}
